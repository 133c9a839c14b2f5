//! Binary privacy channels: randomized response and the sign mechanism,
//! their matrix forms, and an ε-LDP checker for finite channels.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

/// Default absolute tolerance for [`verify_ldp`].
pub const LDP_TOLERANCE: f64 = 1e-12;

/// Column sums of a channel must be within this of one.
const STOCHASTIC_TOLERANCE: f64 = 1e-9;

/// Privacy level ε with the derived keep-probability `p_ε = e^ε/(1+e^ε)`
/// and correlation `t_ε = (e^ε−1)/(e^ε+1) = 2p_ε − 1`.
///
/// `ε = +∞` is accepted as the non-private limit (`p_ε = t_ε = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyParams {
    epsilon: f64,
    p_eps: f64,
    t_eps: f64,
}

impl PrivacyParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(Error::Domain(format!("epsilon must be >= 0, got {epsilon}")));
        }
        // Written in terms of e^{-ε} and tanh so that ε = ∞ stays finite.
        let p_eps = 1.0 / (1.0 + (-epsilon).exp());
        let t_eps = (0.5 * epsilon).tanh();
        Ok(Self { epsilon, p_eps, t_eps })
    }

    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Probability that randomized response keeps its input.
    #[inline]
    pub fn p_eps(&self) -> f64 {
        self.p_eps
    }

    #[inline]
    pub fn t_eps(&self) -> f64 {
        self.t_eps
    }

    /// `e^ε`, the largest admissible likelihood ratio.
    #[inline]
    pub fn ratio_bound(&self) -> f64 {
        self.epsilon.exp()
    }
}

/// One released bit, `−1` or `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(i8)]
pub enum SanitizedBit {
    Minus = -1,
    Plus = 1,
}

impl SanitizedBit {
    /// `sgn(d)` with `sgn(0) = +1`.
    #[inline]
    pub fn sign_of(d: f64) -> Self {
        if d >= 0.0 {
            SanitizedBit::Plus
        } else {
            SanitizedBit::Minus
        }
    }

    #[inline]
    pub fn value(self) -> i8 {
        self as i8
    }

    #[inline]
    pub fn flipped(self) -> Self {
        match self {
            SanitizedBit::Minus => SanitizedBit::Plus,
            SanitizedBit::Plus => SanitizedBit::Minus,
        }
    }
}

impl TryFrom<i64> for SanitizedBit {
    type Error = Error;

    fn try_from(v: i64) -> Result<Self> {
        match v {
            -1 => Ok(SanitizedBit::Minus),
            1 => Ok(SanitizedBit::Plus),
            other => Err(Error::Domain(format!("sanitized bit must be -1 or +1, got {other}"))),
        }
    }
}

/// Keep `bit` with probability `p_ε`, flip it otherwise.
#[inline]
pub fn randomized_response<R: Rng + ?Sized>(bit: SanitizedBit, params: &PrivacyParams, rng: &mut R) -> SanitizedBit {
    if rng.random::<f64>() < params.p_eps {
        bit
    } else {
        bit.flipped()
    }
}

/// Randomized response applied to `sgn(x − center)`.
#[inline]
pub fn sign_mechanism<R: Rng + ?Sized>(x: f64, center: f64, params: &PrivacyParams, rng: &mut R) -> SanitizedBit {
    randomized_response(SanitizedBit::sign_of(x - center), params, rng)
}

/// A finite channel stored as a `k_out × k_in` matrix whose column `j` is
/// the output distribution given input `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MechanismMatrix {
    k_out: usize,
    k_in: usize,
    entries: Vec<f64>,
}

impl MechanismMatrix {
    /// `entries` is row-major, `k_out` rows of `k_in` values.
    pub fn new(k_out: usize, k_in: usize, entries: Vec<f64>) -> Result<Self> {
        if k_out == 0 || k_in == 0 {
            return Err(Error::Shape("mechanism matrix must be non-empty".into()));
        }
        if entries.len() != k_out * k_in {
            return Err(Error::Shape(format!(
                "expected {} entries for a {k_out}x{k_in} matrix, got {}",
                k_out * k_in,
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Domain(format!("channel entries must be finite and >= 0, got {bad}")));
        }
        Ok(Self { k_out, k_in, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k_out = rows.len();
        let k_in = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != k_in) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(k_out, k_in, rows.concat())
    }

    pub fn identity(k: usize) -> Result<Self> {
        let mut entries = vec![0.0; k * k];
        for i in 0..k {
            entries[i * k + i] = 1.0;
        }
        Self::new(k, k, entries)
    }

    /// Every entry `1/k_out`: the channel that releases nothing.
    pub fn uniform(k_out: usize, k_in: usize) -> Result<Self> {
        Self::new(k_out, k_in, vec![1.0 / k_out as f64; k_out * k_in])
    }

    #[inline]
    pub fn k_out(&self) -> usize {
        self.k_out
    }

    #[inline]
    pub fn k_in(&self) -> usize {
        self.k_in
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.k_in + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.entries[row * self.k_in..(row + 1) * self.k_in]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks_exact(self.k_in)
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.k_in];
        for row in self.rows() {
            for (s, v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        sums
    }

    pub fn is_column_stochastic(&self, tol: f64) -> bool {
        self.column_sums().iter().all(|s| (s - 1.0).abs() <= tol)
    }

    /// The channel that first applies `inner` and then `self`
    /// (matrix product `self · inner`).
    pub fn compose(&self, inner: &MechanismMatrix) -> Result<MechanismMatrix> {
        if self.k_in != inner.k_out {
            return Err(Error::Shape(format!(
                "cannot compose {}x{} after {}x{}",
                self.k_out, self.k_in, inner.k_out, inner.k_in
            )));
        }
        let mut entries = vec![0.0; self.k_out * inner.k_in];
        for i in 0..self.k_out {
            for m in 0..self.k_in {
                let a = self.get(i, m);
                if a == 0.0 {
                    continue;
                }
                for j in 0..inner.k_in {
                    entries[i * inner.k_in + j] += a * inner.get(m, j);
                }
            }
        }
        MechanismMatrix::new(self.k_out, inner.k_in, entries)
    }
}

impl fmt::Display for MechanismMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.7}")).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Randomized response as a 2×2 channel: `p_ε` on the diagonal.
pub fn rr_matrix(params: &PrivacyParams) -> MechanismMatrix {
    let p = params.p_eps();
    let q = 1.0 - p;
    MechanismMatrix::new(2, 2, vec![p, q, q, p]).expect("2x2 randomized response is well formed")
}

/// True iff every row satisfies `max ≤ e^ε · min + tol`.
///
/// Fails with a domain error if the columns are not probability vectors.
pub fn verify_ldp(q: &MechanismMatrix, epsilon: f64, tol: f64) -> Result<bool> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::Domain(format!("epsilon must be >= 0, got {epsilon}")));
    }
    if !q.is_column_stochastic(STOCHASTIC_TOLERANCE.max(tol)) {
        return Err(Error::Domain("channel columns must sum to one".into()));
    }
    if epsilon.is_infinite() {
        return Ok(true);
    }
    let bound = epsilon.exp();
    Ok(q.rows().all(|row| {
        let (lo, hi) = row.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        hi <= bound * lo + tol
    }))
}
