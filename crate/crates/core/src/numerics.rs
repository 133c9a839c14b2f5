//! Standard normal primitives on the extended real line.
//!
//! `φ(±∞) = 0`, `Φ(−∞) = 0`, `Φ(+∞) = 1` and `Φ⁻¹(0) = −∞`, `Φ⁻¹(1) = +∞`,
//! which is what the quantizer endpoints rely on.
//!
//! Accuracy: `std_normal_cdf` is within 1e-15 absolute on `|x| ≤ 8`, and
//! `std_normal_quantile` round-trips to within a few ulps of `p` on
//! `[1e-300, 1 - 1e-16]`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

/// `1/√(2π)`, the density at zero.
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// A value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::Domain(format!("probability must lie in [0, 1], got {value}")))
        }
    }

    pub const HALF: Probability = Probability(0.5);

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// Standard normal density. Total on the extended reals.
#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal distribution function `Φ(x) = erfc(−x/√2)/2`.
#[inline]
pub fn std_normal_cdf(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Inverse of [`std_normal_cdf`].
///
/// Acklam's rational approximation (relative error about 1.2e-9) followed
/// by one Newton step on `Φ(x) − p`. The upper half is computed by symmetry
/// from `1 − p`, which is exact for `p ≥ 1/2`.
pub fn std_normal_quantile(p: Probability) -> f64 {
    let p = p.get();
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    if p > 0.5 {
        return -lower_quantile(1.0 - p);
    }
    lower_quantile(p)
}

/// Quantile for `0 < p ≤ 1/2`.
fn lower_quantile(p: f64) -> f64 {
    let x = acklam(p);
    if x == 0.0 {
        return 0.0;
    }
    let density = std_normal_pdf(x);
    if density == 0.0 {
        return x;
    }
    x - (std_normal_cdf(x) - p) / density
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] =
        [7.784_695_709_041_462e-3, 3.224_671_290_700_398e-1, 2.445_134_137_142_996, 3.754_408_661_907_416];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}
