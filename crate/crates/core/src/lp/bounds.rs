//! Closed-form functions behind the level-by-level optimality argument.
//!
//! `t` is `t_ε = tanh(ε/2)`; `x` and `y` are the normalized half-widths
//! `m1/k`, `m2/k` of the two blocks of a staircase column.

use std::f64::consts::PI;

/// `ℒ(a1,a2,x,y) = (a2−a1)[2t + 4t²(y−x)] − 4t²(y−x)² − (a1+a2−1)² + 1`.
pub fn final_inequality_l(a1: f64, a2: f64, x: f64, y: f64, t: f64) -> f64 {
    let d = y - x;
    let t2 = t * t;
    let s = a1 + a2 - 1.0;
    (a2 - a1) * (2.0 * t + 4.0 * t2 * d) - 4.0 * t2 * d * d - s * s + 1.0
}

/// `ℒ(1−πy², πy², x, y)` in expanded form.
pub fn lemma3_l(x: f64, y: f64, t: f64) -> f64 {
    let d = y - x;
    let t2 = t * t;
    let w = 2.0 * PI * y * y - 1.0;
    2.0 * t * w + 4.0 * t2 * d * w - 4.0 * t2 * d * d + 1.0
}

/// `ℒ(πx², πy², x, y)` in expanded form.
pub fn lemma4_l(x: f64, y: f64, t: f64) -> f64 {
    let d = y - x;
    let t2 = t * t;
    let sq = y * y - x * x;
    let r = x * x + y * y;
    2.0 * t * PI * sq + 4.0 * t2 * PI * d * sq - PI * PI * r * r + 2.0 * PI * r - 4.0 * t2 * d * d
}

/// `G(a,b,t) = t·a(2a² − 4b² + (4/π)b) + b² − a²`, with `a = x−y`, `b = x+y`.
pub fn interior_stationarity_g(a: f64, b: f64, t: f64) -> f64 {
    t * a * (2.0 * a * a - 4.0 * b * b + 4.0 / PI * b) + b * b - a * a
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(n: usize, lo: f64, hi: f64) -> impl Iterator<Item = f64> + Clone {
        (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
    }

    #[test]
    fn final_inequality_examples() {
        for t in [0.0, 0.2, 0.5] {
            assert_eq!(final_inequality_l(0.0, 0.0, 0.0, 0.0, t), 0.0);
        }
        // (−1)(0.8) − 0 − 0 + 1
        assert!((final_inequality_l(1.0, 0.0, 0.0, 0.0, 0.4) - 0.2).abs() < 1e-15);
        for t in [0.1, 0.3, 0.45] {
            assert!((lemma3_l(0.0, 0.0, t) - (1.0 - 2.0 * t)).abs() < 1e-15);
        }
    }

    #[test]
    fn lemma3_examples() {
        for t in [0.05, 0.2, 0.4808] {
            assert!((lemma3_l(0.5, 0.0, t) - (t - 1.0).powi(2)).abs() < 1e-14);
        }
        let t = 4.0 * PI / (1.0 + 8.0 * PI);
        assert!(lemma3_l(0.0, 1.0 / (4.0 * PI), t).abs() < 1e-15);
        // Slightly past the threshold the minimum goes negative.
        assert!(lemma3_l(0.0, 1.0 / (4.0 * PI), t + 1e-3) < 0.0);
    }

    #[test]
    fn lemma4_examples() {
        for t in [0.0, 0.3, 0.5] {
            assert_eq!(lemma4_l(0.0, 0.0, t), 0.0);
        }
    }

    #[test]
    fn stationarity_examples() {
        assert!((interior_stationarity_g(0.2, 0.5, 0.5) - 0.181_661_977_236_758_13).abs() < 1e-15);
        for a in [0.1, 0.3, 0.5] {
            let expected = 0.5 * a * a * (4.0 / PI - 2.0 * a);
            assert!((interior_stationarity_g(a, a, 0.5) - expected).abs() < 1e-15);
        }
        assert!((interior_stationarity_g(0.0, 0.7, 0.3) - 0.49).abs() < 1e-15);
    }

    #[test]
    fn expanded_forms_match_the_general_expression() {
        for x in grid(21, 0.0, 0.5) {
            for y in grid(21, 0.0, 0.5) {
                for t in [0.1, 0.3, 0.5] {
                    let a2 = PI * y * y;
                    let l3 = final_inequality_l(1.0 - a2, a2, x, y, t);
                    let l4 = final_inequality_l(PI * x * x, a2, x, y, t);
                    assert!((lemma3_l(x, y, t) - l3).abs() < 1e-13);
                    assert!((lemma4_l(x, y, t) - l4).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn lemma_grids_are_nonnegative() {
        for t in [0.1, 0.3, 0.4808] {
            for x in grid(101, 0.0, 0.5) {
                for y in grid(101, 0.0, 0.5).filter(|y| PI * (x * x + y * y) <= 1.0) {
                    assert!(lemma3_l(x, y, t) >= -1e-12, "lemma3 t={t} x={x} y={y}");
                }
            }
        }
        for t in [0.1, 0.3, 0.5] {
            for x in grid(101, 0.0, 0.5) {
                for y in grid(101, 0.0, 0.5).filter(|y| PI * (x * x + y * y) <= 1.0) {
                    assert!(lemma4_l(x, y, t) >= -1e-12, "lemma4 t={t} x={x} y={y}");
                }
            }
        }
    }

    #[test]
    fn final_inequality_on_the_constraint_region() {
        for t in [0.1, 0.3, 0.4808] {
            for y in grid(101, 0.0, 0.5) {
                let a2 = PI * y * y;
                if a2 > 1.0 {
                    continue;
                }
                for x in grid(101, 0.0, 0.5) {
                    let floor = PI * x * x;
                    for a1 in grid(101, 0.0, 1.0 - a2).filter(|&a| a >= floor) {
                        let v = final_inequality_l(a1, a2, x, y, t);
                        assert!(v >= -1e-12, "t={t} a1={a1} x={x} y={y}: {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn stationarity_grid_is_positive() {
        for t in [0.1, 0.3, 0.5] {
            for b in grid(201, 0.0, 1.0).skip(1) {
                for a in grid(201, 0.0, b.min(0.5)).skip(1) {
                    assert!(interior_stationarity_g(a, b, t) > 0.0, "t={t} a={a} b={b}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn lemma4_nonnegative(x in 0.0f64..0.5, y in 0.0f64..0.5, t in 0.0f64..0.5) {
            prop_assume!(PI * (x * x + y * y) <= 1.0);
            prop_assert!(lemma4_l(x, y, t) >= -1e-12);
        }

        #[test]
        fn lemma3_nonnegative(x in 0.0f64..0.5, y in 0.0f64..0.5, t in 0.0f64..0.4808) {
            prop_assume!(PI * (x * x + y * y) <= 1.0);
            prop_assert!(lemma3_l(x, y, t) >= -1e-12);
        }

        #[test]
        fn stationarity_positive(b in 1e-6f64..1.0, frac in 1e-6f64..1.0, t in 0.0f64..0.5) {
            let a = frac * b.min(0.5);
            prop_assert!(interior_stationarity_g(a, b, t) > 0.0);
        }
    }
}
