//! Significance profiles: the group-normalized Z-score vector.
//!
//! Z-scores are normalized independently within the size-3 group {P3, TRI}
//! and the size-4 group (the remaining six patterns):
//! `s_i = z_i / (Σ_{j∈group(i)} z_j²)^{1/2}`. Every entry lands in [−1, 1]
//! and each group has squared norm 0 or 1, independent of network size.

use crate::census::PatternId;
use crate::nullmodel::ZScores;

/// Index range of the size-3 group in [`PatternId::ALL`] order.
pub const GROUP3: std::ops::Range<usize> = 0..2;
/// Index range of the size-4 group.
pub const GROUP4: std::ops::Range<usize> = 2..8;

/// Truth values at exactly zero impose no sign constraint; this tolerance
/// decides what counts as exactly zero.
pub const ZERO_SIGN_TOLERANCE: f64 = 1e-12;

/// Normalized Z-scores in [`PatternId::ALL`] order. Each entry lies in
/// [−1, 1] and each size group has L2 norm 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignificanceProfile {
    pub s: [f64; 8],
}

impl SignificanceProfile {
    pub fn get(&self, p: PatternId) -> f64 {
        self.s[p.index()]
    }

    /// Squared norms of the two groups, `(size3, size4)`.
    pub fn group_norms_sq(&self) -> (f64, f64) {
        let n3 = self.s[GROUP3].iter().map(|x| x * x).sum();
        let n4 = self.s[GROUP4].iter().map(|x| x * x).sum();
        (n3, n4)
    }

    /// Check the structural invariants: entries in [−1, 1] and group
    /// squared norms in {0, 1} within `tol`.
    pub fn check_invariants(&self, tol: f64) -> bool {
        if self.s.iter().any(|x| !x.is_finite() || x.abs() > 1.0 + tol) {
            return false;
        }
        let (n3, n4) = self.group_norms_sq();
        let ok = |n: f64| n.abs() <= tol || (n - 1.0).abs() <= tol;
        ok(n3) && ok(n4)
    }
}

/// Render a float with 17 significant digits, enough to round-trip any
/// f64 exactly through text. Profile CSV output uses this everywhere.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Normalize Z-scores per size group. A group whose Z-scores are all zero
/// maps to all zeros.
pub fn normalize(z: &ZScores) -> SignificanceProfile {
    let mut s = [0.0f64; 8];
    for group in [GROUP3, GROUP4] {
        let norm: f64 = z.z[group.clone()]
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt();
        if norm > 0.0 {
            for i in group {
                s[i] = z.z[i] / norm;
            }
        }
    }
    SignificanceProfile { s }
}

/// Mean absolute difference over the 8 coordinates — the profile distance
/// used by the agreement heatmaps.
pub fn sp_distance(a: &SignificanceProfile, b: &SignificanceProfile) -> f64 {
    a.s.iter()
        .zip(b.s.iter())
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
        / 8.0
}

fn sign_compatible(pred: f64, truth: f64) -> bool {
    if truth.abs() <= ZERO_SIGN_TOLERANCE {
        return true;
    }
    (pred > 0.0 && truth > 0.0) || (pred < 0.0 && truth < 0.0)
}

/// Threshold correctness: every coordinate must be within `2·theta` of the
/// truth AND carry a compatible sign (2 being the maximum possible
/// per-coordinate error). At `theta = 0.5` this reduces to a pure
/// sign-agreement test.
pub fn is_correct(
    pred: &SignificanceProfile,
    truth: &SignificanceProfile,
    theta: f64,
) -> bool {
    assert!(
        theta > 0.0 && theta <= 0.5,
        "threshold must be in (0, 0.5], got {theta}"
    );
    pred.s.iter().zip(truth.s.iter()).all(|(&p, &t)| {
        (p - t).abs() <= 2.0 * theta && sign_compatible(p, t)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(values: [f64; 8]) -> SignificanceProfile {
        SignificanceProfile { s: values }
    }

    #[test]
    fn normalize_balanced_size3() {
        let z = ZScores {
            z: [1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        };
        let s = normalize(&z);
        let r = 1.0 / 2f64.sqrt();
        assert!((s.s[0] - r).abs() < 1e-12);
        assert!((s.s[1] + r).abs() < 1e-12);
        assert!((s.s[0] - 0.70711).abs() < 1e-5);
    }

    #[test]
    fn normalize_zero_group_stays_zero() {
        let z = ZScores {
            z: [0.0, 0.0, 3.0, 4.0, 0.0, 0.0, 0.0, 0.0],
        };
        let s = normalize(&z);
        assert_eq!(s.s[0], 0.0);
        assert_eq!(s.s[1], 0.0);
        assert!((s.s[2] - 0.6).abs() < 1e-12);
        assert!((s.s[3] - 0.8).abs() < 1e-12);
        assert_eq!(&s.s[4..], &[0.0; 4]);
    }

    #[test]
    fn normalize_scale_invariant() {
        let z = ZScores {
            z: [2.0, -5.0, 1.0, 0.5, -3.0, 7.0, 0.0, -0.25],
        };
        let a = normalize(&z);
        let scaled = ZScores {
            z: z.z.map(|x| x * 41.5),
        };
        let b = normalize(&scaled);
        for i in 0..8 {
            assert!((a.s[i] - b.s[i]).abs() < 1e-12);
        }
        assert!(a.check_invariants(1e-9));
    }

    #[test]
    fn distance_examples() {
        let r = 1.0 / 2f64.sqrt();
        let a = sp([r, -r, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(sp_distance(&a, &a), 0.0);

        let neg = sp(a.s.map(|x| -x));
        let mean_abs_a = a.s.iter().map(|x| x.abs()).sum::<f64>() / 8.0;
        assert!((sp_distance(&a, &neg) - 2.0 * mean_abs_a).abs() < 1e-12);

        let b = sp([1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let zero = sp([0.0; 8]);
        assert!((sp_distance(&b, &zero) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn correctness_exact_prediction() {
        let r = 1.0 / 2f64.sqrt();
        let t = sp([r, -r, 0.1, -0.2, 0.3, 0.4, -0.5, 0.6]);
        for theta in [0.05, 0.1, 0.25, 0.5] {
            assert!(is_correct(&t, &t, theta));
        }
    }

    #[test]
    fn correctness_sign_rule_dominates() {
        // |Δ| = 0.35 ≤ 2·0.25 but the signs differ
        let mut t = sp([0.0; 8]);
        let mut p = sp([0.0; 8]);
        t.s[2] = 0.3;
        p.s[2] = -0.05;
        assert!(!is_correct(&p, &t, 0.25));
    }

    #[test]
    fn correctness_threshold_arithmetic() {
        // theta = 0.05 allows error up to 2×0.05 = 0.1; 0.11 fails
        let mut t = sp([0.0; 8]);
        let mut p = sp([0.0; 8]);
        t.s[2] = 0.05;
        p.s[2] = 0.16;
        assert!(!is_correct(&p, &t, 0.05));
        p.s[2] = 0.14;
        assert!(is_correct(&p, &t, 0.05));
    }

    #[test]
    fn zero_truth_frees_the_sign() {
        let t = sp([0.0; 8]);
        let mut p = sp([0.0; 8]);
        p.s[5] = -0.09;
        assert!(is_correct(&p, &t, 0.05));
    }
}
