//! Separation of nuclear-spin-dependent (NSD) and -independent (NSI) PNC parts from
//! Larmor shifts measured on two hyperfine Zeeman pairs of an I = 3/2 isotope.

use serde::{Deserialize, Serialize};

use crate::angular::clebsch_gordan;
use crate::error::{Error, Result};
use crate::half::Half;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub nsi: f64,
    pub nsd: f64,
    pub sigma_nsi: f64,
    pub sigma_nsd: f64,
    /// Output covariance [[nsi, cov], [cov, nsd]].
    pub covariance: [[f64; 2]; 2],
    /// 2-norm condition number of the coefficient matrix.
    pub condition_number: f64,
}

fn condition_number(c: &[[f64; 2]; 2]) -> f64 {
    // Singular values from the eigenvalues of CᵀC.
    let a = c[0][0] * c[0][0] + c[1][0] * c[1][0];
    let b = c[0][0] * c[0][1] + c[1][0] * c[1][1];
    let d = c[0][1] * c[0][1] + c[1][1] * c[1][1];
    let mean = 0.5 * (a + d);
    let disc = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    let (hi, lo) = (mean + disc, (mean - disc).max(0.0));
    if lo == 0.0 {
        f64::INFINITY
    } else {
        (hi / lo).sqrt()
    }
}

/// Forward model: shifts = C · (nsi, nsd).
pub fn nsd_nsi_compose(nsi: f64, nsd: f64, coeffs: &[[f64; 2]; 2]) -> [f64; 2] {
    [
        coeffs[0][0] * nsi + coeffs[0][1] * nsd,
        coeffs[1][0] * nsi + coeffs[1][1] * nsd,
    ]
}

/// Solves C · (nsi, nsd)ᵀ = (shift_a, shift_b)ᵀ and propagates independent input
/// uncertainties through C⁻¹.
pub fn nsd_nsi_separate(shifts: [f64; 2], sigmas: [f64; 2], coeffs: &[[f64; 2]; 2]) -> Result<Separation> {
    if coeffs.iter().flatten().chain(&shifts).chain(&sigmas).any(|x| !x.is_finite()) {
        return Err(Error::Usage("non-finite input to NSD/NSI separation".into()));
    }
    let det = coeffs[0][0] * coeffs[1][1] - coeffs[0][1] * coeffs[1][0];
    let scale: f64 = coeffs.iter().flatten().map(|x| x * x).sum();
    if det.abs() <= 1e-12 * scale {
        return Err(Error::Degeneracy(format!(
            "coefficient matrix {coeffs:?} is singular; these transitions cannot separate NSD from NSI"
        )));
    }
    let inv = [
        [coeffs[1][1] / det, -coeffs[0][1] / det],
        [-coeffs[1][0] / det, coeffs[0][0] / det],
    ];
    let solve = |b: [f64; 2]| [inv[0][0] * b[0] + inv[0][1] * b[1], inv[1][0] * b[0] + inv[1][1] * b[1]];
    let x = solve(shifts);
    // One refinement step against the residual recovers the accuracy lost in C⁻¹.
    let back = nsd_nsi_compose(x[0], x[1], coeffs);
    let dx = solve([shifts[0] - back[0], shifts[1] - back[1]]);
    let (nsi, nsd) = (x[0] + dx[0], x[1] + dx[1]);
    let mut cov = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            cov[i][j] = (0..2).map(|k| inv[i][k] * inv[j][k] * sigmas[k] * sigmas[k]).sum();
        }
    }
    Ok(Separation {
        nsi,
        nsd,
        sigma_nsi: cov[0][0].sqrt(),
        sigma_nsd: cov[1][1].sqrt(),
        covariance: cov,
        condition_number: condition_number(coeffs),
    })
}

const J_S: Half = Half(1);
const I_32: Half = Half(3);
const F_LOWER: Half = Half(4);
const F_UPPER: Half = Half(6);

/// NSI weight of |F=2, m⟩: the electron-spin projection 2⟨J_z⟩ in the uncoupled basis.
fn nsi_weight(m: Half) -> f64 {
    J_S.projections()
        .map(|mj| {
            let cg = clebsch_gordan(J_S, mj, I_32, m - mj, F_LOWER, m);
            cg * cg * f64::from(mj.twice())
        })
        .sum()
}

/// NSD weight of |F=2, m⟩ for F=2 → F′=3 driven by the Δm = ±1 rank-1/rank-2 pair:
/// interference of the rank-1 and rank-2 Clebsch–Gordan weights, normalized by the
/// rank-2 coupling as the first-order resultant is.
fn nsd_weight(m: Half) -> f64 {
    let (mut cross, mut quad) = (0.0, 0.0);
    for q in [Half(-2), Half(2)] {
        let mp = m + q;
        if mp.twice().abs() > F_UPPER.twice() {
            continue;
        }
        let c1 = clebsch_gordan(F_LOWER, m, Half(2), q, F_UPPER, mp);
        let c2 = clebsch_gordan(F_LOWER, m, Half(4), q, F_UPPER, mp);
        cross += c1 * c2;
        quad += c2 * c2;
    }
    if quad == 0.0 {
        0.0
    } else {
        cross / quad.sqrt()
    }
}

/// Coefficient rows [NSI, NSD] for the Larmor shifts of the F=2 pairs ±m_a and ±m_b.
pub fn hyperfine_coefficients(m_a: Half, m_b: Half) -> Result<[[f64; 2]; 2]> {
    let row = |m: Half| -> Result<[f64; 2]> {
        if m.twice() <= 0 || m.twice() > F_LOWER.twice() || !m.is_integer() {
            return Err(Error::Config(format!("m_F = {m} is not a positive F=2 projection")));
        }
        Ok([nsi_weight(m) - nsi_weight(-m), nsd_weight(m) - nsd_weight(-m)])
    };
    Ok([row(m_a)?, row(m_b)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn identity_coefficients() {
        let s = nsd_nsi_separate([3.0, 4.0], [0.1, 0.2], &[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!((s.nsd, s.nsi), (4.0, 3.0));
        assert_eq!((s.sigma_nsi, s.sigma_nsd), (0.1, 0.2));
        assert_eq!(s.condition_number, 1.0);
    }

    #[test]
    fn sum_difference_coefficients() {
        let c = [[1.0, 1.0], [1.0, -1.0]];
        let shifts = nsd_nsi_compose(1.0, 0.1, &c);
        assert_relative_eq!(shifts[0], 1.1, max_relative = 1e-15);
        assert_relative_eq!(shifts[1], 0.9, max_relative = 1e-15);
        let s = nsd_nsi_separate(shifts, [0.0, 0.0], &c).unwrap();
        assert_relative_eq!(s.nsd, 0.1, max_relative = 1e-14);
        assert_relative_eq!(s.nsi, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn singular_rejected() {
        let e = nsd_nsi_separate([1.0, 2.0], [0.0, 0.0], &[[1.0, 2.0], [2.0, 4.0]]);
        assert!(matches!(e, Err(Error::Degeneracy(_))));
    }

    #[test]
    fn nsi_weight_is_projection_theorem_value() {
        // 2⟨J_z⟩ = m/2 inside F = 2 built from J = 1/2, I = 3/2.
        for m in F_LOWER.projections() {
            assert_relative_eq!(nsi_weight(m), m.value() / 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn nsd_weight_is_odd() {
        for m in F_LOWER.projections() {
            assert_relative_eq!(nsd_weight(m), -nsd_weight(-m), epsilon = 1e-14);
        }
    }

    #[test]
    fn hyperfine_pairs_separate() {
        let c = hyperfine_coefficients(Half(4), Half(2)).unwrap();
        let det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
        assert!(det.abs() > 1e-3, "{c:?}");
        assert_relative_eq!(c[0][0], 2.0, max_relative = 1e-14);
        assert_relative_eq!(c[1][0], 1.0, max_relative = 1e-14);
        let (nsi, nsd) = (0.196, 0.0123);
        let s = nsd_nsi_separate(nsd_nsi_compose(nsi, nsd, &c), [0.0; 2], &c).unwrap();
        assert_relative_eq!(s.nsi, nsi, max_relative = 1e-12);
        assert_relative_eq!(s.nsd, nsd, max_relative = 1e-12);
        let same = hyperfine_coefficients(Half(2), Half(2)).unwrap();
        assert!(matches!(nsd_nsi_separate([1.0, 1.0], [0.0; 2], &same), Err(Error::Degeneracy(_))));
        assert!(hyperfine_coefficients(Half(1), Half(2)).is_err());
    }

    proptest! {
        #[test]
        fn random_round_trip(
            a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0, d in -5.0f64..5.0,
            nsi in -1.0f64..1.0, nsd in -1.0f64..1.0,
        ) {
            let coeffs = [[a, b], [c, d]];
            let det = a * d - b * c;
            prop_assume!(det.abs() > 0.05 * (a * a + b * b + c * c + d * d));
            let s = nsd_nsi_separate(nsd_nsi_compose(nsi, nsd, &coeffs), [0.0; 2], &coeffs).unwrap();
            prop_assert!((s.nsi - nsi).abs() <= 1e-12 * (1.0 + nsi.abs()) * s.condition_number);
            prop_assert!((s.nsd - nsd).abs() <= 1e-12 * (1.0 + nsd.abs()) * s.condition_number);
        }

        #[test]
        fn uncertainty_propagation_matches_linearity(s1 in 0.0f64..1.0, s2 in 0.0f64..1.0) {
            let c = [[2.0, 0.5], [1.0, -1.5]];
            let out = nsd_nsi_separate([0.0, 0.0], [s1, s2], &c).unwrap();
            let det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
            let var_nsi = (c[1][1] * s1).powi(2) / det.powi(2) + (c[0][1] * s2).powi(2) / det.powi(2);
            prop_assert!((out.sigma_nsi.powi(2) - var_nsi).abs() <= 1e-12 * (1.0 + var_nsi));
        }
    }
}
