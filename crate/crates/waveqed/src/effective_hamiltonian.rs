//! Interaction matrix M of dβ/dt = Mβ and its characteristic roots.
//!
//! Roots from the closed forms keep their formula labels (λ₁ carries the
//! minus sign in front of the square root, λ₃ is the antisymmetric edge mode).
//! [`numeric_eigenvalues`] returns roots sorted by real then imaginary part.

use crate::chain_model::{ChainConfig, ComplexRoots};
use crate::linalg::{self, Mat3};
use crate::{Error, Result, C64};

/// Entries of M in the rotating frame of each qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionMatrix {
    pub entries: Mat3,
}

impl InteractionMatrix {
    pub fn apply(&self, v: &[C64; 3]) -> [C64; 3] {
        linalg::matvec(&self.entries, v)
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.entries)
    }

    /// Largest |M_mn − M_nm|.
    pub fn asymmetry(&self) -> f64 {
        let m = &self.entries;
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..i {
                worst = worst.max((m[i][j] - m[j][i]).norm());
            }
        }
        worst
    }
}

/// Builds M for a (validated) configuration.
///
/// The central-qubit couplings carry √(ΓΓ₀) with (Ω₀/Ω)^{±1/2} and the phase
/// e^{ik₀d} (row 1, 3) or e^{ikd} (row 2); the diagonal picks up ∓iδΩ/2.
pub fn build_matrix(config: &ChainConfig) -> InteractionMatrix {
    let ChainConfig { gamma, gamma0, delta_omega, kd, .. } = *config;
    let g = (gamma * gamma0).sqrt();
    let r = (config.omega0() / config.omega).sqrt();
    let e = C64::from_polar(1.0, kd);
    let e0 = C64::from_polar(1.0, config.k0d());
    let e2 = C64::from_polar(1.0, 2.0 * kd);

    let edge = C64::new(-gamma / 2.0, -delta_omega / 2.0);
    let centre = C64::new(-gamma0 / 2.0, delta_omega / 2.0);
    let to_centre = -0.5 * r * g * e0;
    let from_centre = -0.5 / r * g * e;
    let across = -gamma / 2.0 * e2;

    InteractionMatrix {
        entries: [
            [edge, to_centre, across],
            [from_centre, centre, from_centre],
            [across, to_centre, edge],
        ],
    }
}

/// Roots for identical qubits with the principal branch of R = √(e^{2ikd}+8).
pub fn closed_form_roots_identical(kd: f64, gamma: f64) -> ComplexRoots {
    let e = C64::from_polar(1.0, kd);
    let e2 = e * e;
    let big_r = radicand_identical(kd).sqrt();
    let base = -gamma / 4.0 * e2 - gamma / 2.0;
    ComplexRoots::new(
        base - gamma / 4.0 * e * big_r,
        base + gamma / 4.0 * e * big_r,
        gamma / 2.0 * e2 - gamma / 2.0,
    )
}

/// e^{2ikd} + 8; its modulus never drops below 7.
pub fn radicand_identical(kd: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * kd) + 8.0
}

/// Radicand W of the symmetric-sector roots, general in Γ₀ and δΩ.
///
/// λ₁,₂ = (A+D)/2 ∓ (Γ/4)e^{ikd}√W. Reduces to e^{2ikd}+8 for identical qubits.
pub fn radicand_detuned(config: &ChainConfig) -> C64 {
    let ChainConfig { gamma, gamma0, delta_omega, kd, .. } = *config;
    let s = C64::new(1.0 - gamma0 / gamma, 2.0 * delta_omega / gamma);
    let e2 = C64::from_polar(1.0, 2.0 * kd);
    e2 + 2.0 * s + s * s / e2 + 8.0 * gamma0 / gamma * C64::from_polar(1.0, config.k0d() - kd)
}

/// Symmetric-sector diagonal entries (A, D): A acts on β₁ = β₃, D on β₂.
pub(crate) fn symmetric_sector(config: &ChainConfig) -> (C64, C64) {
    let ChainConfig { gamma, gamma0, delta_omega, kd, .. } = *config;
    let e2 = C64::from_polar(1.0, 2.0 * kd);
    let a = -gamma / 2.0 * (1.0 + e2) - C64::new(0.0, delta_omega / 2.0);
    let d = C64::new(-gamma0 / 2.0, delta_omega / 2.0);
    (a, d)
}

/// Roots for a detuned (and possibly different-rate) central qubit.
pub fn closed_form_roots_detuned(config: &ChainConfig) -> ComplexRoots {
    let ChainConfig { gamma, delta_omega, kd, .. } = *config;
    let (a, d) = symmetric_sector(config);
    let e = C64::from_polar(1.0, kd);
    let root = gamma / 4.0 * e * radicand_detuned(config).sqrt();
    let mid = (a + d) / 2.0;
    ComplexRoots::new(
        mid - root,
        mid + root,
        gamma / 2.0 * e * e - gamma / 2.0 - C64::new(0.0, delta_omega / 2.0),
    )
}

/// Closed-form roots for any configuration.
pub fn closed_form_roots(config: &ChainConfig) -> ComplexRoots {
    if config.is_identical() {
        closed_form_roots_identical(config.kd, config.gamma)
    } else {
        closed_form_roots_detuned(config)
    }
}

/// Eigenvalues of M, sorted by (Re, Im).
///
/// Cardano on the characteristic polynomial; when roots cluster or the
/// Cardano roots fail the residual check, shifted QR is used instead, since
/// polynomial root finding only resolves a double root to about √ε.
pub fn numeric_eigenvalues(m: &InteractionMatrix) -> Result<ComplexRoots> {
    let scale = linalg::max_entry(&m.entries).max(f64::MIN_POSITIVE);
    let (c2, c1, c0) = linalg::char_poly(&m.entries);
    let roots = linalg::cardano(c2, c1, c0);

    let mut min_gap = f64::INFINITY;
    for i in 0..3 {
        for j in 0..i {
            min_gap = min_gap.min((roots[i] - roots[j]).norm());
        }
    }
    let trace_err = (roots.iter().sum::<C64>() - m.trace()).norm();
    let lambda = if min_gap < 1e-3 * scale || trace_err > 1e-12 * scale || roots.iter().any(|r| !r.is_finite()) {
        linalg::qr_eigenvalues(&m.entries)?
    } else {
        roots
    };
    Ok(ComplexRoots { lambda }.sorted())
}

/// Coherent exchange J_mn = (Γ/2)sin(kd|m−n|) and collective rate
/// Γ_mn = Γcos(kd|m−n|) for one-based qubit indices.
pub fn coherent_dissipative_rates(config: &ChainConfig, m: usize, n: usize) -> Result<(f64, f64)> {
    if !(1..=3).contains(&m) || !(1..=3).contains(&n) {
        return Err(Error::Domain(format!("qubit indices must be in 1..=3, got ({m}, {n})")));
    }
    let phase = config.kd * m.abs_diff(n) as f64;
    Ok((config.gamma / 2.0 * phase.sin(), config.gamma * phase.cos()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn grid(n: usize, hi: f64) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| hi * i as f64 / (n - 1) as f64)
    }

    #[test]
    fn matrix_at_kd_pi() {
        let m = build_matrix(&ChainConfig::identical(PI, 2)).entries;
        let pattern = [[1.0, -1.0, 1.0], [-1.0, 1.0, -1.0], [1.0, -1.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((m[i][j] - c(-0.5 * pattern[i][j], 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn matrix_at_kd_half_pi() {
        let m = build_matrix(&ChainConfig::identical(PI / 2.0, 2)).entries;
        assert!((m[0][1] - c(0.0, -0.5)).norm() < 1e-15);
        assert!((m[0][2] - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn detuned_central_diagonal() {
        let m = build_matrix(&ChainConfig::detuned(2.0 * PI, 0.5, 2)).entries;
        assert!((m[1][1] - c(-0.5, 0.25)).norm() < 1e-15);
    }

    #[test]
    fn symmetric_only_without_detuning() {
        for kd in grid(50, 4.0 * PI) {
            let m = build_matrix(&ChainConfig::identical(kd, 1));
            assert_eq!(m.asymmetry(), 0.0);
            assert!((m.trace() + 1.5).norm() < 1e-15);
        }
        let m = build_matrix(&ChainConfig::detuned(1.0, 0.5, 1));
        assert!(m.asymmetry() > 1e-4);
    }

    #[test]
    fn special_roots() {
        let r = closed_form_roots_identical(PI / 2.0, 1.0);
        let s7 = 7f64.sqrt();
        let want = [c(-0.25, -s7 / 4.0), c(-0.25, s7 / 4.0), c(-1.0, 0.0)];
        for (got, want) in r.lambda.iter().zip(&want) {
            assert!((got - want).norm() < 1e-12);
        }
        let r = closed_form_roots_identical(2.0 * PI, 1.0);
        for (got, want) in r.lambda.iter().zip(&[-1.5, 0.0, 0.0]) {
            assert!((got - want).norm() < 1e-12);
        }
        let r = closed_form_roots_identical(PI, 1.0);
        for (got, want) in r.lambda.iter().zip(&[0.0, -1.5, 0.0]) {
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn numeric_matches_closed_at_kd_one() {
        let cfg = ChainConfig::identical(1.0, 2);
        let num = numeric_eigenvalues(&build_matrix(&cfg)).unwrap();
        assert!(num.distance(&closed_form_roots_identical(1.0, 1.0)) < 1e-12);
    }

    #[test]
    fn numeric_on_double_root() {
        let num = numeric_eigenvalues(&build_matrix(&ChainConfig::identical(2.0 * PI, 2))).unwrap();
        let want = ComplexRoots::new(c(-1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!(num.distance(&want) < 1e-14, "{num:?}");
    }

    #[test]
    fn numeric_diagonal() {
        let z = C64::default();
        let m = InteractionMatrix {
            entries: [[c(-1.0, 2.0), z, z], [z, c(-0.5, 0.0), z], [z, z, c(-3.0, -1.0)]],
        };
        let num = numeric_eigenvalues(&m).unwrap();
        let want = [c(-3.0, -1.0), c(-1.0, 2.0), c(-0.5, 0.0)];
        for (got, want) in num.lambda.iter().zip(&want) {
            assert!((got - want).norm() < 1e-14);
        }
    }

    #[test]
    fn detuned_numeric_cross_check() {
        let cfg = ChainConfig::detuned(0.7, 0.3, 2);
        let num = numeric_eigenvalues(&build_matrix(&cfg)).unwrap();
        assert!(num.distance(&closed_form_roots_detuned(&cfg)) < 1e-10);
    }

    #[test]
    fn detuned_examples() {
        let r = closed_form_roots_detuned(&ChainConfig::detuned(2.0 * PI, 0.0, 2));
        assert!(r.distance(&ComplexRoots::new(c(-1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0))) < 1e-12);

        for d in [0.2, 0.5, 1.0] {
            let r = closed_form_roots_detuned(&ChainConfig::detuned(2.0 * PI, d, 2));
            assert!((r.lambda[2] - c(0.0, -d / 2.0)).norm() < 1e-12);
        }
        let r = closed_form_roots_detuned(&ChainConfig::detuned(2.0 * PI, 1.0, 2));
        assert!((r.lambda[1].re + 0.154).abs() < 1e-3);
        assert!((r.lambda[0].re + 1.346).abs() < 1e-3);
    }

    #[test]
    fn sum_rule_and_grid_agreement() {
        let mut worst_sum = 0.0f64;
        let mut worst_diff = 0.0f64;
        let mut worst_trace = 0.0f64;
        let mut worst_re = f64::NEG_INFINITY;
        for kd in grid(1000, 4.0 * PI) {
            let cfg = ChainConfig::identical(kd, 2);
            let closed = closed_form_roots_identical(kd, 1.0);
            worst_sum = worst_sum.max((closed.sum() + 1.5).norm());
            let m = build_matrix(&cfg);
            let num = numeric_eigenvalues(&m).unwrap();
            worst_trace = worst_trace.max((num.sum() - m.trace()).norm());
            worst_diff = worst_diff.max(num.distance(&closed));
            worst_re = worst_re.max(closed.max_re()).max(num.max_re());
        }
        assert!(worst_sum < 1e-12, "{worst_sum}");
        assert!(worst_diff < 1e-10, "{worst_diff}");
        assert!(worst_trace < 1e-12, "{worst_trace}");
        assert!(worst_re <= 1e-12, "{worst_re}");
    }

    #[test]
    fn detuned_grid_agreement() {
        for d in [0.2, 0.4, 0.6, 0.8, 1.0] {
            for kd in grid(1000, 4.0 * PI) {
                let cfg = ChainConfig::detuned(kd, d, 2);
                let closed = closed_form_roots_detuned(&cfg);
                let num = numeric_eigenvalues(&build_matrix(&cfg)).unwrap();
                assert!(num.distance(&closed) < 1e-10, "kd={kd} d={d}");
                assert!(closed.max_re() <= 1e-12, "kd={kd} d={d}");
                let off = (kd / PI - (kd / PI).round()).abs() * PI;
                if off > 1e-3 {
                    assert!(closed.lambda.iter().all(|l| l.re < -1e-12), "kd={kd} d={d}");
                }
            }
        }
    }

    #[test]
    fn detuned_reduces_to_identical() {
        for kd in grid(300, 4.0 * PI) {
            let a = closed_form_roots_detuned(&ChainConfig::detuned(kd, 0.0, 2));
            let b = closed_form_roots_identical(kd, 1.0);
            for (x, y) in a.lambda.iter().zip(&b.lambda) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn dark_states_at_integer_pi() {
        for n in 0..5 {
            let r = closed_form_roots_identical(n as f64 * PI, 1.0);
            let dark = r.lambda.iter().filter(|l| l.re.abs() < 1e-12).count();
            assert_eq!(dark, 2, "n={n}");
        }
    }

    #[test]
    fn rates() {
        let cfg = ChainConfig::identical(PI / 2.0, 2);
        let (j, g) = coherent_dissipative_rates(&cfg, 1, 2).unwrap();
        assert!((j - 0.5).abs() < 1e-15 && g.abs() < 1e-15);
        let cfg = ChainConfig::identical(PI, 2);
        let (j, g) = coherent_dissipative_rates(&cfg, 1, 3).unwrap();
        assert!(j.abs() < 1e-15 && (g - 1.0).abs() < 1e-15);
        assert_eq!(coherent_dissipative_rates(&cfg, 2, 2).unwrap(), (0.0, 1.0));
        assert!(coherent_dissipative_rates(&cfg, 0, 2).is_err());
    }

    proptest! {
        #[test]
        fn closed_form_is_an_eigenvalue_set(
            kd in 0.0f64..20.0,
            delta in -1.5f64..1.5,
            gamma0 in 0.2f64..3.0,
        ) {
            let cfg = ChainConfig { gamma0, ..ChainConfig::detuned(kd, delta, 2) }.validate().unwrap();
            let closed = closed_form_roots(&cfg);
            let m = build_matrix(&cfg);
            let num = numeric_eigenvalues(&m).unwrap();
            prop_assert!(num.distance(&closed) < 1e-9);
            prop_assert!((closed.sum() - m.trace()).norm() < 1e-12);
            prop_assert!(closed.max_re() <= 1e-12);
        }
    }
}
