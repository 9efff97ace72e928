//! Bi-orthogonal eigenvectors of the identical-qubit interaction matrix.
//!
//! Normalization uses the unconjugated bilinear form Σ_n α_n α_n = 1. State 1
//! pairs with the root λ₁ (minus sign before the square root), state 2 with λ₂,
//! state 3 is the antisymmetric edge mode (1, 0, −1)/√2.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::Serialize;

use crate::chain_model::ComplexRoots;
use crate::effective_hamiltonian::{closed_form_roots_identical, radicand_identical};
use crate::linalg::{self, Mat3};
use crate::{Error, Result, C64};

/// Distance from a limit point below which the analytic vectors are used.
pub const LIMIT_TOL: f64 = 1e-9;
/// Below this |D(±R)| the symmetric-sector form replaces the general formula.
const SMALL_NORM: f64 = 0.1;
pub const MAX_CONDITION: f64 = 1e8;

/// Overall sign fixed per state: the first non-negligible component has
/// positive real part (positive imaginary part if the real part vanishes).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignConvention {
    FirstComponentPositive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveStateSet {
    pub kd: f64,
    pub gamma: f64,
    /// Roots in state order.
    pub lambda: ComplexRoots,
    /// Complex energies Ē_i = iλ_i.
    pub energies: [C64; 3],
    /// `vectors[i][n]` is α_n^{(i)}.
    pub vectors: [[C64; 3]; 3],
    pub sign_convention: SignConvention,
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn fix_sign(v: [C64; 3]) -> [C64; 3] {
    let lead = v.iter().find(|z| z.norm() > 1e-12).copied().unwrap_or_default();
    let flip = if lead.re.abs() > 1e-14 { lead.re < 0.0 } else { lead.im < 0.0 };
    if flip {
        v.map(|z| -z)
    } else {
        v
    }
}

/// Symmetric-sector eigenvector (u, v, u) ∝ (λ+Γ/2, −Γe^{ikd}, λ+Γ/2).
fn sector_vector(kd: f64, gamma: f64, lambda: C64) -> [C64; 3] {
    let u = lambda + gamma / 2.0;
    let v = -gamma * C64::from_polar(1.0, kd);
    let norm = (2.0 * u * u + v * v).sqrt();
    [u / norm, v / norm, u / norm]
}

/// (p, q, p)/D(R) with p = e(e+R)+2, q = 3e+R; `None` when D is too small to trust.
fn general_vector(e: C64, r: C64) -> Option<[C64; 3]> {
    let d2 = 4.0 * e.powi(4) + 34.0 * e * e + 14.0 * e * r + 4.0 * e.powi(3) * r + 16.0;
    let d = d2.sqrt();
    if d.norm() < SMALL_NORM {
        return None;
    }
    let p = e * (e + r) + 2.0;
    let q = 3.0 * e + r;
    Some([p / d, q / d, p / d])
}

/// Eigenvectors and energies for identical qubits.
pub fn eigenvectors_biorthogonal(kd: f64, gamma: f64) -> CollectiveStateSet {
    let lambda = closed_form_roots_identical(kd, gamma);
    let e = C64::from_polar(1.0, kd);
    let r = radicand_identical(kd).sqrt();

    let uniform = [c(1.0 / 3f64.sqrt()); 3];
    let dimer = [c(1.0 / 6f64.sqrt()), c(-2.0 / 6f64.sqrt()), c(1.0 / 6f64.sqrt())];
    let m = (kd / PI).round();
    let limit = ((kd - m * PI).abs() < LIMIT_TOL).then(|| {
        let s = if m as i64 % 2 == 0 { 1.0 } else { -1.0 };
        let flip = |v: [C64; 3]| [v[0], s * v[1], v[2]];
        if s > 0.0 {
            (uniform, dimer)
        } else {
            (flip(dimer), flip(uniform))
        }
    });

    let (v1, v2) = match limit {
        Some(pair) => pair,
        None => (
            general_vector(e, r).unwrap_or_else(|| sector_vector(kd, gamma, lambda.lambda[0])),
            general_vector(e, -r).unwrap_or_else(|| sector_vector(kd, gamma, lambda.lambda[1])),
        ),
    };
    let v3 = [c(FRAC_1_SQRT_2), c(0.0), c(-FRAC_1_SQRT_2)];

    CollectiveStateSet {
        kd,
        gamma,
        lambda,
        energies: lambda.energies(),
        vectors: [fix_sign(v1), fix_sign(v2), fix_sign(v3)],
        sign_convention: SignConvention::FirstComponentPositive,
    }
}

impl CollectiveStateSet {
    /// Largest |Σ_n α_n^{(i)} α_n^{(j)} − δ_ij|.
    pub fn biorthogonality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let s: C64 = (0..3).map(|n| self.vectors[i][n] * self.vectors[j][n]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - want).norm());
            }
        }
        worst
    }

    /// Largest ‖Mα^{(i)} − λ_iα^{(i)}‖ for the supplied matrix.
    pub fn eigen_residual(&self, m: &Mat3) -> f64 {
        (0..3)
            .map(|i| {
                let mv = linalg::matvec(m, &self.vectors[i]);
                (0..3)
                    .map(|n| (mv[n] - self.lambda.lambda[i] * self.vectors[i][n]).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Matrix with α^{(i)} as column i.
    fn basis(&self) -> Mat3 {
        let mut a = [[C64::default(); 3]; 3];
        for (i, v) in self.vectors.iter().enumerate() {
            for n in 0..3 {
                a[n][i] = v[n];
            }
        }
        a
    }

    /// JSON export: energies and vectors as [re, im] pairs.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Export {
            kd: f64,
            gamma: f64,
            energies: Vec<[f64; 2]>,
            vectors: Vec<Vec<[f64; 2]>>,
            sign_convention: SignConvention,
        }
        let pair = |z: &C64| [z.re, z.im];
        let export = Export {
            kd: self.kd,
            gamma: self.gamma,
            energies: self.energies.iter().map(pair).collect(),
            vectors: self.vectors.iter().map(|v| v.iter().map(pair).collect()).collect(),
            sign_convention: self.sign_convention,
        };
        serde_json::to_string_pretty(&export).expect("plain data serializes")
    }
}

/// Expansion coefficients of the unit initial state over the collective states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionCoefficients {
    pub a: [C64; 3],
    pub n0: u8,
}

/// Solves Σ_i A_i α_n^{(i)} = δ_{n,n₀}.
pub fn decompose_initial(states: &CollectiveStateSet, n0: u8) -> Result<DecompositionCoefficients> {
    if !(1..=3).contains(&n0) {
        return Err(Error::InvalidConfig(format!("excited index must be 1, 2 or 3, got {n0}")));
    }
    let basis = states.basis();
    let cond = linalg::cond1(&basis);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::IllConditioned(cond));
    }
    let mut rhs = [C64::default(); 3];
    rhs[usize::from(n0) - 1] = c(1.0);
    let a = linalg::solve3(&basis, &rhs)?;
    Ok(DecompositionCoefficients { a, n0 })
}

/// β_n(t) = Σ_i A_i e^{λ_i t} α_n^{(i)}.
pub fn reconstruct_amplitudes(states: &CollectiveStateSet, coeffs: &DecompositionCoefficients, t: f64) -> [C64; 3] {
    let mut beta = [C64::default(); 3];
    for i in 0..3 {
        let w = coeffs.a[i] * (states.lambda.lambda[i] * t).exp();
        for n in 0..3 {
            beta[n] += w * states.vectors[i][n];
        }
    }
    beta
}

/// Components of each state in the basis
/// {(|e₁⟩+|e₃⟩)/√2, (|e₁⟩−|e₃⟩)/√2, |e₂⟩}; row i belongs to state i.
///
/// Only defined at kd = (2n+1)π/2.
pub fn dark_bright_projection(states: &CollectiveStateSet) -> Result<[[C64; 3]; 3]> {
    let x = states.kd / PI - 0.5;
    if (x - x.round()).abs() * PI > LIMIT_TOL {
        return Err(Error::Unsupported(format!(
            "dark/bright basis needs kd = (2n+1)pi/2, got kd = {}",
            states.kd
        )));
    }
    Ok(states.vectors.map(|v| {
        [(v[0] + v[2]) * FRAC_1_SQRT_2, (v[0] - v[2]) * FRAC_1_SQRT_2, v[1]]
    }))
}
