//! Time evolution of the qubit amplitudes: fixed-step RK4 and the closed forms
//! built from the symmetric/antisymmetric split of the chain.

use crate::chain_model::{AmplitudeTrajectory, ChainConfig, ComplexRoots};
use crate::effective_hamiltonian::{build_matrix, closed_form_roots, numeric_eigenvalues, symmetric_sector};
use crate::{Error, Result, C64};

pub const DEFAULT_DT: f64 = 1e-3;
pub const MAX_DT: f64 = 0.01;
pub const STABILITY_LIMIT: f64 = 0.1;
pub const DEFAULT_PLATEAU_THRESHOLD: f64 = 1e-2;

const CLIP_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-6;

/// β(0): one at the excited qubit, zero elsewhere.
pub fn initial_state(config: &ChainConfig) -> [C64; 3] {
    let mut b = [C64::default(); 3];
    b[config.excited()] = C64::new(1.0, 0.0);
    b
}

/// Uniform grid 0, dt, 2dt, … ending exactly at `t_max` (the last interval
/// may be shorter than dt).
pub fn time_grid(t_max: f64, dt: f64) -> Vec<f64> {
    let n = (t_max / dt - 1e-9).ceil().max(1.0) as usize;
    let mut t: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
    t.push(t_max);
    t
}

/// Classical RK4 on dβ/dt = Mβ with steps given in units of 1/Γ.
pub fn evolve_ode(config: &ChainConfig, t_max: f64, dt: f64) -> Result<AmplitudeTrajectory> {
    let config = config.validate()?;
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidConfig(format!("t_max must be positive, got {t_max}")));
    }
    if !(dt > 0.0 && dt * config.gamma <= MAX_DT * (1.0 + 1e-12)) {
        return Err(Error::InvalidConfig(format!("dt must lie in (0, {MAX_DT}/gamma], got {dt}")));
    }
    let m = build_matrix(&config);
    let product = dt * numeric_eigenvalues(&m)?.max_abs();
    if product > STABILITY_LIMIT {
        return Err(Error::StepRejected { product, limit: STABILITY_LIMIT });
    }

    let t = time_grid(t_max, dt);
    let mut beta = Vec::with_capacity(t.len());
    let mut y = initial_state(&config);
    beta.push(y);
    let f = |v: &[C64; 3]| m.apply(v);
    let axpy = |v: &[C64; 3], h: f64, k: &[C64; 3]| [v[0] + h * k[0], v[1] + h * k[1], v[2] + h * k[2]];
    for w in t.windows(2) {
        let h = w[1] - w[0];
        let k1 = f(&y);
        let k2 = f(&axpy(&y, h / 2.0, &k1));
        let k3 = f(&axpy(&y, h / 2.0, &k2));
        let k4 = f(&axpy(&y, h, &k3));
        for i in 0..3 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        beta.push(y);
    }
    let mut traj = AmplitudeTrajectory { t, beta, p_ph: Vec::new() };
    traj.p_ph = photon_emission_probability(&traj)?;
    Ok(traj)
}

/// P_ph = 1 − Σ|β_n|², clipped into [0, 1] only within 1e-10 of a bound.
pub fn photon_emission_probability(traj: &AmplitudeTrajectory) -> Result<Vec<f64>> {
    traj.beta
        .iter()
        .zip(&traj.t)
        .map(|(b, &t)| {
            let p = 1.0 - b.iter().map(|z| z.norm_sqr()).sum::<f64>();
            let excess = (-p).max(p - 1.0);
            if excess > NORM_TOL {
                Err(Error::Normalization { t, excess })
            } else if excess > 0.0 && excess <= CLIP_TOL {
                Ok(p.clamp(0.0, 1.0))
            } else {
                Ok(p)
            }
        })
        .collect()
}

/// Coefficients of the two-exponential closed forms.
///
/// Central excitation: β₂ = b₁e^{λ₁t} + b₂e^{λ₂t}, β₁ = β₃ = a₁e^{λ₁t} + a₂e^{λ₂t}.
/// Edge excitation uses b₁, b₂ swapped and `edge_coupling` for β₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormCoefficients {
    pub a1: C64,
    pub a2: C64,
    pub b1: C64,
    pub b2: C64,
    /// Square root of the symmetric-sector radicand (√(e^{2ikd}+8) for identical qubits).
    pub r: C64,
    /// Prefactor of e^{λ₁t} − e^{λ₂t} in β₂ after exciting an edge qubit.
    pub edge_coupling: C64,
    pub lambda: ComplexRoots,
}

impl ClosedFormCoefficients {
    pub fn new(config: &ChainConfig) -> Result<Self> {
        let config = config.validate()?;
        let lambda = closed_form_roots(&config);
        let [l1, l2, _] = lambda.lambda;
        let gap = l1 - l2;
        if gap.norm() < 1e-10 * config.gamma {
            return Err(Error::DegenerateRoots(gap.norm()));
        }
        let m = build_matrix(&config).entries;
        let (_, d) = symmetric_sector(&config);
        let a1 = m[0][1] / gap;
        let b1 = (d - l2) / gap;
        let r = crate::effective_hamiltonian::radicand_detuned(&config).sqrt();
        Ok(Self { a1, a2: -a1, b1, b2: 1.0 - b1, r, edge_coupling: m[1][0] / gap, lambda })
    }

    fn exps(&self, t: f64) -> [C64; 3] {
        self.lambda.lambda.map(|l| (l * t).exp())
    }

    /// (β₂, β_edge) after exciting the central qubit.
    pub fn central(&self, t: f64) -> (C64, C64) {
        let [e1, e2, _] = self.exps(t);
        (self.b1 * e1 + self.b2 * e2, self.a1 * e1 + self.a2 * e2)
    }

    /// (β₁, β₂, β₃) after exciting qubit 1.
    pub fn edge(&self, t: f64) -> [C64; 3] {
        let [e1, e2, e3] = self.exps(t);
        let sym = 0.5 * (self.b2 * e1 + self.b1 * e2);
        [sym + 0.5 * e3, self.edge_coupling * (e1 - e2), sym - 0.5 * e3]
    }

    /// Amplitudes for the configured excited qubit.
    pub fn amplitudes(&self, excited_index: u8, t: f64) -> [C64; 3] {
        match excited_index {
            2 => {
                let (b2, be) = self.central(t);
                [be, b2, be]
            }
            3 => {
                let [x, y, z] = self.edge(t);
                [z, y, x]
            }
            _ => self.edge(t),
        }
    }
}

/// Closed-form (β₂, β_edge) for a centrally excited chain; β₁ = β₃ = β_edge.
pub fn closed_form_central_excited(config: &ChainConfig, t: f64) -> Result<(C64, C64)> {
    if config.excited_index != 2 {
        return Err(Error::InvalidConfig("central closed form needs excited_index = 2".into()));
    }
    Ok(ClosedFormCoefficients::new(config)?.central(t))
}

/// Closed-form (β₁, β₂, β₃) for an edge-excited chain (qubit 1, or qubit 3 by
/// mirror symmetry).
pub fn closed_form_edge_excited(config: &ChainConfig, t: f64) -> Result<[C64; 3]> {
    if config.excited_index == 2 {
        return Err(Error::InvalidConfig("edge closed form needs excited_index = 1 or 3".into()));
    }
    Ok(ClosedFormCoefficients::new(config)?.amplitudes(config.excited_index, t))
}

/// Closed-form amplitudes sampled on `t`.
pub fn closed_form_trajectory(config: &ChainConfig, t: &[f64]) -> Result<AmplitudeTrajectory> {
    let coeffs = ClosedFormCoefficients::new(config)?;
    let beta = t.iter().map(|&s| coeffs.amplitudes(config.excited_index, s)).collect();
    let mut traj = AmplitudeTrajectory { t: t.to_vec(), beta, p_ph: Vec::new() };
    traj.p_ph = photon_emission_probability(&traj)?;
    Ok(traj)
}

/// Largest |β_n − β'_n| over samples and qubits. Panics on length mismatch.
pub fn max_deviation(a: &AmplitudeTrajectory, b: &AmplitudeTrajectory) -> f64 {
    assert_eq!(a.len(), b.len(), "trajectories sampled on different grids");
    a.beta
        .iter()
        .zip(&b.beta)
        .flat_map(|(x, y)| (0..3).map(move |n| (x[n] - y[n]).norm()))
        .fold(0.0, f64::max)
}

/// Interval on which the emission rate stays below threshold·Γ.
#[derive(Debug, Clone, PartialEq)]
pub struct Plateau {
    pub t_start: f64,
    pub t_end: f64,
    pub p_ph: f64,
    /// Time of the closest local extremum of any |β_n|², if there is one.
    pub nearest_extremum: Option<f64>,
}

/// Finds the intervals where |dP_ph/dt| < threshold·Γ.
pub fn plateaus(traj: &AmplitudeTrajectory, gamma: f64, threshold: f64) -> Vec<Plateau> {
    let n = traj.len();
    if n < 3 {
        return Vec::new();
    }
    let rate: Vec<f64> = (0..n)
        .map(|k| {
            let (lo, hi) = (k.saturating_sub(1), (k + 1).min(n - 1));
            (traj.p_ph[hi] - traj.p_ph[lo]) / (traj.t[hi] - traj.t[lo])
        })
        .collect();

    let mut extrema = Vec::new();
    for q in 0..3 {
        let pop = traj.population(q);
        for k in 1..n - 1 {
            let (a, b, c) = (pop[k - 1], pop[k], pop[k + 1]);
            if (b > a && b >= c) || (b < a && b <= c) {
                extrema.push(traj.t[k]);
            }
        }
    }

    let mut out = Vec::new();
    let mut start = None;
    for k in 0..=n {
        let flat = k < n && rate[k].abs() < threshold * gamma;
        match (flat, start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                let e = k - 1;
                let mid = 0.5 * (traj.t[s] + traj.t[e]);
                let nearest = extrema
                    .iter()
                    .copied()
                    .min_by(|x, y| (x - mid).abs().total_cmp(&(y - mid).abs()));
                out.push(Plateau {
                    t_start: traj.t[s],
                    t_end: traj.t[e],
                    p_ph: traj.p_ph[(s + e) / 2],
                    nearest_extremum: nearest,
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}
