//! Emitted-photon amplitude, spectral density and peak analysis.
//!
//! Frequencies are offsets Δ = ω − Ω from the edge-qubit frequency. The photon
//! amplitude is returned with the coupling factored out and scaled by Ω,
//! f = Ω·γ_k/g_k, so that S = (Γ/Ω)|f|².

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::amplitude_dynamics::evolve_ode;
use crate::chain_model::{AmplitudeTrajectory, ChainConfig};
use crate::{Error, Result, C64};

pub const DEFAULT_T: f64 = 20.0;
pub const LONG_T: f64 = 50.0;
/// Local maxima below this fraction of the global maximum are discarded.
pub const DEFAULT_MIN_RELATIVE_HEIGHT: f64 = 1e-3;
const SPECIAL_TOL: f64 = 1e-9;

/// (e^{izt} − 1)/z, continuous through z = 0.
fn expm1_over(z: C64, t: f64) -> C64 {
    let w = z * t;
    if w.norm() < 1e-4 {
        let i = C64::i();
        i * t * (1.0 + i * w / 2.0 + (i * w).powi(2) / 6.0 + (i * w).powi(3) / 24.0)
    } else {
        ((C64::i() * w).exp() - 1.0) / z
    }
}

/// Phase factors (e^{iθ}, √(Γ₀/Γ), e^{−iθ}) with θ = kd·ω/Ω evaluated at the
/// emitted frequency.
fn emission_phases(config: &ChainConfig, delta: f64) -> [C64; 3] {
    let theta = config.kd * (1.0 + delta / config.omega);
    [
        C64::from_polar(1.0, theta),
        C64::new((config.gamma0 / config.gamma).sqrt(), 0.0),
        C64::from_polar(1.0, -theta),
    ]
}

/// f(ω, t) from a sampled trajectory by the composite trapezoid rule.
pub fn photon_amplitude_numeric(traj: &AmplitudeTrajectory, config: &ChainConfig, delta: f64, t: f64) -> Result<C64> {
    let t_end = traj.t_end();
    if !(t >= 0.0) || t > t_end * (1.0 + 1e-12) || traj.is_empty() {
        return Err(Error::OutOfRange { t, t_end });
    }
    let w = delta + config.delta_omega / 2.0;
    let integrand = |k: usize| {
        let phase = C64::from_polar(1.0, w * traj.t[k]);
        traj.beta[k].map(|b| b * phase)
    };

    let mut acc = [C64::default(); 3];
    let mut prev = integrand(0);
    for k in 1..traj.len() {
        let (t0, t1) = (traj.t[k - 1], traj.t[k]);
        if t0 >= t {
            break;
        }
        let mut cur = integrand(k);
        let mut h = t1 - t0;
        if t1 > t {
            let frac = (t - t0) / h;
            cur = [0, 1, 2].map(|n| prev[n] + frac * (cur[n] - prev[n]));
            h = t - t0;
        }
        for n in 0..3 {
            acc[n] += 0.5 * h * (prev[n] + cur[n]);
        }
        prev = cur;
    }
    let ph = emission_phases(config, delta);
    let sum: C64 = (0..3).map(|n| ph[n] * acc[n]).sum();
    Ok(-C64::i() * sum * config.omega)
}

/// Phases at which the closed-form amplitudes are available.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialKd {
    /// kd = nπ.
    IntegerPi(u32),
    /// kd = (2n+1)π/2.
    HalfIntegerPi(u32),
}

impl SpecialKd {
    pub fn detect(kd: f64) -> Option<Self> {
        let x = kd / PI;
        let n = x.round();
        if (x - n).abs() * PI < SPECIAL_TOL && n >= 0.0 {
            return Some(Self::IntegerPi(n as u32));
        }
        let y = x - 0.5;
        let m = y.round();
        if (y - m).abs() * PI < SPECIAL_TOL && m >= 0.0 {
            return Some(Self::HalfIntegerPi(m as u32));
        }
        None
    }

    fn parity(self) -> f64 {
        let n = match self {
            Self::IntegerPi(n) | Self::HalfIntegerPi(n) => n,
        };
        if n % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn kd(self) -> f64 {
        match self {
            Self::IntegerPi(n) => n as f64 * PI,
            Self::HalfIntegerPi(n) => (2 * n + 1) as f64 * PI / 2.0,
        }
    }
}

/// Closed-form f(ω, t) for identical qubits at kd = nπ or (2n+1)π/2.
///
/// Prefactors use the running phase θ = (ω/Ω)·kd; denominators use Δ directly.
pub fn photon_amplitude_closed(case: SpecialKd, config: &ChainConfig, delta: f64, t: f64) -> Result<C64> {
    if !config.is_identical() {
        return Err(Error::Unsupported("closed-form photon amplitude needs identical qubits".into()));
    }
    let g = config.gamma;
    let sigma = case.parity();
    let mirror = if config.excited_index == 3 { -1.0 } else { 1.0 };
    let theta = mirror * case.kd() * (1.0 + delta / config.omega);
    let (cos, sin) = (theta.cos(), theta.sin());
    let d = C64::new(delta, 0.0);
    let i = C64::i();

    let gamma_k = match case {
        SpecialKd::IntegerPi(_) => {
            let dark = expm1_over(d, t);
            let bright = expm1_over(d + i * 1.5 * g, t);
            if config.excited_index == 2 {
                -(2.0 / 3.0) * (1.0 - sigma * cos) * dark - (1.0 / 3.0) * (1.0 + 2.0 * sigma * cos) * bright
            } else {
                let e = C64::from_polar(1.0, theta);
                -(1.0 / 3.0) * (2.0 * e - e.conj() - sigma) * dark - (1.0 / 3.0) * (sigma + 2.0 * cos) * bright
            }
        }
        SpecialKd::HalfIntegerPi(_) => {
            let s7 = 7f64.sqrt();
            let c = s7 * g / 4.0;
            let up = expm1_over(d + c + i * g / 4.0, t);
            let down = expm1_over(d - c + i * g / 4.0, t);
            if config.excited_index == 2 {
                let p = 0.5 * (1.0 + i / s7) - 2.0 * sigma * cos / s7;
                let q = 0.5 * (1.0 - i / s7) + 2.0 * sigma * cos / s7;
                -p * up - q * down
            } else {
                let p = 0.5 * (1.0 - i / s7) * cos - sigma / s7;
                let q = 0.5 * (1.0 + i / s7) * cos + sigma / s7;
                -p * up - q * down - i * sin * expm1_over(d + i * g, t)
            }
        }
    };
    Ok(gamma_k * config.omega)
}

/// S = (Γ/Ω)|f|².
pub fn spectral_density(f: C64, gamma: f64, omega: f64) -> f64 {
    gamma / omega * f.norm_sqr()
}

/// Long-time lineshape ΓΩ/((ω−Ω)² + (3Γ/2)²) at kd = nπ.
pub fn lorentzian(delta: f64, gamma: f64, omega: f64) -> f64 {
    gamma * omega / (delta * delta + 2.25 * gamma * gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    /// Offset from Ω in units of Γ.
    pub position: f64,
    pub height: f64,
    /// Full width at half maximum in units of Γ; `None` if a half-height
    /// crossing lies outside the grid.
    pub fwhm: Option<f64>,
}

/// Sampled spectrum on a grid of offsets (ω − Ω)/Γ.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCurve {
    pub omega_grid: Vec<f64>,
    pub s: Vec<f64>,
    pub t: f64,
    pub peaks: Vec<Peak>,
}

impl SpectralCurve {
    /// Runs [`peak_analysis`] and stores the result.
    pub fn analyze(&mut self) -> Result<&[Peak]> {
        self.peaks = peak_analysis(self, DEFAULT_MIN_RELATIVE_HEIGHT)?;
        Ok(&self.peaks)
    }

    /// Distances between neighbouring peaks.
    pub fn separations(&self) -> Vec<f64> {
        self.peaks.windows(2).map(|w| w[1].position - w[0].position).collect()
    }
}

/// Evenly spaced grid of `points` values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points).map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64).collect(),
    }
}

/// Spectrum from an RK4 trajectory (step `dt`, in units of 1/Γ) evaluated at
/// time `t`; `grid` holds offsets in units of Γ.
pub fn spectrum_numeric(config: &ChainConfig, grid: &[f64], t: f64, dt: f64) -> Result<SpectralCurve> {
    let config = config.validate()?;
    let g = config.gamma;
    if !(t > 0.0) {
        return Err(Error::OutOfRange { t, t_end: 0.0 });
    }
    let traj = evolve_ode(&config, t / g, dt / g)?;
    let s = grid
        .par_iter()
        .map(|&x| photon_amplitude_numeric(&traj, &config, x * g, t / g).map(|f| spectral_density(f, g, config.omega)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralCurve { omega_grid: grid.to_vec(), s, t, peaks: Vec::new() })
}

/// Spectrum from the closed-form amplitudes (special kd only).
pub fn spectrum_closed(config: &ChainConfig, grid: &[f64], t: f64) -> Result<SpectralCurve> {
    let config = config.validate()?;
    let case = SpecialKd::detect(config.kd)
        .ok_or_else(|| Error::Unsupported(format!("no closed form at kd = {}", config.kd)))?;
    let g = config.gamma;
    let s = grid
        .par_iter()
        .map(|&x| photon_amplitude_closed(case, &config, x * g, t / g).map(|f| spectral_density(f, g, config.omega)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralCurve { omega_grid: grid.to_vec(), s, t, peaks: Vec::new() })
}

fn half_crossing(x: &[f64], s: &[f64], k: usize, half: f64, step: isize) -> Option<f64> {
    let mut j = k as isize;
    loop {
        let next = j + step;
        if next < 0 || next as usize >= s.len() {
            return None;
        }
        let (a, b) = (j as usize, next as usize);
        if s[b] < half {
            let frac = (s[a] - half) / (s[a] - s[b]);
            return Some(x[a] + frac * (x[b] - x[a]));
        }
        j = next;
    }
}

/// Local maxima (3-point stencil) at or above `min_relative` of the global
/// maximum, with vertex-refined position/height and interpolated FWHM.
pub fn peak_analysis(curve: &SpectralCurve, min_relative: f64) -> Result<Vec<Peak>> {
    let (x, s) = (&curve.omega_grid, &curve.s);
    if x.len() != s.len() {
        return Err(Error::Domain("grid and samples differ in length".into()));
    }
    let top = s.iter().copied().fold(0.0, f64::max);
    let mut peaks = Vec::new();
    for k in 1..s.len().saturating_sub(1) {
        if !(s[k] > s[k - 1] && s[k] >= s[k + 1]) || s[k] < min_relative * top {
            continue;
        }
        let (y0, y1, y2) = (s[k - 1], s[k], s[k + 1]);
        let curv = y0 - 2.0 * y1 + y2;
        let (shift, height) = if curv < 0.0 {
            let u = 0.5 * (y0 - y2) / curv;
            (u, y1 - 0.25 * (y0 - y2) * u)
        } else {
            (0.0, y1)
        };
        let h = 0.5 * (x[k + 1] - x[k - 1]);
        let position = x[k] + shift * h;
        let half = 0.5 * height;
        let fwhm = match (half_crossing(x, s, k, half, -1), half_crossing(x, s, k, half, 1)) {
            (Some(l), Some(r)) => Some(r - l),
            _ => None,
        };
        peaks.push(Peak { position, height, fwhm });
    }
    if peaks.is_empty() {
        Err(Error::NoPeak)
    } else {
        Ok(peaks)
    }
}

/// Least-squares scale k minimising Σ(S − k·L)² against [`lorentzian`].
pub fn lorentzian_scale(curve: &SpectralCurve, gamma: f64, omega: f64) -> f64 {
    let (num, den) = curve.omega_grid.iter().zip(&curve.s).fold((0.0, 0.0), |(n, d), (&x, &s)| {
        let l = lorentzian(x * gamma, gamma, omega);
        (n + s * l, d + l * l)
    });
    num / den
}
