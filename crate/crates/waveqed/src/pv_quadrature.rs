//! Principal value P∫₀^∞ cos(ax)/(x−1) dx: closed form in Si/Ci, the
//! full-line approximation −π sin a, and an independent numeric evaluation.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
pub const DEFAULT_EXCISION: f64 = 1e-6;
pub const DEFAULT_CUTOFF: f64 = 1e6;

/// Sine integral, odd in x.
pub fn si(x: f64) -> f64 {
    if x < 0.0 {
        return -si(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x < 4.0 {
        series(x).0
    } else {
        continued_fraction(x).0
    }
}

/// (Si(x), Ci(x)) for x > 0, absolute error below 1e-10.
pub fn si_ci(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Ci needs a positive finite argument, got {x}")));
    }
    Ok(if x < 4.0 { series(x) } else { continued_fraction(x) })
}

fn series(x: f64) -> (f64, f64) {
    let x2 = x * x;
    let mut si = 0.0;
    let mut ci = 0.0;
    // term = (−1)^k x^k / k! built incrementally; odd k feed Si, even k ≥ 2 feed Ci.
    let mut term = 1.0;
    for k in 1..200 {
        term *= x / k as f64;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let add = sign * term / k as f64;
        if k % 2 == 1 {
            si += add;
        } else {
            ci += add;
        }
        if term < 1e-18 * (1.0 + x2) && k > 4 {
            break;
        }
    }
    (si, EULER_GAMMA + x.ln() + ci)
}

/// Modified Lentz evaluation of the continued fraction for E₁(ix):
/// Ci(x) = −Re E₁(ix), Si(x) = π/2 + Im E₁(ix).
fn continued_fraction(x: f64) -> (f64, f64) {
    use num_complex::Complex64 as C;
    let tiny = 1e-300;
    let mut b = C::new(1.0, x);
    let mut c = C::new(1.0 / tiny, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 2..1000 {
        let a = -((i - 1) * (i - 1)) as f64;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    let cs = h * C::new(x.cos(), -x.sin());
    (FRAC_PI_2 + cs.im, -cs.re)
}

/// −cos(a)Ci(a) − sin(a)(Si(a) + π/2).
pub fn pv_exact(a: f64) -> Result<f64> {
    let (s, c) = si_ci(a)?;
    Ok(-a.cos() * c - a.sin() * (s + FRAC_PI_2))
}

/// −π sin(a): the value obtained by extending the integral over the whole line.
pub fn pv_approx(a: f64) -> f64 {
    -PI * a.sin()
}

/// Error of that extension, ∫₀^∞ cos(ax)/(1+x) dx = pv_exact − pv_approx.
pub fn extension_error(a: f64) -> Result<f64> {
    let (s, c) = si_ci(a)?;
    Ok(-a.cos() * c + a.sin() * (FRAC_PI_2 - s))
}

/// |Ci(a)| + |Si(a) − π/2|, a bound on |pv_exact − pv_approx|.
pub fn error_envelope(a: f64) -> Result<f64> {
    let (s, c) = si_ci(a)?;
    Ok(c.abs() + (s - FRAC_PI_2).abs())
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    fn integrate(&self, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        half * self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(mid + half * x)).sum::<f64>()
    }
}

/// Wynn's ε-algorithm; returns the highest-order even-column estimate.
fn wynn_epsilon(sums: &[f64]) -> f64 {
    let n = sums.len();
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let mut best = *sums.last().unwrap();
    for k in 1..n {
        let next: Vec<f64> = (0..cur.len() - 1)
            .map(|j| {
                let diff = cur[j + 1] - cur[j];
                let inv = if diff == 0.0 { 1e300 } else { 1.0 / diff };
                prev[j + 1] + inv
            })
            .collect();
        if next.is_empty() {
            break;
        }
        if k % 2 == 0 {
            best = *next.last().unwrap();
        }
        prev = cur;
        cur = next;
    }
    best
}

/// Numeric principal value of ∫₀^∞ cos(ax)/(x−1) dx.
///
/// [0, 2] is folded about the pole so x = 1 ± s pair up; for s below
/// `excision` the paired integrand is replaced by its limit −2a sin a. The
/// tail [2, ∞) is split at the zeros of cos(ax) and the alternating partial
/// sums are accelerated; failure to converge before x = `cutoff` is an error.
pub fn pv_quadrature(a: f64, excision: f64, cutoff: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::Domain(format!("a must be positive, got {a}")));
    }
    if !(excision > 0.0 && excision < 1e-3) {
        return Err(Error::Domain(format!("excision must lie in (0, 1e-3), got {excision}")));
    }
    if !(cutoff > 1e3) {
        return Err(Error::Domain(format!("cutoff must exceed 1e3, got {cutoff}")));
    }
    let rule = Rule::new(20);

    let folded = |s: f64| {
        if s < excision {
            -2.0 * a * a.sin()
        } else {
            ((a * (1.0 + s)).cos() - (a * (1.0 - s)).cos()) / s
        }
    };
    let panels = 8 + (2.0 * a).ceil() as usize;
    let near: f64 = (0..panels)
        .map(|p| rule.integrate(p as f64 / panels as f64, (p + 1) as f64 / panels as f64, folded))
        .sum();

    let tail_f = |x: f64| (a * x).cos() / (x - 1.0);
    let zero = |k: f64| (k + 0.5) * PI / a;
    let mut k = (2.0 * a / PI - 0.5).ceil().max(0.0);
    let mut lo = 2.0;
    let mut sums = Vec::new();
    let mut total = 0.0;
    let mut last_estimate = f64::NAN;
    loop {
        let hi = zero(k);
        if hi > lo {
            total += rule.integrate(lo, hi, tail_f);
            sums.push(total);
            lo = hi;
        }
        k += 1.0;
        if sums.len() >= 12 && sums.len() % 2 == 0 {
            let window = &sums[sums.len().saturating_sub(40)..];
            let est = wynn_epsilon(window);
            if (est - last_estimate).abs() < 1e-13 * (1.0 + est.abs()) {
                return Ok(near + est);
            }
            last_estimate = est;
        }
        if lo > cutoff {
            return Err(Error::Acceleration(format!(
                "tail of a = {a} unresolved at x = {lo:.3e}"
            )));
        }
    }
}

/// One row of the exact / approximate / numeric comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvComparison {
    pub a: f64,
    pub exact: f64,
    pub approx: f64,
    pub quadrature: f64,
    /// |exact − approx|.
    pub abs_error: f64,
}

pub fn compare(a: f64) -> Result<PvComparison> {
    let exact = pv_exact(a)?;
    let approx = pv_approx(a);
    let quadrature = pv_quadrature(a, DEFAULT_EXCISION, DEFAULT_CUTOFF)?;
    Ok(PvComparison { a, exact, approx, quadrature, abs_error: (exact - approx).abs() })
}
