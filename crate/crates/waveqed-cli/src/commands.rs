use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use rayon::prelude::*;
use waveqed::amplitude_dynamics::{closed_form_trajectory, evolve_ode, max_deviation, photon_emission_probability, time_grid};
use waveqed::collective_states::{decompose_initial, eigenvectors_biorthogonal, reconstruct_amplitudes};
use waveqed::effective_hamiltonian::closed_form_roots;
use waveqed::pv_quadrature::compare;
use waveqed::spectroscopy::{linspace, spectrum_closed, spectrum_numeric};
use waveqed::{AmplitudeTrajectory, ChainConfig, Error};

use crate::args::{Command, ConfigArgs, EigenArgs, EvolveArgs, Method, PvArgs, SpectrumArgs, SpectrumMethod, StatesArgs};
use crate::output::{emit, sidecar, write_text, GridSpec, Grids, RunManifest, Table, TimeSpec};

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn config(error: anyhow::Error) -> Self {
        Self { code: EXIT_CONFIG, error }
    }

    pub fn numeric(error: anyhow::Error) -> Self {
        Self { code: EXIT_NUMERIC, error }
    }

    pub fn io(error: anyhow::Error) -> Self {
        Self { code: EXIT_IO, error }
    }
}

/// Bad input maps to 2, numerical breakdown to 3.
impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidConfig(_)
            | Error::StepRejected { .. }
            | Error::Unsupported(_)
            | Error::OutOfRange { .. }
            | Error::Domain(_) => EXIT_CONFIG,
            _ => EXIT_NUMERIC,
        };
        Self { code, error: e.into() }
    }
}

type CmdResult = Result<(), Failure>;

pub fn dispatch(command: Command) -> CmdResult {
    match command {
        Command::Eigen(a) => eigen(a),
        Command::Evolve(a) => evolve(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Pvcheck(a) => pvcheck(a),
        Command::States(a) => states(a),
    }
}

/// File config (or defaults) with command-line overrides applied.
/// `--delta-omega` is read in units of gamma.
fn load_config(common: &ConfigArgs, allow_delta_list: bool) -> Result<ChainConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))
                .map_err(Failure::io)?;
            serde_json::from_str::<ChainConfig>(&text)
                .with_context(|| format!("parsing {}", path.display()))
                .map_err(Failure::config)?
        }
        None => ChainConfig::default(),
    };
    if let Some(kd) = common.kd {
        cfg.kd = kd;
    }
    match common.delta_omega.as_slice() {
        [] => {}
        [d] => cfg.delta_omega = d * cfg.gamma,
        _ if allow_delta_list => {}
        _ => return Err(Failure::config(anyhow!("--delta-omega takes a single value here"))),
    }
    if let Some(n) = common.excited {
        cfg.excited_index = n;
    }
    Ok(cfg.validate()?)
}

fn check_points(name: &str, points: usize) -> Result<(), Failure> {
    if points == 0 {
        return Err(Failure::config(anyhow!("{name} must be at least 1")));
    }
    Ok(())
}

fn finish(out: Option<&Path>, text: &str, manifest: &RunManifest) -> CmdResult {
    emit(out, text, manifest).context("writing output").map_err(Failure::io)
}

fn eigen(args: EigenArgs) -> CmdResult {
    let cfg = load_config(&args.common, true)?;
    let g = cfg.gamma;
    let deltas: Vec<f64> = if args.common.delta_omega.is_empty() {
        vec![cfg.delta_omega / g]
    } else {
        args.common.delta_omega.clone()
    };
    let grid = match args.common.kd {
        Some(kd) => GridSpec { min: kd, max: kd, points: 1 },
        None => GridSpec { min: args.kd_min, max: args.kd_max, points: args.kd_points },
    };
    check_points("--kd-points", grid.points)?;
    let kds = linspace(grid.min, grid.max, grid.points);

    let jobs: Vec<(f64, f64)> = deltas.iter().flat_map(|&d| kds.iter().map(move |&kd| (d, kd))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(d, kd)| {
            let point = ChainConfig { kd, delta_omega: d * g, ..cfg }.validate()?;
            let l = closed_form_roots(&point).lambda;
            Ok([kd, d, l[0].re / g, l[0].im / g, l[1].re / g, l[1].im / g, l[2].re / g, l[2].im / g])
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mut table = Table::new(&["kd", "delta_omega", "re_l1", "im_l1", "re_l2", "im_l2", "re_l3", "im_l3"]);
    rows.iter().for_each(|r| table.row(r));
    let grids = Grids { kd: Some(grid), delta_omega: Some(deltas), ..Grids::default() };
    let manifest = RunManifest::new("eigen", Some(cfg), grids, None, args.common.out.as_deref());
    finish(args.common.out.as_deref(), &table.render(&manifest.sha256()), &manifest)
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Ode => "ode",
        Method::Closed => "closed",
        Method::Collective => "collective",
    }
}

fn collective_trajectory(cfg: &ChainConfig, t: &[f64]) -> Result<AmplitudeTrajectory, Failure> {
    if !cfg.is_identical() {
        return Err(Failure::config(anyhow!(
            "collective method needs identical qubits (delta_omega = 0, gamma0 = gamma)"
        )));
    }
    let states = eigenvectors_biorthogonal(cfg.kd, cfg.gamma);
    let coeffs = decompose_initial(&states, cfg.excited_index)?;
    let beta = t.iter().map(|&s| reconstruct_amplitudes(&states, &coeffs, s)).collect();
    let mut traj = AmplitudeTrajectory { t: t.to_vec(), beta, p_ph: Vec::new() };
    traj.p_ph = photon_emission_probability(&traj)?;
    Ok(traj)
}

fn trajectory(cfg: &ChainConfig, method: Method, t_max: f64, dt: f64) -> Result<AmplitudeTrajectory, Failure> {
    let g = cfg.gamma;
    match method {
        Method::Ode => Ok(evolve_ode(cfg, t_max / g, dt / g)?),
        Method::Closed => {
            validate_time(t_max, dt)?;
            Ok(closed_form_trajectory(cfg, &time_grid(t_max / g, dt / g))?)
        }
        Method::Collective => {
            validate_time(t_max, dt)?;
            collective_trajectory(cfg, &time_grid(t_max / g, dt / g))
        }
    }
}

fn validate_time(t_max: f64, dt: f64) -> Result<(), Failure> {
    if !(t_max > 0.0 && t_max.is_finite() && dt > 0.0 && dt.is_finite()) {
        return Err(Failure::config(anyhow!("t_max and dt must be positive, got {t_max} and {dt}")));
    }
    Ok(())
}

fn evolve(args: EvolveArgs) -> CmdResult {
    let cfg = load_config(&args.common, false)?;
    if args.method == Method::Collective && !cfg.is_identical() {
        return Err(Failure::config(anyhow!(
            "collective method needs identical qubits (delta_omega = 0, gamma0 = gamma)"
        )));
    }
    let traj = trajectory(&cfg, args.method, args.t_max, args.dt)?;

    let mut verdict = Ok(());
    if args.verify {
        let reference = if args.method == Method::Ode {
            traj.clone()
        } else {
            trajectory(&cfg, Method::Ode, args.t_max, args.dt)?
        };
        let mut worst = 0.0_f64;
        for m in [Method::Closed, Method::Collective] {
            let other = match (m, args.method) {
                (a, b) if a == b => traj.clone(),
                (Method::Collective, _) if !cfg.is_identical() => continue,
                _ => trajectory(&cfg, m, args.t_max, args.dt)?,
            };
            let dev = max_deviation(&reference, &other);
            eprintln!("verify: max |beta_{} - beta_ode| = {dev:e}", method_name(m));
            worst = worst.max(dev);
        }
        if !(worst <= args.verify_tolerance) {
            verdict = Err(Failure::numeric(anyhow!(
                "verification failed: deviation {worst:e} exceeds {:e}",
                args.verify_tolerance
            )));
        }
    }

    let g = cfg.gamma;
    let mut table = Table::new(&[
        "t", "re_b1", "im_b1", "re_b2", "im_b2", "re_b3", "im_b3", "p1", "p2", "p3", "p_ph",
    ]);
    for ((t, b), p) in traj.t.iter().zip(&traj.beta).zip(&traj.p_ph) {
        table.row(&[
            t * g,
            b[0].re,
            b[0].im,
            b[1].re,
            b[1].im,
            b[2].re,
            b[2].im,
            b[0].norm_sqr(),
            b[1].norm_sqr(),
            b[2].norm_sqr(),
            *p,
        ]);
    }
    let grids = Grids { time: Some(TimeSpec { t_max: args.t_max, dt: args.dt }), ..Grids::default() };
    let manifest = RunManifest::new("evolve", Some(cfg), grids, Some(method_name(args.method)), args.common.out.as_deref());
    finish(args.common.out.as_deref(), &table.render(&manifest.sha256()), &manifest)?;
    verdict
}

fn spectrum(args: SpectrumArgs) -> CmdResult {
    let cfg = load_config(&args.common, false)?;
    check_points("--omega-points", args.omega_points)?;
    let grid = linspace(args.omega_min, args.omega_max, args.omega_points);
    let mut curve = match args.method {
        SpectrumMethod::Numeric => spectrum_numeric(&cfg, &grid, args.t_max, args.dt)?,
        SpectrumMethod::Closed => spectrum_closed(&cfg, &grid, args.t_max)?,
    };
    match curve.analyze() {
        Ok(_) | Err(Error::NoPeak) => {}
        Err(e) => return Err(e.into()),
    }

    let mut table = Table::new(&["omega_minus_Omega_over_Gamma", "S"]);
    for (x, s) in curve.omega_grid.iter().zip(&curve.s) {
        table.row(&[*x, *s]);
    }
    let method = match args.method {
        SpectrumMethod::Numeric => "numeric",
        SpectrumMethod::Closed => "closed",
    };
    let grids = Grids {
        omega: Some(GridSpec { min: args.omega_min, max: args.omega_max, points: args.omega_points }),
        time: Some(TimeSpec { t_max: args.t_max, dt: args.dt }),
        ..Grids::default()
    };
    let out = args.common.out.as_deref();
    let manifest = RunManifest::new("spectrum", Some(cfg), grids, Some(method), out);
    let hash = manifest.sha256();
    finish(out, &table.render(&hash), &manifest)?;
    if let Some(path) = out {
        let peaks = serde_json::json!({
            "manifest_sha256": hash,
            "t": curve.t,
            "peaks": curve.peaks,
            "separations": curve.separations(),
        });
        let text = serde_json::to_string_pretty(&peaks).expect("peaks serialize") + "\n";
        write_text(&sidecar(path, ".peaks.json"), &text).context("writing peaks").map_err(Failure::io)?;
    }
    Ok(())
}

fn pvcheck(args: PvArgs) -> CmdResult {
    check_points("--a-points", args.a_points)?;
    if !(args.a_min > 0.0) {
        return Err(Failure::config(anyhow!("--a-min must be positive")));
    }
    let grid = linspace(args.a_min, args.a_max, args.a_points);
    let rows = grid.par_iter().map(|&a| compare(a)).collect::<Result<Vec<_>, Error>>()?;
    let mut table = Table::new(&["a_over_pi", "exact", "approx", "quadrature"]);
    for r in &rows {
        table.row(&[r.a / std::f64::consts::PI, r.exact, r.approx, r.quadrature]);
    }
    let grids = Grids { a: Some(GridSpec { min: args.a_min, max: args.a_max, points: args.a_points }), ..Grids::default() };
    let manifest = RunManifest::new("pvcheck", None, grids, None, args.out.as_deref());
    finish(args.out.as_deref(), &table.render(&manifest.sha256()), &manifest)
}

fn states(args: StatesArgs) -> CmdResult {
    let cfg = load_config(&args.common, false)?;
    if !cfg.is_identical() {
        return Err(Failure::config(anyhow!("collective states need identical qubits")));
    }
    let set = eigenvectors_biorthogonal(cfg.kd, cfg.gamma);
    let manifest = RunManifest::new("states", Some(cfg), Grids::default(), None, args.common.out.as_deref());
    let mut value: serde_json::Value = serde_json::from_str(&set.to_json()).expect("states export is JSON");
    value["manifest_sha256"] = serde_json::Value::String(manifest.sha256());
    let text = serde_json::to_string_pretty(&value).expect("json value serializes") + "\n";
    finish(args.common.out.as_deref(), &text, &manifest)
}
