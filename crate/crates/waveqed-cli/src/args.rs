use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "waveqed", version, about = "Three-qubit waveguide QED simulator")]
pub struct Cli {
    /// Worker threads for sweeps (WAVEQED_THREADS takes precedence).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Characteristic roots over a kd grid and a list of detunings.
    Eigen(EigenArgs),
    /// Amplitude trajectory.
    Evolve(EvolveArgs),
    /// Spectral density of the emitted photon, plus a peaks sidecar.
    Spectrum(SpectrumArgs),
    /// Principal-value integral: exact, approximate and numeric.
    Pvcheck(PvArgs),
    /// Collective states as JSON (identical qubits).
    States(StatesArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// JSON file with gamma, gamma0, omega, delta_omega, kd, excited_index.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Phase kd; accepts plain numbers or multiples of pi ("1.5pi", "pi/2").
    #[arg(long, value_parser = parse_phase)]
    pub kd: Option<f64>,

    /// Central-qubit detuning in units of gamma (comma-separated for eigen).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub delta_omega: Vec<f64>,

    /// Initially excited qubit (1, 2 or 3).
    #[arg(long)]
    pub excited: Option<u8>,

    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    #[command(flatten)]
    pub common: ConfigArgs,

    #[arg(long, value_parser = parse_phase, default_value = "0")]
    pub kd_min: f64,

    #[arg(long, value_parser = parse_phase, default_value = "2pi")]
    pub kd_max: f64,

    #[arg(long, default_value_t = 1000)]
    pub kd_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Ode,
    Closed,
    Collective,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: ConfigArgs,

    /// Final time in units of 1/gamma.
    #[arg(long, default_value_t = 20.0)]
    pub t_max: f64,

    /// RK4 step (and output spacing) in units of 1/gamma.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,

    #[arg(long, value_enum, default_value_t = Method::Ode)]
    pub method: Method,

    /// Run every available method on the same grid and report the largest
    /// deviation from the ODE; exit 3 if it exceeds the tolerance.
    #[arg(long)]
    pub verify: bool,

    #[arg(long, default_value_t = 1e-5)]
    pub verify_tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectrumMethod {
    Numeric,
    Closed,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: ConfigArgs,

    /// Evaluation time in units of 1/gamma.
    #[arg(long, default_value_t = 20.0)]
    pub t_max: f64,

    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,

    /// Lowest (omega - Omega)/gamma.
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    pub omega_min: f64,

    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub omega_max: f64,

    #[arg(long, default_value_t = 401)]
    pub omega_points: usize,

    #[arg(long, value_enum, default_value_t = SpectrumMethod::Numeric)]
    pub method: SpectrumMethod,
}

#[derive(Debug, Args)]
pub struct PvArgs {
    #[arg(long, value_parser = parse_phase, default_value = "0.2")]
    pub a_min: f64,

    #[arg(long, value_parser = parse_phase, default_value = "6pi")]
    pub a_max: f64,

    #[arg(long, default_value_t = 200)]
    pub a_points: usize,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatesArgs {
    #[command(flatten)]
    pub common: ConfigArgs,
}

/// Parses "2", "0.5pi", "pi", "3pi/2", "pi/4".
pub fn parse_phase(text: &str) -> Result<f64, String> {
    let s = text.trim().to_ascii_lowercase();
    let (body, denom) = match s.split_once('/') {
        Some((b, d)) => {
            let d: f64 = d.trim().parse().map_err(|_| format!("bad denominator in {text:?}"))?;
            if d == 0.0 {
                return Err(format!("zero denominator in {text:?}"));
            }
            (b.trim().to_string(), d)
        }
        None => (s.clone(), 1.0),
    };
    let value = match body.strip_suffix("pi") {
        Some("") => std::f64::consts::PI,
        Some(coef) => {
            let c: f64 = coef.trim().trim_end_matches('*').parse().map_err(|_| format!("bad phase {text:?}"))?;
            c * std::f64::consts::PI
        }
        None => body.parse().map_err(|_| format!("bad phase {text:?}"))?,
    };
    let v = value / denom;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("phase {text:?} is not finite"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn phases() {
        assert_eq!(parse_phase("1.25").unwrap(), 1.25);
        assert_eq!(parse_phase("pi").unwrap(), PI);
        assert_eq!(parse_phase("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_phase("1.5*pi").unwrap(), 1.5 * PI);
        assert_eq!(parse_phase("3pi/2").unwrap(), 1.5 * PI);
        assert_eq!(parse_phase("pi/4").unwrap(), PI / 4.0);
        assert!(parse_phase("pie").is_err());
        assert!(parse_phase("pi/0").is_err());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
