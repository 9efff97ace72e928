//! Parameter and result types shared by the rest of the crate.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Physical parameters of the chain.
///
/// Edge qubits 1 and 3 have frequency `omega` and decay rate `gamma`; the
/// central qubit has frequency `omega - delta_omega` and rate `gamma0`.
/// Neighbours are separated by a phase `kd` at the edge frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub gamma: f64,
    pub gamma0: f64,
    pub omega: f64,
    pub delta_omega: f64,
    pub kd: f64,
    pub excited_index: u8,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            gamma0: 1.0,
            omega: 1000.0,
            delta_omega: 0.0,
            kd: std::f64::consts::PI,
            excited_index: 2,
        }
    }
}

impl ChainConfig {
    /// Identical qubits, unit decay rate, Γ/Ω = 1e-3.
    pub fn identical(kd: f64, excited_index: u8) -> Self {
        Self { kd, excited_index, ..Self::default() }
    }

    /// Unit rates, Γ/Ω = 1e-3, central qubit detuned by `delta_omega`.
    pub fn detuned(kd: f64, delta_omega: f64, excited_index: u8) -> Self {
        Self { kd, delta_omega, excited_index, ..Self::default() }
    }

    /// Phase accumulated between neighbours at the central-qubit frequency.
    pub fn k0d(&self) -> f64 {
        if self.delta_omega == 0.0 {
            return self.kd;
        }
        self.kd * (self.omega - self.delta_omega) / self.omega
    }

    /// Central-qubit frequency Ω₀.
    pub fn omega0(&self) -> f64 {
        self.omega - self.delta_omega
    }

    /// True when all three qubits share frequency and decay rate.
    pub fn is_identical(&self) -> bool {
        self.delta_omega == 0.0 && self.gamma0 == self.gamma
    }

    /// Zero-based index of the initially excited qubit.
    pub fn excited(&self) -> usize {
        usize::from(self.excited_index) - 1
    }

    pub fn validate(self) -> Result<Self> {
        let finite = [self.gamma, self.gamma0, self.omega, self.delta_omega, self.kd]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidConfig("parameters must be finite".into()));
        }
        if self.gamma <= 0.0 {
            return Err(Error::InvalidConfig(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.gamma0 <= 0.0 {
            return Err(Error::InvalidConfig(format!("gamma0 must be positive, got {}", self.gamma0)));
        }
        if self.omega <= 0.0 {
            return Err(Error::InvalidConfig(format!("omega must be positive, got {}", self.omega)));
        }
        if self.delta_omega.abs() >= self.omega {
            return Err(Error::InvalidConfig(format!(
                "|delta_omega| = {} must be below omega = {}",
                self.delta_omega.abs(),
                self.omega
            )));
        }
        if self.kd < 0.0 {
            return Err(Error::InvalidConfig(format!("kd must be non-negative, got {}", self.kd)));
        }
        if !(1..=3).contains(&self.excited_index) {
            return Err(Error::InvalidConfig(format!(
                "excited_index must be 1, 2 or 3, got {}",
                self.excited_index
            )));
        }
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Self = serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        raw.validate()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct serializes")
    }
}

/// Validates a raw configuration; see [`ChainConfig::validate`].
pub fn validate_config(raw: ChainConfig) -> Result<ChainConfig> {
    raw.validate()
}

/// Three characteristic roots λ of dβ/dt = Mβ (complex energies are iλ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexRoots {
    pub lambda: [C64; 3],
}

impl ComplexRoots {
    pub fn new(l1: C64, l2: C64, l3: C64) -> Self {
        Self { lambda: [l1, l2, l3] }
    }

    pub fn sum(&self) -> C64 {
        self.lambda.iter().sum()
    }

    /// Roots ordered by real part, then imaginary part.
    pub fn sorted(&self) -> Self {
        let mut lambda = self.lambda;
        lambda.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Self { lambda }
    }

    pub fn max_abs(&self) -> f64 {
        self.lambda.iter().map(|l| l.norm()).fold(0.0, f64::max)
    }

    pub fn max_re(&self) -> f64 {
        self.lambda.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Complex energies Ē = iλ.
    pub fn energies(&self) -> [C64; 3] {
        self.lambda.map(|l| C64::i() * l)
    }

    /// Largest distance between the two root sets under the best of the six
    /// pairings. Insensitive to labelling.
    pub fn distance(&self, other: &Self) -> f64 {
        const PERMS: [[usize; 3]; 6] =
            [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        PERMS
            .iter()
            .map(|p| {
                (0..3)
                    .map(|i| (self.lambda[i] - other.lambda[p[i]]).norm())
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Sampled amplitudes β₁,β₂,β₃ and the emitted-photon probability.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrajectory {
    pub t: Vec<f64>,
    pub beta: Vec<[C64; 3]>,
    pub p_ph: Vec<f64>,
}

impl AmplitudeTrajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        self.t.last().copied().unwrap_or(0.0)
    }

    /// |β_n|² for qubit `n` (zero-based) at every sample.
    pub fn population(&self, n: usize) -> Vec<f64> {
        self.beta.iter().map(|b| b[n].norm_sqr()).collect()
    }

    pub fn last(&self) -> Option<[C64; 3]> {
        self.beta.last().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn accepts_resonant_chain() {
        let c = ChainConfig::identical(2.0 * PI, 2).validate().unwrap();
        assert_eq!(c.k0d(), 2.0 * PI);
    }

    #[test]
    fn k0d_follows_detuning() {
        let c = ChainConfig::detuned(2.0 * PI, 1.0, 2).validate().unwrap();
        assert!((c.k0d() - 2.0 * PI * 0.999).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        let bad = [
            ChainConfig { gamma: -1.0, ..ChainConfig::default() },
            ChainConfig { gamma0: 0.0, ..ChainConfig::default() },
            ChainConfig { omega: 0.0, ..ChainConfig::default() },
            ChainConfig { delta_omega: 1000.0, ..ChainConfig::default() },
            ChainConfig { delta_omega: -1200.0, ..ChainConfig::default() },
            ChainConfig { kd: -0.1, ..ChainConfig::default() },
            ChainConfig { kd: f64::NAN, ..ChainConfig::default() },
            ChainConfig { excited_index: 0, ..ChainConfig::default() },
            ChainConfig { excited_index: 4, ..ChainConfig::default() },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))), "{c:?}");
        }
    }

    #[test]
    fn json_rejects_unknown_keys() {
        let text = r#"{"gamma":1,"gamma0":1,"omega":1000,"delta_omega":0,"kd":1,"excited_index":2,"phase":3}"#;
        assert!(ChainConfig::from_json(text).is_err());
    }

    #[test]
    fn json_rejects_missing_keys() {
        let text = r#"{"gamma":1,"gamma0":1,"omega":1000,"kd":1,"excited_index":2}"#;
        assert!(ChainConfig::from_json(text).is_err());
    }

    #[test]
    fn root_distance_ignores_order() {
        let a = ComplexRoots::new(C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(-2.0, 0.5));
        let b = ComplexRoots::new(a.lambda[2], a.lambda[0], a.lambda[1]);
        assert_eq!(a.distance(&b), 0.0);
        assert_eq!(a.sorted().lambda[0], C64::new(-2.0, 0.5));
    }

    proptest! {
        #[test]
        fn json_round_trip_is_bitwise(
            gamma in 1e-3f64..1e3,
            gamma0 in 1e-3f64..1e3,
            omega in 1.0f64..1e6,
            frac in -0.999f64..0.999,
            kd in 0.0f64..100.0,
            n0 in 1u8..=3,
        ) {
            let c = ChainConfig { gamma, gamma0, omega, delta_omega: frac * omega, kd, excited_index: n0 }
                .validate()
                .unwrap();
            let back = ChainConfig::from_json(&c.to_json()).unwrap();
            prop_assert_eq!(c.gamma.to_bits(), back.gamma.to_bits());
            prop_assert_eq!(c.gamma0.to_bits(), back.gamma0.to_bits());
            prop_assert_eq!(c.omega.to_bits(), back.omega.to_bits());
            prop_assert_eq!(c.delta_omega.to_bits(), back.delta_omega.to_bits());
            prop_assert_eq!(c.kd.to_bits(), back.kd.to_bits());
            prop_assert_eq!(c.excited_index, back.excited_index);
            prop_assert_eq!(c.k0d().to_bits(), back.k0d().to_bits());
        }
    }
}
