//! Experiment configuration files (JSON).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{io_err, CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Noisy Pauli eigenstate against its ideal version.
    StatesIdeal,
    /// Noisy Pauli eigenstate against the maximally mixed state.
    StatesUniform,
    /// Noisy product readout against the computational-basis measurement.
    PovmsIdeal,
    /// Product of small rotations against the identity channel.
    ChannelsIdeal,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::StatesIdeal,
        Scenario::StatesUniform,
        Scenario::PovmsIdeal,
        Scenario::ChannelsIdeal,
    ];

    /// Largest qubit count for the dense objects of this scenario.
    pub fn max_qubits(self) -> usize {
        match self {
            Scenario::StatesIdeal | Scenario::StatesUniform => 8,
            Scenario::PovmsIdeal => 6,
            Scenario::ChannelsIdeal => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario::StatesIdeal => "states-ideal",
            Scenario::StatesUniform => "states-uniform",
            Scenario::PovmsIdeal => "povms-ideal",
            Scenario::ChannelsIdeal => "channels-ideal",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnsembleConfig {
    Haar,
    /// `depth` defaults to `⌊1.5N⌋`.
    Brickwork {
        #[serde(default)]
        depth: Option<usize>,
    },
    Qaoa {
        #[serde(default)]
        layers: Option<usize>,
        /// Defaults to the ensemble seed.
        #[serde(default)]
        sat_seed: Option<u64>,
    },
    Vqe {
        #[serde(default)]
        layers: Option<usize>,
    },
    /// Fixed circuits from an angle table; contributes rows only at the
    /// table's qubit count.
    External { file: PathBuf },
}

impl EnsembleConfig {
    pub fn label(&self) -> &'static str {
        match self {
            EnsembleConfig::Haar => "haar",
            EnsembleConfig::Brickwork { .. } => "brickwork",
            EnsembleConfig::Qaoa { .. } => "qaoa",
            EnsembleConfig::Vqe { .. } => "vqe",
            EnsembleConfig::External { .. } => "external",
        }
    }
}

fn default_pauli_range() -> [f64; 2] {
    [0.001, 0.01]
}

fn default_rotation_range_pi() -> [f64; 2] {
    [0.025, 0.0313]
}

fn default_p00_range() -> [f64; 2] {
    [0.95, 0.995]
}

fn default_p11_range() -> [f64; 2] {
    [0.85, 0.95]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoiseConfig {
    /// Noiseless objects; every distance column is zero in the ideal
    /// scenarios.
    None,
    /// Per-qubit magnitudes drawn once from uniform ranges.
    Synthetic {
        /// Range for each of `p_X, p_Y, p_Z`.
        #[serde(default = "default_pauli_range")]
        pauli_range: [f64; 2],
        /// Rotation angles in units of π.
        #[serde(default = "default_rotation_range_pi")]
        rotation_range_pi: [f64; 2],
        #[serde(default = "default_p00_range")]
        p00_range: [f64; 2],
        #[serde(default = "default_p11_range")]
        p11_range: [f64; 2],
    },
    /// Per-qubit readout from a calibration file (povms-ideal only).
    Calibration { file: PathBuf },
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig::Synthetic {
            pauli_range: default_pauli_range(),
            rotation_range_pi: default_rotation_range_pi(),
            p00_range: default_p00_range(),
            p11_range: default_p11_range(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    pub noise: u64,
    pub ensemble: u64,
    pub sampling: u64,
}

fn default_samples() -> usize {
    1000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub n_min: usize,
    pub n_max: usize,
    pub ensembles: Vec<EnsembleConfig>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub seeds: Seeds,
    #[serde(default)]
    pub noise: NoiseConfig,
    /// Qubit count for the histogram command; defaults to `n_max`.
    #[serde(default)]
    pub histogram_n: Option<usize>,
    /// Output directory (scaling) or file (histogram); the command line
    /// takes precedence.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn check_range(name: &str, r: [f64; 2], hi_cap: f64) -> CliResult<()> {
    if !(r[0].is_finite() && r[1].is_finite() && 0.0 <= r[0] && r[0] <= r[1] && r[1] <= hi_cap) {
        return Err(CliError::Config(format!(
            "{name} must satisfy 0 <= lo <= hi <= {hi_cap}, got [{}, {}]",
            r[0], r[1]
        )));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates `path`; relative file references inside the
    /// config are resolved against its directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let mut cfg = Self::from_json(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for e in cfg.ensembles.iter_mut() {
            if let EnsembleConfig::External { file } = e {
                fix(file);
            }
        }
        if let NoiseConfig::Calibration { file } = &mut cfg.noise {
            fix(file);
        }
        if let Some(out) = cfg.out.as_mut() {
            fix(out);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let cap = self.scenario.max_qubits();
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(CliError::Config(format!(
                "qubit range {}..={} is empty or starts at zero",
                self.n_min, self.n_max
            )));
        }
        if self.n_max > cap {
            return Err(CliError::Config(format!(
                "{} is limited to {cap} qubits, got n_max = {}",
                self.scenario.name(),
                self.n_max
            )));
        }
        if let Some(h) = self.histogram_n {
            if h == 0 || h > cap {
                return Err(CliError::Config(format!("histogram_n = {h} outside 1..={cap}")));
            }
        }
        if self.samples < 2 {
            return Err(CliError::Config("samples must be at least 2".into()));
        }
        if self.ensembles.is_empty() {
            return Err(CliError::Config("no ensembles configured".into()));
        }
        for e in &self.ensembles {
            if matches!(e, EnsembleConfig::Brickwork { .. }) && self.n_min < 2 {
                return Err(CliError::Config("brickwork ensembles need n_min >= 2".into()));
            }
        }
        match &self.noise {
            NoiseConfig::None => {}
            NoiseConfig::Synthetic {
                pauli_range,
                rotation_range_pi,
                p00_range,
                p11_range,
            } => {
                check_range("pauli_range", *pauli_range, 1.0 / 3.0)?;
                check_range("rotation_range_pi", *rotation_range_pi, 2.0)?;
                check_range("p00_range", *p00_range, 1.0)?;
                check_range("p11_range", *p11_range, 1.0)?;
            }
            NoiseConfig::Calibration { .. } => {
                if self.scenario != Scenario::PovmsIdeal {
                    return Err(CliError::Config(
                        "calibration noise applies to the povms-ideal scenario only".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "scenario": "states-ideal", "n_min": 2, "n_max": 4,
        "ensembles": [{"kind": "vqe"}, {"kind": "qaoa", "layers": 3}],
        "seeds": {"noise": 1, "ensemble": 2, "sampling": 3}
    }"#;

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.samples, 1000);
        assert_eq!(c.noise, NoiseConfig::default());
        assert_eq!(c.ensembles[1], EnsembleConfig::Qaoa { layers: Some(3), sat_seed: None });
        let back = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn caps_and_schema_errors() {
        let over = MINIMAL.replace("\"n_max\": 4", "\"n_max\": 9");
        assert!(ExperimentConfig::from_json(&over).unwrap_err().to_string().contains("limited to 8"));
        let chan = MINIMAL.replace("states-ideal", "channels-ideal").replace("\"n_max\": 4", "\"n_max\": 6");
        assert!(ExperimentConfig::from_json(&chan).is_err());
        let typo = MINIMAL.replace("\"samples\"", "\"x\"").replace("\"n_min\"", "\"n_mni\"");
        assert!(ExperimentConfig::from_json(&typo).is_err());
        let bad_noise = MINIMAL.replace(
            "\"seeds\"",
            "\"noise\": {\"model\": \"synthetic\", \"pauli_range\": [0.2, 0.1]}, \"seeds\"",
        );
        assert!(ExperimentConfig::from_json(&bad_noise).is_err());
        let cal = MINIMAL.replace("\"seeds\"", "\"noise\": {\"model\": \"calibration\", \"file\": \"c.json\"}, \"seeds\"");
        assert!(ExperimentConfig::from_json(&cal).is_err());
        assert!(ExperimentConfig::from_json(&cal.replace("states-ideal", "povms-ideal")).is_ok());
    }
}
