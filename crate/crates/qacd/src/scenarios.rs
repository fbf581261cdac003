//! Objects compared in each scenario, built from noise magnitudes drawn
//! once per configuration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use qacd_core::distances::DistanceReport;
use qacd_core::ensembles::{default_layers, CircuitEnsemble};
use qacd_core::montecarlo::AvgTvdEstimate;
use qacd_core::noise::{build_readout_povm, coherent_rotation_channel, noisy_product_state, PauliChannelSpec, ReadoutSpec};
use qacd_core::qobjects::{
    comp_basis_povm, identity_channel, maximally_mixed, Axis, Povm, QuantumChannel,
    QuantumState, Sign,
};

use crate::angles::load_angles;
use crate::calibration::Calibration;
use crate::config::{EnsembleConfig, ExperimentConfig, NoiseConfig, Scenario};
use crate::error::{CliError, CliResult};
use crate::parallel::{par_avg_tvd_channels, par_avg_tvd_povms, par_avg_tvd_states};

const PI: f64 = std::f64::consts::PI;

/// Per-qubit noise parameters for `n_max` qubits; an `N`-qubit run uses
/// the first `N`.
#[derive(Clone, Debug)]
pub struct NoiseDraws {
    pub pauli: Vec<[f64; 4]>,
    pub axes: Vec<Axis>,
    pub signs: Vec<Sign>,
    pub rotation_axes: Vec<Axis>,
    pub rotation_angles: Vec<f64>,
    pub readout: Vec<(f64, f64)>,
    pub calibration: Option<Calibration>,
}

fn uniform(rng: &mut ChaCha8Rng, r: [f64; 2]) -> f64 {
    if r[0] == r[1] {
        r[0]
    } else {
        rng.random_range(r[0]..r[1])
    }
}

impl NoiseDraws {
    /// Deterministic in `seeds.noise`. All draws are made in a fixed order
    /// whatever the scenario, so switching scenarios keeps the eigenstate
    /// and magnitudes aligned.
    pub fn draw(cfg: &ExperimentConfig) -> CliResult<Self> {
        let n = cfg.n_max;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seeds.noise);
        let axes: Vec<Axis> = (0..n).map(|_| Axis::ALL[rng.random_range(0..3)]).collect();
        let signs: Vec<Sign> = (0..n)
            .map(|_| if rng.random::<bool>() { Sign::Minus } else { Sign::Plus })
            .collect();
        let rotation_axes: Vec<Axis> = (0..n).map(|_| Axis::ALL[rng.random_range(0..3)]).collect();
        let mut draws = NoiseDraws {
            pauli: vec![[1.0, 0.0, 0.0, 0.0]; n],
            axes,
            signs,
            rotation_axes,
            rotation_angles: vec![0.0; n],
            readout: vec![(1.0, 1.0); n],
            calibration: None,
        };
        match &cfg.noise {
            NoiseConfig::None => {}
            NoiseConfig::Synthetic {
                pauli_range,
                rotation_range_pi,
                p00_range,
                p11_range,
            } => {
                for q in 0..n {
                    let (x, y, z) = (
                        uniform(&mut rng, *pauli_range),
                        uniform(&mut rng, *pauli_range),
                        uniform(&mut rng, *pauli_range),
                    );
                    draws.pauli[q] = [1.0 - x - y - z, x, y, z];
                    draws.rotation_angles[q] = PI * uniform(&mut rng, *rotation_range_pi);
                    draws.readout[q] = (uniform(&mut rng, *p00_range), uniform(&mut rng, *p11_range));
                }
            }
            NoiseConfig::Calibration { file } => {
                let cal = Calibration::load(file)?;
                if cal.n_qubits() < n {
                    return Err(CliError::Config(format!(
                        "calibration covers {} qubits, n_max = {n}",
                        cal.n_qubits()
                    )));
                }
                draws.calibration = Some(cal);
            }
        }
        Ok(draws)
    }

    pub fn objects(&self, scenario: Scenario, n: usize) -> CliResult<Objects> {
        if n == 0 || n > self.axes.len() {
            return Err(CliError::Config(format!("no noise draws for {n} qubits")));
        }
        Ok(match scenario {
            Scenario::StatesIdeal | Scenario::StatesUniform => {
                let spec = PauliChannelSpec::new(self.pauli[..n].to_vec())?;
                let rho = noisy_product_state(&spec, &self.axes[..n], &self.signs[..n])?;
                // Same construction path as `rho`, so that noiseless runs
                // give exact zeros.
                let sigma = if scenario == Scenario::StatesIdeal {
                    noisy_product_state(&PauliChannelSpec::identity(n), &self.axes[..n], &self.signs[..n])?
                } else {
                    maximally_mixed(n)
                };
                Objects::States(rho, sigma)
            }
            Scenario::PovmsIdeal => {
                let noisy = match &self.calibration {
                    Some(c) => c.povm(n)?,
                    None => build_readout_povm(&ReadoutSpec::new(self.readout[..n].to_vec())?)?,
                };
                Objects::Povms(noisy, comp_basis_povm(n))
            }
            Scenario::ChannelsIdeal => Objects::Channels(
                coherent_rotation_channel(&self.rotation_axes[..n], &self.rotation_angles[..n])?,
                identity_channel(1 << n),
            ),
        })
    }

    /// Header comment lines recording the draws.
    pub fn header_lines(&self, scenario: Scenario) -> Vec<String> {
        let mut out = Vec::new();
        for q in 0..self.axes.len() {
            let line = match scenario {
                Scenario::StatesIdeal | Scenario::StatesUniform => {
                    let p = self.pauli[q];
                    format!(
                        "qubit {q}: state {}{} pI={} pX={} pY={} pZ={}",
                        self.signs[q], self.axes[q], p[0], p[1], p[2], p[3]
                    )
                }
                Scenario::PovmsIdeal => match &self.calibration {
                    Some(_) => format!("qubit {q}: calibration file"),
                    None => format!("qubit {q}: p00={} p11={}", self.readout[q].0, self.readout[q].1),
                },
                Scenario::ChannelsIdeal => format!(
                    "qubit {q}: rotation axis {} angle={}",
                    self.rotation_axes[q], self.rotation_angles[q]
                ),
            };
            out.push(line);
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let n = self.axes.len();
        json!({
            "state_axes": self.axes.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "state_signs": self.signs.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "pauli": self.pauli,
            "rotation_axes": self.rotation_axes.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "rotation_angles": self.rotation_angles,
            "readout": self.readout.iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
            "calibration": self.calibration.as_ref().map(|_| n),
        })
    }
}

/// The pair of objects compared at one qubit count.
#[derive(Clone, Debug)]
pub enum Objects {
    States(QuantumState, QuantumState),
    Povms(Povm, Povm),
    Channels(QuantumChannel, QuantumChannel),
}

impl Objects {
    pub fn dim(&self) -> usize {
        match self {
            Objects::States(r, _) => r.dim(),
            Objects::Povms(m, _) => m.dim(),
            Objects::Channels(l, _) => l.dim(),
        }
    }

    pub fn report(&self) -> CliResult<DistanceReport> {
        Ok(match self {
            Objects::States(r, s) => DistanceReport::states(r, s)?,
            Objects::Povms(m, n) => DistanceReport::povms(m, n)?,
            Objects::Channels(l, g) => DistanceReport::channels(l, g)?,
        })
    }

    /// Parallel Monte-Carlo estimate; identical for every pool size.
    pub fn estimate(&self, ensemble: &CircuitEnsemble, samples: usize, seed: u64) -> CliResult<AvgTvdEstimate> {
        Ok(match self {
            Objects::States(r, s) => par_avg_tvd_states(r, s, ensemble, samples, seed)?,
            Objects::Povms(m, n) => par_avg_tvd_povms(m, n, ensemble, samples, seed)?,
            Objects::Channels(l, g) => par_avg_tvd_channels(l, g, ensemble, samples, seed)?,
        })
    }
}

/// Ensemble on `n` qubits, or `None` when an external table is for a
/// different qubit count.
pub fn build_ensemble(e: &EnsembleConfig, n: usize, seed: u64) -> CliResult<Option<CircuitEnsemble>> {
    let layers = |l: &Option<usize>| l.unwrap_or_else(|| default_layers(n));
    Ok(Some(match e {
        EnsembleConfig::Haar => CircuitEnsemble::haar(n, seed),
        EnsembleConfig::Brickwork { depth } => CircuitEnsemble::brickwork(n, layers(depth), seed)?,
        EnsembleConfig::Qaoa { layers: l, sat_seed } => {
            CircuitEnsemble::qaoa(n, layers(l), sat_seed.unwrap_or(seed), seed)
        }
        EnsembleConfig::Vqe { layers: l } => CircuitEnsemble::vqe(n, layers(l), seed),
        EnsembleConfig::External { file } => {
            let params = load_angles(file)?;
            if params.n_qubits != n {
                return Ok(None);
            }
            CircuitEnsemble::external(params, seed)
        }
    }))
}
