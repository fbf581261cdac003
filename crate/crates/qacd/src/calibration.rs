//! Per-qubit readout calibration files.
//!
//! ```json
//! {
//!   "n_qubits": 2,
//!   "qubits": [
//!     {"qubit": 0, "confusion": [[0.98, 0.02], [0.07, 0.93]]},
//!     {"qubit": 1, "effects": [
//!       [[0.97, 0], [0, 0], [0, 0], [0.05, 0]],
//!       [[0.03, 0], [0, 0], [0, 0], [0.95, 0]]
//!     ]}
//!   ]
//! }
//! ```
//!
//! Confusion row `t` lists `[p(0|t), p(1|t)]` for prepared state `t`.
//! Effects are 2x2 row-major `[re, im]` pairs and take precedence when a
//! qubit carries both. Qubit indices are 0-based; `qubit` defaults to the
//! entry's position.

use std::path::Path;

use serde::Deserialize;

use qacd_core::linalg::{CMatrix, C64};
use qacd_core::noise::{ReadoutSpec, DEFAULT_DENSE_QUBIT_CAP};
use qacd_core::qobjects::{Povm, COMPLETENESS_TOL};

use crate::error::{io_err, CliError, CliResult};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQubit {
    #[serde(default)]
    qubit: Option<usize>,
    #[serde(default)]
    confusion: Option<[[f64; 2]; 2]>,
    #[serde(default)]
    effects: Option<Vec<[[f64; 2]; 4]>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCalibration {
    n_qubits: usize,
    qubits: Vec<RawQubit>,
}

/// Validated per-qubit two-outcome measurements.
#[derive(Clone, Debug)]
pub struct Calibration {
    qubits: Vec<Povm>,
}

fn confusion_povm(q: usize, c: [[f64; 2]; 2]) -> CliResult<Povm> {
    for (t, row) in c.iter().enumerate() {
        if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(CliError::Format(format!(
                "qubit {q}: confusion row {t} has entries outside [0, 1]"
            )));
        }
        let s = row[0] + row[1];
        if (s - 1.0).abs() > COMPLETENESS_TOL {
            return Err(CliError::Format(format!(
                "qubit {q}: confusion row {t} sums to {s}, completeness violated"
            )));
        }
    }
    let m0 = CMatrix::diag_real(&[c[0][0], c[1][0]]);
    let m1 = CMatrix::diag_real(&[c[0][1], c[1][1]]);
    Povm::new(vec![m0, m1]).map_err(|e| CliError::Format(format!("qubit {q}: {e}")))
}

fn effects_povm(q: usize, effects: &[[[f64; 2]; 4]]) -> CliResult<Povm> {
    if effects.len() != 2 {
        return Err(CliError::Format(format!(
            "qubit {q}: expected 2 effects, found {}",
            effects.len()
        )));
    }
    let mats = effects
        .iter()
        .map(|e| CMatrix::from_vec(2, 2, e.iter().map(|&[re, im]| C64::new(re, im)).collect()))
        .collect::<Result<Vec<_>, _>>()?;
    Povm::new(mats).map_err(|e| CliError::Format(format!("qubit {q}: {e}")))
}

impl Calibration {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let raw: RawCalibration =
            serde_json::from_str(text).map_err(|e| CliError::Format(format!("calibration schema: {e}")))?;
        if raw.n_qubits == 0 {
            return Err(CliError::Format("calibration for zero qubits".into()));
        }
        let mut slots: Vec<Option<Povm>> = vec![None; raw.n_qubits];
        for (pos, entry) in raw.qubits.into_iter().enumerate() {
            let q = entry.qubit.unwrap_or(pos);
            if q >= raw.n_qubits {
                return Err(CliError::Format(format!(
                    "qubit {q} out of range for n_qubits = {}",
                    raw.n_qubits
                )));
            }
            if slots[q].is_some() {
                return Err(CliError::Format(format!("qubit {q} listed twice")));
            }
            let povm = match (entry.effects, entry.confusion) {
                (Some(e), _) => effects_povm(q, &e)?,
                (None, Some(c)) => confusion_povm(q, c)?,
                (None, None) => {
                    return Err(CliError::Format(format!("qubit {q}: neither effects nor confusion given")))
                }
            };
            slots[q] = Some(povm);
        }
        let qubits = slots
            .into_iter()
            .enumerate()
            .map(|(q, s)| s.ok_or_else(|| CliError::Format(format!("missing calibration for qubit {q}"))))
            .collect::<CliResult<Vec<_>>>()?;
        Ok(Calibration { qubits })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_json(&text).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubit_povms(&self) -> &[Povm] {
        &self.qubits
    }

    /// True when every qubit's effects are diagonal, i.e. the file is a
    /// pure confusion-matrix model.
    pub fn is_classical(&self) -> bool {
        self.qubits.iter().all(Povm::is_diagonal)
    }

    /// Confusion-model view; `None` when some effect is off-diagonal.
    pub fn readout_spec(&self) -> Option<ReadoutSpec> {
        if !self.is_classical() {
            return None;
        }
        ReadoutSpec::from_qubit_povms(&self.qubits).ok()
    }

    /// Product measurement on the first `n` qubits.
    pub fn povm(&self, n: usize) -> CliResult<Povm> {
        if n == 0 || n > self.n_qubits() {
            return Err(CliError::Config(format!(
                "calibration covers {} qubits, {n} requested",
                self.n_qubits()
            )));
        }
        if n > DEFAULT_DENSE_QUBIT_CAP {
            return Err(qacd_core::Error::Size {
                requested: n,
                cap: DEFAULT_DENSE_QUBIT_CAP,
            }
            .into());
        }
        Ok(Povm::product(&self.qubits[..n])?)
    }
}
