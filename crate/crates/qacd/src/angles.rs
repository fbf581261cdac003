//! Plain-text angle tables for fixed VQE-shape circuits.
//!
//! ```text
//! # optional comments
//! qubits 3
//! layers 2
//! ansatz vqe-zy
//! 0.1 -0.4 2.0 ...   one circuit per line
//! ```
//!
//! Angles are layer-major, qubit-minor; `vqe-zy` lists `(z, y)` per qubit.

use std::fmt::Write as _;
use std::path::Path;

use qacd_core::ensembles::{Ansatz, ExternalParams};

use crate::error::{io_err, CliError, CliResult};

pub fn parse_angles(text: &str) -> CliResult<ExternalParams> {
    let mut qubits = None;
    let mut layers = None;
    let mut ansatz = None;
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: String| CliError::Format(format!("line {}: {m}", lineno + 1));
        let mut words = line.split_whitespace();
        let head = words.next().expect("nonempty line");
        let header_value = |words: &mut std::str::SplitWhitespace| -> CliResult<String> {
            let v = words.next().ok_or_else(|| err(format!("{head} needs a value")))?;
            if words.next().is_some() {
                return Err(err(format!("trailing text after {head}")));
            }
            Ok(v.to_string())
        };
        match head {
            "qubits" | "layers" | "ansatz" if !rows.is_empty() => {
                return Err(err("header after data rows".into()));
            }
            "qubits" => {
                qubits = Some(header_value(&mut words)?.parse::<usize>().map_err(|e| err(e.to_string()))?)
            }
            "layers" => {
                layers = Some(header_value(&mut words)?.parse::<usize>().map_err(|e| err(e.to_string()))?)
            }
            "ansatz" => ansatz = Some(header_value(&mut words)?.parse::<Ansatz>().map_err(|e| err(e.to_string()))?),
            _ => {
                let row = line
                    .split_whitespace()
                    .map(|w| w.parse::<f64>().map_err(|e| err(format!("{w:?}: {e}"))))
                    .collect::<CliResult<Vec<f64>>>()?;
                rows.push(row);
            }
        }
    }
    let missing = |k: &str| CliError::Format(format!("missing '{k}' header"));
    let params = ExternalParams::new(
        qubits.ok_or_else(|| missing("qubits"))?,
        layers.ok_or_else(|| missing("layers"))?,
        ansatz.ok_or_else(|| missing("ansatz"))?,
        rows,
    )?;
    Ok(params)
}

/// Serializes with shortest round-trip float formatting.
pub fn write_angles(params: &ExternalParams) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "qubits {}", params.n_qubits);
    let _ = writeln!(s, "layers {}", params.layers);
    let _ = writeln!(s, "ansatz {}", params.ansatz.name());
    for row in &params.rows {
        let words: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
        let _ = writeln!(s, "{}", words.join(" "));
    }
    s
}

pub fn load_angles(path: &Path) -> CliResult<ExternalParams> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_angles(&text).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))
}
