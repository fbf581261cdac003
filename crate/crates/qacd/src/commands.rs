//! Command implementations shared by the binary and the tests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde_json::json;

use qacd_core::distances::acd_povms;
use qacd_core::ensembles::{describe, haar_frame_potential, CircuitEnsemble, FramePotentialEstimate};
use qacd_core::noise::{ex2_ex3_bounds, homogeneous_acd_m, lower_ideal_bound, ReadoutReference, DEFAULT_DENSE_QUBIT_CAP};
use qacd_core::qobjects::{comp_basis_povm, trivial_povm};

use crate::calibration::Calibration;
use crate::config::ExperimentConfig;
use crate::error::{io_err, CliError, CliResult};
use crate::parallel::{par_frame_potential, with_threads};
use crate::report::{csv_document, histogram_rows, ExperimentRecord, CSV_COLUMNS, HISTOGRAM_COLUMNS};
use crate::scenarios::{build_ensemble, NoiseDraws};

fn unix_time() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn config_header(command: &str, cfg: &ExperimentConfig, draws: &NoiseDraws) -> Vec<String> {
    let mut h = vec![
        format!("qacd {command} scenario={}", cfg.scenario.name()),
        format!("generated_unix={}", unix_time()),
        format!(
            "seeds noise={} ensemble={} sampling={} samples={}",
            cfg.seeds.noise, cfg.seeds.ensemble, cfg.seeds.sampling, cfg.samples
        ),
    ];
    h.extend(draws.header_lines(cfg.scenario));
    h
}

/// Output of a scaling run.
#[derive(Clone, Debug)]
pub struct ScalingOutput {
    pub records: Vec<ExperimentRecord>,
    pub csv: String,
    pub json: serde_json::Value,
}

/// One record per qubit count and ensemble.
pub fn scaling(cfg: &ExperimentConfig, threads: usize) -> CliResult<ScalingOutput> {
    let draws = NoiseDraws::draw(cfg)?;
    let records = with_threads(threads, || -> CliResult<Vec<ExperimentRecord>> {
        let mut records = Vec::new();
        for n in cfg.n_min..=cfg.n_max {
            let objects = draws.objects(cfg.scenario, n)?;
            let report = objects.report()?;
            for e in &cfg.ensembles {
                let Some(ens) = build_ensemble(e, n, cfg.seeds.ensemble)? else {
                    continue;
                };
                let t0 = Instant::now();
                let est = objects.estimate(&ens, cfg.samples, cfg.seeds.sampling)?;
                records.push(ExperimentRecord {
                    n,
                    d: objects.dim(),
                    kind: e.label().to_string(),
                    acd: report.acd,
                    wc: report.worst_case,
                    wc_is_lb: report.worst_case_is_lower_bound,
                    mc_mean: est.mean,
                    mc_se: est.standard_error,
                    samples: est.samples,
                    wall_time_s: t0.elapsed().as_secs_f64(),
                });
            }
        }
        Ok(records)
    })??;
    let header = config_header("scaling", cfg, &draws);
    let rows: Vec<String> = records.iter().map(ExperimentRecord::csv_row).collect();
    let csv = csv_document(&header, CSV_COLUMNS, &rows);
    let json = json!({
        "scenario": cfg.scenario.name(),
        "generated_unix": unix_time(),
        "config": cfg,
        "noise_draws": draws.to_json(),
        "columns": CSV_COLUMNS.split(',').collect::<Vec<_>>(),
        "records": records,
    });
    Ok(ScalingOutput { records, csv, json })
}

/// Writes `<scenario>.csv` and `<scenario>.json` under `dir`.
pub fn write_scaling(out: &ScalingOutput, cfg: &ExperimentConfig, dir: &Path) -> CliResult<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let csv_path = dir.join(format!("{}.csv", cfg.scenario.name()));
    let json_path = dir.join(format!("{}.json", cfg.scenario.name()));
    std::fs::write(&csv_path, &out.csv).map_err(io_err(&csv_path))?;
    let text = serde_json::to_string_pretty(&out.json).map_err(|source| CliError::Json {
        path: json_path.clone(),
        source,
    })?;
    std::fs::write(&json_path, text + "\n").map_err(io_err(&json_path))?;
    Ok((csv_path, json_path))
}

/// 50-bin histograms per ensemble at `histogram_n` qubits (default
/// `n_max`), with the acd and worst-case reference values on every row.
pub fn histogram(cfg: &ExperimentConfig, threads: usize) -> CliResult<String> {
    let draws = NoiseDraws::draw(cfg)?;
    let n = cfg.histogram_n.unwrap_or(cfg.n_max);
    let objects = draws.objects(cfg.scenario, n)?;
    let report = objects.report()?;
    let rows = with_threads(threads, || -> CliResult<Vec<String>> {
        let mut rows = Vec::new();
        for e in &cfg.ensembles {
            let Some(ens) = build_ensemble(e, n, cfg.seeds.ensemble)? else {
                continue;
            };
            let est = objects.estimate(&ens, cfg.samples, cfg.seeds.sampling)?;
            rows.extend(histogram_rows(e.label(), &est, report.acd, report.worst_case));
        }
        Ok(rows)
    })??;
    let mut header = config_header("histogram", cfg, &draws);
    header.insert(1, format!("N={n} d={} wc_is_lb={}", objects.dim(), report.worst_case_is_lower_bound));
    Ok(csv_document(&header, HISTOGRAM_COLUMNS, &rows))
}

/// Ensemble selection for the frame-potential command.
pub fn frame_potential_ensemble(kind: &str, n: usize, layers: usize, seed: u64) -> CliResult<CircuitEnsemble> {
    Ok(match kind {
        "haar" => CircuitEnsemble::haar(n, seed),
        "brickwork" => CircuitEnsemble::brickwork(n, layers, seed)?,
        "qaoa" => CircuitEnsemble::qaoa(n, layers, seed, seed),
        "vqe" => CircuitEnsemble::vqe(n, layers, seed),
        other => {
            return Err(CliError::Config(format!(
                "unknown ensemble {other:?}; expected haar, brickwork, qaoa or vqe"
            )))
        }
    })
}

pub fn frame_potential(
    kind: &str,
    n: usize,
    layers: usize,
    k: u32,
    pairs: usize,
    seed: u64,
    threads: usize,
) -> CliResult<(CircuitEnsemble, FramePotentialEstimate)> {
    if n == 0 || n > 8 {
        return Err(CliError::Config(format!("frame potential supports 1..=8 qubits, got {n}")));
    }
    let ens = frame_potential_ensemble(kind, n, layers, seed)?;
    let est = with_threads(threads, || par_frame_potential(&ens, k, pairs, seed))??;
    Ok((ens, est))
}

pub fn format_frame_potential(ens: &CircuitEnsemble, est: &FramePotentialEstimate, seed: u64) -> String {
    let haar = haar_frame_potential(est.k);
    let mut s = String::new();
    let _ = writeln!(s, "ensemble      {}", describe(ens));
    let _ = writeln!(s, "k             {}", est.k);
    let _ = writeln!(s, "pairs         {}", est.pairs);
    let _ = writeln!(s, "seed          {seed}");
    let _ = writeln!(s, "F_k           {} +/- {}", est.estimate, est.standard_error);
    let note = if ens.dim() < est.k as usize { " (Haar value k! needs d >= k)" } else { "" };
    let _ = writeln!(s, "Haar k!       {haar}{note}");
    let _ = writeln!(s, "F_k / k!      {}", est.estimate / haar);
    s
}

/// Reference constant quoted for the 54-qubit, 97% readout forecast.
pub const QUOTED_FORECAST: f64 = 0.13;

#[derive(Clone, Debug, PartialEq)]
pub struct Forecast {
    pub q_av: f64,
    pub n: usize,
    /// `½√(1 − 2 q^N)`, or 0 when `q^N > ½` and the bound is vacuous.
    pub lower_bound: f64,
    pub lower_bound_vacuous: bool,
    /// Symmetric readout with success `q_av` on every qubit against the
    /// ideal measurement.
    pub homogeneous_exact: f64,
    /// Same readout against the trivial measurement.
    pub homogeneous_to_trivial: f64,
}

impl Forecast {
    pub fn agrees_with_quote(&self, tol: f64) -> bool {
        (self.homogeneous_exact - QUOTED_FORECAST).abs() <= tol
    }
}

pub fn forecast(q_av: f64, n: usize) -> CliResult<Forecast> {
    if !(0.5..=1.0).contains(&q_av) {
        return Err(CliError::Config(format!("q_av must lie in [0.5, 1], got {q_av}")));
    }
    if n == 0 {
        return Err(CliError::Config("N must be positive".into()));
    }
    let (lower_bound, vacuous) = match lower_ideal_bound(q_av, n) {
        Ok(v) => (v, false),
        Err(qacd_core::Error::Precondition(_)) => (0.0, true),
        Err(e) => return Err(e.into()),
    };
    Ok(Forecast {
        q_av,
        n,
        lower_bound,
        lower_bound_vacuous: vacuous,
        homogeneous_exact: homogeneous_acd_m(q_av, q_av, n, ReadoutReference::Ideal)?,
        homogeneous_to_trivial: homogeneous_acd_m(q_av, q_av, n, ReadoutReference::Trivial)?,
    })
}

pub fn format_forecast(f: &Forecast) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "q_av = {}, N = {}", f.q_av, f.n);
    let vac = if f.lower_bound_vacuous { " (vacuous: q_av^N > 1/2)" } else { "" };
    let _ = writeln!(s, "lower bound 0.5*sqrt(1-2 q^N)      {:.4}{vac}", f.lower_bound);
    let _ = writeln!(s, "exact, homogeneous readout          {:.4}", f.homogeneous_exact);
    let _ = writeln!(s, "exact, against trivial measurement  {:.4}", f.homogeneous_to_trivial);
    let _ = writeln!(s, "quoted constant                     {QUOTED_FORECAST}");
    if f.agrees_with_quote(0.05) {
        let _ = writeln!(s, "agreement: exact value within 0.05 of the quoted constant");
    } else {
        let _ = writeln!(
            s,
            "discrepancy: exact value differs from the quoted constant by {:.4}; the quote also sits below the lower bound",
            f.homogeneous_exact - QUOTED_FORECAST
        );
    }
    s
}

/// Validation summary for a calibration file.
pub fn calibration_report(path: &Path) -> CliResult<String> {
    let cal = Calibration::load(path)?;
    let mut s = String::new();
    let _ = writeln!(s, "{}: {} qubits", path.display(), cal.n_qubits());
    for (q, m) in cal.qubit_povms().iter().enumerate() {
        let e = m.effects();
        let _ = writeln!(
            s,
            "qubit {q}: p(0|0)={:.6} p(1|1)={:.6}{}",
            e[0][(0, 0)].re,
            e[1][(1, 1)].re,
            if m.is_diagonal() { "" } else { " (coherent effects)" }
        );
    }
    match cal.readout_spec() {
        Some(spec) => {
            let _ = writeln!(s, "classical readout model, symmetric: {}", spec.is_symmetric());
            match ex2_ex3_bounds(&spec) {
                Ok(b) => {
                    let _ = writeln!(s, "lower bound on distance to ideal: {:.6}", b.lower_ideal);
                }
                Err(e) => {
                    let _ = writeln!(s, "lower bound to ideal unavailable: {e}");
                }
            }
        }
        None => {
            let _ = writeln!(s, "coherent readout model (off-diagonal effects)");
        }
    }
    let n = cal.n_qubits().min(DEFAULT_DENSE_QUBIT_CAP);
    let m = cal.povm(n)?;
    let d = 1usize << n;
    let _ = writeln!(s, "acd to ideal (first {n} qubits):   {:.6}", acd_povms(&m, &comp_basis_povm(n))?);
    let _ = writeln!(s, "acd to trivial (first {n} qubits): {:.6}", acd_povms(&m, &trivial_povm(d, d))?);
    Ok(s)
}
