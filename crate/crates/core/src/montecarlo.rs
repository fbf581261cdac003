//! Ensemble-averaged total variation distances for the three protocols:
//! rotated states, measurements on random states, and channels sandwiched
//! between two random unitaries.
//!
//! A trial is a pure function of `(seed, index)`. Estimators collect trial
//! values in index order and fold them sequentially, so a parallel driver
//! that fills the same vector reproduces the sequential result exactly.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::distances::tvd_slices;
use crate::ensembles::{CircuitEnsemble, SampledUnitary};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::qobjects::{born_pure_raw, Povm, QuantumChannel, QuantumState, COMPLETENESS_TOL};

pub const HISTOGRAM_BINS: usize = 50;

/// Eigenvalues below this are dropped from mixed-state decompositions.
const RANK_CUTOFF: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct AvgTvdEstimate {
    pub mean: f64,
    pub standard_error: f64,
    pub samples: usize,
    /// Counts over `[0, 1]` in `HISTOGRAM_BINS` equal bins; 1.0 falls in
    /// the last bin.
    pub histogram: Vec<u64>,
    pub seed: u64,
}

pub fn histogram_bin(x: f64) -> usize {
    let b = (x.clamp(0.0, 1.0) * HISTOGRAM_BINS as f64) as usize;
    b.min(HISTOGRAM_BINS - 1)
}

impl AvgTvdEstimate {
    /// Mean, standard error `s/√n` and histogram of `values`, folded in
    /// order.
    pub fn from_samples(values: &[f64], seed: u64) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::Domain("at least two samples are required".into()));
        }
        let mut hist = vec![0u64; HISTOGRAM_BINS];
        let mut sum = 0.0;
        for &v in values {
            sum += v;
            hist[histogram_bin(v)] += 1;
        }
        let mean = sum / n as f64;
        let mut ss = 0.0;
        for &v in values {
            ss += (v - mean) * (v - mean);
        }
        let sd = (ss / (n - 1) as f64).sqrt();
        Ok(AvgTvdEstimate {
            mean,
            standard_error: sd / (n as f64).sqrt(),
            samples: n,
            histogram: hist,
            seed,
        })
    }

    /// Weighted version used for exhaustive enumeration of discrete
    /// ensembles. The mean is exact, so the standard error is zero; the
    /// histogram counts each value once.
    pub fn from_weighted(values: &[f64], weights: &[f64], seed: u64) -> Result<Self> {
        if values.len() != weights.len() || values.is_empty() {
            return Err(Error::Shape("one weight per value required".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > COMPLETENESS_TOL {
            return Err(Error::Inconsistent { total });
        }
        let mut hist = vec![0u64; HISTOGRAM_BINS];
        let mut mean = 0.0;
        for (&v, &w) in values.iter().zip(weights) {
            mean += w * v;
            hist[histogram_bin(v)] += 1;
        }
        Ok(AvgTvdEstimate {
            mean,
            standard_error: 0.0,
            samples: values.len(),
            histogram: hist,
            seed,
        })
    }
}

/// A distinguishing experiment driven by draws from an ensemble.
pub trait Protocol: Sync {
    fn dim(&self) -> usize;

    /// Ensemble draws consumed per trial, taken from streams `0..draws`.
    fn draws(&self) -> usize;

    /// TVD between the two output distributions for fixed unitaries.
    fn tvd_for(&self, unitaries: &[&SampledUnitary], reference: &[C64]) -> Result<f64>;
}

fn check_ensemble(p: &impl Protocol, ensemble: &CircuitEnsemble) -> Result<()> {
    if p.dim() != ensemble.dim() {
        return Err(Error::Shape(format!(
            "objects of dimension {} with an ensemble on {}",
            p.dim(),
            ensemble.dim()
        )));
    }
    Ok(())
}

/// Trial `index`; the ensemble's own seed selects the draws.
pub fn trial(p: &impl Protocol, ensemble: &CircuitEnsemble, index: u64) -> Result<f64> {
    let us: Vec<SampledUnitary> = (0..p.draws() as u64).map(|s| ensemble.sample(s, index)).collect();
    let refs: Vec<&SampledUnitary> = us.iter().collect();
    p.tvd_for(&refs, &ensemble.reference_vector())
}

/// Sequential estimator over `samples` trials under `seed`.
pub fn avg_tvd(p: &impl Protocol, ensemble: &CircuitEnsemble, samples: usize, seed: u64) -> Result<AvgTvdEstimate> {
    check_ensemble(p, ensemble)?;
    if samples < 2 {
        return Err(Error::Domain("at least two samples are required".into()));
    }
    let ens = ensemble.with_seed(seed);
    let values = (0..samples as u64)
        .map(|i| trial(p, &ens, i))
        .collect::<Result<Vec<f64>>>()?;
    AvgTvdEstimate::from_samples(&values, seed)
}

/// `Σ ν_{j_1} ⋯ ν_{j_r} d_tv` over all draws of a discrete ensemble.
pub fn exact_avg_tvd_discrete(p: &impl Protocol, ensemble: &CircuitEnsemble) -> Result<f64> {
    let (values, weights) = enumerate_discrete(p, ensemble)?;
    Ok(values.iter().zip(&weights).map(|(v, w)| v * w).sum())
}

/// Exhaustive weighted estimate over a discrete ensemble.
pub fn exhaustive_estimate(p: &impl Protocol, ensemble: &CircuitEnsemble) -> Result<AvgTvdEstimate> {
    let (values, weights) = enumerate_discrete(p, ensemble)?;
    AvgTvdEstimate::from_weighted(&values, &weights, ensemble.seed())
}

fn enumerate_discrete(p: &impl Protocol, ensemble: &CircuitEnsemble) -> Result<(Vec<f64>, Vec<f64>)> {
    check_ensemble(p, ensemble)?;
    let elements = ensemble
        .elements()
        .ok_or_else(|| Error::Domain("exact averaging needs a discrete ensemble".into()))?;
    let r = p.draws();
    let j = elements.len();
    let total = j.checked_pow(r as u32).ok_or(Error::Size {
        requested: usize::MAX,
        cap: usize::MAX,
    })?;
    let reference = ensemble.reference_vector();
    let mut values = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut picks: Vec<&SampledUnitary> = Vec::with_capacity(r);
    for t in 0..total {
        picks.clear();
        let mut w = 1.0;
        let mut rest = t;
        for _ in 0..r {
            let (wj, u) = &elements[rest % j];
            picks.push(u);
            w *= wj;
            rest /= j;
        }
        values.push(p.tvd_for(&picks, &reference)?);
        weights.push(w);
    }
    Ok((values, weights))
}

/// Spectral data of a state, enough to evaluate `diag(U ρ U†)`.
#[derive(Clone, Debug)]
enum StateForm {
    Pure(Vec<C64>),
    Mixed(Vec<(f64, Vec<C64>)>),
    MaximallyMixed(usize),
}

impl StateForm {
    fn new(rho: &QuantumState) -> Result<Self> {
        if let Some(psi) = rho.pure_vector() {
            return Ok(StateForm::Pure(psi.to_vec()));
        }
        if rho.is_maximally_mixed() {
            return Ok(StateForm::MaximallyMixed(rho.dim()));
        }
        let eig = rho.matrix().herm_eig()?;
        let parts: Vec<(f64, Vec<C64>)> = eig
            .values
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > RANK_CUTOFF)
            .map(|(k, &l)| (l, eig.vectors.column(k)))
            .collect();
        if parts.len() == 1 {
            return Ok(StateForm::Pure(parts.into_iter().next().expect("one part").1));
        }
        Ok(StateForm::Mixed(parts))
    }

    /// Computational-basis distribution of `U ρ U†`.
    fn rotated_probs(&self, u: &SampledUnitary) -> Vec<f64> {
        match self {
            StateForm::Pure(psi) => u.apply(psi).iter().map(|z| z.norm_sqr()).collect(),
            StateForm::Mixed(parts) => {
                let mut p = vec![0.0; parts[0].1.len()];
                for (l, v) in parts {
                    for (pi, z) in p.iter_mut().zip(u.apply(v)) {
                        *pi += l * z.norm_sqr();
                    }
                }
                p
            }
            StateForm::MaximallyMixed(d) => vec![1.0 / *d as f64; *d],
        }
    }
}

/// `E_U d_tv(p^{UρU†}, p^{UσU†})` with computational-basis readout.
#[derive(Clone, Debug)]
pub struct StatesProtocol {
    dim: usize,
    rho: StateForm,
    sigma: StateForm,
}

impl StatesProtocol {
    pub fn new(rho: &QuantumState, sigma: &QuantumState) -> Result<Self> {
        if rho.dim() != sigma.dim() {
            return Err(Error::Shape("states of different dimension".into()));
        }
        Ok(StatesProtocol {
            dim: rho.dim(),
            rho: StateForm::new(rho)?,
            sigma: StateForm::new(sigma)?,
        })
    }
}

impl Protocol for StatesProtocol {
    fn dim(&self) -> usize {
        self.dim
    }

    fn draws(&self) -> usize {
        1
    }

    fn tvd_for(&self, u: &[&SampledUnitary], _reference: &[C64]) -> Result<f64> {
        tvd_slices(&self.rho.rotated_probs(u[0]), &self.sigma.rotated_probs(u[0]))
    }
}

/// `E_V d_tv(p^{M, V|ψ0>}, p^{N, V|ψ0>})`.
#[derive(Clone, Debug)]
pub struct PovmsProtocol {
    m: Povm,
    n: Povm,
}

impl PovmsProtocol {
    pub fn new(m: &Povm, n: &Povm) -> Result<Self> {
        if m.dim() != n.dim() || m.len() != n.len() {
            return Err(Error::Shape("POVMs of different shape".into()));
        }
        Ok(PovmsProtocol {
            m: m.clone(),
            n: n.clone(),
        })
    }
}

impl Protocol for PovmsProtocol {
    fn dim(&self) -> usize {
        self.m.dim()
    }

    fn draws(&self) -> usize {
        1
    }

    fn tvd_for(&self, v: &[&SampledUnitary], reference: &[C64]) -> Result<f64> {
        let psi = v[0].apply(reference);
        tvd_slices(&born_pure_raw(&psi, &self.m), &born_pure_raw(&psi, &self.n))
    }
}

#[derive(Clone, Debug)]
enum ChannelForm {
    Depolarizing(usize),
    Kraus(Vec<CMatrix>),
    Dense(QuantumChannel),
}

impl ChannelForm {
    fn new(ch: &QuantumChannel) -> Self {
        if ch.is_depolarizing() {
            ChannelForm::Depolarizing(ch.dim())
        } else if let Some(k) = ch.kraus() {
            ChannelForm::Kraus(k.to_vec())
        } else {
            ChannelForm::Dense(ch.clone())
        }
    }

    /// Computational-basis distribution of `U Λ(|ψ><ψ|) U†`.
    fn probs(&self, psi: &[C64], u: &SampledUnitary) -> Result<Vec<f64>> {
        match self {
            ChannelForm::Depolarizing(d) => Ok(vec![1.0 / *d as f64; *d]),
            ChannelForm::Kraus(ks) => {
                let mut p = vec![0.0; psi.len()];
                for k in ks {
                    let mut v = k.mat_vec(psi)?;
                    u.apply_in_place(&mut v);
                    for (pi, z) in p.iter_mut().zip(&v) {
                        *pi += z.norm_sqr();
                    }
                }
                Ok(p)
            }
            ChannelForm::Dense(ch) => {
                let out = ch.apply_matrix(&CMatrix::outer(psi))?;
                let um = u.to_matrix();
                let x = um.matmul(&out)?;
                let d = psi.len();
                Ok((0..d)
                    .map(|i| {
                        let mut acc = ZERO;
                        for b in 0..d {
                            acc += x[(i, b)] * um[(i, b)].conj();
                        }
                        acc.re
                    })
                    .collect())
            }
        }
    }
}

/// `E_V E_U d_tv` for outputs `U Λ(V ψ0 V†) U†` versus `U Γ(V ψ0 V†) U†`,
/// with `V` from stream 0 and `U` from stream 1.
#[derive(Clone, Debug)]
pub struct ChannelsProtocol {
    dim: usize,
    lambda: ChannelForm,
    gamma: ChannelForm,
}

impl ChannelsProtocol {
    pub fn new(lambda: &QuantumChannel, gamma: &QuantumChannel) -> Result<Self> {
        if lambda.dim() != gamma.dim() {
            return Err(Error::Shape("channels of different dimension".into()));
        }
        Ok(ChannelsProtocol {
            dim: lambda.dim(),
            lambda: ChannelForm::new(lambda),
            gamma: ChannelForm::new(gamma),
        })
    }
}

impl Protocol for ChannelsProtocol {
    fn dim(&self) -> usize {
        self.dim
    }

    fn draws(&self) -> usize {
        2
    }

    fn tvd_for(&self, us: &[&SampledUnitary], reference: &[C64]) -> Result<f64> {
        let psi = us[0].apply(reference);
        tvd_slices(&self.lambda.probs(&psi, us[1])?, &self.gamma.probs(&psi, us[1])?)
    }
}

pub fn avg_tvd_states(
    rho: &QuantumState,
    sigma: &QuantumState,
    ensemble: &CircuitEnsemble,
    samples: usize,
    seed: u64,
) -> Result<AvgTvdEstimate> {
    avg_tvd(&StatesProtocol::new(rho, sigma)?, ensemble, samples, seed)
}

pub fn avg_tvd_povms(m: &Povm, n: &Povm, ensemble: &CircuitEnsemble, samples: usize, seed: u64) -> Result<AvgTvdEstimate> {
    avg_tvd(&PovmsProtocol::new(m, n)?, ensemble, samples, seed)
}

pub fn avg_tvd_channels(
    lambda: &QuantumChannel,
    gamma: &QuantumChannel,
    ensemble: &CircuitEnsemble,
    samples: usize,
    seed: u64,
) -> Result<AvgTvdEstimate> {
    avg_tvd(&ChannelsProtocol::new(lambda, gamma)?, ensemble, samples, seed)
}
