//! Rayon drivers for the core estimators. Trial values are collected in
//! index order and folded by the same sequential code as the core, so the
//! results do not depend on the worker count.

use rayon::prelude::*;

use qacd_core::distances::{op_distance_exact, DEFAULT_SUBSET_CAP, op_distance_subset_range, povm_differences, subset_count};
use qacd_core::ensembles::{frame_potential_pair, CircuitEnsemble, FramePotentialEstimate};
use qacd_core::montecarlo::{trial, AvgTvdEstimate, ChannelsProtocol, PovmsProtocol, Protocol, StatesProtocol};
use qacd_core::qobjects::{Povm, QuantumChannel, QuantumState};
use qacd_core::{Error, Result};

/// Runs `f` on a dedicated pool with `threads` workers (0 = rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> std::result::Result<T, rayon::ThreadPoolBuildError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    Ok(pool.install(f))
}

pub fn par_avg_tvd<P: Protocol>(p: &P, ensemble: &CircuitEnsemble, samples: usize, seed: u64) -> Result<AvgTvdEstimate> {
    if p.dim() != ensemble.dim() {
        return Err(Error::Shape(format!(
            "objects of dimension {} with an ensemble on {}",
            p.dim(),
            ensemble.dim()
        )));
    }
    if samples < 2 {
        return Err(Error::Domain("at least two samples are required".into()));
    }
    let ens = ensemble.with_seed(seed);
    let values = (0..samples as u64)
        .into_par_iter()
        .map(|i| trial(p, &ens, i))
        .collect::<Result<Vec<f64>>>()?;
    AvgTvdEstimate::from_samples(&values, seed)
}

pub fn par_avg_tvd_states(
    rho: &QuantumState,
    sigma: &QuantumState,
    ensemble: &CircuitEnsemble,
    samples: usize,
    seed: u64,
) -> Result<AvgTvdEstimate> {
    par_avg_tvd(&StatesProtocol::new(rho, sigma)?, ensemble, samples, seed)
}

pub fn par_avg_tvd_povms(m: &Povm, n: &Povm, ensemble: &CircuitEnsemble, samples: usize, seed: u64) -> Result<AvgTvdEstimate> {
    par_avg_tvd(&PovmsProtocol::new(m, n)?, ensemble, samples, seed)
}

pub fn par_avg_tvd_channels(
    lambda: &QuantumChannel,
    gamma: &QuantumChannel,
    ensemble: &CircuitEnsemble,
    samples: usize,
    seed: u64,
) -> Result<AvgTvdEstimate> {
    par_avg_tvd(&ChannelsProtocol::new(lambda, gamma)?, ensemble, samples, seed)
}

pub fn par_frame_potential(ensemble: &CircuitEnsemble, k: u32, pairs: usize, seed: u64) -> Result<FramePotentialEstimate> {
    if k == 0 {
        return Err(Error::Domain("frame potential order must be positive".into()));
    }
    if pairs < 2 {
        return Err(Error::Domain("frame potential needs at least two pairs".into()));
    }
    let ens = ensemble.with_seed(seed);
    let values: Vec<f64> = (0..pairs as u64)
        .into_par_iter()
        .map(|i| frame_potential_pair(&ens, k, i))
        .collect();
    FramePotentialEstimate::from_values(k, &values)
}

const SUBSET_CHUNK: u64 = 1 << 12;

/// Operational distance with the subset enumeration split into fixed-size
/// chunks across workers. Chunk boundaries do not depend on the pool size,
/// so the result is worker-count invariant; it may differ from the
/// sequential enumeration in the last ulp.
pub fn par_op_distance_exact(m: &Povm, n: &Povm) -> Result<f64> {
    let total = subset_count(m.len()).unwrap_or(u64::MAX);
    if (m.is_diagonal() && n.is_diagonal()) || total <= SUBSET_CHUNK || total > DEFAULT_SUBSET_CAP {
        return op_distance_exact(m, n);
    }
    let deltas = povm_differences(m, n)?;
    let chunks = total.div_ceil(SUBSET_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| op_distance_subset_range(&deltas, c * SUBSET_CHUNK, ((c + 1) * SUBSET_CHUNK).min(total)))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use qacd_core::montecarlo::avg_tvd;
    use qacd_core::qobjects::maximally_mixed;
    use qacd_core::random::{random_povm, random_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parallel_matches_sequential_for_any_pool() {
        let rho = random_state(8, 2, &mut ChaCha8Rng::seed_from_u64(1));
        let p = StatesProtocol::new(&rho, &maximally_mixed(3)).unwrap();
        let ens = CircuitEnsemble::qaoa(3, 4, 7, 8);
        let seq = avg_tvd(&p, &ens, 300, 11).unwrap();
        for t in [1, 3, 8] {
            let par = with_threads(t, || par_avg_tvd(&p, &ens, 300, 11)).unwrap().unwrap();
            assert_eq!(seq, par);
        }
        let fp = qacd_core::ensembles::frame_potential(&ens, 2, 100, 5).unwrap();
        let pfp = with_threads(4, || par_frame_potential(&ens, 2, 100, 5)).unwrap().unwrap();
        assert_eq!(fp, pfp);
    }

    #[test]
    fn split_enumeration_matches() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = random_povm(2, 14, &mut rng);
        let n = random_povm(2, 14, &mut rng);
        let a = op_distance_exact(&m, &n).unwrap();
        let b = with_threads(4, || par_op_distance_exact(&m, &n)).unwrap().unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}
