//! Average-case distances between states, measurements and channels, and
//! the worst-case quantities they are compared against.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{hs_norm, lambda_max, trace_norm_herm, vec_inner, CMatrix, C64, ONE};
use crate::qobjects::{
    born_pure_raw, born_raw, basis_vector, Povm, ProbDist, QuantumChannel, QuantumState,
    COMPLETENESS_TOL,
};

/// Default cap on the number of outcome subsets enumerated by
/// [`op_distance_exact`].
pub const DEFAULT_SUBSET_CAP: u64 = 1 << 20;

/// Above this many Kraus operators the dense Choi difference is used.
const LOW_RANK_LIMIT: usize = 512;

fn same_dim(a: usize, b: usize, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::Shape(format!("{what} dimensions differ: {a} vs {b}")));
    }
    Ok(())
}

/// `½ Σ |p_i − q_i|`.
pub fn tvd(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    tvd_slices(p.weights(), q.weights())
}

/// Total variation distance on raw probability vectors.
pub fn tvd_slices(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Shape(format!(
            "distributions of length {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Optimal one-shot guessing probability for a TV distance `t`.
pub fn success_probability(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("TV distance {t} outside [0, 1]")));
    }
    Ok(0.5 * (1.0 + t))
}

/// `½ ‖ρ − σ‖_HS`.
pub fn acd_states(rho: &QuantumState, sigma: &QuantumState) -> Result<f64> {
    same_dim(rho.dim(), sigma.dim(), "state")?;
    if let (Some(a), Some(b)) = (rho.pure_vector(), sigma.pure_vector()) {
        // ‖|a><a| − |b><b|‖²_HS = 2 − 2|<a|b>|².
        let ov = vec_inner(a, b).norm_sqr().min(1.0);
        return Ok(0.5 * (2.0 - 2.0 * ov).max(0.0).sqrt());
    }
    Ok(0.5 * hs_norm(&rho.matrix().sub(sigma.matrix())?))
}

/// `(1/2d) Σ_i √(‖M_i − N_i‖²_HS + tr(M_i − N_i)²)`.
pub fn acd_povms(m: &Povm, n: &Povm) -> Result<f64> {
    same_dim(m.dim(), n.dim(), "POVM")?;
    if m.len() != n.len() {
        return Err(Error::Shape(format!(
            "POVMs with {} and {} outcomes",
            m.len(),
            n.len()
        )));
    }
    let d = m.dim() as f64;
    let mut total = 0.0;
    for (a, b) in m.effects().iter().zip(n.effects()) {
        let delta = a.sub(b)?;
        let hs = hs_norm(&delta);
        let tr = delta.trace().re;
        total += (hs * hs + tr * tr).sqrt();
    }
    Ok(total / (2.0 * d))
}

/// `½ √(‖J_Λ − J_Γ‖²_HS + tr(((Λ − Γ)(τ_d))²))`.
pub fn acd_channels(lambda: &QuantumChannel, gamma: &QuantumChannel) -> Result<f64> {
    same_dim(lambda.dim(), gamma.dim(), "channel")?;
    let d = lambda.dim();
    let choi_term = hs_norm(&lambda.choi().sub(gamma.choi())?).powi(2);
    let tau = CMatrix::identity(d).scale_real(1.0 / d as f64);
    let out = lambda.apply_matrix(&tau)?.sub(&gamma.apply_matrix(&tau)?)?;
    // (Λ − Γ)(τ) is Hermitian, so tr(X²) = ‖X‖²_HS.
    let out_term = hs_norm(&out).powi(2);
    Ok(0.5 * (choi_term + out_term).sqrt())
}

/// `½ ‖ρ − σ‖₁`.
pub fn trace_distance(rho: &QuantumState, sigma: &QuantumState) -> Result<f64> {
    same_dim(rho.dim(), sigma.dim(), "state")?;
    if let (Some(a), Some(b)) = (rho.pure_vector(), sigma.pure_vector()) {
        let ov = vec_inner(a, b).norm_sqr().min(1.0);
        return Ok((1.0 - ov).max(0.0).sqrt());
    }
    Ok(0.5 * trace_norm_herm(&rho.matrix().sub(sigma.matrix())?)?)
}

fn effect_differences(m: &Povm, n: &Povm) -> Result<Vec<CMatrix>> {
    same_dim(m.dim(), n.dim(), "POVM")?;
    if m.len() != n.len() {
        return Err(Error::Shape(format!(
            "POVMs with {} and {} outcomes",
            m.len(),
            n.len()
        )));
    }
    m.effects()
        .iter()
        .zip(n.effects())
        .map(|(a, b)| a.sub(b))
        .collect()
}

/// Number of outcome subsets [`op_distance_exact`] would enumerate for `n`
/// outcomes, or `None` when it overflows.
pub fn subset_count(outcomes: usize) -> Option<u64> {
    1u64.checked_shl(outcomes as u32).filter(|_| outcomes < 64)
}

/// Worst-case measurement distance `max_ρ d_tv`, evaluated as
/// `max_S λ_max(Σ_{i∈S} (M_i − N_i))` with the default subset cap.
pub fn op_distance_exact(m: &Povm, n: &Povm) -> Result<f64> {
    op_distance_exact_with_cap(m, n, DEFAULT_SUBSET_CAP)
}

pub fn op_distance_exact_with_cap(m: &Povm, n: &Povm, cap: u64) -> Result<f64> {
    let deltas = effect_differences(m, n)?;
    if m.is_diagonal() && n.is_diagonal() {
        return Ok(diagonal_op_distance(&deltas));
    }
    let total = subset_count(deltas.len()).filter(|&c| c <= cap).ok_or_else(|| {
        Error::Precondition(format!(
            "{} outcomes exceed the subset cap {cap}; use op_distance_probe_lb",
            deltas.len()
        ))
    })?;
    op_distance_subset_range(&deltas, 0, total)
}

/// For commuting diagonal effects the optimal subset is chosen per basis
/// vector: `max_x Σ_i max(0, Δ_i[x, x])`.
fn diagonal_op_distance(deltas: &[CMatrix]) -> f64 {
    let Some(first) = deltas.first() else {
        return 0.0;
    };
    (0..first.rows())
        .map(|x| deltas.iter().map(|dm| dm[(x, x)].re.max(0.0)).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Maximum of `λ_max(Σ_{i∈S} Δ_i)` over the subsets `S` whose Gray-code
/// ranks lie in `start..end`. Partial results combine with `max`.
pub fn op_distance_subset_range(deltas: &[CMatrix], start: u64, end: u64) -> Result<f64> {
    if start >= end {
        return Ok(0.0);
    }
    let Some(first) = deltas.first() else {
        return Ok(0.0);
    };
    let gray = |k: u64| k ^ (k >> 1);
    let mut sum = CMatrix::zeros(first.rows(), first.cols());
    let g0 = gray(start);
    for (i, dm) in deltas.iter().enumerate() {
        if g0 >> i & 1 == 1 {
            sum.add_scaled(dm, ONE)?;
        }
    }
    let mut best = if g0 == 0 { 0.0 } else { lambda_max(&sum)? };
    for k in start + 1..end {
        let flip = (gray(k) ^ gray(k - 1)).trailing_zeros() as usize;
        let sign = if gray(k) >> flip & 1 == 1 { 1.0 } else { -1.0 };
        sum.add_scaled(&deltas[flip], C64::new(sign, 0.0))?;
        if gray(k) != 0 {
            best = best.max(lambda_max(&sum)?);
        }
    }
    Ok(best.max(0.0))
}

/// The Hermitian differences `M_i − N_i` for external enumeration.
pub fn povm_differences(m: &Povm, n: &Povm) -> Result<Vec<CMatrix>> {
    effect_differences(m, n)
}

/// `max_{ρ ∈ probes} d_tv(p_ρ^M, p_ρ^N)`, a lower bound on the worst case.
pub fn op_distance_probe_lb(m: &Povm, n: &Povm, probes: &[QuantumState]) -> Result<f64> {
    same_dim(m.dim(), n.dim(), "POVM")?;
    if m.len() != n.len() {
        return Err(Error::Shape("POVM outcome counts differ".into()));
    }
    if probes.is_empty() {
        return Err(Error::Domain("empty probe list".into()));
    }
    let mut best = 0.0f64;
    for rho in probes {
        same_dim(rho.dim(), m.dim(), "probe")?;
        let (p, q) = match rho.pure_vector() {
            Some(psi) => (born_pure_raw(psi, m), born_pure_raw(psi, n)),
            None => (born_raw(rho.matrix(), m), born_raw(rho.matrix(), n)),
        };
        best = best.max(tvd_slices(&p, &q)?);
    }
    Ok(best)
}

/// Computational basis states plus the top eigenvectors of the largest
/// effect differences; a cheap probe set for [`op_distance_probe_lb`].
pub fn default_probes(m: &Povm, n: &Povm, max_eigen_probes: usize) -> Result<Vec<QuantumState>> {
    let deltas = effect_differences(m, n)?;
    let d = m.dim();
    let mut probes: Vec<QuantumState> = (0..d)
        .map(|k| QuantumState::pure(&basis_vector(d, k)))
        .collect::<Result<_>>()?;
    let mut ranked: Vec<(f64, usize)> = deltas
        .iter()
        .enumerate()
        .map(|(i, dm)| (dm.max_abs(), i))
        .filter(|(s, _)| *s > 0.0)
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    for &(_, i) in ranked.iter().take(max_eigen_probes) {
        let dm = &deltas[i];
        if dm.is_diagonal() {
            continue;
        }
        let eig = dm.hermitized()?.herm_eig()?;
        probes.push(QuantumState::pure(&eig.vectors.column(d - 1))?);
        probes.push(QuantumState::pure(&eig.vectors.column(0))?);
    }
    Ok(probes)
}

/// `½ ‖J_Λ − J_Γ‖₁`, a certified lower bound on half the diamond distance.
pub fn diamond_lb(lambda: &QuantumChannel, gamma: &QuantumChannel) -> Result<f64> {
    same_dim(lambda.dim(), gamma.dim(), "channel")?;
    let d = lambda.dim();
    let d2 = d * d;
    match (lambda.kraus(), gamma.kraus()) {
        (Some(a), Some(b)) if a.len() + b.len() <= LOW_RANK_LIMIT && a.len() + b.len() < d2 => {
            return low_rank_choi_trace_norm(d, a, b).map(|t| 0.5 * t)
        }
        (Some(a), None) if gamma.is_depolarizing() && a.len() <= LOW_RANK_LIMIT.min(d2) => {
            return depolarizing_choi_trace_norm(d, a).map(|t| 0.5 * t)
        }
        (None, Some(b)) if lambda.is_depolarizing() && b.len() <= LOW_RANK_LIMIT.min(d2) => {
            return depolarizing_choi_trace_norm(d, b).map(|t| 0.5 * t)
        }
        _ => {}
    }
    Ok(0.5 * trace_norm_herm(&lambda.choi().sub(gamma.choi())?)?)
}

/// Columns `vec(K)/√d` spanning the Choi state `Σ_k v_k v_k†`.
fn choi_vectors(d: usize, kraus: &[CMatrix]) -> Vec<Vec<C64>> {
    let s = 1.0 / (d as f64).sqrt();
    kraus
        .iter()
        .map(|k| k.as_slice().iter().map(|z| z * s).collect())
        .collect()
}

fn gram(vs: &[Vec<C64>]) -> CMatrix {
    let r = vs.len();
    let mut g = CMatrix::from_fn(r, r, |i, j| vec_inner(&vs[i], &vs[j]));
    // Exact Hermitian symmetry for the eigensolver.
    for i in 0..r {
        g[(i, i)] = C64::new(g[(i, i)].re, 0.0);
        for j in i + 1..r {
            g[(j, i)] = g[(i, j)].conj();
        }
    }
    g
}

/// `‖A A† − B B†‖₁` through the `r x r` matrix `G^{1/2} S G^{1/2}` where
/// `G` is the Gram matrix of the stacked columns and `S = diag(+1, −1)`.
fn low_rank_choi_trace_norm(d: usize, a: &[CMatrix], b: &[CMatrix]) -> Result<f64> {
    let mut vs = choi_vectors(d, a);
    vs.extend(choi_vectors(d, b));
    let g = gram(&vs);
    let root = g.herm_eig()?.reconstruct_with(|l| l.max(0.0).sqrt());
    let ra = a.len();
    // S G^{1/2}: negate the rows belonging to the second channel.
    let signed = CMatrix::from_fn(vs.len(), vs.len(), |i, j| {
        if i < ra {
            root[(i, j)]
        } else {
            -root[(i, j)]
        }
    });
    trace_norm_herm(&symmetrize(&root.matmul(&signed)?))
}

/// `‖Σ v_k v_k† − I/d²‖₁`: the range of the Kraus vectors carries the Gram
/// eigenvalues shifted by `−1/d²`, its complement `−1/d²` each.
fn depolarizing_choi_trace_norm(d: usize, kraus: &[CMatrix]) -> Result<f64> {
    let vs = choi_vectors(d, kraus);
    let shift = 1.0 / (d * d) as f64;
    let g = gram(&vs);
    let vals = g.eigvalsh()?;
    let inside: f64 = vals.iter().map(|l| (l - shift).abs()).sum();
    Ok(inside + (d * d - vs.len()) as f64 * shift)
}

/// `(A + A†)/2` without a defect check; rounding alone breaks symmetry here.
fn symmetrize(a: &CMatrix) -> CMatrix {
    let n = a.rows();
    CMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

/// Randomized measurement: effects `ν_j U_j† P_i U_j`, ordered
/// with the ensemble index major.
pub fn randomized_povm(ensemble: &[(f64, CMatrix)], base: &Povm) -> Result<Povm> {
    if ensemble.is_empty() {
        return Err(Error::Domain("empty ensemble".into()));
    }
    let mut total = 0.0;
    for (w, u) in ensemble {
        if !(*w >= 0.0) {
            return Err(Error::Domain(format!("negative ensemble weight {w}")));
        }
        same_dim(u.rows(), base.dim(), "ensemble unitary")?;
        total += w;
    }
    if (total - 1.0).abs() > COMPLETENESS_TOL {
        return Err(Error::Inconsistent { total });
    }
    let mut effects = Vec::with_capacity(ensemble.len() * base.len());
    for (w, u) in ensemble {
        let ud = u.adjoint();
        for e in base.effects() {
            effects.push(ud.conjugate(e)?.scale_real(*w));
        }
    }
    Povm::new(effects)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceKind {
    State,
    Povm,
    Channel,
}

/// Average-case distance side by side with a worst-case comparator.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceReport {
    pub kind: DistanceKind,
    pub acd: f64,
    pub worst_case: f64,
    pub worst_case_is_lower_bound: bool,
    /// `worst_case / acd`; `None` when the objects coincide.
    pub ratio: Option<f64>,
}

impl DistanceReport {
    fn new(kind: DistanceKind, acd: f64, worst_case: f64, lb: bool) -> Self {
        DistanceReport {
            kind,
            acd,
            worst_case,
            worst_case_is_lower_bound: lb,
            ratio: (acd > 0.0).then(|| worst_case / acd),
        }
    }

    pub fn states(rho: &QuantumState, sigma: &QuantumState) -> Result<Self> {
        Ok(Self::new(
            DistanceKind::State,
            acd_states(rho, sigma)?,
            trace_distance(rho, sigma)?,
            false,
        ))
    }

    /// Exact worst case when the subset enumeration fits the default cap,
    /// otherwise a probe lower bound.
    pub fn povms(m: &Povm, n: &Povm) -> Result<Self> {
        let acd = acd_povms(m, n)?;
        match op_distance_exact(m, n) {
            Ok(wc) => Ok(Self::new(DistanceKind::Povm, acd, wc, false)),
            Err(Error::Precondition(_)) => {
                let probes = default_probes(m, n, 32)?;
                let wc = op_distance_probe_lb(m, n, &probes)?;
                Ok(Self::new(DistanceKind::Povm, acd, wc, true))
            }
            Err(e) => Err(e),
        }
    }

    pub fn channels(lambda: &QuantumChannel, gamma: &QuantumChannel) -> Result<Self> {
        Ok(Self::new(
            DistanceKind::Channel,
            acd_channels(lambda, gamma)?,
            diamond_lb(lambda, gamma)?,
            true,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qobjects::{
        born_distribution, comp_basis_povm, dephase_povm, depolarizing_channel, identity_channel,
        maximally_mixed, pauli_product_state, trivial_povm, unitary_channel, Axis, Pauli, Sign,
    };
    use crate::random::{haar_unitary, random_channel, random_povm, random_state, random_weights};
    use alloc::vec;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn ket0() -> QuantumState {
        QuantumState::pure(&basis_vector(2, 0)).unwrap()
    }

    /// Brute-force `max_S λ_max` over all subsets, independent of the Gray
    /// code walk.
    fn brute_op(m: &Povm, n: &Povm) -> f64 {
        let deltas = effect_differences(m, n).unwrap();
        let k = deltas.len();
        let mut best = 0.0f64;
        for mask in 0u32..(1 << k) {
            let mut s = CMatrix::zeros(m.dim(), m.dim());
            for (i, dm) in deltas.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    s = s.add(dm).unwrap();
                }
            }
            best = best.max(s.hermitized().unwrap().eigvalsh().unwrap().last().copied().unwrap());
        }
        best
    }

    #[test]
    fn tvd_examples() {
        let p = ProbDist::new(vec![1.0, 0.0]).unwrap();
        let q = ProbDist::new(vec![0.0, 1.0]).unwrap();
        let h = ProbDist::uniform(2);
        assert_eq!(tvd(&p, &p).unwrap(), 0.0);
        assert_eq!(tvd(&p, &q).unwrap(), 1.0);
        assert_eq!(tvd(&p, &h).unwrap(), 0.5);
        assert!(tvd(&p, &ProbDist::uniform(3)).is_err());
    }

    #[test]
    fn success_probability_examples() {
        assert_eq!(success_probability(0.0).unwrap(), 0.5);
        assert_eq!(success_probability(1.0).unwrap(), 1.0);
        assert!(close(success_probability(0.1486).unwrap(), 0.5743, 1e-12));
        assert!(success_probability(1.5).is_err());
        assert!(success_probability(-0.1).is_err());
    }

    #[test]
    fn state_distance_examples() {
        let r = ket0();
        assert_eq!(acd_states(&r, &r).unwrap(), 0.0);
        for d in [2usize, 3, 8, 64] {
            let psi = QuantumState::pure(&basis_vector(d, 1)).unwrap();
            let tau = QuantumState::maximally_mixed_dim(d);
            let expect = 0.5 * (1.0 - 1.0 / d as f64).sqrt();
            assert!(close(acd_states(&psi, &tau).unwrap(), expect, 1e-14));
        }
        let tau2 = maximally_mixed(1);
        assert!(close(acd_states(&ket0(), &tau2).unwrap(), 0.353_553_390_593_273_8, 1e-15));
        assert!(acd_states(&ket0(), &maximally_mixed(2)).is_err());
    }

    #[test]
    fn zero_differences_are_exactly_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_state(4, 4, &mut rng);
        assert_eq!(acd_states(&rho, &rho).unwrap(), 0.0);
        assert_eq!(trace_distance(&rho, &rho).unwrap(), 0.0);
        let m = random_povm(3, 3, &mut rng);
        assert_eq!(acd_povms(&m, &m).unwrap(), 0.0);
        assert_eq!(op_distance_exact(&m, &m).unwrap(), 0.0);
        let ch = random_channel(2, 3, &mut rng);
        assert_eq!(acd_channels(&ch, &ch).unwrap(), 0.0);
        assert_eq!(diamond_lb(&ch, &ch).unwrap(), 0.0);
        let dense = QuantumChannel::from_choi(ch.choi().clone(), 2).unwrap();
        assert_eq!(diamond_lb(&dense, &dense).unwrap(), 0.0);
    }

    #[test]
    fn povm_distance_examples() {
        let m = comp_basis_povm(1);
        let t = trivial_povm(2, 2);
        assert_eq!(acd_povms(&m, &m).unwrap(), 0.0);
        // Each outcome: ‖diag(±½)‖²_HS = ½ and zero trace.
        let expect = 2.0f64.sqrt() / 4.0;
        assert!(close(acd_povms(&m, &t).unwrap(), expect, 1e-15));
        assert!(close(op_distance_exact(&m, &t).unwrap(), 0.5, 1e-15));
        assert!(close(brute_op(&m, &t), 0.5, 1e-15));
        assert!(acd_povms(&m, &trivial_povm(3, 2)).is_err());
    }

    #[test]
    fn channel_distance_examples() {
        let ch = identity_channel(2);
        assert_eq!(acd_channels(&ch, &ch).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [2usize, 3, 4] {
            let u = unitary_channel(haar_unitary(d, &mut rng)).unwrap();
            let dep = depolarizing_channel(d);
            let d2 = (d * d) as f64;
            assert!(close(acd_channels(&u, &dep).unwrap(), 0.5 * (1.0 - 1.0 / d2).sqrt(), 1e-12));
            // Pure Choi state against I/d²: eigenvalues 1 − 1/d² and −1/d².
            let dlb = diamond_lb(&u, &dep).unwrap();
            assert!(close(dlb, 1.0 - 1.0 / d2, 1e-12), "{dlb}");
        }
        let u = unitary_channel(haar_unitary(2, &mut rng)).unwrap();
        assert!(close(acd_channels(&u, &depolarizing_channel(2)).unwrap(), 3f64.sqrt() / 4.0, 1e-12));
        assert!(close(diamond_lb(&u, &depolarizing_channel(2)).unwrap(), 0.75, 1e-12));
        let x = unitary_channel(Pauli::X.matrix()).unwrap();
        assert!(close(diamond_lb(&identity_channel(2), &x).unwrap(), 1.0, 1e-12));
    }

    #[test]
    fn trace_distance_examples() {
        let zero = ket0();
        let one = QuantumState::pure(&basis_vector(2, 1)).unwrap();
        assert!(close(trace_distance(&zero, &one).unwrap(), 1.0, 1e-15));
        assert!(close(trace_distance(&zero, &maximally_mixed(1)).unwrap(), 0.5, 1e-15));
        let plus = pauli_product_state(&[Axis::X], &[Sign::Plus]).unwrap();
        assert!(close(trace_distance(&zero, &plus).unwrap(), 0.5f64.sqrt(), 1e-15));
        let mixed_plus = QuantumState::new(plus.matrix().clone()).unwrap();
        assert!(close(trace_distance(&zero, &mixed_plus).unwrap(), 0.5f64.sqrt(), 1e-12));
    }

    #[test]
    fn op_distance_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (d, k) in [(2, 2), (2, 4), (3, 3), (4, 5), (3, 6)] {
            let m = random_povm(d, k, &mut rng);
            let n = random_povm(d, k, &mut rng);
            let fast = op_distance_exact(&m, &n).unwrap();
            assert!(close(fast, brute_op(&m, &n), 1e-10));
            // Split enumeration and reduce with max.
            let deltas = povm_differences(&m, &n).unwrap();
            let total = subset_count(k).unwrap();
            let mid = total / 3;
            let split = op_distance_subset_range(&deltas, 0, mid)
                .unwrap()
                .max(op_distance_subset_range(&deltas, mid, total).unwrap());
            assert!(close(split, fast, 1e-10));
        }
    }

    #[test]
    fn diagonal_fast_path_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..5 {
            let m = dephase_povm(&random_povm(4, 4, &mut rng));
            let n = dephase_povm(&random_povm(4, 4, &mut rng));
            let fast = op_distance_exact(&m, &n).unwrap();
            let deltas = povm_differences(&m, &n).unwrap();
            let slow = op_distance_subset_range(&deltas, 0, 16).unwrap();
            assert!(close(fast, slow, 1e-12));
            assert!(close(fast, brute_op(&m, &n), 1e-12));
        }
    }

    #[test]
    fn op_distance_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let m = random_povm(2, 5, &mut rng);
        let n = random_povm(2, 5, &mut rng);
        assert!(matches!(
            op_distance_exact_with_cap(&m, &n, 16),
            Err(Error::Precondition(_))
        ));
        assert!(op_distance_exact_with_cap(&m, &n, 32).is_ok());
    }

    #[test]
    fn probe_lower_bound() {
        let m = comp_basis_povm(1);
        let t = trivial_povm(2, 2);
        let tau = [maximally_mixed(1)];
        assert_eq!(op_distance_probe_lb(&m, &t, &tau).unwrap(), 0.0);
        assert!(close(op_distance_probe_lb(&m, &t, &[maximally_mixed(1), ket0()]).unwrap(), 0.5, 1e-15));
        assert!(op_distance_probe_lb(&m, &t, &[]).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..20 {
            let d = rng.random_range(2..5);
            let k = rng.random_range(2..5);
            let m = random_povm(d, k, &mut rng);
            let n = random_povm(d, k, &mut rng);
            let probes = default_probes(&m, &n, 8).unwrap();
            let lb = op_distance_probe_lb(&m, &n, &probes).unwrap();
            assert!(lb <= op_distance_exact(&m, &n).unwrap() + 1e-12);
        }
    }

    #[test]
    fn low_rank_diamond_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for (d, r1, r2) in [(2, 1, 1), (2, 1, 2), (3, 2, 2), (4, 3, 1), (4, 1, 4)] {
            let a = random_channel(d, r1, &mut rng);
            let b = random_channel(d, r2, &mut rng);
            let fast = diamond_lb(&a, &b).unwrap();
            let dense = 0.5 * trace_norm_herm(&a.choi().sub(b.choi()).unwrap()).unwrap();
            assert!(close(fast, dense, 1e-10), "{fast} vs {dense}");
            let dep = depolarizing_channel(d);
            let fast = diamond_lb(&a, &dep).unwrap();
            let dense = 0.5 * trace_norm_herm(&a.choi().sub(dep.choi()).unwrap()).unwrap();
            assert!(close(fast, dense, 1e-10));
            assert!(close(diamond_lb(&dep, &a).unwrap(), dense, 1e-10));
        }
    }

    #[test]
    fn randomized_povm_examples() {
        let base = comp_basis_povm(1);
        let single = randomized_povm(&[(1.0, CMatrix::identity(2))], &base).unwrap();
        for (a, b) in single.effects().iter().zip(base.effects()) {
            assert!(a.sub(b).unwrap().max_abs() < 1e-15);
        }
        let pair = randomized_povm(
            &[(0.5, CMatrix::identity(2)), (0.5, Pauli::X.matrix())],
            &base,
        )
        .unwrap();
        assert_eq!(pair.len(), 4);
        assert!(close(pair.effects()[2][(1, 1)].re, 0.5, 1e-15));
        assert!(close(pair.effects()[3][(0, 0)].re, 0.5, 1e-15));
        assert!(randomized_povm(&[(0.7, CMatrix::identity(2))], &base).is_err());
        assert!(randomized_povm(&[(1.2, CMatrix::identity(2)), (-0.2, CMatrix::identity(2))], &base).is_err());
    }

    #[test]
    fn randomized_povm_stacked_tvd_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for _ in 0..10 {
            let d = 4;
            let j = rng.random_range(1..6);
            let w = random_weights(j, &mut rng);
            let ens: Vec<(f64, CMatrix)> =
                w.iter().map(|&x| (x, haar_unitary(d, &mut rng))).collect();
            let base = comp_basis_povm(2);
            let rho = random_state(d, 2, &mut rng);
            let sigma = random_state(d, 3, &mut rng);
            let mut direct = 0.0;
            for (wj, u) in &ens {
                let m = base.rotated(u).unwrap();
                let p = born_distribution(&rho, &m).unwrap();
                let q = born_distribution(&sigma, &m).unwrap();
                direct += wj * tvd(&p, &q).unwrap();
            }
            let big = randomized_povm(&ens, &base).unwrap();
            let stacked = tvd(
                &born_distribution(&rho, &big).unwrap(),
                &born_distribution(&sigma, &big).unwrap(),
            )
            .unwrap();
            assert!(close(direct, stacked, 1e-12), "{direct} vs {stacked}");
        }
    }

    #[test]
    fn reports() {
        let r = DistanceReport::states(&ket0(), &maximally_mixed(1)).unwrap();
        assert_eq!(r.kind, DistanceKind::State);
        assert!(!r.worst_case_is_lower_bound);
        assert!(close(r.ratio.unwrap(), 0.5 / (0.5f64.sqrt() * 0.5), 1e-12));
        let same = DistanceReport::states(&ket0(), &ket0()).unwrap();
        assert_eq!(same.ratio, None);
        let p = DistanceReport::povms(&comp_basis_povm(1), &trivial_povm(2, 2)).unwrap();
        assert!(!p.worst_case_is_lower_bound);
        assert!(close(p.worst_case, 0.5, 1e-15));
        let c = DistanceReport::channels(&identity_channel(2), &depolarizing_channel(2)).unwrap();
        assert!(c.worst_case_is_lower_bound);
        assert!(close(c.worst_case, 0.75, 1e-12));
        // Too many outcomes for enumeration falls back to probes.
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let big_m = random_povm(2, 21, &mut rng);
        let big_n = random_povm(2, 21, &mut rng);
        let rep = DistanceReport::povms(&big_m, &big_n).unwrap();
        assert!(rep.worst_case_is_lower_bound);
    }

    fn seeded(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn state_metric_axioms(seed in any::<u64>(), d in 2usize..6) {
            let mut rng = seeded(seed);
            let a = random_state(d, d, &mut rng);
            let b = random_state(d, 1 + seed as usize % d, &mut rng);
            let c = random_state(d, 2, &mut rng);
            let ab = acd_states(&a, &b).unwrap();
            prop_assert_eq!(ab, acd_states(&b, &a).unwrap());
            prop_assert!(ab >= 0.0);
            prop_assert!(acd_states(&a, &c).unwrap() <= ab + acd_states(&b, &c).unwrap() + 1e-10);
            // Norm equivalence caps the worst/average ratio at √d.
            prop_assert!(trace_distance(&a, &b).unwrap() <= (d as f64).sqrt() * ab + 1e-12);
        }

        #[test]
        fn povm_metric_axioms(seed in any::<u64>(), d in 2usize..5, k in 2usize..5) {
            let mut rng = seeded(seed);
            let a = random_povm(d, k, &mut rng);
            let b = random_povm(d, k, &mut rng);
            let c = random_povm(d, k, &mut rng);
            let ab = acd_povms(&a, &b).unwrap();
            prop_assert_eq!(ab, acd_povms(&b, &a).unwrap());
            prop_assert!(ab >= 0.0);
            prop_assert!(acd_povms(&a, &c).unwrap() <= ab + acd_povms(&b, &c).unwrap() + 1e-10);
            prop_assert!(op_distance_exact(&a, &b).unwrap() <= d as f64 * ab + 1e-12);
            // Dephasing is a unital channel applied to every effect.
            let deph = acd_povms(&dephase_povm(&a), &dephase_povm(&b)).unwrap();
            prop_assert!(deph <= ab + 1e-12);
        }

        #[test]
        fn channel_metric_axioms(seed in any::<u64>(), d in 2usize..4) {
            let mut rng = seeded(seed);
            let a = random_channel(d, 1 + seed as usize % 3, &mut rng);
            let b = random_channel(d, 2, &mut rng);
            let c = random_channel(d, 1, &mut rng);
            let ab = acd_channels(&a, &b).unwrap();
            prop_assert_eq!(ab, acd_channels(&b, &a).unwrap());
            prop_assert!(ab >= 0.0);
            prop_assert!(acd_channels(&a, &c).unwrap() <= ab + acd_channels(&b, &c).unwrap() + 1e-10);
            let dn = d as f64;
            prop_assert!(diamond_lb(&a, &b).unwrap() <= dn.powf(1.5) * ab + 1e-12);
        }

        #[test]
        fn unitary_invariance(seed in any::<u64>(), d in 2usize..6) {
            let mut rng = seeded(seed);
            let a = random_state(d, 2, &mut rng);
            let b = random_state(d, d, &mut rng);
            let u = haar_unitary(d, &mut rng);
            let before = acd_states(&a, &b).unwrap();
            let after = acd_states(&a.evolve(&u).unwrap(), &b.evolve(&u).unwrap()).unwrap();
            prop_assert!((before - after).abs() <= 1e-12);
        }

        #[test]
        fn subadditivity(seed in any::<u64>()) {
            let mut rng = seeded(seed);
            let (r1, s1) = (random_state(2, 2, &mut rng), random_state(2, 1, &mut rng));
            let (r2, s2) = (random_state(3, 3, &mut rng), random_state(3, 2, &mut rng));
            let joint = acd_states(&r1.tensor(&r2).unwrap(), &s1.tensor(&s2).unwrap()).unwrap();
            let parts = acd_states(&r1, &s1).unwrap() + acd_states(&r2, &s2).unwrap();
            prop_assert!(joint <= parts + 1e-12);
        }

        #[test]
        fn joint_convexity(seed in any::<u64>(), k in 1usize..5) {
            let mut rng = seeded(seed);
            let d = 3;
            let w = random_weights(k, &mut rng);
            let rs: Vec<_> = (0..k).map(|_| random_state(d, 2, &mut rng)).collect();
            let ss: Vec<_> = (0..k).map(|_| random_state(d, 3, &mut rng)).collect();
            let lhs = acd_states(
                &QuantumState::mixture(&w, &rs).unwrap(),
                &QuantumState::mixture(&w, &ss).unwrap(),
            ).unwrap();
            let rhs: f64 = w.iter().zip(rs.iter().zip(&ss))
                .map(|(wi, (r, s))| wi * acd_states(r, s).unwrap())
                .sum();
            prop_assert!(lhs <= rhs + 1e-10);
        }

        #[test]
        fn op_distance_coarse_graining_monotone(seed in any::<u64>()) {
            let mut rng = seeded(seed);
            let (d, k) = (3, 5);
            let m = random_povm(d, k, &mut rng);
            let n = random_povm(d, k, &mut rng);
            let groups = rng.random_range(1..k);
            let label: Vec<usize> = (0..k).map(|i| if i < groups { i } else { rng.random_range(0..groups) }).collect();
            let merge = |p: &Povm| {
                let mut out = vec![CMatrix::zeros(d, d); groups];
                for (i, e) in p.effects().iter().enumerate() {
                    out[label[i]].add_scaled(e, ONE).unwrap();
                }
                Povm::new(out).unwrap()
            };
            let coarse = op_distance_exact(&merge(&m), &merge(&n)).unwrap();
            prop_assert!(coarse <= op_distance_exact(&m, &n).unwrap() + 1e-10);
        }

        #[test]
        fn product_state_pure_paths_agree(seed in any::<u64>()) {
            let mut rng = seeded(seed);
            let u = haar_unitary(4, &mut rng);
            let v = haar_unitary(4, &mut rng);
            let a = QuantumState::pure(&u.column(0)).unwrap();
            let b = QuantumState::pure(&v.column(0)).unwrap();
            let (ma, mb) = (QuantumState::new(a.matrix().clone()).unwrap(), QuantumState::new(b.matrix().clone()).unwrap());
            prop_assert!((acd_states(&a, &b).unwrap() - acd_states(&ma, &mb).unwrap()).abs() < 1e-12);
            prop_assert!((trace_distance(&a, &b).unwrap() - trace_distance(&ma, &mb).unwrap()).abs() < 1e-10);
        }
    }
}
