//! Separable noise models and closed-form distances and bounds for them.
//!
//! Qubit 1 is the most significant tensor factor throughout. The closed
//! forms cost `O(N)` and never build `2^N`-dimensional operators.
//!
//! Bounds come in two flavours. Fields named `*_maintext` or `printed_*`
//! reproduce published expressions that do not follow from the exact
//! values (some are violated by explicit instances, see the tests); they
//! are reported for comparison only. The remaining bound fields are proved
//! from the exact expressions and checked against them.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{kron_all, CMatrix, C64, ONE, ZERO};
use crate::qobjects::{
    pauli_eigenvector, tensor_channels, unitary_channel, Axis, Pauli, Povm, QuantumChannel,
    QuantumState, Sign,
};

/// Largest qubit count for which dense channels and POVMs are built.
pub const DEFAULT_DENSE_QUBIT_CAP: usize = 6;

const SIMPLEX_TOL: f64 = 1e-12;

/// Per-qubit Pauli probabilities `(p_1, p_x, p_y, p_z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliChannelSpec {
    probs: Vec<[f64; 4]>,
}

impl PauliChannelSpec {
    pub fn new(probs: Vec<[f64; 4]>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Domain("Pauli channel on zero qubits".into()));
        }
        for (i, p) in probs.iter().enumerate() {
            let total: f64 = p.iter().sum();
            if p.iter().any(|x| !x.is_finite() || *x < -SIMPLEX_TOL) || (total - 1.0).abs() > SIMPLEX_TOL {
                return Err(Error::Domain(format!(
                    "qubit {}: Pauli probabilities {:?} are not a distribution",
                    i + 1,
                    p
                )));
            }
        }
        let probs = probs.into_iter().map(|p| p.map(|x| x.max(0.0))).collect();
        Ok(PauliChannelSpec { probs })
    }

    pub fn homogeneous(p: [f64; 4], n_qubits: usize) -> Result<Self> {
        Self::new(vec![p; n_qubits])
    }

    pub fn identity(n_qubits: usize) -> Self {
        PauliChannelSpec {
            probs: vec![[1.0, 0.0, 0.0, 0.0]; n_qubits],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[[f64; 4]] {
        &self.probs
    }

    /// Survival probability `q = p_1 + p_axis` of an eigenstate of the
    /// Pauli along `axis` on qubit index `i` (0-based).
    pub fn stabilizer_probability(&self, i: usize, axis: Axis) -> f64 {
        let p = &self.probs[i];
        p[0] + match axis {
            Axis::X => p[1],
            Axis::Y => p[2],
            Axis::Z => p[3],
        }
    }

    pub fn stabilizer_probabilities(&self, axes: &[Axis]) -> Result<Vec<f64>> {
        if axes.len() != self.n_qubits() {
            return Err(Error::Shape(format!(
                "{} axes for {} qubits",
                axes.len(),
                self.n_qubits()
            )));
        }
        Ok(axes
            .iter()
            .enumerate()
            .map(|(i, &a)| self.stabilizer_probability(i, a))
            .collect())
    }

    /// Aggregates for a product eigenstate along `axes`.
    pub fn aggregates(&self, axes: &[Axis]) -> Result<NoiseAggregates> {
        let qs = self.stabilizer_probabilities(axes)?;
        let n = self.n_qubits() as f64;
        let mut agg = NoiseAggregates::from_survival(&qs);
        agg.p1_av = self.probs.iter().map(|p| p[0]).sum::<f64>() / n;
        agg.p2_av = self.probs.iter().map(purity).sum::<f64>() / n;
        Ok(agg)
    }
}

fn purity(p: &[f64; 4]) -> f64 {
    p.iter().map(|x| x * x).sum()
}

/// Per-qubit readout success probabilities `(p(0|0), p(1|1))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReadoutSpec {
    success: Vec<(f64, f64)>,
}

impl ReadoutSpec {
    pub fn new(success: Vec<(f64, f64)>) -> Result<Self> {
        if success.is_empty() {
            return Err(Error::Domain("readout on zero qubits".into()));
        }
        for (i, &(a, b)) in success.iter().enumerate() {
            if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
                return Err(Error::Domain(format!(
                    "qubit {}: success probabilities ({a}, {b}) outside [0, 1]",
                    i + 1
                )));
            }
        }
        Ok(ReadoutSpec { success })
    }

    pub fn homogeneous(p00: f64, p11: f64, n_qubits: usize) -> Result<Self> {
        Self::new(vec![(p00, p11); n_qubits])
    }

    pub fn symmetric(q: f64, n_qubits: usize) -> Result<Self> {
        Self::homogeneous(q, q, n_qubits)
    }

    pub fn perfect(n_qubits: usize) -> Self {
        ReadoutSpec {
            success: vec![(1.0, 1.0); n_qubits],
        }
    }

    /// Reads `(p(0|0), p(1|1))` off the diagonals of single-qubit
    /// two-outcome POVMs.
    pub fn from_qubit_povms(factors: &[Povm]) -> Result<Self> {
        let success = factors
            .iter()
            .enumerate()
            .map(|(i, m)| {
                if m.dim() != 2 || m.len() != 2 {
                    return Err(Error::InvalidPovm(format!(
                        "qubit {}: expected a two-outcome qubit POVM",
                        i + 1
                    )));
                }
                let e = m.effects();
                Ok((e[0][(0, 0)].re.clamp(0.0, 1.0), e[1][(1, 1)].re.clamp(0.0, 1.0)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(success)
    }

    pub fn n_qubits(&self) -> usize {
        self.success.len()
    }

    pub fn success(&self) -> &[(f64, f64)] {
        &self.success
    }

    /// Per-qubit average success `(p(0|0) + p(1|1)) / 2`.
    pub fn symmetric_success(&self) -> Vec<f64> {
        self.success.iter().map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.success.iter().all(|(a, b)| (a - b).abs() <= SIMPLEX_TOL)
    }

    /// Aggregates of the symmetrized readout. A symmetric bitflip with
    /// success `q` is the Pauli channel `(q, 1 − q, 0, 0)` before an ideal
    /// readout, which fixes `p1_av` and `p2_av`.
    pub fn aggregates(&self) -> NoiseAggregates {
        let qs = self.symmetric_success();
        let n = qs.len() as f64;
        let mut agg = NoiseAggregates::from_survival(&qs);
        agg.p1_av = agg.q_av;
        agg.p2_av = qs.iter().map(|q| q * q + (1.0 - q) * (1.0 - q)).sum::<f64>() / n;
        agg
    }
}

/// Averages over qubits of the quantities entering the bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseAggregates {
    /// Mean survival probability `(1/N) Σ q_i`.
    pub q_av: f64,
    /// `(1/N) Σ q_i (1 − q_i)`.
    pub f_av: f64,
    /// Mean identity probability.
    pub p1_av: f64,
    /// Mean squared 2-norm of the per-qubit Pauli probability vectors.
    pub p2_av: f64,
}

impl NoiseAggregates {
    fn from_survival(qs: &[f64]) -> Self {
        let n = qs.len() as f64;
        NoiseAggregates {
            q_av: qs.iter().sum::<f64>() / n,
            f_av: qs.iter().map(|q| q * (1.0 - q)).sum::<f64>() / n,
            p1_av: f64::NAN,
            p2_av: f64::NAN,
        }
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::Size {
            requested: n,
            cap,
        });
    }
    Ok(())
}

fn check_survival(qs: &[f64]) -> Result<()> {
    for (i, &q) in qs.iter().enumerate() {
        if q < 0.5 {
            return Err(Error::Precondition(format!(
                "qubit {}: survival probability {q} is below 1/2",
                i + 1
            )));
        }
    }
    Ok(())
}

pub fn single_qubit_pauli_kraus(p: &[f64; 4]) -> Vec<CMatrix> {
    let mut ops: Vec<CMatrix> = Pauli::ALL
        .iter()
        .zip(p)
        .filter(|(_, &w)| w > 0.0)
        .map(|(s, &w)| s.matrix().scale_real(w.sqrt()))
        .collect();
    if ops.is_empty() {
        ops.push(CMatrix::identity(2));
    }
    ops
}

pub fn single_qubit_pauli_channel(p: &[f64; 4]) -> QuantumChannel {
    QuantumChannel::from_kraus(single_qubit_pauli_kraus(p)).expect("Pauli mixture is CPTP")
}

/// `⊗_i Σ_j p_j^(i) σ_j · σ_j` as a dense channel.
pub fn build_pauli_channel(spec: &PauliChannelSpec) -> Result<QuantumChannel> {
    build_pauli_channel_with_cap(spec, DEFAULT_DENSE_QUBIT_CAP)
}

pub fn build_pauli_channel_with_cap(spec: &PauliChannelSpec, cap: usize) -> Result<QuantumChannel> {
    check_cap(spec.n_qubits(), cap)?;
    let parts: Vec<QuantumChannel> = spec.probs.iter().map(single_qubit_pauli_channel).collect();
    tensor_channels(&parts)
}

/// The product state `⊗_i Λ_i(ψ_i)` for Pauli eigenstates `ψ_i`, built
/// factor by factor.
pub fn noisy_product_state(spec: &PauliChannelSpec, axes: &[Axis], signs: &[Sign]) -> Result<QuantumState> {
    if axes.len() != spec.n_qubits() || signs.len() != spec.n_qubits() {
        return Err(Error::Shape("axes and signs must cover every qubit".into()));
    }
    let mut factors = Vec::with_capacity(axes.len());
    for (i, (&a, &s)) in axes.iter().zip(signs).enumerate() {
        let psi = pauli_eigenvector(a, s);
        let rho = CMatrix::outer(&psi);
        factors.push(single_qubit_pauli_channel(&spec.probs[i]).apply_matrix(&rho)?);
    }
    QuantumState::new(kron_all(&factors)?)
}

fn readout_factor(p00: f64, p11: f64) -> Povm {
    let e0 = CMatrix::diag_real(&[p00, 1.0 - p11]);
    let e1 = CMatrix::diag_real(&[1.0 - p00, p11]);
    Povm::new(vec![e0, e1]).expect("stochastic columns")
}

/// Noisy computational-basis measurement with per-qubit confusion
/// `[[p(0|0), 1 − p(1|1)], [1 − p(0|0), p(1|1)]]`.
pub fn build_readout_povm(spec: &ReadoutSpec) -> Result<Povm> {
    build_readout_povm_with_cap(spec, DEFAULT_DENSE_QUBIT_CAP)
}

pub fn build_readout_povm_with_cap(spec: &ReadoutSpec, cap: usize) -> Result<Povm> {
    check_cap(spec.n_qubits(), cap)?;
    let factors: Vec<Povm> = spec.success.iter().map(|&(a, b)| readout_factor(a, b)).collect();
    Povm::product(&factors)
}

/// Replaces both success probabilities of each qubit by their mean.
pub fn symmetrize_readout(spec: &ReadoutSpec) -> ReadoutSpec {
    ReadoutSpec {
        success: spec.symmetric_success().into_iter().map(|q| (q, q)).collect(),
    }
}

/// `exp(−iγσ) = cos γ I − i sin γ σ`.
pub fn pauli_rotation(axis: Axis, angle: f64) -> CMatrix {
    let (s, c) = angle.sin_cos();
    let sigma = axis.pauli().matrix();
    CMatrix::from_fn(2, 2, |i, j| {
        let id = if i == j { ONE } else { ZERO };
        id * c + sigma[(i, j)] * C64::new(0.0, -s)
    })
}

/// `⊗_k exp(−iγ_k σ_k)` as a dense unitary.
pub fn rotation_unitary(axes: &[Axis], angles: &[f64]) -> Result<CMatrix> {
    if axes.len() != angles.len() || axes.is_empty() {
        return Err(Error::Shape("one axis per rotation angle required".into()));
    }
    let factors: Vec<CMatrix> = axes.iter().zip(angles).map(|(&a, &g)| pauli_rotation(a, g)).collect();
    kron_all(&factors)
}

pub fn coherent_rotation_channel(axes: &[Axis], angles: &[f64]) -> Result<QuantumChannel> {
    check_cap(axes.len(), DEFAULT_DENSE_QUBIT_CAP)?;
    unitary_channel(rotation_unitary(axes, angles)?)
}

/// Channel applying the traceless unitary `σ` to `qubit` (0-based) and the
/// identity elsewhere.
pub fn single_pauli_insertion(n_qubits: usize, qubit: usize, sigma: Pauli) -> Result<QuantumChannel> {
    check_cap(n_qubits, DEFAULT_DENSE_QUBIT_CAP)?;
    if qubit >= n_qubits {
        return Err(Error::Domain(format!("qubit {qubit} outside 0..{n_qubits}")));
    }
    if sigma == Pauli::I {
        return Err(Error::Domain("the inserted Pauli must be traceless".into()));
    }
    let factors: Vec<CMatrix> = (0..n_qubits)
        .map(|k| if k == qubit { sigma.matrix() } else { CMatrix::identity(2) })
        .collect();
    unitary_channel(kron_all(&factors)?)
}

/// Exact channel distance of any single traceless-unitary insertion from
/// the identity channel.
pub const SINGLE_INSERTION_ACD: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// State distances of the noisy Pauli eigenstate `Λ(ψ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ex1Exact {
    /// `d_av^s(Λ(ψ), τ_d)`.
    pub to_uniform: f64,
    /// `d_av^s(Λ(ψ), ψ)`.
    pub to_ideal: f64,
}

/// Exact distances from per-qubit survival probabilities `q_i ≥ ½`:
/// `½√(Π(1 − 2q_i(1 − q_i)) − 1/d)` and
/// `½√(1 − 2Πq_i + Π(1 − 2q_i(1 − q_i)))`.
pub fn ex1_exact_from_survival(qs: &[f64]) -> Result<Ex1Exact> {
    check_survival(qs)?;
    let purity: f64 = qs.iter().map(|q| 1.0 - 2.0 * q * (1.0 - q)).product();
    let survive: f64 = qs.iter().product();
    let inv_d = 0.5f64.powi(qs.len() as i32);
    Ok(Ex1Exact {
        to_uniform: 0.5 * (purity - inv_d).max(0.0).sqrt(),
        to_ideal: 0.5 * (1.0 - 2.0 * survive + purity).max(0.0).sqrt(),
    })
}

pub fn ex1_exact(spec: &PauliChannelSpec, axes: &[Axis]) -> Result<Ex1Exact> {
    ex1_exact_from_survival(&spec.stabilizer_probabilities(axes)?)
}

/// `½ exp(−f N)`, implied by the exact distance to the uniform state.
pub fn upper_uniform_bound(f_av: f64, n: usize) -> f64 {
    0.5 * (-f_av * n as f64).exp()
}

/// `½ exp(−2 f N)`; not implied by the exact value and can fail.
pub fn upper_uniform_bound_maintext(f_av: f64, n: usize) -> f64 {
    0.5 * (-2.0 * f_av * n as f64).exp()
}

/// `½ √(1 − 2 q^N)`, defined when `q ≤ (½)^{1/N}`.
pub fn lower_ideal_bound(q_av: f64, n: usize) -> Result<f64> {
    let qn = q_av.powi(n as i32);
    if !(qn <= 0.5) {
        return Err(Error::Precondition(format!(
            "lower bound needs q_av <= (1/2)^(1/N); got q_av = {q_av}, N = {n}"
        )));
    }
    Ok(0.5 * (1.0 - 2.0 * qn).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ex1Bounds {
    /// Certified: exact `to_uniform` never exceeds this.
    pub upper_uniform: f64,
    /// Certified: exact `to_ideal` is never below this.
    pub lower_ideal: f64,
    /// Published variant with twice the exponent; comparison only.
    pub upper_uniform_maintext: f64,
}

pub fn ex1_bounds(agg: &NoiseAggregates, n: usize) -> Result<Ex1Bounds> {
    Ok(Ex1Bounds {
        upper_uniform: upper_uniform_bound(agg.f_av, n),
        lower_ideal: lower_ideal_bound(agg.q_av, n)?,
        upper_uniform_maintext: upper_uniform_bound_maintext(agg.f_av, n),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReadoutBounds {
    /// Certified upper bound on `d_av^m(C^sym P, trivial)`.
    pub upper_uniform_sym: f64,
    /// Certified lower bound on `d_av^m(M, P)` for the (possibly asymmetric)
    /// readout `M`.
    pub lower_ideal: f64,
    /// Published variant with twice the exponent; comparison only.
    pub upper_uniform_sym_maintext: f64,
}

/// Bounds for symmetrized readout noise, with `q_i = (p(0|0) + p(1|1))/2`.
pub fn ex2_ex3_bounds(spec: &ReadoutSpec) -> Result<ReadoutBounds> {
    let qs = spec.symmetric_success();
    check_survival(&qs)?;
    let agg = spec.aggregates();
    let n = spec.n_qubits();
    Ok(ReadoutBounds {
        upper_uniform_sym: upper_uniform_bound(agg.f_av, n),
        lower_ideal: lower_ideal_bound(agg.q_av, n)?,
        upper_uniform_sym_maintext: upper_uniform_bound_maintext(agg.f_av, n),
    })
}

/// Exact distances of a symmetric readout from the trivial and from the
/// ideal measurement; same functional form as [`ex1_exact_from_survival`].
pub fn symmetric_readout_exact(spec: &ReadoutSpec) -> Result<Ex1Exact> {
    if !spec.is_symmetric() {
        return Err(Error::Precondition(
            "exact readout closed form needs p(0|0) = p(1|1) on every qubit".into(),
        ));
    }
    ex1_exact_from_survival(&spec.symmetric_success())
}

/// Channel distances of a separable Pauli channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ex4Exact {
    /// `d_av^ch(Λ, Λ_dep) = ½ √(Π‖p^(i)‖² − 1/d²)`.
    pub to_depolarizing: f64,
    /// `d_av^ch(Λ, id) = ½ √(1 − 2Π p_1^(i) + Π‖p^(i)‖²)`.
    pub to_identity: f64,
}

pub fn ex4_exact(spec: &PauliChannelSpec) -> Ex4Exact {
    let p2: f64 = spec.probs.iter().map(purity).product();
    let p1: f64 = spec.probs.iter().map(|p| p[0]).product();
    let inv_d2 = 0.25f64.powi(spec.n_qubits() as i32);
    Ex4Exact {
        to_depolarizing: 0.5 * (p2 - inv_d2).max(0.0).sqrt(),
        to_identity: 0.5 * (1.0 - 2.0 * p1 + p2).max(0.0).sqrt(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ex4Bounds {
    /// Certified: `½ exp(−(1 − p2_av) N / 2) ≥ d_av^ch(Λ, Λ_dep)`.
    pub upper_to_depolarizing: f64,
    /// Certified: `½ √(1 − 2 p1_av^N) ≤ d_av^ch(Λ, id)`.
    pub lower_to_identity: f64,
    /// Published `½ exp(−p2_av N)`; violated e.g. by the identity channel.
    pub printed_upper_to_depolarizing: f64,
    /// Published `(1/√2) √(1 − 2 p1_av^N)`; violated by some instances.
    pub printed_lower_to_identity: f64,
    /// `½ exp(−(1 − p2_av) N)`, the analogue of the doubled exponent.
    pub upper_to_depolarizing_maintext: f64,
}

pub fn ex4_bounds(spec: &PauliChannelSpec) -> Result<Ex4Bounds> {
    let n = spec.n_qubits();
    let nf = n as f64;
    let p1_av = spec.probs.iter().map(|p| p[0]).sum::<f64>() / nf;
    let p2_av = spec.probs.iter().map(purity).sum::<f64>() / nf;
    let lower = lower_ideal_bound(p1_av, n)?;
    Ok(Ex4Bounds {
        upper_to_depolarizing: 0.5 * (-(1.0 - p2_av) * nf / 2.0).exp(),
        lower_to_identity: lower,
        printed_upper_to_depolarizing: 0.5 * (-p2_av * nf).exp(),
        printed_lower_to_identity: core::f64::consts::SQRT_2 * lower,
        upper_to_depolarizing_maintext: 0.5 * (-(1.0 - p2_av) * nf).exp(),
    })
}

/// Reference measurement for [`homogeneous_acd_m`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReadoutReference {
    /// Ideal computational-basis measurement.
    Ideal,
    /// `2^N` effects `I/2^N`.
    Trivial,
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}

/// Exact measurement distance for `N` qubits with identical confusion
/// `(a, b) = (p(0|0), p(1|1))`. Outcomes with the same number of zeros
/// contribute equally, so the `2^N`-term sum collapses to `N + 1` terms.
pub fn homogeneous_acd_m(a: f64, b: f64, n: usize, reference: ReadoutReference) -> Result<f64> {
    ReadoutSpec::homogeneous(a, b, 1)?;
    // Per-qubit effects m0 = diag(a, 1 − b), m1 = diag(1 − a, b).
    let (tr0, tr1) = (a + 1.0 - b, 1.0 - a + b);
    let (sq0, sq1) = (a * a + (1.0 - b) * (1.0 - b), (1.0 - a) * (1.0 - a) + b * b);
    let nf = n as f64;
    let ln2 = core::f64::consts::LN_2;
    let mut total = 0.0;
    for k in 0..=n {
        let (z, o) = (k as i32, (n - k) as i32);
        let tr = tr0.powi(z) * tr1.powi(o);
        let sq = sq0.powi(z) * sq1.powi(o);
        let (hs2, trace_diff) = match reference {
            // <M_x, P_x> = a^k b^(N−k).
            ReadoutReference::Ideal => (sq - 2.0 * a.powi(z) * b.powi(o) + 1.0, tr - 1.0),
            ReadoutReference::Trivial => {
                let inv_d = (-nf * ln2).exp();
                (sq - 2.0 * tr * inv_d + inv_d, tr - 1.0)
            }
        };
        let v = (hs2 + trace_diff * trace_diff).max(0.0);
        if v > 0.0 {
            total += (ln_binomial(n, k) - nf * ln2 + 0.5 * v.ln()).exp();
        }
    }
    Ok(0.5 * total)
}
