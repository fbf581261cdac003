//! Validated quantum states, POVMs and channels, and the Born rule.
//!
//! Multi-qubit objects use the convention that qubit 1 is the most
//! significant bit of the basis index, so `|x1 ... xN>` sits at index
//! `sum_k x_k 2^(N-k)` and Kronecker products list qubit 1 first.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{
    self, hs_norm, kron, kron_all, kron_vec, permute_subsystems, vec_norm, CMatrix, C64, ONE,
    ZERO,
};

/// Tolerance on Hermiticity, positivity and unit trace of stored objects.
pub const STATE_TOL: f64 = 1e-10;
/// Tolerance on POVM completeness and channel trace preservation.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Probability entries above `-PROB_CLAMP` are clamped to zero.
pub const PROB_CLAMP: f64 = 1e-12;
/// Largest Kraus list kept when tensoring channels together.
pub const KRAUS_CACHE_LIMIT: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMatrix {
        let (o, z, i) = (ONE, ZERO, C64::new(0.0, 1.0));
        let data = match self {
            Pauli::I => vec![o, z, z, o],
            Pauli::X => vec![z, o, o, z],
            Pauli::Y => vec![z, -i, i, z],
            Pauli::Z => vec![o, z, z, -o],
        };
        CMatrix::from_vec(2, 2, data).expect("2x2")
    }
}

/// Axis of a single-qubit Pauli eigenstate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn pauli(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(Error::Parse(format!("invalid Pauli axis {:?}", other))),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" => Ok(Sign::Plus),
            "-" => Ok(Sign::Minus),
            other => Err(Error::Parse(format!("invalid eigenvalue sign {:?}", other))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Eigenvector of the Pauli matrix along `axis` with eigenvalue `±1`.
pub fn pauli_eigenvector(axis: Axis, sign: Sign) -> [C64; 2] {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let plus = sign == Sign::Plus;
    match (axis, plus) {
        (Axis::Z, true) => [ONE, ZERO],
        (Axis::Z, false) => [ZERO, ONE],
        (Axis::X, true) => [C64::new(s, 0.0), C64::new(s, 0.0)],
        (Axis::X, false) => [C64::new(s, 0.0), C64::new(-s, 0.0)],
        (Axis::Y, true) => [C64::new(s, 0.0), C64::new(0.0, s)],
        (Axis::Y, false) => [C64::new(s, 0.0), C64::new(0.0, -s)],
    }
}

/// Computational basis vector `|index>` in dimension `dim`.
pub fn basis_vector(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[index] = ONE;
    v
}

fn min_eigenvalue(a: &CMatrix) -> Result<f64> {
    if a.is_diagonal() {
        return Ok(a.diagonal().iter().fold(f64::INFINITY, |m, z| m.min(z.re)));
    }
    Ok(a.eigvalsh()?[0])
}

/// Density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug)]
pub struct QuantumState {
    rho: CMatrix,
    pure: Option<Vec<C64>>,
}

impl QuantumState {
    pub fn new(rho: CMatrix) -> Result<Self> {
        if !rho.is_square() || rho.rows() == 0 {
            return Err(Error::InvalidState("density matrix must be square".into()));
        }
        if !rho.is_finite() {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let defect = rho.hermitian_defect();
        if defect > STATE_TOL {
            return Err(Error::InvalidState(format!("Hermiticity defect {:.3e}", defect)));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {}", tr)));
        }
        let rho = rho.hermitized()?;
        let min = min_eigenvalue(&rho)?;
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {:.3e}", min)));
        }
        Ok(QuantumState { rho, pure: None })
    }

    /// Normalized `|ψ><ψ|`; the amplitudes need not be normalized.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let norm = vec_norm(amplitudes);
        if amplitudes.is_empty() || !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Domain("pure state needs a nonzero finite vector".into()));
        }
        let psi: Vec<C64> = amplitudes.iter().map(|z| z / norm).collect();
        Ok(QuantumState {
            rho: CMatrix::outer(&psi),
            pure: Some(psi),
        })
    }

    pub fn maximally_mixed_dim(dim: usize) -> Self {
        QuantumState {
            rho: CMatrix::identity(dim).scale_real(1.0 / dim as f64),
            pure: None,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    /// Normalized state vector when the state was built as pure.
    pub fn pure_vector(&self) -> Option<&[C64]> {
        self.pure.as_deref()
    }

    pub fn is_maximally_mixed(&self) -> bool {
        let d = self.dim() as f64;
        let tau = CMatrix::identity(self.dim()).scale_real(1.0 / d);
        self.rho.sub(&tau).map(|m| m.max_abs() <= 1e-15).unwrap_or(false)
    }

    pub fn tensor(&self, other: &QuantumState) -> Result<Self> {
        let rho = kron(&self.rho, &other.rho)?;
        let pure = match (&self.pure, &other.pure) {
            (Some(a), Some(b)) => Some(kron_vec(a, b)),
            _ => None,
        };
        Ok(QuantumState { rho, pure })
    }

    /// `U ρ U†`.
    pub fn evolve(&self, u: &CMatrix) -> Result<Self> {
        if let Some(psi) = &self.pure {
            return Self::pure(&u.mat_vec(psi)?);
        }
        Self::new(u.conjugate(&self.rho)?)
    }

    /// Convex combination `Σ w_k ρ_k`.
    pub fn mixture(weights: &[f64], states: &[QuantumState]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::Domain("empty mixture".into()))?;
        let mut acc = CMatrix::zeros(first.dim(), first.dim());
        for (w, s) in weights.iter().zip(states) {
            acc.add_scaled(&s.rho, C64::new(*w, 0.0))?;
        }
        Self::new(acc)
    }
}

pub fn pure_state(amplitudes: &[C64]) -> Result<QuantumState> {
    QuantumState::pure(amplitudes)
}

/// Tensor product of single-qubit Pauli eigenstates, qubit 1 first.
pub fn pauli_product_state(axes: &[Axis], signs: &[Sign]) -> Result<QuantumState> {
    if axes.len() != signs.len() || axes.is_empty() {
        return Err(Error::Shape(format!(
            "{} axes but {} signs",
            axes.len(),
            signs.len()
        )));
    }
    let mut psi = vec![ONE];
    for (&a, &s) in axes.iter().zip(signs) {
        psi = kron_vec(&psi, &pauli_eigenvector(a, s));
    }
    QuantumState::pure(&psi)
}

pub fn maximally_mixed(n_qubits: usize) -> QuantumState {
    QuantumState::maximally_mixed_dim(1 << n_qubits)
}

/// Probability vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbDist {
    weights: Vec<f64>,
}

impl ProbDist {
    /// Accepts entries down to `-PROB_CLAMP` (clamped to zero) and a total
    /// within `COMPLETENESS_TOL` of one (renormalized).
    pub fn new(mut weights: Vec<f64>) -> Result<Self> {
        for w in weights.iter_mut() {
            if !w.is_finite() || *w < -PROB_CLAMP {
                return Err(Error::Inconsistent { total: *w });
            }
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > COMPLETENESS_TOL {
            return Err(Error::Inconsistent { total });
        }
        for w in weights.iter_mut() {
            *w /= total;
        }
        Ok(ProbDist { weights })
    }

    pub fn uniform(n: usize) -> Self {
        ProbDist {
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Ordered list of PSD effects summing to the identity.
#[derive(Clone, Debug)]
pub struct Povm {
    dim: usize,
    effects: Vec<CMatrix>,
    diagonal: bool,
}

impl Povm {
    pub fn new(effects: Vec<CMatrix>) -> Result<Self> {
        let first = effects
            .first()
            .ok_or_else(|| Error::InvalidPovm("no effects".into()))?;
        let dim = first.rows();
        let mut sum = CMatrix::zeros(dim, dim);
        let mut clean = Vec::with_capacity(effects.len());
        for (i, e) in effects.iter().enumerate() {
            if e.rows() != dim || e.cols() != dim {
                return Err(Error::InvalidPovm(format!("effect {} has wrong shape", i)));
            }
            let defect = e.hermitian_defect();
            if defect > STATE_TOL {
                return Err(Error::InvalidPovm(format!(
                    "effect {} Hermiticity defect {:.3e}",
                    i, defect
                )));
            }
            let h = e.hermitized()?;
            let min = min_eigenvalue(&h)?;
            if min < -STATE_TOL {
                return Err(Error::InvalidPovm(format!(
                    "effect {} has negative eigenvalue {:.3e}",
                    i, min
                )));
            }
            sum.add_scaled(&h, ONE)?;
            clean.push(h);
        }
        let defect = linalg::op_norm_inf(&sum.sub(&CMatrix::identity(dim))?)?;
        if defect > COMPLETENESS_TOL {
            return Err(Error::InvalidPovm(format!(
                "effects sum to identity only within {:.3e}",
                defect
            )));
        }
        Ok(Self::from_parts(clean))
    }

    fn from_parts(effects: Vec<CMatrix>) -> Self {
        let dim = effects[0].rows();
        let diagonal = effects.iter().all(CMatrix::is_diagonal);
        Povm {
            dim,
            effects,
            diagonal,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn effects(&self) -> &[CMatrix] {
        &self.effects
    }

    /// True when every effect is diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    /// Product POVM, outcome index of factor 1 most significant.
    pub fn product(factors: &[Povm]) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::InvalidPovm("empty product".into()))?;
        let mut effects = first.effects.clone();
        for f in &factors[1..] {
            let mut next = Vec::with_capacity(effects.len() * f.len());
            for a in &effects {
                for b in &f.effects {
                    next.push(kron(a, b)?);
                }
            }
            effects = next;
        }
        Ok(Self::from_parts(effects))
    }

    /// Effects `U† E_i U`.
    pub fn rotated(&self, u: &CMatrix) -> Result<Self> {
        let ud = u.adjoint();
        let effects = self
            .effects
            .iter()
            .map(|e| ud.conjugate(e))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_parts(effects))
    }
}

/// Projective measurement onto the computational basis of `n_qubits`.
pub fn comp_basis_povm(n_qubits: usize) -> Povm {
    let d = 1usize << n_qubits;
    let effects = (0..d)
        .map(|i| {
            let mut e = CMatrix::zeros(d, d);
            e[(i, i)] = ONE;
            e
        })
        .collect();
    Povm::from_parts(effects)
}

/// `n` effects all equal to `I/n`, on dimension `d`.
pub fn trivial_povm(n: usize, d: usize) -> Povm {
    let e = CMatrix::identity(d).scale_real(1.0 / n as f64);
    Povm::from_parts(vec![e; n])
}

/// Replaces every effect by its diagonal part.
pub fn dephase_povm(m: &Povm) -> Povm {
    let effects = m
        .effects
        .iter()
        .map(|e| CMatrix::diag(&e.diagonal()))
        .collect();
    Povm::from_parts(effects)
}

/// Raw Born probabilities `Re tr(M_i ρ)` without validation.
pub(crate) fn born_raw(rho: &CMatrix, m: &Povm) -> Vec<f64> {
    let d = rho.rows();
    m.effects
        .iter()
        .map(|e| {
            if m.diagonal {
                (0..d).map(|k| e[(k, k)].re * rho[(k, k)].re).sum()
            } else {
                let (es, rs) = (e.as_slice(), rho.as_slice());
                let mut acc = 0.0;
                for a in 0..d {
                    for b in 0..d {
                        acc += (es[a * d + b] * rs[b * d + a]).re;
                    }
                }
                acc
            }
        })
        .collect()
}

/// `<ψ|M_i|ψ>` for a normalized vector.
pub(crate) fn born_pure_raw(psi: &[C64], m: &Povm) -> Vec<f64> {
    let d = psi.len();
    m.effects
        .iter()
        .map(|e| {
            if m.diagonal {
                (0..d).map(|k| e[(k, k)].re * psi[k].norm_sqr()).sum()
            } else {
                let mut acc = C64::new(0.0, 0.0);
                for a in 0..d {
                    let row = e.row(a);
                    let s: C64 = row.iter().zip(psi).map(|(x, y)| x * y).sum();
                    acc += psi[a].conj() * s;
                }
                acc.re
            }
        })
        .collect()
}

/// Outcome statistics `p_i = tr(M_i ρ)`.
pub fn born_distribution(rho: &QuantumState, m: &Povm) -> Result<ProbDist> {
    if rho.dim() != m.dim() {
        return Err(Error::Shape(format!(
            "state of dimension {} measured by POVM on {}",
            rho.dim(),
            m.dim()
        )));
    }
    let raw = match rho.pure_vector() {
        Some(psi) => born_pure_raw(psi, m),
        None => born_raw(&rho.rho, m),
    };
    ProbDist::new(raw)
}

#[derive(Clone, Debug, PartialEq)]
enum Structure {
    General,
    Depolarizing,
}

/// CPTP map stored through its normalized Choi state
/// `J = (Λ ⊗ id)(|Ω><Ω|)`, `|Ω> = d^{-1/2} Σ_i |i>|i>`, output factor first.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    dim: usize,
    choi: CMatrix,
    kraus: Option<Vec<CMatrix>>,
    structure: Structure,
}

fn choi_from_kraus(dim: usize, kraus: &[CMatrix]) -> CMatrix {
    let n = dim * dim;
    let mut choi = CMatrix::zeros(n, n);
    let scale = 1.0 / dim as f64;
    for k in kraus {
        let v = k.as_slice();
        let data = choi.as_mut_slice();
        for (r, vr) in v.iter().enumerate() {
            if *vr == ZERO {
                continue;
            }
            let row = &mut data[r * n..(r + 1) * n];
            let s = vr * scale;
            for (x, vc) in row.iter_mut().zip(v) {
                *x += s * vc.conj();
            }
        }
    }
    choi
}

impl QuantumChannel {
    pub fn from_kraus(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::NotCptp("empty Kraus list".into()))?;
        let dim = first.rows();
        let mut sum = CMatrix::zeros(dim, dim);
        for (i, k) in kraus.iter().enumerate() {
            if k.rows() != dim || k.cols() != dim {
                return Err(Error::NotCptp(format!("Kraus operator {} is not {}x{}", i, dim, dim)));
            }
            sum.add_scaled(&k.adjoint().matmul(k)?, ONE)?;
        }
        let defect = sum.sub(&CMatrix::identity(dim))?.max_abs();
        if defect > COMPLETENESS_TOL {
            return Err(Error::NotCptp(format!(
                "Σ K†K deviates from identity by {:.3e}",
                defect
            )));
        }
        let choi = choi_from_kraus(dim, &kraus);
        Ok(QuantumChannel {
            dim,
            choi,
            kraus: Some(kraus),
            structure: Structure::General,
        })
    }

    /// Builds a channel from a normalized Choi state on `dim * dim`.
    pub fn from_choi(choi: CMatrix, dim: usize) -> Result<Self> {
        if choi.rows() != dim * dim || !choi.is_square() {
            return Err(Error::Shape(format!("Choi state is not {}x{}", dim * dim, dim * dim)));
        }
        let defect = choi.hermitian_defect();
        if defect > COMPLETENESS_TOL {
            return Err(Error::NotCptp(format!("Choi Hermiticity defect {:.3e}", defect)));
        }
        let choi = choi.hermitized()?;
        let min = min_eigenvalue(&choi)?;
        if min < -COMPLETENESS_TOL {
            return Err(Error::NotCptp(format!("Choi eigenvalue {:.3e}", min)));
        }
        let reduced = linalg::partial_trace(&choi, &[dim, dim], &[1])?;
        let tp = reduced
            .sub(&CMatrix::identity(dim).scale_real(1.0 / dim as f64))?
            .max_abs();
        if tp > COMPLETENESS_TOL {
            return Err(Error::NotCptp(format!("trace preservation defect {:.3e}", tp)));
        }
        Ok(QuantumChannel {
            dim,
            choi,
            kraus: None,
            structure: Structure::General,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    pub fn kraus(&self) -> Option<&[CMatrix]> {
        self.kraus.as_deref()
    }

    /// The single Kraus operator of a unitary (or isometric) channel.
    pub fn unitary(&self) -> Option<&CMatrix> {
        match self.kraus.as_deref() {
            Some([u]) => Some(u),
            _ => None,
        }
    }

    pub fn is_depolarizing(&self) -> bool {
        self.structure == Structure::Depolarizing
    }

    /// Canonical Kraus operators `K_k = sqrt(d λ_k) unvec(v_k)` from the
    /// spectral decomposition of the Choi state.
    pub fn kraus_from_choi(&self) -> Result<Vec<CMatrix>> {
        let d = self.dim;
        let eig = self.choi.herm_eig()?;
        let cutoff = 1e-13;
        let mut out = Vec::new();
        for (k, &lam) in eig.values.iter().enumerate() {
            if lam <= cutoff {
                continue;
            }
            let s = (d as f64 * lam).sqrt();
            let col = eig.vectors.column(k);
            out.push(CMatrix::from_vec(d, d, col.iter().map(|z| z * s).collect())?);
        }
        Ok(out)
    }

    /// Superoperator on row-major vectorized operators,
    /// `vec(Λ(ρ)) = S vec(ρ)`.
    pub fn superoperator(&self) -> Result<CMatrix> {
        let d = self.dim;
        let n = d * d;
        let scale = d as f64;
        // J[(a,i),(b,j)] = Λ(|i><j|)[a,b] / d and S[(a,b),(i,j)] = Λ(|i><j|)[a,b].
        Ok(CMatrix::from_fn(n, n, |r, c| {
            let (a, b) = (r / d, r % d);
            let (i, j) = (c / d, c % d);
            self.choi[(a * d + i, b * d + j)] * scale
        }))
    }

    /// `Λ(X)` for an arbitrary square operator, without validation.
    pub fn apply_matrix(&self, x: &CMatrix) -> Result<CMatrix> {
        let d = self.dim;
        if x.rows() != d || x.cols() != d {
            return Err(Error::Shape(format!(
                "operator of size {} into channel on {}",
                x.rows(),
                d
            )));
        }
        if self.structure == Structure::Depolarizing {
            return Ok(CMatrix::identity(d).scale(x.trace() / d as f64));
        }
        if let Some(kraus) = &self.kraus {
            let mut out = CMatrix::zeros(d, d);
            for k in kraus {
                out.add_scaled(&k.conjugate(x)?, ONE)?;
            }
            return Ok(out);
        }
        let mut out = CMatrix::zeros(d, d);
        let scale = d as f64;
        for a in 0..d {
            for b in 0..d {
                let mut acc = ZERO;
                for i in 0..d {
                    let row = self.choi.row(a * d + i);
                    for j in 0..d {
                        acc += row[b * d + j] * x[(i, j)];
                    }
                }
                out[(a, b)] = acc * scale;
            }
        }
        Ok(out)
    }
}

pub fn channel_from_kraus(kraus: Vec<CMatrix>) -> Result<QuantumChannel> {
    QuantumChannel::from_kraus(kraus)
}

pub fn unitary_channel(u: CMatrix) -> Result<QuantumChannel> {
    if !u.is_square() {
        return Err(Error::Shape("unitary must be square".into()));
    }
    QuantumChannel::from_kraus(vec![u])
}

/// `Λ_dep(ρ) = tr(ρ) I/d`.
pub fn depolarizing_channel(dim: usize) -> QuantumChannel {
    let n = dim * dim;
    QuantumChannel {
        dim,
        choi: CMatrix::identity(n).scale_real(1.0 / n as f64),
        kraus: None,
        structure: Structure::Depolarizing,
    }
}

pub fn identity_channel(dim: usize) -> QuantumChannel {
    unitary_channel(CMatrix::identity(dim)).expect("identity is unitary")
}

/// Tensor product channel, first factor acting on the most significant
/// subsystem.
pub fn tensor_channels(channels: &[QuantumChannel]) -> Result<QuantumChannel> {
    let first = channels
        .first()
        .ok_or_else(|| Error::Shape("empty channel list".into()))?;
    if channels.len() == 1 {
        return Ok(first.clone());
    }
    let dims: Vec<usize> = channels.iter().map(|c| c.dim).collect();
    let dim: usize = dims.iter().product();
    // kron of Choi states lives on (out1, ref1, out2, ref2, ...).
    let joint = kron_all(&channels.iter().map(|c| c.choi.clone()).collect::<Vec<_>>())?;
    let local: Vec<usize> = dims.iter().flat_map(|&d| [d, d]).collect();
    let m = channels.len();
    let perm: Vec<usize> = (0..m).map(|k| 2 * k).chain((0..m).map(|k| 2 * k + 1)).collect();
    let choi = permute_subsystems(&joint, &local, &perm)?;

    let count = channels.iter().try_fold(1usize, |acc, c| {
        c.kraus.as_ref().and_then(|k| acc.checked_mul(k.len()))
    });
    let kraus = match count {
        Some(n) if n <= KRAUS_CACHE_LIMIT => {
            let mut ops = first.kraus.clone().expect("checked");
            for c in &channels[1..] {
                let mut next = Vec::with_capacity(ops.len() * c.kraus.as_ref().map_or(0, Vec::len));
                for a in &ops {
                    for b in c.kraus.as_ref().expect("checked") {
                        next.push(kron(a, b)?);
                    }
                }
                ops = next;
            }
            Some(ops)
        }
        _ => None,
    };
    let structure = if channels.iter().all(|c| c.structure == Structure::Depolarizing) {
        Structure::Depolarizing
    } else {
        Structure::General
    };
    Ok(QuantumChannel {
        dim,
        choi,
        kraus,
        structure,
    })
}

/// `Λ(ρ)` as a validated state.
pub fn apply_channel(channel: &QuantumChannel, rho: &QuantumState) -> Result<QuantumState> {
    if channel.dim != rho.dim() {
        return Err(Error::Shape(format!(
            "state of dimension {} into channel on {}",
            rho.dim(),
            channel.dim
        )));
    }
    if let (Some(u), Some(psi)) = (channel.unitary(), rho.pure_vector()) {
        return QuantumState::pure(&u.mat_vec(psi)?);
    }
    let out = channel.apply_matrix(rho.matrix())?;
    QuantumState::new(out).map_err(|e| Error::NotCptp(e.to_string()))
}

/// Checks `U†U = I` to `tol` in the max-entry norm.
pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    u.is_square()
        && u.adjoint()
            .matmul(u)
            .and_then(|g| g.sub(&CMatrix::identity(u.rows())))
            .map(|g| g.max_abs() <= tol)
            .unwrap_or(false)
}

/// Distance of a state from `ρ'` in HS norm; convenience for tests.
pub fn hs_distance(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    Ok(hs_norm(&a.matrix().sub(b.matrix())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const S: f64 = core::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        hs_norm(&a.sub(b).unwrap()) <= tol
    }

    fn random_state(rng: &mut ChaCha8Rng, d: usize) -> QuantumState {
        let g = CMatrix::from_fn(d, d, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let p = g.matmul(&g.adjoint()).unwrap();
        let t = p.trace().re;
        QuantumState::new(p.scale_real(1.0 / t)).unwrap()
    }

    #[test]
    fn pure_state_construction() {
        let s = pure_state(&[ONE, ZERO]).unwrap();
        assert_eq!(s.matrix(), &CMatrix::diag_real(&[1.0, 0.0]));
        let plus = pure_state(&[c(S, 0.0), c(S, 0.0)]).unwrap();
        assert!(close(plus.matrix(), &CMatrix::from_real(2, 2, &[0.5; 4]).unwrap(), 1e-15));
        let scaled = pure_state(&[c(2.0, 0.0), ZERO]).unwrap();
        assert_eq!(scaled.matrix(), &CMatrix::diag_real(&[1.0, 0.0]));
        assert!(matches!(pure_state(&[ZERO, ZERO]), Err(Error::Domain(_))));
    }

    #[test]
    fn pauli_product_states() {
        let z = pauli_product_state(&[Axis::Z], &[Sign::Plus]).unwrap();
        assert_eq!(z.matrix(), &CMatrix::diag_real(&[1.0, 0.0]));
        let half_i_plus_x = CMatrix::identity(2)
            .add(&Pauli::X.matrix())
            .unwrap()
            .scale_real(0.5);
        let x = pauli_product_state(&[Axis::X], &[Sign::Plus]).unwrap();
        assert!(close(x.matrix(), &half_i_plus_x, 1e-15));
        let two = pauli_product_state(&[Axis::Z, Axis::X], &[Sign::Plus, Sign::Minus]).unwrap();
        let minus_x = CMatrix::identity(2)
            .sub(&Pauli::X.matrix())
            .unwrap()
            .scale_real(0.5);
        let expected = kron(&CMatrix::diag_real(&[1.0, 0.0]), &minus_x).unwrap();
        assert!(close(two.matrix(), &expected, 1e-15));
        assert!(matches!("w".parse::<Axis>(), Err(Error::Parse(_))));
        assert!(pauli_product_state(&[Axis::X], &[]).is_err());
    }

    #[test]
    fn eigenvectors_have_the_right_eigenvalue() {
        for a in Axis::ALL {
            for (s, sign) in [(1.0, Sign::Plus), (-1.0, Sign::Minus)] {
                let v = pauli_eigenvector(a, sign);
                let pv = a.pauli().matrix().mat_vec(&v).unwrap();
                for k in 0..2 {
                    assert!((pv[k] - v[k] * s).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn standard_objects() {
        assert!(close(
            maximally_mixed(1).matrix(),
            &CMatrix::identity(2).scale_real(0.5),
            0.0
        ));
        let p = comp_basis_povm(1);
        assert_eq!(p.effects()[0], CMatrix::diag_real(&[1.0, 0.0]));
        assert_eq!(p.effects()[1], CMatrix::diag_real(&[0.0, 1.0]));
        let t = trivial_povm(4, 4);
        assert!(Povm::new(t.effects().to_vec()).is_ok());
        assert!(t.effects().iter().all(|e| close(e, &CMatrix::identity(4).scale_real(0.25), 0.0)));
    }

    #[test]
    fn validation_rejects_perturbations() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random_state(&mut rng, 3);
        assert!(QuantumState::new(rho.matrix().clone()).is_ok());
        let mut bad = rho.matrix().clone();
        bad[(0, 1)] += c(1e-6, 0.0);
        assert!(QuantumState::new(bad).is_err());
        assert!(QuantumState::new(rho.matrix().scale_real(1.0 + 1e-8)).is_err());
        let neg = CMatrix::diag_real(&[1.0 + 1e-6, -1e-6]);
        assert!(QuantumState::new(neg).is_err());
        let dust = CMatrix::diag_real(&[1.0 + 1e-11, -1e-11]);
        assert!(QuantumState::new(dust).is_ok());

        let incomplete = vec![CMatrix::diag_real(&[1.0, 0.0]), CMatrix::diag_real(&[0.0, 0.99])];
        assert!(matches!(Povm::new(incomplete), Err(Error::InvalidPovm(_))));
        let negative = vec![CMatrix::diag_real(&[1.1, 0.0]), CMatrix::diag_real(&[-0.1, 1.0])];
        assert!(Povm::new(negative).is_err());
    }

    #[test]
    fn born_rule_examples() {
        let p = comp_basis_povm(1);
        let zero = pure_state(&[ONE, ZERO]).unwrap();
        assert_eq!(born_distribution(&zero, &p).unwrap().weights(), &[1.0, 0.0]);
        let plus = pure_state(&[c(S, 0.0), c(S, 0.0)]).unwrap();
        let w = born_distribution(&plus, &p).unwrap();
        assert!((w.weights()[0] - 0.5).abs() < 1e-15);
        let tau = maximally_mixed(2);
        let u = born_distribution(&tau, &trivial_povm(3, 4)).unwrap();
        for x in u.weights() {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(born_distribution(&tau, &p).is_err());
    }

    #[test]
    fn born_rule_is_affine() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let m = Povm::product(&[comp_basis_povm(1), dephase_povm(&comp_basis_povm(1))]).unwrap();
        let rotated = m.rotated(&Pauli::Y.matrix().kron(&CMatrix::identity(2)).unwrap()).unwrap();
        for _ in 0..20 {
            let (a, b) = (random_state(&mut rng, 4), random_state(&mut rng, 4));
            let t: f64 = rng.random_range(0.0..1.0);
            let mix = QuantumState::mixture(&[t, 1.0 - t], &[a.clone(), b.clone()]).unwrap();
            for povm in [&m, &rotated] {
                let pm = born_distribution(&mix, povm).unwrap();
                let pa = born_distribution(&a, povm).unwrap();
                let pb = born_distribution(&b, povm).unwrap();
                for k in 0..povm.len() {
                    let lin = t * pa.weights()[k] + (1.0 - t) * pb.weights()[k];
                    assert!((pm.weights()[k] - lin).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn prob_dist_clamps_and_rejects() {
        let p = ProbDist::new(vec![1.0 + 5e-13, -5e-13]).unwrap();
        assert_eq!(p.weights()[1], 0.0);
        assert!(ProbDist::new(vec![0.5, 0.4]).is_err());
        assert!(ProbDist::new(vec![1.1, -0.1]).is_err());
    }

    #[test]
    fn dephasing_examples() {
        let p = comp_basis_povm(2);
        let dp = dephase_povm(&p);
        for (a, b) in p.effects().iter().zip(dp.effects()) {
            assert_eq!(a, b);
        }
        let xs = vec![
            pure_state(&[c(S, 0.0), c(S, 0.0)]).unwrap().matrix().clone(),
            pure_state(&[c(S, 0.0), c(-S, 0.0)]).unwrap().matrix().clone(),
        ];
        let xbasis = Povm::new(xs).unwrap();
        let d = dephase_povm(&xbasis);
        for e in d.effects() {
            assert!(close(e, &CMatrix::identity(2).scale_real(0.5), 1e-15));
        }
        for (a, b) in xbasis.effects().iter().zip(d.effects()) {
            assert!((a.trace() - b.trace()).norm() < 1e-15);
        }
    }

    #[test]
    fn channel_examples() {
        let id = identity_channel(2);
        let s = 0.5;
        let omega = CMatrix::from_real(4, 4, &[s, 0., 0., s, 0., 0., 0., 0., 0., 0., 0., 0., s, 0., 0., s]).unwrap();
        assert!(close(id.choi(), &omega, 1e-15));
        let dep = depolarizing_channel(3);
        assert!(close(dep.choi(), &CMatrix::identity(9).scale_real(1.0 / 9.0), 0.0));
        let x = unitary_channel(Pauli::X.matrix()).unwrap();
        let zero = pure_state(&[ONE, ZERO]).unwrap();
        let out = apply_channel(&x, &zero).unwrap();
        assert!(close(out.matrix(), &CMatrix::diag_real(&[0.0, 1.0]), 1e-15));

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random_state(&mut rng, 3);
        assert!(close(apply_channel(&identity_channel(3), &rho).unwrap().matrix(), rho.matrix(), 1e-14));
        assert!(close(
            apply_channel(&dep, &rho).unwrap().matrix(),
            &CMatrix::identity(3).scale_real(1.0 / 3.0),
            1e-15
        ));

        // Pauli channel mixing I and X fixes |+>.
        let half = 0.5f64.sqrt();
        let pc = channel_from_kraus(vec![
            CMatrix::identity(2).scale_real(half),
            Pauli::X.matrix().scale_real(half),
        ])
        .unwrap();
        let plus = pure_state(&[c(S, 0.0), c(S, 0.0)]).unwrap();
        assert!(close(apply_channel(&pc, &plus).unwrap().matrix(), plus.matrix(), 1e-15));
    }

    #[test]
    fn incomplete_kraus_is_rejected() {
        let k = vec![CMatrix::identity(2).scale_real(0.9)];
        assert!(matches!(channel_from_kraus(k), Err(Error::NotCptp(_))));
    }

    fn random_channel(rng: &mut ChaCha8Rng, d: usize, r: usize) -> QuantumChannel {
        // Random isometry from the Gram matrix of a random stack.
        let g = CMatrix::from_fn(d * r, d, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let gram = g.adjoint().matmul(&g).unwrap();
        let inv_sqrt = gram.herm_eig().unwrap().reconstruct_with(|l| 1.0 / l.sqrt());
        let v = g.matmul(&inv_sqrt).unwrap();
        let kraus = (0..r)
            .map(|k| CMatrix::from_fn(d, d, |i, j| v[(k * d + i, j)]))
            .collect();
        channel_from_kraus(kraus).unwrap()
    }

    #[test]
    fn choi_invariants_and_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (d, r) in [(2, 1), (2, 3), (3, 2), (4, 4)] {
            let ch = random_channel(&mut rng, d, r);
            let eig = ch.choi().eigvalsh().unwrap();
            assert!(eig[0] > -1e-9);
            let red = linalg::partial_trace(ch.choi(), &[d, d], &[1]).unwrap();
            assert!(close(&red, &CMatrix::identity(d).scale_real(1.0 / d as f64), 1e-9));
            let rebuilt = channel_from_kraus(ch.kraus_from_choi().unwrap()).unwrap();
            let via_choi = QuantumChannel::from_choi(ch.choi().clone(), d).unwrap();
            let sup = ch.superoperator().unwrap();
            for i in 0..d {
                for j in 0..d {
                    let mut probe = CMatrix::zeros(d, d);
                    probe[(i, j)] = ONE;
                    let a = ch.apply_matrix(&probe).unwrap();
                    assert!(close(&a, &rebuilt.apply_matrix(&probe).unwrap(), 1e-8));
                    assert!(close(&a, &via_choi.apply_matrix(&probe).unwrap(), 1e-12));
                    let v = sup.mat_vec(probe.as_slice()).unwrap();
                    assert!(close(&a, &CMatrix::from_vec(d, d, v).unwrap(), 1e-12));
                }
            }
        }
    }

    #[test]
    fn tensor_channel_matches_kron_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = random_channel(&mut rng, 2, 2);
        let b = random_channel(&mut rng, 3, 2);
        let ab = tensor_channels(&[a.clone(), b.clone()]).unwrap();
        let ab_choi_only = QuantumChannel::from_choi(ab.choi().clone(), 6).unwrap();
        let (ra, rb) = (random_state(&mut rng, 2), random_state(&mut rng, 3));
        let joint = ra.tensor(&rb).unwrap();
        let expected = kron(
            &a.apply_matrix(ra.matrix()).unwrap(),
            &b.apply_matrix(rb.matrix()).unwrap(),
        )
        .unwrap();
        assert!(close(&ab.apply_matrix(joint.matrix()).unwrap(), &expected, 1e-12));
        assert!(close(&ab_choi_only.apply_matrix(joint.matrix()).unwrap(), &expected, 1e-12));
    }

    #[test]
    fn from_choi_rejects_non_tp() {
        let j = CMatrix::diag_real(&[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(QuantumChannel::from_choi(j, 2), Err(Error::NotCptp(_))));
    }
}
