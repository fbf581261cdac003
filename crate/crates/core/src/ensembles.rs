//! Seeded random-circuit ensembles and frame-potential diagnostics.
//!
//! Every draw is a pure function of `(seed, stream, index)`: the generator
//! for one draw is a ChaCha8 stream keyed by those three numbers, so draws
//! can be produced in any order or on any worker.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ONE, ZERO};
use crate::noise::pauli_rotation;
use crate::qobjects::{is_unitary, Axis, COMPLETENESS_TOL};
use crate::random::haar_unitary;

const PI: f64 = core::f64::consts::PI;
const SAMPLE_DOMAIN: u64 = 0x7161_6364_2d65_6e73;
const SAT_DOMAIN: u64 = 0x7161_6364_2d73_6174;

/// Generator for draw `index` of `stream` under `seed`.
pub fn draw_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    keyed_rng(seed, stream, index, SAMPLE_DOMAIN)
}

fn keyed_rng(seed: u64, stream: u64, index: u64, domain: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    key[24..].copy_from_slice(&domain.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// `⌊1.5 N⌋`, the layer count used for the qaoa and vqe ensembles.
pub fn default_layers(n_qubits: usize) -> usize {
    3 * n_qubits / 2
}

/// Gate acting on an `n`-qubit register, qubit 0 most significant.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    /// Row-major 2x2 unitary.
    Single { qubit: usize, m: [C64; 4] },
    /// Row-major 4x4 unitary on `(qubit, qubit + 1)`, `qubit` more
    /// significant.
    Pair { qubit: usize, m: Vec<C64> },
    Cx { control: usize, target: usize },
    /// `diag(e^{−iθ E_x})` for a diagonal Hamiltonian with energies `E`.
    DiagonalPhase { theta: f64, energies: alloc::sync::Arc<[f64]> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    fn stride(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    /// Applies the gates in order to `psi` in place.
    pub fn apply_in_place(&self, psi: &mut [C64]) {
        let d = psi.len();
        for gate in &self.gates {
            match gate {
                Gate::Single { qubit, m } => {
                    let s = self.stride(*qubit);
                    for i in (0..d).filter(|i| i & s == 0) {
                        let (a, b) = (psi[i], psi[i + s]);
                        psi[i] = m[0] * a + m[1] * b;
                        psi[i + s] = m[2] * a + m[3] * b;
                    }
                }
                Gate::Pair { qubit, m } => {
                    let (s0, s1) = (self.stride(*qubit), self.stride(qubit + 1));
                    for i in (0..d).filter(|i| i & (s0 | s1) == 0) {
                        let idx = [i, i + s1, i + s0, i + s0 + s1];
                        let v = idx.map(|k| psi[k]);
                        for (r, &k) in idx.iter().enumerate() {
                            psi[k] = (0..4).map(|c| m[r * 4 + c] * v[c]).sum();
                        }
                    }
                }
                Gate::Cx { control, target } => {
                    let (sc, st) = (self.stride(*control), self.stride(*target));
                    for i in (0..d).filter(|i| i & sc != 0 && i & st == 0) {
                        psi.swap(i, i + st);
                    }
                }
                Gate::DiagonalPhase { theta, energies } => {
                    for (z, e) in psi.iter_mut().zip(energies.iter()) {
                        let (s, c) = (-theta * e).sin_cos();
                        *z *= C64::new(c, s);
                    }
                }
            }
        }
    }

    pub fn to_matrix(&self) -> CMatrix {
        let d = self.dim();
        let mut out = CMatrix::zeros(d, d);
        let mut col = vec![ZERO; d];
        for j in 0..d {
            col.iter_mut().for_each(|z| *z = ZERO);
            col[j] = ONE;
            self.apply_in_place(&mut col);
            for (i, z) in col.iter().enumerate() {
                out[(i, j)] = *z;
            }
        }
        out
    }
}

fn single(qubit: usize, u: &CMatrix) -> Gate {
    Gate::Single {
        qubit,
        m: [u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]],
    }
}

/// A drawn unitary, stored densely or as a gate list.
#[derive(Clone, Debug, PartialEq)]
pub enum SampledUnitary {
    Dense(CMatrix),
    Circuit(Circuit),
}

impl SampledUnitary {
    pub fn dim(&self) -> usize {
        match self {
            SampledUnitary::Dense(u) => u.rows(),
            SampledUnitary::Circuit(c) => c.dim(),
        }
    }

    pub fn apply_in_place(&self, psi: &mut [C64]) {
        match self {
            SampledUnitary::Dense(u) => {
                let out = u.mat_vec(psi).expect("dimension checked by caller");
                psi.copy_from_slice(&out);
            }
            SampledUnitary::Circuit(c) => c.apply_in_place(psi),
        }
    }

    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let mut out = psi.to_vec();
        self.apply_in_place(&mut out);
        out
    }

    pub fn to_matrix(&self) -> CMatrix {
        match self {
            SampledUnitary::Dense(u) => u.clone(),
            SampledUnitary::Circuit(c) => c.to_matrix(),
        }
    }

    /// `U X U†`.
    pub fn conjugate(&self, x: &CMatrix) -> Result<CMatrix> {
        match self {
            SampledUnitary::Dense(u) => u.conjugate(x),
            SampledUnitary::Circuit(_) => self.to_matrix().conjugate(x),
        }
    }
}

/// Haar unitary for draw `index` under `seed`.
pub fn sample_haar(d: usize, seed: u64, index: u64) -> CMatrix {
    haar_unitary(d, &mut draw_rng(seed, 0, index))
}

fn brickwork_from_rng<R: Rng + ?Sized>(n: usize, depth: usize, rng: &mut R) -> Circuit {
    let mut c = Circuit::new(n);
    for layer in 0..depth {
        let mut q = layer % 2;
        while q + 1 < n {
            c.push(Gate::Pair {
                qubit: q,
                m: haar_unitary(4, rng).into_vec(),
            });
            q += 2;
        }
    }
    c
}

/// `depth` alternating even/odd layers of Haar two-qubit gates.
pub fn sample_brickwork(n: usize, depth: usize, seed: u64, index: u64) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::Domain("brickwork circuits need at least two qubits".into()));
    }
    Ok(brickwork_from_rng(n, depth, &mut draw_rng(seed, 0, index)))
}

/// One clause `(l_a ∨ l_b)`; a literal is `(variable, negated)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Clause {
    pub a: (usize, bool),
    pub b: (usize, bool),
}

/// Random MAX-2-SAT instance with `3N` clauses over distinct variable
/// pairs (a single variable when `N = 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct Max2Sat {
    n: usize,
    clauses: Vec<Clause>,
    energies: alloc::sync::Arc<[f64]>,
}

impl Max2Sat {
    pub fn random(n: usize, sat_seed: u64) -> Self {
        let mut rng = keyed_rng(sat_seed, n as u64, 0, SAT_DOMAIN);
        let clauses = (0..3 * n)
            .map(|_| {
                let x = rng.random_range(0..n);
                let y = if n > 1 {
                    let y = rng.random_range(0..n - 1);
                    if y >= x { y + 1 } else { y }
                } else {
                    x
                };
                Clause {
                    a: (x, rng.random()),
                    b: (y, rng.random()),
                }
            })
            .collect();
        Self::from_clauses(n, clauses).expect("variables in range")
    }

    pub fn from_clauses(n: usize, clauses: Vec<Clause>) -> Result<Self> {
        if clauses.iter().any(|c| c.a.0 >= n || c.b.0 >= n) {
            return Err(Error::Domain("clause variable out of range".into()));
        }
        let energies: Vec<f64> = (0..1usize << n)
            .map(|z| {
                let val = |(v, neg): (usize, bool)| ((z >> (n - 1 - v)) & 1 == 1) != neg;
                clauses.iter().filter(|c| !val(c.a) && !val(c.b)).count() as f64
            })
            .collect();
        Ok(Max2Sat {
            n,
            clauses,
            energies: energies.into(),
        })
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Number of violated clauses for every basis state.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }
}

fn uniform_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(-PI..=PI)
}

/// QAOA-like circuit: per layer the diagonal phase `e^{−iβ_j H}` followed by
/// mixer rotations `e^{−iα_{j,k} X}` on every qubit. Angles are
/// `(β_j, α_{j,0..N})` per layer.
pub fn qaoa_circuit(instance: &Max2Sat, betas: &[f64], alphas: &[Vec<f64>]) -> Result<Circuit> {
    if betas.len() != alphas.len() {
        return Err(Error::Shape("one β per layer required".into()));
    }
    let n = instance.n;
    let mut c = Circuit::new(n);
    for (beta, layer) in betas.iter().zip(alphas) {
        if layer.len() != n {
            return Err(Error::Shape(format!("{} mixer angles for {} qubits", layer.len(), n)));
        }
        c.push(Gate::DiagonalPhase {
            theta: *beta,
            energies: instance.energies.clone(),
        });
        for (k, a) in layer.iter().enumerate() {
            c.push(single(k, &pauli_rotation(Axis::X, *a)));
        }
    }
    Ok(c)
}

fn qaoa_from_rng<R: Rng + ?Sized>(instance: &Max2Sat, layers: usize, rng: &mut R) -> Circuit {
    let mut betas = Vec::with_capacity(layers);
    let mut alphas = Vec::with_capacity(layers);
    for _ in 0..layers {
        betas.push(uniform_angle(rng));
        alphas.push((0..instance.n).map(|_| uniform_angle(rng)).collect());
    }
    qaoa_circuit(instance, &betas, &alphas).expect("shapes by construction")
}

pub fn sample_qaoa(n: usize, layers: usize, sat_seed: u64, param_seed: u64, index: u64) -> Circuit {
    let instance = Max2Sat::random(n, sat_seed);
    qaoa_from_rng(&instance, layers, &mut draw_rng(param_seed, 0, index))
}

/// Rotation block of the VQE-like ansatz.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ansatz {
    /// `e^{−iα Y}` per qubit, one angle.
    VqeY,
    /// `e^{−iα_z Z} e^{−iα_y Y}` per qubit, angles listed as `(z, y)`.
    VqeZy,
}

impl Ansatz {
    pub fn angles_per_qubit(self) -> usize {
        match self {
            Ansatz::VqeY => 1,
            Ansatz::VqeZy => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Ansatz::VqeY => "vqe-y",
            Ansatz::VqeZy => "vqe-zy",
        }
    }
}

impl core::str::FromStr for Ansatz {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "vqe-y" => Ok(Ansatz::VqeY),
            "vqe-zy" => Ok(Ansatz::VqeZy),
            other => Err(Error::Parse(format!("unknown ansatz {other:?}"))),
        }
    }
}

/// VQE-like circuit: per layer the CX chain `CX_{0,1}, …, CX_{N−2,N−1}`
/// followed by the rotation block. `angles` are layer-major, qubit-minor.
pub fn vqe_circuit(n: usize, layers: usize, ansatz: Ansatz, angles: &[f64]) -> Result<Circuit> {
    let per = ansatz.angles_per_qubit();
    if angles.len() != layers * n * per {
        return Err(Error::Shape(format!(
            "{} angles for {} layers of {} qubits ({})",
            angles.len(),
            layers,
            n,
            ansatz.name()
        )));
    }
    let mut c = Circuit::new(n);
    for layer in angles.chunks(n * per) {
        for k in 0..n.saturating_sub(1) {
            c.push(Gate::Cx {
                control: k,
                target: k + 1,
            });
        }
        for (k, a) in layer.chunks(per).enumerate() {
            match ansatz {
                Ansatz::VqeY => c.push(single(k, &pauli_rotation(Axis::Y, a[0]))),
                Ansatz::VqeZy => {
                    c.push(single(k, &pauli_rotation(Axis::Y, a[1])));
                    c.push(single(k, &pauli_rotation(Axis::Z, a[0])));
                }
            }
        }
    }
    Ok(c)
}

fn vqe_from_rng<R: Rng + ?Sized>(n: usize, layers: usize, rng: &mut R) -> Circuit {
    let angles: Vec<f64> = (0..2 * n * layers).map(|_| uniform_angle(rng)).collect();
    vqe_circuit(n, layers, Ansatz::VqeZy, &angles).expect("shapes by construction")
}

pub fn sample_vqe(n: usize, layers: usize, seed: u64, index: u64) -> Circuit {
    vqe_from_rng(n, layers, &mut draw_rng(seed, 0, index))
}

/// Angle table for a fixed set of VQE-shape circuits.
#[derive(Clone, Debug, PartialEq)]
pub struct ExternalParams {
    pub n_qubits: usize,
    pub layers: usize,
    pub ansatz: Ansatz,
    pub rows: Vec<Vec<f64>>,
}

impl ExternalParams {
    pub fn new(n_qubits: usize, layers: usize, ansatz: Ansatz, rows: Vec<Vec<f64>>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Domain("zero qubits".into()));
        }
        if rows.is_empty() {
            return Err(Error::Domain("no circuits in parameter table".into()));
        }
        let want = n_qubits * layers * ansatz.angles_per_qubit();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != want {
                return Err(Error::Shape(format!(
                    "row {}: {} angles, expected {}",
                    i + 1,
                    r.len(),
                    want
                )));
            }
            if r.iter().any(|x| !x.is_finite()) {
                return Err(Error::Domain(format!("row {}: non-finite angle", i + 1)));
            }
        }
        Ok(ExternalParams {
            n_qubits,
            layers,
            ansatz,
            rows,
        })
    }

    pub fn circuits(&self) -> Vec<Circuit> {
        self.rows
            .iter()
            .map(|r| vqe_circuit(self.n_qubits, self.layers, self.ansatz, r).expect("validated"))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub enum EnsembleKind {
    Haar,
    Brickwork { depth: usize },
    Qaoa { layers: usize, instance: Max2Sat },
    Vqe { layers: usize },
    Discrete { elements: Vec<(f64, SampledUnitary)> },
    External { params: ExternalParams, elements: Vec<(f64, SampledUnitary)> },
}

/// Reference input state of an ensemble's circuits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceState {
    /// `|0…0>`.
    Zero,
    /// `|+…+>`.
    Plus,
}

/// Distribution over unitaries on `N` qubits (or dimension `d` for
/// discrete ensembles).
#[derive(Clone, Debug)]
pub struct CircuitEnsemble {
    dim: usize,
    seed: u64,
    kind: EnsembleKind,
}

impl CircuitEnsemble {
    pub fn haar_dim(dim: usize, seed: u64) -> Self {
        CircuitEnsemble {
            dim,
            seed,
            kind: EnsembleKind::Haar,
        }
    }

    pub fn haar(n_qubits: usize, seed: u64) -> Self {
        Self::haar_dim(1 << n_qubits, seed)
    }

    pub fn brickwork(n_qubits: usize, depth: usize, seed: u64) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::Domain("brickwork circuits need at least two qubits".into()));
        }
        Ok(CircuitEnsemble {
            dim: 1 << n_qubits,
            seed,
            kind: EnsembleKind::Brickwork { depth },
        })
    }

    pub fn qaoa(n_qubits: usize, layers: usize, sat_seed: u64, param_seed: u64) -> Self {
        CircuitEnsemble {
            dim: 1 << n_qubits,
            seed: param_seed,
            kind: EnsembleKind::Qaoa {
                layers,
                instance: Max2Sat::random(n_qubits, sat_seed),
            },
        }
    }

    pub fn vqe(n_qubits: usize, layers: usize, seed: u64) -> Self {
        CircuitEnsemble {
            dim: 1 << n_qubits,
            seed,
            kind: EnsembleKind::Vqe { layers },
        }
    }

    /// Weighted list of unitaries; weights must form a distribution.
    pub fn discrete(elements: Vec<(f64, CMatrix)>, seed: u64) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::Domain("empty discrete ensemble".into()))?;
        let dim = first.1.rows();
        let mut total = 0.0;
        for (i, (w, u)) in elements.iter().enumerate() {
            if !(*w >= 0.0) {
                return Err(Error::Domain(format!("element {i}: negative weight {w}")));
            }
            if u.rows() != dim || !is_unitary(u, 1e-9) {
                return Err(Error::Domain(format!("element {i} is not a {dim}x{dim} unitary")));
            }
            total += w;
        }
        if (total - 1.0).abs() > COMPLETENESS_TOL {
            return Err(Error::Inconsistent { total });
        }
        Ok(CircuitEnsemble {
            dim,
            seed,
            kind: EnsembleKind::Discrete {
                elements: elements
                    .into_iter()
                    .map(|(w, u)| (w, SampledUnitary::Dense(u)))
                    .collect(),
            },
        })
    }

    /// Uniform ensemble over the circuits of an angle table.
    pub fn external(params: ExternalParams, seed: u64) -> Self {
        let circuits = params.circuits();
        let w = 1.0 / circuits.len() as f64;
        let elements = circuits
            .into_iter()
            .map(|c| (w, SampledUnitary::Circuit(c)))
            .collect();
        CircuitEnsemble {
            dim: 1 << params.n_qubits,
            seed,
            kind: EnsembleKind::External { params, elements },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn kind(&self) -> &EnsembleKind {
        &self.kind
    }

    /// Same distribution, different parameter seed. Fixed structure such
    /// as a MAX-2-SAT instance is kept.
    pub fn with_seed(&self, seed: u64) -> Self {
        CircuitEnsemble {
            seed,
            ..self.clone()
        }
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            EnsembleKind::Haar => "haar",
            EnsembleKind::Brickwork { .. } => "brickwork",
            EnsembleKind::Qaoa { .. } => "qaoa",
            EnsembleKind::Vqe { .. } => "vqe",
            EnsembleKind::Discrete { .. } => "discrete",
            EnsembleKind::External { .. } => "external",
        }
    }

    pub fn reference(&self) -> ReferenceState {
        match self.kind {
            EnsembleKind::Qaoa { .. } => ReferenceState::Plus,
            _ => ReferenceState::Zero,
        }
    }

    pub fn reference_vector(&self) -> Vec<C64> {
        match self.reference() {
            ReferenceState::Zero => crate::random::zero_vector(self.dim),
            ReferenceState::Plus => {
                vec![C64::new(1.0 / (self.dim as f64).sqrt(), 0.0); self.dim]
            }
        }
    }

    /// Weighted elements of a discrete or external ensemble.
    pub fn elements(&self) -> Option<&[(f64, SampledUnitary)]> {
        match &self.kind {
            EnsembleKind::Discrete { elements } | EnsembleKind::External { elements, .. } => {
                Some(elements)
            }
            _ => None,
        }
    }

    /// Draw `index` of `stream`; identical arguments give identical
    /// unitaries.
    pub fn sample(&self, stream: u64, index: u64) -> SampledUnitary {
        let mut rng = draw_rng(self.seed, stream, index);
        let n = self.dim.trailing_zeros() as usize;
        match &self.kind {
            EnsembleKind::Haar => SampledUnitary::Dense(haar_unitary(self.dim, &mut rng)),
            EnsembleKind::Brickwork { depth } => {
                SampledUnitary::Circuit(brickwork_from_rng(n, *depth, &mut rng))
            }
            EnsembleKind::Qaoa { layers, instance } => {
                SampledUnitary::Circuit(qaoa_from_rng(instance, *layers, &mut rng))
            }
            EnsembleKind::Vqe { layers } => SampledUnitary::Circuit(vqe_from_rng(n, *layers, &mut rng)),
            EnsembleKind::Discrete { elements } | EnsembleKind::External { elements, .. } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (w, e) in elements {
                    acc += w;
                    if u < acc {
                        return e.clone();
                    }
                }
                elements.last().expect("nonempty").1.clone()
            }
        }
    }
}

/// Monte-Carlo frame potential `E |tr(U†V)|^{2k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FramePotentialEstimate {
    pub k: u32,
    pub estimate: f64,
    pub standard_error: f64,
    pub pairs: usize,
}

impl FramePotentialEstimate {
    /// Aggregates per-pair values in index order.
    pub fn from_values(k: u32, values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::Domain("frame potential needs at least two pairs".into()));
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Ok(FramePotentialEstimate {
            k,
            estimate: mean,
            standard_error: (var / n as f64).sqrt(),
            pairs: n,
        })
    }
}

/// `k!`, the Haar frame potential for `d ≥ k`.
pub fn haar_frame_potential(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// `|tr(U†V)|^{2k}` for pair `index`, with `U` and `V` from streams 0 and 1.
pub fn frame_potential_pair(ensemble: &CircuitEnsemble, k: u32, index: u64) -> f64 {
    let u = ensemble.sample(0, index).to_matrix();
    let v = ensemble.sample(1, index).to_matrix();
    let d = u.rows();
    let mut tr = ZERO;
    for i in 0..d {
        for j in 0..d {
            tr += u[(i, j)].conj() * v[(i, j)];
        }
    }
    tr.norm_sqr().powi(k as i32)
}

/// Sequential estimator over `pairs` independent pairs drawn under `seed`.
pub fn frame_potential(ensemble: &CircuitEnsemble, k: u32, pairs: usize, seed: u64) -> Result<FramePotentialEstimate> {
    if k == 0 {
        return Err(Error::Domain("frame potential order must be positive".into()));
    }
    if pairs < 2 {
        return Err(Error::Domain("frame potential needs at least two pairs".into()));
    }
    let ens = ensemble.with_seed(seed);
    let values: Vec<f64> = (0..pairs as u64).map(|i| frame_potential_pair(&ens, k, i)).collect();
    FramePotentialEstimate::from_values(k, &values)
}

/// Human-readable ensemble description.
pub fn describe(ensemble: &CircuitEnsemble) -> String {
    let n = ensemble.dim().trailing_zeros();
    match ensemble.kind() {
        EnsembleKind::Haar => format!("haar d={}", ensemble.dim()),
        EnsembleKind::Brickwork { depth } => format!("brickwork N={n} depth={depth}"),
        EnsembleKind::Qaoa { layers, .. } => format!("qaoa N={n} layers={layers}"),
        EnsembleKind::Vqe { layers } => format!("vqe N={n} layers={layers}"),
        EnsembleKind::Discrete { elements } => format!("discrete d={} J={}", ensemble.dim(), elements.len()),
        EnsembleKind::External { params, .. } => format!(
            "external {} N={} layers={} J={}",
            params.ansatz.name(),
            params.n_qubits,
            params.layers,
            params.rows.len()
        ),
    }
}
