//! Random quantum objects drawn from unitarily invariant measures.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{vec_inner, CMatrix, C64, ZERO};
use crate::qobjects::{Povm, QuantumChannel, QuantumState};

/// Complex standard normal with `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re * s, im * s)
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Orthonormalizes the columns of `a` in place by modified Gram-Schmidt
/// with one re-orthogonalization pass. The implied triangular factor has a
/// positive real diagonal, which fixes the phase gauge of the QR
/// decomposition.
fn orthonormalize_columns(a: &mut CMatrix) {
    let (n, m) = (a.rows(), a.cols());
    let mut cols: Vec<Vec<C64>> = (0..m).map(|j| a.column(j)).collect();
    for j in 0..m {
        for _pass in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let proj = vec_inner(&done[k], &rest[0]);
                for (x, q) in rest[0].iter_mut().zip(&done[k]) {
                    *x -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    for i in 0..n {
        for j in 0..m {
            a[(i, j)] = cols[j][i];
        }
    }
}

/// Haar-distributed `d x d` unitary.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let mut g = ginibre(d, d, rng);
    orthonormalize_columns(&mut g);
    g
}

/// Haar-distributed isometry `C^cols -> C^rows`.
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let mut g = ginibre(rows, cols, rng);
    orthonormalize_columns(&mut g);
    g
}

/// Uniformly random unit vector.
pub fn random_pure_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= norm;
    }
    v
}

pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> QuantumState {
    QuantumState::pure(&random_pure_vector(d, rng)).expect("nonzero vector")
}

/// Induced-measure mixed state `G G† / tr(G G†)` with `G` of size `d x rank`.
pub fn random_state<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> QuantumState {
    let g = ginibre(d, rank.max(1), rng);
    let p = g.matmul(&g.adjoint()).expect("shapes");
    let t = p.trace().re;
    QuantumState::new(p.scale_real(1.0 / t)).expect("valid by construction")
}

/// Random `n`-outcome POVM: `S^{-1/2} A_i S^{-1/2}` with Wishart `A_i`.
pub fn random_povm<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Povm {
    let parts: Vec<CMatrix> = (0..n)
        .map(|_| {
            let g = ginibre(d, d, rng);
            g.matmul(&g.adjoint()).expect("shapes")
        })
        .collect();
    let mut sum = CMatrix::zeros(d, d);
    for p in &parts {
        sum.add_scaled(p, C64::new(1.0, 0.0)).expect("shapes");
    }
    let inv_sqrt = sum
        .herm_eig()
        .expect("Hermitian")
        .reconstruct_with(|l| 1.0 / l.sqrt());
    let effects = parts
        .iter()
        .map(|p| inv_sqrt.conjugate(p).expect("shapes"))
        .collect();
    Povm::new(effects).expect("valid by construction")
}

/// Random channel with `kraus_rank` Kraus operators cut from a Haar isometry.
pub fn random_channel<R: Rng + ?Sized>(d: usize, kraus_rank: usize, rng: &mut R) -> QuantumChannel {
    let r = kraus_rank.max(1);
    let v = haar_isometry(d * r, d, rng);
    let kraus = (0..r)
        .map(|k| CMatrix::from_fn(d, d, |i, j| v[(k * d + i, j)]))
        .collect();
    QuantumChannel::from_kraus(kraus).expect("isometry gives CPTP")
}

/// Random convex weights of length `n`.
pub fn random_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0) + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// `|0...0>` of dimension `d`.
pub fn zero_vector(d: usize) -> Vec<C64> {
    let mut v = alloc::vec![ZERO; d];
    v[0] = C64::new(1.0, 0.0);
    v
}
