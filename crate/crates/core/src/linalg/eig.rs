//! Hermitian eigensolver: Householder reduction to a complex Hermitian
//! tridiagonal form, a diagonal phase change that makes it real symmetric,
//! then implicit QL iterations with Wilkinson-style shifts.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{CMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

const MAX_QL_ITERATIONS: usize = 64;

/// Eigendecomposition `A = Q diag(values) Q†`, eigenvalues ascending,
/// eigenvectors in the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermEig {
    /// `Q diag(f(λ)) Q†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let q = &self.vectors;
        let weights: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        CMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| q[(i, k)] * q[(j, k)].conj() * weights[k])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.reconstruct_with(|l| l)
    }
}

struct Tridiagonal {
    diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`; the last entry is zero.
    off: Vec<f64>,
    /// Unitary taking the real tridiagonal form back to the input basis.
    basis: Option<Vec<C64>>,
}

/// Reduces a Hermitian matrix (assumed exactly Hermitian) to real symmetric
/// tridiagonal form.
fn tridiagonalize(a: &CMatrix, want_basis: bool) -> Tridiagonal {
    let n = a.rows();
    let mut m: Vec<C64> = a.as_slice().to_vec();
    let mut q = if want_basis {
        let mut q = vec![ZERO; n * n];
        for i in 0..n {
            q[i * n + i] = ONE;
        }
        Some(q)
    } else {
        None
    };

    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x0 = m[(k + 1) * n + k];
        let xnorm = (k + 1..n).map(|i| m[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        let tail = (k + 2..n).map(|i| m[i * n + k].norm_sqr()).sum::<f64>();
        if xnorm == 0.0 || tail == 0.0 {
            continue;
        }
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * xnorm;
        let v = &mut v[..len];
        for (t, i) in (k + 1..n).enumerate() {
            v[t] = m[i * n + k];
        }
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;

        // Two-sided update of the trailing block B <- H B H, H = I - tau v v†.
        let p = &mut p[..len];
        for (r, pr) in p.iter_mut().enumerate() {
            let row = &m[(k + 1 + r) * n + k + 1..(k + 1 + r) * n + n];
            *pr = row.iter().zip(v.iter()).map(|(b, x)| b * x).sum::<C64>() * tau;
        }
        let kk = v.iter().zip(p.iter()).map(|(x, y)| x.conj() * y).sum::<C64>().re * tau * 0.5;
        for (pr, vr) in p.iter_mut().zip(v.iter()) {
            *pr -= vr * kk;
        }
        for r in 0..len {
            let (vr, wr) = (v[r], p[r]);
            let row = &mut m[(k + 1 + r) * n + k + 1..(k + 1 + r) * n + n];
            for (c, b) in row.iter_mut().enumerate() {
                *b -= vr * p[c].conj() + wr * v[c].conj();
            }
        }
        m[(k + 1) * n + k] = alpha;
        m[k * n + k + 1] = alpha.conj();
        for i in k + 2..n {
            m[i * n + k] = ZERO;
            m[k * n + i] = ZERO;
        }

        if let Some(q) = q.as_mut() {
            // Q <- Q H on columns k+1..n.
            for r in 0..n {
                let row = &mut q[r * n + k + 1..r * n + n];
                let s = row.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<C64>() * tau;
                for (e, x) in row.iter_mut().zip(v.iter()) {
                    *e -= s * x.conj();
                }
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| m[i * n + i].re).collect();
    let mut off = vec![0.0; n];
    let mut phase = ONE;
    let mut phases = vec![ONE; n];
    for i in 0..n.saturating_sub(1) {
        let e = m[(i + 1) * n + i];
        let mag = e.norm();
        off[i] = mag;
        if mag > 0.0 {
            phase *= e / mag;
        }
        phases[i + 1] = phase;
    }
    if let Some(q) = q.as_mut() {
        for r in 0..n {
            for (c, ph) in phases.iter().enumerate() {
                q[r * n + c] *= ph;
            }
        }
    }
    Tridiagonal { diag, off, basis: q }
}

/// Implicit QL on a real symmetric tridiagonal matrix. When `z` is given it
/// accumulates the rotations (row-major `n x n`).
fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::NoConvergence);
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        for k in 0..n {
                            let zk = &mut z[k * n..k * n + n];
                            let h = zk[i + 1];
                            zk[i + 1] = s * zk[i] + c * h;
                            zk[i] = c * zk[i] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if !(e[l].abs() > eps * tst1) {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    if d.iter().any(|x| !x.is_finite()) {
        return Err(Error::NoConvergence);
    }
    Ok(())
}

pub(super) fn eigvalsh(a: &CMatrix) -> Result<Vec<f64>> {
    let mut t = tridiagonalize(a, false);
    tql2(&mut t.diag, &mut t.off, None)?;
    t.diag.sort_by(|x, y| x.total_cmp(y));
    Ok(t.diag)
}

pub(super) fn herm_eig(a: &CMatrix) -> Result<HermEig> {
    let n = a.rows();
    let mut t = tridiagonalize(a, true);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tql2(&mut t.diag, &mut t.off, Some(&mut z))?;
    let q = t.basis.expect("basis requested");

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| t.diag[i].total_cmp(&t.diag[j]));
    let values: Vec<f64> = order.iter().map(|&i| t.diag[i]).collect();

    // vectors = Q * Z, columns permuted into ascending order.
    let mut vectors = CMatrix::zeros(n, n);
    for r in 0..n {
        let qrow = &q[r * n..r * n + n];
        for (c, &src) in order.iter().enumerate() {
            let mut acc = ZERO;
            for (k, qk) in qrow.iter().enumerate() {
                acc += qk * z[k * n + src];
            }
            vectors[(r, c)] = acc;
        }
    }
    Ok(HermEig { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hs_norm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let a = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        a.add(&a.adjoint()).unwrap().scale_real(0.5)
    }

    fn check(a: &CMatrix) {
        let n = a.rows();
        let eig = a.herm_eig().unwrap();
        for w in eig.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
        let err = hs_norm(&a.sub(&eig.reconstruct()).unwrap());
        assert!(err <= 1e-9 * hs_norm(a).max(1.0), "reconstruction error {err}");
        let gram = eig.vectors.adjoint().matmul(&eig.vectors).unwrap();
        let ortho = gram.sub(&CMatrix::identity(n)).unwrap().max_abs();
        assert!(ortho <= 1e-10, "orthonormality defect {ortho}");
        let vals = a.eigvalsh().unwrap();
        for (x, y) in vals.iter().zip(&eig.values) {
            assert!((x - y).abs() <= 1e-10 * hs_norm(a).max(1.0));
        }
    }

    #[test]
    fn random_hermitian_decompositions() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in [1, 2, 3, 4, 5, 8, 13, 32, 64] {
            check(&random_hermitian(&mut rng, n));
        }
    }

    #[test]
    fn degenerate_and_structured_inputs() {
        check(&CMatrix::identity(6));
        check(&CMatrix::zeros(5, 5));
        check(&CMatrix::diag_real(&[3.0, -1.0, 3.0, 0.0, 2.0]));
        // Rank-one projector with repeated zero eigenvalue.
        let v: Vec<C64> = (0..7).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect();
        check(&CMatrix::outer(&v));
        // Already tridiagonal with complex couplings.
        let mut t = CMatrix::diag_real(&[1.0, 2.0, 3.0, 4.0]);
        for i in 0..3 {
            t[(i + 1, i)] = C64::new(0.5, -0.25 * i as f64);
            t[(i, i + 1)] = t[(i + 1, i)].conj();
        }
        check(&t);
    }

    #[test]
    fn pauli_spectra() {
        let y = CMatrix::from_vec(
            2,
            2,
            vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO],
        )
        .unwrap();
        let vals = y.eigvalsh().unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-15 && (vals[1] - 1.0).abs() < 1e-15);
    }
}
