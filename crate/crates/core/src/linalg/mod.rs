//! Dense complex matrices and the handful of spectral quantities the
//! distance formulas need.
//!
//! Storage is row-major. Every routine is a pure function of its inputs.

mod eig;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub use eig::HermEig;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Largest row (or column) count `kron` will produce unless told otherwise.
pub const DEFAULT_KRON_CAP: usize = 1 << 16;

/// Absolute tolerance on `max |A - A†|` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in entries.iter().enumerate() {
            m.data[i * n + i] = x;
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in entries.iter().enumerate() {
            m.data[i * n + i] = C64::new(x, 0.0);
        }
        m
    }

    /// `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &Self, s: C64) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, m, p) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * p];
        for i in 0..n {
            let out_row = &mut out[i * p..(i + 1) * p];
            for k in 0..m {
                let a = self.data[i * m + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * p..(k + 1) * p];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(CMatrix {
            rows: n,
            cols: p,
            data: out,
        })
    }

    pub fn mat_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `A X A†`.
    pub fn conjugate(&self, x: &Self) -> Result<Self> {
        self.matmul(x)?.matmul(&self.adjoint())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols))
            .map(|i| self.data[i * self.cols + i])
            .sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols))
            .map(|i| self.data[i * self.cols + i])
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.data
            .iter()
            .enumerate()
            .all(|(k, z)| k / self.cols == k % self.cols || *z == ZERO)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `max |A - A†|`; infinite for non-square input.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Checks Hermiticity within [`HERMITIAN_TOL`] (relative to the largest
    /// entry when that exceeds one) and returns the symmetrized `(A + A†)/2`.
    pub fn hermitized(&self) -> Result<Self> {
        let tol = HERMITIAN_TOL * self.max_abs().max(1.0);
        let defect = self.hermitian_defect();
        if defect > tol {
            return Err(Error::NotHermitian { defect, tol });
        }
        let n = self.rows;
        Ok(Self::from_fn(n, n, |i, j| {
            (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5
        }))
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        kron_with_cap(self, other, DEFAULT_KRON_CAP)
    }

    pub fn hs_norm(&self) -> f64 {
        hs_norm(self)
    }

    pub fn herm_eig(&self) -> Result<HermEig> {
        eig::herm_eig(&self.hermitized()?)
    }

    /// Ascending eigenvalues of a Hermitian matrix.
    pub fn eigvalsh(&self) -> Result<Vec<f64>> {
        eig::eigvalsh(&self.hermitized()?)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker product with the default size cap.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    kron_with_cap(a, b, DEFAULT_KRON_CAP)
}

/// `out[(i*rB + k), (j*cB + l)] = A[i,j] * B[k,l]`, refusing any output axis
/// longer than `cap`.
pub fn kron_with_cap(a: &CMatrix, b: &CMatrix, cap: usize) -> Result<CMatrix> {
    let rows = a.rows.saturating_mul(b.rows);
    let cols = a.cols.saturating_mul(b.cols);
    let requested = rows.max(cols);
    if requested > cap {
        return Err(Error::Size { requested, cap });
    }
    let mut out = CMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a.data[i * a.cols + j];
            if x == ZERO {
                continue;
            }
            for k in 0..b.rows {
                let dst = (i * b.rows + k) * cols + j * b.cols;
                let src = &b.data[k * b.cols..(k + 1) * b.cols];
                for (o, y) in out.data[dst..dst + b.cols].iter_mut().zip(src) {
                    *o = x * y;
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of a list, first factor most significant.
pub fn kron_all(factors: &[CMatrix]) -> Result<CMatrix> {
    let mut iter = factors.iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::Shape("empty Kronecker product".into()))?;
    iter.try_fold(first.clone(), |acc, f| kron(&acc, f))
}

/// Kronecker product of state vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Reduced operator on the factors listed in `keep` (in ascending factor
/// order), tracing out the rest.
pub fn partial_trace(a: &CMatrix, local_dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::Shape(format!("{}x{} is not square", a.rows, a.cols)));
    }
    let total: usize = local_dims.iter().product();
    if total != a.rows || local_dims.contains(&0) {
        return Err(Error::Shape(format!(
            "local dimensions {:?} do not multiply to {}",
            local_dims, a.rows
        )));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= local_dims.len()) {
        return Err(Error::Shape(format!("factor {} out of range", bad)));
    }
    let mut kept = vec![false; local_dims.len()];
    for &k in keep {
        kept[k] = true;
    }
    let kept_dim: usize = local_dims
        .iter()
        .zip(&kept)
        .filter(|(_, &k)| k)
        .map(|(d, _)| d)
        .product();
    let traced_dim = total / kept_dim;

    // Split each basis index into its kept and traced parts.
    let mut kept_of = vec![0usize; total];
    let mut traced_of = vec![0usize; total];
    for (idx, (ko, to)) in kept_of.iter_mut().zip(traced_of.iter_mut()).enumerate() {
        let mut rem = idx;
        let (mut k_idx, mut k_stride, mut t_idx, mut t_stride) = (0, 1, 0, 1);
        for (f, &d) in local_dims.iter().enumerate().rev() {
            let digit = rem % d;
            rem /= d;
            if kept[f] {
                k_idx += digit * k_stride;
                k_stride *= d;
            } else {
                t_idx += digit * t_stride;
                t_stride *= d;
            }
        }
        *ko = k_idx;
        *to = t_idx;
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::with_capacity(kept_dim); traced_dim];
    for idx in 0..total {
        groups[traced_of[idx]].push(idx);
    }
    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    for group in &groups {
        for &r in group {
            for &c in group {
                out[(kept_of[r], kept_of[c])] += a[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Reorders tensor factors: output factor `k` is input factor `perm[k]`.
pub fn permute_subsystems(a: &CMatrix, local_dims: &[usize], perm: &[usize]) -> Result<CMatrix> {
    let total: usize = local_dims.iter().product();
    if !a.is_square() || total != a.rows || perm.len() != local_dims.len() {
        return Err(Error::Shape("subsystem permutation does not fit matrix".into()));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| local_dims[p]).collect();
    // map[new_index] = old_index
    let mut map = vec![0usize; total];
    let mut digits = vec![0usize; local_dims.len()];
    for (new_idx, slot) in map.iter_mut().enumerate() {
        let mut rem = new_idx;
        for k in (0..new_dims.len()).rev() {
            digits[perm[k]] = rem % new_dims[k];
            rem /= new_dims[k];
        }
        let mut old = 0;
        for (f, &d) in local_dims.iter().enumerate() {
            old = old * d + digits[f];
        }
        *slot = old;
    }
    Ok(CMatrix::from_fn(total, total, |i, j| a[(map[i], map[j])]))
}

pub fn hs_norm(a: &CMatrix) -> f64 {
    a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `tr(A† B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<C64> {
    a.check_same_shape(b)?;
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_herm(a: &CMatrix) -> Result<f64> {
    if a.data.iter().all(|z| *z == ZERO) {
        return Ok(0.0);
    }
    Ok(a.eigvalsh()?.iter().map(|l| l.abs()).sum())
}

/// Largest absolute eigenvalue of a Hermitian matrix.
pub fn op_norm_inf(a: &CMatrix) -> Result<f64> {
    if a.data.iter().all(|z| *z == ZERO) {
        return Ok(0.0);
    }
    Ok(a.eigvalsh()?.iter().fold(0.0, |m, l| m.max(l.abs())))
}

/// Largest (signed) eigenvalue of a Hermitian matrix.
pub fn lambda_max(a: &CMatrix) -> Result<f64> {
    if a.is_diagonal() {
        a.hermitized()?;
        return Ok(a.diagonal().iter().fold(f64::NEG_INFINITY, |m, z| m.max(z.re)));
    }
    Ok(*a.eigvalsh()?.last().unwrap_or(&0.0))
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>`.
pub fn vec_inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize, m: usize) -> CMatrix {
        CMatrix::from_fn(n, m, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let a = random_matrix(rng, n, n);
        a.add(&a.adjoint()).unwrap().scale_real(0.5)
    }

    fn sigma_x() -> CMatrix {
        CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn kron_identities() {
        let i2 = CMatrix::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), CMatrix::identity(4));
        let d = kron(&CMatrix::diag_real(&[1.0, 2.0]), &CMatrix::diag_real(&[3.0, 5.0])).unwrap();
        assert_eq!(d, CMatrix::diag_real(&[3.0, 5.0, 6.0, 10.0]));
    }

    #[test]
    fn kron_xx_maps_00_to_11() {
        let xx = kron(&sigma_x(), &sigma_x()).unwrap();
        let v = xx.mat_vec(&[ONE, ZERO, ZERO, ZERO]).unwrap();
        assert_eq!(v, vec![ZERO, ZERO, ZERO, ONE]);
    }

    #[test]
    fn kron_respects_cap() {
        let a = CMatrix::identity(8);
        assert!(matches!(
            kron_with_cap(&a, &a, 32),
            Err(Error::Size { requested: 64, cap: 32 })
        ));
    }

    #[test]
    fn kron_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (a, b, d) = (
            random_matrix(&mut rng, 2, 3),
            random_matrix(&mut rng, 3, 2),
            random_matrix(&mut rng, 2, 2),
        );
        let left = kron(&kron(&a, &b).unwrap(), &d).unwrap();
        let right = kron(&a, &kron(&b, &d).unwrap()).unwrap();
        assert!(hs_norm(&left.sub(&right).unwrap()) < 1e-14);
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_hermitian(&mut rng, 2);
        let sigma = random_hermitian(&mut rng, 3);
        let prod = kron(&rho, &sigma).unwrap();
        let reduced = partial_trace(&prod, &[2, 3], &[0]).unwrap();
        let expected = rho.scale(sigma.trace());
        assert!(hs_norm(&reduced.sub(&expected).unwrap()) < 1e-12);
        let other = partial_trace(&prod, &[2, 3], &[1]).unwrap();
        assert!(hs_norm(&other.sub(&sigma.scale(rho.trace())).unwrap()) < 1e-12);
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let s = 1.0 / 2f64.sqrt();
        let omega = CMatrix::outer(&[c(s, 0.0), ZERO, ZERO, c(s, 0.0)]);
        let reduced = partial_trace(&omega, &[2, 2], &[0]).unwrap();
        assert!(hs_norm(&reduced.sub(&CMatrix::identity(2).scale_real(0.5)).unwrap()) < 1e-15);
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_hermitian(&mut rng, 4);
        for keep in [&[0usize][..], &[1], &[]] {
            let r = partial_trace(&a, &[2, 2], keep).unwrap();
            assert!((r.trace() - a.trace()).norm() < 1e-12);
        }
        let all = partial_trace(&a, &[2, 2], &[0, 1]).unwrap();
        assert_eq!(all, a);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let a = CMatrix::identity(4);
        assert!(matches!(partial_trace(&a, &[2, 3], &[0]), Err(Error::Shape(_))));
    }

    #[test]
    fn permutation_swaps_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_hermitian(&mut rng, 2);
        let b = random_hermitian(&mut rng, 3);
        let ab = kron(&a, &b).unwrap();
        let ba = permute_subsystems(&ab, &[2, 3], &[1, 0]).unwrap();
        assert!(hs_norm(&ba.sub(&kron(&b, &a).unwrap()).unwrap()) < 1e-15);
    }

    #[test]
    fn norms_on_small_cases() {
        assert_eq!(hs_norm(&CMatrix::zeros(3, 3)), 0.0);
        assert!((hs_norm(&CMatrix::identity(5)) - 5f64.sqrt()).abs() < 1e-15);
        let d = CMatrix::diag_real(&[0.5, -0.5]);
        assert!((hs_norm(&d) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(trace_norm_herm(&CMatrix::zeros(2, 2)).unwrap(), 0.0);
        let z = CMatrix::diag_real(&[1.0, -1.0]);
        assert!((trace_norm_herm(&z).unwrap() - 2.0).abs() < 1e-14);
        assert!((op_norm_inf(&CMatrix::identity(3)).unwrap() - 1.0).abs() < 1e-14);
        assert!((op_norm_inf(&z).unwrap() - 1.0).abs() < 1e-14);
        let e = CMatrix::diag_real(&[0.3, -0.7]);
        assert!((op_norm_inf(&e).unwrap() - 0.7).abs() < 1e-14);
    }

    #[test]
    fn trace_norm_rejects_non_hermitian() {
        let a = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(trace_norm_herm(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn norm_equivalence_on_random_hermitians() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 1..=12 {
            let a = random_hermitian(&mut rng, n);
            let tn = trace_norm_herm(&a).unwrap();
            let hs = hs_norm(&a);
            assert!(tn + 1e-12 >= hs);
            assert!(hs + 1e-12 >= tn / (n as f64).sqrt());
            let inner = hs_inner(&a, &a).unwrap().re;
            assert!((inner - hs * hs).abs() <= 1e-12 * inner.max(1.0));
        }
    }
}
