//! Small dense complex linear-algebra helpers on top of `nalgebra`.
//!
//! Everything here works on `DMatrix<Complex64>`; the dimensions in this
//! crate are at most a few hundred, so no attempt is made at blocking or
//! sparse storage.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}

/// `Tr(a b)` without forming the product.
pub fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Column-major vectorisation, `vec(X)[i + n j] = X[i, j]`.
pub fn vectorize(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &CVec, n: usize) -> CMat {
    CMat::from_column_slice(n, n, v.as_slice())
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted
/// ascending. Columns of the returned matrix are the matching eigenvectors.
pub fn hermitian_eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let h = hermitian_part(m);
    let eig = h.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Apply `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_map(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = hermitian_eigh(m);
    let n = vals.len();
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let fv = f(v);
        for i in 0..n {
            scaled[(i, j)] *= fv;
        }
    }
    scaled * vecs.adjoint()
}

/// Square root and inverse square root of a Hermitian positive-definite
/// matrix. Fails when the condition number exceeds `max_condition`.
pub fn sqrt_and_inv_sqrt(m: &CMat, max_condition: f64) -> Result<(CMat, CMat)> {
    let (vals, vecs) = hermitian_eigh(m);
    let max = vals.last().copied().unwrap_or(0.0);
    let min = vals.first().copied().unwrap_or(0.0);
    if max <= 0.0 || min <= 0.0 || max / min > max_condition {
        let cond = if min > 0.0 { max / min } else { f64::INFINITY };
        return Err(Error::IllConditioned(cond));
    }
    let n = vals.len();
    let mut s = vecs.clone();
    let mut si = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let r = v.sqrt();
        for i in 0..n {
            s[(i, j)] *= r;
            si[(i, j)] /= r;
        }
    }
    Ok((&s * vecs.adjoint(), &si * vecs.adjoint()))
}

/// PSD square root; tiny negative eigenvalues from round-off are clamped.
pub fn psd_sqrt(m: &CMat) -> CMat {
    hermitian_map(m, |v| v.max(0.0).sqrt())
}

/// Nearest unitary in Frobenius norm (`U W^†` from the SVD).
pub fn polar_unitary(m: &CMat) -> CMat {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd u requested");
    let v_t = svd.v_t.expect("svd v_t requested");
    u * v_t
}

pub fn unitarity_defect(m: &CMat) -> f64 {
    frobenius(&(m.adjoint() * m - identity(m.nrows())))
}

/// All eigenvalues of a general complex square matrix, via the Schur form.
pub fn eigenvalues(m: &CMat) -> Vec<C64> {
    let schur = m.clone().schur();
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Shannon entropy in bits with `0 log 0 = 0`.
pub fn entropy_bits(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}
