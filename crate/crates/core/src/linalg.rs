//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn identity_residual(m: &CMat) -> f64 {
    let n = m.nrows();
    frobenius(&(m - CMat::identity(n, m.ncols())))
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let sv = m.clone().singular_values();
    sv.iter().cloned().fold(0.0, f64::max)
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return vec![];
    }
    let mut v: Vec<f64> = m.clone().singular_values().iter().cloned().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

pub fn diag(d: &[Complex64]) -> CMat {
    CMat::from_diagonal(&CVec::from_column_slice(d))
}

pub fn vec_from(v: &[Complex64]) -> CVec {
    CVec::from_column_slice(v)
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenpairs of a normal matrix via the complex Schur form; columns of the
/// returned matrix are unit eigenvectors.
pub fn eig_normal(m: &CMat) -> Result<(Vec<Complex64>, CMat)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((vec![], CMat::zeros(0, 0)));
    }
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Eigen("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let vals = (0..n).map(|k| t[(k, k)]).collect();
    Ok((vals, q))
}

/// Eigenvalues of a general square matrix from the complex Schur form.
pub fn eigenvalues(m: &CMat) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(vec![]);
    }
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Eigen("Schur iteration did not converge".into()))?;
    let t = schur.unpack().1;
    Ok((0..m.nrows()).map(|k| t[(k, k)]).collect())
}

/// Positive semidefinite square root of a Hermitian matrix.
pub fn psd_sqrt(m: &CMat) -> CMat {
    let (vals, vecs) = eig_hermitian(m);
    let d: Vec<Complex64> = vals.iter().map(|&v| re(v.max(0.0).sqrt())).collect();
    &vecs * diag(&d) * vecs.adjoint()
}

/// Eigenpairs of a Hermitian matrix, ascending.
pub fn eig_hermitian(m: &CMat) -> (Vec<f64>, CMat) {
    let e = nalgebra::linalg::SymmetricEigen::new(m.clone());
    let mut idx: Vec<usize> = (0..m.nrows()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = idx.iter().map(|&k| e.eigenvalues[k]).collect();
    let mut vecs = CMat::zeros(m.nrows(), m.ncols());
    for (j, &k) in idx.iter().enumerate() {
        vecs.set_column(j, &e.eigenvectors.column(k));
    }
    (vals, vecs)
}

pub fn solve(m: &CMat, b: &CVec) -> Result<CVec> {
    m.clone().lu().solve(b).ok_or_else(|| Error::Singular("linear system is singular".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_of_diagonal() {
        let m = diag(&[re(3.0), c(0.0, -4.0)]);
        assert!((spectral_norm(&m) - 4.0).abs() < 1e-14);
        assert!((frobenius(&m) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn normal_eigenpairs_of_rotation() {
        let m = CMat::from_row_slice(2, 2, &[re(0.0), re(-1.0), re(1.0), re(0.0)]);
        let (vals, q) = eig_normal(&m).unwrap();
        let mut ims: Vec<f64> = vals.iter().map(|z| z.im).collect();
        ims.sort_by(|a, b| a.total_cmp(b));
        assert!((ims[0] + 1.0).abs() < 1e-14 && (ims[1] - 1.0).abs() < 1e-14);
        let d = diag(&vals);
        assert!(frobenius(&(&m * &q - &q * d)) < 1e-13);
    }
}
