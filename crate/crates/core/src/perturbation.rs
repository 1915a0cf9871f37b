//! Rank-one perturbations `A_α = A + α(·,𝟏)𝟏` on the line and
//! `U_γ = U + (γ−1)(·,U*𝟏)𝟏` on the circle, written in the orthonormal basis
//! `e_k = w_k^{-1/2} 𝟙_{atom k}` of `L²(μ)`.
//!
//! Spectral measures of perturbed operators come from two independent routes:
//! a secular-equation solver (production) and a dense eigen-decomposition
//! (oracle).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::cauchy::{one_minus_expi, AnalyticField};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::measure::{wrap_angle, Atom, Measure, Support};

/// A dense operator between weighted `L²` spaces in their node bases.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub matrix: CMat,
    pub source: String,
    pub target: String,
    /// Set when grid cells were lumped into atoms.
    pub discretized: bool,
}

#[derive(Clone, Debug)]
pub struct SelfAdjointFamily {
    pub base: Measure,
    pub alpha: f64,
}

#[derive(Clone, Debug)]
pub struct UnitaryFamily {
    pub base: Measure,
    pub param: Complex64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectData {
    pub defect_norm_factor: f64,
    /// Coordinates of `b ≡ 𝟏` and `b₁ = ξ̄`.
    pub b: Vec<Complex64>,
    pub b1: Vec<Complex64>,
    /// `‖I − U*U − (1−|γ|²) b₁b₁*‖_F`.
    pub residual: f64,
}

fn atomic_or_lumped(mu: &Measure) -> (Measure, bool) {
    if mu.grid.is_some() {
        (mu.discretize(), true)
    } else {
        (mu.clone(), false)
    }
}

/// Inverse of `x ↦ x − (x,b)a`, i.e. `I + d⁻¹ a b*` with `d = 1 − (a,b)`.
pub fn rank_one_inverse(a: &CVec, b: &CVec) -> Result<CMat> {
    if a.len() != b.len() {
        return Err(Error::invalid("vectors must have equal length"));
    }
    let d = Complex64::new(1.0, 0.0) - b.dotc(a);
    if d.norm() < 1e-14 {
        return Err(Error::Singular(format!("perturbation determinant {d}")));
    }
    let n = a.len();
    Ok(CMat::identity(n, n) + a * b.adjoint() / d)
}

pub fn sqrt_weights(mu: &Measure) -> Vec<Complex64> {
    mu.atoms.iter().map(|a| Complex64::new(a.weight.sqrt(), 0.0)).collect()
}

/// `A_α = diag(x) + α √w √wᵀ`.
pub fn build_a_alpha(fam: &SelfAdjointFamily) -> Result<OperatorMatrix> {
    if fam.base.support != Support::Line {
        return Err(Error::DomainMismatch("self-adjoint family lives on the line".into()));
    }
    let (mu, lumped) = atomic_or_lumped(&fam.base);
    let b = sqrt_weights(&mu);
    let n = b.len();
    let m = CMat::from_fn(n, n, |i, j| {
        let d = if i == j { mu.atoms[i].position } else { 0.0 };
        Complex64::new(d, 0.0) + fam.alpha * b[i] * b[j]
    });
    Ok(OperatorMatrix { matrix: m, source: mu.label.clone(), target: mu.label.clone(), discretized: lumped })
}

/// `U_γ[j,k] = ξ_j δ_jk + (γ−1) √w_j √w_k ξ_k`.
pub fn build_u_param(fam: &UnitaryFamily) -> Result<OperatorMatrix> {
    if fam.base.support != Support::Circle {
        return Err(Error::DomainMismatch("unitary family lives on the circle".into()));
    }
    if fam.param.norm() > 1.0 + 1e-12 {
        return Err(Error::invalid("parameter must satisfy |γ| ≤ 1"));
    }
    let (mu, lumped) = atomic_or_lumped(&fam.base);
    let b = sqrt_weights(&mu);
    let xi = mu.atom_points();
    let n = b.len();
    let m = CMat::from_fn(n, n, |j, k| {
        let d = if j == k { xi[j] } else { Complex64::new(0.0, 0.0) };
        d + (fam.param - 1.0) * b[j] * b[k] * xi[k]
    });
    Ok(OperatorMatrix { matrix: m, source: mu.label.clone(), target: mu.label.clone(), discretized: lumped })
}

/// `(A_α − λ)⁻¹ f` from the resolvent of `A`:
/// `f/(x−λ) − α Rfμ(λ)/(1+αF(λ)) · 1/(x−λ)`. `alpha` may be complex.
pub fn resolvent_perturbed(base: &Measure, alpha: Complex64, f: &[Complex64], lambda: Complex64) -> Result<Vec<Complex64>> {
    if base.support != Support::Line {
        return Err(Error::DomainMismatch("resolvent formula is stated on the line".into()));
    }
    let (mu, _) = atomic_or_lumped(base);
    if f.len() != mu.dim() {
        return Err(Error::invalid("function length must match the (lumped) measure"));
    }
    let inv: Vec<Complex64> = mu
        .atoms
        .iter()
        .map(|a| {
            let d = a.position - lambda;
            if d.norm() == 0.0 {
                Err(Error::Pole(format!("{lambda}")))
            } else {
                Ok(1.0 / d)
            }
        })
        .collect::<Result<_>>()?;
    let big_f: Complex64 = mu.atoms.iter().zip(&inv).map(|(a, r)| a.weight * r).sum();
    let rf: Complex64 = mu.atoms.iter().zip(&inv).zip(f).map(|((a, r), v)| a.weight * r * v).sum();
    let den = 1.0 + alpha * big_f;
    if den.norm() < 1e-14 {
        return Err(Error::Pole(format!("1+αF vanishes at {lambda}: eigenvalue of A_α")));
    }
    let k = alpha * rf / den;
    Ok(f.iter().zip(&inv).map(|(v, r)| (v - k) * r).collect())
}

/// `F_α = F/(1+αF)` pointwise.
pub fn aronszajn_krein(field: &AnalyticField, alpha: Complex64) -> Result<AnalyticField> {
    let values = field
        .values
        .iter()
        .zip(&field.eval_points)
        .map(|(f, p)| {
            let den = 1.0 + alpha * f;
            if den.norm() < 1e-14 {
                Err(Error::Pole(format!("{p}")))
            } else {
                Ok(f / den)
            }
        })
        .collect::<Result<_>>()?;
    Ok(AnalyticField { eval_points: field.eval_points.clone(), values, side: field.side })
}

fn measure_from_pairs(support: Support, mut pairs: Vec<(f64, f64)>, label: String) -> Result<Measure> {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let atoms = pairs.into_iter().filter(|p| p.1 > 0.0).map(|(position, weight)| Atom { position, weight }).collect();
    Measure::new(support, atoms, None, label)
}

/// Eigen-decomposition oracle for the spectral measure of `A_α` (line) or
/// `U_α`, `|α| = 1` (circle), taken with respect to `𝟏`.
pub fn spectral_measure_perturbed_line(fam: &SelfAdjointFamily) -> Result<Measure> {
    let op = build_a_alpha(fam)?;
    let (mu, _) = atomic_or_lumped(&fam.base);
    let b = sqrt_weights(&mu);
    let (vals, vecs) = linalg::eig_hermitian(&op.matrix);
    let pairs = vals
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let v = vecs.column(k);
            let ip: Complex64 = v.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
            (l, ip.norm_sqr())
        })
        .collect();
    measure_from_pairs(Support::Line, pairs, format!("eig[{}, alpha={}]", mu.label, fam.alpha))
}

pub fn spectral_measure_perturbed_circle(fam: &UnitaryFamily) -> Result<Measure> {
    if (fam.param.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("spectral measure requires a unimodular parameter"));
    }
    let op = build_u_param(fam)?;
    let (mu, _) = atomic_or_lumped(&fam.base);
    let b = sqrt_weights(&mu);
    let (vals, vecs) = linalg::eig_normal(&op.matrix)?;
    let pairs = vals
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let v = vecs.column(k);
            let nv = v.norm();
            let ip: Complex64 = v.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
            (l.arg(), ip.norm_sqr() / (nv * nv))
        })
        .collect();
    measure_from_pairs(Support::Circle, pairs, format!("eig[{}, alpha={}]", mu.label, fam.param))
}

pub fn defect_data(fam: &UnitaryFamily) -> Result<DefectData> {
    let op = build_u_param(fam)?;
    let (mu, _) = atomic_or_lumped(&fam.base);
    let g2 = fam.param.norm_sqr();
    let b = sqrt_weights(&mu);
    let b1: Vec<Complex64> = mu.atoms.iter().map(|a| Complex64::from_polar(a.weight.sqrt(), -a.position)).collect();
    let n = b.len();
    let u = &op.matrix;
    let lhs = CMat::identity(n, n) - u.adjoint() * u;
    let bb = CMat::from_fn(n, n, |i, j| (1.0 - g2) * b1[i] * b1[j].conj());
    Ok(DefectData { defect_norm_factor: (1.0 - g2).max(0.0).sqrt(), b, b1, residual: linalg::frobenius(&(lhs - bb)) })
}

/// Spectral measure of a perturbed operator from the secular equation, with
/// each root stored as an offset from a base atom so that root–atom gaps are
/// available to full relative precision.
#[derive(Clone, Debug)]
pub struct ClarkSpectrum {
    pub support: Support,
    /// Eigenvalues (line) or their angles (circle), ascending.
    pub positions: Vec<f64>,
    pub weights: Vec<f64>,
    origin: Vec<usize>,
    offset: Vec<f64>,
    base_positions: Vec<f64>,
}

impl ClarkSpectrum {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `s_i − x_j` on the line, or the angle difference `φ_i − θ_j` on the circle.
    pub fn diff(&self, i: usize, j: usize) -> f64 {
        (self.base_positions[self.origin[i]] - self.base_positions[j]) + self.offset[i]
    }

    pub fn measure(&self, label: impl Into<String>) -> Result<Measure> {
        let atoms = self.positions.iter().zip(&self.weights).map(|(&position, &weight)| Atom { position, weight }).collect();
        Measure::new(self.support, atoms, None, label)
    }

    pub fn points(&self) -> Vec<Complex64> {
        match self.support {
            Support::Line => self.positions.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Support::Circle => self.positions.iter().map(|&t| Complex64::from_polar(1.0, t)).collect(),
        }
    }

    fn identity(mu: &Measure) -> Self {
        let n = mu.n_atoms();
        ClarkSpectrum {
            support: mu.support,
            positions: mu.atoms.iter().map(|a| a.position).collect(),
            weights: mu.atom_weights(),
            origin: (0..n).collect(),
            offset: vec![0.0; n],
            base_positions: mu.atoms.iter().map(|a| a.position).collect(),
        }
    }
}

/// Root of an increasing function on `(lo, hi)` that changes sign there.
fn bracketed_root(g: impl Fn(f64) -> (f64, f64), mut lo: f64, mut hi: f64) -> f64 {
    let mut x = 0.5 * (lo + hi);
    for _ in 0..400 {
        let (v, dv) = g(x);
        if v == 0.0 {
            return x;
        }
        if v < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - v / dv;
        let next = if dv > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) || hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs())
        {
            return next;
        }
        x = next;
    }
    x
}

/// Spectral measure of `A_α` for real `α` from the roots of `1 + αF(s) = 0`;
/// weights `1/(α² F'(s))`.
pub fn clark_spectrum_line(mu: &Measure, alpha: f64) -> Result<ClarkSpectrum> {
    if mu.support != Support::Line || mu.grid.is_some() {
        return Err(Error::DomainMismatch("secular solver needs an atomic line measure".into()));
    }
    let mu = mu.sorted();
    if alpha == 0.0 {
        return Ok(ClarkSpectrum::identity(&mu));
    }
    let x: Vec<f64> = mu.atoms.iter().map(|a| a.position).collect();
    let w = mu.atom_weights();
    let n = x.len();
    let total: f64 = w.iter().sum();
    // g(τ) = F(x_o + τ) + 1/α, increasing in τ
    let g = |o: usize, tau: f64| -> (f64, f64) {
        let mut v = 1.0 / alpha;
        let mut dv = 0.0;
        for j in 0..n {
            let d = (x[j] - x[o]) - tau;
            v += w[j] / d;
            dv += w[j] / (d * d);
        }
        (v, dv)
    };
    let mut origin = Vec::with_capacity(n);
    let mut offset = Vec::with_capacity(n);
    if alpha < 0.0 {
        let tau = bracketed_root(|t| g(0, t), -(-alpha) * total * 1.000001 - 1e-300, 0.0);
        origin.push(0);
        offset.push(tau);
    }
    for k in 0..n.saturating_sub(1) {
        let half = 0.5 * (x[k + 1] - x[k]);
        let (vm, _) = g(k, half);
        if vm > 0.0 {
            origin.push(k);
            offset.push(bracketed_root(|t| g(k, t), 0.0, half));
        } else {
            origin.push(k + 1);
            offset.push(bracketed_root(|t| g(k + 1, t), -half, 0.0));
        }
    }
    if alpha > 0.0 {
        let tau = bracketed_root(|t| g(n - 1, t), 0.0, alpha * total * 1.000001 + 1e-300);
        origin.push(n - 1);
        offset.push(tau);
    }
    let positions: Vec<f64> = origin.iter().zip(&offset).map(|(&o, &t)| x[o] + t).collect();
    let weights = origin
        .iter()
        .zip(&offset)
        .map(|(&o, &t)| {
            let fp: f64 = (0..n)
                .map(|j| {
                    let d = (x[j] - x[o]) - t;
                    w[j] / (d * d)
                })
                .sum();
            1.0 / (alpha * alpha * fp)
        })
        .collect();
    Ok(ClarkSpectrum { support: Support::Line, positions, weights, origin, offset, base_positions: x })
}

/// Clark measure `μ_α` of `U_α`, `|α| = 1`, from `Σ w cot((φ−θ)/2) = cot(a/2)`
/// where `α = e^{ia}`; weights `1/(|1−α|² Σ w/|1−e^{i(φ−θ)}|²)`.
pub fn clark_spectrum_circle(mu: &Measure, alpha: Complex64) -> Result<ClarkSpectrum> {
    if mu.support != Support::Circle || mu.grid.is_some() {
        return Err(Error::DomainMismatch("secular solver needs an atomic circle measure".into()));
    }
    if (alpha.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("Clark parameter must be unimodular"));
    }
    if (mu.mass() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("circle spectral measure must have mass 1"));
    }
    let mu = mu.sorted();
    let a = alpha.arg();
    if a == 0.0 {
        return Ok(ClarkSpectrum::identity(&mu));
    }
    let th: Vec<f64> = mu.atoms.iter().map(|a| a.position).collect();
    let w = mu.atom_weights();
    let n = th.len();
    let target = 1.0 / (0.5 * a).tan();
    // g(τ) = target − Σ w cot((θ_o + τ − θ_j)/2), increasing in τ
    let g = |o: usize, tau: f64| -> (f64, f64) {
        let mut v = target;
        let mut dv = 0.0;
        for j in 0..n {
            let u = 0.5 * ((th[o] - th[j]) + tau);
            let s = u.sin();
            v -= w[j] * u.cos() / s;
            dv += 0.5 * w[j] / (s * s);
        }
        (v, dv)
    };
    let mut origin = Vec::with_capacity(n);
    let mut offset = Vec::with_capacity(n);
    for k in 0..n {
        let (lo, hi) = if k + 1 < n { (th[k], th[k + 1]) } else { (th[n - 1], th[0] + 2.0 * PI) };
        let half = 0.5 * (hi - lo);
        let (vm, _) = g(k, half);
        if vm > 0.0 {
            origin.push(k);
            offset.push(bracketed_root(|t| g(k, t), 0.0, half));
        } else {
            let o = (k + 1) % n;
            origin.push(o);
            offset.push(bracketed_root(|t| g(o, t), -half, 0.0));
        }
    }
    let one_minus_alpha = (1.0 - alpha).norm_sqr();
    let mut pairs: Vec<(f64, f64, usize, f64)> = origin
        .iter()
        .zip(&offset)
        .map(|(&o, &t)| {
            let s: f64 = (0..n).map(|j| w[j] / one_minus_expi((th[o] - th[j]) + t).norm_sqr()).sum();
            (wrap_angle(th[o] + t), 1.0 / (one_minus_alpha * s), o, t)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(ClarkSpectrum {
        support: Support::Circle,
        positions: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
        origin: pairs.iter().map(|p| p.2).collect(),
        offset: pairs.iter().map(|p| p.3).collect(),
        base_positions: th,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InterlacingReport {
    pub strict: bool,
    pub degenerate: bool,
    pub min_gap: f64,
}

/// Strict alternation of eigenvalues with atoms on the line: for `α > 0`
/// `x₁ < s₁ < x₂ < … < x_n < s_n`, mirrored for `α < 0`.
pub fn interlacing_line(atoms: &[f64], eigs: &[f64], alpha: f64) -> InterlacingReport {
    let mut x = atoms.to_vec();
    let mut s = eigs.to_vec();
    x.sort_by(|a, b| a.total_cmp(b));
    s.sort_by(|a, b| a.total_cmp(b));
    let mut seq: Vec<f64> = vec![];
    for k in 0..x.len().max(s.len()) {
        if alpha > 0.0 {
            seq.extend(x.get(k));
            seq.extend(s.get(k));
        } else {
            seq.extend(s.get(k));
            seq.extend(x.get(k));
        }
    }
    let scale = seq.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let min_gap = seq.windows(2).map(|p| p[1] - p[0]).fold(f64::INFINITY, f64::min);
    InterlacingReport { strict: x.len() == s.len() && min_gap > 0.0, degenerate: min_gap.abs() < 1e-10 * scale, min_gap }
}

/// Number of Lanczos/Arnoldi steps with residual above `tol`, i.e. the
/// numerical dimension of the Krylov space of `v`.
pub fn krylov_rank(a: &CMat, v: &[Complex64], tol: f64) -> usize {
    let n = a.nrows();
    let mut basis: Vec<CVec> = vec![];
    let mut q = linalg::vec_from(v);
    let nrm = q.norm();
    if nrm <= tol {
        return 0;
    }
    q /= Complex64::new(nrm, 0.0);
    basis.push(q);
    while basis.len() < n {
        let mut r = a * basis.last().unwrap();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&r);
                r -= b * c;
            }
        }
        let nr = r.norm();
        if nr <= tol {
            break;
        }
        basis.push(r / Complex64::new(nr, 0.0));
    }
    basis.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchy::{cauchy_line, ones};
    use crate::linalg::{c, re};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_atom() -> Measure {
        Measure::atomic(Support::Line, &[(-1.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    #[test]
    fn rank_one_inverse_examples() {
        let s = 0.5f64.sqrt();
        let a = CVec::from_vec(vec![re(s * 0.6), re(s * 0.8)]);
        let inv = rank_one_inverse(&a, &a).unwrap();
        let oracle = CMat::identity(2, 2) + &a * a.adjoint() * re(2.0);
        assert!(linalg::frobenius(&(inv - oracle)) < 1e-15);
        let zero = CVec::zeros(3);
        let a3 = CVec::from_vec(vec![re(1.0), re(2.0), re(3.0)]);
        assert!(linalg::identity_residual(&rank_one_inverse(&a3, &zero).unwrap()) == 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = CVec::from_fn(5, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let b = CVec::from_fn(5, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let inv = rank_one_inverse(&a, &b).unwrap();
        let orig = CMat::identity(5, 5) - &a * b.adjoint();
        assert!(linalg::identity_residual(&(orig * inv)) < 1e-13);
        let u = CVec::from_vec(vec![re(1.0), re(0.0)]);
        assert!(matches!(rank_one_inverse(&u, &u), Err(Error::Singular(_))));
    }

    #[test]
    fn a_alpha_examples() {
        let d0 = Measure::atomic(Support::Line, &[(0.0, 1.0)]).unwrap();
        let m = build_a_alpha(&SelfAdjointFamily { base: d0, alpha: 3.0 }).unwrap().matrix;
        assert!((m[(0, 0)] - re(3.0)).norm() < 1e-15);
        let m = build_a_alpha(&SelfAdjointFamily { base: two_atom(), alpha: 2.0 }).unwrap().matrix;
        let oracle = CMat::from_row_slice(2, 2, &[re(0.0), re(1.0), re(1.0), re(2.0)]);
        assert!(linalg::frobenius(&(m - oracle)) < 1e-15);
    }

    #[test]
    fn unitary_example_has_unit_determinant() {
        let mu = Measure::atomic(Support::Circle, &[(0.0, 0.5), (PI, 0.5)]).unwrap();
        let u = build_u_param(&UnitaryFamily { base: mu, param: re(-1.0) }).unwrap().matrix;
        assert!(linalg::identity_residual(&(u.adjoint() * &u)) < 1e-13);
        assert!((u.determinant().norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn spectral_measure_examples() {
        let d0 = Measure::atomic(Support::Line, &[(0.0, 1.0)]).unwrap();
        let m = spectral_measure_perturbed_line(&SelfAdjointFamily { base: d0, alpha: 3.0 }).unwrap();
        assert_eq!(m.atoms.len(), 1);
        assert!((m.atoms[0].position - 3.0).abs() < 1e-14 && (m.atoms[0].weight - 1.0).abs() < 1e-14);

        let m = spectral_measure_perturbed_line(&SelfAdjointFamily { base: two_atom(), alpha: 2.0 }).unwrap();
        let r2 = 2f64.sqrt();
        assert!((m.atoms[0].position - (1.0 - r2)).abs() < 1e-14);
        assert!((m.atoms[1].position - (1.0 + r2)).abs() < 1e-14);
        assert!((m.mass() - 1.0).abs() < 1e-14);
        // eigenvector of [[0,1],[1,2]] at λ is (1, λ); weight (1+λ)²/(2(1+λ²))
        for a in &m.atoms {
            let l = a.position;
            let oracle = (1.0 + l).powi(2) / (2.0 * (1.0 + l * l));
            assert!((a.weight - oracle).abs() < 1e-14);
        }
    }

    #[test]
    fn secular_matches_eigen_oracle_line() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 5, 30, 100] {
            let mu = Measure::random_atomic_line(n, &mut rng);
            for alpha in [1.0, -1.0, 2.0, -2.0, 0.5] {
                let sec = clark_spectrum_line(&mu, alpha).unwrap();
                let eig = spectral_measure_perturbed_line(&SelfAdjointFamily { base: mu.clone(), alpha }).unwrap();
                assert_eq!(sec.len(), n);
                for k in 0..n {
                    assert!((sec.positions[k] - eig.atoms[k].position).abs() < 1e-12, "n={n} α={alpha}");
                    assert!((sec.weights[k] - eig.atoms[k].weight).abs() < 1e-11);
                }
                let total: f64 = sec.weights.iter().sum();
                assert!((total - mu.mass()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn secular_matches_eigen_oracle_circle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in [1, 2, 7, 40] {
            let mu = Measure::random_atomic_circle(n, &mut rng);
            for a in [PI, 1.0, -2.0, 0.3] {
                let alpha = Complex64::from_polar(1.0, a);
                let sec = clark_spectrum_circle(&mu, alpha).unwrap();
                let eig = spectral_measure_perturbed_circle(&UnitaryFamily { base: mu.clone(), param: alpha }).unwrap();
                assert_eq!(sec.len(), n);
                for k in 0..n {
                    let d = wrap_angle(sec.positions[k] - eig.atoms[k].position);
                    assert!(d.abs() < 1e-11, "n={n} a={a}: {} vs {}", sec.positions[k], eig.atoms[k].position);
                    assert!((sec.weights[k] - eig.atoms[k].weight).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn unitary_eigenvalues_unimodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mu = Measure::random_atomic_circle(12, &mut rng);
        let u = build_u_param(&UnitaryFamily { base: mu, param: Complex64::from_polar(1.0, 2.2) }).unwrap();
        let (vals, _) = linalg::eig_normal(&u.matrix).unwrap();
        assert!(vals.iter().all(|z| (z.norm() - 1.0).abs() < 1e-13));
    }

    #[test]
    fn resolvent_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mu = Measure::random_atomic_line(5, &mut rng);
        let f: Vec<Complex64> = (0..5).map(|k| c(k as f64 - 2.0, 0.5)).collect();
        let lambda = c(0.3, 0.7);
        for alpha in [re(0.0), re(1.5), c(0.2, 0.9)] {
            let g = resolvent_perturbed(&mu, alpha, &f, lambda).unwrap();
            // work in node samples: coordinates are √w ⊙ samples
            let b = sqrt_weights(&mu);
            let a = CMat::from_fn(5, 5, |i, j| {
                let d = if i == j { re(mu.atoms[i].position) } else { re(0.0) };
                d + alpha * b[i] * b[j]
            }) - CMat::identity(5, 5) * lambda;
            let rhs = CVec::from_fn(5, |i, _| f[i] * b[i]);
            let sol = linalg::solve(&a, &rhs).unwrap();
            for i in 0..5 {
                assert!((sol[i] / b[i] - g[i]).norm() < 1e-12);
            }
        }
        let d0 = Measure::atomic(Support::Line, &[(0.0, 1.0)]).unwrap();
        let g = resolvent_perturbed(&d0, re(1.0), &[re(1.0)], c(0.0, 1.0)).unwrap();
        assert!((g[0] - 1.0 / (c(1.0, 0.0) - c(0.0, 1.0))).norm() < 1e-15);
        assert!(matches!(resolvent_perturbed(&d0, re(1.0), &[re(1.0)], re(1.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn aronszajn_krein_examples() {
        let d0 = Measure::atomic(Support::Line, &[(0.0, 1.0)]).unwrap();
        let pts = vec![c(0.3, 1.0), c(-2.0, 0.5)];
        let vals = pts.iter().map(|&l| cauchy_line(&d0, &ones(&d0), l).unwrap()).collect();
        let field = AnalyticField { eval_points: pts.clone(), values: vals, side: crate::cauchy::Side::None };
        let fa = aronszajn_krein(&field, re(2.5)).unwrap();
        for (k, l) in pts.iter().enumerate() {
            assert!((fa.values[k] - (-1.0 / (l - 2.5))).norm() < 1e-14);
            let im_oracle = field.values[k].im / (1.0 + 2.5 * field.values[k]).norm_sqr();
            assert!((fa.values[k].im - im_oracle).abs() < 1e-14);
        }
        let f0 = aronszajn_krein(&field, re(0.0)).unwrap();
        assert_eq!(f0.values, field.values);
    }

    #[test]
    fn defect_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mu = Measure::random_atomic_circle(3, &mut rng);
        let d = defect_data(&UnitaryFamily { base: mu.clone(), param: c(0.3, 0.4) }).unwrap();
        assert!(d.residual < 1e-13);
        assert!((d.defect_norm_factor - 0.75f64.sqrt()).abs() < 1e-15);
        let d = defect_data(&UnitaryFamily { base: mu.clone(), param: re(0.5) }).unwrap();
        assert!((d.defect_norm_factor - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let d = defect_data(&UnitaryFamily { base: mu.clone(), param: re(0.0) }).unwrap();
        assert_eq!(d.defect_norm_factor, 1.0);
        assert!((linalg::norm2(&d.b) - 1.0).abs() < 1e-14 && (linalg::norm2(&d.b1) - 1.0).abs() < 1e-14);
        let u = build_u_param(&UnitaryFamily { base: mu, param: c(0.3, 0.4) }).unwrap().matrix;
        assert!(linalg::spectral_norm(&u) <= 1.0 + 1e-13);
    }

    #[test]
    fn interlacing_and_cyclicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mu = Measure::random_atomic_line(8, &mut rng);
        let x: Vec<f64> = mu.atoms.iter().map(|a| a.position).collect();
        let s1 = clark_spectrum_line(&mu, 1.0).unwrap();
        let s2 = clark_spectrum_line(&mu, -2.0).unwrap();
        assert!(interlacing_line(&x, &s1.positions, 1.0).strict);
        assert!(interlacing_line(&x, &s2.positions, -2.0).strict);
        assert!(s1.positions.iter().all(|p| s2.positions.iter().all(|q| p != q)));
        let a = build_a_alpha(&SelfAdjointFamily { base: mu.clone(), alpha: 1.0 }).unwrap().matrix;
        assert_eq!(krylov_rank(&a, &sqrt_weights(&mu), 1e-10), 8);
    }

    proptest! {
        #[test]
        fn unitary_and_contractive(seed in 0u64..1000, a in -3.0f64..3.0, r in 0.0f64..0.99) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 1 + (seed as usize % 9);
            let mu = Measure::random_atomic_circle(n, &mut rng);
            let u = build_u_param(&UnitaryFamily { base: mu.clone(), param: Complex64::from_polar(1.0, a) }).unwrap().matrix;
            prop_assert!(linalg::identity_residual(&(u.adjoint() * &u)) < 1e-12);
            let t = build_u_param(&UnitaryFamily { base: mu, param: Complex64::from_polar(r, a) }).unwrap().matrix;
            prop_assert!(linalg::spectral_norm(&t) <= 1.0 + 1e-13);
        }
    }
}
