//! Characteristic functions of the contractions `U_γ`, `|γ| < 1`, their
//! model spaces in two transcriptions, and the compressed shift.
//!
//! The characteristic function is always taken in the defect bases
//! `b₁ = ξ̄` and `b = 𝟏`. Boundary functions are samples on a
//! [`BoundaryGrid`]; for purely atomic measures the model space is also
//! available through an exact rational basis ([`InnerBasis`]).

mod grid;
mod inner;
mod space;

pub use grid::{BoundaryGrid, DEFAULT_GRID};
pub use inner::InnerBasis;
pub use space::{
    compressed_shift_projection, compressed_shift_rank_one, moore_penrose_residual, snf_project, transcription_inverse, transcription_map,
    CompressedShiftAgreement, ModelVectorDBR, ModelVectorSNF,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::cauchy::{cauchy_circle_limit, cauchy_circle_r, cauchy_circle_r1, cauchy_circle_r2, ones, Side};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::measure::{Measure, Support};
use crate::perturbation::{build_u_param, defect_data, UnitaryFamily};

const DENOM_TOL: f64 = 1e-14;

fn check_base(mu: &Measure) -> Result<()> {
    if mu.support != Support::Circle {
        return Err(Error::DomainMismatch("characteristic functions live on the circle".into()));
    }
    if (mu.mass() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!("measure must have mass 1, has {}", mu.mass())));
    }
    Ok(())
}

fn check_gamma(gamma: Complex64) -> Result<()> {
    if !(gamma.norm() < 1.0) {
        return Err(Error::invalid(format!("|γ| = {} must be < 1", gamma.norm())));
    }
    Ok(())
}

/// `θ_γ(λ)` written through `R₁μ` and through `R₂μ`.
#[derive(Clone, Copy, Debug)]
pub struct ThetaForms {
    pub via_r1: Complex64,
    pub via_r2: Complex64,
}

pub fn theta_forms(mu: &Measure, gamma: Complex64, lambda: Complex64) -> Result<ThetaForms> {
    check_base(mu)?;
    check_gamma(gamma)?;
    if !(lambda.norm() < 1.0) {
        return Err(Error::BoundaryPoint(format!("{lambda}")));
    }
    let one = ones(mu);
    let r1 = cauchy_circle_r1(mu, &one, lambda)?;
    let r2 = cauchy_circle_r2(mu, &one, lambda)?;
    let d1 = 1.0 + (1.0 - gamma.conj()) * r1;
    let d2 = (1.0 - gamma.conj()) * r2 + (1.0 + gamma.conj());
    if d1.norm() < DENOM_TOL || d2.norm() < DENOM_TOL {
        return Err(Error::Singular(format!("characteristic function denominator vanishes at {lambda}")));
    }
    Ok(ThetaForms { via_r1: -gamma + (1.0 - gamma.norm_sqr()) * r1 / d1, via_r2: ((1.0 - gamma) * r2 - (1.0 + gamma)) / d2 })
}

/// `θ_γ(λ) = ((1−γ)R₂μ(λ) − (1+γ)) / ((1−γ̄)R₂μ(λ) + (1+γ̄))`.
pub fn theta_from_measure(mu: &Measure, gamma: Complex64, lambda: Complex64) -> Result<Complex64> {
    Ok(theta_forms(mu, gamma, lambda)?.via_r2)
}

/// `θ_γ = (θ₀ − γ)/(1 − γ̄θ₀)`.
pub fn fractional_relation(theta0: Complex64, gamma: Complex64) -> Result<Complex64> {
    let d = 1.0 - gamma.conj() * theta0;
    if d.norm() < DENOM_TOL {
        return Err(Error::Singular("1 − γ̄θ₀ vanishes".into()));
    }
    Ok((theta0 - gamma) / d)
}

/// `θ₀ = (θ_γ + γ)/(1 + γ̄θ_γ)`.
pub fn fractional_inverse(theta_gamma: Complex64, gamma: Complex64) -> Result<Complex64> {
    let d = 1.0 + gamma.conj() * theta_gamma;
    if d.norm() < DENOM_TOL {
        return Err(Error::Singular("1 + γ̄θ_γ vanishes".into()));
    }
    Ok((theta_gamma + gamma) / d)
}

/// `−T + z D_{T*}(I − zT*)⁻¹ D_T` as a full matrix.
pub fn char_function_matrix(t: &CMat, z: Complex64) -> Result<CMat> {
    if t.nrows() != t.ncols() {
        return Err(Error::invalid("operator must be square"));
    }
    if !(z.norm() < 1.0) {
        return Err(Error::BoundaryPoint(format!("{z}")));
    }
    let n = t.nrows();
    let id = CMat::identity(n, n);
    let d_t = linalg::psd_sqrt(&(&id - t.adjoint() * t));
    let d_ts = linalg::psd_sqrt(&(&id - t * t.adjoint()));
    let resolvent = (&id - t.adjoint() * z).try_inverse().ok_or_else(|| Error::Singular(format!("I − zT* is singular at z = {z}")))?;
    Ok(-t + d_ts * resolvent * d_t * z)
}

/// The scalar characteristic function of `U_γ` read off in the bases
/// `b₁ → b`, from the matrix definition.
pub fn char_function_from_contraction(fam: &UnitaryFamily, z: Complex64) -> Result<Complex64> {
    check_gamma(fam.param)?;
    let u = build_u_param(fam)?;
    let dd = defect_data(fam)?;
    let m = char_function_matrix(&u.matrix, z)?;
    let b = linalg::vec_from(&dd.b);
    let b1 = linalg::vec_from(&dd.b1);
    Ok(b.dotc(&(m * b1)))
}

/// `θ_γ` with boundary samples of `θ₀`, `θ_γ`, `Δ₀`, `Δ_γ` and `T₊𝟏`.
#[derive(Clone, Debug)]
pub struct CharacteristicFunction {
    pub gamma: Complex64,
    pub measure: Measure,
    pub grid: BoundaryGrid,
    pub theta0: Vec<Complex64>,
    pub theta: Vec<Complex64>,
    /// `(1 − |θ₀|²)^{1/2}`, from the Poisson identity `1 − |θ₀|² = w/|T₊𝟏|²`.
    pub delta0: Vec<f64>,
    pub delta: Vec<f64>,
    /// Boundary values of `R𝟏μ` from inside.
    pub t_plus_one: Vec<Complex64>,
    /// a.c. density of `μ` at the grid points.
    pub density: Vec<f64>,
}

impl CharacteristicFunction {
    pub fn new(mu: &Measure, gamma: Complex64, grid: BoundaryGrid) -> Result<Self> {
        check_base(mu)?;
        check_gamma(gamma)?;
        let one = ones(mu);
        let n = grid.n;
        let mut theta0 = Vec::with_capacity(n);
        let mut theta = Vec::with_capacity(n);
        let mut delta0 = Vec::with_capacity(n);
        let mut delta = Vec::with_capacity(n);
        let mut tp = Vec::with_capacity(n);
        let mut density = Vec::with_capacity(n);
        let g2 = 1.0 - gamma.norm_sqr();
        for &phi in &grid.angles {
            let r = cauchy_circle_limit(mu, &one, phi, Side::Plus)?;
            if r.norm() < DENOM_TOL {
                return Err(Error::Singular(format!("T₊𝟏 vanishes at angle {phi}")));
            }
            let t0 = 1.0 - 1.0 / r;
            let w = mu.density_at(phi);
            let d0 = w.sqrt() / r.norm();
            let den = 1.0 - gamma.conj() * t0;
            theta0.push(t0);
            theta.push(fractional_relation(t0, gamma)?);
            delta0.push(d0.min(1.0));
            delta.push((g2.sqrt() * d0 / den.norm()).min(1.0));
            tp.push(r);
            density.push(w);
        }
        Ok(CharacteristicFunction { gamma, measure: mu.clone(), grid, theta0, theta, delta0, delta, t_plus_one: tp, density })
    }

    pub fn eval(&self, lambda: Complex64) -> Result<Complex64> {
        theta_from_measure(&self.measure, self.gamma, lambda)
    }

    pub fn eval_theta0(&self, lambda: Complex64) -> Result<Complex64> {
        theta_from_measure(&self.measure, Complex64::new(0.0, 0.0), lambda)
    }

    /// `max (1 − |θ_γ|²)^{1/2}` over the grid, computed from `|θ_γ|` directly.
    pub fn inner_score(&self) -> f64 {
        self.theta.iter().map(|t| (1.0 - t.norm_sqr()).max(0.0).sqrt()).fold(0.0, f64::max)
    }

    /// `R𝟏μ(λ)` for `λ ∈ 𝔻`.
    pub fn cauchy_one(&self, lambda: Complex64) -> Result<Complex64> {
        cauchy_circle_r(&self.measure, &ones(&self.measure), lambda)
    }

    pub fn defect_vectors(&self) -> Result<DefectVectorsModel> {
        defect_vectors_model(self)
    }
}

/// Defect vectors `c` (spanning the defect space of `𝓜*`) and `c₁`
/// (spanning that of `𝓜`) as model-space samples.
#[derive(Clone, Debug)]
pub struct DefectVectorsModel {
    pub theta_at_0: Complex64,
    pub c: ModelVectorSNF,
    pub c1: ModelVectorSNF,
}

pub fn defect_vectors_model(theta: &CharacteristicFunction) -> Result<DefectVectorsModel> {
    let t0 = theta.eval(Complex64::new(0.0, 0.0))?;
    let s = 1.0 - t0.norm_sqr();
    if !(s > 0.0) {
        return Err(Error::Degenerate("|θ(0)| must be < 1".into()));
    }
    let k = 1.0 / s.sqrt();
    let g = &theta.grid;
    let c = ModelVectorSNF {
        g1: theta.theta.iter().map(|t| k * (1.0 - t0.conj() * t)).collect(),
        g2: theta.delta.iter().map(|&d| -k * t0.conj() * d).collect(),
    };
    let c1 = ModelVectorSNF {
        g1: theta.theta.iter().zip(&g.points).map(|(t, z)| k * (t - t0) / z).collect(),
        g2: theta.delta.iter().zip(&g.points).map(|(&d, z)| k * d / z).collect(),
    };
    Ok(DefectVectorsModel { theta_at_0: t0, c, c1 })
}

/// Metrics reported by `model-check`.
#[derive(Clone, Debug, Serialize)]
pub struct ModelCheck {
    pub theta_at_0: [f64; 2],
    pub theta_at_0_residual: f64,
    pub inner_score: f64,
    pub norm_equality_residual: f64,
    pub moore_penrose_residual: f64,
    pub compressed_shift_agreement: f64,
    pub projection_idempotence: f64,
}

/// Runs the model-space consistency checks on a few deterministic sample
/// vectors built from reproducing kernels.
pub fn model_check(theta: &CharacteristicFunction) -> Result<ModelCheck> {
    let dv = theta.defect_vectors()?;
    let g = &theta.grid;
    let samples = sample_members(theta)?;
    let mut norm_res: f64 = 0.0;
    let mut idem: f64 = 0.0;
    for v in &samples {
        let d = transcription_map(theta, v);
        let a = v.norm(g);
        norm_res = norm_res.max((d.norm(theta) - a).abs() / a.max(1e-300));
        let p = snf_project(theta, &v.g1, &v.g2);
        idem = idem.max(p.distance(v, g) / a.max(1e-300));
    }
    let shift = CompressedShiftAgreement::compute(theta, &dv, &samples);
    Ok(ModelCheck {
        theta_at_0: [dv.theta_at_0.re, dv.theta_at_0.im],
        theta_at_0_residual: (dv.theta_at_0 + theta.gamma).norm(),
        inner_score: theta.inner_score(),
        norm_equality_residual: norm_res,
        moore_penrose_residual: moore_penrose_residual(theta),
        compressed_shift_agreement: shift.max_residual,
        projection_idempotence: idem,
    })
}

/// Model vectors `P_θ(k_λ, 0)` for a few interior points `λ`.
pub fn sample_members(theta: &CharacteristicFunction) -> Result<Vec<ModelVectorSNF>> {
    let pts = [Complex64::new(0.0, 0.0), Complex64::new(0.3, 0.2), Complex64::new(-0.5, 0.1), Complex64::new(0.1, -0.6)];
    let g = &theta.grid;
    pts.iter()
        .map(|&l| {
            let g1: Vec<Complex64> = g.points.iter().map(|z| 1.0 / (1.0 - l.conj() * z)).collect();
            let g2 = vec![Complex64::new(0.0, 0.0); g.n];
            Ok(snf_project(theta, &g1, &g2))
        })
        .collect()
}

#[cfg(test)]
pub(crate) mod tests;
