//! Dissipative rank-one perturbations `A + αφφ*`, `Im α > 0`, of a
//! self-adjoint operator with spectral measure `μ` on the line, carried to the
//! circle by the Cayley transform and modelled on the half-plane.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cauchy::{cauchy_line, cauchy_line_limit, ones, Side};
use crate::clark::{phi_star_snf, phi_star_universal};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::measure::{Atom, Measure, Support};
use crate::model::{theta_forms, BoundaryGrid, CharacteristicFunction};
use crate::perturbation::{build_u_param, UnitaryFamily};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `ω(z) = (z − i)/(z + i)`, mapping the upper half-plane onto the disc.
pub fn cayley(z: Complex64) -> Result<Complex64> {
    if z == -I {
        return Err(Error::Pole("ω is singular at −i".into()));
    }
    Ok((z - I) / (z + I))
}

/// `ω⁻¹(ξ) = i(1 + ξ)/(1 − ξ)`.
pub fn cayley_inv(xi: Complex64) -> Result<Complex64> {
    if xi == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("ω⁻¹ is singular at 1".into()));
    }
    Ok(I * (1.0 + xi) / (1.0 - xi))
}

/// Real point `ω⁻¹(e^{iφ}) = −cot(φ/2)`.
pub fn line_point(phi: f64) -> f64 {
    -1.0 / (phi / 2.0).tan()
}

fn check_line(mu: &Measure) -> Result<()> {
    if mu.support != Support::Line {
        return Err(Error::DomainMismatch("half-plane objects need a line measure".into()));
    }
    Ok(())
}

/// `Q = ∫ dμ(s)/(s + i)`.
pub fn q_value(mu: &Measure) -> Result<Complex64> {
    check_line(mu)?;
    cauchy_line(mu, &ones(mu), -I)
}

/// `γ(α) = (1 + αQ̄)/(1 + αQ)`.
pub fn gamma_of_alpha(mu: &Measure, alpha: Complex64) -> Result<Complex64> {
    let q = q_value(mu)?;
    let den = 1.0 + alpha * q;
    if den.norm() < 1e-300 {
        return Err(Error::Singular(format!("1 + αQ vanishes for α = {alpha}")));
    }
    Ok((1.0 + alpha * q.conj()) / den)
}

/// Image of `dμ(x)/(P(1 + x²))` under `ω`, for atomic `μ`. Atom order is
/// preserved.
pub fn pushforward_to_circle(mu: &Measure) -> Result<Measure> {
    check_line(mu)?;
    if mu.grid.as_ref().is_some_and(|g| g.density.iter().any(|&d| d > 0.0)) {
        return Err(Error::DomainMismatch("pushforward is implemented for atomic measures".into()));
    }
    let p = mu.poisson_mass()?;
    if !(p > 0.0) {
        return Err(Error::Degenerate("Poisson mass must be positive".into()));
    }
    let atoms = mu
        .atoms
        .iter()
        .map(|a| {
            let xi = cayley(Complex64::new(a.position, 0.0))?;
            Ok(Atom { position: xi.arg(), weight: a.weight / (p * (1.0 + a.position * a.position)) })
        })
        .collect::<Result<Vec<_>>>()?;
    Measure::new(Support::Circle, atoms, None, format!("pushforward({})", mu.label))
}

/// Where the half-plane transforms are evaluated: an interior point or the
/// boundary value from above at a real point.
#[derive(Clone, Copy, Debug)]
pub enum HalfPlaneArg {
    Point(Complex64),
    Boundary(f64),
}

fn line_transform(mu: &Measure, f: &[Complex64], at: HalfPlaneArg) -> Result<Complex64> {
    match at {
        HalfPlaneArg::Point(w) => {
            if !(w.im > 0.0) {
                return Err(Error::invalid("half-plane point must have Im w > 0"));
            }
            cauchy_line(mu, f, w)
        }
        HalfPlaneArg::Boundary(x) => cauchy_line_limit(mu, f, x, Side::Plus),
    }
}

/// `R̃fμ(w) = (1/2iP) ∫ f(x)[1/(x − w) − 1/(x + i)] dμ(x)`.
pub fn halfplane_r(mu: &Measure, f: &[Complex64], at: HalfPlaneArg) -> Result<Complex64> {
    let p = mu.poisson_mass()?;
    Ok((line_transform(mu, f, at)? - cauchy_line(mu, f, -I)?) / (2.0 * I * p))
}

/// `R̃₁fμ(w) = (1/2iP) ∫ f(x)[1/(x − w) − 1/(x − i)] dμ(x)`.
pub fn halfplane_r1(mu: &Measure, f: &[Complex64], at: HalfPlaneArg) -> Result<Complex64> {
    let p = mu.poisson_mass()?;
    Ok((line_transform(mu, f, at)? - cauchy_line(mu, f, I)?) / (2.0 * I * p))
}

/// `R̃₂fμ(w) = (1/iP) ∫ f(x)[1/(x − w) − x/(x² + 1)] dμ(x)`.
pub fn halfplane_r2(mu: &Measure, f: &[Complex64], at: HalfPlaneArg) -> Result<Complex64> {
    let p = mu.poisson_mass()?;
    let mid = 0.5 * (cauchy_line(mu, f, I)? + cauchy_line(mu, f, -I)?);
    Ok((line_transform(mu, f, at)? - mid) / (I * p))
}

/// `θ̃_γ = θ_γ∘ω` from the half-plane transforms of `𝟏`, in both forms.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HalfPlaneTheta {
    pub via_r1: Complex64,
    pub via_r2: Complex64,
}

pub fn theta_halfplane(mu: &Measure, gamma: Complex64, at: HalfPlaneArg) -> Result<HalfPlaneTheta> {
    if !(gamma.norm() < 1.0) {
        return Err(Error::invalid("|γ| must be < 1"));
    }
    let one = ones(mu);
    let r1 = halfplane_r1(mu, &one, at)?;
    let r2 = halfplane_r2(mu, &one, at)?;
    let via_r1 = -gamma + (1.0 - gamma.norm_sqr()) * r1 / (1.0 + (1.0 - gamma.conj()) * r1);
    let via_r2 = ((1.0 - gamma) * r2 - (1.0 + gamma)) / ((1.0 - gamma.conj()) * r2 + (1.0 + gamma.conj()));
    Ok(HalfPlaneTheta { via_r1, via_r2 })
}

/// Cayley data of a dissipative perturbation.
#[derive(Clone, Debug)]
pub struct CayleyBridge {
    pub alpha: Complex64,
    pub gamma: Complex64,
    pub q: Complex64,
    pub p: f64,
    pub mu_line: Measure,
    pub mu_circle: Measure,
}

impl CayleyBridge {
    pub fn new(mu: &Measure, alpha: Complex64) -> Result<Self> {
        if !(alpha.im > 0.0) {
            return Err(Error::invalid(format!("Im α must be positive, got {alpha}")));
        }
        let gamma = gamma_of_alpha(mu, alpha)?;
        if !(gamma.norm() < 1.0) {
            return Err(Error::Degenerate(format!("|γ(α)| = {} is not below 1", gamma.norm())));
        }
        Ok(CayleyBridge {
            alpha,
            gamma,
            q: q_value(mu)?,
            p: mu.poisson_mass()?,
            mu_line: mu.clone(),
            mu_circle: pushforward_to_circle(mu)?,
        })
    }

    /// `√P (x + i) f(x)` moved to the atoms of `μ_𝕋`; unitary `L²(μ) → L²(μ_𝕋)`.
    pub fn transfer(&self, f: &[Complex64]) -> Vec<Complex64> {
        let sp = self.p.sqrt();
        self.mu_line.atoms.iter().zip(f).map(|(a, v)| sp * (a.position + I) * v).collect()
    }

    /// `A_α = diag(s_k) + α φφ*` in the orthonormal atom basis, `φ_k = √w_k`.
    pub fn a_alpha(&self) -> CMat {
        let w = self.mu_line.atom_weights();
        let n = w.len();
        CMat::from_fn(n, n, |i, j| {
            let d = if i == j { self.mu_line.atoms[i].position } else { 0.0 };
            Complex64::new(d, 0.0) + self.alpha * (w[i] * w[j]).sqrt()
        })
    }

    /// `(A_α − i)(A_α + i)⁻¹`.
    pub fn cayley_matrix(&self) -> Result<CMat> {
        let a = self.a_alpha();
        let n = a.nrows();
        let ii = CMat::identity(n, n).map(|x| x * I);
        let inv = (&a + &ii).try_inverse().ok_or_else(|| Error::Singular("A_α + i is not invertible".into()))?;
        Ok((&a - &ii) * inv)
    }

    /// `Ũ + (γ − 1) b̃ b̃₁*` with `Ũ = diag(ω(s_k))`,
    /// `b̃ = (A + i)⁻¹φ/‖·‖`, `b̃₁ = (A − i)⁻¹φ/‖·‖`.
    pub fn rank_one_form(&self) -> CMat {
        let w = self.mu_line.atom_weights();
        let s: Vec<f64> = self.mu_line.atoms.iter().map(|a| a.position).collect();
        let sp = self.p.sqrt();
        let b: Vec<Complex64> = s.iter().zip(&w).map(|(x, wk)| wk.sqrt() / ((x + I) * sp)).collect();
        let b1: Vec<Complex64> = s.iter().zip(&w).map(|(x, wk)| wk.sqrt() / ((x - I) * sp)).collect();
        let n = w.len();
        CMat::from_fn(n, n, |i, j| {
            let d = if i == j { (s[i] - I) / (s[i] + I) } else { Complex64::new(0.0, 0.0) };
            d + (self.gamma - 1.0) * b[i] * b1[j].conj()
        })
    }

    /// `D U_γ D*` with `U_γ` built on `μ_𝕋` and `D` the diagonal unitary
    /// `(1 + s²)^{1/2}/(s + i)` taking `𝟙` to `b̃`.
    pub fn via_circle(&self) -> Result<CMat> {
        let u = build_u_param(&UnitaryFamily { base: self.mu_circle.clone(), param: self.gamma })?.matrix;
        let d: Vec<Complex64> = self.mu_line.atoms.iter().map(|a| (1.0 + a.position * a.position).sqrt() / (a.position + I)).collect();
        let n = d.len();
        Ok(CMat::from_fn(n, n, |i, j| d[i] * u[(i, j)] * d[j].conj()))
    }
}

fn sign_dichotomy(mu: &Measure) -> Result<bool> {
    let mut ok = true;
    for a in [-2.0, -0.5, 0.5, 3.0] {
        for im in [-1.0, 0.1, 1.0, 10.0] {
            let g = gamma_of_alpha(mu, Complex64::new(a, im))?;
            ok &= (1.0 - g.norm_sqr()).signum() == f64::signum(im);
        }
        let g = gamma_of_alpha(mu, Complex64::new(a, 0.0))?;
        ok &= (g.norm() - 1.0).abs() < 1e-14;
    }
    Ok(ok)
}

/// Half-plane representation of `Φ̃_γ*f` on the real points of a grid,
/// `(top, bottom)` in the Sz.-Nagy–Foiaş transcription.
#[derive(Clone, Debug, Serialize)]
pub struct HalfPlaneImage {
    pub points: Vec<f64>,
    pub top: Vec<Complex64>,
    pub bottom: Vec<Complex64>,
}

impl HalfPlaneImage {
    pub fn max_relative_difference(&self, other: &HalfPlaneImage) -> f64 {
        let scale = self.top.iter().chain(&self.bottom).map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        linalg::max_abs_diff(&self.top, &other.top).max(linalg::max_abs_diff(&self.bottom, &other.bottom)) / scale
    }
}

fn line_value(mu: &Measure, f: &[Complex64], x: f64) -> Complex64 {
    if let (Some(g), Some(j)) = (&mu.grid, mu.cell_containing(x)) {
        if g.density[j] > 0.0 {
            return f[mu.n_atoms() + j];
        }
    }
    Complex64::new(0.0, 0.0)
}

struct BoundaryData {
    theta: Complex64,
    delta: f64,
    t_plus_one: Complex64,
}

fn boundary_data(mu: &Measure, gamma: Complex64, p: f64, x: f64) -> Result<BoundaryData> {
    let one = ones(mu);
    let t1 = halfplane_r(mu, &one, HalfPlaneArg::Boundary(x))?;
    let theta0 = 1.0 - 1.0 / t1;
    // circle density of the pushforward is πw/P
    let d0 = (PI * mu.density_at(x) / p / t1.norm_sqr()).min(1.0).sqrt();
    let den = 1.0 - gamma.conj() * theta0;
    Ok(BoundaryData { theta: (theta0 - gamma) / den, delta: (1.0 - gamma.norm_sqr()).sqrt() * d0 / den.norm(), t_plus_one: t1 })
}

fn check_f(mu: &Measure, f: &[Complex64]) -> Result<()> {
    if f.len() != mu.dim() {
        return Err(Error::invalid("function length must match the measure"));
    }
    Ok(())
}

/// `√π(z + i)Φ̃_γ*f(z) = √P[Ã f̃(z) + B̃ (1/2iP) ∫ (f̃(s) − f̃(z))[1/(s−z) − 1/(s+i)] dμ(s)]`
/// with `f̃(x) = (x + i)f(x)`, `Ã = c̃`, `B̃ = c̃ − ω c̃₁`.
pub fn phi_star_halfplane_universal(mu: &Measure, gamma: Complex64, f: &[Complex64], points: &[f64]) -> Result<HalfPlaneImage> {
    check_line(mu)?;
    check_f(mu, f)?;
    let p = mu.poisson_mass()?;
    let s = (1.0 - gamma.norm_sqr()).sqrt();
    let t_i = -gamma;
    let q_all = q_value(mu)?;
    let vals = points
        .par_iter()
        .map(|&x| {
            let bd = boundary_data(mu, gamma, p, x)?;
            let om = cayley(Complex64::new(x, 0.0))?;
            let f0 = line_value(mu, f, x);
            let fz = (x + I) * f0;
            // f̃(s) − f̃(z) = (s + i)(f(s) − f(z)) + (s − z)f(z) keeps the cell
            // containing z out of the integral and is exact for cellwise-constant f
            let shifted: Vec<Complex64> = f.iter().map(|v| v - f0).collect();
            let q = (x + I) / (2.0 * I * p) * (cauchy_line_limit(mu, &shifted, x, Side::Plus)? + f0 * q_all);
            let c_top = (1.0 - t_i.conj() * bd.theta) / s;
            let c_bot = -t_i.conj() * bd.delta / s;
            let c1_top = (bd.theta - t_i) / (om * s);
            let c1_bot = bd.delta / (om * s);
            let b_top = c_top - om * c1_top;
            let b_bot = c_bot - om * c1_bot;
            let scale = p.sqrt() / (PI.sqrt() * (x + I));
            Ok((scale * (c_top * fz + b_top * q), scale * (c_bot * fz + b_bot * q)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HalfPlaneImage { points: points.to_vec(), top: vals.iter().map(|v| v.0).collect(), bottom: vals.iter().map(|v| v.1).collect() })
}

/// `√π(1−|γ|²)^{1/2}Φ̃_γ*f = √P[(0, (γ̄ − (γ̄−1)T₊𝟏)Δ̃_γ)f + ((1+γ̄θ̃_γ)/T₊𝟏, (γ̄−1)Δ̃_γ)T₊¹f]`
/// where `T₊¹f` is the boundary value of `(1/2iP) ∫ f dμ(s)/(s − z)`.
pub fn phi_star_halfplane_snf(mu: &Measure, gamma: Complex64, f: &[Complex64], points: &[f64]) -> Result<HalfPlaneImage> {
    check_line(mu)?;
    check_f(mu, f)?;
    let p = mu.poisson_mass()?;
    let s = (1.0 - gamma.norm_sqr()).sqrt();
    let g = gamma.conj();
    let vals = points
        .par_iter()
        .map(|&x| {
            let bd = boundary_data(mu, gamma, p, x)?;
            let t1f = cauchy_line_limit(mu, f, x, Side::Plus)? / (2.0 * I * p);
            let fz = line_value(mu, f, x);
            let scale = p.sqrt() / (PI.sqrt() * s);
            if bd.t_plus_one.norm() < crate::clark::DIVISION_CUTOFF {
                return Err(Error::Singular(format!("T₊𝟏 vanishes at {x}")));
            }
            let top = (1.0 + g * bd.theta) / bd.t_plus_one * t1f;
            let bottom = (g - (g - 1.0) * bd.t_plus_one) * bd.delta * fz + (g - 1.0) * bd.delta * t1f;
            Ok((scale * top, scale * bottom))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HalfPlaneImage { points: points.to_vec(), top: vals.iter().map(|v| v.0).collect(), bottom: vals.iter().map(|v| v.1).collect() })
}

/// `Φ̃_γ*f = Ω Φ_γ*(f_𝕋)` with `Ω h(x) = h(ω(x))/(√π(x + i))`, computed on the
/// circle grid and read off at `x_k = ω⁻¹(e^{iφ_k})`.
pub fn phi_star_halfplane_circle(
    bridge: &CayleyBridge,
    theta: &CharacteristicFunction,
    f: &[Complex64],
    snf: bool,
) -> Result<HalfPlaneImage> {
    let ft = bridge.transfer(f);
    let img = if snf { phi_star_snf(theta, &ft)? } else { phi_star_universal(theta, &theta.defect_vectors()?, &ft)? };
    let points: Vec<f64> = theta.grid.angles.iter().map(|&a| line_point(a)).collect();
    let om = |x: f64| 1.0 / (PI.sqrt() * (x + I));
    Ok(HalfPlaneImage {
        top: points.iter().zip(&img.vector.g1).map(|(&x, v)| om(x) * v).collect(),
        bottom: points.iter().zip(&img.vector.g2).map(|(&x, v)| om(x) * v).collect(),
        points,
    })
}

/// Residuals of the dissipative bridge.
#[derive(Clone, Debug, Serialize)]
pub struct RouteResiduals {
    pub cayley_identity: f64,
    pub cayley_via_circle: f64,
    pub r_transfer: f64,
    pub r1_transfer: f64,
    pub r2_transfer: f64,
    pub theta_transfer: f64,
    pub theta_forms: f64,
    pub theta_at_i: f64,
    pub universal_vs_circle: f64,
    pub snf_vs_circle: f64,
    pub universal_vs_snf: f64,
    pub general_p: f64,
    pub gamma_dichotomy: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DissipativeReport {
    pub gamma: [f64; 2],
    #[serde(rename = "Q")]
    pub q: [f64; 2],
    #[serde(rename = "P")]
    pub p: f64,
    pub route_residuals: RouteResiduals,
}

/// Deterministic probe points in the upper half-plane.
fn probes() -> Vec<Complex64> {
    (0..20)
        .map(|k| {
            let t = k as f64;
            Complex64::new(3.0 * (0.7 * t + 0.3).sin(), 0.05 + 2.0 * (0.5 + 0.5 * (1.3 * t).cos()))
        })
        .collect()
}

/// Runs every dual-route check on atomic `μ` with the given `α` and grid.
pub fn dissipative_report(mu: &Measure, alpha: Complex64, grid_n: usize) -> Result<DissipativeReport> {
    let br = CayleyBridge::new(mu, alpha)?;
    let ct = br.cayley_matrix()?;
    let cayley_identity = linalg::frobenius(&(&ct - br.rank_one_form()));
    let cayley_via_circle = linalg::frobenius(&(&ct - br.via_circle()?));

    let one_line = ones(mu);
    let one_circle = ones(&br.mu_circle);
    let (mut rt, mut r1t, mut r2t, mut tht, mut thf) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for w in probes() {
        let lam = cayley(w)?;
        let at = HalfPlaneArg::Point(w);
        let rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm().max(1.0);
        rt = rt.max(rel(halfplane_r(mu, &one_line, at)?, crate::cauchy::cauchy_circle_r(&br.mu_circle, &one_circle, lam)?));
        r1t = r1t.max(rel(halfplane_r1(mu, &one_line, at)?, crate::cauchy::cauchy_circle_r1(&br.mu_circle, &one_circle, lam)?));
        r2t = r2t.max(rel(halfplane_r2(mu, &one_line, at)?, crate::cauchy::cauchy_circle_r2(&br.mu_circle, &one_circle, lam)?));
        let th = theta_halfplane(mu, br.gamma, at)?;
        tht = tht.max(rel(th.via_r2, theta_forms(&br.mu_circle, br.gamma, lam)?.via_r2));
        thf = thf.max((th.via_r1 - th.via_r2).norm());
    }
    let theta_at_i = (theta_halfplane(mu, br.gamma, HalfPlaneArg::Point(I))?.via_r2 + br.gamma).norm();

    let theta = CharacteristicFunction::new(&br.mu_circle, br.gamma, BoundaryGrid::new(grid_n)?)?;
    let f: Vec<Complex64> = (0..mu.dim()).map(|k| Complex64::new((0.9 * k as f64 + 0.2).cos(), (1.7 * k as f64).sin())).collect();
    let uc = phi_star_halfplane_circle(&br, &theta, &f, false)?;
    let sc = phi_star_halfplane_circle(&br, &theta, &f, true)?;
    let uh = phi_star_halfplane_universal(mu, br.gamma, &f, &uc.points)?;
    let sh = phi_star_halfplane_snf(mu, br.gamma, &f, &uc.points)?;

    // rescaling μ to Poisson mass 1 and f by √P leaves Φ̃* unchanged
    let mu1 = mu.scaled(1.0 / br.p);
    let fp: Vec<Complex64> = f.iter().map(|v| v * br.p.sqrt()).collect();
    let up = phi_star_halfplane_universal(&mu1, gamma_of_alpha(&mu1, alpha * br.p)?, &fp, &uc.points)?;

    Ok(DissipativeReport {
        gamma: [br.gamma.re, br.gamma.im],
        q: [br.q.re, br.q.im],
        p: br.p,
        route_residuals: RouteResiduals {
            cayley_identity,
            cayley_via_circle,
            r_transfer: rt,
            r1_transfer: r1t,
            r2_transfer: r2t,
            theta_transfer: tht,
            theta_forms: thf,
            theta_at_i,
            universal_vs_circle: uc.max_relative_difference(&uh),
            snf_vs_circle: sc.max_relative_difference(&sh),
            universal_vs_snf: uh.max_relative_difference(&sh),
            general_p: uh.max_relative_difference(&up),
            gamma_dichotomy: sign_dichotomy(mu)?,
        },
    })
}
