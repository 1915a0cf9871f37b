//! The Clark operator `Φ_γ : 𝒦_{θ_γ} → L²(μ)` intertwining the compressed
//! shift with `U_γ`, through its adjoint in three forms (universal, SNF,
//! dBR), its inverse, and the family `Φ_{α,γ}` over Clark measures `μ_α`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cauchy::{cauchy_circle_limit, cauchy_circle_r, ones, radial_limit, Side};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::measure::{Measure, NodeKind};
use crate::model::{transcription_map, CharacteristicFunction, DefectVectorsModel, InnerBasis, ModelVectorDBR, ModelVectorSNF};
use crate::perturbation::{build_u_param, UnitaryFamily};
use crate::representation::RepresentationOperator;

/// Division cutoff for `|T₊𝟏|`, `|T₋𝟏|` and the density `w`.
pub const DIVISION_CUTOFF: f64 = 1e-10;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn check_function(mu: &Measure, f: &[Complex64]) -> Result<()> {
    if f.len() != mu.dim() {
        return Err(Error::invalid(format!("function has {} samples, measure has {} nodes", f.len(), mu.dim())));
    }
    Ok(())
}

/// Value of a node-sampled function at a boundary angle: the cell value on
/// cells of positive density, zero elsewhere.
fn value_at(mu: &Measure, f: &[Complex64], phi: f64) -> Result<Complex64> {
    if mu.atoms.iter().any(|a| a.position == phi) {
        return Err(Error::Pole(format!("grid angle {phi} is an atom")));
    }
    Ok(match mu.cell_containing(phi) {
        Some(j) if mu.grid.as_ref().unwrap().density[j] > 0.0 => f[mu.n_atoms() + j],
        _ => zero(),
    })
}

fn defect_scale(gamma: Complex64) -> f64 {
    (1.0 - gamma.norm_sqr()).sqrt()
}

/// A boundary function in `𝒦_θ` with the grid points where a division was
/// skipped.
#[derive(Clone, Debug, Serialize)]
pub struct ClarkImage {
    pub vector: ModelVectorSNF,
    pub excluded: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DbrImage {
    pub vector: ModelVectorDBR,
    pub excluded: Vec<usize>,
    /// Set when `g₋` came from the transcription map because `T₋𝟏` vanishes.
    pub fallback: bool,
}

/// `A_γ = c^γ` and `B_γ = c^γ − z c₁^γ`, plus their closed forms in `θ₀`.
#[derive(Clone, Debug)]
pub struct ABCoefficients {
    pub a: ModelVectorSNF,
    pub b: ModelVectorSNF,
    pub a_theta0: ModelVectorSNF,
    pub b_theta0: ModelVectorSNF,
}

impl ABCoefficients {
    pub fn form_difference(&self) -> f64 {
        let d1 = self.a.g1.iter().zip(&self.a_theta0.g1).chain(self.b.g1.iter().zip(&self.b_theta0.g1));
        let d2 = self.a.g2.iter().zip(&self.a_theta0.g2).chain(self.b.g2.iter().zip(&self.b_theta0.g2));
        d1.chain(d2).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }
}

pub fn a_b_coefficients(theta: &CharacteristicFunction, dv: &DefectVectorsModel) -> ABCoefficients {
    let g = theta.gamma;
    let s = defect_scale(g);
    let z = &theta.grid.points;
    let n = theta.grid.n;
    let b = ModelVectorSNF {
        g1: (0..n).map(|k| dv.c.g1[k] - z[k] * dv.c1.g1[k]).collect(),
        g2: (0..n).map(|k| dv.c.g2[k] - z[k] * dv.c1.g2[k]).collect(),
    };
    let den = |k: usize| 1.0 - g.conj() * theta.theta0[k];
    let a_theta0 = ModelVectorSNF {
        g1: (0..n).map(|k| s / den(k)).collect(),
        g2: (0..n).map(|k| g.conj() * theta.delta0[k] / den(k).norm()).collect(),
    };
    let b_theta0 = ModelVectorSNF {
        g1: (0..n).map(|k| s * (1.0 - theta.theta0[k]) / den(k)).collect(),
        g2: (0..n).map(|k| (g.conj() - 1.0) * theta.delta0[k] / den(k).norm()).collect(),
    };
    ABCoefficients { a: dv.c.clone(), b, a_theta0, b_theta0 }
}

/// `Φ_γ*f(z) = A_γ(z)f(z) + B_γ(z) ∫ (f(ξ) − f(z))/(1 − ξ̄z) dμ(ξ)` on the grid.
///
/// The integrand vanishes on the cell containing `z`, so the integral is an
/// ordinary one and needs no boundary limit.
pub fn phi_star_universal(theta: &CharacteristicFunction, dv: &DefectVectorsModel, f: &[Complex64]) -> Result<ClarkImage> {
    let mu = &theta.measure;
    check_function(mu, f)?;
    let ab = a_b_coefficients(theta, dv);
    let vals = theta
        .grid
        .angles
        .par_iter()
        .enumerate()
        .map(|(k, &phi)| {
            let fz = value_at(mu, f, phi)?;
            let shifted: Vec<Complex64> = f.iter().map(|v| v - fz).collect();
            let q = cauchy_circle_limit(mu, &shifted, phi, Side::Plus)?;
            Ok((ab.a.g1[k] * fz + ab.b.g1[k] * q, ab.a.g2[k] * fz + ab.b.g2[k] * q))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClarkImage {
        vector: ModelVectorSNF { g1: vals.iter().map(|v| v.0).collect(), g2: vals.iter().map(|v| v.1).collect() },
        excluded: vec![],
    })
}

fn boundary_pair(mu: &Measure, f: &[Complex64], phi: f64, side: Side) -> Result<(Complex64, Complex64)> {
    Ok((cauchy_circle_limit(mu, f, phi, side)?, cauchy_circle_limit(mu, &ones(mu), phi, side)?))
}

/// `(1−|γ|²)^{1/2}Φ_γ*f = (0, (γ̄ − (γ̄−1)T₊𝟏)Δ_γ)f + ((1+γ̄θ_γ)/T₊𝟏, (γ̄−1)Δ_γ)T₊f`.
pub fn phi_star_snf(theta: &CharacteristicFunction, f: &[Complex64]) -> Result<ClarkImage> {
    let mu = &theta.measure;
    check_function(mu, f)?;
    let g = theta.gamma;
    let s = defect_scale(g);
    let vals = theta
        .grid
        .angles
        .par_iter()
        .enumerate()
        .map(|(k, &phi)| {
            let fz = value_at(mu, f, phi)?;
            let (tp, t1) = boundary_pair(mu, f, phi, Side::Plus)?;
            if t1.norm() < DIVISION_CUTOFF {
                return Ok(None);
            }
            let d = theta.delta[k];
            let top = (1.0 + g.conj() * theta.theta[k]) * tp / (t1 * s);
            let bottom = ((g.conj() - (g.conj() - 1.0) * t1) * d * fz + (g.conj() - 1.0) * d * tp) / s;
            Ok(Some((top, bottom)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect_image(vals))
}

fn collect_image(vals: Vec<Option<(Complex64, Complex64)>>) -> ClarkImage {
    let excluded = (0..vals.len()).filter(|&k| vals[k].is_none()).collect();
    let pick = |v: &Option<(Complex64, Complex64)>, first: bool| v.map_or(zero(), |p| if first { p.0 } else { p.1 });
    ClarkImage {
        vector: ModelVectorSNF { g1: vals.iter().map(|v| pick(v, true)).collect(), g2: vals.iter().map(|v| pick(v, false)).collect() },
        excluded,
    }
}

/// `g₊ = (1−|γ|²)^{1/2}/(1−γ̄θ₀) · T₊f/T₊𝟏` and
/// `g₋ = (1−|γ|²)^{1/2}θ̄₀/(1−γθ̄₀) · T₋f/T₋𝟏`.
///
/// When `T₋𝟏` vanishes on the whole grid (Lebesgue measure), `g₋` is taken
/// from the transcription of the universal route instead.
pub fn dbr_components(theta: &CharacteristicFunction, dv: &DefectVectorsModel, f: &[Complex64]) -> Result<DbrImage> {
    let mu = &theta.measure;
    check_function(mu, f)?;
    let g = theta.gamma;
    let s = defect_scale(g);
    let vals = theta
        .grid
        .angles
        .par_iter()
        .enumerate()
        .map(|(k, &phi)| {
            let (tp, t1) = boundary_pair(mu, f, phi, Side::Plus)?;
            let (tm, tm1) = boundary_pair(mu, f, phi, Side::Minus)?;
            let t0 = theta.theta0[k];
            let gp = if t1.norm() < DIVISION_CUTOFF { None } else { Some(s / (1.0 - g.conj() * t0) * tp / t1) };
            let gm = if tm1.norm() < DIVISION_CUTOFF { None } else { Some(s * t0.conj() / (1.0 - g * t0.conj()) * tm / tm1) };
            Ok((gp, gm))
        })
        .collect::<Result<Vec<_>>>()?;
    if vals.iter().all(|v| v.1.is_none()) {
        let u = phi_star_universal(theta, dv, f)?;
        return Ok(DbrImage { vector: transcription_map(theta, &u.vector), excluded: vec![], fallback: true });
    }
    let excluded = (0..vals.len()).filter(|&k| vals[k].0.is_none() || vals[k].1.is_none()).collect();
    Ok(DbrImage {
        vector: ModelVectorDBR {
            g_plus: vals.iter().map(|v| v.0.unwrap_or(zero())).collect(),
            g_minus: vals.iter().map(|v| v.1.unwrap_or(zero())).collect(),
        },
        excluded,
        fallback: false,
    })
}

/// Analytic extension of `g₊ = Φ_γ*f` (top entry) into the disc:
/// `λ ↦ (1−|γ|²)^{1/2}/(1−γ̄θ₀(λ)) · Rfμ(λ)/R𝟏μ(λ)`.
pub fn g_plus_extension<'a>(theta: &'a CharacteristicFunction, f: &'a [Complex64]) -> impl Fn(Complex64) -> Result<Complex64> + 'a {
    move |lambda| {
        let mu = &theta.measure;
        let rf = cauchy_circle_r(mu, f, lambda)?;
        let r1 = cauchy_circle_r(mu, &ones(mu), lambda)?;
        let t0 = 1.0 - 1.0 / r1;
        Ok(defect_scale(theta.gamma) / (1.0 - theta.gamma.conj() * t0) * rf / r1)
    }
}

/// Result of the forward Clark operator.
#[derive(Clone, Debug, Serialize)]
pub struct ForwardImage {
    /// Samples over the nodes of `μ` (atoms, then cells).
    pub f: Vec<Complex64>,
    pub atom_converged: Vec<bool>,
    /// Cells with no grid point or with density below the cutoff.
    pub excluded_cells: Vec<usize>,
}

/// `f = Φ_γ g`: at atoms, the radial limit of `(1−γ̄)/(1−|γ|²)^{1/2} g₊`;
/// on cells, `(1−|γ|²)^{1/2} w f = (1−γ̄θ₀)/(1−θ₀) g₊ + (1−γθ̄₀)/(1−θ̄₀) g₋`
/// averaged over the grid points inside the cell.
pub fn phi_forward(
    theta: &CharacteristicFunction,
    g: &ModelVectorDBR,
    g_plus_interior: &(dyn Fn(Complex64) -> Result<Complex64> + Sync),
) -> Result<ForwardImage> {
    let mu = &theta.measure;
    let gm = theta.gamma;
    let s = defect_scale(gm);
    let mut f = vec![zero(); mu.dim()];
    let mut conv = vec![];
    let atoms: Vec<(Complex64, bool)> = mu
        .atoms
        .par_iter()
        .map(|a| {
            let xi = Complex64::from_polar(1.0, a.position);
            radial_limit(|h| Ok((1.0 - gm.conj()) / s * g_plus_interior((1.0 - h) * xi)?), 0.5)
        })
        .collect::<Result<Vec<_>>>()?;
    for (k, (v, ok)) in atoms.into_iter().enumerate() {
        f[k] = v;
        conv.push(ok);
    }
    let mut excluded = vec![];
    if let Some(grid) = &mu.grid {
        let na = mu.n_atoms();
        for j in 0..grid.n {
            let w = grid.density[j];
            let (lo, hi) = grid.cell(j);
            let idx = theta.grid.indices_in_arc(lo, hi);
            if w < DIVISION_CUTOFF || idx.is_empty() {
                excluded.push(j);
                continue;
            }
            let mut acc = zero();
            for &k in &idx {
                let t0 = theta.theta0[k];
                acc += (1.0 - gm.conj() * t0) / (1.0 - t0) * g.g_plus[k] + (1.0 - gm * t0.conj()) / (1.0 - t0.conj()) * g.g_minus[k];
            }
            f[na + j] = acc / (idx.len() as f64 * s * w);
        }
    }
    Ok(ForwardImage { f, atom_converged: conv, excluded_cells: excluded })
}

/// `‖f − g‖_{L²(μ)} / ‖f‖_{L²(μ)}` over non-excluded nodes.
pub fn l2_relative_error(mu: &Measure, f: &[Complex64], g: &[Complex64], excluded_cells: &[usize]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, n) in mu.nodes().iter().enumerate() {
        if let NodeKind::Cell(j) = n.kind {
            if excluded_cells.contains(&j) {
                continue;
            }
        }
        num += n.mass * (f[k] - g[k]).norm_sqr();
        den += n.mass * f[k].norm_sqr();
    }
    if den == 0.0 {
        return num.sqrt();
    }
    (num / den).sqrt()
}

/// Radial limits of the normalized Cauchy transform `Rfμ/R𝟏μ` at each atom,
/// with the largest deviation from `f(atom)`.
#[derive(Clone, Debug, Serialize)]
pub struct NormalizedCauchyCheck {
    pub limits: Vec<Complex64>,
    pub converged: Vec<bool>,
    pub max_error: f64,
}

pub fn normalized_cauchy_at_atoms(mu: &Measure, f: &[Complex64]) -> Result<NormalizedCauchyCheck> {
    check_function(mu, f)?;
    let one = ones(mu);
    let res = mu
        .atoms
        .par_iter()
        .map(|a| {
            let xi = Complex64::from_polar(1.0, a.position);
            radial_limit(|h| Ok(cauchy_circle_r(mu, f, (1.0 - h) * xi)? / cauchy_circle_r(mu, &one, (1.0 - h) * xi)?), 0.5)
        })
        .collect::<Result<Vec<_>>>()?;
    let max_error = res.iter().zip(f).map(|(r, v)| (r.0 - v).norm()).fold(0.0, f64::max);
    Ok(NormalizedCauchyCheck { limits: res.iter().map(|r| r.0).collect(), converged: res.iter().map(|r| r.1).collect(), max_error })
}

/// Coordinates of `Φ_γ*f` in the rational basis when `μ` is atomic. The
/// universal formula collapses there to
/// `Φ_γ*f = (1−γ)/(1−|γ|²)^{1/2} Σ_k f(ξ_k) μ{ξ_k} k_{ξ_k}` with the boundary
/// kernels `k_ξ(z) = (1 − θ_γ(ξ)̄θ_γ(z))/(1 − ξ̄z)`.
pub fn phi_star_rational(theta: &CharacteristicFunction, basis: &InnerBasis, f: &[Complex64]) -> Result<Vec<Complex64>> {
    let mu = &theta.measure;
    check_function(mu, f)?;
    if !mu.is_atomic() || mu.grid.is_some() {
        return Err(Error::DomainMismatch("rational coordinates need a purely atomic measure".into()));
    }
    let c = (1.0 - theta.gamma) / defect_scale(theta.gamma);
    let mut out = vec![zero(); basis.dim()];
    for (k, a) in mu.atoms.iter().enumerate() {
        let kc = basis.kernel_coordinates(Complex64::from_polar(1.0, a.position));
        for (o, v) in out.iter_mut().zip(kc) {
            *o += c * f[k] * a.weight * v;
        }
    }
    Ok(out)
}

/// Matrix whose column `k` holds the rational coordinates of `Φ_γ*e_k`,
/// `e_k = μ{ξ_k}^{-1/2} 𝟙_{ξ_k}`.
pub fn phi_star_rational_matrix(theta: &CharacteristicFunction, basis: &InnerBasis) -> Result<CMat> {
    let mu = &theta.measure;
    let n = mu.n_atoms();
    let mut m = CMat::zeros(basis.dim(), n);
    for k in 0..n {
        let mut e = vec![zero(); n];
        e[k] = Complex64::new(1.0 / mu.atoms[k].weight.sqrt(), 0.0);
        m.set_column(k, &linalg::vec_from(&phi_star_rational(theta, basis, &e)?));
    }
    Ok(m)
}

/// Interior values of `Φ_γ*f` for atomic `μ`: `B_γ(λ) Rfμ(λ)` (top entry).
pub fn phi_star_interior(theta: &CharacteristicFunction, f: &[Complex64], lambda: Complex64) -> Result<Complex64> {
    let g = theta.gamma;
    let t = theta.eval(lambda)?;
    let b = (1.0 - g - (1.0 - g.conj()) * t) / defect_scale(g);
    Ok(b * cauchy_circle_r(&theta.measure, f, lambda)?)
}

/// `max_{k,m} |Φ*(U_γ e_k)(λ_m) − λ_m Φ*e_k(λ_m)| (1 − |λ_m|²)^{1/2}` over the
/// zeros `λ_m` of `θ_γ`, where `𝓜*k_λ = λ̄k_λ`.
pub fn intertwining_at_zeros(theta: &CharacteristicFunction, basis: &InnerBasis) -> Result<f64> {
    let mu = &theta.measure;
    let fam = UnitaryFamily { base: mu.clone(), param: theta.gamma };
    let u = build_u_param(&fam)?.matrix;
    let n = mu.n_atoms();
    let w = mu.atom_weights();
    let worst = (0..n)
        .into_par_iter()
        .map(|k| {
            // samples of e_k and of U_γ e_k
            let mut e = vec![zero(); n];
            e[k] = Complex64::new(1.0 / w[k].sqrt(), 0.0);
            let ue: Vec<Complex64> = (0..n).map(|i| u[(i, k)] / w[i].sqrt()).collect();
            let mut worst: f64 = 0.0;
            for &l in &basis.zeros {
                let a = phi_star_interior(theta, &ue, l)?;
                let b = phi_star_interior(theta, &e, l)?;
                let scale = ((1.0 - l.norm()) * (1.0 + l.norm())).sqrt();
                worst = worst.max((a - l * b).norm() * scale);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

/// Multiplies the bottom entry by `ᾱ`: the canonical map `𝒦_{ᾱθ} → 𝒦_θ`.
pub fn rotate_bottom(v: &ModelVectorSNF, alpha: Complex64) -> ModelVectorSNF {
    ModelVectorSNF { g1: v.g1.clone(), g2: v.g2.iter().map(|x| alpha.conj() * x).collect() }
}

/// `Φ_{α,γ}* f` by composition, `Φ_γ* 𝒱_α* f`, for `f` sampled on the atoms
/// of `μ_α = v.target`.
pub fn phi_star_alpha_composition(
    theta: &CharacteristicFunction,
    dv: &DefectVectorsModel,
    v: &RepresentationOperator,
    f: &[Complex64],
) -> Result<ClarkImage> {
    let tw = v.target.atom_weights();
    if f.len() != tw.len() {
        return Err(Error::invalid("function must be sampled on the atoms of the Clark measure"));
    }
    if v.source.atoms.iter().zip(&theta.measure.atoms).any(|(a, b)| a.position != b.position)
        || v.source.n_atoms() != theta.measure.n_atoms()
    {
        return Err(Error::DomainMismatch("representation source must equal the base measure (sorted)".into()));
    }
    let coords: Vec<Complex64> = f.iter().zip(&tw).map(|(x, w)| x * w.sqrt()).collect();
    let back = v.matrix.adjoint() * linalg::vec_from(&coords);
    let sw = theta.measure.atom_weights();
    let samples: Vec<Complex64> = back.iter().zip(&sw).map(|(x, w)| x / w.sqrt()).collect();
    phi_star_universal(theta, dv, &samples)
}

/// The representation of `Φ_{α,γ}*` in `𝒦_{ᾱθ_γ}`: the SNF formula for
/// `μ_α` with `θ_γ` replaced by `ᾱθ_γ` and `γ` by `γ/α`.
pub fn phi_star_alpha_tilde(theta: &CharacteristicFunction, mu_alpha: &Measure, alpha: Complex64, f: &[Complex64]) -> Result<ClarkImage> {
    check_function(mu_alpha, f)?;
    if (alpha.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("α must be unimodular"));
    }
    let g = theta.gamma;
    let ga = g / alpha;
    let s = defect_scale(g);
    let vals = theta
        .grid
        .angles
        .par_iter()
        .enumerate()
        .map(|(k, &phi)| {
            let fz = value_at(mu_alpha, f, phi)?;
            let (tp, t1) = boundary_pair(mu_alpha, f, phi, Side::Plus)?;
            if t1.norm() < DIVISION_CUTOFF {
                return Ok(None);
            }
            let d = theta.delta[k];
            let top = (1.0 + ga.conj() * alpha.conj() * theta.theta[k]) * tp / (t1 * s);
            let bottom = ((ga.conj() - (ga.conj() - 1.0) * t1) * d * fz + (ga.conj() - 1.0) * d * tp) / s;
            Ok(Some((top, bottom)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect_image(vals))
}

/// `Φ_{α,γ}* f` in `𝒦_{θ_γ}`: [`phi_star_alpha_tilde`] followed by
/// [`rotate_bottom`].
pub fn phi_star_alpha(theta: &CharacteristicFunction, mu_alpha: &Measure, alpha: Complex64, f: &[Complex64]) -> Result<ClarkImage> {
    let t = phi_star_alpha_tilde(theta, mu_alpha, alpha, f)?;
    Ok(ClarkImage { vector: rotate_bottom(&t.vector, alpha), excluded: t.excluded })
}

/// Residuals reported by `clark-verify --gamma`.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ClarkRouteReport {
    pub dim: usize,
    pub gamma: [f64; 2],
    pub universal_vs_snf: f64,
    pub universal_vs_dbr: f64,
    pub snf_vs_dbr: f64,
    pub phi_one_residual: f64,
    pub round_trip_residual: f64,
    pub ab_form_difference: f64,
    pub gram_residual: Option<f64>,
    pub intertwining_residual: Option<f64>,
    pub rational_vs_universal: Option<f64>,
    pub excluded_points: usize,
}

fn dbr_difference(a: &ModelVectorDBR, b: &ModelVectorDBR) -> f64 {
    let scale = a.g_plus.iter().chain(&a.g_minus).map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    linalg::max_abs_diff(&a.g_plus, &b.g_plus).max(linalg::max_abs_diff(&a.g_minus, &b.g_minus)) / scale
}

fn zero_excluded(v: &mut ModelVectorSNF, excluded: &[usize]) {
    for &k in excluded {
        v.g1[k] = zero();
        v.g2[k] = zero();
    }
}

/// Runs every route on `f` and collects the pairwise residuals. Atomic
/// measures additionally get the Gram, intertwining and rational checks.
pub fn clark_route_report(theta: &CharacteristicFunction, f: &[Complex64], full: bool) -> Result<ClarkRouteReport> {
    let dv = theta.defect_vectors()?;
    let mu = &theta.measure;
    let mut uni = phi_star_universal(theta, &dv, f)?;
    let mut snf = phi_star_snf(theta, f)?;
    let dbr = dbr_components(theta, &dv, f)?;
    let mut excluded: Vec<usize> = snf.excluded.iter().chain(&dbr.excluded).cloned().collect();
    excluded.sort_unstable();
    excluded.dedup();
    zero_excluded(&mut uni.vector, &excluded);
    zero_excluded(&mut snf.vector, &excluded);
    let mut dbr_v = dbr.vector.clone();
    for &k in &excluded {
        dbr_v.g_plus[k] = zero();
        dbr_v.g_minus[k] = zero();
    }
    let uni_d = transcription_map(theta, &uni.vector);
    let snf_d = transcription_map(theta, &snf.vector);
    let one = ones(mu);
    let phi_one = phi_star_universal(theta, &dv, &one)?;
    let phi_one_residual = phi_one.vector.max_relative_difference(&dv.c);
    let ext = g_plus_extension(theta, f);
    let fwd = phi_forward(theta, &uni_d, &ext)?;
    let round_trip_residual = l2_relative_error(mu, f, &fwd.f, &fwd.excluded_cells);
    let mut rep = ClarkRouteReport {
        dim: mu.dim(),
        gamma: [theta.gamma.re, theta.gamma.im],
        universal_vs_snf: uni.vector.max_relative_difference(&snf.vector),
        universal_vs_dbr: dbr_difference(&uni_d, &dbr_v),
        snf_vs_dbr: dbr_difference(&snf_d, &dbr_v),
        phi_one_residual,
        round_trip_residual,
        ab_form_difference: a_b_coefficients(theta, &dv).form_difference(),
        excluded_points: excluded.len(),
        ..Default::default()
    };
    if full && mu.grid.is_none() && mu.n_atoms() > 0 {
        let basis = InnerBasis::for_characteristic(theta)?;
        let x = phi_star_rational_matrix(theta, &basis)?;
        rep.gram_residual = Some(linalg::identity_residual(&(x.adjoint() * &x)));
        rep.intertwining_residual = Some(intertwining_at_zeros(theta, &basis)?);
        let coords = phi_star_rational(theta, &basis, f)?;
        let rat: Vec<Complex64> = theta.grid.points.iter().map(|&z| basis.synthesize(&coords, z)).collect();
        let scale = uni.vector.g1.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        rep.rational_vs_universal = Some(linalg::max_abs_diff(&rat, &uni.vector.g1) / scale);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests;
