//! Cauchy-type transforms of `f dμ`, their regularized matrices, and boundary
//! values.
//!
//! Densities are piecewise constant, so every cell contributes a closed-form
//! logarithm and the transforms are exact finite sums. The function `f` is a
//! sample vector over the nodes of the measure (atoms first, then cells), with
//! cells carrying a constant value.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{CMat, I};
use crate::measure::{wrap_angle, Measure, Support};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
    None,
}

/// Samples of an analytic function at points off the support.
#[derive(Clone, Debug, Serialize)]
pub struct AnalyticField {
    pub eval_points: Vec<Complex64>,
    pub values: Vec<Complex64>,
    pub side: Side,
}

/// Boundary values on a grid of the line (positions) or circle (angles).
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryField {
    pub support: Support,
    pub boundary_points: Vec<f64>,
    pub values: Vec<Complex64>,
    pub converged: Vec<bool>,
}

impl BoundaryField {
    pub fn unconverged(&self) -> Vec<usize> {
        (0..self.converged.len()).filter(|&k| !self.converged[k]).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("point,re,im,converged\n");
        for k in 0..self.values.len() {
            s.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{}\n",
                self.boundary_points[k], self.values[k].re, self.values[k].im, self.converged[k]
            ));
        }
        s
    }
}

pub fn ones(mu: &Measure) -> Vec<Complex64> {
    vec![Complex64::new(1.0, 0.0); mu.dim()]
}

fn check_len(mu: &Measure, f: &[Complex64]) -> Result<()> {
    if f.len() != mu.dim() {
        return Err(Error::invalid(format!("function has {} samples, measure has {} nodes", f.len(), mu.dim())));
    }
    Ok(())
}

/// `Log(1 + q)` accurate for small `q`.
fn log1p_c(q: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * q.re + q.norm_sqr()).ln_1p();
    let im = q.im.atan2(1.0 + q.re);
    Complex64::new(re, im)
}

/// `1 − e^{iu}` without cancellation.
pub fn one_minus_expi(u: f64) -> Complex64 {
    let h = 0.5 * u;
    -2.0 * I * h.sin() * Complex64::from_polar(1.0, h)
}

/// `∫_a^b dt/(t − λ)` for `λ` off the closed cell.
fn line_cell(a: f64, b: f64, lambda: Complex64) -> Complex64 {
    // Log((b−λ)/(a−λ)) = log1p((b−a)/(a−λ)); both factors lie in one half-plane
    log1p_c(Complex64::new(b - a, 0.0) / (a - lambda))
}

fn line_cell_limit(a: f64, b: f64, x: f64, side: Side) -> Result<Complex64> {
    if x == a || x == b {
        return Err(Error::Pole(format!("{x} is a density cell edge")));
    }
    if x > a && x < b {
        let s = match side {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
            Side::None => return Err(Error::BoundaryPoint(format!("{x}"))),
        };
        Ok(Complex64::new(((b - x) / (x - a)).ln(), s * PI))
    } else {
        Ok(line_cell(a, b, Complex64::new(x, 0.0)))
    }
}

/// `(1/2π) ∫_{θa}^{θb} dθ / (1 − e^{−iθ} c)` for `|c| ≠ 1`, or its limit as
/// `c → e^{iφ}` from inside (`Plus`) or outside (`Minus`).
fn circle_cell(ta: f64, tb: f64, c: CircleArg) -> Result<Complex64> {
    let inside = match c {
        CircleArg::Point(z) => z.norm() < 1.0,
        CircleArg::Limit(_, Side::Plus) => true,
        CircleArg::Limit(_, _) => false,
    };
    // factor 1 − c e^{−iθ} (inside) or 1 − e^{iθ}/c (outside)
    let factor = |t: f64| -> Complex64 {
        match c {
            CircleArg::Point(z) => {
                if inside {
                    1.0 - z * Complex64::from_polar(1.0, -t)
                } else {
                    1.0 - Complex64::from_polar(1.0, t) / z
                }
            }
            CircleArg::Limit(phi, _) => {
                if inside {
                    one_minus_expi(phi - t)
                } else {
                    one_minus_expi(t - phi)
                }
            }
        }
    };
    let contains = match c {
        CircleArg::Limit(phi, _) => {
            let u_a = wrap_angle(phi - ta);
            let u_b = wrap_angle(phi - tb);
            if u_a == 0.0 || u_b == 0.0 {
                return Err(Error::Pole(format!("{phi} is a density cell edge")));
            }
            // phi inside (ta, tb) modulo 2π
            let rel = (phi - ta).rem_euclid(2.0 * PI);
            rel < tb - ta
        }
        CircleArg::Point(_) => false,
    };
    let fa = factor(ta);
    let h = tb - ta;
    let dlog = if contains {
        factor(tb).ln() - fa.ln()
    } else {
        // fb − fa in closed form to avoid cancellation on narrow cells
        let diff = match c {
            CircleArg::Point(z) if inside => z * Complex64::from_polar(1.0, -ta) * one_minus_expi(-h),
            CircleArg::Point(z) => Complex64::from_polar(1.0, ta) * one_minus_expi(h) / z,
            CircleArg::Limit(phi, _) if inside => Complex64::from_polar(1.0, phi - ta) * one_minus_expi(-h),
            CircleArg::Limit(phi, _) => Complex64::from_polar(1.0, ta - phi) * one_minus_expi(h),
        };
        log1p_c(diff / fa)
    };
    let g = if inside { Complex64::new(tb - ta, 0.0) - I * dlog } else { -I * dlog };
    Ok(g / (2.0 * PI))
}

#[derive(Clone, Copy)]
enum CircleArg {
    Point(Complex64),
    Limit(f64, Side),
}

/// `Rfμ(λ) = ∫ f(t) dμ(t)/(t − λ)` on the line.
pub fn cauchy_line(mu: &Measure, f: &[Complex64], lambda: Complex64) -> Result<Complex64> {
    if mu.support != Support::Line {
        return Err(Error::DomainMismatch("line transform of a circle measure".into()));
    }
    check_len(mu, f)?;
    let mut s = Complex64::new(0.0, 0.0);
    for (k, a) in mu.atoms.iter().enumerate() {
        let d = a.position - lambda;
        if d == Complex64::new(0.0, 0.0) {
            return Err(Error::Pole(format!("{lambda}")));
        }
        s += f[k] * a.weight / d;
    }
    if let Some(g) = &mu.grid {
        let na = mu.n_atoms();
        for j in 0..g.n {
            if g.density[j] == 0.0 || f[na + j] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (lo, hi) = g.cell(j);
            if lambda.im == 0.0 && lambda.re >= lo && lambda.re <= hi {
                return Err(Error::BoundaryPoint(format!("{lambda}")));
            }
            s += f[na + j] * g.density[j] * line_cell(lo, hi, lambda);
        }
    }
    Ok(s)
}

/// Exact limit of `Rfμ(x ± iδ)` as `δ → 0⁺` at a real point off the atoms.
pub fn cauchy_line_limit(mu: &Measure, f: &[Complex64], x: f64, side: Side) -> Result<Complex64> {
    if mu.support != Support::Line {
        return Err(Error::DomainMismatch("line transform of a circle measure".into()));
    }
    check_len(mu, f)?;
    let mut s = Complex64::new(0.0, 0.0);
    for (k, a) in mu.atoms.iter().enumerate() {
        if a.position == x {
            return Err(Error::Pole(format!("{x}")));
        }
        s += f[k] * a.weight / (a.position - x);
    }
    if let Some(g) = &mu.grid {
        let na = mu.n_atoms();
        for j in 0..g.n {
            if g.density[j] == 0.0 {
                continue;
            }
            let (lo, hi) = g.cell(j);
            s += f[na + j] * g.density[j] * line_cell_limit(lo, hi, x, side)?;
        }
    }
    Ok(s)
}

fn circle_sum(mu: &Measure, f: &[Complex64], arg: CircleArg) -> Result<Complex64> {
    if mu.support != Support::Circle {
        return Err(Error::DomainMismatch("circle transform of a line measure".into()));
    }
    check_len(mu, f)?;
    let mut s = Complex64::new(0.0, 0.0);
    for (k, a) in mu.atoms.iter().enumerate() {
        let d = match arg {
            CircleArg::Point(z) => 1.0 - Complex64::from_polar(1.0, -a.position) * z,
            CircleArg::Limit(phi, _) => {
                let u = wrap_angle(phi - a.position);
                if u == 0.0 {
                    return Err(Error::Pole(format!("angle {phi}")));
                }
                one_minus_expi(u)
            }
        };
        if d == Complex64::new(0.0, 0.0) {
            return Err(Error::Pole(format!("atom {k}")));
        }
        s += f[k] * a.weight / d;
    }
    if let Some(g) = &mu.grid {
        let na = mu.n_atoms();
        for j in 0..g.n {
            if g.density[j] == 0.0 || f[na + j] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (lo, hi) = g.cell(j);
            s += f[na + j] * g.density[j] * circle_cell(lo, hi, arg)?;
        }
    }
    Ok(s)
}

fn integral(mu: &Measure, f: &[Complex64]) -> Complex64 {
    mu.nodes().iter().zip(f).map(|(n, v)| v * n.mass).sum()
}

/// `Rτ(λ) = ∫ f dμ(ξ)/(1 − ξ̄λ)`, `|λ| ≠ 1`.
pub fn cauchy_circle_r(mu: &Measure, f: &[Complex64], lambda: Complex64) -> Result<Complex64> {
    if (lambda.norm() - 1.0).abs() < 1e-15 {
        return Err(Error::BoundaryPoint(format!("{lambda}")));
    }
    circle_sum(mu, f, CircleArg::Point(lambda))
}

/// `R₁τ(λ) = ∫ ξ̄λ f dμ(ξ)/(1 − ξ̄λ)`.
pub fn cauchy_circle_r1(mu: &Measure, f: &[Complex64], lambda: Complex64) -> Result<Complex64> {
    Ok(cauchy_circle_r(mu, f, lambda)? - integral(mu, f))
}

/// `R₂τ(λ) = ∫ (1 + ξ̄λ)/(1 − ξ̄λ) f dμ(ξ)`.
pub fn cauchy_circle_r2(mu: &Measure, f: &[Complex64], lambda: Complex64) -> Result<Complex64> {
    Ok(2.0 * cauchy_circle_r(mu, f, lambda)? - integral(mu, f))
}

/// Exact radial limit of `Rfμ(r e^{iφ})` as `r → 1∓` (`Plus` from inside).
pub fn cauchy_circle_limit(mu: &Measure, f: &[Complex64], phi: f64, side: Side) -> Result<Complex64> {
    if side == Side::None {
        return Err(Error::invalid("boundary limit needs a side"));
    }
    circle_sum(mu, f, CircleArg::Limit(phi, side))
}

/// Line regularizations of the kernel `1/(s − t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LineFamily {
    CauchyPlus,
    CauchyMinus,
    Truncation,
    Smooth,
}

/// Smooth regularizer: 0 on `|x| ≤ 1`, 1 on `|x| ≥ 2`.
pub fn smooth_cutoff(x: f64) -> f64 {
    let t = x.abs() - 1.0;
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

pub fn line_kernel(family: LineFamily, eps: f64, s: f64, t: f64) -> Complex64 {
    let d = s - t;
    match family {
        LineFamily::CauchyPlus => 1.0 / Complex64::new(d, eps),
        LineFamily::CauchyMinus => 1.0 / Complex64::new(d, -eps),
        LineFamily::Truncation => {
            if d.abs() > eps {
                Complex64::new(1.0 / d, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
        LineFamily::Smooth => {
            let m = smooth_cutoff(d / eps);
            if m == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(m / d, 0.0)
            }
        }
    }
}

/// Matrix of `T_ε : L²(μ) → L²(ν)` in the orthonormal node bases; cells are
/// lumped at their midpoints.
pub fn regularized_t_eps_line(mu: &Measure, nu: &Measure, family: LineFamily, eps: f64) -> Result<CMat> {
    if !(eps > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if mu.support != Support::Line || nu.support != Support::Line {
        return Err(Error::DomainMismatch("line regularization needs line measures".into()));
    }
    let src = mu.nodes();
    let dst = nu.nodes();
    Ok(CMat::from_fn(dst.len(), src.len(), |i, j| {
        line_kernel(family, eps, dst[i].position, src[j].position) * (dst[i].mass * src[j].mass).sqrt()
    }))
}

/// Matrix of `T_r f(z) = ∫ f(ξ) dμ(ξ)/(1 − rξ̄z) : L²(μ) → L²(ν)`.
pub fn regularized_t_r_circle(mu: &Measure, nu: &Measure, r: f64) -> Result<CMat> {
    if !(r >= 0.0) || r == 1.0 {
        return Err(Error::invalid("r must be nonnegative and different from 1"));
    }
    if mu.support != Support::Circle || nu.support != Support::Circle {
        return Err(Error::DomainMismatch("radial regularization needs circle measures".into()));
    }
    let src = mu.nodes();
    let dst = nu.nodes();
    Ok(CMat::from_fn(dst.len(), src.len(), |i, j| {
        let k = 1.0 / (1.0 - r * Complex64::from_polar(1.0, dst[i].position - src[j].position));
        k * (dst[i].mass * src[j].mass).sqrt()
    }))
}

const RADIAL_TOL: f64 = 1e-8;
const RADIAL_STEPS: usize = 44;

/// Richardson-accelerated radial limit of `v(h)` as `h = h₀2^{-k} → 0`;
/// agreement is measured relative to `max(|v|, 1)`.
pub fn radial_limit(v: impl FnMut(f64) -> Result<Complex64>, h0: f64) -> Result<(Complex64, bool)> {
    radial_limit_with(v, h0, RADIAL_TOL)
}

/// [`radial_limit`] with an explicit agreement tolerance.
pub fn radial_limit_with(mut v: impl FnMut(f64) -> Result<Complex64>, h0: f64, tol: f64) -> Result<(Complex64, bool)> {
    let mut prev = v(h0)?;
    let mut extrap: Vec<Complex64> = vec![];
    for k in 1..=RADIAL_STEPS {
        let cur = v(h0 * 0.5f64.powi(k as i32))?;
        extrap.push(2.0 * cur - prev);
        prev = cur;
        let m = extrap.len();
        if m >= 3 {
            let e = &extrap[m - 3..];
            let scale = e[2].norm().max(1.0);
            if (e[2] - e[1]).norm() <= tol * scale && (e[1] - e[0]).norm() <= tol * scale {
                return Ok((e[2], true));
            }
        }
    }
    Ok((*extrap.last().unwrap(), false))
}

/// `T_± f` on boundary points by radial approach with convergence flags.
pub fn boundary_values(mu: &Measure, f: &[Complex64], side: Side, points: &[f64]) -> Result<BoundaryField> {
    check_len(mu, f)?;
    let sign = match side {
        Side::Plus => 1.0,
        Side::Minus => -1.0,
        Side::None => return Err(Error::invalid("boundary values need a side")),
    };
    let res: Vec<(Complex64, bool)> = points
        .par_iter()
        .map(|&p| match mu.support {
            Support::Line => radial_limit(|h| cauchy_line(mu, f, Complex64::new(p, sign * h)), 1.0),
            Support::Circle => radial_limit(|h| cauchy_circle_r(mu, f, Complex64::from_polar(1.0 - sign * h, p)), 0.5),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundaryField {
        support: mu.support,
        boundary_points: points.to_vec(),
        values: res.iter().map(|r| r.0).collect(),
        converged: res.iter().map(|r| r.1).collect(),
    })
}

/// Boundary points strictly between consecutive atoms (cyclically on the
/// circle), `per_gap` equispaced points per gap.
pub fn interleaving_grid(mu: &Measure, per_gap: usize) -> Vec<f64> {
    let mut pos: Vec<f64> = mu.atoms.iter().map(|a| a.position).collect();
    pos.sort_by(|a, b| a.total_cmp(b));
    let mut out = vec![];
    let fill = |lo: f64, hi: f64, out: &mut Vec<f64>| {
        for k in 1..=per_gap {
            out.push(lo + (hi - lo) * k as f64 / (per_gap + 1) as f64);
        }
    };
    match mu.support {
        Support::Line => {
            if pos.is_empty() {
                fill(-1.0, 1.0, &mut out);
                return out;
            }
            let span = (pos[pos.len() - 1] - pos[0]).max(1.0);
            fill(pos[0] - span, pos[0], &mut out);
            for w in pos.windows(2) {
                fill(w[0], w[1], &mut out);
            }
            fill(pos[pos.len() - 1], pos[pos.len() - 1] + span, &mut out);
        }
        Support::Circle => {
            if pos.is_empty() {
                fill(-PI, PI, &mut out);
                return out;
            }
            for w in pos.windows(2) {
                fill(w[0], w[1], &mut out);
            }
            fill(pos[pos.len() - 1], pos[0] + 2.0 * PI, &mut out);
            for p in &mut out {
                *p = wrap_angle(*p);
            }
        }
    }
    out
}
