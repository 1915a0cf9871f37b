use num_complex::Complex64;

use super::CharacteristicFunction;
use crate::cauchy::{cauchy_circle_r, ones};
use crate::error::{Error, Result};
use crate::linalg;
use crate::measure::Measure;
use crate::perturbation::{build_u_param, UnitaryFamily};

/// Orthonormal rational basis of `𝒦_θ = H² ⊖ θH²` for a finite Blaschke
/// product `θ`, built from its zeros `λ_j`:
/// `φ_j(z) = (1 − |λ_j|²)^{1/2}/(1 − λ̄_j z) · Π_{i<j} (z − λ_i)/(1 − λ̄_i z)`.
#[derive(Clone, Debug)]
pub struct InnerBasis {
    pub zeros: Vec<Complex64>,
    /// Unimodular factor with `θ = κ Π_j (z − λ_j)/(1 − λ̄_j z)`.
    pub kappa: Complex64,
}

fn factor(l: Complex64, z: Complex64) -> Complex64 {
    (z - l) / (1.0 - l.conj() * z)
}

fn one_minus_abs2(l: Complex64) -> f64 {
    let r = l.norm();
    (1.0 - r) * (1.0 + r)
}

impl InnerBasis {
    pub fn from_zeros(zeros: Vec<Complex64>, kappa: Complex64) -> Result<Self> {
        if zeros.iter().any(|z| !(z.norm() < 1.0)) {
            return Err(Error::invalid("Blaschke zeros must lie in the open disc"));
        }
        Ok(InnerBasis { zeros, kappa })
    }

    /// Zeros of `θ_γ` for an atomic `μ`: the eigenvalues of `U_γ`, polished by
    /// Newton's method on `R𝟏μ(λ) = 1/(1 − γ)`.
    pub fn for_characteristic(theta: &CharacteristicFunction) -> Result<Self> {
        let mu = &theta.measure;
        if !mu.is_atomic() {
            return Err(Error::DomainMismatch("the rational basis needs an atomic measure".into()));
        }
        let zeros = blaschke_zeros(mu, theta.gamma)?;
        let probe = Complex64::from_polar(1.0, theta.grid.angles[0]);
        let b: Complex64 = zeros.iter().map(|&l| factor(l, probe)).product();
        let kappa = theta.theta[0] / b;
        InnerBasis::from_zeros(zeros, kappa)
    }

    pub fn dim(&self) -> usize {
        self.zeros.len()
    }

    /// `(φ_0(z), …, φ_{n−1}(z))`.
    pub fn eval(&self, z: Complex64) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.zeros.len());
        let mut prod = Complex64::new(1.0, 0.0);
        for &l in &self.zeros {
            out.push(prod * one_minus_abs2(l).sqrt() / (1.0 - l.conj() * z));
            prod *= factor(l, z);
        }
        out
    }

    pub fn blaschke(&self, z: Complex64) -> Complex64 {
        self.kappa * self.zeros.iter().map(|&l| factor(l, z)).product::<Complex64>()
    }

    /// Coordinates of the reproducing kernel `k_λ` (`λ ∈ 𝔻`, or a point of the
    /// circle where `θ` is analytic): `⟨k_λ, φ_j⟩ = conj φ_j(λ)`.
    pub fn kernel_coordinates(&self, lambda: Complex64) -> Vec<Complex64> {
        self.eval(lambda).iter().map(|v| v.conj()).collect()
    }

    /// Evaluates `Σ_j a_j φ_j(z)`.
    pub fn synthesize(&self, coords: &[Complex64], z: Complex64) -> Complex64 {
        self.eval(z).iter().zip(coords).map(|(p, a)| p * a).sum()
    }
}

fn blaschke_zeros(mu: &Measure, gamma: Complex64) -> Result<Vec<Complex64>> {
    let fam = UnitaryFamily { base: mu.clone(), param: gamma };
    let u = build_u_param(&fam)?;
    let mut zeros = linalg::eigenvalues(&u.matrix)?;
    let one = ones(mu);
    let target = 1.0 / (1.0 - gamma);
    let pts = mu.atom_points();
    let w = mu.atom_weights();
    for l in zeros.iter_mut() {
        for _ in 0..4 {
            if !(l.norm() < 1.0) {
                break;
            }
            let r = cauchy_circle_r(mu, &one, *l)?;
            let dr: Complex64 = pts.iter().zip(&w).map(|(x, &wk)| wk * x.conj() / (1.0 - x.conj() * *l).powi(2)).sum();
            let step = (r - target) / dr;
            if !step.is_finite() {
                break;
            }
            let next = *l - step;
            if !(next.norm() < 1.0) {
                break;
            }
            *l = next;
            if step.norm() < 1e-16 {
                break;
            }
        }
        if !(l.norm() < 1.0) {
            return Err(Error::Degenerate(format!("eigenvalue {l} of U_γ is not inside the disc")));
        }
    }
    zeros.sort_by(|a, b| a.arg().total_cmp(&b.arg()).then(a.norm().total_cmp(&b.norm())));
    Ok(zeros)
}
