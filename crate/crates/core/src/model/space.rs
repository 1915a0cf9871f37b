use num_complex::Complex64;
use serde::Serialize;

use super::{BoundaryGrid, CharacteristicFunction, DefectVectorsModel};

/// Singular values of `W_θ(z)` below this are treated as zero.
pub const MP_CUTOFF: f64 = 1e-10;

/// Element of `(H², clos ΔL²) ⊖ (θ, Δ)H²`, sampled on the boundary grid.
#[derive(Clone, Debug, Serialize)]
pub struct ModelVectorSNF {
    pub g1: Vec<Complex64>,
    pub g2: Vec<Complex64>,
}

/// Pair `(g₊, g₋)` with `g₊ ∈ H²`, `g₋ ∈ H²₋`, `g₋ − θ̄g₊ ∈ ΔL²`.
#[derive(Clone, Debug, Serialize)]
pub struct ModelVectorDBR {
    pub g_plus: Vec<Complex64>,
    pub g_minus: Vec<Complex64>,
}

/// Whether the grid point belongs to the support of `Δ` under the cutoff.
pub(crate) fn on_support(theta: Complex64, delta: f64) -> bool {
    delta * delta / (1.0 + theta.norm()) > MP_CUTOFF
}

fn zeros(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n]
}

impl ModelVectorSNF {
    pub fn zero(n: usize) -> Self {
        ModelVectorSNF { g1: zeros(n), g2: zeros(n) }
    }

    pub fn norm(&self, g: &BoundaryGrid) -> f64 {
        self.inner(self, g).re.max(0.0).sqrt()
    }

    pub fn inner(&self, other: &ModelVectorSNF, g: &BoundaryGrid) -> Complex64 {
        g.inner(&self.g1, &other.g1) + g.inner(&self.g2, &other.g2)
    }

    pub fn distance(&self, other: &ModelVectorSNF, g: &BoundaryGrid) -> f64 {
        self.axpy(-1.0, other).norm(g)
    }

    /// `self + a·other`
    pub fn axpy(&self, a: impl Into<Complex64>, other: &ModelVectorSNF) -> ModelVectorSNF {
        let a = a.into();
        ModelVectorSNF {
            g1: self.g1.iter().zip(&other.g1).map(|(x, y)| x + a * y).collect(),
            g2: self.g2.iter().zip(&other.g2).map(|(x, y)| x + a * y).collect(),
        }
    }

    pub fn scale(&self, a: impl Into<Complex64>) -> ModelVectorSNF {
        let a = a.into();
        ModelVectorSNF { g1: self.g1.iter().map(|x| a * x).collect(), g2: self.g2.iter().map(|x| a * x).collect() }
    }

    /// `‖v − P_θ v‖ / ‖v‖`.
    pub fn membership_residual(&self, theta: &CharacteristicFunction) -> f64 {
        let p = snf_project(theta, &self.g1, &self.g2);
        let n = self.norm(&theta.grid);
        if n == 0.0 {
            return 0.0;
        }
        self.distance(&p, &theta.grid) / n
    }

    /// Largest pointwise difference relative to the largest entry of `self`.
    pub fn max_relative_difference(&self, other: &ModelVectorSNF) -> f64 {
        let scale = self.g1.iter().chain(&self.g2).map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        let d1 = crate::linalg::max_abs_diff(&self.g1, &other.g1);
        let d2 = crate::linalg::max_abs_diff(&self.g2, &other.g2);
        d1.max(d2) / scale
    }
}

impl ModelVectorDBR {
    /// Norm in `L²(W_θ^{[-1]})`, with the Moore–Penrose inverse taken pointwise.
    pub fn norm(&self, theta: &CharacteristicFunction) -> f64 {
        let mut s = 0.0;
        for k in 0..theta.grid.n {
            let w = moore_penrose(theta.theta[k], theta.delta[k]);
            let v = [self.g_plus[k], self.g_minus[k]];
            for i in 0..2 {
                for j in 0..2 {
                    s += (v[i].conj() * w[i][j] * v[j]).re;
                }
            }
        }
        (s / theta.grid.n as f64).max(0.0).sqrt()
    }

    /// `‖g₋ − θ̄g₊‖` restricted to the set where `Δ` vanishes.
    pub fn membership_residual(&self, theta: &CharacteristicFunction) -> f64 {
        let g = &theta.grid;
        let r: Vec<Complex64> = (0..g.n)
            .map(|k| {
                if on_support(theta.theta[k], theta.delta[k]) {
                    Complex64::new(0.0, 0.0)
                } else {
                    self.g_minus[k] - theta.theta[k].conj() * self.g_plus[k]
                }
            })
            .collect();
        g.norm(&r)
    }
}

/// `W^{[-1]}` for `W = (1, θ; θ̄, 1)`, given `Δ = (1 − |θ|²)^{1/2}`.
fn moore_penrose(theta: Complex64, delta: f64) -> [[Complex64; 2]; 2] {
    let one = Complex64::new(1.0, 0.0);
    // eigenvalues 1 ± |θ|; the small one is Δ²/(1 + |θ|)
    if on_support(theta, delta) {
        let d = delta * delta;
        [[one / d, -theta / d], [-theta.conj() / d, one / d]]
    } else {
        let u = if theta.norm() > 0.0 { theta / theta.norm() } else { one };
        let big = 1.0 + theta.norm();
        // projection onto (1, ū)/√2 divided by the large eigenvalue
        let s = 0.5 / big;
        [[one * s, u * s], [u.conj() * s, one * s]]
    }
}

/// Largest entry of `(1, θ; 0, Δ) W^{[-1]} (1, 0; θ̄, Δ) − diag(1, 𝟙_{Δ>0})`
/// over the grid.
pub fn moore_penrose_residual(theta: &CharacteristicFunction) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..theta.grid.n {
        let t = theta.theta[k];
        let d = theta.delta[k];
        let w = moore_penrose(t, d);
        let l = [[Complex64::new(1.0, 0.0), t], [Complex64::new(0.0, 0.0), Complex64::new(d, 0.0)]];
        let r = [[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], [t.conj(), Complex64::new(d, 0.0)]];
        let on_b = on_support(t, d);
        #[allow(clippy::needless_range_loop)]
        for i in 0..2 {
            for j in 0..2 {
                let mut s = Complex64::new(0.0, 0.0);
                for a in 0..2 {
                    for b in 0..2 {
                        s += l[i][a] * w[a][b] * r[b][j];
                    }
                }
                let want = match (i, j) {
                    (0, 0) => 1.0,
                    (1, 1) if on_b => 1.0,
                    _ => 0.0,
                };
                worst = worst.max((s - want).norm());
            }
        }
    }
    worst
}

/// Orthogonal projection of `(g1, g2)` onto `𝒦_θ`.
///
/// `h ↦ (θh, Δh)` is an isometry of `H²` because `|θ|² + Δ² = 1` on the
/// circle, so the projection onto its range is `(θ, Δ)P₊(θ̄x₁ + Δx₂)`.
pub fn snf_project(theta: &CharacteristicFunction, g1: &[Complex64], g2: &[Complex64]) -> ModelVectorSNF {
    let g = &theta.grid;
    let h1 = g.analytic_part(g1);
    let h2: Vec<Complex64> =
        (0..g.n).map(|k| if on_support(theta.theta[k], theta.delta[k]) { g2[k] } else { Complex64::new(0.0, 0.0) }).collect();
    let mixed: Vec<Complex64> = (0..g.n).map(|k| theta.theta[k].conj() * h1[k] + theta.delta[k] * h2[k]).collect();
    let s = g.analytic_part(&mixed);
    ModelVectorSNF {
        g1: (0..g.n).map(|k| h1[k] - theta.theta[k] * s[k]).collect(),
        g2: (0..g.n).map(|k| h2[k] - theta.delta[k] * s[k]).collect(),
    }
}

/// `𝓜_θ v = P_θ(zv)`.
pub fn compressed_shift_projection(theta: &CharacteristicFunction, v: &ModelVectorSNF) -> ModelVectorSNF {
    let z = &theta.grid.points;
    let g1: Vec<Complex64> = v.g1.iter().zip(z).map(|(a, z)| a * z).collect();
    let g2: Vec<Complex64> = v.g2.iter().zip(z).map(|(a, z)| a * z).collect();
    snf_project(theta, &g1, &g2)
}

/// `𝓜_θ v = zv − zc₁⟨v, c₁⟩ − θ(0)c⟨v, c₁⟩`.
pub fn compressed_shift_rank_one(theta: &CharacteristicFunction, dv: &DefectVectorsModel, v: &ModelVectorSNF) -> ModelVectorSNF {
    let g = &theta.grid;
    let p = v.inner(&dv.c1, g);
    let t0 = dv.theta_at_0;
    let z = &g.points;
    ModelVectorSNF {
        g1: (0..g.n).map(|k| z[k] * v.g1[k] - p * (z[k] * dv.c1.g1[k] + t0 * dv.c.g1[k])).collect(),
        g2: (0..g.n).map(|k| z[k] * v.g2[k] - p * (z[k] * dv.c1.g2[k] + t0 * dv.c.g2[k])).collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CompressedShiftAgreement {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Largest `‖𝓜v‖/‖v‖` over the samples.
    pub max_gain: f64,
}

impl CompressedShiftAgreement {
    pub fn compute(theta: &CharacteristicFunction, dv: &DefectVectorsModel, samples: &[ModelVectorSNF]) -> Self {
        let g = &theta.grid;
        let mut residuals = vec![];
        let mut gain: f64 = 0.0;
        for v in samples {
            let a = compressed_shift_projection(theta, v);
            let b = compressed_shift_rank_one(theta, dv, v);
            let n = v.norm(g).max(1e-300);
            residuals.push(a.distance(&b, g) / n);
            gain = gain.max(a.norm(g) / n);
        }
        let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
        CompressedShiftAgreement { residuals, max_residual, max_gain: gain }
    }
}

/// `(g₁, g₂) ↦ (g₁, θ̄g₁ + Δg₂)`.
pub fn transcription_map(theta: &CharacteristicFunction, v: &ModelVectorSNF) -> ModelVectorDBR {
    ModelVectorDBR {
        g_plus: v.g1.clone(),
        g_minus: (0..theta.grid.n).map(|k| theta.theta[k].conj() * v.g1[k] + theta.delta[k] * v.g2[k]).collect(),
    }
}

/// Recovers `g₂ = (g₋ − θ̄g₊)/Δ` where `Δ > 0`; `g₂ = 0` where `Δ` vanishes.
pub fn transcription_inverse(theta: &CharacteristicFunction, d: &ModelVectorDBR) -> ModelVectorSNF {
    ModelVectorSNF {
        g1: d.g_plus.clone(),
        g2: (0..theta.grid.n)
            .map(|k| {
                let dl = theta.delta[k];
                if on_support(theta.theta[k], dl) {
                    (d.g_minus[k] - theta.theta[k].conj() * d.g_plus[k]) / dl
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect(),
    }
}
