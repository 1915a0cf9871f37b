use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::restricted::{restricted_bound_estimate, RestrictedOptions};
use super::{Kernel, PointMass};
use crate::error::{Error, Result};

/// Multipliers `M(x, y) = m(x − y)` on the line or `M(z, ξ) = m(z/ξ)` on the
/// circle, with `m` the Fourier transform of a measure of finite variation.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchurMultiplierSpec {
    /// `m(s) = Σ a_k e^{−i s t_k}`.
    LineAtoms { positions: Vec<f64>, weights: Vec<Complex64> },
    /// `m(u) = Σ a_k u^{n_k}`.
    CircleCoefficients { powers: Vec<i64>, weights: Vec<Complex64> },
    /// `m(s) = s/(s − i·sign·ε)`: one minus the transform of a one-sided exponential.
    CauchyLine { eps: f64, sign: f64 },
    /// `m(u) = (1 − u)/(1 − r u)`.
    CauchyCircle { r: f64 },
}

impl SchurMultiplierSpec {
    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        match self {
            SchurMultiplierSpec::LineAtoms { positions, weights } => {
                let s = (x - y).re;
                positions.iter().zip(weights).map(|(t, a)| a * Complex64::from_polar(1.0, -s * t)).sum()
            }
            SchurMultiplierSpec::CircleCoefficients { powers, weights } => {
                let u = x * y.conj();
                powers.iter().zip(weights).map(|(&n, a)| a * u.powi(n as i32)).sum()
            }
            SchurMultiplierSpec::CauchyLine { eps, sign } => {
                let s = x - y;
                s / (s - Complex64::new(0.0, sign * eps))
            }
            SchurMultiplierSpec::CauchyCircle { r } => {
                let u = x * y.conj();
                (1.0 - u) / (1.0 - r * u)
            }
        }
    }

    /// Total variation of the measure whose transform is `m`; bounds the Schur norm.
    pub fn variation(&self) -> f64 {
        match self {
            SchurMultiplierSpec::LineAtoms { weights, .. } | SchurMultiplierSpec::CircleCoefficients { weights, .. } => {
                weights.iter().map(|a| a.norm()).sum()
            }
            SchurMultiplierSpec::CauchyLine { .. } => 2.0,
            SchurMultiplierSpec::CauchyCircle { r } => {
                if *r < 1.0 {
                    2.0
                } else {
                    2.0 / r
                }
            }
        }
    }

    /// `m(·/ε)`; the underlying measure is only rescaled, so the variation is unchanged.
    pub fn dilate(&self, eps: f64) -> Self {
        match self {
            SchurMultiplierSpec::LineAtoms { positions, weights } => {
                SchurMultiplierSpec::LineAtoms { positions: positions.iter().map(|t| t / eps).collect(), weights: weights.clone() }
            }
            SchurMultiplierSpec::CauchyLine { eps: e, sign } => SchurMultiplierSpec::CauchyLine { eps: e * eps, sign: *sign },
            other => other.clone(),
        }
    }

    /// Laurent coefficients `(n, a_n)` of the circle Cauchy multiplier,
    /// `terms` of them beyond the constant.
    pub fn laurent_coefficients(&self, terms: usize) -> Option<Vec<(i64, f64)>> {
        let SchurMultiplierSpec::CauchyCircle { r } = *self else { return None };
        let mut out = vec![];
        if r < 1.0 {
            out.push((0, 1.0));
            for n in 1..=terms as i32 {
                out.push((n as i64, r.powi(n) - r.powi(n - 1)));
            }
        } else {
            out.push((0, 1.0 / r));
            for n in 1..=terms as i32 {
                out.push((-(n as i64), r.powi(-n - 1) - r.powi(-n)));
            }
        }
        Some(out)
    }
}

pub fn cauchy_multiplier_line(eps: f64, sign: f64) -> Result<SchurMultiplierSpec> {
    if !(eps > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if sign != 1.0 && sign != -1.0 {
        return Err(Error::invalid("sign must be ±1"));
    }
    Ok(SchurMultiplierSpec::CauchyLine { eps, sign })
}

pub fn cauchy_multiplier_circle(r: f64) -> Result<SchurMultiplierSpec> {
    if !(r >= 0.0) || r == 1.0 {
        return Err(Error::invalid("r must be nonnegative and different from 1"));
    }
    Ok(SchurMultiplierSpec::CauchyCircle { r })
}

/// Pointwise product `K·M`.
pub struct MultipliedKernel<'a> {
    pub kernel: &'a dyn Kernel,
    pub multiplier: SchurMultiplierSpec,
}

impl Kernel for MultipliedKernel<'_> {
    fn eval(&self, x: Complex64, y: Complex64) -> Option<Complex64> {
        Some(self.kernel.eval(x, y)? * self.multiplier.eval(x, y))
    }

    fn name(&self) -> String {
        format!("{}·M", self.kernel.name())
    }
}

pub fn schur_apply<'a>(kernel: &'a dyn Kernel, multiplier: &SchurMultiplierSpec) -> MultipliedKernel<'a> {
    MultipliedKernel { kernel, multiplier: multiplier.clone() }
}

#[derive(Clone, Debug, Serialize)]
pub struct SchurReport {
    pub product_lower: f64,
    pub kernel_upper: f64,
    pub variation: f64,
    /// `variation·kernel_upper − product_lower`
    pub slack: f64,
    pub passed: bool,
}

/// Checks `[KM]^r ≤ var σ · [K]^r` with the estimated left side and the
/// certified right side.
pub fn schur_bound_check(
    kernel: &dyn Kernel,
    multiplier: &SchurMultiplierSpec,
    src: &PointMass,
    dst: &PointMass,
    opts: &RestrictedOptions,
) -> Result<SchurReport> {
    let km = schur_apply(kernel, multiplier);
    let lhs = restricted_bound_estimate(&km, src, dst, opts)?;
    let rhs = restricted_bound_estimate(kernel, src, dst, &RestrictedOptions { trials: 0, ..opts.clone() })?;
    let variation = multiplier.variation();
    let bound = variation * rhs.upper;
    Ok(SchurReport {
        product_lower: lhs.lower,
        kernel_upper: rhs.upper,
        variation,
        slack: bound - lhs.lower,
        passed: lhs.lower <= bound * (1.0 + 1e-12) + 1e-300,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sio::{BaseKernel, Geometry, KernelSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pts(rng: &mut ChaCha8Rng, n: usize) -> PointMass {
        PointMass {
            geometry: Geometry::Line,
            points: (0..n).map(|_| Complex64::new(rng.random::<f64>() * 4.0 - 2.0, 0.0)).collect(),
            masses: (0..n).map(|_| 0.1 + rng.random::<f64>()).collect(),
        }
    }

    #[test]
    fn point_mass_at_origin_is_identity() {
        let m = SchurMultiplierSpec::LineAtoms { positions: vec![0.0], weights: vec![Complex64::new(1.0, 0.0)] };
        let x = Complex64::new(1.3, 0.0);
        let y = Complex64::new(-0.2, 0.0);
        assert_eq!(m.eval(x, y), Complex64::new(1.0, 0.0));
        let k = KernelSpec::named(BaseKernel::Hilbert);
        assert_eq!(schur_apply(&k, &m).eval(x, y), k.eval(x, y));
    }

    #[test]
    fn unimodular_phase_does_not_increase_estimate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (src, dst) = (pts(&mut rng, 7), pts(&mut rng, 6));
        let m = SchurMultiplierSpec::LineAtoms { positions: vec![1.7], weights: vec![Complex64::new(1.0, 0.0)] };
        let rep = schur_bound_check(&KernelSpec::named(BaseKernel::Hilbert), &m, &src, &dst, &RestrictedOptions::default()).unwrap();
        assert!(rep.passed && rep.variation == 1.0);
    }

    #[test]
    fn dilation_keeps_variation() {
        let m = SchurMultiplierSpec::LineAtoms {
            positions: vec![0.0, 1.0, -2.5],
            weights: vec![Complex64::new(0.5, 0.5), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.3)],
        };
        for eps in [1e-3, 0.5, 7.0] {
            assert_eq!(m.dilate(eps).variation(), m.variation());
            let x = Complex64::new(0.7, 0.0);
            let y = Complex64::new(0.1, 0.0);
            let direct = m.eval(x / eps, y / eps);
            assert!((m.dilate(eps).eval(x, y) - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn line_cauchy_multiplier_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for sign in [1.0, -1.0] {
            let m = cauchy_multiplier_line(0.3, sign).unwrap();
            assert_eq!(m.eval(Complex64::new(0.4, 0.0), Complex64::new(0.4, 0.0)), Complex64::new(0.0, 0.0));
            assert!((m.eval(Complex64::new(1e9, 0.0), Complex64::new(0.0, 0.0)) - 1.0).norm() < 1e-9);
            for _ in 0..100 {
                let x = rng.random::<f64>() * 10.0 - 5.0;
                let y = rng.random::<f64>() * 10.0 - 5.0;
                let (xc, yc) = (Complex64::new(x, 0.0), Complex64::new(y, 0.0));
                let lhs = m.eval(xc, yc) / (x - y);
                let rhs = 1.0 / Complex64::new(x - y, -0.3 * sign);
                assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
            }
        }
        assert!(cauchy_multiplier_line(0.0, 1.0).is_err());
    }

    #[test]
    fn circle_cauchy_multiplier_coefficients() {
        for r in [0.0, 0.3, 0.9, 1.1, 2.0, 5.0] {
            let m = cauchy_multiplier_circle(r).unwrap();
            let z = Complex64::from_polar(1.0, 0.4);
            assert_eq!(m.eval(z, z), Complex64::new(0.0, 0.0));
            let coef = m.laurent_coefficients(4000).unwrap();
            let l1: f64 = coef.iter().map(|c| c.1.abs()).sum();
            assert!((l1 - m.variation()).abs() < 1e-12, "r={r}: {l1}");
            assert!(m.variation() <= 2.0);
            // the Laurent series reproduces m on the circle
            let xi = Complex64::from_polar(1.0, -1.3);
            let u = z * xi.conj();
            let series: Complex64 = coef.iter().map(|&(n, a)| a * u.powi(n as i32)).sum();
            assert!((series - m.eval(z, xi)).norm() < 1e-10);
            // product with 1/(1 − ξ̄z) is 1/(1 − rξ̄z)
            let k = KernelSpec::named(BaseKernel::CauchyCircle);
            let prod = schur_apply(&k, &m).eval(z, xi).unwrap();
            assert!((prod - 1.0 / (1.0 - r * u)).norm() < 1e-13);
        }
        assert!(cauchy_multiplier_circle(1.0).is_err());
    }

    #[test]
    fn random_pairs_never_violate_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let (src, dst) = (pts(&mut rng, 5), pts(&mut rng, 5));
            let n = 1 + (rng.random::<u32>() % 4) as usize;
            let m = SchurMultiplierSpec::LineAtoms {
                positions: (0..n).map(|_| rng.random::<f64>() * 6.0 - 3.0).collect(),
                weights: (0..n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect(),
            };
            let p = [2.0, 1.5, 4.0][(rng.random::<u32>() % 3) as usize];
            let opts = RestrictedOptions { p, trials: 16, ..Default::default() };
            let rep = schur_bound_check(&KernelSpec::named(BaseKernel::Hilbert), &m, &src, &dst, &opts).unwrap();
            assert!(rep.passed, "{rep:?}");
        }
    }
}
