use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::restricted::{kernel_matrix, restricted_bound_estimate, RestrictedOptions};
use super::{Geometry, Kernel, PointMass};
use crate::cauchy::smooth_cutoff;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Multiply by `𝟙(dist > ε)`.
    Trunc,
    /// Multiply by the smooth cutoff at scale `ε`.
    Smooth,
    /// Multiply by `(x − y)/(x − y + iε)`; turns `1/(x−y)` into `1/(x−y+iε)`.
    Cauchy,
    /// Multiply by `(1 − ȳx)/(1 − rȳx)` with `r = 1 − ε`; circle only.
    Radial,
}

impl Family {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "trunc" => Family::Trunc,
            "smooth" => Family::Smooth,
            "cauchy" => Family::Cauchy,
            "radial" => Family::Radial,
            other => return Err(Error::config("family", format!("unknown regularizer family `{other}`"))),
        })
    }
}

struct Regularized<'a> {
    kernel: &'a dyn Kernel,
    family: Family,
    eps: f64,
    geometry: Geometry,
}

impl Kernel for Regularized<'_> {
    fn eval(&self, x: Complex64, y: Complex64) -> Option<Complex64> {
        let k = self.kernel.eval(x, y)?;
        let d = super::distance(self.geometry, x, y);
        let m = match self.family {
            Family::Trunc => Complex64::new(if d > self.eps { 1.0 } else { 0.0 }, 0.0),
            Family::Smooth => Complex64::new(smooth_cutoff(d / self.eps), 0.0),
            Family::Cauchy => (x - y) / (x - y + Complex64::new(0.0, self.eps)),
            Family::Radial => {
                let u = x * y.conj();
                (1.0 - u) / (1.0 - (1.0 - self.eps) * u)
            }
        };
        if m == Complex64::new(0.0, 0.0) {
            return Some(m);
        }
        Some(k * m)
    }

    fn name(&self) -> String {
        format!("{} regularized", self.kernel.name())
    }
}

/// `L²(μ) → L²(ν)` matrix of the regularized kernel in the orthonormal node bases.
pub fn regularized_matrix(k: &dyn Kernel, family: Family, eps: f64, src: &PointMass, dst: &PointMass) -> Result<CMat> {
    if !(eps > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if family == Family::Radial && (src.geometry != Geometry::Circle || dst.geometry != Geometry::Circle) {
        return Err(Error::DomainMismatch("radial regularization needs circle point sets".into()));
    }
    if family == Family::Radial && eps >= 2.0 {
        return Err(Error::invalid("radial regularization needs ε < 2"));
    }
    let reg = Regularized { kernel: k, family, eps, geometry: src.geometry };
    Ok(kernel_matrix(&reg, src, dst, 2.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub eps: f64,
    pub norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub kernel: String,
    pub family: Family,
    pub rows: Vec<ScanRow>,
    pub sup: f64,
    pub inf: f64,
    /// max/min of the norms over the last (up to) ten grid points.
    pub tail_ratio: f64,
    pub target: f64,
    pub passed: bool,
}

impl ScanReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("eps,norm\n");
        for r in &self.rows {
            s.push_str(&format!("{:.17e},{:.17e}\n", r.eps, r.norm));
        }
        s
    }
}

/// Operator norms of the regularized operators over `eps_grid`. The scan
/// passes when the supremum stays below `target`, which defaults to four
/// times the restricted-bound estimate.
pub fn uniform_bound_scan(
    k: &dyn Kernel,
    family: Family,
    src: &PointMass,
    dst: &PointMass,
    eps_grid: &[f64],
    target: Option<f64>,
) -> Result<ScanReport> {
    if eps_grid.is_empty() {
        return Err(Error::config("eps_grid", "grid must be nonempty"));
    }
    let norms = eps_grid
        .par_iter()
        .map(|&eps| Ok(linalg::spectral_norm(&regularized_matrix(k, family, eps, src, dst)?)))
        .collect::<Result<Vec<f64>>>()?;
    let target = match target {
        Some(t) => t,
        None => 4.0 * restricted_bound_estimate(k, src, dst, &RestrictedOptions::default())?.lower,
    };
    let sup = norms.iter().cloned().fold(0.0, f64::max);
    let inf = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let tail = &norms[norms.len().saturating_sub(10)..];
    let tmax = tail.iter().cloned().fold(0.0, f64::max);
    let tmin = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let tail_ratio = if tmax == 0.0 { 1.0 } else { tmax / tmin };
    Ok(ScanReport {
        kernel: k.name(),
        family,
        rows: eps_grid.iter().zip(&norms).map(|(&eps, &norm)| ScanRow { eps, norm }).collect(),
        sup,
        inf,
        tail_ratio,
        target,
        passed: sup <= target * (1.0 + 1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Measure, Support};
    use crate::representation::{build_v_alpha, build_v_circle};
    use crate::sio::{BaseKernel, KernelSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Vec<f64> {
        (0..=20).map(|k| 0.5f64.powi(k)).collect()
    }

    #[test]
    fn zero_kernel_scan() {
        let mu = Measure::atomic(Support::Line, &[(0.0, 1.0), (1.0, 1.0)]).unwrap();
        let nu = Measure::atomic(Support::Line, &[(0.5, 1.0)]).unwrap();
        let r = uniform_bound_scan(
            &KernelSpec::named(BaseKernel::Zero),
            Family::Trunc,
            &PointMass::from_measure(&mu),
            &PointMass::from_measure(&nu),
            &grid(),
            None,
        )
        .unwrap();
        assert!(r.rows.iter().all(|row| row.norm == 0.0));
        assert!(r.passed);
    }

    #[test]
    fn truncation_below_every_gap_is_zero() {
        let mu = Measure::atomic(Support::Line, &[(0.0, 1.0), (1.0, 1.0)]).unwrap();
        let nu = Measure::atomic(Support::Line, &[(0.5, 1.0)]).unwrap();
        let m = regularized_matrix(
            &KernelSpec::named(BaseKernel::Hilbert),
            Family::Trunc,
            2.0,
            &PointMass::from_measure(&mu),
            &PointMass::from_measure(&nu),
        )
        .unwrap();
        assert!(m.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn clark_pair_cauchy_scan_is_bounded_and_stabilizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mu = Measure::random_atomic_line(8, &mut rng);
        let alpha = 2.0;
        let v = build_v_alpha(&mu, alpha).unwrap();
        let r = uniform_bound_scan(
            &KernelSpec::named(BaseKernel::Hilbert),
            Family::Cauchy,
            &PointMass::from_measure(&mu),
            &PointMass::from_measure(&v.target),
            &grid(),
            Some(2.0 / alpha),
        )
        .unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.tail_ratio < 1.05);
        // the limit operator is V/α
        assert!((r.rows.last().unwrap().norm - 1.0 / alpha).abs() < 1e-4);
    }

    #[test]
    fn radial_scan_on_clark_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mu = Measure::random_atomic_circle(6, &mut rng);
        let alpha = Complex64::from_polar(1.0, 2.0);
        let v = build_v_circle(&mu, alpha).unwrap();
        let r = uniform_bound_scan(
            &KernelSpec::named(BaseKernel::CauchyCircle),
            Family::Radial,
            &PointMass::from_measure(&mu),
            &PointMass::from_measure(&v.target),
            &grid()[1..],
            Some(2.0 / (1.0 - alpha).norm()),
        )
        .unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn hilbert_truncations_on_interleaved_grids_approach_pi() {
        let n = 300;
        let src = PointMass {
            geometry: Geometry::Line,
            points: (0..n).map(|k| Complex64::new(k as f64 / n as f64, 0.0)).collect(),
            masses: vec![1.0 / n as f64; n],
        };
        let dst = PointMass {
            geometry: Geometry::Line,
            points: (0..n).map(|k| Complex64::new((k as f64 + 0.5) / n as f64, 0.0)).collect(),
            masses: vec![1.0 / n as f64; n],
        };
        let m = regularized_matrix(&KernelSpec::named(BaseKernel::Hilbert), Family::Trunc, 1e-9, &src, &dst).unwrap();
        let norm = linalg::spectral_norm(&m);
        assert!(norm < std::f64::consts::PI * (1.0 + 1e-10) && norm > 0.95 * std::f64::consts::PI, "{norm}");
    }
}
