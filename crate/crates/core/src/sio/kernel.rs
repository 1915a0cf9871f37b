use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A kernel `K(x, y)` defined off the diagonal; `x` is the target point and
/// `y` the source point.
pub trait Kernel: Sync {
    /// `None` on the diagonal.
    fn eval(&self, x: Complex64, y: Complex64) -> Option<Complex64>;

    fn name(&self) -> String;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKernel {
    Zero,
    /// `1/(x − y)`
    Hilbert,
    /// `1/(2πi(x − y))`
    CauchyLine,
    /// `1/(1 − ȳx)` for unimodular points
    CauchyCircle,
    /// `(x − y)/|x − y|³` in the plane
    Riesz,
    /// `1/(x − y)²`
    Beurling,
}

impl BaseKernel {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "zero" => BaseKernel::Zero,
            "hilbert" => BaseKernel::Hilbert,
            "cauchy_line" => BaseKernel::CauchyLine,
            "cauchy_circle" => BaseKernel::CauchyCircle,
            "riesz" => BaseKernel::Riesz,
            "beurling" => BaseKernel::Beurling,
            other => return Err(Error::config("kernel", format!("unknown kernel `{other}`"))),
        })
    }

    pub fn eval(self, x: Complex64, y: Complex64) -> Option<Complex64> {
        let d = x - y;
        let on_diag = match self {
            BaseKernel::CauchyCircle => (1.0 - y.conj() * x).norm() == 0.0,
            _ => d.norm() == 0.0,
        };
        if on_diag {
            return None;
        }
        Some(match self {
            BaseKernel::Zero => Complex64::new(0.0, 0.0),
            BaseKernel::Hilbert => 1.0 / d,
            BaseKernel::CauchyLine => 1.0 / (Complex64::new(0.0, 2.0 * PI) * d),
            BaseKernel::CauchyCircle => 1.0 / (1.0 - y.conj() * x),
            BaseKernel::Riesz => d / d.norm().powi(3),
            BaseKernel::Beurling => 1.0 / (d * d),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelTerm {
    pub kernel: BaseKernel,
    /// `[re, im]`
    #[serde(default = "unit_coef")]
    pub coef: [f64; 2],
}

fn unit_coef() -> [f64; 2] {
    [1.0, 0.0]
}

/// Finite linear combination of named kernels.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelSpec {
    pub name: String,
    pub terms: Vec<KernelTerm>,
}

impl KernelSpec {
    pub fn named(kernel: BaseKernel) -> Self {
        let name = serde_json::to_value(kernel).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        KernelSpec { name, terms: vec![KernelTerm { kernel, coef: unit_coef() }] }
    }

    pub fn scaled(kernel: BaseKernel, c: Complex64) -> Self {
        let mut k = Self::named(kernel);
        k.terms[0].coef = [c.re, c.im];
        k
    }

    /// Parses `{"name": .., "terms": [{"kernel": "hilbert", "coef": [re, im]}, ..]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let k: KernelSpec = serde_json::from_str(text)?;
        if k.terms.is_empty() {
            return Err(Error::config("terms", "kernel needs at least one term"));
        }
        Ok(k)
    }

    /// Geometric dimension of the underlying space: 2 if any planar term.
    pub fn dimension(&self) -> u8 {
        if self.terms.iter().any(|t| matches!(t.kernel, BaseKernel::Riesz | BaseKernel::Beurling)) {
            2
        } else {
            1
        }
    }
}

impl Kernel for KernelSpec {
    fn eval(&self, x: Complex64, y: Complex64) -> Option<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            s += Complex64::new(t.coef[0], t.coef[1]) * t.kernel.eval(x, y)?;
        }
        Some(s)
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_values() {
        let x = Complex64::new(2.0, 0.0);
        let y = Complex64::new(0.5, 0.0);
        assert_eq!(BaseKernel::Hilbert.eval(x, y), Some(Complex64::new(1.0 / 1.5, 0.0)));
        assert!(BaseKernel::Hilbert.eval(x, x).is_none());
        let z = Complex64::from_polar(1.0, 0.3);
        assert!(BaseKernel::CauchyCircle.eval(z, z).is_none());
        let r = BaseKernel::Riesz.eval(Complex64::new(0.0, 2.0), Complex64::new(0.0, 0.0)).unwrap();
        assert!((r - Complex64::new(0.0, 0.25)).norm() < 1e-15);
    }

    #[test]
    fn custom_json_combination() {
        let k = KernelSpec::from_json(r#"{"name":"mix","terms":[{"kernel":"hilbert","coef":[2,0]},{"kernel":"beurling"}]}"#).unwrap();
        let v = k.eval(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        assert!((v - 3.0).norm() < 1e-15);
        assert_eq!(k.dimension(), 2);
        assert!(KernelSpec::from_json(r#"{"name":"x","terms":[]}"#).is_err());
        assert!(KernelSpec::from_json(r#"{"name":"x","terms":[{"kernel":"nope"}]}"#).is_err());
    }
}
