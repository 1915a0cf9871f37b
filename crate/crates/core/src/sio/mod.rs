//! Kernels off the diagonal, their restricted bounds, regularizations and
//! Schur multipliers, on finite point sets of the line, the circle or the
//! plane.

mod kernel;
mod restricted;
mod scan;
mod schur;
mod wellmixed;

pub use kernel::{BaseKernel, Kernel, KernelSpec, KernelTerm};
pub use restricted::{kernel_matrix, restricted_bound_estimate, upper_certificate, RestrictedEstimate, RestrictedOptions};
pub use scan::{regularized_matrix, uniform_bound_scan, Family, ScanReport, ScanRow};
pub use schur::{
    cauchy_multiplier_circle, cauchy_multiplier_line, schur_apply, schur_bound_check, MultipliedKernel, SchurMultiplierSpec, SchurReport,
};
pub use wellmixed::{well_mixed_sets, DyadicRow, WellMixedPair};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::measure::{Measure, Support};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Line,
    Circle,
    Plane,
}

/// Finitely many weighted points; line points are real, circle points
/// unimodular.
#[derive(Clone, Debug)]
pub struct PointMass {
    pub geometry: Geometry,
    pub points: Vec<Complex64>,
    pub masses: Vec<f64>,
}

impl PointMass {
    /// Node set of a measure; density cells are lumped at their midpoints.
    pub fn from_measure(mu: &Measure) -> Self {
        let nodes = mu.nodes();
        let geometry = match mu.support {
            Support::Line => Geometry::Line,
            Support::Circle => Geometry::Circle,
        };
        PointMass { geometry, points: nodes.iter().map(|n| mu.point(n.position)).collect(), masses: nodes.iter().map(|n| n.mass).collect() }
    }

    pub fn planar(points: Vec<Complex64>, masses: Vec<f64>) -> Self {
        PointMass { geometry: Geometry::Plane, points, masses }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn distance(&self, x: Complex64, y: Complex64) -> f64 {
        distance(self.geometry, x, y)
    }

    /// Smallest distance between two distinct points of the set.
    pub fn min_gap(&self) -> f64 {
        let mut g = f64::INFINITY;
        for i in 0..self.len() {
            for j in 0..i {
                let d = self.distance(self.points[i], self.points[j]);
                if d > 0.0 {
                    g = g.min(d);
                }
            }
        }
        g
    }
}

/// Euclidean distance, or arc length on the circle.
pub fn distance(geometry: Geometry, x: Complex64, y: Complex64) -> f64 {
    match geometry {
        Geometry::Circle => (x * y.conj()).arg().abs(),
        _ => (x - y).norm(),
    }
}
