//! Finitely supported measures with an optional piecewise-constant density.
//!
//! Line densities are taken with respect to `dx`; circle densities with respect
//! to normalized arc length `dθ/2π`. Circle positions are angles in `(−π, π]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    Line,
    Circle,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub position: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub density: Vec<f64>,
}

impl DensityGrid {
    pub fn width(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    pub fn cell(&self, j: usize) -> (f64, f64) {
        let h = self.width();
        (self.a + j as f64 * h, self.a + (j + 1) as f64 * h)
    }

    pub fn midpoint(&self, j: usize) -> f64 {
        self.a + (j as f64 + 0.5) * self.width()
    }
}

/// Where a sample of a function in `L²(μ)` lives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeKind {
    Atom(usize),
    Cell(usize),
}

#[derive(Clone, Copy, Debug)]
pub struct Node {
    pub kind: NodeKind,
    /// Real position (line) or angle (circle); cell midpoint for cells.
    pub position: f64,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    pub support: Support,
    pub atoms: Vec<Atom>,
    pub grid: Option<DensityGrid>,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LebesgueParts {
    pub singular: Measure,
    pub absolutely_continuous: Measure,
}

#[derive(Clone, Debug, Serialize)]
pub struct AcCriterion {
    pub cutoffs: Vec<f64>,
    pub values: Vec<f64>,
    pub divergent: bool,
}

/// Reduce an angle to `(−π, π]`.
pub fn wrap_angle(t: f64) -> f64 {
    let mut r = t.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    if r <= -PI {
        r += 2.0 * PI;
    }
    r
}

fn angle_in(t: f64, lo: f64, hi: f64) -> bool {
    // circle cells may start below −π; test all lifts of t
    let mut x = t;
    while x > lo {
        x -= 2.0 * PI;
    }
    while x < lo {
        x += 2.0 * PI;
    }
    x <= hi || (t - lo).abs() < 1e-300
}

impl Measure {
    pub fn new(support: Support, atoms: Vec<Atom>, grid: Option<DensityGrid>, label: impl Into<String>) -> Result<Self> {
        let mut atoms = atoms;
        for at in &mut atoms {
            if !(at.weight > 0.0) || !at.weight.is_finite() {
                return Err(Error::invalid(format!("atom weight {} must be positive", at.weight)));
            }
            if !at.position.is_finite() {
                return Err(Error::invalid("atom position must be finite"));
            }
            if support == Support::Circle {
                at.position = wrap_angle(at.position);
            }
        }
        for i in 0..atoms.len() {
            for j in (i + 1)..atoms.len() {
                if atoms[i].position == atoms[j].position {
                    return Err(Error::SupportCollision(format!("atoms {i} and {j} share position {}", atoms[i].position)));
                }
            }
        }
        if let Some(g) = &grid {
            if g.n == 0 || g.density.len() != g.n {
                return Err(Error::invalid("grid density length must equal n > 0"));
            }
            if !(g.b > g.a) {
                return Err(Error::invalid("grid requires a < b"));
            }
            if support == Support::Circle && g.b - g.a > 2.0 * PI + 1e-12 {
                return Err(Error::invalid("circle grid spans more than a full turn"));
            }
            if g.density.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
                return Err(Error::invalid("densities must be finite and nonnegative"));
            }
            for (k, at) in atoms.iter().enumerate() {
                for j in 0..g.n {
                    if g.density[j] <= 0.0 {
                        continue;
                    }
                    let (lo, hi) = g.cell(j);
                    let inside = match support {
                        Support::Line => at.position >= lo && at.position <= hi,
                        Support::Circle => angle_in(at.position, lo, hi),
                    };
                    if inside {
                        return Err(Error::SupportCollision(format!("atom {k} lies in grid cell {j} with positive density")));
                    }
                }
            }
        }
        Ok(Measure { support, atoms, grid, label: label.into() })
    }

    pub fn atomic(support: Support, atoms: &[(f64, f64)]) -> Result<Self> {
        let atoms = atoms.iter().map(|&(position, weight)| Atom { position, weight }).collect();
        Measure::new(support, atoms, None, "atomic")
    }

    /// Normalized arc length on the circle, sampled on `n` equal cells.
    pub fn lebesgue_circle(n: usize) -> Self {
        Measure {
            support: Support::Circle,
            atoms: vec![],
            grid: Some(DensityGrid { a: -PI, b: PI, n, density: vec![1.0; n] }),
            label: format!("lebesgue_grid({n})"),
        }
    }

    /// Uniform density on `[a, b]` with total mass 1.
    pub fn lebesgue_line(a: f64, b: f64, n: usize) -> Self {
        Measure {
            support: Support::Line,
            atoms: vec![],
            grid: Some(DensityGrid { a, b, n, density: vec![1.0 / (b - a); n] }),
            label: format!("lebesgue_grid({n})"),
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn n_cells(&self) -> usize {
        self.grid.as_ref().map_or(0, |g| g.n)
    }

    /// Number of sample slots of a function in `L²(μ)`: atoms first, then cells.
    pub fn dim(&self) -> usize {
        self.n_atoms() + self.n_cells()
    }

    pub fn is_atomic(&self) -> bool {
        self.grid.is_none() || self.ac_mass() == 0.0
    }

    fn cell_mass_factor(&self) -> f64 {
        match self.support {
            Support::Line => 1.0,
            Support::Circle => 1.0 / (2.0 * PI),
        }
    }

    pub fn cell_mass(&self, j: usize) -> f64 {
        let g = self.grid.as_ref().expect("measure has no grid");
        g.density[j] * g.width() * self.cell_mass_factor()
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn ac_mass(&self) -> f64 {
        match &self.grid {
            None => 0.0,
            Some(g) => g.density.iter().sum::<f64>() * g.width() * self.cell_mass_factor(),
        }
    }

    pub fn mass(&self) -> f64 {
        self.atom_mass() + self.ac_mass()
    }

    pub fn nodes(&self) -> Vec<Node> {
        let mut out: Vec<Node> =
            self.atoms.iter().enumerate().map(|(k, a)| Node { kind: NodeKind::Atom(k), position: a.position, mass: a.weight }).collect();
        if let Some(g) = &self.grid {
            for j in 0..g.n {
                out.push(Node { kind: NodeKind::Cell(j), position: g.midpoint(j), mass: self.cell_mass(j) });
            }
        }
        out
    }

    /// Index of the density cell whose interior contains `position`.
    pub fn cell_containing(&self, position: f64) -> Option<usize> {
        let g = self.grid.as_ref()?;
        let h = g.width();
        let rel = match self.support {
            Support::Line => position - g.a,
            Support::Circle => (position - g.a).rem_euclid(2.0 * PI),
        };
        if rel <= 0.0 || rel >= g.b - g.a {
            return None;
        }
        let j = (rel / h).floor() as usize;
        if j >= g.n || rel == j as f64 * h {
            return None;
        }
        Some(j)
    }

    /// Density of the a.c. part at `position` (zero off the grid and on cell
    /// edges).
    pub fn density_at(&self, position: f64) -> f64 {
        match self.cell_containing(position) {
            Some(j) => self.grid.as_ref().unwrap().density[j],
            None => 0.0,
        }
    }

    pub fn node_masses(&self) -> Vec<f64> {
        self.nodes().iter().map(|n| n.mass).collect()
    }

    /// Atom positions as points of ℂ (real axis or unit circle).
    pub fn atom_points(&self) -> Vec<Complex64> {
        self.atoms.iter().map(|a| self.point(a.position)).collect()
    }

    pub fn point(&self, position: f64) -> Complex64 {
        match self.support {
            Support::Line => Complex64::new(position, 0.0),
            Support::Circle => Complex64::from_polar(1.0, position),
        }
    }

    pub fn atom_weights(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.weight).collect()
    }

    pub fn scaled(&self, c: f64) -> Measure {
        let mut m = self.clone();
        for a in &mut m.atoms {
            a.weight *= c;
        }
        if let Some(g) = &mut m.grid {
            for d in &mut g.density {
                *d *= c;
            }
        }
        m
    }

    /// `P = ∫ dμ(x)/(1+x²)`, summed exactly over atoms and cells.
    pub fn poisson_mass(&self) -> Result<f64> {
        if self.support != Support::Line {
            return Err(Error::DomainMismatch("Poisson mass needs a line measure".into()));
        }
        let mut p: f64 = self.atoms.iter().map(|a| a.weight / (1.0 + a.position * a.position)).sum();
        if let Some(g) = &self.grid {
            for j in 0..g.n {
                let (lo, hi) = g.cell(j);
                p += g.density[j] * (hi.atan() - lo.atan());
            }
        }
        Ok(p)
    }

    pub fn poisson_normalize(&self) -> Result<Measure> {
        let p = self.poisson_mass()?;
        if !(p > 0.0) {
            return Err(Error::Degenerate("zero Poisson mass".into()));
        }
        Ok(self.scaled(1.0 / p))
    }

    pub fn lebesgue_decompose(&self) -> LebesgueParts {
        let singular =
            Measure { support: self.support, atoms: self.atoms.clone(), grid: None, label: format!("{} (singular part)", self.label) };
        let absolutely_continuous =
            Measure { support: self.support, atoms: vec![], grid: self.grid.clone(), label: format!("{} (a.c. part)", self.label) };
        LebesgueParts { singular, absolutely_continuous }
    }

    /// Lump every positive-density cell into an atom at its midpoint.
    pub fn discretize(&self) -> Measure {
        let mut atoms = self.atoms.clone();
        if let Some(g) = &self.grid {
            for j in 0..g.n {
                let m = self.cell_mass(j);
                if m > 0.0 {
                    let mut p = g.midpoint(j);
                    if self.support == Support::Circle {
                        p = wrap_angle(p);
                    }
                    atoms.push(Atom { position: p, weight: m });
                }
            }
        }
        atoms.sort_by(|a, b| a.position.total_cmp(&b.position));
        Measure { support: self.support, atoms, grid: None, label: format!("{} (discretized)", self.label) }
    }

    /// Copy with atoms sorted by position.
    pub fn sorted(&self) -> Measure {
        let mut m = self.clone();
        m.atoms.sort_by(|a, b| a.position.total_cmp(&b.position));
        m
    }

    /// Growth of `∫_h^ε x⁻² w*(x) dx` for the increasing rearrangement `w*` of
    /// the density on `[a, b]`, with `h = ε 2^{-k}` down to the cell width.
    pub fn ac_criterion_integral(&self, a: f64, b: f64, eps: f64) -> Result<AcCriterion> {
        if self.support != Support::Line {
            return Err(Error::DomainMismatch("criterion is stated on the line".into()));
        }
        let g = self.grid.as_ref().ok_or_else(|| Error::invalid("measure has no density grid"))?;
        if !(eps > 0.0) {
            return Err(Error::invalid("epsilon must be positive"));
        }
        let tol = 1e-12 * (g.b - g.a);
        if a < g.a - tol || b > g.b + tol || !(b > a) {
            return Err(Error::invalid("interval must lie inside the grid"));
        }
        let h = g.width();
        let mut values: Vec<f64> = (0..g.n)
            .filter(|&j| {
                let m = g.midpoint(j);
                m >= a && m <= b
            })
            .map(|j| g.density[j])
            .collect();
        let rearranged = increasing_rearrangement(&mut values);
        let integral = |lo: f64| -> f64 {
            let mut s = 0.0;
            for (j, v) in rearranged.iter().enumerate() {
                let c0 = (j as f64 * h).max(lo);
                let c1 = ((j + 1) as f64 * h).min(eps);
                if c1 > c0 && *v != 0.0 {
                    s += v * (1.0 / c0 - 1.0 / c1);
                }
            }
            s
        };
        let mut cutoffs = vec![];
        let mut vals = vec![];
        for k in 0..=40 {
            let hk = eps * 2f64.powi(-k);
            if hk < h * (1.0 - 1e-12) {
                break;
            }
            cutoffs.push(hk);
            vals.push(integral(hk));
        }
        let m = vals.len();
        let divergent = m >= 4 && (m - 3..m).all(|i| vals[i] > 2.0 * vals[i - 1]);
        Ok(AcCriterion { cutoffs, values: vals, divergent })
    }

    pub fn random_atomic_line<R: Rng>(n: usize, rng: &mut R) -> Measure {
        let atoms = jittered(n, -1.0, 1.0, rng);
        Measure { support: Support::Line, atoms, grid: None, label: format!("random_line({n})") }
    }

    pub fn random_atomic_circle<R: Rng>(n: usize, rng: &mut R) -> Measure {
        let atoms = jittered(n, -PI, PI, rng).into_iter().map(|a| Atom { position: wrap_angle(a.position), weight: a.weight }).collect();
        Measure { support: Support::Circle, atoms, grid: None, label: format!("random_circle({n})") }
    }
}

/// Sort ascending in place and return the sorted values.
pub fn increasing_rearrangement(values: &mut [f64]) -> Vec<f64> {
    values.sort_by(|a, b| a.total_cmp(b));
    values.to_vec()
}

fn jittered<R: Rng>(n: usize, lo: f64, hi: f64, rng: &mut R) -> Vec<Atom> {
    let h = (hi - lo) / n as f64;
    let mut atoms: Vec<Atom> = (0..n)
        .map(|k| Atom { position: lo + h * (k as f64 + 0.15 + 0.7 * rng.random::<f64>()), weight: 0.5 + rng.random::<f64>() })
        .collect();
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    for a in &mut atoms {
        a.weight /= total;
    }
    atoms
}

#[derive(Serialize, Deserialize)]
struct MeasureDoc {
    support: Support,
    #[serde(default)]
    atoms: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid: Option<DensityGrid>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    label: String,
}

impl Serialize for Measure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureDoc {
            support: self.support,
            atoms: self.atoms.iter().map(|a| (a.position, a.weight)).collect(),
            grid: self.grid.clone(),
            label: self.label.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Measure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = MeasureDoc::deserialize(d)?;
        let atoms = doc.atoms.into_iter().map(|(position, weight)| Atom { position, weight }).collect();
        Measure::new(doc.support, atoms, doc.grid, doc.label).map_err(serde::de::Error::custom)
    }
}
