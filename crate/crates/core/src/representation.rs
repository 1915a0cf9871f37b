//! Unitary operators carrying `L²(μ)` onto `L²(μ_α)` and intertwining the
//! perturbed operator with multiplication by the independent variable.
//!
//! Matrices are written in the orthonormal node bases `𝟙_k/√w_k` of source and
//! target. Since atoms of `μ` and of `μ_α` never coincide, an indicator of an
//! atom of `μ` vanishes on the support of `μ_α` and the difference quotient in
//! the defining formula collapses to a plain Cauchy kernel.

use num_complex::Complex64;
use serde::Serialize;

use crate::cauchy::{boundary_values, one_minus_expi, Side};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::measure::{wrap_angle, Measure, NodeKind, Support};
use crate::perturbation::{
    build_a_alpha, build_u_param, clark_spectrum_circle, clark_spectrum_line, ClarkSpectrum, SelfAdjointFamily, UnitaryFamily,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Formula,
    AlternativeT,
    Rigidity,
}

#[derive(Clone, Debug)]
pub struct RepresentationOperator {
    pub matrix: CMat,
    /// Source measure with atoms in ascending order (the column order).
    pub source: Measure,
    pub target: Measure,
    pub alpha: Complex64,
    pub construction: Construction,
}

/// Residuals reported by `clark-verify`.
#[derive(Clone, Debug, Serialize)]
pub struct RepresentationCheck {
    pub dim: usize,
    pub unitarity_residual: f64,
    pub co_unitarity_residual: f64,
    pub intertwining_residual: f64,
    pub normalization_residual: f64,
}

impl RepresentationOperator {
    /// `max(‖V*V − I‖_F, ‖VV* − I‖_F)`.
    pub fn unitarity_residual(&self) -> f64 {
        let v = &self.matrix;
        linalg::identity_residual(&(v.adjoint() * v)).max(linalg::identity_residual(&(v * v.adjoint())))
    }

    /// `‖V√w − √ν‖₂`: the coordinates of `𝟏` must be mapped to those of `𝟏`.
    pub fn normalization_residual(&self) -> f64 {
        let src = root_masses(&self.source);
        let dst = root_masses(&self.target);
        if src.len() != self.matrix.ncols() || dst.len() != self.matrix.nrows() {
            return f64::INFINITY;
        }
        linalg::norm2((&self.matrix * src - dst).as_slice())
    }

    /// `‖V·A_α − M_s·V‖_F` on the line, `‖𝒱U_α − M_z𝒱‖_F` on the circle.
    pub fn intertwining_residual(&self) -> Result<f64> {
        let (op, diag) = match self.source.support {
            Support::Line => {
                let fam = SelfAdjointFamily { base: self.source.clone(), alpha: self.alpha.re };
                let d: Vec<Complex64> = self.target.atoms.iter().map(|a| Complex64::new(a.position, 0.0)).collect();
                (build_a_alpha(&fam)?.matrix, d)
            }
            Support::Circle => {
                let fam = UnitaryFamily { base: self.source.clone(), param: self.alpha };
                (build_u_param(&fam)?.matrix, self.target.atom_points())
            }
        };
        let v = &self.matrix;
        Ok(linalg::frobenius(&(v * op - linalg::diag(&diag) * v)))
    }

    pub fn check(&self) -> Result<RepresentationCheck> {
        let v = &self.matrix;
        Ok(RepresentationCheck {
            dim: v.ncols(),
            unitarity_residual: linalg::identity_residual(&(v.adjoint() * v)),
            co_unitarity_residual: linalg::identity_residual(&(v * v.adjoint())),
            intertwining_residual: self.intertwining_residual()?,
            normalization_residual: self.normalization_residual(),
        })
    }

    /// Values `(Vf)(s)` at the target atoms for coordinates `f` in the source basis.
    pub fn apply_values(&self, coords: &[Complex64]) -> Vec<Complex64> {
        let y = &self.matrix * CVec::from_column_slice(coords);
        y.iter().zip(self.target.node_masses()).map(|(v, m)| v / m.sqrt()).collect()
    }
}

fn root_masses(mu: &Measure) -> CVec {
    CVec::from_iterator(mu.dim(), mu.node_masses().into_iter().map(|m| Complex64::new(m.sqrt(), 0.0)))
}

fn prepare(mu: &Measure, support: Support) -> Result<Measure> {
    if mu.support != support {
        return Err(Error::DomainMismatch(format!("expected a {support:?} measure")));
    }
    let m = if mu.grid.is_some() { mu.discretize() } else { mu.sorted() };
    if m.n_atoms() == 0 {
        return Err(Error::invalid("measure has no atoms"));
    }
    Ok(m)
}

/// Line representation `V_α` with `μ_α` obtained from the secular equation.
pub fn build_v_alpha(mu: &Measure, alpha: f64) -> Result<RepresentationOperator> {
    let mu = prepare(mu, Support::Line)?;
    let spec = clark_spectrum_line(&mu, alpha)?;
    let target = spec.measure(format!("{} perturbed by {alpha}", mu.label))?;
    let matrix = if alpha == 0.0 { CMat::identity(mu.dim(), mu.dim()) } else { line_matrix_from_spectrum(&mu, &spec, alpha) };
    Ok(RepresentationOperator { matrix, source: mu, target, alpha: Complex64::new(alpha, 0.0), construction: Construction::Formula })
}

fn line_matrix_from_spectrum(mu: &Measure, spec: &ClarkSpectrum, alpha: f64) -> CMat {
    let w = mu.atom_weights();
    CMat::from_fn(spec.len(), w.len(), |i, j| Complex64::new(alpha * (spec.weights[i] * w[j]).sqrt() / spec.diff(i, j), 0.0))
}

/// Line formula against an arbitrary atomic target `ν`:
/// `V e_t(s) = α √w_t/(s − t)`, so the entry is `α √ν_s √w_t/(s − t)`.
pub fn v_alpha_matrix(mu: &Measure, nu: &Measure, alpha: f64) -> Result<CMat> {
    let mu = prepare(mu, Support::Line)?;
    if nu.support != Support::Line || nu.grid.is_some() {
        return Err(Error::DomainMismatch("target must be an atomic line measure".into()));
    }
    let w = mu.atom_weights();
    let mut m = CMat::zeros(nu.n_atoms(), w.len());
    for (i, s) in nu.atoms.iter().enumerate() {
        for (j, t) in mu.atoms.iter().enumerate() {
            let d = s.position - t.position;
            if d == 0.0 {
                return Err(Error::SupportCollision(format!(
                    "target atom {} coincides with a source atom; atoms of a perturbed measure interlace strictly with the base atoms",
                    s.position
                )));
            }
            m[(i, j)] = Complex64::new(alpha * (s.weight * w[j]).sqrt() / d, 0.0);
        }
    }
    Ok(m)
}

/// Circle representation `𝒱_α`, `|α| = 1`.
pub fn build_v_circle(mu: &Measure, alpha: Complex64) -> Result<RepresentationOperator> {
    let mu = prepare(mu, Support::Circle)?;
    let spec = clark_spectrum_circle(&mu, alpha)?;
    let target = spec.measure(format!("{} Clark measure", mu.label))?;
    let w = mu.atom_weights();
    let matrix = if alpha == Complex64::new(1.0, 0.0) {
        CMat::identity(w.len(), w.len())
    } else {
        // 𝒱 e_ξ(z) = (1−α) √w_ξ /(1 − ξ̄z)
        CMat::from_fn(spec.len(), w.len(), |i, j| (1.0 - alpha) * (spec.weights[i] * w[j]).sqrt() / one_minus_expi(spec.diff(i, j)))
    };
    Ok(RepresentationOperator { matrix, source: mu, target, alpha, construction: Construction::Formula })
}

/// Circle formula against an arbitrary atomic target.
pub fn v_circle_matrix(mu: &Measure, nu: &Measure, alpha: Complex64) -> Result<CMat> {
    let mu = prepare(mu, Support::Circle)?;
    if nu.support != Support::Circle || nu.grid.is_some() {
        return Err(Error::DomainMismatch("target must be an atomic circle measure".into()));
    }
    let w = mu.atom_weights();
    let mut m = CMat::zeros(nu.n_atoms(), w.len());
    for (i, z) in nu.atoms.iter().enumerate() {
        for (j, x) in mu.atoms.iter().enumerate() {
            let u = wrap_angle(z.position - x.position);
            if u == 0.0 {
                return Err(Error::SupportCollision(format!("target atom at angle {} coincides with a source atom", z.position)));
            }
            m[(i, j)] = (1.0 - alpha) * (z.weight * w[j]).sqrt() / one_minus_expi(u);
        }
    }
    Ok(m)
}

/// Builds the representation from boundary values of Cauchy integrals:
/// `Vf = f·(1 − αT𝟏) + αTf` (line, `T_± f(s) = −Rfμ(s ± i0)`) or
/// `𝒱f = f·(1 − (1−α)T𝟏) + (1−α)Tf` (circle, `T_± f(z) = Rfμ((1∓0)z)`).
/// `f(s)` is the value of the node of `μ` containing `s`, zero off `supp μ`.
pub fn alternative_representation(mu: &Measure, nu: &Measure, alpha: Complex64, side: Side) -> Result<RepresentationOperator> {
    if nu.grid.is_some() {
        return Err(Error::DomainMismatch("target measure must be atomic".into()));
    }
    let mu = if mu.grid.is_some() { mu.clone() } else { mu.sorted() };
    let (coef, sign) = match mu.support {
        Support::Line => {
            if alpha.im != 0.0 {
                return Err(Error::invalid("line parameter must be real"));
            }
            (alpha, -1.0)
        }
        Support::Circle => (1.0 - alpha, 1.0),
    };
    let points: Vec<f64> = nu.atoms.iter().map(|a| a.position).collect();
    let dim = mu.dim();
    let nodes = mu.nodes();
    let mut unconverged = vec![];
    let mut transforms = Vec::with_capacity(dim + 1);
    // column 0 is T𝟏, then T e_k for every node
    let one = vec![Complex64::new(1.0, 0.0); dim];
    let mut inputs = vec![one];
    for k in 0..dim {
        let mut e = vec![Complex64::new(0.0, 0.0); dim];
        e[k] = Complex64::new(1.0 / nodes[k].mass.sqrt(), 0.0);
        inputs.push(e);
    }
    for f in &inputs {
        let bf = boundary_values(&mu, f, side, &points)?;
        unconverged.extend(bf.unconverged());
        transforms.push(bf.values.iter().map(|v| sign * v).collect::<Vec<_>>());
    }
    if !unconverged.is_empty() {
        unconverged.sort_unstable();
        unconverged.dedup();
        return Err(Error::PartialResult { points: unconverged });
    }
    let containing: Vec<Option<usize>> = points.iter().map(|&s| node_containing(&mu, s)).collect();
    let mut matrix = CMat::zeros(points.len(), dim);
    for i in 0..points.len() {
        let t_one = transforms[0][i];
        for k in 0..dim {
            let f_s = match containing[i] {
                Some(n) if n == k => Complex64::new(1.0 / nodes[k].mass.sqrt(), 0.0),
                _ => Complex64::new(0.0, 0.0),
            };
            let v = f_s * (1.0 - coef * t_one) + coef * transforms[k + 1][i];
            matrix[(i, k)] = v * nu.atoms[i].weight.sqrt();
        }
    }
    Ok(RepresentationOperator { matrix, source: mu, target: nu.clone(), alpha, construction: Construction::AlternativeT })
}

/// Index of the density cell containing `s`, if any. Atoms of `μ` are never
/// requested as evaluation points.
fn node_containing(mu: &Measure, s: f64) -> Option<usize> {
    let g = mu.grid.as_ref()?;
    let na = mu.n_atoms();
    mu.nodes()
        .iter()
        .position(|n| match n.kind {
            NodeKind::Cell(j) => {
                let (lo, hi) = g.cell(j);
                s > lo && s < hi
            }
            NodeKind::Atom(_) => false,
        })
        .filter(|&k| k >= na)
}

/// Output of [`rigidity_reconstruct`].
#[derive(Clone, Debug)]
pub struct Rigidity {
    /// Positive weight `h(s)` at each atom of `ν` making `M_h V` unitary.
    pub h: Vec<f64>,
    /// `|h|² ν`, the spectral measure of the perturbed operator.
    pub measure: Measure,
    pub operator: RepresentationOperator,
    /// Largest off-diagonal entry of `(M_hV)(M_hV)*`.
    pub orthogonality_defect: f64,
}

/// Recovers the renormalization `h` for a matrix `V` of the representation
/// formula written against an arbitrary atomic target `ν`. `h(s)` is the row
/// norm of `V⁻*`; the result is rejected when rows of `M_hV` are not
/// orthogonal.
pub fn rigidity_reconstruct(mu: &Measure, nu: &Measure, alpha: Complex64, v: &CMat) -> Result<Rigidity> {
    if mu.dim() < 2 {
        return Err(Error::Degenerate("the source measure must be supported on at least two points".into()));
    }
    if v.nrows() != v.ncols() || v.nrows() != nu.n_atoms() || v.ncols() != mu.dim() {
        return Err(Error::invalid("matrix shape does not match the measures"));
    }
    let sv = linalg::singular_values(v);
    if sv.last().copied().unwrap_or(0.0) <= 1e-10 {
        return Err(Error::Singular("representation matrix has a nontrivial kernel".into()));
    }
    let inv = v.clone().try_inverse().ok_or_else(|| Error::Singular("representation matrix is not invertible".into()))?;
    let inv_adj = inv.adjoint();
    let h: Vec<f64> = (0..inv_adj.nrows()).map(|i| linalg::norm2(inv_adj.row(i).transpose().as_slice())).collect();
    let hv = linalg::diag(&h.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>()) * v;
    let gram = &hv * hv.adjoint();
    let mut defect: f64 = 0.0;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            if i != j {
                defect = defect.max(gram[(i, j)].norm());
            }
        }
    }
    if defect > 1e-8 {
        return Err(Error::NotRenormalizable(format!("rows fail to be orthogonal by {defect:.3e}")));
    }
    let atoms = nu.atoms.iter().zip(&h).map(|(a, &hs)| crate::measure::Atom { position: a.position, weight: hs * hs * a.weight }).collect();
    let measure = Measure::new(nu.support, atoms, None, format!("{} renormalized", nu.label))?;
    // M_hV written in the orthonormal basis of L²(|h|²ν) is M_hV itself
    let operator = RepresentationOperator {
        matrix: hv,
        source: if mu.grid.is_some() { mu.clone() } else { mu.sorted() },
        target: measure.clone(),
        alpha,
        construction: Construction::Rigidity,
    };
    Ok(Rigidity { h, measure, operator, orthogonality_defect: defect })
}
