use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{Measure, NodeKind, Support};

#[derive(Clone, Debug, Serialize)]
pub struct DyadicRow {
    pub level: u32,
    pub index: usize,
    pub mass: f64,
    pub mass_e: f64,
    pub mass_f: f64,
    /// `max(|σ(Q∩E) − σ(Q)/2|, |σ(Q∩F) − σ(Q)/2|) / σ(Q)`, zero on null intervals.
    pub rel_error: f64,
}

/// Two disjoint node sets splitting every dyadic interval of size at least
/// `2^{-level}` almost in half.
#[derive(Clone, Debug, Serialize)]
pub struct WellMixedPair {
    pub level: u32,
    /// Node indices (into `Measure::nodes`).
    pub e: Vec<usize>,
    pub f: Vec<usize>,
    /// Atoms, kept out of both sets.
    pub excluded_atoms: Vec<usize>,
    pub max_rel_error: f64,
    pub passed: bool,
    pub table: Vec<DyadicRow>,
}

/// Splits `items` (index, mass) into two groups of nearly equal mass.
fn balanced_split(items: &[(usize, f64)]) -> (Vec<usize>, Vec<usize>) {
    let mut sorted = items.to_vec();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let (mut a, mut b) = (vec![], vec![]);
    let (mut sa, mut sb) = (0.0, 0.0);
    for &(i, m) in &sorted {
        if sa <= sb {
            a.push(i);
            sa += m;
        } else {
            b.push(i);
            sb += m;
        }
    }
    let total = sa + sb;
    let n = sorted.len();
    if (sa - sb).abs() > 1e-15 * total && n <= 20 && n > 1 {
        // exhaustive search with the first item pinned to the first group
        let mut best = (sa - sb).abs();
        let mut best_mask: Option<u32> = None;
        for mask in 0u32..(1 << (n - 1)) {
            let s: f64 = (0..n).filter(|&k| k == 0 || mask & (1 << (k - 1)) != 0).map(|k| sorted[k].1).sum();
            let d = (2.0 * s - total).abs();
            if d < best {
                best = d;
                best_mask = Some(mask);
            }
        }
        if let Some(mask) = best_mask {
            a.clear();
            b.clear();
            for (k, &(i, _)) in sorted.iter().enumerate() {
                if k == 0 || mask & (1 << (k - 1)) != 0 {
                    a.push(i);
                } else {
                    b.push(i);
                }
            }
        }
    }
    a.sort_unstable();
    b.sort_unstable();
    (a, b)
}

/// Builds well-mixed sets for the diffuse part of a line measure. Cells are
/// assigned to dyadic intervals of the grid span by their midpoints; atoms
/// are excluded from both sets.
pub fn well_mixed_sets(sigma: &Measure, level: u32) -> Result<WellMixedPair> {
    if sigma.support != Support::Line {
        return Err(Error::DomainMismatch("dyadic intervals are built on the line".into()));
    }
    if level > 30 {
        return Err(Error::invalid("level must be at most 30"));
    }
    let g = sigma.grid.as_ref().ok_or_else(|| Error::invalid("well-mixed sets need a density grid"))?;
    let nodes = sigma.nodes();
    let span = g.b - g.a;
    let finest = 1usize << level;
    let bin = |x: f64, count: usize| -> usize { (((x - g.a) / span) * count as f64).floor().clamp(0.0, (count - 1) as f64) as usize };
    let mut buckets: Vec<Vec<(usize, f64)>> = vec![vec![]; finest];
    let mut excluded = vec![];
    for (k, n) in nodes.iter().enumerate() {
        match n.kind {
            NodeKind::Atom(_) => excluded.push(k),
            NodeKind::Cell(_) => buckets[bin(n.position, finest)].push((k, n.mass)),
        }
    }
    let mut e = vec![];
    let mut f = vec![];
    for b in &buckets {
        let (x, y) = balanced_split(b);
        e.extend(x);
        f.extend(y);
    }
    e.sort_unstable();
    f.sort_unstable();
    let mut in_e = vec![false; nodes.len()];
    let mut in_f = vec![false; nodes.len()];
    e.iter().for_each(|&k| in_e[k] = true);
    f.iter().for_each(|&k| in_f[k] = true);
    let mut table = vec![];
    let mut max_err: f64 = 0.0;
    for lev in 0..=level {
        let count = 1usize << lev;
        let mut mass = vec![0.0; count];
        let mut me = vec![0.0; count];
        let mut mf = vec![0.0; count];
        for (k, n) in nodes.iter().enumerate() {
            if let NodeKind::Cell(_) = n.kind {
                let q = bin(n.position, count);
                mass[q] += n.mass;
                if in_e[k] {
                    me[q] += n.mass;
                }
                if in_f[k] {
                    mf[q] += n.mass;
                }
            }
        }
        for q in 0..count {
            let rel = if mass[q] > 0.0 { ((me[q] - 0.5 * mass[q]).abs()).max((mf[q] - 0.5 * mass[q]).abs()) / mass[q] } else { 0.0 };
            max_err = max_err.max(rel);
            table.push(DyadicRow { level: lev, index: q, mass: mass[q], mass_e: me[q], mass_f: mf[q], rel_error: rel });
        }
    }
    let tol = 0.5f64.powi(level as i32);
    Ok(WellMixedPair { level, e, f, excluded_atoms: excluded, max_rel_error: max_err, passed: max_err <= tol + 1e-12, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Atom, DensityGrid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_grid_splits_exactly() {
        let sigma = Measure::lebesgue_line(0.0, 1.0, 4096);
        for n in 0..=8 {
            let w = well_mixed_sets(&sigma, n).unwrap();
            assert!(w.passed);
            assert!(w.max_rel_error < 1e-12, "n={n}: {}", w.max_rel_error);
            assert_eq!(w.e.len() + w.f.len(), 4096);
        }
    }

    #[test]
    fn level_three_matches_alternating_blocks() {
        let sigma = Measure::lebesgue_line(0.0, 1.0, 16);
        let w = well_mixed_sets(&sigma, 3).unwrap();
        assert_eq!(w.table.len(), 1 + 2 + 4 + 8);
        assert!(w.max_rel_error == 0.0);
    }

    #[test]
    fn random_density_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let density: Vec<f64> = (0..4096).map(|_| 0.2 + rng.random::<f64>()).collect();
        let sigma = Measure::new(Support::Line, vec![], Some(DensityGrid { a: 0.0, b: 1.0, n: 4096, density }), "random").unwrap();
        for n in [1, 4, 8] {
            let w = well_mixed_sets(&sigma, n).unwrap();
            assert!(w.passed, "n={n}: {}", w.max_rel_error);
        }
    }

    #[test]
    fn atoms_are_excluded() {
        let mut density = vec![1.0; 64];
        density[10] = 0.0;
        let g = DensityGrid { a: 0.0, b: 1.0, n: 64, density };
        let (lo, hi) = g.cell(10);
        let sigma = Measure::new(Support::Line, vec![Atom { position: 0.5 * (lo + hi), weight: 0.3 }], Some(g), "mixed").unwrap();
        let w = well_mixed_sets(&sigma, 2).unwrap();
        assert_eq!(w.excluded_atoms, vec![0]);
        assert!(!w.e.contains(&0) && !w.f.contains(&0));
        assert!(w.passed);
    }

    #[test]
    fn coarse_resolution_reports_error() {
        let sigma = Measure::lebesgue_line(0.0, 1.0, 4);
        let w = well_mixed_sets(&sigma, 3).unwrap();
        assert!(!w.passed);
        assert!((w.max_rel_error - 0.5).abs() < 1e-12);
    }
}
