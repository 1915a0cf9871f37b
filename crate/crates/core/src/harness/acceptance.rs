use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::commands::{random_function, schur_test, Tolerances};
use super::config::mixed_measure;
use super::report::{Check, RunReport};
use crate::cauchy::{boundary_values, cauchy_circle_limit, cauchy_line, ones, radial_limit_with, AnalyticField, Side};
use crate::clark::{clark_route_report, normalized_cauchy_at_atoms};
use crate::error::Result;
use crate::halfplane::dissipative_report;
use crate::measure::{DensityGrid, Measure, Support};
use crate::model::{char_function_from_contraction, theta_from_measure, BoundaryGrid, CharacteristicFunction};
use crate::perturbation::{
    aronszajn_krein, clark_spectrum_line, interlacing_line, spectral_measure_perturbed_line, SelfAdjointFamily, UnitaryFamily,
};
use crate::representation::{build_v_alpha, build_v_circle};
use crate::sio::{uniform_bound_scan, well_mixed_sets, BaseKernel, Family, KernelSpec, PointMass};

const LINE_ALPHAS: [f64; 5] = [1.0, -1.0, 2.0, -2.0, 0.5];

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub runtime: Duration,
}

impl CriterionOutcome {
    /// One line with the verdict and the tightest check: the first failure,
    /// or else the largest residual relative to its tolerance.
    pub fn summary_line(&self) -> String {
        let ratio = |c: &Check| if c.tolerance > 0.0 { c.residual / c.tolerance } else { c.residual };
        let worst = self.checks.iter().find(|c| !c.passed).or_else(|| self.checks.iter().max_by(|a, b| ratio(a).total_cmp(&ratio(b))));
        let detail = worst.map(|c| format!("{} = {:.3e} (tol {:.1e})", c.name, c.residual, c.tolerance)).unwrap_or_default();
        format!(
            "criterion {:>2} [{}] {}: {} [{:.1}s]",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            detail,
            self.runtime.as_secs_f64()
        )
    }
}

/// Running maximum of a residual across instances, reported as one check.
struct Worst {
    name: &'static str,
    value: f64,
    tolerance: f64,
}

impl Worst {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Worst { name, value: 0.0, tolerance }
    }

    fn add(&mut self, v: f64) {
        // a NaN sticks so that the check fails
        if !self.value.is_nan() && (v.is_nan() || v > self.value) {
            self.value = v;
        }
    }

    fn check(&self) -> Check {
        Check::below(self.name, self.value, self.tolerance)
    }
}

struct Builder {
    checks: Vec<Check>,
}

impl Builder {
    fn new() -> Self {
        Builder { checks: vec![] }
    }

    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn worst(&mut self, w: &Worst) {
        self.checks.push(w.check());
    }

    fn error(&mut self, name: &str, e: crate::Error) {
        self.checks.push(Check::failed(name, e));
    }

    fn finish(self, id: u32, title: &str, started: Instant, limit: Option<f64>) -> CriterionOutcome {
        let mut checks = self.checks;
        let runtime = started.elapsed();
        if let Some(secs) = limit {
            checks.push(Check::flag(format!("runtime_under_{secs}s"), runtime.as_secs_f64() < secs).timed(runtime));
        }
        CriterionOutcome { id, title: title.into(), passed: checks.iter().all(|c| c.passed), checks, runtime }
    }
}

fn rng_for(seed: u64, criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(criterion))
}

fn dims(count: usize, lo: usize, hi: usize) -> impl Iterator<Item = usize> {
    (0..count).map(move |k| lo + k * (hi - lo) / (count - 1).max(1))
}

fn unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * rng.random::<f64>())
}

fn in_disc(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    Complex64::from_polar(radius * rng.random::<f64>().sqrt(), 2.0 * PI * rng.random::<f64>())
}

/// Representation operators on 50 random atomic measures of dimension 2 to
/// 100, on the line and on the circle.
pub fn representation_suite(seed: u64) -> CriterionOutcome {
    let t = Instant::now();
    let mut rng = rng_for(seed, 1);
    let mut b = Builder::new();
    let mut unit_l = Worst::new("line_unitarity", 1e-10);
    let mut inter_l = Worst::new("line_intertwining", 1e-10);
    let mut norm_l = Worst::new("line_normalization", 1e-12);
    let mut unit_c = Worst::new("circle_unitarity", 1e-10);
    let mut inter_c = Worst::new("circle_intertwining", 1e-10);
    let mut norm_c = Worst::new("circle_normalization", 1e-12);
    for n in dims(50, 2, 100) {
        let mu = Measure::random_atomic_line(n, &mut rng);
        for a in LINE_ALPHAS {
            match build_v_alpha(&mu, a).and_then(|v| v.check()) {
                Ok(c) => {
                    unit_l.add(c.unitarity_residual.max(c.co_unitarity_residual));
                    inter_l.add(c.intertwining_residual);
                    norm_l.add(c.normalization_residual);
                }
                Err(e) => b.error("line_representation", e),
            }
        }
        let nu = Measure::random_atomic_circle(n, &mut rng);
        let circle_alphas = [Complex64::new(-1.0, 0.0), Complex64::new(0.0, 1.0), unit(&mut rng), unit(&mut rng), unit(&mut rng)];
        for a in circle_alphas {
            match build_v_circle(&nu, a).and_then(|v| v.check()) {
                Ok(c) => {
                    unit_c.add(c.unitarity_residual.max(c.co_unitarity_residual));
                    inter_c.add(c.intertwining_residual);
                    norm_c.add(c.normalization_residual);
                }
                Err(e) => b.error("circle_representation", e),
            }
        }
    }
    for w in [&unit_l, &inter_l, &norm_l, &unit_c, &inter_c, &norm_c] {
        b.worst(w);
    }
    b.finish(1, "representation operators", t, Some(60.0))
}

/// Aronszajn–Krein formula against the Cauchy transform of the eigen-oracle
/// spectral measure, interlacing with the atoms, and disjoint spectra for
/// distinct couplings.
pub fn aronszajn_krein_suite(seed: u64) -> CriterionOutcome {
    let t = Instant::now();
    let mut rng = rng_for(seed, 2);
    let mut b = Builder::new();
    let mut rel = Worst::new("aronszajn_krein_relative", 1e-10);
    let mut gap = Worst::new("interlacing_violations", 0.0);
    let mut overlap = Worst::new("shared_eigenvalues", 0.0);
    for n in dims(20, 2, 40) {
        let mu = Measure::random_atomic_line(n, &mut rng);
        let one = ones(&mu);
        let pts: Vec<Complex64> =
            (0..20).map(|_| Complex64::new(3.0 * rng.random::<f64>() - 1.5, 0.05 + 2.0 * rng.random::<f64>())).collect();
        let vals: Result<Vec<Complex64>> = pts.iter().map(|&l| cauchy_line(&mu, &one, l)).collect();
        let field = match vals {
            Ok(values) => AnalyticField { eval_points: pts.clone(), values, side: Side::None },
            Err(e) => {
                b.error("cauchy_transform", e);
                continue;
            }
        };
        let atoms: Vec<f64> = mu.atoms.iter().map(|a| a.position).collect();
        let mut spectra: Vec<Vec<f64>> = vec![];
        for a in LINE_ALPHAS {
            let mut run = || -> Result<()> {
                let fa = aronszajn_krein(&field, Complex64::new(a, 0.0))?;
                let oracle = spectral_measure_perturbed_line(&SelfAdjointFamily { base: mu.clone(), alpha: a })?;
                let ones_o = ones(&oracle);
                for (k, &l) in pts.iter().enumerate() {
                    let o = cauchy_line(&oracle, &ones_o, l)?;
                    rel.add((fa.values[k] - o).norm() / o.norm());
                }
                let eigs = clark_spectrum_line(&mu, a)?.positions;
                let il = interlacing_line(&atoms, &eigs, a);
                if !il.degenerate {
                    gap.add(if il.strict { 0.0 } else { 1.0 });
                }
                spectra.push(eigs);
                Ok(())
            };
            if let Err(e) = run() {
                b.error("aronszajn_krein", e);
            }
        }
        for i in 0..spectra.len() {
            for j in (i + 1)..spectra.len() {
                let shared = spectra[i].iter().filter(|x| spectra[j].iter().any(|y| y == *x)).count();
                overlap.add(shared as f64);
            }
        }
    }
    b.worst(&rel);
    b.worst(&gap);
    b.worst(&overlap);
    b.finish(2, "Aronszajn-Krein and interlacing", t, None)
}

/// Cauchy-regularized Hilbert transforms between 20 Clark pairs on the
/// ε-grid `2^0 … 2^-20`.
pub fn uniform_bound_suite(seed: u64) -> CriterionOutcome {
    let t = Instant::now();
    let mut rng = rng_for(seed, 3);
    let mut b = Builder::new();
    let eps: Vec<f64> = (0..=20).map(|k| 0.5f64.powi(k)).collect();
    let kernel = KernelSpec::named(BaseKernel::Hilbert);
    let mut excess = Worst::new("sup_minus_bound", 0.0);
    let mut tail = Worst::new("tail_ratio", 1.05);
    for (k, n) in dims(20, 3, 40).enumerate() {
        let mu = Measure::random_atomic_line(n, &mut rng);
        let alpha = LINE_ALPHAS[k % LINE_ALPHAS.len()];
        let bound = 2.0 / alpha.abs() + 1e-6;
        let run = || -> Result<_> {
            let v = build_v_alpha(&mu, alpha)?;
            uniform_bound_scan(
                &kernel,
                Family::Cauchy,
                &PointMass::from_measure(&mu),
                &PointMass::from_measure(&v.target),
                &eps,
                Some(bound),
            )
        };
        match run() {
            Ok(r) => {
                excess.add((r.sup - bound).max(0.0));
                tail.add(r.tail_ratio);
            }
            Err(e) => b.error("scan", e),
        }
    }
    b.worst(&excess);
    b.worst(&tail);
    b.finish(3, "uniform boundedness of regularizations", t, Some(120.0))
}

/// Variation bound on 100 random kernel/multiplier pairs and the circle
/// coefficient sums.
pub fn schur_suite(seed: u64) -> CriterionOutcome {
    let t = Instant::now();
    let mut b = Builder::new();
    match schur_test(100, seed ^ 4, &Tolerances::default()) {
        Ok(out) => out.report.checks.into_iter().for_each(|c| b.push(c)),
        Err(e) => b.error("schur", e),
    }
    b.finish(4, "Schur multipliers", t, None)
}

/// Cell densities in `[0.05, 1.05)`, each cell left empty with the given
/// probability.
fn random_density(rng: &mut ChaCha8Rng, n: usize, empty_fraction: f64) -> Vec<f64> {
    (0..n).map(|_| if rng.random::<f64>() < empty_fraction { 0.0 } else { 0.05 + rng.random::<f64>() }).collect()
}

/// Well-mixed halves at dyadic levels 0..=8 on grids of 4096 cells.
pub fn well_mixed_suite(seed: u64) -> CriterionOutcome {
    let t = Instant::now();
    let mut rng = rng_for(seed, 5);
    let mut b = Builder::new();
    let n = 1 << 12;
    let mut measures = vec![Measure::lebesgue_line(-1.0, 1.0, n)];
    let mut densities = vec![random_density(&mut rng, n, 0.0), random_density(&mut rng, n, 0.1)];
    // empty blocks of 64 cells: a gap in the support rather than isolated holes
    let mut blocky = random_density(&mut rng, n, 0.0);
    for (j, d) in blocky.iter_mut().enumerate() {
        if (j / 64) % 3 == 1 {
            *d = 0.0;
        }
    }
    densities.push(blocky);
    for density in densities {
        let g = DensityGrid { a: -1.0, b: 1.0, n, density };
        match Measure::new(Support::Line, vec![], Some(g), "random density") {
            Ok(m) => measures.push(m),
            Err(e) => b.error("density", e),
        }
    }
    // smooth density with an atom in a hole of two cells; a single empty cell
    // leaves an odd number of nearly equal cells in its finest bin
    let mut dens: Vec<f64> = (0..n).map(|j| 1.0 + 0.9 * (6.0 * PI * j as f64 / n as f64).sin()).collect();
    dens[100] = 0.0;
    dens[101] = 0.0;
    let g = DensityGrid { a: 0.0, b: 3.0, n, density: dens };
    let pos = g.midpoint(100);
    match Measure::new(Support::Line, vec![crate::Atom { position: pos, weight: 0.5 }], Some(g), "smooth+atom") {
        Ok(m) => measures.push(m),
        Err(e) => b.error("density", e),
    }
    for level in 0..=8u32 {
        let mut worst: f64 = 0.0;
        let mut ok = true;
        for m in &measures {
            match well_mixed_sets(m, level) {
                Ok(p) => {
                    worst = worst.max(p.max_rel_error);
                    ok &= p.passed;
                }
                Err(e) => {
                    b.error("well_mixed", e);
                    ok = false;
                }
            }
        }
        let mut c = Check::below(format!("level_{level}"), worst, 0.5f64.powi(level as i32) + 1e-12);
        c.passed &= ok;
        b.push(c);
    }
    b.finish(5, "well-mixed sets", t, None)
}

/// Characteristic function from the contraction matrix against the measure
/// formula, the value at the origin, and the Lebesgue case.
pub fn characteristic_suite(seed: u64) -> CriterionOutcome {
    let t = Instant::now();
    let mut rng = rng_for(seed, 6);
    let mut b = Builder::new();
    let mut routes = Worst::new("matrix_vs_measure_relative", 1e-8);
    let mut origin = Worst::new("theta_at_origin", 1e-12);
    for n in dims(50, 1, 40) {
        let mu = Measure::random_atomic_circle(n, &mut rng);
        let mu = mu.scaled(1.0 / mu.mass());
        let gamma = in_disc(&mut rng, 0.9);
        let z = in_disc(&mut rng, 0.95);
        let mut run = || -> Result<()> {
            let m = char_function_from_contraction(&UnitaryFamily { base: mu.clone(), param: gamma }, z)?;
            let f = theta_from_measure(&mu, gamma, z)?;
            routes.add((m - f).norm() / f.norm().max(1e-300));
            origin.add((theta_from_measure(&mu, gamma, Complex64::new(0.0, 0.0))? + gamma).norm());
            Ok(())
        };
        if let Err(e) = run() {
            b.error("characteristic_function", e);
        }
    }
    let mut leb = Worst::new("lebesgue_theta0_max", 1e-8);
    let lebesgue = Measure::lebesgue_circle(256);
    for _ in 0..200 {
        match theta_from_measure(&lebesgue, Complex64::new(0.0, 0.0), in_disc(&mut rng, 0.99)) {
            Ok(v) => leb.add(v.norm()),
            Err(e) => b.error("lebesgue", e),
        }
    }
    b.worst(&routes);
    b.worst(&origin);
    b.worst(&leb);
    b.finish(6, "characteristic function", t, None)
}

/// Clark-operator routes on 25 random (measure, γ, f) triples: 20 atomic
/// measures of dimension up to 100 and 5 mixed measures.
pub fn clark_suite(seed: u64) -> CriterionOutcome {
    let t = Instant::now();
    let mut rng = rng_for(seed, 7);
    let mut b = Builder::new();
    let mut routes = Worst::new("route_agreement", 1e-7);
    let mut gram = Worst::new("gram_unitarity", 1e-9);
    let mut inter = Worst::new("compressed_shift_intertwining", 1e-8);
    let mut trip = Worst::new("round_trip", 1e-6);
    let mut one = Worst::new("phi_one", 1e-10);
    let mut cases: Vec<Measure> = dims(20, 2, 100).map(|n| Measure::random_atomic_circle(n, &mut rng)).collect();
    for w in [0.1, 0.25, 0.4, 0.55, 0.7] {
        match mixed_measure(Support::Circle, w) {
            Ok(m) => cases.push(m),
            Err(e) => b.error("mixed", e),
        }
    }
    for mu in cases {
        let mu = mu.scaled(1.0 / mu.mass());
        let gamma = in_disc(&mut rng, 0.8);
        let f = random_function(mu.dim(), &mut rng);
        let run = || -> Result<_> {
            let theta = CharacteristicFunction::new(&mu, gamma, BoundaryGrid::new(1024)?)?;
            clark_route_report(&theta, &f, true)
        };
        match run() {
            Ok(r) => {
                routes.add(r.universal_vs_snf.max(r.universal_vs_dbr).max(r.snf_vs_dbr));
                trip.add(r.round_trip_residual);
                one.add(r.phi_one_residual);
                if let Some(g) = r.gram_residual {
                    gram.add(g);
                }
                if let Some(i) = r.intertwining_residual {
                    inter.add(i);
                }
            }
            Err(e) => b.error("clark_routes", e),
        }
    }
    for w in [&routes, &gram, &inter, &trip, &one] {
        b.worst(w);
    }
    b.finish(7, "Clark operator routes", t, None)
}

/// Boundary values of `θ₀` as radial limits of the measure formula.
fn theta0_boundary(mu: &Measure, phi: f64) -> Result<(Complex64, bool)> {
    let xi = Complex64::from_polar(1.0, phi);
    radial_limit_with(|h| theta_from_measure(mu, Complex64::new(0.0, 0.0), (1.0 - h) * xi), 0.5, 1e-12)
}

/// `T₊𝟏`, `T₋𝟏` against the boundary values of `θ₀`; the Fatou jump on
/// absolutely continuous grids; normalized Cauchy limits at atoms.
pub fn boundary_suite(seed: u64) -> CriterionOutcome {
    let t = Instant::now();
    let mut rng = rng_for(seed, 8);
    let mut b = Builder::new();
    let mut tp = Worst::new("t_plus_one", 1e-8);
    let mut tm = Worst::new("t_minus_one", 1e-8);
    let mut fatou = Worst::new("fatou_jump", 1e-5);
    let mut atoms = Worst::new("normalized_cauchy_at_atoms", 1e-6);
    let mut unconverged = 0usize;

    let mut measures = vec![];
    for w in [0.2, 0.5] {
        match mixed_measure(Support::Circle, w) {
            Ok(m) => measures.push(m),
            Err(e) => b.error("mixed", e),
        }
    }
    for n in [3, 12] {
        measures.push(Measure::random_atomic_circle(n, &mut rng));
    }
    for mu in &measures {
        let one = ones(mu);
        let points: Vec<f64> = (0..64).map(|k| -PI + 2.0 * PI * (k as f64 + 0.37) / 64.0).collect();
        for &phi in &points {
            let mut run = || -> Result<()> {
                let (t0, ok) = theta0_boundary(mu, phi)?;
                if !ok {
                    unconverged += 1;
                    return Ok(());
                }
                let plus = cauchy_circle_limit(mu, &one, phi, Side::Plus)?;
                let minus = cauchy_circle_limit(mu, &one, phi, Side::Minus)?;
                tp.add((plus - 1.0 / (1.0 - t0)).norm() / plus.norm().max(1.0));
                tm.add((minus + t0.conj() / (1.0 - t0.conj())).norm() / minus.norm().max(1.0));
                Ok(())
            };
            if let Err(e) = run() {
                b.error("boundary_identity", e);
            }
        }
    }

    // Fatou jump at cell midpoints by radial numerics on both sides
    for support in [Support::Circle, Support::Line] {
        let mut run = || -> Result<f64> {
            let mu = mixed_measure(support, 0.3)?;
            let f = random_function(mu.dim(), &mut rng);
            let g = mu.grid.clone().expect("mixed measure has a grid");
            let cells: Vec<usize> = (0..g.n).filter(|&j| g.density[j] > 0.0).step_by(3).collect();
            let pts: Vec<f64> = cells.iter().map(|&j| g.midpoint(j)).collect();
            let plus = boundary_values(&mu, &f, Side::Plus, &pts)?;
            let minus = boundary_values(&mu, &f, Side::Minus, &pts)?;
            let factor = match support {
                Support::Circle => Complex64::new(1.0, 0.0),
                Support::Line => Complex64::new(0.0, 2.0 * PI),
            };
            let offset = mu.n_atoms();
            let mut worst: f64 = 0.0;
            for (k, &j) in cells.iter().enumerate() {
                let expect = factor * g.density[j] * f[offset + j];
                worst = worst.max((plus.values[k] - minus.values[k] - expect).norm() / expect.norm().max(1.0));
            }
            Ok(worst)
        };
        match run() {
            Ok(w) => fatou.add(w),
            Err(e) => b.error("fatou", e),
        }
    }

    for mu in &measures {
        let f = random_function(mu.dim(), &mut rng);
        match normalized_cauchy_at_atoms(mu, &f) {
            Ok(c) => atoms.add(c.max_error),
            Err(e) => b.error("normalized_cauchy", e),
        }
    }
    for w in [&tp, &tm, &fatou, &atoms] {
        b.worst(w);
    }
    b.push(Check::below("unconverged_radial_limits", unconverged as f64, 0.0));
    b.finish(8, "boundary identities", t, None)
}

/// Half-plane bridge on random line measures with `Im α ∈ {0.1, 1, 10}`.
pub fn dissipative_suite(seed: u64) -> CriterionOutcome {
    let t = Instant::now();
    let mut rng = rng_for(seed, 9);
    let mut b = Builder::new();
    let mut cayley = Worst::new("cayley_identity", 1e-10);
    let mut transfer = Worst::new("transfer_routes", 1e-7);
    let mut theta = Worst::new("theta_routes", 1e-7);
    let mut phi = Worst::new("adjoint_routes", 1e-7);
    let mut at_i = Worst::new("theta_at_i", 1e-12);
    let mut dichotomy = true;
    for (k, n) in dims(12, 1, 12).enumerate() {
        let mu = Measure::random_atomic_line(n, &mut rng);
        let mu = mu.scaled(0.5 + rng.random::<f64>());
        let im = [0.1, 1.0, 10.0][k % 3];
        let alpha = Complex64::new(4.0 * rng.random::<f64>() - 2.0, im);
        match dissipative_report(&mu, alpha, 512) {
            Ok(d) => {
                let r = d.route_residuals;
                cayley.add(r.cayley_identity.max(r.cayley_via_circle));
                transfer.add(r.r_transfer.max(r.r1_transfer).max(r.r2_transfer));
                theta.add(r.theta_transfer.max(r.theta_forms));
                phi.add(r.universal_vs_circle.max(r.snf_vs_circle).max(r.universal_vs_snf).max(r.general_p));
                at_i.add(r.theta_at_i);
                dichotomy &= r.gamma_dichotomy && d.gamma[0].hypot(d.gamma[1]) < 1.0;
            }
            Err(e) => b.error("dissipative", e),
        }
    }
    for w in [&cayley, &transfer, &theta, &phi, &at_i] {
        b.worst(w);
    }
    b.push(Check::flag("gamma_dichotomy", dichotomy));
    b.finish(9, "dissipative bridge", t, None)
}

/// Criteria 1 to 9 in order.
pub fn run_criteria(seed: u64) -> Vec<CriterionOutcome> {
    let suites: [fn(u64) -> CriterionOutcome; 9] = [
        representation_suite,
        aronszajn_krein_suite,
        uniform_bound_suite,
        schur_suite,
        well_mixed_suite,
        characteristic_suite,
        clark_suite,
        boundary_suite,
        dissipative_suite,
    ];
    suites.iter().map(|s| s(seed)).collect()
}

#[derive(Serialize)]
struct CriterionSummary<'a> {
    id: u32,
    title: &'a str,
    passed: bool,
}

pub fn report_for(seed: u64, outcomes: &[CriterionOutcome]) -> RunReport {
    let mut report = RunReport::new("acceptance");
    report.seed = Some(seed);
    for o in outcomes {
        for c in &o.checks {
            let mut c = c.clone();
            c.name = format!("criterion_{}.{}", o.id, c.name);
            report.push(c);
        }
    }
    let summary: Vec<CriterionSummary> =
        outcomes.iter().map(|o| CriterionSummary { id: o.id, title: &o.title, passed: o.passed }).collect();
    report.with_result(&summary)
}

/// The full suite: criteria 1 to 9, then a second run whose serialized
/// report must match the first byte for byte, within ten minutes overall.
pub fn run_acceptance(seed: u64) -> (RunReport, Vec<CriterionOutcome>) {
    let t = Instant::now();
    let mut outcomes = run_criteria(seed);
    let first = report_for(seed, &outcomes).to_json();
    let second = report_for(seed, &run_criteria(seed)).to_json();
    let runtime = t.elapsed();
    let checks = vec![
        Check::flag("byte_identical_reports", first == second),
        Check::flag("runtime_under_600s", runtime.as_secs_f64() < 600.0).timed(runtime),
    ];
    outcomes.push(CriterionOutcome {
        id: 10,
        title: "determinism and total runtime".into(),
        passed: checks.iter().all(|c| c.passed),
        checks,
        runtime,
    });
    (report_for(seed, &outcomes), outcomes)
}
