use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::report::{Check, RunReport};
use crate::clark::clark_route_report;
use crate::error::{Error, Result};
use crate::halfplane::{dissipative_report, pushforward_to_circle};
use crate::measure::{Measure, Support};
use crate::model::{model_check, BoundaryGrid, CharacteristicFunction};
use crate::perturbation::{
    clark_spectrum_circle, clark_spectrum_line, spectral_measure_perturbed_circle, spectral_measure_perturbed_line, SelfAdjointFamily,
    UnitaryFamily,
};
use crate::representation::{build_v_alpha, build_v_circle, RepresentationOperator};
use crate::sio::{
    cauchy_multiplier_circle, schur_bound_check, uniform_bound_scan, BaseKernel, Family, Kernel, KernelSpec, PointMass, RestrictedOptions,
    SchurMultiplierSpec,
};

/// Report plus the CSV table, if the subcommand produces one.
#[derive(Clone, Debug)]
pub struct CommandOutput {
    pub report: RunReport,
    pub csv: Option<String>,
}

/// Named tolerances with per-run overrides.
#[derive(Clone, Debug, Default)]
pub struct Tolerances(pub BTreeMap<String, f64>);

impl Tolerances {
    pub fn get(&self, name: &str, default: f64) -> f64 {
        self.0.get(name).copied().unwrap_or(default)
    }
}

fn fmt_c(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, std::time::Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn require_alphas(alphas: &[Complex64]) -> Result<()> {
    if alphas.is_empty() {
        return Err(Error::config("alpha", "at least one value is required"));
    }
    Ok(())
}

fn real_alpha(alpha: Complex64) -> Result<f64> {
    if alpha.im != 0.0 {
        return Err(Error::invalid(format!("line perturbations need real α, got {}", fmt_c(alpha))));
    }
    Ok(alpha.re)
}

/// Reproducible test function on the nodes of `mu`.
pub fn random_function(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..dim).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
}

/// Largest distance between two sorted atom lists (angles compared modulo
/// 2π), together with the largest weight difference; infinite when the
/// counts differ.
fn spectrum_distance(a: &Measure, b: &Measure) -> f64 {
    if a.n_atoms() != b.n_atoms() {
        return f64::INFINITY;
    }
    let (a, b) = (a.sorted(), b.sorted());
    a.atoms
        .iter()
        .zip(&b.atoms)
        .map(|(x, y)| {
            let d = match a.support {
                Support::Line => (x.position - y.position).abs() / x.position.abs().max(1.0),
                Support::Circle => crate::measure::wrap_angle(x.position - y.position).abs(),
            };
            d.max((x.weight - y.weight).abs())
        })
        .fold(0.0, f64::max)
}

/// The perturbed spectral measure from the secular equation and from the
/// eigen-decomposition of the perturbed matrix.
fn spectrum_pair(mu: &Measure, alpha: Complex64) -> Result<(Measure, Measure)> {
    match mu.support {
        Support::Line => {
            let a = real_alpha(alpha)?;
            let s = clark_spectrum_line(mu, a)?.measure("secular")?;
            let o = spectral_measure_perturbed_line(&SelfAdjointFamily { base: mu.clone(), alpha: a })?;
            Ok((s, o))
        }
        Support::Circle => {
            let s = clark_spectrum_circle(mu, alpha)?.measure("secular")?;
            let o = spectral_measure_perturbed_circle(&UnitaryFamily { base: mu.clone(), param: alpha })?;
            Ok((s, o))
        }
    }
}

#[derive(Serialize)]
struct SpectrumRow {
    alpha: [f64; 2],
    eigenvalues: usize,
    oracle_residual: f64,
}

/// Eigenvalues and weights of the perturbed operator for each `α`: real `α`
/// on the line, unimodular `α` on the circle (eigenvalues as angles).
pub fn spectrum_scan(mu: &Measure, alphas: &[Complex64], tol: &Tolerances) -> Result<CommandOutput> {
    require_alphas(alphas)?;
    let tolerance = tol.get("eigen_oracle", 1e-10);
    let mut report = RunReport::new("spectrum-scan");
    let mut csv = String::from("alpha_re,alpha_im,eigenvalue,weight\n");
    let mut rows = vec![];
    for &alpha in alphas {
        let name = format!("eigen_oracle[alpha={}]", fmt_c(alpha));
        let (res, dt) = timed(|| spectrum_pair(mu, alpha));
        match res {
            Ok((s, o)) => {
                for a in &s.atoms {
                    csv.push_str(&format!("{:.17e},{:.17e},{:.17e},{:.17e}\n", alpha.re, alpha.im, a.position, a.weight));
                }
                let r = spectrum_distance(&s, &o);
                rows.push(SpectrumRow { alpha: [alpha.re, alpha.im], eigenvalues: s.n_atoms(), oracle_residual: r });
                report.push(Check::below(name, r, tolerance).timed(dt));
            }
            Err(e) => report.push(Check::failed(name, e).timed(dt)),
        }
    }
    Ok(CommandOutput { report: report.with_result(&rows), csv: Some(csv) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Universal,
    Snf,
    Dbr,
    All,
}

impl Route {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "universal" => Route::Universal,
            "snf" => Route::Snf,
            "dbr" => Route::Dbr,
            "all" => Route::All,
            other => return Err(Error::config("route", format!("unknown route `{other}`"))),
        })
    }
}

#[derive(Serialize)]
struct RepresentationRow {
    alpha: [f64; 2],
    dim: usize,
    unitarity_residual: f64,
    intertwining_residual: f64,
    normalization_residual: f64,
}

pub fn build_representation(mu: &Measure, alpha: Complex64) -> Result<RepresentationOperator> {
    match mu.support {
        Support::Line => build_v_alpha(mu, real_alpha(alpha)?),
        Support::Circle => build_v_circle(mu, alpha),
    }
}

/// Circle probability measure for the model space: line measures are pushed
/// to the circle, circle measures normalized to mass 1.
pub fn model_measure(mu: &Measure) -> Result<Measure> {
    match mu.support {
        Support::Line => pushforward_to_circle(mu),
        Support::Circle => Ok(mu.scaled(1.0 / mu.mass())),
    }
}

pub struct ClarkVerifyRequest<'a> {
    pub measure: &'a Measure,
    pub alphas: &'a [Complex64],
    pub gamma: Option<Complex64>,
    pub route: Route,
    pub grid: usize,
    pub seed: u64,
}

/// Representation-operator residuals for each `α` and, given `γ`, agreement
/// of the Clark-operator routes on a seeded random function.
pub fn clark_verify(req: &ClarkVerifyRequest, tol: &Tolerances) -> Result<CommandOutput> {
    if req.alphas.is_empty() && req.gamma.is_none() {
        return Err(Error::config("alpha", "give at least one α or a γ"));
    }
    let mut report = RunReport::new("clark-verify");
    report.seed = Some(req.seed);
    let mut rows = vec![];
    for &alpha in req.alphas {
        let tag = fmt_c(alpha);
        let (res, dt) = timed(|| build_representation(req.measure, alpha).and_then(|v| v.check()));
        match res {
            Ok(c) => {
                report.push(Check::below(format!("unitarity[alpha={tag}]"), c.unitarity_residual, tol.get("unitarity", 1e-10)).timed(dt));
                report.push(Check::below(format!("intertwining[alpha={tag}]"), c.intertwining_residual, tol.get("intertwining", 1e-10)));
                report.push(Check::below(format!("normalization[alpha={tag}]"), c.normalization_residual, tol.get("normalization", 1e-12)));
                rows.push(RepresentationRow {
                    alpha: [alpha.re, alpha.im],
                    dim: c.dim,
                    unitarity_residual: c.unitarity_residual,
                    intertwining_residual: c.intertwining_residual,
                    normalization_residual: c.normalization_residual,
                });
            }
            Err(e) => report.push(Check::failed(format!("representation[alpha={tag}]"), e).timed(dt)),
        }
    }
    let mut routes = None;
    if let Some(gamma) = req.gamma {
        let (res, dt) = timed(|| -> Result<_> {
            let mu = model_measure(req.measure)?;
            let theta = CharacteristicFunction::new(&mu, gamma, BoundaryGrid::new(req.grid)?)?;
            let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
            let f = random_function(mu.dim(), &mut rng);
            clark_route_report(&theta, &f, true)
        });
        match res {
            Ok(r) => {
                let agree = tol.get("route_agreement", 1e-7);
                let mut checks = vec![];
                if matches!(req.route, Route::Universal | Route::All) {
                    checks.push(Check::below("phi_one", r.phi_one_residual, tol.get("phi_one", 1e-10)));
                    checks.push(Check::below("coefficient_forms", r.ab_form_difference, tol.get("coefficient_forms", 1e-10)));
                    checks.push(Check::below("round_trip", r.round_trip_residual, tol.get("round_trip", 1e-6)));
                    if let Some(g) = r.gram_residual {
                        checks.push(Check::below("gram", g, tol.get("gram", 1e-9)));
                    }
                    if let Some(i) = r.intertwining_residual {
                        checks.push(Check::below("compressed_shift_intertwining", i, tol.get("compressed_shift", 1e-8)));
                    }
                    if let Some(x) = r.rational_vs_universal {
                        checks.push(Check::below("rational_vs_universal", x, agree));
                    }
                }
                if matches!(req.route, Route::Snf | Route::All) {
                    checks.push(Check::below("universal_vs_snf", r.universal_vs_snf, agree));
                }
                if matches!(req.route, Route::Dbr | Route::All) {
                    checks.push(Check::below("universal_vs_dbr", r.universal_vs_dbr, agree));
                }
                if req.route == Route::All {
                    checks.push(Check::below("snf_vs_dbr", r.snf_vs_dbr, agree));
                }
                if let Some(c) = checks.first_mut() {
                    c.runtime = dt;
                }
                checks.into_iter().for_each(|c| report.push(c));
                routes = Some(r);
            }
            Err(e) => report.push(Check::failed("clark_routes", e).timed(dt)),
        }
    }
    #[derive(Serialize)]
    struct Out<T: Serialize> {
        representations: Vec<RepresentationRow>,
        #[serde(skip_serializing_if = "Option::is_none")]
        routes: Option<T>,
    }
    let out = Out { representations: rows, routes };
    Ok(CommandOutput { report: report.with_result(&out), csv: None })
}

/// Kernel selection: a named kernel or an inline/filed JSON combination.
pub fn kernel_from_name(name: &str, custom: Option<&str>) -> Result<KernelSpec> {
    if name == "custom-json" {
        let text = custom.ok_or_else(|| Error::config("kernel", "custom-json needs a kernel definition"))?;
        let text = if text.trim_start().starts_with('{') {
            text.to_string()
        } else {
            std::fs::read_to_string(text).map_err(|e| Error::config("kernel", format!("{text}: {e}")))?
        };
        return KernelSpec::from_json(&text);
    }
    Ok(KernelSpec::named(BaseKernel::parse(name)?))
}

/// `2^0, 2^-1, …, 2^-20`.
pub fn default_eps_grid() -> Vec<f64> {
    (0..=20).map(|k| 0.5f64.powi(k)).collect()
}

/// Bound on the regularized operators between a Clark pair when the
/// regularization converges to a multiple of the representation operator.
fn clark_pair_bound(kernel: &KernelSpec, family: Family, support: Support, alpha: Complex64) -> Option<f64> {
    let single = |k: BaseKernel| kernel.terms.len() == 1 && kernel.terms[0].kernel == k;
    let c = kernel.terms.first().map(|t| Complex64::new(t.coef[0], t.coef[1]).norm()).unwrap_or(1.0);
    match (support, family) {
        (Support::Line, Family::Cauchy) if single(BaseKernel::Hilbert) => Some(2.0 * c / alpha.norm()),
        (Support::Line, Family::Cauchy) if single(BaseKernel::CauchyLine) => Some(c / (std::f64::consts::PI * alpha.norm())),
        (Support::Circle, Family::Radial) if single(BaseKernel::CauchyCircle) => Some(2.0 * c / (1.0 - alpha).norm()),
        _ => None,
    }
}

pub struct RegularizeRequest<'a> {
    pub measure: &'a Measure,
    pub kernel: &'a KernelSpec,
    pub family: Family,
    pub eps_grid: &'a [f64],
    pub alphas: &'a [Complex64],
    pub seed: u64,
}

#[derive(Serialize)]
struct ScanVerdict {
    alpha: Option<[f64; 2]>,
    sup: f64,
    inf: f64,
    tail_ratio: f64,
    target: f64,
    passed: bool,
}

/// Norms of `T_ε` over the ε-grid, from `μ` to its Clark measure for each
/// `α` (or from `μ` to itself when no `α` is given).
pub fn regularize(req: &RegularizeRequest, tol: &Tolerances) -> Result<CommandOutput> {
    if req.eps_grid.is_empty() {
        return Err(Error::config("eps_grid", "grid must be nonempty"));
    }
    let mut report = RunReport::new("regularize");
    report.seed = Some(req.seed);
    let src = PointMass::from_measure(req.measure);
    let targets: Vec<Option<Complex64>> = if req.alphas.is_empty() { vec![None] } else { req.alphas.iter().map(|&a| Some(a)).collect() };
    let with_alpha = !req.alphas.is_empty();
    let mut csv = String::from(if with_alpha { "alpha_re,alpha_im,eps,norm\n" } else { "eps,norm\n" });
    let mut verdicts = vec![];
    for alpha in targets {
        let tag = alpha.map(fmt_c).unwrap_or_else(|| "none".into());
        let (res, dt) = timed(|| -> Result<_> {
            let dst = match alpha {
                Some(a) => PointMass::from_measure(&build_representation(req.measure, a)?.target),
                None => src.clone(),
            };
            let bound = match tol.0.get("sup_bound") {
                Some(&b) => Some(b),
                None => alpha.and_then(|a| clark_pair_bound(req.kernel, req.family, req.measure.support, a)).map(|b| b + 1e-6),
            };
            let bound = match bound {
                Some(b) => b,
                None => {
                    let opts = RestrictedOptions { seed: req.seed, ..RestrictedOptions::default() };
                    4.0 * crate::sio::restricted_bound_estimate(req.kernel, &src, &dst, &opts)?.lower
                }
            };
            uniform_bound_scan(req.kernel, req.family, &src, &dst, req.eps_grid, Some(bound))
        });
        match res {
            Ok(scan) => {
                for row in &scan.rows {
                    match alpha {
                        Some(a) => csv.push_str(&format!("{:.17e},{:.17e},{:.17e},{:.17e}\n", a.re, a.im, row.eps, row.norm)),
                        None => csv.push_str(&format!("{:.17e},{:.17e}\n", row.eps, row.norm)),
                    }
                }
                report.push(Check::below(format!("sup_bound[alpha={tag}]"), scan.sup, scan.target * (1.0 + 1e-12)).timed(dt));
                report.push(Check::below(format!("tail_ratio[alpha={tag}]"), scan.tail_ratio, tol.get("tail_ratio", 1.05)));
                verdicts.push(ScanVerdict {
                    alpha: alpha.map(|a| [a.re, a.im]),
                    sup: scan.sup,
                    inf: scan.inf,
                    tail_ratio: scan.tail_ratio,
                    target: scan.target,
                    passed: scan.passed,
                });
            }
            Err(e) => report.push(Check::failed(format!("scan[alpha={tag}]"), e).timed(dt)),
        }
    }
    Ok(CommandOutput { report: report.with_result(&verdicts), csv: Some(csv) })
}

fn random_line_points(rng: &mut ChaCha8Rng, n: usize) -> PointMass {
    PointMass {
        geometry: crate::sio::Geometry::Line,
        points: (0..n).map(|_| Complex64::new(4.0 * rng.random::<f64>() - 2.0, 0.0)).collect(),
        masses: (0..n).map(|_| 0.1 + rng.random::<f64>()).collect(),
    }
}

fn random_multiplier(rng: &mut ChaCha8Rng) -> SchurMultiplierSpec {
    if rng.random::<f64>() < 0.25 {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        return SchurMultiplierSpec::CauchyLine { eps: 0.05 + rng.random::<f64>(), sign };
    }
    let k = rng.random_range(1..=4);
    SchurMultiplierSpec::LineAtoms {
        positions: (0..k).map(|_| 6.0 * rng.random::<f64>() - 3.0).collect(),
        weights: (0..k).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect(),
    }
}

#[derive(Serialize)]
struct SchurSummary {
    pairs: usize,
    violations: usize,
    worst_ratio: f64,
    circle_coefficient_sums: Vec<[f64; 2]>,
}

/// Variation bound `[KM]^r ≤ var σ · [K]^r` on seeded random kernel and
/// multiplier pairs, and the coefficient sums of the circle Cauchy
/// multipliers.
pub fn schur_test(pairs: usize, seed: u64, tol: &Tolerances) -> Result<CommandOutput> {
    if pairs == 0 {
        return Err(Error::config("pairs", "need at least one pair"));
    }
    let mut report = RunReport::new("schur-test");
    report.seed = Some(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kernels = [KernelSpec::named(BaseKernel::Hilbert), KernelSpec::named(BaseKernel::CauchyLine)];
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    let mut errors = vec![];
    let t = Instant::now();
    for k in 0..pairs {
        let kernel = &kernels[rng.random_range(0..kernels.len())];
        let n_src = rng.random_range(4..=10);
        let n_dst = rng.random_range(4..=10);
        let src = random_line_points(&mut rng, n_src);
        let dst = random_line_points(&mut rng, n_dst);
        let m = random_multiplier(&mut rng);
        let opts = RestrictedOptions { trials: 16, seed: seed.wrapping_add(k as u64), ..RestrictedOptions::default() };
        match schur_bound_check(kernel as &dyn Kernel, &m, &src, &dst, &opts) {
            Ok(r) => {
                let bound = r.variation * r.kernel_upper;
                worst = worst.max(if bound > 0.0 { r.product_lower / bound } else { 0.0 });
                violations += usize::from(!r.passed);
            }
            Err(e) => errors.push(format!("pair {k}: {e}")),
        }
    }
    let dt = t.elapsed();
    report.push(Check::below("variation_bound_violations", violations as f64, 0.0).timed(dt));
    report.push(Check::below("variation_bound_worst_ratio", worst, 1.0 + 1e-12));
    for e in errors {
        report.push(Check::failed("schur_pair", e));
    }

    let terms = 4000;
    let mut sums = vec![];
    for r in [0.0, 0.3, 0.9, 0.99, 1.5, 4.0] {
        let spec = cauchy_multiplier_circle(r)?;
        let coefs = spec.laurent_coefficients(terms).expect("circle multiplier");
        let s: f64 = coefs.iter().map(|c| c.1.abs()).sum();
        // geometric tail of the series beyond `terms`
        let q = if r < 1.0 { r } else { 1.0 / r };
        let tail = q.powi(terms as i32) * spec.variation() / 2.0;
        let name = format!("circle_coefficient_sum[r={r}]");
        report.push(Check::below(name.clone(), (s + tail - spec.variation()).abs(), tol.get("coefficient_sum", 1e-12)));
        report.push(Check::below(format!("{name}<=2"), s, 2.0));
        sums.push([r, s]);
    }
    let summary = SchurSummary { pairs, violations, worst_ratio: worst, circle_coefficient_sums: sums };
    Ok(CommandOutput { report: report.with_result(&summary), csv: None })
}

#[derive(Serialize)]
struct ModelSummary {
    theta_at_0: [f64; 2],
    inner_score: f64,
    norm_equality_residual: f64,
    compressed_shift_agreement: f64,
    moore_penrose_residual: f64,
    projection_idempotence: f64,
}

pub fn model_check_command(mu: &Measure, gamma: Complex64, grid: usize, tol: &Tolerances) -> Result<CommandOutput> {
    let mut report = RunReport::new("model-check");
    let (res, dt) = timed(|| -> Result<_> {
        let mu = model_measure(mu)?;
        let theta = CharacteristicFunction::new(&mu, gamma, BoundaryGrid::new(grid)?)?;
        model_check(&theta)
    });
    let m = match res {
        Ok(m) => m,
        Err(e) => {
            report.push(Check::failed("model_check", e).timed(dt));
            return Ok(CommandOutput { report, csv: None });
        }
    };
    // density jumps limit the FFT projection to O(1/N)
    let (norm_tol, proj_tol) = if mu.grid.is_some() { (1e-6, 1e-3) } else { (1e-8, 1e-8) };
    report.push(Check::below("theta_at_0", m.theta_at_0_residual, tol.get("theta_at_0", 1e-12)).timed(dt));
    report.push(Check::below("norm_equality", m.norm_equality_residual, tol.get("norm_equality", norm_tol)));
    report.push(Check::below("compressed_shift", m.compressed_shift_agreement, tol.get("compressed_shift", proj_tol)));
    report.push(Check::below("projection_idempotence", m.projection_idempotence, tol.get("projection_idempotence", proj_tol)));
    let summary = ModelSummary {
        theta_at_0: m.theta_at_0,
        inner_score: m.inner_score,
        norm_equality_residual: m.norm_equality_residual,
        compressed_shift_agreement: m.compressed_shift_agreement,
        moore_penrose_residual: m.moore_penrose_residual,
        projection_idempotence: m.projection_idempotence,
    };
    Ok(CommandOutput { report: report.with_result(&summary), csv: None })
}

/// Default line measure for the half-plane bridge.
pub fn default_line_measure() -> Measure {
    Measure::atomic(Support::Line, &[(-1.0, 0.3), (0.5, 0.5), (2.0, 0.2)]).expect("valid atoms")
}

pub fn dissipative(mu: &Measure, alpha: Complex64, grid: usize, tol: &Tolerances) -> Result<CommandOutput> {
    if mu.support != Support::Line {
        return Err(Error::config("measure", "the half-plane bridge needs a line measure"));
    }
    if !(alpha.im > 0.0) {
        return Err(Error::config("alpha", "the dissipative bridge needs Im α > 0"));
    }
    let mut report = RunReport::new("dissipative");
    let (res, dt) = timed(|| dissipative_report(mu, alpha, grid));
    let d = match res {
        Ok(d) => d,
        Err(e) => {
            report.push(Check::failed("dissipative", e).timed(dt));
            return Ok(CommandOutput { report, csv: None });
        }
    };
    let r = &d.route_residuals;
    let route = tol.get("route", 1e-7);
    let cay = tol.get("cayley", 1e-10);
    report.push(Check::below("cayley_identity", r.cayley_identity, cay).timed(dt));
    report.push(Check::below("cayley_via_circle", r.cayley_via_circle, cay));
    report.push(Check::below("r_transfer", r.r_transfer, route));
    report.push(Check::below("r1_transfer", r.r1_transfer, route));
    report.push(Check::below("r2_transfer", r.r2_transfer, route));
    report.push(Check::below("theta_transfer", r.theta_transfer, route));
    report.push(Check::below("theta_forms", r.theta_forms, route));
    report.push(Check::below("theta_at_i", r.theta_at_i, tol.get("theta_at_i", 1e-12)));
    report.push(Check::below("universal_vs_circle", r.universal_vs_circle, route));
    report.push(Check::below("snf_vs_circle", r.snf_vs_circle, route));
    report.push(Check::below("universal_vs_snf", r.universal_vs_snf, route));
    report.push(Check::below("general_p", r.general_p, route));
    report.push(Check::flag("gamma_dichotomy", r.gamma_dichotomy));
    Ok(CommandOutput { report: report.with_result(&d), csv: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_atoms_two_alphas_give_four_rows() {
        let mu = Measure::atomic(Support::Line, &[(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let out = spectrum_scan(&mu, &[c(1.0, 0.0), c(2.0, 0.0)], &Tolerances::default()).unwrap();
        assert_eq!(out.csv.unwrap().lines().count(), 5);
        assert!(out.report.passed, "{}", out.report.to_json());
    }

    #[test]
    fn empty_alpha_list_is_a_config_error() {
        let mu = default_line_measure();
        assert!(matches!(spectrum_scan(&mu, &[], &Tolerances::default()), Err(Error::Config { .. })));
    }

    #[test]
    fn bad_alpha_is_collected_not_fatal() {
        let mu = default_line_measure();
        let out = spectrum_scan(&mu, &[c(1.0, 1.0), c(1.0, 0.0)], &Tolerances::default()).unwrap();
        assert!(!out.report.passed);
        assert_eq!(out.report.checks.len(), 2);
        assert!(out.report.checks[1].passed);
    }

    #[test]
    fn clark_verify_on_three_atoms() {
        let mu = Measure::atomic(Support::Circle, &[(-2.0, 0.2), (0.1, 0.5), (1.9, 0.3)]).unwrap();
        let req =
            ClarkVerifyRequest { measure: &mu, alphas: &[c(-1.0, 0.0)], gamma: Some(c(0.3, 0.0)), route: Route::All, grid: 1024, seed: 1 };
        let out = clark_verify(&req, &Tolerances::default()).unwrap();
        assert!(out.report.passed, "{}", out.report.to_json());
    }

    #[test]
    fn regularize_clark_pair() {
        let mu = default_line_measure();
        let k = kernel_from_name("hilbert", None).unwrap();
        let req = RegularizeRequest {
            measure: &mu,
            kernel: &k,
            family: Family::Cauchy,
            eps_grid: &default_eps_grid(),
            alphas: &[c(2.0, 0.0)],
            seed: 0,
        };
        let out = regularize(&req, &Tolerances::default()).unwrap();
        assert!(out.report.passed, "{}", out.report.to_json());
        assert_eq!(out.csv.unwrap().lines().count(), 22);
    }

    #[test]
    fn custom_kernel_json() {
        let k = kernel_from_name("custom-json", Some(r#"{"name": "h2", "terms": [{"kernel": "hilbert", "coef": [2, 0]}]}"#)).unwrap();
        assert_eq!(k.terms.len(), 1);
        assert!(kernel_from_name("custom-json", None).is_err());
        assert!(kernel_from_name("bogus", None).is_err());
    }

    #[test]
    fn schur_small_run() {
        let out = schur_test(10, 3, &Tolerances::default()).unwrap();
        assert!(out.report.passed, "{}", out.report.to_json());
    }

    #[test]
    fn model_and_dissipative_defaults() {
        let mu = Measure::atomic(Support::Circle, &[(-2.0, 0.2), (0.1, 0.5), (1.9, 0.3)]).unwrap();
        let out = model_check_command(&mu, c(0.2, 0.1), 1024, &Tolerances::default()).unwrap();
        assert!(out.report.passed, "{}", out.report.to_json());
        let out = dissipative(&default_line_measure(), c(0.5, 1.0), 512, &Tolerances::default()).unwrap();
        assert!(out.report.passed, "{}", out.report.to_json());
        assert!(dissipative(&default_line_measure(), c(1.0, 0.0), 512, &Tolerances::default()).is_err());
    }
}
