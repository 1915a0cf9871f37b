use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::linalg::CMat;
use crate::measure::{Atom, DensityGrid};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn grid(n: usize) -> BoundaryGrid {
    BoundaryGrid::new(n).unwrap()
}

/// Smooth positive density on 64 cells with one empty cell carrying an atom.
pub(crate) fn mixed_measure(atom_weight: f64) -> Measure {
    let n = 64;
    let mut density: Vec<f64> = (0..n).map(|j| 1.0 + 0.5 * (2.0 * PI * j as f64 / n as f64).cos()).collect();
    density[20] = 0.0;
    let h = 2.0 * PI / n as f64;
    let ac: f64 = density.iter().sum::<f64>() * h / (2.0 * PI);
    let scale = (1.0 - atom_weight) / ac;
    density.iter_mut().for_each(|d| *d *= scale);
    let g = DensityGrid { a: -PI, b: PI, n, density };
    let pos = g.midpoint(20);
    Measure::new(Support::Circle, vec![Atom { position: pos, weight: atom_weight }], Some(g), "mixed").unwrap()
}

#[test]
fn lebesgue_gives_zero_theta0() {
    let mu = Measure::lebesgue_circle(64);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let l = Complex64::from_polar(0.99 * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>());
        let f = theta_forms(&mu, c(0.0, 0.0), l).unwrap();
        assert!(f.via_r2.norm() < 1e-12 && f.via_r1.norm() < 1e-12);
    }
    let th = CharacteristicFunction::new(&mu, c(0.0, 0.0), grid(256)).unwrap();
    assert!(th.theta.iter().all(|t| t.norm() < 1e-12));
    assert!(th.delta.iter().all(|d| (d - 1.0).abs() < 1e-12));
}

#[test]
fn value_at_origin_is_minus_gamma() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in [1, 3, 10] {
        let mu = Measure::random_atomic_circle(n, &mut rng);
        for g in [c(0.0, 0.0), c(0.5, 0.0), c(-0.2, 0.7)] {
            let f = theta_forms(&mu, g, c(0.0, 0.0)).unwrap();
            assert!((f.via_r2 + g).norm() < 1e-12);
            assert!((f.via_r1 + g).norm() < 1e-12);
        }
    }
}

#[test]
fn single_atom_is_inner() {
    let mu = Measure::atomic(Support::Circle, &[(0.7, 1.0)]).unwrap();
    let th = CharacteristicFunction::new(&mu, c(0.3, -0.1), grid(128)).unwrap();
    assert!(th.inner_score() < 1e-6);
    assert!(th.theta.iter().all(|t| (t.norm() - 1.0).abs() < 1e-12));
    // θ₀(λ) = ξ̄λ for one atom at ξ
    let xi = Complex64::from_polar(1.0, 0.7);
    let l = c(0.2, 0.4);
    assert!((th.eval_theta0(l).unwrap() - xi.conj() * l).norm() < 1e-13);
}

#[test]
fn both_forms_agree_on_mixed_measure() {
    let mu = mixed_measure(0.2);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let l = Complex64::from_polar(0.95 * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>());
        let g = Complex64::from_polar(0.9 * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>());
        let f = theta_forms(&mu, g, l).unwrap();
        assert!((f.via_r1 - f.via_r2).norm() < 1e-12);
        assert!(f.via_r2.norm() < 1.0);
    }
}

#[test]
fn fractional_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let t0 = Complex64::from_polar(rng.random::<f64>(), 2.0 * PI * rng.random::<f64>());
        let g = Complex64::from_polar(0.99 * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>());
        let tg = fractional_relation(t0, g).unwrap();
        assert!((fractional_inverse(tg, g).unwrap() - t0).norm() < 1e-13);
    }
    assert_eq!(fractional_relation(c(0.3, 0.2), c(0.0, 0.0)).unwrap(), c(0.3, 0.2));
    assert!((fractional_relation(c(0.0, 0.0), c(0.4, 0.1)).unwrap() + c(0.4, 0.1)).norm() < 1e-16);
}

#[test]
fn contraction_route_one_by_one() {
    let mu = Measure::atomic(Support::Circle, &[(0.0, 1.0)]).unwrap();
    let fam = UnitaryFamily { base: mu.clone(), param: c(0.5, 0.0) };
    for z in [c(0.0, 0.0), c(0.3, 0.1), c(-0.6, 0.2)] {
        let a = char_function_from_contraction(&fam, z).unwrap();
        let b = theta_from_measure(&mu, c(0.5, 0.0), z).unwrap();
        assert!((a - b).norm() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn contraction_route_matches_measure_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mu = Measure::random_atomic_circle(4, &mut rng);
    let g = c(0.2, -0.3);
    let fam = UnitaryFamily { base: mu.clone(), param: g };
    for _ in 0..10 {
        let z = Complex64::from_polar(0.98 * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>());
        let a = char_function_from_contraction(&fam, z).unwrap();
        let b = theta_from_measure(&mu, g, z).unwrap();
        assert!((a - b).norm() < 1e-10 * b.norm().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn matrix_definition_at_origin() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mu = Measure::random_atomic_circle(5, &mut rng);
    let u = crate::perturbation::build_u_param(&UnitaryFamily { base: mu, param: c(0.1, 0.4) }).unwrap();
    let m = char_function_matrix(&u.matrix, c(0.0, 0.0)).unwrap();
    assert!(linalg::frobenius(&(m + &u.matrix)) < 1e-14);
}

#[test]
fn defect_vectors_for_zero_theta() {
    let mu = Measure::lebesgue_circle(32);
    let th = CharacteristicFunction::new(&mu, c(0.0, 0.0), grid(128)).unwrap();
    let dv = th.defect_vectors().unwrap();
    for k in 0..128 {
        assert!((dv.c.g1[k] - 1.0).norm() < 1e-12 && dv.c.g2[k].norm() < 1e-12);
        assert!(dv.c1.g1[k].norm() < 1e-12);
        assert!((dv.c1.g2[k] - th.grid.points[k].conj()).norm() < 1e-12);
    }
}

#[test]
fn defect_vectors_are_unit() {
    let mu = Measure::lebesgue_circle(32);
    let th = CharacteristicFunction::new(&mu, c(0.5, 0.0), grid(256)).unwrap();
    let dv = th.defect_vectors().unwrap();
    assert!((dv.c.norm(&th.grid) - 1.0).abs() < 1e-8);
    assert!((dv.c1.norm(&th.grid) - 1.0).abs() < 1e-8);
    let th = CharacteristicFunction::new(&mixed_measure(0.3), c(0.2, 0.3), grid(4096)).unwrap();
    let dv = th.defect_vectors().unwrap();
    assert!((dv.c.norm(&th.grid) - 1.0).abs() < 1e-5, "{}", dv.c.norm(&th.grid));
    assert!((dv.c1.norm(&th.grid) - 1.0).abs() < 1e-5);
    assert!(dv.c.membership_residual(&th) < 1e-3);
    assert!(dv.c1.membership_residual(&th) < 1e-3);
}

#[test]
fn inner_case_has_one_story() {
    let mu = Measure::atomic(Support::Circle, &[(-1.0, 0.4), (1.2, 0.6)]).unwrap();
    let th = CharacteristicFunction::new(&mu, c(0.3, 0.0), grid(512)).unwrap();
    let dv = th.defect_vectors().unwrap();
    assert!(dv.c.g2.iter().chain(&dv.c1.g2).all(|v| v.norm() == 0.0));
}

#[test]
fn projection_is_idempotent_and_kills_range() {
    let mu = Measure::atomic(Support::Circle, &[(-2.5, 0.2), (-0.4, 0.5), (1.0, 0.3)]).unwrap();
    let th = CharacteristicFunction::new(&mu, c(-0.3, 0.2), grid(4096)).unwrap();
    let members = sample_members(&th).unwrap();
    for v in &members {
        assert!(v.membership_residual(&th) < 1e-9, "{}", v.membership_residual(&th));
    }
    let mixed = CharacteristicFunction::new(&mixed_measure(0.15), c(-0.3, 0.2), grid(4096)).unwrap();
    for v in &sample_members(&mixed).unwrap() {
        assert!(v.membership_residual(&mixed) < 1e-3);
    }
    let t: Vec<Complex64> = th.theta.clone();
    let d: Vec<Complex64> = th.delta.iter().map(|&x| c(x, 0.0)).collect();
    let p = snf_project(&th, &t, &d);
    assert!(p.norm(&th.grid) < 1e-9);
    // self-adjointness
    let (a, b) = (&members[1], &members[2]);
    let raw = ModelVectorSNF { g1: th.grid.points.iter().map(|z| z * z + 0.5).collect(), g2: d.clone() };
    let pr = snf_project(&th, &raw.g1, &raw.g2);
    assert!((pr.inner(a, &th.grid) - raw.inner(a, &th.grid)).norm() < 1e-10);
    assert!((pr.inner(b, &th.grid) - raw.inner(b, &th.grid)).norm() < 1e-10);
}

#[test]
fn inner_projection_has_rank_n() {
    let mu = Measure::atomic(Support::Circle, &[(-2.0, 0.3), (0.0, 0.3), (1.5, 0.4)]).unwrap();
    let th = CharacteristicFunction::new(&mu, c(0.2, 0.1), grid(1024)).unwrap();
    let vs: Vec<ModelVectorSNF> = (0..6)
        .map(|j| {
            let l = Complex64::from_polar(0.4, j as f64);
            let g1: Vec<Complex64> = th.grid.points.iter().map(|z| 1.0 / (1.0 - l.conj() * z)).collect();
            snf_project(&th, &g1, &vec![c(0.0, 0.0); 1024])
        })
        .collect();
    let gram = CMat::from_fn(6, 6, |i, j| vs[i].inner(&vs[j], &th.grid));
    let sv = linalg::singular_values(&gram);
    assert!(sv[2] > 1e-6 && sv[3] < 1e-10, "{sv:?}");
}

#[test]
fn compressed_shift_two_routes() {
    let atomic = Measure::atomic(Support::Circle, &[(-2.0, 0.3), (0.0, 0.3), (1.5, 0.4)]).unwrap();
    // density jumps limit the FFT route to O(1/N) on mixed measures
    for (mu, g, tol) in
        [(Measure::lebesgue_circle(64), c(0.5, 0.0), 1e-10), (atomic, c(0.2, 0.1), 1e-8), (mixed_measure(0.2), c(0.1, -0.4), 1e-3)]
    {
        let th = CharacteristicFunction::new(&mu, g, grid(4096)).unwrap();
        let dv = th.defect_vectors().unwrap();
        let s = CompressedShiftAgreement::compute(&th, &dv, &sample_members(&th).unwrap());
        assert!(s.max_residual < tol, "{s:?}");
        assert!(s.max_gain <= 1.0 + 1e-10);
    }
}

#[test]
fn compressed_shift_in_rational_basis_is_a_contraction() {
    let mu = Measure::atomic(Support::Circle, &[(-1.0, 0.5), (1.0, 0.5)]).unwrap();
    let th = CharacteristicFunction::new(&mu, c(0.3, 0.2), grid(2048)).unwrap();
    let basis = InnerBasis::for_characteristic(&th).unwrap();
    let dv = th.defect_vectors().unwrap();
    let g = &th.grid;
    let vecs: Vec<ModelVectorSNF> =
        (0..2).map(|j| ModelVectorSNF { g1: g.points.iter().map(|&z| basis.eval(z)[j]).collect(), g2: vec![c(0.0, 0.0); g.n] }).collect();
    let m = CMat::from_fn(2, 2, |i, j| compressed_shift_rank_one(&th, &dv, &vecs[j]).inner(&vecs[i], g));
    assert!(linalg::spectral_norm(&m) <= 1.0 + 1e-10);
    // eigenvalues of the compressed shift are the zeros of θ
    let mut ev = linalg::eigenvalues(&m).unwrap();
    let mut zs = basis.zeros.clone();
    ev.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    zs.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    assert!(linalg::max_abs_diff(&ev, &zs) < 1e-9, "{ev:?} {zs:?}");
}

#[test]
fn rational_basis_matches_theta_and_kernels() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mu = Measure::random_atomic_circle(12, &mut rng);
    let th = CharacteristicFunction::new(&mu, c(-0.4, 0.3), grid(512)).unwrap();
    let b = InnerBasis::for_characteristic(&th).unwrap();
    assert_eq!(b.dim(), 12);
    assert!((b.kappa.norm() - 1.0).abs() < 1e-10);
    for k in (0..512).step_by(7) {
        assert!((b.blaschke(th.grid.points[k]) - th.theta[k]).norm() < 1e-9);
    }
    // ⟨k_λ, k_ω⟩ = (1 − θ(ω)̄θ(λ))/(1 − ω̄λ)
    let l = c(0.2, 0.5);
    let w = c(-0.6, 0.1);
    let gl = b.kernel_coordinates(l);
    let gw = b.kernel_coordinates(w);
    let ip: Complex64 = gl.iter().zip(&gw).map(|(x, y)| x * y.conj()).sum();
    // inner products are linear in the first slot, so ⟨k_λ, k_ω⟩ = k_λ(ω)
    let want = (1.0 - th.eval(l).unwrap().conj() * th.eval(w).unwrap()) / (1.0 - l.conj() * w);
    assert!((ip - want).norm() < 1e-10, "{ip} vs {want}");
}

#[test]
fn transcription_for_zero_and_inner_theta() {
    let th = CharacteristicFunction::new(&Measure::lebesgue_circle(16), c(0.0, 0.0), grid(64)).unwrap();
    let v = ModelVectorSNF { g1: th.grid.points.clone(), g2: th.grid.points.iter().map(|z| z.conj()).collect() };
    let d = transcription_map(&th, &v);
    assert!(linalg::max_abs_diff(&d.g_minus, &v.g2) < 1e-13);

    let mu = Measure::atomic(Support::Circle, &[(0.5, 0.5), (2.0, 0.5)]).unwrap();
    let th = CharacteristicFunction::new(&mu, c(0.1, 0.0), grid(256)).unwrap();
    let v = &sample_members(&th).unwrap()[1];
    let d = transcription_map(&th, v);
    for k in 0..256 {
        assert!((d.g_minus[k] - th.theta[k].conj() * v.g1[k]).norm() < 1e-15);
    }
    assert!(d.membership_residual(&th) < 1e-14);
    assert!((d.norm(&th) - v.norm(&th.grid)).abs() < 1e-10);
}

#[test]
fn transcription_norm_equality_on_mixed_measure() {
    let th = CharacteristicFunction::new(&mixed_measure(0.25), c(0.3, 0.3), grid(4096)).unwrap();
    assert!(moore_penrose_residual(&th) < 1e-12);
    for v in sample_members(&th).unwrap() {
        let d = transcription_map(&th, &v);
        assert!((d.norm(&th) - v.norm(&th.grid)).abs() < 1e-6 * v.norm(&th.grid));
        let back = transcription_inverse(&th, &d);
        assert!(back.distance(&v, &th.grid) < 1e-10);
        // g₋ is anti-analytic
        let anti = th.grid.antianalytic_part(&d.g_minus);
        assert!(linalg::max_abs_diff(&anti, &d.g_minus) < 1e-8);
    }
}

#[test]
fn model_check_report() {
    let th = CharacteristicFunction::new(&mixed_measure(0.1), c(0.0, 0.5), grid(4096)).unwrap();
    let r = model_check(&th).unwrap();
    assert!(r.theta_at_0_residual < 1e-12);
    assert!(r.norm_equality_residual < 1e-6);
    assert!(r.compressed_shift_agreement < 1e-3);
    assert!(r.projection_idempotence < 1e-3);
    assert!(r.inner_score > 0.1);
    let th = CharacteristicFunction::new(&Measure::lebesgue_circle(128), c(0.3, -0.3), grid(4096)).unwrap();
    let r = model_check(&th).unwrap();
    assert!(r.compressed_shift_agreement < 1e-10 && r.projection_idempotence < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn theta_is_contractive_inside(n in 1usize..8, seed in 0u64..1000, gr in 0.0f64..0.95, ga in 0.0f64..std::f64::consts::TAU, lr in 0.0f64..0.99, la in 0.0f64..std::f64::consts::TAU) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = Measure::random_atomic_circle(n, &mut rng);
        let g = Complex64::from_polar(gr, ga);
        let l = Complex64::from_polar(lr, la);
        let f = theta_forms(&mu, g, l).unwrap();
        prop_assert!(f.via_r2.norm() < 1.0);
        prop_assert!((f.via_r1 - f.via_r2).norm() < 1e-12 * (1.0 + f.via_r2.norm()) * 10.0);
        let t0 = theta_from_measure(&mu, c(0.0, 0.0), l).unwrap();
        prop_assert!((fractional_relation(t0, g).unwrap() - f.via_r2).norm() < 1e-11);
    }
}
