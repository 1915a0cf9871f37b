use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::model::BoundaryGrid;
use crate::representation::build_v_circle;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn mixed_measure(atom_weight: f64) -> Measure {
    crate::model::tests::mixed_measure(atom_weight)
}

fn random_f(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
}

fn char_fn(mu: &Measure, gamma: Complex64, n: usize) -> CharacteristicFunction {
    CharacteristicFunction::new(mu, gamma, BoundaryGrid::new(n).unwrap()).unwrap()
}

#[test]
fn coefficient_forms_agree() {
    for (mu, g) in [(mixed_measure(0.3), c(0.2, -0.4)), (Measure::lebesgue_circle(32), c(-0.5, 0.1))] {
        let th = char_fn(&mu, g, 512);
        let dv = th.defect_vectors().unwrap();
        assert!(a_b_coefficients(&th, &dv).form_difference() < 1e-11);
    }
}

#[test]
fn lebesgue_at_zero_splits_into_analytic_and_antianalytic_parts() {
    let mu = Measure::lebesgue_circle(64);
    let th = char_fn(&mu, c(0.0, 0.0), 1024);
    let dv = th.defect_vectors().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = random_f(64, &mut rng);
    let img = phi_star_universal(&th, &dv, &f).unwrap();
    let samples: Vec<Complex64> = th.grid.angles.iter().map(|&p| value_at(&mu, &f, p).unwrap()).collect();
    let sum: Vec<Complex64> = img.vector.g1.iter().zip(&img.vector.g2).map(|(a, b)| a + b).collect();
    assert!(linalg::max_abs_diff(&sum, &samples) < 1e-10);
    let dbr = dbr_components(&th, &dv, &f).unwrap();
    assert!(dbr.fallback);
}

#[test]
fn three_routes_agree_on_mixed_measure() {
    let mu = mixed_measure(0.25);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_f(mu.dim(), &mut rng);
    let th = char_fn(&mu, c(0.3, 0.2), 1024);
    let rep = clark_route_report(&th, &f, false).unwrap();
    assert!(rep.universal_vs_snf < 1e-7, "{rep:?}");
    assert!(rep.universal_vs_dbr < 1e-7, "{rep:?}");
    assert!(rep.snf_vs_dbr < 1e-7, "{rep:?}");
    assert!(rep.phi_one_residual < 1e-12, "{rep:?}");
    assert!(rep.round_trip_residual < 1e-6, "{rep:?}");
}

#[test]
fn atomic_measure_is_unitary_and_intertwines() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for dim in [2, 7, 30] {
        let mu = Measure::random_atomic_circle(dim, &mut rng);
        let g = Complex64::from_polar(0.7 * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>());
        let th = char_fn(&mu, g, 1024);
        let f = random_f(dim, &mut rng);
        let rep = clark_route_report(&th, &f, true).unwrap();
        assert!(rep.gram_residual.unwrap() < 1e-9, "{rep:?}");
        assert!(rep.intertwining_residual.unwrap() < 1e-8, "{rep:?}");
        assert!(rep.rational_vs_universal.unwrap() < 1e-8, "{rep:?}");
        assert!(rep.universal_vs_snf < 1e-7, "{rep:?}");
        assert!(rep.round_trip_residual < 1e-6, "{rep:?}");
    }
}

#[test]
fn normalized_cauchy_recovers_atom_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mu = mixed_measure(0.4);
    let f = random_f(mu.dim(), &mut rng);
    let chk = normalized_cauchy_at_atoms(&mu, &f).unwrap();
    assert!(chk.max_error < 1e-6, "{chk:?}");
    assert!(chk.converged.iter().all(|&b| b));
}

#[test]
fn alpha_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mu = Measure::random_atomic_circle(6, &mut rng).sorted();
    let g = c(0.1, -0.3);
    let th = char_fn(&mu, g, 512);
    let dv = th.defect_vectors().unwrap();
    for alpha in [c(-1.0, 0.0), Complex64::from_polar(1.0, 0.7)] {
        let v = build_v_circle(&mu, alpha).unwrap();
        let f = random_f(v.target.n_atoms(), &mut rng);
        let a = phi_star_alpha_composition(&th, &dv, &v, &f).unwrap();
        let b = phi_star_alpha(&th, &v.target, alpha, &f).unwrap();
        assert!(a.vector.max_relative_difference(&b.vector) < 1e-8);
    }
}

#[test]
fn alpha_one_is_the_plain_adjoint() {
    let mu = mixed_measure(0.2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = random_f(mu.dim(), &mut rng);
    let th = char_fn(&mu, c(-0.2, 0.5), 512);
    let a = phi_star_alpha(&th, &mu, c(1.0, 0.0), &f).unwrap();
    let b = phi_star_snf(&th, &f).unwrap();
    assert!(a.vector.max_relative_difference(&b.vector) < 1e-12);
}

#[test]
fn universal_image_approaches_model_space_as_grid_refines() {
    // cell edges give T₊f logarithmic singularities, so the FFT projection
    // converges slowly; check the trend
    let mu = mixed_measure(0.3);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let f = random_f(mu.dim(), &mut rng);
    let res: Vec<f64> = [256, 4096]
        .iter()
        .map(|&n| {
            let th = char_fn(&mu, c(0.4, 0.0), n);
            let dv = th.defect_vectors().unwrap();
            phi_star_universal(&th, &dv, &f).unwrap().vector.membership_residual(&th)
        })
        .collect();
    assert!(res[1] < 0.5 * res[0] && res[1] < 5e-2, "{res:?}");
}

#[test]
fn rejects_wrong_length() {
    let mu = mixed_measure(0.3);
    let th = char_fn(&mu, c(0.0, 0.0), 256);
    assert!(phi_star_snf(&th, &[c(1.0, 0.0)]).is_err());
}
