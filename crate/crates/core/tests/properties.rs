//! Randomized invariants of the polynomial, form and metric layers.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use systole_core::ambient::{householder_to, rational_sigma_grid, sample_sigma, unit_point, Unitary};
use systole_core::fixtures::{fixture_by_name, random_real_11, random_real_function, random_real_poly};
use systole_core::forms::fubini_study_form;
use systole_core::hermitian::{factorial, HermitianMetric};
use systole_core::polyalg::{BihomPoly, MultiIndex, Wirtinger};
use systole_core::radon::radon_form;
use systole_core::scalar::{Gq, Scalar};
use systole_core::variation::{gauduchon_tangent_basis, kahler_tangent_basis, q_form};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p ∘ U` for `z = U w`.
fn compose(p: &BihomPoly<Gq>, u: &Unitary<Gq>) -> BihomPoly<Gq> {
    let n = p.n();
    let lin: Vec<BihomPoly<Gq>> = u
        .rows()
        .iter()
        .map(|row| {
            let mut l = BihomPoly::zero(n, (1, 0));
            for (k, x) in row.iter().enumerate() {
                l.add_term(MultiIndex::unit(k), MultiIndex::zero(), x.clone());
            }
            l
        })
        .collect();
    p.substitute_linear(&lin)
}

fn exact_unitaries(n: usize, seed: u64) -> Vec<Unitary<Gq>> {
    let a = rational_sigma_grid(n, 3, seed);
    let b = rational_sigma_grid(n, 3, seed + 1);
    a.iter()
        .zip(&b)
        .map(|(x, y)| householder_to(x).unwrap().compose(&householder_to(y).unwrap()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn householder_sends_e0_to_sigma(seed in 0u64..1_000_000) {
        for n in [2, 3] {
            for s in sample_sigma(n, 4, seed) {
                let u = householder_to(&s).unwrap();
                prop_assert!(u.unitarity_residual() <= 1e-12);
                let image = unit_point(u.column(0)).unwrap();
                prop_assert!(image.same_point(&s));
            }
        }
        for s in rational_sigma_grid(2, 2, seed) {
            prop_assert_eq!(householder_to(&s).unwrap().unitarity_residual(), 0.0);
        }
    }

    #[test]
    fn wirtinger_derivatives_commute(seed in 0u64..1_000_000, j in 0usize..3, k in 0usize..3) {
        let p = random_real_poly(2, 2, 5, &mut rng(seed));
        let a = p.wirtinger(j, Wirtinger::Holomorphic).wirtinger(k, Wirtinger::Antiholomorphic);
        let b = p.wirtinger(k, Wirtinger::Antiholomorphic).wirtinger(j, Wirtinger::Holomorphic);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn sphere_integral_is_unitarily_invariant(seed in 0u64..1_000_000) {
        let p = random_real_poly(2, 2, 4, &mut rng(seed));
        for u in exact_unitaries(2, seed) {
            prop_assert_eq!(compose(&p, &u).sphere_integral(), p.sphere_integral());
        }
    }

    #[test]
    fn exterior_calculus_identities(seed in 0u64..1_000_000) {
        let mut r = rng(seed);
        let f = random_real_function(2, 2, 3, &mut r);
        let df = f.exterior_d().unwrap();
        prop_assert!(df.exterior_d().unwrap().is_zero());
        prop_assert!(f.dc().unwrap().dc().unwrap().is_zero());
        let ddc = f.ddc().unwrap();
        prop_assert_eq!(&df.dc().unwrap().neg().reduce(), &ddc.reduce());
        let eta = random_real_11(2, 1, &mut r);
        prop_assert!(eta.exterior_d().unwrap().exterior_d().unwrap().is_zero());
        prop_assert!(eta.dc().unwrap().dc().unwrap().is_zero());
    }

    #[test]
    fn stokes(seed in 0u64..1_000_000) {
        let mut r = rng(seed);
        let n = 2;
        let u = random_real_function(n, 1, 3, &mut r);
        let v = random_real_function(n, 1, 3, &mut r);
        let beta = v.exterior_d().unwrap().mul_function(&u);
        let alpha = beta.wedge(&fubini_study_form(n));
        prop_assert!(alpha.exterior_d().unwrap().integrate_cpn().unwrap().is_zero());
        for s in rational_sigma_grid(n, 2, seed) {
            prop_assert!(beta.exterior_d().unwrap().integrate_equator(&s).unwrap().is_zero());
        }
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn integration_of_forms_is_unitarily_invariant(seed in 0u64..1_000_000) {
        let mut r = rng(seed);
        let xi = random_real_11(2, 1, &mut r).wedge(&fubini_study_form(2));
        let base = xi.integrate_cpn().unwrap();
        for s in rational_sigma_grid(2, 1, seed) {
            let u = householder_to(&s).unwrap();
            prop_assert_eq!(xi.linear_pullback(u.rows()).integrate_cpn().unwrap(), base.clone());
        }
    }
}

#[test]
fn radon_of_metric_power_is_area() {
    for name in ["conformal-3", "anisotropic-3"] {
        let omega = fixture_by_name(name).unwrap().omega;
        let g = HermitianMetric::new(omega.clone()).unwrap();
        let w2 = omega.pow(2);
        for s in rational_sigma_grid(3, 2, 7) {
            let r = radon_form(&w2, &s).unwrap();
            assert_eq!(r, g.area_equator(&s).unwrap().scale_i64(factorial(2)), "{name}");
        }
    }
}

#[test]
fn homothety_exponents() {
    for n in [2, 3] {
        for name in [format!("kahler-ddc-{n}"), format!("conformal-{n}")] {
            let w = fixture_by_name(&name).unwrap().omega;
            let g = HermitianMetric::new(w.clone()).unwrap();
            let c = Gq::frac(5, 0, 3);
            let gc = HermitianMetric::new(w.scale(&c)).unwrap();
            let pow = |k: usize| (0..k).fold(Gq::one(), |a, _| a.mul(&c));
            assert_eq!(gc.volume(), g.volume().mul(&pow(n)));
            for s in rational_sigma_grid(n, 2, 4) {
                assert_eq!(gc.area_equator(&s).unwrap(), g.area_equator(&s).unwrap().mul(&pow(n - 1)));
            }
        }
    }
}

#[test]
fn rho_is_the_minimum_of_m_sigma_on_gauduchon_metrics() {
    for name in ["fs-2", "kahler-ddc-2", "gauduchon-d-2", "kahler-ddc-3"] {
        let g = HermitianMetric::new(fixture_by_name(name).unwrap().omega).unwrap();
        let rho = g.rho().unwrap();
        for s in sample_sigma(g.n(), 20, 2) {
            assert!((g.m_sigma_f(&s).unwrap() - rho).abs() <= 1e-12 * rho);
        }
    }
}

#[test]
fn q_is_symmetric_and_vanishes_on_kahler_directions() {
    let w = fubini_study_form::<Gq>(2);
    let gb = gauduchon_tangent_basis(2, 1).unwrap();
    let kb = kahler_tangent_basis(2, 1).unwrap();
    let gf = gb.forms();
    for a in gf.iter().step_by(3) {
        for b in gf.iter().step_by(4) {
            assert_eq!(q_form(&w, a, b).unwrap(), q_form(&w, b, a).unwrap());
        }
        for k in kb.forms() {
            assert_eq!(q_form(&w, k, a).unwrap(), Gq::zero());
        }
    }
}
