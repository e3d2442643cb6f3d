use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use systole_core::ambient::{rational_sigma_grid, unit_point, ProjPoint};
use systole_core::fixtures::{centered_coordinate, metric_fixtures, random_real_11, random_real_function};
use systole_core::forms::{fubini_study_form, PolyForm};
use systole_core::hermitian::HermitianMetric;
use systole_core::quadrature::CpnQuadrature;
use systole_core::radon::{
    dual_radon, igf_check, radon_fn, radon_form, radon_injectivity, zero_avg_radon,
};
use systole_core::{Error, Gq, Scalar};

fn z0sq(n: usize) -> PolyForm<Gq> {
    centered_coordinate(n, 0, Gq::zero())
}

#[test]
fn radon_of_functions() {
    let n = 2;
    let c = PolyForm::constant(n, Gq::frac(7, 0, 3));
    for s in rational_sigma_grid(n, 3, 1) {
        assert_eq!(radon_fn(&c, &s).unwrap(), Gq::frac(7, 0, 3));
    }
    assert_eq!(radon_fn(&z0sq(n), &ProjPoint::basis(n, 0)).unwrap(), Gq::zero());
    assert_eq!(radon_fn(&z0sq(n), &ProjPoint::basis(n, 1)).unwrap(), Gq::frac(1, 0, 2));
    // the shortcut agrees with integrating f ω_FS^{n−1} over the equator
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w = fubini_study_form::<Gq>(n);
    for s in rational_sigma_grid(n, 3, 2) {
        let f = random_real_function(n, 2, 3, &mut rng);
        assert_eq!(radon_fn(&f, &s).unwrap(), radon_form(&w.mul_function(&f), &s).unwrap());
    }
}

#[test]
fn radon_of_forms() {
    let n = 2;
    let w = fubini_study_form::<Gq>(n);
    for s in rational_sigma_grid(n, 3, 4) {
        assert_eq!(radon_form(&w, &s).unwrap(), Gq::one());
        let alpha = z0sq(n).dc().unwrap();
        assert_eq!(radon_form(&alpha.d(), &s).unwrap(), Gq::zero());
    }
    for fx in metric_fixtures(2) {
        let g = HermitianMetric::from_form(fx.omega.clone(), 50, 1).unwrap();
        let s = &rational_sigma_grid(2, 1, 8)[0];
        assert_eq!(radon_form(&fx.omega, s).unwrap(), g.area_equator(s).unwrap());
    }
}

#[test]
fn zero_average_transform() {
    let n = 2;
    let w = fubini_study_form::<Gq>(n);
    assert_eq!(zero_avg_radon(&w, &ProjPoint::basis(n, 1)).unwrap(), Gq::zero());
    let xi = w.mul_function(&z0sq(n));
    assert_eq!(zero_avg_radon(&xi, &ProjPoint::basis(n, 0)).unwrap(), Gq::frac(-1, 0, 3));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let lambda = random_real_function(n, 2, 3, &mut rng);
        let ddc = lambda.ddc().unwrap();
        for s in rational_sigma_grid(n, 2, 6) {
            assert_eq!(zero_avg_radon(&ddc, &s).unwrap(), Gq::zero());
        }
    }
}

#[test]
fn dual_transform() {
    let n = 2;
    assert_eq!(dual_radon(&PolyForm::constant(n, Gq::one()), &ProjPoint::basis(n, 2)).unwrap(), Gq::one());
    assert_eq!(dual_radon(&z0sq(n), &ProjPoint::basis(n, 0)).unwrap(), Gq::zero());
    // ∫ R(φ) ψ = ∫ φ R*(ψ)
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let quad = CpnQuadrature::new(n, 2);
    for _ in 0..3 {
        let phi = random_real_function(n, 1, 3, &mut rng).to_float();
        let psi = random_real_function(n, 1, 3, &mut rng).to_float();
        let lhs = quad.integrate(|z| {
            let s = unit_point(z.to_vec()).unwrap();
            radon_fn(&phi, &s).unwrap().re * psi.eval_function(z).re
        });
        let rhs = quad.integrate(|z| {
            let s = unit_point(z.to_vec()).unwrap();
            phi.eval_function(z).re * dual_radon(&psi, &s).unwrap().re
        });
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
    }
}

#[test]
fn integral_geometric_formula() {
    let n = 2;
    let w = fubini_study_form::<Gq>(n);
    let rep = igf_check(&w).unwrap();
    assert!(rep.exact && rep.residual == 0.0);
    let rep = igf_check(&w.mul_function(&z0sq(n))).unwrap();
    assert!(rep.exact);
    assert!((rep.cpn_integral - 1.0 / 3.0).abs() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..3 {
        let xi = random_real_11(n, 1, &mut rng);
        let rep = igf_check(&xi).unwrap();
        assert!(rep.exact, "{rep:?}");
        let rep = igf_check(&xi.to_float()).unwrap();
        assert!(rep.residual < 1e-10, "{rep:?}");
    }
}

#[test]
fn injectivity_evidence() {
    let g = radon_injectivity(2, 1).unwrap();
    assert_eq!(g.labels.len(), 8);
    assert!(g.min_singular_value > 1e-6);
    assert!(g.to_csv().starts_with("index,label,singular_value\n"));
    assert!(matches!(radon_injectivity(1, 1), Err(Error::DimensionTooSmall(1))));
}
