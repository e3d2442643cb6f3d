use systole_core::ambient::{rational_sigma_grid, sample_sigma, ProjPoint};
use systole_core::fixtures::{metric_fixtures, FixtureKind};
use systole_core::forms::fubini_study_form;
use systole_core::hermitian::{HermitianMetric, MetricClass};
use systole_core::{Error, Gq, Scalar};

#[test]
fn fubini_study_metric_values() {
    let g = HermitianMetric::<Gq>::fubini_study(2);
    assert!(g.certificate().min_eigenvalue > 0.0);
    assert_eq!(g.volume(), Gq::frac(1, 0, 2));
    assert_eq!(g.classify(), MetricClass::Kahler);
    assert_eq!(g.area_equator(&ProjPoint::basis(2, 0)).unwrap(), Gq::one());
    assert!((g.m_sigma(&ProjPoint::basis(2, 1)).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    assert!((g.mean_functional().unwrap() - 2f64.sqrt()).abs() < 1e-15);
    assert!((g.rho().unwrap() - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(g.holomorphic_systole().unwrap().value, Gq::one());

    let g3 = HermitianMetric::<Gq>::fubini_study(3);
    assert_eq!(g3.volume(), Gq::frac(1, 0, 6));
    assert!((g3.rho().unwrap() - 6f64.powf(2.0 / 3.0) / 2.0).abs() < 1e-12);
}

#[test]
fn positivity_and_scaling() {
    let w = fubini_study_form::<Gq>(2);
    let g3 = HermitianMetric::from_form(w.scale(&Gq::int(3)), 100, 1).unwrap();
    assert_eq!(g3.volume(), Gq::frac(9, 0, 2));
    let g = HermitianMetric::<Gq>::fubini_study(2);
    let s = ProjPoint::basis(2, 2);
    assert!((g3.m_sigma(&s).unwrap() - g.m_sigma(&s).unwrap()).abs() < 1e-14);
    assert_eq!(g3.holomorphic_systole().unwrap().value, Gq::int(3));
    let neg = w.sub(&w.scale(&Gq::frac(3, 0, 2)));
    assert!(matches!(HermitianMetric::from_form(neg, 10, 1), Err(Error::NotPositive { .. })));
}

#[test]
fn fixture_classes() {
    for n in [2, 3] {
        for fx in metric_fixtures(n) {
            let g = HermitianMetric::from_form(fx.omega.clone(), 300, 2).unwrap();
            let class = g.classify();
            match fx.kind {
                FixtureKind::Kahler => assert_eq!(class, MetricClass::Kahler, "{}", fx.name),
                FixtureKind::GauduchonOnly => assert_eq!(class, MetricClass::GauduchonOnly, "{}", fx.name),
                FixtureKind::NonGauduchon => assert_eq!(class, MetricClass::None, "{}", fx.name),
            }
        }
    }
}

#[test]
fn gauduchon_areas_are_constant() {
    for fx in metric_fixtures(2) {
        let g = HermitianMetric::from_form(fx.omega.clone(), 300, 2).unwrap();
        let areas: Vec<Gq> = (0..3).map(|j| g.area_equator(&ProjPoint::basis(2, j)).unwrap()).collect();
        let grid: Vec<Gq> = rational_sigma_grid(2, 2, 9).iter().map(|s| g.area_equator(s).unwrap()).collect();
        let all_equal = areas.iter().chain(&grid).all(|a| *a == areas[0]);
        assert_eq!(all_equal, fx.kind != FixtureKind::NonGauduchon, "{}", fx.name);
        if fx.kind != FixtureKind::NonGauduchon {
            let rep = g.holomorphic_systole().unwrap();
            assert_eq!(rep.value, rep.cohomology_coefficient);
            assert!((g.mean_functional().unwrap() - g.rho().unwrap()).abs() < 1e-12);
        } else {
            assert_eq!(g.holomorphic_systole(), Err(Error::NotGauduchon));
        }
    }
}

#[test]
fn mean_is_sigma_average_of_m_sigma() {
    let fx = metric_fixtures(2).into_iter().find(|f| f.name == "conformal-2").unwrap();
    let g = HermitianMetric::from_form(fx.omega, 100, 2).unwrap();
    let pts = sample_sigma(2, 500, 4);
    let vals: Vec<f64> = pts.iter().map(|s| g.m_sigma_f(s).unwrap()).collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64;
    let se = (var / vals.len() as f64).sqrt();
    let m = g.mean_functional().unwrap();
    assert!((mean - m).abs() < 4.0 * se + 1e-12, "mean {mean} vs {m} (se {se})");
    let _ = g.volume().re_f64();
}
