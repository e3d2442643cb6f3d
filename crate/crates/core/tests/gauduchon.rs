use systole_core::fixtures::{conformal, fixture_by_name};
use systole_core::forms::PolyForm;
use systole_core::gauduchon_solve::*;
use systole_core::hermitian::HermitianMetric;
use systole_core::radon::real_function_basis;
use systole_core::scalar::{Gq, Scalar};

fn metric(name: &str) -> HermitianMetric<Gq> {
    HermitianMetric::new(fixture_by_name(name).unwrap().omega).unwrap()
}

#[test]
fn projection_is_identity_on_gauduchon_inputs() {
    for name in ["fs-2", "fs-scaled-2", "kahler-ddc-2", "gauduchon-d-2", "fs-3", "kahler-ddc-3"] {
        let g = metric(name);
        let p = gauduchon_projection(&g, 2).unwrap();
        let one = PolyForm::constant(g.n(), Gq::one());
        assert_eq!(p.phi.sub(&one).reduce(), PolyForm::zero(g.n(), 0), "{name}");
        assert_eq!(p.report.deviation_from_one, 0.0, "{name}");
        assert_eq!(p.g_hat.omega(), g.omega(), "{name}");
    }
}

#[test]
fn projection_of_conformal_fixture() {
    let g = HermitianMetric::new(conformal(2, Gq::frac(1, 0, 10))).unwrap();
    let mut last = f64::INFINITY;
    for d in 1..=3 {
        let p = gauduchon_projection(&g, d).unwrap();
        let r = &p.report;
        eprintln!("d={d} k={} res={} strong={:e} dev={:e} min={}", r.basis_size, r.residual, r.strong_residual, r.deviation_from_one, r.min_value);
        assert!(r.residual <= 1e-8);
        assert!(r.min_value > 0.0);
        assert!(r.strong_residual < last);
        last = r.strong_residual;
    }
    let json = gauduchon_projection(&g, 1).unwrap().report.to_json_string();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["problem"], "gauduchon-projection");
}

#[test]
fn projection_deviation_is_linear_in_eps() {
    let dev = |num: i64| {
        let g = HermitianMetric::new(conformal(2, Gq::frac(num, 0, 100))).unwrap();
        gauduchon_projection(&g, 3).unwrap().report.deviation_from_one
    };
    let (a, b, c) = (dev(5), dev(10), dev(20));
    eprintln!("{a:e} {b:e} {c:e}");
    assert!(((b / a) / 2.0 - 1.0).abs() < 0.2);
    assert!(((c / b) / 2.0 - 1.0).abs() < 0.2);
}

#[test]
fn igf_measure_at_fs_is_one() {
    let g = HermitianMetric::<Gq>::fubini_study(2);
    let (psi, r) = igf_measure_solve(&g, 1).unwrap();
    eprintln!("{r:?}");
    assert!(r.residual < 1e-10);
    assert!(r.deviation_from_one < 1e-8);
    assert!((psi.eval_function(&[1.0.into(), 0.5.into(), 0.0.into()]).re - 1.0).abs() < 1e-8);
}

#[test]
fn igf_measure_off_fs() {
    let g = HermitianMetric::new(conformal(2, Gq::frac(1, 0, 10))).unwrap();
    let (psi, r) = igf_measure_solve(&g, 2).unwrap();
    eprintln!("res={} dev={} min={}", r.residual, r.deviation_from_one, r.min_value);
    assert!(r.residual < 1e-10);
    assert!(r.min_value > 0.0);
    for (_, f) in real_function_basis(2, 2).iter().take(10) {
        assert!(igf_identity_residual(&g, &psi, f).unwrap() < 1e-10);
    }
}

#[test]
fn projection_margins_on_conformal_family() {
    for num in [5, 10, 20] {
        let g = HermitianMetric::new(conformal(2, Gq::frac(num, 0, 100))).unwrap();
        let r = theorem_e_check(&g, 3, 200, 11).unwrap();
        eprintln!("{num}: a={:e} b={:e} spread={:e}", r.margin_a, r.margin_b, r.projection_area_spread);
        assert!(r.inequality_a_holds && r.inequality_b_holds);
    }
    let r = theorem_e_check(&HermitianMetric::<Gq>::fubini_study(2), 1, 50, 1).unwrap();
    assert!(r.margin_a.abs() < 1e-12 && r.margin_b.abs() < 1e-12);
}
