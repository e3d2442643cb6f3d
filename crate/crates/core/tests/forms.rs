use num_complex::Complex64;
use systole_core::ambient::{rational_sigma_grid, unit_point, ProjPoint};
use systole_core::forms::{fubini_study_form, make_mask, PolyForm};
use systole_core::polyalg::{BihomPoly, MultiIndex};
use systole_core::{Error, Gq, Scalar};

type F = PolyForm<Gq>;

fn mi(v: &[u8]) -> MultiIndex {
    MultiIndex::from_slice(v)
}

/// `|z_j|² / |z|²`
fn coord_fn(n: usize, j: usize) -> F {
    PolyForm::function(BihomPoly::monomial(n, MultiIndex::unit(j), MultiIndex::unit(j), Gq::one())).unwrap()
}

#[test]
fn fubini_study_is_normalized_and_closed() {
    for n in 1..=3 {
        let w = fubini_study_form::<Gq>(n);
        assert_eq!(w.pow(n).integrate_cpn().unwrap(), Gq::one(), "n={n}");
        assert!(w.d().is_zero());
        assert!(w.is_horizontal());
        assert!(w.is_real());
        assert!(w.is_scale_invariant());
    }
}

#[test]
fn volume_form_is_positive_at_e0() {
    let w = fubini_study_form::<Gq>(2).pow(2);
    let e0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
    let top = make_mask(2, &[1, 2], &[1, 2]);
    assert!(w.eval_component(top, &e0).norm() > 0.0);
}

#[test]
fn function_integrals() {
    let w = fubini_study_form::<Gq>(2);
    let f = coord_fn(2, 0);
    let xi = w.pow(2).mul_function(&f);
    assert_eq!(xi.integrate_cpn().unwrap(), Gq::frac(1, 0, 3));
    let phi = xi.top_ratio().unwrap();
    assert!(phi.approx_eq(&f, 0.0));
}

#[test]
fn differential_of_coordinate_function() {
    let n = 2;
    let df = coord_fn(n, 0).d();
    // (δ_{j0} z̄_0 |z|² − |z_0|² z̄_j)/|z|⁴ dz_j + conjugate
    let r2 = BihomPoly::<Gq>::norm_sq(n);
    let z0sq = BihomPoly::monomial(n, MultiIndex::unit(0), MultiIndex::unit(0), Gq::one());
    let mut comps = Vec::new();
    for j in 0..=n {
        let mut p = (&z0sq * &BihomPoly::zbar(n, j)).neg();
        if j == 0 {
            p = &p + &(&BihomPoly::zbar(n, 0) * &r2);
        }
        comps.push((make_mask(n, &[j], &[]), p));
    }
    let holo = PolyForm::from_components(n, 1, 2, comps).unwrap();
    let want = holo.add(&holo.conj());
    assert!(df.approx_eq(&want, 0.0));
    assert!(df.d().is_zero());
}

#[test]
fn ddc_identities_on_functions() {
    let n = 2;
    let p = BihomPoly::monomial(n, mi(&[1, 1, 0]), mi(&[0, 1, 1]), Gq::frac(2, 1, 1));
    let u = PolyForm::function(&p + &p.conj()).unwrap();
    let ddc = u.ddc().unwrap();
    assert!(ddc.is_real());
    let dcd = u.d().dc().unwrap();
    assert!(dcd.add(&ddc).is_zero());
    assert!(u.dc().unwrap().dc().unwrap().is_zero());
    let w = fubini_study_form::<Gq>(n);
    assert_eq!(ddc.wedge(&w).integrate_cpn().unwrap(), Gq::zero());
    // positivity convention: dd^c log|z|² = 2 ω_FS, so dd^c of a convex weight is positive
    let phi = coord_fn(n, 0).ddc().unwrap().wedge(&w).top_ratio().unwrap();
    assert!(phi.eval_function(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]).re < 0.0);
}

#[test]
fn stokes_on_cpn() {
    let n = 2;
    let w = fubini_study_form::<Gq>(n);
    let f = coord_fn(n, 1);
    let alpha = f.dc().unwrap().wedge(&w);
    assert_eq!(alpha.degree(), 3);
    assert_eq!(alpha.d().integrate_cpn().unwrap(), Gq::zero());
}

#[test]
fn fubini_study_restricts_to_fubini_study() {
    let w2 = fubini_study_form::<Gq>(2);
    let w1 = fubini_study_form::<Gq>(1);
    for j in 0..3 {
        assert!(w2.equator_pullback(&ProjPoint::basis(2, j)).unwrap().approx_eq(&w1, 0.0));
    }
    for s in rational_sigma_grid(2, 3, 11) {
        assert!(w2.equator_pullback(&s).unwrap().approx_eq(&w1, 0.0));
    }
    let s = unit_point(vec![Gq::frac(3, 0, 5), Gq::frac(0, 4, 5), Gq::zero()]).unwrap();
    assert_eq!(w2.integrate_equator(&s).unwrap(), Gq::one());
}

#[test]
fn equator_integrals_of_coordinate_function() {
    let n = 2;
    let w = fubini_study_form::<Gq>(n);
    let xi = w.mul_function(&coord_fn(n, 0));
    assert_eq!(xi.integrate_equator(&ProjPoint::basis(2, 0)).unwrap(), Gq::zero());
    assert_eq!(xi.integrate_equator(&ProjPoint::basis(2, 1)).unwrap(), Gq::frac(1, 0, 2));
    let w1 = fubini_study_form::<Gq>(1);
    assert!(matches!(w1.equator_pullback(&ProjPoint::basis(1, 0)), Err(Error::DimensionTooSmall(1))));
}

#[test]
fn pullback_commutes_with_d() {
    let n = 3;
    let f = coord_fn(n, 2).add(&coord_fn(n, 0).scale(&Gq::int(3)));
    let xi = f.dc().unwrap().wedge(&fubini_study_form(n));
    for j in 0..=n {
        let s = ProjPoint::basis(n, j);
        let a = xi.d().equator_pullback(&s).unwrap();
        let b = xi.equator_pullback(&s).unwrap().d();
        assert!(a.approx_eq(&b, 0.0), "j={j}");
    }
}

#[test]
fn wedge_graded_commutativity() {
    let n = 2;
    let f = coord_fn(n, 1);
    let a = f.d();
    let b = coord_fn(n, 2).dc().unwrap();
    assert!(a.wedge(&b).add(&b.wedge(&a)).is_zero());
    let w = fubini_study_form::<Gq>(n);
    assert!(w.wedge(&a).approx_eq(&a.wedge(&w), 0.0));
    assert!(matches!(w.pow(2).try_wedge(&w), Err(Error::DegreeOverflow(6))));
}

#[test]
fn json_roundtrip() {
    let w = fubini_study_form::<Gq>(2).add(&coord_fn(2, 0).ddc().unwrap());
    let s = w.to_json_string();
    let back = F::from_json_str(&s).unwrap();
    assert_eq!(back, w);
    let wf = w.to_float();
    let back = PolyForm::<Complex64>::from_json_str(&wf.to_json_string()).unwrap();
    assert_eq!(back, wf);
}

#[test]
fn non_proportional_top_form_is_rejected() {
    let n = 2;
    let top = make_mask(n, &[1, 2], &[1, 2]);
    let bad = PolyForm::from_components(n, 4, 2, vec![(top, BihomPoly::constant(n, Gq::one()))]).unwrap();
    assert_eq!(bad.top_ratio(), Err(Error::NotProportional));
}
