//! Named metric fixtures and random generators of horizontal forms.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{fubini_study_form, make_mask, PolyForm, PolyFormJson};
use crate::polyalg::{BihomPoly, MultiIndex};
use crate::scalar::{Gq, Scalar};

/// `Π_jk = |z|²δ_jk − z̄_j z_k`, the numerator matrix of the Fubini–Study form.
pub fn fs_projector<S: Scalar>(n: usize) -> Vec<Vec<BihomPoly<S>>> {
    (0..=n)
        .map(|j| {
            (0..=n)
                .map(|k| {
                    let mut p = BihomPoly::zero(n, (1, 1));
                    if j == k {
                        for l in 0..=n {
                            if l != j {
                                p.add_term(MultiIndex::unit(l), MultiIndex::unit(l), S::one());
                            }
                        }
                    } else {
                        p.add_term(MultiIndex::unit(k), MultiIndex::unit(j), S::one().neg());
                    }
                    p
                })
                .collect()
        })
        .collect()
}

/// The horizontal (1,1)-form `i Σ (Π M Π)_jk / |z|^{2(d+3)} dz_j ∧ dz̄_k` for a
/// matrix `M` of bidegree-`(d,d)` polynomials. Real when `M` is Hermitian.
pub fn horizontal_11_from_matrix<S: Scalar>(n: usize, m: &[Vec<BihomPoly<S>>]) -> Result<PolyForm<S>> {
    let d = m
        .iter()
        .flatten()
        .find(|p| !p.is_zero())
        .map(|p| p.bidegree().0)
        .unwrap_or(0);
    let pi = fs_projector::<S>(n);
    let zero = BihomPoly::<S>::zero(n, (d + 1, d + 1));
    // A = Π M
    let mut a = vec![vec![zero.clone(); n + 1]; n + 1];
    for j in 0..=n {
        for k in 0..=n {
            let mut acc = zero.clone();
            for l in 0..=n {
                if !m[l][k].is_zero() {
                    acc = acc.try_add(&(&pi[j][l] * &m[l][k]))?;
                }
            }
            a[j][k] = acc;
        }
    }
    let mut comps = Vec::new();
    for j in 0..=n {
        for k in 0..=n {
            let mut acc = BihomPoly::zero(n, (d + 2, d + 2));
            for l in 0..=n {
                if !a[j][l].is_zero() {
                    acc = acc.try_add(&(&a[j][l] * &pi[l][k]))?;
                }
            }
            comps.push((make_mask(n, &[j], &[k]), acc.scale(&S::i())));
        }
    }
    Ok(PolyForm::from_components(n, 2, d + 3, comps)?.reduce())
}

/// `f = P/|z|^{2d}` as a function.
pub fn function<S: Scalar>(p: BihomPoly<S>) -> PolyForm<S> {
    PolyForm::function(p).expect("bidegree (d,d)")
}

/// `|z_j|²/|z|² − c`.
pub fn centered_coordinate(n: usize, j: usize, c: Gq) -> PolyForm<Gq> {
    let p = BihomPoly::monomial(n, MultiIndex::unit(j), MultiIndex::unit(j), Gq::one());
    function(p).sub(&PolyForm::constant(n, c))
}

/// `2i(∂̄b − ∂b̄)` for `b = f ∂g`: a real (1,1)-form with `dd^c η = 0`, closed only in degenerate cases.
pub fn d_direction<S: Scalar>(f: &PolyForm<S>, g: &PolyForm<S>) -> Result<PolyForm<S>> {
    let dg = g.exterior_d()?.bidegree_part(1, 0);
    let b = dg.mul_function(f);
    let x = b.exterior_d()?.bidegree_part(1, 1);
    let two_i = S::i().scale_i64(2);
    Ok(x.sub(&x.conj()).scale(&two_i))
}

/// The standard non-closed Gauduchon direction at `ω_FS` used by the fixtures.
pub fn standard_d_direction(n: usize) -> PolyForm<Gq> {
    let f = function(BihomPoly::monomial(n, MultiIndex::unit(1), MultiIndex::unit(2), Gq::one()));
    let g = function(BihomPoly::monomial(n, MultiIndex::unit(0), MultiIndex::unit(0), Gq::one()));
    d_direction(&f, &g).expect("well-formed")
}

/// A fixed non-Gauduchon direction: `ΠMΠ` with `M_11 = |z_0|²`.
pub fn anisotropic_direction(n: usize) -> PolyForm<Gq> {
    let zero = BihomPoly::<Gq>::zero(n, (1, 1));
    let mut m = vec![vec![zero; n + 1]; n + 1];
    m[1][1] = BihomPoly::monomial(n, MultiIndex::unit(0), MultiIndex::unit(0), Gq::one());
    horizontal_11_from_matrix(n, &m).expect("well-formed")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixtureKind {
    Kahler,
    GauduchonOnly,
    NonGauduchon,
}

#[derive(Clone, Debug)]
pub struct MetricFixture {
    pub name: String,
    pub kind: FixtureKind,
    pub provenance: String,
    pub omega: PolyForm<Gq>,
}

pub const FIXTURE_VERSION: u32 = 1;

/// On-disk fixture document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricFixtureJson {
    pub version: u32,
    pub name: String,
    pub n: usize,
    pub kind: FixtureKind,
    pub mode: String,
    pub provenance: String,
    pub omega: PolyFormJson,
}

impl MetricFixture {
    pub fn n(&self) -> usize {
        self.omega.n()
    }

    pub fn to_json(&self) -> MetricFixtureJson {
        MetricFixtureJson {
            version: FIXTURE_VERSION,
            name: self.name.clone(),
            n: self.n(),
            kind: self.kind,
            mode: "exact".into(),
            provenance: self.provenance.clone(),
            omega: self.omega.to_json(),
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: MetricFixtureJson = serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
        if j.version != FIXTURE_VERSION {
            return Err(Error::Serialization(format!("unsupported fixture version {}", j.version)));
        }
        let omega = PolyForm::from_json(&j.omega)?;
        if omega.n() != j.n {
            return Err(Error::Serialization("dimension field disagrees with form".into()));
        }
        Ok(MetricFixture { name: j.name, kind: j.kind, provenance: j.provenance, omega })
    }
}

fn fixture(name: &str, kind: FixtureKind, provenance: &str, omega: PolyForm<Gq>) -> MetricFixture {
    MetricFixture { name: name.into(), kind, provenance: provenance.into(), omega }
}

/// Conformal fixture `(1 + ε(|z_0|²/|z|² − 1/(n+1))) ω_FS`.
pub fn conformal(n: usize, eps: Gq) -> PolyForm<Gq> {
    let f = centered_coordinate(n, 0, Gq::frac(1, 0, n as i64 + 1));
    let factor = PolyForm::constant(n, Gq::one()).add(&f.scale(&eps));
    fubini_study_form::<Gq>(n).mul_function(&factor)
}

/// All shipped fixtures for dimension `n` (2 or 3).
pub fn metric_fixtures(n: usize) -> Vec<MetricFixture> {
    use FixtureKind::*;
    let w = fubini_study_form::<Gq>(n);
    let tenth = Gq::frac(1, 0, 10);
    let u = centered_coordinate(n, 0, Gq::zero());
    let mut out = vec![
        fixture(&format!("fs-{n}"), Kahler, "Fubini-Study form", w.clone()),
        fixture(&format!("fs-scaled-{n}"), Kahler, "homothety 2 of Fubini-Study", w.scale(&Gq::int(2))),
        fixture(
            &format!("kahler-ddc-{n}"),
            Kahler,
            "Fubini-Study plus (1/10) ddc(|z0|^2/|z|^2)",
            w.add(&u.ddc().expect("smooth").scale(&tenth)),
        ),
    ];
    if n == 2 {
        out.push(fixture(
            "gauduchon-d-2",
            GauduchonOnly,
            "Fubini-Study plus (1/10) 2i(dbar b - d bbar), b = (z1 zbar2/|z|^2) d(|z0|^2/|z|^2)",
            w.add(&standard_d_direction(n).scale(&tenth)),
        ));
    }
    out.push(fixture(
        &format!("conformal-{n}"),
        NonGauduchon,
        "(1 + (1/10)(|z0|^2/|z|^2 - 1/(n+1))) times Fubini-Study",
        conformal(n, tenth.clone()),
    ));
    out.push(fixture(
        &format!("anisotropic-{n}"),
        NonGauduchon,
        "Fubini-Study plus (1/10) i Pi M Pi / |z|^8 with M_11 = |z0|^2",
        w.add(&anisotropic_direction(n).scale(&tenth)),
    ));
    out
}

pub fn fixture_by_name(name: &str) -> Option<MetricFixture> {
    [2, 3].into_iter().flat_map(metric_fixtures).find(|f| f.name == name)
}

/// Random real function of bidegree `(d, d)` with small Gaussian-integer coefficients.
pub fn random_real_function<R: Rng>(n: usize, d: u32, terms: usize, rng: &mut R) -> PolyForm<Gq> {
    function(random_real_poly(n, d, terms, rng))
}

pub fn random_real_poly<R: Rng>(n: usize, d: u32, terms: usize, rng: &mut R) -> BihomPoly<Gq> {
    let monos = MultiIndex::all_of_degree(n + 1, d);
    let mut p = BihomPoly::zero(n, (d, d));
    for _ in 0..terms {
        let a = monos[rng.random_range(0..monos.len())];
        let b = monos[rng.random_range(0..monos.len())];
        let c = Gq::frac(rng.random_range(-3..=3), rng.random_range(-3..=3), 1);
        p.add_term(a, b, c);
    }
    &p + &p.conj()
}

/// Random real horizontal (1,1)-form with coefficient matrix of bidegree `(d, d)`.
pub fn random_real_11<R: Rng>(n: usize, d: u32, rng: &mut R) -> PolyForm<Gq> {
    let monos = MultiIndex::all_of_degree(n + 1, d);
    let zero = BihomPoly::<Gq>::zero(n, (d, d));
    let mut m = vec![vec![zero.clone(); n + 1]; n + 1];
    for j in 0..=n {
        for k in j..=n {
            let mut p = zero.clone();
            for _ in 0..2 {
                let a = monos[rng.random_range(0..monos.len())];
                let b = monos[rng.random_range(0..monos.len())];
                p.add_term(a, b, Gq::frac(rng.random_range(-2..=2), rng.random_range(-2..=2), 1));
            }
            if j == k {
                m[j][j] = &p + &p.conj();
            } else {
                m[k][j] = p.conj();
                m[j][k] = p;
            }
        }
    }
    horizontal_11_from_matrix(n, &m).expect("well-formed")
}

/// Random real horizontal form of degree `2n − 2`.
pub fn random_real_top_minus_one<R: Rng>(n: usize, d: u32, rng: &mut R) -> PolyForm<Gq> {
    let a = random_real_11(n, d, rng);
    if n == 2 {
        return a;
    }
    let w = fubini_study_form::<Gq>(n);
    let mut acc = a.wedge(&w.pow(n - 2));
    if n >= 3 {
        let b = random_real_11(n, d.saturating_sub(1), rng);
        acc = acc.add(&a.wedge(&b).wedge(&w.pow(n - 3)));
    }
    acc
}
