//! First and second variations of `M_σ` and `M`, the quadratic form `Q_ω`,
//! truncated tangent spaces at `ω_FS`, Hessian spectra and finite-difference oracles.
//!
//! Truncated spaces are assembled per torus weight: every operator involved
//! (`d`, `dd^c`, wedge with `ω_FS`) commutes with the diagonal torus action,
//! so exact elimination runs on small blocks.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::ambient::ProjPoint;
use crate::error::{Error, Result};
use crate::fixtures::{function, horizontal_11_from_matrix};
use crate::forms::{fubini_study_form, mask_bidegree, CoordKey, PolyForm};
use crate::hermitian::{factorial, l2_inner_11, HermitianMetric};
use crate::linalg;
use crate::polyalg::{BihomPoly, MultiIndex};
use crate::scalar::{Gq, Scalar};

type Weight = Vec<i16>;

/// A tangent vector `η = h(J·,·)` at `ω_FS` with its exact type tags.
#[derive(Clone, Debug)]
pub struct Direction {
    pub eta: PolyForm<Gq>,
    /// `dd^c(η ∧ ω_FS^{n−2}) = 0`
    pub is_gauduchon_dir: bool,
    /// `dη = 0`, equivalently `η = aω_FS + dd^c u` on CP^n
    pub is_kahler_dir: bool,
}

impl Direction {
    pub fn new(eta: PolyForm<Gq>) -> Result<Self> {
        check_real_11(&eta)?;
        let is_gauduchon_dir = gauduchon_constraint(&eta)?.is_zero();
        let is_kahler_dir = eta.d().is_zero();
        Ok(Direction { eta, is_gauduchon_dir, is_kahler_dir })
    }
}

fn check_real_11<S: Scalar>(eta: &PolyForm<S>) -> Result<()> {
    let n = eta.n();
    if eta.degree() != 2 || eta.components().keys().any(|m| mask_bidegree(n, *m) != (1, 1)) {
        return Err(Error::MalformedForm("expected a (1,1)-form".into()));
    }
    if !eta.is_real() {
        return Err(Error::MalformedForm("expected a real form".into()));
    }
    Ok(())
}

/// `dd^c(η ∧ ω_FS^{n−2})`
fn gauduchon_constraint<S: Scalar>(eta: &PolyForm<S>) -> Result<PolyForm<S>> {
    let n = eta.n();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    eta.wedge(&fubini_study_form(n).pow(n - 2)).ddc()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BasisKind {
    Gauduchon,
    Kahler,
}

#[derive(Clone, Debug)]
pub struct TangentBasis {
    pub n: usize,
    pub degree: u32,
    pub kind: BasisKind,
    pub directions: Vec<Direction>,
    /// Torus-weight class `{w, −w}` of each direction; pairings across classes vanish.
    pub classes: Vec<usize>,
    pub gram: Vec<Vec<f64>>,
}

impl TangentBasis {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn forms(&self) -> Vec<&PolyForm<Gq>> {
        self.directions.iter().map(|d| &d.eta).collect()
    }
}

/// Coordinate vectors of forms of equal degree over their common monomial support.
fn coordinate_vectors(forms: &[PolyForm<Gq>]) -> Vec<Vec<Gq>> {
    let m = forms.iter().map(|f| f.denom_power()).max().unwrap_or(0);
    let coords: Vec<BTreeMap<CoordKey, Gq>> = forms.iter().map(|f| f.coords_at(m)).collect();
    let keys: BTreeSet<CoordKey> = coords.iter().flat_map(|c| c.keys().copied()).collect();
    let index: HashMap<CoordKey, usize> = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    coords
        .iter()
        .map(|c| {
            let mut v = vec![Gq::zero(); keys.len()];
            for (k, x) in c {
                v[index[k]] = x.clone();
            }
            v
        })
        .collect()
}

/// Independent subset of `forms`, greedy in order.
fn independent_forms(forms: Vec<PolyForm<Gq>>) -> Vec<PolyForm<Gq>> {
    if forms.is_empty() {
        return forms;
    }
    let keep = linalg::independent_subset(&coordinate_vectors(&forms));
    keep.into_iter().map(|i| forms[i].clone()).collect()
}

/// Combinations `Σ x_i b_i` for each `x` in the kernel of `b ↦ op(b)` on `span(basis)`.
fn kernel_in_span<F>(basis: &[PolyForm<Gq>], op: F) -> Result<Vec<PolyForm<Gq>>>
where
    F: Fn(&PolyForm<Gq>) -> Result<PolyForm<Gq>>,
{
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let images: Vec<PolyForm<Gq>> = basis.iter().map(&op).collect::<Result<_>>()?;
    if images.iter().all(|f| f.is_zero()) {
        return Ok(basis.to_vec());
    }
    let nonzero: Vec<PolyForm<Gq>> = images.iter().filter(|f| !f.is_zero()).cloned().collect();
    let degree = nonzero[0].degree();
    let n = basis[0].n();
    let padded: Vec<PolyForm<Gq>> =
        images.into_iter().map(|f| if f.is_zero() { PolyForm::zero(n, degree) } else { f }).collect();
    let cols = coordinate_vectors(&padded);
    let nrows = cols[0].len();
    let rows: Vec<Vec<Gq>> = (0..nrows).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    let null = linalg::nullspace(&rows, basis.len());
    Ok(null.iter().map(|x| combine(basis, x)).collect())
}

fn combine(basis: &[PolyForm<Gq>], x: &[Gq]) -> PolyForm<Gq> {
    let terms: Vec<(Gq, &PolyForm<Gq>)> =
        x.iter().zip(basis).filter(|(c, _)| !c.is_zero()).map(|(c, b)| (c.clone(), b)).collect();
    PolyForm::combination(basis[0].n(), basis[0].degree(), &terms).reduce()
}

/// `span(a) ∩ span(b)`, returned as combinations of `a`.
fn intersect_spans(a: &[PolyForm<Gq>], b: &[PolyForm<Gq>]) -> Vec<PolyForm<Gq>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let all: Vec<PolyForm<Gq>> = a.iter().chain(b).cloned().collect();
    let cols = coordinate_vectors(&all);
    let nrows = cols[0].len();
    let rows: Vec<Vec<Gq>> = (0..nrows).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    let null = linalg::nullspace(&rows, all.len());
    let hits: Vec<PolyForm<Gq>> = null.iter().map(|x| combine(a, &x[..a.len()])).filter(|f| !f.is_zero()).collect();
    independent_forms(hits)
}

/// `true` if `f` lies in the span of `basis` (exact).
pub fn span_contains(basis: &[&PolyForm<Gq>], f: &PolyForm<Gq>) -> bool {
    let mut all: Vec<PolyForm<Gq>> = basis.iter().map(|b| (*b).clone()).collect();
    let r0 = linalg::independent_subset(&coordinate_vectors(&all)).len();
    all.push(f.clone());
    linalg::independent_subset(&coordinate_vectors(&all)).len() == r0
}

fn single_weight(f: &PolyForm<Gq>) -> Weight {
    let w = f.weight_components();
    debug_assert_eq!(w.len(), 1, "generator of mixed weight");
    w.into_keys().next().expect("nonzero generator")
}

fn neg_weight(w: &Weight) -> Weight {
    w.iter().map(|x| -x).collect()
}

/// Complex generators `i Π E_jk Π z^α z̄^β / |z|^{2(d+3)}` of the truncated space, by weight.
fn horizontal_generators(n: usize, d: u32) -> BTreeMap<Weight, Vec<PolyForm<Gq>>> {
    let monos = MultiIndex::all_of_degree(n + 1, d);
    let zero = BihomPoly::<Gq>::zero(n, (d, d));
    let mut out: BTreeMap<Weight, Vec<PolyForm<Gq>>> = BTreeMap::new();
    for j in 0..=n {
        for k in 0..=n {
            for a in &monos {
                for b in &monos {
                    let mut m = vec![vec![zero.clone(); n + 1]; n + 1];
                    m[j][k] = BihomPoly::monomial(n, *a, *b, Gq::one());
                    let f = horizontal_11_from_matrix(n, &m).expect("well-formed");
                    if !f.is_zero() {
                        out.entry(single_weight(&f)).or_default().push(f);
                    }
                }
            }
        }
    }
    out
}

/// Complex Kähler generators `dd^c(z^α z̄^β/|z|^{2k})` (and `ω_FS` at weight 0), by weight.
fn kahler_generators(n: usize, k: u32) -> Result<BTreeMap<Weight, Vec<PolyForm<Gq>>>> {
    let monos = MultiIndex::all_of_degree(n + 1, k);
    let mut out: BTreeMap<Weight, Vec<PolyForm<Gq>>> = BTreeMap::new();
    out.entry(vec![0; n + 1]).or_default().push(fubini_study_form(n));
    for a in &monos {
        for b in &monos {
            let f = function(BihomPoly::monomial(n, *a, *b, Gq::one())).ddc()?.reduce();
            if !f.is_zero() {
                out.entry(single_weight(&f)).or_default().push(f);
            }
        }
    }
    Ok(out)
}

/// Exact truncated spaces at `ω_FS` for one coefficient degree.
#[derive(Clone, Debug)]
pub struct TruncatedSpaces {
    pub n: usize,
    pub degree: u32,
    /// Degree of the functions `u` whose `dd^c u` feed the Kähler directions
    /// (equal to the coefficient degree: every closed direction of the
    /// truncated space is reached, which `unexplained_closed` certifies).
    pub kahler_function_degree: u32,
    /// Real bases with their weight classes.
    pub gauduchon: Vec<(PolyForm<Gq>, usize)>,
    pub kahler: Vec<(PolyForm<Gq>, usize)>,
    /// Real dimension of the closed part of the Gauduchon space.
    pub closed_dimension: usize,
    /// Closed directions that are not `aω_FS + dd^c u` within the truncation.
    pub unexplained_closed: usize,
    pub ambient_dimension: usize,
}

fn realify(block: &[PolyForm<Gq>], self_conjugate: bool) -> Vec<PolyForm<Gq>> {
    let half = Gq::frac(1, 0, 2);
    let half_i = Gq::frac(0, -1, 2);
    let mut out = Vec::new();
    for b in block {
        let c = b.conj();
        out.push(b.add(&c).scale(&half).reduce());
        out.push(b.sub(&c).scale(&half_i).reduce());
    }
    out.retain(|f| !f.is_zero());
    if self_conjugate {
        independent_forms(out)
    } else {
        out
    }
}

impl TruncatedSpaces {
    /// Assembles the spaces for dimension `n` and coefficient degree `d`.
    pub fn compute(n: usize, d: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        let kdeg = d;
        let gens = horizontal_generators(n, d);
        let kgens = kahler_generators(n, kdeg)?;
        let mut gauduchon = Vec::new();
        let mut kahler = Vec::new();
        let mut closed_dimension = 0;
        let mut unexplained = 0;
        let mut ambient = 0;
        let mut class = 0;
        for (w, block) in &gens {
            let nw = neg_weight(w);
            if *w < nw {
                continue;
            }
            let self_conj = *w == nw;
            let basis = independent_forms(block.clone());
            ambient += if self_conj { basis.len() } else { 2 * basis.len() };
            let g = kernel_in_span(&basis, gauduchon_constraint)?;
            let closed = kernel_in_span(&g, |f| Ok(f.d()))?;
            let k = match kgens.get(w) {
                Some(kg) => intersect_spans(&independent_forms(kg.clone()), &basis),
                None => Vec::new(),
            };
            if k.len() < closed.len() {
                unexplained += closed.len() - k.len();
            }
            let g_real = realify(&g, self_conj);
            let k_real = realify(&k, self_conj);
            closed_dimension += if self_conj { closed.len() } else { 2 * closed.len() };
            if !g_real.is_empty() || !k_real.is_empty() {
                gauduchon.extend(g_real.into_iter().map(|f| (f, class)));
                kahler.extend(k_real.into_iter().map(|f| (f, class)));
                class += 1;
            }
        }
        Ok(TruncatedSpaces {
            n,
            degree: d,
            kahler_function_degree: kdeg,
            gauduchon,
            kahler,
            closed_dimension,
            unexplained_closed: unexplained,
            ambient_dimension: ambient,
        })
    }

    /// Cached per `(n, d)`.
    pub fn cached(n: usize, d: u32) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<TruncatedSpaces>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(s) = cache.lock().expect("cache lock").get(&(n, d)) {
            return Ok(s.clone());
        }
        let s = Arc::new(Self::compute(n, d)?);
        cache.lock().expect("cache lock").insert((n, d), s.clone());
        Ok(s)
    }
}

/// Pairings at `ω_FS` with per-form data precomputed.
struct FsPairings {
    n: usize,
    /// `η ∧ ω_FS^{n−2}`
    eta_wedge: Vec<PolyForm<Gq>>,
    /// numerator of `f_η` (`η∧ω^{n−1} = f_η ω^n`)
    trace: Vec<BihomPoly<Gq>>,
    /// `∫ η ∧ ω^{n−1}`
    mean: Vec<Gq>,
}

impl FsPairings {
    fn new(forms: &[&PolyForm<Gq>]) -> Result<Self> {
        let n = forms.first().map(|f| f.n()).ok_or(Error::EmptyBasis)?;
        let w = fubini_study_form::<Gq>(n);
        let wnm2 = w.pow(n - 2);
        let mut eta_wedge = Vec::new();
        let mut trace = Vec::new();
        let mut mean = Vec::new();
        for f in forms {
            let a = f.wedge(&wnm2);
            let t = a.wedge(&w).top_ratio()?.function_numerator();
            mean.push(t.sphere_integral());
            trace.push(t);
            eta_wedge.push(a);
        }
        Ok(FsPairings { n, eta_wedge, trace, mean })
    }

    /// `(∫ η∧ξ∧ω^{n−2}, ∫ f_η f_ξ ω^n)`
    fn raw(&self, i: usize, j: usize, forms: &[&PolyForm<Gq>]) -> Result<(Gq, Gq)> {
        let cross = self.eta_wedge[i].wedge(forms[j]).integrate_cpn()?;
        let ff = (&self.trace[i] * &self.trace[j]).sphere_integral();
        Ok((cross, ff))
    }

    fn l2(&self, cross: &Gq, ff: &Gq) -> Gq {
        let n = self.n;
        ff.mul(&Gq::from_ratio(n as i64, factorial(n)))
            .sub(&cross.sub(ff).mul(&Gq::from_ratio(1, factorial(n - 2))))
    }

    fn q(&self, i: usize, j: usize, cross: &Gq) -> Gq {
        self.mean[i].mul(&self.mean[j]).sub(cross)
    }
}

/// Exact `(L² Gram, Q)` matrices of a real basis at `ω_FS`; entries across weight classes vanish.
fn fs_matrices(forms: &[&PolyForm<Gq>], classes: &[usize]) -> Result<(Vec<Vec<Gq>>, Vec<Vec<Gq>>)> {
    let p = FsPairings::new(forms)?;
    let k = forms.len();
    let mut gram = vec![vec![Gq::zero(); k]; k];
    let mut q = vec![vec![Gq::zero(); k]; k];
    for i in 0..k {
        for j in i..k {
            if classes[i] != classes[j] {
                continue;
            }
            let (cross, ff) = p.raw(i, j, forms)?;
            let g = p.l2(&cross, &ff);
            let qv = p.q(i, j, &cross);
            gram[i][j] = g.clone();
            gram[j][i] = g;
            q[i][j] = qv.clone();
            q[j][i] = qv;
        }
    }
    Ok((gram, q))
}

fn to_f64_matrix(m: &[Vec<Gq>]) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.iter().map(|x| x.re_f64()).collect()).collect()
}

fn make_basis(spaces: &TruncatedSpaces, kind: BasisKind) -> Result<TangentBasis> {
    let list = match kind {
        BasisKind::Gauduchon => &spaces.gauduchon,
        BasisKind::Kahler => &spaces.kahler,
    };
    if list.is_empty() {
        return Err(Error::EmptyBasis);
    }
    let directions: Vec<Direction> = list.iter().map(|(f, _)| Direction::new(f.clone())).collect::<Result<_>>()?;
    let classes: Vec<usize> = list.iter().map(|(_, c)| *c).collect();
    let forms: Vec<&PolyForm<Gq>> = directions.iter().map(|d| &d.eta).collect();
    let (gram, _) = fs_matrices(&forms, &classes)?;
    Ok(TangentBasis { n: spaces.n, degree: spaces.degree, kind, directions, classes, gram: to_f64_matrix(&gram) })
}

/// Real basis of the Gauduchon directions at `ω_FS` with coefficient matrices of bidegree `(d,d)`.
pub fn gauduchon_tangent_basis(n: usize, d: u32) -> Result<TangentBasis> {
    make_basis(&*TruncatedSpaces::cached(n, d)?, BasisKind::Gauduchon)
}

/// Real basis of `{aω_FS + dd^c u : deg u ≤ d}`, the Kähler directions of the same truncation.
pub fn kahler_tangent_basis(n: usize, d: u32) -> Result<TangentBasis> {
    make_basis(&*TruncatedSpaces::cached(n, d)?, BasisKind::Kahler)
}

/// A derivative given as `factor · core` with `core` exact when the inputs are.
#[derive(Clone, Debug, PartialEq)]
pub struct Scaled<S> {
    pub factor: f64,
    pub core: S,
}

impl<S: Scalar> Scaled<S> {
    pub fn value(&self) -> f64 {
        self.factor * self.core.re_f64()
    }
}

fn degenerate() -> Error {
    Error::MalformedForm("degenerate volume".into())
}

fn p_exponent(n: usize) -> (i64, i64) {
    (n as i64 - 1, n as i64)
}

/// `dM_σ|_g · h` for `h = η(·, J·)`:
/// `V^{−p} (dA − p A dV / V)` with `p = (n−1)/n`,
/// `dA = (1/(n−2)!) ∫_{Σ_σ} η∧ω^{n−2}` and `dV = (1/(n−1)!) ∫ η∧ω^{n−1}`.
pub fn first_variation_m_sigma<S: Scalar>(
    g: &HermitianMetric<S>,
    eta: &PolyForm<S>,
    sigma: &ProjPoint<S>,
) -> Result<Scaled<S>> {
    let n = g.n();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    check_real_11(eta)?;
    let (pn, pd) = p_exponent(n);
    let a = g.area_equator(sigma)?;
    let v = g.volume();
    let ewn2 = eta.wedge(&g.omega_pow(n - 2));
    let da = ewn2.integrate_equator(sigma)?.mul(&S::from_ratio(1, factorial(n - 2)));
    let dv = ewn2.wedge(g.omega()).integrate_cpn()?.mul(&S::from_ratio(1, factorial(n - 1)));
    let vinv = v.inv().ok_or_else(degenerate)?;
    let core = da.sub(&a.mul(&dv).mul(&vinv).mul(&S::from_ratio(pn, pd)));
    let factor = v.re_f64().powf(-(pn as f64) / pd as f64);
    Ok(Scaled { factor, core })
}

/// `dM|_g · h` with `M = c X / Y^p`, `X = ∫ω^{n−1}∧ω_FS`, `Y = ∫ω^n`:
/// `c Y^{−p} (dX − p X dY / Y)`, which for `Y = 1` is
/// `c (n−1) ∫ η∧ω^{n−2}∧(ω_FS − X ω)`.
pub fn first_variation_mean<S: Scalar>(g: &HermitianMetric<S>, eta: &PolyForm<S>) -> Result<Scaled<S>> {
    let n = g.n();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    check_real_11(eta)?;
    let (pn, pd) = p_exponent(n);
    let p = pn as f64 / pd as f64;
    let x = g.fs_pairing()?;
    let y = g.omega_pow(n).integrate_cpn()?;
    let ewn2 = eta.wedge(&g.omega_pow(n - 2));
    let dx = ewn2.wedge(&fubini_study_form(n)).integrate_cpn()?.scale_i64(n as i64 - 1);
    let dy = ewn2.wedge(g.omega()).integrate_cpn()?.scale_i64(n as i64);
    let yinv = y.inv().ok_or_else(degenerate)?;
    let core = dx.sub(&x.mul(&dy).mul(&yinv).mul(&S::from_ratio(pn, pd)));
    let c = (factorial(n) as f64).powf(p) / factorial(n - 1) as f64;
    Ok(Scaled { factor: c * y.re_f64().powf(-p), core })
}

fn check_normalized<S: Scalar>(omega: &PolyForm<S>) -> Result<()> {
    let n = omega.n();
    let total = omega.pow(n).integrate_cpn()?;
    let dev = total.sub(&S::one());
    let ok = if S::EXACT { dev.is_zero() } else { dev.abs_f64() <= 1e-10 };
    if ok {
        Ok(())
    } else {
        Err(Error::NotNormalized)
    }
}

/// `Q_ω(η,ξ) = (∫η∧ω^{n−1})(∫ξ∧ω^{n−1}) − ∫η∧ξ∧ω^{n−2}` for a normalized `ω`.
pub fn q_form<S: Scalar>(omega: &PolyForm<S>, eta: &PolyForm<S>, xi: &PolyForm<S>) -> Result<S> {
    let n = omega.n();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    check_normalized(omega)?;
    let wnm2 = omega.pow(n - 2);
    let wnm1 = wnm2.wedge(omega);
    let a = eta.wedge(&wnm1).integrate_cpn()?;
    let b = xi.wedge(&wnm1).integrate_cpn()?;
    let c = eta.wedge(xi).wedge(&wnm2).integrate_cpn()?;
    Ok(a.mul(&b).sub(&c))
}

/// `d²F|_{Φ(ω)}(μ,μ)` with `μ = (n−1) η∧ω^{n−2}`, for a normalized Gauduchon `ω`
/// and a Gauduchon direction `η`.
pub fn second_variation_f<S: Scalar>(omega: &PolyForm<S>, eta: &PolyForm<S>) -> Result<Scaled<S>> {
    let n = omega.n();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    check_real_11(eta)?;
    check_normalized(omega)?;
    let wnm2 = omega.pow(n - 2);
    let mu = eta.wedge(&wnm2).scale(&S::from_i64(n as i64 - 1));
    let constraint = mu.ddc()?;
    if !crate::hermitian::form_vanishes(&constraint, mu.max_abs()) {
        return Err(Error::NotGauduchonDirection);
    }
    let fs = fubini_study_form::<S>(n);
    let x = wnm2.wedge(omega).wedge(&fs).integrate_cpn()?;
    let mw = mu.wedge(omega).integrate_cpn()?;
    let me = mu.wedge(eta).integrate_cpn()?;
    let mf = mu.wedge(&fs).integrate_cpn()?;
    let inv = S::from_ratio(1, n as i64 - 1);
    let first = x.mul(&inv.mul(&mw).mul(&mw).sub(&me));
    let second = mw.mul(&x.mul(&mw).sub(&mf)).scale_i64(2);
    let (pn, pd) = p_exponent(n);
    let c = (factorial(n) as f64).powf(pn as f64 / pd as f64) / factorial(n - 1) as f64;
    Ok(Scaled { factor: c, core: first.add(&second) })
}

/// Functionals available to the finite-difference oracle.
#[derive(Clone, Debug)]
pub enum Functional {
    MSigma(ProjPoint<Complex64>),
    Mean,
    Rho,
}

/// Evaluates `functional` at `ω + tη` in float arithmetic.
pub fn evaluate_along(functional: &Functional, base: &PolyForm<Gq>, eta: &PolyForm<Gq>, t: f64) -> Result<f64> {
    let form = base.to_float().add(&eta.to_float().scale(&Complex64::new(t, 0.0)));
    let g = HermitianMetric::from_form(form, 200, 7).map_err(|e| match e {
        Error::NotPositive { .. } => Error::PositivityLost(t),
        other => other,
    })?;
    match functional {
        Functional::MSigma(s) => g.m_sigma_f(s),
        Functional::Mean => g.mean_functional(),
        Functional::Rho => g.rho(),
    }
}

/// Central difference of order 1 or 2 along `ω + tη` at `t = 0`, optionally
/// Richardson-extrapolated from steps `h` and `h/2`.
pub fn fd_oracle(
    functional: &Functional,
    base: &PolyForm<Gq>,
    eta: &PolyForm<Gq>,
    order: u32,
    step: f64,
    richardson: bool,
) -> Result<f64> {
    if !(order == 1 || order == 2) || step <= 0.0 {
        return Err(Error::ConfigInvalid(format!("order {order}, step {step}")));
    }
    let f0 = if order == 2 { evaluate_along(functional, base, eta, 0.0)? } else { 0.0 };
    let diff = |h: f64| -> Result<f64> {
        let fp = evaluate_along(functional, base, eta, h)?;
        let fm = evaluate_along(functional, base, eta, -h)?;
        Ok(if order == 1 { (fp - fm) / (2.0 * h) } else { (fp - 2.0 * f0 + fm) / (h * h) })
    };
    let d1 = diff(step)?;
    if !richardson {
        return Ok(d1);
    }
    let d2 = diff(step / 2.0)?;
    Ok((4.0 * d2 - d1) / 3.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct HessianSpectrum {
    pub n: usize,
    pub degree: u32,
    pub gauduchon_dimension: usize,
    pub kahler_dimension: usize,
    /// Generalized eigenvalues of `(Q/(n−2)!, L² Gram)`, ascending.
    pub eigenvalues: Vec<f64>,
    pub lambda_max: f64,
    pub kernel_dimension: usize,
    /// `max |λ − 1|` over the eigenvalues outside the kernel.
    pub complement_deviation: f64,
    /// Largest `|Q_ij − Q_ji|` (exact zero expected).
    pub q_asymmetry: f64,
}

pub const KERNEL_REL_TOL: f64 = 1e-9;

/// Spectrum of the Hessian pencil on the truncated Gauduchon directions at `ω_FS`.
pub fn hessian_spectrum(n: usize, d: u32) -> Result<HessianSpectrum> {
    let spaces = TruncatedSpaces::cached(n, d)?;
    let forms: Vec<&PolyForm<Gq>> = spaces.gauduchon.iter().map(|(f, _)| f).collect();
    let classes: Vec<usize> = spaces.gauduchon.iter().map(|(_, c)| *c).collect();
    if forms.is_empty() {
        return Err(Error::EmptyBasis);
    }
    let (gram, q) = fs_matrices(&forms, &classes)?;
    let k = forms.len();
    let mut asym = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            asym = asym.max(q[i][j].sub(&q[j][i]).abs_f64());
        }
    }
    let scale = 1.0 / factorial(n - 2) as f64;
    let qm = DMatrix::from_fn(k, k, |i, j| q[i][j].re_f64() * scale);
    let gm = DMatrix::from_fn(k, k, |i, j| gram[i][j].re_f64());
    let ev = linalg::generalized_symmetric_eigen(&qm, &gm).ok_or_else(|| {
        let min = gm.clone().symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        Error::SingularGram(min)
    })?;
    let lambda_max = ev.iter().copied().fold(0.0f64, |a, b| a.max(b.abs()));
    let kernel = ev.iter().filter(|l| l.abs() <= KERNEL_REL_TOL * lambda_max).count();
    let complement_deviation = ev
        .iter()
        .filter(|l| l.abs() > KERNEL_REL_TOL * lambda_max)
        .map(|l| (l - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(HessianSpectrum {
        n,
        degree: d,
        gauduchon_dimension: k,
        kahler_dimension: spaces.kahler.len(),
        eigenvalues: ev,
        lambda_max,
        kernel_dimension: kernel,
        complement_deviation,
        q_asymmetry: asym,
    })
}

impl HessianSpectrum {
    /// CSV rows `eigenvalue,multiplicity,kernel`, eigenvalues clustered to `1e−8` relative.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eigenvalue,multiplicity,kernel\n");
        let tol = 1e-8 * self.lambda_max.max(1.0);
        let mut groups: Vec<(f64, usize)> = Vec::new();
        for &l in &self.eigenvalues {
            match groups.last_mut() {
                Some((v, m)) if (l - *v / *m as f64).abs() <= tol => {
                    *v += l;
                    *m += 1;
                }
                _ => groups.push((l, 1)),
            }
        }
        for (sum, m) in groups {
            let l = sum / m as f64;
            let kernel = l.abs() <= KERNEL_REL_TOL * self.lambda_max;
            let _ = writeln!(out, "{:.12e},{},{}", l, m, kernel);
        }
        out
    }
}

/// L²-orthogonal projection of `η` off the span of `kahler` at `ω_FS`:
/// returns `‖η_⊥‖²` and the coefficients of the removed Kähler part.
pub fn kahler_complement_norm_sq(eta: &PolyForm<Gq>, kahler: &[PolyForm<Gq>]) -> Result<(f64, Vec<f64>)> {
    let n = eta.n();
    let w = fubini_study_form::<Gq>(n);
    let g = |a: &PolyForm<Gq>, b: &PolyForm<Gq>| l2_inner_11(a, b, &w).map(|x| x.re_f64());
    let k = kahler.len();
    let gm = DMatrix::from_fn(k, k, |i, j| if i <= j { g(&kahler[i], &kahler[j]).unwrap_or(f64::NAN) } else { 0.0 });
    let gm = DMatrix::from_fn(k, k, |i, j| if i <= j { gm[(i, j)] } else { gm[(j, i)] });
    if gm.iter().any(|x| x.is_nan()) {
        return Err(Error::MalformedForm("Kähler basis pairing failed".into()));
    }
    let rhs = nalgebra::DVector::from_iterator(k, kahler.iter().map(|b| g(b, eta).unwrap_or(f64::NAN)));
    let chol = gm.clone().cholesky().ok_or_else(|| Error::SingularGram(0.0))?;
    let coef = chol.solve(&rhs);
    let total = g(eta, eta)?;
    Ok((total - rhs.dot(&coef), coef.iter().copied().collect()))
}
