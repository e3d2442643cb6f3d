//! Bihomogeneous polynomials in `(z, z̄)` and their exact integrals over the unit sphere.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Maximum number of homogeneous coordinates (`n + 1`) supported.
pub const MAX_VARS: usize = 5;

/// Exponent vector of a monomial in `z` (or in `z̄`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(pub [u8; MAX_VARS]);

impl MultiIndex {
    pub fn zero() -> Self {
        MultiIndex([0; MAX_VARS])
    }

    pub fn unit(j: usize) -> Self {
        let mut e = [0; MAX_VARS];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn from_slice(exps: &[u8]) -> Self {
        assert!(exps.len() <= MAX_VARS, "too many variables");
        let mut e = [0; MAX_VARS];
        e[..exps.len()].copy_from_slice(exps);
        MultiIndex(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn get(&self, j: usize) -> u8 {
        self.0[j]
    }

    pub fn plus(&self, o: &MultiIndex) -> MultiIndex {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(o.0.iter()) {
            *a += b;
        }
        MultiIndex(e)
    }

    fn dec(&self, j: usize) -> Option<MultiIndex> {
        if self.0[j] == 0 {
            return None;
        }
        let mut e = self.0;
        e[j] -= 1;
        Some(MultiIndex(e))
    }

    pub fn as_vec(&self, nvars: usize) -> Vec<u8> {
        self.0[..nvars].to_vec()
    }

    /// All exponent vectors of total degree `d` in `nvars` variables, in lexicographic order.
    pub fn all_of_degree(nvars: usize, d: u32) -> Vec<MultiIndex> {
        fn rec(nvars: usize, j: usize, left: u32, cur: &mut [u8; MAX_VARS], out: &mut Vec<MultiIndex>) {
            if j + 1 == nvars {
                cur[j] = left as u8;
                out.push(MultiIndex(*cur));
                cur[j] = 0;
                return;
            }
            for e in (0..=left).rev() {
                cur[j] = e as u8;
                rec(nvars, j + 1, left - e, cur, out);
            }
            cur[j] = 0;
        }
        let mut out = Vec::new();
        let mut cur = [0u8; MAX_VARS];
        rec(nvars, 0, d, &mut cur, &mut out);
        out
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0)
    }
}

/// Holomorphic or antiholomorphic Wirtinger derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wirtinger {
    Holomorphic,
    Antiholomorphic,
}

/// Key of a term `z^α z̄^β`.
pub type TermKey = (MultiIndex, MultiIndex);

/// A polynomial in `z_0..z_n, z̄_0..z̄_n`, homogeneous of bidegree `(a, b)`.
#[derive(Clone, PartialEq)]
pub struct BihomPoly<S> {
    nvars: usize,
    bidegree: (u32, u32),
    terms: BTreeMap<TermKey, S>,
}

impl<S: Scalar> fmt::Debug for BihomPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BihomPoly[n={}, bideg={:?}]{{", self.nvars - 1, self.bidegree)?;
        for (i, ((a, b), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{:?}·z{:?}z̄{:?}", c, &a.0[..self.nvars], &b.0[..self.nvars])?;
        }
        write!(f, "}}")
    }
}

fn factorial(k: u32) -> u128 {
    (1..=k as u128).product()
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `n! α! / (n + |α|)!`: the normalized sphere moment `E|z^α|²` on `S^{2n+1}`.
pub fn sphere_moment(n: usize, alpha: &MultiIndex) -> (i64, i64) {
    let mut num = factorial(n as u32);
    for j in 0..MAX_VARS {
        num *= factorial(alpha.0[j] as u32);
    }
    let den = factorial(n as u32 + alpha.degree());
    let g = gcd(num, den);
    ((num / g) as i64, (den / g) as i64)
}

impl<S: Scalar> BihomPoly<S> {
    /// The zero polynomial of bidegree `(a, b)` in `n + 1` variables.
    pub fn zero(n: usize, bidegree: (u32, u32)) -> Self {
        assert!(n + 1 <= MAX_VARS, "ambient dimension too large");
        BihomPoly { nvars: n + 1, bidegree, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: S) -> Self {
        let mut p = Self::zero(n, (0, 0));
        p.add_term(MultiIndex::zero(), MultiIndex::zero(), c);
        p
    }

    pub fn monomial(n: usize, alpha: MultiIndex, beta: MultiIndex, c: S) -> Self {
        let mut p = Self::zero(n, (alpha.degree(), beta.degree()));
        p.add_term(alpha, beta, c);
        p
    }

    /// `z_j`.
    pub fn z(n: usize, j: usize) -> Self {
        Self::monomial(n, MultiIndex::unit(j), MultiIndex::zero(), S::one())
    }

    /// `z̄_j`.
    pub fn zbar(n: usize, j: usize) -> Self {
        Self::monomial(n, MultiIndex::zero(), MultiIndex::unit(j), S::one())
    }

    /// `|z|² = Σ z_j z̄_j`.
    pub fn norm_sq(n: usize) -> Self {
        let mut p = Self::zero(n, (1, 1));
        for j in 0..=n {
            p.add_term(MultiIndex::unit(j), MultiIndex::unit(j), S::one());
        }
        p
    }

    /// `|z|^{2k}`.
    pub fn norm_sq_pow(n: usize, k: u32) -> Self {
        let r2 = Self::norm_sq(n);
        let mut p = Self::constant(n, S::one());
        for _ in 0..k {
            p = &p * &r2;
        }
        p
    }

    /// Builds a polynomial from explicit terms; all terms must share one bidegree.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (MultiIndex, MultiIndex, S)>) -> Result<Self> {
        let mut out: Option<Self> = None;
        for (a, b, c) in terms {
            let bd = (a.degree(), b.degree());
            let p = out.get_or_insert_with(|| Self::zero(n, bd));
            if p.bidegree != bd {
                return Err(Error::BidegreeMismatch { left: p.bidegree, right: bd });
            }
            p.add_term(a, b, c);
        }
        Ok(out.unwrap_or_else(|| Self::zero(n, (0, 0))))
    }

    /// Ambient dimension parameter `n` (the polynomial lives on `C^{n+1}`).
    pub fn n(&self) -> usize {
        self.nvars - 1
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn bidegree(&self) -> (u32, u32) {
        self.bidegree
    }

    pub fn terms(&self) -> &BTreeMap<TermKey, S> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, alpha: &MultiIndex, beta: &MultiIndex) -> S {
        self.terms.get(&(*alpha, *beta)).cloned().unwrap_or_else(S::zero)
    }

    /// Adds `c·z^α z̄^β`; the monomial must match the bidegree.
    pub fn add_term(&mut self, alpha: MultiIndex, beta: MultiIndex, c: S) {
        debug_assert_eq!((alpha.degree(), beta.degree()), self.bidegree);
        if c.is_zero() {
            return;
        }
        match self.terms.entry((alpha, beta)) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.abs_f64()).fold(0.0, f64::max)
    }

    /// Drops float noise relative to `scale` (no-op in exact mode).
    pub fn prune(&mut self, scale: f64) {
        if S::EXACT {
            return;
        }
        self.terms.retain(|_, c| !c.negligible(scale));
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.combine(o, false)
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.combine(o, true)
    }

    fn combine(&self, o: &Self, subtract: bool) -> Result<Self> {
        if self.nvars != o.nvars {
            return Err(Error::DimensionMismatch { left: self.n(), right: o.n() });
        }
        if self.bidegree != o.bidegree {
            if o.is_zero() {
                return Ok(self.clone());
            }
            if self.is_zero() {
                return Ok(if subtract { o.neg() } else { o.clone() });
            }
            return Err(Error::BidegreeMismatch { left: self.bidegree, right: o.bidegree });
        }
        let scale = self.max_abs().max(o.max_abs());
        let mut out = self.clone();
        for ((a, b), c) in &o.terms {
            out.add_term(*a, *b, if subtract { c.neg() } else { c.clone() });
        }
        out.prune(scale);
        Ok(out)
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        if self.nvars != o.nvars {
            return Err(Error::DimensionMismatch { left: self.n(), right: o.n() });
        }
        let mut acc: BTreeMap<TermKey, S> = BTreeMap::new();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &o.terms {
                let key = (a1.plus(a2), b1.plus(b2));
                let prod = c1.mul(c2);
                match acc.get_mut(&key) {
                    Some(v) => *v = v.add(&prod),
                    None => {
                        acc.insert(key, prod);
                    }
                }
            }
        }
        let scale = self.max_abs() * o.max_abs();
        acc.retain(|_, c| !c.is_zero() && !c.negligible(scale));
        Ok(BihomPoly {
            nvars: self.nvars,
            bidegree: (self.bidegree.0 + o.bidegree.0, self.bidegree.1 + o.bidegree.1),
            terms: acc,
        })
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.n(), self.bidegree);
        }
        let terms = self.terms.iter().map(|(k, v)| (*k, v.mul(c))).collect();
        BihomPoly { nvars: self.nvars, bidegree: self.bidegree, terms }
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(k, v)| (*k, v.neg())).collect();
        BihomPoly { nvars: self.nvars, bidegree: self.bidegree, terms }
    }

    /// The polynomial `z ↦ conj(P(z))`: swaps `α, β` and conjugates coefficients.
    pub fn conj(&self) -> Self {
        let terms = self.terms.iter().map(|((a, b), v)| ((*b, *a), v.conj())).collect();
        BihomPoly { nvars: self.nvars, bidegree: (self.bidegree.1, self.bidegree.0), terms }
    }

    /// `true` if `P` takes real values, i.e. `P == conj(P)`.
    pub fn is_real(&self) -> bool {
        self.bidegree.0 == self.bidegree.1 && {
            let c = self.conj();
            match self.try_sub(&c) {
                Ok(d) => d.is_zero(),
                Err(_) => false,
            }
        }
    }

    /// Formal `∂/∂z_j` or `∂/∂z̄_j`.
    pub fn wirtinger(&self, j: usize, kind: Wirtinger) -> Self {
        assert!(j < self.nvars, "variable index out of range");
        let bidegree = match kind {
            Wirtinger::Holomorphic => (self.bidegree.0.saturating_sub(1), self.bidegree.1),
            Wirtinger::Antiholomorphic => (self.bidegree.0, self.bidegree.1.saturating_sub(1)),
        };
        let mut out = BihomPoly { nvars: self.nvars, bidegree, terms: BTreeMap::new() };
        for ((a, b), c) in &self.terms {
            match kind {
                Wirtinger::Holomorphic => {
                    if let Some(a2) = a.dec(j) {
                        out.add_term(a2, *b, c.scale_i64(a.0[j] as i64));
                    }
                }
                Wirtinger::Antiholomorphic => {
                    if let Some(b2) = b.dec(j) {
                        out.add_term(*a, b2, c.scale_i64(b.0[j] as i64));
                    }
                }
            }
        }
        out
    }

    /// Integral against the normalized uniform probability measure on `S^{2n+1}`.
    pub fn sphere_integral(&self) -> S {
        let n = self.n();
        let mut acc = S::zero();
        for ((a, b), c) in &self.terms {
            if a == b {
                let (num, den) = sphere_moment(n, a);
                acc = acc.add(&c.mul(&S::from_ratio(num, den)));
            }
        }
        acc
    }

    /// Literal evaluation at a float point.
    pub fn evaluate(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.nvars, "point dimension mismatch");
        let zb: Vec<Complex64> = z.iter().map(|x| x.conj()).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for ((a, b), c) in &self.terms {
            let mut m = c.to_c64();
            for j in 0..self.nvars {
                if a.0[j] > 0 {
                    m *= z[j].powi(a.0[j] as i32);
                }
                if b.0[j] > 0 {
                    m *= zb[j].powi(b.0[j] as i32);
                }
            }
            acc += m;
        }
        acc
    }

    /// Evaluation in the coefficient field.
    pub fn evaluate_exact(&self, z: &[S]) -> S {
        assert_eq!(z.len(), self.nvars, "point dimension mismatch");
        let zb: Vec<S> = z.iter().map(|x| x.conj()).collect();
        let mut acc = S::zero();
        for ((a, b), c) in &self.terms {
            let mut m = c.clone();
            for j in 0..self.nvars {
                for _ in 0..a.0[j] {
                    m = m.mul(&z[j]);
                }
                for _ in 0..b.0[j] {
                    m = m.mul(&zb[j]);
                }
            }
            acc = acc.add(&m);
        }
        acc
    }

    /// Exact division by `|z|²`, if it divides.
    pub fn div_norm_sq(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Self::zero(self.n(), (self.bidegree.0.saturating_sub(1), self.bidegree.1.saturating_sub(1))));
        }
        if self.bidegree.0 == 0 || self.bidegree.1 == 0 {
            return None;
        }
        // Reduction modulo |z|² with leading monomial z_0 z̄_0.
        let scale = self.max_abs();
        let mut rem = self.terms.clone();
        let mut quot: BTreeMap<TermKey, S> = BTreeMap::new();
        loop {
            let key = rem
                .iter()
                .rev()
                .find(|((a, b), _)| a.0[0] > 0 && b.0[0] > 0)
                .map(|(k, _)| *k);
            let Some((a, b)) = key else { break };
            let c = rem.remove(&(a, b)).expect("present");
            let qa = a.dec(0).expect("positive");
            let qb = b.dec(0).expect("positive");
            for j in 1..self.nvars {
                let key = (qa.plus(&MultiIndex::unit(j)), qb.plus(&MultiIndex::unit(j)));
                let v = rem.get(&key).cloned().unwrap_or_else(S::zero).sub(&c);
                if v.is_zero() || v.negligible(scale) {
                    rem.remove(&key);
                } else {
                    rem.insert(key, v);
                }
            }
            let e = quot.entry((qa, qb)).or_insert_with(S::zero);
            *e = e.add(&c);
        }
        if rem.values().all(|c| c.negligible(scale)) {
            quot.retain(|_, c| !c.is_zero());
            Some(BihomPoly {
                nvars: self.nvars,
                bidegree: (self.bidegree.0 - 1, self.bidegree.1 - 1),
                terms: quot,
            })
        } else {
            None
        }
    }

    /// `true` if the polynomial equals `c·|z|^{2k}` for some scalar `c`; returns `c`.
    pub fn as_norm_power_multiple(&self) -> Option<S> {
        if self.bidegree.0 != self.bidegree.1 {
            return if self.is_zero() { Some(S::zero()) } else { None };
        }
        let k = self.bidegree.0;
        let lead = MultiIndex::from_slice(&{
            let mut v = vec![0u8; self.nvars];
            v[0] = k as u8;
            v
        });
        let c = self.coeff(&lead, &lead);
        let model = Self::norm_sq_pow(self.n(), k).scale(&c);
        let diff = self.try_sub(&model).ok()?;
        if diff.terms.values().all(|v| v.negligible(self.max_abs())) {
            Some(c)
        } else {
            None
        }
    }

    /// Splits into torus-weight components; weight of `z^α z̄^β` is `α − β`.
    pub fn torus_weight_of(alpha: &MultiIndex, beta: &MultiIndex) -> [i16; MAX_VARS] {
        let mut w = [0i16; MAX_VARS];
        for j in 0..MAX_VARS {
            w[j] = alpha.0[j] as i16 - beta.0[j] as i16;
        }
        w
    }

    /// Substitutes `z = A w`, where `lin[j]` is the linear form `Σ_k A_jk w_k` (bidegree `(1,0)`).
    pub fn substitute_linear(&self, lin: &[BihomPoly<S>]) -> Self {
        assert_eq!(lin.len(), self.nvars);
        let m = lin[0].n();
        let lin_bar: Vec<BihomPoly<S>> = lin.iter().map(|l| l.conj()).collect();
        let maxdeg = self.terms.keys().fold(0u8, |acc, (a, b)| {
            acc.max(*a.0.iter().max().unwrap()).max(*b.0.iter().max().unwrap())
        }) as usize;
        // power caches: pw[j][e] = lin[j]^e
        let powers = |base: &[BihomPoly<S>]| -> Vec<Vec<BihomPoly<S>>> {
            base.iter()
                .map(|l| {
                    let mut v = vec![BihomPoly::constant(m, S::one())];
                    for e in 1..=maxdeg {
                        let next = &v[e - 1] * l;
                        v.push(next);
                    }
                    v
                })
                .collect()
        };
        let pw = powers(lin);
        let pwb = powers(&lin_bar);
        let mut out = BihomPoly::zero(m, self.bidegree);
        let scale = self.max_abs();
        for ((a, b), c) in &self.terms {
            let mut t = BihomPoly::constant(m, c.clone());
            for j in 0..self.nvars {
                if a.0[j] > 0 {
                    t = &t * &pw[j][a.0[j] as usize];
                }
                if b.0[j] > 0 {
                    t = &t * &pwb[j][b.0[j] as usize];
                }
            }
            for ((ta, tb), tc) in t.terms {
                out.add_term(ta, tb, tc);
            }
        }
        out.prune(scale);
        out
    }

    /// Coefficient-wise conversion to another field.
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> BihomPoly<T> {
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            let t = f(v);
            if !t.is_zero() {
                terms.insert(*k, t);
            }
        }
        BihomPoly { nvars: self.nvars, bidegree: self.bidegree, terms }
    }

    pub fn to_float(&self) -> BihomPoly<Complex64> {
        self.map_scalar(|c| c.to_c64())
    }

    /// Multiplies by `|z|^{2k}`.
    pub fn lift(&self, k: u32) -> Self {
        if k == 0 {
            return self.clone();
        }
        self * &Self::norm_sq_pow(self.n(), k)
    }
}

impl<'a, S: Scalar> Add for &'a BihomPoly<S> {
    type Output = BihomPoly<S>;
    /// Panics on a bidegree mismatch; use [`BihomPoly::try_add`] for a checked sum.
    fn add(self, o: Self) -> BihomPoly<S> {
        self.try_add(o).expect("bidegree mismatch in polynomial sum")
    }
}

impl<'a, S: Scalar> Sub for &'a BihomPoly<S> {
    type Output = BihomPoly<S>;
    fn sub(self, o: Self) -> BihomPoly<S> {
        self.try_sub(o).expect("bidegree mismatch in polynomial difference")
    }
}

impl<'a, S: Scalar> Mul for &'a BihomPoly<S> {
    type Output = BihomPoly<S>;
    fn mul(self, o: Self) -> BihomPoly<S> {
        self.try_mul(o).expect("dimension mismatch in polynomial product")
    }
}

impl<'a, S: Scalar> Neg for &'a BihomPoly<S> {
    type Output = BihomPoly<S>;
    fn neg(self) -> BihomPoly<S> {
        BihomPoly::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Gq;

    type P = BihomPoly<Gq>;

    fn mi(v: &[u8]) -> MultiIndex {
        MultiIndex::from_slice(v)
    }

    #[test]
    fn norm_sq_from_sum() {
        let a = P::monomial(1, mi(&[1, 0]), mi(&[1, 0]), Gq::one());
        let b = P::monomial(1, mi(&[0, 1]), mi(&[0, 1]), Gq::one());
        assert_eq!(&a + &b, P::norm_sq(1));
    }

    #[test]
    fn product_adds_bidegrees() {
        let p = P::monomial(1, mi(&[1, 0]), mi(&[0, 1]), Gq::one());
        let q = P::monomial(1, mi(&[0, 1]), mi(&[1, 0]), Gq::one());
        let r = &p * &q;
        assert_eq!(r.bidegree(), (2, 2));
        assert_eq!(r.coeff(&mi(&[1, 1]), &mi(&[1, 1])), Gq::one());
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn scaling_by_gaussian_rational() {
        let p = P::monomial(2, mi(&[1, 0, 0]), mi(&[1, 0, 0]), Gq::one());
        let s = p.scale(&Gq::frac(2, 1, 1));
        assert_eq!(s.coeff(&mi(&[1, 0, 0]), &mi(&[1, 0, 0])), Gq::frac(2, 1, 1));
    }

    #[test]
    fn mismatched_bidegrees_are_rejected() {
        let p = P::z(1, 0);
        let q = P::norm_sq(1);
        assert!(matches!(p.try_add(&q), Err(Error::BidegreeMismatch { .. })));
    }

    #[test]
    fn wirtinger_examples() {
        let p = P::monomial(1, mi(&[2, 0]), mi(&[0, 1]), Gq::one());
        let d = p.wirtinger(0, Wirtinger::Holomorphic);
        assert_eq!(d, P::monomial(1, mi(&[1, 0]), mi(&[0, 1]), Gq::int(2)));
        let q = P::monomial(1, mi(&[1, 0]), mi(&[1, 0]), Gq::one());
        assert!(q.wirtinger(1, Wirtinger::Antiholomorphic).is_zero());
        let q4 = P::monomial(1, mi(&[2, 0]), mi(&[2, 0]), Gq::one());
        let dd = q4.wirtinger(0, Wirtinger::Antiholomorphic).wirtinger(0, Wirtinger::Holomorphic);
        assert_eq!(dd, P::monomial(1, mi(&[1, 0]), mi(&[1, 0]), Gq::int(4)));
    }

    #[test]
    fn sphere_integral_examples() {
        assert_eq!(P::constant(2, Gq::one()).sphere_integral(), Gq::one());
        let z0sq = P::monomial(1, mi(&[1, 0]), mi(&[1, 0]), Gq::one());
        assert_eq!(z0sq.sphere_integral(), Gq::frac(1, 0, 2));
        let z04 = P::monomial(2, mi(&[2, 0, 0]), mi(&[2, 0, 0]), Gq::one());
        assert_eq!(z04.sphere_integral(), Gq::frac(1, 0, 6));
        let mixed = P::monomial(2, mi(&[1, 0, 0]), mi(&[0, 1, 0]), Gq::one());
        assert_eq!(mixed.sphere_integral(), Gq::zero());
    }

    #[test]
    fn evaluation_examples() {
        let z0sq = P::monomial(2, mi(&[1, 0, 0]), mi(&[1, 0, 0]), Gq::one());
        let e0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        let e1 = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert_eq!(z0sq.evaluate(&e0), Complex64::new(1.0, 0.0));
        assert_eq!(z0sq.evaluate(&e1), Complex64::new(0.0, 0.0));
        let p = P::monomial(2, mi(&[1, 0, 0]), mi(&[0, 1, 0]), Gq::one());
        let s = 0.5f64.sqrt();
        let v = p.evaluate(&[Complex64::new(s, 0.0), Complex64::new(s, 0.0), Complex64::new(0.0, 0.0)]);
        assert!((v - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn division_by_norm_sq() {
        let p = P::monomial(2, mi(&[1, 0, 0]), mi(&[0, 1, 0]), Gq::one());
        let q = &p * &P::norm_sq(2);
        assert_eq!(q.div_norm_sq(), Some(p.clone()));
        assert_eq!(p.div_norm_sq(), None);
        assert_eq!(P::norm_sq_pow(2, 3).as_norm_power_multiple(), Some(Gq::one()));
    }

    #[test]
    fn degree_enumeration() {
        assert_eq!(MultiIndex::all_of_degree(3, 2).len(), 6);
        assert_eq!(MultiIndex::all_of_degree(3, 0).len(), 1);
    }
}
