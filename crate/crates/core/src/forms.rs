//! Horizontal, scale-invariant differential forms on CP^n, stored on `C^{n+1} \ {0}`.
//!
//! A form is a sum of `P_{IJ} / |z|^{2m} dz_I ∧ dz̄_J` with one common
//! denominator power `m`; the numerator of the `(I, J)` component has
//! bidegree `(m − |I|, m − |J|)`. Components are keyed by a bitmask in which
//! `dz_j` is bit `j` and `dz̄_j` is bit `n + 1 + j`, so holomorphic slots come
//! first in the canonical ordering.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ambient::{householder_to, ProjPoint};
use crate::error::{Error, Result};
use crate::polyalg::{BihomPoly, MultiIndex, Wirtinger};
use crate::scalar::{Gq, Scalar};

pub type Mask = u16;

/// One coordinate of a form: component mask and numerator monomial.
pub type CoordKey = (Mask, MultiIndex, MultiIndex);

#[derive(Clone, PartialEq)]
pub struct PolyForm<S> {
    n: usize,
    degree: usize,
    denom: u32,
    comps: BTreeMap<Mask, BihomPoly<S>>,
}

impl<S: Scalar> std::fmt::Debug for PolyForm<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "PolyForm[n={}, deg={}, m={}]", self.n, self.degree, self.denom)?;
        for (mask, p) in &self.comps {
            let (i, j) = split_mask(self.n, *mask);
            writeln!(f, "  dz{:?} dzb{:?}: {:?}", i, j, p)?;
        }
        Ok(())
    }
}

fn holo_bit(j: usize) -> Mask {
    1 << j
}

fn anti_bit(n: usize, j: usize) -> Mask {
    1 << (n + 1 + j)
}

/// Builds a mask from holomorphic indices `I` and antiholomorphic indices `J`.
pub fn make_mask(n: usize, holo: &[usize], anti: &[usize]) -> Mask {
    holo.iter().fold(0, |m, &j| m | holo_bit(j)) | anti.iter().fold(0, |m, &j| m | anti_bit(n, j))
}

/// `(I, J)` index lists of a mask.
pub fn split_mask(n: usize, mask: Mask) -> (Vec<usize>, Vec<usize>) {
    let holo = (0..=n).filter(|&j| mask & holo_bit(j) != 0).collect();
    let anti = (0..=n).filter(|&j| mask & anti_bit(n, j) != 0).collect();
    (holo, anti)
}

/// `(|I|, |J|)` for a mask.
pub fn mask_bidegree(n: usize, mask: Mask) -> (u32, u32) {
    let low = (1u16 << (n + 1)) - 1;
    ((mask & low).count_ones(), (mask >> (n + 1)).count_ones())
}

/// Sign of `e_A ∧ e_B` relative to the canonical ordering of `A ∪ B`.
fn wedge_sign(a: Mask, b: Mask) -> bool {
    // number of pairs (x in A, y in B) with x > y
    let mut count = 0u32;
    let mut bb = b;
    while bb != 0 {
        let y = bb.trailing_zeros();
        count += (a >> (y + 1)).count_ones();
        bb &= bb - 1;
    }
    count % 2 == 1
}

fn i_power<S: Scalar>(k: i32) -> S {
    match k.rem_euclid(4) {
        0 => S::one(),
        1 => S::i(),
        2 => S::one().neg(),
        _ => S::i().neg(),
    }
}

impl<S: Scalar> PolyForm<S> {
    pub fn zero(n: usize, degree: usize) -> Self {
        PolyForm { n, degree, denom: 0, comps: BTreeMap::new() }
    }

    /// The function `P / |z|^{2d}` for `P` of bidegree `(d, d)`.
    pub fn function(p: BihomPoly<S>) -> Result<Self> {
        let (a, b) = p.bidegree();
        if a != b {
            return Err(Error::MalformedForm(format!("function numerator of bidegree ({a},{b})")));
        }
        let n = p.n();
        let mut comps = BTreeMap::new();
        if !p.is_zero() {
            comps.insert(0, p);
        }
        Ok(PolyForm { n, degree: 0, denom: a, comps })
    }

    pub fn constant(n: usize, c: S) -> Self {
        Self::function(BihomPoly::constant(n, c)).expect("constant is a function")
    }

    /// Assembles a form from `(mask, numerator)` pairs over `|z|^{2m}`, checking bidegrees.
    pub fn from_components(n: usize, degree: usize, denom: u32, comps: Vec<(Mask, BihomPoly<S>)>) -> Result<Self> {
        let mut out = PolyForm { n, degree, denom, comps: BTreeMap::new() };
        for (mask, p) in comps {
            let (pi, qj) = mask_bidegree(n, mask);
            if (pi + qj) as usize != degree {
                return Err(Error::MalformedForm(format!("component of degree {} in a {}-form", pi + qj, degree)));
            }
            if p.is_zero() {
                continue;
            }
            if p.n() != n || p.bidegree() != (denom.wrapping_sub(pi), denom.wrapping_sub(qj)) {
                return Err(Error::MalformedForm(format!(
                    "numerator bidegree {:?} does not match denominator power {}",
                    p.bidegree(),
                    denom
                )));
            }
            let scale = p.max_abs();
            let entry = out.comps.entry(mask).or_insert_with(|| BihomPoly::zero(n, p.bidegree()));
            *entry = entry.try_add(&p)?;
            entry.prune(scale);
        }
        out.comps.retain(|_, p| !p.is_zero());
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn denom_power(&self) -> u32 {
        self.denom
    }

    pub fn components(&self) -> &BTreeMap<Mask, BihomPoly<S>> {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.values().map(|p| p.max_abs()).fold(0.0, f64::max)
    }

    /// Rewrites the form over `|z|^{2m}` with `m ≥` the current power.
    pub fn lift_to(&self, m: u32) -> Self {
        assert!(m >= self.denom, "cannot lower the denominator by lifting");
        let k = m - self.denom;
        if k == 0 {
            return self.clone();
        }
        let r = BihomPoly::norm_sq_pow(self.n, k);
        let comps = self.comps.iter().map(|(mask, p)| (*mask, p * &r)).collect();
        PolyForm { n: self.n, degree: self.degree, denom: m, comps }
    }

    /// Cancels common factors of `|z|²` between numerators and denominator.
    pub fn reduce(&self) -> Self {
        let mut cur = self.clone();
        if cur.comps.is_empty() {
            cur.denom = 0;
            return cur;
        }
        while cur.denom > 0 {
            let mut next = BTreeMap::new();
            let mut ok = true;
            for (mask, p) in &cur.comps {
                match p.div_norm_sq() {
                    Some(q) => {
                        next.insert(*mask, q);
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                break;
            }
            cur.comps = next;
            cur.denom -= 1;
        }
        cur
    }

    fn check_compatible(&self, o: &Self) -> Result<()> {
        if self.n != o.n {
            return Err(Error::DimensionMismatch { left: self.n, right: o.n });
        }
        if self.degree != o.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, got: o.degree });
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check_compatible(o)?;
        if o.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(o.clone());
        }
        let m = self.denom.max(o.denom);
        let a = self.lift_to(m);
        let b = o.lift_to(m);
        let scale = a.max_abs().max(b.max_abs());
        let mut comps = a.comps;
        for (mask, p) in b.comps {
            let sum = match comps.get(&mask) {
                Some(q) => q.try_add(&p)?,
                None => p,
            };
            comps.insert(mask, sum);
        }
        for p in comps.values_mut() {
            p.prune(scale);
        }
        comps.retain(|_, p| !p.is_zero());
        Ok(PolyForm { n: self.n, degree: self.degree, denom: m, comps })
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.try_add(&o.neg())
    }

    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("incompatible forms in sum")
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).expect("incompatible forms in difference")
    }

    pub fn neg(&self) -> Self {
        self.scale(&S::one().neg())
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.n, self.degree);
        }
        let comps = self.comps.iter().map(|(m, p)| (*m, p.scale(c))).collect();
        PolyForm { n: self.n, degree: self.degree, denom: self.denom, comps }
    }

    /// Linear combination `Σ c_i ξ_i` of forms of one degree.
    pub fn combination(n: usize, degree: usize, terms: &[(S, &PolyForm<S>)]) -> Self {
        let m = terms.iter().map(|(_, f)| f.denom).max().unwrap_or(0);
        let mut acc: BTreeMap<Mask, BihomPoly<S>> = BTreeMap::new();
        let mut scale: f64 = 0.0;
        for (c, f) in terms {
            if c.is_zero() || f.is_zero() {
                continue;
            }
            let f = f.lift_to(m);
            for (mask, p) in f.comps {
                let p = p.scale(c);
                scale = scale.max(p.max_abs());
                match acc.get_mut(&mask) {
                    Some(q) => {
                        for ((a, b), v) in p.terms() {
                            q.add_term(*a, *b, v.clone());
                        }
                    }
                    None => {
                        acc.insert(mask, p);
                    }
                }
            }
        }
        for p in acc.values_mut() {
            p.prune(scale);
        }
        acc.retain(|_, p| !p.is_zero());
        PolyForm { n, degree, denom: m, comps: acc }
    }

    pub fn try_wedge(&self, o: &Self) -> Result<Self> {
        if self.n != o.n {
            return Err(Error::DimensionMismatch { left: self.n, right: o.n });
        }
        let degree = self.degree + o.degree;
        if degree > 2 * self.n {
            return Err(Error::DegreeOverflow(degree));
        }
        let mut acc: BTreeMap<Mask, BihomPoly<S>> = BTreeMap::new();
        let scale = self.max_abs() * o.max_abs();
        for (ma, pa) in &self.comps {
            for (mb, pb) in &o.comps {
                if ma & mb != 0 {
                    continue;
                }
                let mut prod = pa * pb;
                if wedge_sign(*ma, *mb) {
                    prod = prod.neg();
                }
                let key = ma | mb;
                match acc.get_mut(&key) {
                    Some(q) => {
                        for ((a, b), v) in prod.terms() {
                            q.add_term(*a, *b, v.clone());
                        }
                    }
                    None => {
                        acc.insert(key, prod);
                    }
                }
            }
        }
        for p in acc.values_mut() {
            p.prune(scale);
        }
        acc.retain(|_, p| !p.is_zero());
        Ok(PolyForm { n: self.n, degree, denom: self.denom + o.denom, comps: acc }.reduce())
    }

    pub fn wedge(&self, o: &Self) -> Self {
        self.try_wedge(o).expect("wedge degree overflow")
    }

    /// `ξ^k` (the constant `1` for `k = 0`).
    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::constant(self.n, S::one());
        for _ in 0..k {
            acc = acc.wedge(self);
        }
        acc
    }

    /// Multiplies by the function `f` (a 0-form).
    pub fn mul_function(&self, f: &Self) -> Self {
        assert_eq!(f.degree, 0, "multiplier must be a function");
        f.wedge(self)
    }

    /// Projection onto the `(p, q)` part.
    pub fn bidegree_part(&self, p: u32, q: u32) -> Self {
        let comps = self
            .comps
            .iter()
            .filter(|(mask, _)| mask_bidegree(self.n, **mask) == (p, q))
            .map(|(m, poly)| (*m, poly.clone()))
            .collect();
        PolyForm { n: self.n, degree: self.degree, denom: self.denom, comps }
    }

    /// Complex conjugate form.
    pub fn conj(&self) -> Self {
        let n = self.n;
        let comps = self
            .comps
            .iter()
            .map(|(mask, p)| {
                let (holo, anti) = split_mask(n, *mask);
                let new_mask = make_mask(n, &anti, &holo);
                let mut q = p.conj();
                if (holo.len() * anti.len()) % 2 == 1 {
                    q = q.neg();
                }
                (new_mask, q)
            })
            .collect();
        PolyForm { n, degree: self.degree, denom: self.denom, comps }
    }

    /// Real part `(ξ + ξ̄)/2`.
    pub fn real_part(&self) -> Self {
        self.add(&self.conj()).scale(&S::from_ratio(1, 2))
    }

    pub fn is_real(&self) -> bool {
        let d = self.sub(&self.conj());
        d.comps.values().all(|p| p.terms().values().all(|c| c.negligible(self.max_abs().max(1.0))))
    }

    /// Approximate equality (exact in rational mode).
    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        match self.try_sub(o) {
            Ok(d) => {
                if S::EXACT {
                    d.is_zero()
                } else {
                    d.max_abs() <= tol * self.max_abs().max(o.max_abs()).max(1.0)
                }
            }
            Err(_) => false,
        }
    }

    /// Exterior derivative.
    pub fn exterior_d(&self) -> Result<Self> {
        let n = self.n;
        if self.degree + 1 > 2 * n + 2 {
            return Err(Error::DegreeOverflow(self.degree + 1));
        }
        let m = self.denom as i64;
        let r2 = BihomPoly::<S>::norm_sq(n);
        let mut acc: BTreeMap<Mask, BihomPoly<S>> = BTreeMap::new();
        let scale = self.max_abs();
        for (mask, p) in &self.comps {
            for k in 0..=n {
                for (bit, kind, conj_var) in [
                    (holo_bit(k), Wirtinger::Holomorphic, BihomPoly::<S>::zbar(n, k)),
                    (anti_bit(n, k), Wirtinger::Antiholomorphic, BihomPoly::<S>::z(n, k)),
                ] {
                    if mask & bit != 0 {
                        continue;
                    }
                    // (|z|² ∂P − m · conj_var · P) / |z|^{2(m+1)}
                    let dp = p.wirtinger(k, kind);
                    let mut term = (&r2 * &dp).try_sub(&(&conj_var * p).scale(&S::from_i64(m)))?;
                    if (mask & (bit - 1)).count_ones() % 2 == 1 {
                        term = term.neg();
                    }
                    if term.is_zero() {
                        continue;
                    }
                    let key = mask | bit;
                    match acc.get_mut(&key) {
                        Some(q) => {
                            for ((a, b), v) in term.terms() {
                                q.add_term(*a, *b, v.clone());
                            }
                        }
                        None => {
                            acc.insert(key, term);
                        }
                    }
                }
            }
        }
        for p in acc.values_mut() {
            p.prune(scale);
        }
        acc.retain(|_, p| !p.is_zero());
        let out = PolyForm { n, degree: self.degree + 1, denom: self.denom + 1, comps: acc }.reduce();
        if !out.is_horizontal() {
            return Err(Error::NonHorizontalResult);
        }
        Ok(out)
    }

    pub fn d(&self) -> Self {
        self.exterior_d().expect("exterior derivative of a malformed form")
    }

    /// The almost complex structure: multiplication by `i^{p−q}` on `(p,q)` components.
    pub fn apply_j(&self, inverse: bool) -> Self {
        let n = self.n;
        let comps = self
            .comps
            .iter()
            .map(|(mask, p)| {
                let (pp, qq) = mask_bidegree(n, *mask);
                let e = pp as i32 - qq as i32;
                (*mask, p.scale(&i_power::<S>(if inverse { -e } else { e })))
            })
            .collect();
        PolyForm { n, degree: self.degree, denom: self.denom, comps }
    }

    /// `d^c = J^{-1} d J`; on functions `d^c = i(∂̄ − ∂)`, so `dd^c = 2i∂∂̄`.
    pub fn dc(&self) -> Result<Self> {
        Ok(self.apply_j(false).exterior_d()?.apply_j(true))
    }

    pub fn ddc(&self) -> Result<Self> {
        self.dc()?.exterior_d()
    }

    /// Contraction with the Euler field `Σ z_j ∂_{z_j}` (or its conjugate).
    pub fn contract_euler(&self, conjugate: bool) -> BTreeMap<Mask, BihomPoly<S>> {
        let n = self.n;
        let mut acc: BTreeMap<Mask, BihomPoly<S>> = BTreeMap::new();
        for (mask, p) in &self.comps {
            for j in 0..=n {
                let bit = if conjugate { anti_bit(n, j) } else { holo_bit(j) };
                if mask & bit == 0 {
                    continue;
                }
                let var = if conjugate { BihomPoly::zbar(n, j) } else { BihomPoly::z(n, j) };
                let mut t = &var * p;
                if (mask & (bit - 1)).count_ones() % 2 == 1 {
                    t = t.neg();
                }
                let key = mask & !bit;
                match acc.get_mut(&key) {
                    Some(q) => {
                        for ((a, b), v) in t.terms() {
                            q.add_term(*a, *b, v.clone());
                        }
                    }
                    None => {
                        acc.insert(key, t);
                    }
                }
            }
        }
        let scale = self.max_abs();
        for p in acc.values_mut() {
            p.prune(scale * 1e3);
        }
        acc.retain(|_, p| !p.is_zero());
        acc
    }

    pub fn is_horizontal(&self) -> bool {
        self.contract_euler(false).is_empty() && self.contract_euler(true).is_empty()
    }

    /// Scale invariance: every numerator has bidegree `(m − |I|, m − |J|)`.
    pub fn is_scale_invariant(&self) -> bool {
        self.comps.iter().all(|(mask, p)| {
            let (a, b) = mask_bidegree(self.n, *mask);
            p.bidegree() == (self.denom.wrapping_sub(a), self.denom.wrapping_sub(b))
        })
    }

    /// Pullback under `z = A w` for an `(n+1) × (k+1)` matrix with orthonormal columns.
    pub fn linear_pullback(&self, a: &[Vec<S>]) -> Self {
        let n = self.n;
        assert_eq!(a.len(), n + 1);
        let k = a[0].len() - 1;
        let lin: Vec<BihomPoly<S>> = a
            .iter()
            .map(|row| {
                let mut p = BihomPoly::zero(k, (1, 0));
                for (c, x) in row.iter().enumerate() {
                    p.add_term(MultiIndex::unit(c), MultiIndex::zero(), x.clone());
                }
                p
            })
            .collect();
        let mut acc: BTreeMap<Mask, BihomPoly<S>> = BTreeMap::new();
        let scale = self.max_abs();
        for (mask, p) in &self.comps {
            // pull back dz_I ∧ dz̄_J as a constant-coefficient form in w
            let mut basis: BTreeMap<Mask, S> = BTreeMap::new();
            basis.insert(0, S::one());
            for slot in 0..2 * (n + 1) {
                if mask & (1 << slot) == 0 {
                    continue;
                }
                let (row, conj) = if slot <= n { (slot, false) } else { (slot - n - 1, true) };
                let mut next: BTreeMap<Mask, S> = BTreeMap::new();
                for (cur, c) in &basis {
                    for col in 0..=k {
                        let coef = if conj { a[row][col].conj() } else { a[row][col].clone() };
                        if coef.is_zero() {
                            continue;
                        }
                        let t: Mask = if conj { 1 << (k + 1 + col) } else { 1 << col };
                        if cur & t != 0 {
                            continue;
                        }
                        let mut v = c.mul(&coef);
                        if (cur >> (t.trailing_zeros() + 1)).count_ones() % 2 == 1 {
                            v = v.neg();
                        }
                        let e = next.entry(cur | t).or_insert_with(S::zero);
                        *e = e.add(&v);
                    }
                }
                basis = next;
            }
            basis.retain(|_, c| !c.negligible(1.0));
            if basis.is_empty() {
                continue;
            }
            let sub = p.substitute_linear(&lin);
            for (tm, c) in basis {
                let t = sub.scale(&c);
                match acc.get_mut(&tm) {
                    Some(q) => {
                        for ((x, y), v) in t.terms() {
                            q.add_term(*x, *y, v.clone());
                        }
                    }
                    None => {
                        acc.insert(tm, t);
                    }
                }
            }
        }
        for p in acc.values_mut() {
            p.prune(scale);
        }
        acc.retain(|_, p| !p.is_zero());
        PolyForm { n: k, degree: self.degree, denom: self.denom, comps: acc }.reduce()
    }

    /// Restriction to the equator `Σ_σ = {p ⊥ σ}`, identified with CP^{n−1}.
    pub fn equator_pullback(&self, sigma: &ProjPoint<S>) -> Result<Self> {
        if self.n < 2 {
            return Err(Error::DimensionTooSmall(self.n));
        }
        let u = householder_to(sigma)?;
        let a: Vec<Vec<S>> = u.rows().iter().map(|r| r[1..].to_vec()).collect();
        Ok(self.linear_pullback(&a))
    }

    /// Ratio `φ` with `ξ = φ · ω_FS^n` for a top-degree form, as a 0-form.
    pub fn top_ratio(&self) -> Result<Self> {
        let n = self.n;
        if self.degree != 2 * n {
            return Err(Error::DegreeMismatch { expected: 2 * n, got: self.degree });
        }
        if self.is_zero() {
            return Ok(Self::constant(n, S::zero()));
        }
        let base = self.lift_to(self.denom.max(n as u32 + 1));
        let qdeg = base.denom - n as u32 - 1;
        let table = volume_form_table(n);
        let mut ratio: Option<BihomPoly<S>> = None;
        let scale = base.max_abs();
        let mut quotients = Vec::new();
        for (mask, (a, b), w) in table.iter() {
            let w = S::from_gq(w);
            let winv = w.inv().expect("nonzero volume coefficient");
            let num = base.comps.get(mask);
            let mut q = BihomPoly::zero(n, (qdeg, qdeg));
            if let Some(num) = num {
                for ((alpha, beta), c) in num.terms() {
                    // divide by z̄_a z_b
                    if beta.get(*a) == 0 || alpha.get(*b) == 0 {
                        if c.negligible(scale) {
                            continue;
                        }
                        return Err(Error::NotProportional);
                    }
                    let mut al = alpha.0;
                    let mut be = beta.0;
                    al[*b] -= 1;
                    be[*a] -= 1;
                    q.add_term(MultiIndex(al), MultiIndex(be), c.mul(&winv));
                }
            }
            quotients.push(q);
        }
        if base.comps.keys().any(|m| !table.iter().any(|(t, _, _)| t == m)) {
            let stray = base
                .comps
                .iter()
                .filter(|(m, _)| !table.iter().any(|(t, _, _)| t == *m))
                .map(|(_, p)| p.max_abs())
                .fold(0.0, f64::max);
            if S::EXACT || stray > 1e-9 * scale {
                return Err(Error::NotProportional);
            }
        }
        let count = quotients.len() as i64;
        for q in &quotients {
            ratio = Some(match ratio {
                None => q.clone(),
                Some(r) => r.try_add(q)?,
            });
        }
        let mut phi = ratio.expect("nonempty table").scale(&S::from_ratio(1, count));
        phi.prune(scale);
        let tol = 1e-9 * phi.max_abs().max(scale);
        for q in &quotients {
            let diff = q.try_sub(&phi)?;
            let bad = if S::EXACT { !diff.is_zero() } else { diff.max_abs() > tol };
            if bad {
                return Err(Error::NotProportional);
            }
        }
        Ok(PolyForm::function(phi)?.reduce())
    }

    /// `∫_{CP^n} ξ` normalized by `∫ ω_FS^n = 1`.
    pub fn integrate_cpn(&self) -> Result<S> {
        let phi = self.top_ratio()?;
        Ok(phi.function_numerator().sphere_integral())
    }

    /// `∫_{Σ_σ} ξ` for a form of degree `2n − 2`.
    pub fn integrate_equator(&self, sigma: &ProjPoint<S>) -> Result<S> {
        if self.degree + 2 != 2 * self.n {
            return Err(Error::DegreeMismatch { expected: 2 * self.n - 2, got: self.degree });
        }
        self.equator_pullback(sigma)?.integrate_cpn()
    }

    /// Numerator of a 0-form (zero polynomial of bidegree `(m,m)` if the form vanishes).
    pub fn function_numerator(&self) -> BihomPoly<S> {
        assert_eq!(self.degree, 0, "not a function");
        self.comps
            .get(&0)
            .cloned()
            .unwrap_or_else(|| BihomPoly::zero(self.n, (self.denom, self.denom)))
    }

    /// Value of a 0-form at a float point.
    pub fn eval_function(&self, z: &[Complex64]) -> Complex64 {
        let r2: f64 = z.iter().map(|x| x.norm_sqr()).sum();
        self.function_numerator().evaluate(z) / r2.powi(self.denom as i32)
    }

    /// Coefficients of the component `mask` at a float point (denominator included).
    pub fn eval_component(&self, mask: Mask, z: &[Complex64]) -> Complex64 {
        let r2: f64 = z.iter().map(|x| x.norm_sqr()).sum();
        match self.comps.get(&mask) {
            Some(p) => p.evaluate(z) / r2.powi(self.denom as i32),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Coordinates over the monomial basis at denominator power `m`.
    pub fn coords_at(&self, m: u32) -> BTreeMap<CoordKey, S> {
        let lifted = self.lift_to(m);
        let mut out = BTreeMap::new();
        for (mask, p) in &lifted.comps {
            for ((a, b), c) in p.terms() {
                out.insert((*mask, *a, *b), c.clone());
            }
        }
        out
    }

    /// Torus weight `α − β + 1_I − 1_J` of one coordinate.
    pub fn weight_of(n: usize, key: &CoordKey) -> Vec<i16> {
        let (mask, a, b) = key;
        (0..=n)
            .map(|j| {
                a.get(j) as i16 - b.get(j) as i16 + ((mask >> j) & 1) as i16
                    - ((mask >> (n + 1 + j)) & 1) as i16
            })
            .collect()
    }

    /// Splits into components of pure torus weight.
    pub fn weight_components(&self) -> BTreeMap<Vec<i16>, Self> {
        let mut out: BTreeMap<Vec<i16>, Self> = BTreeMap::new();
        for (mask, p) in &self.comps {
            for ((a, b), c) in p.terms() {
                let w = Self::weight_of(self.n, &(*mask, *a, *b));
                let f = out.entry(w).or_insert_with(|| PolyForm {
                    n: self.n,
                    degree: self.degree,
                    denom: self.denom,
                    comps: BTreeMap::new(),
                });
                f.comps
                    .entry(*mask)
                    .or_insert_with(|| BihomPoly::zero(self.n, p.bidegree()))
                    .add_term(*a, *b, c.clone());
            }
        }
        out
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PolyForm<T> {
        let comps = self.comps.iter().map(|(m, p)| (*m, p.map_scalar(&f))).collect();
        PolyForm { n: self.n, degree: self.degree, denom: self.denom, comps }
    }

    pub fn to_float(&self) -> PolyForm<Complex64> {
        self.map_scalar(|c| c.to_c64())
    }

    /// Matrix `h_jk(z)` of a (1,1)-form `i Σ h_jk dz_j ∧ dz̄_k`.
    pub fn hermitian_matrix_at(&self, z: &[Complex64]) -> Vec<Vec<Complex64>> {
        let n = self.n;
        let mi = Complex64::new(0.0, -1.0);
        (0..=n)
            .map(|j| (0..=n).map(|k| self.eval_component(make_mask(n, &[j], &[k]), z) * mi).collect())
            .collect()
    }
}

/// The Fubini–Study form `i Σ (|z|²δ_jk − z̄_j z_k)/|z|⁴ dz_j ∧ dz̄_k`, normalized by `∫ω^n = 1`.
pub fn fubini_study_form<S: Scalar>(n: usize) -> PolyForm<S> {
    let mut comps = Vec::new();
    for j in 0..=n {
        for k in 0..=n {
            let mut p = BihomPoly::zero(n, (1, 1));
            if j == k {
                for l in 0..=n {
                    if l != j {
                        p.add_term(MultiIndex::unit(l), MultiIndex::unit(l), S::i());
                    }
                }
            } else {
                p.add_term(MultiIndex::unit(k), MultiIndex::unit(j), S::i().neg());
            }
            comps.push((make_mask(n, &[j], &[k]), p));
        }
    }
    PolyForm::from_components(n, 2, 2, comps).expect("well-formed")
}

type VolumeTable = Vec<(Mask, (usize, usize), Gq)>;

/// Components of `ω_FS^n = Σ w_ab z̄_a z_b / |z|^{2(n+1)} dz_{≠a} ∧ dz̄_{≠b}`.
fn volume_form_table(n: usize) -> std::sync::Arc<VolumeTable> {
    static CACHE: OnceLock<Mutex<HashMap<usize, std::sync::Arc<VolumeTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("cache lock").get(&n) {
        return t.clone();
    }
    let omega = fubini_study_form::<Gq>(n).pow(n);
    assert_eq!(omega.denom, n as u32 + 1, "volume form reduces to denominator n+1");
    let all: Vec<usize> = (0..=n).collect();
    let mut table = Vec::new();
    for a in 0..=n {
        for b in 0..=n {
            let holo: Vec<usize> = all.iter().copied().filter(|&j| j != b).collect();
            let anti: Vec<usize> = all.iter().copied().filter(|&j| j != a).collect();
            // component dz_{≠b} ∧ dz̄_{≠a} has numerator w · z_b z̄_a
            let mask = make_mask(n, &holo, &anti);
            let p = omega.comps.get(&mask).expect("all top components present");
            assert_eq!(p.len(), 1);
            let ((alpha, beta), w) = p.terms().iter().next().expect("one term");
            assert_eq!((*alpha, *beta), (MultiIndex::unit(b), MultiIndex::unit(a)));
            table.push((mask, (a, b), w.clone()));
        }
    }
    assert_eq!(table.len(), omega.comps.len());
    let t = std::sync::Arc::new(table);
    cache.lock().expect("cache lock").insert(n, t.clone());
    t
}

/// Canonical JSON form of a [`PolyForm`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyFormJson {
    pub n: usize,
    pub degree: usize,
    pub denom_power: u32,
    pub mode: String,
    pub components: Vec<ComponentJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub holo: Vec<usize>,
    pub anti: Vec<usize>,
    /// `[α, β, re, im]`
    pub terms: Vec<(Vec<u8>, Vec<u8>, serde_json::Value, serde_json::Value)>,
}

impl<S: Scalar> PolyForm<S> {
    pub fn to_json(&self) -> PolyFormJson {
        let components = self
            .comps
            .iter()
            .map(|(mask, p)| {
                let (holo, anti) = split_mask(self.n, *mask);
                let terms = p
                    .terms()
                    .iter()
                    .map(|((a, b), c)| {
                        let (re, im) = c.to_json_parts();
                        (a.as_vec(self.n + 1), b.as_vec(self.n + 1), re, im)
                    })
                    .collect();
                ComponentJson { holo, anti, terms }
            })
            .collect();
        PolyFormJson {
            n: self.n,
            degree: self.degree,
            denom_power: self.denom,
            mode: if S::EXACT { "exact" } else { "float" }.to_string(),
            components,
        }
    }

    pub fn from_json(j: &PolyFormJson) -> Result<Self> {
        let n = j.n;
        let mut comps = Vec::new();
        for c in &j.components {
            let mask = make_mask(n, &c.holo, &c.anti);
            let (pi, qj) = mask_bidegree(n, mask);
            let mut p = BihomPoly::zero(n, (j.denom_power.wrapping_sub(pi), j.denom_power.wrapping_sub(qj)));
            for (a, b, re, im) in &c.terms {
                let v = S::from_json_parts(re, im)
                    .ok_or_else(|| Error::Serialization(format!("bad coefficient {re} {im}")))?;
                let (a, b) = (MultiIndex::from_slice(a), MultiIndex::from_slice(b));
                if (a.degree(), b.degree()) != p.bidegree() {
                    return Err(Error::MalformedForm("term bidegree".into()));
                }
                p.add_term(a, b, v);
            }
            comps.push((mask, p));
        }
        Self::from_components(n, j.degree, j.denom_power, comps)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: PolyFormJson = serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
        Self::from_json(&j)
    }
}
