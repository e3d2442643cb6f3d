//! Radon transform over the equators `Σ_σ`, its dual, the zero-average
//! transform, the integral geometric formula and injectivity evidence.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::ambient::{householder_to, rational_real_grid, unit_point, ProjPoint};
use crate::error::{Error, Result};
use crate::forms::{fubini_study_form, PolyForm};
use crate::linalg;
use crate::polyalg::{sphere_moment, BihomPoly, MultiIndex};
use crate::quadrature::CpnQuadrature;
use crate::scalar::{Gq, Scalar};

/// Average of the function `f` over `Σ_σ` for the Fubini–Study area.
///
/// The Fubini–Study form restricts to the Fubini–Study form of the equator,
/// so only the numerator of `f` has to be pulled back.
pub fn radon_fn<S: Scalar>(f: &PolyForm<S>, sigma: &ProjPoint<S>) -> Result<S> {
    if f.degree() != 0 {
        return Err(Error::DegreeMismatch { expected: 0, got: f.degree() });
    }
    let n = f.n();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let u = householder_to(sigma)?;
    let lin: Vec<BihomPoly<S>> = u
        .rows()
        .iter()
        .map(|row| {
            let mut p = BihomPoly::zero(n - 1, (1, 0));
            for (c, x) in row[1..].iter().enumerate() {
                p.add_term(MultiIndex::unit(c), MultiIndex::zero(), x.clone());
            }
            p
        })
        .collect();
    Ok(f.function_numerator().substitute_linear(&lin).sphere_integral())
}

/// `R(ξ)(σ) = ∫_{Σ_σ} ξ` for a `(2n−2)`-form.
pub fn radon_form<S: Scalar>(xi: &PolyForm<S>, sigma: &ProjPoint<S>) -> Result<S> {
    xi.integrate_equator(sigma)
}

/// Average of `f` over the dual equator `Ξ_p = {σ : σ ⊥ p}`.
///
/// The incidence relation is symmetric, so this is the same equator average
/// taken in the parameter copy of CP^n; the normalization gives `R*(1) = 1`.
pub fn dual_radon<S: Scalar>(f: &PolyForm<S>, p: &ProjPoint<S>) -> Result<S> {
    radon_fn(f, p)
}

/// `R̊(ξ)(σ) = R(ξ − (∫ξ∧ω_FS) ω_FS^{n−1})(σ)`.
pub fn zero_avg_radon<S: Scalar>(xi: &PolyForm<S>, sigma: &ProjPoint<S>) -> Result<S> {
    let n = xi.n();
    let w = fubini_study_form::<S>(n);
    let avg = xi.wedge(&w).integrate_cpn()?;
    // R(ω_FS^{n−1}) ≡ 1
    Ok(radon_form(xi, sigma)?.sub(&avg))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IgfReport {
    /// σ-average of `R(ξ)`.
    pub sigma_average: f64,
    /// `∫ ξ ∧ ω_FS`.
    pub cpn_integral: f64,
    pub residual: f64,
    pub exact: bool,
    /// Interpolation nodes (exact) or simplex quadrature nodes (float).
    pub nodes: usize,
}

/// σ-average of a torus-invariant polynomial function of `σ`, given by exact evaluations.
///
/// The function is a homogeneous polynomial of degree `k` in `|σ_j|²` on the
/// sphere; it is interpolated on a rational real grid, checked on extra
/// nodes, and integrated with the sphere moments.
pub fn exact_sigma_average<F>(n: usize, k: u32, seed: u64, mut eval: F) -> Result<(Gq, usize)>
where
    F: FnMut(&ProjPoint<Gq>) -> Result<Gq>,
{
    let monos = MultiIndex::all_of_degree(n + 1, k);
    let extra = 3;
    let grid = rational_real_grid(n, monos.len() + extra, seed);
    let mut rows = Vec::with_capacity(grid.len());
    let mut rhs = Vec::with_capacity(grid.len());
    for p in &grid {
        let s: Vec<Gq> = p.coords().iter().map(|c| c.mul(&c.conj())).collect();
        let row: Vec<Gq> = monos
            .iter()
            .map(|g| {
                let mut v = Gq::one();
                for (j, sj) in s.iter().enumerate() {
                    for _ in 0..g.get(j) {
                        v = v.mul(sj);
                    }
                }
                v
            })
            .collect();
        rows.push(row);
        rhs.push(eval(p)?);
    }
    if linalg::rank(&rows, monos.len()) < monos.len() {
        return Err(Error::GridTooSmall { grid: grid.len(), basis: monos.len() });
    }
    let coef = linalg::solve(&rows, &rhs).ok_or(Error::InconsistentAreas(f64::NAN))?;
    let mut avg = Gq::zero();
    for (c, g) in coef.iter().zip(&monos) {
        let (num, den) = sphere_moment(n, g);
        avg = avg.add(&c.mul(&Gq::frac(num, 0, den)));
    }
    Ok((avg, grid.len()))
}

/// Integral geometric formula: σ-average of `R(ξ)` against `∫ ξ ∧ ω_FS`.
///
/// Only the torus-invariant part of `ξ` contributes to the σ-average. Exact mode
/// integrates it by interpolation, float mode by a simplex rule exact for its degree.
pub fn igf_check<S: Scalar>(xi: &PolyForm<S>) -> Result<IgfReport> {
    let n = xi.n();
    if xi.degree() + 2 != 2 * n {
        return Err(Error::DegreeMismatch { expected: 2 * n - 2, got: xi.degree() });
    }
    let rhs = xi.wedge(&fubini_study_form(n)).integrate_cpn()?;
    if S::EXACT {
        let zero = vec![0i16; n + 1];
        let xi0 = xi.weight_components().remove(&zero).unwrap_or_else(|| PolyForm::zero(n, xi.degree()));
        let xi0: PolyForm<Gq> = xi0.map_scalar(|c| c.to_gq());
        let k = xi0.denom_power();
        let (avg, nodes) = exact_sigma_average(n, k, 0x1f, |s| xi0.integrate_equator(s))?;
        let rhs_q = rhs.to_gq();
        let res = avg.sub(&rhs_q);
        return Ok(IgfReport {
            sigma_average: avg.re_f64(),
            cpn_integral: rhs_q.re_f64(),
            residual: res.abs_f64(),
            exact: res.is_zero(),
            nodes,
        });
    }
    // non-invariant weight components average to zero
    let zero = vec![0i16; n + 1];
    let xf = xi.to_float().weight_components().remove(&zero).unwrap_or_else(|| PolyForm::zero(n, xi.degree()));
    let quad = CpnQuadrature::torus_invariant(n, xf.denom_power());
    let mut avg = Complex64::new(0.0, 0.0);
    for (z, w) in quad.points.iter().zip(&quad.weights) {
        let s = unit_point(z.clone())?;
        avg += xf.integrate_equator(&s)? * *w;
    }
    let r = rhs.to_c64();
    Ok(IgfReport {
        sigma_average: avg.re,
        cpn_integral: r.re,
        residual: (avg - r).norm(),
        exact: false,
        nodes: quad.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RadonGram {
    pub n: usize,
    pub degree: u32,
    pub labels: Vec<String>,
    pub grid_size: usize,
    /// L² Gram matrix `∫ R(b_i) R(b_j)` of the zero-average basis.
    pub gram: Vec<Vec<f64>>,
    /// Singular values of the quadrature-weighted transform matrix, descending.
    pub singular_values: Vec<f64>,
    pub min_singular_value: f64,
}

impl RadonGram {
    /// CSV with one row per basis element: index, label, singular value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,label,singular_value\n");
        for (i, label) in self.labels.iter().enumerate() {
            let sv = self.singular_values.get(i).copied().unwrap_or(0.0);
            let _ = writeln!(out, "{},{},{:.17e}", i, label, sv);
        }
        out
    }
}

/// Real monomial functions of bidegree `(d, d)`: `|z^α|²`, `Re z^α z̄^β`, `Im z^α z̄^β` (α < β).
pub fn real_function_basis(n: usize, d: u32) -> Vec<(String, BihomPoly<Complex64>)> {
    let monos = MultiIndex::all_of_degree(n + 1, d);
    let fmt = |m: &MultiIndex| m.as_vec(n + 1).iter().map(|e| e.to_string()).collect::<Vec<_>>().join("");
    let mut out = Vec::new();
    for (i, a) in monos.iter().enumerate() {
        for b in &monos[i..] {
            if a == b {
                out.push((
                    format!("abs{}", fmt(a)),
                    BihomPoly::monomial(n, *a, *a, Complex64::new(1.0, 0.0)),
                ));
            } else {
                let p = BihomPoly::monomial(n, *a, *b, Complex64::new(0.5, 0.0));
                out.push((format!("re{}_{}", fmt(a), fmt(b)), &p + &p.conj()));
                let q = BihomPoly::monomial(n, *a, *b, Complex64::new(0.0, -0.5));
                out.push((format!("im{}_{}", fmt(a), fmt(b)), &q + &q.conj()));
            }
        }
    }
    out
}

/// Evidence that `R` is injective on zero-average functions of bidegree `(d,d)`.
pub fn radon_injectivity(n: usize, d: u32) -> Result<RadonGram> {
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let mut basis = real_function_basis(n, d);
    // the last diagonal monomial is dependent on the others modulo constants
    let last_diag = basis.iter().rposition(|(l, _)| l.starts_with("abs")).expect("diagonal present");
    basis.remove(last_diag);
    let quad = CpnQuadrature::new(n, 2 * d);
    if quad.len() < basis.len() {
        return Err(Error::GridTooSmall { grid: quad.len(), basis: basis.len() });
    }
    let funcs: Vec<PolyForm<Complex64>> = basis
        .iter()
        .map(|(_, p)| {
            let avg = p.sphere_integral();
            let centered = p.try_sub(&BihomPoly::norm_sq_pow(n, d).scale(&avg)).expect("same bidegree");
            PolyForm::function(centered).expect("function")
        })
        .collect();
    let mut m = DMatrix::<f64>::zeros(quad.len(), funcs.len());
    for (r, (z, w)) in quad.points.iter().zip(&quad.weights).enumerate() {
        let s = unit_point(z.clone())?;
        for (c, f) in funcs.iter().enumerate() {
            m[(r, c)] = radon_fn(f, &s)?.re * w.sqrt();
        }
    }
    let gram = m.transpose() * &m;
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let min = sv.last().copied().unwrap_or(0.0);
    Ok(RadonGram {
        n,
        degree: d,
        labels: basis.into_iter().map(|(l, _)| l).collect(),
        grid_size: quad.len(),
        gram: (0..gram.nrows()).map(|i| gram.row(i).iter().copied().collect()).collect(),
        singular_values: sv,
        min_singular_value: min,
    })
}
