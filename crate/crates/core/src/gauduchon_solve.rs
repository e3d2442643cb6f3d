//! Galerkin solvers: the Gauduchon conformal factor, the measure `ψ` with
//! `R*_g ψ = 1`, and the two inequalities comparing a metric with its
//! Gauduchon representative and with Fubini–Study.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::ambient::{householder_to, sample_sigma, unit_point, ProjPoint};
use crate::error::{Error, Result};
use crate::fixtures::function;
use crate::forms::PolyForm;
use crate::hermitian::{factorial, HermitianMetric};
use crate::linalg;
use crate::polyalg::{BihomPoly, MultiIndex};
use crate::quadrature::CpnQuadrature;
use crate::radon::real_function_basis;
use crate::scalar::{Gq, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coefficient {
    pub label: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GalerkinReport {
    pub problem: String,
    pub n: usize,
    pub degree: u32,
    pub basis_size: usize,
    /// Relative residual of the discrete system.
    pub residual: f64,
    /// `true` when the discrete system was solved in exact arithmetic.
    pub exact: bool,
    pub coefficients: Vec<Coefficient>,
    pub positivity_samples: usize,
    pub min_value: f64,
    /// Factor applied to the returned function to reach the normalization.
    pub normalization: f64,
    /// Sampled size of the strong-form residual, where one is defined.
    pub strong_residual: f64,
    /// `‖φ − 1‖_{L²}` of the normalized solution.
    pub deviation_from_one: f64,
    /// Error of the polynomial fit of `φ^{1/(n−1)}` (zero when no fit was needed).
    pub fit_error: f64,
}

impl GalerkinReport {
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

fn mono_label(n: usize, a: &MultiIndex, b: &MultiIndex) -> String {
    let f = |m: &MultiIndex| m.as_vec(n + 1).iter().map(|e| e.to_string()).collect::<String>();
    format!("z{}_zb{}", f(a), f(b))
}

/// Complex monomial functions `z^α z̄^β / |z|^{2d}`; they span all functions of degree `≤ d`.
fn monomial_functions(n: usize, d: u32) -> Vec<(String, PolyForm<Gq>)> {
    let monos = MultiIndex::all_of_degree(n + 1, d);
    let mut out = Vec::new();
    for a in &monos {
        for b in &monos {
            out.push((mono_label(n, a, b), function(BihomPoly::monomial(n, *a, *b, Gq::one()))));
        }
    }
    out
}

const POSITIVITY_SAMPLES: usize = 2000;

/// Minimum of a real function over the coordinate points and uniform samples.
fn sampled_minimum(f: &PolyForm<Complex64>, scale: f64, seed: u64) -> (f64, Vec<(f64, f64)>, usize) {
    let n = f.n();
    let mut pts: Vec<Vec<Complex64>> = (0..=n).map(|j| ProjPoint::<Complex64>::basis(n, j).coords().to_vec()).collect();
    pts.extend(sample_sigma(n, POSITIVITY_SAMPLES, seed).into_iter().map(|p| p.coords().to_vec()));
    let mut best = (f64::INFINITY, Vec::new());
    for z in &pts {
        let v = f.eval_function(z).re * scale;
        if v < best.0 {
            best = (v, z.iter().map(|c| (c.re, c.im)).collect());
        }
    }
    (best.0, best.1, pts.len())
}

#[derive(Clone, Debug)]
pub struct GauduchonProjection {
    /// Exact solution of the discrete system; the normalized factor is `report.normalization · phi`.
    pub phi: PolyForm<Gq>,
    /// `φ^{1/(n−1)} ω`, up to the constant normalization (a homothety).
    pub g_hat: HermitianMetric<Gq>,
    pub report: GalerkinReport,
}

/// Conformal factor `φ` with `dd^c(φ ω^{n−1}) = 0`, from the weak system
/// `∫ dd^c ψ_i ∧ φ ω^{n−1} = 0` over functions of degree `≤ d`.
///
/// The constant test function gives an exactly dependent row, so the square
/// system always has a nontrivial kernel; it is computed exactly.
pub fn gauduchon_projection(g: &HermitianMetric<Gq>, d: u32) -> Result<GauduchonProjection> {
    let n = g.n();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let basis = monomial_functions(n, d);
    let wnm1 = g.omega_pow(n - 1);
    // T_j = top ratio of dd^c(b_j ω^{n−1})
    let images: Vec<BihomPoly<Gq>> = basis
        .iter()
        .map(|(_, b)| {
            let t = wnm1.mul_function(b).ddc()?.top_ratio()?;
            Ok(t.function_numerator())
        })
        .collect::<Result<_>>()?;
    let m = images.iter().map(|p| p.bidegree().0).max().unwrap_or(0);
    let images: Vec<BihomPoly<Gq>> = images
        .into_iter()
        .map(|p| if p.is_zero() { BihomPoly::zero(n, (m, m)) } else { p.lift(m - p.bidegree().0) })
        .collect();
    let k = basis.len();
    let mut a = vec![vec![Gq::zero(); k]; k];
    for (i, (_, psi)) in basis.iter().enumerate() {
        let p = psi.function_numerator();
        for (j, t) in images.iter().enumerate() {
            if !t.is_zero() {
                a[i][j] = (&p * t).sphere_integral();
            }
        }
    }
    let null = linalg::nullspace(&a, k);
    if null.len() != 1 {
        return Err(Error::IllConditioned(null.len() as f64));
    }
    let c = &null[0];
    // make the solution real: divide by a coefficient of some |z^α|² monomial
    let monos = MultiIndex::all_of_degree(n + 1, d);
    let nm = monos.len();
    let pivot = (0..nm).map(|i| i * nm + i).find(|&idx| !c[idx].is_zero());
    let scale = match pivot {
        Some(idx) => c[idx].inv().expect("nonzero"),
        None => return Err(Error::IllConditioned(f64::INFINITY)),
    };
    let terms: Vec<(Gq, &PolyForm<Gq>)> =
        c.iter().zip(&basis).filter(|(x, _)| !x.is_zero()).map(|(x, (_, b))| (x.mul(&scale), b)).collect();
    let mut phi = PolyForm::combination(n, 0, &terms).reduce();
    if !phi.is_real() {
        return Err(Error::IllConditioned(f64::INFINITY));
    }
    let mut e0 = vec![Gq::zero(); n + 1];
    e0[0] = Gq::one();
    let at_e0 = phi.function_numerator().evaluate_exact(&e0);
    let sign = if at_e0.is_zero() { phi.function_numerator().sphere_integral().sign_re() } else { at_e0.sign_re() };
    if sign < 0 {
        phi = phi.neg();
    }
    let num = phi.function_numerator();
    let mean = num.sphere_integral();
    let sq = (&num * &num).sphere_integral();
    let mut normalization = 1.0 / sq.re_f64().sqrt();
    if let Some(s) = Gq::one().div(&sq).and_then(|x| x.sqrt_real()) {
        phi = phi.scale(&s);
        normalization = 1.0;
    }
    let phi_f = phi.to_float();
    let (min_value, witness, samples) = sampled_minimum(&phi_f, normalization, 3);
    if min_value <= 0.0 {
        return Err(Error::NotPositiveSolution { witness, value: min_value });
    }
    let mean_n = if normalization == 1.0 { phi.function_numerator().sphere_integral().re_f64() } else { mean.re_f64() * normalization };
    let deviation = (2.0 - 2.0 * mean_n).max(0.0).sqrt();
    let strong = wnm1.mul_function(&phi).ddc()?.top_ratio()?.to_float();
    let strong_residual = sample_sigma(n, 200, 9)
        .iter()
        .map(|s| strong.eval_function(s.coords()).norm() * normalization)
        .fold(0.0, f64::max);
    let (factor, fit_error) = conformal_power(&phi, n - 1, d)?;
    let g_hat = if factor.is_zero() { g.clone() } else { HermitianMetric::new(g.omega().mul_function(&factor))? };
    let coefficients = c
        .iter()
        .zip(&basis)
        .filter(|(x, _)| !x.is_zero())
        .map(|(x, (l, _))| {
            let v = x.mul(&scale).to_c64() * if sign < 0 { -1.0 } else { 1.0 };
            Coefficient { label: l.clone(), re: v.re, im: v.im }
        })
        .collect();
    let report = GalerkinReport {
        problem: "gauduchon-projection".into(),
        n,
        degree: d,
        basis_size: k,
        residual: 0.0,
        exact: true,
        coefficients,
        positivity_samples: samples,
        min_value,
        normalization,
        strong_residual,
        deviation_from_one: deviation,
        fit_error,
    };
    Ok(GauduchonProjection { phi, g_hat, report })
}

/// `φ^{1/k}` as a function: exact for `k = 1` or constant `φ` (zero form
/// signals "unchanged"), otherwise a least-squares fit in the degree-`d` basis.
fn conformal_power(phi: &PolyForm<Gq>, k: usize, d: u32) -> Result<(PolyForm<Gq>, f64)> {
    let n = phi.n();
    if phi.function_numerator().as_norm_power_multiple().is_some() {
        return Ok((PolyForm::zero(n, 0), 0.0));
    }
    if k == 1 {
        return Ok((phi.clone(), 0.0));
    }
    let basis = real_function_basis(n, d);
    let quad = CpnQuadrature::new(n, 2 * d + 4);
    let pf = phi.to_float();
    let rows = quad.len();
    let mut a = DMatrix::<f64>::zeros(rows, basis.len());
    let mut b = DVector::<f64>::zeros(rows);
    for (r, (z, w)) in quad.points.iter().zip(&quad.weights).enumerate() {
        let sw = w.sqrt();
        for (c, (_, p)) in basis.iter().enumerate() {
            a[(r, c)] = p.evaluate(z).re * sw;
        }
        b[r] = pf.eval_function(z).re.max(0.0).powf(1.0 / k as f64) * sw;
    }
    let x = linalg::lstsq(&a, &b);
    let mut num = BihomPoly::<Gq>::zero(n, (d, d));
    for (coef, (_, p)) in x.iter().zip(&basis) {
        for ((al, be), c) in p.terms() {
            num.add_term(*al, *be, Gq::from_c64(*c * *coef));
        }
    }
    let fit = function(num);
    let ff = fit.to_float();
    let err = sample_sigma(n, 500, 21)
        .iter()
        .map(|s| {
            let z = s.coords();
            (ff.eval_function(z).re - pf.eval_function(z).re.powf(1.0 / k as f64)).abs()
        })
        .fold(0.0, f64::max);
    Ok((fit, err))
}

/// `‖φ − 1‖_{L²}` table and residuals for a range of degrees, as CSV.
pub fn projection_convergence(g: &HermitianMetric<Gq>, degrees: &[u32]) -> Result<String> {
    let mut out = String::from("degree,basis_size,residual,strong_residual,deviation_from_one,min_value\n");
    for &d in degrees {
        let r = gauduchon_projection(g, d)?.report;
        let _ = writeln!(
            out,
            "{},{},{:.6e},{:.6e},{:.12e},{:.12e}",
            d, r.basis_size, r.residual, r.strong_residual, r.deviation_from_one, r.min_value
        );
    }
    Ok(out)
}

/// Area-weighted equator averages `⨍_{Σ_σ} f_i dA_g` of the test numerators at `σ`.
fn equator_averages(
    omega_nm1: &PolyForm<Complex64>,
    tests: &[BihomPoly<Complex64>],
    sigma: &ProjPoint<Complex64>,
) -> Result<Vec<f64>> {
    let n = omega_nm1.n();
    let u = householder_to(sigma)?;
    let a: Vec<Vec<Complex64>> = u.rows().iter().map(|r| r[1..].to_vec()).collect();
    let h = omega_nm1.linear_pullback(&a).top_ratio()?.function_numerator();
    let area = h.sphere_integral().re;
    let lin: Vec<BihomPoly<Complex64>> = a
        .iter()
        .map(|row| {
            let mut p = BihomPoly::zero(n - 1, (1, 0));
            for (c, x) in row.iter().enumerate() {
                p.add_term(MultiIndex::unit(c), MultiIndex::zero(), *x);
            }
            p
        })
        .collect();
    Ok(tests.iter().map(|t| (&t.substitute_linear(&lin) * &h).sphere_integral().re / area).collect())
}

/// Density `ψ` (on the parameter space, against the Fubini–Study measure)
/// with `∫ ψ(σ) ⨍_{Σ_σ} f dA_g dσ = ⨍ f dVol_g` for all `f` of degree `≤ d`,
/// the weak form of `R*_g ψ = 1`.
pub fn igf_measure_solve(g: &HermitianMetric<Gq>, d: u32) -> Result<(PolyForm<Complex64>, GalerkinReport)> {
    let n = g.n();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let basis = real_function_basis(n, d);
    let tests: Vec<BihomPoly<Complex64>> = basis.iter().map(|(_, p)| p.clone()).collect();
    let wnm1 = g.omega_pow(n - 1).to_float();
    let wn = g.omega_pow(n);
    let vol = wn.integrate_cpn()?.re_f64();
    let rhs: Vec<f64> = basis
        .iter()
        .map(|(_, p)| {
            let f = PolyForm::function(p.clone()).expect("function");
            Ok(wn.to_float().mul_function(&f).integrate_cpn()?.re / vol)
        })
        .collect::<Result<_>>()?;
    let quad = CpnQuadrature::new(n, 2 * d + wnm1.denom_power() + 2);
    let k = basis.len();
    let mut mat = DMatrix::<f64>::zeros(k, k);
    let mut avgs_at = Vec::with_capacity(quad.len());
    for (z, w) in quad.points.iter().zip(&quad.weights) {
        let s = unit_point(z.clone())?;
        let avgs = equator_averages(&wnm1, &tests, &s)?;
        let bvals: Vec<f64> = tests.iter().map(|p| p.evaluate(z).re).collect();
        for i in 0..k {
            for j in 0..k {
                mat[(i, j)] += w * avgs[i] * bvals[j];
            }
        }
        avgs_at.push(avgs);
    }
    let sv = mat.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if smin <= 1e-12 * smax {
        return Err(Error::IllConditioned(smax / smin.max(f64::MIN_POSITIVE)));
    }
    let v = DVector::from_vec(rhs.clone());
    let c = linalg::lstsq(&mat, &v);
    let residual = (&mat * &c - &v).norm() / v.norm();
    let mut num = BihomPoly::<Complex64>::zero(n, (d, d));
    for (x, p) in c.iter().zip(&tests) {
        for ((a, b), y) in p.terms() {
            num.add_term(*a, *b, *y * *x);
        }
    }
    num.prune(1.0);
    let psi = PolyForm::function(num).expect("function");
    let (min_value, witness, samples) = sampled_minimum(&psi, 1.0, 5);
    if min_value <= 0.0 {
        return Err(Error::NotPositiveSolution { witness, value: min_value });
    }
    let psi_num = psi.function_numerator();
    let mean = psi_num.sphere_integral().re;
    let sq = (&psi_num * &psi_num.conj()).sphere_integral().re;
    let deviation = (sq - 2.0 * mean + 1.0).max(0.0).sqrt();
    let coefficients =
        basis.iter().zip(c.iter()).map(|((l, _), x)| Coefficient { label: l.clone(), re: *x, im: 0.0 }).collect();
    let report = GalerkinReport {
        problem: "igf-measure".into(),
        n,
        degree: d,
        basis_size: k,
        residual,
        exact: false,
        coefficients,
        positivity_samples: samples,
        min_value,
        normalization: 1.0,
        strong_residual: residual,
        deviation_from_one: deviation,
        fit_error: 0.0,
    };
    Ok((psi, report))
}

/// `|∫ ψ ⨍_{Σ_σ} f dA_g − ⨍ f dVol_g|` for one test function `f` of degree `≤ d`.
pub fn igf_identity_residual(g: &HermitianMetric<Gq>, psi: &PolyForm<Complex64>, f: &BihomPoly<Complex64>) -> Result<f64> {
    let n = g.n();
    let wnm1 = g.omega_pow(n - 1).to_float();
    let wn = g.omega_pow(n).to_float();
    let vol = wn.integrate_cpn()?.re;
    let ff = PolyForm::function(f.clone())?;
    let rhs = wn.mul_function(&ff).integrate_cpn()?.re / vol;
    let degree = psi.denom_power() + f.bidegree().0 + wnm1.denom_power() + 2;
    let quad = CpnQuadrature::new(n, degree);
    let mut lhs = 0.0;
    for (z, w) in quad.points.iter().zip(&quad.weights) {
        let s = unit_point(z.clone())?;
        let avg = equator_averages(&wnm1, std::slice::from_ref(f), &s)?[0];
        lhs += w * psi.eval_function(z).re * avg;
    }
    Ok((lhs - rhs).abs())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarginReport {
    /// Upper bound for `ρ(g)`: the least sampled `M_σ(g)`.
    pub rho_g_upper: f64,
    /// `ρ(Π_G g)`, evaluated as the mean functional (equal to `ρ` on Gauduchon metrics).
    pub rho_pi_g: f64,
    pub rho_fs: f64,
    /// `ρ(Π_G g) − ρ_upper(g)`
    pub margin_a: f64,
    /// `ρ(Π_G g) − ρ(g_FS)`
    pub margin_b: f64,
    pub inequality_a_holds: bool,
    pub inequality_b_holds: bool,
    /// Spread of `M_σ(Π_G g)` over the σ samples (zero for an exact Gauduchon representative).
    pub projection_area_spread: f64,
    pub sigma_samples: usize,
    pub projection: GalerkinReport,
}

pub const MARGIN_TOL: f64 = 1e-10;

/// Both inequalities for `g` and its Gauduchon representative.
///
/// `ρ(g)` is replaced by the minimum of `M_σ(g)` over sampled σ, which is an
/// upper bound; a non-negative margin for it implies the inequality for `ρ(g)`.
pub fn theorem_e_check(g: &HermitianMetric<Gq>, d: u32, sigma_samples: usize, seed: u64) -> Result<MarginReport> {
    let n = g.n();
    let proj = gauduchon_projection(g, d)?;
    let rho_g_upper = g.rho_upper_bound(sigma_samples, seed)?.value;
    let gh = &proj.g_hat;
    let rho_pi_g = gh.mean_functional()?;
    let rho_fs = (factorial(n) as f64).powf((n as f64 - 1.0) / n as f64) / factorial(n - 1) as f64;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in sample_sigma(n, sigma_samples.min(100), seed ^ 0x55) {
        let v = gh.m_sigma_f(&s)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let margin_a = rho_pi_g - rho_g_upper;
    let margin_b = rho_pi_g - rho_fs;
    Ok(MarginReport {
        rho_g_upper,
        rho_pi_g,
        rho_fs,
        margin_a,
        margin_b,
        inequality_a_holds: margin_a >= -MARGIN_TOL,
        inequality_b_holds: margin_b >= -MARGIN_TOL,
        projection_area_spread: hi - lo,
        sigma_samples,
        projection: proj.report,
    })
}
