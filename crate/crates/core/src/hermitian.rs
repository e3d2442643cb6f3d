//! Hermitian metrics on CP^n through their fundamental forms, and the
//! area, volume and systolic functionals built from them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ambient::{householder_to, rational_sigma_grid, sample_sigma, unit_point, ProjPoint};
use crate::error::{Error, Result};
use crate::forms::{fubini_study_form, mask_bidegree, PolyForm};
use crate::quadrature::CpnQuadrature;
use crate::scalar::Scalar;

pub fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

/// Relative tolerance used for float-mode identities.
pub const FLOAT_IDENTITY_TOL: f64 = 1e-10;

/// `true` if the form vanishes (exactly, or to float tolerance relative to `scale`).
pub fn form_vanishes<S: Scalar>(f: &PolyForm<S>, scale: f64) -> bool {
    if S::EXACT {
        f.is_zero()
    } else {
        f.max_abs() <= FLOAT_IDENTITY_TOL * scale.max(1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityCertificate {
    pub samples: usize,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricClass {
    Kahler,
    BalancedOnly,
    GauduchonOnly,
    None,
}

impl MetricClass {
    pub fn is_gauduchon(self) -> bool {
        self != MetricClass::None
    }
}

#[derive(Clone, Debug)]
pub struct HermitianMetric<S: Scalar> {
    omega: PolyForm<S>,
    /// `ω^{n−1}` and `ω^n`
    omega_nm1: PolyForm<S>,
    omega_n: PolyForm<S>,
    omega_nm1_float: PolyForm<Complex64>,
    volume: S,
    certificate: PositivityCertificate,
}

/// Smallest eigenvalue of the Hermitian matrix of a real (1,1)-form on `z^⊥`.
pub fn min_horizontal_eigenvalue(omega: &PolyForm<Complex64>, z: &[Complex64]) -> f64 {
    let n = omega.n();
    let h = omega.hermitian_matrix_at(z);
    let p = unit_point(z.to_vec()).expect("nonzero point");
    let u = householder_to(&p).expect("unit point");
    let hm = DMatrix::from_fn(n + 1, n + 1, |i, j| h[i][j]);
    let b = DMatrix::from_fn(n + 1, n, |i, j| *u.entry(i, j + 1));
    let r = b.adjoint() * hm * &b;
    let r = (&r + r.adjoint()) * Complex64::new(0.5, 0.0);
    r.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

impl<S: Scalar> HermitianMetric<S> {
    /// Validates a real positive (1,1)-form, checking positivity at `samples` uniform points.
    pub fn from_form(omega: PolyForm<S>, samples: usize, seed: u64) -> Result<Self> {
        let n = omega.n();
        if n < 1 || omega.degree() != 2 {
            return Err(Error::MalformedForm("fundamental form must be a 2-form".into()));
        }
        if omega.components().keys().any(|m| mask_bidegree(n, *m) != (1, 1)) {
            return Err(Error::MalformedForm("fundamental form must have type (1,1)".into()));
        }
        if !omega.is_real() {
            return Err(Error::MalformedForm("fundamental form must be real".into()));
        }
        if !omega.is_horizontal() {
            return Err(Error::MalformedForm("fundamental form must be horizontal".into()));
        }
        let omega_f = omega.to_float();
        let mut pts: Vec<Vec<Complex64>> = (0..=n)
            .map(|j| ProjPoint::<Complex64>::basis(n, j).coords().to_vec())
            .collect();
        pts.extend(sample_sigma(n, samples, seed).into_iter().map(|p| p.coords().to_vec()));
        let mut min_ev = f64::INFINITY;
        for z in &pts {
            let ev = min_horizontal_eigenvalue(&omega_f, z);
            if ev <= 0.0 {
                return Err(Error::NotPositive {
                    witness: z.iter().map(|c| (c.re, c.im)).collect(),
                    eigenvalue: ev,
                });
            }
            min_ev = min_ev.min(ev);
        }
        let omega_nm1 = omega.pow(n - 1);
        let omega_n = omega_nm1.wedge(&omega);
        let volume = omega_n.integrate_cpn()?.mul(&S::from_ratio(1, factorial(n)));
        let omega_nm1_float = omega_nm1.to_float();
        Ok(HermitianMetric {
            omega,
            omega_nm1,
            omega_n,
            omega_nm1_float,
            volume,
            certificate: PositivityCertificate { samples: pts.len(), min_eigenvalue: min_ev },
        })
    }

    /// Default construction with 2000 positivity samples.
    pub fn new(omega: PolyForm<S>) -> Result<Self> {
        Self::from_form(omega, 2000, 0)
    }

    pub fn fubini_study(n: usize) -> Self {
        Self::from_form(fubini_study_form(n), 200, 0).expect("Fubini-Study is positive")
    }

    pub fn n(&self) -> usize {
        self.omega.n()
    }

    pub fn omega(&self) -> &PolyForm<S> {
        &self.omega
    }

    /// `ω^k`
    pub fn omega_pow(&self, k: usize) -> PolyForm<S> {
        let n = self.n();
        if k == n {
            return self.omega_n.clone();
        }
        if k + 1 == n {
            return self.omega_nm1.clone();
        }
        self.omega.pow(k)
    }

    pub fn certificate(&self) -> &PositivityCertificate {
        &self.certificate
    }

    /// `Vol(g) = (1/n!) ∫ ω^n`.
    pub fn volume(&self) -> S {
        self.volume.clone()
    }

    pub fn to_float(&self) -> HermitianMetric<Complex64> {
        HermitianMetric {
            omega: self.omega.to_float(),
            omega_nm1: self.omega_nm1.to_float(),
            omega_n: self.omega_n.to_float(),
            omega_nm1_float: self.omega_nm1_float.clone(),
            volume: self.volume.to_c64(),
            certificate: self.certificate.clone(),
        }
    }

    /// Kähler ⇒ balanced ⇒ Gauduchon, tested in that order.
    pub fn classify(&self) -> MetricClass {
        let scale = self.omega.max_abs();
        if form_vanishes(&self.omega.d(), scale) {
            return MetricClass::Kahler;
        }
        let s2 = self.omega_nm1.max_abs();
        if form_vanishes(&self.omega_nm1.d(), s2) {
            return MetricClass::BalancedOnly;
        }
        match self.omega_nm1.ddc() {
            Ok(f) if form_vanishes(&f, s2) => MetricClass::GauduchonOnly,
            _ => MetricClass::None,
        }
    }

    /// `A_g(σ) = (1/(n−1)!) ∫_{Σ_σ} ω^{n−1}`.
    pub fn area_equator(&self, sigma: &ProjPoint<S>) -> Result<S> {
        let n = self.n();
        Ok(self.omega_nm1.integrate_equator(sigma)?.mul(&S::from_ratio(1, factorial(n - 1))))
    }

    /// `A_g(σ)` at a float point.
    pub fn area_equator_f(&self, sigma: &ProjPoint<Complex64>) -> Result<f64> {
        let n = self.n();
        Ok(self.omega_nm1_float.integrate_equator(sigma)?.re / factorial(n - 1) as f64)
    }

    fn vol_power(&self) -> f64 {
        let n = self.n() as f64;
        self.volume.re_f64().powf((n - 1.0) / n)
    }

    /// `M_σ(g) = A_g(σ) / Vol(g)^{(n−1)/n}`.
    pub fn m_sigma(&self, sigma: &ProjPoint<S>) -> Result<f64> {
        Ok(self.area_equator(sigma)?.re_f64() / self.vol_power())
    }

    pub fn m_sigma_f(&self, sigma: &ProjPoint<Complex64>) -> Result<f64> {
        Ok(self.area_equator_f(sigma)? / self.vol_power())
    }

    /// `∫ ω^{n−1} ∧ ω_FS` (exact).
    pub fn fs_pairing(&self) -> Result<S> {
        self.omega_nm1.wedge(&fubini_study_form(self.n())).integrate_cpn()
    }

    /// `M(g) = (n!)^{(n−1)/n}/(n−1)! · ∫ω^{n−1}∧ω_FS / (∫ω^n)^{(n−1)/n}`.
    pub fn mean_functional(&self) -> Result<f64> {
        let n = self.n();
        let p = (n as f64 - 1.0) / n as f64;
        let c = (factorial(n) as f64).powf(p) / factorial(n - 1) as f64;
        let x = self.fs_pairing()?.re_f64();
        let y = self.omega_n.integrate_cpn()?.re_f64();
        Ok(c * x / y.powf(p))
    }

    /// Holomorphic `(n−1)`-systole of a Gauduchon metric: the common equator area.
    pub fn holomorphic_systole(&self) -> Result<SystoleReport<S>> {
        let n = self.n();
        if !self.classify().is_gauduchon() {
            return Err(Error::NotGauduchon);
        }
        let value = self.area_equator(&ProjPoint::basis(n, 0))?;
        let a = self.fs_pairing()?;
        let fs_area = S::from_ratio(1, factorial(n - 1));
        let v = value.re_f64();
        let mismatch = a.mul(&fs_area).sub(&value);
        if !mismatch.negligible(v.abs().max(1.0) * 1e3) {
            return Err(Error::InconsistentAreas(mismatch.abs_f64()));
        }
        for s in sample_sigma(n, 10, 17) {
            let w = self.area_equator_f(&s)?;
            if (w - v).abs() > FLOAT_IDENTITY_TOL * v.abs().max(1.0) {
                return Err(Error::InconsistentAreas((w - v).abs()));
            }
        }
        if S::EXACT {
            for s in rational_sigma_grid(n, 2, 5) {
                let s = ProjPoint::<S>::from_gq(&s);
                let w = self.area_equator(&s)?;
                if w != value {
                    return Err(Error::InconsistentAreas(w.sub(&value).abs_f64()));
                }
            }
        }
        Ok(SystoleReport { value, cohomology_coefficient: a })
    }

    /// `ρ(g) = Sys^Hol_{n−1}(g) / Vol(g)^{(n−1)/n}` for Gauduchon `g`.
    pub fn rho(&self) -> Result<f64> {
        Ok(self.holomorphic_systole()?.value.re_f64() / self.vol_power())
    }

    /// Minimum of `M_σ` over `σ` samples. For a non-Gauduchon metric this is an
    /// upper bound for `ρ`, not its value.
    pub fn rho_upper_bound(&self, samples: usize, seed: u64) -> Result<SigmaMin> {
        let n = self.n();
        let mut pts = sample_sigma(n, samples, seed);
        pts.extend((0..=n).map(|j| ProjPoint::basis(n, j)));
        let mut best = SigmaMin { value: f64::INFINITY, sigma: Vec::new() };
        for s in pts {
            let v = self.m_sigma_f(&s)?;
            if v < best.value {
                best = SigmaMin { value: v, sigma: s.coords().iter().map(|c| (c.re, c.im)).collect() };
            }
        }
        Ok(best)
    }
}

/// `∫ t_η t_ξ / v` where `η∧ω^{n−1} = (t_η/v) ω^n` and `v = ω^n/ω_FS^n`, i.e. `∫ f_η f_ξ ω^n`.
fn trace_pairing<S: Scalar>(t_eta: &PolyForm<S>, t_xi: &PolyForm<S>, v: &PolyForm<S>) -> Result<S> {
    let prod = t_eta.wedge(t_xi);
    let vr = v.reduce();
    if let Some(c) = vr.function_numerator().as_norm_power_multiple() {
        let inv = c.inv().ok_or_else(|| Error::MalformedForm("degenerate volume form".into()))?;
        return Ok(prod.function_numerator().sphere_integral().mul(&inv));
    }
    // the integrand is rational: a high-order product rule, not exact
    let pf = prod.to_float();
    let vf = vr.to_float();
    let quad = CpnQuadrature::new(prod.n(), prod.denom_power() + 2 * vr.denom_power() + 12);
    let val = quad.integrate_complex(|z| pf.eval_function(z) / vf.eval_function(z));
    Ok(S::from_c64(val))
}

/// L² inner product of real (1,1)-forms for a Kähler form `ω`, through the
/// Lefschetz split `η = f ω + γ` and the Riemann–Hodge relations:
/// `(n/n!) ∫ f_η f_ξ ω^n − (1/(n−2)!) ∫ γ_η ∧ γ_ξ ∧ ω^{n−2}`.
pub fn l2_inner_11<S: Scalar>(eta: &PolyForm<S>, xi: &PolyForm<S>, omega: &PolyForm<S>) -> Result<S> {
    let n = omega.n();
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    for f in [eta, xi] {
        if f.degree() != 2 || f.components().keys().any(|m| mask_bidegree(n, *m) != (1, 1)) {
            return Err(Error::MalformedForm("expected a (1,1)-form".into()));
        }
    }
    if !form_vanishes(&omega.d(), omega.max_abs()) {
        return Err(Error::NotKahler);
    }
    let wnm2 = omega.pow(n - 2);
    let wnm1 = wnm2.wedge(omega);
    let v = wnm1.wedge(omega).top_ratio()?;
    let t_eta = eta.wedge(&wnm1).top_ratio()?;
    let t_xi = if std::ptr::eq(eta, xi) { t_eta.clone() } else { xi.wedge(&wnm1).top_ratio()? };
    let iff = trace_pairing(&t_eta, &t_xi, &v)?;
    let cross = eta.wedge(xi).wedge(&wnm2).integrate_cpn()?;
    // γ_η∧γ_ξ∧ω^{n−2} = η∧ξ∧ω^{n−2} − f_η f_ξ ω^n
    let a = iff.mul(&S::from_ratio(n as i64, factorial(n)));
    let b = cross.sub(&iff).mul(&S::from_ratio(1, factorial(n - 2)));
    Ok(a.sub(&b))
}

/// `‖η‖²_{L²(g)}` for a real (1,1)-form and a Kähler metric.
pub fn l2_norm_sq_11<S: Scalar>(eta: &PolyForm<S>, g: &HermitianMetric<S>) -> Result<S> {
    l2_inner_11(eta, eta, g.omega())
}

impl<S: Scalar> ProjPoint<S> {
    /// Converts an exact point into the field `S`.
    pub fn from_gq(p: &ProjPoint<crate::scalar::Gq>) -> Self {
        unit_point(p.coords().iter().map(S::from_gq).collect()).expect("nonzero point")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystoleReport<S> {
    pub value: S,
    pub cohomology_coefficient: S,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaMin {
    pub value: f64,
    pub sigma: Vec<(f64, f64)>,
}
