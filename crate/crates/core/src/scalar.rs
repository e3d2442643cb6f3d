//! Coefficient fields: exact Gaussian rationals and double-precision complex numbers.
//!
//! Every polynomial, form and matrix in the crate is generic over [`Scalar`], so
//! the same code path runs exactly (for identities) or in floating point (for
//! spectra, quadrature and Galerkin solves).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Field operations shared by the exact and floating-point coefficient types.
pub trait Scalar:
    Clone + fmt::Debug + PartialEq + Send + Sync + 'static
{
    /// `true` for exact arithmetic.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn i() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Best representation of a float; exact mode converts the binary value exactly.
    fn from_f64(v: f64) -> Self;
    fn from_c64(v: Complex64) -> Self;
    fn from_gq(v: &Gq) -> Self;
    /// Exact Gaussian-rational value (floats convert through their binary value).
    fn to_gq(&self) -> Gq;

    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self) -> Option<Self>;

    fn is_zero(&self) -> bool;
    /// Zero for the purposes of pruning. Exact mode: `is_zero`. Float mode: `|x| <= tol * scale`.
    fn negligible(&self, scale: f64) -> bool;
    fn to_c64(&self) -> Complex64;
    fn abs_f64(&self) -> f64 {
        self.to_c64().norm()
    }
    fn re_f64(&self) -> f64 {
        self.to_c64().re
    }
    /// Real part as a scalar.
    fn re(&self) -> Self;
    /// Exact square root of a non-negative real value when it exists in the field.
    fn sqrt_real(&self) -> Option<Self>;
    fn is_real(&self) -> bool;
    /// Sign of the real part (`+1` for zero, following the LAPACK convention).
    fn sign_re(&self) -> i32;

    fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|inv| self.mul(&inv))
    }
    fn scale_i64(&self, k: i64) -> Self {
        self.mul(&Self::from_i64(k))
    }

    /// JSON encoding of the real and imaginary parts (strings `"p/q"` in exact mode).
    fn to_json_parts(&self) -> (serde_json::Value, serde_json::Value);
    fn from_json_parts(re: &serde_json::Value, im: &serde_json::Value) -> Option<Self>;
}

/// Relative pruning tolerance for floating-point coefficients.
pub const FLOAT_PRUNE_TOL: f64 = 1e-13;

impl Scalar for Complex64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn from_c64(v: Complex64) -> Self {
        v
    }
    fn from_gq(v: &Gq) -> Self {
        v.to_c64()
    }
    fn to_gq(&self) -> Gq {
        Gq::from_c64(*self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn inv(&self) -> Option<Self> {
        if self.norm_sqr() == 0.0 {
            None
        } else {
            Some(Complex64::inv(self))
        }
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn negligible(&self, scale: f64) -> bool {
        self.norm() <= FLOAT_PRUNE_TOL * scale.max(f64::MIN_POSITIVE)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn re(&self) -> Self {
        Complex64::new(self.re, 0.0)
    }
    fn sqrt_real(&self) -> Option<Self> {
        if self.re < 0.0 {
            None
        } else {
            Some(Complex64::new(self.re.sqrt(), 0.0))
        }
    }
    fn is_real(&self) -> bool {
        self.im.abs() <= FLOAT_PRUNE_TOL * self.re.abs().max(1.0)
    }
    fn sign_re(&self) -> i32 {
        if self.re < 0.0 {
            -1
        } else {
            1
        }
    }
    fn to_json_parts(&self) -> (serde_json::Value, serde_json::Value) {
        (serde_json::json!(self.re), serde_json::json!(self.im))
    }
    fn from_json_parts(re: &serde_json::Value, im: &serde_json::Value) -> Option<Self> {
        Some(Complex64::new(re.as_f64()?, im.as_f64()?))
    }
}

/// Exact Gaussian rational `re + i·im`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gq {
    pub re: BigRational,
    pub im: BigRational,
}

impl Gq {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Gq { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Gq { re, im: BigRational::zero() }
    }

    pub fn int(v: i64) -> Self {
        Gq::real(BigRational::from_integer(BigInt::from(v)))
    }

    /// `(a + b i) / den`.
    pub fn frac(a: i64, b: i64, den: i64) -> Self {
        let d = BigInt::from(den);
        Gq {
            re: BigRational::new(BigInt::from(a), d.clone()),
            im: BigRational::new(BigInt::from(b), d),
        }
    }

    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl fmt::Debug for Gq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Gq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else {
            write!(f, "({} + {}i)", self.re, self.im)
        }
    }
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // huge numerator/denominator: fall back to scaled division
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn rat_from_f64(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite float")
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer();
    let d = r.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

impl Scalar for Gq {
    const EXACT: bool = true;
    fn zero() -> Self {
        Gq::real(BigRational::zero())
    }
    fn one() -> Self {
        Gq::real(BigRational::one())
    }
    fn i() -> Self {
        Gq { re: BigRational::zero(), im: BigRational::one() }
    }
    fn from_i64(v: i64) -> Self {
        Gq::int(v)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Gq::frac(num, 0, den)
    }
    fn from_f64(v: f64) -> Self {
        Gq::real(rat_from_f64(v))
    }
    fn from_c64(v: Complex64) -> Self {
        Gq::new(rat_from_f64(v.re), rat_from_f64(v.im))
    }
    fn from_gq(v: &Gq) -> Self {
        v.clone()
    }
    fn to_gq(&self) -> Gq {
        self.clone()
    }
    fn add(&self, o: &Self) -> Self {
        Gq { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    fn sub(&self, o: &Self) -> Self {
        Gq { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    fn mul(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return Gq::real(&self.re * &o.re);
        }
        Gq {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    fn neg(&self) -> Self {
        Gq { re: -&self.re, im: -&self.im }
    }
    fn conj(&self) -> Self {
        Gq { re: self.re.clone(), im: -&self.im }
    }
    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Gq::real(self.re.recip()));
        }
        let n = self.norm_sq();
        Some(Gq { re: &self.re / &n, im: -&self.im / &n })
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
    fn re(&self) -> Self {
        Gq::real(self.re.clone())
    }
    fn sqrt_real(&self) -> Option<Self> {
        if !self.im.is_zero() {
            return None;
        }
        rational_sqrt(&self.re).map(Gq::real)
    }
    fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    fn sign_re(&self) -> i32 {
        if self.re.is_negative() {
            -1
        } else {
            1
        }
    }
    fn to_json_parts(&self) -> (serde_json::Value, serde_json::Value) {
        (serde_json::json!(self.re.to_string()), serde_json::json!(self.im.to_string()))
    }
    fn from_json_parts(re: &serde_json::Value, im: &serde_json::Value) -> Option<Self> {
        let parse = |v: &serde_json::Value| -> Option<BigRational> {
            match v {
                serde_json::Value::String(s) => s.parse().ok(),
                serde_json::Value::Number(x) => BigRational::from_float(x.as_f64()?),
                _ => None,
            }
        };
        Some(Gq::new(parse(re)?, parse(im)?))
    }
}

impl Add for Gq {
    type Output = Gq;
    fn add(self, o: Gq) -> Gq {
        Scalar::add(&self, &o)
    }
}

impl Sub for Gq {
    type Output = Gq;
    fn sub(self, o: Gq) -> Gq {
        Scalar::sub(&self, &o)
    }
}

impl Mul for Gq {
    type Output = Gq;
    fn mul(self, o: Gq) -> Gq {
        Scalar::mul(&self, &o)
    }
}

impl Neg for Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Scalar::neg(&self)
    }
}

/// Rational number from a numerator and denominator.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Converts any scalar to a float complex number (identity in float mode).
pub fn to_float<S: Scalar>(x: &S) -> Complex64 {
    x.to_c64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_arithmetic() {
        let a = Gq::frac(1, 2, 3);
        let b = Gq::frac(0, 1, 1);
        assert_eq!(Scalar::mul(&a, &b), Gq::frac(-2, 1, 3));
        assert_eq!(Scalar::mul(&a, &a.inv().unwrap()), Gq::one());
        assert_eq!(a.conj(), Gq::frac(1, -2, 3));
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(rational_sqrt(&rat(9, 25)), Some(rat(3, 5)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
        assert_eq!(Gq::frac(4, 0, 9).sqrt_real(), Some(Gq::frac(2, 0, 3)));
    }

    #[test]
    fn float_pruning_is_relative() {
        let tiny = Complex64::new(1e-16, 0.0);
        assert!(tiny.negligible(1.0));
        assert!(!tiny.negligible(1e-10));
    }
}
