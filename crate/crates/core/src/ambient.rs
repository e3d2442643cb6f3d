//! Points of CP^n, unitaries carrying `e_0` to a given point, and σ-sampling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::{Gq, Scalar};

/// A point of CP^n given by an ambient representative.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjPoint<S> {
    coords: Vec<S>,
    norm_sq: S,
}

fn norm_sq_of<S: Scalar>(v: &[S]) -> S {
    v.iter().fold(S::zero(), |acc, x| acc.add(&x.mul(&x.conj())))
}

/// Builds a projective point; float mode rescales to unit norm, exact mode
/// rescales only when the norm is rational.
pub fn unit_point<S: Scalar>(coords: Vec<S>) -> Result<ProjPoint<S>> {
    if coords.iter().all(|c| c.is_zero()) {
        return Err(Error::ZeroVector);
    }
    let ns = norm_sq_of(&coords);
    if let Some(r) = ns.sqrt_real() {
        let inv = r.inv().expect("nonzero norm");
        let coords: Vec<S> = coords.iter().map(|c| c.mul(&inv)).collect();
        let norm_sq = if S::EXACT { S::one() } else { norm_sq_of(&coords) };
        return Ok(ProjPoint { coords, norm_sq });
    }
    Ok(ProjPoint { coords, norm_sq: ns })
}

impl<S: Scalar> ProjPoint<S> {
    /// The coordinate point `e_j` of CP^n.
    pub fn basis(n: usize, j: usize) -> Self {
        let mut coords = vec![S::zero(); n + 1];
        coords[j] = S::one();
        ProjPoint { coords, norm_sq: S::one() }
    }

    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn norm_sq(&self) -> &S {
        &self.norm_sq
    }

    pub fn is_unit(&self) -> bool {
        if S::EXACT {
            self.norm_sq == S::one()
        } else {
            (self.norm_sq.re_f64() - 1.0).abs() <= 1e-12
        }
    }

    /// `⟨u, v⟩ = Σ u_j conj(v_j)`.
    pub fn inner(&self, o: &Self) -> S {
        self.coords
            .iter()
            .zip(&o.coords)
            .fold(S::zero(), |acc, (a, b)| acc.add(&a.mul(&b.conj())))
    }

    /// Projective equality: `|⟨u,v⟩|² = |u|²|v|²`.
    pub fn same_point(&self, o: &Self) -> bool {
        let ip = self.inner(o);
        let lhs = ip.mul(&ip.conj());
        let rhs = self.norm_sq.mul(&o.norm_sq);
        if S::EXACT {
            lhs == rhs
        } else {
            (lhs.re_f64() - rhs.re_f64()).abs() <= 1e-12 * rhs.re_f64().max(1.0)
        }
    }

    pub fn to_float(&self) -> ProjPoint<Complex64> {
        let coords: Vec<Complex64> = self.coords.iter().map(|c| c.to_c64()).collect();
        unit_point(coords).expect("nonzero point")
    }
}

/// An `(n+1)×(n+1)` unitary matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary<S> {
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> Unitary<S> {
    pub fn identity(size: usize) -> Self {
        let rows = (0..size)
            .map(|i| (0..size).map(|j| if i == j { S::one() } else { S::zero() }).collect())
            .collect();
        Unitary { rows }
    }

    /// Wraps a matrix without checking unitarity.
    pub fn from_rows_unchecked(rows: Vec<Vec<S>>) -> Self {
        Unitary { rows }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &S {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn column(&self, k: usize) -> Vec<S> {
        self.rows.iter().map(|r| r[k].clone()).collect()
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).fold(S::zero(), |acc, (a, b)| acc.add(&a.mul(b))))
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        let m = self.size();
        let rows = (0..m).map(|i| (0..m).map(|j| self.rows[j][i].conj()).collect()).collect();
        Unitary { rows }
    }

    pub fn compose(&self, o: &Self) -> Self {
        let m = self.size();
        let rows = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| (0..m).fold(S::zero(), |acc, k| acc.add(&self.rows[i][k].mul(&o.rows[k][j]))))
                    .collect()
            })
            .collect();
        Unitary { rows }
    }

    /// `max |(U U*)_{ij} − δ_ij|`.
    pub fn unitarity_residual(&self) -> f64 {
        let p = self.compose(&self.adjoint());
        let mut r: f64 = 0.0;
        for (i, row) in p.rows.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let target = if i == j { S::one() } else { S::zero() };
                r = r.max(x.sub(&target).abs_f64());
            }
        }
        r
    }
}

/// Unitary `U` with `U e_0 = σ`, built from an elementary reflector.
///
/// With `α = σ_0`, `β = −sign(Re α)` and `v = (1, σ_j/(α−β))`, the reflector
/// `H = I − τ v v*` with `τ = (β−α)/β` satisfies `H* σ = β e_0`, so `U = β H`.
/// Entries stay in the coefficient field of `σ`.
pub fn householder_to<S: Scalar>(sigma: &ProjPoint<S>) -> Result<Unitary<S>> {
    if !sigma.is_unit() {
        return Err(Error::NonRationalPoint);
    }
    let m = sigma.coords.len();
    let x = &sigma.coords;
    if x[1..].iter().all(|c| c.negligible(1.0)) {
        return Ok(Unitary::identity(m));
    }
    let alpha = &x[0];
    let beta = S::from_i64(-(alpha.sign_re() as i64));
    let tau = beta.sub(alpha).div(&beta).expect("unit beta");
    let denom = alpha.sub(&beta).inv().expect("alpha differs from beta");
    let mut v = Vec::with_capacity(m);
    v.push(S::one());
    for c in &x[1..] {
        v.push(c.mul(&denom));
    }
    let rows = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let delta = if i == j { S::one() } else { S::zero() };
                    let h = delta.sub(&tau.mul(&v[i]).mul(&v[j].conj()));
                    beta.mul(&h)
                })
                .collect()
        })
        .collect();
    Ok(Unitary { rows })
}

/// `count` points uniform on CP^n (normalized complex Gaussians), reproducible from `seed`.
pub fn sample_sigma(n: usize, count: usize, seed: u64) -> Vec<ProjPoint<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let coords: Vec<Complex64> = (0..=n)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re, im)
                })
                .collect();
            unit_point(coords).expect("gaussian vector is nonzero")
        })
        .collect()
}

/// Deterministic unit points with Gaussian-rational coordinates.
///
/// Each point is the inverse stereographic image of a random small rational
/// point of `R^{2n+1}`, so it lies exactly on `S^{2n+1}`.
pub fn rational_sigma_grid(n: usize, count: usize, seed: u64) -> Vec<ProjPoint<Gq>> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 2 * n + 1;
    (0..count)
        .map(|_| {
            let x: Vec<BigRational> = (0..dim)
                .map(|_| {
                    let num: i64 = rng.random_range(-4..=4);
                    let den: i64 = rng.random_range(1..=3);
                    BigRational::new(BigInt::from(num), BigInt::from(den))
                })
                .collect();
            let s = x.iter().fold(BigRational::zero(), |acc, v| acc + v * v);
            let d = &s + BigRational::one();
            let mut real: Vec<BigRational> = x.iter().map(|v| (v + v) / &d).collect();
            real.push((&s - BigRational::one()) / &d);
            let coords: Vec<Gq> = real.chunks(2).map(|c| Gq::new(c[0].clone(), c[1].clone())).collect();
            ProjPoint { coords, norm_sq: Gq::one() }
        })
        .collect()
}

/// Deterministic unit points with non-negative rational real coordinates.
///
/// Used for torus-invariant integrands, which depend only on `|σ_j|²`.
pub fn rational_real_grid(n: usize, count: usize, seed: u64) -> Vec<ProjPoint<Gq>> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Signed, Zero};

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<ProjPoint<Gq>> = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<BigRational> = (0..n)
            .map(|_| {
                let num: i64 = rng.random_range(1..=9);
                let den: i64 = rng.random_range(1..=7);
                BigRational::new(BigInt::from(num), BigInt::from(den))
            })
            .collect();
        let s = x.iter().fold(BigRational::zero(), |acc, v| acc + v * v);
        let d = &s + BigRational::one();
        let mut real: Vec<BigRational> = x.iter().map(|v| (v + v) / &d).collect();
        real.push(((&s - BigRational::one()) / &d).abs());
        let coords: Vec<Gq> = real.into_iter().map(Gq::real).collect();
        let p = ProjPoint { coords, norm_sq: Gq::one() };
        if !out.iter().any(|q| q.coords == p.coords) {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_point_examples() {
        let p = unit_point(vec![Gq::one(), Gq::zero(), Gq::zero()]).unwrap();
        assert_eq!(p.norm_sq(), &Gq::one());
        let q = unit_point(vec![Gq::zero(), Gq::frac(0, 2, 1), Gq::zero()]).unwrap();
        assert!(q.same_point(&ProjPoint::basis(2, 1)));
        let r = unit_point(vec![Complex64::new(3.0, 0.0), Complex64::new(4.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap()
            .to_float();
        let e0 = ProjPoint::<Complex64>::basis(2, 0);
        assert!((r.inner(&e0).norm_sqr() - 9.0 / 25.0).abs() < 1e-15);
        assert_eq!(unit_point(vec![Gq::zero(), Gq::zero()]), Err(Error::ZeroVector));
    }

    #[test]
    fn householder_examples() {
        let e0 = ProjPoint::<Gq>::basis(2, 0);
        assert_eq!(householder_to(&e0).unwrap(), Unitary::identity(3));

        let u = householder_to(&ProjPoint::<Gq>::basis(2, 1)).unwrap();
        let expect = vec![
            vec![Gq::zero(), Gq::one(), Gq::zero()],
            vec![Gq::one(), Gq::zero(), Gq::zero()],
            vec![Gq::zero(), Gq::zero(), Gq::int(-1)],
        ];
        assert_eq!(u.rows(), &expect[..]);

        let sigma = unit_point(vec![Gq::frac(3, 0, 5), Gq::frac(0, 4, 5), Gq::zero()]).unwrap();
        let u = householder_to(&sigma).unwrap();
        assert_eq!(u.column(0), sigma.coords().to_vec());
        assert_eq!(u.unitarity_residual(), 0.0);
    }

    #[test]
    fn rational_grid_is_unit_and_exact() {
        for p in rational_sigma_grid(2, 10, 3) {
            assert_eq!(norm_sq_of(p.coords()), Gq::one());
            let u = householder_to(&p).unwrap();
            assert_eq!(u.column(0), p.coords().to_vec());
            assert_eq!(u.unitarity_residual(), 0.0);
        }
    }

    #[test]
    fn real_grid_is_unit() {
        for p in rational_real_grid(3, 20, 1) {
            assert_eq!(norm_sq_of(p.coords()), Gq::one());
            assert!(p.coords().iter().all(|c| c.im == num_rational::BigRational::from_integer(0.into())));
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let a = sample_sigma(2, 1, 7);
        let b = sample_sigma(2, 1, 7);
        assert_eq!(a, b);
        assert!(a[0].is_unit());
        assert_ne!(sample_sigma(2, 2, 1), sample_sigma(2, 2, 2));
    }
}
