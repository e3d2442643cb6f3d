//! Product quadrature on CP^n for the normalized Fubini–Study measure.
//!
//! With `z_j = √t_j e^{iθ_j}` and `θ_0 = 0`, the point `t` is uniform on the
//! standard simplex and the phases are uniform. Simplex integrals use
//! collapsed Gauss–Legendre rules and phases use the trapezoid rule, so
//! `P / |z|^{2D}` with `P` of bidegree `(D, D)` is integrated exactly.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Gauss–Legendre nodes and weights on `[0, 1]` (Golub–Welsch).
pub fn gauss_legendre_01(q: usize) -> Vec<(f64, f64)> {
    assert!(q >= 1);
    let mut jac = DMatrix::<f64>::zeros(q, q);
    for k in 1..q {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        jac[(k - 1, k)] = b;
        jac[(k, k - 1)] = b;
    }
    let eig = jac.symmetric_eigen();
    let mut out: Vec<(f64, f64)> = (0..q)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            ((x + 1.0) / 2.0, v0 * v0)
        })
        .collect();
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

#[derive(Clone, Debug)]
pub struct CpnQuadrature {
    pub n: usize,
    pub degree: u32,
    pub points: Vec<Vec<Complex64>>,
    pub weights: Vec<f64>,
}

impl CpnQuadrature {
    /// Rule exact for `P/|z|^{2D}`, `P` of bidegree `(D, D)`, `D = degree`.
    pub fn new(n: usize, degree: u32) -> Self {
        Self::with_phases(n, degree, degree as usize + 1)
    }

    /// Simplex rule only, for integrands invariant under the phase torus.
    pub fn torus_invariant(n: usize, degree: u32) -> Self {
        Self::with_phases(n, degree, 1)
    }

    fn with_phases(n: usize, degree: u32, k: usize) -> Self {
        let d = degree as usize;
        let q = (d + n + 2) / 2 + 1;
        let gl = gauss_legendre_01(q);
        let phases: Vec<Complex64> =
            (0..k).map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / k as f64)).collect();
        let fact: f64 = (1..=n).map(|x| x as f64).product();

        // simplex nodes via the collapsed map
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), fact)];
        for level in 0..n {
            let mut next = Vec::new();
            for (xs, w) in &simplex {
                let rest = 1.0 - xs.iter().sum::<f64>();
                for &(u, wu) in &gl {
                    let mut x2 = xs.clone();
                    x2.push(rest * u);
                    // Jacobian factor rest^{...} is accumulated as (1-u)^{n-1-level}
                    let jac = (1.0 - u).powi((n - 1 - level) as i32);
                    next.push((x2, w * wu * jac));
                }
            }
            simplex = next;
        }

        let mut points = Vec::new();
        let mut weights = Vec::new();
        let nph = k.pow(n as u32);
        for (xs, w) in &simplex {
            let t0 = (1.0 - xs.iter().sum::<f64>()).max(0.0);
            for idx in 0..nph {
                let mut z = Vec::with_capacity(n + 1);
                z.push(Complex64::new(t0.sqrt(), 0.0));
                let mut rem = idx;
                for &t in xs {
                    let ph = phases[rem % k];
                    rem /= k;
                    z.push(ph * t.max(0.0).sqrt());
                }
                points.push(z);
                weights.push(w / nph as f64);
            }
        }
        CpnQuadrature { n, degree, points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate<F: FnMut(&[Complex64]) -> f64>(&self, mut f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(z, w)| w * f(z)).sum()
    }

    pub fn integrate_complex<F: FnMut(&[Complex64]) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.points.iter().zip(&self.weights).map(|(z, w)| f(z) * *w).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let gl = gauss_legendre_01(4);
        let s: f64 = gl.iter().map(|(x, w)| w * x.powi(7)).sum();
        assert!((s - 1.0 / 8.0).abs() < 1e-14);
    }

    #[test]
    fn monomial_moments() {
        let q = CpnQuadrature::new(2, 4);
        let total: f64 = q.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
        // E|z_0|^4 = 2!·2!/4! = 1/6
        let m = q.integrate(|z| z[0].norm_sqr().powi(2));
        assert!((m - 1.0 / 6.0).abs() < 1e-13);
        // E|z_0|²|z_1|²|z_2|² ... degree 3 moment: 2!/5! = 1/60
        let m = q.integrate(|z| z[0].norm_sqr() * z[1].norm_sqr() * z[2].norm_sqr());
        assert!((m - 1.0 / 60.0).abs() < 1e-13);
        let off = q.integrate_complex(|z| z[0] * z[1].conj() * z[2] * z[2].conj());
        assert!(off.norm() < 1e-14);
        let t = CpnQuadrature::torus_invariant(2, 4);
        assert_eq!(t.len() * 25, q.len());
        let m = t.integrate(|z| z[0].norm_sqr() * z[1].norm_sqr() * z[2].norm_sqr());
        assert!((m - 1.0 / 60.0).abs() < 1e-13);
    }
}
