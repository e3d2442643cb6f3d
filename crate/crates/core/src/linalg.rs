//! Gaussian elimination over a [`Scalar`] field and a few nalgebra bridges.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::scalar::Scalar;

/// Pivot tolerance for float elimination (relative to the largest entry).
const FLOAT_PIVOT_TOL: f64 = 1e-10;

/// Reduces `rows` to reduced row echelon form in place and returns the pivot columns.
///
/// Exact mode pivots on the first nonzero entry (lexicographic in column
/// order); float mode uses partial pivoting with a relative threshold.
pub fn rref<S: Scalar>(rows: &mut Vec<Vec<S>>, ncols: usize) -> Vec<usize> {
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| x.abs_f64())
        .fold(0.0, f64::max);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let pick = if S::EXACT {
            (r..rows.len()).find(|&i| !rows[i][c].is_zero())
        } else {
            (r..rows.len())
                .map(|i| (i, rows[i][c].abs_f64()))
                .filter(|&(_, a)| a > FLOAT_PIVOT_TOL * scale)
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .map(|(i, _)| i)
        };
        let Some(p) = pick else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].inv().expect("nonzero pivot");
        for x in rows[r].iter_mut().skip(c) {
            *x = x.mul(&inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !y.is_zero() {
                    *x = x.sub(&f.mul(y));
                }
            }
            if !S::EXACT {
                row[c] = S::zero();
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{x : A x = 0}` as vectors of length `ncols`.
pub fn nullspace<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> Vec<Vec<S>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let mut is_pivot = vec![None; ncols];
    for (r, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(r);
    }
    let mut out = Vec::new();
    for free in 0..ncols {
        if is_pivot[free].is_some() {
            continue;
        }
        let mut v = vec![S::zero(); ncols];
        v[free] = S::one();
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = m[r][free].neg();
        }
        out.push(v);
    }
    out
}

/// Indices of a maximal linearly independent subset of `vectors`, chosen greedily in order.
pub fn independent_subset<S: Scalar>(vectors: &[Vec<S>]) -> Vec<usize> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let len = vectors[0].len();
    // columns = vectors; pivot columns of the matrix whose columns are the vectors
    let rows: Vec<Vec<S>> = (0..len).map(|i| vectors.iter().map(|v| v[i].clone()).collect()).collect();
    let mut m = rows;
    rref(&mut m, vectors.len())
}

/// Solves `A x = b`; returns `None` if inconsistent. Free variables are set to zero.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Option<Vec<S>> {
    let ncols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut m: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    let pivots = rref(&mut m, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![S::zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][ncols].clone();
    }
    Some(x)
}

pub fn to_dmatrix<S: Scalar>(rows: &[Vec<S>]) -> DMatrix<Complex64> {
    let nr = rows.len();
    let nc = rows.first().map(|r| r.len()).unwrap_or(0);
    DMatrix::from_fn(nr, nc, |i, j| rows[i][j].to_c64())
}

pub fn real_dmatrix<S: Scalar>(rows: &[Vec<S>]) -> DMatrix<f64> {
    let nr = rows.len();
    let nc = rows.first().map(|r| r.len()).unwrap_or(0);
    DMatrix::from_fn(nr, nc, |i, j| rows[i][j].re_f64())
}

/// Eigenvalues of the symmetric pencil `A x = λ B x` with `B` positive definite,
/// via the Cholesky reduction `L^{-1} A L^{-T}`. Returns `None` if `B` is not positive definite.
pub fn generalized_symmetric_eigen(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<Vec<f64>> {
    let chol = b.clone().cholesky()?;
    let l = chol.l();
    let linv = l.clone().try_inverse()?;
    let c = &linv * a * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let mut ev: Vec<f64> = c.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Some(ev)
}

/// Least-squares solution via SVD.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    svd.solve(b, 1e-13).expect("svd with u and v")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Gq;

    fn q(v: i64) -> Gq {
        Gq::int(v)
    }

    #[test]
    fn exact_nullspace() {
        let a = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]];
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &a {
                let s = row.iter().zip(v).fold(Gq::zero(), |acc, (x, y)| acc.add(&x.mul(y)));
                assert!(s.is_zero());
            }
        }
        assert_eq!(rank(&a, 3), 1);
    }

    #[test]
    fn exact_solve_and_inconsistency() {
        let a = vec![vec![q(1), q(1)], vec![q(1), q(-1)]];
        assert_eq!(solve(&a, &[q(3), q(1)]), Some(vec![q(2), q(1)]));
        let b = vec![vec![q(1), q(1)], vec![q(2), q(2)]];
        assert_eq!(solve(&b, &[q(1), q(3)]), None);
    }

    #[test]
    fn independent_subset_is_greedy() {
        let vs = vec![vec![q(1), q(0)], vec![q(2), q(0)], vec![q(0), q(1)]];
        assert_eq!(independent_subset(&vs), vec![0, 2]);
    }

    #[test]
    fn pencil_eigenvalues() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 6.0]);
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let ev = generalized_symmetric_eigen(&a, &b).unwrap();
        assert!((ev[0] - 2.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }
}
