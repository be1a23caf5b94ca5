//! Small dense linear algebra: symmetric eigenvalues and SVD by Jacobi
//! rotations, exact rational elimination, and symbolic determinants.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::polyalg::{Poly, Rational};

/// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
pub fn symmetric_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j] * m[i][j]).sum();
        let diag: f64 = (0..n).map(|i| m[i][i] * m[i][i]).sum();
        if off <= 1e-32 * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    ev
}

/// Right-singular structure of a `rows x cols` matrix: singular values
/// (descending) paired with unit right-singular vectors.
pub struct RightSvd {
    pub singular_values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// One-sided (Hestenes) Jacobi SVD. Works for any shape; accurate for the
/// small singular values that decide numerical rank.
pub fn right_svd(a: &[Vec<f64>], cols: usize) -> RightSvd {
    let rows = a.len();
    // Work on columns of A.
    let mut colv: Vec<Vec<f64>> = (0..cols).map(|j| (0..rows).map(|i| a[i][j]).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..cols).map(|j| (0..cols).map(|i| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = dot(&colv[p], &colv[p]);
                let beta = dot(&colv[q], &colv[q]);
                let gamma = dot(&colv[p], &colv[q]);
                if gamma == 0.0 || gamma.abs() <= 1e-15 * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..rows {
                    let (xp, xq) = (colv[p][i], colv[q][i]);
                    colv[p][i] = c * xp - s * xq;
                    colv[q][i] = s * xp + c * xq;
                }
                for vi in v.iter_mut() {
                    let (xp, xq) = (vi[p], vi[q]);
                    vi[p] = c * xp - s * xq;
                    vi[q] = s * xp + c * xq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..cols)
        .map(|j| (libm::sqrt(dot(&colv[j], &colv[j])), v.iter().map(|row| row[j]).collect()))
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(core::cmp::Ordering::Equal));
    let (singular_values, vectors) = pairs.into_iter().unzip();
    RightSvd { singular_values, vectors }
}

/// Reduced row echelon form over the rationals; returns the pivot columns.
pub fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, pr);
        let inv = Rational::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x *= inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in 0..cols {
                    let d = m[r][j].clone() * factor.clone();
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rational_rank(m: &[Vec<Rational>]) -> usize {
    let mut w = m.to_vec();
    rref(&mut w).len()
}

/// Basis of `{x : M x = 0}` for an `rows x cols` rational matrix.
pub fn rational_kernel(m: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut w = m.to_vec();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut x = vec![Rational::zero(); cols];
            x[fc] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = -w[r][fc].clone();
            }
            x
        })
        .collect()
}

pub fn rational_det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut w = m.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !w[i][c].is_zero()) else { return Rational::zero() };
        if pr != c {
            w.swap(c, pr);
            det = -det;
        }
        let piv = w[c][c].clone();
        det *= piv.clone();
        for i in c + 1..n {
            if w[i][c].is_zero() {
                continue;
            }
            let factor = w[i][c].clone() / piv.clone();
            for j in c..n {
                let d = w[c][j].clone() * factor.clone();
                w[i][j] -= d;
            }
        }
    }
    det
}

/// Determinant of a square matrix of polynomials by cofactor expansion
/// along the row with the most zeros.
pub fn poly_det(m: &[Vec<Poly>], nvars: usize) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one(nvars);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let row = (0..n).max_by_key(|&i| m[i].iter().filter(|p| p.is_zero()).count()).unwrap_or(0);
    let mut acc = Poly::zero(nvars);
    for col in 0..n {
        if m[row][col].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = (0..n)
            .filter(|&i| i != row)
            .map(|i| (0..n).filter(|&j| j != col).map(|j| m[i][j].clone()).collect())
            .collect();
        let term = &m[row][col] * &poly_det(&minor, nvars);
        acc = if (row + col) % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::rat;

    #[test]
    fn eigenvalues_of_known_matrix() {
        let ev = symmetric_eigenvalues(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn svd_rank_deficient() {
        // Rows (1,2,3), (2,4,6): rank one.
        let svd = right_svd(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]], 3);
        assert!((svd.singular_values[0] - libm::sqrt(70.0)).abs() < 1e-12);
        assert!(svd.singular_values[1] < 1e-12 && svd.singular_values[2] < 1e-12);
    }

    #[test]
    fn exact_kernel_and_det() {
        let m = vec![vec![rat(1, 1), rat(2, 1), rat(3, 1)], vec![rat(2, 1), rat(4, 1), rat(6, 1)]];
        assert_eq!(rational_rank(&m), 1);
        let ker = rational_kernel(&m, 3);
        assert_eq!(ker.len(), 2);
        for x in &ker {
            let s: Rational = m[0].iter().zip(x).map(|(a, b)| a * b).sum();
            assert!(s.is_zero());
        }
        let sq = vec![vec![rat(2, 1), rat(1, 1)], vec![rat(1, 1), rat(2, 1)]];
        assert_eq!(rational_det(&sq), rat(3, 1));
    }
}
