//! Exact dense linear algebra over ℚ(i), plus inversion of series matrices
//! whose constant part is invertible.

use crate::coeff::GaussRational;
use crate::error::{Error, Result};
use crate::series::Series;

pub type Matrix = Vec<Vec<GaussRational>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![GaussRational::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = GaussRational::one();
    }
    m
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let cols = b.first().map(|r| r.len()).unwrap_or(0);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = GaussRational::zero();
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[k][j].is_zero() {
                            acc += &(x * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, v: &[GaussRational]) -> Vec<GaussRational> {
    a.iter()
        .map(|row| {
            let mut acc = GaussRational::zero();
            for (x, y) in row.iter().zip(v) {
                acc += &(x * y);
            }
            acc
        })
        .collect()
}

pub fn conj_matrix(a: &Matrix) -> Matrix {
    a.iter().map(|r| r.iter().map(GaussRational::conj).collect()).collect()
}

/// Reduced row echelon form with pivots chosen by lowest row index; returns
/// the pivot columns.
pub fn rref(a: &Matrix) -> (Matrix, Vec<usize>) {
    let mut m = a.clone();
    let rows = m.len();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    if !m[r][j].is_zero() {
                        let d = &f * &m[r][j];
                        m[i][j] -= &d;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank(a: &Matrix) -> usize {
    rref(a).1.len()
}

/// Basis of `{v : a v = 0}` for a matrix with `cols` columns (rows may be
/// empty). One vector per free column, with a 1 in that column.
pub fn kernel(a: &Matrix, cols: usize) -> Vec<Vec<GaussRational>> {
    if a.is_empty() {
        return (0..cols)
            .map(|j| {
                let mut v = vec![GaussRational::zero(); cols];
                v[j] = GaussRational::one();
                v
            })
            .collect();
    }
    let (m, pivots) = rref(a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![GaussRational::zero(); cols];
            v[f] = GaussRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -&m[r][f];
            }
            v
        })
        .collect()
}

/// One solution of `a x = b` with free variables set to zero, or `None` when
/// inconsistent.
pub fn solve(a: &Matrix, b: &[GaussRational]) -> Option<Vec<GaussRational>> {
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (m, pivots) = rref(&aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![GaussRational::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = m[r][cols].clone();
    }
    Some(x)
}

pub fn det(a: &Matrix) -> GaussRational {
    let n = a.len();
    let mut m = a.clone();
    let mut d = GaussRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else { return GaussRational::zero() };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        let inv = m[c][c].inv().expect("nonzero pivot");
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..n {
                let t = &f * &m[c][j];
                m[i][j] -= &t;
            }
        }
    }
    d
}

pub fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let aug: Matrix = a
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let (m, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub type SeriesMatrix = Vec<Vec<Series>>;

/// Inverse of a square series matrix by Gauss-Jordan elimination, always
/// pivoting on an entry with nonzero constant term.
pub fn invert_series_matrix(a: &SeriesMatrix) -> Result<SeriesMatrix> {
    let n = a.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let nv = a[0][0].nvars();
    let trunc = a.iter().flatten().map(Series::trunc).min().unwrap_or(0);
    let mut m: SeriesMatrix = a.clone();
    let mut inv: SeriesMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Series::one(nv, trunc) } else { Series::zero(nv, trunc) })
                .collect()
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].constant_term().is_zero()).ok_or(Error::NotAUnit)?;
        m.swap(p, c);
        inv.swap(p, c);
        let r = m[c][c].reciprocal()?;
        for j in 0..n {
            m[c][j] = &m[c][j] * &r;
            inv[c][j] = &inv[c][j] * &r;
        }
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in 0..n {
                m[i][j] = &m[i][j] - &(&f * &m[c][j]);
                inv[i][j] = &inv[i][j] - &(&f * &inv[c][j]);
            }
        }
    }
    Ok(inv)
}

pub fn series_mat_mul(a: &SeriesMatrix, b: &SeriesMatrix) -> SeriesMatrix {
    let n = a.len();
    let k = b.len();
    let cols = b.first().map(|r| r.len()).unwrap_or(0);
    (0..n)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    let mut acc = &a[i][0] * &b[0][j];
                    for l in 1..k {
                        acc = &acc + &(&a[i][l] * &b[l][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}
