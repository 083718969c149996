//! Dense symmetric eigendecomposition.
//!
//! Householder reduction to tridiagonal form followed by implicit QL with
//! Wilkinson-style shifts (the EISPACK `tred2`/`tql2` pair). Used for the
//! `W x W` concentration matrices and for the Lanczos projected matrices.

// Index loops follow the reference tridiagonalization.
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use crate::matrix::{fix_sign, ColumnMatrix};

/// Largest matrix accepted by [`solve_dense_symmetric`].
pub const DENSE_SIZE_LIMIT: usize = 512;

/// Absolute asymmetry tolerated by [`solve_dense_symmetric`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct DenseEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, sign-fixed.
    pub vectors: ColumnMatrix,
}

/// Full eigendecomposition of a small symmetric matrix, eigenvalues descending.
pub fn solve_dense_symmetric(m: &ColumnMatrix) -> Result<DenseEigen> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::NotSquare {
            rows: n,
            cols: m.cols(),
        });
    }
    if n > DENSE_SIZE_LIMIT {
        return Err(Error::MatrixTooLarge {
            size: n,
            limit: DENSE_SIZE_LIMIT,
        });
    }
    let asym = max_asymmetry(m);
    if asym > SYMMETRY_TOLERANCE {
        return Err(Error::Asymmetric {
            max_asymmetry: asym,
        });
    }
    let (ascending, vectors) = symmetric_eigen_ascending(m)?;
    let order: Vec<usize> = (0..n).rev().collect();
    Ok(reorder(&ascending, &vectors, &order))
}

pub(crate) fn max_asymmetry(m: &ColumnMatrix) -> f64 {
    let n = m.rows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..j {
            worst = worst.max((m.get(i, j) - m.get(j, i)).abs());
        }
    }
    worst
}

/// Eigenpairs in ascending order. Only the lower triangle is read. No size guard.
pub(crate) fn symmetric_eigen_ascending(m: &ColumnMatrix) -> Result<(Vec<f64>, ColumnMatrix)> {
    let n = m.rows();
    if n == 0 {
        return Ok((Vec::new(), ColumnMatrix::zeros(0, 0)));
    }
    // Row-major working copy, symmetrized from the lower triangle.
    let mut v = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let x = m.get(i, j);
            v[i][j] = x;
            v[j][i] = x;
        }
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| d[k]).collect();
    let mut vectors = ColumnMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let dst = vectors.column_mut(col);
        for i in 0..n {
            dst[i] = v[i][k];
        }
        fix_sign(dst);
    }
    Ok((values, vectors))
}

fn reorder(values: &[f64], vectors: &ColumnMatrix, order: &[usize]) -> DenseEigen {
    let n = vectors.rows();
    let mut out = ColumnMatrix::zeros(n, order.len());
    for (col, &k) in order.iter().enumerate() {
        out.column_mut(col).copy_from_slice(vectors.column(k));
    }
    DenseEigen {
        values: order.iter().map(|&k| values[k]).collect(),
        vectors: out,
    }
}

/// Householder tridiagonalization. On return `v` holds the orthogonal
/// transform, `d` the diagonal and `e[1..]` the subdiagonal.
fn tred2(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    d.copy_from_slice(&v[n - 1]);

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }

            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in j + 1..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for i in 0..n - 1 {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for row in v.iter_mut().take(i + 1) {
            row[i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the tridiagonal matrix, accumulating into `v`.
fn tql2(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    let max_sweeps = 60;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_sweeps {
                    return Err(Error::DenseNoConvergence { index: l });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in v.iter_mut() {
                        h = row[i + 1];
                        row[i + 1] = s * row[i] + c * h;
                        row[i] = c * row[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}
