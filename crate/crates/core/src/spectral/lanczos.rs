//! Thick-restart Lanczos with full reorthogonalization.
//!
//! Each cycle grows an orthonormal Krylov basis `V` to `m` vectors. Every new
//! vector is orthogonalized against the whole basis by classical Gram–Schmidt
//! with a conditional second pass, and the projection coefficients become the
//! column of the projected matrix `H = V^T A V`. Because of this, the arrow
//! coupling created by a thick restart is picked up without bookkeeping. At a
//! restart the best `k` Ritz vectors are kept and the last residual
//! direction continues the expansion.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::symmetric_eigen_ascending;
use crate::error::{Error, Result};
use crate::matrix::{axpy, dot, fix_sign, norm, scale, ColumnMatrix};
use crate::operator::{SpectralEnd, SymmetricOperator};

#[derive(Debug, Clone)]
pub(crate) struct LanczosParams {
    pub count: usize,
    pub end: SpectralEnd,
    pub subspace: usize,
    pub tolerance: f64,
    pub max_restarts: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub(crate) struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: ColumnMatrix,
    pub residuals: Vec<f64>,
    pub restarts: usize,
    pub applications: usize,
}

pub(crate) fn thick_restart_lanczos<O>(op: &O, params: &LanczosParams) -> Result<EigenPairs>
where
    O: SymmetricOperator + ?Sized,
{
    let n = op.dim();
    let nev = params.count;
    assert!(nev >= 1 && nev <= n, "eigenpair count out of range");
    let m = params.subspace.clamp(nev, n);
    // Number of Ritz vectors carried over at each restart.
    let keep = if m == n {
        nev
    } else {
        (nev + (m - nev) / 2).min(m - 1)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let start = random_orthonormal(&mut rng, n, &basis).ok_or(Error::EmptyGraph)?;
    basis.push(start);

    let mut h = ColumnMatrix::zeros(m, m);
    let mut w = vec![0.0; n];
    let mut kept = 0usize;
    let mut anorm = 0.0f64;
    let mut applications = 0usize;
    let mut worst = f64::INFINITY;
    let mut converged = 0usize;

    for restart in 0..=params.max_restarts {
        // Expand the basis from `kept` to `m` vectors.
        let mut beta_last = 0.0;
        let mut j = kept;
        while j < m {
            op.apply_into(&basis[j], &mut w);
            applications += 1;
            let coeffs = orthogonalize(&basis[..=j], &mut w);
            for (i, &c) in coeffs.iter().enumerate() {
                h.set(i, j, c);
                h.set(j, i, c);
                anorm = anorm.max(c.abs());
            }
            let beta = norm(&w);
            let invariant = beta <= 1e-12 * anorm.max(f64::MIN_POSITIVE);
            if j + 1 == m {
                if m == n {
                    beta_last = 0.0;
                } else if invariant {
                    beta_last = 0.0;
                    match random_orthonormal(&mut rng, n, &basis) {
                        Some(v) => basis.push(v),
                        None => beta_last = 0.0,
                    }
                } else {
                    beta_last = beta;
                    scale(1.0 / beta, &mut w);
                    basis.push(w.clone());
                }
                break;
            }
            if invariant {
                // Restart the Krylov sequence in a fresh direction; the coupling is zero.
                let v = random_orthonormal(&mut rng, n, &basis[..=j])
                    .expect("basis smaller than dimension");
                h.set(j + 1, j, 0.0);
                h.set(j, j + 1, 0.0);
                basis.push(v);
            } else {
                h.set(j + 1, j, beta);
                h.set(j, j + 1, beta);
                scale(1.0 / beta, &mut w);
                basis.push(w.clone());
            }
            j += 1;
        }

        let (theta, y) = symmetric_eigen_ascending(&h)?;
        let order: Vec<usize> = match params.end {
            SpectralEnd::SmallestFirst => (0..m).collect(),
            SpectralEnd::LargestFirst => (0..m).rev().collect(),
        };
        let estimates: Vec<f64> = order[..nev]
            .iter()
            .map(|&c| (beta_last * y.get(m - 1, c)).abs())
            .collect();

        if estimates.iter().all(|&r| r < params.tolerance) {
            let pairs = ritz_pairs(op, &basis[..m], &theta, &y, &order[..nev]);
            applications += nev;
            worst = pairs.residuals.iter().copied().fold(0.0, f64::max);
            converged = pairs
                .residuals
                .iter()
                .filter(|&&r| r < params.tolerance)
                .count();
            if converged == nev {
                return Ok(EigenPairs {
                    restarts: restart,
                    applications,
                    ..pairs
                });
            }
        } else {
            worst = estimates.iter().copied().fold(0.0, f64::max);
            converged = estimates.iter().filter(|&&r| r < params.tolerance).count();
        }

        if m == n {
            // The Krylov space is the whole space; more cycles cannot help.
            break;
        }

        // Thick restart: keep the best `keep` Ritz vectors plus the residual direction.
        let residual = basis.pop().expect("residual direction");
        let mut next = combine(&basis, &y, &order[..keep], n);
        h = ColumnMatrix::zeros(m, m);
        for (i, &c) in order[..keep].iter().enumerate() {
            h.set(i, i, theta[c]);
        }
        next.push(residual);
        // Guard against drift in the rotated vectors before continuing.
        for i in 0..next.len() {
            let (done, rest) = next.split_at_mut(i);
            let v = &mut rest[0];
            orthogonalize(done, v);
            let nv = norm(v);
            scale(1.0 / nv, v);
        }
        basis = next;
        kept = keep;
    }

    Err(Error::NonConvergence {
        iterations: params.max_restarts,
        converged,
        requested: nev,
        tolerance: params.tolerance,
        worst_residual: worst,
    })
}

/// Classical Gram–Schmidt of `w` against `basis`, repeated once when the
/// first pass removes most of the norm (DGKS criterion); returns the summed
/// coefficients.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    let mut before = norm(w);
    for _ in 0..2 {
        let pass: Vec<f64> = basis.iter().map(|b| dot(b, w)).collect();
        for (b, &c) in basis.iter().zip(&pass) {
            axpy(-c, b, w);
        }
        for (acc, c) in coeffs.iter_mut().zip(pass) {
            *acc += c;
        }
        let after = norm(w);
        if after > std::f64::consts::FRAC_1_SQRT_2 * before {
            break;
        }
        before = after;
    }
    coeffs
}

/// Columns `sum_i y[i, c] * basis[i]` for each wanted `c`, blocked by rows so
/// the basis slices stay in cache.
fn combine(basis: &[Vec<f64>], y: &ColumnMatrix, wanted: &[usize], n: usize) -> Vec<Vec<f64>> {
    const BLOCK: usize = 512;
    let mut out = vec![vec![0.0; n]; wanted.len()];
    for start in (0..n).step_by(BLOCK) {
        let end = (start + BLOCK).min(n);
        for (v, &c) in out.iter_mut().zip(wanted) {
            let target = &mut v[start..end];
            for (i, b) in basis.iter().enumerate() {
                axpy(y.get(i, c), &b[start..end], target);
            }
        }
    }
    out
}

fn random_orthonormal(rng: &mut ChaCha8Rng, n: usize, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        orthogonalize(basis, &mut v);
        let nv = norm(&v);
        if nv > 1e-8 {
            scale(1.0 / nv, &mut v);
            return Some(v);
        }
    }
    None
}

fn ritz_pairs<O>(
    op: &O,
    basis: &[Vec<f64>],
    theta: &[f64],
    y: &ColumnMatrix,
    wanted: &[usize],
) -> EigenPairs
where
    O: SymmetricOperator + ?Sized,
{
    let n = op.dim();
    let columns = combine(basis, y, wanted, n);
    let mut vectors = ColumnMatrix::zeros(n, wanted.len());
    let mut residuals = Vec::with_capacity(wanted.len());
    let mut values = Vec::with_capacity(wanted.len());
    let mut av = vec![0.0; n];
    for (col, (&c, v)) in wanted.iter().zip(columns).enumerate() {
        let u = vectors.column_mut(col);
        u.copy_from_slice(&v);
        let nu = norm(u);
        scale(1.0 / nu, u);
        fix_sign(u);
        op.apply_into(u, &mut av);
        let lambda = theta[c];
        axpy(-lambda, u, &mut av);
        residuals.push(norm(&av));
        values.push(lambda);
    }
    EigenPairs {
        values,
        vectors,
        residuals,
        restarts: 0,
        applications: 0,
    }
}
