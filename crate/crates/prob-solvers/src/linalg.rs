//! Exact linear solves by fraction-free (Bareiss) elimination.
//!
//! The first-passage systems that reachability analysis produces are
//! small and dense-ish; solving them is done entirely over integers after
//! clearing denominators row by row, with the Bareiss update keeping every
//! intermediate entry an exact minor (the divisions below are exact by
//! construction). No floating point, no rounding.

use game_core::rational::Rational;
use num::bigint::BigInt;
use num::{Integer, One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("singular system (no pivot in column {0})")]
    Singular(usize),
    #[error("dimension mismatch: {rows} rows, {cols} coefficient columns, {rhs} rhs entries")]
    Shape { rows: usize, cols: usize, rhs: usize },
}

/// Solves `a · x = b` exactly. `a` must be square and non-singular.
pub fn solve_exact(a: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
    let m = a.len();
    if b.len() != m || a.iter().any(|row| row.len() != m) {
        return Err(LinalgError::Shape {
            rows: m,
            cols: a.first().map_or(0, |r| r.len()),
            rhs: b.len(),
        });
    }
    if m == 0 {
        return Ok(Vec::new());
    }

    // Clear denominators per row: multiply row i (and b_i) by the lcm of
    // all denominators in it. Solutions are unchanged.
    let mut mat: Vec<Vec<BigInt>> = Vec::with_capacity(m);
    for (row, rhs) in a.iter().zip(b) {
        let mut lcm = BigInt::one();
        for entry in row.iter().chain(std::iter::once(rhs)) {
            lcm = lcm.lcm(entry.denom());
        }
        let mut int_row: Vec<BigInt> = Vec::with_capacity(m + 1);
        for entry in row.iter().chain(std::iter::once(rhs)) {
            int_row.push(entry.numer() * (&lcm / entry.denom()));
        }
        mat.push(int_row);
    }

    // Bareiss elimination with row pivoting on the augmented matrix.
    let mut prev = BigInt::one();
    for k in 0..m {
        let pivot_row = (k..m)
            .find(|&r| !mat[r][k].is_zero())
            .ok_or(LinalgError::Singular(k))?;
        mat.swap(k, pivot_row);
        for i in k + 1..m {
            for j in k + 1..=m {
                let num = &mat[k][k] * &mat[i][j] - &mat[i][k] * &mat[k][j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                mat[i][j] = q;
            }
            mat[i][k] = BigInt::zero();
        }
        prev = mat[k][k].clone();
    }

    // Back substitution over rationals.
    let mut x = vec![Rational::zero(); m];
    for i in (0..m).rev() {
        let mut acc = Rational::from(mat[i][m].clone());
        for j in i + 1..m {
            acc -= Rational::from(mat[i][j].clone()) * &x[j];
        }
        x[i] = acc / Rational::from(mat[i][i].clone());
    }

    debug_assert!({
        a.iter().zip(b).all(|(row, rhs)| {
            let lhs: Rational =
                row.iter().zip(&x).map(|(c, xi)| c * xi).fold(Rational::zero(), |s, t| s + t);
            &lhs == rhs
        })
    });
    Ok(x)
}

/// Reference implementation: plain Gauss–Jordan over rationals. Exists to
/// cross-check [`solve_exact`] in tests; do not use on hot paths.
pub fn solve_naive(a: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
    let m = a.len();
    if b.len() != m || a.iter().any(|row| row.len() != m) {
        return Err(LinalgError::Shape {
            rows: m,
            cols: a.first().map_or(0, |r| r.len()),
            rhs: b.len(),
        });
    }
    let mut mat: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| row.iter().cloned().chain(std::iter::once(rhs.clone())).collect())
        .collect();
    for k in 0..m {
        let pivot = (k..m)
            .find(|&r| !mat[r][k].is_zero())
            .ok_or(LinalgError::Singular(k))?;
        mat.swap(k, pivot);
        let p = mat[k][k].clone();
        for j in k..=m {
            mat[k][j] = &mat[k][j] / &p;
        }
        for i in 0..m {
            if i != k && !mat[i][k].is_zero() {
                let factor = mat[i][k].clone();
                for j in k..=m {
                    let delta = &factor * &mat[k][j];
                    mat[i][j] = &mat[i][j] - &delta;
                }
            }
        }
    }
    Ok(mat.into_iter().map(|row| row[m].clone()).collect())
}
