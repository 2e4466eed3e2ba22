//! Dense linear solves for the chain evaluators.
//!
//! LU factorization with partial pivoting, solved exactly once and
//! reused across right-hand sides (the absorption computation solves
//! one system per recurrent class). Systems here come from Markov
//! chains, so they are small, well scaled, and nonsingular by
//! construction; a singular factorization signals a caller bug. Beyond
//! a size threshold the wrapper adds iterative refinement passes to
//! hold the residual down.

use thiserror::Error;

use crate::scalar::{real, Real};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("linear system is singular")]
pub struct SingularSystem;

/// Row-pivoted LU factorization of a square matrix.
pub struct LuFactors<S> {
    lu: Vec<Vec<S>>,
    perm: Vec<usize>,
}

/// Matrix size beyond which solves add refinement passes.
const REFINEMENT_THRESHOLD: usize = 2000;

pub fn lu_factor<S: Real>(mut a: Vec<Vec<S>>) -> Result<LuFactors<S>, SingularSystem> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n), "matrix must be square");
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(S::zero(), |acc, &x| acc.max(x.abs()));
    if scale == S::zero() && n > 0 {
        return Err(SingularSystem);
    }
    let tiny = scale * S::epsilon() * real::<S>(n.max(1) as f64);

    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let pivot_row = (k..n)
            .max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).expect("finite entries"))
            .expect("nonempty range");
        if a[pivot_row][k].abs() <= tiny {
            return Err(SingularSystem);
        }
        if pivot_row != k {
            a.swap(k, pivot_row);
            perm.swap(k, pivot_row);
        }
        let pivot = a[k][k];
        for i in k + 1..n {
            let factor = a[i][k] / pivot;
            a[i][k] = factor;
            if factor != S::zero() {
                // Split borrow: row k is read-only while row i updates.
                let (upper, lower) = a.split_at_mut(i);
                let row_k = &upper[k];
                let row_i = &mut lower[0];
                for j in k + 1..n {
                    row_i[j] = row_i[j] - factor * row_k[j];
                }
            }
        }
    }
    Ok(LuFactors { lu: a, perm })
}

impl<S: Real> LuFactors<S> {
    /// Solves A·x = b for the factored A.
    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, b: &[S]) -> Vec<S> {
        let n = self.lu.len();
        debug_assert_eq!(b.len(), n);
        // Forward substitution on the permuted right-hand side.
        let mut x: Vec<S> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc = acc - self.lu[i][j] * x[j];
            }
            x[i] = acc;
        }
        // Back substitution.
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc = acc - self.lu[i][j] * x[j];
            }
            x[i] = acc / self.lu[i][i];
        }
        x
    }
}

/// Factors and solves in one call. Large systems get up to three
/// refinement passes against a retained copy of the matrix.
pub fn solve_system<S: Real>(a: Vec<Vec<S>>, b: &[S]) -> Result<Vec<S>, SingularSystem> {
    let n = a.len();
    if n <= REFINEMENT_THRESHOLD {
        return Ok(lu_factor(a)?.solve(b));
    }
    let original = a.clone();
    let factors = lu_factor(a)?;
    let mut x = factors.solve(b);
    for _ in 0..3 {
        let mut residual = b.to_vec();
        for (i, row) in original.iter().enumerate() {
            let ax: S = row.iter().zip(&x).map(|(&aij, &xj)| aij * xj).sum();
            residual[i] = residual[i] - ax;
        }
        let correction = factors.solve(&residual);
        let x_norm = x.iter().fold(S::zero(), |acc, v| acc.max(v.abs()));
        let c_norm = correction.iter().fold(S::zero(), |acc, v| acc.max(v.abs()));
        for (xi, ci) in x.iter_mut().zip(&correction) {
            *xi = *xi + *ci;
        }
        if c_norm <= S::epsilon() * x_norm {
            break;
        }
    }
    Ok(x)
}
