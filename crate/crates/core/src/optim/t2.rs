//! The split norm
//!
//! `t2(psi) = inf { ||psi1||_R + ||psi2||_C : psi1 + psi2 = psi }`
//!
//! with `||.||_R` the largest row l2-norm and `||.||_C` the largest column
//! l2-norm, solved by Chambolle-Pock on `min_x ||x||_R + ||psi - x||_C`.
//! The dual problem is `sup |<psi, c>|` over `c` whose row norms and column
//! norms each sum to at most one; every dual iterate rescaled into that set
//! is a certified lower bound.

use num_complex::Complex64;

use super::linalg::CMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct T2Options {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for T2Options {
    fn default() -> Self {
        T2Options {
            tol: 1e-6,
            max_iter: 200_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct T2Split {
    pub value: f64,
    pub psi1: CMatrix,
    pub psi2: CMatrix,
    pub dual_bound: f64,
    pub gap: f64,
    pub iterations: usize,
    /// Set when the iteration budget ran out before `gap <= tol`.
    pub budget_exhausted: bool,
}

fn row_norms(m: &CMatrix) -> Vec<f64> {
    (0..m.nrows()).map(|i| m.row(i).norm()).collect()
}

fn col_norms(m: &CMatrix) -> Vec<f64> {
    (0..m.ncols()).map(|j| m.column(j).norm()).collect()
}

pub fn max_row_norm(m: &CMatrix) -> f64 {
    row_norms(m).into_iter().fold(0.0, f64::max)
}

pub fn max_col_norm(m: &CMatrix) -> f64 {
    col_norms(m).into_iter().fold(0.0, f64::max)
}

/// Euclidean projection of a nonnegative vector onto `{x >= 0, sum x <= 1}`.
fn project_l1(r: &[f64]) -> Vec<f64> {
    if r.iter().sum::<f64>() <= 1.0 {
        return r.to_vec();
    }
    let mut sorted = r.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        acc += v;
        let t = (acc - 1.0) / (k + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    r.iter().map(|&v| (v - theta).max(0.0)).collect()
}

/// Projection onto the unit ball of the sum of row norms (`rows`) or of
/// column norms.
fn project_ball(m: &CMatrix, rows: bool) -> CMatrix {
    let norms = if rows { row_norms(m) } else { col_norms(m) };
    let target = project_l1(&norms);
    let mut out = m.clone();
    for (i, (&old, &new)) in norms.iter().zip(&target).enumerate() {
        let f = if old > 0.0 { new / old } else { 0.0 };
        if rows {
            out.row_mut(i).scale_mut(f);
        } else {
            out.column_mut(i).scale_mut(f);
        }
    }
    out
}

fn primal_value(psi: &CMatrix, x: &CMatrix) -> f64 {
    max_row_norm(x) + max_col_norm(&(psi - x))
}

/// `|<psi, c>|` after scaling `c` into the dual feasible set.
fn dual_value(psi: &CMatrix, c: &CMatrix) -> f64 {
    let s = row_norms(c)
        .iter()
        .sum::<f64>()
        .max(col_norms(c).iter().sum::<f64>());
    if s == 0.0 {
        return 0.0;
    }
    psi.iter()
        .zip(c.iter())
        .map(|(a, b)| a * b.conj())
        .sum::<Complex64>()
        .norm()
        / s
}

pub fn t2_split(psi: &CMatrix, opts: T2Options) -> Result<T2Split> {
    if psi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let (r, c) = psi.shape();
    let zero = CMatrix::zeros(r, c);
    if psi.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Ok(T2Split {
            value: 0.0,
            psi1: zero.clone(),
            psi2: zero,
            dual_bound: 0.0,
            gap: 0.0,
            iterations: 0,
            budget_exhausted: false,
        });
    }

    // start from the better of the two trivial splits
    let (mut best_x, mut best_primal) = if max_row_norm(psi) <= max_col_norm(psi) {
        (psi.clone(), max_row_norm(psi))
    } else {
        (zero.clone(), max_col_norm(psi))
    };
    let mut best_dual = 0.0f64;

    let (tau, sigma) = (0.99, 0.99);
    let mut x = best_x.clone();
    let mut x_bar = x.clone();
    let mut y = zero.clone();
    let mut x_sum = zero.clone();
    let mut y_sum = zero.clone();
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        y = project_ball(&(&y + (&x_bar - psi) * Complex64::new(sigma, 0.0)), false);
        let v = &x - &y * Complex64::new(tau, 0.0);
        let x_new =
            &v - project_ball(&(&v / Complex64::new(tau, 0.0)), true) * Complex64::new(tau, 0.0);
        x_bar = &x_new * Complex64::new(2.0, 0.0) - &x;
        x = x_new;
        x_sum += &x;
        y_sum += &y;

        if iterations % 20 == 0 {
            let k = Complex64::new(1.0 / iterations as f64, 0.0);
            let x_avg = &x_sum * k;
            for cand in [&x, &x_avg] {
                let p = primal_value(psi, cand);
                if p < best_primal {
                    best_primal = p;
                    best_x = cand.clone();
                }
            }
            best_dual = best_dual
                .max(dual_value(psi, &y))
                .max(dual_value(psi, &(&y_sum * k)));
            if best_dual > best_primal * (1.0 + 1e-12) + 1e-12 {
                return Err(Error::SolverFailure(format!(
                    "t2 weak duality violated: {best_dual} > {best_primal}"
                )));
            }
            if best_primal - best_dual <= opts.tol {
                break;
            }
        }
    }
    let gap = (best_primal - best_dual).max(0.0);
    if !best_primal.is_finite() {
        return Err(Error::SolverFailure("t2 iterates diverged".into()));
    }
    let psi2 = psi - &best_x;
    Ok(T2Split {
        value: best_primal,
        psi1: best_x,
        psi2,
        dual_bound: best_dual,
        gap,
        iterations,
        budget_exhausted: gap > opts.tol,
    })
}
