//! sigma-positive-definite functions and the GNS construction.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{regular_rep, twisted_convolve, twisted_involution, GroupFunction};
use crate::cocycle::Cocycle;
use crate::error::{Error, Result};
use crate::group::IDENTITY;
use crate::optim::linalg::{eig_hermitian, hermitian_deviation, max_abs, operator_norm, CMatrix};

pub const PD_TOL: f64 = 1e-10;
/// Eigenvalues below this fraction of the largest are dropped by [`gns`].
pub const RANK_TOL: f64 = 1e-9;
/// Above this order [`gns`] checks the multiplication law on a subset of pairs.
const FULL_RESIDUAL_ORDER: usize = 32;

/// `K[u][t] = conj(sigma(u, u^-1)) phi(u^-1 t) sigma(u^-1, t)`, in group-index order.
#[derive(Debug, Clone)]
pub struct PdKernel {
    pub matrix: CMatrix,
}

pub fn pd_kernel(phi: &GroupFunction, sigma: &Cocycle) -> Result<PdKernel> {
    let g = phi.group();
    if !g.same_as(sigma.group()) {
        return Err(Error::GroupMismatch);
    }
    let n = g.order();
    let matrix = CMatrix::from_fn(n, n, |u, t| {
        let ui = g.inv(u);
        sigma.value(u, ui).conj() * phi.at(g.mul(ui, t)) * sigma.value(ui, t)
    });
    Ok(PdKernel { matrix })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PdTest {
    pub is_pd: bool,
    pub min_eigenvalue: f64,
    pub hermitian: bool,
}

/// Kernel test: Hermitian and `lambda_min >= -tol ||K||`. For a
/// non-Hermitian kernel the reported eigenvalue is that of its Hermitian part.
pub fn is_sigma_pd(phi: &GroupFunction, sigma: &Cocycle, tol: f64) -> Result<PdTest> {
    let k = pd_kernel(phi, sigma)?.matrix;
    let scale = operator_norm(&k).max(f64::MIN_POSITIVE);
    let hermitian = hermitian_deviation(&k) <= 1e-12 * scale.max(1.0);
    let herm = (&k + k.adjoint()) * Complex64::new(0.5, 0.0);
    let (vals, _) = eig_hermitian(&herm)?;
    let min_eigenvalue = vals.first().copied().unwrap_or(0.0);
    Ok(PdTest {
        is_pd: hermitian && min_eigenvalue >= -tol * scale,
        min_eigenvalue,
        hermitian,
    })
}

/// Positive-type oracle: the form `Q(f) = sum_s (f^* *_sigma f)(s) phi(s)`
/// evaluated through convolution and involution only.
pub fn positive_type_form(
    phi: &GroupFunction,
    sigma: &Cocycle,
    f: &GroupFunction,
) -> Result<Complex64> {
    let ff = twisted_convolve(&twisted_involution(f, sigma)?, f, sigma)?;
    Ok(ff
        .values()
        .iter()
        .zip(phi.values())
        .map(|(a, b)| a * b)
        .sum())
}

/// Decides positive type from the form alone: builds its Gram matrix from
/// `Q` by polarization on deltas and requires it Hermitian and PSD.
pub fn positive_type_oracle(phi: &GroupFunction, sigma: &Cocycle, tol: f64) -> Result<PdTest> {
    let g = phi.group();
    let n = g.order();
    let delta = |s| GroupFunction::delta(g.clone(), s);
    let i = Complex64::new(0.0, 1.0);
    let mut diag = vec![Complex64::new(0.0, 0.0); n];
    for (s, d) in diag.iter_mut().enumerate() {
        *d = positive_type_form(phi, sigma, &delta(s))?;
    }
    let mut h = CMatrix::zeros(n, n);
    for a in 0..n {
        h[(a, a)] = diag[a];
        for b in 0..n {
            if a == b {
                continue;
            }
            // Q(d_a + d_b) and Q(d_a + i d_b) recover the off-diagonal entry
            let plus = positive_type_form(phi, sigma, &delta(a).add(&delta(b))?)?;
            let twist = positive_type_form(phi, sigma, &delta(a).add(&delta(b).scale(i))?)?;
            let re = plus - diag[a] - diag[b];
            let im = twist - diag[a] - diag[b];
            // Q(x) = x^* H x: plus = ... + H_ab + H_ba, twist = ... + i H_ab - i H_ba
            h[(a, b)] = (re - i * im) * 0.5;
        }
    }
    let scale = operator_norm(&h).max(f64::MIN_POSITIVE);
    let hermitian = hermitian_deviation(&h) <= 1e-12 * scale.max(1.0);
    let herm = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let (vals, _) = eig_hermitian(&herm)?;
    let min_eigenvalue = vals.first().copied().unwrap_or(0.0);
    Ok(PdTest {
        is_pd: hermitian && min_eigenvalue >= -tol * scale,
        min_eigenvalue,
        hermitian,
    })
}

#[derive(Debug, Clone)]
pub struct GnsResult {
    pub dim: usize,
    pub rep: Vec<CMatrix>,
    pub cyclic: DVector<Complex64>,
    /// `phi(e)`; the representation reproduces `phi / phi(e)`.
    pub scale: f64,
    pub residual: f64,
}

pub fn gns(phi: &GroupFunction, sigma: &Cocycle) -> Result<GnsResult> {
    let g = phi.group();
    if !g.same_as(sigma.group()) {
        return Err(Error::GroupMismatch);
    }
    let n = g.order();
    let e = phi.at(IDENTITY);
    if e.re <= 0.0 || e.im.abs() > 1e-12 * e.norm().max(1.0) {
        return Err(Error::DegenerateState(e.re));
    }
    let test = is_sigma_pd(phi, sigma, PD_TOL)?;
    if !test.is_pd {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: test.min_eigenvalue,
        });
    }
    let psi = phi.scale(Complex64::new(1.0 / e.re, 0.0));
    let k = pd_kernel(&psi, sigma)?.matrix;
    let (vals, vecs) = eig_hermitian(&k)?;
    let top = vals.last().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..n).filter(|&i| vals[i] > RANK_TOL * top).collect();
    let r = keep.len();
    // <delta_t, delta_u> = K[u][t], so x -> Lambda^{1/2} U^* x is an isometry
    let w = CMatrix::from_fn(r, n, |i, t| {
        vecs[(t, keep[i])].conj() * vals[keep[i]].sqrt()
    });
    let w_pinv = CMatrix::from_fn(n, r, |t, i| vecs[(t, keep[i])] / vals[keep[i]].sqrt());
    let rep: Vec<CMatrix> = (0..n)
        .map(|s| &w * regular_rep(sigma, s) * &w_pinv)
        .collect();
    let cyclic = w.column(IDENTITY).into_owned();

    let mut residual = (cyclic.norm() - 1.0).abs();
    let id = CMatrix::identity(r, r);
    for (s, p) in rep.iter().enumerate() {
        residual = residual.max(max_abs(&(p.adjoint() * p - &id)));
        let c = cyclic.dotc(&(p * &cyclic));
        residual = residual.max((c - psi.at(s)).norm());
    }
    let stride = if n <= FULL_RESIDUAL_ORDER {
        1
    } else {
        n / FULL_RESIDUAL_ORDER + 1
    };
    for s in 0..n {
        for t in (0..n).step_by(stride) {
            let lhs = &rep[s] * &rep[t];
            let rhs = &rep[g.mul(s, t)] * sigma.value(s, t);
            residual = residual.max(max_abs(&(lhs - rhs)));
        }
    }
    Ok(GnsResult {
        dim: r,
        rep,
        cyclic,
        scale: e.re,
        residual,
    })
}

/// `phi(s) = <lambda_sigma(s) f, f>` for `f` rescaled to unit norm.
pub fn autocorrelation_pd(f: &GroupFunction, sigma: &Cocycle) -> Result<GroupFunction> {
    let g = f.group();
    if !g.same_as(sigma.group()) {
        return Err(Error::GroupMismatch);
    }
    let norm = f.norm2();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let v = f.scale(Complex64::new(1.0 / norm, 0.0)).as_vector();
    Ok(GroupFunction::from_fn(g.clone(), |s| {
        v.dotc(&(regular_rep(sigma, s) * &v))
    }))
}

/// `pi_{xi,eta}(s) = <pi(s) xi, eta>`.
pub fn coefficient(
    group: std::sync::Arc<crate::group::FiniteGroup>,
    rep: &[CMatrix],
    xi: &DVector<Complex64>,
    eta: &DVector<Complex64>,
) -> Result<GroupFunction> {
    if rep.len() != group.order() {
        return Err(Error::DimensionMismatch {
            expected: group.order(),
            found: rep.len(),
        });
    }
    let d = xi.len();
    if eta.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: eta.len(),
        });
    }
    if let Some(p) = rep.iter().find(|p| p.nrows() != d || p.ncols() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: p.nrows(),
        });
    }
    Ok(GroupFunction::from_fn(group, |s| eta.dotc(&(&rep[s] * xi))))
}
