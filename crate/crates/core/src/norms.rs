//! Twisted Fourier-Stieltjes norm, cb multiplier norm and Littlewood norm.

use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{GroupFunction, TwistedOperator};
use crate::cocycle::{cocycle_conjugate, cocycle_product, Cocycle};
use crate::error::{Error, Result};
use crate::optim::gamma2::{gamma2, Gamma2Options};
use crate::optim::linalg::{operator_norm, CMatrix};
use crate::optim::t2::{t2_split, T2Options};

fn check_group(phi: &GroupFunction, sigma: &Cocycle) -> Result<()> {
    if phi.group().same_as(sigma.group()) {
        Ok(())
    } else {
        Err(Error::GroupMismatch)
    }
}

#[derive(Debug, Clone)]
pub struct FourierStieltjesCertificate {
    pub value: f64,
    /// `Y` with `tau(lambda_sigma(t) Y) = phi(t)`.
    pub dual_element: TwistedOperator,
    pub singular_values: Vec<f64>,
    /// `sum_t a_t phi(t)` for the coefficients `a` of the contraction built
    /// from the polar part of `Y`.
    pub repaired: Complex64,
    /// Operator norm of that contraction.
    pub contraction_norm: f64,
}

impl FourierStieltjesCertificate {
    pub const METHOD: &'static str = "trace-duality";
}

/// Coefficients `c_s = phi(s^-1) conj(sigma(s^-1, s))` of the trace dual of `phi`.
pub fn trace_dual(phi: &GroupFunction, sigma: &Cocycle) -> Result<TwistedOperator> {
    check_group(phi, sigma)?;
    let g = phi.group();
    let coeffs = (0..g.order())
        .map(|s| {
            let si = g.inv(s);
            phi.at(si) * sigma.value(si, s).conj()
        })
        .collect();
    TwistedOperator::from_coeffs(sigma, coeffs)
}

/// `||phi||_{B(G,sigma)} = tau(|Y|)`; for finite `G` also the `A(G,sigma)` norm.
pub fn fourier_stieltjes_norm(
    phi: &GroupFunction,
    sigma: &Cocycle,
) -> Result<FourierStieltjesCertificate> {
    let y = trace_dual(phi, sigma)?;
    let n = phi.group().order();
    let svd = y.matrix().clone().svd(true, true);
    let mut singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let value = singular_values.iter().sum::<f64>() / n as f64;

    // T = V U^*, projected back onto VN(G, sigma) by the trace-preserving
    // conditional expectation, which is contractive
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^*");
    let t = v_t.adjoint() * u.adjoint();
    let projected = TwistedOperator::from_coeffs(sigma, recover(&t, sigma))?;
    let contraction_norm = operator_norm(projected.matrix());
    let repaired = projected.pair(phi)?;
    Ok(FourierStieltjesCertificate {
        value,
        dual_element: y,
        singular_values,
        repaired,
        contraction_norm,
    })
}

/// `tau(T lambda_sigma(s)^*)` for an arbitrary matrix.
fn recover(t: &CMatrix, sigma: &Cocycle) -> Vec<Complex64> {
    let g = sigma.group();
    let n = g.order();
    (0..n)
        .map(|s| {
            (0..n)
                .map(|u| t[(g.mul(s, u), u)] * sigma.value(s, u).conj())
                .sum::<Complex64>()
                / n as f64
        })
        .collect()
}

/// Norm of `[psi_ij]` in `M_k(VN(G, sigma))_*`: the normalized trace norm of
/// the block matrix whose `(j, i)` block is the trace dual of `psi_ij`.
pub fn amplified_norm(psi: &[Vec<GroupFunction>], sigma: &Cocycle) -> Result<f64> {
    let k = psi.len();
    if psi.iter().any(|r| r.len() != k) {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: psi.iter().map(Vec::len).max().unwrap_or(0),
        });
    }
    let n = sigma.group().order();
    let mut big = CMatrix::zeros(k * n, k * n);
    for (i, row) in psi.iter().enumerate() {
        for (j, f) in row.iter().enumerate() {
            let y = trace_dual(f, sigma)?;
            big.view_mut((j * n, i * n), (n, n)).copy_from(y.matrix());
        }
    }
    Ok(crate::optim::linalg::trace_norm(&big) / n as f64)
}

/// `F[s][t] = sigma(s,t) phi(st)` with `sigma = conj(sigma1) sigma2`.
///
/// The adjoint of `m_phi` sends `T` to the Schur product of `T` with
/// `phi(x u^-1) conj(sigma)(x u^-1, u)`; rescaling rows and columns by
/// unimodular diagonals turns that into `F`.
pub fn schur_symbol(phi: &GroupFunction, sigma1: &Cocycle, sigma2: &Cocycle) -> Result<CMatrix> {
    check_group(phi, sigma1)?;
    check_group(phi, sigma2)?;
    let sigma = cocycle_product(&cocycle_conjugate(sigma1), sigma2)?;
    let g = phi.group();
    let n = g.order();
    Ok(CMatrix::from_fn(n, n, |s, t| {
        sigma.value(s, t) * phi.at(g.mul(s, t))
    }))
}

#[derive(Debug, Clone)]
pub struct MultiplierCertificate {
    pub value: f64,
    /// Rows `xi(s)`, `eta(t)` with `sigma(s,t) phi(st) = <xi(s), eta(t)>`.
    pub xi: CMatrix,
    pub eta: CMatrix,
    pub dual_bound: f64,
    pub gap: f64,
    pub iterations: usize,
    pub ill_conditioned: bool,
    pub reconstruction_error: f64,
}

/// `||m_phi : A(G, sigma1) -> A(G, sigma2)||_cb = gamma2` of the Schur symbol.
pub fn cb_multiplier_norm(
    phi: &GroupFunction,
    sigma1: &Cocycle,
    sigma2: &Cocycle,
    opts: Gamma2Options,
) -> Result<MultiplierCertificate> {
    let f = schur_symbol(phi, sigma1, sigma2)?;
    cb_from_symbol(&f, opts)
}

fn cb_from_symbol(f: &CMatrix, opts: Gamma2Options) -> Result<MultiplierCertificate> {
    let sol = gamma2(f, opts)?;
    let reconstruction_error = sol.reconstruction_error(f);
    Ok(MultiplierCertificate {
        value: sol.value,
        xi: sol.xi,
        eta: sol.eta,
        dual_bound: sol.dual_value,
        gap: sol.gap,
        iterations: sol.iterations,
        ill_conditioned: sol.ill_conditioned,
        reconstruction_error,
    })
}

/// `m_phi(psi) = phi psi`.
pub fn multiplier_apply(
    phi: &GroupFunction,
    psi: &GroupFunction,
    sigma1: &Cocycle,
    sigma2: &Cocycle,
) -> Result<GroupFunction> {
    check_group(phi, sigma1)?;
    check_group(phi, sigma2)?;
    phi.mul(psi)
}

#[derive(Debug, Clone)]
pub struct LittlewoodCertificate {
    pub value: f64,
    pub psi1: CMatrix,
    pub psi2: CMatrix,
    pub dual_bound: f64,
    pub gap: f64,
    pub iterations: usize,
    pub budget_exhausted: bool,
}

pub fn littlewood_norm(psi: &CMatrix, opts: T2Options) -> Result<LittlewoodCertificate> {
    let s = t2_split(psi, opts)?;
    Ok(LittlewoodCertificate {
        value: s.value,
        psi1: s.psi1,
        psi2: s.psi2,
        dual_bound: s.dual_bound,
        gap: s.gap,
        iterations: s.iterations,
        budget_exhausted: s.budget_exhausted,
    })
}

/// `f[s][t] = phi(st)`.
pub fn littlewood_matrix(phi: &GroupFunction) -> CMatrix {
    let g = phi.group();
    let n = g.order();
    CMatrix::from_fn(n, n, |s, t| phi.at(g.mul(s, t)))
}

pub fn littlewood_t2_norm(phi: &GroupFunction, opts: T2Options) -> Result<LittlewoodCertificate> {
    littlewood_norm(&littlewood_matrix(phi), opts)
}

/// Entrywise action `psi o a`.
pub fn schur_apply(psi: &CMatrix, a: &CMatrix) -> Result<CMatrix> {
    if psi.shape() != a.shape() {
        return Err(Error::DimensionMismatch {
            expected: psi.nrows(),
            found: a.nrows(),
        });
    }
    Ok(psi.component_mul(a))
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleRow {
    pub sample_id: usize,
    pub seed: u64,
    pub b_norm: f64,
    pub cb_norm: f64,
    pub rel_gap: f64,
    pub sdp_gap: f64,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleFailure {
    pub sample_id: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct AmenabilityReport {
    pub group_order: usize,
    pub root_order: u32,
    pub seed: u64,
    pub tol: f64,
    pub threshold: f64,
    pub samples: Vec<SampleRow>,
    pub failures: Vec<SampleFailure>,
    pub max_rel_gap: f64,
    /// Samples with `cb > b + tol`.
    pub inclusion_violations: usize,
    /// Samples with `b > cb + tol`.
    pub equality_violations: usize,
}

impl AmenabilityReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty() && self.max_rel_gap <= self.threshold
    }
}

/// Relative disagreement allowed between the two pipelines.
pub const EQUALITY_THRESHOLD: f64 = 1e-4;

/// Seed of sample `id` in a report seeded with `seed`.
pub fn sample_seed(seed: u64, id: usize) -> u64 {
    seed.wrapping_add(id as u64)
}

/// Compares `||phi||_{B(G,sigma)}` with `||phi||_{M_cb(A(G), A(G,sigma))}`
/// on seeded complex Gaussian `phi`. Samples run in parallel on the current
/// rayon pool; a failed sample is recorded and the batch continues.
pub fn amenability_report(
    sigma: &Cocycle,
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> AmenabilityReport {
    let g = sigma.group().clone();
    let trivial = Cocycle::trivial(g.clone());
    let opts = Gamma2Options {
        tol,
        ..Gamma2Options::default()
    };
    let results: Vec<std::result::Result<SampleRow, SampleFailure>> = (0..n_samples)
        .into_par_iter()
        .map(|id| {
            let s = sample_seed(seed, id);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let phi = GroupFunction::random(g.clone(), &mut rng);
            let start = Instant::now();
            let run = || -> Result<SampleRow> {
                let b = fourier_stieltjes_norm(&phi, sigma)?.value;
                let m = cb_multiplier_norm(&phi, &trivial, sigma, opts)?;
                let rel_gap = (b - m.value).abs() / b.max(m.value).max(f64::MIN_POSITIVE);
                Ok(SampleRow {
                    sample_id: id,
                    seed: s,
                    b_norm: b,
                    cb_norm: m.value,
                    rel_gap,
                    sdp_gap: m.gap,
                    wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                })
            };
            run().map_err(|e| SampleFailure {
                sample_id: id,
                seed: s,
                error: e.to_string(),
            })
        })
        .collect();
    let mut samples = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(row) => samples.push(row),
            Err(f) => failures.push(f),
        }
    }
    let max_rel_gap = samples.iter().map(|r| r.rel_gap).fold(0.0, f64::max);
    let inclusion_violations = samples
        .iter()
        .filter(|r| r.cb_norm > r.b_norm + tol)
        .count();
    let equality_violations = samples
        .iter()
        .filter(|r| r.b_norm > r.cb_norm + tol)
        .count();
    AmenabilityReport {
        group_order: g.order(),
        root_order: sigma.root_order(),
        seed,
        tol,
        threshold: EQUALITY_THRESHOLD,
        samples,
        failures,
        max_rel_gap,
        inclusion_violations,
        equality_violations,
    }
}
