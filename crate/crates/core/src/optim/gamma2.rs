//! The factorization norm
//!
//! `gamma2(F) = min t  s.t.  [[X, F], [F^*, Y]] >= 0,  X_ii = Y_jj = t`
//!
//! solved by a dense primal-dual interior-point method (HKM direction,
//! Mehrotra predictor-corrector) directly over complex Hermitian matrices.
//!
//! The free variables are `t` and the off-diagonal entries of `X` and `Y`;
//! the slack `S(y)` is rebuilt from them every step, so every iterate is
//! strictly feasible for the minimization and `t` is a valid upper bound.
//! The lower bound comes from the diagonal of the conic dual iterate `P`:
//! for any nonnegative `p, q`,
//! `gamma2(F) >= ||D_p^{1/2} F D_q^{1/2}||_1 / sqrt(sum p * sum q)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::linalg::{eig_hermitian, max_abs, operator_norm, trace_norm, CMatrix};
use crate::error::{Error, Result};

/// The Newton system has about `2 n^2` unknowns, so memory grows as `n^4`.
pub const MAX_DIM: usize = 48;

#[derive(Debug, Clone, Copy)]
pub struct Gamma2Options {
    /// Absolute tolerance on the value.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for Gamma2Options {
    fn default() -> Self {
        Gamma2Options {
            tol: 1e-6,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub value: f64,
    /// `[[X, F], [F^*, Y]]` at the returned iterate.
    pub gram: CMatrix,
    pub dual_value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub ill_conditioned: bool,
    /// `(upper, lower)` bound after every iteration.
    pub history: Vec<(f64, f64)>,
    /// Rows are `xi(i)`; `F[i][j] = <xi(i), eta(j)>` with `<x, y> = sum x conj(y)`.
    pub xi: CMatrix,
    pub eta: CMatrix,
}

impl SdpSolution {
    /// Largest entrywise deviation of `<xi(i), eta(j)>` from `F[i][j]`.
    pub fn reconstruction_error(&self, f: &CMatrix) -> f64 {
        max_abs(&(&self.xi * self.eta.adjoint() - f))
    }

    pub fn max_row_norms(&self) -> (f64, f64) {
        let rows = |m: &CMatrix| (0..m.nrows()).map(|i| m.row(i).norm()).fold(0.0, f64::max);
        (rows(&self.xi), rows(&self.eta))
    }
}

/// Lower bound on `gamma2(F)` from nonnegative weights `p`, `q`.
pub fn weighted_lower_bound(f: &CMatrix, p: &[f64], q: &[f64]) -> f64 {
    let sp: f64 = p.iter().sum();
    let sq: f64 = q.iter().sum();
    if sp <= 0.0 || sq <= 0.0 {
        return 0.0;
    }
    let w = CMatrix::from_fn(f.nrows(), f.ncols(), |i, j| {
        f[(i, j)] * (p[i].max(0.0) * q[j].max(0.0)).sqrt()
    });
    trace_norm(&w) / (sp * sq).sqrt()
}

/// Generator `alpha E_ab + conj(alpha) E_ba` of an off-diagonal variable.
#[derive(Clone, Copy)]
struct Gen {
    a: usize,
    b: usize,
    alpha: Complex64,
}

struct Problem {
    n: usize,
    f: CMatrix,
    gens: Vec<Gen>,
}

impl Problem {
    fn new(f: CMatrix) -> Self {
        let n = f.nrows();
        let mut gens = Vec::with_capacity(2 * n * n);
        for block in 0..2 {
            let off = block * n;
            for a in 0..n {
                for b in a + 1..n {
                    gens.push(Gen {
                        a: off + a,
                        b: off + b,
                        alpha: Complex64::new(1.0, 0.0),
                    });
                    gens.push(Gen {
                        a: off + a,
                        b: off + b,
                        alpha: Complex64::new(0.0, 1.0),
                    });
                }
            }
        }
        Problem { n, f, gens }
    }

    fn dim(&self) -> usize {
        1 + self.gens.len()
    }

    fn slack(&self, y: &DVector<f64>) -> CMatrix {
        let n = self.n;
        let mut s = CMatrix::zeros(2 * n, 2 * n);
        for i in 0..2 * n {
            s[(i, i)] = Complex64::new(y[0], 0.0);
        }
        for i in 0..n {
            for j in 0..n {
                s[(i, n + j)] = self.f[(i, j)];
                s[(n + j, i)] = self.f[(i, j)].conj();
            }
        }
        self.add_direction(&mut s, y, false);
        s
    }

    /// Adds `sum_k y_k B_k`, including `B_0 = I` only when `with_t`.
    fn add_direction(&self, s: &mut CMatrix, y: &DVector<f64>, with_t: bool) {
        if with_t {
            for i in 0..s.nrows() {
                s[(i, i)] += y[0];
            }
        }
        for (k, g) in self.gens.iter().enumerate() {
            let v = g.alpha * y[k + 1];
            s[(g.a, g.b)] += v;
            s[(g.b, g.a)] += v.conj();
        }
    }

    fn direction(&self, dy: &DVector<f64>) -> CMatrix {
        let mut d = CMatrix::zeros(2 * self.n, 2 * self.n);
        self.add_direction(&mut d, dy, true);
        d
    }

    /// `A(Q)_k = Re tr(B_k Q)`.
    fn apply_adjoint(&self, q: &CMatrix) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        out[0] = q.trace().re;
        for (k, g) in self.gens.iter().enumerate() {
            out[k + 1] = (g.alpha * q[(g.b, g.a)] + g.alpha.conj() * q[(g.a, g.b)]).re;
        }
        out
    }

    /// Schur complement `M_kl = Re tr(B_k P B_l W)`.
    fn schur(&self, p: &CMatrix, w: &CMatrix) -> DMatrix<f64> {
        let m = self.dim();
        let mut out = DMatrix::zeros(m, m);
        let wp = w * p;
        out[(0, 0)] = wp.trace().re;
        for (l, g) in self.gens.iter().enumerate() {
            // tr(P E_cd W) = (W P)_dc
            let v = (g.alpha * wp[(g.b, g.a)] + g.alpha.conj() * wp[(g.a, g.b)]).re;
            out[(0, l + 1)] = v;
            out[(l + 1, 0)] = v;
        }
        let dim = 2 * self.n;
        // column-major storage: m[(i, j)] = data[i + j * dim]
        let (ps, ws) = (p.as_slice(), w.as_slice());
        let at = |m: &[Complex64], i: usize, j: usize| m[i + j * dim];
        for (k, gk) in self.gens.iter().enumerate() {
            let (a, b, ak) = (gk.a, gk.b, gk.alpha);
            let akc = ak.conj();
            for (l, gl) in self.gens.iter().enumerate().skip(k) {
                let (c, d, al) = (gl.a, gl.b, gl.alpha);
                let alc = al.conj();
                let v = ak * al * at(ps, b, c) * at(ws, d, a)
                    + ak * alc * at(ps, b, d) * at(ws, c, a)
                    + akc * al * at(ps, a, c) * at(ws, d, b)
                    + akc * alc * at(ps, a, d) * at(ws, c, b);
                out[(k + 1, l + 1)] = v.re;
                out[(l + 1, k + 1)] = v.re;
            }
        }
        out
    }

    fn lower_bound(&self, p: &CMatrix) -> f64 {
        let n = self.n;
        let d: Vec<f64> = (0..2 * n).map(|i| p[(i, i)].re).collect();
        weighted_lower_bound(&self.f, &d[..n], &d[n..])
    }
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Largest `alpha <= 1` keeping `X + alpha D` positive semidefinite.
fn max_step(x: &CMatrix, d: &CMatrix) -> Result<f64> {
    let chol = x
        .clone()
        .cholesky()
        .ok_or_else(|| Error::SolverFailure("iterate lost positive definiteness".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SolverFailure("singular Cholesky factor".into()))?;
    let scaled = hermitian_part(&(&linv * d * linv.adjoint()));
    let (vals, _) = eig_hermitian(&scaled)?;
    let lo = vals.first().copied().unwrap_or(0.0);
    Ok(if lo >= 0.0 { f64::INFINITY } else { -1.0 / lo })
}

enum Factored {
    Cholesky(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    Lu(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl Factored {
    fn new(m: DMatrix<f64>) -> Self {
        match m.clone().cholesky() {
            Some(ch) => Factored::Cholesky(ch),
            None => Factored::Lu(m.lu()),
        }
    }

    fn solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        match self {
            Factored::Cholesky(ch) => Ok(ch.solve(rhs)),
            Factored::Lu(lu) => lu
                .solve(rhs)
                .ok_or_else(|| Error::SolverFailure("singular Newton system".into())),
        }
    }
}

/// Computes `gamma2(F)` with a certified gap.
pub fn gamma2(f: &CMatrix, opts: Gamma2Options) -> Result<SdpSolution> {
    let n = f.nrows();
    if f.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.ncols(),
        });
    }
    if n > MAX_DIM {
        return Err(Error::UnsupportedSize(format!(
            "gamma2 supports n <= {MAX_DIM}, got {n}"
        )));
    }
    if f.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let scale = max_abs(f);
    if scale == 0.0 || n == 0 {
        let z = CMatrix::zeros(n, 1);
        return Ok(SdpSolution {
            value: 0.0,
            gram: CMatrix::zeros(2 * n, 2 * n),
            dual_value: 0.0,
            gap: 0.0,
            iterations: 0,
            ill_conditioned: false,
            history: Vec::new(),
            xi: z.clone(),
            eta: z,
        });
    }
    let prob = Problem::new(f / Complex64::new(scale, 0.0));
    let tol = opts.tol / scale;
    let big_n = 2 * n;
    let m = prob.dim();

    let mut y = DVector::zeros(m);
    y[0] = operator_norm(&prob.f) + 1.0;
    let mut s = prob.slack(&y);
    let mut p = CMatrix::identity(big_n, big_n) / Complex64::new(big_n as f64, 0.0);
    let mut b = DVector::zeros(m);
    b[0] = 1.0;

    let mut history = Vec::new();
    let mut ill_conditioned = false;
    let mut best_lower = 0.0f64;
    let mut iterations = 0;
    let gamma = 0.95;

    loop {
        let upper = y[0];
        let lower = prob.lower_bound(&p).max(best_lower);
        best_lower = lower;
        if lower > upper * (1.0 + 1e-12) + 1e-12 {
            return Err(Error::SolverFailure(format!(
                "weak duality violated at iteration {iterations}: {lower} > {upper}"
            )));
        }
        if iterations > 0 {
            history.push((upper * scale, lower * scale));
        }
        if upper - lower <= tol {
            break;
        }
        if iterations == opts.max_iter {
            return Err(Error::SolverFailure(format!(
                "no convergence in {} iterations (gap {:e})",
                opts.max_iter,
                (upper - lower) * scale
            )));
        }
        if ill_conditioned {
            return Err(Error::SolverFailure(format!(
                "interior-point steps stalled (gap {:e})",
                (upper - lower) * scale
            )));
        }
        iterations += 1;

        let w = s
            .clone()
            .cholesky()
            .ok_or_else(|| Error::SolverFailure("slack lost positive definiteness".into()))?
            .inverse();
        let w = hermitian_part(&w);
        let mu = (&p * &s).trace().re / big_n as f64;
        let schur = Factored::new(prob.schur(&p, &w));

        // predictor
        let rhs = -&b;
        let dy_aff = schur.solve(&rhs)?;
        let ds_aff = prob.direction(&dy_aff);
        let dp_aff = hermitian_part(&(-(&p) - &p * &ds_aff * &w));
        let ap = max_step(&p, &dp_aff)?.min(1.0);
        let ad = max_step(&s, &ds_aff)?.min(1.0);
        let mu_aff = ((&p + &dp_aff * Complex64::new(ap, 0.0))
            * (&s + &ds_aff * Complex64::new(ad, 0.0)))
        .trace()
        .re / big_n as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector
        let r =
            CMatrix::identity(big_n, big_n) * Complex64::new(sigma * mu, 0.0) - &dp_aff * &ds_aff;
        let rw = &r * &w;
        let rhs = prob.apply_adjoint(&rw) - &b;
        let dy = schur.solve(&rhs)?;
        let ds = prob.direction(&dy);
        let dp = hermitian_part(&(&rw - &p - &p * &ds * &w));
        let ap = (gamma * max_step(&p, &dp)?).min(1.0);
        let ad = (gamma * max_step(&s, &ds)?).min(1.0);
        if ap < 1e-10 && ad < 1e-10 {
            ill_conditioned = true;
        }

        y += &dy * ad;
        s = prob.slack(&y);
        p = hermitian_part(&(&p + &dp * Complex64::new(ap, 0.0)));
    }

    let upper = y[0];
    let gram = &s * Complex64::new(scale, 0.0);
    let (vals, vecs) = eig_hermitian(&hermitian_part(&gram))?;
    let floor = -1e-9 * vals.last().copied().unwrap_or(0.0).abs().max(1.0);
    if vals.first().copied().unwrap_or(0.0) < floor {
        return Err(Error::SolverFailure(
            "final Gram matrix is not positive semidefinite".into(),
        ));
    }
    // rows of V Lambda^{1/2}: gram[i][j] = <v_i, v_j>
    let root = CMatrix::from_fn(big_n, big_n, |i, k| vecs[(i, k)] * vals[k].max(0.0).sqrt());
    let xi = root.rows(0, n).into_owned();
    let eta = root.rows(n, n).into_owned();
    Ok(SdpSolution {
        value: upper * scale,
        gram,
        dual_value: best_lower * scale,
        gap: (upper - best_lower) * scale,
        iterations,
        ill_conditioned,
        history,
        xi,
        eta,
    })
}
