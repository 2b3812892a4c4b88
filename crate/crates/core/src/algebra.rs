//! The twisted convolution algebra `C[G, sigma]`, the regular
//! sigma-representation and the central extension `G_sigma`.
//!
//! Haar measure is counting measure, so `<lambda_sigma(s), phi> = phi(s)`
//! and every integral is a plain sum.

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cocycle::{unit_root, CoboundaryWitness, Cocycle};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, IDENTITY};
use crate::optim::linalg::{max_abs, CMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone)]
pub struct GroupFunction {
    group: Arc<FiniteGroup>,
    values: Vec<Complex64>,
}

impl GroupFunction {
    pub fn new(group: Arc<FiniteGroup>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::DimensionMismatch {
                expected: group.order(),
                found: values.len(),
            });
        }
        if values
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidArgument(
                "function values must be finite".into(),
            ));
        }
        Ok(GroupFunction { group, values })
    }

    pub fn from_fn(group: Arc<FiniteGroup>, f: impl FnMut(usize) -> Complex64) -> Self {
        let values = (0..group.order()).map(f).collect();
        GroupFunction { group, values }
    }

    pub fn zeros(group: Arc<FiniteGroup>) -> Self {
        Self::from_fn(group, |_| ZERO)
    }

    pub fn delta(group: Arc<FiniteGroup>, s: usize) -> Self {
        Self::from_fn(group, |t| if t == s { ONE } else { ZERO })
    }

    pub fn constant(group: Arc<FiniteGroup>, c: Complex64) -> Self {
        Self::from_fn(group, |_| c)
    }

    /// Independent standard complex Gaussian values.
    pub fn random<R: Rng + ?Sized>(group: Arc<FiniteGroup>, rng: &mut R) -> Self {
        Self::from_fn(group, |_| {
            Complex64::new(
                StandardNormal.sample(&mut *rng),
                StandardNormal.sample(&mut *rng),
            )
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, s: usize) -> Complex64 {
        self.values[s]
    }

    pub fn norm1(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(s, &z)| f(s, z))
            .collect();
        GroupFunction {
            group: self.group.clone(),
            values,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|_, z| z * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|_, z| z.conj())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.map(|s, z| z + other.values[s]))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.map(|s, z| z - other.values[s]))
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.map(|s, z| z * other.values[s]))
    }

    /// Pointwise product with a witness, `f xi`.
    pub fn twist(&self, xi: &CoboundaryWitness) -> Self {
        self.map(|s, z| z * xi.value(s))
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn as_vector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.values)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.group.same_as(&other.group) {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    fn check_cocycle(&self, sigma: &Cocycle) -> Result<()> {
        if self.group.same_as(sigma.group()) {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }
}

/// `(f *_sigma g)(s) = sum_t f(t) sigma(t, t^-1 s) g(t^-1 s)`.
pub fn twisted_convolve(
    f: &GroupFunction,
    g: &GroupFunction,
    sigma: &Cocycle,
) -> Result<GroupFunction> {
    f.check(g)?;
    f.check_cocycle(sigma)?;
    let grp = &f.group;
    let n = grp.order();
    let mut out = vec![ZERO; n];
    for t in 0..n {
        let ft = f.values[t];
        if ft == ZERO {
            continue;
        }
        for u in 0..n {
            out[grp.mul(t, u)] += ft * sigma.value(t, u) * g.values[u];
        }
    }
    Ok(GroupFunction {
        group: grp.clone(),
        values: out,
    })
}

/// `f^*(s) = conj(sigma(s, s^-1)) conj(f(s^-1))`.
pub fn twisted_involution(f: &GroupFunction, sigma: &Cocycle) -> Result<GroupFunction> {
    f.check_cocycle(sigma)?;
    let g = &f.group;
    Ok(f.map(|s, _| sigma.value(s, g.inv(s)).conj() * f.values[g.inv(s)].conj()))
}

/// `lambda_sigma(s) delta_u = sigma(s, u) delta_{su}`.
pub fn regular_rep(sigma: &Cocycle, s: usize) -> CMatrix {
    let g = sigma.group();
    let n = g.order();
    let mut m = CMatrix::zeros(n, n);
    for u in 0..n {
        m[(g.mul(s, u), u)] = sigma.value(s, u);
    }
    m
}

/// Element of `VN(G, sigma)`.
#[derive(Debug, Clone)]
pub struct TwistedOperator {
    sigma: Cocycle,
    matrix: CMatrix,
    coeffs: Option<Vec<Complex64>>,
}

/// Maximum entrywise deviation tolerated between a matrix and its generator
/// expansion.
pub const SPAN_TOL: f64 = 1e-10;

impl TwistedOperator {
    /// Wraps a matrix, rejecting it unless it lies in the span of
    /// `lambda_sigma(G)`. Coefficients are not attached.
    pub fn from_matrix(sigma: &Cocycle, matrix: CMatrix) -> Result<Self> {
        let n = sigma.group().order();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows(),
            });
        }
        let op = TwistedOperator {
            sigma: sigma.clone(),
            matrix,
            coeffs: None,
        };
        let c = op.recover_coeffs();
        let residual = max_abs(&(expand(sigma, &c) - &op.matrix));
        if residual > SPAN_TOL * max_abs(&op.matrix).max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "matrix is not in the span of the regular sigma-representation (residual {residual:e})"
            )));
        }
        Ok(op)
    }

    pub fn from_coeffs(sigma: &Cocycle, coeffs: Vec<Complex64>) -> Result<Self> {
        let n = sigma.group().order();
        if coeffs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: coeffs.len(),
            });
        }
        let matrix = expand(sigma, &coeffs);
        Ok(TwistedOperator {
            sigma: sigma.clone(),
            matrix,
            coeffs: Some(coeffs),
        })
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.sigma
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn coeffs(&self) -> Option<&[Complex64]> {
        self.coeffs.as_deref()
    }

    pub fn with_recovered_coeffs(mut self) -> Self {
        self.coeffs = Some(self.recover_coeffs());
        self
    }

    /// Inverse Fourier formula `c_s = tau(T lambda_sigma(s)^*)`, with `tau`
    /// the normalized trace.
    pub fn recover_coeffs(&self) -> Vec<Complex64> {
        let g = self.sigma.group();
        let n = g.order();
        (0..n)
            .map(|s| {
                // tr(T L^*) = sum_{u} T[su][u] conj(sigma(s,u))
                let mut acc = ZERO;
                for u in 0..n {
                    acc += self.matrix[(g.mul(s, u), u)] * self.sigma.value(s, u).conj();
                }
                acc / n as f64
            })
            .collect()
    }

    /// `<T, phi> = sum_s c_s phi(s)`.
    pub fn pair(&self, phi: &GroupFunction) -> Result<Complex64> {
        let c = self.coeffs.as_deref().ok_or(Error::MissingCoefficients)?;
        if !phi.group.same_as(self.sigma.group()) {
            return Err(Error::GroupMismatch);
        }
        Ok(c.iter().zip(&phi.values).map(|(a, b)| a * b).sum())
    }

    /// Largest deviation between the matrix and the attached generator
    /// expansion; `None` without coefficients.
    pub fn reconstruction_error(&self) -> Option<f64> {
        let c = self.coeffs.as_deref()?;
        Some(max_abs(&(expand(&self.sigma, c) - &self.matrix)))
    }
}

fn expand(sigma: &Cocycle, c: &[Complex64]) -> CMatrix {
    let g = sigma.group();
    let n = g.order();
    let mut m = CMatrix::zeros(n, n);
    for (s, &cs) in c.iter().enumerate() {
        if cs == ZERO {
            continue;
        }
        for u in 0..n {
            m[(g.mul(s, u), u)] += cs * sigma.value(s, u);
        }
    }
    m
}

/// `sum_s f(s) lambda_sigma(s)`.
pub fn lift(f: &GroupFunction, sigma: &Cocycle) -> Result<TwistedOperator> {
    f.check_cocycle(sigma)?;
    TwistedOperator::from_coeffs(sigma, f.values.clone())
}

/// `Gamma(T) = sum_s c_s lambda_sigma(s) (x) lambda(s)`.
pub fn comultiply(t: &TwistedOperator) -> Result<CMatrix> {
    let c = t.coeffs().ok_or(Error::MissingCoefficients)?;
    let sigma = t.cocycle();
    let g = sigma.group();
    let n = g.order();
    let mut out = CMatrix::zeros(n * n, n * n);
    for (s, &cs) in c.iter().enumerate() {
        if cs == ZERO {
            continue;
        }
        // (lambda_sigma(s) (x) lambda(s)) (delta_u (x) delta_v) = sigma(s,u) delta_su (x) delta_sv
        for u in 0..n {
            let phase = cs * sigma.value(s, u);
            let row = g.mul(s, u) * n;
            for v in 0..n {
                out[(row + g.mul(s, v), u * n + v)] += phase;
            }
        }
    }
    Ok(out)
}

/// Pairs an element of `VN(G, sigma1) (x) VN(G, sigma2)` given as a matrix
/// with `u (x) v`, reading the coefficients off by the trace formula.
pub fn pair_tensor(
    m: &CMatrix,
    sigma1: &Cocycle,
    sigma2: &Cocycle,
    u: &GroupFunction,
    v: &GroupFunction,
) -> Result<Complex64> {
    let g = sigma1.group();
    if !g.same_as(sigma2.group()) || !u.group.same_as(g) || !v.group.same_as(g) {
        return Err(Error::GroupMismatch);
    }
    let n = g.order();
    if m.nrows() != n * n || m.ncols() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: m.nrows(),
        });
    }
    let mut total = ZERO;
    for s in 0..n {
        for t in 0..n {
            let mut acc = ZERO;
            for a in 0..n {
                let pa = sigma1.value(s, a).conj();
                let row = g.mul(s, a) * n;
                for b in 0..n {
                    acc += m[(row + g.mul(t, b), a * n + b)] * pa * sigma2.value(t, b).conj();
                }
            }
            total += acc / (n * n) as f64 * u.values[s] * v.values[t];
        }
    }
    Ok(total)
}

/// `(lambda_sigma(s) . u)(t) = conj(sigma(s, s^-1 t)) u(s^-1 t)`.
pub fn bullet_action(s: usize, u: &GroupFunction, sigma: &Cocycle) -> Result<GroupFunction> {
    u.check_cocycle(sigma)?;
    let g = &u.group;
    let si = g.inv(s);
    Ok(u.map(|t, _| {
        let x = g.mul(si, t);
        sigma.value(s, x).conj() * u.values[x]
    }))
}

/// Dimension of the center of `C[G, sigma]`: the common kernel of the
/// commutator maps `x -> x lambda(s) - lambda(s) x` on coefficient vectors.
pub fn center_dimension(sigma: &Cocycle) -> usize {
    let g = sigma.group();
    let n = g.order();
    let mut gram = CMatrix::zeros(n, n);
    let mut m_s = CMatrix::zeros(n, n);
    for s in 0..n {
        m_s.fill(ZERO);
        for u in 0..n {
            m_s[(g.mul(u, s), u)] += sigma.value(u, s);
            m_s[(g.mul(s, u), u)] -= sigma.value(s, u);
        }
        gram += m_s.adjoint() * &m_s;
    }
    let eig = gram.symmetric_eigen();
    let top = eig.eigenvalues.iter().copied().fold(1.0, f64::max);
    eig.eigenvalues.iter().filter(|&&x| x < 1e-9 * top).count()
}

/// `G_sigma = G x mu_m` with `(s,k)(t,l) = (st, k + l + e(s,t))`.
#[derive(Debug, Clone)]
pub struct CentralExtension {
    base: Arc<FiniteGroup>,
    sigma: Cocycle,
    ext: Arc<FiniteGroup>,
}

pub fn central_extension(sigma: &Cocycle) -> Result<CentralExtension> {
    let g = sigma.group();
    let n = g.order();
    let m = sigma.root_order() as usize;
    let idx = |s: usize, k: usize| s * m + k;
    let mut table = vec![vec![0usize; n * m]; n * m];
    for s in 0..n {
        for k in 0..m {
            for t in 0..n {
                for l in 0..m {
                    let z = (k + l + sigma.exponent(s, t) as usize) % m;
                    table[idx(s, k)][idx(t, l)] = idx(g.mul(s, t), z);
                }
            }
        }
    }
    let labels = (0..n)
        .flat_map(|s| (0..m).map(move |k| (s, k)))
        .map(|(s, k)| format!("({},{k})", g.label(s)))
        .collect();
    let ext = FiniteGroup::from_table(table, Some(labels))?;
    Ok(CentralExtension {
        base: g.clone(),
        sigma: sigma.clone(),
        ext: Arc::new(ext),
    })
}

impl CentralExtension {
    pub fn base(&self) -> &Arc<FiniteGroup> {
        &self.base
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.ext
    }

    pub fn root_order(&self) -> u32 {
        self.sigma.root_order()
    }

    pub fn element(&self, s: usize, k: u32) -> usize {
        s * self.sigma.root_order() as usize + k as usize
    }

    /// `j(f)(s, z) = conj(z) f(s)`.
    pub fn embed(&self, f: &GroupFunction) -> Result<GroupFunction> {
        if !f.group.same_as(&self.base) {
            return Err(Error::GroupMismatch);
        }
        let m = self.root_order();
        Ok(GroupFunction::from_fn(self.ext.clone(), |x| {
            let (s, k) = (x / m as usize, x % m as usize);
            unit_root(-(k as i64), m) * f.values[s]
        }))
    }

    /// `P(F)(s) = (1/m) sum_k F(s, k) z_k`.
    pub fn project(&self, big: &GroupFunction) -> Result<GroupFunction> {
        if !big.group.same_as(&self.ext) {
            return Err(Error::GroupMismatch);
        }
        let m = self.root_order();
        Ok(GroupFunction::from_fn(self.base.clone(), |s| {
            let total: Complex64 = (0..m)
                .map(|k| big.values[self.element(s, k)] * unit_root(i64::from(k), m))
                .sum();
            total / f64::from(m)
        }))
    }

    /// Convolution on `G_sigma` with the circle factor carrying the
    /// normalized measure, so that `j` is multiplicative.
    pub fn convolve(&self, a: &GroupFunction, b: &GroupFunction) -> Result<GroupFunction> {
        if !a.group.same_as(&self.ext) || !b.group.same_as(&self.ext) {
            return Err(Error::GroupMismatch);
        }
        let trivial = Cocycle::trivial(self.ext.clone());
        let c = twisted_convolve(a, b, &trivial)?;
        Ok(c.scale(Complex64::new(1.0 / f64::from(self.root_order()), 0.0)))
    }
}

/// `delta_e`, the unit of `C[G, sigma]` for normalized `sigma`.
pub fn identity_function(group: Arc<FiniteGroup>) -> GroupFunction {
    GroupFunction::delta(group, IDENTITY)
}
