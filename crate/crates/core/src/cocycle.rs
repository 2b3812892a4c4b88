//! Normalized 2-cocycles with values in the `m`-th roots of unity.
//!
//! A cocycle is stored as an exponent table: `sigma(s,t) = exp(2 pi i e[s][t] / m)`.
//! Identity, similarity and coboundary questions are then exact integer
//! arithmetic modulo `m`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, IDENTITY};
use crate::smith::{lcm, solve_mod};

/// `exp(2 pi i k / m)`, exact at multiples of a quarter turn.
pub fn unit_root(k: i64, m: u32) -> Complex64 {
    let m = i64::from(m);
    let k = k.rem_euclid(m);
    if (4 * k) % m == 0 {
        return match 4 * k / m {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    // the ratio is rounded once, so equal fractions give identical roots
    Complex64::from_polar(1.0, std::f64::consts::TAU * (k as f64 / m as f64))
}

#[derive(Clone)]
pub struct Cocycle {
    group: Arc<FiniteGroup>,
    m: u32,
    exponents: Vec<u32>,
    roots: Vec<Complex64>,
}

impl std::fmt::Debug for Cocycle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cocycle")
            .field("order", &self.group.order())
            .field("m", &self.m)
            .finish_non_exhaustive()
    }
}

impl PartialEq for Cocycle {
    /// Equality of the underlying functions, independent of root order.
    fn eq(&self, other: &Self) -> bool {
        if !self.group.same_as(&other.group) {
            return false;
        }
        let (a, b) = unify(self, other);
        a.exponents == b.exponents
    }
}

fn violations(
    group: &FiniteGroup,
    m: u32,
    e: &[u32],
) -> (Vec<(usize, usize, usize)>, Vec<(usize, usize)>) {
    let n = group.order();
    let at = |s: usize, t: usize| u64::from(e[s * n + t]);
    let m = u64::from(m);
    let mut normalization = Vec::new();
    for s in 0..n {
        for (a, b) in [(s, IDENTITY), (IDENTITY, s)] {
            if at(a, b) % m != 0 && normalization.len() < 10 && !normalization.contains(&(a, b)) {
                normalization.push((a, b));
            }
        }
    }
    let mut triples = Vec::new();
    'outer: for s in 0..n {
        for t in 0..n {
            let st = group.mul(s, t);
            for r in 0..n {
                let lhs = at(s, t) + at(st, r);
                let rhs = at(s, group.mul(t, r)) + at(t, r);
                if lhs % m != rhs % m {
                    triples.push((s, t, r));
                    if triples.len() == 10 {
                        break 'outer;
                    }
                }
            }
        }
    }
    (triples, normalization)
}

/// Checks the cocycle identity and normalization exactly in `Z_m`.
pub fn validate_cocycle(table: &[Vec<u32>], m: u32, group: Arc<FiniteGroup>) -> Result<Cocycle> {
    let n = group.order();
    if m == 0 {
        return Err(Error::InvalidArgument("root order must be positive".into()));
    }
    if table.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: table.len(),
        });
    }
    if let Some(row) = table.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: row.len(),
        });
    }
    if table.iter().flatten().any(|&x| x >= m) {
        return Err(Error::InvalidArgument(format!(
            "exponents must lie in [0, {m})"
        )));
    }
    let exponents: Vec<u32> = table.iter().flatten().copied().collect();
    let (triples, normalization) = violations(&group, m, &exponents);
    if !triples.is_empty() || !normalization.is_empty() {
        return Err(Error::CocycleViolation {
            triples,
            normalization,
        });
    }
    Ok(Cocycle::from_parts(group, m, exponents))
}

impl Cocycle {
    fn from_parts(group: Arc<FiniteGroup>, m: u32, exponents: Vec<u32>) -> Self {
        let roots = (0..m).map(|k| unit_root(i64::from(k), m)).collect();
        Cocycle {
            group,
            m,
            exponents,
            roots,
        }
    }

    /// Builds from exponents already known to form a cocycle. Debug builds
    /// re-check.
    fn from_trusted(group: Arc<FiniteGroup>, m: u32, exponents: Vec<u32>) -> Self {
        debug_assert!({
            let (t, nrm) = violations(&group, m, &exponents);
            t.is_empty() && nrm.is_empty()
        });
        Self::from_parts(group, m, exponents)
    }

    pub fn trivial(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        Self::from_parts(group, 1, vec![0; n * n])
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn root_order(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn exponent(&self, s: usize, t: usize) -> u32 {
        self.exponents[s * self.group.order() + t]
    }

    #[inline]
    pub fn value(&self, s: usize, t: usize) -> Complex64 {
        self.roots[self.exponent(s, t) as usize]
    }

    pub fn exponent_table(&self) -> Vec<Vec<u32>> {
        self.exponents
            .chunks(self.group.order())
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&x| x == 0)
    }

    /// Whether `sigma(s, s^-1) = 1` for every `s`.
    pub fn is_normalized(&self) -> bool {
        (0..self.group.order()).all(|s| self.exponent(s, self.group.inv(s)) == 0)
    }

    /// Same function over `mu_{m'}`; `m'` must be a multiple of the current root order.
    pub fn with_root_order(&self, m: u32) -> Self {
        assert!(
            m % self.m == 0,
            "root order {m} is not a multiple of {}",
            self.m
        );
        let k = m / self.m;
        let exponents = self.exponents.iter().map(|&x| x * k).collect();
        Self::from_parts(self.group.clone(), m, exponents)
    }

    /// Smallest root order representing the same function.
    pub fn reduced(&self) -> Self {
        let g = self.exponents.iter().fold(i64::from(self.m), |acc, &x| {
            crate::smith::gcd(acc, i64::from(x))
        });
        let g = g as u32;
        let exponents = self.exponents.iter().map(|&x| x / g).collect();
        Self::from_parts(self.group.clone(), self.m / g, exponents)
    }
}

/// Rescales both cocycles to the lcm of their root orders.
pub fn unify(a: &Cocycle, b: &Cocycle) -> (Cocycle, Cocycle) {
    let m = lcm(i64::from(a.m), i64::from(b.m)) as u32;
    (a.with_root_order(m), b.with_root_order(m))
}

fn check_same_group(a: &Cocycle, b: &Cocycle) -> Result<()> {
    if a.group.same_as(&b.group) {
        Ok(())
    } else {
        Err(Error::GroupMismatch)
    }
}

/// `sigma_A(s,t) = exp(2 pi i <s, A t> / m)` on a declared product of cyclic
/// groups, with coordinates read in `[0, q_i)`. Requires `m | A_ij q_i` and
/// `m | A_ij q_j` so the form does not depend on representatives.
pub fn bilinear_cocycle(group: Arc<FiniteGroup>, a: &[Vec<i64>], m: u32) -> Result<Cocycle> {
    let factors = group
        .cyclic_factors()
        .ok_or(Error::NotCyclicProduct)?
        .to_vec();
    let k = factors.len();
    if a.len() != k || a.iter().any(|r| r.len() != k) {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: a.len(),
        });
    }
    if m == 0 {
        return Err(Error::InvalidArgument("root order must be positive".into()));
    }
    let mi = i64::from(m);
    for i in 0..k {
        for j in 0..k {
            let aij = a[i][j];
            if (aij * factors[i as usize] as i64) % mi != 0 || (aij * factors[j] as i64) % mi != 0 {
                return Err(Error::NotWellDefined(format!(
                    "A[{i}][{j}] = {aij} with orders ({}, {}) and m = {m}",
                    factors[i], factors[j]
                )));
            }
        }
    }
    let n = group.order();
    let coords: Vec<Vec<usize>> = (0..n).map(|x| group.coords(x).unwrap()).collect();
    let mut exponents = vec![0u32; n * n];
    for s in 0..n {
        for t in 0..n {
            let mut acc = 0i64;
            for i in 0..k {
                for j in 0..k {
                    acc += coords[s][i] as i64 * a[i][j] * coords[t][j] as i64;
                }
            }
            exponents[s * n + t] = acc.rem_euclid(mi) as u32;
        }
    }
    Ok(Cocycle::from_trusted(group, m, exponents))
}

/// A function `xi: G -> mu_m` with `xi(e) = 1`, stored as exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoboundaryWitness {
    m: u32,
    xi: Vec<u32>,
}

impl CoboundaryWitness {
    pub fn new(m: u32, xi: Vec<u32>) -> Result<Self> {
        if m == 0 || xi.iter().any(|&x| x >= m) {
            return Err(Error::InvalidArgument(format!(
                "witness exponents must lie in [0, {m})"
            )));
        }
        if xi.first().copied().unwrap_or(0) != 0 {
            return Err(Error::InvalidArgument(
                "witness must satisfy xi(e) = 1".into(),
            ));
        }
        Ok(CoboundaryWitness { m, xi })
    }

    pub fn zero(order: usize) -> Self {
        CoboundaryWitness {
            m: 1,
            xi: vec![0; order],
        }
    }

    /// Uniformly random witness over `mu_m`.
    pub fn random<R: Rng + ?Sized>(order: usize, m: u32, rng: &mut R) -> Self {
        let xi = (0..order)
            .map(|s| {
                if s == IDENTITY {
                    0
                } else {
                    rng.random_range(0..m)
                }
            })
            .collect();
        CoboundaryWitness { m, xi }
    }

    pub fn root_order(&self) -> u32 {
        self.m
    }

    pub fn exponents(&self) -> &[u32] {
        &self.xi
    }

    pub fn value(&self, s: usize) -> Complex64 {
        unit_root(i64::from(self.xi[s]), self.m)
    }

    pub fn negate(&self) -> Self {
        let xi = self.xi.iter().map(|&x| (self.m - x) % self.m).collect();
        CoboundaryWitness { m: self.m, xi }
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }
}

/// `sigma'(s,t) = xi(s) xi(t) / xi(st) * sigma(s,t)`.
pub fn similarity_apply(sigma: &Cocycle, xi: &CoboundaryWitness) -> Cocycle {
    let n = sigma.group.order();
    assert_eq!(xi.len(), n, "witness length does not match the group order");
    let m = lcm(i64::from(sigma.m), i64::from(xi.m)) as u32;
    let base = sigma.with_root_order(m);
    let k = m / xi.m;
    let x = |s: usize| i64::from(xi.xi[s] * k);
    let g = &sigma.group;
    let mut exponents = vec![0u32; n * n];
    for s in 0..n {
        for t in 0..n {
            let v = i64::from(base.exponent(s, t)) + x(s) + x(t) - x(g.mul(s, t));
            exponents[s * n + t] = v.rem_euclid(i64::from(m)) as u32;
        }
    }
    Cocycle::from_trusted(g.clone(), m, exponents)
}

/// Returns `(sigma, xi)` with `sigma(s, s^-1) = 1` for all `s` and
/// `similarity_apply(sigma, xi) == tau`. The root order doubles so the
/// square roots in the normalizing coboundary are exact.
pub fn normalize_cocycle(tau: &Cocycle) -> (Cocycle, CoboundaryWitness) {
    let g = &tau.group;
    let n = g.order();
    let m2 = 2 * tau.m;
    // half-exponent of tau(s, s^-1) over mu_{2m}
    let a: Vec<i64> = (0..n)
        .map(|s| i64::from(tau.exponent(s, g.inv(s))))
        .collect();
    let mut exponents = vec![0u32; n * n];
    for s in 0..n {
        for t in 0..n {
            let v = 2 * i64::from(tau.exponent(s, t)) + a[g.mul(s, t)] - a[s] - a[t];
            exponents[s * n + t] = v.rem_euclid(i64::from(m2)) as u32;
        }
    }
    let sigma = Cocycle::from_trusted(g.clone(), m2, exponents);
    let xi = CoboundaryWitness {
        m: m2,
        xi: a.iter().map(|&x| x as u32).collect(),
    };
    debug_assert!(similarity_apply(&sigma, &xi) == *tau);
    (sigma, xi)
}

/// Decides whether `sigma1 = (d xi) sigma2` for some `xi: G -> T`, returning
/// a witness.
///
/// If `omega = sigma1 / sigma2` takes values in `mu_m` and `omega = d xi`,
/// then `xi^m` is a character, so `xi` takes values in `mu_{m e}` with `e`
/// the exponent of `G`. Solving modulo `m e` is therefore complete.
pub fn coboundary_test(sigma1: &Cocycle, sigma2: &Cocycle) -> Result<Option<CoboundaryWitness>> {
    check_same_group(sigma1, sigma2)?;
    let (a, b) = unify(sigma1, sigma2);
    let g = &a.group;
    let n = g.order();
    let e = (0..n).fold(1i64, |acc, s| lcm(acc, g.element_order(s) as i64));
    let m = u32::try_from(i64::from(a.m) * e)
        .map_err(|_| Error::UnsupportedSize("root order overflow in coboundary test".into()))?;
    let (a, b) = (a.with_root_order(m), b.with_root_order(m));
    let mut rows = Vec::with_capacity(n * n);
    let mut rhs = Vec::with_capacity(n * n);
    for s in 0..n {
        for t in 0..n {
            let mut row = vec![0i64; n];
            row[s] += 1;
            row[t] += 1;
            row[g.mul(s, t)] -= 1;
            rows.push(row);
            rhs.push(i64::from(a.exponent(s, t)) - i64::from(b.exponent(s, t)));
        }
    }
    let Some(x) = solve_mod(&rows, &rhs, i64::from(m)) else {
        return Ok(None);
    };
    let witness = CoboundaryWitness::new(m, x.iter().map(|&v| v as u32).collect())?;
    if similarity_apply(sigma2, &witness) != *sigma1 {
        return Err(Error::SolverFailure(
            "coboundary witness failed verification".into(),
        ));
    }
    Ok(Some(witness))
}

pub fn cocycle_product(a: &Cocycle, b: &Cocycle) -> Result<Cocycle> {
    check_same_group(a, b)?;
    let (a, b) = unify(a, b);
    let m = a.m;
    let exponents = a
        .exponents
        .iter()
        .zip(&b.exponents)
        .map(|(x, y)| (x + y) % m)
        .collect();
    Ok(Cocycle::from_trusted(a.group.clone(), m, exponents))
}

pub fn cocycle_conjugate(a: &Cocycle) -> Cocycle {
    let exponents = a.exponents.iter().map(|&x| (a.m - x) % a.m).collect();
    Cocycle::from_trusted(a.group.clone(), a.m, exponents)
}
