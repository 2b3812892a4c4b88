//! Finite groups given by Cayley tables.
//!
//! Elements are indices `0..order`; index 0 is always the identity. Groups
//! are immutable once built and are shared behind [`Arc`].

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` accepted by [`GroupKind::Symmetric`].
pub const MAX_SYMMETRIC_DEGREE: usize = 5;

/// Index of the identity element in every group.
pub const IDENTITY: usize = 0;

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
    labels: Option<Vec<String>>,
    cyclic_factors: Option<Vec<usize>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.order)
            .field("cyclic_factors", &self.cyclic_factors)
            .finish_non_exhaustive()
    }
}

/// Recipes understood by [`build_group`].
#[derive(Debug, Clone)]
pub enum GroupKind {
    Cyclic(usize),
    Product(Arc<FiniteGroup>, Arc<FiniteGroup>),
    /// Dihedral group of order `2n`.
    Dihedral(usize),
    /// Symmetric group on `n <= 5` points.
    Symmetric(usize),
    FromTable(Vec<Vec<usize>>),
}

pub fn build_group(kind: GroupKind) -> Result<FiniteGroup> {
    match kind {
        GroupKind::Cyclic(n) => cyclic(n),
        GroupKind::Product(a, b) => Ok(product(&a, &b)),
        GroupKind::Dihedral(n) => dihedral(n),
        GroupKind::Symmetric(n) => symmetric(n),
        GroupKind::FromTable(table) => FiniteGroup::from_table(table, None),
    }
}

fn cyclic(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "cyclic group order must be positive".into(),
        ));
    }
    let table = (0..n)
        .map(|a| (0..n).map(|b| (a + b) % n).collect())
        .collect();
    let labels = (0..n).map(|a| a.to_string()).collect();
    let mut g = FiniteGroup::from_table(table, Some(labels))?;
    g.cyclic_factors = Some(vec![n]);
    Ok(g)
}

fn product(a: &FiniteGroup, b: &FiniteGroup) -> FiniteGroup {
    let (na, nb) = (a.order, b.order);
    let n = na * nb;
    let mut mul = vec![0; n * n];
    for x in 0..n {
        let (x1, x2) = (x / nb, x % nb);
        for y in 0..n {
            let (y1, y2) = (y / nb, y % nb);
            mul[x * n + y] = a.mul(x1, y1) * nb + b.mul(x2, y2);
        }
    }
    let inv = (0..n).map(|x| a.inv(x / nb) * nb + b.inv(x % nb)).collect();
    let labels = (0..n)
        .map(|x| format!("({},{})", a.label(x / nb), b.label(x % nb)))
        .collect();
    let cyclic_factors = match (&a.cyclic_factors, &b.cyclic_factors) {
        (Some(fa), Some(fb)) => Some(fa.iter().chain(fb).copied().collect()),
        _ => None,
    };
    FiniteGroup {
        order: n,
        mul,
        inv,
        labels: Some(labels),
        cyclic_factors,
    }
}

fn dihedral(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "dihedral parameter must be positive".into(),
        ));
    }
    // r^k -> k, s r^k -> n + k
    let order = 2 * n;
    let table = (0..order)
        .map(|x| {
            (0..order)
                .map(|y| {
                    let (xs, xk) = (x >= n, x % n);
                    let (ys, yk) = (y >= n, y % n);
                    match (xs, ys) {
                        (false, false) => (xk + yk) % n,
                        (false, true) => n + (yk + n - xk) % n,
                        (true, false) => n + (xk + yk) % n,
                        (true, true) => (yk + n - xk) % n,
                    }
                })
                .collect()
        })
        .collect();
    let labels = (0..order)
        .map(|x| {
            let k = x % n;
            let rot = match k {
                0 => String::new(),
                1 => "r".to_string(),
                _ => format!("r^{k}"),
            };
            match (x >= n, rot.is_empty()) {
                (false, true) => "e".to_string(),
                (false, false) => rot,
                (true, _) => format!("s{rot}"),
            }
        })
        .collect();
    FiniteGroup::from_table(table, Some(labels))
}

fn symmetric(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "symmetric degree must be positive".into(),
        ));
    }
    if n > MAX_SYMMETRIC_DEGREE {
        return Err(Error::UnsupportedSize(format!(
            "symmetric({n}) exceeds the cap of {MAX_SYMMETRIC_DEGREE}"
        )));
    }
    let perms = permutations(n);
    let index = |p: &[usize]| {
        perms
            .iter()
            .position(|q| q == p)
            .expect("closed under composition")
    };
    // (pq)(i) = p(q(i))
    let table = perms
        .iter()
        .map(|p| {
            perms
                .iter()
                .map(|q| index(&q.iter().map(|&i| p[i]).collect::<Vec<_>>()))
                .collect()
        })
        .collect();
    let labels = perms
        .iter()
        .map(|p| p.iter().map(|i| (i + 1).to_string()).collect::<String>())
        .collect();
    FiniteGroup::from_table(table, Some(labels))
}

/// All permutations of `0..n` in lexicographic order (identity first).
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..n.saturating_sub(1))
            .rev()
            .find(|&i| cur[i] < cur[i + 1])
        else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// One failed group axiom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Shape { detail: String },
    Identity { element: usize },
    Inverse { element: usize },
    Associativity { a: usize, b: usize, c: usize },
}

/// Outcome of [`validate_group`]. At most [`ValidationReport::CAP`]
/// violations of each kind are recorded.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub const CAP: usize = 10;

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the group axioms on a raw Cayley table with identity at index 0.
pub fn validate_group(table: &[Vec<usize>]) -> ValidationReport {
    let n = table.len();
    let mut report = ValidationReport::default();
    if n == 0 {
        report.violations.push(Violation::Shape {
            detail: "empty table".into(),
        });
        return report;
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != n {
            report.violations.push(Violation::Shape {
                detail: format!("row {i} has length {} (expected {n})", row.len()),
            });
        } else if let Some(&bad) = row.iter().find(|&&x| x >= n) {
            report.violations.push(Violation::Shape {
                detail: format!("row {i} contains out-of-range entry {bad}"),
            });
        }
    }
    if !report.is_ok() {
        return report;
    }
    let m = |a: usize, b: usize| table[a][b];

    let mut count = 0;
    for a in 0..n {
        if (m(0, a) != a || m(a, 0) != a) && count < ValidationReport::CAP {
            report.violations.push(Violation::Identity { element: a });
            count += 1;
        }
    }
    let mut count = 0;
    for a in 0..n {
        let has_inverse = (0..n).any(|b| m(a, b) == 0 && m(b, a) == 0);
        if !has_inverse && count < ValidationReport::CAP {
            report.violations.push(Violation::Inverse { element: a });
            count += 1;
        }
    }
    let mut count = 0;
    'outer: for a in 0..n {
        for b in 0..n {
            let ab = m(a, b);
            for c in 0..n {
                if m(ab, c) != m(a, m(b, c)) {
                    report.violations.push(Violation::Associativity { a, b, c });
                    count += 1;
                    if count == ValidationReport::CAP {
                        break 'outer;
                    }
                }
            }
        }
    }
    report
}

impl FiniteGroup {
    /// Builds a group from a Cayley table, rejecting tables that fail
    /// [`validate_group`].
    pub fn from_table(table: Vec<Vec<usize>>, labels: Option<Vec<String>>) -> Result<Self> {
        let report = validate_group(&table);
        if !report.is_ok() {
            return Err(Error::InvalidTable(format!("{:?}", report.violations)));
        }
        let n = table.len();
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::InvalidTable(format!(
                    "{} labels for a group of order {n}",
                    l.len()
                )));
            }
        }
        let mul: Vec<usize> = table.into_iter().flatten().collect();
        let inv = (0..n)
            .map(|a| (0..n).find(|&b| mul[a * n + b] == IDENTITY).unwrap())
            .collect();
        Ok(FiniteGroup {
            order: n,
            mul,
            inv,
            labels,
            cyclic_factors: None,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    /// Modular function; identically 1 for finite groups.
    pub fn modular_function(&self, _a: usize) -> f64 {
        1.0
    }

    pub fn label(&self, a: usize) -> String {
        match &self.labels {
            Some(l) => l[a].clone(),
            None => a.to_string(),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    /// Orders `q_1, ..., q_k` when the group was built as `Z_{q_1} x ... x Z_{q_k}`.
    pub fn cyclic_factors(&self) -> Option<&[usize]> {
        self.cyclic_factors.as_deref()
    }

    /// Declares the group to be `Z_{q_1} x ... x Z_{q_k}` in mixed-radix
    /// index order (first factor most significant). The table is checked
    /// against that structure.
    pub fn with_cyclic_factors(mut self, factors: Vec<usize>) -> Result<Self> {
        if factors.iter().product::<usize>() != self.order || factors.contains(&0) {
            return Err(Error::NotCyclicProduct);
        }
        self.cyclic_factors = Some(factors);
        for a in 0..self.order {
            for b in 0..self.order {
                let (x, y) = (self.coords(a).unwrap(), self.coords(b).unwrap());
                let sum: Vec<usize> = x
                    .iter()
                    .zip(&y)
                    .zip(self.cyclic_factors.as_ref().unwrap())
                    .map(|((u, v), q)| (u + v) % q)
                    .collect();
                if self.from_coords(&sum) != Some(self.mul(a, b)) {
                    return Err(Error::NotCyclicProduct);
                }
            }
        }
        Ok(self)
    }

    /// Coordinates of `a` in the declared cyclic product.
    pub fn coords(&self, mut a: usize) -> Option<Vec<usize>> {
        let factors = self.cyclic_factors.as_ref()?;
        let mut out = vec![0; factors.len()];
        for (slot, q) in out.iter_mut().zip(factors).rev() {
            *slot = a % q;
            a /= q;
        }
        Some(out)
    }

    pub fn from_coords(&self, coords: &[usize]) -> Option<usize> {
        let factors = self.cyclic_factors.as_ref()?;
        if coords.len() != factors.len() {
            return None;
        }
        Some(
            coords
                .iter()
                .zip(factors)
                .fold(0, |acc, (c, q)| acc * q + c % q),
        )
    }

    /// Smallest `k >= 1` with `a^k = e`.
    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != IDENTITY {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Structural equality, with a pointer fast path.
    pub fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || **self == **other
    }

    /// Number of conjugacy classes.
    pub fn class_count(&self) -> usize {
        let mut seen = vec![false; self.order];
        let mut classes = 0;
        for a in 0..self.order {
            if seen[a] {
                continue;
            }
            classes += 1;
            for g in 0..self.order {
                seen[self.mul(self.mul(g, a), self.inv(g))] = true;
            }
        }
        classes
    }
}

/// On-disk group description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupFile {
    pub order: usize,
    pub mul: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cyclic_factors: Option<Vec<usize>>,
}

impl From<&FiniteGroup> for GroupFile {
    fn from(g: &FiniteGroup) -> Self {
        GroupFile {
            order: g.order,
            mul: g.table(),
            labels: g.labels.clone(),
            cyclic_factors: g.cyclic_factors.clone(),
        }
    }
}

impl TryFrom<GroupFile> for FiniteGroup {
    type Error = Error;

    fn try_from(file: GroupFile) -> Result<Self> {
        if file.mul.len() != file.order {
            return Err(Error::InvalidTable(format!(
                "declared order {} but table has {} rows",
                file.order,
                file.mul.len()
            )));
        }
        let g = FiniteGroup::from_table(file.mul, file.labels)?;
        match file.cyclic_factors {
            Some(f) => g.with_cyclic_factors(f),
            None => Ok(g),
        }
    }
}
