//! Linear congruence systems `A x = b (mod m)` via Smith diagonalization.
//!
//! Row and column operations are integer-unimodular (extended-gcd 2x2
//! blocks), so they stay invertible after reduction mod `m`. Entries are
//! kept in `[0, m)` throughout, which bounds growth without changing the
//! solution set of the congruence system.

/// Bezout pair for an elimination step. Plain subtraction when `p | q`, so
/// a settled pivot never moves and the sweep terminates.
fn elim(p: i64, q: i64) -> (i64, i64, i64) {
    if q % p == 0 {
        (p, 1, 0)
    } else {
        ext_gcd(p, q)
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    ext_gcd(a, b).0
}

pub(crate) fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

/// Result of diagonalizing `U A V = D (mod m)`.
struct Diagonal {
    diag: Vec<i64>,
    /// `U b`
    rhs: Vec<i64>,
    v: Vec<Vec<i64>>,
}

fn diagonalize(mut a: Vec<Vec<i64>>, mut rhs: Vec<i64>, m: i64) -> Diagonal {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let md = |x: i64| x.rem_euclid(m);
    for row in a.iter_mut() {
        for x in row.iter_mut() {
            *x = md(*x);
        }
    }
    for x in rhs.iter_mut() {
        *x = md(*x);
    }
    let mut v: Vec<Vec<i64>> = (0..cols)
        .map(|i| (0..cols).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut diag = Vec::new();

    for k in 0..rows.min(cols) {
        // pivot: nonzero entry whose gcd with m is smallest
        let mut best: Option<(i64, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, &x) in row.iter().enumerate().skip(k) {
                if x != 0 {
                    let g = gcd(x, m);
                    if best.is_none_or(|(bg, _, _)| g < bg) {
                        best = Some((g, i, j));
                    }
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        a.swap(k, pi);
        rhs.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        for row in v.iter_mut() {
            row.swap(k, pj);
        }

        loop {
            let mut dirty = false;
            for i in k + 1..rows {
                let (p, q) = (a[k][k], a[i][k]);
                if q == 0 {
                    continue;
                }
                let (g, x, y) = elim(p, q);
                let (pg, qg) = (p / g, q / g);
                for j in k..cols {
                    let (r0, r1) = (a[k][j], a[i][j]);
                    a[k][j] = md(x * r0 + y * r1);
                    a[i][j] = md(-qg * r0 + pg * r1);
                }
                let (b0, b1) = (rhs[k], rhs[i]);
                rhs[k] = md(x * b0 + y * b1);
                rhs[i] = md(-qg * b0 + pg * b1);
            }
            for j in k + 1..cols {
                let (p, q) = (a[k][k], a[k][j]);
                if q == 0 {
                    continue;
                }
                let (g, x, y) = elim(p, q);
                let (pg, qg) = (p / g, q / g);
                for row in a.iter_mut().skip(k) {
                    let (c0, c1) = (row[k], row[j]);
                    row[k] = md(x * c0 + y * c1);
                    row[j] = md(-qg * c0 + pg * c1);
                }
                for row in v.iter_mut() {
                    let (c0, c1) = (row[k], row[j]);
                    row[k] = md(x * c0 + y * c1);
                    row[j] = md(-qg * c0 + pg * c1);
                }
                dirty = true;
            }
            if !dirty || (k + 1..rows).all(|i| a[i][k] == 0) {
                break;
            }
        }
        diag.push(a[k][k]);
    }
    Diagonal { diag, rhs, v }
}

/// Solves `A x = b (mod m)`; returns one solution with entries in `[0, m)`
/// or `None` when the system is inconsistent.
pub fn solve_mod(a: &[Vec<i64>], b: &[i64], m: i64) -> Option<Vec<i64>> {
    assert!(m > 0);
    assert_eq!(a.len(), b.len());
    let cols = a.first().map_or(0, Vec::len);
    let d = diagonalize(a.to_vec(), b.to_vec(), m);
    let mut w = vec![0i64; cols];
    for (k, &r) in d.rhs.iter().enumerate() {
        let dk = d.diag.get(k).copied().unwrap_or(0);
        if dk == 0 {
            if r != 0 {
                return None;
            }
            continue;
        }
        let g = gcd(dk, m);
        if r % g != 0 {
            return None;
        }
        let modulus = m / g;
        let (_, inv, _) = ext_gcd((dk / g).rem_euclid(modulus), modulus);
        w[k] = ((r / g) * inv).rem_euclid(modulus);
    }
    let x: Vec<i64> =
        d.v.iter()
            .map(|row| {
                row.iter()
                    .zip(&w)
                    .map(|(p, q)| p * q)
                    .sum::<i64>()
                    .rem_euclid(m)
            })
            .collect();
    let ok = a.iter().zip(b).all(|(row, &bi)| {
        row.iter()
            .zip(&x)
            .map(|(p, q)| p * q)
            .sum::<i64>()
            .rem_euclid(m)
            == bi.rem_euclid(m)
    });
    debug_assert!(ok, "diagonalization produced an invalid solution");
    ok.then_some(x)
}
