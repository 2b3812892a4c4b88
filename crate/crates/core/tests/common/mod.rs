//! Groups and cocycles shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twista::cocycle::{bilinear_cocycle, normalize_cocycle, similarity_apply, CoboundaryWitness, Cocycle};
use twista::group::{build_group, FiniteGroup, GroupKind};

pub fn group(kind: GroupKind) -> Arc<FiniteGroup> {
    Arc::new(build_group(kind).unwrap())
}

pub fn cyclic_product(orders: &[usize]) -> Arc<FiniteGroup> {
    let mut acc = group(GroupKind::Cyclic(orders[0]));
    for &q in &orders[1..] {
        acc = group(GroupKind::Product(acc, group(GroupKind::Cyclic(q))));
    }
    acc
}

pub struct Case {
    pub name: String,
    pub sigma: Cocycle,
}

pub struct SuiteGroup {
    pub name: &'static str,
    pub group: Arc<FiniteGroup>,
    pub cases: Vec<Case>,
}

/// A normalized cocycle similar to `base`.
pub fn random_twist(base: &Cocycle, m: u32, seed: u64) -> Cocycle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xi = CoboundaryWitness::random(base.group().order(), m, &mut rng);
    normalize_cocycle(&similarity_apply(base, &xi)).0
}

fn abelian(name: &'static str, orders: &[usize], a: Vec<Vec<i64>>, m: u32, seed: u64) -> SuiteGroup {
    let g = cyclic_product(orders);
    let trivial = Cocycle::trivial(g.clone());
    let bil = bilinear_cocycle(g.clone(), &a, m).unwrap();
    let twist = random_twist(&bil, 5, seed);
    SuiteGroup {
        name,
        group: g,
        cases: vec![
            Case { name: "trivial".into(), sigma: trivial },
            Case { name: "bilinear".into(), sigma: bil },
            Case { name: "bilinear+coboundary".into(), sigma: twist },
        ],
    }
}

/// Non-abelian groups get the trivial cocycle and two normalized
/// coboundary twists of it with different root orders.
fn nonabelian(name: &'static str, kind: GroupKind, seed: u64) -> SuiteGroup {
    let g = group(kind);
    let trivial = Cocycle::trivial(g.clone());
    let a = random_twist(&trivial, 4, seed);
    let b = random_twist(&trivial, 6, seed + 1);
    SuiteGroup {
        name,
        group: g,
        cases: vec![
            Case { name: "trivial".into(), sigma: trivial },
            Case { name: "coboundary m=4".into(), sigma: a },
            Case { name: "coboundary m=6".into(), sigma: b },
        ],
    }
}

/// Z4, Z2xZ2, Z3^2, D4, S3, S4.
pub fn suite() -> Vec<SuiteGroup> {
    vec![
        abelian("Z4", &[4], vec![vec![1]], 4, 101),
        abelian("Z2xZ2", &[2, 2], vec![vec![0, 1], vec![0, 0]], 2, 102),
        abelian("Z3^2", &[3, 3], vec![vec![0, 1], vec![0, 0]], 3, 103),
        nonabelian("D4", GroupKind::Dihedral(4), 104),
        nonabelian("S3", GroupKind::Symmetric(3), 106),
        nonabelian("S4", GroupKind::Symmetric(4), 108),
    ]
}
