//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{suite, SuiteGroup};
use twista::algebra::{
    bullet_action, center_dimension, central_extension, lift, regular_rep, twisted_convolve,
    twisted_involution, GroupFunction, TwistedOperator,
};
use twista::cli::quantum_torus;
use twista::cocycle::{cocycle_conjugate, cocycle_product, similarity_apply, CoboundaryWitness, Cocycle};
use twista::group::IDENTITY;
use twista::norms::{
    amenability_report, cb_multiplier_norm, fourier_stieltjes_norm, littlewood_matrix, littlewood_norm,
    schur_apply, schur_symbol, EQUALITY_THRESHOLD,
};
use twista::optim::gamma2::{gamma2, weighted_lower_bound, Gamma2Options};
use twista::optim::linalg::{eig_hermitian, max_abs, operator_norm, CMatrix};
use twista::optim::t2::T2Options;
use twista::positivity::{autocorrelation_pd, gns, is_sigma_pd, pd_kernel, positive_type_oracle, PD_TOL};

type Outcome = Result<String, String>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let g = GroupFunction::random(common::group(twista::group::GroupKind::Cyclic(n * n)), rng);
    CMatrix::from_fn(n, n, |i, j| g.at(i * n + j))
}

/// Algebraic laws, entrywise at 1e-12.
fn criterion_1(suite: &[SuiteGroup]) -> Outcome {
    const TOL: f64 = 1e-12;
    let mut worst = 0.0f64;
    let mut worst_pj = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for sg in suite {
        let g = &sg.group;
        let n = g.order();
        for case in &sg.cases {
            let sigma = &case.sigma;
            let tag = format!("{} {}", sg.name, case.name);
            let m = i64::from(sigma.root_order());
            for s in 0..n {
                for t in 0..n {
                    for r in 0..n {
                        let lhs = i64::from(sigma.exponent(s, t)) + i64::from(sigma.exponent(g.mul(s, t), r));
                        let rhs = i64::from(sigma.exponent(s, g.mul(t, r))) + i64::from(sigma.exponent(t, r));
                        check((lhs - rhs).rem_euclid(m) == 0, || format!("{tag}: cocycle identity at ({s},{t},{r})"))?;
                    }
                }
            }
            let reps: Vec<CMatrix> = (0..n).map(|s| regular_rep(sigma, s)).collect();
            let id = CMatrix::identity(n, n);
            for s in 0..n {
                worst = worst.max(max_abs(&(&reps[s] * reps[s].adjoint() - &id)));
                for t in 0..n {
                    let d = &reps[s] * &reps[t] - &reps[g.mul(s, t)] * sigma.value(s, t);
                    worst = worst.max(max_abs(&d));
                }
            }
            for _ in 0..3 {
                let f = GroupFunction::random(g.clone(), &mut rng);
                let h = GroupFunction::random(g.clone(), &mut rng);
                let fh = twisted_convolve(&f, &h, sigma).map_err(|e| e.to_string())?;
                for s in 0..n {
                    let moved = GroupFunction::new(g.clone(), (&reps[s] * f.as_vector()).iter().copied().collect())
                        .map_err(|e| e.to_string())?;
                    let lhs = twisted_convolve(&moved, &h, sigma).map_err(|e| e.to_string())?;
                    let rhs = &reps[s] * fh.as_vector();
                    worst = worst.max((lhs.as_vector() - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max));
                }
                let lf = lift(&f, sigma).map_err(|e| e.to_string())?;
                let lh = lift(&h, sigma).map_err(|e| e.to_string())?;
                let lfh = lift(&fh, sigma).map_err(|e| e.to_string())?;
                worst = worst.max(max_abs(&(lf.matrix() * lh.matrix() - lfh.matrix())));
                let fs = twisted_involution(&f, sigma).map_err(|e| e.to_string())?;
                let hs = twisted_involution(&h, sigma).map_err(|e| e.to_string())?;
                let lfs = lift(&fs, sigma).map_err(|e| e.to_string())?;
                worst = worst.max(max_abs(&(lfs.matrix() - lf.matrix().adjoint())));
                worst = worst.max(twisted_involution(&fs, sigma).map_err(|e| e.to_string())?.max_diff(&f));
                let fh_star = twisted_involution(&fh, sigma).map_err(|e| e.to_string())?;
                let hs_fs = twisted_convolve(&hs, &fs, sigma).map_err(|e| e.to_string())?;
                worst = worst.max(fh_star.max_diff(&hs_fs));

                let ext = central_extension(sigma).map_err(|e| e.to_string())?;
                let back = ext.project(&ext.embed(&f).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                worst_pj = worst_pj.max(back.max_diff(&f) / f.norm_inf());
            }
            check(worst <= TOL, || format!("{tag}: law residual {worst:e}"))?;
        }
    }
    // P(j(f)) = f up to the rounding of the unit-root products
    check(worst_pj <= 8.0 * f64::EPSILON, || format!("P o j residual {worst_pj:e}"))?;
    Ok(format!("max law residual {worst:.1e}, P o j relative residual {worst_pj:.1e}"))
}

/// Kernel test vs positive-type oracle, GNS residual, |phi(s)| <= phi(e).
fn criterion_2(suite: &[SuiteGroup]) -> Outcome {
    let mut checked = 0usize;
    let mut worst_gns = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for sg in suite {
        let g = &sg.group;
        for case in &sg.cases {
            let sigma = &case.sigma;
            let tag = format!("{} {}", sg.name, case.name);
            for k in 0..100 {
                let f = GroupFunction::random(g.clone(), &mut rng);
                let phi = autocorrelation_pd(&f, sigma).map_err(|e| e.to_string())?;
                let a = is_sigma_pd(&phi, sigma, PD_TOL).map_err(|e| e.to_string())?;
                let b = positive_type_oracle(&phi, sigma, PD_TOL).map_err(|e| e.to_string())?;
                check(a.is_pd && b.is_pd, || format!("{tag}: autocorrelation {k} kernel {} oracle {}", a.is_pd, b.is_pd))?;
                let e = phi.at(IDENTITY).re;
                check(phi.values().iter().all(|z| z.norm() <= e * (1.0 + 1e-12)), || format!("{tag}: |phi(s)| > phi(e)"))?;
                let r = gns(&phi, sigma).map_err(|e| e.to_string())?;
                worst_gns = worst_gns.max(r.residual);

                // half shift the spectrum below zero, half move in a random direction
                let bad = if k % 2 == 0 {
                    let kern = pd_kernel(&phi, sigma).map_err(|e| e.to_string())?.matrix;
                    let shift = min_eigenvalue(&kern)? + 0.05 * e;
                    phi.sub(&GroupFunction::delta(g.clone(), IDENTITY).scale(c(shift))).map_err(|e| e.to_string())?
                } else {
                    let h = GroupFunction::random(g.clone(), &mut rng);
                    phi.add(&h.scale(c(0.5 * e / h.norm_inf()))).map_err(|e| e.to_string())?
                };
                let a = is_sigma_pd(&bad, sigma, PD_TOL).map_err(|e| e.to_string())?;
                let b = positive_type_oracle(&bad, sigma, PD_TOL).map_err(|e| e.to_string())?;
                check(a.is_pd == b.is_pd, || format!("{tag}: perturbation {k} kernel {} oracle {}", a.is_pd, b.is_pd))?;
                if k % 2 == 0 {
                    check(!a.is_pd, || format!("{tag}: shifted function {k} reported p.d."))?;
                }
                checked += 2;
            }
        }
    }
    check(worst_gns <= 1e-10, || format!("GNS residual {worst_gns:e}"))?;
    Ok(format!("{checked} functions, 0 disagreements, max GNS residual {worst_gns:.1e}"))
}

fn min_eigenvalue(k: &CMatrix) -> Result<f64, String> {
    let herm = (k + k.adjoint()) * c(0.5);
    let (vals, _) = eig_hermitian(&herm).map_err(|e| e.to_string())?;
    Ok(vals[0])
}

/// Upper bound for gamma2 of a square invertible-rank `f` by hill climbing
/// over factorizations `f = (f (y^*)^-1) y^*`.
fn factorization_search(f: &CMatrix, rng: &mut ChaCha8Rng) -> f64 {
    let n = f.nrows();
    let cost = |y: &CMatrix| -> f64 {
        match y.adjoint().try_inverse() {
            Some(inv) => {
                let x = f * inv;
                let rows = |m: &CMatrix| (0..n).map(|i| m.row(i).norm()).fold(0.0, f64::max);
                rows(&x) * rows(y)
            }
            None => f64::INFINITY,
        }
    };
    let mut y = random_matrix(n, rng);
    let mut best = cost(&y);
    let mut step = 0.5;
    for _ in 0..20_000 {
        let trial = &y + random_matrix(n, rng) * c(step);
        let v = cost(&trial);
        if v < best {
            best = v;
            y = trial;
        } else {
            step = (step * 0.999).max(1e-9);
        }
    }
    best
}

/// B(G, sigma) vs the SDP multiplier norm on 20 seeded functions.
fn criterion_3(suite: &[SuiteGroup]) -> Outcome {
    let mut worst = 0.0f64;
    let mut total = 0;
    for sg in suite {
        for case in &sg.cases {
            let tag = format!("{} {}", sg.name, case.name);
            let r = amenability_report(&case.sigma, 20, 3000, 1e-6);
            check(r.failures.is_empty(), || format!("{tag}: {:?}", r.failures.first()))?;
            check(r.inclusion_violations == 0, || format!("{tag}: {} inclusion violations", r.inclusion_violations))?;
            check(r.max_rel_gap <= EQUALITY_THRESHOLD, || format!("{tag}: relative gap {:e}", r.max_rel_gap))?;
            worst = worst.max(r.max_rel_gap);
            total += r.samples.len();
        }
    }
    Ok(format!("{total} samples, max relative gap {worst:.2e}"))
}

/// Symbols depend only on conj(sigma1) sigma2; similarity leaves the norm fixed.
fn criterion_4(suite: &[SuiteGroup]) -> Outcome {
    let opts = Gamma2Options::default();
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for sg in suite {
        let g = &sg.group;
        let n = g.order();
        let s1 = &sg.cases[2].sigma;
        let s2 = &sg.cases[1].sigma;
        let diff = cocycle_product(&cocycle_conjugate(s1), s2).map_err(|e| e.to_string())?;
        let trivial = Cocycle::trivial(g.clone());
        for k in 0..10 {
            let phi = GroupFunction::random(g.clone(), &mut rng);
            let f12 = schur_symbol(&phi, s1, s2).map_err(|e| e.to_string())?;
            let f0 = schur_symbol(&phi, &trivial, &diff).map_err(|e| e.to_string())?;
            check(f12 == f0, || format!("{}: symbols differ for sample {k}", sg.name))?;
            let a = cb_multiplier_norm(&phi, s1, s2, opts).map_err(|e| e.to_string())?;
            let b = cb_multiplier_norm(&phi, &trivial, &diff, opts).map_err(|e| e.to_string())?;
            check(a.value == b.value, || format!("{}: {} != {}", sg.name, a.value, b.value))?;

            let xi1 = CoboundaryWitness::random(n, 5, &mut rng);
            let xi2 = CoboundaryWitness::random(n, 7, &mut rng);
            let p1 = similarity_apply(s1, &xi1);
            let p2 = similarity_apply(s2, &xi2);
            let moved = phi.twist(&xi1.negate()).twist(&xi2);
            let m = cb_multiplier_norm(&moved, &p1, &p2, opts).map_err(|e| e.to_string())?;
            let d = (m.value - a.value).abs();
            check(d <= 1e-5, || format!("{}: similarity moved the norm by {d:e}", sg.name))?;
            worst = worst.max(d);
        }
    }
    Ok(format!("identical symbols and values, max similarity drift {worst:.1e}"))
}

/// gamma2 on identity, all-ones and the 2x2 Hadamard matrix.
fn criterion_5() -> Outcome {
    let opts = Gamma2Options::default();
    let mut weak = 0.0f64;
    let mut run = |name: &str, f: &CMatrix, expect: f64| -> Result<f64, String> {
        let sol = gamma2(f, opts).map_err(|e| e.to_string())?;
        for &(u, l) in &sol.history {
            weak = weak.max(l - u);
        }
        check((sol.value - expect).abs() <= 1e-6, || format!("{name}: {} vs {expect}", sol.value))?;
        check(sol.dual_value <= sol.value + 1e-12, || format!("{name}: dual above primal"))?;
        Ok(sol.dual_value)
    };
    run("identity", &CMatrix::identity(6, 6), 1.0)?;
    run("all-ones", &CMatrix::from_element(6, 6, c(1.0)), 1.0)?;
    let h = CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(1.0), c(-1.0)]);
    let dual = run("hadamard", &h, 2f64.sqrt())?;
    let upper = factorization_search(&h, &mut ChaCha8Rng::seed_from_u64(5));
    let lower = weighted_lower_bound(&h, &[1.0, 1.0], &[1.0, 1.0]);
    check(lower <= dual + 1e-6 && dual <= upper + 1e-12 && upper - lower <= 1e-3, || {
        format!("hadamard bracket [{lower}, {upper}] vs {dual}")
    })?;
    check((dual - 2f64.sqrt()).abs() <= 1e-6, || format!("hadamard dual {dual}"))?;
    check(weak <= 1e-12, || format!("weak duality violated by {weak:e}"))?;
    Ok(format!("hadamard bracket [{lower:.9}, {upper:.9}], max lower-minus-upper over iterates {weak:.1e}"))
}

/// t2 sandwich, l2 bound, unimodular invariance, Schur action.
fn criterion_6(suite: &[SuiteGroup]) -> Outcome {
    let opts = T2Options::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_inv = 0.0f64;
    for sg in suite {
        let g = &sg.group;
        let n = g.order();
        let de = GroupFunction::delta(g.clone(), IDENTITY);
        let cert = littlewood_norm(&littlewood_matrix(&de), opts).map_err(|e| e.to_string())?;
        check(cert.dual_bound >= 1.0 - 1e-4 && cert.value <= 1.0 + 1e-4, || {
            format!("{}: delta_e in [{}, {}]", sg.name, cert.dual_bound, cert.value)
        })?;

        let count = if n > 16 { 5 } else { 9 };
        for _ in 0..count {
            let phi = GroupFunction::random(g.clone(), &mut rng);
            let psi = littlewood_matrix(&phi);
            let cert = littlewood_norm(&psi, opts).map_err(|e| e.to_string())?;
            check(cert.value <= phi.norm2() + 1e-6, || format!("{}: t2 above l2", sg.name))?;

            let d1: Vec<Complex64> = (0..n).map(|_| Complex64::from_polar(1.0, rng.random::<f64>() * 6.3)).collect();
            let d2: Vec<Complex64> = (0..n).map(|_| Complex64::from_polar(1.0, rng.random::<f64>() * 6.3)).collect();
            let moved = CMatrix::from_fn(n, n, |i, j| d1[i] * psi[(i, j)] * d2[j]);
            let other = littlewood_norm(&moved, opts).map_err(|e| e.to_string())?;
            let d = (other.value - cert.value).abs();
            check(d <= 2.0 * cert.gap.max(other.gap) + 1e-12, || {
                format!("{}: unimodular drift {d:e}, gaps {:e} {:e}", sg.name, cert.gap, other.gap)
            })?;
            worst_inv = worst_inv.max(d);
        }

        let phi = GroupFunction::random(g.clone(), &mut rng);
        let psi = littlewood_matrix(&phi);
        let cert = littlewood_norm(&psi, opts).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let a = random_matrix(n, &mut rng);
            let a = &a / c(operator_norm(&a));
            let act = operator_norm(&schur_apply(&psi, &a).map_err(|e| e.to_string())?);
            check(act <= cert.value + 1e-6, || format!("{}: Schur action {act} above {}", sg.name, cert.value))?;
        }
    }
    Ok(format!("delta_e sandwich ok, 50 l2 checks, max unimodular drift {worst_inv:.1e}"))
}

/// Centers of the finite quantum tori.
fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    for (q, p, expect) in [(2, 1, 1), (3, 1, 1), (3, 2, 1), (5, 1, 1), (5, 3, 1), (2, 0, 4), (3, 0, 9), (5, 0, 25), (4, 2, 4), (6, 2, 4), (6, 3, 9)] {
        let sigma = quantum_torus(q, p).map_err(|e| e.to_string())?;
        let d = center_dimension(&sigma);
        check(d == expect, || format!("q={q} p={p}: center dimension {d}, expected {expect}"))?;
        lines.push(format!("({q},{p})->{d}"));
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs <= 10.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{} in {secs:.2}s", lines.join(" ")))
}

/// Bullet action: B-norm isometry and the pairing identity.
fn criterion_8(suite: &[SuiteGroup]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_iso = 0.0f64;
    let mut worst_pair = 0.0f64;
    for sg in suite {
        let g = &sg.group;
        let n = g.order();
        for case in &sg.cases {
            let sigma = &case.sigma;
            for _ in 0..10 {
                let s = rng.random_range(0..n);
                let u = GroupFunction::random(g.clone(), &mut rng);
                let moved = bullet_action(s, &u, sigma).map_err(|e| e.to_string())?;
                let a = fourier_stieltjes_norm(&u, sigma).map_err(|e| e.to_string())?.value;
                let b = fourier_stieltjes_norm(&moved, sigma).map_err(|e| e.to_string())?.value;
                worst_iso = worst_iso.max((a - b).abs());

                let t = lift(&GroupFunction::random(g.clone(), &mut rng), sigma).map_err(|e| e.to_string())?;
                let lhs = t.pair(&moved).map_err(|e| e.to_string())?;
                let shifted = regular_rep(sigma, s).adjoint() * t.matrix();
                let rhs = TwistedOperator::from_matrix(sigma, shifted)
                    .map_err(|e| e.to_string())?
                    .with_recovered_coeffs()
                    .pair(&u)
                    .map_err(|e| e.to_string())?;
                worst_pair = worst_pair.max((lhs - rhs).norm());
            }
        }
    }
    check(worst_iso <= 1e-8, || format!("isometry defect {worst_iso:e}"))?;
    check(worst_pair <= 1e-12, || format!("pairing defect {worst_pair:e}"))?;
    Ok(format!("isometry defect {worst_iso:.1e}, pairing defect {worst_pair:.1e}"))
}

fn main() {
    let suite = suite();
    let criteria: Vec<(u32, &str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        (1, "algebraic laws", Box::new(|| criterion_1(&suite))),
        (2, "positivity", Box::new(|| criterion_2(&suite))),
        (3, "amenability norm equality", Box::new(|| criterion_3(&suite))),
        (4, "cocycle difference", Box::new(|| criterion_4(&suite))),
        (5, "gamma2 unit values", Box::new(criterion_5)),
        (6, "littlewood", Box::new(|| criterion_6(&suite))),
        (7, "quantum torus", Box::new(criterion_7)),
        (8, "bullet action", Box::new(|| criterion_8(&suite))),
    ];
    let mut failed = 0;
    for (k, name, f) in &criteria {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {k} PASS {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {k} FAIL {name}: {detail} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
