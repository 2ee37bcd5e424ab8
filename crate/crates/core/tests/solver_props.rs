mod common;

use common::{assert_close, pairs, random_matrix, tol};
use ginv::classical::m_weak_group_mp;
use ginv::linalg::{frobenius, identity, moore_penrose, rel_diff, ComplexMatrix};
use ginv::solvers::{
    bordering_identity_residual, build_bordering_e, cramer_solve, cramer_solve_with,
    equation_residual, general_solution, objective_wg, objective_wmwgmp, solve_constrained_wg,
    solve_constrained_wmwgmp, CramerOptions, CramerRhs,
};
use ginv::testgen::{generate_pair, PairSpec};
use ginv::WeightedPair;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `basis · Δ` with `‖Δ‖_F = 1`.
fn feasible_direction(rng: &mut ChaCha8Rng, basis: &ComplexMatrix, p: usize) -> ComplexMatrix {
    let delta = random_matrix(rng, basis.ncols(), p);
    let norm = frobenius(&delta);
    if norm == 0.0 {
        return basis * delta;
    }
    basis * delta * ginv::linalg::c(1.0 / norm, 0.0)
}

#[test]
fn constrained_minimizers_beat_feasible_perturbations() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (i, g) in pairs(12, 8, 21).into_iter().enumerate() {
        let p = &g.pair;
        let cols = if i % 2 == 0 { 1 } else { 3 };
        let m = 1 + i % 3;

        let b = random_matrix(&mut rng, p.n(), cols);
        let wg = solve_constrained_wg(p, m, &b).unwrap();
        assert!(wg.constraint_residual <= 1e-9 * frobenius(&wg.x).max(1.0));
        let basis = p.aw_k_range();
        for j in 0..20 {
            let scale = if j % 2 == 0 { 1e-2 } else { 1.0 };
            let dir = feasible_direction(&mut rng, &basis, cols) * ginv::linalg::c(scale, 0.0);
            let f = objective_wg(p, m, &b, &(&wg.x + dir));
            assert!(wg.residual_frobenius <= f + 1e-9, "{} > {f}", wg.residual_frobenius);
        }

        let b = random_matrix(&mut rng, p.q(), cols);
        let mp = solve_constrained_wmwgmp(p, m, &b).unwrap();
        assert!(mp.constraint_residual <= 1e-9 * frobenius(&mp.x).max(1.0));
        let basis = p.wa_k_range();
        for j in 0..20 {
            let scale = if j % 2 == 0 { 1e-2 } else { 1.0 };
            let dir = feasible_direction(&mut rng, &basis, cols) * ginv::linalg::c(scale, 0.0);
            let f = objective_wmwgmp(p, m, &b, &(&mp.x + dir)).unwrap();
            assert!(mp.residual_frobenius <= f + 1e-9);
        }
    }
}

#[test]
fn general_solution_solves_the_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for g in pairs(12, 9, 22) {
        let p = &g.pair;
        let m = 2;
        let b = random_matrix(&mut rng, p.q(), 2);
        for _ in 0..5 {
            let z = random_matrix(&mut rng, p.n(), 2);
            let x = general_solution(p, m, &b, &z).unwrap();
            assert!(equation_residual(p, m, &b, &x).unwrap() <= 1e-9);
        }
        let x0 = general_solution(p, m, &b, &ComplexMatrix::zeros(p.n(), 2)).unwrap();
        let basis = p.wa_k_range();
        let off = frobenius(&(&x0 - &basis * (basis.adjoint() * &x0)));
        assert!(off <= 1e-9 * frobenius(&x0).max(1.0));
        if basis.ncols() == 0 {
            assert_eq!(frobenius(&x0), 0.0);
            continue;
        }
        // an independent constrained solution: X = Q Y with Y solving the
        // projected equation in least squares
        let op = p.wa_k().adjoint() * ginv::linalg::mat_pow(&p.wa(), m + 1);
        let rhs = &op * moore_penrose(p.a(), &tol()).unwrap() * &b;
        let reduced = &op * &basis;
        let y = moore_penrose(&reduced, &tol()).unwrap() * rhs;
        assert_close(&x0, &(&basis * y), 1e-8, "constrained solution is unique");
    }
}

#[test]
fn unweighted_solvers_match_classical_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for spec in common::specs(8, 7, 23) {
        let Ok(g) = generate_pair(&PairSpec { q: spec.n, t: spec.t.min(spec.n), ..spec }) else {
            continue;
        };
        let a = g.pair.a().clone();
        let p = WeightedPair::unweighted(a.clone(), tol()).unwrap();
        let b = random_matrix(&mut rng, a.nrows(), 2);
        for m in [1, 2] {
            let expect = m_weak_group_mp(&a, m, &tol()).unwrap().inverse * &b;
            let x = solve_constrained_wmwgmp(&p, m, &b).unwrap().x;
            assert_close(&x, &expect, 1e-8, "W = I minimizer");
            if p.n() <= 12 {
                assert_close(&cramer_solve(&p, m, &b).unwrap(), &expect, 1e-6, "W = I Cramer");
            }
        }
    }
}

#[test]
fn bordering_identity_holds() {
    let mut count = 0;
    for g in pairs(16, 9, 24) {
        let p = &g.pair;
        for m in [1, 2] {
            let data = build_bordering_e(p, m, &tol()).unwrap();
            assert!(bordering_identity_residual(p, m, &data).unwrap() <= 1e-8);
            count += 1;
        }
    }
    assert_eq!(count, 32);

    let full = generate_pair(&PairSpec::new(5, 5, 5, 1, 1)).unwrap();
    let d = build_bordering_e(&full.pair, 1, &tol()).unwrap();
    assert_eq!((d.t, frobenius(&d.e)), (5, 0.0));
    assert!(bordering_identity_residual(&full.pair, 1, &d).unwrap() <= 1e-8);

    let nil = generate_pair(&PairSpec::new(5, 4, 0, 2, 2)).unwrap();
    let d = build_bordering_e(&nil.pair, 1, &tol()).unwrap();
    assert_eq!(d.t, 0);
    assert!(rel_diff(&d.e, &identity(4)) <= 1e-10);
    assert!(bordering_identity_residual(&nil.pair, 1, &d).unwrap() <= 1e-8);
}

#[test]
fn cramer_matches_direct_solution() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (i, g) in pairs(12, 10, 25).into_iter().enumerate() {
        let p = &g.pair;
        let b = random_matrix(&mut rng, p.q(), 1 + i % 3);
        let m = 1 + i % 2;
        let direct = solve_constrained_wmwgmp(p, m, &b).unwrap().x;
        let cr = cramer_solve(p, m, &b).unwrap();
        let err = (&cr - &direct).camax();
        assert!(err <= 1e-6 * direct.camax().max(1.0), "entrywise error {err:.2e}");
    }
}

#[test]
fn cramer_statement_variant_is_available() {
    let g = generate_pair(&PairSpec::new(4, 3, 2, 1, 8)).unwrap();
    let b = random_matrix(&mut ChaCha8Rng::seed_from_u64(1), 4, 1);
    let opts = CramerOptions {
        rhs: CramerRhs::Statement,
        ..CramerOptions::default()
    };
    let x = cramer_solve_with(&g.pair, 1, &b, opts).unwrap();
    assert_eq!(x.shape(), (3, 1));
}
