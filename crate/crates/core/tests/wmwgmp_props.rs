mod common;

use common::{assert_close, m_values, pairs, tol};
use ginv::classical::m_weak_group_mp;
use ginv::linalg::{
    frobenius, identity, mat_pow, moore_penrose, rank_of, rel_diff, subspace_basis,
    subspaces_equal, ComplexMatrix, Subspace, SubspaceBasis,
};
use ginv::testgen::{generate_pair, PairSpec};
use ginv::weighted::{
    w_drazin, w_m_weak_group, weighted_core_ep_decompose, weighted_hs_decompose,
};
use ginv::wmwgmp::{projector, route_r3_with_exponent, verify_defining_system, Side};
use ginv::{wmwgmp, wmwgmp_route, RouteId, WeightedPair};
use proptest::prelude::*;

fn range(x: &ComplexMatrix) -> SubspaceBasis {
    subspace_basis(x, Subspace::Range, &tol()).unwrap()
}

fn null(x: &ComplexMatrix) -> SubspaceBasis {
    subspace_basis(x, Subspace::Nullspace, &tol()).unwrap()
}

fn a_pinv(p: &WeightedPair) -> ComplexMatrix {
    moore_penrose(p.a(), &tol()).unwrap()
}

#[test]
fn outer_inverse_rank_range_nullspace() {
    for g in pairs(24, 9, 1) {
        let p = &g.pair;
        let k = p.k();
        for m in m_values(k) {
            let x = wmwgmp(p, m).unwrap().inverse;
            assert_close(&(&x * p.a() * &x), &x, 1e-10, "XAX = X");
            let t = p.core_size();
            assert_eq!(rank_of(&x, &tol()).unwrap(), t);
            let wa_k = p.wa_k();
            assert!(subspaces_equal(&range(&x), &range(&wa_k), &tol()));
            let kernel = p.wa_k().adjoint() * mat_pow(&p.wa(), m + 1) * a_pinv(p);
            assert!(subspaces_equal(&null(&x), &null(&kernel), &tol()));
            // rank(W A^{D,W}) = t as well
            assert_eq!(rank_of(&(p.w() * w_drazin(p)), &tol()).unwrap(), t);
        }
    }
}

#[test]
fn projectors_are_oblique_projectors() {
    for g in pairs(16, 8, 2) {
        let p = &g.pair;
        let k = p.k();
        for m in m_values(k) {
            let right = projector(p, m, Side::Right).unwrap();
            let left = projector(p, m, Side::Left).unwrap();
            assert_close(&(&right * &right), &right, 1e-9, "(AX)^2");
            assert_close(&(&left * &left), &left, 1e-9, "(XA)^2");
            let aw_k = p.aw_k();
            let wa_k = p.wa_k();
            let op = p.wa_k().adjoint() * mat_pow(&p.wa(), m + 1);
            assert!(subspaces_equal(&range(&right), &range(&aw_k), &tol()));
            assert!(subspaces_equal(&null(&right), &null(&(&op * a_pinv(p))), &tol()));
            assert!(subspaces_equal(&range(&left), &range(&wa_k), &tol()));
            assert!(subspaces_equal(&null(&left), &null(&op), &tol()));
        }
    }
}

#[test]
fn special_case_collapses() {
    for g in pairs(20, 9, 3) {
        let p = &g.pair;
        let k = p.k();
        let tail = p.w() * p.a() * a_pinv(p);
        // weak core: m = 1 assembled from the W-weighted weak group inverse
        let weak_core = p.w() * w_m_weak_group(p, 1).unwrap() * &tail;
        assert_close(&wmwgmp(p, 1).unwrap().inverse, &weak_core, 1e-8, "m = 1");
        let dmp = p.w() * w_drazin(p) * &tail;
        for m in [k, k + 1, k + 2] {
            assert_close(&wmwgmp(p, m).unwrap().inverse, &dmp, 1e-8, "m >= k");
        }
    }
}

#[test]
fn unweighted_reduces_to_classical() {
    for spec in common::specs(12, 8, 4) {
        let n = spec.n;
        let g = generate_pair(&PairSpec { q: n, t: spec.t.min(n), ..spec });
        let Ok(g) = g else { continue };
        let a = g.pair.a().clone();
        let p = WeightedPair::unweighted(a.clone(), tol()).unwrap();
        for m in m_values(p.k()) {
            let classical = m_weak_group_mp(&a, m, &tol()).unwrap().inverse;
            assert_close(&wmwgmp(&p, m).unwrap().inverse, &classical, 1e-8, "W = I");
            let r7 = wmwgmp_route(&p, m, RouteId::R7).unwrap().inverse;
            assert_close(&r7, &classical, 1e-8, "R7 at W = I");
        }
    }
}

#[test]
fn r3_exponent_stability() {
    for g in pairs(12, 8, 5) {
        let p = &g.pair;
        let k = p.k();
        for m in [1, 2] {
            let a = route_r3_with_exponent(p, m, k).unwrap();
            let b = route_r3_with_exponent(p, m, k + 1).unwrap();
            assert_close(&a, &b, 1e-8, "R3 with l = k, k + 1");
        }
        assert!(route_r3_with_exponent(p, 1, k - 1).is_err());
    }
}

#[test]
fn weighted_weak_group_properties() {
    for g in pairs(16, 8, 6) {
        let p = &g.pair;
        let k = p.k();
        let waw = p.w() * p.a() * p.w();
        for m in m_values(k) {
            let x = w_m_weak_group(p, m).unwrap();
            assert_close(&(&x * &waw * &x), &x, 1e-9, "X (WAW) X = X");
            let aw_k = p.aw_k();
            let wa_k = p.wa_k();
            assert!(subspaces_equal(&range(&x), &range(&aw_k), &tol()));
            let right = &waw * &x;
            assert_close(&(&right * &right), &right, 1e-9, "WAWX idempotent");
            assert!(subspaces_equal(&range(&right), &range(&wa_k), &tol()));
            assert_close(&(&right * &wa_k), &wa_k, 1e-9, "P (WA)^k = (WA)^k");
            let left = &x * &waw;
            assert_close(&(&left * &left), &left, 1e-9, "XWAW idempotent");
            assert!(subspaces_equal(&range(&left), &range(&aw_k), &tol()));
        }
    }
}

#[test]
fn decompositions_round_trip() {
    for g in pairs(30, 12, 7) {
        let p = &g.pair;
        let dec = weighted_core_ep_decompose(p, &tol()).unwrap();
        assert!(rel_diff(&dec.reassemble_a(), p.a()) <= 1e-10);
        assert!(rel_diff(&dec.reassemble_w(), p.w()) <= 1e-10);
        assert_eq!(dec.t, p.core_size());
        assert!(dec.nilpotency_residual(p.k()) <= 1e-10);
        let hs = weighted_hs_decompose(p, &tol()).unwrap();
        assert!(rel_diff(&hs.reassemble_a(), p.a()) <= 1e-10);
        assert!(rel_diff(&hs.reassemble_w(), p.w()) <= 1e-10);
        let (r1, r2) = hs.normalization_residuals();
        assert!(r1 <= 1e-10 && r2 <= 1e-10, "{r1:.2e} {r2:.2e}");
        // ground-truth blocks reassemble the same matrices
        assert!(rel_diff(&g.ground_truth_blocks.reassemble_a(), p.a()) <= 1e-12);
    }
}

#[test]
fn defining_system_accepts_the_inverse_only() {
    let mut distinguished = 0;
    let mut candidates = 0;
    for g in pairs(20, 8, 8) {
        let p = &g.pair;
        let x = wmwgmp(p, 2).unwrap().inverse;
        let report = verify_defining_system(p, 2, &x, &tol()).unwrap();
        assert!(report.holds() && report.consistent(), "{report:?}");
        if p.core_size() < p.q().min(p.n()) {
            candidates += 1;
            let pinv = a_pinv(p);
            if !verify_defining_system(p, 2, &pinv, &tol()).unwrap().holds() {
                distinguished += 1;
            }
        }
    }
    assert!(distinguished * 10 >= candidates * 9, "{distinguished}/{candidates}");
    let id = WeightedPair::unweighted(identity(3), tol()).unwrap();
    let zero = ComplexMatrix::zeros(3, 3);
    assert!(!verify_defining_system(&id, 1, &zero, &tol()).unwrap().holds());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn routes_agree(q in 1usize..8, n in 1usize..8, tf in 0.0f64..1.0, kf in 0.0f64..1.0,
                    seed in any::<u64>(), m in 1usize..5) {
        let t = (tf * (q.min(n) + 1) as f64) as usize;
        let t = t.min(q.min(n));
        let max_k = PairSpec::new(q, n, t, 1, 0).max_k().min(3);
        let k = 1 + (kf * max_k as f64) as usize;
        let k = k.min(max_k);
        prop_assume!(!(t == 0 && k == 1 && q.min(n) < 2));
        let g = generate_pair(&PairSpec::new(q, n, t, k, seed)).unwrap();
        let def = wmwgmp(&g.pair, m).unwrap().inverse;
        let scale = frobenius(&def).max(1.0);
        for r in RouteId::ALL {
            let x = wmwgmp_route(&g.pair, m, r).unwrap().inverse;
            prop_assert!(frobenius(&(&x - &def)) <= 1e-6 * scale, "route {}", r);
        }
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>()) {
        let spec = PairSpec::new(6, 5, 2, 2, seed);
        let a = generate_pair(&spec).unwrap();
        let b = generate_pair(&spec).unwrap();
        prop_assert_eq!(a.pair.a(), b.pair.a());
        prop_assert_eq!(a.pair.w(), b.pair.w());
        prop_assert_eq!(a.pair.k(), 2);
    }
}
