#![allow(dead_code)]

use ginv::linalg::{rel_diff, ComplexMatrix, C64};
use ginv::testgen::{generate_pair, GeneratedPair, PairSpec};
use ginv::ToleranceConfig;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

/// Deterministic spread of feasible specs with `q, n ≤ max_size`, `k ≤ 3`.
pub fn specs(count: usize, max_size: usize, seed: u64) -> Vec<PairSpec> {
    (0..count as u64)
        .map(|i| PairSpec::sample(seed.wrapping_mul(1_000_003).wrapping_add(i), max_size, 3))
        .collect()
}

pub fn pairs(count: usize, max_size: usize, seed: u64) -> Vec<GeneratedPair> {
    specs(count, max_size, seed)
        .iter()
        .map(|s| generate_pair(s).unwrap_or_else(|e| panic!("{s:?}: {e}")))
        .collect()
}

pub fn m_values(k: usize) -> Vec<usize> {
    let mut ms = vec![1, 2, k, k + 2];
    ms.sort_unstable();
    ms.dedup();
    ms
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

#[track_caller]
pub fn assert_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64, what: &str) {
    let d = rel_diff(a, b);
    assert!(d <= tol, "{what}: relative difference {d:.3e} > {tol:.0e}");
}
