//! Seeded random pairs `(A, W)` with prescribed core size and index, built
//! from the block form of the weighted core-EP decomposition.

use nalgebra::QR;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{GinvError, Result};
use crate::linalg::{identity, zeros, ComplexMatrix, C64};
use crate::tolerance::ToleranceConfig;
use crate::weighted::{make_weighted_pair, WeightedCoreEpDecomposition, WeightedPair};

const MAX_ATTEMPTS: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSpec {
    pub q: usize,
    pub n: usize,
    /// rank of `(WA)^k`
    pub t: usize,
    pub target_k: usize,
    pub seed: u64,
    /// Singular values of `A1`, `W1` are drawn from `[1/condition_cap, 1]`.
    pub condition_cap: f64,
}

/// Default bound on the condition numbers of `A1`, `W1`. The bordered matrix
/// behind Cramer's rule has condition number up to `cap^(2(2k+m+1))`, so
/// larger caps quickly exhaust double precision for `k = 3`.
pub const DEFAULT_CONDITION_CAP: f64 = 2.0;

impl PairSpec {
    pub fn new(q: usize, n: usize, t: usize, target_k: usize, seed: u64) -> Self {
        Self {
            q,
            n,
            t,
            target_k,
            seed,
            condition_cap: DEFAULT_CONDITION_CAP,
        }
    }

    /// Feasible spec drawn from `seed` with `q, n ≤ max_size` and
    /// `k ≤ k_max`; sizes, core size and index are spread uniformly.
    pub fn sample(seed: u64, max_size: usize, k_max: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (max_size, k_max) = (max_size.max(1), k_max.max(1));
        loop {
            let q = rng.random_range(1..=max_size);
            let n = rng.random_range(1..=max_size);
            let t = rng.random_range(0..=q.min(n));
            let mut spec = Self::new(q, n, t, 1, rng.random());
            spec.target_k = rng.random_range(1..=spec.max_k().min(k_max));
            if spec.check().is_ok() {
                return spec;
            }
        }
    }

    /// Largest index realizable for these sizes.
    pub fn max_k(&self) -> usize {
        let (a, b) = (self.q - self.t.min(self.q), self.n - self.t.min(self.n));
        let s = a.min(b);
        if a != b {
            s + 1
        } else {
            s.max(1)
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(GinvError::Parameter(msg));
        if self.q == 0 || self.n == 0 {
            return bad(format!("sizes must be positive, got {}x{}", self.q, self.n));
        }
        if self.t > self.q.min(self.n) {
            return bad(format!(
                "core size {} exceeds min({}, {})",
                self.t, self.q, self.n
            ));
        }
        if !(self.condition_cap >= 1.0 && self.condition_cap.is_finite()) {
            return bad(format!("condition_cap must be >= 1, got {}", self.condition_cap));
        }
        if self.target_k == 0 || self.target_k > self.max_k() {
            return bad(format!(
                "index {} is not realizable for q={}, n={}, t={} (max {})",
                self.target_k,
                self.q,
                self.n,
                self.t,
                self.max_k()
            ));
        }
        let (a, b) = (self.q - self.t, self.n - self.t);
        if self.t == 0 && self.target_k == 1 && a.min(b) < 2 {
            // A3 W3 = 0 and W3 A3 = 0 with a vector-shaped block force A3 = 0
            return bad(format!(
                "t=0, k=1 with q={}, n={} forces A = 0",
                self.q, self.n
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedPair {
    pub pair: WeightedPair,
    pub ground_truth_blocks: WeightedCoreEpDecomposition,
    pub declared_k: usize,
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng) * scale)
}

/// Haar-like unitary from the QR factorization of a Gaussian matrix, with the
/// diagonal of `R` normalized to be positive.
fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    if n == 0 {
        return zeros(0, 0);
    }
    let qr = QR::new(random_matrix(rng, n, n, 1.0));
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Nonsingular `t×t` block with singular values in `[1/cap, 1]`.
fn conditioned_block(rng: &mut ChaCha8Rng, t: usize, cap: f64) -> ComplexMatrix {
    let left = random_unitary(rng, t);
    let right = random_unitary(rng, t);
    let log_cap = cap.ln();
    let mut d = zeros(t, t);
    for i in 0..t {
        let u: f64 = rng.random();
        d[(i, i)] = C64::new((-u * log_cap).exp(), 0.0);
    }
    left * d * right.adjoint()
}

/// Unit upper-triangular matrix with modest off-diagonal entries; cheap to
/// invert accurately and well conditioned for small sizes.
fn mixing_matrix(rng: &mut ChaCha8Rng, n: usize) -> (ComplexMatrix, ComplexMatrix) {
    let mut s = identity(n);
    for i in 0..n {
        for j in i + 1..n {
            s[(i, j)] = gaussian(rng) * 0.3;
        }
    }
    let inv = s
        .clone()
        .lu()
        .try_inverse()
        .expect("unit triangular matrix is invertible");
    (s, inv)
}

fn shift(n: usize, len: usize) -> ComplexMatrix {
    let mut j = zeros(n, n);
    for i in 0..len.saturating_sub(1) {
        j[(i, i + 1)] = C64::new(1.0, 0.0);
    }
    j
}

/// Trailing blocks `A3` (a×b), `W3` (b×a) whose products are nilpotent with
/// `max(Ind(A3 W3), Ind(W3 A3)) = k` (or products of zero size).
fn trailing_blocks(
    rng: &mut ChaCha8Rng,
    a: usize,
    b: usize,
    k: usize,
) -> (ComplexMatrix, ComplexMatrix) {
    let s = a.min(b);
    let one = C64::new(1.0, 0.0);
    let (mut a3, mut w3) = (zeros(a, b), zeros(b, a));
    if k == 1 {
        if s >= 2 {
            // orthogonal rank-one pieces: both products vanish
            a3[(0, 0)] = one;
            w3[(1, 1)] = one;
        } else {
            // A3 = 0; only reachable with t > 0, so A stays nonzero
            w3 = random_matrix(rng, b, a, 1.0);
        }
    } else if k <= s {
        for i in 0..s {
            a3[(i, i)] = one;
        }
        w3.view_mut((0, 0), (s, s)).copy_from(&shift(s, k));
    } else if a > b {
        // A3 W3 is a shift of length b + 1
        for i in 0..b {
            a3[(i, i)] = one;
            w3[(i, i + 1)] = one;
        }
    } else {
        for i in 0..a {
            w3[(i, i)] = one;
            a3[(i, i + 1)] = one;
        }
    }
    let (sa, sa_inv) = mixing_matrix(rng, a);
    let (sb, sb_inv) = mixing_matrix(rng, b);
    (&sa * a3 * &sb_inv, &sb * w3 * &sa_inv)
}

fn draw(spec: &PairSpec, seed: u64, tol: ToleranceConfig) -> Result<GeneratedPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (q, n, t) = (spec.q, spec.n, spec.t);
    let u = random_unitary(&mut rng, q);
    let v = random_unitary(&mut rng, n);
    let a1 = conditioned_block(&mut rng, t, spec.condition_cap);
    let w1 = conditioned_block(&mut rng, t, spec.condition_cap);
    let a2 = random_matrix(&mut rng, t, n - t, 0.5);
    let w2 = random_matrix(&mut rng, t, q - t, 0.5);
    let (a3, w3) = trailing_blocks(&mut rng, q - t, n - t, spec.target_k);
    let blocks = WeightedCoreEpDecomposition {
        u,
        v,
        t,
        a1,
        a2,
        a3,
        w1,
        w2,
        w3,
    };
    let pair = make_weighted_pair(blocks.reassemble_a(), blocks.reassemble_w(), tol)?;
    Ok(GeneratedPair {
        pair,
        ground_truth_blocks: blocks,
        declared_k: spec.target_k,
    })
}

/// Deterministic in `spec`; retries with derived seeds if the assembled pair
/// does not reproduce the requested index and core size numerically.
pub fn generate_pair(spec: &PairSpec) -> Result<GeneratedPair> {
    generate_pair_with(spec, ToleranceConfig::default())
}

pub fn generate_pair_with(spec: &PairSpec, tol: ToleranceConfig) -> Result<GeneratedPair> {
    spec.check()?;
    let mut last = None;
    for attempt in 0..MAX_ATTEMPTS {
        let seed = spec.seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let g = draw(spec, seed, tol)?;
        if g.pair.k() == spec.target_k && g.pair.core_size() == spec.t {
            return Ok(g);
        }
        last = Some((g.pair.k(), g.pair.core_size()));
    }
    let (k, t) = last.expect("at least one attempt");
    Err(GinvError::Parameter(format!(
        "could not realize k={}, t={} (last draw gave k={k}, t={t})",
        spec.target_k, spec.t
    )))
}

/// `size×size` nilpotent matrix of the given index, similar to a shift block.
pub fn generate_nilpotent(size: usize, index: usize, seed: u64) -> Result<ComplexMatrix> {
    if index == 0 || index > size {
        return Err(GinvError::Parameter(format!(
            "nilpotent index must lie in 1..={size}, got {index}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (s, s_inv) = mixing_matrix(&mut rng, size);
    let u = random_unitary(&mut rng, size);
    let j = shift(size, index);
    Ok(&u * s * j * s_inv * u.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, index_of, mat_pow, rel_diff};

    #[test]
    fn nilpotent_examples() {
        let tol = ToleranceConfig::default();
        assert_eq!(frobenius(&generate_nilpotent(3, 1, 7).unwrap()), 0.0);
        let n2 = generate_nilpotent(2, 2, 1).unwrap();
        assert_eq!(index_of(&n2, &tol).unwrap(), 2);
        let n = generate_nilpotent(4, 3, 9).unwrap();
        assert!(frobenius(&mat_pow(&n, 3)) < 1e-12 * frobenius(&n).powi(3));
        assert!(frobenius(&mat_pow(&n, 2)) > 1e-3);
        assert!(generate_nilpotent(2, 3, 0).is_err());
    }

    #[test]
    fn declared_index_is_realized() {
        let g = generate_pair(&PairSpec::new(5, 4, 2, 2, 42)).unwrap();
        assert_eq!(g.pair.k(), 2);
        assert_eq!(g.pair.core_size(), 2);
        assert!(rel_diff(&g.ground_truth_blocks.reassemble_a(), g.pair.a()) < 1e-14);
    }

    #[test]
    fn deterministic_in_seed() {
        let spec = PairSpec::new(6, 4, 1, 3, 11);
        let g1 = generate_pair(&spec).unwrap();
        let g2 = generate_pair(&spec).unwrap();
        assert_eq!(g1.pair.a(), g2.pair.a());
        assert_eq!(g1.pair.w(), g2.pair.w());
    }

    #[test]
    fn extremes() {
        let full = generate_pair(&PairSpec::new(4, 4, 4, 1, 3)).unwrap();
        assert!(full.pair.a().clone().lu().determinant().norm() > 1e-6);
        let nil = generate_pair(&PairSpec::new(4, 3, 0, 1, 5)).unwrap();
        assert_eq!(nil.pair.core_size(), 0);
        assert!(generate_pair(&PairSpec::new(3, 3, 1, 3, 0)).is_err());
        assert!(generate_pair(&PairSpec::new(3, 3, 4, 1, 0)).is_err());
    }

    #[test]
    fn sampled_specs_are_feasible() {
        for seed in 0..200 {
            let spec = PairSpec::sample(seed, 7, 3);
            assert!(spec.q <= 7 && spec.n <= 7 && spec.target_k <= 3);
            generate_pair(&spec).unwrap_or_else(|e| panic!("{spec:?}: {e}"));
        }
        assert_eq!(PairSpec::sample(5, 7, 3), PairSpec::sample(5, 7, 3));
    }

    #[test]
    fn grid_of_specs() {
        for q in 1..=6 {
            for n in 1..=6 {
                for t in 0..=q.min(n) {
                    let base = PairSpec::new(q, n, t, 1, 0);
                    for k in 1..=base.max_k().min(3) {
                        if t == 0 && k == 1 && q.min(n) < 2 {
                            continue;
                        }
                        let spec = PairSpec::new(q, n, t, k, (q * 100 + n * 10 + t) as u64);
                        let g = generate_pair(&spec)
                            .unwrap_or_else(|e| panic!("{spec:?}: {e}"));
                        assert_eq!(g.pair.k(), k, "{spec:?}");
                    }
                }
            }
        }
    }
}
