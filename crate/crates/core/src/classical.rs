//! Unweighted generalized inverses of square matrices.

use crate::error::{GinvError, Result};
use crate::linalg::{
    index_at, index_unchecked, mat_pow, moore_penrose, power_range_basis_at, require_square,
    sigma_max, validate, zeros, ComplexMatrix,
};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InverseKind {
    Drazin,
    Group,
    CoreEp,
    Dmp,
    MWeakGroup,
    MWeakGroupMp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquareInverseResult {
    pub inverse: ComplexMatrix,
    pub kind: InverseKind,
    pub index_used: usize,
    pub m_used: Option<usize>,
}

/// Core–nilpotent split of a square matrix.
///
/// `range` spans `R(A^l)`, `corange` spans `R((A^l)^*) = N(A^l)^⊥`, with
/// `l = max(Ind(A), 1)`.
pub(crate) struct CoreSplit {
    pub index: usize,
    pub range: ComplexMatrix,
    pub drazin: ComplexMatrix,
}

pub(crate) fn core_split(a: &ComplexMatrix, tol: &ToleranceConfig) -> CoreSplit {
    core_split_at(a, tol, sigma_max(a))
}

/// Rank decisions cut at `rank_rel × scale`.
pub(crate) fn core_split_at(a: &ComplexMatrix, tol: &ToleranceConfig, scale: f64) -> CoreSplit {
    let n = a.nrows();
    let index = index_at(a, tol, scale);
    let l = index.max(1);
    let range = power_range_basis_at(a, l, tol, scale);
    let t = range.ncols();
    if t == 0 {
        return CoreSplit {
            index,
            range,
            drazin: zeros(n, n),
        };
    }
    let corange = power_range_basis_at(&a.adjoint(), l, tol, scale);
    // A restricted to R(A^l) is invertible; (G*Q) is invertible because
    // R(A^l) and N(A^l) are complementary.
    let core = range.adjoint() * a * &range;
    let core_inv = invert(&core);
    let coupling_inv = invert(&(corange.adjoint() * &range));
    let drazin = &range * core_inv * coupling_inv * corange.adjoint();
    CoreSplit {
        index,
        range,
        drazin,
    }
}

fn invert(m: &ComplexMatrix) -> ComplexMatrix {
    if m.nrows() == 0 {
        return m.clone();
    }
    m.clone()
        .lu()
        .try_inverse()
        .expect("restricted operator on a rank-revealed subspace is invertible")
}

pub(crate) fn drazin_at(a: &ComplexMatrix, tol: &ToleranceConfig, scale: f64) -> ComplexMatrix {
    core_split_at(a, tol, scale).drazin
}

pub(crate) fn core_ep_at(a: &ComplexMatrix, tol: &ToleranceConfig, scale: f64) -> ComplexMatrix {
    let split = core_split_at(a, tol, scale);
    // A^l (A^l)^† is the orthogonal projector onto R(A^l).
    let proj = &split.range * split.range.adjoint();
    split.drazin * proj
}

pub(crate) fn m_weak_group_unchecked(
    a: &ComplexMatrix,
    m: usize,
    tol: &ToleranceConfig,
) -> ComplexMatrix {
    m_weak_group_at(a, m, tol, sigma_max(a))
}

pub(crate) fn m_weak_group_at(
    a: &ComplexMatrix,
    m: usize,
    tol: &ToleranceConfig,
    scale: f64,
) -> ComplexMatrix {
    let cep = core_ep_at(a, tol, scale);
    mat_pow(&cep, m + 1) * mat_pow(a, m)
}

pub(crate) fn group_unchecked(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    group_at(a, tol, sigma_max(a))
}

pub(crate) fn group_at(
    a: &ComplexMatrix,
    tol: &ToleranceConfig,
    scale: f64,
) -> Result<ComplexMatrix> {
    let split = core_split_at(a, tol, scale);
    if split.index > 1 {
        return Err(GinvError::Index { index: split.index });
    }
    Ok(split.drazin)
}

fn check_square(a: &ComplexMatrix, op: &'static str) -> Result<()> {
    validate(a, "A")?;
    require_square(a, op)
}

fn check_m(m: usize) -> Result<()> {
    if m < 1 {
        return Err(GinvError::Parameter("m must be at least 1".into()));
    }
    Ok(())
}

/// Drazin inverse `A^D`.
pub fn drazin(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<SquareInverseResult> {
    check_square(a, "drazin")?;
    let split = core_split(a, tol);
    Ok(SquareInverseResult {
        inverse: split.drazin,
        kind: InverseKind::Drazin,
        index_used: split.index,
        m_used: None,
    })
}

/// Group inverse `A^#`; fails with the computed index when `Ind(A) > 1`.
pub fn group_inverse(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<SquareInverseResult> {
    check_square(a, "group_inverse")?;
    let split = core_split(a, tol);
    if split.index > 1 {
        return Err(GinvError::Index { index: split.index });
    }
    Ok(SquareInverseResult {
        inverse: split.drazin,
        kind: InverseKind::Group,
        index_used: split.index,
        m_used: None,
    })
}

/// Core-EP inverse `A^⊕ = A^D A^l (A^l)^†`, `l = max(Ind(A), 1)`.
pub fn core_ep(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<SquareInverseResult> {
    check_square(a, "core_ep")?;
    let split = core_split(a, tol);
    let proj = &split.range * split.range.adjoint();
    Ok(SquareInverseResult {
        inverse: split.drazin * proj,
        kind: InverseKind::CoreEp,
        index_used: split.index,
        m_used: None,
    })
}

/// m-weak group inverse `(A^⊕)^{m+1} A^m`.
pub fn m_weak_group(
    a: &ComplexMatrix,
    m: usize,
    tol: &ToleranceConfig,
) -> Result<SquareInverseResult> {
    check_square(a, "m_weak_group")?;
    check_m(m)?;
    Ok(SquareInverseResult {
        inverse: m_weak_group_unchecked(a, m, tol),
        kind: InverseKind::MWeakGroup,
        index_used: index_unchecked(a, tol),
        m_used: Some(m),
    })
}

/// DMP inverse `A^D A A^†`.
pub fn dmp(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<SquareInverseResult> {
    check_square(a, "dmp")?;
    let split = core_split(a, tol);
    let pinv = moore_penrose(a, tol)?;
    Ok(SquareInverseResult {
        inverse: split.drazin * a * pinv,
        kind: InverseKind::Dmp,
        index_used: split.index,
        m_used: None,
    })
}

/// m-weak group MP inverse `A^{Ⓦ_m} A A^†`.
pub fn m_weak_group_mp(
    a: &ComplexMatrix,
    m: usize,
    tol: &ToleranceConfig,
) -> Result<SquareInverseResult> {
    check_square(a, "m_weak_group_mp")?;
    check_m(m)?;
    let pinv = moore_penrose(a, tol)?;
    Ok(SquareInverseResult {
        inverse: m_weak_group_unchecked(a, m, tol) * a * pinv,
        kind: InverseKind::MWeakGroupMp,
        index_used: index_unchecked(a, tol),
        m_used: Some(m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, identity, rel_diff, real_matrix};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn nonsingular() -> ComplexMatrix {
        let mut a = real_matrix(3, 3, &[2.0, 1.0, 0.0, -1.0, 3.0, 0.5, 0.0, 1.0, 1.5]);
        a[(0, 2)] = c(0.0, 0.7);
        a
    }

    /// Cline's representation A^l (A^{2l+1})^† A^l, valid for l ≥ Ind(A).
    fn cline(a: &ComplexMatrix, l: usize) -> ComplexMatrix {
        let al = mat_pow(a, l);
        let mid = moore_penrose(&mat_pow(a, 2 * l + 1), &tol()).unwrap();
        &al * mid * &al
    }

    #[test]
    fn drazin_of_nonsingular_is_inverse() {
        let a = nonsingular();
        let inv = a.clone().try_inverse().unwrap();
        let r = drazin(&a, &tol()).unwrap();
        assert_eq!(r.index_used, 0);
        assert!(rel_diff(&r.inverse, &inv) < 1e-13);
    }

    #[test]
    fn drazin_small_examples() {
        let n = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(drazin(&n, &tol()).unwrap().inverse, zeros(2, 2));
        let d = real_matrix(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let want = real_matrix(2, 2, &[0.5, 0.0, 0.0, 0.0]);
        assert!(rel_diff(&drazin(&d, &tol()).unwrap().inverse, &want) < 1e-14);
    }

    #[test]
    fn drazin_matches_cline_formula() {
        // index-2 matrix: diag(2, J2) conjugated by a well-conditioned S
        let core = real_matrix(3, 3, &[2.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let s = real_matrix(3, 3, &[1.0, 0.5, 0.0, 0.0, 1.0, 0.25, 0.5, 0.0, 1.0]);
        let a = &s * core * s.clone().try_inverse().unwrap();
        let r = drazin(&a, &tol()).unwrap();
        assert_eq!(r.index_used, 2);
        for l in 2..=3 {
            assert!(rel_diff(&r.inverse, &cline(&a, l)) < 1e-10);
        }
        let x = &r.inverse;
        let k = 2;
        assert!(rel_diff(&(mat_pow(&a, k + 1) * x), &mat_pow(&a, k)) < 1e-12);
        assert!(rel_diff(&(x * &a * x), x) < 1e-12);
        assert!(rel_diff(&(&a * x), &(x * &a)) < 1e-12);
    }

    #[test]
    fn group_inverse_examples() {
        assert!(rel_diff(&group_inverse(&identity(3), &tol()).unwrap().inverse, &identity(3)) < 1e-14);
        let d = real_matrix(2, 2, &[3.0, 0.0, 0.0, 0.0]);
        let want = real_matrix(2, 2, &[1.0 / 3.0, 0.0, 0.0, 0.0]);
        let g = group_inverse(&d, &tol()).unwrap().inverse;
        assert!(rel_diff(&g, &want) < 1e-14);
        assert!(rel_diff(&(&d * &g * &d), &d) < 1e-14);
        let n = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(
            group_inverse(&n, &tol()).unwrap_err(),
            GinvError::Index { index: 2 }
        );
    }

    #[test]
    fn core_ep_examples() {
        let a = nonsingular();
        let inv = a.clone().try_inverse().unwrap();
        assert!(rel_diff(&core_ep(&a, &tol()).unwrap().inverse, &inv) < 1e-13);
        let n = real_matrix(3, 3, &[0.0, 1.0, 2.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(core_ep(&n, &tol()).unwrap().inverse, zeros(3, 3));
        // A idempotent, A^D = A, A·A·A^† by hand: A^† = [[.5,0],[.5,0]]
        let a = real_matrix(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        let want = real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(rel_diff(&core_ep(&a, &tol()).unwrap().inverse, &want) < 1e-14);
    }

    #[test]
    fn core_ep_independent_of_power() {
        let core = real_matrix(3, 3, &[1.5, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let s = real_matrix(3, 3, &[1.0, 0.2, 0.0, 0.3, 1.0, 0.0, 0.0, 0.4, 1.0]);
        let a = &s * core * s.clone().try_inverse().unwrap();
        let d = drazin(&a, &tol()).unwrap().inverse;
        let base = core_ep(&a, &tol()).unwrap().inverse;
        for l in 2..=4 {
            let al = mat_pow(&a, l);
            let alt = &d * &al * moore_penrose(&al, &tol()).unwrap();
            assert!(rel_diff(&alt, &base) < 1e-10, "l = {l}");
        }
    }

    #[test]
    fn m_weak_group_examples() {
        let a = nonsingular();
        let inv = a.clone().try_inverse().unwrap();
        for m in 1..=3 {
            assert!(rel_diff(&m_weak_group(&a, m, &tol()).unwrap().inverse, &inv) < 1e-12);
        }
        // (A^⊕)^2 A with A^⊕ = [[1,0],[0,0]] gives [[1,1],[0,0]]
        let a = real_matrix(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        let want = real_matrix(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        assert!(rel_diff(&m_weak_group(&a, 1, &tol()).unwrap().inverse, &want) < 1e-14);
        assert!(matches!(
            m_weak_group(&a, 0, &tol()),
            Err(GinvError::Parameter(_))
        ));
    }

    #[test]
    fn m_weak_group_collapses_to_drazin() {
        let a = real_matrix(
            4,
            4,
            &[1.0, 2.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.5, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        );
        let k = index_unchecked(&a, &tol());
        assert_eq!(k, 3);
        let d = drazin(&a, &tol()).unwrap().inverse;
        for m in k..k + 3 {
            let x = m_weak_group(&a, m, &tol()).unwrap().inverse;
            assert!(rel_diff(&x, &d) < 1e-12, "m = {m}");
        }
        let x1 = m_weak_group(&a, 1, &tol()).unwrap().inverse;
        assert!(rel_diff(&(&x1 * &a * &x1), &x1) < 1e-12);
    }

    #[test]
    fn dmp_and_mwgmp_examples() {
        let a = nonsingular();
        let inv = a.clone().try_inverse().unwrap();
        assert!(rel_diff(&dmp(&a, &tol()).unwrap().inverse, &inv) < 1e-13);
        assert!(rel_diff(&m_weak_group_mp(&a, 2, &tol()).unwrap().inverse, &inv) < 1e-12);
        let n = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(dmp(&n, &tol()).unwrap().inverse, zeros(2, 2));
        let d = real_matrix(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let want = real_matrix(2, 2, &[0.5, 0.0, 0.0, 0.0]);
        assert!(rel_diff(&dmp(&d, &tol()).unwrap().inverse, &want) < 1e-14);
        assert_eq!(
            m_weak_group_mp(&zeros(3, 3), 1, &tol()).unwrap().inverse,
            zeros(3, 3)
        );
    }
}
