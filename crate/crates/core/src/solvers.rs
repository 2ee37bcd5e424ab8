//! Constrained Frobenius-norm minimization, the general solution of the
//! associated consistent equation, and a bordered Cramer's rule.

use crate::classical::group_unchecked;
use crate::error::{shape_err, GinvError, Result};
use crate::linalg::{
    complete_orthonormal, frobenius, identity, mat_pow, moore_penrose, nullspace_basis_rank,
    validate, zeros, ComplexMatrix, C64,
};
use crate::tolerance::ToleranceConfig;
use crate::weighted::{check_m, w_m_weak_group, WeightedPair};
use crate::wmwgmp::wmwgmp;

/// Default largest `n` accepted by [`cramer_solve`].
pub const CRAMER_MAX_SIZE: usize = 64;

#[derive(Debug, Clone)]
pub struct ConstrainedSolveResult {
    pub x: ComplexMatrix,
    /// Objective value at `x`.
    pub residual_frobenius: f64,
    /// `‖x − P x‖_F` with `P` the orthogonal projector onto the constraint space.
    pub constraint_residual: f64,
}

fn check_rows(b: &ComplexMatrix, rows: usize, op: &'static str, what: &str) -> Result<()> {
    validate(b, what)?;
    if b.nrows() != rows {
        return Err(shape_err(
            op,
            format!("{what} must have {rows} rows, got {}", b.nrows()),
        ));
    }
    Ok(())
}

fn distance_from(basis: &ComplexMatrix, x: &ComplexMatrix) -> f64 {
    frobenius(&(x - basis * (basis.adjoint() * x)))
}

/// `‖W A^{★(m+1)} W X − W A^{★m} B‖_F`, i.e. `‖(WA)^{m+1} W X − (WA)^m B‖_F`.
pub fn objective_wg(p: &WeightedPair, m: usize, b: &ComplexMatrix, x: &ComplexMatrix) -> f64 {
    let wa = p.wa();
    let lhs = mat_pow(&wa, m + 1) * p.w() * x;
    frobenius(&(lhs - mat_pow(&wa, m) * b))
}

/// `‖W A^{★(m+1)} X − W A^{★(m+1)} A^† B‖_F`, i.e. `‖(WA)^{m+1}(X − A^† B)‖_F`.
pub fn objective_wmwgmp(
    p: &WeightedPair,
    m: usize,
    b: &ComplexMatrix,
    x: &ComplexMatrix,
) -> Result<f64> {
    let a_pinv = moore_penrose(p.a(), p.tol())?;
    Ok(frobenius(&(mat_pow(&p.wa(), m + 1) * (x - a_pinv * b))))
}

/// Minimizes [`objective_wg`] over `R(X) ⊆ R((AW)^k)`; `B` is n×p.
pub fn solve_constrained_wg(
    p: &WeightedPair,
    m: usize,
    b: &ComplexMatrix,
) -> Result<ConstrainedSolveResult> {
    check_m(m)?;
    check_rows(b, p.n(), "solve_constrained_wg", "B")?;
    let x = w_m_weak_group(p, m)? * b;
    Ok(ConstrainedSolveResult {
        residual_frobenius: objective_wg(p, m, b, &x),
        constraint_residual: distance_from(&p.aw_k_range(), &x),
        x,
    })
}

/// Minimizes [`objective_wmwgmp`] over `R(X) ⊆ R((WA)^k)`; `B` is q×p.
pub fn solve_constrained_wmwgmp(
    p: &WeightedPair,
    m: usize,
    b: &ComplexMatrix,
) -> Result<ConstrainedSolveResult> {
    check_m(m)?;
    check_rows(b, p.q(), "solve_constrained_wmwgmp", "B")?;
    let x = wmwgmp(p, m)?.inverse * b;
    Ok(ConstrainedSolveResult {
        residual_frobenius: objective_wmwgmp(p, m, b, &x)?,
        constraint_residual: distance_from(&p.wa_k_range(), &x),
        x,
    })
}

/// `X B + (I − X A) Z` with `X = A^{Ⓦm,W,†}`; solves
/// `((WA)^k)^*(WA)^{m+1} X = ((WA)^k)^*(WA)^{m+1} A^† B` for every `Z`.
pub fn general_solution(
    p: &WeightedPair,
    m: usize,
    b: &ComplexMatrix,
    z: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    check_m(m)?;
    check_rows(b, p.q(), "general_solution", "B")?;
    check_rows(z, p.n(), "general_solution", "Z")?;
    if z.ncols() != b.ncols() {
        return Err(shape_err(
            "general_solution",
            format!("Z must have {} columns, got {}", b.ncols(), z.ncols()),
        ));
    }
    let x = wmwgmp(p, m)?.inverse;
    let annihilator = identity(p.n()) - &x * p.a();
    Ok(x * b + annihilator * z)
}

/// `((WA)^k)^*(WA)^{m+1}`, the coefficient of the consistent equation.
pub fn equation_operator(p: &WeightedPair, m: usize) -> ComplexMatrix {
    p.wa_k().adjoint() * mat_pow(&p.wa(), m + 1)
}

/// Relative residual of the consistent equation at `x`.
pub fn equation_residual(
    p: &WeightedPair,
    m: usize,
    b: &ComplexMatrix,
    x: &ComplexMatrix,
) -> Result<f64> {
    let op = equation_operator(p, m);
    let rhs = &op * moore_penrose(p.a(), p.tol())? * b;
    let lhs = &op * x;
    let scale = frobenius(&rhs).max(frobenius(&op) * frobenius(x));
    let r = frobenius(&(lhs - rhs));
    Ok(if scale > 0.0 { r / scale } else { r })
}

#[derive(Debug, Clone)]
pub struct BorderingData {
    pub e: ComplexMatrix,
    /// `(n−t)×n`, with `N(U) = R((WA)^k)`
    pub u: ComplexMatrix,
    /// `n×(n−t)`, orthonormal basis of `N(((WA)^k)^*(WA)^{m+1})`
    pub v: ComplexMatrix,
    pub t: usize,
}

/// `(WA)^k((WA)^k)^*(WA)^{m+1}`, the product `GA` of the bordered system.
pub fn bordered_ga(p: &WeightedPair, m: usize) -> ComplexMatrix {
    p.wa_k() * equation_operator(p, m)
}

/// Builds `E = V (UV)^{-1} U` so that `GA + E` is nonsingular.
pub fn build_bordering_e(
    p: &WeightedPair,
    m: usize,
    tol: &ToleranceConfig,
) -> Result<BorderingData> {
    check_m(m)?;
    tol.validate()?;
    let n = p.n();
    let range = p.wa_k_range();
    let t = range.ncols();
    if t == n {
        return Ok(BorderingData {
            e: zeros(n, n),
            u: zeros(0, n),
            v: zeros(n, 0),
            t,
        });
    }
    let v = nullspace_basis_rank(&equation_operator(p, m), t);
    let u = complete_orthonormal(&range)
        .columns(t, n - t)
        .adjoint()
        .into_owned();
    let uv = &u * &v;
    // UV has orthonormal factors, so its smallest singular value is the
    // cosine-like gap between the two subspaces.
    let sv = uv.singular_values();
    let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let floor = tol.rank_rel(n, n).max(tol.cmp_rel_tol * 1e-4);
    if smallest.is_nan() || smallest <= floor {
        return Err(GinvError::Bordering(format!(
            "UV is numerically singular (smallest singular value {smallest:.3e})"
        )));
    }
    let uv_inv = uv
        .lu()
        .try_inverse()
        .ok_or_else(|| GinvError::Bordering("UV is singular".into()))?;
    Ok(BorderingData {
        e: &v * uv_inv * &u,
        u,
        v,
        t,
    })
}

/// `‖(GA+E)((GA)^# + E^#) − I‖_F / √n`, with both group inverses computed
/// independently of the construction of `E`.
pub fn bordering_identity_residual(
    p: &WeightedPair,
    m: usize,
    data: &BorderingData,
) -> Result<f64> {
    let ga = bordered_ga(p, m);
    let n = p.n();
    let g_sharp = group_unchecked(&ga, p.tol())?;
    let e_sharp = group_unchecked(&data.e, p.tol())?;
    let prod = (&ga + &data.e) * (g_sharp + e_sharp);
    Ok(frobenius(&(prod - identity(n))) / (n as f64).sqrt())
}

/// Which right-hand side the bordered Cramer system uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CramerRhs {
    /// `(WA)^k((WA)^k)^*(WA)^{m+1} A^† B`; consistent with `GA + E`.
    #[default]
    Proof,
    /// `((WA)^k)^*(WA)^{m+1} A^† B`, without the leading `(WA)^k`.
    Statement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CramerOptions {
    pub rhs: CramerRhs,
    pub max_size: usize,
}

impl Default for CramerOptions {
    fn default() -> Self {
        Self {
            rhs: CramerRhs::Proof,
            max_size: CRAMER_MAX_SIZE,
        }
    }
}

/// Entrywise determinant ratios for `(GA + E) X = rhs`.
pub fn cramer_solve(p: &WeightedPair, m: usize, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    cramer_solve_with(p, m, b, CramerOptions::default())
}

pub fn cramer_solve_with(
    p: &WeightedPair,
    m: usize,
    b: &ComplexMatrix,
    opts: CramerOptions,
) -> Result<ComplexMatrix> {
    check_m(m)?;
    check_rows(b, p.q(), "cramer_solve", "B")?;
    let n = p.n();
    if n > opts.max_size {
        return Err(GinvError::Capacity {
            size: n,
            limit: opts.max_size,
        });
    }
    let data = build_bordering_e(p, m, p.tol())?;
    let system = bordered_ga(p, m) + &data.e;
    let op = equation_operator(p, m);
    let a_pinv_b = moore_penrose(p.a(), p.tol())? * b;
    let rhs = match opts.rhs {
        CramerRhs::Proof => p.wa_k() * op * a_pinv_b,
        CramerRhs::Statement => op * a_pinv_b,
    };
    let denom = system.clone().lu().determinant();
    if denom == C64::new(0.0, 0.0) || !denom.re.is_finite() || !denom.im.is_finite() {
        return Err(GinvError::Bordering(format!(
            "bordered matrix has determinant {denom}"
        )));
    }
    let mut x = zeros(n, b.ncols());
    for j in 0..b.ncols() {
        for i in 0..n {
            let mut replaced = system.clone();
            replaced.set_column(i, &rhs.column(j));
            x[(i, j)] = replaced.lu().determinant() / denom;
        }
    }
    Ok(x)
}
