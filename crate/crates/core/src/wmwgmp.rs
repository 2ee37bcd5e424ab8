//! The W-weighted m-weak group MP inverse `A^{Ⓦm,W,†} = W A^{Ⓦm,W} W A A^†`.
//!
//! Besides the defining formula ([`RouteId::Def`]) the inverse can be
//! evaluated through nine independent representations. They agree in exact
//! arithmetic and are exported so callers can cross-validate results:
//!
//! | route | formula |
//! |-------|---------|
//! | R1 | `W ((AW)^m A^{⊕,W} W A)^{#,W} W A^{★m} A^†` |
//! | R2 | `((WA)^D)^{m+1} P_{R((WA)^k)} W A^{★(m+1)} A^†` |
//! | R3 | `W A^{★l} W (W A^{★(l+m+1)} W)^† W A^{★(m+1)} A^†`, `l ≥ k` |
//! | R4 | `W (W A^{★(m+1)} W P_{R((AW)^k)})^† W A^{★(m+1)} A^†` |
//! | R5 | `W A^{★(m-1)} W (A^{★m})^{Ⓦ,W} W A A^†` |
//! | R6 | `((WA)^Ⓦ)^m W A^{★m} A^†` |
//! | R7 | `(WA)^{Ⓦm} W A A^†` |
//! | R8 | block formula on the weighted core-EP decomposition |
//! | R9 | block formula on the weighted Hartwig–Spindelböck decomposition |

use std::fmt;
use std::str::FromStr;

use crate::classical::{drazin_at, m_weak_group_at};
use crate::error::{GinvError, Result};
use crate::linalg::{
    frobenius, mat_pow, moore_penrose, pinv_rank, rel_diff, sigma_max, thin_svd, zeros,
    ComplexMatrix, SubspaceBasis,
};
use crate::tolerance::ToleranceConfig;
use crate::weighted::{
    check_m, derived_pair, w_core_ep, w_drazin, w_group, w_m_weak_group,
    weighted_core_ep_decompose, weighted_hs_decompose, WeightedPair,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RouteId {
    Def,
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
}

impl RouteId {
    pub const ALL: [RouteId; 10] = [
        RouteId::Def,
        RouteId::R1,
        RouteId::R2,
        RouteId::R3,
        RouteId::R4,
        RouteId::R5,
        RouteId::R6,
        RouteId::R7,
        RouteId::R8,
        RouteId::R9,
    ];
}

impl fmt::Display for RouteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RouteId::Def => "DEF",
            RouteId::R1 => "R1",
            RouteId::R2 => "R2",
            RouteId::R3 => "R3",
            RouteId::R4 => "R4",
            RouteId::R5 => "R5",
            RouteId::R6 => "R6",
            RouteId::R7 => "R7",
            RouteId::R8 => "R8",
            RouteId::R9 => "R9",
        };
        f.write_str(s)
    }
}

impl FromStr for RouteId {
    type Err = GinvError;

    fn from_str(s: &str) -> Result<Self> {
        RouteId::ALL
            .into_iter()
            .find(|r| r.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| GinvError::Parameter(format!("unknown route {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct WmwgmpResult {
    pub inverse: ComplexMatrix,
    pub route: RouteId,
    pub m: usize,
    pub k: usize,
}

/// `A^{Ⓦm,W,†}` by its definition.
pub fn wmwgmp(p: &WeightedPair, m: usize) -> Result<WmwgmpResult> {
    wmwgmp_route(p, m, RouteId::Def)
}

/// `A^{Ⓦm,W,†}` through the named representation.
pub fn wmwgmp_route(p: &WeightedPair, m: usize, route: RouteId) -> Result<WmwgmpResult> {
    check_m(m)?;
    let inverse = match route {
        RouteId::Def => route_def(p, m)?,
        RouteId::R1 => route_r1(p, m)?,
        RouteId::R2 => route_r2(p, m)?,
        RouteId::R3 => route_r3_with_exponent(p, m, p.k())?,
        RouteId::R4 => route_r4(p, m)?,
        RouteId::R5 => route_r5(p, m)?,
        RouteId::R6 => route_r6(p, m)?,
        RouteId::R7 => route_r7(p, m)?,
        RouteId::R8 => route_r8(p, m)?,
        RouteId::R9 => route_r9(p, m)?,
    };
    Ok(WmwgmpResult {
        inverse,
        route,
        m,
        k: p.k(),
    })
}

fn pinv_a(p: &WeightedPair) -> Result<ComplexMatrix> {
    moore_penrose(p.a(), p.tol())
}

fn route_def(p: &WeightedPair, m: usize) -> Result<ComplexMatrix> {
    let y = w_m_weak_group(p, m)?;
    Ok(p.w() * y * p.w() * p.a() * pinv_a(p)?)
}

fn route_r1(p: &WeightedPair, m: usize) -> Result<ComplexMatrix> {
    let aw = p.aw();
    let b = mat_pow(&aw, m) * w_core_ep(p) * p.wa();
    let bg = w_group(&b, p.w(), p.tol())?;
    Ok(p.w() * bg * mat_pow(&p.wa(), m) * pinv_a(p)?)
}

fn route_r2(p: &WeightedPair, m: usize) -> Result<ComplexMatrix> {
    let wa = p.wa();
    let d = drazin_at(&wa, p.tol(), p.scale());
    let q = p.wa_k_range();
    let proj = &q * q.adjoint();
    Ok(mat_pow(&d, m + 1) * proj * mat_pow(&wa, m + 1) * pinv_a(p)?)
}

/// Route R3 with an explicit exponent `l ≥ k`.
///
/// The inner pseudoinverse acts on a matrix of exact rank
/// `t = rank((WA)^k)` and is truncated there.
pub fn route_r3_with_exponent(p: &WeightedPair, m: usize, l: usize) -> Result<ComplexMatrix> {
    check_m(m)?;
    if l < p.k() {
        return Err(GinvError::Parameter(format!(
            "route R3 needs l >= k = {}, got {l}",
            p.k()
        )));
    }
    let wa = p.wa();
    let t = p.core_size();
    let inner = mat_pow(&wa, l + m + 1) * p.w();
    let left = mat_pow(&wa, l) * p.w();
    Ok(left * pinv_rank(&inner, t) * mat_pow(&wa, m + 1) * pinv_a(p)?)
}

fn route_r4(p: &WeightedPair, m: usize) -> Result<ComplexMatrix> {
    let wa = p.wa();
    let t = p.core_size();
    let q = p.aw_k_range();
    let proj = &q * q.adjoint();
    let inner = mat_pow(&wa, m + 1) * p.w() * proj;
    Ok(p.w() * pinv_rank(&inner, t) * mat_pow(&wa, m + 1) * pinv_a(p)?)
}

fn route_r5(p: &WeightedPair, m: usize) -> Result<ComplexMatrix> {
    // W A^{★(m-1)} W = (WA)^{m-1} W, which is W itself at m = 1
    let left = mat_pow(&p.wa(), m - 1) * p.w();
    let powered = p.star_power_pair(m);
    let weak = w_m_weak_group(&powered, 1)?;
    Ok(left * weak * p.w() * p.a() * pinv_a(p)?)
}

fn route_r6(p: &WeightedPair, m: usize) -> Result<ComplexMatrix> {
    let wa = p.wa();
    let weak = m_weak_group_at(&wa, 1, p.tol(), p.scale());
    Ok(mat_pow(&weak, m) * mat_pow(&wa, m) * pinv_a(p)?)
}

fn route_r7(p: &WeightedPair, m: usize) -> Result<ComplexMatrix> {
    let wa = p.wa();
    Ok(m_weak_group_at(&wa, m, p.tol(), p.scale()) * p.w() * p.a() * pinv_a(p)?)
}

/// Pseudoinverse whose rank cut-off is taken relative to `reference`
/// instead of the block's own largest singular value.
fn block_pinv(block: &ComplexMatrix, reference: f64, tol: &ToleranceConfig) -> ComplexMatrix {
    if block.is_empty() {
        return zeros(block.ncols(), block.nrows());
    }
    let threshold = tol.rank_rel(block.nrows(), block.ncols()) * reference;
    let r = thin_svd(block).s.iter().take_while(|&&s| s > threshold).count();
    pinv_rank(block, r)
}

fn invert(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.is_empty() {
        return Ok(m.clone());
    }
    m.clone().lu().try_inverse().ok_or(GinvError::Decomposition {
        what: "singular leading block",
        residual: 0.0,
    })
}

fn route_r8(p: &WeightedPair, m: usize) -> Result<ComplexMatrix> {
    let dec = weighted_core_ep_decompose(p, p.tol())?;
    let (q, n, t) = (p.q(), p.n(), dec.t);
    let a1_inv = invert(&dec.a1)?;
    let w1a1 = &dec.w1 * &dec.a1;
    let w1a1_inv = invert(&w1a1)?;
    let w3a3 = &dec.w3 * &dec.a3;
    let coupling = &dec.w1 * &dec.a2 + &dec.w2 * &dec.a3;
    // B_m = Σ_{j=0}^{m-1} (W1A1)^j (W1A2 + W2A3) (W3A3)^{m-1-j}, zeroth powers = I
    let mut b_m = zeros(t, n - t);
    for j in 0..m {
        b_m += mat_pow(&w1a1, j) * &coupling * mat_pow(&w3a3, m - 1 - j);
    }
    let a3_proj = &dec.a3 * block_pinv(&dec.a3, sigma_max(p.a()), p.tol());
    let top_right = &w1a1_inv * &dec.w2 * &a3_proj
        + mat_pow(&w1a1_inv, m + 1) * b_m * &dec.w3 * &a3_proj;
    let mut core = zeros(n, q);
    core.view_mut((0, 0), (t, t)).copy_from(&a1_inv);
    core.view_mut((0, t), (t, q - t)).copy_from(&top_right);
    Ok(&dec.v * core * dec.u.adjoint())
}

fn route_r9(p: &WeightedPair, m: usize) -> Result<ComplexMatrix> {
    let hs = weighted_hs_decompose(p, p.tol())?;
    let (r1, r2) = (hs.r1(), hs.r2());
    let (q, n) = (p.q(), p.n());
    // Leading blocks A' = Σ1[K1 L1](:, ..r2) and W' = Σ2[K2 L2](:, ..r1).
    // With r1 = r2 these are Σ1K1 and Σ2K2.
    let a_lead = hs.a_top().columns(0, r2).into_owned();
    let w_lead = hs.w_top().columns(0, r1).into_owned();
    let scale = sigma_max(p.a()) * sigma_max(p.w());
    let c = &w_lead * &a_lead;
    if sigma_max(&c) <= p.tol().rank_rel(q, n) * scale {
        return Ok(zeros(n, q));
    }
    let sub = derived_pair(a_lead, w_lead.clone(), *p.tol(), scale);
    let inner = w_m_weak_group(&sub, m)?;
    let block = &w_lead * inner * &w_lead;
    let s_lead = hs.s.columns(0, r2);
    let t_lead = hs.t.columns(0, r1);
    Ok(s_lead * block * t_lead.adjoint())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `A X` (q×q)
    Right,
    /// `X A` (n×n)
    Left,
}

/// The idempotents `A A^{Ⓦm,W,†}` and `A^{Ⓦm,W,†} A`.
pub fn projector(p: &WeightedPair, m: usize, side: Side) -> Result<ComplexMatrix> {
    let x = wmwgmp(p, m)?.inverse;
    Ok(match side {
        Side::Right => p.a() * x,
        Side::Left => x * p.a(),
    })
}

/// Residuals of the defining system and of the alternative characterization.
#[derive(Debug, Clone)]
pub struct DefiningSystemReport {
    /// `X = W A^{D,W} W A X`
    pub fixed_point_residual: f64,
    /// `A X = A W A^{Ⓦm,W} W A A^†`
    pub ax_residual: f64,
    /// `A X = (A^{⊕,W})^{★m} W A^{★m} W A A^†`
    pub ax_core_ep_residual: f64,
    /// distance of `R(X)` from `R(W A^{D,W})`
    pub range_residual: f64,
    /// both equations of the defining system hold
    pub system_holds: bool,
    /// characterization with the fixed-point equation
    pub characterization_fixed_point: bool,
    /// characterization with the range inclusion
    pub characterization_range: bool,
}

impl DefiningSystemReport {
    pub fn holds(&self) -> bool {
        self.system_holds
    }

    /// True when the defining system and both characterizations agree.
    pub fn consistent(&self) -> bool {
        self.system_holds == self.characterization_fixed_point
            && self.system_holds == self.characterization_range
    }
}

fn rel_residual(lhs: &ComplexMatrix, rhs: &ComplexMatrix) -> f64 {
    rel_diff(lhs, rhs)
}

/// Checks whether `x` solves the defining system of `A^{Ⓦm,W,†}`.
pub fn verify_defining_system(
    p: &WeightedPair,
    m: usize,
    x: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<DefiningSystemReport> {
    check_m(m)?;
    if x.shape() != (p.n(), p.q()) {
        return Err(GinvError::Shape {
            op: "verify_defining_system",
            detail: format!(
                "X must be {}x{}, got {}x{}",
                p.n(),
                p.q(),
                x.nrows(),
                x.ncols()
            ),
        });
    }
    let a = p.a();
    let w = p.w();
    let a_pinv = pinv_a(p)?;
    let wad = w * w_drazin(p);

    let fixed = &wad * w * a * x;
    let fixed_point_residual = rel_residual(x, &fixed);

    let ax = a * x;
    let y_m = w_m_weak_group(p, m)?;
    let ax_rhs = a * w * &y_m * w * a * &a_pinv;
    let ax_residual = rel_residual(&ax, &ax_rhs);

    let cep = w_core_ep(p);
    let wcep = w * &cep;
    let ax_rhs_cep = &cep * mat_pow(&wcep, m - 1) * mat_pow(&p.wa(), m) * w * a * &a_pinv;
    let ax_core_ep_residual = rel_residual(&ax, &ax_rhs_cep);

    let range = SubspaceBasis::span_of(&wad, tol);
    let xn = frobenius(x);
    let range_residual = if xn > 0.0 { range.distance(x) / xn } else { 0.0 };

    let ok = |r: f64| r <= tol.cmp_rel_tol;
    Ok(DefiningSystemReport {
        fixed_point_residual,
        ax_residual,
        ax_core_ep_residual,
        range_residual,
        system_holds: ok(fixed_point_residual) && ok(ax_residual),
        characterization_fixed_point: ok(ax_core_ep_residual) && ok(fixed_point_residual),
        characterization_range: ok(ax_core_ep_residual) && ok(range_residual),
    })
}
