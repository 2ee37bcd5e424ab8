//! W-weighted inverses of rectangular matrices and the two weighted
//! decompositions.
//!
//! Throughout, `A` is q×n and the weight `W` is n×q.

use crate::classical::{core_ep_at, drazin_at, group_at};
use crate::error::{shape_err, GinvError, Result};
use crate::linalg::{
    clean_power_at, complete_orthonormal, frobenius, index_at, mat_pow, power_range_basis_at,
    rank_of, sigma_max, thin_svd, validate, zeros, ComplexMatrix, C64,
};
use crate::tolerance::ToleranceConfig;

/// A matrix, its weight and the shared exponent
/// `k = max(Ind(AW), Ind(WA), 1)`.
#[derive(Debug, Clone)]
pub struct WeightedPair {
    a: ComplexMatrix,
    w: ComplexMatrix,
    k: usize,
    ind_aw: usize,
    ind_wa: usize,
    /// `σ_max(A) σ_max(W)`, the magnitude rank decisions on `AW`, `WA` use
    scale: f64,
    tol: ToleranceConfig,
}

/// Validates shapes and `W ≠ 0`, then caches the indices of `AW` and `WA`.
pub fn make_weighted_pair(
    a: ComplexMatrix,
    w: ComplexMatrix,
    tol: ToleranceConfig,
) -> Result<WeightedPair> {
    validate(&a, "A")?;
    validate(&w, "W")?;
    tol.validate()?;
    if w.nrows() != a.ncols() || w.ncols() != a.nrows() {
        return Err(shape_err(
            "make_weighted_pair",
            format!(
                "A is {}x{} so W must be {}x{}, got {}x{}",
                a.nrows(),
                a.ncols(),
                a.ncols(),
                a.nrows(),
                w.nrows(),
                w.ncols()
            ),
        ));
    }
    if w.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Err(GinvError::Domain("weight matrix must be nonzero".into()));
    }
    let scale = sigma_max(&a) * sigma_max(&w);
    Ok(derived_pair(a, w, tol, scale))
}

/// Pair derived from another one whose products `AW`, `WA` must be judged
/// against the parent's magnitude `scale` (shapes and `W ≠ 0` already hold).
pub(crate) fn derived_pair(
    a: ComplexMatrix,
    w: ComplexMatrix,
    tol: ToleranceConfig,
    scale: f64,
) -> WeightedPair {
    let ind_aw = index_at(&(&a * &w), &tol, scale);
    let ind_wa = index_at(&(&w * &a), &tol, scale);
    WeightedPair {
        scale,
        k: ind_aw.max(ind_wa).max(1),
        a,
        w,
        ind_aw,
        ind_wa,
        tol,
    }
}

impl WeightedPair {
    pub fn new(a: ComplexMatrix, w: ComplexMatrix, tol: ToleranceConfig) -> Result<Self> {
        make_weighted_pair(a, w, tol)
    }

    /// Pair with `W = I`; `A` must be square.
    pub fn unweighted(a: ComplexMatrix, tol: ToleranceConfig) -> Result<Self> {
        let n = a.nrows();
        make_weighted_pair(a, ComplexMatrix::identity(n, n), tol)
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn w(&self) -> &ComplexMatrix {
        &self.w
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn index_aw(&self) -> usize {
        self.ind_aw
    }

    pub fn index_wa(&self) -> usize {
        self.ind_wa
    }

    pub fn tol(&self) -> &ToleranceConfig {
        &self.tol
    }

    /// Row count `q` of `A`.
    pub fn q(&self) -> usize {
        self.a.nrows()
    }

    /// Column count `n` of `A`.
    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn aw(&self) -> ComplexMatrix {
        &self.a * &self.w
    }

    pub fn wa(&self) -> ComplexMatrix {
        &self.w * &self.a
    }

    /// `(WA)^k` with rounding outside `R((WA)^k)` removed.
    pub fn wa_k(&self) -> ComplexMatrix {
        clean_power_at(&self.wa(), self.k, &self.tol, self.scale)
    }

    /// `(AW)^k` with rounding outside `R((AW)^k)` removed.
    pub fn aw_k(&self) -> ComplexMatrix {
        clean_power_at(&self.aw(), self.k, &self.tol, self.scale)
    }

    /// Orthonormal basis of `R((WA)^k)`.
    pub fn wa_k_range(&self) -> ComplexMatrix {
        power_range_basis_at(&self.wa(), self.k, &self.tol, self.scale)
    }

    /// Orthonormal basis of `R((AW)^k)`.
    pub fn aw_k_range(&self) -> ComplexMatrix {
        power_range_basis_at(&self.aw(), self.k, &self.tol, self.scale)
    }

    pub(crate) fn scale(&self) -> f64 {
        self.scale
    }

    /// `t = rank((WA)^k)`.
    pub fn core_size(&self) -> usize {
        self.wa_k_range().ncols()
    }

    /// Same weight, `A` replaced by `A^{★l}`.
    pub(crate) fn star_power_pair(&self, l: usize) -> WeightedPair {
        let a = &self.a * mat_pow(&self.wa(), l - 1);
        // W A^{★l} = (WA)^l, so its natural magnitude is scale^l
        derived_pair(a, self.w.clone(), self.tol, self.scale.powi(l as i32))
    }
}

pub(crate) fn check_m(m: usize) -> Result<()> {
    if m < 1 {
        return Err(GinvError::Parameter("m must be at least 1".into()));
    }
    Ok(())
}

/// W-weighted Drazin inverse `A ((WA)^D)^2`.
pub fn w_drazin(p: &WeightedPair) -> ComplexMatrix {
    let d = drazin_at(&p.wa(), &p.tol, p.scale);
    &p.a * &d * &d
}

/// W-weighted core-EP inverse `A ((WA)^⊕)^2`.
pub fn w_core_ep(p: &WeightedPair) -> ComplexMatrix {
    let c = core_ep_at(&p.wa(), &p.tol, p.scale);
    &p.a * &c * &c
}

/// W-weighted m-weak group inverse `(A^{⊕,W})^{★(m+1)} W A^{★m}`.
pub fn w_m_weak_group(p: &WeightedPair, m: usize) -> Result<ComplexMatrix> {
    check_m(m)?;
    let y = w_core_ep(p);
    // Y^{★(m+1)} = Y (WY)^m and W A^{★m} = (WA)^m
    let wy = &p.w * &y;
    Ok(&y * mat_pow(&wy, m) * mat_pow(&p.wa(), m))
}

/// W-weighted group inverse `B ((WB)^#)^2`; requires `Ind(WB) ≤ 1`.
pub fn w_group(b: &ComplexMatrix, w: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let g = group_at(&(w * b), tol, sigma_max(w) * sigma_max(b))?;
    Ok(b * &g * &g)
}

/// `A = U [[A1, A2], [0, A3]] V*`, `W = V [[W1, W2], [0, W3]] U*`.
#[derive(Debug, Clone)]
pub struct WeightedCoreEpDecomposition {
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    pub t: usize,
    pub a1: ComplexMatrix,
    pub a2: ComplexMatrix,
    pub a3: ComplexMatrix,
    pub w1: ComplexMatrix,
    pub w2: ComplexMatrix,
    pub w3: ComplexMatrix,
}

fn upper_block(
    top_left: &ComplexMatrix,
    top_right: &ComplexMatrix,
    bottom_right: &ComplexMatrix,
) -> ComplexMatrix {
    let t = top_left.nrows();
    let rows = t + bottom_right.nrows();
    let cols = top_left.ncols() + top_right.ncols();
    let mut m = zeros(rows, cols);
    m.view_mut((0, 0), top_left.shape()).copy_from(top_left);
    m.view_mut((0, top_left.ncols()), top_right.shape())
        .copy_from(top_right);
    m.view_mut((t, top_left.ncols()), bottom_right.shape())
        .copy_from(bottom_right);
    m
}

impl WeightedCoreEpDecomposition {
    pub fn reassemble_a(&self) -> ComplexMatrix {
        &self.u * upper_block(&self.a1, &self.a2, &self.a3) * self.v.adjoint()
    }

    pub fn reassemble_w(&self) -> ComplexMatrix {
        &self.v * upper_block(&self.w1, &self.w2, &self.w3) * self.u.adjoint()
    }

    /// Largest of `‖(A3 W3)^k‖` and `‖(W3 A3)^k‖`, relative to `(‖A‖‖W‖)^k`.
    pub fn nilpotency_residual(&self, k: usize) -> f64 {
        let scale = (frobenius(&self.a1).max(frobenius(&self.a3)).max(1e-300)
            * frobenius(&self.w1).max(frobenius(&self.w3)).max(1e-300))
        .powi(k as i32);
        let aw = mat_pow(&(&self.a3 * &self.w3), k);
        let wa = mat_pow(&(&self.w3 * &self.a3), k);
        frobenius(&aw).max(frobenius(&wa)) / scale
    }
}

/// Weighted core-EP decomposition.
///
/// `U` completes an orthonormal basis of `R((AW)^k)`, `V` one of
/// `R((WA)^k)`. The zero lower-left blocks and the nonsingularity of `A1`,
/// `W1` are checked before returning.
pub fn weighted_core_ep_decompose(
    p: &WeightedPair,
    tol: &ToleranceConfig,
) -> Result<WeightedCoreEpDecomposition> {
    let (q, n) = (p.q(), p.n());
    let range_aw = power_range_basis_at(&p.aw(), p.k, tol, p.scale);
    let range_wa = power_range_basis_at(&p.wa(), p.k, tol, p.scale);
    let t = range_aw.ncols();
    if range_wa.ncols() != t {
        return Err(GinvError::Decomposition {
            what: "rank((AW)^k) != rank((WA)^k)",
            residual: (range_wa.ncols() as f64 - t as f64).abs(),
        });
    }
    let u = complete_orthonormal(&range_aw);
    let v = complete_orthonormal(&range_wa);
    let ab = u.adjoint() * &p.a * &v;
    let wb = v.adjoint() * &p.w * &u;

    let a_lower = ab.view((t, 0), (q - t, t)).into_owned();
    let w_lower = wb.view((t, 0), (n - t, t)).into_owned();
    let a_res = scaled(&a_lower, frobenius(&p.a));
    let w_res = scaled(&w_lower, frobenius(&p.w));
    if a_res > tol.cmp_rel_tol {
        return Err(GinvError::Decomposition {
            what: "lower-left block of A",
            residual: a_res,
        });
    }
    if w_res > tol.cmp_rel_tol {
        return Err(GinvError::Decomposition {
            what: "lower-left block of W",
            residual: w_res,
        });
    }

    let a1 = ab.view((0, 0), (t, t)).into_owned();
    let w1 = wb.view((0, 0), (t, t)).into_owned();
    for (blk, whole, what) in [(&a1, &p.a, "A1 singular"), (&w1, &p.w, "W1 singular")] {
        if t > 0 {
            let smin = *thin_svd(blk).s.last().unwrap();
            let smax = thin_svd(whole).s[0];
            if smin <= tol.rank_rel(q, n) * smax {
                return Err(GinvError::Decomposition {
                    what,
                    residual: smin / smax,
                });
            }
        }
    }

    Ok(WeightedCoreEpDecomposition {
        t,
        a1,
        a2: ab.view((0, t), (t, n - t)).into_owned(),
        a3: ab.view((t, t), (q - t, n - t)).into_owned(),
        w1,
        w2: wb.view((0, t), (t, q - t)).into_owned(),
        w3: wb.view((t, t), (n - t, q - t)).into_owned(),
        u,
        v,
    })
}

fn scaled(m: &ComplexMatrix, scale: f64) -> f64 {
    if scale > 0.0 {
        frobenius(m) / scale
    } else {
        frobenius(m)
    }
}

/// `A = T [[Σ1 K1, Σ1 L1], [0, 0]] S*`, `W = S [[Σ2 K2, Σ2 L2], [0, 0]] T*`.
#[derive(Debug, Clone)]
pub struct HartwigSpindelbockDecomposition {
    pub t: ComplexMatrix,
    pub s: ComplexMatrix,
    pub sigma1: Vec<f64>,
    pub k1: ComplexMatrix,
    pub l1: ComplexMatrix,
    pub sigma2: Vec<f64>,
    pub k2: ComplexMatrix,
    pub l2: ComplexMatrix,
}

pub(crate) fn diag(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    let mut d = zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        d[(i, i)] = C64::new(v, 0.0);
    }
    d
}

fn hconcat(left: &ComplexMatrix, right: &ComplexMatrix) -> ComplexMatrix {
    let mut m = zeros(left.nrows(), left.ncols() + right.ncols());
    m.columns_mut(0, left.ncols()).copy_from(left);
    m.columns_mut(left.ncols(), right.ncols()).copy_from(right);
    m
}

fn top_rows(top: &ComplexMatrix, total_rows: usize) -> ComplexMatrix {
    let mut m = zeros(total_rows, top.ncols());
    m.rows_mut(0, top.nrows()).copy_from(top);
    m
}

impl HartwigSpindelbockDecomposition {
    pub fn r1(&self) -> usize {
        self.sigma1.len()
    }

    pub fn r2(&self) -> usize {
        self.sigma2.len()
    }

    /// `Σ1 [K1 L1]`, the nonzero rows of `T* A S`.
    pub fn a_top(&self) -> ComplexMatrix {
        diag(&self.sigma1) * hconcat(&self.k1, &self.l1)
    }

    /// `Σ2 [K2 L2]`, the nonzero rows of `S* W T`.
    pub fn w_top(&self) -> ComplexMatrix {
        diag(&self.sigma2) * hconcat(&self.k2, &self.l2)
    }

    pub fn reassemble_a(&self) -> ComplexMatrix {
        &self.t * top_rows(&self.a_top(), self.t.nrows()) * self.s.adjoint()
    }

    pub fn reassemble_w(&self) -> ComplexMatrix {
        &self.s * top_rows(&self.w_top(), self.s.nrows()) * self.t.adjoint()
    }

    /// `‖K1K1* + L1L1* − I‖_F` and the same for `K2, L2`.
    pub fn normalization_residuals(&self) -> (f64, f64) {
        let res = |k: &ComplexMatrix, l: &ComplexMatrix| {
            let r = k.nrows();
            frobenius(&(k * k.adjoint() + l * l.adjoint() - ComplexMatrix::identity(r, r)))
        };
        (res(&self.k1, &self.l1), res(&self.k2, &self.l2))
    }
}

/// Weighted Hartwig–Spindelböck decomposition from the SVDs of `A` and `W`.
pub fn weighted_hs_decompose(
    p: &WeightedPair,
    tol: &ToleranceConfig,
) -> Result<HartwigSpindelbockDecomposition> {
    let (q, n) = (p.q(), p.n());
    if frobenius(&p.a) == 0.0 {
        return Err(GinvError::Domain(
            "Hartwig-Spindelbock decomposition needs A != 0".into(),
        ));
    }
    let r1 = rank_of(&p.a, tol)?;
    let r2 = rank_of(&p.w, tol)?;
    let svd_a = thin_svd(&p.a);
    let svd_w = thin_svd(&p.w);
    let t = complete_orthonormal(&svd_a.u.columns(0, r1).into_owned());
    let s = complete_orthonormal(&svd_w.u.columns(0, r2).into_owned());
    let kl1 = svd_a.v.columns(0, r1).adjoint() * &s;
    let kl2 = svd_w.v.columns(0, r2).adjoint() * &t;
    let dec = HartwigSpindelbockDecomposition {
        sigma1: svd_a.s[..r1].to_vec(),
        k1: kl1.columns(0, r1).into_owned(),
        l1: kl1.columns(r1, n - r1).into_owned(),
        sigma2: svd_w.s[..r2].to_vec(),
        k2: kl2.columns(0, r2).into_owned(),
        l2: kl2.columns(r2, q - r2).into_owned(),
        t,
        s,
    };
    let ra = scaled(&(dec.reassemble_a() - &p.a), frobenius(&p.a));
    if ra > tol.cmp_rel_tol {
        return Err(GinvError::Decomposition {
            what: "H-S reassembly of A",
            residual: ra,
        });
    }
    let rw = scaled(&(dec.reassemble_w() - &p.w), frobenius(&p.w));
    if rw > tol.cmp_rel_tol {
        return Err(GinvError::Decomposition {
            what: "H-S reassembly of W",
            residual: rw,
        });
    }
    Ok(dec)
}
