//! Dense complex-matrix primitives.
//!
//! Rank decisions are SVD based. Ranks of matrix powers are never read off
//! the explicitly formed power: `R(B^k)` is tracked by an orthonormal basis
//! that is re-orthogonalized after every multiplication, and the cut-off is
//! taken relative to `σ_max(B)`. A power that vanishes in exact arithmetic
//! therefore has rank zero even though its floating-point product does not.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{shape_err, GinvError, Result};
use crate::tolerance::ToleranceConfig;

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Builds a matrix from row-major real entries.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    assert_eq!(entries.len(), rows * cols, "entry count");
    ComplexMatrix::from_row_iterator(rows, cols, entries.iter().map(|&x| c(x, 0.0)))
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

pub fn frobenius(a: &ComplexMatrix) -> f64 {
    a.norm()
}

/// `‖a − b‖_F / max(‖a‖_F, ‖b‖_F)`, zero when both vanish.
pub fn rel_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "rel_diff shape");
    let scale = frobenius(a).max(frobenius(b));
    if scale == 0.0 {
        0.0
    } else {
        frobenius(&(a - b)) / scale
    }
}

/// `‖residual‖_F / scale`, with a zero scale treated as one.
pub fn scaled_norm(residual: &ComplexMatrix, scale: f64) -> f64 {
    let n = frobenius(residual);
    if scale > 0.0 {
        n / scale
    } else {
        n
    }
}

/// Rejects empty matrices and non-finite entries.
pub fn validate(a: &ComplexMatrix, what: &str) -> Result<()> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(GinvError::InvalidInput(format!(
            "{what} is empty ({}x{})",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(GinvError::InvalidInput(format!(
            "{what} has non-finite entries"
        )));
    }
    Ok(())
}

pub(crate) fn require_square(a: &ComplexMatrix, op: &'static str) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(shape_err(
            op,
            format!("expected a square matrix, got {}x{}", a.nrows(), a.ncols()),
        ));
    }
    Ok(())
}

/// `a^p` by repeated multiplication; `a^0 = I`.
pub fn mat_pow(a: &ComplexMatrix, p: usize) -> ComplexMatrix {
    let mut out = identity(a.nrows());
    for _ in 0..p {
        out = &out * a;
    }
    out
}

/// Thin SVD with singular values in descending order.
pub(crate) struct ThinSvd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

pub(crate) fn thin_svd(a: &ComplexMatrix) -> ThinSvd {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return ThinSvd {
            u: zeros(m, 0),
            s: Vec::new(),
            v: zeros(n, 0),
        };
    }
    // nalgebra's bidiagonal SVD loses accuracy on some exactly rank-deficient
    // inputs (e.g. orthogonal projectors); faer's is reliable there.
    let fm = faer::Mat::<faer::c64>::from_fn(m, n, |i, j| {
        let z = a[(i, j)];
        faer::c64::new(z.re, z.im)
    });
    let svd = fm.thin_svd().expect("SVD did not converge");
    let (fu, fs, fv) = (svd.U(), svd.S(), svd.V());
    let r = m.min(n);
    let to_c = |z: &faer::c64| C64::new(z.re, z.im);
    ThinSvd {
        u: ComplexMatrix::from_fn(m, r, |i, j| to_c(&fu[(i, j)])),
        s: (0..r).map(|i| fs[i].re).collect(),
        v: ComplexMatrix::from_fn(n, r, |i, j| to_c(&fv[(i, j)])),
    }
}

pub(crate) fn sigma_max(a: &ComplexMatrix) -> f64 {
    thin_svd(a).s.first().copied().unwrap_or(0.0)
}

fn count_above(s: &[f64], threshold: f64) -> usize {
    s.iter().take_while(|&&x| x > threshold).count()
}

/// Extends the orthonormal columns of `q` (m×r) to an m×m unitary `[q | q⊥]`.
pub(crate) fn complete_orthonormal(q: &ComplexMatrix) -> ComplexMatrix {
    let (m, r) = q.shape();
    if r >= m {
        return q.clone();
    }
    if r == 0 {
        return identity(m);
    }
    let comp = identity(m) - q * q.adjoint();
    let svd = thin_svd(&comp);
    let mut out = zeros(m, m);
    out.columns_mut(0, r).copy_from(q);
    out.columns_mut(r, m - r).copy_from(&svd.u.columns(0, m - r));
    out
}

/// Orthonormal basis of `R(a)` keeping singular values above `threshold`.
pub(crate) fn range_basis_abs(a: &ComplexMatrix, threshold: f64) -> ComplexMatrix {
    let svd = thin_svd(a);
    let r = count_above(&svd.s, threshold);
    svd.u.columns(0, r).into_owned()
}

/// Orthonormal basis of `R(a)` truncated at a known rank.
pub(crate) fn range_basis_rank(a: &ComplexMatrix, rank: usize) -> ComplexMatrix {
    let svd = thin_svd(a);
    let r = rank.min(svd.s.len());
    svd.u.columns(0, r).into_owned()
}

/// Orthonormal basis of `N(a)` for a matrix of known rank.
pub(crate) fn nullspace_basis_rank(a: &ComplexMatrix, rank: usize) -> ComplexMatrix {
    let n = a.ncols();
    let svd = thin_svd(a);
    let r = rank.min(svd.s.len());
    let row_space = svd.v.columns(0, r).into_owned();
    let full = complete_orthonormal(&row_space);
    full.columns(r, n - r).into_owned()
}

/// Moore–Penrose inverse truncated at a known rank.
pub(crate) fn pinv_rank(a: &ComplexMatrix, rank: usize) -> ComplexMatrix {
    let (m, n) = a.shape();
    let svd = thin_svd(a);
    let r = rank.min(svd.s.len());
    let mut out = zeros(n, m);
    for i in 0..r {
        let inv = 1.0 / svd.s[i];
        out += svd.v.column(i) * svd.u.column(i).adjoint() * c(inv, 0.0);
    }
    out
}

/// Orthonormal basis of `R(b^k)` built by re-orthogonalized multiplication.
///
/// Singular values are cut at `rank_rel × σ_max(b)`; `k = 0` gives `I`.
pub fn power_range_basis(b: &ComplexMatrix, k: usize, tol: &ToleranceConfig) -> ComplexMatrix {
    power_range_basis_at(b, k, tol, sigma_max(b))
}

/// As [`power_range_basis`] with the cut-off `rank_rel × scale`. A product
/// such as `WA` needs `scale = σ_max(W) σ_max(A)`: when the product vanishes
/// in exact arithmetic its own σ_max is pure rounding.
pub(crate) fn power_range_basis_at(
    b: &ComplexMatrix,
    k: usize,
    tol: &ToleranceConfig,
    scale: f64,
) -> ComplexMatrix {
    let n = b.nrows();
    debug_assert_eq!(n, b.ncols());
    let threshold = tol.rank_rel(n, n) * scale;
    let mut q = identity(n);
    for _ in 0..k {
        if q.ncols() == 0 {
            break;
        }
        q = range_basis_abs(&(b * &q), threshold);
    }
    q
}

/// `Q Q* b^k` with `Q` the robust basis of `R(b^k)`.
///
/// Equal to `b^k` in exact arithmetic; rounding left in the directions that
/// `b^k` annihilates is removed.
pub fn clean_power(b: &ComplexMatrix, k: usize, tol: &ToleranceConfig) -> ComplexMatrix {
    clean_power_at(b, k, tol, sigma_max(b))
}

pub(crate) fn clean_power_at(
    b: &ComplexMatrix,
    k: usize,
    tol: &ToleranceConfig,
    scale: f64,
) -> ComplexMatrix {
    let q = power_range_basis_at(b, k, tol, scale);
    &q * (q.adjoint() * mat_pow(b, k))
}

/// Numerical rank: singular values above `rank_rel × σ_max`.
pub fn rank_of(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<usize> {
    validate(a, "matrix")?;
    let svd = thin_svd(a);
    let smax = svd.s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(count_above(&svd.s, tol.rank_rel(a.nrows(), a.ncols()) * smax))
}

/// Moore–Penrose inverse through the SVD with the configured rank cut-off.
pub fn moore_penrose(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let r = rank_of(a, tol)?;
    Ok(pinv_rank(a, r))
}

/// Index of a square matrix: least `k` with `rank(A^k) = rank(A^{k+1})`.
pub fn index_of(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<usize> {
    validate(a, "matrix")?;
    require_square(a, "index_of")?;
    Ok(index_unchecked(a, tol))
}

pub(crate) fn index_unchecked(a: &ComplexMatrix, tol: &ToleranceConfig) -> usize {
    index_at(a, tol, sigma_max(a))
}

pub(crate) fn index_at(a: &ComplexMatrix, tol: &ToleranceConfig, scale: f64) -> usize {
    let n = a.nrows();
    let threshold = tol.rank_rel(n, n) * scale;
    let mut q = identity(n);
    for k in 0..=n {
        if q.ncols() == 0 {
            return k;
        }
        let next = range_basis_abs(&(a * &q), threshold);
        if next.ncols() == q.ncols() {
            return k;
        }
        q = next;
    }
    n
}

fn check_weight_shapes(a: &ComplexMatrix, w: &ComplexMatrix, op: &'static str) -> Result<()> {
    if w.nrows() != a.ncols() || w.ncols() != a.nrows() {
        return Err(shape_err(
            op,
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
    Ok(())
}

/// W-product power `A^{★l} = A (W A)^{l-1}` for `l ≥ 1`.
///
/// A bare zeroth power is not defined; use [`w_star_power`] or
/// [`star_power_w`] for the sided conventions `W A^{★0} = I_n` and
/// `A^{★0} W = I_q`.
pub fn star_power(a: &ComplexMatrix, w: &ComplexMatrix, l: usize) -> Result<ComplexMatrix> {
    check_weight_shapes(a, w, "star_power")?;
    if l == 0 {
        return Err(GinvError::Parameter(
            "A^{★0} has no standalone meaning; use w_star_power or star_power_w".into(),
        ));
    }
    Ok(star_power_unchecked(a, w, l))
}

pub(crate) fn star_power_unchecked(a: &ComplexMatrix, w: &ComplexMatrix, l: usize) -> ComplexMatrix {
    debug_assert!(l >= 1);
    a * mat_pow(&(w * a), l - 1)
}

/// `W A^{★l}`, which equals `(WA)^l` and is `I_n` at `l = 0`.
pub fn w_star_power(a: &ComplexMatrix, w: &ComplexMatrix, l: usize) -> Result<ComplexMatrix> {
    check_weight_shapes(a, w, "w_star_power")?;
    Ok(mat_pow(&(w * a), l))
}

/// `A^{★l} W`, which equals `(AW)^l` and is `I_q` at `l = 0`.
pub fn star_power_w(a: &ComplexMatrix, w: &ComplexMatrix, l: usize) -> Result<ComplexMatrix> {
    check_weight_shapes(a, w, "star_power_w")?;
    Ok(mat_pow(&(a * w), l))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subspace {
    Range,
    Nullspace,
}

/// Orthonormal basis of a subspace of `C^ambient`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    matrix: ComplexMatrix,
}

impl SubspaceBasis {
    /// Wraps columns that are already orthonormal.
    pub fn from_orthonormal(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// Orthonormalizes arbitrary spanning columns.
    pub fn span_of(columns: &ComplexMatrix, tol: &ToleranceConfig) -> Self {
        let threshold = tol.rank_rel(columns.nrows(), columns.ncols()) * sigma_max(columns);
        Self {
            matrix: range_basis_abs(columns, threshold),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn ambient(&self) -> usize {
        self.matrix.nrows()
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> ComplexMatrix {
        &self.matrix * self.matrix.adjoint()
    }

    /// Distance of the columns of `x` from the subspace, `‖(I − P)x‖_F`.
    pub fn distance(&self, x: &ComplexMatrix) -> f64 {
        let proj = &self.matrix * (self.matrix.adjoint() * x);
        frobenius(&(x - proj))
    }
}

pub fn subspace_basis(
    a: &ComplexMatrix,
    which: Subspace,
    tol: &ToleranceConfig,
) -> Result<SubspaceBasis> {
    let r = rank_of(a, tol)?;
    let matrix = match which {
        Subspace::Range => range_basis_rank(a, r),
        Subspace::Nullspace => nullspace_basis_rank(a, r),
    };
    Ok(SubspaceBasis { matrix })
}

/// Oblique projector with range `t` and nullspace `s`.
pub fn projector_onto_along(
    t: &SubspaceBasis,
    s: &SubspaceBasis,
    tol: &ToleranceConfig,
) -> Result<ComplexMatrix> {
    let n = t.ambient();
    if s.ambient() != n {
        return Err(shape_err(
            "projector_onto_along",
            format!("ambient dimensions differ: {} vs {}", n, s.ambient()),
        ));
    }
    if t.dimension() + s.dimension() != n {
        return Err(GinvError::Geometry(format!(
            "dimensions {} + {} do not add up to {}",
            t.dimension(),
            s.dimension(),
            n
        )));
    }
    if n == 0 {
        return Ok(zeros(0, 0));
    }
    let mut joined = zeros(n, n);
    joined.columns_mut(0, t.dimension()).copy_from(t.matrix());
    joined
        .columns_mut(t.dimension(), s.dimension())
        .copy_from(s.matrix());
    let sv = thin_svd(&joined).s;
    let smin = sv.last().copied().unwrap_or(0.0);
    if smin <= tol.rank_rel(n, n) * sv[0] {
        return Err(GinvError::Geometry(
            "subspaces intersect nontrivially".into(),
        ));
    }
    let inv = joined
        .clone()
        .try_inverse()
        .ok_or_else(|| GinvError::Geometry("subspaces intersect nontrivially".into()))?;
    let mut head = zeros(n, n);
    head.columns_mut(0, t.dimension()).copy_from(t.matrix());
    Ok(head * inv)
}

/// Compares two subspaces through their orthogonal projectors.
pub fn subspaces_equal(b1: &SubspaceBasis, b2: &SubspaceBasis, tol: &ToleranceConfig) -> bool {
    if b1.ambient() != b2.ambient() {
        return false;
    }
    let p1 = b1.projector();
    let p2 = b2.projector();
    let scale = frobenius(&p1).max(frobenius(&p2)).max(1.0);
    frobenius(&(p1 - p2)) <= tol.cmp_rel_tol * scale
}

/// Determinant via partially pivoted LU.
pub fn determinant(a: &ComplexMatrix) -> Result<C64> {
    validate(a, "matrix")?;
    require_square(a, "determinant")?;
    Ok(a.clone().lu().determinant())
}
