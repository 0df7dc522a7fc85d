//! Tolerance-aware dense complex linear algebra.
//!
//! Everything downstream (relations, forms, decompositions) reduces to a
//! handful of primitives collected here: Hermitian eigendecomposition,
//! PSD square roots, Moore-Penrose pseudoinverses, and rank-revealing
//! orthonormalization. Rank decisions are made once, by a single relative
//! singular-value cutoff, so "closed subspace" questions stay reproducible.

mod jacobi;
mod subspace;

pub use subspace::Subspace;

use crate::error::{Error, Result};
use nalgebra::{Complex, DMatrix, DVector};

/// Complex scalar used throughout the crate.
pub type Scalar = Complex<f64>;
/// Dense complex matrix, the universal carrier for operators and bases.
pub type CMatrix = DMatrix<Scalar>;
/// Dense complex vector.
pub type CVector = DVector<Scalar>;

/// Real scalar embedded as a complex number.
pub fn re(x: f64) -> Scalar {
    Complex::new(x, 0.0)
}

/// Numerical policy knobs shared by every operation.
///
/// `rank_rel = None` requests the size-adaptive default cutoff
/// `64 ε max(rows, cols)`; an explicit value is used verbatim.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    /// Relative singular-value cutoff for rank decisions; `None` = adaptive default.
    pub rank_rel: Option<f64>,
    /// Absolute tolerance for matrix/scalar equality tests.
    pub eq_abs: f64,
    /// Magnitude below which negative eigenvalues are clamped to zero.
    pub psd_clamp: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_rel: None,
            eq_abs: 1e-9,
            psd_clamp: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn validate(&self) -> Result<()> {
        if let Some(r) = self.rank_rel {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::InvalidTolerance {
                    context: format!("rank_rel must lie in (0, 1), got {r}"),
                });
            }
        }
        // `is_sign_positive` alone would accept NaN; compare explicitly
        if self.eq_abs <= 0.0 || self.eq_abs.is_nan() {
            return Err(Error::InvalidTolerance {
                context: format!("eq_abs must be positive, got {}", self.eq_abs),
            });
        }
        if self.psd_clamp <= 0.0 || self.psd_clamp.is_nan() {
            return Err(Error::InvalidTolerance {
                context: format!("psd_clamp must be positive, got {}", self.psd_clamp),
            });
        }
        Ok(())
    }

    /// Absolute singular-value cutoff for an `rows x cols` matrix whose
    /// largest singular value is `sigma_max`.
    pub fn rank_cutoff(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        let rel = self
            .rank_rel
            .unwrap_or(64.0 * f64::EPSILON * rows.max(cols).max(1) as f64);
        rel * sigma_max
    }

    pub fn with_rank_rel(mut self, rank_rel: f64) -> Self {
        self.rank_rel = Some(rank_rel);
        self
    }

    pub fn with_eq_abs(mut self, eq_abs: f64) -> Self {
        self.eq_abs = eq_abs;
        self
    }
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn check_finite(m: &CMatrix) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Largest entry modulus; zero for empty matrices.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Hermitian defect `max |M - M*|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    max_abs(&(m - m.adjoint()))
}

/// Replace `M` by `(M + M*) / 2` after checking the defect against `tol`.
pub fn hermitize(m: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    check_finite(m)?;
    let defect = hermitian_defect(m);
    if defect > tol.eq_abs {
        return Err(Error::NotHermitian {
            defect,
            tol: tol.eq_abs,
        });
    }
    Ok((m + m.adjoint()).scale(0.5))
}

/// Frobenius distance between two matrices of equal shape.
pub fn mat_dist(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
///
/// Returns `(eigenvalues, eigenvectors)` with unitary eigenvector columns,
/// so `M = V diag(lambda) V*`. The input is symmetrized first; callers that
/// care about the Hermitian defect validate it beforehand.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    jacobi::hermitian_eig(m)
}

/// Smallest eigenvalue of a Hermitian matrix; `+inf` for the empty matrix.
pub fn lambda_min(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    let (values, _) = eigh(m);
    values[0]
}

/// Thin SVD `M = U diag(s) V*` with singular values sorted descending.
fn thin_svd(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    jacobi::svd(m)
}

/// Hermitian square root of a PSD matrix.
///
/// Eigenvalues in `[-psd_clamp, 0)` are clamped to zero; anything below the
/// clamp is rejected as not PSD.
pub fn psd_sqrt(m: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    let h = hermitize(m, tol)?;
    let d = h.nrows();
    if d == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let (values, vectors) = eigh(&h);
    if values[0] < -tol.psd_clamp {
        return Err(Error::NotPsd {
            eigenvalue: values[0],
            clamp: tol.psd_clamp,
        });
    }
    let roots = CVector::from_iterator(d, values.iter().map(|&v| re(v.max(0.0).sqrt())));
    let root = &vectors * CMatrix::from_diagonal(&roots) * vectors.adjoint();
    Ok((&root + root.adjoint()).scale(0.5))
}

/// Moore-Penrose pseudoinverse with the shared rank cutoff.
pub fn pinv(m: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    check_finite(m)?;
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(CMatrix::zeros(cols, rows));
    }
    let (u, s, v) = thin_svd(m);
    let cutoff = tol.rank_cutoff(rows, cols, s.first().copied().unwrap_or(0.0));
    let mut out = CMatrix::zeros(cols, rows);
    for (i, &sigma) in s.iter().enumerate() {
        if sigma >= cutoff && sigma > 0.0 {
            let vi = v.column(i);
            let ui = u.column(i);
            out += (vi * ui.adjoint()).scale(1.0 / sigma);
        }
    }
    Ok(out)
}

/// Numerical rank under the shared cutoff.
pub fn rank(m: &CMatrix, tol: &Tolerance) -> usize {
    rank_floor(m, tol, 0.0)
}

/// Rank with the cutoff floored at `scale_floor`. Internal computations
/// on unit-scale carriers (orthonormal blocks, projection residuals,
/// contractions) use `scale_floor = 1` so that a matrix that is zero up to
/// roundoff is ranked zero instead of inheriting spurious noise directions.
pub(crate) fn rank_floor(m: &CMatrix, tol: &Tolerance, scale_floor: f64) -> usize {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return 0;
    }
    let (_, s, _) = thin_svd(m);
    let sigma_max = s.first().copied().unwrap_or(0.0);
    let cutoff = tol.rank_cutoff(rows, cols, sigma_max.max(scale_floor));
    s.iter()
        .filter(|&&sigma| sigma >= cutoff && sigma > 0.0)
        .count()
}

/// Rotate each column so its first significant coordinate is positive real.
pub(crate) fn fix_phases(m: &mut CMatrix) {
    let rows = m.nrows();
    for j in 0..m.ncols() {
        let col_max = m.column(j).iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
        if col_max == 0.0 {
            continue;
        }
        let anchor = (0..rows).find(|&i| m[(i, j)].norm() > 1e-8 * col_max);
        if let Some(i) = anchor {
            let z = m[(i, j)];
            let phase = z / re(z.norm());
            let correction = phase.conj();
            for i in 0..rows {
                m[(i, j)] *= correction;
            }
            let pivot = m[(i, j)];
            m[(i, j)] = re(pivot.re);
        }
    }
}

/// Orthonormal basis of the numerical column space of `columns`.
///
/// Rank is decided by singular values at the shared cutoff; the returned
/// basis is the corresponding left singular vectors with phases fixed so
/// the first significant coordinate of each column is positive real.
pub fn orthonormalize(columns: &CMatrix, tol: &Tolerance) -> Result<Subspace> {
    orthonormalize_floor(columns, tol, 0.0)
}

/// Orthonormalization with the cutoff floored at `scale_floor`; see
/// [`rank_floor`].
pub(crate) fn orthonormalize_floor(
    columns: &CMatrix,
    tol: &Tolerance,
    scale_floor: f64,
) -> Result<Subspace> {
    check_finite(columns)?;
    let (rows, cols) = columns.shape();
    if rows == 0 || cols == 0 {
        return Ok(Subspace::zero(rows));
    }
    let (u, s, _) = thin_svd(columns);
    let sigma_max = s.first().copied().unwrap_or(0.0);
    let cutoff = tol.rank_cutoff(rows, cols, sigma_max.max(scale_floor));
    let r = s
        .iter()
        .filter(|&&sigma| sigma >= cutoff && sigma > 0.0)
        .count();
    let mut basis = u.columns(0, r).into_owned();
    fix_phases(&mut basis);
    Subspace::from_orthonormal_unchecked(rows, basis)
}

/// Null space of `m` as a subspace of its column-index space.
pub fn null_space(m: &CMatrix, tol: &Tolerance) -> Result<Subspace> {
    null_space_floor(m, tol, 0.0)
}

pub(crate) fn null_space_floor(m: &CMatrix, tol: &Tolerance, scale_floor: f64) -> Result<Subspace> {
    let row_space = orthonormalize_floor(&m.adjoint(), tol, scale_floor)?;
    Ok(row_space.complement(tol))
}
