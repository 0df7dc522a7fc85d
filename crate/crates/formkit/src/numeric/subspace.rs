use crate::error::{Error, Result};

use super::{orthonormalize, re, CMatrix, Tolerance};

/// A linear subspace of `C^n`, stored as an `n x r` matrix with orthonormal
/// columns.
///
/// Subspaces carry domains, ranges, kernels, multivalued parts, and relation
/// graphs. Equality is decided through the orthogonal projections `B B*`,
/// which are canonical (basis-independent), so two subspaces computed along
/// different routes compare robustly.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient: usize,
    basis: CMatrix,
}

impl Subspace {
    /// The zero subspace of `C^n`.
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: CMatrix::zeros(ambient, 0),
        }
    }

    /// All of `C^n`.
    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: CMatrix::identity(ambient, ambient),
        }
    }

    /// Wrap a matrix whose columns are already orthonormal, validating
    /// `B* B = I` within `eq_abs`.
    pub fn from_orthonormal(basis: CMatrix, tol: &Tolerance) -> Result<Self> {
        super::check_finite(&basis)?;
        let r = basis.ncols();
        let gram = basis.adjoint() * &basis;
        let defect = super::max_abs(&(gram - CMatrix::identity(r, r)));
        if defect > tol.eq_abs {
            return Err(Error::NotOrthonormal {
                defect,
                tol: tol.eq_abs,
            });
        }
        Ok(Subspace {
            ambient: basis.nrows(),
            basis,
        })
    }

    pub(crate) fn from_orthonormal_unchecked(ambient: usize, basis: CMatrix) -> Result<Self> {
        debug_assert_eq!(basis.nrows(), ambient);
        Ok(Subspace { ambient, basis })
    }

    /// Span of arbitrary columns; rank-revealing.
    pub fn span(columns: &CMatrix, tol: &Tolerance) -> Result<Self> {
        orthonormalize(columns, tol)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.ncols() == 0
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// The `n x n` orthogonal projection onto the subspace.
    pub fn projection(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        Ok(())
    }

    /// Orthogonal complement within the ambient space.
    pub fn complement(&self, tol: &Tolerance) -> Subspace {
        // `I - P` lives at unit scale, so the rank decision gets a floor:
        // for a full subspace the residual is pure roundoff and must rank 0.
        let residual = CMatrix::identity(self.ambient, self.ambient) - self.projection();
        super::orthonormalize_floor(&residual, tol, 1.0).expect("projection residual is finite")
    }

    /// Closed linear span of the union.
    pub fn sum(&self, other: &Subspace, tol: &Tolerance) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut stacked = CMatrix::zeros(self.ambient, self.dim() + other.dim());
        stacked.columns_mut(0, self.dim()).copy_from(&self.basis);
        stacked
            .columns_mut(self.dim(), other.dim())
            .copy_from(&other.basis);
        orthonormalize(&stacked, tol)
    }

    /// Intersection, computed as the complement of the sum of complements.
    pub fn intersect(&self, other: &Subspace, tol: &Tolerance) -> Result<Subspace> {
        self.check_ambient(other)?;
        let joined = self.complement(tol).sum(&other.complement(tol), tol)?;
        Ok(joined.complement(tol))
    }

    /// Frobenius distance between the orthogonal projections.
    pub fn distance(&self, other: &Subspace) -> f64 {
        if self.ambient != other.ambient {
            return f64::INFINITY;
        }
        (self.projection() - other.projection()).norm()
    }

    pub fn approx_eq(&self, other: &Subspace, tol: &Tolerance) -> bool {
        self.distance(other) <= tol.eq_abs
    }

    /// Whether `other` is contained in `self`, within tolerance.
    pub fn contains(&self, other: &Subspace, tol: &Tolerance) -> bool {
        if self.ambient != other.ambient {
            return false;
        }
        if other.is_zero() {
            return true;
        }
        let residual = &other.basis - self.projection() * &other.basis;
        super::max_abs(&residual) <= tol.eq_abs
    }

    /// Residual distance of a vector from the subspace.
    pub fn residual_of(&self, v: &super::CVector) -> f64 {
        (v - self.projection() * v).norm()
    }

    /// Coordinates of an ambient vector in the stored basis (valid for
    /// vectors inside the subspace).
    pub fn coords(&self, v: &super::CVector) -> super::CVector {
        self.basis.adjoint() * v
    }

    /// Embed coordinate columns back into the ambient space.
    pub fn embed(&self, coords: &CMatrix) -> CMatrix {
        &self.basis * coords
    }

    /// Canonical span of the standard basis vectors with the given indices.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Subspace {
        let mut basis = CMatrix::zeros(ambient, indices.len());
        for (j, &i) in indices.iter().enumerate() {
            basis[(i, j)] = re(1.0);
        }
        Subspace { ambient, basis }
    }
}
