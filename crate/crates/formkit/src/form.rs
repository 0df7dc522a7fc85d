//! Semibounded Hermitian sesquilinear forms and their representing maps.
//!
//! A form lives on a domain subspace of the ambient space and is stored as
//! a Hermitian matrix in the orthonormal domain basis, so the Gram matrix
//! of the basis is the identity and the lower bound is a plain smallest
//! eigenvalue. Vacuous forms (zero-dimensional domain) are legal values
//! whose lower bound is the `+inf` sentinel; arithmetic propagates them.

use crate::error::{Error, Result};
use crate::numeric::{
    eigh, hermitize, lambda_min, mat_dist, max_abs, orthonormalize, pinv, CMatrix, CVector, Scalar,
    Subspace, Tolerance,
};
use crate::relation::LinearRelation;

#[derive(Debug, Clone)]
pub struct HermitianForm {
    ambient: usize,
    domain: Subspace,
    matrix: CMatrix,
}

impl HermitianForm {
    /// A form from its domain and its Hermitian matrix in domain coordinates.
    pub fn new(domain: Subspace, matrix: CMatrix, tol: &Tolerance) -> Result<Self> {
        let d = domain.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "form matrix is {}x{}, domain dimension is {}",
                    matrix.nrows(),
                    matrix.ncols(),
                    d
                ),
            });
        }
        let matrix = hermitize(&matrix, tol)?;
        Ok(HermitianForm {
            ambient: domain.ambient(),
            domain,
            matrix,
        })
    }

    /// Everywhere-defined form on the ambient space.
    pub fn on_full(matrix: CMatrix, tol: &Tolerance) -> Result<Self> {
        let n = matrix.nrows();
        Self::new(Subspace::full(n), matrix, tol)
    }

    /// The zero form on a given domain.
    pub fn zero_on(domain: Subspace) -> Self {
        let d = domain.dim();
        HermitianForm {
            ambient: domain.ambient(),
            domain,
            matrix: CMatrix::zeros(d, d),
        }
    }

    /// The form with zero-dimensional domain.
    pub fn vacuous(ambient: usize) -> Self {
        Self::zero_on(Subspace::zero(ambient))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn domain(&self) -> &Subspace {
        &self.domain
    }

    pub fn dom_dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_vacuous(&self) -> bool {
        self.domain.is_zero()
    }

    /// `t[phi, psi]`, linear in `phi` and antilinear in `psi`. Both
    /// arguments must lie in the domain.
    pub fn eval(&self, phi: &CVector, psi: &CVector, tol: &Tolerance) -> Result<Scalar> {
        for v in [phi, psi] {
            if v.nrows() != self.ambient {
                return Err(Error::DimensionMismatch {
                    context: format!(
                        "vector has {} entries, ambient dimension is {}",
                        v.nrows(),
                        self.ambient
                    ),
                });
            }
            let residual = self.domain.residual_of(v);
            if residual > tol.eq_abs * v.norm().max(1.0) {
                return Err(Error::NotInDomain { residual });
            }
        }
        let a = self.domain.coords(phi);
        let b = self.domain.coords(psi);
        Ok((b.adjoint() * &self.matrix * a)[(0, 0)])
    }

    /// Diagonal value `t[phi]`; real for a Hermitian matrix.
    pub fn quad(&self, phi: &CVector, tol: &Tolerance) -> Result<f64> {
        Ok(self.eval(phi, phi, tol)?.re)
    }

    /// The greatest lower bound `m(t)`; `+inf` for the vacuous form.
    pub fn lower_bound(&self) -> f64 {
        lambda_min(&self.matrix)
    }

    /// `t + a` on the same domain.
    pub fn shift(&self, a: f64) -> HermitianForm {
        let d = self.dom_dim();
        HermitianForm {
            ambient: self.ambient,
            domain: self.domain.clone(),
            matrix: &self.matrix + CMatrix::identity(d, d).scale(a),
        }
    }

    /// Matrix of this form compressed to coordinate columns of `basis`
    /// (columns must lie inside the domain for an exact re-expression).
    pub fn matrix_in(&self, basis: &CMatrix) -> CMatrix {
        let x = self.domain.basis().adjoint() * basis;
        x.adjoint() * &self.matrix * x
    }

    /// Sum of forms with identical domains.
    pub fn add(&self, other: &HermitianForm, tol: &Tolerance) -> Result<HermitianForm> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        if !self.domain.approx_eq(&other.domain, tol) {
            return Err(Error::DomainMismatch);
        }
        let sum = &self.matrix + other.matrix_in(self.domain.basis());
        Ok(HermitianForm {
            ambient: self.ambient,
            domain: self.domain.clone(),
            matrix: (&sum + sum.adjoint()).scale(0.5),
        })
    }

    /// Kernel of `t - c`, the eigenspace for eigenvalues within `psd_clamp`
    /// of `c`. Requires `c <= m(t)`.
    pub fn kernel(&self, c: f64, tol: &Tolerance) -> Result<Subspace> {
        let m = self.lower_bound();
        if c > m + tol.psd_clamp {
            return Err(Error::NotLowerBound { c, m });
        }
        if self.is_vacuous() {
            return Ok(Subspace::zero(self.ambient));
        }
        let (values, vectors) = eigh(&self.matrix);
        let cols: Vec<usize> = (0..values.len())
            .filter(|&i| values[i] <= c + tol.psd_clamp)
            .collect();
        let mut picked = CMatrix::zeros(self.dom_dim(), cols.len());
        for (j, &i) in cols.iter().enumerate() {
            picked.set_column(j, &vectors.column(i));
        }
        orthonormalize(&self.domain.embed(&picked), tol)
    }

    /// The form order: `t1 <= t2` iff `dom t2 <= dom t1` and `t2 - t1` is
    /// nonnegative on `dom t2`.
    pub fn leq(t1: &HermitianForm, t2: &HermitianForm, tol: &Tolerance) -> Result<bool> {
        if t1.ambient != t2.ambient {
            return Err(Error::AmbientMismatch {
                left: t1.ambient,
                right: t2.ambient,
            });
        }
        if !t1.domain.contains(&t2.domain, tol) {
            return Ok(false);
        }
        let gap = &t2.matrix - t1.matrix_in(t2.domain.basis());
        Ok(lambda_min(&gap) >= -tol.psd_clamp)
    }

    /// Restriction of the form to a subspace of its domain.
    pub fn restrict(&self, sub: &Subspace, tol: &Tolerance) -> Result<HermitianForm> {
        if !self.domain.contains(sub, tol) {
            return Err(Error::DomainMismatch);
        }
        HermitianForm::new(sub.clone(), self.matrix_in(sub.basis()), tol)
    }

    /// Equality as forms: identical domains and identical matrices after
    /// re-expression in a common basis.
    pub fn approx_eq(&self, other: &HermitianForm, tol: &Tolerance) -> bool {
        self.ambient == other.ambient
            && self.domain.approx_eq(&other.domain, tol)
            && mat_dist(&self.matrix, &other.matrix_in(self.domain.basis()))
                <= tol.eq_abs * (1.0 + max_abs(&self.matrix))
    }

    /// A representing map for `t - c`: an operator `Q` with
    /// `t[phi, psi] - c <phi, psi> = <Q phi, Q psi>` on the domain.
    ///
    /// The canonical choice is the PSD square root of `matrix - c I` in
    /// domain coordinates; with `minimal = true` the rows are compressed
    /// onto an orthonormal basis of its range so the codomain dimension
    /// equals the rank.
    pub fn representing_map(
        &self,
        c: f64,
        minimal: bool,
        tol: &Tolerance,
    ) -> Result<RepresentingMap> {
        let m = self.lower_bound();
        if c > m + tol.psd_clamp {
            return Err(Error::NotLowerBound { c, m });
        }
        let d = self.dom_dim();
        let shifted = &self.matrix - CMatrix::identity(d, d).scale(c);
        let root = crate::numeric::psd_sqrt(&shifted, tol)?;
        let q = if minimal {
            let range = orthonormalize(&root, tol)?;
            range.basis().adjoint() * &root
        } else {
            root
        };
        RepresentingMap::new(self.domain.clone(), c, q, tol)
    }

    /// Closability, closedness, and singularity flags.
    ///
    /// On a finite-dimensional space every form is closed, hence closable,
    /// and the only singular form is the null form; the certificate spells
    /// this out so the trivial answer is not mistaken for a missing check.
    pub fn classify(&self, tol: &Tolerance) -> Classification {
        let singular = max_abs(&self.matrix) <= tol.eq_abs;
        Classification {
            closable: true,
            closed: true,
            singular,
            certificate: "finite-dimensional domain: every form is closed and closable; \
                          a nonnegative form is singular exactly when it vanishes identically"
                .to_string(),
        }
    }

    /// The closure of the form. Identity at finite dimension; asserts the
    /// stored data already satisfies the closedness predicate.
    pub fn closure(&self, tol: &Tolerance) -> HermitianForm {
        assert!(self.classify(tol).closed);
        self.clone()
    }
}

/// Result of [`HermitianForm::classify`].
#[derive(Debug, Clone)]
pub struct Classification {
    pub closable: bool,
    pub closed: bool,
    pub singular: bool,
    pub certificate: String,
}

/// A representing map `Q` for `t - c`, acting in domain coordinates.
#[derive(Debug, Clone)]
pub struct RepresentingMap {
    domain: Subspace,
    shift: f64,
    q: CMatrix,
    minimal: bool,
}

impl RepresentingMap {
    pub fn new(domain: Subspace, shift: f64, q: CMatrix, tol: &Tolerance) -> Result<Self> {
        if q.ncols() != domain.dim() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "representing map has {} columns, domain dimension is {}",
                    q.ncols(),
                    domain.dim()
                ),
            });
        }
        crate::numeric::check_finite(&q)?;
        let minimal = crate::numeric::rank(&q, tol) == q.nrows();
        Ok(RepresentingMap {
            domain,
            shift,
            q,
            minimal,
        })
    }

    pub fn domain(&self) -> &Subspace {
        &self.domain
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn q(&self) -> &CMatrix {
        &self.q
    }

    pub fn codomain_dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    /// `Q* Q` in domain coordinates; equals `matrix - c I` of the
    /// represented form.
    pub fn gram(&self) -> CMatrix {
        self.q.adjoint() * &self.q
    }

    /// The form this map represents: `c + Q* Q` on the domain.
    pub fn form(&self, tol: &Tolerance) -> Result<HermitianForm> {
        let d = self.domain.dim();
        let matrix = self.gram() + CMatrix::identity(d, d).scale(self.shift);
        HermitianForm::new(self.domain.clone(), matrix, tol)
    }

    /// The map as a relation from the ambient space into its codomain.
    pub fn as_relation(&self, tol: &Tolerance) -> Result<LinearRelation> {
        LinearRelation::from_operator_on(&self.domain, &self.q, self.codomain_dim(), tol)
    }

    /// Compress the rows onto an orthonormal basis of the range.
    pub fn minimalize(&self, tol: &Tolerance) -> Result<RepresentingMap> {
        if self.minimal {
            return Ok(self.clone());
        }
        let range = orthonormalize(&self.q, tol)?;
        RepresentingMap::new(
            self.domain.clone(),
            self.shift,
            range.basis().adjoint() * &self.q,
            tol,
        )
    }

    /// The partial isometry `V` with `V q1 = q2`, isometric on `ran q1` and
    /// zero on its orthogonal complement. Both maps must represent the same
    /// form with the same shift.
    pub fn connect(q1: &RepresentingMap, q2: &RepresentingMap, tol: &Tolerance) -> Result<CMatrix> {
        if !q1.domain.approx_eq(&q2.domain, tol) {
            return Err(Error::DomainMismatch);
        }
        if (q1.shift - q2.shift).abs() > tol.eq_abs {
            return Err(Error::ShiftMismatch {
                left: q1.shift,
                right: q2.shift,
            });
        }
        // same form <=> same Gram matrix in the shared domain coordinates
        let x = q1.domain.basis().adjoint() * q2.domain.basis();
        let g2 = &x * q2.gram() * x.adjoint();
        let defect = mat_dist(&q1.gram(), &g2);
        let scale = 1.0 + max_abs(&q1.gram());
        if defect > tol.eq_abs * scale {
            return Err(Error::DifferentForms { defect });
        }
        let v = q2.q() * pinv(&q1.q, tol)?;
        debug_assert!(mat_dist(&(&v * &q1.q), &q2.q) <= 1e-6 * scale);
        Ok(v)
    }
}
