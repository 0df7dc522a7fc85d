//! Linear relations `R` from `H` to `K`, represented as graph subspaces of
//! the orthogonal sum `H (+) K`.
//!
//! A relation is a possibly multivalued linear map; its graph is an
//! arbitrary subspace whose first block carries the argument and whose
//! second block carries the value. On finite-dimensional spaces every
//! subspace is closed, so every relation here coincides with its closure;
//! [`LinearRelation::closure`] states that once and asserts it.

use crate::error::{Error, Result};
use crate::numeric::{
    max_abs, null_space_floor, orthonormalize, orthonormalize_floor, pinv, re, CMatrix, Subspace,
    Tolerance,
};

#[derive(Debug, Clone)]
pub struct LinearRelation {
    dim_h: usize,
    dim_k: usize,
    graph: Subspace,
}

/// The four primitive parts of a relation.
#[derive(Debug, Clone)]
pub struct Parts {
    pub dom: Subspace,
    pub ran: Subspace,
    pub ker: Subspace,
    pub mul: Subspace,
}

/// Outcome of the regular/singular split `R = (I - P0) R + P0 R`.
#[derive(Debug, Clone)]
pub struct RegularSingularSplit {
    /// Operator part; `mul(reg) = 0`.
    pub reg: LinearRelation,
    /// Singular part; its range lies in `mul R`.
    pub sing: LinearRelation,
    /// Orthogonal projection onto `mul R` in the target space.
    pub p0: CMatrix,
}

impl LinearRelation {
    pub fn from_graph(dim_h: usize, dim_k: usize, graph: Subspace) -> Result<Self> {
        if graph.ambient() != dim_h + dim_k {
            return Err(Error::AmbientMismatch {
                left: graph.ambient(),
                right: dim_h + dim_k,
            });
        }
        Ok(LinearRelation {
            dim_h,
            dim_k,
            graph,
        })
    }

    /// Graph of an everywhere-defined matrix operator `K <- H`.
    pub fn from_matrix(m: &CMatrix, tol: &Tolerance) -> Result<Self> {
        let (dim_k, dim_h) = m.shape();
        let mut stacked = CMatrix::zeros(dim_h + dim_k, dim_h);
        stacked
            .view_mut((0, 0), (dim_h, dim_h))
            .copy_from(&CMatrix::identity(dim_h, dim_h));
        stacked.view_mut((dim_h, 0), (dim_k, dim_h)).copy_from(m);
        Ok(LinearRelation {
            dim_h,
            dim_k,
            graph: orthonormalize(&stacked, tol)?,
        })
    }

    /// Graph of the operator sending `B x` to `A x`, where `B` is the
    /// orthonormal basis of `domain` and `A` acts in domain coordinates.
    pub fn from_operator_on(
        domain: &Subspace,
        action: &CMatrix,
        dim_k: usize,
        tol: &Tolerance,
    ) -> Result<Self> {
        if action.ncols() != domain.dim() || action.nrows() != dim_k {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "operator action is {}x{}, expected {}x{}",
                    action.nrows(),
                    action.ncols(),
                    dim_k,
                    domain.dim()
                ),
            });
        }
        let dim_h = domain.ambient();
        let d = domain.dim();
        let mut stacked = CMatrix::zeros(dim_h + dim_k, d);
        stacked
            .view_mut((0, 0), (dim_h, d))
            .copy_from(domain.basis());
        stacked.view_mut((dim_h, 0), (dim_k, d)).copy_from(action);
        Ok(LinearRelation {
            dim_h,
            dim_k,
            graph: orthonormalize(&stacked, tol)?,
        })
    }

    pub fn identity(n: usize, tol: &Tolerance) -> Self {
        Self::from_matrix(&CMatrix::identity(n, n), tol).expect("identity graph")
    }

    /// The zero relation (empty graph); `dom = {0}`.
    pub fn zero(dim_h: usize, dim_k: usize) -> Self {
        LinearRelation {
            dim_h,
            dim_k,
            graph: Subspace::zero(dim_h + dim_k),
        }
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn dim_k(&self) -> usize {
        self.dim_k
    }

    pub fn graph(&self) -> &Subspace {
        &self.graph
    }

    pub fn graph_dim(&self) -> usize {
        self.graph.dim()
    }

    fn top_block(&self) -> CMatrix {
        self.graph
            .basis()
            .view((0, 0), (self.dim_h, self.graph.dim()))
            .into_owned()
    }

    fn bottom_block(&self) -> CMatrix {
        self.graph
            .basis()
            .view((self.dim_h, 0), (self.dim_k, self.graph.dim()))
            .into_owned()
    }

    pub fn parts(&self, tol: &Tolerance) -> Parts {
        let top = self.top_block();
        let bottom = self.bottom_block();
        // graph bases are orthonormal, so every block lives at unit scale
        // and the rank decisions get the unit floor
        let dom = orthonormalize_floor(&top, tol, 1.0).expect("graph basis is finite");
        let ran = orthonormalize_floor(&bottom, tol, 1.0).expect("graph basis is finite");
        // mul = V ker(U): the values reachable from a zero argument.
        let ker_top = null_space_floor(&top, tol, 1.0).expect("finite");
        let mul = orthonormalize_floor(&(&bottom * ker_top.basis()), tol, 1.0).expect("finite");
        let ker_bottom = null_space_floor(&bottom, tol, 1.0).expect("finite");
        let ker = orthonormalize_floor(&(&top * ker_bottom.basis()), tol, 1.0).expect("finite");
        Parts { dom, ran, ker, mul }
    }

    pub fn is_operator(&self, tol: &Tolerance) -> bool {
        self.parts(tol).mul.is_zero()
    }

    /// Adjoint relation `R* <= K (+) H`, computed as the orthogonal
    /// complement of the sign-flipped graph.
    pub fn adjoint(&self, tol: &Tolerance) -> LinearRelation {
        let g = self.graph.dim();
        let mut flipped = CMatrix::zeros(self.dim_k + self.dim_h, g);
        flipped
            .view_mut((0, 0), (self.dim_k, g))
            .copy_from(&self.bottom_block());
        flipped
            .view_mut((self.dim_k, 0), (self.dim_h, g))
            .copy_from(&(-self.top_block()));
        let span = orthonormalize_floor(&flipped, tol, 1.0).expect("finite");
        LinearRelation {
            dim_h: self.dim_k,
            dim_k: self.dim_h,
            graph: span.complement(tol),
        }
    }

    /// Composition `S o R` for `R: H -> K`, `S: K -> L`, via intersection
    /// in `H (+) K (+) L` and projection onto the outer blocks.
    pub fn compose(
        s: &LinearRelation,
        r: &LinearRelation,
        tol: &Tolerance,
    ) -> Result<LinearRelation> {
        if r.dim_k != s.dim_h {
            return Err(Error::DimensionMismatch {
                context: format!("compose: inner spaces differ ({} vs {})", r.dim_k, s.dim_h),
            });
        }
        let (h, k, l) = (r.dim_h, r.dim_k, s.dim_k);
        let total = h + k + l;

        // graph(R) extended freely in the L block
        let mut a = CMatrix::zeros(total, r.graph.dim() + l);
        a.view_mut((0, 0), (h + k, r.graph.dim()))
            .copy_from(r.graph.basis());
        for j in 0..l {
            a[(h + k + j, r.graph.dim() + j)] = re(1.0);
        }
        // graph(S) extended freely in the H block
        let mut b = CMatrix::zeros(total, s.graph.dim() + h);
        b.view_mut((h, 0), (k + l, s.graph.dim()))
            .copy_from(s.graph.basis());
        for j in 0..h {
            b[(j, s.graph.dim() + j)] = re(1.0);
        }

        let sa = Subspace::from_orthonormal_unchecked(total, a)?;
        let sb = Subspace::from_orthonormal_unchecked(total, b)?;
        let meet = sa.intersect(&sb, tol)?;

        // delete the middle block
        let mut outer = CMatrix::zeros(h + l, meet.dim());
        outer
            .view_mut((0, 0), (h, meet.dim()))
            .copy_from(&meet.basis().view((0, 0), (h, meet.dim())).into_owned());
        outer
            .view_mut((h, 0), (l, meet.dim()))
            .copy_from(&meet.basis().view((h + k, 0), (l, meet.dim())).into_owned());
        Ok(LinearRelation {
            dim_h: h,
            dim_k: l,
            graph: orthonormalize_floor(&outer, tol, 1.0)?,
        })
    }

    /// `R + c`: shifts every value, `(h, h') -> (h, h' + c h)`.
    pub fn add_scalar(&self, c: f64, tol: &Tolerance) -> Result<LinearRelation> {
        if self.dim_h != self.dim_k {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "add_scalar requires a square relation, got {} -> {}",
                    self.dim_h, self.dim_k
                ),
            });
        }
        let g = self.graph.dim();
        let top = self.top_block();
        let bottom = self.bottom_block() + top.scale(c);
        let mut shifted = CMatrix::zeros(self.dim_h + self.dim_k, g);
        shifted.view_mut((0, 0), (self.dim_h, g)).copy_from(&top);
        shifted
            .view_mut((self.dim_h, 0), (self.dim_k, g))
            .copy_from(&bottom);
        Ok(LinearRelation {
            dim_h: self.dim_h,
            dim_k: self.dim_k,
            graph: orthonormalize_floor(&shifted, tol, 1.0)?,
        })
    }

    /// Split into the operator part `(I - P0) R` and the singular part
    /// `P0 R`, where `P0` projects onto `mul R`.
    pub fn regular_singular_split(&self, tol: &Tolerance) -> RegularSingularSplit {
        let mul = self.parts(tol).mul;
        let p0 = mul.projection();
        let co_p0 = CMatrix::identity(self.dim_k, self.dim_k) - &p0;
        let top = self.top_block();
        let bottom = self.bottom_block();
        let build = |projected: CMatrix| -> LinearRelation {
            let g = self.graph.dim();
            let mut stacked = CMatrix::zeros(self.dim_h + self.dim_k, g);
            stacked.view_mut((0, 0), (self.dim_h, g)).copy_from(&top);
            stacked
                .view_mut((self.dim_h, 0), (self.dim_k, g))
                .copy_from(&projected);
            LinearRelation {
                dim_h: self.dim_h,
                dim_k: self.dim_k,
                graph: orthonormalize_floor(&stacked, tol, 1.0).expect("finite"),
            }
        };
        RegularSingularSplit {
            reg: build(&co_p0 * &bottom),
            sing: build(&p0 * &bottom),
            p0,
        }
    }

    /// Apply the relation to columns of `x` (which must lie in `dom R`),
    /// returning one value per column. For an operator the value is unique;
    /// in general the representative determined by the graph basis is
    /// returned.
    pub fn apply_columns(&self, x: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
        if x.nrows() != self.dim_h {
            return Err(Error::DimensionMismatch {
                context: format!("argument has {} rows, expected {}", x.nrows(), self.dim_h),
            });
        }
        let top = self.top_block();
        let coeff = pinv(&top, tol)? * x;
        let residual = max_abs(&(&top * &coeff - x));
        let scale = max_abs(x).max(1.0);
        if residual > tol.eq_abs * scale {
            return Err(Error::NotInDomain { residual });
        }
        Ok(self.bottom_block() * coeff)
    }

    /// Contractive domination: `dom R2 <= dom R1` and `|R1 phi| <= |R2 phi|`
    /// on `dom R2`. Both relations must be operators.
    pub fn dominates_contractively(
        r1: &LinearRelation,
        r2: &LinearRelation,
        tol: &Tolerance,
    ) -> Result<bool> {
        if r1.dim_h != r2.dim_h {
            return Err(Error::AmbientMismatch {
                left: r1.dim_h,
                right: r2.dim_h,
            });
        }
        if !r1.is_operator(tol) || !r2.is_operator(tol) {
            return Err(Error::Multivalued);
        }
        let p1 = r1.parts(tol);
        let p2 = r2.parts(tol);
        if !p1.dom.contains(&p2.dom, tol) {
            return Ok(false);
        }
        let d2 = p2.dom.basis();
        let m1 = r1.apply_columns(d2, tol)?;
        let m2 = r2.apply_columns(d2, tol)?;
        let gap = m2.adjoint() * &m2 - m1.adjoint() * &m1;
        Ok(crate::numeric::lambda_min(&gap) >= -tol.psd_clamp)
    }

    /// Identity at finite dimension; asserts that the graph is already
    /// closed (a subspace equals its own span).
    pub fn closure(&self, tol: &Tolerance) -> LinearRelation {
        let respanned = orthonormalize(self.graph.basis(), tol).expect("finite");
        assert!(
            respanned.approx_eq(&self.graph, tol),
            "graph subspace must be closed"
        );
        self.clone()
    }

    /// Graph equality through the canonical projections.
    pub fn approx_eq(&self, other: &LinearRelation, tol: &Tolerance) -> bool {
        self.dim_h == other.dim_h
            && self.dim_k == other.dim_k
            && self.graph.approx_eq(&other.graph, tol)
    }

    pub fn graph_distance(&self, other: &LinearRelation) -> f64 {
        self.graph.distance(&other.graph)
    }
}
