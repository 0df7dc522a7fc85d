//! Representation theorems: every semibounded form generates a semibounded
//! selfadjoint relation `Q* Q + c`, independent of the shift `c <= m(t)`
//! and of the representing map; conversely every semibounded selfadjoint
//! relation determines a closed form, and the two constructions invert
//! each other. The order of relations matches the order of forms.
//!
//! On a finite-dimensional space every form is closed, so the symmetric
//! relation and its selfadjoint extension coincide; the construction still
//! computes both along the same path and asserts the coincidence.

use crate::error::{Error, Result};
use crate::form::HermitianForm;
use crate::numeric::{
    eigh, hermitize, lambda_min, mat_dist, max_abs, psd_sqrt, re, CMatrix, CVector, Subspace,
    Tolerance,
};
use crate::relation::LinearRelation;

/// A semibounded selfadjoint relation in `L(H)` together with its derived
/// operator part on `(mul)^perp`.
#[derive(Debug, Clone)]
pub struct SelfadjointRelation {
    rel: LinearRelation,
    lower_bound: f64,
    op_domain: Subspace,
    operator_part: CMatrix,
}

impl SelfadjointRelation {
    /// Wrap a relation after verifying selfadjointness and extracting the
    /// operator part.
    pub fn from_relation(rel: LinearRelation, tol: &Tolerance) -> Result<Self> {
        if rel.dim_h() != rel.dim_k() {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "selfadjoint relation must be square, got {} -> {}",
                    rel.dim_h(),
                    rel.dim_k()
                ),
            });
        }
        let adj = rel.adjoint(tol);
        let defect = rel.graph_distance(&adj);
        if defect > tol.eq_abs {
            return Err(Error::NotSelfadjoint { defect });
        }
        let parts = rel.parts(tol);
        let op_domain = parts.mul.complement(tol);
        let split = rel.regular_singular_split(tol);
        let values = if op_domain.is_zero() {
            CMatrix::zeros(rel.dim_h(), 0)
        } else {
            split.reg.apply_columns(op_domain.basis(), tol)?
        };
        let operator_part = hermitize(&(op_domain.basis().adjoint() * values), tol)?;
        let lower_bound = lambda_min(&operator_part);
        Ok(SelfadjointRelation {
            rel,
            lower_bound,
            op_domain,
            operator_part,
        })
    }

    /// Everywhere-defined Hermitian matrix operator.
    pub fn from_operator(matrix: &CMatrix, tol: &Tolerance) -> Result<Self> {
        let m = hermitize(matrix, tol)?;
        Self::from_relation(LinearRelation::from_matrix(&m, tol)?, tol)
    }

    /// Build the relation with the given operator part on `op_domain` and
    /// multivalued part `op_domain^perp`.
    pub fn from_parts(op_domain: Subspace, op_matrix: CMatrix, tol: &Tolerance) -> Result<Self> {
        let n = op_domain.ambient();
        let d = op_domain.dim();
        let m = hermitize(&op_matrix, tol)?;
        if m.nrows() != d {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "operator part is {}x{}, domain dimension is {}",
                    m.nrows(),
                    m.ncols(),
                    d
                ),
            });
        }
        let mul = op_domain.complement(tol);
        let mut cols = CMatrix::zeros(2 * n, d + mul.dim());
        cols.view_mut((0, 0), (n, d)).copy_from(op_domain.basis());
        cols.view_mut((n, 0), (n, d))
            .copy_from(&(op_domain.basis() * &m));
        cols.view_mut((n, d), (n, mul.dim())).copy_from(mul.basis());
        let graph = crate::numeric::orthonormalize(&cols, tol)?;
        Self::from_relation(LinearRelation::from_graph(n, n, graph)?, tol)
    }

    pub fn relation(&self) -> &LinearRelation {
        &self.rel
    }

    pub fn ambient(&self) -> usize {
        self.rel.dim_h()
    }

    /// Lower bound of the operator part; `+inf` when `dom = {0}`.
    pub fn lower_bound(&self) -> f64 {
        self.lower_bound
    }

    /// Basis of `(mul)^perp = clos dom`, the space the operator part acts on.
    pub fn op_domain(&self) -> &Subspace {
        &self.op_domain
    }

    pub fn operator_part(&self) -> &CMatrix {
        &self.operator_part
    }

    pub fn mul_dim(&self) -> usize {
        self.ambient() - self.op_domain.dim()
    }

    pub fn approx_eq(&self, other: &SelfadjointRelation, tol: &Tolerance) -> bool {
        self.rel.approx_eq(&other.rel, tol)
    }
}

/// The selfadjoint relation `Q* Q + c` generated by a semibounded form.
///
/// Recomputes the graph at `c - 1` and asserts it is unchanged, asserts
/// `mul = (dom t)^perp`, and asserts the lower bound matches `m(t)`.
pub fn represent_form(t: &HermitianForm, c: f64, tol: &Tolerance) -> Result<SelfadjointRelation> {
    let m = t.lower_bound();
    if c > m + tol.psd_clamp {
        return Err(Error::NotLowerBound { c, m });
    }
    let build = |shift: f64| -> Result<LinearRelation> {
        let q = t.representing_map(shift, true, tol)?;
        let q_rel = q.as_relation(tol)?;
        // S_t = Q* Q + c and A_t = Q* Q** + c along the same path; the
        // closure is the identity here, which the assertion inside
        // `closure` certifies.
        let symmetric =
            LinearRelation::compose(&q_rel.adjoint(tol), &q_rel, tol)?.add_scalar(shift, tol)?;
        let extension = LinearRelation::compose(&q_rel.adjoint(tol), &q_rel.closure(tol), tol)?
            .add_scalar(shift, tol)?;
        assert!(
            symmetric.approx_eq(&extension, tol),
            "symmetric relation and its selfadjoint extension must coincide on a \
             finite-dimensional space"
        );
        Ok(symmetric)
    };
    let rel = build(c)?;
    let again = build(c - 1.0)?;
    assert!(
        rel.approx_eq(&again, tol),
        "represented relation must not depend on the shift"
    );
    let out = SelfadjointRelation::from_relation(rel, tol)?;
    let expected_mul = t.domain().complement(tol);
    assert!(
        out.rel.parts(tol).mul.approx_eq(&expected_mul, tol),
        "mul of the represented relation must be the orthogonal complement of the domain"
    );
    if m.is_finite() {
        assert!(
            (out.lower_bound - m).abs() <= 1e-7 * (1.0 + m.abs()),
            "lower bound of the relation must match the lower bound of the form"
        );
    } else {
        assert!(!out.lower_bound.is_finite());
    }
    Ok(out)
}

/// Check the defining identity of the first representation theorem:
/// `t[phi, psi] = <phi', psi>` for all `(phi, phi')` in the graph and all
/// `psi` in `dom t`, plus the maximality clause on symmetric restrictions.
pub fn verify_first_representation(
    t: &HermitianForm,
    a: &SelfadjointRelation,
    tol: &Tolerance,
) -> Result<bool> {
    let parts = a.rel.parts(tol);
    if !t.domain().contains(&parts.dom, tol) {
        return Err(Error::DomainMismatch);
    }
    let n = a.ambient();
    let g = a.rel.graph_dim();
    let basis = a.rel.graph().basis();
    for j in 0..g {
        let col = basis.column(j);
        let phi = CVector::from_fn(n, |i, _| col[i]);
        let phi_prime = CVector::from_fn(n, |i, _| col[n + i]);
        if t.domain().residual_of(&phi) > tol.eq_abs {
            // graph vectors with argument outside dom t would already have
            // tripped the domain check above through dom(A)
            return Ok(false);
        }
        for p in 0..t.dom_dim() {
            let psi = CVector::from_fn(n, |i, _| t.domain().basis()[(i, p)]);
            let lhs = t.eval(&phi, &psi, tol)?;
            let rhs = (psi.adjoint() * &phi_prime)[(0, 0)];
            if (lhs - rhs).norm() > tol.eq_abs * 1e2 {
                return Ok(false);
            }
        }
    }
    // maximality: symmetric restrictions satisfying the identity stay inside
    for cut in 1..g {
        let sub = basis.columns(0, cut).into_owned();
        let sub_graph = crate::numeric::orthonormalize(&sub, tol)?;
        if !a.rel.graph().contains(&sub_graph, tol) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The closed form generated by a semibounded selfadjoint relation:
/// `t[phi, psi] = <(A_reg - c)^{1/2} phi, (A_reg - c)^{1/2} psi> + c <phi, psi>`
/// on `(mul A)^perp`. Recomputed at `c - 1` to certify shift independence.
pub fn form_from_relation(
    a: &SelfadjointRelation,
    c: f64,
    tol: &Tolerance,
) -> Result<HermitianForm> {
    let gamma = a.lower_bound();
    if c > gamma + tol.psd_clamp {
        return Err(Error::NotLowerBound { c, m: gamma });
    }
    let d = a.op_domain.dim();
    let build = |shift: f64| -> Result<CMatrix> {
        let shifted = &a.operator_part - CMatrix::identity(d, d).scale(shift);
        let root = psd_sqrt(&shifted, tol)?;
        Ok(root.adjoint() * &root + CMatrix::identity(d, d).scale(shift))
    };
    let m1 = build(c)?;
    let m2 = build(c - 1.0)?;
    assert!(
        mat_dist(&m1, &m2) <= 1e-7 * (1.0 + max_abs(&m1)),
        "form induced by a relation must not depend on the shift"
    );
    HermitianForm::new(a.op_domain.clone(), m1, tol)
}

/// The relation order `H1 <= H2` for relations bounded below by a common
/// `c`: `dom H2^{1/2} <= dom H1^{1/2}` together with the quadratic
/// comparison of the shifted operator parts on the smaller domain.
pub fn relation_leq(
    h1: &SelfadjointRelation,
    h2: &SelfadjointRelation,
    c: f64,
    tol: &Tolerance,
) -> Result<bool> {
    if h1.ambient() != h2.ambient() {
        return Err(Error::AmbientMismatch {
            left: h1.ambient(),
            right: h2.ambient(),
        });
    }
    let common = h1.lower_bound.min(h2.lower_bound);
    if c > common + tol.psd_clamp {
        return Err(Error::NotLowerBound { c, m: common });
    }
    if !h1.op_domain.contains(&h2.op_domain, tol) {
        return Ok(false);
    }
    let d2 = h2.op_domain.dim();
    let x = h1.op_domain.basis().adjoint() * h2.op_domain.basis();
    let m1_on_2 = x.adjoint()
        * (&h1.operator_part - CMatrix::identity(h1.op_domain.dim(), h1.op_domain.dim()).scale(c))
        * &x;
    let m2 = &h2.operator_part - CMatrix::identity(d2, d2).scale(c);
    Ok(lambda_min(&(m2 - m1_on_2)) >= -tol.psd_clamp)
}

/// The resolvent `(A - lambda)^{-1}` as an everywhere-defined matrix:
/// inverts the operator part on `(mul A)^perp` and annihilates `mul A`.
pub fn resolvent(a: &SelfadjointRelation, lambda: f64, _tol: &Tolerance) -> Result<CMatrix> {
    if lambda >= a.lower_bound {
        return Err(Error::LambdaAboveBound {
            lambda,
            bound: a.lower_bound,
        });
    }
    let d = a.op_domain.dim();
    let n = a.ambient();
    if d == 0 {
        return Ok(CMatrix::zeros(n, n));
    }
    let (values, vectors) = eigh(&a.operator_part);
    let inverted = CMatrix::from_diagonal(&CVector::from_iterator(
        d,
        values.iter().map(|&v| re(1.0 / (v - lambda))),
    ));
    let small = &vectors * inverted * vectors.adjoint();
    let out = a.op_domain.basis() * small * a.op_domain.basis().adjoint();
    Ok((&out + out.adjoint()).scale(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::HermitianForm;
    use crate::testutil::{f1_form, frozen_rng, random_form};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn f1_expected_relation() -> LinearRelation {
        let cols = CMatrix::from_row_slice(
            4,
            2,
            &[
                re(1.0),
                re(0.0),
                re(0.0),
                re(0.0),
                re(2.0),
                re(0.0),
                re(0.0),
                re(1.0),
            ],
        );
        let graph = crate::numeric::orthonormalize(&cols, &tol()).unwrap();
        LinearRelation::from_graph(2, 2, graph).unwrap()
    }

    #[test]
    fn f1_produces_the_hand_derived_graph() {
        let a = represent_form(&f1_form(), 0.0, &tol()).unwrap();
        assert!(a.relation().approx_eq(&f1_expected_relation(), &tol()));
        assert!(a
            .op_domain()
            .approx_eq(&Subspace::coordinate(2, &[0]), &tol()));
        assert!((a.operator_part()[(0, 0)] - re(2.0)).norm() < 1e-9);
        assert!((a.lower_bound() - 2.0).abs() < 1e-9);
        assert_eq!(a.mul_dim(), 1);
    }

    #[test]
    fn identity_form_represents_as_identity_operator() {
        let t = HermitianForm::on_full(CMatrix::identity(2, 2), &tol()).unwrap();
        let a = represent_form(&t, 0.0, &tol()).unwrap();
        let id = LinearRelation::identity(2, &tol());
        assert!(a.relation().approx_eq(&id, &tol()));
        assert_eq!(a.mul_dim(), 0);
    }

    #[test]
    fn zero_form_on_a_line_keeps_its_complement_multivalued() {
        let t = HermitianForm::zero_on(Subspace::coordinate(2, &[0]));
        let a = represent_form(&t, 0.0, &tol()).unwrap();
        assert_eq!(a.mul_dim(), 1);
        assert!((a.operator_part()[(0, 0)]).norm() < 1e-10);
        assert!((a.lower_bound()).abs() < 1e-10);
    }

    #[test]
    fn represented_relations_are_selfadjoint_with_dual_mul() {
        let mut rng = frozen_rng(103);
        for _ in 0..15 {
            let dom = rng.range(1, 4);
            let t = random_form(&mut rng, 4, dom);
            let c = t.lower_bound() - rng.unit();
            let a = represent_form(&t, c, &tol()).unwrap();
            let adj = a.relation().adjoint(&tol());
            assert!(a.relation().approx_eq(&adj, &tol()));
            let mul = a.relation().parts(&tol()).mul;
            assert!(mul.approx_eq(&t.domain().complement(&tol()), &tol()));
            assert!((a.lower_bound() - t.lower_bound()).abs() < 1e-8);
        }
    }

    #[test]
    fn first_representation_identity_holds_and_detects_perturbations() {
        let t = f1_form();
        let a = represent_form(&t, 0.0, &tol()).unwrap();
        assert!(verify_first_representation(&t, &a, &tol()).unwrap());

        let perturbed = SelfadjointRelation::from_parts(
            a.op_domain().clone(),
            a.operator_part() + CMatrix::identity(1, 1).scale(0.1),
            &tol(),
        )
        .unwrap();
        assert!(!verify_first_representation(&t, &perturbed, &tol()).unwrap());

        let zero = HermitianForm::zero_on(Subspace::coordinate(2, &[0]));
        let az = represent_form(&zero, 0.0, &tol()).unwrap();
        assert!(verify_first_representation(&zero, &az, &tol()).unwrap());
    }

    #[test]
    fn form_relation_round_trips() {
        let mut rng = frozen_rng(107);
        for _ in 0..15 {
            let t = {
                let d = rng.range(1, 4);
                random_form(&mut rng, 4, d)
            };
            let c = t.lower_bound() - 1.0;
            let a = represent_form(&t, c, &tol()).unwrap();
            let back = form_from_relation(&a, c, &tol()).unwrap();
            assert!(back.approx_eq(&t, &tol()));
            let again = represent_form(&back, c, &tol()).unwrap();
            assert!(again.approx_eq(&a, &tol()));
        }
    }

    #[test]
    fn form_from_identity_and_from_pure_mul() {
        let id = SelfadjointRelation::from_operator(&CMatrix::identity(2, 2), &tol()).unwrap();
        let t = form_from_relation(&id, 0.0, &tol()).unwrap();
        assert!(t.approx_eq(
            &HermitianForm::on_full(CMatrix::identity(2, 2), &tol()).unwrap(),
            &tol()
        ));

        // purely multivalued relation: dom = {0}
        let rel = LinearRelation::from_graph(2, 2, {
            // graph = {0} (+) C^2
            Subspace::coordinate(4, &[2, 3])
        })
        .unwrap();
        let a = SelfadjointRelation::from_relation(rel, &tol()).unwrap();
        let v = form_from_relation(&a, 0.0, &tol()).unwrap();
        assert!(v.is_vacuous());
    }

    #[test]
    fn relation_order_cases() {
        let id = SelfadjointRelation::from_operator(&CMatrix::identity(2, 2), &tol()).unwrap();
        let twice = SelfadjointRelation::from_operator(&CMatrix::identity(2, 2).scale(2.0), &tol())
            .unwrap();
        assert!(relation_leq(&id, &twice, 0.0, &tol()).unwrap());
        assert!(!relation_leq(&twice, &id, 0.0, &tol()).unwrap());

        // domain shrinkage raises a relation in the order
        let f1 = represent_form(&f1_form(), 0.0, &tol()).unwrap();
        assert!(relation_leq(&id, &f1, 0.0, &tol()).unwrap());
    }

    #[test]
    fn order_equivalence_with_forms() {
        let mut rng = frozen_rng(109);
        for _ in 0..20 {
            let t1 = {
                let d = rng.range(1, 4);
                random_form(&mut rng, 3, d)
            };
            let t2 = {
                let d = rng.range(1, 4);
                random_form(&mut rng, 3, d)
            };
            let c = t1.lower_bound().min(t2.lower_bound()) - 1.0;
            let a1 = represent_form(&t1, c, &tol()).unwrap();
            let a2 = represent_form(&t2, c, &tol()).unwrap();
            let form_order = HermitianForm::leq(&t1, &t2, &tol()).unwrap();
            let relation_order = relation_leq(&a1, &a2, c, &tol()).unwrap();
            assert_eq!(form_order, relation_order);
        }
    }

    #[test]
    fn resolvent_values() {
        let a = SelfadjointRelation::from_operator(
            &CMatrix::from_diagonal(&CVector::from_vec(vec![re(1.0), re(3.0)])),
            &tol(),
        )
        .unwrap();
        let r = resolvent(&a, 0.0, &tol()).unwrap();
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![re(1.0), re(1.0 / 3.0)]));
        assert!(mat_dist(&r, &expected) < 1e-12);

        let f1 = represent_form(&f1_form(), 0.0, &tol()).unwrap();
        let rf = resolvent(&f1, -1.0, &tol()).unwrap();
        let expected_f1 = CMatrix::from_diagonal(&CVector::from_vec(vec![re(1.0 / 3.0), re(0.0)]));
        assert!(mat_dist(&rf, &expected_f1) < 1e-12);
        // (A - lambda)^{-1} (A - lambda) phi = phi on dom A: on graph columns
        // (u, v) this reads R (v + u) = u for lambda = -1
        let g = f1.relation().graph().basis();
        let n = f1.ambient();
        let u = g.view((0, 0), (n, g.ncols())).into_owned();
        let v = g.view((n, 0), (n, g.ncols())).into_owned();
        assert!(mat_dist(&(&rf * (&v + &u)), &u) < 1e-12);

        let id = SelfadjointRelation::from_operator(&CMatrix::identity(2, 2), &tol()).unwrap();
        let ri = resolvent(&id, -1.0, &tol()).unwrap();
        assert!(mat_dist(&ri, &CMatrix::identity(2, 2).scale(0.5)) < 1e-12);

        assert!(matches!(
            resolvent(&id, 1.0, &tol()),
            Err(Error::LambdaAboveBound { .. })
        ));
    }

    #[test]
    fn resolvent_identity_holds() {
        let mut rng = frozen_rng(113);
        for _ in 0..10 {
            let t = {
                let d = rng.range(1, 5);
                random_form(&mut rng, 4, d)
            };
            let a = represent_form(&t, t.lower_bound(), &tol()).unwrap();
            let (l1, l2) = (a.lower_bound() - 1.0, a.lower_bound() - 2.5);
            if !l1.is_finite() {
                continue;
            }
            let r1 = resolvent(&a, l1, &tol()).unwrap();
            let r2 = resolvent(&a, l2, &tol()).unwrap();
            let lhs = &r1 - &r2;
            let rhs = (&r1 * &r2).scale(l1 - l2);
            assert!(mat_dist(&lhs, &rhs) <= 1e-9);
        }
    }
}
