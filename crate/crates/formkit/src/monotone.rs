//! Monotone sequences of semibounded forms and their limits.
//!
//! Two encodings cover the finite-dimensional landscape: an affine family
//! `t_n = r + n s` (nondecreasing) or `t_n = r + s/n` (nonincreasing) with
//! closed-form limits, and explicit chains that stabilize after finitely
//! many steps. Nondecreasing limits live on the subspace where the growth
//! direction vanishes; nonincreasing limits fill out the union of domains.
//! The associated selfadjoint relations converge in the strong resolvent
//! sense, which the convergence report quantifies.

use crate::error::{Error, Result};
use crate::form::HermitianForm;
use crate::numeric::{mat_dist, orthonormalize, re, CMatrix, Tolerance};
use crate::represent::{form_from_relation, represent_form, resolvent, SelfadjointRelation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Nondecreasing,
    Nonincreasing,
}

impl Sense {
    pub fn as_str(&self) -> &'static str {
        match self {
            Sense::Nondecreasing => "nondecreasing",
            Sense::Nonincreasing => "nonincreasing",
        }
    }
}

/// A monotone sequence of semibounded forms.
#[derive(Debug, Clone)]
pub enum FormSequence {
    /// `t_n = base + n * slope` (nondecreasing) or `base + slope / n`
    /// (nonincreasing), with `slope >= 0` on the common domain.
    Affine {
        base: HermitianForm,
        slope: HermitianForm,
        sense: Sense,
    },
    /// Finitely many explicitly listed forms, monotone in the given sense,
    /// that stabilize before the list ends.
    Chain {
        forms: Vec<HermitianForm>,
        sense: Sense,
    },
}

impl FormSequence {
    pub fn affine(
        base: HermitianForm,
        slope: HermitianForm,
        sense: Sense,
        tol: &Tolerance,
    ) -> Result<Self> {
        if base.ambient() != slope.ambient() {
            return Err(Error::AmbientMismatch {
                left: base.ambient(),
                right: slope.ambient(),
            });
        }
        if !base.domain().approx_eq(slope.domain(), tol) {
            return Err(Error::DomainMismatch);
        }
        let lo = slope.lower_bound();
        if lo < -tol.psd_clamp {
            return Err(Error::NotPsd {
                eigenvalue: lo,
                clamp: tol.psd_clamp,
            });
        }
        Ok(FormSequence::Affine { base, slope, sense })
    }

    pub fn chain(forms: Vec<HermitianForm>, sense: Sense, tol: &Tolerance) -> Result<Self> {
        if forms.is_empty() {
            return Err(Error::BadArgument {
                context: "chain must contain at least one form".to_string(),
            });
        }
        for i in 0..forms.len() - 1 {
            let ok = match sense {
                Sense::Nondecreasing => HermitianForm::leq(&forms[i], &forms[i + 1], tol)?,
                Sense::Nonincreasing => HermitianForm::leq(&forms[i + 1], &forms[i], tol)?,
            };
            if !ok {
                return Err(Error::NotMonotone { index: i + 1 });
            }
        }
        Ok(FormSequence::Chain { forms, sense })
    }

    pub fn sense(&self) -> Sense {
        match self {
            FormSequence::Affine { sense, .. } => *sense,
            FormSequence::Chain { sense, .. } => *sense,
        }
    }

    pub fn ambient(&self) -> usize {
        match self {
            FormSequence::Affine { base, .. } => base.ambient(),
            FormSequence::Chain { forms, .. } => forms[0].ambient(),
        }
    }

    /// The `n`-th term, `n >= 1`. Chains clamp at their last entry.
    pub fn term(&self, n: usize) -> HermitianForm {
        assert!(n >= 1, "terms are indexed from 1");
        match self {
            FormSequence::Affine { base, slope, sense } => {
                let factor = match sense {
                    Sense::Nondecreasing => n as f64,
                    Sense::Nonincreasing => 1.0 / n as f64,
                };
                let scaled = HermitianForm::new(
                    slope.domain().clone(),
                    slope.matrix().scale(factor),
                    &Tolerance::default(),
                )
                .expect("scaled slope stays Hermitian");
                base.add(&scaled, &Tolerance::default())
                    .expect("common domain by construction")
            }
            FormSequence::Chain { forms, .. } => forms[(n - 1).min(forms.len() - 1)].clone(),
        }
    }

    pub fn chain_len(&self) -> Option<usize> {
        match self {
            FormSequence::Affine { .. } => None,
            FormSequence::Chain { forms, .. } => Some(forms.len()),
        }
    }
}

fn stabilized_limit(forms: &[HermitianForm], tol: &Tolerance) -> Result<HermitianForm> {
    for i in 0..forms.len() - 1 {
        if forms[i].approx_eq(&forms[i + 1], tol) {
            return Ok(forms[i + 1].clone());
        }
    }
    Err(Error::NoStabilization { len: forms.len() })
}

/// Limit of a nondecreasing sequence: the unique form on the vectors with
/// bounded values. For the affine family this is `base` compressed to
/// `ker slope`; for chains, the stabilized tail.
pub fn limit_nondecreasing(seq: &FormSequence, tol: &Tolerance) -> Result<HermitianForm> {
    if seq.sense() != Sense::Nondecreasing {
        return Err(Error::SenseMismatch {
            expected: "nondecreasing",
        });
    }
    match seq {
        FormSequence::Affine { base, slope, .. } => {
            // sup_n t_n[phi] < inf exactly when slope[phi] = 0
            let kernel = slope.kernel(0.0, tol)?;
            let matrix = base.matrix_in(kernel.basis());
            HermitianForm::new(kernel, matrix, tol)
        }
        FormSequence::Chain { forms, .. } => stabilized_limit(forms, tol),
    }
}

/// Limit of a nonincreasing sequence with a common lower bound: `base` for
/// the affine family (`slope / n` fades), the stabilized tail for chains.
pub fn limit_nonincreasing(seq: &FormSequence, tol: &Tolerance) -> Result<HermitianForm> {
    if seq.sense() != Sense::Nonincreasing {
        return Err(Error::SenseMismatch {
            expected: "nonincreasing",
        });
    }
    match seq {
        FormSequence::Affine { base, .. } => Ok(base.clone()),
        FormSequence::Chain { forms, .. } => stabilized_limit(forms, tol),
    }
}

pub fn limit(seq: &FormSequence, tol: &Tolerance) -> Result<HermitianForm> {
    match seq.sense() {
        Sense::Nondecreasing => limit_nondecreasing(seq, tol),
        Sense::Nonincreasing => limit_nonincreasing(seq, tol),
    }
}

/// Strong-resolvent convergence data for `A_{t_n} -> A_inf`.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub lambda: f64,
    /// `|R(A_{t_n}, lambda) - R(A_inf, lambda)|` for `n = 1..n_max`.
    pub errors: Vec<f64>,
    pub monotone_nonincreasing: bool,
    pub final_error: f64,
    pub threshold: Option<f64>,
    pub final_below_threshold: Option<bool>,
    /// Least-squares decay exponent fitted on the tail of the error table;
    /// `None` when the errors are already at noise level or the sequence
    /// is an explicit chain.
    pub fitted_exponent: Option<f64>,
}

fn shift_for(form: &HermitianForm) -> f64 {
    let m = form.lower_bound();
    if m.is_finite() {
        m
    } else {
        0.0
    }
}

fn fit_decay_exponent(errors: &[f64]) -> Option<f64> {
    let n_max = errors.len();
    let lo = (n_max / 2).max(1);
    let points: Vec<(f64, f64)> = (lo..=n_max)
        .filter(|&n| errors[n - 1] > 1e-13)
        .map(|n| ((n as f64).ln(), errors[n - 1].ln()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let len = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / len;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / len;
    let cov: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let var: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if var == 0.0 {
        return None;
    }
    Some(-(cov / var))
}

/// Tabulate `|resolvent(A_{t_n}, lambda) - resolvent(A_inf, lambda)|` for
/// `n = 1..n_max` and judge the convergence.
pub fn resolvent_convergence(
    seq: &FormSequence,
    lambda: f64,
    n_max: usize,
    threshold: Option<f64>,
    tol: &Tolerance,
) -> Result<ConvergenceReport> {
    if n_max < 3 {
        return Err(Error::BadArgument {
            context: format!("n_max must be at least 3, got {n_max}"),
        });
    }
    let limit_form = limit(seq, tol)?;
    let bound_of = |form: &HermitianForm| form.lower_bound();
    if lambda >= bound_of(&limit_form) - tol.psd_clamp {
        return Err(Error::LambdaAboveBound {
            lambda,
            bound: bound_of(&limit_form),
        });
    }
    let a_inf = represent_form(&limit_form, shift_for(&limit_form).min(lambda), tol)?;
    let r_inf = resolvent(&a_inf, lambda, tol)?;
    let mut errors = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let t_n = seq.term(n);
        let m_n = bound_of(&t_n);
        if lambda >= m_n - tol.psd_clamp {
            return Err(Error::LambdaAboveBound { lambda, bound: m_n });
        }
        let a_n = represent_form(&t_n, shift_for(&t_n).min(lambda), tol)?;
        let r_n = resolvent(&a_n, lambda, tol)?;
        errors.push(mat_dist(&r_n, &r_inf));
    }
    let monotone_nonincreasing = errors.windows(2).all(|w| w[1] <= w[0] + tol.eq_abs);
    let final_error = *errors.last().expect("n_max >= 3");
    let fitted_exponent = match seq {
        FormSequence::Affine { .. } => fit_decay_exponent(&errors),
        FormSequence::Chain { .. } => None,
    };
    Ok(ConvergenceReport {
        lambda,
        errors,
        monotone_nonincreasing,
        final_error,
        threshold,
        final_below_threshold: threshold.map(|th| final_error <= th),
        fitted_exponent,
    })
}

/// Connection between the nonincreasing limit form and the limit of the
/// associated selfadjoint relations.
#[derive(Debug, Clone)]
pub struct LimitConnection {
    /// Pointwise limit of the sequence.
    pub limit: HermitianForm,
    /// Form of the resolvent-limit relation `A_inf`.
    pub t_inf: HermitianForm,
    /// `clos (limit_reg) = t_inf`.
    pub reg_closure_matches: bool,
    /// Closability reading: `limit` is a restriction of `t_inf`.
    pub closable_included: bool,
    /// Closedness reading: `limit = t_inf`.
    pub closed_equal: bool,
    /// Degenerate singularity reading: the limit form vanishes exactly when
    /// the operator part of `A_inf` vanishes.
    pub singular_iff: bool,
}

/// For a nonincreasing sequence of closed forms, detect the resolvent limit
/// of `A_{t_n}`, rebuild `A_inf` from the stabilized resolvent, and verify
/// the limit form/limit relation identities.
pub fn limit_relation_connection(seq: &FormSequence, tol: &Tolerance) -> Result<LimitConnection> {
    if seq.sense() != Sense::Nonincreasing {
        return Err(Error::SenseMismatch {
            expected: "nonincreasing",
        });
    }
    let limit_form = limit_nonincreasing(seq, tol)?;
    let mut c = limit_form.lower_bound();
    if let FormSequence::Chain { forms, .. } = seq {
        for f in forms {
            c = c.min(f.lower_bound());
        }
    }
    let c = if c.is_finite() { c } else { 0.0 };
    let lambda = c - 1.0;

    let r_limit = match seq {
        FormSequence::Affine { .. } => {
            // the family's limit is closed-form; its relation is the limit
            let a = represent_form(&limit_form, c.min(lambda), tol)?;
            resolvent(&a, lambda, tol)?
        }
        FormSequence::Chain { forms, .. } => {
            let mut previous: Option<CMatrix> = None;
            let mut stabilized = None;
            for f in forms {
                let a = represent_form(f, shift_for(f).min(lambda), tol)?;
                let r = resolvent(&a, lambda, tol)?;
                if let Some(p) = previous {
                    if mat_dist(&p, &r) <= tol.eq_abs {
                        stabilized = Some(r.clone());
                        break;
                    }
                }
                previous = Some(r);
            }
            stabilized.ok_or(Error::NoStabilization { len: forms.len() })?
        }
    };

    // recover A_inf from its resolvent: A = {(R y, y + lambda R y)}
    let n = seq.ambient();
    let mut cols = CMatrix::zeros(2 * n, n);
    cols.view_mut((0, 0), (n, n)).copy_from(&r_limit);
    cols.view_mut((n, 0), (n, n))
        .copy_from(&(CMatrix::identity(n, n) + r_limit.scale(lambda)));
    let graph = orthonormalize(&cols.map(|z| z * re(1.0)), tol)?;
    let a_inf = SelfadjointRelation::from_relation(
        crate::relation::LinearRelation::from_graph(n, n, graph)?,
        tol,
    )?;
    let t_inf = form_from_relation(&a_inf, c.min(a_inf.lower_bound()), tol)?;

    // clos (limit_reg) = limit at finite dimension
    let reg =
        crate::decomp::lebesgue_decomposition(&limit_form, c.min(limit_form.lower_bound()), tol)?
            .t1
            .closure(tol);
    let reg_closure_matches = reg.approx_eq(&t_inf, tol);
    let closable_included = t_inf.domain().contains(limit_form.domain(), tol)
        && t_inf
            .restrict(limit_form.domain(), tol)
            .map(|r| r.approx_eq(&limit_form, tol))
            .unwrap_or(false);
    let closed_equal = limit_form.approx_eq(&t_inf, tol);
    let limit_singular = limit_form.classify(tol).singular;
    let relation_part_zero = crate::numeric::max_abs(a_inf.operator_part()) <= tol.eq_abs;
    Ok(LimitConnection {
        limit: limit_form,
        t_inf,
        reg_closure_matches,
        closable_included,
        closed_equal,
        singular_iff: limit_singular == relation_part_zero,
    })
}
