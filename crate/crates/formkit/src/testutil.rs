//! Deterministic random generators for tests and property suites.
//!
//! A tiny SplitMix64 keeps fixtures reproducible across platforms without
//! pulling in an RNG dependency. Not part of the stable API; enabled for
//! the crate's own tests and for downstream test suites via the `testing`
//! feature.

use crate::form::HermitianForm;
use crate::numeric::{re, CMatrix, Scalar, Subspace, Tolerance};
use crate::relation::LinearRelation;

pub struct TestRng(u64);

pub fn frozen_rng(seed: u64) -> TestRng {
    TestRng(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1))
}

impl TestRng {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [-1, 1).
    pub fn sym(&mut self) -> f64 {
        2.0 * self.unit() - 1.0
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo) as u64) as usize
    }

    pub fn scalar(&mut self) -> Scalar {
        Scalar::new(self.sym(), self.sym())
    }
}

pub fn random_matrix(rng: &mut TestRng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| rng.scalar())
}

pub fn random_hermitian(rng: &mut TestRng, d: usize) -> CMatrix {
    let g = random_matrix(rng, d, d);
    (&g + g.adjoint()).scale(0.5)
}

pub fn random_psd(rng: &mut TestRng, d: usize) -> CMatrix {
    let g = random_matrix(rng, d, d);
    g.adjoint() * &g
}

pub fn random_unitary(rng: &mut TestRng, d: usize) -> CMatrix {
    if d == 0 {
        return CMatrix::zeros(0, 0);
    }
    let tol = Tolerance::default();
    loop {
        let g = random_matrix(rng, d, d);
        let s = crate::numeric::orthonormalize(&g, &tol).expect("finite");
        if s.dim() == d {
            return s.basis().clone();
        }
    }
}

pub fn random_subspace(rng: &mut TestRng, ambient: usize, dim: usize) -> Subspace {
    assert!(dim <= ambient);
    let u = random_unitary(rng, ambient);
    let tol = Tolerance::default();
    Subspace::from_orthonormal(u.columns(0, dim).into_owned(), &tol).expect("orthonormal")
}

/// Hermitian contraction with eigenvalues drawn uniformly from [0, 1].
pub fn random_contraction(rng: &mut TestRng, d: usize) -> CMatrix {
    let v = random_unitary(rng, d);
    let diag = CMatrix::from_fn(d, d, |i, j| if i == j { re(rng.unit()) } else { re(0.0) });
    let k = &v * diag * v.adjoint();
    (&k + k.adjoint()).scale(0.5)
}

/// Orthogonal projection of the given rank in a random orientation.
pub fn random_projection(rng: &mut TestRng, d: usize, rank: usize) -> CMatrix {
    assert!(rank <= d);
    let v = random_unitary(rng, d);
    let diag = CMatrix::from_fn(
        d,
        d,
        |i, j| {
            if i == j && i < rank {
                re(1.0)
            } else {
                re(0.0)
            }
        },
    );
    let p = &v * diag * v.adjoint();
    (&p + p.adjoint()).scale(0.5)
}

/// Hermitian form with a random proper domain of the given dimension.
pub fn random_form(rng: &mut TestRng, ambient: usize, dom_dim: usize) -> HermitianForm {
    let domain = random_subspace(rng, ambient, dom_dim);
    let matrix = random_hermitian(rng, dom_dim);
    HermitianForm::new(domain, matrix, &Tolerance::default()).expect("valid form")
}

/// Nonnegative form with a random proper domain.
pub fn random_nonneg_form(rng: &mut TestRng, ambient: usize, dom_dim: usize) -> HermitianForm {
    let domain = random_subspace(rng, ambient, dom_dim);
    let matrix = random_psd(rng, dom_dim);
    HermitianForm::new(domain, matrix, &Tolerance::default()).expect("valid form")
}

/// The running fixture: the form `[2]` on `span{e1}` inside `C^2`.
pub fn f1_form() -> HermitianForm {
    HermitianForm::new(
        Subspace::coordinate(2, &[0]),
        CMatrix::from_element(1, 1, re(2.0)),
        &Tolerance::default(),
    )
    .expect("valid fixture")
}

/// Relation with a random graph subspace of the given dimension.
pub fn random_relation(
    rng: &mut TestRng,
    dim_h: usize,
    dim_k: usize,
    graph_dim: usize,
) -> LinearRelation {
    let graph = random_subspace(rng, dim_h + dim_k, graph_dim);
    LinearRelation::from_graph(dim_h, dim_k, graph).expect("consistent dims")
}
