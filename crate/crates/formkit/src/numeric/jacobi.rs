//! Jacobi decompositions for dense complex matrices.
//!
//! Both the Hermitian eigendecomposition (two-sided Jacobi) and the SVD
//! (one-sided Jacobi on columns) are built from the same closed-form 2x2
//! Hermitian diagonalization. At the dimensions this crate works with,
//! Jacobi iteration converges in a handful of sweeps and delivers
//! orthonormal factors to machine precision, including on degenerate
//! spectra, which is exactly where general-purpose bidiagonalization
//! codes get into trouble.

use super::{re, CMatrix, Scalar};

const MAX_SWEEPS: usize = 64;

/// Unitary `R = [v1 v2]` diagonalizing `[[a, g], [conj(g), b]]` with real
/// `a, b`, eigenvalues returned ascending.
fn eig2(a: f64, b: f64, g: Scalar) -> ((f64, f64), [Scalar; 4]) {
    let gn = g.norm();
    if gn == 0.0 {
        return if a <= b {
            ((a, b), [re(1.0), re(0.0), re(0.0), re(1.0)])
        } else {
            ((b, a), [re(0.0), re(1.0), re(1.0), re(0.0)])
        };
    }
    let mid = 0.5 * (a + b);
    let rad = (0.25 * (a - b) * (a - b) + gn * gn).sqrt();
    let (lo, hi) = (mid - rad, mid + rad);
    // eigenvector for `lo`: pick the formula with the larger residual term
    let v = if (lo - a).abs() > (lo - b).abs() {
        [g, re(lo - a)]
    } else {
        [re(lo - b), g.conj()]
    };
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let v1 = [v[0].unscale(norm), v[1].unscale(norm)];
    // orthogonal partner
    let v2 = [-v1[1].conj(), v1[0].conj()];
    ((lo, hi), [v1[0], v2[0], v1[1], v2[1]])
}

fn offdiag_norm(m: &CMatrix) -> f64 {
    let d = m.nrows();
    let mut total = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                total += m[(i, j)].norm_sqr();
            }
        }
    }
    total.sqrt()
}

/// Hermitian eigendecomposition by cyclic two-sided Jacobi;
/// `m = V diag(values) V*` with `values` ascending and unitary `V`.
pub(crate) fn hermitian_eig(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let d = m.nrows();
    debug_assert_eq!(d, m.ncols());
    if d == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let mut a = (m + m.adjoint()).scale(0.5);
    let mut v = CMatrix::identity(d, d);
    let scale = a
        .iter()
        .fold(0.0f64, |acc, z| acc.max(z.norm()))
        .max(1e-300);
    let stop = 1e-15 * scale * d as f64;
    for _ in 0..MAX_SWEEPS {
        if offdiag_norm(&a) <= stop {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let g = a[(p, q)];
                if g.norm() <= 1e-300 {
                    continue;
                }
                let (_, r) = eig2(a[(p, p)].re, a[(q, q)].re, g);
                // columns: apply A <- R* A R on the (p, q) plane
                for i in 0..d {
                    let (aip, aiq) = (a[(i, p)], a[(i, q)]);
                    a[(i, p)] = aip * r[0] + aiq * r[2];
                    a[(i, q)] = aip * r[1] + aiq * r[3];
                }
                for j in 0..d {
                    let (apj, aqj) = (a[(p, j)], a[(q, j)]);
                    a[(p, j)] = r[0].conj() * apj + r[2].conj() * aqj;
                    a[(q, j)] = r[1].conj() * apj + r[3].conj() * aqj;
                }
                for i in 0..d {
                    let (vip, viq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = vip * r[0] + viq * r[2];
                    v[(i, q)] = vip * r[1] + viq * r[3];
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    (values, vectors)
}

/// Thin SVD by one-sided Jacobi on columns: `m = U diag(s) V*` with
/// singular values sorted descending. Returns `min(rows, cols)` columns;
/// columns of `U` beyond the numerical rank are zero.
pub(crate) fn svd(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return (CMatrix::zeros(rows, 0), Vec::new(), CMatrix::zeros(cols, 0));
    }
    if rows < cols {
        let (u, s, v) = svd(&m.adjoint());
        return (v, s, u);
    }
    let mut work = m.clone();
    let mut v = CMatrix::identity(cols, cols);
    let scale = work.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    if scale == 0.0 {
        return (
            CMatrix::zeros(rows, k),
            vec![0.0; k],
            CMatrix::identity(cols, cols).columns(0, k).into_owned(),
        );
    }
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let cp = work.column(p);
                let cq = work.column(q);
                let app = cp.norm_squared();
                let aqq = cq.norm_squared();
                let apq = (cp.adjoint() * cq)[(0, 0)];
                if apq.norm() <= 1e-15 * (app * aqq).sqrt() || apq.norm() <= 1e-300 {
                    continue;
                }
                rotated = true;
                let (_, r) = eig2(app, aqq, apq);
                for i in 0..rows {
                    let (wip, wiq) = (work[(i, p)], work[(i, q)]);
                    work[(i, p)] = wip * r[0] + wiq * r[2];
                    work[(i, q)] = wip * r[1] + wiq * r[3];
                }
                for i in 0..cols {
                    let (vip, viq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = vip * r[0] + viq * r[2];
                    v[(i, q)] = vip * r[1] + viq * r[3];
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut norms: Vec<(usize, f64)> = (0..cols).map(|j| (j, work.column(j).norm())).collect();
    norms.sort_by(|x, y| y.1.total_cmp(&x.1));
    let mut u = CMatrix::zeros(rows, k);
    let mut s = Vec::with_capacity(k);
    let mut vs = CMatrix::zeros(cols, k);
    for (dst, &(src, sigma)) in norms.iter().take(k).enumerate() {
        s.push(sigma);
        if sigma > 0.0 {
            u.set_column(dst, &work.column(src).unscale(sigma));
        }
        vs.set_column(dst, &v.column(src));
    }
    (u, s, vs)
}
