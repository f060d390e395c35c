//! Active-set solver for nonnegative quadratic programs.
//!
//! Solves `min 1/2 x'Qx - c'x` subject to `x >= 0` and optionally
//! `sum(x[0..simplex_len]) == 1` over a leading block of variables.
//! This single form covers every projection the set calculus needs:
//! membership of a point in `cone{rays}`, projection onto
//! `conv(points) + cone(rays)`, and min-norm points of convex hulls.
//!
//! The working set walks bound constraints in the classic nonnegative
//! least-squares fashion; equality-constrained subproblems are solved
//! through an SVD-backed KKT system so rank-deficient Gram matrices
//! (duplicate generators) cannot derail a projection.

use nalgebra::{DMatrix, DVector, SVD};

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub x: DVector<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Result of projecting a point onto `conv(points) + cone(rays)`.
#[derive(Debug, Clone)]
pub struct Projection {
    pub point: DVector<f64>,
    pub distance: f64,
    pub hull_coeffs: DVector<f64>,
    pub ray_coeffs: DVector<f64>,
    pub converged: bool,
}

pub fn solve_nonneg_qp(
    q: &DMatrix<f64>,
    c: &DVector<f64>,
    simplex_len: usize,
    max_iter: usize,
) -> QpSolution {
    let n = q.nrows();
    assert_eq!(q.ncols(), n);
    assert_eq!(c.len(), n);
    assert!(simplex_len <= n);

    let scale = 1.0 + q.amax().max(c.amax());
    let tol = 1e-12 * scale;
    let mult_tol = 1e-10 * scale;

    let mut x = DVector::zeros(n);
    let mut free = vec![false; n];

    if simplex_len > 0 {
        // Start on the vertex of the simplex block with the best objective.
        let i0 = (0..simplex_len)
            .min_by(|&a, &b| {
                let va = 0.5 * q[(a, a)] - c[a];
                let vb = 0.5 * q[(b, b)] - c[b];
                va.partial_cmp(&vb).unwrap()
            })
            .unwrap();
        free[i0] = true;
        x[i0] = 1.0;
    }

    let objective = |x: &DVector<f64>| 0.5 * (q * x).dot(x) - c.dot(x);
    let mut best_obj = objective(&x);
    let mut stall = 0usize;
    let mut iterations = 0usize;

    while iterations < max_iter {
        iterations += 1;

        // Inner feasibility loop: re-solve on the free set, clipping at the
        // bounds, until the equality-constrained solution is nonnegative.
        let mut inner = 0usize;
        loop {
            inner += 1;
            let idx: Vec<usize> = (0..n).filter(|&i| free[i]).collect();
            if idx.is_empty() {
                break;
            }
            let (xf, _nu) = solve_kkt(q, c, &idx, simplex_len);
            let min_xf = xf.iter().cloned().fold(f64::INFINITY, f64::min);
            if min_xf >= -tol {
                for (a, &i) in idx.iter().enumerate() {
                    x[i] = xf[a].max(0.0);
                }
                break;
            }
            // Step from x toward xf until the first variable hits zero.
            let mut alpha = 1.0f64;
            for (a, &i) in idx.iter().enumerate() {
                if xf[a] < -tol {
                    let denom = x[i] - xf[a];
                    if denom > tol {
                        alpha = alpha.min(x[i] / denom);
                    } else {
                        alpha = 0.0;
                    }
                }
            }
            for (a, &i) in idx.iter().enumerate() {
                x[i] += alpha * (xf[a] - x[i]);
                if xf[a] < -tol && x[i] <= tol {
                    x[i] = 0.0;
                    free[i] = false;
                }
            }
            if inner > n + 2 {
                break;
            }
        }

        // Optimality test on the fixed variables.
        let g = q * &x - c;
        let nu = if simplex_len > 0 {
            // Multiplier of the simplex equality, read off a free block var.
            (0..simplex_len)
                .filter(|&i| free[i])
                .map(|i| g[i])
                .next()
                .unwrap_or(0.0)
        } else {
            0.0
        };
        let mut best: Option<(usize, f64)> = None;
        for i in 0..n {
            if free[i] {
                continue;
            }
            let r = if i < simplex_len { g[i] - nu } else { g[i] };
            if r < -mult_tol && best.map_or(true, |(_, rb)| r < rb) {
                best = Some((i, r));
            }
        }
        match best {
            None => {
                return QpSolution {
                    x,
                    converged: true,
                    iterations,
                }
            }
            Some((i, _)) => free[i] = true,
        }

        let obj = objective(&x);
        if obj < best_obj - tol {
            best_obj = obj;
            stall = 0;
        } else {
            stall += 1;
            if stall > 4 {
                break;
            }
        }
    }

    QpSolution {
        x,
        converged: false,
        iterations,
    }
}

/// Equality-KKT solve restricted to the free index set. Returns the free
/// components and the simplex multiplier.
fn solve_kkt(
    q: &DMatrix<f64>,
    c: &DVector<f64>,
    idx: &[usize],
    simplex_len: usize,
) -> (DVector<f64>, f64) {
    let k = idx.len();
    let has_eq = simplex_len > 0 && idx.iter().any(|&i| i < simplex_len);
    let dim = k + usize::from(has_eq);
    let mut m = DMatrix::zeros(dim, dim);
    let mut rhs = DVector::zeros(dim);
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            m[(a, b)] = q[(i, j)];
        }
        rhs[a] = c[i];
        if has_eq && i < simplex_len {
            m[(a, k)] = 1.0;
            m[(k, a)] = 1.0;
        }
    }
    if has_eq {
        rhs[k] = 1.0;
    }
    let svd = SVD::new(m, true, true);
    let sol = svd
        .solve(&rhs, 1e-12)
        .unwrap_or_else(|_| DVector::zeros(dim));
    let xf = DVector::from_iterator(k, sol.iter().take(k).cloned());
    let nu = if has_eq { sol[k] } else { 0.0 };
    (xf, nu)
}

/// Projects `y` onto `conv(points) + cone(rays)`.
///
/// With `points` empty the target is the cone alone, which always contains
/// the origin. With both lists empty the target degenerates to `{0}`.
pub fn project_to_generated_set(
    points: &[DVector<f64>],
    rays: &[DVector<f64>],
    y: &DVector<f64>,
    iter_factor: usize,
) -> Projection {
    let dim = y.len();
    let np = points.len();
    let nr = rays.len();
    let ncols = np + nr;
    if ncols == 0 {
        return Projection {
            point: DVector::zeros(dim),
            distance: y.norm(),
            hull_coeffs: DVector::zeros(0),
            ray_coeffs: DVector::zeros(0),
            converged: true,
        };
    }
    let mut a = DMatrix::zeros(dim, ncols);
    for (j, p) in points.iter().enumerate() {
        a.set_column(j, p);
    }
    for (j, r) in rays.iter().enumerate() {
        a.set_column(np + j, r);
    }
    let q = a.transpose() * &a;
    let c = a.transpose() * y;
    let max_iter = iter_factor.max(1) * (ncols + 1) + 10;
    let sol = solve_nonneg_qp(&q, &c, np, max_iter);
    let point = &a * &sol.x;
    let distance = (y - &point).norm();
    Projection {
        point,
        distance,
        hull_coeffs: DVector::from_iterator(np, sol.x.iter().take(np).cloned()),
        ray_coeffs: DVector::from_iterator(nr, sol.x.iter().skip(np).cloned()),
        converged: sol.converged,
    }
}

/// Least squares with nonnegative coefficients: `min ||A u - y||, u >= 0`
/// where the columns of `A` are `columns`. Returns coefficients and residual.
pub fn nnls(columns: &[DVector<f64>], y: &DVector<f64>, iter_factor: usize) -> (DVector<f64>, f64) {
    let proj = project_to_generated_set(&[], columns, y, iter_factor);
    (proj.ray_coeffs, proj.distance)
}

/// Min-norm point of `conv(points)`; `points` must be nonempty.
pub fn min_norm_point(points: &[DVector<f64>], iter_factor: usize) -> DVector<f64> {
    assert!(!points.is_empty());
    let dim = points[0].len();
    project_to_generated_set(points, &[], &DVector::zeros(dim), iter_factor).point
}
