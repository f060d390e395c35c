//! Problem containers: smooth vector maps with derivatives, the convex
//! vector problem `min f(x) s.t. g(x) <= 0 w.r.t. cones C and D`, and the
//! seeded validation checks run before any solve.

use crate::cone::PolyCone;
use crate::error::CvopError;
use crate::Result;
use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::sync::Arc;

/// A smooth map `R^n -> R^k` with first and weighted second derivatives.
/// Finite-difference fallbacks keep hand-written impls optional.
pub trait VectorMap: Send + Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn eval(&self, x: &DVector<f64>) -> DVector<f64>;

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let (n, k) = (self.dim_in(), self.dim_out());
        let mut j = DMatrix::zeros(k, n);
        let mut xp = x.clone();
        for c in 0..n {
            let h = 1e-6 * (1.0 + x[c].abs());
            xp[c] = x[c] + h;
            let fp = self.eval(&xp);
            xp[c] = x[c] - h;
            let fm = self.eval(&xp);
            xp[c] = x[c];
            for r in 0..k {
                j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        j
    }

    /// Hessian of `w . f` at `x`. Components with zero weight must not
    /// contribute, even if their own derivatives blow up.
    fn weighted_hessian(&self, x: &DVector<f64>, w: &DVector<f64>) -> DMatrix<f64> {
        fd_weighted_hessian(self, x, w)
    }
}

/// `sum_i w_i * grad f_i(x)` skipping zero weights, so that components the
/// weight ignores cannot poison the sum with overflow.
pub fn weighted_gradient<M: VectorMap + ?Sized>(
    map: &M,
    x: &DVector<f64>,
    w: &DVector<f64>,
) -> DVector<f64> {
    let j = map.jacobian(x);
    let mut g = DVector::zeros(map.dim_in());
    for i in 0..map.dim_out() {
        if w[i] != 0.0 {
            g += j.row(i).transpose() * w[i];
        }
    }
    g
}

/// `w . fx` skipping zero weights.
pub fn weighted_value(fx: &DVector<f64>, w: &DVector<f64>) -> f64 {
    let mut v = 0.0;
    for i in 0..fx.len() {
        if w[i] != 0.0 {
            v += w[i] * fx[i];
        }
    }
    v
}

type EvalFn = dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync;
type JacFn = dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync;
type WHessFn = dyn Fn(&DVector<f64>, &DVector<f64>) -> DMatrix<f64> + Send + Sync;

/// Closure-backed map; analytic derivatives are optional.
pub struct FnMap {
    dim_in: usize,
    dim_out: usize,
    eval_fn: Box<EvalFn>,
    jac_fn: Option<Box<JacFn>>,
    whess_fn: Option<Box<WHessFn>>,
}

impl FnMap {
    pub fn new(
        dim_in: usize,
        dim_out: usize,
        eval_fn: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        FnMap {
            dim_in,
            dim_out,
            eval_fn: Box::new(eval_fn),
            jac_fn: None,
            whess_fn: None,
        }
    }

    pub fn with_jacobian(
        mut self,
        jac: impl Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        self.jac_fn = Some(Box::new(jac));
        self
    }

    pub fn with_weighted_hessian(
        mut self,
        whess: impl Fn(&DVector<f64>, &DVector<f64>) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        self.whess_fn = Some(Box::new(whess));
        self
    }
}

impl VectorMap for FnMap {
    fn dim_in(&self) -> usize {
        self.dim_in
    }

    fn dim_out(&self) -> usize {
        self.dim_out
    }

    fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.eval_fn)(x)
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        match &self.jac_fn {
            Some(j) => j(x),
            None => fd_jacobian(self, x),
        }
    }

    fn weighted_hessian(&self, x: &DVector<f64>, w: &DVector<f64>) -> DMatrix<f64> {
        match &self.whess_fn {
            Some(h) => h(x, w),
            None => fd_weighted_hessian(self, x, w),
        }
    }
}

fn fd_jacobian<M: VectorMap + ?Sized>(map: &M, x: &DVector<f64>) -> DMatrix<f64> {
    struct Raw<'a, M: ?Sized>(&'a M);
    impl<M: VectorMap + ?Sized> VectorMap for Raw<'_, M> {
        fn dim_in(&self) -> usize {
            self.0.dim_in()
        }
        fn dim_out(&self) -> usize {
            self.0.dim_out()
        }
        fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
            self.0.eval(x)
        }
    }
    Raw(map).jacobian(x)
}

fn fd_weighted_hessian<M: VectorMap + ?Sized>(
    map: &M,
    x: &DVector<f64>,
    w: &DVector<f64>,
) -> DMatrix<f64> {
    let n = map.dim_in();
    let mut h = DMatrix::zeros(n, n);
    let mut xp = x.clone();
    for c in 0..n {
        let step = 1e-5 * (1.0 + x[c].abs());
        xp[c] = x[c] + step;
        let gp = weighted_gradient(map, &xp, w);
        xp[c] = x[c] - step;
        let gm = weighted_gradient(map, &xp, w);
        xp[c] = x[c];
        for r in 0..n {
            h[(r, c)] = (gp[r] - gm[r]) / (2.0 * step);
        }
    }
    let ht = h.transpose();
    (h + ht) * 0.5
}

/// `x -> shift + mat * x`.
pub struct AffineMap {
    pub mat: DMatrix<f64>,
    pub shift: DVector<f64>,
}

impl AffineMap {
    pub fn linear(mat: DMatrix<f64>) -> Self {
        let shift = DVector::zeros(mat.nrows());
        AffineMap { mat, shift }
    }
}

impl VectorMap for AffineMap {
    fn dim_in(&self) -> usize {
        self.mat.ncols()
    }

    fn dim_out(&self) -> usize {
        self.mat.nrows()
    }

    fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.shift + &self.mat * x
    }

    fn jacobian(&self, _x: &DVector<f64>) -> DMatrix<f64> {
        self.mat.clone()
    }

    fn weighted_hessian(&self, _x: &DVector<f64>, _w: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(self.mat.ncols(), self.mat.ncols())
    }
}

/// Worst midpoint-convexity defects found by seeded sampling, scaled
/// relative to the magnitudes involved. Zero defects mean every sampled
/// midpoint passed; witnesses are the worst offending pair.
#[derive(Clone, Debug)]
pub struct ConvexityReport {
    pub pairs: usize,
    pub worst_objective_defect: f64,
    pub worst_constraint_defect: f64,
    pub objective_witness: Option<(Vec<f64>, Vec<f64>)>,
    pub constraint_witness: Option<(Vec<f64>, Vec<f64>)>,
}

/// The convex vector problem `min f(x) w.r.t. C  s.t. g(x) <= 0 w.r.t. D`,
/// with an interior direction `c` of `C` and a strictly feasible start.
#[derive(Clone)]
pub struct CvopProblem {
    pub name: String,
    pub objective: Arc<dyn VectorMap>,
    pub constraint: Option<Arc<dyn VectorMap>>,
    pub ordering: PolyCone,
    pub constraint_cone: PolyCone,
    pub direction: DVector<f64>,
    pub start: DVector<f64>,
    pub box_bounds: Option<(DVector<f64>, DVector<f64>)>,
}

impl CvopProblem {
    pub fn dim_x(&self) -> usize {
        self.objective.dim_in()
    }

    pub fn dim_y(&self) -> usize {
        self.objective.dim_out()
    }

    /// Scalar constraint rows `h_j(x) = n_j . g(x)` for the extreme
    /// directions `n_j` of the dual of `D`, followed by box rows. The
    /// feasible set is exactly `{x : all h_j(x) <= 0}`.
    pub fn constraint_normals(&self) -> Vec<DVector<f64>> {
        match &self.constraint {
            Some(_) => self.constraint_cone.normals().to_vec(),
            None => Vec::new(),
        }
    }

    pub fn scalar_constraint_count(&self) -> usize {
        let boxes = self
            .box_bounds
            .as_ref()
            .map(|(lo, hi)| {
                lo.iter().filter(|v| v.is_finite()).count()
                    + hi.iter().filter(|v| v.is_finite()).count()
            })
            .unwrap_or(0);
        self.constraint_normals().len() + boxes
    }

    /// Values of every scalar constraint at `x`; strictly negative inside.
    pub fn scalar_constraints(&self, x: &DVector<f64>) -> DVector<f64> {
        let normals = self.constraint_normals();
        let mut vals = Vec::with_capacity(self.scalar_constraint_count());
        if let Some(g) = &self.constraint {
            let gx = g.eval(x);
            for n in &normals {
                vals.push(n.dot(&gx));
            }
        }
        if let Some((lo, hi)) = &self.box_bounds {
            for i in 0..x.len() {
                if lo[i].is_finite() {
                    vals.push(lo[i] - x[i]);
                }
            }
            for i in 0..x.len() {
                if hi[i].is_finite() {
                    vals.push(x[i] - hi[i]);
                }
            }
        }
        DVector::from_vec(vals)
    }

    pub fn scalar_constraint_grads(&self, x: &DVector<f64>) -> Vec<DVector<f64>> {
        let normals = self.constraint_normals();
        let mut grads = Vec::with_capacity(self.scalar_constraint_count());
        if let Some(g) = &self.constraint {
            let j = g.jacobian(x);
            for n in &normals {
                grads.push(j.transpose() * n);
            }
        }
        if let Some((lo, hi)) = &self.box_bounds {
            let n = x.len();
            for i in 0..n {
                if lo[i].is_finite() {
                    let mut e = DVector::zeros(n);
                    e[i] = -1.0;
                    grads.push(e);
                }
            }
            for i in 0..n {
                if hi[i].is_finite() {
                    let mut e = DVector::zeros(n);
                    e[i] = 1.0;
                    grads.push(e);
                }
            }
        }
        grads
    }

    pub fn scalar_constraint_hessian(&self, x: &DVector<f64>, j: usize) -> DMatrix<f64> {
        let normals = self.constraint_normals();
        if j < normals.len() {
            let g = self.constraint.as_ref().unwrap();
            g.weighted_hessian(x, &normals[j])
        } else {
            DMatrix::zeros(self.dim_x(), self.dim_x())
        }
    }

    /// Structural and start validation: cone shapes, interior direction,
    /// strict feasibility of the start.
    pub fn validate(&self) -> Result<()> {
        let q = self.dim_y();
        if self.ordering.dim() != q {
            return Err(CvopError::DimensionMismatch {
                expected: q,
                got: self.ordering.dim(),
            });
        }
        self.ordering.validate_ordering()?;
        if let Some(g) = &self.constraint {
            if g.dim_in() != self.dim_x() {
                return Err(CvopError::DimensionMismatch {
                    expected: self.dim_x(),
                    got: g.dim_in(),
                });
            }
            if self.constraint_cone.dim() != g.dim_out() {
                return Err(CvopError::DimensionMismatch {
                    expected: g.dim_out(),
                    got: self.constraint_cone.dim(),
                });
            }
        }
        if self.direction.len() != q {
            return Err(CvopError::DimensionMismatch {
                expected: q,
                got: self.direction.len(),
            });
        }
        for n in self.ordering.normals() {
            if n.dot(&self.direction) <= 1e-12 {
                return Err(CvopError::NotInterior {
                    dir: self.direction.iter().cloned().collect(),
                });
            }
        }
        if self.start.len() != self.dim_x() {
            return Err(CvopError::DimensionMismatch {
                expected: self.dim_x(),
                got: self.start.len(),
            });
        }
        let h = self.scalar_constraints(&self.start);
        for (j, v) in h.iter().enumerate() {
            if !(*v < -1e-10) {
                return Err(CvopError::InfeasibleStart {
                    index: j,
                    value: *v,
                });
            }
        }
        Ok(())
    }

    /// Seeded derivative check: analytic Jacobians against central
    /// differences at random strictly feasible points.
    pub fn gradient_check(&self, seed: u64) -> Result<()> {
        let pts = self.sample_interior(6, seed);
        for x in &pts {
            check_map_jacobian(self.objective.as_ref(), "objective", x)?;
            if let Some(g) = &self.constraint {
                check_map_jacobian(g.as_ref(), "constraint", x)?;
            }
        }
        Ok(())
    }

    /// Seeded midpoint-convexity diagnostics. The objective defect is the
    /// distance of `(f(a)+f(b))/2 - f(mid)` to the ordering cone; the
    /// constraint defect is the worst midpoint violation of any scalar
    /// row. Reporting only; the caller decides what is fatal.
    pub fn check_convexity(&self, trials: usize, seed: u64) -> ConvexityReport {
        let pts = self.sample_interior(trials, seed.wrapping_add(7));
        let f = self.objective.as_ref();
        let cone_rays = self.ordering.generators().to_vec();
        let mut report = ConvexityReport {
            pairs: 0,
            worst_objective_defect: 0.0,
            worst_constraint_defect: 0.0,
            objective_witness: None,
            constraint_witness: None,
        };
        for (a, b) in pairs(&pts) {
            report.pairs += 1;
            let mid = (a + b) * 0.5;
            let (fa, fb, fm) = (f.eval(a), f.eval(b), f.eval(&mid));
            if [&fa, &fb, &fm].iter().all(|v| v.iter().all(|x| x.is_finite())) {
                let delta = (&fa + &fb) * 0.5 - &fm;
                let proj = crate::qp::project_to_generated_set(&[], &cone_rays, &delta, 10);
                let scale = 1.0 + delta.norm();
                let defect = proj.distance / scale;
                if defect > report.worst_objective_defect {
                    report.worst_objective_defect = defect;
                    report.objective_witness =
                        Some((a.iter().cloned().collect(), b.iter().cloned().collect()));
                }
            }
            let (ha, hb, hm) = (
                self.scalar_constraints(a),
                self.scalar_constraints(b),
                self.scalar_constraints(&mid),
            );
            for j in 0..ha.len() {
                let rhs = 0.5 * (ha[j] + hb[j]);
                let scale = 1.0 + hm[j].abs() + rhs.abs();
                let defect = (hm[j] - rhs) / scale;
                if defect > report.worst_constraint_defect {
                    report.worst_constraint_defect = defect;
                    report.constraint_witness =
                        Some((a.iter().cloned().collect(), b.iter().cloned().collect()));
                }
            }
        }
        report
    }

    /// Load gate around the diagnostics: a nonconvex feasible set makes
    /// every downstream claim unsound, so constraint defects are fatal.
    /// Objective-side defects are tolerated here; certification of any
    /// bounded value re-checks the specific scalarization at solve time.
    pub fn convexity_check(&self, seed: u64) -> Result<ConvexityReport> {
        let report = self.check_convexity(10, seed);
        if report.worst_constraint_defect > 1e-8 {
            let (x, y) = report.constraint_witness.clone().unwrap();
            return Err(CvopError::ConvexityCheck {
                defect: report.worst_constraint_defect,
                x,
                y,
            });
        }
        Ok(report)
    }

    /// Random strictly feasible points near the start, for checks and
    /// falsification. Always contains the start itself.
    pub fn sample_interior(&self, count: usize, seed: u64) -> Vec<DVector<f64>> {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut pts = vec![self.start.clone()];
        let n = self.dim_x();
        'outer: for _ in 0..count * 60 {
            if pts.len() > count {
                break;
            }
            let radius = 10.0f64.powf(rng.gen_range(-2.0..0.5));
            let x = DVector::from_fn(n, |i, _| {
                self.start[i] + radius * rng.gen_range(-1.0..1.0)
            });
            let h = self.scalar_constraints(&x);
            for v in h.iter() {
                if !(*v < -1e-8) {
                    continue 'outer;
                }
            }
            let fx = self.objective.eval(&x);
            if fx.iter().all(|v| v.is_finite()) {
                pts.push(x);
            }
        }
        pts
    }

    /// Tries to exhibit a feasible point strictly dominating `f(x_bar)`
    /// in the ordering; `None` is evidence (not proof) of weak minimality.
    pub fn falsify_weak_minimizer(
        &self,
        x_bar: &DVector<f64>,
        trials: usize,
        seed: u64,
    ) -> Option<DVector<f64>> {
        let f_bar = self.objective.eval(x_bar);
        let normals = self.ordering.normals();
        let pts = self.sample_interior(trials, seed);
        for x in &pts {
            let fx = self.objective.eval(x);
            let margin = 1e-7 * (1.0 + f_bar.norm());
            let dominates = normals.iter().all(|n| n.dot(&(&f_bar - &fx)) > margin);
            if dominates {
                return Some(x.clone());
            }
        }
        None
    }
}

fn pairs(pts: &[DVector<f64>]) -> Vec<(&DVector<f64>, &DVector<f64>)> {
    let mut out = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            out.push((&pts[i], &pts[j]));
        }
    }
    out
}

fn check_map_jacobian<M: VectorMap + ?Sized>(
    map: &M,
    which: &'static str,
    x: &DVector<f64>,
) -> Result<()> {
    let analytic = map.jacobian(x);
    let numeric = fd_jacobian(map, x);
    for r in 0..map.dim_out() {
        for c in 0..map.dim_in() {
            let (a, n) = (analytic[(r, c)], numeric[(r, c)]);
            if !n.is_finite() || !a.is_finite() {
                continue; // cannot compare across an overflow; solves skip these
            }
            let scale = 1.0 + a.abs() + n.abs();
            if (a - n).abs() > 1e-5 * scale {
                return Err(CvopError::GradientCheck {
                    map: which,
                    component: r,
                    coordinate: c,
                    analytic: a,
                    numeric: n,
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    /// f(x) = (x, exp(-x)) on all of R, ordered by the 2-D orthant.
    pub(crate) fn expon_problem() -> CvopProblem {
        let f = FnMap::new(1, 2, |x: &DVector<f64>| {
            DVector::from_vec(vec![x[0], (-x[0]).exp()])
        })
        .with_jacobian(|x: &DVector<f64>| {
            DMatrix::from_row_slice(2, 1, &[1.0, -(-x[0]).exp()])
        })
        .with_weighted_hessian(|x: &DVector<f64>, w: &DVector<f64>| {
            let mut h = DMatrix::zeros(1, 1);
            if w[1] != 0.0 {
                h[(0, 0)] = w[1] * (-x[0]).exp();
            }
            h
        });
        CvopProblem {
            name: "expon".into(),
            objective: Arc::new(f),
            constraint: None,
            ordering: PolyCone::orthant(2),
            constraint_cone: PolyCone::orthant(1),
            direction: v(&[1.0, 1.0]).normalize(),
            start: v(&[0.0]),
            box_bounds: None,
        }
    }

    #[test]
    fn affine_map_derivatives() {
        let m = AffineMap {
            mat: DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 0.0, 1.0]),
            shift: v(&[1.0, 0.0]),
        };
        let x = v(&[3.0, 4.0]);
        assert_eq!(m.eval(&x), v(&[-4.0, 4.0]));
        assert_eq!(m.jacobian(&x), m.mat);
        assert!(m.weighted_hessian(&x, &v(&[1.0, 1.0])).norm() == 0.0);
    }

    #[test]
    fn finite_difference_fallbacks_match_analytic() {
        let m = FnMap::new(2, 2, |x: &DVector<f64>| {
            DVector::from_vec(vec![x[0] * x[0] + x[1], x[0] * x[1]])
        });
        let x = v(&[0.7, -1.3]);
        let j = m.jacobian(&x);
        let expect = DMatrix::from_row_slice(2, 2, &[1.4, 1.0, -1.3, 0.7]);
        assert!((j - expect).norm() < 1e-6);

        let h = m.weighted_hessian(&x, &v(&[1.0, 2.0]));
        let expect = DMatrix::from_row_slice(2, 2, &[2.0, 2.0, 2.0, 0.0]);
        assert!((h - expect).norm() < 1e-4);
    }

    #[test]
    fn validation_accepts_good_problem() {
        let p = expon_problem();
        p.validate().unwrap();
        p.gradient_check(7).unwrap();
        p.convexity_check(7).unwrap();
    }

    #[test]
    fn gradient_check_catches_wrong_jacobian() {
        let mut p = expon_problem();
        let broken = FnMap::new(1, 2, |x: &DVector<f64>| {
            DVector::from_vec(vec![x[0], (-x[0]).exp()])
        })
        .with_jacobian(|_x: &DVector<f64>| DMatrix::from_row_slice(2, 1, &[1.0, 1.0]));
        p.objective = Arc::new(broken);
        assert!(matches!(
            p.gradient_check(7),
            Err(CvopError::GradientCheck { .. })
        ));
    }

    #[test]
    fn convexity_check_reports_concave_component() {
        let mut p = expon_problem();
        p.objective = Arc::new(FnMap::new(1, 2, |x: &DVector<f64>| {
            DVector::from_vec(vec![x[0], -x[0] * x[0]])
        }));
        let report = p.check_convexity(10, 3);
        assert!(report.worst_objective_defect > 1e-4);
        assert!(report.objective_witness.is_some());
        assert_eq!(report.worst_constraint_defect, 0.0);
        // Objective defects are diagnostic; the load gate still passes.
        assert!(p.convexity_check(3).is_ok());
    }

    #[test]
    fn convexity_check_rejects_nonconvex_feasible_set() {
        let mut p = expon_problem();
        // h(x) = x^2 - x^4 <= 0 carves the nonconvex set |x| >= 1 plus {0}.
        p.constraint = Some(Arc::new(FnMap::new(1, 1, |x: &DVector<f64>| {
            let s = x[0] * x[0];
            DVector::from_vec(vec![s - s * s])
        })));
        p.constraint_cone = PolyCone::orthant(1);
        p.start = v(&[2.0]);
        assert!(matches!(
            p.convexity_check(3),
            Err(CvopError::ConvexityCheck { .. })
        ));
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let g = FnMap::new(1, 1, |x: &DVector<f64>| DVector::from_vec(vec![-x[0]]));
        let p = CvopProblem {
            name: "halfline".into(),
            objective: Arc::new(FnMap::new(1, 2, |x: &DVector<f64>| {
                DVector::from_vec(vec![x[0], x[0]])
            })),
            constraint: Some(Arc::new(g)),
            ordering: PolyCone::orthant(2),
            constraint_cone: PolyCone::orthant(1),
            direction: v(&[1.0, 1.0]),
            start: v(&[-1.0]),
            box_bounds: None,
        };
        assert!(matches!(
            p.validate(),
            Err(CvopError::InfeasibleStart { index: 0, .. })
        ));
    }

    #[test]
    fn box_rows_enter_scalar_constraints() {
        let p = CvopProblem {
            name: "boxed".into(),
            objective: Arc::new(FnMap::new(2, 2, |x: &DVector<f64>| x.clone())),
            constraint: None,
            ordering: PolyCone::orthant(2),
            constraint_cone: PolyCone::orthant(1),
            direction: v(&[1.0, 1.0]),
            start: v(&[0.5, 0.5]),
            box_bounds: Some((v(&[0.0, f64::NEG_INFINITY]), v(&[1.0, 2.0]))),
        };
        assert_eq!(p.scalar_constraint_count(), 3);
        let h = p.scalar_constraints(&v(&[0.25, 1.0]));
        assert_eq!(h, v(&[-0.25, -0.75, -1.0]));
        let grads = p.scalar_constraint_grads(&v(&[0.25, 1.0]));
        assert_eq!(grads[0], v(&[-1.0, 0.0]));
        assert_eq!(grads[1], v(&[1.0, 0.0]));
        assert_eq!(grads[2], v(&[0.0, 1.0]));
        p.validate().unwrap();
    }

    #[test]
    fn falsification_finds_dominating_point() {
        // f = identity on the square [-1,1]^2: the center is far from
        // weakly minimal, the lower-left corner region is minimal.
        let p = CvopProblem {
            name: "square".into(),
            objective: Arc::new(FnMap::new(2, 2, |x: &DVector<f64>| x.clone())),
            constraint: None,
            ordering: PolyCone::orthant(2),
            constraint_cone: PolyCone::orthant(1),
            direction: v(&[1.0, 1.0]),
            start: v(&[0.0, 0.0]),
            box_bounds: Some((v(&[-1.0, -1.0]), v(&[1.0, 1.0]))),
        };
        assert!(p.falsify_weak_minimizer(&v(&[0.5, 0.5]), 200, 11).is_some());
        assert!(p
            .falsify_weak_minimizer(&v(&[-1.0 + 1e-6, -1.0 + 1e-6]), 200, 11)
            .is_none());
    }
}
