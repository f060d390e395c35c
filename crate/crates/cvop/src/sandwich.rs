//! Certified inner/outer polyhedral sandwich of the upper image.
//!
//! Each bounded weighted solve yields a weak minimizer and a supporting
//! halfspace of the image upper set. The convex hull of achieved image
//! points plus the recession cone sits inside the set; the intersection
//! of supporting halfspaces contains it. For plane images the gap is
//! measured at every outer vertex and a bisecting weight is inserted
//! where it exceeds the target, until the sandwich is certified or the
//! weight budget runs out. A divergent solve along the way means the
//! chosen recession cone was too wide and the run aborts.

use crate::classify::angle_between;
use crate::cone::{weight_base, PolyCone};
use crate::config::{SolverConfig, DEFAULT_EPS, DEFAULT_WEIGHT_BUDGET};
use crate::dd;
use crate::error::CvopError;
use crate::problem::CvopProblem;
use crate::solver::{distance_to_upper_image, solve_weighted, ScalarStatus, ScalarVerdict};
use crate::upper_set::{Distance, UpperSet};
use crate::Result;
use nalgebra::DVector;
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct SandwichConfig {
    pub eps: f64,
    pub budget: usize,
    pub solver: SolverConfig,
}

impl Default for SandwichConfig {
    fn default() -> Self {
        SandwichConfig {
            eps: DEFAULT_EPS,
            budget: DEFAULT_WEIGHT_BUDGET,
            solver: SolverConfig::default(),
        }
    }
}

/// A finite weak solution with its two-sided polyhedral bound.
#[derive(Clone, Debug)]
pub struct SandwichResult {
    pub weak_minimizers: Vec<DVector<f64>>,
    /// conv(images) + K: always inside the upper image.
    pub inner: UpperSet,
    /// Intersection of the supporting halfspaces: always contains it.
    pub outer: UpperSet,
    pub k_used: PolyCone,
    pub direction: DVector<f64>,
    pub eps_requested: f64,
    /// max over outer vertices of the distance to inner, divided by |c|.
    pub eps_certified: f64,
    pub certified: bool,
    /// (weight, certified support value) per scalarization, in solve order.
    pub weight_log: Vec<(DVector<f64>, f64)>,
}

impl SandwichResult {
    /// The shifted-inner form of the outer bound: conv(images) + K
    /// translated by -eps_certified * c contains the upper image.
    pub fn shifted_outer(&self) -> Result<UpperSet> {
        let shift = &self.direction * self.eps_certified;
        let pts: Vec<DVector<f64>> = self
            .inner
            .points()
            .iter()
            .map(|p| p - &shift)
            .collect();
        UpperSet::new(&pts, self.k_used.clone(), self.k_used.clone())
    }
}

/// Distance trace along `y_bar + n * k_bar`: growing without bound when
/// `k_bar` leaves the true recession cone, settling when it does not.
#[derive(Clone, Debug)]
pub struct DivergenceTrace {
    pub y_bar: DVector<f64>,
    pub k_bar: DVector<f64>,
    pub distances: Vec<(usize, f64)>,
}

#[derive(Clone, Debug)]
pub enum DivergenceOutcome {
    Diverging(DivergenceTrace),
    Contradiction { trace: DivergenceTrace, reason: String },
}

fn solve_batch(
    problem: &CvopProblem,
    weights: &[DVector<f64>],
    config: &SolverConfig,
) -> Result<Vec<ScalarVerdict>> {
    let verdicts: Vec<ScalarVerdict> = weights
        .par_iter()
        .map(|w| solve_weighted(problem, w, config))
        .collect::<Result<Vec<_>>>()?;
    for v in &verdicts {
        match v.status {
            ScalarStatus::Bounded => {}
            ScalarStatus::Divergent => {
                return Err(CvopError::MisclassifiedDivergent {
                    weight: v.weight.iter().cloned().collect(),
                    ray: v
                        .ray
                        .as_ref()
                        .map(|r| r.iter().cloned().collect())
                        .unwrap_or_default(),
                })
            }
            ScalarStatus::MaxIterations => return Err(CvopError::MaxIterations),
        }
    }
    Ok(verdicts)
}

fn push_minimizer(xs: &mut Vec<DVector<f64>>, x: &DVector<f64>) {
    if !xs.iter().any(|p| (p - x).norm() <= 1e-9 * (1.0 + x.norm())) {
        xs.push(x.clone());
    }
}

/// Intersection of the supporting halfspaces `{y : w . y >= gamma_w}` of
/// the solved weights, as an upper set over the dual of their conic hull.
pub fn initial_outer(
    problem: &CvopProblem,
    weights: &[DVector<f64>],
    config: &SolverConfig,
) -> Result<UpperSet> {
    if weights.is_empty() {
        return Err(CvopError::EmptyWeightBase);
    }
    let verdicts = solve_batch(problem, weights, config)?;
    let rows: Vec<(DVector<f64>, f64)> = verdicts
        .iter()
        .map(|v| (v.weight.clone(), v.value.unwrap() - v.bound_gap))
        .collect();
    outer_from_rows(problem.dim_y(), &rows, &problem.ordering)
}

fn outer_from_rows(
    q: usize,
    rows: &[(DVector<f64>, f64)],
    cone: &PolyCone,
) -> Result<UpperSet> {
    let poly = dd::polyhedron_vertices(q, rows);
    if poly.is_empty() {
        return Err(CvopError::EmptySet);
    }
    let normals: Vec<DVector<f64>> = rows.iter().map(|(w, _)| w.clone()).collect();
    let rec = PolyCone::from_normals(q, &normals)?;
    UpperSet::new(&poly.vertices, rec, cone.clone())
}

/// Computes a finite weak eps-solution of the problem with respect to the
/// cone `k` (the ordering cone for bounded problems, the recession-cone
/// estimate for self-bounded ones) together with certified inner and
/// outer approximations of the image upper set.
pub fn sandwich_solve(
    problem: &CvopProblem,
    k: &PolyCone,
    config: &SandwichConfig,
) -> Result<SandwichResult> {
    problem.validate()?;
    if !(config.eps.is_finite() && config.eps > 0.0) {
        return Err(CvopError::InvalidProblem(format!(
            "approximation tolerance must be positive, got {}",
            config.eps
        )));
    }
    let q = problem.dim_y();
    if k.dim() != q {
        return Err(CvopError::DimensionMismatch {
            expected: q,
            got: k.dim(),
        });
    }
    if !problem.ordering.subset_of(k, 1e-9) {
        return Err(CvopError::InvalidProblem(
            "the approximation cone must contain the ordering cone".into(),
        ));
    }
    match q {
        2 => sandwich_adaptive(problem, k, config),
        3 => sandwich_fixed_grid(problem, k, config),
        _ => Err(CvopError::Unsupported {
            what: "sandwich approximation",
            dim: q,
            supported: "q <= 3",
        }),
    }
}

struct SandwichState {
    xs: Vec<DVector<f64>>,
    rows: Vec<(DVector<f64>, f64)>,
    log: Vec<(DVector<f64>, f64)>,
}

impl SandwichState {
    fn absorb(&mut self, verdicts: Vec<ScalarVerdict>) {
        for v in verdicts {
            let x = v.argmin.unwrap();
            let gamma = v.value.unwrap() - v.bound_gap;
            push_minimizer(&mut self.xs, &x);
            self.rows.push((v.weight.clone(), gamma));
            self.log.push((v.weight, gamma));
        }
    }
}

fn finish(
    problem: &CvopProblem,
    k: &PolyCone,
    config: &SandwichConfig,
    state: SandwichState,
    eps_certified: f64,
    certified: bool,
) -> Result<SandwichResult> {
    let images: Vec<DVector<f64>> = state
        .xs
        .iter()
        .map(|x| problem.objective.eval(x))
        .collect();
    let inner = UpperSet::new(&images, k.clone(), k.clone())?;
    let outer = outer_from_rows(problem.dim_y(), &state.rows, k)?;
    Ok(SandwichResult {
        weak_minimizers: state.xs,
        inner,
        outer,
        k_used: k.clone(),
        direction: problem.direction.clone(),
        eps_requested: config.eps,
        eps_certified,
        certified,
        weight_log: state.log,
    })
}

/// Max distance from any outer vertex to the inner set; the vertex gap is
/// exactly the one-sided Hausdorff excess of outer over inner because the
/// distance function is convex and both sets share a recession cone.
fn vertex_gaps(
    q: usize,
    rows: &[(DVector<f64>, f64)],
    inner: &UpperSet,
) -> Result<Vec<(DVector<f64>, f64)>> {
    let poly = dd::polyhedron_vertices(q, rows);
    let mut out = Vec::with_capacity(poly.vertices.len());
    for v in poly.vertices {
        let report = inner.point_distance(&v)?;
        match report.value {
            Distance::Finite(d) => out.push((v, d)),
            Distance::Infinite => {
                return Err(CvopError::InvalidProblem(
                    "outer vertex at infinite distance from inner set".into(),
                ))
            }
        }
    }
    Ok(out)
}

fn sandwich_adaptive(
    problem: &CvopProblem,
    k: &PolyCone,
    config: &SandwichConfig,
) -> Result<SandwichResult> {
    let c = &problem.direction;
    let cnorm = c.norm();
    let kplus = k.dual();
    let base = weight_base(&kplus, c, 2)?;
    let mut state = SandwichState {
        xs: Vec::new(),
        rows: Vec::new(),
        log: Vec::new(),
    };
    state.absorb(solve_batch(problem, &base.weights, &config.solver)?);

    loop {
        let images: Vec<DVector<f64>> = state
            .xs
            .iter()
            .map(|x| problem.objective.eval(x))
            .collect();
        let inner = UpperSet::new(&images, k.clone(), k.clone())?;
        let gaps = vertex_gaps(2, &state.rows, &inner)?;
        let worst = gaps.iter().map(|(_, d)| *d).fold(0.0, f64::max);
        if worst <= config.eps * cnorm {
            return finish(problem, k, config, state, worst / cnorm, true);
        }
        let mut inserts: Vec<DVector<f64>> = Vec::new();
        for (v, d) in &gaps {
            if *d <= config.eps * cnorm {
                continue;
            }
            // Halfspaces active at this vertex, in angular order; the
            // bisector of an adjacent pair refines the fan between them.
            let mut active: Vec<&DVector<f64>> = state
                .rows
                .iter()
                .filter(|(w, g)| (w.dot(v) - g).abs() <= 1e-7 * (1.0 + g.abs() + v.norm()))
                .map(|(w, _)| w)
                .collect();
            active.sort_by(|a, b| {
                a[1].atan2(a[0]).partial_cmp(&b[1].atan2(b[0])).unwrap()
            });
            for pair in active.windows(2) {
                let sum = pair[0] + pair[1];
                let scale = sum.dot(c);
                if scale <= 1e-12 {
                    continue;
                }
                let cand = sum / scale;
                let fresh = state
                    .rows
                    .iter()
                    .map(|(w, _)| w)
                    .chain(inserts.iter())
                    .all(|w| angle_between(w, &cand) > 1e-10);
                if fresh {
                    inserts.push(cand);
                    break;
                }
            }
        }
        let room = config.budget.saturating_sub(state.rows.len());
        inserts.truncate(room);
        if inserts.is_empty() {
            // Either the budget is exhausted or no refining weight exists:
            // report the best effort without a certificate.
            return finish(problem, k, config, state, worst / cnorm, false);
        }
        state.absorb(solve_batch(problem, &inserts, &config.solver)?);
    }
}

fn sandwich_fixed_grid(
    problem: &CvopProblem,
    k: &PolyCone,
    config: &SandwichConfig,
) -> Result<SandwichResult> {
    let c = &problem.direction;
    let cnorm = c.norm();
    let kplus = k.dual();
    let base = weight_base(&kplus, c, config.budget)?;
    let mut weights = base.weights;
    weights.truncate(config.budget);
    let mut state = SandwichState {
        xs: Vec::new(),
        rows: Vec::new(),
        log: Vec::new(),
    };
    state.absorb(solve_batch(problem, &weights, &config.solver)?);
    let images: Vec<DVector<f64>> = state
        .xs
        .iter()
        .map(|x| problem.objective.eval(x))
        .collect();
    let inner = UpperSet::new(&images, k.clone(), k.clone())?;
    let gaps = vertex_gaps(3, &state.rows, &inner)?;
    let worst = gaps.iter().map(|(_, d)| *d).fold(0.0, f64::max);
    let eps_certified = worst / cnorm;
    let certified = eps_certified <= config.eps;
    finish(problem, k, config, state, eps_certified, certified)
}

/// Walks `y_bar + n * k_bar` outward and measures the distance to the
/// image upper set at each step. Unbounded growth demonstrates that no
/// polyhedral set with `k_bar` in its recession cone can stay within any
/// finite Hausdorff distance of the image; stabilizing distances instead
/// contradict the premise that `k_bar` leaves the recession cone.
pub fn divergence_demo(
    problem: &CvopProblem,
    k: &PolyCone,
    y_bar: &DVector<f64>,
    k_bar: &DVector<f64>,
    n_max: usize,
    config: &SolverConfig,
) -> Result<DivergenceOutcome> {
    problem.validate()?;
    let q = problem.dim_y();
    if y_bar.len() != q || k_bar.len() != q {
        return Err(CvopError::DimensionMismatch {
            expected: q,
            got: y_bar.len().max(k_bar.len()),
        });
    }
    if !k_bar.iter().all(|v| v.is_finite()) || k_bar.norm() <= 1e-12 {
        return Err(CvopError::BadVector(k_bar.iter().cloned().collect()));
    }
    if !k.contains(k_bar, 1e-7) {
        return Err(CvopError::InvalidProblem(
            "the walk direction must belong to the candidate recession cone".into(),
        ));
    }
    if n_max < 2 {
        return Err(CvopError::InvalidProblem(
            "the divergence walk needs at least two steps".into(),
        ));
    }
    // The demonstration presumes y_bar + K covers the image; spot-check
    // it on sampled feasible points so a bad anchor fails loudly.
    for x in problem.sample_interior(50, 0xD1F5) {
        let d = problem.objective.eval(&x) - y_bar;
        if !k.contains(&d, 1e-6) {
            return Err(CvopError::InvalidProblem(format!(
                "sampled image point {:?} escapes y_bar + K",
                d.iter().collect::<Vec<_>>()
            )));
        }
    }
    let distances: Vec<(usize, f64)> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let y = y_bar + k_bar * n as f64;
            distance_to_upper_image(problem, &y, config).map(|r| match r.value {
                Distance::Finite(d) => (n, d),
                Distance::Infinite => (n, f64::INFINITY),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let trace = DivergenceTrace {
        y_bar: y_bar.clone(),
        k_bar: k_bar.clone(),
        distances,
    };
    let d = &trace.distances;
    let d1 = d[0].1;
    let dlast = d[d.len() - 1].1;
    let tail_len = (d.len() / 5).clamp(2, 20);
    let tail = &d[d.len() - tail_len..];
    let tail_increasing = tail.windows(2).all(|p| p[1].1 > p[0].1 + 1e-12);
    let grew = dlast > 10.0 * d1.max(1e-6);
    if grew && tail_increasing {
        Ok(DivergenceOutcome::Diverging(trace))
    } else {
        let reason = if !grew {
            format!(
                "distance stabilized: d_1 = {d1:.6e}, d_{} = {dlast:.6e}; the walk direction \
                 appears to be a recession direction of the image",
                d.len()
            )
        } else {
            "distances are not increasing toward the end of the walk".into()
        };
        Ok(DivergenceOutcome::Contradiction { trace, reason })
    }
}
