//! Boundedness classification by probing scalarization weights.
//!
//! The set of weights with bounded scalarizations, intersected with the
//! dual of the ordering cone, is a convex cone. Its closure dualizes to
//! the recession cone of the image upper set, so a finite angular grid of
//! weighted solves yields an inner estimate of that weight cone, an outer
//! estimate of the recession cone, and a verdict:
//!
//! * every dual extreme direction bounded - the problem is bounded;
//! * the weight cone is a proper subcone whose boundary rays are bounded
//!   (found by bisection) - unbounded but still approximable;
//! * some boundary ray of the weight-cone closure is itself divergent -
//!   the weight cone is not closed and no polyhedral outer approximation
//!   with finite gap exists;
//! * solver stalls at a decisive direction - undetermined.

use crate::cone::{weight_base, PolyCone, WeightBase};
use crate::config::{SolverConfig, DEFAULT_RESOLUTION_DEG, TOL_CONE, TOL_SET};
use crate::dd;
use crate::error::CvopError;
use crate::problem::CvopProblem;
use crate::Result;
use crate::solver::{solve_weighted, ScalarStatus, ScalarVerdict};
use nalgebra::DVector;
use rayon::prelude::*;

/// Verdict of the classification pass at a fixed angular resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundedness {
    Bounded,
    SelfBoundedUnbounded,
    NotSelfBounded,
    Undetermined,
}

impl std::fmt::Display for Boundedness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Boundedness::Bounded => "BOUNDED",
            Boundedness::SelfBoundedUnbounded => "SELF_BOUNDED_UNBOUNDED",
            Boundedness::NotSelfBounded => "NOT_SELF_BOUNDED",
            Boundedness::Undetermined => "UNDETERMINED",
        })
    }
}

/// Grid classification of unit weights in the dual of the ordering cone.
/// `cone_hull` is the conic hull of the bounded directions, the inner
/// estimate of the closed weight cone; stalled directions that fall
/// inside the hull are vouched for by convexity, the rest stay suspect.
#[derive(Clone, Debug)]
pub struct WEstimate {
    pub resolution_deg: f64,
    pub bounded_dirs: Vec<DVector<f64>>,
    pub divergent_dirs: Vec<DVector<f64>>,
    pub undetermined_dirs: Vec<DVector<f64>>,
    pub cone_hull: Option<PolyCone>,
    pub evidence: Vec<ScalarVerdict>,
}

/// One geodesic bisection between a bounded direction and a divergent
/// one. If the divergent endpoint never moved, the divergent ray itself
/// is the boundary of the weight-cone closure: the cone is not closed.
#[derive(Clone, Debug)]
pub struct BoundaryProbe {
    pub bounded_end: DVector<f64>,
    pub divergent_end: DVector<f64>,
    pub divergent_moved: bool,
    pub undetermined: bool,
    pub steps: usize,
}

#[derive(Clone, Debug)]
pub struct BoundednessReport {
    pub verdict: Boundedness,
    pub resolution_deg: f64,
    pub w_estimate: WEstimate,
    pub recc_estimate: Option<PolyCone>,
    pub anchor: Option<DVector<f64>>,
    pub probes: Vec<BoundaryProbe>,
    /// Solves performed after the grid pass: bisection and anchor weights.
    pub refinement_evidence: Vec<ScalarVerdict>,
}

#[derive(Clone, Debug)]
pub struct ClassifyConfig {
    pub resolution_deg: f64,
    pub solver: SolverConfig,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            resolution_deg: DEFAULT_RESOLUTION_DEG,
            solver: SolverConfig::default(),
        }
    }
}

pub fn angle_between(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let denom = a.norm() * b.norm();
    if denom <= 0.0 {
        return 0.0;
    }
    (a.dot(b) / denom).clamp(-1.0, 1.0).acos()
}

/// Spherical interpolation between unit vectors; stays inside any convex
/// cone containing both.
fn slerp(a: &DVector<f64>, b: &DVector<f64>, t: f64) -> DVector<f64> {
    let theta = angle_between(a, b);
    if theta < 1e-12 {
        return (a + (b - a) * t).normalize();
    }
    let s = theta.sin();
    (a * ((1.0 - t) * theta).sin() / s + b * (t * theta).sin() / s).normalize()
}

/// Unit directions covering the arc of a pointed solid plane cone at the
/// requested angular spacing, endpoints (the extreme directions) included.
fn arc_grid(cplus: &PolyCone, resolution_deg: f64) -> Result<Vec<DVector<f64>>> {
    let ext = cplus.extreme_directions()?;
    if ext.len() != 2 {
        return Err(CvopError::InvalidProblem(format!(
            "a pointed solid plane cone must have two extreme directions, found {}",
            ext.len()
        )));
    }
    let mut a0 = ext[0][1].atan2(ext[0][0]);
    let mut a1 = ext[1][1].atan2(ext[1][0]);
    if a1 < a0 {
        std::mem::swap(&mut a0, &mut a1);
    }
    let mut span = a1 - a0;
    if span > std::f64::consts::PI {
        // The cone wraps across the atan2 branch cut; take the short arc.
        span = std::f64::consts::TAU - span;
        a0 = a1;
    }
    let steps = (span.to_degrees() / resolution_deg).ceil().max(1.0) as usize;
    let mut dirs = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let ang = a0 + span * k as f64 / steps as f64;
        dirs.push(DVector::from_vec(vec![ang.cos(), ang.sin()]));
    }
    Ok(dirs)
}

/// Vertices of a subdivided icosahedron: a nearly uniform unit-sphere
/// mesh with 10 * 4^level + 2 points.
fn icosphere(level: u32) -> Vec<DVector<f64>> {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let raw: [[f64; 3]; 12] = [
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let mut verts: Vec<DVector<f64>> = raw
        .iter()
        .map(|v| DVector::from_row_slice(v).normalize())
        .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let mut cache: std::collections::HashMap<(usize, usize), usize> =
        std::collections::HashMap::new();
    for _ in 0..level {
        let mut midpoint = |i: usize, j: usize, verts: &mut Vec<DVector<f64>>| -> usize {
            let key = (i.min(j), i.max(j));
            if let Some(&k) = cache.get(&key) {
                return k;
            }
            let m = ((&verts[i] + &verts[j]) * 0.5).normalize();
            verts.push(m);
            cache.insert(key, verts.len() - 1);
            verts.len() - 1
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
        cache.clear();
    }
    verts
}

/// Angular grid over the unit sphere intersected with `cplus`, extreme
/// directions always included. Plane cones get an exact arc; in three
/// dimensions the subdivision level follows the requested resolution
/// heuristically (the level-3 mesh spacing is about eight degrees).
fn grid_dirs(cplus: &PolyCone, resolution_deg: f64) -> Result<Vec<DVector<f64>>> {
    match cplus.dim() {
        2 => arc_grid(cplus, resolution_deg),
        3 => {
            let level = (3.0 + (DEFAULT_RESOLUTION_DEG / resolution_deg).log2())
                .round()
                .clamp(0.0, 6.0) as u32;
            let mut dirs: Vec<DVector<f64>> = icosphere(level)
                .into_iter()
                .filter(|d| cplus.contains(d, TOL_CONE))
                .collect();
            dd::sort_vectors(&mut dirs);
            for e in cplus.extreme_directions()? {
                let u = e.normalize();
                if !dirs.iter().any(|d| (d - &u).norm() < 1e-9) {
                    dirs.push(u);
                }
            }
            Ok(dirs)
        }
        q => Err(CvopError::Unsupported {
            what: "weight grids",
            dim: q,
            supported: "q <= 3",
        }),
    }
}

/// One weighted solve; a failed convexity certification counts as a
/// stalled direction rather than an error so that classification can
/// report honestly instead of aborting.
fn probe_dir(
    problem: &CvopProblem,
    w: &DVector<f64>,
    config: &SolverConfig,
) -> Result<ScalarVerdict> {
    match solve_weighted(problem, w, config) {
        Err(CvopError::NotAmenable(_)) => Ok(ScalarVerdict {
            status: ScalarStatus::MaxIterations,
            weight: w.clone(),
            argmin: None,
            value: None,
            bound_gap: 0.0,
            ray: None,
            kkt_residual: 0.0,
            iterations: 0,
        }),
        other => other,
    }
}

/// Classifies every grid direction of the dual ordering cone at the given
/// angular resolution.
pub fn estimate_w(
    problem: &CvopProblem,
    resolution_deg: f64,
    config: &SolverConfig,
) -> Result<WEstimate> {
    if !(resolution_deg.is_finite() && resolution_deg > 0.0) {
        return Err(CvopError::InvalidProblem(format!(
            "angular resolution must be positive, got {resolution_deg}"
        )));
    }
    let cplus = problem.ordering.dual();
    let dirs = grid_dirs(&cplus, resolution_deg)?;
    let evidence: Vec<ScalarVerdict> = dirs
        .par_iter()
        .map(|d| probe_dir(problem, d, config))
        .collect::<Result<Vec<_>>>()?;
    let mut est = WEstimate {
        resolution_deg,
        bounded_dirs: Vec::new(),
        divergent_dirs: Vec::new(),
        undetermined_dirs: Vec::new(),
        cone_hull: None,
        evidence,
    };
    for (d, v) in dirs.iter().zip(&est.evidence) {
        match v.status {
            ScalarStatus::Bounded => est.bounded_dirs.push(d.clone()),
            ScalarStatus::Divergent => est.divergent_dirs.push(d.clone()),
            ScalarStatus::MaxIterations => est.undetermined_dirs.push(d.clone()),
        }
    }
    if !est.bounded_dirs.is_empty() {
        est.cone_hull = Some(PolyCone::from_generators(
            cplus.dim(),
            &est.bounded_dirs,
        )?);
    }
    Ok(est)
}

/// Dualizes the inner weight-cone estimate into an outer estimate of the
/// recession cone of the image upper set.
pub fn estimate_recc_p(est: &WEstimate) -> Result<PolyCone> {
    match &est.cone_hull {
        Some(hull) => Ok(hull.dual()),
        None => Err(CvopError::EmptyCone),
    }
}

/// Interior point of the intersection of the sampled support halfspaces
/// `{y : w . y <= gamma_w}`, found as a capped Chebyshev center so the
/// point sits clearly below every supporting hyperplane.
pub fn anchor_point(
    problem: &CvopProblem,
    base: &WeightBase,
    config: &SolverConfig,
) -> Result<DVector<f64>> {
    let (anchor, _) = anchor_with_evidence(problem, base, config)?;
    Ok(anchor)
}

fn anchor_with_evidence(
    problem: &CvopProblem,
    base: &WeightBase,
    config: &SolverConfig,
) -> Result<(DVector<f64>, Vec<ScalarVerdict>)> {
    let q = problem.dim_y();
    let mut evidence = Vec::with_capacity(base.weights.len());
    let mut rows: Vec<(DVector<f64>, f64)> = Vec::with_capacity(base.weights.len() + 2);
    for w in &base.weights {
        let verdict = probe_dir(problem, w, config)?;
        if verdict.status != ScalarStatus::Bounded {
            let msg = format!(
                "anchor weight {:?} did not produce a certified bounded value",
                w.iter().collect::<Vec<_>>()
            );
            evidence.push(verdict);
            return Err(CvopError::Undetermined(msg));
        }
        // Shift by the duality gap so the halfspace provably supports the
        // upper set from below.
        let gamma = verdict.value.unwrap() - verdict.bound_gap;
        let mut n = DVector::zeros(q + 1);
        for i in 0..q {
            n[i] = -w[i];
        }
        n[q] = -w.norm();
        rows.push((n, -gamma));
        evidence.push(verdict);
    }
    let mut t_low = DVector::zeros(q + 1);
    t_low[q] = 1.0;
    rows.push((t_low, 0.0));
    let mut t_high = DVector::zeros(q + 1);
    t_high[q] = -1.0;
    rows.push((t_high, -1.0));
    let poly = dd::polyhedron_vertices(q + 1, &rows);
    let best = poly
        .vertices
        .iter()
        .max_by(|a, b| a[q].partial_cmp(&b[q]).unwrap())
        .cloned();
    match best {
        Some(v) => Ok((DVector::from_fn(q, |i, _| v[i]), evidence)),
        None => Err(CvopError::EmptyAnchorPolytope),
    }
}

/// Geodesic bisection between a bounded and a divergent direction down to
/// `tol_rad`. Tracks whether the divergent endpoint ever moved inward.
fn bisect_boundary(
    problem: &CvopProblem,
    config: &SolverConfig,
    bounded0: &DVector<f64>,
    divergent0: &DVector<f64>,
    tol_rad: f64,
    evidence: &mut Vec<ScalarVerdict>,
) -> Result<BoundaryProbe> {
    let mut lo = bounded0.clone();
    let mut hi = divergent0.clone();
    let mut moved = false;
    let mut steps = 0usize;
    while angle_between(&lo, &hi) > tol_rad && steps < 64 {
        let mid = slerp(&lo, &hi, 0.5);
        let verdict = probe_dir(problem, &mid, config)?;
        let status = verdict.status;
        evidence.push(verdict);
        steps += 1;
        match status {
            ScalarStatus::Bounded => lo = mid,
            ScalarStatus::Divergent => {
                hi = mid;
                moved = true;
            }
            ScalarStatus::MaxIterations => {
                return Ok(BoundaryProbe {
                    bounded_end: lo,
                    divergent_end: hi,
                    divergent_moved: moved,
                    undetermined: true,
                    steps,
                })
            }
        }
    }
    Ok(BoundaryProbe {
        bounded_end: lo,
        divergent_end: hi,
        divergent_moved: moved,
        undetermined: false,
        steps,
    })
}

/// Full classification: grid pass, boundary bisection where the bounded
/// hull meets divergent directions, recession-cone estimate by duality,
/// and an anchor point whenever the verdict supports one.
pub fn classify(problem: &CvopProblem, config: &ClassifyConfig) -> Result<BoundednessReport> {
    problem.validate()?;
    let cplus = problem.ordering.dual();
    let extremes = cplus.extreme_directions()?;
    let est = estimate_w(problem, config.resolution_deg, &config.solver)?;
    let mut refinement = Vec::new();
    let mut report = BoundednessReport {
        verdict: Boundedness::Undetermined,
        resolution_deg: config.resolution_deg,
        w_estimate: est,
        recc_estimate: None,
        anchor: None,
        probes: Vec::new(),
        refinement_evidence: Vec::new(),
    };
    let est = &report.w_estimate;

    // Stalled directions strictly inside the bounded hull are bounded by
    // convexity of the weight cone; the rest keep the verdict honest.
    let stray_undetermined: Vec<&DVector<f64>> = est
        .undetermined_dirs
        .iter()
        .filter(|d| match &est.cone_hull {
            Some(hull) => !hull.contains(d, TOL_SET),
            None => true,
        })
        .collect();

    let extreme_status = |e: &DVector<f64>| -> Option<ScalarStatus> {
        let u = e.normalize();
        est.evidence
            .iter()
            .min_by(|a, b| {
                angle_between(&a.weight, &u)
                    .partial_cmp(&angle_between(&b.weight, &u))
                    .unwrap()
            })
            .filter(|v| angle_between(&v.weight, &u) < 1e-9)
            .map(|v| v.status)
    };

    if est.divergent_dirs.is_empty() && stray_undetermined.is_empty() {
        let all_bounded = extremes
            .iter()
            .all(|e| extreme_status(e) == Some(ScalarStatus::Bounded));
        if all_bounded {
            report.verdict = Boundedness::Bounded;
            report.recc_estimate = Some(problem.ordering.clone());
            let base = weight_base(&cplus, &problem.direction, 3)?;
            match anchor_with_evidence(problem, &base, &config.solver) {
                Ok((anchor, ev)) => {
                    report.anchor = Some(anchor);
                    refinement.extend(ev);
                }
                Err(CvopError::Undetermined(_)) | Err(CvopError::EmptyAnchorPolytope) => {
                    report.verdict = Boundedness::Undetermined;
                }
                Err(e) => return Err(e),
            }
        }
        report.refinement_evidence = refinement;
        return Ok(report);
    }

    if est.bounded_dirs.is_empty() || !stray_undetermined.is_empty() {
        // Either no weight is usable or the evidence is inconclusive at a
        // direction outside the hull.
        if est.bounded_dirs.is_empty() && !est.divergent_dirs.is_empty() {
            report.verdict = Boundedness::NotSelfBounded;
        }
        report.refinement_evidence = refinement;
        return Ok(report);
    }

    let hull = est.cone_hull.as_ref().unwrap();
    let res_rad = config.resolution_deg.to_radians();
    let tol_rad = res_rad / 64.0;
    let mut probes = Vec::new();
    for e in hull.extreme_directions()? {
        let nearest = est
            .divergent_dirs
            .iter()
            .min_by(|a, b| {
                angle_between(a, &e)
                    .partial_cmp(&angle_between(b, &e))
                    .unwrap()
            })
            .unwrap();
        if angle_between(nearest, &e) <= 1.5 * res_rad {
            probes.push(bisect_boundary(
                problem,
                &config.solver,
                &e,
                nearest,
                tol_rad,
                &mut refinement,
            )?);
        }
    }

    let any_undetermined = probes.iter().any(|p| p.undetermined);
    let any_unmoved = probes.iter().any(|p| !p.undetermined && !p.divergent_moved);
    let mut extended = est.bounded_dirs.clone();
    for p in &probes {
        if p.divergent_moved {
            extended.push(p.bounded_end.clone());
        } else {
            // The divergent ray itself is the boundary of the closure.
            extended.push(p.divergent_end.clone());
        }
    }
    let extended_hull = PolyCone::from_generators(cplus.dim(), &extended)?;
    report.probes = probes;

    if any_undetermined {
        report.verdict = Boundedness::Undetermined;
    } else if any_unmoved {
        report.verdict = Boundedness::NotSelfBounded;
        report.recc_estimate = Some(extended_hull.dual());
    } else {
        report.verdict = Boundedness::SelfBoundedUnbounded;
        report.recc_estimate = Some(extended_hull.dual());
        let base = weight_base(&extended_hull, &problem.direction, 3)?;
        match anchor_with_evidence(problem, &base, &config.solver) {
            Ok((anchor, ev)) => {
                report.anchor = Some(anchor);
                refinement.extend(ev);
            }
            Err(CvopError::Undetermined(_)) | Err(CvopError::EmptyAnchorPolytope) => {
                report.verdict = Boundedness::Undetermined;
                report.recc_estimate = None;
            }
            Err(e) => return Err(e),
        }
    }
    report.refinement_evidence = refinement;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry;

    fn deg(a: f64) -> f64 {
        a.to_radians()
    }

    fn builtin(name: &str) -> CvopProblem {
        registry::builtin(name, &serde_json::Value::Null).unwrap()
    }

    #[test]
    fn icosphere_sizes_and_unit_norms() {
        for (level, count) in [(0u32, 12usize), (1, 42), (2, 162), (3, 642)] {
            let verts = icosphere(level);
            assert_eq!(verts.len(), count);
            for v in &verts {
                assert!((v.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn arc_grid_spans_dual_cone() {
        let cplus = PolyCone::orthant(2);
        let dirs = arc_grid(&cplus, 1.0).unwrap();
        assert_eq!(dirs.len(), 91);
        assert!((&dirs[0] - DVector::from_vec(vec![1.0, 0.0])).norm() < 1e-12);
        assert!((&dirs[90] - DVector::from_vec(vec![0.0, 1.0])).norm() < 1e-12);
        for pair in dirs.windows(2) {
            let step = angle_between(&pair[0], &pair[1]);
            assert!((step - deg(1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn expon_is_not_self_bounded() {
        let p = builtin("expon");
        let report = classify(&p, &ClassifyConfig::default()).unwrap();
        assert_eq!(report.verdict, Boundedness::NotSelfBounded);
        // The horizontal ray diverges while every interior direction and
        // the vertical ray stay bounded.
        let e1 = DVector::from_vec(vec![1.0, 0.0]);
        assert!(report
            .w_estimate
            .divergent_dirs
            .iter()
            .any(|d| (d - &e1).norm() < 1e-12));
        assert_eq!(report.w_estimate.divergent_dirs.len(), 1);
        assert_eq!(report.w_estimate.undetermined_dirs.len(), 0);
        assert_eq!(report.w_estimate.bounded_dirs.len(), 90);
        // The bisection pins the closure boundary at the divergent ray.
        assert_eq!(report.probes.len(), 1);
        assert!(!report.probes[0].divergent_moved);
        // Recession estimate is the full orthant within the resolution.
        let recc = report.recc_estimate.as_ref().unwrap();
        assert!(recc.same_cone(&PolyCone::orthant(2), 1e-2));
        assert!(report.anchor.is_none());
    }

    #[test]
    fn hyperbola_is_self_bounded_unbounded() {
        let p = builtin("hyperbola");
        let report = classify(&p, &ClassifyConfig::default()).unwrap();
        assert_eq!(report.verdict, Boundedness::SelfBoundedUnbounded);
        // Both weight-cone boundary rays are bounded; the divergent
        // endpoints of both probes moved inward.
        assert_eq!(report.probes.len(), 2);
        assert!(report.probes.iter().all(|p| p.divergent_moved));
        let recc = report.recc_estimate.as_ref().unwrap();
        let orthant = PolyCone::orthant(2);
        for e in recc.extreme_directions().unwrap() {
            let best = orthant
                .extreme_directions()
                .unwrap()
                .iter()
                .map(|o| angle_between(&e, o))
                .fold(f64::INFINITY, f64::min);
            assert!(best < deg(1.0), "recession ray off by {best} rad");
        }
        assert!(recc.same_cone(&orthant, 2e-2));
        // Strictly wider than the ordering cone.
        assert!(p.ordering.subset_of(recc, TOL_CONE));
        assert!(!recc.subset_of(&p.ordering, TOL_CONE));
        let anchor = report.anchor.as_ref().unwrap();
        assert!(anchor.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn disk_is_bounded_with_admissible_anchor() {
        let p = builtin("disk");
        let report = classify(&p, &ClassifyConfig::default()).unwrap();
        assert_eq!(report.verdict, Boundedness::Bounded);
        assert!(report
            .recc_estimate
            .as_ref()
            .unwrap()
            .same_cone(&p.ordering, TOL_CONE));
        assert!(report.probes.is_empty());
        let anchor = report.anchor.as_ref().unwrap();
        // Every image point must dominate the anchor: f(x) in anchor + C.
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..10_000 {
            let ang = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = rng.gen_range(0.0..1.0f64).sqrt();
            let x = DVector::from_vec(vec![r * ang.cos(), r * ang.sin()]);
            let diff = &x - anchor;
            assert!(
                p.ordering.contains(&diff, 1e-9),
                "disk point {x:?} fails to dominate anchor {anchor:?}"
            );
        }
    }

    #[test]
    fn tilted_halfline_recession_matches_truth() {
        // f = (-x, x) over x >= 0: bounded weights are w2 >= w1 >= 0, so
        // the weight cone is closed with boundary rays at 45 and 90
        // degrees, and the image recession cone is cone{(1,0), (-1,1)}.
        let spec: registry::ProblemSpec = serde_json::from_value(serde_json::json!({
            "kind": "lvop",
            "name": "halfline_tilt",
            "params": {"P": [[-1.0], [1.0]], "A": [[1.0]], "b": [0.0]},
            "start": [1.0]
        }))
        .unwrap();
        let p = registry::load_problem(&spec, 42).unwrap();
        let report = classify(&p, &ClassifyConfig::default()).unwrap();
        assert_eq!(report.verdict, Boundedness::SelfBoundedUnbounded);
        let recc = report.recc_estimate.as_ref().unwrap();
        let truth = PolyCone::from_generators(
            2,
            &[
                DVector::from_vec(vec![1.0, 0.0]),
                DVector::from_vec(vec![-1.0, 1.0]),
            ],
        )
        .unwrap();
        for e in recc.extreme_directions().unwrap() {
            let best = truth
                .extreme_directions()
                .unwrap()
                .iter()
                .map(|t| angle_between(&e, t))
                .fold(f64::INFINITY, f64::min);
            assert!(best < deg(1.0), "recession ray off by {best} rad");
        }
        let anchor = report.anchor.as_ref().unwrap();
        // gamma = 0 for every bounded weight, so the anchor sits strictly
        // below every supporting hyperplane through the origin.
        for w in &report.refinement_evidence {
            if w.status == ScalarStatus::Bounded {
                assert!(w.weight.dot(anchor) <= 1e-9);
            }
        }
    }

    #[test]
    fn slow_logarithmic_descent_is_undetermined() {
        // w = (1,0) picks out -ln x: unbounded below but too slow to hit
        // the divergence threshold, so the solver stalls and the verdict
        // must stay undetermined.
        let f = crate::problem::FnMap::new(1, 2, |x: &DVector<f64>| {
            DVector::from_vec(vec![-x[0].ln(), x[0]])
        });
        let g = crate::problem::FnMap::new(1, 1, |x: &DVector<f64>| {
            DVector::from_vec(vec![-x[0]])
        });
        let p = CvopProblem {
            name: "slowlog".into(),
            objective: std::sync::Arc::new(f),
            constraint: Some(std::sync::Arc::new(g)),
            ordering: PolyCone::orthant(2),
            constraint_cone: PolyCone::orthant(1),
            direction: DVector::from_vec(vec![1.0, 1.0]).normalize(),
            start: DVector::from_vec(vec![2.0]),
            box_bounds: None,
        };
        let report = classify(&p, &ClassifyConfig::default()).unwrap();
        assert_eq!(report.verdict, Boundedness::Undetermined);
        assert!(!report.w_estimate.undetermined_dirs.is_empty());
        assert!(report.anchor.is_none());
    }

    #[test]
    fn duality_consistency_of_estimates() {
        let p = builtin("expon");
        let est = estimate_w(&p, 2.0, &SolverConfig::default()).unwrap();
        let recc = estimate_recc_p(&est).unwrap();
        // Dualizing back recovers the hull exactly (field swap).
        let hull = est.cone_hull.as_ref().unwrap();
        assert!(recc.dual().same_cone(hull, TOL_CONE));
        for d in &est.bounded_dirs {
            assert!(recc.dual().contains(d, TOL_CONE));
        }
    }
}
