//! Upper closed convex sets `conv(points) + rec`, the Minkowski calculus
//! on them, and the distance queries the sandwich machinery needs.
//!
//! The V-form is canonical: a set is its point base plus an attached
//! recession cone containing the ordering cone. H-form facets are a cached
//! derivative obtained by double description. The empty set is encoded as
//! an empty point base and absorbs Minkowski sums.

use crate::cone::PolyCone;
use crate::config::TOL_CONE;
use crate::dd;
use crate::error::CvopError;
use crate::qp;
use crate::Result;
use nalgebra::DVector;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::sync::OnceLock;

/// The closed halfspace `{y : normal.y >= offset}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: DVector<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distance {
    Finite(f64),
    Infinite,
}

impl Distance {
    pub fn is_finite(&self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Distance::Finite(d) => Some(*d),
            Distance::Infinite => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DistanceReport {
    pub value: Distance,
    pub witness_from: DVector<f64>,
    pub witness_to: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct UpperSet {
    dim: usize,
    points: Vec<DVector<f64>>,
    rec: PolyCone,
    cone: PolyCone,
    halfspaces: OnceLock<Vec<Halfspace>>,
}

impl UpperSet {
    /// `conv(points) + rec`, upper closed for `cone`; requires `rec` to
    /// contain the ordering cone. An empty point list is the empty set.
    pub fn new(points: &[DVector<f64>], rec: PolyCone, cone: PolyCone) -> Result<Self> {
        let dim = rec.dim();
        if cone.dim() != dim {
            return Err(CvopError::DimensionMismatch {
                expected: dim,
                got: cone.dim(),
            });
        }
        for p in points {
            if p.len() != dim {
                return Err(CvopError::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if !p.iter().all(|x| x.is_finite()) {
                return Err(CvopError::BadVector(p.iter().cloned().collect()));
            }
        }
        if !cone.subset_of(&rec, TOL_CONE) {
            return Err(CvopError::InvalidProblem(
                "recession cone must contain the ordering cone".into(),
            ));
        }
        let points = prune_points(points, &rec);
        Ok(UpperSet {
            dim,
            points,
            rec,
            cone,
            halfspaces: OnceLock::new(),
        })
    }

    pub fn empty(cone: PolyCone) -> Self {
        UpperSet {
            dim: cone.dim(),
            points: Vec::new(),
            rec: cone.clone(),
            cone,
            halfspaces: OnceLock::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    pub fn ordering_cone(&self) -> &PolyCone {
        &self.cone
    }

    pub fn recession_cone(&self) -> Result<&PolyCone> {
        if self.is_empty() {
            return Err(CvopError::EmptySet);
        }
        Ok(&self.rec)
    }

    /// Irredundant facets `{y : n.y >= b}`; empty for the empty set.
    pub fn halfspaces(&self) -> &[Halfspace] {
        self.halfspaces.get_or_init(|| {
            if self.is_empty() {
                return Vec::new();
            }
            dd::polyhedron_facets(self.dim, &self.points, self.rec.generators())
                .into_iter()
                .map(|(normal, offset)| Halfspace { normal, offset })
                .collect()
        })
    }

    /// Membership through the generator form (projection distance).
    pub fn contains(&self, y: &DVector<f64>, tol: f64) -> bool {
        if self.is_empty() {
            return false;
        }
        let proj = qp::project_to_generated_set(&self.points, self.rec.generators(), y, 10);
        proj.distance <= tol * (1.0 + y.norm())
    }

    /// Membership through the halfspace form; the independent route used to
    /// cross-check `contains`.
    pub fn contains_h(&self, y: &DVector<f64>, tol: f64) -> bool {
        if self.is_empty() {
            return false;
        }
        let slack = tol * (1.0 + y.norm());
        self.halfspaces()
            .iter()
            .all(|h| h.normal.dot(y) >= h.offset - slack)
    }

    /// Minkowski sum closed under the attached cones: `cl(A + B)`.
    pub fn oplus(&self, other: &UpperSet) -> Result<UpperSet> {
        self.check_compatible(other)?;
        if self.is_empty() || other.is_empty() {
            return Ok(UpperSet::empty(self.cone.clone()));
        }
        let mut sums = Vec::with_capacity(self.points.len() * other.points.len());
        for p in &self.points {
            for q in &other.points {
                sums.push(p + q);
            }
        }
        let mut gens = self.rec.generators().to_vec();
        gens.extend_from_slice(other.rec.generators());
        let rec = PolyCone::from_generators(self.dim, &gens)?;
        UpperSet::new(&sums, rec, self.cone.clone())
    }

    /// `alpha ⊙ A = cl(alpha * A + C)`; zero collapses to the neutral
    /// element `{0} + C`.
    pub fn odot(&self, alpha: f64) -> Result<UpperSet> {
        if !(alpha >= 0.0) {
            return Err(CvopError::NegativeScale(alpha));
        }
        if self.is_empty() {
            return Ok(UpperSet::empty(self.cone.clone()));
        }
        if alpha == 0.0 {
            return UpperSet::new(
                &[DVector::zeros(self.dim)],
                self.cone.clone(),
                self.cone.clone(),
            );
        }
        let points: Vec<DVector<f64>> = self.points.iter().map(|p| p * alpha).collect();
        UpperSet::new(&points, self.rec.clone(), self.cone.clone())
    }

    /// Intersection through the halfspace forms; certified for q <= 3.
    pub fn intersect(&self, other: &UpperSet) -> Result<UpperSet> {
        self.check_compatible(other)?;
        if self.dim > 3 {
            return Err(CvopError::Unsupported {
                what: "upper-set intersection",
                dim: self.dim,
                supported: "q <= 3",
            });
        }
        if self.is_empty() || other.is_empty() {
            return Ok(UpperSet::empty(self.cone.clone()));
        }
        let mut rows: Vec<(DVector<f64>, f64)> = Vec::new();
        for h in self.halfspaces().iter().chain(other.halfspaces()) {
            rows.push((h.normal.clone(), h.offset));
        }
        let poly = dd::polyhedron_vertices(self.dim, &rows);
        if poly.is_empty() {
            return Ok(UpperSet::empty(self.cone.clone()));
        }
        let mut normals = self.rec.normals().to_vec();
        normals.extend_from_slice(other.rec.normals());
        let rec = PolyCone::from_normals(self.dim, &normals)?;
        UpperSet::new(&poly.vertices, rec, self.cone.clone())
    }

    /// Decides `A ⊆ y + rec A` for some anchor `y` by halfspace feasibility
    /// of `{y : n.y <= min_i n.p_i for every recession normal n}`.
    pub fn is_self_bounded(&self) -> Result<(bool, Option<DVector<f64>>)> {
        if self.is_empty() {
            return Err(CvopError::EmptySet);
        }
        let normals = self.rec.normals();
        if normals.is_empty() {
            return Err(CvopError::WholeSpace);
        }
        let mut rows = Vec::with_capacity(normals.len());
        for n in normals {
            let m = self
                .points
                .iter()
                .map(|p| n.dot(p))
                .fold(f64::INFINITY, f64::min);
            rows.push((-n.clone(), -m));
        }
        let poly = dd::polyhedron_vertices(self.dim, &rows);
        match poly.vertices.last() {
            Some(v) => Ok((true, Some(v.clone()))),
            None => Ok((false, None)),
        }
    }

    fn check_compatible(&self, other: &UpperSet) -> Result<()> {
        if self.dim != other.dim || !self.cone.same_cone(&other.cone, TOL_CONE) {
            return Err(CvopError::IncompatibleSets);
        }
        Ok(())
    }

    /// Set equality via mutual point membership and matching recession
    /// cones, at the given tolerance.
    pub fn same_set(&self, other: &UpperSet, tol: f64) -> bool {
        if self.is_empty() || other.is_empty() {
            return self.is_empty() == other.is_empty();
        }
        self.rec.same_cone(&other.rec, TOL_CONE)
            && self.points.iter().all(|p| other.contains(p, tol))
            && other.points.iter().all(|p| self.contains(p, tol))
    }

    /// Euclidean projection of `y` onto the set.
    pub fn point_distance(&self, y: &DVector<f64>) -> Result<DistanceReport> {
        if self.is_empty() {
            return Err(CvopError::EmptySet);
        }
        let proj = qp::project_to_generated_set(&self.points, self.rec.generators(), y, 10);
        Ok(DistanceReport {
            value: Distance::Finite(proj.distance),
            witness_from: y.clone(),
            witness_to: proj.point,
        })
    }
}

pub fn point_set_distance(y: &DVector<f64>, a: &UpperSet) -> Result<DistanceReport> {
    a.point_distance(y)
}

/// Hausdorff distance of two polyhedral upper sets. Finite only when the
/// recession cones agree; otherwise the report carries an escaping
/// direction from the symmetric difference of the cones. Certified for
/// q <= 3, where the supremum is attained on the stored point bases.
pub fn hausdorff(a: &UpperSet, b: &UpperSet) -> Result<DistanceReport> {
    if a.dim() != b.dim() {
        return Err(CvopError::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    if a.dim() > 3 {
        return Err(CvopError::Unsupported {
            what: "certified Hausdorff distance",
            dim: a.dim(),
            supported: "q <= 3 (use the sampled lower bound beyond)",
        });
    }
    if a.is_empty() || b.is_empty() {
        if a.is_empty() && b.is_empty() {
            return Ok(DistanceReport {
                value: Distance::Finite(0.0),
                witness_from: DVector::zeros(a.dim()),
                witness_to: DVector::zeros(a.dim()),
            });
        }
        let some = if a.is_empty() { b } else { a };
        return Ok(DistanceReport {
            value: Distance::Infinite,
            witness_from: some.points()[0].clone(),
            witness_to: DVector::zeros(a.dim()),
        });
    }
    let rec_a = a.recession_cone()?;
    let rec_b = b.recession_cone()?;
    let escape = rec_a
        .generators()
        .iter()
        .find(|g| !rec_b.contains(g, TOL_CONE))
        .or_else(|| {
            rec_b
                .generators()
                .iter()
                .find(|g| !rec_a.contains(g, TOL_CONE))
        });
    if let Some(dir) = escape {
        return Ok(DistanceReport {
            value: Distance::Infinite,
            witness_from: dir.clone(),
            witness_to: DVector::zeros(a.dim()),
        });
    }
    // With equal recession cones the point-to-set distance is non-increasing
    // along every recession direction, so each supremum is attained on the
    // stored point base.
    let mut best = DistanceReport {
        value: Distance::Finite(0.0),
        witness_from: a.points()[0].clone(),
        witness_to: a.points()[0].clone(),
    };
    let mut best_val = -1.0;
    for (from, to) in [(a, b), (b, a)] {
        for p in from.points() {
            let rep = to.point_distance(p)?;
            let d = rep.value.finite().unwrap();
            if d > best_val {
                best_val = d;
                best = rep;
            }
        }
    }
    Ok(best)
}

/// Sampled lower bound on the Hausdorff distance for any dimension;
/// the true distance can only be larger.
pub fn hausdorff_lower_bound(
    a: &UpperSet,
    b: &UpperSet,
    samples: usize,
    seed: u64,
) -> Result<DistanceReport> {
    if a.is_empty() || b.is_empty() {
        return Err(CvopError::EmptySet);
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut best: Option<DistanceReport> = None;
    let mut best_val = -1.0;
    for _ in 0..samples {
        for (from, to) in [(a, b), (b, a)] {
            let y = sample_point(from, &mut rng);
            let rep = to.point_distance(&y)?;
            let d = rep.value.finite().unwrap();
            if d > best_val {
                best_val = d;
                best = Some(rep);
            }
        }
    }
    Ok(best.unwrap())
}

fn sample_point(a: &UpperSet, rng: &mut StdRng) -> DVector<f64> {
    let mut y = DVector::zeros(a.dim());
    let mut total = 0.0;
    for p in a.points() {
        let l: f64 = rng.gen_range(0.0..1.0);
        y += p * l;
        total += l;
    }
    if total > 0.0 {
        y /= total;
    }
    for r in a.recession_cone().unwrap().generators() {
        y += r * rng.gen_range(0.0..3.0);
    }
    y
}

/// Greedy minimal cover: the smallest-by-construction subset `S` of
/// `samples` with `conv(S) + K - eps*c` containing every sample. Starts
/// from the lexicographically smallest sample minimizing `c.s` and adds
/// the worst violator until covered.
pub fn finite_dominating_subset(
    samples: &[DVector<f64>],
    k: &PolyCone,
    c: &DVector<f64>,
    eps: f64,
) -> Result<Vec<DVector<f64>>> {
    if samples.is_empty() {
        return Err(CvopError::EmptySet);
    }
    for n in k.normals() {
        if n.dot(c) <= TOL_CONE {
            return Err(CvopError::NotInterior {
                dir: c.iter().cloned().collect(),
            });
        }
    }
    if !(eps > 0.0) {
        return Err(CvopError::NegativeScale(eps));
    }
    let start = samples
        .iter()
        .min_by(|a, b| {
            let (ca, cb) = (c.dot(a), c.dot(b));
            ca.partial_cmp(&cb).unwrap().then_with(|| lex_cmp(a, b))
        })
        .unwrap()
        .clone();
    let mut chosen = vec![start];
    let rays = k.generators();
    loop {
        let mut worst: Option<(f64, &DVector<f64>)> = None;
        for s in samples {
            // s is covered iff s + eps*c reaches conv(chosen) + K.
            let target = s + c * eps;
            let proj = qp::project_to_generated_set(&chosen, rays, &target, 10);
            if proj.distance > 1e-9 * (1.0 + target.norm())
                && worst.map_or(true, |(d, _)| proj.distance > d)
            {
                worst = Some((proj.distance, s));
            }
        }
        match worst {
            None => break,
            Some((_, s)) => {
                if chosen.iter().any(|p| (p - s).norm() < 1e-12) {
                    break; // numerically stuck; cover is as good as it gets
                }
                chosen.push(s.clone());
            }
        }
    }
    dd::sort_vectors(&mut chosen);
    Ok(chosen)
}

fn lex_cmp(a: &DVector<f64>, b: &DVector<f64>) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Drops every point reachable from the remaining base, keeping the set
/// equal while making the V-form canonical.
fn prune_points(points: &[DVector<f64>], rec: &PolyCone) -> Vec<DVector<f64>> {
    let mut kept: Vec<DVector<f64>> = Vec::with_capacity(points.len());
    for p in points {
        if !kept.iter().any(|q| (q - p).norm() < 1e-12) {
            kept.push(p.clone());
        }
    }
    let rays = rec.generators();
    let mut i = 0;
    while i < kept.len() {
        let p = kept[i].clone();
        let others: Vec<DVector<f64>> = kept
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v.clone())
            .collect();
        if others.is_empty() {
            break;
        }
        let proj = qp::project_to_generated_set(&others, rays, &p, 10);
        if proj.distance < 1e-9 * (1.0 + p.norm()) {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    let mut kept = kept;
    dd::sort_vectors(&mut kept);
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    fn orthant_set(points: &[&[f64]]) -> UpperSet {
        let pts: Vec<DVector<f64>> = points.iter().map(|p| v(p)).collect();
        UpperSet::new(&pts, PolyCone::orthant(2), PolyCone::orthant(2)).unwrap()
    }

    #[test]
    fn recession_cone_is_the_attached_cone() {
        let a = orthant_set(&[&[0.0, 0.0]]);
        assert!(a.recession_cone().unwrap().same_cone(&PolyCone::orthant(2), 1e-12));

        let rec = PolyCone::from_generators(2, &[v(&[1.0, 0.0]), v(&[1.0, 1.0])]).unwrap();
        let a = UpperSet::new(
            &[v(&[0.0, 1.0]), v(&[1.0, 0.0])],
            rec.clone(),
            PolyCone::orthant(2),
        );
        // rec does not contain e2, so it cannot serve with C = R^2_+ ...
        assert!(a.is_err());
        // ... but it is a legal recession cone for C = cone{(1,0)}.
        let c = PolyCone::from_generators(2, &[v(&[1.0, 0.0])]).unwrap();
        let a = UpperSet::new(&[v(&[0.0, 1.0]), v(&[1.0, 0.0])], rec.clone(), c).unwrap();
        assert!(a.recession_cone().unwrap().same_cone(&rec, 1e-12));
    }

    #[test]
    fn oplus_translates_and_prunes() {
        let a = orthant_set(&[&[0.0, 0.0]]);
        let b = orthant_set(&[&[1.0, 2.0]]);
        let s = a.oplus(&b).unwrap();
        assert_eq!(s.points().len(), 1);
        assert!((&s.points()[0] - v(&[1.0, 2.0])).norm() < 1e-12);

        let a = orthant_set(&[&[0.0, 0.0], &[1.0, -1.0]]);
        let b = orthant_set(&[&[0.0, 0.0], &[-1.0, 1.0]]);
        let s = a.oplus(&b).unwrap();
        // (0,0) is the midpoint of the two survivors and gets pruned.
        assert_eq!(s.points().len(), 2);
        let expect = orthant_set(&[&[0.0, 0.0], &[1.0, -1.0], &[-1.0, 1.0]]);
        assert!(s.same_set(&expect, 1e-9));
    }

    #[test]
    fn oplus_neutral_element() {
        let neutral = orthant_set(&[&[0.0, 0.0]]);
        let a = orthant_set(&[&[2.0, -1.0], &[-0.5, 3.0]]);
        assert!(a.oplus(&neutral).unwrap().same_set(&a, 1e-9));
        assert!(neutral.oplus(&a).unwrap().same_set(&a, 1e-9));
    }

    #[test]
    fn oplus_empty_absorbs() {
        let a = orthant_set(&[&[1.0, 1.0]]);
        let empty = UpperSet::empty(PolyCone::orthant(2));
        assert!(a.oplus(&empty).unwrap().is_empty());
        assert!(empty.oplus(&a).unwrap().is_empty());
    }

    #[test]
    fn odot_scales_and_zero_is_neutral_cone() {
        let a = orthant_set(&[&[0.0, 0.0], &[1.0, -1.0]]);
        let z = a.odot(0.0).unwrap();
        assert_eq!(z.points().len(), 1);
        assert_eq!(z.points()[0], v(&[0.0, 0.0]));
        assert!(z.recession_cone().unwrap().same_cone(&PolyCone::orthant(2), 0.0));

        let one = a.odot(1.0).unwrap();
        assert!(one.same_set(&a, 1e-12));

        let two = a.odot(2.0).unwrap();
        let expect = orthant_set(&[&[0.0, 0.0], &[2.0, -2.0]]);
        assert!(two.same_set(&expect, 1e-9));

        assert!(a.odot(-1.0).is_err());
    }

    #[test]
    fn intersect_orthant_translates() {
        let a = orthant_set(&[&[0.0, 0.0]]);
        let b = orthant_set(&[&[1.0, -1.0]]);
        let s = a.intersect(&b).unwrap();
        let expect = orthant_set(&[&[1.0, 0.0]]);
        assert!(s.same_set(&expect, 1e-9));
        assert!(a.intersect(&a).unwrap().same_set(&a, 1e-9));
    }

    #[test]
    fn intersect_nested_cones() {
        let e_inv = (-1.0f64).exp();
        let big = PolyCone::from_generators(2, &[v(&[1.0, 0.0]), v(&[-e_inv, 1.0])]).unwrap();
        let c = PolyCone::from_generators(2, &[v(&[1.0, 0.0])]).unwrap();
        let a = UpperSet::new(&[v(&[0.0, 0.0])], big, c.clone()).unwrap();
        let b = UpperSet::new(&[v(&[0.0, 0.0])], PolyCone::orthant(2), c).unwrap();
        let s = a.intersect(&b).unwrap();
        assert!(s.same_set(&b, 1e-9));
    }

    #[test]
    fn self_boundedness_feasibility() {
        let a = orthant_set(&[&[0.0, 0.0], &[1.0, 1.0]]);
        let (ok, anchor) = a.is_self_bounded().unwrap();
        assert!(ok);
        assert!((anchor.unwrap() - v(&[0.0, 0.0])).norm() < 1e-9);

        let ray = PolyCone::from_generators(2, &[v(&[1.0, 0.0])]).unwrap();
        let b = UpperSet::new(
            &[v(&[0.0, 0.0]), v(&[1.0, -1.0])],
            ray.clone(),
            ray.clone(),
        )
        .unwrap();
        let (ok, anchor) = b.is_self_bounded().unwrap();
        assert!(!ok && anchor.is_none());

        // a solid pointed recession cone always admits an anchor
        let c = orthant_set(&[&[3.0, -2.0], &[-1.0, 5.0], &[0.7, 0.7]]);
        let (ok, anchor) = c.is_self_bounded().unwrap();
        assert!(ok);
        let y = anchor.unwrap();
        for p in c.points() {
            assert!(c.recession_cone().unwrap().contains(&(p - &y), 1e-9));
        }
    }

    #[test]
    fn point_distances() {
        let a = orthant_set(&[&[0.0, 0.0]]);
        let d = a.point_distance(&v(&[1.0, 1.0])).unwrap();
        assert_eq!(d.value.finite().unwrap(), 0.0);

        let d = a.point_distance(&v(&[-1.0, -1.0])).unwrap();
        assert!((d.value.finite().unwrap() - (2.0f64).sqrt()).abs() < 1e-9);
        assert!((d.witness_to - v(&[0.0, 0.0])).norm() < 1e-9);

        let b = orthant_set(&[&[0.0, 0.0], &[0.0, 3.0]]);
        let d = b.point_distance(&v(&[-2.0, 0.0])).unwrap();
        assert!((d.value.finite().unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn hausdorff_examples() {
        let a = orthant_set(&[&[0.0, 0.0]]);
        let d = hausdorff(&a, &a).unwrap();
        assert_eq!(d.value.finite().unwrap(), 0.0);

        let b = orthant_set(&[&[1.0, 1.0]]);
        let d = hausdorff(&a, &b).unwrap();
        assert!((d.value.finite().unwrap() - (2.0f64).sqrt()).abs() < 1e-9);

        let e_inv = (-1.0f64).exp();
        let wide = UpperSet::new(
            &[v(&[0.0, 0.0])],
            PolyCone::from_generators(2, &[v(&[1.0, 0.0]), v(&[-e_inv, 1.0])]).unwrap(),
            PolyCone::from_generators(2, &[v(&[1.0, 0.0])]).unwrap(),
        )
        .unwrap();
        let narrow = UpperSet::new(
            &[v(&[0.0, 0.0])],
            PolyCone::orthant(2),
            PolyCone::from_generators(2, &[v(&[1.0, 0.0])]).unwrap(),
        )
        .unwrap();
        let d = hausdorff(&narrow, &wide).unwrap();
        assert!(!d.value.is_finite());
        // the escaping witness is the direction only one cone has
        assert!(d.witness_from[0] < 0.0 && d.witness_from[1] > 0.0);

        // distance along the escaping direction grows without bound
        let dir = v(&[-e_inv, 1.0]).normalize();
        let mut last = 0.0;
        for n in [1.0, 10.0, 100.0] {
            let y = &dir * n;
            let d = narrow.point_distance(&y).unwrap().value.finite().unwrap();
            assert!(d > last);
            last = d;
        }
    }

    #[test]
    fn dominating_subset_examples() {
        let k = PolyCone::orthant(2);
        let c = v(&[1.0, 1.0]);
        let square = [
            v(&[0.0, 0.0]),
            v(&[1.0, 0.0]),
            v(&[0.0, 1.0]),
            v(&[1.0, 1.0]),
        ];
        let sub = finite_dominating_subset(&square, &k, &c, 0.1).unwrap();
        assert_eq!(sub.len(), 1);
        assert!((&sub[0] - v(&[0.0, 0.0])).norm() < 1e-12);

        let two = [v(&[0.0, 1.0]), v(&[1.0, 0.0])];
        let sub = finite_dominating_subset(&two, &k, &c, 0.01).unwrap();
        assert_eq!(sub.len(), 2);

        let one = [v(&[0.3, 0.7])];
        let sub = finite_dominating_subset(&one, &k, &c, 0.5).unwrap();
        assert_eq!(sub, vec![v(&[0.3, 0.7])]);
    }

    /// Brute-force oracle for the projection distance on 2-D orthant sets:
    /// for fixed convex weights the distance to the translated orthant is
    /// exactly the norm of the positive part of `p(lambda) - y`, so only
    /// the weights need a (zooming) grid.
    #[test]
    fn distance_matches_grid_oracle() {
        let dist_at = |pts: &[DVector<f64>], y: &DVector<f64>, l1: f64, l2: f64| -> f64 {
            let p = &pts[0] * (1.0 - l1 - l2) + &pts[1] * l1 + &pts[2] * l2;
            (0..2)
                .map(|i| (p[i] - y[i]).max(0.0).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..12 {
            let pts: Vec<DVector<f64>> = (0..3)
                .map(|_| DVector::from_fn(2, |_, _| rng.gen_range(-2.0..2.0)))
                .collect();
            let a = UpperSet::new(&pts, PolyCone::orthant(2), PolyCone::orthant(2)).unwrap();
            let y = DVector::from_fn(2, |_, _| rng.gen_range(-4.0..4.0));
            let fast = a.point_distance(&y).unwrap().value.finite().unwrap();

            let (mut c1, mut c2, mut h) = (0.5, 0.25, 0.55);
            let mut brute = f64::INFINITY;
            for _pass in 0..5 {
                let n = 24;
                let (mut best1, mut best2) = (c1, c2);
                for i in 0..=n {
                    for j in 0..=n {
                        let l1 = (c1 - h + 2.0 * h * i as f64 / n as f64).clamp(0.0, 1.0);
                        let l2 = (c2 - h + 2.0 * h * j as f64 / n as f64).clamp(0.0, 1.0);
                        if l1 + l2 > 1.0 {
                            continue;
                        }
                        let d = dist_at(&pts, &y, l1, l2);
                        if d < brute {
                            brute = d;
                            best1 = l1;
                            best2 = l2;
                        }
                    }
                }
                c1 = best1;
                c2 = best2;
                h /= 8.0;
            }
            assert!(
                fast <= brute + 1e-9 && brute - fast < 1e-4,
                "fast {fast} brute {brute}"
            );
        }
    }

    fn random_set(rng: &mut StdRng, cone: &PolyCone) -> UpperSet {
        let dim = cone.dim();
        let n_pts = rng.gen_range(1..4);
        let pts: Vec<DVector<f64>> = (0..n_pts)
            .map(|_| DVector::from_fn(dim, |_, _| rng.gen_range(-3.0..3.0)))
            .collect();
        UpperSet::new(&pts, cone.clone(), cone.clone()).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn conlinear_laws(seed in 0u64..500, dim in 2usize..4) {
            let mut rng = StdRng::seed_from_u64(seed);
            let cone = PolyCone::orthant(dim);
            let a = random_set(&mut rng, &cone);
            let b = random_set(&mut rng, &cone);
            let c = random_set(&mut rng, &cone);
            let alpha = rng.gen_range(0.0..3.0);

            let ab_c = a.oplus(&b).unwrap().oplus(&c).unwrap();
            let a_bc = a.oplus(&b.oplus(&c).unwrap()).unwrap();
            prop_assert!(ab_c.same_set(&a_bc, 1e-7));

            prop_assert!(a.oplus(&b).unwrap().same_set(&b.oplus(&a).unwrap(), 1e-7));
            prop_assert!(a.odot(1.0).unwrap().same_set(&a, 1e-7));

            let lhs = a.oplus(&b).unwrap().odot(alpha).unwrap();
            let rhs = a.odot(alpha).unwrap().oplus(&b.odot(alpha).unwrap()).unwrap();
            prop_assert!(lhs.same_set(&rhs, 1e-7));
        }

        #[test]
        fn self_boundedness_preserved(seed in 0u64..500) {
            let mut rng = StdRng::seed_from_u64(seed);
            let cone = PolyCone::orthant(2);
            let a = random_set(&mut rng, &cone);
            let b = random_set(&mut rng, &cone);
            prop_assert!(a.is_self_bounded().unwrap().0);
            prop_assert!(b.is_self_bounded().unwrap().0);
            prop_assert!(a.oplus(&b).unwrap().is_self_bounded().unwrap().0);
            prop_assert!(a.odot(1.7).unwrap().is_self_bounded().unwrap().0);
            let i = a.intersect(&b).unwrap();
            if !i.is_empty() {
                prop_assert!(i.is_self_bounded().unwrap().0);
            }
        }
    }
}
