//! Polyhedral cones kept in both generator (V) and halfspace (H) form.
//!
//! The two forms are duals of each other: the halfspace normals of a cone
//! are exactly the generators of its dual cone. `dual()` is therefore a
//! field swap, and a cone with both forms cached round-trips through
//! double duality bit for bit.

use crate::config::TOL_CONE;
use crate::dd;
use crate::error::CvopError;
use crate::qp;
use crate::Result;
use nalgebra::DVector;
use std::sync::OnceLock;

#[derive(Debug, Clone, Default)]
pub struct PolyCone {
    dim: usize,
    generators: OnceLock<Vec<DVector<f64>>>,
    normals: OnceLock<Vec<DVector<f64>>>,
}

/// Unit-normalize, drop zeros, merge equal directions, sort for determinism.
fn canonicalize(dim: usize, vs: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vs.len());
    for v in vs {
        if v.len() != dim {
            return Err(CvopError::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
        if !v.iter().all(|x| x.is_finite()) {
            return Err(CvopError::BadVector(v.iter().cloned().collect()));
        }
        let n = v.norm();
        if n <= TOL_CONE {
            return Err(CvopError::BadVector(v.iter().cloned().collect()));
        }
        let mut u = v / n;
        for x in u.iter_mut() {
            if *x == 0.0 {
                *x = 0.0; // scrub -0.0 for byte-stable output
            }
        }
        if !out.iter().any(|w| (w - &u).norm() < 1e-9) {
            out.push(u);
        }
    }
    dd::sort_vectors(&mut out);
    Ok(out)
}

impl PolyCone {
    /// Cone spanned by nonnegative combinations of `gens`. An empty list is
    /// the trivial cone `{0}`.
    pub fn from_generators(dim: usize, gens: &[DVector<f64>]) -> Result<Self> {
        if dim == 0 {
            return Err(CvopError::Unsupported {
                what: "cones",
                dim: 0,
                supported: "q >= 1",
            });
        }
        let cone = PolyCone {
            dim,
            generators: OnceLock::new(),
            normals: OnceLock::new(),
        };
        cone.generators.set(canonicalize(dim, gens)?).unwrap();
        if dim <= 3 {
            cone.normals(); // materialize both forms eagerly in low dimension
        }
        Ok(cone)
    }

    /// Cone `{x : n.x >= 0 for all n in normals}`. An empty list is the
    /// whole space.
    pub fn from_normals(dim: usize, normals: &[DVector<f64>]) -> Result<Self> {
        if dim == 0 {
            return Err(CvopError::Unsupported {
                what: "cones",
                dim: 0,
                supported: "q >= 1",
            });
        }
        let cone = PolyCone {
            dim,
            generators: OnceLock::new(),
            normals: OnceLock::new(),
        };
        cone.normals.set(canonicalize(dim, normals)?).unwrap();
        if dim <= 3 {
            cone.generators();
        }
        Ok(cone)
    }

    pub fn from_forms(
        dim: usize,
        gens: &[DVector<f64>],
        normals: &[DVector<f64>],
    ) -> Result<Self> {
        let cone = PolyCone {
            dim,
            generators: OnceLock::new(),
            normals: OnceLock::new(),
        };
        cone.generators.set(canonicalize(dim, gens)?).unwrap();
        cone.normals.set(canonicalize(dim, normals)?).unwrap();
        for g in cone.generators.get().unwrap() {
            for n in cone.normals.get().unwrap() {
                if n.dot(g) < -TOL_CONE {
                    return Err(CvopError::InconsistentForms(format!(
                        "generator {:?} violates normal {:?}",
                        g.as_slice(),
                        n.as_slice()
                    )));
                }
            }
        }
        Ok(cone)
    }

    pub fn orthant(dim: usize) -> Self {
        let es: Vec<DVector<f64>> = (0..dim)
            .map(|i| DVector::from_fn(dim, |k, _| if k == i { 1.0 } else { 0.0 }))
            .collect();
        Self::from_forms(dim, &es, &es).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[DVector<f64>] {
        self.generators.get_or_init(|| {
            let h = self.normals.get().expect("cone must carry one form");
            let g = dd::dd_cone(self.dim, h);
            let mut all = g.rays;
            for b in g.lineality {
                all.push(b.clone());
                all.push(-b);
            }
            canonicalize(self.dim, &all).unwrap_or_default()
        })
    }

    pub fn normals(&self) -> &[DVector<f64>] {
        self.normals.get_or_init(|| {
            let gens = self.generators.get().expect("cone must carry one form");
            let g = dd::dd_cone(self.dim, gens);
            let mut all = g.rays;
            for b in g.lineality {
                all.push(b.clone());
                all.push(-b);
            }
            canonicalize(self.dim, &all).unwrap_or_default()
        })
    }

    /// The dual cone: generators and normals trade places, caches included.
    pub fn dual(&self) -> PolyCone {
        PolyCone {
            dim: self.dim,
            generators: self.normals.clone(),
            normals: self.generators.clone(),
        }
    }

    pub fn contains(&self, y: &DVector<f64>, tol: f64) -> bool {
        let slack = tol * (1.0 + y.norm());
        self.normals().iter().all(|n| n.dot(y) >= -slack)
    }

    pub fn is_trivial(&self) -> bool {
        self.generators().is_empty()
    }

    /// Pointed: contains no line; the min-norm point of the unit-generator
    /// hull is then bounded away from the origin.
    pub fn is_pointed(&self) -> bool {
        let gens = self.generators();
        if gens.is_empty() {
            return true;
        }
        qp::min_norm_point(gens, 10).norm() > TOL_CONE
    }

    /// Solid: nonempty interior, equivalently the dual cone is pointed.
    pub fn is_solid(&self) -> bool {
        let normals = self.normals();
        if normals.is_empty() {
            return true;
        }
        qp::min_norm_point(normals, 10).norm() > TOL_CONE
    }

    /// A direction spanning a line inside the cone, if any.
    pub fn line_witness(&self) -> Option<DVector<f64>> {
        self.generators()
            .iter()
            .find(|g| self.contains(&(-*g).clone(), TOL_CONE))
            .cloned()
    }

    /// Minimal generating set of a pointed cone, unit-normalized and sorted.
    pub fn extreme_directions(&self) -> Result<Vec<DVector<f64>>> {
        if !self.is_pointed() {
            return Err(CvopError::NotPointed {
                witness: self
                    .line_witness()
                    .map(|w| w.iter().cloned().collect())
                    .unwrap_or_default(),
            });
        }
        let gens = self.generators();
        let mut kept: Vec<DVector<f64>> = gens.to_vec();
        let mut i = 0;
        while i < kept.len() {
            let g = kept[i].clone();
            let others: Vec<DVector<f64>> = kept
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, v)| v.clone())
                .collect();
            if others.is_empty() {
                break;
            }
            let (_, res) = qp::nnls(&others, &g, 10);
            if res < 1e-9 {
                kept.remove(i);
            } else {
                i += 1;
            }
        }
        Ok(kept)
    }

    /// Ordering cones must be nontrivial, pointed and solid.
    pub fn validate_ordering(&self) -> Result<()> {
        if self.is_trivial() {
            return Err(CvopError::EmptyCone);
        }
        if !self.is_pointed() {
            return Err(CvopError::NotPointed {
                witness: self
                    .line_witness()
                    .map(|w| w.iter().cloned().collect())
                    .unwrap_or_default(),
            });
        }
        if !self.is_solid() {
            return Err(CvopError::NotSolid);
        }
        Ok(())
    }

    /// Normalized sum of the extreme directions; interior for a pointed
    /// solid cone.
    pub fn default_direction(&self) -> Result<DVector<f64>> {
        self.validate_ordering()?;
        let ext = self.extreme_directions()?;
        let mut s = DVector::zeros(self.dim);
        for g in &ext {
            s += g;
        }
        Ok(s.normalize())
    }

    /// Set equality via mutual generator membership.
    pub fn same_cone(&self, other: &PolyCone, tol: f64) -> bool {
        self.dim == other.dim
            && self.generators().iter().all(|g| other.contains(g, tol))
            && other.generators().iter().all(|g| self.contains(g, tol))
    }

    pub fn subset_of(&self, other: &PolyCone, tol: f64) -> bool {
        self.generators().iter().all(|g| other.contains(g, tol))
    }
}

/// A finite sample of the base `{w in K : w.c = 1}` of a cone `K`.
#[derive(Debug, Clone)]
pub struct WeightBase {
    pub cone: PolyCone,
    pub c: DVector<f64>,
    pub weights: Vec<DVector<f64>>,
}

impl WeightBase {
    pub fn contains(&self, w: &DVector<f64>) -> bool {
        (w.dot(&self.c) - 1.0).abs() <= 1e-9 * (1.0 + w.norm())
            && self.cone.contains(w, TOL_CONE)
    }
}

/// Base of `k` sliced at `{w : w.c = 1}`: the extreme directions rescaled
/// onto the slice plus a deterministic grid of `grid` points in between.
/// For a two-ray cone the grid is the segment between the rescaled extreme
/// directions with `grid` points including both ends.
pub fn weight_base(k: &PolyCone, c: &DVector<f64>, grid: usize) -> Result<WeightBase> {
    if c.len() != k.dim() {
        return Err(CvopError::DimensionMismatch {
            expected: k.dim(),
            got: c.len(),
        });
    }
    let ext = k.extreme_directions()?;
    if ext.is_empty() {
        return Err(CvopError::EmptyWeightBase);
    }
    let mut verts = Vec::with_capacity(ext.len());
    for g in &ext {
        let s = g.dot(c);
        if s <= TOL_CONE {
            return Err(CvopError::NotInterior {
                dir: g.iter().cloned().collect(),
            });
        }
        verts.push(g / s);
    }
    dd::sort_vectors(&mut verts);

    let mut weights: Vec<DVector<f64>> = Vec::new();
    if verts.len() == 1 {
        weights.push(verts[0].clone());
    } else if verts.len() == 2 {
        let n = grid.max(2);
        for i in 0..n {
            let t = i as f64 / (n - 1) as f64;
            weights.push(&verts[0] * (1.0 - t) + &verts[1] * t);
        }
    } else {
        // Barycentric grid over the base polytope at the smallest level
        // whose composition count reaches the request.
        let kv = verts.len();
        let mut level = 1usize;
        while compositions_count(level, kv) < grid.max(kv) {
            level += 1;
            if level > 64 {
                break;
            }
        }
        let mut combo = vec![0usize; kv];
        emit_compositions(level, 0, &mut combo, &verts, &mut weights);
    }
    let mut weights: Vec<DVector<f64>> = {
        let mut dedup: Vec<DVector<f64>> = Vec::with_capacity(weights.len());
        for w in weights {
            if !dedup.iter().any(|u| (u - &w).norm() < 1e-12) {
                dedup.push(w);
            }
        }
        dedup
    };
    dd::sort_vectors(&mut weights);
    Ok(WeightBase {
        cone: k.clone(),
        c: c.clone(),
        weights,
    })
}

fn compositions_count(level: usize, parts: usize) -> usize {
    // C(level + parts - 1, parts - 1), saturating.
    let mut acc: usize = 1;
    for i in 0..parts - 1 {
        acc = acc.saturating_mul(level + i + 1);
        acc /= i + 1;
    }
    acc
}

fn emit_compositions(
    remaining: usize,
    idx: usize,
    combo: &mut Vec<usize>,
    verts: &[DVector<f64>],
    out: &mut Vec<DVector<f64>>,
) {
    if idx == combo.len() - 1 {
        combo[idx] = remaining;
        let total: usize = combo.iter().sum();
        let mut w = DVector::zeros(verts[0].len());
        for (a, v) in combo.iter().zip(verts) {
            w += v * (*a as f64 / total as f64);
        }
        out.push(w);
        return;
    }
    for a in 0..=remaining {
        combo[idx] = a;
        emit_compositions(remaining - a, idx + 1, combo, verts, out);
    }
}
