//! Double description: converting cones and polyhedra between halfspace
//! and generator descriptions.
//!
//! Cones are written `{x : n.x >= 0 for all n in normals}`; generators
//! come back as extreme rays plus an orthonormal basis of the lineality
//! space. Polyhedra `{y : n.y >= b}` go through the usual homogenization
//! with an extra nonnegative coordinate, so vertex enumeration, facet
//! enumeration and emptiness checks all reduce to the cone routine.
//!
//! The incremental step keeps only adjacent positive/negative ray pairs,
//! decided by the combinatorial tight-set test, which is exact because
//! the lineality space is eliminated eagerly and the remaining ray cone
//! is pointed modulo it.

use nalgebra::DVector;

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Default)]
pub struct ConeGenerators {
    pub rays: Vec<DVector<f64>>,
    pub lineality: Vec<DVector<f64>>,
}

#[derive(Debug, Clone, Default)]
pub struct PolyhedronGenerators {
    pub vertices: Vec<DVector<f64>>,
    pub rays: Vec<DVector<f64>>,
    pub lineality: Vec<DVector<f64>>,
}

impl PolyhedronGenerators {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

#[derive(Clone)]
struct Ray {
    dir: DVector<f64>,
    tight: Vec<u64>,
}

fn bit_set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn bits_and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn bits_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Generators of `{x in R^dim : n.x >= 0 for all n in normals}`.
pub fn dd_cone(dim: usize, normals: &[DVector<f64>]) -> ConeGenerators {
    let words = normals.len() / 64 + 1;
    let mut lineality: Vec<DVector<f64>> = (0..dim)
        .map(|i| DVector::from_fn(dim, |k, _| if k == i { 1.0 } else { 0.0 }))
        .collect();
    let mut rays: Vec<Ray> = Vec::new();
    let mut processed: Vec<usize> = Vec::new();

    for (j, n_raw) in normals.iter().enumerate() {
        assert_eq!(n_raw.len(), dim);
        let nn = n_raw.norm();
        if nn <= TOL {
            continue;
        }
        let n = n_raw / nn;

        let pivot = lineality
            .iter()
            .enumerate()
            .map(|(k, b)| (k, n.dot(b)))
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap());

        if let Some((k, d0)) = pivot.filter(|&(_, d)| d.abs() > TOL) {
            // The constraint cuts the lineality space: one basis vector
            // turns into a ray, the rest are rotated into the hyperplane.
            let b0 = lineality.remove(k);
            for b in lineality.iter_mut() {
                let t = n.dot(b) / d0;
                *b -= t * &b0;
            }
            orthonormalize(&mut lineality);
            for r in rays.iter_mut() {
                let t = n.dot(&r.dir) / d0;
                r.dir -= t * &b0;
                let norm = r.dir.norm();
                if norm > TOL {
                    r.dir /= norm;
                }
                bit_set(&mut r.tight, j);
            }
            rays.retain(|r| r.dir.norm() > TOL);
            let mut tight = vec![0u64; words];
            for &i in &processed {
                bit_set(&mut tight, i);
            }
            let dir = if d0 > 0.0 { b0 } else { -b0 };
            rays.push(Ray { dir, tight });
            processed.push(j);
            continue;
        }

        let vals: Vec<f64> = rays.iter().map(|r| n.dot(&r.dir)).collect();
        if !vals.iter().any(|&v| v < -TOL) {
            for (r, &v) in rays.iter_mut().zip(&vals) {
                if v.abs() <= TOL {
                    bit_set(&mut r.tight, j);
                }
            }
            processed.push(j);
            continue;
        }

        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut next: Vec<Ray> = Vec::new();
        for (idx, &v) in vals.iter().enumerate() {
            if v > TOL {
                pos.push(idx);
                next.push(rays[idx].clone());
            } else if v < -TOL {
                neg.push(idx);
            } else {
                let mut r = rays[idx].clone();
                bit_set(&mut r.tight, j);
                next.push(r);
            }
        }
        for &p in &pos {
            for &m in &neg {
                if !adjacent(&rays, p, m) {
                    continue;
                }
                let mut dir = vals[p] * &rays[m].dir - vals[m] * &rays[p].dir;
                let norm = dir.norm();
                if norm <= TOL {
                    continue;
                }
                dir /= norm;
                if next.iter().any(|r| (&r.dir - &dir).norm() < 1e-9) {
                    continue;
                }
                let mut tight = bits_and(&rays[p].tight, &rays[m].tight);
                bit_set(&mut tight, j);
                next.push(Ray { dir, tight });
            }
        }
        rays = next;
        processed.push(j);
    }

    let mut out_rays: Vec<DVector<f64>> = rays
        .into_iter()
        .map(|r| canonical_direction(r.dir))
        .collect();
    sort_vectors(&mut out_rays);
    orthonormalize(&mut lineality);
    let mut lin: Vec<DVector<f64>> = lineality
        .into_iter()
        .map(|b| {
            let b = canonical_direction(b);
            match b.iter().find(|x| x.abs() > TOL) {
                Some(x) if *x < 0.0 => -b,
                _ => b,
            }
        })
        .collect();
    sort_vectors(&mut lin);
    ConeGenerators {
        rays: out_rays,
        lineality: lin,
    }
}

fn adjacent(rays: &[Ray], p: usize, m: usize) -> bool {
    let s = bits_and(&rays[p].tight, &rays[m].tight);
    !rays
        .iter()
        .enumerate()
        .any(|(k, r)| k != p && k != m && bits_subset(&s, &r.tight))
}

fn orthonormalize(basis: &mut Vec<DVector<f64>>) {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(basis.len());
    for b in basis.drain(..) {
        let mut v = b;
        for u in &out {
            let t = u.dot(&v);
            v -= t * u;
        }
        let n = v.norm();
        if n > TOL {
            out.push(v / n);
        }
    }
    *basis = out;
}

fn canonical_direction(mut v: DVector<f64>) -> DVector<f64> {
    let n = v.norm();
    if n > 0.0 {
        v /= n;
    }
    for x in v.iter_mut() {
        if *x == 0.0 {
            *x = 0.0; // normalize -0.0
        }
    }
    v
}

pub fn sort_vectors(vs: &mut [DVector<f64>]) {
    vs.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b.iter()) {
            match x.partial_cmp(y) {
                Some(std::cmp::Ordering::Equal) | None => continue,
                Some(o) => return o,
            }
        }
        std::cmp::Ordering::Equal
    });
}

/// Vertex enumeration of `{y : n.y >= b for every (n, b)}`.
pub fn polyhedron_vertices(dim: usize, halfspaces: &[(DVector<f64>, f64)]) -> PolyhedronGenerators {
    let mut rows: Vec<DVector<f64>> = Vec::with_capacity(halfspaces.len() + 1);
    for (n, b) in halfspaces {
        assert_eq!(n.len(), dim);
        let mut row = DVector::zeros(dim + 1);
        row.rows_mut(0, dim).copy_from(n);
        row[dim] = -b;
        rows.push(row);
    }
    let mut t_row = DVector::zeros(dim + 1);
    t_row[dim] = 1.0;
    rows.push(t_row);

    let cone = dd_cone(dim + 1, &rows);
    let mut out = PolyhedronGenerators::default();
    for r in cone.rays {
        let s = r[dim];
        let z = r.rows(0, dim).into_owned();
        if s > TOL {
            out.vertices.push(z / s);
        } else if z.norm() > TOL {
            out.rays.push(canonical_direction(z));
        }
    }
    for b in cone.lineality {
        let z = b.rows(0, dim).into_owned();
        if z.norm() > TOL {
            out.lineality.push(z.normalize());
        }
    }
    sort_vectors(&mut out.vertices);
    sort_vectors(&mut out.rays);
    sort_vectors(&mut out.lineality);
    out
}

/// Irredundant inequalities `n.y >= b` describing `conv(vertices) + cone(rays)`.
/// Equalities of lower-dimensional polyhedra come out as opposite pairs.
pub fn polyhedron_facets(
    dim: usize,
    vertices: &[DVector<f64>],
    rays: &[DVector<f64>],
) -> Vec<(DVector<f64>, f64)> {
    assert!(!vertices.is_empty(), "facet enumeration of an empty set");
    let mut gens: Vec<DVector<f64>> = Vec::with_capacity(vertices.len() + rays.len());
    for v in vertices {
        let mut g = DVector::zeros(dim + 1);
        g.rows_mut(0, dim).copy_from(v);
        g[dim] = 1.0;
        gens.push(g);
    }
    for r in rays {
        let mut g = DVector::zeros(dim + 1);
        g.rows_mut(0, dim).copy_from(r);
        gens.push(g);
    }
    // The polar of the homogenization cone is exactly the cone of valid
    // inequalities (w, b) with w.y >= -b on the polyhedron.
    let dual = dd_cone(dim + 1, &gens);
    let mut out = Vec::new();
    let mut push = |row: &DVector<f64>| {
        let w = row.rows(0, dim).into_owned();
        let wn = w.norm();
        if wn > TOL {
            out.push((&w / wn, -row[dim] / wn));
        }
    };
    for r in &dual.rays {
        push(r);
    }
    for b in &dual.lineality {
        push(b);
        push(&(-b));
    }
    out.sort_by(|a, b| {
        for (x, y) in a.0.iter().chain([&a.1]).zip(b.0.iter().chain([&b.1])) {
            match x.partial_cmp(y) {
                Some(std::cmp::Ordering::Equal) | None => continue,
                Some(o) => return o,
            }
        }
        std::cmp::Ordering::Equal
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qp;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    #[test]
    fn orthant_from_halfspaces() {
        let g = dd_cone(2, &[v(&[1.0, 0.0]), v(&[0.0, 1.0])]);
        assert!(g.lineality.is_empty());
        assert_eq!(g.rays.len(), 2);
        assert!((&g.rays[0] - v(&[0.0, 1.0])).norm() < 1e-12);
        assert!((&g.rays[1] - v(&[1.0, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn halfplane_keeps_lineality() {
        let g = dd_cone(2, &[v(&[1.0, 0.0])]);
        assert_eq!(g.rays.len(), 1);
        assert!((&g.rays[0] - v(&[1.0, 0.0])).norm() < 1e-12);
        assert_eq!(g.lineality.len(), 1);
        assert!(g.lineality[0][0].abs() < 1e-12);
    }

    #[test]
    fn wedge_generators() {
        // x1 >= 0 and x2 >= x1.
        let g = dd_cone(2, &[v(&[1.0, 0.0]), v(&[-1.0, 1.0])]);
        assert!(g.lineality.is_empty());
        assert_eq!(g.rays.len(), 2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((&g.rays[0] - v(&[0.0, 1.0])).norm() < 1e-9);
        assert!((&g.rays[1] - v(&[s, s])).norm() < 1e-9);
    }

    #[test]
    fn degenerate_cones() {
        let whole = dd_cone(2, &[]);
        assert!(whole.rays.is_empty());
        assert_eq!(whole.lineality.len(), 2);

        let origin = dd_cone(
            2,
            &[
                v(&[1.0, 0.0]),
                v(&[-1.0, 0.0]),
                v(&[0.0, 1.0]),
                v(&[0.0, -1.0]),
            ],
        );
        assert!(origin.rays.is_empty() && origin.lineality.is_empty());
    }

    /// Membership in cone{gens} and in the double-dual computed through two
    /// conversions must agree on sampled directions.
    #[test]
    fn double_dual_preserves_membership() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..6 {
            let gens: Vec<DVector<f64>> =
                (0..5).map(|_| DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0))).collect();
            let dual = dd_cone(3, &gens);
            let mut h = dual.rays.clone();
            for b in &dual.lineality {
                h.push(b.clone());
                h.push(-b);
            }
            let back = dd_cone(3, &h);
            let mut back_gens = back.rays.clone();
            for b in &back.lineality {
                back_gens.push(b.clone());
                back_gens.push(-b);
            }
            for _ in 0..60 {
                let u = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0)).normalize();
                let (_, r1) = qp::nnls(&gens, &u, 10);
                let (_, r2) = qp::nnls(&back_gens, &u, 10);
                let inside1 = r1 < 1e-9;
                let inside2 = r2 < 1e-9;
                if r1.min(r2) > 1e-9 && r1.max(r2) < 1e-5 {
                    continue; // boundary-ambiguous sample
                }
                assert_eq!(inside1, inside2, "residuals {r1} {r2}");
            }
        }
    }

    #[test]
    fn unit_square_vertices_and_roundtrip() {
        let hs = vec![
            (v(&[1.0, 0.0]), 0.0),
            (v(&[0.0, 1.0]), 0.0),
            (v(&[-1.0, 0.0]), -1.0),
            (v(&[0.0, -1.0]), -1.0),
        ];
        let p = polyhedron_vertices(2, &hs);
        assert_eq!(p.vertices.len(), 4);
        assert!(p.rays.is_empty() && p.lineality.is_empty());
        assert!((&p.vertices[0] - v(&[0.0, 0.0])).norm() < 1e-12);
        assert!((&p.vertices[3] - v(&[1.0, 1.0])).norm() < 1e-12);

        let facets = polyhedron_facets(2, &p.vertices, &p.rays);
        assert_eq!(facets.len(), 4);
        for (n, b) in &facets {
            for vx in &p.vertices {
                assert!(n.dot(vx) >= b - 1e-9);
            }
            assert!(p.vertices.iter().any(|vx| (n.dot(vx) - b).abs() < 1e-9));
        }
    }

    #[test]
    fn unbounded_polyhedron_splits_vertex_and_rays() {
        let hs = vec![(v(&[1.0, 0.0]), 0.0), (v(&[0.0, 1.0]), 0.0)];
        let p = polyhedron_vertices(2, &hs);
        assert_eq!(p.vertices.len(), 1);
        assert!(p.vertices[0].norm() < 1e-12);
        assert_eq!(p.rays.len(), 2);
        assert!(p.lineality.is_empty());
    }

    #[test]
    fn infeasible_system_has_no_vertices() {
        let hs = vec![(v(&[1.0]), 1.0), (v(&[-1.0]), 0.0)];
        let p = polyhedron_vertices(1, &hs);
        assert!(p.is_empty());
    }

    #[test]
    fn triangle_from_facets() {
        let hs = vec![
            (v(&[1.0, 0.0]), 0.0),
            (v(&[0.0, 1.0]), 0.0),
            (v(&[-1.0, -1.0]), -1.0),
        ];
        let p = polyhedron_vertices(2, &hs);
        assert_eq!(p.vertices.len(), 3);
        assert!(p.rays.is_empty());
        assert!((&p.vertices[2] - v(&[1.0, 0.0])).norm() < 1e-12);
    }

    /// Many tangent planes to the unit sphere: every vertex must satisfy all
    /// constraints, be tight on at least three, and lie outside the ball.
    #[test]
    fn sphere_tangent_planes_stress() {
        let mut rng = StdRng::seed_from_u64(3);
        let mut hs = Vec::new();
        for _ in 0..60 {
            let u = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0)).normalize();
            hs.push((-u, -1.0));
        }
        let p = polyhedron_vertices(3, &hs);
        assert!(p.rays.is_empty() && p.lineality.is_empty());
        assert!(p.vertices.len() >= 60);
        for vx in &p.vertices {
            let mut tight = 0;
            for (n, b) in &hs {
                let slack = n.dot(vx) - b;
                assert!(slack >= -1e-7);
                if slack < 1e-7 {
                    tight += 1;
                }
            }
            assert!(tight >= 3);
            assert!(vx.norm() >= 1.0 - 1e-9);
        }
    }
}
