//! Named builtin problems, JSON problem specs, and validated loading.
//!
//! A problem arrives either as `builtin:<name>` or as a JSON file with
//! `kind` set to `builtin` or `lvop`. Loading always runs the structural,
//! derivative, and convexity checks before handing the problem out.

use crate::cone::PolyCone;
use crate::error::CvopError;
use crate::problem::{AffineMap, CvopProblem, FnMap};
use crate::Result;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub const BUILTIN_NAMES: &[&str] = &["expon", "hyperbola", "disk", "simplex_linear", "quad_bowl"];

/// Cone in JSON form; at least one representation must be present.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeSpec {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normals: Option<Vec<Vec<f64>>>,
}

impl ConeSpec {
    pub fn to_cone(&self) -> Result<PolyCone> {
        let gens: Option<Vec<DVector<f64>>> = self
            .generators
            .as_ref()
            .map(|g| g.iter().map(|v| DVector::from_row_slice(v)).collect());
        let norms: Option<Vec<DVector<f64>>> = self
            .normals
            .as_ref()
            .map(|n| n.iter().map(|v| DVector::from_row_slice(v)).collect());
        match (gens, norms) {
            (Some(g), Some(n)) => PolyCone::from_forms(self.dim, &g, &n),
            (Some(g), None) => PolyCone::from_generators(self.dim, &g),
            (None, Some(n)) => PolyCone::from_normals(self.dim, &n),
            (None, None) => Err(CvopError::EmptyCone),
        }
    }

    pub fn from_cone(cone: &PolyCone) -> Self {
        ConeSpec {
            dim: cone.dim(),
            generators: Some(
                cone.generators()
                    .iter()
                    .map(|g| g.iter().cloned().collect())
                    .collect(),
            ),
            normals: Some(
                cone.normals()
                    .iter()
                    .map(|n| n.iter().cloned().collect())
                    .collect(),
            ),
        }
    }
}

/// Optional ground truth carried by test fixtures; never consulted by the
/// algorithms themselves.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AnalyticTruth {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recession_generators: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_angles_deg: Option<Vec<f64>>,
}

/// Problem description as stored on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub kind: String,
    pub name: String,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default, rename = "C", skip_serializing_if = "Option::is_none")]
    pub ordering: Option<ConeSpec>,
    #[serde(default, rename = "D", skip_serializing_if = "Option::is_none")]
    pub constraint_cone: Option<ConeSpec>,
    #[serde(default, rename = "c", skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub box_bounds: Option<BoxSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic_truth: Option<AnalyticTruth>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoxSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// Linear problem data: objective `P x` over `{x : A x >= b}` ordered by
/// `C`, with `D` acting on the rows of `A`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LvopParams {
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

fn v(x: &[f64]) -> DVector<f64> {
    DVector::from_row_slice(x)
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    if rows.is_empty() {
        return Err(CvopError::InvalidProblem("empty matrix".into()));
    }
    let ncols = rows[0].len();
    for r in rows {
        if r.len() != ncols {
            return Err(CvopError::DimensionMismatch {
                expected: ncols,
                got: r.len(),
            });
        }
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

/// Builds a named builtin. `params` may override the defaults where the
/// problem has any (the bowl centers of `quad_bowl`).
pub fn builtin(name: &str, params: &serde_json::Value) -> Result<CvopProblem> {
    match name {
        "expon" => Ok(expon()),
        "hyperbola" => Ok(hyperbola()),
        "disk" => Ok(disk()),
        "simplex_linear" => Ok(simplex_linear()),
        "quad_bowl" => quad_bowl(params),
        other => Err(CvopError::InvalidProblem(format!(
            "unknown builtin problem '{other}' (have: {})",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

/// `f(x) = (x, exp(-x))` on all of R, ordered by the plane orthant. The
/// upper image hugs its horizontal asymptote without recession in that
/// direction.
pub fn expon() -> CvopProblem {
    let f = FnMap::new(1, 2, |x: &DVector<f64>| {
        DVector::from_vec(vec![x[0], (-x[0]).exp()])
    })
    .with_jacobian(|x: &DVector<f64>| DMatrix::from_row_slice(2, 1, &[1.0, -(-x[0]).exp()]))
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

/// `f(x) = (x, 1/x)` on `x > 0`, ordered by the skew cone spanned by
/// `(2,1)` and `(1,2)`; the weight set is exactly the closed quadrant.
pub fn hyperbola() -> CvopProblem {
    let f = FnMap::new(1, 2, |x: &DVector<f64>| {
        DVector::from_vec(vec![x[0], 1.0 / x[0]])
    })
    .with_jacobian(|x: &DVector<f64>| {
        DMatrix::from_row_slice(2, 1, &[1.0, -1.0 / (x[0] * x[0])])
    })
    .with_weighted_hessian(|x: &DVector<f64>, w: &DVector<f64>| {
        let mut h = DMatrix::zeros(1, 1);
        if w[1] != 0.0 {
            h[(0, 0)] = w[1] * 2.0 / (x[0] * x[0] * x[0]);
        }
        h
    });
    let g = FnMap::new(1, 1, |x: &DVector<f64>| DVector::from_vec(vec![-x[0]]))
        .with_jacobian(|_x: &DVector<f64>| DMatrix::from_row_slice(1, 1, &[-1.0]))
        .with_weighted_hessian(|_x: &DVector<f64>, _w: &DVector<f64>| DMatrix::zeros(1, 1));
    let ordering = PolyCone::from_generators(2, &[v(&[2.0, 1.0]), v(&[1.0, 2.0])])
        .expect("fixed generators");
    let direction = ordering.default_direction().expect("pointed solid cone");
    CvopProblem {
        name: "hyperbola".into(),
        objective: Arc::new(f),
        constraint: Some(Arc::new(g)),
        ordering,
        constraint_cone: PolyCone::orthant(1),
        direction,
        start: v(&[1.0]),
        box_bounds: None,
    }
}

/// Identity objective over the closed unit disk; every support value is
/// `-|w|` and the problem is bounded in all dual directions.
pub fn disk() -> CvopProblem {
    let f = FnMap::new(2, 2, |x: &DVector<f64>| x.clone())
        .with_jacobian(|_x: &DVector<f64>| DMatrix::identity(2, 2))
        .with_weighted_hessian(|_x: &DVector<f64>, _w: &DVector<f64>| DMatrix::zeros(2, 2));
    let g = FnMap::new(2, 1, |x: &DVector<f64>| {
        DVector::from_vec(vec![x.norm_squared() - 1.0])
    })
    .with_jacobian(|x: &DVector<f64>| DMatrix::from_row_slice(1, 2, &[2.0 * x[0], 2.0 * x[1]]))
    .with_weighted_hessian(|_x: &DVector<f64>, w: &DVector<f64>| {
        DMatrix::identity(2, 2) * (2.0 * w[0])
    });
    CvopProblem {
        name: "disk".into(),
        objective: Arc::new(f),
        constraint: Some(Arc::new(g)),
        ordering: PolyCone::orthant(2),
        constraint_cone: PolyCone::orthant(1),
        direction: v(&[1.0, 1.0]).normalize(),
        start: v(&[0.0, 0.0]),
        box_bounds: None,
    }
}

/// Identity objective over `{x >= 0, x1 + x2 >= 1}`: a polyhedral problem
/// whose upper image is the diamond-truncated orthant.
pub fn simplex_linear() -> CvopProblem {
    let p = DMatrix::identity(2, 2);
    let a = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 1.0, 0.0, 0.0, 1.0]);
    let b = v(&[1.0, 0.0, 0.0]);
    lvop_problem("simplex_linear", p, a, b, None, None, None, None)
}

/// Two shifted paraboloids `(|x - a|^2, |x - b|^2)`; bounded for every
/// dual weight. Params: `a`, `b` as 2-vectors.
pub fn quad_bowl(params: &serde_json::Value) -> Result<CvopProblem> {
    let read = |key: &str, default: [f64; 2]| -> Result<DVector<f64>> {
        match params.get(key) {
            None => Ok(v(&default)),
            Some(val) => {
                let arr: Vec<f64> = serde_json::from_value(val.clone())
                    .map_err(CvopError::from_serde)?;
                if arr.len() != 2 {
                    return Err(CvopError::DimensionMismatch {
                        expected: 2,
                        got: arr.len(),
                    });
                }
                Ok(v(&arr))
            }
        }
    };
    let a = read("a", [0.0, 0.0])?;
    let b = read("b", [1.0, 1.0])?;
    let (aa, bb) = (a.clone(), b.clone());
    let f = FnMap::new(2, 2, move |x: &DVector<f64>| {
        DVector::from_vec(vec![(x - &aa).norm_squared(), (x - &bb).norm_squared()])
    });
    let (aj, bj) = (a.clone(), b.clone());
    let f = f.with_jacobian(move |x: &DVector<f64>| {
        DMatrix::from_row_slice(
            2,
            2,
            &[
                2.0 * (x[0] - aj[0]),
                2.0 * (x[1] - aj[1]),
                2.0 * (x[0] - bj[0]),
                2.0 * (x[1] - bj[1]),
            ],
        )
    });
    let f = f.with_weighted_hessian(|_x: &DVector<f64>, w: &DVector<f64>| {
        DMatrix::identity(2, 2) * (2.0 * (w[0] + w[1]))
    });
    let start = (&a + &b) * 0.5;
    Ok(CvopProblem {
        name: "quad_bowl".into(),
        objective: Arc::new(f),
        constraint: None,
        ordering: PolyCone::orthant(2),
        constraint_cone: PolyCone::orthant(1),
        direction: v(&[1.0, 1.0]).normalize(),
        start,
        box_bounds: None,
    })
}

/// Linear vector problem `min P x` over `{A x >= b}`. A strictly interior
/// start is found by a Chebyshev step when none is supplied.
#[allow(clippy::too_many_arguments)]
pub fn lvop_problem(
    name: &str,
    p: DMatrix<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
    ordering: Option<PolyCone>,
    constraint_cone: Option<PolyCone>,
    direction: Option<DVector<f64>>,
    start: Option<DVector<f64>>,
) -> CvopProblem {
    let n = p.ncols();
    let q = p.nrows();
    let m = a.nrows();
    let objective = AffineMap::linear(p);
    // g(x) = b - A x <= 0 componentwise encodes A x >= b
    let constraint = AffineMap {
        mat: -a.clone(),
        shift: b.clone(),
    };
    let ordering = ordering.unwrap_or_else(|| PolyCone::orthant(q));
    let direction = direction.unwrap_or_else(|| {
        ordering
            .default_direction()
            .expect("ordering cone validated by caller")
    });
    let start = start.unwrap_or_else(|| chebyshev_interior(&a, &b).unwrap_or(DVector::zeros(n)));
    CvopProblem {
        name: name.into(),
        objective: Arc::new(objective),
        constraint: Some(Arc::new(constraint)),
        ordering,
        constraint_cone: constraint_cone.unwrap_or_else(|| PolyCone::orthant(m)),
        direction,
        start,
        box_bounds: None,
    }
}

/// Max-inradius point of `{x : A x >= b}` through vertex enumeration of
/// the Chebyshev polytope in one extra dimension, radius capped at 1.
pub fn chebyshev_interior(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let n = a.ncols();
    let mut rows: Vec<(DVector<f64>, f64)> = Vec::with_capacity(a.nrows() + 2);
    for i in 0..a.nrows() {
        let mut r = DVector::zeros(n + 1);
        let mut norm = 0.0;
        for j in 0..n {
            r[j] = a[(i, j)];
            norm += a[(i, j)] * a[(i, j)];
        }
        r[n] = -norm.sqrt();
        rows.push((r, b[i]));
    }
    let mut tpos = DVector::zeros(n + 1);
    tpos[n] = 1.0;
    rows.push((tpos.clone(), 0.0));
    let mut tcap = DVector::zeros(n + 1);
    tcap[n] = -1.0;
    rows.push((tcap, -1.0));
    let poly = crate::dd::polyhedron_vertices(n + 1, &rows);
    let best = poly
        .vertices
        .iter()
        .max_by(|u, w| u[n].partial_cmp(&w[n]).unwrap())
        .ok_or_else(|| CvopError::InvalidProblem("constraint system is infeasible".into()))?;
    if best[n] <= 1e-9 {
        return Err(CvopError::InvalidProblem(
            "constraint system has empty interior".into(),
        ));
    }
    Ok(DVector::from_fn(n, |i, _| best[i]))
}

/// Instantiates a spec without running the validation suite.
pub fn instantiate(spec: &ProblemSpec) -> Result<CvopProblem> {
    let mut problem = match spec.kind.as_str() {
        "builtin" => builtin(&spec.name, &spec.params)?,
        "lvop" => {
            let params: LvopParams =
                serde_json::from_value(spec.params.clone()).map_err(CvopError::from_serde)?;
            let p = matrix_from_rows(&params.p)?;
            let a = matrix_from_rows(&params.a)?;
            if params.b.len() != a.nrows() {
                return Err(CvopError::DimensionMismatch {
                    expected: a.nrows(),
                    got: params.b.len(),
                });
            }
            let b = v(&params.b);
            let ordering = spec.ordering.as_ref().map(|c| c.to_cone()).transpose()?;
            let dcone = spec
                .constraint_cone
                .as_ref()
                .map(|c| c.to_cone())
                .transpose()?;
            let direction = spec.direction.as_ref().map(|d| v(d));
            let start = spec.start.as_ref().map(|s| v(s));
            lvop_problem(&spec.name, p, a, b, ordering, dcone, direction, start)
        }
        other => {
            return Err(CvopError::InvalidProblem(format!(
                "unknown problem kind '{other}' (builtin or lvop)"
            )))
        }
    };
    // overrides shared by both kinds
    if spec.kind == "builtin" {
        if let Some(c) = &spec.ordering {
            problem.ordering = c.to_cone()?;
        }
        if let Some(d) = &spec.direction {
            problem.direction = v(d);
        }
        if let Some(s) = &spec.start {
            problem.start = v(s);
        }
    }
    if let Some(bx) = &spec.box_bounds {
        if bx.lo.len() != problem.dim_x() || bx.hi.len() != problem.dim_x() {
            return Err(CvopError::DimensionMismatch {
                expected: problem.dim_x(),
                got: bx.lo.len().max(bx.hi.len()),
            });
        }
        problem.box_bounds = Some((v(&bx.lo), v(&bx.hi)));
    }
    Ok(problem)
}

/// Full load path: instantiate, then validate structure, derivatives, and
/// convexity with the given seed.
pub fn load_problem(spec: &ProblemSpec, seed: u64) -> Result<CvopProblem> {
    let problem = instantiate(spec)?;
    problem.validate()?;
    problem.gradient_check(seed)?;
    problem.convexity_check(seed)?;
    Ok(problem)
}

/// Accepts either `builtin:<name>` or a path to a JSON spec file.
pub fn load_from_arg(arg: &str, seed: u64) -> Result<(CvopProblem, ProblemSpec)> {
    let spec = if let Some(name) = arg.strip_prefix("builtin:") {
        ProblemSpec {
            kind: "builtin".into(),
            name: name.into(),
            params: serde_json::Value::Null,
            ordering: None,
            constraint_cone: None,
            direction: None,
            box_bounds: None,
            start: None,
            analytic_truth: None,
        }
    } else {
        let text = std::fs::read_to_string(arg)?;
        serde_json::from_str(&text).map_err(CvopError::from_serde)?
    };
    let problem = load_problem(&spec, seed)?;
    Ok((problem, spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SolverConfig;
    use crate::solver::{solve_weighted, ScalarStatus};

    #[test]
    fn builtins_pass_validation() {
        for name in BUILTIN_NAMES {
            let p = builtin(name, &serde_json::Value::Null).unwrap();
            p.validate().unwrap();
            p.gradient_check(42).unwrap();
            p.convexity_check(42).unwrap();
        }
    }

    #[test]
    fn lvop_from_json_spec() {
        let text = r#"{
            "kind": "lvop",
            "name": "halfline_tilt",
            "params": {"P": [[-1.0], [1.0]], "A": [[1.0]], "b": [0.0]}
        }"#;
        let spec: ProblemSpec = serde_json::from_str(text).unwrap();
        let p = load_problem(&spec, 42).unwrap();
        assert_eq!(p.dim_x(), 1);
        assert_eq!(p.dim_y(), 2);
        assert!(p.start[0] > 0.0);

        // objective (-x, x) on x >= 0: weight (1,1) is constant 0
        let cfg = SolverConfig::default();
        let verdict =
            solve_weighted(&p, &DVector::from_row_slice(&[1.0, 1.0]), &cfg).unwrap();
        assert_eq!(verdict.status, ScalarStatus::Bounded);
        assert!(verdict.value.unwrap().abs() < 1e-6);

        // weight (1,0) minimizes -x: divergent along the halfline
        let verdict =
            solve_weighted(&p, &DVector::from_row_slice(&[1.0, 0.0]), &cfg).unwrap();
        assert_eq!(verdict.status, ScalarStatus::Divergent);
    }

    #[test]
    fn chebyshev_start_is_interior() {
        // triangle {x >= 0, x1 + x2 <= 4} as A x >= b
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, -1.0, -1.0]);
        let b = DVector::from_row_slice(&[0.0, 0.0, -4.0]);
        let x = chebyshev_interior(&a, &b).unwrap();
        assert!(x[0] > 0.5 && x[1] > 0.5 && x[0] + x[1] < 3.5);

        // infeasible: x1 >= 1 and -x1 >= 0
        let a = DMatrix::from_row_slice(2, 1, &[1.0, -1.0]);
        let b = DVector::from_row_slice(&[1.0, 0.0]);
        assert!(chebyshev_interior(&a, &b).is_err());
    }

    #[test]
    fn quad_bowl_params_and_defaults() {
        let p = builtin("quad_bowl", &serde_json::Value::Null).unwrap();
        let f0 = p.objective.eval(&DVector::from_row_slice(&[0.0, 0.0]));
        assert_eq!(f0, DVector::from_row_slice(&[0.0, 2.0]));

        let params = serde_json::json!({"a": [1.0, 0.0], "b": [-1.0, 0.0]});
        let p = builtin("quad_bowl", &params).unwrap();
        let f0 = p.objective.eval(&DVector::from_row_slice(&[0.0, 0.0]));
        assert_eq!(f0, DVector::from_row_slice(&[1.0, 1.0]));
        p.gradient_check(5).unwrap();
    }

    #[test]
    fn builtin_arg_shorthand() {
        let (p, spec) = load_from_arg("builtin:disk", 42).unwrap();
        assert_eq!(p.name, "disk");
        assert_eq!(spec.kind, "builtin");
        assert!(matches!(
            load_from_arg("builtin:nope", 42),
            Err(CvopError::InvalidProblem(_))
        ));
    }

    #[test]
    fn spec_roundtrips_through_json() {
        let spec = ProblemSpec {
            kind: "lvop".into(),
            name: "wedge".into(),
            params: serde_json::json!({
                "P": [[1.0, -2.0], [0.0, 1.0]],
                "A": [[1.0, 0.0], [0.0, 1.0]],
                "b": [0.0, 0.0]
            }),
            ordering: Some(ConeSpec {
                dim: 2,
                generators: Some(vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
                normals: None,
            }),
            constraint_cone: None,
            direction: Some(vec![1.0, 1.0]),
            box_bounds: None,
            start: Some(vec![1.0, 1.0]),
            analytic_truth: Some(AnalyticTruth {
                verdict: Some("SELF_BOUNDED_UNBOUNDED".into()),
                recession_generators: Some(vec![vec![1.0, 0.0], vec![-2.0, 1.0]]),
                boundary_angles_deg: Some(vec![63.434948822922]),
            }),
        };
        let text = serde_json::to_string_pretty(&spec).unwrap();
        let back: ProblemSpec = serde_json::from_str(&text).unwrap();
        let p = load_problem(&back, 42).unwrap();
        assert_eq!(p.dim_x(), 2);
        assert_eq!(p.start, DVector::from_row_slice(&[1.0, 1.0]));
    }
}
