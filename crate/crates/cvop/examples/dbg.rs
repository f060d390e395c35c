use cvop::{hausdorff, sandwich_solve, SandwichConfig};

fn main() {
    let p = cvop::registry::builtin("simplex_linear", &serde_json::Value::Null).unwrap();
    let k = p.ordering.clone();
    let cfg = SandwichConfig {
        eps: 0.01,
        ..SandwichConfig::default()
    };
    let r = sandwich_solve(&p, &k, &cfg).unwrap();
    eprintln!("certified={} eps_cert={:.3e}", r.certified, r.eps_certified);
    eprintln!("inner points:");
    for pt in r.inner.points() {
        eprintln!("  {:?}", pt.as_slice());
    }
    eprintln!("outer points:");
    for pt in r.outer.points() {
        eprintln!("  {:?}", pt.as_slice());
    }
    let d = hausdorff(&r.outer, &r.inner);
    eprintln!("hausdorff={:?}", d);
    eprintln!("weight_log:");
    for (w, g) in &r.weight_log {
        eprintln!("  w={:?} gamma={:.6e}", w.as_slice(), g);
    }
}
