//! Objective and constraint values against vectors exported from pymoo.

use cmop_ela::ProblemRegistry;
use serde::Deserialize;

#[derive(Deserialize)]
struct Case {
    id: String,
    dimension: usize,
    compare: String,
    x: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn builtin_problems_match_reference_vectors() {
    let text = include_str!("fixtures/pymoo_vectors.json");
    let cases: Vec<Case> = serde_json::from_str(text).unwrap();
    assert_eq!(cases.len(), 505);
    let registry = ProblemRegistry::with_builtins();
    let mut failures = Vec::new();
    for c in &cases {
        let p = registry.instantiate(&c.id, c.dimension).unwrap();
        let e = p.evaluate(&c.x).unwrap();
        let f_ok = e.f.len() == c.f.len() && e.f.iter().zip(&c.f).all(|(a, b)| close(*a, *b));
        let g_ok = e.g.len() == c.g.len()
            && e.g.iter().zip(&c.g).all(|(a, b)| match c.compare.as_str() {
                "sign" => (*a <= 0.0) == (*b <= 0.0),
                _ => close(*a, *b),
            });
        if !f_ok || !g_ok {
            failures.push(format!(
                "{} D={} x={:?}\n  f {:?} vs {:?}\n  g {:?} vs {:?}",
                c.id, c.dimension, c.x, e.f, c.f, e.g, c.g
            ));
        }
    }
    assert!(
        failures.is_empty(),
        "{} mismatches:\n{}",
        failures.len(),
        failures[..failures.len().min(10)].join("\n")
    );
}
