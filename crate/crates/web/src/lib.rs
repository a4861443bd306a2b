//! WebAssembly bindings for the demo page in `www/`. Every entry point takes
//! a polytope in the JSON file format and returns a JSON string; numbers meant
//! for drawing are floats, exact values are kept alongside as rational strings.

use momentcut::dh::{check_log_concavity, dh_profile, find_strict_local_minima};
use momentcut::lattice::{parse_rational, Rational};
use momentcut::ops::{self, BlowupParams, ClassLedger, Orientation};
use momentcut::polytope::io::{parse_polytope, write_polytope};
use momentcut::toric::classify_vertex;
use momentcut::{LabeledPolytope, Vertex};
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn f(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn rational(text: &str, what: &str) -> Result<Rational, String> {
    parse_rational(text.trim()).map_err(|e| format!("{what}: {e}"))
}

fn sorted_vertices(p: &LabeledPolytope) -> Result<Vec<Vertex>, String> {
    let mut vs = p.vertices().map_err(|e| e.to_string())?;
    vs.sort_by(|a, b| a.point.cmp(&b.point));
    Ok(vs)
}

/// Vertices of a polygon in boundary order, with their classes.
fn polygon(p: &LabeledPolytope) -> Result<Value, String> {
    if p.dim() != 2 {
        return Err(format!("drawing needs a polygon, got dimension {}", p.dim()));
    }
    let vs = sorted_vertices(p)?;
    let n = vs.len() as f64;
    let cx = vs.iter().map(|v| f(&v.point[0])).sum::<f64>() / n;
    let cy = vs.iter().map(|v| f(&v.point[1])).sum::<f64>() / n;
    let mut items = Vec::new();
    for (k, v) in vs.iter().enumerate() {
        let class = classify_vertex(p, v).map_err(|e| e.to_string())?;
        let (x, y) = (f(&v.point[0]), f(&v.point[1]));
        items.push(((y - cy).atan2(x - cx), json!({
            "index": k,
            "x": x,
            "y": y,
            "exact": v.point.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "kind": class.kind,
        })));
    }
    items.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Value::Array(items.into_iter().map(|(_, v)| v).collect()))
}

/// Sampled DH curve, walls, and the log-concavity and local-minimum verdicts.
pub fn dh_curve_json(polytope: &str, samples: usize) -> Result<String, String> {
    let p = parse_polytope(polytope).map_err(|e| e.to_string())?;
    let prof = dh_profile(&p).map_err(|e| e.to_string())?;
    let points: Vec<[f64; 2]> = prof.samples(samples.max(2)).iter().map(|(s, mu)| [f(s), f(mu)]).collect();
    let lc = check_log_concavity(&prof);
    Ok(json!({
        "points": points,
        "walls": prof.walls.iter().map(f).collect::<Vec<_>>(),
        "log_concave": lc.log_concave,
        "strict_local_minima": find_strict_local_minima(&prof),
        "profile": prof.to_json(),
    })
    .to_string())
}

/// Cut at `level` (keeping `x1 <= level`), then optionally chop the vertex
/// with the given index at `depth`.
pub fn cut_blowup_json(polytope: &str, level: &str, vertex: Option<usize>, depth: &str) -> Result<String, String> {
    let p = parse_polytope(polytope).map_err(|e| e.to_string())?.sorted();
    let before = polygon(&p)?;
    let mut cur = if level.trim().is_empty() {
        p.clone()
    } else {
        let a = rational(level, "level")?;
        ops::cut(&p, &a, Orientation::Below).map_err(|e| e.to_string())?.sorted()
    };
    let mut ledger = ClassLedger::for_base(&p);
    if let Some(k) = vertex {
        let vs = sorted_vertices(&cur)?;
        let v = vs.get(k).cloned().ok_or_else(|| format!("vertex {k} out of range (0..{})", vs.len()))?;
        let d = rational(depth, "depth")?;
        let (q, l) = ops::blowup(&cur, &BlowupParams { vertex: v, depth: d }, &ledger).map_err(|e| e.to_string())?;
        let sorted = q.sorted();
        ledger = l;
        ledger.remap(&q, &sorted).map_err(|e| e.to_string())?;
        cur = sorted;
    }
    Ok(json!({
        "before": before,
        "after": polygon(&cur)?,
        "class": ledger.describe(),
        "polytope": write_polytope(&cur),
    })
    .to_string())
}

/// The add-fixed-points pipeline with its report.
pub fn add_fixed_points_json(polytope: &str, eps: &str) -> Result<String, String> {
    let p = parse_polytope(polytope).map_err(|e| e.to_string())?.sorted();
    let e = rational(eps, "eps")?;
    let (q, ledger, report) = ops::add_fixed_points(&p, &e).map_err(|e| e.to_string())?;
    let sorted = q.sorted();
    let mut ledger = ledger;
    ledger.remap(&q, &sorted).map_err(|e| e.to_string())?;
    Ok(json!({
        "before": polygon(&p)?,
        "after": polygon(&sorted)?,
        "report": report,
        "verified": report.verified(),
        "class": ledger.describe(),
        "polytope": write_polytope(&sorted),
    })
    .to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn dh_curve(polytope: &str, samples: usize) -> Result<String, JsValue> {
    js(dh_curve_json(polytope, samples))
}

/// `vertex < 0` skips the blow-up.
#[wasm_bindgen]
pub fn cut_blowup(polytope: &str, level: &str, vertex: i32, depth: &str) -> Result<String, JsValue> {
    js(cut_blowup_json(polytope, level, usize::try_from(vertex).ok(), depth))
}

#[wasm_bindgen]
pub fn add_fixed_points(polytope: &str, eps: &str) -> Result<String, JsValue> {
    js(add_fixed_points_json(polytope, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use momentcut::corpus;

    fn text(p: &LabeledPolytope) -> String {
        write_polytope(p)
    }

    #[test]
    fn dh_curve_of_the_triangle() {
        let v: Value = serde_json::from_str(&dh_curve_json(&text(&corpus::simplex(2)), 5).unwrap()).unwrap();
        assert_eq!(v["points"].as_array().unwrap().len(), 5);
        assert_eq!(v["points"][0], json!([0.0, 1.0]));
        assert_eq!(v["log_concave"], true);
    }

    #[test]
    fn cut_then_chop() {
        let out = cut_blowup_json(&text(&corpus::unit_square()), "1/2", Some(0), "1/4").unwrap();
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["before"].as_array().unwrap().len(), 4);
        assert_eq!(v["after"].as_array().unwrap().len(), 5);
        assert!(v["class"].as_str().unwrap().contains("1/2*pi"));
    }

    #[test]
    fn pipeline_on_the_z2_example() {
        let v: Value = serde_json::from_str(&add_fixed_points_json(&text(&corpus::pex2()), "1/4").unwrap()).unwrap();
        assert_eq!(v["verified"], true);
        assert_eq!(v["after"].as_array().unwrap().len(), 5);
    }

    #[test]
    fn errors_are_messages() {
        assert!(cut_blowup_json(&text(&corpus::unit_square()), "0", None, "").unwrap_err().contains("not regular"));
        assert!(dh_curve_json("{", 3).is_err());
        assert!(polygon(&corpus::cube(3)).is_err());
    }
}
