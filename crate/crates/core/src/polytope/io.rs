//! Text format for labeled polytopes:
//!
//! ```text
//! {
//!   "dim": 2,
//!   "facets": [
//!     {"normal": [-1, 2], "offset": "1", "label": 1}
//!   ]
//! }
//! ```
//!
//! Each facet means `<normal, x> <= offset`. Output is deterministic and
//! parses back to the identical polytope, so `write(parse(write(p)))` is
//! byte-identical to `write(p)`.

use num_traits::ToPrimitive;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::lattice::{parse_rational, Int, IntVector, Rational};

use super::{Facet, LabeledPolytope};

fn field<'a>(obj: &'a Value, key: &str, ctx: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::Format(format!("{ctx}: missing \"{key}\"")))
}

fn parse_offset(v: &Value, ctx: &str) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()),
        Value::Number(n) => parse_rational(&n.to_string()).map_err(|e| Error::Format(format!("{ctx}: {e}"))),
        _ => Err(Error::Format(format!("{ctx}: offset must be a \"p/q\" string"))),
    }
}

fn parse_int(v: &Value, ctx: &str) -> Result<Int> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Int::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(Int::from(u))
            } else {
                Err(Error::Format(format!("{ctx}: normal entries must be integers, got {n}")))
            }
        }
        Value::String(s) => s
            .parse()
            .map_err(|_| Error::Format(format!("{ctx}: bad integer {s:?}"))),
        _ => Err(Error::Format(format!("{ctx}: normal entries must be integers"))),
    }
}

pub fn parse_polytope(text: &str) -> Result<LabeledPolytope> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let dim = field(&root, "dim", "polytope")?
        .as_u64()
        .ok_or_else(|| Error::Format("\"dim\" must be a positive integer".into()))? as usize;
    let facets = field(&root, "facets", "polytope")?
        .as_array()
        .ok_or_else(|| Error::Format("\"facets\" must be an array".into()))?;
    let mut out = Vec::with_capacity(facets.len());
    for (i, f) in facets.iter().enumerate() {
        let ctx = format!("facet {i}");
        let normal = field(f, "normal", &ctx)?
            .as_array()
            .ok_or_else(|| Error::Format(format!("{ctx}: \"normal\" must be an array")))?
            .iter()
            .map(|x| parse_int(x, &ctx))
            .collect::<Result<Vec<_>>>()?;
        let normal = IntVector(normal);
        if normal.dim() != dim {
            return Err(Error::Format(format!("{ctx}: normal has {} entries, dim is {dim}", normal.dim())));
        }
        let offset = parse_offset(field(f, "offset", &ctx)?, &ctx)?;
        let label = match f.get("label") {
            None => 1,
            Some(v) => v
                .as_u64()
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::Format(format!("{ctx}: label must be an integer >= 1")))?,
        };
        if normal.is_zero() {
            return Err(Error::Format(format!("{ctx}: zero normal")));
        }
        let g = normal.content();
        if g != Int::from(1) {
            let fixed = Facet::from_raw(&normal, &offset, label)?;
            return Err(Error::Format(format!(
                "{ctx}: normal {normal} is not primitive; the same half-space is \
                 {{\"normal\": {}, \"offset\": \"{}\"}}",
                json_ints(&fixed.normal),
                fixed.offset
            )));
        }
        out.push(Facet::new(normal, offset, label));
    }
    LabeledPolytope::new(dim, out)
}

fn json_ints(v: &IntVector) -> String {
    let parts: Vec<String> = v
        .0
        .iter()
        .map(|x| match x.to_i64() {
            Some(i) => i.to_string(),
            None => format!("\"{x}\""),
        })
        .collect();
    format!("[{}]", parts.join(", "))
}

/// Serializes facets in their stored order.
pub fn write_polytope(p: &LabeledPolytope) -> String {
    let mut s = String::new();
    s.push_str("{\n");
    s.push_str(&format!("  \"dim\": {},\n", p.dim()));
    s.push_str("  \"facets\": [");
    for (i, f) in p.facets().iter().enumerate() {
        s.push_str(if i == 0 { "\n" } else { ",\n" });
        s.push_str(&format!(
            "    {{\"normal\": {}, \"offset\": \"{}\", \"label\": {}}}",
            json_ints(&f.normal),
            f.offset,
            f.label
        ));
    }
    if !p.facets().is_empty() {
        s.push_str("\n  ");
    }
    s.push_str("]\n}\n");
    s
}

/// The JSON value of a polytope, for embedding in reports.
pub fn polytope_json(p: &LabeledPolytope) -> Value {
    serde_json::from_str(&write_polytope(p)).expect("writer emits valid JSON")
}
