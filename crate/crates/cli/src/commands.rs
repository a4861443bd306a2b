use std::fs;
use std::io::{Read, Write};

use momentcut::dh::{
    check_log_concavity, critical_values, dh_profile, find_strict_local_minima, wall_crossing_check,
};
use momentcut::localmodel::{self, LinearAction, NeighborhoodSpec};
use momentcut::ops::{self, BlowupParams, ClassLedger, Orientation};
use momentcut::polytope::io::{parse_polytope, write_polytope};
use momentcut::toric::{circle_stabilizer_order, classify_vertex, fixed_components, weights_at_vertex, VertexKind};
use momentcut::{Error, IntVector, LabeledPolytope, Rational, Vertex};
use serde_json::{json, Value};

use crate::{Check, CmdResult, Command, Io, LocalModelArgs};

pub fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Validate { io } => validate(&io),
        Command::Info { io, direction } => info(&io, direction),
        Command::Reduce { io, level } => reduce(&io, &level),
        Command::Cut { io, level, above } => {
            let p = load(&io)?;
            let o = if above { Orientation::Above } else { Orientation::Below };
            emit_polytope(&io, &ops::cut(&p, &level, o)?)
        }
        Command::Compactify { io, min, max } => {
            let p = load(&io)?;
            emit_polytope(&io, &ops::compactify(&p, &min, &max)?)
        }
        Command::Blowup { io, vertex_index, depth, ledger_in, ledger_out } => {
            blowup(&io, vertex_index, depth, ledger_in, ledger_out)
        }
        Command::AddFixedPoints { io, eps, ledger_out } => add_fixed_points(&io, &eps, ledger_out),
        Command::Reverse { io } => {
            let p = load(&io)?;
            emit_polytope(&io, &ops::reversed(&p))
        }
        Command::Dh { io, csv, samples, check_log_concavity, local_minima } => {
            dh(&io, csv, samples, check_log_concavity, local_minima)
        }
        Command::WallCheck { io, wall, window } => wall_check(&io, &wall, window),
        Command::LocalModel(args) => local_model(&args),
    }
}

fn io_err(path: &str, e: std::io::Error) -> Error {
    Error::Format(format!("{path}: {e}"))
}

fn read_text(path: &str) -> Result<String, Error> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| io_err("stdin", e))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| io_err(path, e))
    }
}

fn write_text(path: &str, text: &str) -> CmdResult {
    if path == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes()).map_err(|e| io_err("stdout", e))?;
        if !text.ends_with('\n') {
            out.write_all(b"\n").map_err(|e| io_err("stdout", e))?;
        }
        Ok(())
    } else {
        let mut text = text.to_string();
        if !text.ends_with('\n') {
            text.push('\n');
        }
        fs::write(path, text).map_err(|e| io_err(path, e))
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn load(io: &Io) -> Result<LabeledPolytope, Error> {
    parse_polytope(&read_text(&io.input)?)
}

/// Polytope to `--out`. Reports of polytope-producing commands go to stdout
/// when the polytope went to a file, and to stderr otherwise.
fn emit_polytope(io: &Io, p: &LabeledPolytope) -> CmdResult {
    write_text(&io.out, &write_polytope(&p.sorted()))
}

fn side_report(io: &Io, report: &Value, text: &str) {
    let body = if io.json { pretty(report) } else { text.to_string() };
    if io.out == "-" {
        eprintln!("{body}");
    } else {
        println!("{body}");
    }
}

fn strs(x: &[Rational]) -> Vec<String> {
    x.iter().map(ToString::to_string).collect()
}

fn point_text(x: &[Rational]) -> String {
    format!("({})", strs(x).join(", "))
}

fn sorted_vertices(p: &LabeledPolytope) -> Result<Vec<Vertex>, Error> {
    let mut vs = p.vertices()?;
    vs.sort_by(|a, b| a.point.cmp(&b.point));
    Ok(vs)
}

fn validate(io: &Io) -> CmdResult {
    let p = load(io)?;
    let report = p.validate();
    let issues: Vec<String> = report.issues.iter().map(ToString::to_string).collect();
    let body = if io.json {
        pretty(&json!({ "valid": report.is_valid(), "issues": issues }))
    } else if report.is_valid() {
        "valid".to_string()
    } else {
        format!("invalid\n{}", issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))
    };
    write_text(&io.out, &body)?;
    if report.is_valid() {
        Ok(())
    } else {
        Err(Error::InvalidPolytope(format!("{} issue(s)", issues.len())))
    }
}

fn info(io: &Io, direction: Option<Vec<i64>>) -> CmdResult {
    let p = load(io)?.sorted();
    p.check_valid()?;
    let n = p.dim();
    let xi = match direction {
        Some(d) => IntVector::from_i64s(&d),
        None => IntVector::unit(n, 0),
    };
    if xi.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: xi.dim() });
    }
    let vs = sorted_vertices(&p)?;
    let mut vertices = Vec::new();
    let mut text = format!("dimension {n}, {} facets, {} vertices\nvertices:\n", p.facets().len(), vs.len());
    for (k, v) in vs.iter().enumerate() {
        let class = classify_vertex(&p, v)?;
        let w = weights_at_vertex(&p, v, &xi)?;
        let kind = match class.kind {
            VertexKind::Smooth => "smooth",
            VertexKind::Z2Singular => "z2",
            VertexKind::OtherOrbifold => "orbifold",
        };
        text.push_str(&format!(
            "  [{k}] {} {kind} index {} weights {w}\n",
            point_text(&v.point),
            class.index
        ));
        vertices.push(json!({
            "index": k,
            "point": strs(&v.point),
            "facets": v.active,
            "kind": class.kind,
            "lattice_index": class.index.to_string(),
            "half_sum_integral": class.half_sum_integral,
            "weights": w.to_strings(),
        }));
    }
    let (_, comps) = fixed_components(&p)?;
    text.push_str("fixed components:\n");
    let components: Vec<Value> = comps
        .iter()
        .map(|c| {
            text.push_str(&format!("  facets {:?} at x1 = {} (dim {})\n", c.face.facets, c.level, c.dim));
            json!({ "facets": c.face.facets, "level": c.level.to_string(), "dim": c.dim })
        })
        .collect();
    text.push_str("facet stabilizers:\n");
    let mut stabilizers = Vec::new();
    for (i, f) in p.facets().iter().enumerate() {
        let order = circle_stabilizer_order(&p, &[i])?;
        text.push_str(&format!("  [{i}] {f}: {order}\n"));
        stabilizers.push(json!({ "facet": i, "normal": f.normal.to_string(), "label": f.label, "order": order }));
    }
    let body = if io.json {
        pretty(&json!({
            "dim": n,
            "direction": xi.to_string(),
            "vertices": vertices,
            "fixed_components": components,
            "stabilizers": stabilizers,
        }))
    } else {
        text
    };
    write_text(&io.out, &body)
}

fn reduce(io: &Io, level: &Rational) -> CmdResult {
    let p = load(io)?;
    let r = ops::reduce(&p, level)?;
    let sorted = r.polytope.sorted();
    let mut entries = Vec::new();
    let mut text = format!("reduced at x1 = {level}\n");
    for s in &r.stabilizers {
        let f = r.polytope.facet(s.facet);
        let idx = sorted.facets().iter().position(|g| g == f).expect("sorting keeps facets");
        text.push_str(&format!("  facet {idx} (from {}): stabilizer {}\n", s.source, s.order));
        entries.push(json!({ "facet": idx, "source": s.source, "order": s.order }));
    }
    entries.sort_by_key(|e| e["facet"].as_u64());
    emit_polytope(io, &sorted)?;
    side_report(io, &json!({ "level": level.to_string(), "stabilizers": entries }), text.trim_end());
    Ok(())
}

fn read_ledger(path: Option<String>, p: &LabeledPolytope) -> Result<ClassLedger, Error> {
    match path {
        Some(path) => {
            let v: Value = serde_json::from_str(&read_text(&path)?)
                .map_err(|e| Error::Format(format!("{path}: {e}")))?;
            ClassLedger::from_json(&v)
        }
        None => Ok(ClassLedger::for_base(p)),
    }
}

fn write_ledger(
    path: &Option<String>,
    ledger: &ClassLedger,
    unsorted: &LabeledPolytope,
    sorted: &LabeledPolytope,
) -> Result<ClassLedger, Error> {
    let mut l = ledger.clone();
    l.remap(unsorted, sorted)?;
    if let Some(path) = path {
        write_text(path, &pretty(&l.to_json()))?;
    }
    Ok(l)
}

fn blowup(
    io: &Io,
    vertex_index: usize,
    depth: Rational,
    ledger_in: Option<String>,
    ledger_out: Option<String>,
) -> CmdResult {
    // indices refer to the sorted form that `info` and the other commands print
    let p = load(io)?.sorted();
    let vs = sorted_vertices(&p)?;
    let vertex = vs.get(vertex_index).cloned().ok_or_else(|| {
        Error::Precondition(format!("vertex index {vertex_index} out of range (0..{})", vs.len()))
    })?;
    let ledger = read_ledger(ledger_in, &p)?;
    let point = point_text(&vertex.point);
    let (q, l) = ops::blowup(&p, &BlowupParams { vertex, depth }, &ledger)?;
    let sorted = q.sorted();
    let l = write_ledger(&ledger_out, &l, &q, &sorted)?;
    emit_polytope(io, &sorted)?;
    side_report(io, &l.to_json(), &format!("blew up {point}\nclass {}", l.describe()));
    Ok(())
}

fn add_fixed_points(io: &Io, eps: &Rational, ledger_out: Option<String>) -> CmdResult {
    let p = load(io)?;
    let (q, ledger, report) = ops::add_fixed_points(&p, eps)?;
    let sorted = q.sorted();
    let l = write_ledger(&ledger_out, &ledger, &q, &sorted)?;
    if !report.verified() {
        return Err(Error::Internal("pipeline result failed its own checks".into()));
    }
    emit_polytope(io, &sorted)?;
    let mut text = format!("cut at x1 = {eps}; {} Z2 point(s) blown up\nnew fixed vertices:\n", report.blowups.len());
    for v in &report.new_fixed_vertices {
        text.push_str(&format!("  ({}) weights {{{}}}\n", v.point.join(", "), v.weights.join(", ")));
    }
    text.push_str(&format!("class {}", l.describe()));
    let mut value = serde_json::to_value(&report).expect("reports serialize");
    value["ledger"] = l.to_json();
    side_report(io, &value, &text);
    Ok(())
}

fn dh(io: &Io, csv: Option<String>, samples: usize, log_concavity: bool, minima: bool) -> CmdResult {
    let p = load(io)?;
    let profile = dh_profile(&p)?;
    let mut out = profile.to_json();
    if log_concavity {
        out["log_concavity"] = serde_json::to_value(check_log_concavity(&profile)).expect("reports serialize");
    }
    if minima {
        out["strict_local_minima"] =
            serde_json::to_value(find_strict_local_minima(&profile)).expect("reports serialize");
    }
    if let Some(path) = csv {
        write_text(&path, &profile.to_csv(samples))?;
    }
    write_text(&io.out, &pretty(&out))
}

fn wall_check(io: &Io, wall: &Rational, window: Option<Rational>) -> CmdResult {
    let p = load(io)?;
    let window = match window {
        Some(w) => w,
        None => critical_values(&p)?
            .iter()
            .filter(|c| *c != wall)
            .map(|c| num_traits::Signed::abs(&(c - wall)))
            .min()
            .ok_or_else(|| Error::Precondition("no other critical value bounds the window; pass --window".into()))?,
    };
    let report = wall_crossing_check(&p, wall, &window)?;
    write_text(&io.out, &pretty(&serde_json::to_value(&report).expect("reports serialize")))?;
    if report.verified {
        Ok(())
    } else {
        Err(Error::Internal(format!("crossing at {wall} failed verification")))
    }
}

fn local_model(args: &LocalModelArgs) -> CmdResult {
    let action = args.weights.clone().map(LinearAction::new).transpose()?;
    let fixed = action.as_ref();
    let tol = |default: f64| args.tol.unwrap_or(default);
    let (value, ok) = match args.check {
        Check::Monotone => battery(localmodel::monotone_battery(fixed, args.trials, args.seed, tol(1e-6))?),
        Check::Solve | Check::Membership => {
            battery(localmodel::solve_battery(fixed, args.trials, args.seed, tol(1e-10))?)
        }
        Check::Npm => battery(localmodel::npm_battery(fixed, args.trials, args.seed, tol(1e-10))?),
        Check::Psh => battery(localmodel::psh_battery(args.trials, args.seed, tol(1e-9))?),
        Check::CutIdentity => battery(localmodel::cut_battery(fixed, args.trials, args.seed, tol(1e-9))?),
        Check::BlowupPotential => {
            battery(localmodel::blowup_potential_battery(fixed, args.trials, args.seed, tol(1e-5))?)
        }
        Check::Convexity => {
            let action = match action.clone() {
                Some(a) => a,
                None => LinearAction::new(vec![-1, 1])?,
            };
            let spec = NeighborhoodSpec::certified(&action, args.eps, args.eps_prime, 1.0)?;
            let r = localmodel::orbital_convexity_probe(&action, &spec, args.trials, args.seed)?;
            let ok = r.passed;
            (json!({ "check": "orbital-convexity", "weights": action.weights(), "seed": args.seed, "spec": spec, "report": r }), ok)
        }
    };
    write_text(&args.out, &pretty(&value))?;
    if ok {
        Ok(())
    } else {
        Err(Error::Internal("local-model check failed".into()))
    }
}

fn battery(r: localmodel::BatteryReport) -> (Value, bool) {
    let ok = r.ok();
    (serde_json::to_value(&r).expect("reports serialize"), ok)
}
