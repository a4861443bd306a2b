//! Surgery on labeled polytopes: reduction, cuts, compactification, corner
//! chops (blow-ups) with class bookkeeping, and the pipeline that trades
//! Z2 points on a cut for smooth fixed points.

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::{identity, rat, IntVector, Rational};
use crate::polytope::{io::write_polytope, Facet, LabeledPolytope, Vertex};
use crate::toric::{
    circle_stabilizer_order, classify_vertex, fixed_components, weights_at_vertex, StabilizerOrder,
    VertexKind, WeightMultiset,
};

fn strs(x: &[Rational]) -> Vec<String> {
    x.iter().map(ToString::to_string).collect()
}

fn point_str(x: &[Rational]) -> String {
    format!("({})", strs(x).join(", "))
}

pub(crate) fn require_regular(p: &LabeledPolytope, a: &Rational) -> Result<()> {
    if p.is_regular_level(a)? {
        Ok(())
    } else {
        Err(Error::NotRegularLevel(a.to_string()))
    }
}

/// Intersection with one more half-space, redundancy removed. No regularity
/// requirement; used for comparisons at critical levels.
pub fn clip(p: &LabeledPolytope, facet: Facet) -> Result<LabeledPolytope> {
    Ok(p.with_facet(facet)?.remove_redundant())
}

/// `{x_1 <= a}` as a facet.
fn below_facet(n: usize, a: &Rational) -> Facet {
    Facet::new(IntVector::unit(n, 0), a.clone(), 1)
}

/// `{x_1 >= a}` as a facet.
fn above_facet(n: usize, a: &Rational) -> Facet {
    Facet::new(IntVector::unit(n, 0).neg(), -a, 1)
}

#[derive(Clone, Debug, Serialize)]
pub struct FacetStabilizer {
    /// Facet of the reduced polytope.
    pub facet: usize,
    /// Facet of the original polytope that induces it.
    pub source: usize,
    pub order: StabilizerOrder,
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub polytope: LabeledPolytope,
    pub stabilizers: Vec<FacetStabilizer>,
}

/// The slice at a regular level, with the circle stabilizer order of each
/// inducing facet. Labels are inherited from the inducing facets unchanged.
pub fn reduce(p: &LabeledPolytope, a: &Rational) -> Result<Reduction> {
    require_regular(p, a)?;
    let sliced = p.slice(a)?.into_sliced().ok_or(Error::EmptyResult)?;
    let stabilizers = sliced
        .sources
        .iter()
        .enumerate()
        .map(|(facet, &source)| {
            Ok(FacetStabilizer { facet, source, order: circle_stabilizer_order(p, &[source])? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Reduction { polytope: sliced.polytope, stabilizers })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Orientation {
    /// Keep `x_1 <= a`.
    Below,
    /// Keep `x_1 >= a`.
    Above,
}

pub fn cut(p: &LabeledPolytope, a: &Rational, orientation: Orientation) -> Result<LabeledPolytope> {
    require_regular(p, a)?;
    let n = p.dim();
    let facet = match orientation {
        Orientation::Below => below_facet(n, a),
        Orientation::Above => above_facet(n, a),
    };
    let q = clip(p, facet)?;
    if q.vertices_exhaustive().is_empty() {
        return Err(Error::EmptyResult);
    }
    Ok(q)
}

/// Cut at `b` from above and at `a` from below.
pub fn compactify(p: &LabeledPolytope, a: &Rational, b: &Rational) -> Result<LabeledPolytope> {
    if a >= b {
        return Err(Error::Precondition(format!("compactify needs min < max, got {a} >= {b}")));
    }
    require_regular(p, a)?;
    require_regular(p, b)?;
    let upper = cut(p, b, Orientation::Below)?;
    cut(&upper, a, Orientation::Above)
}

/// Mirror image under `x_1 -> -x_1`.
pub fn reversed(p: &LabeledPolytope) -> LabeledPolytope {
    let n = p.dim();
    let mut a = identity(n);
    a[0][0] = -a[0][0].clone();
    p.transform(&a, &vec![Rational::zero(); n]).expect("reflection is unimodular")
}

#[derive(Clone, Debug)]
pub struct BlowupParams {
    /// The vertex to chop; only its point is used.
    pub vertex: Vertex,
    /// Chop depth `d`; the symplectic size is `t = 2 pi d`.
    pub depth: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerTerm {
    /// Index of the exceptional facet in the current polytope.
    pub facet: usize,
    /// Coefficient of the exceptional class in units of `t`.
    pub multiplier: Rational,
    pub depth: Rational,
    pub z2: bool,
}

/// Formal class `[omega] - sum_j m_j t_j E_j`, `t_j = 2 pi d_j`, relative to
/// a base polytope.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassLedger {
    /// Fingerprint of the polytope the base class refers to.
    pub base: Option<String>,
    pub terms: Vec<LedgerTerm>,
}

/// FNV-1a over the canonical text form.
pub fn fingerprint(p: &LabeledPolytope) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in write_polytope(&p.canonical()).bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

impl ClassLedger {
    pub fn for_base(p: &LabeledPolytope) -> Self {
        ClassLedger { base: Some(fingerprint(p)), terms: Vec::new() }
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|t| {
                json!({
                    "facet": t.facet,
                    "multiplier": t.multiplier.to_string(),
                    "depth": t.depth.to_string(),
                })
            })
            .collect();
        match &self.base {
            Some(b) => json!({ "base": b, "terms": terms }),
            None => json!({ "terms": terms }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Format(format!("ledger: {m}"));
        let base = v.get("base").and_then(Value::as_str).map(str::to_string);
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"terms\" array"))?
            .iter()
            .map(|t| {
                let facet = t.get("facet").and_then(Value::as_u64).ok_or_else(|| bad("facet"))? as usize;
                let get = |k: &str| {
                    t.get(k)
                        .and_then(Value::as_str)
                        .ok_or_else(|| bad(k))
                        .and_then(crate::lattice::parse_rational)
                };
                let multiplier = get("multiplier")?;
                let depth = get("depth")?;
                let z2 = multiplier != Rational::one();
                Ok(LedgerTerm { facet, multiplier, depth, z2 })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ClassLedger { base, terms })
    }

    /// Textual class, e.g. `[w] - 2 pi (1/4) E_4`.
    pub fn describe(&self) -> String {
        let mut s = String::from("[omega]");
        for t in &self.terms {
            let coeff = &t.multiplier * &t.depth * rat(2, 1);
            s.push_str(&format!(" - {coeff}*pi*E{}", t.facet));
        }
        s
    }

    /// Re-indexes the facet ids after `old` became `new` (facets dropped,
    /// appended or reordered, never rewritten).
    pub fn remap(&mut self, old: &LabeledPolytope, new: &LabeledPolytope) -> Result<()> {
        for t in &mut self.terms {
            let f = old.facets().get(t.facet).ok_or_else(|| {
                Error::Precondition(format!("ledger refers to facet {} which does not exist", t.facet))
            })?;
            t.facet = new
                .facets()
                .iter()
                .position(|g| g == f)
                .ok_or_else(|| Error::Internal(format!("exceptional facet {} was removed", t.facet)))?;
        }
        Ok(())
    }
}

/// Locates the vertex of `p` at the given point.
pub fn find_vertex(p: &LabeledPolytope, point: &[Rational]) -> Result<Vertex> {
    p.vertices()?
        .into_iter()
        .find(|v| v.point == point)
        .ok_or_else(|| Error::Precondition(format!("{} is not a vertex", point_str(point))))
}

/// Adds the half-space `<normal, x> <= rhs` (normal possibly imprimitive)
/// that cuts off the vertex at `point` only. Every other vertex must satisfy
/// it strictly and the result must be a valid polytope.
pub(crate) fn chop(
    p: &LabeledPolytope,
    point: &[Rational],
    normal: &IntVector,
    rhs: &Rational,
    depth: &Rational,
) -> Result<LabeledPolytope> {
    let facet = Facet::from_raw(normal, rhs, 1)?;
    for w in p.vertices()? {
        if w.point != point && !facet.slack(&w.point).is_positive() {
            return Err(Error::BlowupTooLarge(format!(
                "{depth}: vertex {} is not strictly inside the chop",
                point_str(&w.point)
            )));
        }
    }
    let mut q = p.with_facet(facet)?;
    if p.dim() == 1 {
        // on a segment the chop replaces the end facet
        q = q.remove_redundant();
    }
    let report = q.validate();
    if !report.is_valid() {
        return Err(Error::BlowupTooLarge(format!("{depth}: result is not a valid polytope: {report}")));
    }
    Ok(q)
}

fn exceptional_index(q: &LabeledPolytope, normal: &IntVector, rhs: &Rational) -> Result<usize> {
    let f = Facet::from_raw(normal, rhs, 1)?;
    q.facets()
        .iter()
        .position(|g| *g == f)
        .ok_or_else(|| Error::Internal("exceptional facet missing after chop".into()))
}

/// Chops the vertex by `sum_i <eta_i, x> <= sum_i <eta_i, v> - d` and appends
/// the exceptional term to the ledger (multiplier 1 at a smooth vertex, 1/2
/// at a Z2 vertex).
pub fn blowup(
    p: &LabeledPolytope,
    params: &BlowupParams,
    ledger: &ClassLedger,
) -> Result<(LabeledPolytope, ClassLedger)> {
    if !params.depth.is_positive() {
        return Err(Error::Precondition(format!("depth must be positive, got {}", params.depth)));
    }
    let v = find_vertex(p, &params.vertex.point)?;
    let class = classify_vertex(p, &v)?;
    if let Some(&i) = v.active.iter().find(|&&i| p.facet(i).label != 1) {
        return Err(Error::VertexNotBlowable(format!(
            "facet {i} through {} has label {}",
            point_str(&v.point),
            p.facet(i).label
        )));
    }
    let multiplier = match class.kind {
        VertexKind::Smooth => Rational::one(),
        VertexKind::Z2Singular => rat(1, 2),
        VertexKind::OtherOrbifold => {
            return Err(Error::VertexNotBlowable(format!(
                "{} has isotropy of index {}",
                point_str(&v.point),
                class.index
            )))
        }
    };
    let n = p.dim();
    let mut sum = IntVector(vec![0.into(); n]);
    let mut rhs = Rational::zero();
    for &i in &v.active {
        let f = p.facet(i);
        sum = sum.add(&f.normal);
        rhs += f.normal.dot_rat(&v.point);
    }
    rhs -= &params.depth;
    let q = chop(p, &v.point, &sum, &rhs, &params.depth)?;
    let mut out = ledger.clone();
    out.remap(p, &q)?;
    out.terms.push(LedgerTerm {
        facet: exceptional_index(&q, &sum, &rhs)?,
        multiplier,
        depth: params.depth.clone(),
        z2: class.kind == VertexKind::Z2Singular,
    });
    Ok((q, out))
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineBlowup {
    pub vertex: Vec<String>,
    pub exceptional_facet: usize,
    pub depth: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct NewFixedVertex {
    pub point: Vec<String>,
    pub weights: Vec<String>,
    pub expected_weights: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub eps: String,
    /// Z2 vertices found on the cut facet.
    pub z2_vertices: Vec<Vec<String>>,
    /// Smooth vertices on the cut facet (left alone).
    pub smooth_vertices: usize,
    pub blowups: Vec<PipelineBlowup>,
    pub new_fixed_vertices: Vec<NewFixedVertex>,
    /// Result equals the input on `{x_1 <= 0}`.
    pub agrees_below_zero: bool,
    /// Number of vertices at level 0 equals the number of Z2 vertices.
    pub count_matches: bool,
    /// Every vertex at level 0 has weights `{-2, 1, ..., 1}`.
    pub weights_match: bool,
}

impl PipelineReport {
    pub fn verified(&self) -> bool {
        self.agrees_below_zero && self.count_matches && self.weights_match
    }
}

/// Cut at `eps` and chop every Z2 vertex on the new facet at depth `eps`.
pub fn add_fixed_points(
    p: &LabeledPolytope,
    eps: &Rational,
) -> Result<(LabeledPolytope, ClassLedger, PipelineReport)> {
    if !eps.is_positive() {
        return Err(Error::Precondition(format!("eps must be positive, got {eps}")));
    }
    p.check_valid()?;
    require_regular(p, eps)?;
    require_regular(p, &Rational::zero())?;
    let (_, comps) = fixed_components(p)?;
    if let Some(c) = comps.iter().find(|c| c.level.is_positive() && &c.level <= eps) {
        return Err(Error::Precondition(format!(
            "a fixed component of dimension {} lies at level {} inside (0, {eps}]",
            c.dim, c.level
        )));
    }
    let n = p.dim();
    let cut_p = cut(p, eps, Orientation::Below)?;
    let new_facet = below_facet(n, eps);
    let fi = cut_p
        .facets()
        .iter()
        .position(|f| *f == new_facet)
        .ok_or_else(|| Error::Precondition(format!("the level {eps} does not meet the polytope")))?;
    let mut z2 = Vec::new();
    let mut smooth = 0;
    for v in cut_p.vertices()? {
        if !v.active.contains(&fi) {
            continue;
        }
        match classify_vertex(&cut_p, &v)?.kind {
            VertexKind::Smooth => smooth += 1,
            VertexKind::Z2Singular => z2.push(v),
            VertexKind::OtherOrbifold => {
                return Err(Error::Precondition(format!(
                    "vertex {} on the cut facet is neither smooth nor Z2",
                    point_str(&v.point)
                )))
            }
        }
    }
    let mut cur = cut_p;
    let mut ledger = ClassLedger::for_base(p);
    let mut blowups = Vec::new();
    for v in &z2 {
        let params = BlowupParams { vertex: v.clone(), depth: eps.clone() };
        let (q, l) = blowup(&cur, &params, &ledger)?;
        blowups.push(PipelineBlowup {
            vertex: strs(&v.point),
            exceptional_facet: l.terms.last().expect("blowup adds a term").facet,
            depth: eps.to_string(),
        });
        cur = q;
        ledger = l;
    }
    let zero = Rational::zero();
    let agrees_below_zero = clip(&cur, below_facet(n, &zero))?.canonical_equal(&clip(p, below_facet(n, &zero))?);
    let pattern = WeightMultiset::pattern(2, n);
    let e1 = IntVector::unit(n, 0);
    let mut new_fixed = Vec::new();
    for v in cur.vertices()?.iter().filter(|v| v.first().is_zero()) {
        let w = weights_at_vertex(&cur, v, &e1)?;
        new_fixed.push(NewFixedVertex {
            point: strs(&v.point),
            expected_weights: w == pattern,
            weights: w.to_strings(),
        });
    }
    let report = PipelineReport {
        eps: eps.to_string(),
        z2_vertices: z2.iter().map(|v| strs(&v.point)).collect(),
        smooth_vertices: smooth,
        blowups,
        count_matches: new_fixed.len() == z2.len(),
        weights_match: new_fixed.iter().all(|v| v.expected_weights),
        new_fixed_vertices: new_fixed,
        agrees_below_zero,
    };
    Ok((cur, ledger, report))
}
