//! Crossing a critical level through isolated fixed vertices with weights
//! `{-1, 1, ..., 1}` or `{-2, 1, ..., 1}`: the slice above is the slice
//! continued from below with one corner chop per fixed vertex, at depth equal
//! to the distance travelled past the wall.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{half_sum_integral, lattice_index, rat, rat_int, Int, IntVector, LatticeIndex, Rational};
use crate::ops::{chop, reversed};
use crate::polytope::{edge_directions, Facet, LabeledPolytope, Vertex};
use crate::toric::{classify_vertex, weights_at_vertex, VertexKind, WeightMultiset};

use super::critical_values;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingDirection {
    /// Weights `{-m, 1, ..., 1}`: the chop appears above the wall.
    Upward,
    /// Weights `{m, -1, ..., -1}`: the chop appears below the wall.
    Downward,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedVertexInfo {
    pub point: Vec<String>,
    pub weights: Vec<String>,
    pub kind: VertexKind,
    pub index: String,
    /// 1 for `{-1, 1, ..., 1}`, 2 for `{-2, 1, ..., 1}` (after orientation).
    pub multiplicity: u8,
    /// The facet that the descending edge leaves; it induces the exceptional
    /// facet of the slices past the wall.
    pub exceptional_source: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleCheck {
    /// Level in the original coordinates.
    pub s: String,
    pub depth: String,
    /// Slice equals the chopped continued slice.
    pub matches: bool,
    /// Each exceptional facet of the slice coincides with its chop.
    pub depth_law: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SlopeEntry {
    pub source: usize,
    pub normal: Vec<String>,
    /// `d offset / d s` for the induced facet, in the original `s`.
    pub slope: String,
    pub exceptional: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalTag {
    pub source: usize,
    /// Coefficient of `E_j` is `pi_multiplier * pi * |s - a|`.
    pub pi_multiplier: u8,
    pub coefficient: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct WallReport {
    pub wall: String,
    pub window: String,
    pub direction: CrossingDirection,
    pub fixed_vertices: Vec<FixedVertexInfo>,
    pub samples: Vec<SampleCheck>,
    /// Offset slopes of the slice facets on the side before the wall.
    pub slopes_before: Vec<SlopeEntry>,
    /// Offset slopes past the wall; exceptional facets are flagged.
    pub slopes_after: Vec<SlopeEntry>,
    /// Exceptional slopes agree with the chop depth law.
    pub exceptional_slopes_match: bool,
    pub class_tags: Vec<ExceptionalTag>,
    /// Facets of the slices past the wall that are not induced before it.
    pub extra_facets: usize,
    pub verified: bool,
}

struct Crossing {
    vertex: Vertex,
    m: i64,
    /// Position of the descending edge in `vertex.active`.
    down: usize,
    /// Primitive edge directions in the order of `vertex.active`.
    edges: Vec<IntVector>,
}

fn strs(x: &[Rational]) -> Vec<String> {
    x.iter().map(ToString::to_string).collect()
}

fn rest(v: &IntVector) -> IntVector {
    IntVector(v.0[1..].to_vec())
}

/// Facet induced on `{x_1 = s}` by `f`, normal kept raw.
fn induced_raw(f: &Facet, s: &Rational) -> (IntVector, Rational) {
    (rest(&f.normal), &f.offset - s * rat_int(&f.normal[0]))
}

/// Inspects the vertices at level `a` for the upward pattern.
fn upward_crossings(p: &LabeledPolytope, a: &Rational) -> Result<Vec<Crossing>> {
    let n = p.dim();
    let e1 = IntVector::unit(n, 0);
    let mut out = Vec::new();
    for v in p.vertices()?.into_iter().filter(|v| v.first() == a) {
        let class = classify_vertex(p, &v)?;
        let w = weights_at_vertex(p, &v, &e1)?;
        let m = if w.is_pattern(1, n) {
            1
        } else if w.is_pattern(2, n) {
            2
        } else {
            return Err(Error::WallNotSimpleCrossing(format!(
                "vertex ({}) has weights {w}",
                strs(&v.point).join(", ")
            )));
        };
        if class.kind != VertexKind::Smooth {
            return Err(Error::WallNotSimpleCrossing(format!(
                "vertex ({}) is not a smooth point (index {})",
                strs(&v.point).join(", "),
                class.index
            )));
        }
        if let Some(&i) = v.active.iter().find(|&&i| p.facet(i).label != 1) {
            return Err(Error::WallNotSimpleCrossing(format!("facet {i} at the wall carries a label")));
        }
        let dirs = edge_directions(p.facets(), &v.active).ok_or(Error::DegenerateVertex)?;
        let edges = dirs
            .iter()
            .map(|d| crate::lattice::primitive_direction(d))
            .collect::<Result<Vec<_>>>()?;
        let down = edges
            .iter()
            .position(|e| e[0] == Int::from(-m))
            .ok_or_else(|| Error::Internal("descending edge not found".into()))?;
        out.push(Crossing { vertex: v, m, down, edges });
    }
    Ok(out)
}

/// Whether every vertex at level `a` has a weight multiset matching the
/// downward pattern.
fn all_downward(p: &LabeledPolytope, a: &Rational) -> Result<bool> {
    let n = p.dim();
    let e1 = IntVector::unit(n, 0);
    let mut any = false;
    for v in p.vertices()?.into_iter().filter(|v| v.first() == a) {
        let w = weights_at_vertex(p, &v, &e1)?.negated();
        if !(w.is_pattern(1, n) || w.is_pattern(2, n)) {
            return Ok(false);
        }
        any = true;
    }
    Ok(any)
}

/// Verifies the wall at `a` using samples inside `(a, a + window)` (or below
/// the wall for a downward crossing).
pub fn wall_crossing_check(p: &LabeledPolytope, a: &Rational, window: &Rational) -> Result<WallReport> {
    if p.dim() < 2 {
        return Err(Error::Precondition("wall crossing needs dimension at least 2".into()));
    }
    if !window.is_positive() {
        return Err(Error::Precondition(format!("window must be positive, got {window}")));
    }
    let crit = critical_values(p)?;
    if !crit.contains(a) {
        return Err(Error::WallNotSimpleCrossing(format!("no vertex lies at level {a}")));
    }
    if let Some(c) = crit.iter().find(|c| *c != a && (*c - a).abs() < *window) {
        return Err(Error::Precondition(format!("critical value {c} lies within the window around {a}")));
    }
    if all_downward(p, a)? {
        let mut r = upward_check(&reversed(p), &-a, window)?;
        r.direction = CrossingDirection::Downward;
        r.wall = a.to_string();
        for s in &mut r.samples {
            s.s = (-crate::lattice::parse_rational(&s.s)?).to_string();
        }
        for e in r.slopes_before.iter_mut().chain(r.slopes_after.iter_mut()) {
            e.slope = (-crate::lattice::parse_rational(&e.slope)?).to_string();
        }
        for v in &mut r.fixed_vertices {
            let mut x = crate::lattice::parse_rational(&v.point[0])?;
            x = -x;
            v.point[0] = x.to_string();
            v.weights = WeightMultiset::new(v.weights.iter().map(|w| -w.parse::<Int>().expect("integer")).collect())
                .to_strings();
        }
        return Ok(r);
    }
    upward_check(p, a, window)
}

fn slopes(p: &LabeledPolytope, s: &Rational, exceptional: &[usize]) -> Result<Vec<SlopeEntry>> {
    let sp = p
        .slice(s)?
        .into_sliced()
        .ok_or_else(|| Error::Internal(format!("slice at {s} is not full-dimensional")))?;
    Ok(sp
        .sources
        .iter()
        .map(|&src| {
            let f = p.facet(src);
            let r = rest(&f.normal);
            let g = r.content();
            SlopeEntry {
                source: src,
                normal: crate::lattice::primitive(&r).expect("nonzero").0.iter().map(ToString::to_string).collect(),
                slope: (-rat_int(&f.normal[0]) / rat_int(&g)).to_string(),
                exceptional: exceptional.contains(&src),
            }
        })
        .collect())
}

fn upward_check(p: &LabeledPolytope, a: &Rational, window: &Rational) -> Result<WallReport> {
    let crossings = upward_crossings(p, a)?;
    let below = a - window / rat(2, 1);
    let lower = p
        .slice(&below)?
        .into_sliced()
        .ok_or_else(|| Error::WallNotSimpleCrossing(format!("nothing of the polytope lies below {a}")))?;
    let exceptional: Vec<usize> = crossings.iter().map(|c| c.vertex.active[c.down]).collect();

    let mut fixed_vertices = Vec::new();
    let e1 = IntVector::unit(p.dim(), 0);
    for c in &crossings {
        let class = classify_vertex(p, &c.vertex)?;
        // raw induced normals of the facets along the descending edge span an
        // index-m sublattice with integral half-sum when m = 2
        let raw: Vec<IntVector> = c
            .vertex
            .active
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != c.down)
            .map(|(_, &i)| rest(&p.facet(i).normal))
            .collect();
        let idx = lattice_index(&raw)?;
        let ok = match c.m {
            1 => idx.is(1),
            _ => idx.is(2) && half_sum_integral(&raw),
        };
        if !ok {
            return Err(Error::WallNotSimpleCrossing(format!(
                "induced normals at ({}) fail the local condition (index {:?})",
                strs(&c.vertex.point).join(", "),
                match idx {
                    LatticeIndex::Index(i) => i.to_string(),
                    LatticeIndex::Degenerate => "degenerate".into(),
                }
            )));
        }
        fixed_vertices.push(FixedVertexInfo {
            point: strs(&c.vertex.point),
            weights: weights_at_vertex(p, &c.vertex, &e1)?.to_strings(),
            kind: class.kind,
            index: class.index.to_string(),
            multiplicity: c.m as u8,
            exceptional_source: c.vertex.active[c.down],
        });
    }

    let mut samples = Vec::new();
    for frac in [rat(1, 4), rat(1, 2)] {
        let d = window * &frac;
        let s = a + &d;
        // continued slice: the facets active below, offsets extended affinely
        let continued = LabeledPolytope::new(
            p.dim() - 1,
            lower
                .sources
                .iter()
                .map(|&src| {
                    let (r, c) = induced_raw(p.facet(src), &s);
                    Facet::from_raw(&r, &c, p.facet(src).label)
                })
                .collect::<Result<Vec<_>>>()?,
        )?;
        let mut chopped = continued.clone();
        let mut chops = Vec::new();
        for c in &crossings {
            // continued vertex: back along the descending edge to level s
            let t = (a - &s) / rat(c.m, 1);
            let point: Vec<Rational> = c
                .vertex
                .point
                .iter()
                .zip(c.edges[c.down].iter())
                .skip(1)
                .map(|(x, e)| x + &t * rat_int(e))
                .collect();
            let mut normal = IntVector(vec![Int::zero(); p.dim() - 1]);
            let mut rhs = Rational::zero();
            for (k, &i) in c.vertex.active.iter().enumerate() {
                if k == c.down {
                    continue;
                }
                let (r, _) = induced_raw(p.facet(i), &s);
                rhs += r.dot_rat(&point);
                normal = normal.add(&r);
            }
            rhs -= &d;
            if !continued.vertices()?.iter().any(|v| v.point == point) {
                return Err(Error::Internal("continued vertex is missing from the continued slice".into()));
            }
            chopped = chop(&chopped, &point, &normal, &rhs, &d)?;
            chops.push((c.vertex.active[c.down], Facet::from_raw(&normal, &rhs, 1)?));
        }
        let actual = p
            .slice(&s)?
            .into_sliced()
            .ok_or_else(|| Error::Internal(format!("slice at {s} is not full-dimensional")))?;
        let matches = actual.polytope.canonical_equal(&chopped);
        let depth_law = chops.iter().all(|(src, f)| {
            actual
                .sources
                .iter()
                .position(|x| x == src)
                .is_some_and(|k| actual.polytope.facet(k) == f)
        });
        samples.push(SampleCheck { s: s.to_string(), depth: d.to_string(), matches, depth_law });
    }

    let above = a + window / rat(2, 1);
    let slopes_before = slopes(p, &below, &[])?;
    let slopes_after = slopes(p, &above, &exceptional)?;
    // the chop offset moves like sum_i (c_i - eta_i1 s) - (s - a), scaled by
    // the content of the summed normal
    let mut exceptional_slopes_match = true;
    for c in &crossings {
        let mut sum = IntVector(vec![Int::zero(); p.dim() - 1]);
        let mut first = Int::zero();
        for (k, &i) in c.vertex.active.iter().enumerate() {
            if k != c.down {
                sum = sum.add(&rest(&p.facet(i).normal));
                first += &p.facet(i).normal[0];
            }
        }
        let law = -(rat_int(&first) + rat(1, 1)) / rat_int(&sum.content());
        let src = c.vertex.active[c.down];
        let got = slopes_after.iter().find(|e| e.source == src).map(|e| e.slope.clone());
        exceptional_slopes_match &= got == Some(law.to_string());
    }
    let class_tags = crossings
        .iter()
        .map(|c| {
            let pi_multiplier = if c.m == 1 { 2 } else { 1 };
            ExceptionalTag {
                source: c.vertex.active[c.down],
                pi_multiplier,
                coefficient: if pi_multiplier == 2 { "2*pi*(s-a)".into() } else { "pi*(s-a)".into() },
            }
        })
        .collect();
    // facets that appear past the wall; on segments they replace the old ends
    let extra_facets = slopes_after
        .iter()
        .filter(|e| !slopes_before.iter().any(|b| b.source == e.source))
        .count();
    let verified = samples.iter().all(|s| s.matches && s.depth_law)
        && exceptional_slopes_match
        && extra_facets == crossings.len()
        && slopes_after.iter().all(|e| e.exceptional == !slopes_before.iter().any(|b| b.source == e.source));
    Ok(WallReport {
        wall: a.to_string(),
        window: window.to_string(),
        direction: CrossingDirection::Upward,
        fixed_vertices,
        samples,
        slopes_before,
        slopes_after,
        exceptional_slopes_match,
        class_tags,
        extra_facets,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn smooth_crossing_in_delta3() {
        let r = wall_crossing_check(&corpus::delta3(), &rat(0, 1), &rat(1, 2)).unwrap();
        assert!(r.verified, "{r:#?}");
        assert_eq!(r.fixed_vertices.len(), 1);
        assert_eq!(r.fixed_vertices[0].weights, vec!["-1", "1", "1"]);
        assert_eq!(r.samples.iter().map(|s| s.s.as_str()).collect::<Vec<_>>(), vec!["1/8", "1/4"]);
        assert_eq!(r.extra_facets, 1);
        assert_eq!(r.class_tags[0].pi_multiplier, 2);
    }

    #[test]
    fn z2_crossing_after_pipeline() {
        let (q, _, _) = crate::ops::add_fixed_points(&corpus::pex2(), &rat(1, 4)).unwrap();
        let r = wall_crossing_check(&q, &rat(0, 1), &rat(1, 4)).unwrap();
        assert!(r.verified, "{r:#?}");
        assert_eq!(r.fixed_vertices.len(), 2);
        assert!(r.fixed_vertices.iter().all(|v| v.weights == vec!["-2", "1"]));
        assert!(r.class_tags.iter().all(|t| t.pi_multiplier == 1));
    }

    #[test]
    fn downward_crossing() {
        let p = crate::ops::reversed(&corpus::delta3());
        let r = wall_crossing_check(&p, &rat(0, 1), &rat(1, 2)).unwrap();
        assert!(r.verified);
        assert_eq!(r.direction, CrossingDirection::Downward);
        assert_eq!(r.fixed_vertices[0].weights, vec!["-1", "-1", "1"]);
        assert_eq!(r.samples[0].s, "-1/8");
    }

    #[test]
    fn rejections() {
        let sq = corpus::unit_square();
        assert!(matches!(
            wall_crossing_check(&sq, &rat(1, 2), &rat(1, 4)),
            Err(Error::WallNotSimpleCrossing(_))
        ));
        assert!(matches!(wall_crossing_check(&sq, &rat(0, 1), &rat(1, 4)), Err(Error::WallNotSimpleCrossing(_))));
        assert!(matches!(
            wall_crossing_check(&corpus::delta3(), &rat(0, 1), &rat(2, 1)),
            Err(Error::Precondition(_))
        ));
    }
}
