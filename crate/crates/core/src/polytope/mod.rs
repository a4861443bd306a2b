//! Labeled rational simple polytopes in H-representation.
//!
//! A polytope is the set `{ x : <normal_i, x> <= offset_i }` with primitive
//! outward integer normals and a positive integer label per facet. The
//! V-representation is derived on demand.

mod enumerate;
pub mod io;

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{
    determinant, mat_vec, primitive, rank, rat_int, transpose, unimodular_inverse, Int,
    IntMatrix, IntVector, Rational,
};

pub(crate) use enumerate::{edge_directions, subsets};

/// Largest ambient dimension accepted by `validate`.
pub const MAX_DIM: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Facet {
    pub normal: IntVector,
    pub offset: Rational,
    pub label: u64,
}

impl Facet {
    pub fn new(normal: IntVector, offset: Rational, label: u64) -> Self {
        Facet { normal, offset, label }
    }

    /// Facet for the half-space `<raw, x> <= offset` with a possibly
    /// imprimitive normal; the normal is primitivized and the offset divided
    /// by the same factor.
    pub fn from_raw(raw: &IntVector, offset: &Rational, label: u64) -> Result<Self> {
        let g = raw.content();
        let normal = primitive(raw)?;
        Ok(Facet { normal, offset: offset / rat_int(&g), label })
    }

    pub fn slack(&self, x: &[Rational]) -> Rational {
        &self.offset - self.normal.dot_rat(x)
    }
}

impl fmt::Display for Facet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, x> <= {}", self.normal, self.offset)?;
        if self.label != 1 {
            write!(f, " [label {}]", self.label)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub point: Vec<Rational>,
    /// Sorted indices of the facets through this vertex.
    pub active: Vec<usize>,
}

impl Vertex {
    pub fn first(&self) -> &Rational {
        &self.point[0]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledPolytope {
    dim: usize,
    facets: Vec<Facet>,
}

/// One problem found by [`LabeledPolytope::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Issue {
    DimensionOutOfRange { dim: usize },
    NormalLength { facet: usize, len: usize },
    ZeroNormal { facet: usize },
    NonPrimitiveNormal { facet: usize, suggestion: String },
    ZeroLabel { facet: usize },
    DuplicateNormal { facets: Vec<usize> },
    Unbounded { direction: Vec<String> },
    Empty,
    NotFullDimensional,
    NotSimple { point: Vec<String>, facets: Vec<usize> },
    Redundant { facet: usize },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::DimensionOutOfRange { dim } => {
                write!(f, "dimension {dim} outside supported range 1..={MAX_DIM}")
            }
            Issue::NormalLength { facet, len } => write!(f, "facet {facet}: normal has length {len}"),
            Issue::ZeroNormal { facet } => write!(f, "facet {facet}: zero normal"),
            Issue::NonPrimitiveNormal { facet, suggestion } => {
                write!(f, "facet {facet}: normal not primitive; use {suggestion}")
            }
            Issue::ZeroLabel { facet } => write!(f, "facet {facet}: label must be >= 1"),
            Issue::DuplicateNormal { facets } => {
                write!(f, "facets {facets:?} share a normal (redundant facet)")
            }
            Issue::Unbounded { direction } => write!(f, "unbounded along ({})", direction.join(",")),
            Issue::Empty => write!(f, "empty"),
            Issue::NotFullDimensional => write!(f, "not full-dimensional"),
            Issue::NotSimple { point, facets } => write!(
                f,
                "not simple: vertex ({}) lies on {} facets {facets:?}",
                point.join(","),
                facets.len()
            ),
            Issue::Redundant { facet } => write!(f, "facet {facet} is redundant"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn not_simple(&self) -> bool {
        self.issues.iter().any(|i| matches!(i, Issue::NotSimple { .. }))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        write!(f, "invalid:")?;
        for i in &self.issues {
            write!(f, "\n  - {i}")?;
        }
        Ok(())
    }
}

/// Result of intersecting a polytope with a level hyperplane `{x_1 = s}`.
#[derive(Clone, Debug)]
pub enum Slice {
    /// A full-dimensional polytope in the coordinates `(x_2, ..., x_n)`.
    Full(SlicedPolytope),
    Empty,
    /// Nonempty but of dimension below `n - 1`.
    Degenerate,
}

#[derive(Clone, Debug)]
pub struct SlicedPolytope {
    pub polytope: LabeledPolytope,
    /// For each facet of `polytope`, the index of the facet of the sliced
    /// polytope that induced it.
    pub sources: Vec<usize>,
}

impl Slice {
    pub fn polytope(&self) -> Option<&LabeledPolytope> {
        match self {
            Slice::Full(s) => Some(&s.polytope),
            _ => None,
        }
    }

    pub fn into_sliced(self) -> Option<SlicedPolytope> {
        match self {
            Slice::Full(s) => Some(s),
            _ => None,
        }
    }
}

fn strs(x: &[Rational]) -> Vec<String> {
    x.iter().map(ToString::to_string).collect()
}

fn affine_rank(points: &[&Vec<Rational>]) -> usize {
    let Some(base) = points.first() else { return 0 };
    let diffs: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base.iter()).map(|(a, b)| a - b).collect())
        .collect();
    if diffs.is_empty() {
        0
    } else {
        rank(&diffs)
    }
}

impl LabeledPolytope {
    /// Builds a polytope from facets whose normals are already primitive.
    pub fn new(dim: usize, facets: Vec<Facet>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPolytope("dimension must be at least 1".into()));
        }
        for (i, f) in facets.iter().enumerate() {
            if f.normal.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: f.normal.dim() });
            }
            if f.normal.is_zero() {
                return Err(Error::InvalidPolytope(format!("facet {i}: zero normal")));
            }
            if !f.normal.content().is_one() {
                return Err(Error::InvalidPolytope(format!(
                    "facet {i}: normal {} is not primitive",
                    f.normal
                )));
            }
            if f.label == 0 {
                return Err(Error::InvalidPolytope(format!("facet {i}: label must be >= 1")));
            }
        }
        Ok(LabeledPolytope { dim, facets })
    }

    /// Builds a polytope from `(normal, offset, label)` half-spaces,
    /// primitivizing normals as needed.
    pub fn from_halfspaces(
        dim: usize,
        halfspaces: impl IntoIterator<Item = (IntVector, Rational, u64)>,
    ) -> Result<Self> {
        let facets = halfspaces
            .into_iter()
            .map(|(n, c, k)| Facet::from_raw(&n, &c, k))
            .collect::<Result<Vec<_>>>()?;
        LabeledPolytope::new(dim, facets)
    }

    /// Convenience constructor for small integer data: rows are
    /// `(normal, (offset numerator, offset denominator))`, labels 1.
    pub fn from_i64(dim: usize, rows: &[(&[i64], (i64, i64))]) -> Result<Self> {
        LabeledPolytope::from_halfspaces(
            dim,
            rows.iter()
                .map(|(n, (p, q))| (IntVector::from_i64s(n), crate::lattice::rat(*p, *q), 1)),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn facet(&self, i: usize) -> &Facet {
        &self.facets[i]
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.facets.iter().all(|f| !f.slack(x).is_negative())
    }

    /// Adds the half-space without any redundancy handling.
    pub fn with_facet(&self, facet: Facet) -> Result<Self> {
        let mut facets = self.facets.clone();
        facets.push(facet);
        LabeledPolytope::new(self.dim, facets)
    }

    /// Same polytope with facets sorted lexicographically.
    pub fn sorted(&self) -> Self {
        let mut facets = self.facets.clone();
        facets.sort();
        LabeledPolytope { dim: self.dim, facets }
    }

    /// All feasible basic points with their tight sets. Uses the pivoting walk
    /// when possible; degenerate or unbounded inputs fall back to the scan.
    pub(crate) fn basic_points(&self) -> Vec<(Vec<Rational>, Vec<usize>)> {
        match enumerate::walk(self.dim, &self.facets) {
            Ok(vs) => vs.into_iter().map(|v| (v.point, v.active)).collect(),
            Err(enumerate::WalkFailure::Empty) => Vec::new(),
            Err(_) => enumerate::exhaustive(self.dim, &self.facets),
        }
    }

    /// Reference enumeration over all facet subsets; kept for validation
    /// of the pivoting walk.
    pub fn vertices_exhaustive(&self) -> Vec<Vertex> {
        enumerate::exhaustive(self.dim, &self.facets)
            .into_iter()
            .map(|(point, active)| Vertex { point, active })
            .collect()
    }

    /// Vertices sorted lexicographically by coordinates.
    pub fn vertices(&self) -> Result<Vec<Vertex>> {
        let pts = self.basic_points();
        let mut out = Vec::with_capacity(pts.len());
        for (point, active) in pts {
            if active.len() != self.dim {
                return Err(Error::NotSimple(format!(
                    "vertex ({}) lies on {} facets",
                    strs(&point).join(","),
                    active.len()
                )));
            }
            out.push(Vertex { point, active });
        }
        Ok(out)
    }

    /// Direction of unboundedness, if any.
    fn recession_ray(&self) -> Option<Vec<Rational>> {
        let n = self.dim;
        let normals: Vec<Vec<Rational>> = self.facets.iter().map(|f| f.normal.to_rationals()).collect();
        if rank(&normals) < n {
            // a common null direction of every normal; find it by brute force
            return common_null_direction(&self.facets, n);
        }
        for subset in subsets(self.facets.len(), n - 1) {
            let rows: Vec<&IntVector> = subset.iter().map(|&i| &self.facets[i].normal).collect();
            let d = cofactor_vector(&rows, n);
            if d.iter().all(Zero::is_zero) {
                continue;
            }
            for cand in [d.clone(), d.iter().map(|x| -x).collect::<Vec<_>>()] {
                let dr: Vec<Rational> = cand.iter().map(rat_int).collect();
                if self.facets.iter().all(|f| !f.normal.dot_rat(&dr).is_positive()) {
                    return Some(dr);
                }
            }
        }
        None
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        let n = self.dim;
        if n == 0 || n > MAX_DIM {
            issues.push(Issue::DimensionOutOfRange { dim: n });
            return ValidationReport { issues };
        }
        for (i, f) in self.facets.iter().enumerate() {
            if f.normal.dim() != n {
                issues.push(Issue::NormalLength { facet: i, len: f.normal.dim() });
            } else if f.normal.is_zero() {
                issues.push(Issue::ZeroNormal { facet: i });
            } else if !f.normal.content().is_one() {
                let fixed = Facet::from_raw(&f.normal, &f.offset, f.label).expect("nonzero");
                issues.push(Issue::NonPrimitiveNormal {
                    facet: i,
                    suggestion: format!("normal {} with offset {}", fixed.normal, fixed.offset),
                });
            }
            if f.label == 0 {
                issues.push(Issue::ZeroLabel { facet: i });
            }
        }
        if !issues.is_empty() {
            return ValidationReport { issues };
        }
        let mut by_normal: std::collections::BTreeMap<&IntVector, Vec<usize>> = Default::default();
        for (i, f) in self.facets.iter().enumerate() {
            by_normal.entry(&f.normal).or_default().push(i);
        }
        for group in by_normal.into_values().filter(|g| g.len() > 1) {
            issues.push(Issue::DuplicateNormal { facets: group });
        }
        if let Some(d) = self.recession_ray() {
            issues.push(Issue::Unbounded { direction: strs(&d) });
            return ValidationReport { issues };
        }
        let pts = self.basic_points();
        if pts.is_empty() {
            issues.push(Issue::Empty);
            return ValidationReport { issues };
        }
        let all: Vec<&Vec<Rational>> = pts.iter().map(|p| &p.0).collect();
        if affine_rank(&all) < n {
            issues.push(Issue::NotFullDimensional);
            return ValidationReport { issues };
        }
        for (p, active) in &pts {
            if active.len() != n {
                issues.push(Issue::NotSimple { point: strs(p), facets: active.clone() });
            }
        }
        for i in 0..self.facets.len() {
            let on: Vec<&Vec<Rational>> =
                pts.iter().filter(|p| p.1.contains(&i)).map(|p| &p.0).collect();
            if on.len() < n || affine_rank(&on) < n - 1 {
                issues.push(Issue::Redundant { facet: i });
            }
        }
        ValidationReport { issues }
    }

    /// Ensures the polytope is valid, reporting the first problem otherwise.
    pub fn check_valid(&self) -> Result<()> {
        let r = self.validate();
        if r.is_valid() {
            return Ok(());
        }
        if r.not_simple() {
            return Err(Error::NotSimple(r.to_string()));
        }
        Err(Error::InvalidPolytope(r.to_string()))
    }

    /// Drops facets whose removal does not change the polytope. Duplicated
    /// normals keep the tightest offset. Empty, lower-dimensional and
    /// unbounded inputs are returned with only duplicates merged.
    pub fn remove_redundant(&self) -> Self {
        let n = self.dim;
        let mut merged: Vec<Facet> = Vec::new();
        for f in &self.facets {
            match merged.iter_mut().find(|g| g.normal == f.normal) {
                Some(g) => {
                    if f.offset < g.offset {
                        *g = f.clone();
                    }
                }
                None => merged.push(f.clone()),
            }
        }
        let p = LabeledPolytope { dim: n, facets: merged };
        if p.recession_ray().is_some() {
            return p;
        }
        let pts = p.basic_points();
        let all: Vec<&Vec<Rational>> = pts.iter().map(|q| &q.0).collect();
        if pts.is_empty() || affine_rank(&all) < n {
            return p;
        }
        let keep: Vec<Facet> = p
            .facets
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let on: Vec<&Vec<Rational>> =
                    pts.iter().filter(|q| q.1.contains(i)).map(|q| &q.0).collect();
                on.len() >= n && affine_rank(&on) == n - 1
            })
            .map(|(_, f)| f.clone())
            .collect();
        LabeledPolytope { dim: n, facets: keep }
    }

    /// Sorted irredundant facet list: the canonical H-representation.
    pub fn canonical(&self) -> Self {
        self.remove_redundant().sorted()
    }

    pub fn canonical_equal(&self, other: &LabeledPolytope) -> bool {
        self.dim == other.dim && self.canonical().facets == other.canonical().facets
    }

    pub fn is_regular_level(&self, a: &Rational) -> Result<bool> {
        Ok(self.vertices()?.iter().all(|v| v.first() != a))
    }

    /// Closed range of the first coordinate over the polytope.
    pub fn first_range(&self) -> Result<(Rational, Rational)> {
        let vs = self.vertices()?;
        let lo = vs.iter().map(|v| v.first().clone()).min().ok_or(Error::EmptyResult)?;
        let hi = vs.iter().map(|v| v.first().clone()).max().ok_or(Error::EmptyResult)?;
        Ok((lo, hi))
    }

    /// Intersection with `{x_1 = s}` expressed in `(x_2, ..., x_n)`.
    pub fn slice(&self, s: &Rational) -> Result<Slice> {
        let n = self.dim;
        if n < 2 {
            return Err(Error::Precondition("slice needs dimension at least 2".into()));
        }
        let mut raw: Vec<(Facet, usize)> = Vec::new();
        for (i, f) in self.facets.iter().enumerate() {
            let rest = IntVector(f.normal.0[1..].to_vec());
            let c = &f.offset - s * rat_int(&f.normal[0]);
            if rest.is_zero() {
                if c.is_negative() {
                    return Ok(Slice::Empty);
                }
                continue;
            }
            raw.push((Facet::from_raw(&rest, &c, f.label)?, i));
        }
        // duplicates: keep the tightest, ties to the lowest source index
        let mut merged: Vec<(Facet, usize)> = Vec::new();
        for (f, src) in raw {
            match merged.iter_mut().find(|(g, _)| g.normal == f.normal) {
                Some(slot) => {
                    if f.offset < slot.0.offset {
                        *slot = (f, src);
                    }
                }
                None => merged.push((f, src)),
            }
        }
        if merged.is_empty() {
            return Ok(Slice::Degenerate);
        }
        let q = LabeledPolytope { dim: n - 1, facets: merged.iter().map(|x| x.0.clone()).collect() };
        let pts = q.basic_points();
        if pts.is_empty() {
            return Ok(Slice::Empty);
        }
        let all: Vec<&Vec<Rational>> = pts.iter().map(|p| &p.0).collect();
        if affine_rank(&all) < n - 1 {
            return Ok(Slice::Degenerate);
        }
        let mut facets = Vec::new();
        let mut sources = Vec::new();
        for (i, (f, src)) in merged.into_iter().enumerate() {
            let on: Vec<&Vec<Rational>> =
                pts.iter().filter(|p| p.1.contains(&i)).map(|p| &p.0).collect();
            if on.len() >= n - 1 && affine_rank(&on) == n - 2 {
                facets.push(f);
                sources.push(src);
            }
        }
        Ok(Slice::Full(SlicedPolytope { polytope: LabeledPolytope { dim: n - 1, facets }, sources }))
    }

    /// Exact Euclidean volume by a pulling triangulation of the face lattice.
    pub fn volume(&self) -> Result<Rational> {
        let vs = self.vertices()?;
        if vs.is_empty() {
            return Ok(Rational::zero());
        }
        let n = self.dim;
        let mut simplices = Vec::new();
        pull(&vs, &BTreeSet::new(), n, &mut Vec::new(), &mut simplices);
        let mut total = Rational::zero();
        for s in &simplices {
            let base = &vs[s[0]].point;
            let rows: Vec<Vec<Rational>> = s[1..]
                .iter()
                .map(|&k| vs[k].point.iter().zip(base).map(|(a, b)| a - b).collect())
                .collect();
            total += rational_det(&rows).abs();
        }
        let fact: Int = (1..=n).map(Int::from).product();
        Ok(total / rat_int(&fact))
    }

    /// Image `{ A x + b : x in P }` for unimodular `A`.
    pub fn transform(&self, a: &IntMatrix, b: &[Rational]) -> Result<Self> {
        let n = self.dim;
        if a.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: a.len() });
        }
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: b.len() });
        }
        let inv_t = transpose(&unimodular_inverse(a)?);
        let facets = self
            .facets
            .iter()
            .map(|f| {
                let normal = mat_vec(&inv_t, &f.normal);
                let offset = &f.offset + normal.dot_rat(b);
                Facet::from_raw(&normal, &offset, f.label)
            })
            .collect::<Result<Vec<_>>>()?;
        LabeledPolytope::new(n, facets)
    }
}

impl fmt::Display for LabeledPolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "polytope in R^{} with {} facets", self.dim, self.facets.len())?;
        for (i, x) in self.facets.iter().enumerate() {
            writeln!(f, "  [{i}] {x}")?;
        }
        Ok(())
    }
}

/// Pulling triangulation: cone from the first vertex of `face` over the
/// triangulations of its facets that avoid that vertex.
fn pull(
    vs: &[Vertex],
    face: &BTreeSet<usize>,
    dim: usize,
    prefix: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let members: Vec<usize> = (0..vs.len())
        .filter(|&k| face.iter().all(|f| vs[k].active.contains(f)))
        .collect();
    let Some(&base) = members.first() else { return };
    prefix.push(base);
    if dim == 0 {
        out.push(prefix.clone());
    } else {
        let mut sub: BTreeSet<usize> = BTreeSet::new();
        for &k in &members {
            for &g in &vs[k].active {
                if !face.contains(&g) && !vs[base].active.contains(&g) {
                    sub.insert(g);
                }
            }
        }
        for g in sub {
            let mut f2 = face.clone();
            f2.insert(g);
            pull(vs, &f2, dim - 1, prefix, out);
        }
    }
    prefix.pop();
}

pub(crate) fn rational_det(rows: &[Vec<Rational>]) -> Rational {
    let n = rows.len();
    let mut m = rows.to_vec();
    let mut det = Rational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else { return Rational::zero() };
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        let piv = m[k][k].clone();
        det *= &piv;
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let factor = &m[i][k] / &piv;
            for j in k..n {
                let v = &factor * &m[k][j];
                m[i][j] -= v;
            }
        }
    }
    det
}

/// Generalized cross product of `n - 1` vectors in `Z^n`.
fn cofactor_vector(rows: &[&IntVector], n: usize) -> Vec<Int> {
    (0..n)
        .map(|k| {
            let minor: Vec<Vec<Int>> = rows
                .iter()
                .map(|r| (0..n).filter(|&j| j != k).map(|j| r[j].clone()).collect())
                .collect();
            let d = determinant(&minor);
            if k % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

fn common_null_direction(facets: &[Facet], n: usize) -> Option<Vec<Rational>> {
    let rows: Vec<IntVector> = facets.iter().map(|f| f.normal.clone()).collect();
    crate::lattice::integer_kernel(&rows, n)
        .into_iter()
        .next()
        .map(|v| v.to_rationals())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::lattice::{int, rat};

    fn pt(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(p, q)| rat(p, q)).collect()
    }

    #[test]
    fn square_is_valid_with_four_vertices() {
        let sq = corpus::unit_square();
        assert!(sq.validate().is_valid());
        let vs: Vec<_> = sq.vertices().unwrap().into_iter().map(|v| v.point).collect();
        assert_eq!(
            vs,
            vec![pt(&[(0, 1), (0, 1)]), pt(&[(0, 1), (1, 1)]), pt(&[(1, 1), (0, 1)]), pt(&[(1, 1), (1, 1)])]
        );
    }

    #[test]
    fn octahedron_is_not_simple() {
        let mut rows = Vec::new();
        for a in [-1i64, 1] {
            for b in [-1i64, 1] {
                for c in [-1i64, 1] {
                    rows.push(vec![a, b, c]);
                }
            }
        }
        let p = LabeledPolytope::from_halfspaces(
            3,
            rows.iter().map(|r| (IntVector::from_i64s(r), rat(1, 1), 1)),
        )
        .unwrap();
        let report = p.validate();
        assert!(report.not_simple(), "{report}");
        let bad = report.issues.iter().filter(|i| matches!(i, Issue::NotSimple { facets, .. } if facets.len() == 4));
        assert_eq!(bad.count(), 6);
        assert!(matches!(p.vertices(), Err(Error::NotSimple(_))));
    }

    #[test]
    fn duplicate_facet_is_redundant() {
        let sq = corpus::unit_square();
        let dup = sq.with_facet(sq.facet(0).clone()).unwrap();
        let r = dup.validate();
        assert!(r.issues.iter().any(|i| matches!(i, Issue::DuplicateNormal { .. })), "{r}");
        assert!(!r.is_valid());
        assert!(dup.canonical_equal(&sq));
    }

    #[test]
    fn unbounded_and_empty_are_reported() {
        let strip = LabeledPolytope::from_i64(2, &[(&[0, 1], (1, 1)), (&[0, -1], (0, 1)), (&[-1, 0], (0, 1))]).unwrap();
        assert!(strip.validate().issues.iter().any(|i| matches!(i, Issue::Unbounded { .. })));
        let empty = LabeledPolytope::from_i64(1, &[(&[1], (0, 1)), (&[-1], (-1, 1))]).unwrap();
        assert_eq!(empty.validate().issues, vec![Issue::Empty]);
        let flat = LabeledPolytope::from_i64(1, &[(&[1], (0, 1)), (&[-1], (0, 1))]).unwrap();
        assert_eq!(flat.validate().issues, vec![Issue::NotFullDimensional]);
    }

    #[test]
    fn tangent_facet_is_redundant() {
        // x + y <= 2 touches the unit square only at (1,1)
        let sq = corpus::unit_square();
        let p = sq.with_facet(Facet::new(IntVector::from_i64s(&[1, 1]), rat(2, 1), 1)).unwrap();
        let r = p.validate();
        assert!(r.issues.contains(&Issue::Redundant { facet: 4 }), "{r}");
        assert!(p.canonical_equal(&sq));
    }

    #[test]
    fn pex2_vertices() {
        let vs: Vec<_> = corpus::pex2().vertices().unwrap().into_iter().map(|v| v.point).collect();
        assert_eq!(vs, vec![pt(&[(-1, 1), (0, 1)]), pt(&[(1, 1), (-1, 1)]), pt(&[(1, 1), (1, 1)])]);
    }

    #[test]
    fn simplex_vertices() {
        let tri = corpus::simplex(2);
        assert_eq!(tri.vertices().unwrap().len(), 3);
    }

    #[test]
    fn slices_of_small_examples() {
        let sq = corpus::unit_square();
        let seg = sq.slice(&rat(1, 2)).unwrap().into_sliced().unwrap();
        let want = LabeledPolytope::from_i64(1, &[(&[1], (1, 1)), (&[-1], (0, 1))]).unwrap();
        assert!(seg.polytope.canonical_equal(&want));
        assert_eq!(seg.polytope.volume().unwrap(), rat(1, 1));

        let s3 = corpus::simplex(3);
        let tri = s3.slice(&rat(1, 4)).unwrap().into_sliced().unwrap().polytope;
        let want = LabeledPolytope::from_i64(
            2,
            &[(&[-1, 0], (0, 1)), (&[0, -1], (0, 1)), (&[1, 1], (3, 4))],
        )
        .unwrap();
        assert!(tri.canonical_equal(&want));

        let quad = corpus::delta3().slice(&rat(1, 2)).unwrap().into_sliced().unwrap().polytope;
        assert_eq!(quad.vertices().unwrap().len(), 4);

        assert!(matches!(sq.slice(&rat(2, 1)).unwrap(), Slice::Empty));
        assert!(matches!(corpus::delta3().slice(&rat(1, 1)).unwrap(), Slice::Degenerate));
        // tangency at a vertical edge still gives a full segment
        assert!(sq.slice(&rat(0, 1)).unwrap().polytope().is_some());
    }

    #[test]
    fn volumes() {
        assert_eq!(corpus::unit_square().volume().unwrap(), rat(1, 1));
        assert_eq!(corpus::simplex(2).volume().unwrap(), rat(1, 2));
        assert_eq!(corpus::simplex(3).volume().unwrap(), rat(1, 6));
        assert_eq!(corpus::simplex(4).volume().unwrap(), rat(1, 24));
        assert_eq!(corpus::delta3().volume().unwrap(), rat(1, 6));
        assert_eq!(corpus::cube(3).volume().unwrap(), rat(1, 1));
    }

    #[test]
    fn regular_levels() {
        let sq = corpus::unit_square();
        assert!(sq.is_regular_level(&rat(1, 2)).unwrap());
        assert!(!sq.is_regular_level(&rat(0, 1)).unwrap());
        assert!(!corpus::delta3().is_regular_level(&rat(0, 1)).unwrap());
    }

    #[test]
    fn transforms() {
        let sq = corpus::unit_square();
        let id = crate::lattice::identity(2);
        let moved = sq.transform(&id, &[rat(1, 1), rat(0, 1)]).unwrap();
        for (f, g) in sq.facets().iter().zip(moved.facets()) {
            assert_eq!(g.offset, &f.offset + f.normal.dot_rat(&[rat(1, 1), rat(0, 1)]));
        }
        let a: IntMatrix = vec![
            vec![int(-1), int(1), int(1)],
            vec![int(0), int(1), int(0)],
            vec![int(0), int(0), int(1)],
        ];
        let zero = vec![rat(0, 1); 3];
        let image = corpus::simplex(3).transform(&a, &zero).unwrap();
        assert!(image.canonical_equal(&corpus::delta3()));
        let back = image.transform(&unimodular_inverse(&a).unwrap(), &zero).unwrap();
        assert!(back.canonical_equal(&corpus::simplex(3)));
        let not_uni: IntMatrix = vec![vec![int(2), int(0)], vec![int(0), int(1)]];
        assert!(matches!(sq.transform(&not_uni, &zero[..2]), Err(Error::NotUnimodular(_))));
    }

    #[test]
    fn canonical_equality() {
        let sq = corpus::unit_square();
        let mut facets = sq.facets().to_vec();
        facets.reverse();
        assert!(sq.canonical_equal(&LabeledPolytope::new(2, facets).unwrap()));
        let big = sq.transform(&crate::lattice::identity(2), &[rat(0, 1), rat(0, 1)]).unwrap();
        assert!(sq.canonical_equal(&big));
        let scaled = LabeledPolytope::from_i64(
            2,
            &[(&[1, 0], (2, 1)), (&[-1, 0], (0, 1)), (&[0, 1], (2, 1)), (&[0, -1], (0, 1))],
        )
        .unwrap();
        assert!(!sq.canonical_equal(&scaled));
    }
}
