//! Toric readings of a labeled polytope: vertex isotropy, edge generators,
//! circle weights at fixed points, stabilizers of the `x_1` circle over
//! faces, and its fixed-point components.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{
    half_sum_integral, integer_kernel, lattice_index, primitive_direction, rank_int, Int,
    IntVector, LatticeIndex, Rational,
};
use crate::polytope::{edge_directions, LabeledPolytope, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Smooth,
    Z2Singular,
    OtherOrbifold,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexClass {
    pub kind: VertexKind,
    /// Index of the lattice spanned by the active normals.
    pub index: Int,
    pub half_sum_integral: bool,
}

/// Smooth when the active normals form a lattice basis; Z2-singular when
/// they span an index-2 sublattice with integral half-sum and every active
/// facet has label 1.
pub fn classify_vertex(p: &LabeledPolytope, v: &Vertex) -> Result<VertexClass> {
    let normals: Vec<IntVector> = v.active.iter().map(|&i| p.facet(i).normal.clone()).collect();
    let index = match lattice_index(&normals)? {
        LatticeIndex::Index(i) => i,
        LatticeIndex::Degenerate => return Err(Error::DegenerateVertex),
    };
    let half = half_sum_integral(&normals);
    let unlabeled = v.active.iter().all(|&i| p.facet(i).label == 1);
    let kind = if index.is_one() {
        VertexKind::Smooth
    } else if index == Int::from(2) && half && unlabeled {
        VertexKind::Z2Singular
    } else {
        VertexKind::OtherOrbifold
    };
    Ok(VertexClass { kind, index, half_sum_integral: half })
}

/// Primitive edge directions at a simple vertex, one per active facet (in the
/// order of `v.active`): the edge obtained by leaving that facet.
pub fn edge_generators(p: &LabeledPolytope, v: &Vertex) -> Result<Vec<IntVector>> {
    if v.active.len() != p.dim() {
        return Err(Error::DegenerateVertex);
    }
    let dirs = edge_directions(p.facets(), &v.active).ok_or(Error::DegenerateVertex)?;
    dirs.iter().map(|d| primitive_direction(d)).collect()
}

/// Sorted multiset of integer weights.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightMultiset(Vec<Int>);

impl WeightMultiset {
    pub fn new(mut w: Vec<Int>) -> Self {
        w.sort();
        WeightMultiset(w)
    }

    pub fn from_i64s(w: &[i64]) -> Self {
        WeightMultiset::new(w.iter().map(|&x| Int::from(x)).collect())
    }

    pub fn weights(&self) -> &[Int] {
        &self.0
    }

    pub fn negated(&self) -> Self {
        WeightMultiset::new(self.0.iter().map(|x| -x).collect())
    }

    /// `{-m, 1, ..., 1}` with `n` entries.
    pub fn is_pattern(&self, m: i64, n: usize) -> bool {
        *self == Self::pattern(m, n)
    }

    pub fn pattern(m: i64, n: usize) -> Self {
        let mut w = vec![Int::from(-m)];
        w.extend(std::iter::repeat_n(Int::one(), n - 1));
        WeightMultiset::new(w)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(ToString::to_string).collect()
    }
}

impl fmt::Display for WeightMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.to_strings();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Pairings of the circle direction `xi` with the edge generators at `v`.
pub fn weights_at_vertex(p: &LabeledPolytope, v: &Vertex, xi: &IntVector) -> Result<WeightMultiset> {
    if xi.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: xi.dim() });
    }
    Ok(WeightMultiset::new(edge_generators(p, v)?.iter().map(|e| xi.dot(e)).collect()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilizerOrder {
    Finite(String),
    /// The circle fixes the face pointwise.
    Infinite,
}

impl StabilizerOrder {
    pub fn finite(n: Int) -> Self {
        StabilizerOrder::Finite(n.to_string())
    }

    pub fn value(&self) -> Option<Int> {
        match self {
            StabilizerOrder::Finite(s) => s.parse().ok(),
            StabilizerOrder::Infinite => None,
        }
    }
}

impl fmt::Display for StabilizerOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabilizerOrder::Finite(s) => write!(f, "{s}"),
            StabilizerOrder::Infinite => write!(f, "infinite"),
        }
    }
}

/// Order of `{ s in R/Z : s e_1 in span_R(normals of face) + Z^n }`.
///
/// The integer kernel of the face normals is a saturated lattice whose basis
/// `w_1..w_r` maps `Z^n / (Z^n cap span)` isomorphically onto `Z^r`; the
/// order is the divisibility of the image of `e_1`, i.e. the gcd of the first
/// entries of the `w_j`. A facet label `k` multiplies the order of a facet
/// by `k`.
pub fn circle_stabilizer_order(p: &LabeledPolytope, face: &[usize]) -> Result<StabilizerOrder> {
    let n = p.dim();
    let labeled = face.iter().any(|&i| p.facet(i).label > 1);
    if labeled && face.len() > 1 {
        return Err(Error::LabeledFaceUnsupported { face: face.to_vec() });
    }
    let normals: Vec<IntVector> = face.iter().map(|&i| p.facet(i).normal.clone()).collect();
    let kernel = integer_kernel(&normals, n);
    let g = kernel.iter().fold(Int::zero(), |g, w| num_integer::Integer::gcd(&g, &w[0]));
    if g.is_zero() {
        return Ok(StabilizerOrder::Infinite);
    }
    let label = face.first().map_or(1, |&i| p.facet(i).label);
    Ok(StabilizerOrder::finite(g * Int::from(label)))
}

/// A nonempty face, identified by the facets containing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub facets: Vec<usize>,
    /// Indices into the polytope's sorted vertex list.
    pub vertices: Vec<usize>,
}

/// All nonempty proper faces of a simple polytope.
pub fn faces(p: &LabeledPolytope) -> Result<(Vec<Vertex>, Vec<Face>)> {
    let vs = p.vertices()?;
    let mut map: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (k, v) in vs.iter().enumerate() {
        let n = v.active.len();
        for mask in 1u32..(1 << n) {
            let s: Vec<usize> = (0..n).filter(|b| mask & (1 << b) != 0).map(|b| v.active[b]).collect();
            map.entry(s).or_default().push(k);
        }
    }
    let faces = map.into_iter().map(|(facets, vertices)| Face { facets, vertices }).collect();
    Ok((vs, faces))
}

fn contains_e1(p: &LabeledPolytope, facets: &[usize]) -> bool {
    let mut rows: Vec<IntVector> = facets.iter().map(|&i| p.facet(i).normal.clone()).collect();
    let r = rank_int(&rows);
    rows.push(IntVector::unit(p.dim(), 0));
    rank_int(&rows) == r
}

/// A connected component of the fixed set of the `x_1` circle.
#[derive(Clone, Debug)]
pub struct FixedComponent {
    pub face: Face,
    /// Value of `x_1` on the component.
    pub level: Rational,
    pub dim: usize,
}

/// Faces on which the `x_1` circle acts trivially and which are maximal with
/// that property: `e_1` lies in the span of their normals and of no
/// smaller facet set.
pub fn fixed_components(p: &LabeledPolytope) -> Result<(Vec<Vertex>, Vec<FixedComponent>)> {
    let (vs, all) = faces(p)?;
    let fixed: Vec<&Face> = all.iter().filter(|f| contains_e1(p, &f.facets)).collect();
    let comps = fixed
        .iter()
        .filter(|f| {
            !fixed
                .iter()
                .any(|g| g.facets.len() < f.facets.len() && g.facets.iter().all(|x| f.facets.contains(x)))
        })
        .map(|f| FixedComponent {
            face: (*f).clone(),
            level: vs[f.vertices[0]].first().clone(),
            dim: p.dim() - f.facets.len(),
        })
        .collect();
    Ok((vs, comps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::lattice::rat;
    use crate::polytope::Facet;

    fn vertex_at(p: &LabeledPolytope, x: &[Rational]) -> Vertex {
        p.vertices().unwrap().into_iter().find(|v| v.point == x).expect("vertex present")
    }

    fn two_facet_corner(a: &[i64], b: &[i64]) -> (LabeledPolytope, Vertex) {
        // a big box cut by the two facets through the origin
        let mut p = corpus::box_polytope(&[8, 8])
            .transform(&crate::lattice::identity(2), &[rat(-4, 1), rat(-4, 1)])
            .unwrap();
        p = p.with_facet(Facet::new(IntVector::from_i64s(a), rat(0, 1), 1)).unwrap();
        p = p.with_facet(Facet::new(IntVector::from_i64s(b), rat(0, 1), 1)).unwrap();
        let p = p.remove_redundant();
        let v = vertex_at(&p, &[rat(0, 1), rat(0, 1)]);
        (p, v)
    }

    #[test]
    fn classify_examples() {
        let sq = corpus::unit_square();
        let c = classify_vertex(&sq, &vertex_at(&sq, &[rat(0, 1), rat(0, 1)])).unwrap();
        assert_eq!(c.kind, VertexKind::Smooth);
        assert!(c.index.is_one());

        let (p, v) = two_facet_corner(&[-1, 2], &[-1, -2]);
        let c = classify_vertex(&p, &v).unwrap();
        assert_eq!((c.kind, c.index.clone()), (VertexKind::OtherOrbifold, Int::from(4)));

        let (p, v) = two_facet_corner(&[1, 0], &[-1, 2]);
        let c = classify_vertex(&p, &v).unwrap();
        assert_eq!(c.kind, VertexKind::Z2Singular);
        assert!(c.half_sum_integral);
    }

    #[test]
    fn edge_generator_examples() {
        let sq = corpus::unit_square();
        let v = vertex_at(&sq, &[rat(0, 1), rat(0, 1)]);
        let mut e = edge_generators(&sq, &v).unwrap();
        e.sort();
        assert_eq!(e, vec![IntVector::from_i64s(&[0, 1]), IntVector::from_i64s(&[1, 0])]);

        let d3 = corpus::delta3();
        let v = vertex_at(&d3, &[rat(-1, 1), rat(0, 1), rat(0, 1)]);
        let mut e = edge_generators(&d3, &v).unwrap();
        e.sort();
        // toward (0,0,0), (1,1,0), (1,0,1)
        let mut want = vec![
            IntVector::from_i64s(&[1, 0, 0]),
            IntVector::from_i64s(&[2, 1, 0]),
            IntVector::from_i64s(&[2, 0, 1]),
        ];
        want.sort();
        assert_eq!(e, want);

        // vertex (0, 1/2) with normals (0,1) and (-1,2)
        let p = LabeledPolytope::from_i64(2, &[(&[0, 1], (1, 2)), (&[-1, 2], (1, 1)), (&[1, 0], (1, 1)), (&[0, -1], (1, 1))])
            .unwrap();
        let v = vertex_at(&p, &[rat(0, 1), rat(1, 2)]);
        let mut e = edge_generators(&p, &v).unwrap();
        e.sort();
        assert_eq!(e, vec![IntVector::from_i64s(&[-2, -1]), IntVector::from_i64s(&[1, 0])]);
    }

    #[test]
    fn weight_examples() {
        let e1 = IntVector::from_i64s(&[1, 0]);
        let sq = corpus::unit_square();
        let w = weights_at_vertex(&sq, &vertex_at(&sq, &[rat(0, 1), rat(0, 1)]), &e1).unwrap();
        assert_eq!(w, WeightMultiset::from_i64s(&[1, 0]));

        let d3 = corpus::delta3();
        let v = vertex_at(&d3, &[rat(0, 1), rat(0, 1), rat(0, 1)]);
        let w = weights_at_vertex(&d3, &v, &IntVector::unit(3, 0)).unwrap();
        assert_eq!(w, WeightMultiset::from_i64s(&[-1, 1, 1]));
        assert!(w.is_pattern(1, 3));
    }

    #[test]
    fn stabilizer_examples() {
        let p = LabeledPolytope::from_i64(2, &[(&[0, -1], (1, 1)), (&[-1, 2], (1, 1)), (&[1, 0], (1, 1)), (&[0, 1], (1, 1))])
            .unwrap();
        assert_eq!(circle_stabilizer_order(&p, &[0]).unwrap(), StabilizerOrder::finite(Int::from(1)));
        assert_eq!(circle_stabilizer_order(&p, &[1]).unwrap(), StabilizerOrder::finite(Int::from(2)));
        assert_eq!(circle_stabilizer_order(&p, &[2]).unwrap(), StabilizerOrder::Infinite);

        let labeled = LabeledPolytope::new(
            2,
            p.facets()
                .iter()
                .enumerate()
                .map(|(i, f)| Facet { label: if i == 1 { 3 } else { 1 }, ..f.clone() })
                .collect(),
        )
        .unwrap();
        assert_eq!(circle_stabilizer_order(&labeled, &[1]).unwrap(), StabilizerOrder::finite(Int::from(6)));
        assert!(matches!(
            circle_stabilizer_order(&labeled, &[1, 3]),
            Err(Error::LabeledFaceUnsupported { .. })
        ));
    }

    #[test]
    fn fixed_component_examples() {
        let (_, comps) = fixed_components(&corpus::unit_square()).unwrap();
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| c.dim == 1));

        let (vs, comps) = fixed_components(&corpus::delta3()).unwrap();
        let mut summary: Vec<(usize, Rational)> = comps.iter().map(|c| (c.dim, c.level.clone())).collect();
        summary.sort();
        assert_eq!(summary, vec![(0, rat(-1, 1)), (0, rat(0, 1)), (1, rat(1, 1))]);
        let edge = comps.iter().find(|c| c.dim == 1).unwrap();
        let pts: Vec<_> = edge.face.vertices.iter().map(|&k| vs[k].point.clone()).collect();
        assert_eq!(pts, vec![vec![rat(1, 1), rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(1, 1), rat(0, 1)]]);

        let (_, comps) = fixed_components(&corpus::pex2()).unwrap();
        let mut summary: Vec<(usize, Rational)> = comps.iter().map(|c| (c.dim, c.level.clone())).collect();
        summary.sort();
        assert_eq!(summary, vec![(0, rat(-1, 1)), (1, rat(1, 1))]);
    }
}
