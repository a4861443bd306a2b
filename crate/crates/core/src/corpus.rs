//! Named example polytopes used by tests, the CLI and the demo page.

use crate::lattice::{rat, IntVector};
use crate::polytope::LabeledPolytope;

fn build(dim: usize, rows: &[(&[i64], (i64, i64))]) -> LabeledPolytope {
    LabeledPolytope::from_i64(dim, rows).expect("corpus polytope data is well formed")
}

/// `[0,1]^2`
pub fn unit_square() -> LabeledPolytope {
    cube(2)
}

/// `[0,1]^n`
pub fn cube(n: usize) -> LabeledPolytope {
    box_polytope(&vec![1; n])
}

/// `[0, s_1] x ... x [0, s_n]`
pub fn box_polytope(sides: &[i64]) -> LabeledPolytope {
    let n = sides.len();
    let mut halfspaces = Vec::new();
    for (i, &s) in sides.iter().enumerate() {
        let mut e = vec![0i64; n];
        e[i] = 1;
        halfspaces.push((IntVector::from_i64s(&e), rat(s, 1), 1));
        e[i] = -1;
        halfspaces.push((IntVector::from_i64s(&e), rat(0, 1), 1));
    }
    LabeledPolytope::from_halfspaces(n, halfspaces).expect("box")
}

/// Standard simplex `x_i >= 0, sum x_i <= 1`.
pub fn simplex(n: usize) -> LabeledPolytope {
    scaled_simplex(n, 1)
}

pub fn scaled_simplex(n: usize, size: i64) -> LabeledPolytope {
    let mut halfspaces = Vec::new();
    for i in 0..n {
        let mut e = vec![0i64; n];
        e[i] = -1;
        halfspaces.push((IntVector::from_i64s(&e), rat(0, 1), 1));
    }
    halfspaces.push((IntVector::from_i64s(&vec![1; n]), rat(size, 1), 1));
    LabeledPolytope::from_halfspaces(n, halfspaces).expect("simplex")
}

/// `conv{(0,0,0), (-1,0,0), (1,1,0), (1,0,1)}`, a unimodular image of the
/// standard 3-simplex with a single interior wall at `x_1 = 0`.
pub fn delta3() -> LabeledPolytope {
    build(
        3,
        &[
            (&[1, -1, -1], (0, 1)),
            (&[0, -1, 0], (0, 1)),
            (&[0, 0, -1], (0, 1)),
            (&[-1, 2, 2], (1, 1)),
        ],
    )
}

/// `conv{(-1,0), (1,1), (1,-1)}`; the two vertices on `x_1 = 1` are
/// Z2-singular after cutting just right of `x_1 = 0`.
pub fn pex2() -> LabeledPolytope {
    build(2, &[(&[-1, 2], (1, 1)), (&[-1, -2], (1, 1)), (&[1, 0], (1, 1))])
}

/// Hirzebruch trapezoid `x >= 0`, `0 <= y <= 1`, `x + k y <= 2 + k`.
pub fn hirzebruch(k: i64) -> LabeledPolytope {
    build(
        2,
        &[(&[-1, 0], (0, 1)), (&[0, -1], (0, 1)), (&[0, 1], (1, 1)), (&[1, k], (2 + k, 1))],
    )
}

/// Triangle of size 3 with all three corners chopped at depth 1.
pub fn hexagon() -> LabeledPolytope {
    build(
        2,
        &[
            (&[-1, 0], (0, 1)),
            (&[0, -1], (0, 1)),
            (&[1, 1], (3, 1)),
            (&[-1, -1], (-1, 1)),
            (&[1, 0], (2, 1)),
            (&[0, 1], (2, 1)),
        ],
    )
}

/// Unit square with the corner at the origin chopped at depth 1/2.
pub fn chopped_square() -> LabeledPolytope {
    build(
        2,
        &[
            (&[-1, 0], (0, 1)),
            (&[0, -1], (0, 1)),
            (&[1, 0], (1, 1)),
            (&[0, 1], (1, 1)),
            (&[-1, -1], (-1, 2)),
        ],
    )
}

/// Unit cube with the corner at the origin chopped at depth 1/3.
pub fn chopped_cube() -> LabeledPolytope {
    cube(3)
        .with_facet(crate::polytope::Facet::new(IntVector::from_i64s(&[-1, -1, -1]), rat(-1, 3), 1))
        .expect("chopped cube")
}

/// Triangle times an interval.
pub fn prism() -> LabeledPolytope {
    build(
        3,
        &[
            (&[-1, 0, 0], (0, 1)),
            (&[0, -1, 0], (0, 1)),
            (&[1, 1, 0], (1, 1)),
            (&[0, 0, 1], (1, 1)),
            (&[0, 0, -1], (0, 1)),
        ],
    )
}

/// Unit 4-cube with all sixteen corners chopped at depth 1/4: 24 facets,
/// 64 vertices. Used as the size benchmark.
pub fn chopped_tesseract() -> LabeledPolytope {
    let mut p = cube(4);
    for mask in 0..16u32 {
        // corner c with c_i in {0,1}; active normals are -e_i at 0, +e_i at 1
        let mut normal = [0i64; 4];
        let mut at_corner = 0i64;
        for (i, slot) in normal.iter_mut().enumerate() {
            if mask & (1 << i) != 0 {
                *slot = 1;
                at_corner += 1;
            } else {
                *slot = -1;
            }
        }
        let facet = crate::polytope::Facet::new(
            IntVector::from_i64s(&normal),
            rat(at_corner, 1) - rat(1, 4),
            1,
        );
        p = p.with_facet(facet).expect("chop");
    }
    p
}

/// The Delzant polytopes whose DH functions are checked for log-concavity.
pub fn delzant_corpus() -> Vec<(&'static str, LabeledPolytope)> {
    vec![
        ("square", unit_square()),
        ("rectangle", box_polytope(&[2, 1])),
        ("triangle", simplex(2)),
        ("hirzebruch-1", hirzebruch(1)),
        ("hirzebruch-2", hirzebruch(2)),
        ("chopped-square", chopped_square()),
        ("hexagon", hexagon()),
        ("simplex-3", simplex(3)),
        ("cube-3", cube(3)),
        ("delta3", delta3()),
        ("prism", prism()),
        ("chopped-cube", chopped_cube()),
        ("simplex-4", simplex(4)),
        ("cube-4", cube(4)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::{classify_vertex, VertexKind};

    #[test]
    fn corpus_is_valid_and_delzant() {
        for (name, p) in delzant_corpus() {
            let r = p.validate();
            assert!(r.is_valid(), "{name}: {r}");
            for v in p.vertices().unwrap() {
                assert_eq!(classify_vertex(&p, &v).unwrap().kind, VertexKind::Smooth, "{name}");
            }
        }
    }

    #[test]
    fn benchmark_polytope_shape() {
        let p = chopped_tesseract();
        assert_eq!(p.facets().len(), 24);
        assert!(p.validate().is_valid());
        assert_eq!(p.vertices().unwrap().len(), 64);
    }
}
