use momentcut::corpus;
use momentcut::dh::{dh_profile, slice_volume};
use momentcut::lattice::*;
use momentcut::ops::{cut, reversed, Orientation};
use momentcut::toric::*;
use momentcut::{Int, IntVector, LabeledPolytope, Rational};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn det_abs(m: &IntMatrix) -> Int {
    determinant(m).abs()
}

/// Product of elementary row operations; with `fix_first` the first row stays `e_1`.
fn unimodular(n: usize, ops: &[(usize, usize, i64)], fix_first: bool) -> IntMatrix {
    let mut a = identity(n);
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i == j || (fix_first && i == 0) {
            continue;
        }
        let row_j = a[j].clone();
        for (x, y) in a[i].iter_mut().zip(&row_j) {
            *x += y * Int::from(c);
        }
        if c == 0 && !(fix_first && (i == 0 || j == 0)) {
            a.swap(i, j);
        }
    }
    a
}

fn ops_strategy() -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    prop::collection::vec((0usize..4, 0usize..4, -2i64..=2), 0..6)
}

fn shift_strategy() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-3i64..=3, 1i64..=3), 4)
}

fn shift(n: usize, raw: &[(i64, i64)]) -> Vec<Rational> {
    raw.iter().take(n).map(|&(p, q)| rat(p, q)).collect()
}

fn small_corpus() -> Vec<LabeledPolytope> {
    corpus::delzant_corpus()
        .into_iter()
        .filter(|(_, p)| p.dim() <= 3)
        .map(|(_, p)| p)
        .chain([corpus::pex2()])
        .collect()
}

fn corpus_member() -> impl Strategy<Value = LabeledPolytope> {
    let all = small_corpus();
    (0..all.len()).prop_map(move |i| all[i].clone())
}

fn point_set(vs: &[momentcut::Vertex]) -> Vec<Vec<Rational>> {
    let mut pts: Vec<Vec<Rational>> = vs.iter().map(|v| v.point.clone()).collect();
    pts.sort();
    pts
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn primitive_is_idempotent(v in prop::collection::vec(-50i64..=50, 1..5)) {
        let v = IntVector::from_i64s(&v);
        prop_assume!(!v.is_zero());
        let p = primitive(&v).unwrap();
        prop_assert!(p.content().is_one());
        prop_assert_eq!(primitive(&p).unwrap(), p.clone());
        let k = v.content();
        prop_assert_eq!(IntVector::new(p.iter().map(|x| x * &k).collect()), v);
    }

    #[test]
    fn lattice_index_is_invariant(
        rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 3),
        ops in ops_strategy(),
        perm in 0usize..6,
    ) {
        let vs: Vec<IntVector> = rows.iter().map(|r| IntVector::from_i64s(r)).collect();
        let base = lattice_index(&vs).unwrap();
        let order = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]][perm];
        let permuted: Vec<IntVector> = order.iter().map(|&i| vs[i].clone()).collect();
        prop_assert_eq!(lattice_index(&permuted).unwrap(), base.clone());
        let u = unimodular(3, &ops, false);
        let moved: Vec<IntVector> = vs.iter().map(|v| mat_vec(&u, v)).collect();
        prop_assert_eq!(lattice_index(&moved).unwrap(), base);
    }

    #[test]
    fn solve_resubstitutes(
        rows in prop::collection::vec(prop::collection::vec(-5i64..=5, 3), 3),
        b in prop::collection::vec((-7i64..=7, 1i64..=4), 3),
    ) {
        let a: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect();
        let b: Vec<Rational> = b.iter().map(|&(p, q)| rat(p, q)).collect();
        let int_rows: Vec<Vec<Int>> = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        match solve_exact(&a, &b) {
            Some(x) => {
                for (row, bi) in a.iter().zip(&b) {
                    let lhs: Rational = row.iter().zip(&x).map(|(p, q)| p * q).sum();
                    prop_assert_eq!(&lhs, bi);
                }
            }
            None => prop_assert!(determinant(&int_rows).is_zero()),
        }
    }

    #[test]
    fn smith_form_is_a_factorization(
        rows in prop::collection::vec(prop::collection::vec(-6i64..=6, 4), 1..4),
    ) {
        let a: IntMatrix = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        let s = smith_normal_form(&a);
        prop_assert!(det_abs(&s.u).is_one() && det_abs(&s.v).is_one());
        let d = mat_mul(&mat_mul(&s.u, &a), &s.v);
        for (i, row) in d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j { s.diagonal[i].clone() } else { Int::zero() };
                prop_assert_eq!(x, &want);
            }
        }
        for w in s.diagonal.windows(2) {
            prop_assert!(!w[0].is_negative());
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
    }

    #[test]
    fn volume_is_affine_invariant(p in corpus_member(), ops in ops_strategy(), b in shift_strategy()) {
        let n = p.dim();
        let q = p.transform(&unimodular(n, &ops, false), &shift(n, &b)).unwrap();
        prop_assert_eq!(q.volume().unwrap(), p.volume().unwrap());
    }

    #[test]
    fn walk_matches_exhaustive_scan(p in corpus_member(), ops in ops_strategy(), b in shift_strategy()) {
        let n = p.dim();
        let q = p.transform(&unimodular(n, &ops, false), &shift(n, &b)).unwrap();
        let walk = q.vertices().unwrap();
        let scan = q.vertices_exhaustive();
        prop_assert_eq!(point_set(&walk), point_set(&scan));
    }

    #[test]
    fn dh_integral_and_slices(p in corpus_member(), ops in ops_strategy(), b in shift_strategy(), seed in 0u64..1000) {
        let n = p.dim();
        prop_assume!(n >= 2);
        let q = p.transform(&unimodular(n, &ops, true), &shift(n, &b)).unwrap();
        let prof = dh_profile(&q).unwrap();
        prop_assert_eq!(prof.integral(), q.volume().unwrap());
        let (lo, hi) = q.first_range().unwrap();
        for k in 0..100u64 {
            let num = ((seed * 7919 + k * 104729) % 997) as i64;
            let s = &lo + (&hi - &lo) * rat(num, 997);
            prop_assert_eq!(prof.eval(&s), slice_volume(&q, &s).unwrap());
        }
    }

    #[test]
    fn reversing_mirrors_the_profile(p in corpus_member(), ops in ops_strategy()) {
        let n = p.dim();
        prop_assume!(n >= 2);
        let q = p.transform(&unimodular(n, &ops, true), &vec![Rational::zero(); n]).unwrap();
        let a = dh_profile(&reversed(&q)).unwrap();
        let b = dh_profile(&q).unwrap().mirror();
        prop_assert_eq!(a.range(), b.range());
        for (x, _) in b.samples(17) {
            prop_assert_eq!(a.eval(&x), b.eval(&x));
        }
    }

    #[test]
    fn cuts_split_volume(p in corpus_member(), num in 1i64..16) {
        let (lo, hi) = p.first_range().unwrap();
        let a = &lo + (&hi - &lo) * rat(num, 16);
        prop_assume!(p.is_regular_level(&a).unwrap());
        let below = cut(&p, &a, Orientation::Below).unwrap();
        let above = cut(&p, &a, Orientation::Above).unwrap();
        prop_assert_eq!(below.volume().unwrap() + above.volume().unwrap(), p.volume().unwrap());
        prop_assert!(below.vertices().unwrap().iter().all(|v| v.first() <= &a));
        prop_assert!(above.vertices().unwrap().iter().all(|v| v.first() >= &a));
        if p.dim() >= 2 {
            let whole = dh_profile(&p).unwrap();
            let part = dh_profile(&below).unwrap();
            for (s, mu) in part.samples(9) {
                if s < a && s > lo {
                    prop_assert_eq!(mu, whole.eval(&s));
                }
            }
        }
    }

    #[test]
    fn classes_and_weights_are_invariant(p in corpus_member(), ops in ops_strategy(), b in shift_strategy()) {
        let n = p.dim();
        let q = p.transform(&unimodular(n, &ops, true), &shift(n, &b)).unwrap();
        let e1 = IntVector::unit(n, 0);
        let mut before: Vec<_> = p
            .vertices()
            .unwrap()
            .iter()
            .map(|v| (classify_vertex(&p, v).unwrap().index, weights_at_vertex(&p, v, &e1).unwrap()))
            .collect();
        let mut after: Vec<_> = q
            .vertices()
            .unwrap()
            .iter()
            .map(|v| (classify_vertex(&q, v).unwrap().index, weights_at_vertex(&q, v, &e1).unwrap()))
            .collect();
        before.sort();
        after.sort();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn edge_determinant_matches_class(p in corpus_member(), ops in ops_strategy()) {
        let n = p.dim();
        let q = p.transform(&unimodular(n, &ops, false), &vec![Rational::zero(); n]).unwrap();
        for v in q.vertices().unwrap() {
            let class = classify_vertex(&q, &v).unwrap();
            let edges = edge_generators(&q, &v).unwrap();
            let rows: IntMatrix = edges.iter().map(|e| e.0.clone()).collect();
            match class.kind {
                VertexKind::Smooth => prop_assert!(det_abs(&rows).is_one()),
                VertexKind::Z2Singular => prop_assert_eq!(det_abs(&rows), int(2)),
                VertexKind::OtherOrbifold => {}
            }
        }
    }

    #[test]
    fn extreme_vertices_have_signed_weights(p in corpus_member(), ops in ops_strategy(), b in shift_strategy()) {
        let n = p.dim();
        let q = p.transform(&unimodular(n, &ops, true), &shift(n, &b)).unwrap();
        let (lo, hi) = q.first_range().unwrap();
        let e1 = IntVector::unit(n, 0);
        for v in q.vertices().unwrap() {
            let w = weights_at_vertex(&q, &v, &e1).unwrap();
            if v.first() == &lo {
                prop_assert!(w.weights().iter().all(|x| !x.is_negative()));
            }
            if v.first() == &hi {
                prop_assert!(w.weights().iter().all(|x| !x.is_positive()));
            }
        }
    }

    #[test]
    fn stabilizer_divides_index_on_the_z2_example(ops in ops_strategy(), b in shift_strategy()) {
        let q = corpus::pex2().transform(&unimodular(2, &ops, true), &shift(2, &b)).unwrap();
        for v in q.vertices().unwrap() {
            let index = classify_vertex(&q, &v).unwrap().index;
            for &f in &v.active {
                if let Some(order) = circle_stabilizer_order(&q, &[f]).unwrap().value() {
                    prop_assert!((&index % &order).is_zero());
                }
            }
        }
    }
}

#[test]
fn stabilizer_need_not_divide_index_in_general() {
    // facet x + 2y <= 4 of the second Hirzebruch trapezoid: Z2 stabilizer, smooth corners
    let p = corpus::hirzebruch(2);
    let f = p.facets().iter().position(|f| f.normal == IntVector::from_i64s(&[1, 2])).unwrap();
    assert_eq!(circle_stabilizer_order(&p, &[f]).unwrap().value(), Some(int(2)));
    for v in p.vertices().unwrap().iter().filter(|v| v.active.contains(&f)) {
        assert!(classify_vertex(&p, v).unwrap().index.is_one());
    }
}
