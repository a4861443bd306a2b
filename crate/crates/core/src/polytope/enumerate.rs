//! Vertex enumeration for H-represented polytopes.
//!
//! Two routes: an exhaustive scan over all `n`-subsets of facets (the
//! reference, also used for degenerate inputs) and a pivoting walk over the
//! edge graph, which is much cheaper on simple polytopes. The walk refuses to
//! continue at any degeneracy and the caller falls back to the scan.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{Signed, Zero};

use crate::lattice::{solve_exact, Rational};

use super::{Facet, Vertex};

/// A feasible point determined by `n` independent tight facets, with its full
/// tight set (which may have more than `n` members).
pub(crate) type BasicPoint = (Vec<Rational>, Vec<usize>);

fn slack(f: &Facet, x: &[Rational]) -> Rational {
    &f.offset - f.normal.dot_rat(x)
}

fn tight_set(facets: &[Facet], x: &[Rational]) -> Vec<usize> {
    facets
        .iter()
        .enumerate()
        .filter(|(_, f)| slack(f, x).is_zero())
        .map(|(i, _)| i)
        .collect()
}

fn feasible(facets: &[Facet], x: &[Rational]) -> bool {
    facets.iter().all(|f| !slack(f, x).is_negative())
}

fn solve_subset(facets: &[Facet], subset: &[usize]) -> Option<Vec<Rational>> {
    let a: Vec<Vec<Rational>> = subset.iter().map(|&i| facets[i].normal.to_rationals()).collect();
    let b: Vec<Rational> = subset.iter().map(|&i| facets[i].offset.clone()).collect();
    solve_exact(&a, &b)
}

/// Calls `visit` on every `k`-subset of `0..m` in lexicographic order until
/// it returns `false`.
fn for_each_subset(m: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !visit(&idx) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
            if i == 0 && idx[0] == m - k {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub(crate) fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_subset(m, k, |s| {
        out.push(s.to_vec());
        true
    });
    out
}

/// All basic feasible points, by brute force over facet subsets.
pub(crate) fn exhaustive(dim: usize, facets: &[Facet]) -> Vec<BasicPoint> {
    let mut seen: BTreeMap<Vec<Rational>, Vec<usize>> = BTreeMap::new();
    for_each_subset(facets.len(), dim, |subset| {
        if let Some(x) = solve_subset(facets, subset) {
            if !seen.contains_key(&x) && feasible(facets, &x) {
                let t = tight_set(facets, &x);
                seen.insert(x, t);
            }
        }
        true
    });
    seen.into_iter().collect()
}

fn first_vertex(dim: usize, facets: &[Facet]) -> Option<BasicPoint> {
    let mut found = None;
    for_each_subset(facets.len(), dim, |subset| {
        if let Some(x) = solve_subset(facets, subset) {
            if feasible(facets, &x) {
                let t = tight_set(facets, &x);
                found = Some((x, t));
                return false;
            }
        }
        true
    });
    found
}

#[derive(Debug)]
pub(crate) enum WalkFailure {
    /// No feasible point at all.
    Empty,
    /// Some vertex has more than `n` tight facets.
    Degenerate,
    /// An edge ray never meets another facet.
    Unbounded,
}

/// Edge directions at a simple vertex: for active facet `i`, the direction
/// `e` with `<eta_j, e> = 0` for the other active facets and `<eta_i, e> = -1`.
pub(crate) fn edge_directions(facets: &[Facet], active: &[usize]) -> Option<Vec<Vec<Rational>>> {
    let n = active.len();
    let a: Vec<Vec<Rational>> = active.iter().map(|&i| facets[i].normal.to_rationals()).collect();
    (0..n)
        .map(|i| {
            let b: Vec<Rational> = (0..n)
                .map(|j| if i == j { -Rational::from_integer(1.into()) } else { Rational::zero() })
                .collect();
            solve_exact(&a, &b)
        })
        .collect()
}

/// Pivoting walk over the vertex-edge graph of a simple polytope.
pub(crate) fn walk(dim: usize, facets: &[Facet]) -> Result<Vec<Vertex>, WalkFailure> {
    let (x0, t0) = first_vertex(dim, facets).ok_or(WalkFailure::Empty)?;
    if t0.len() != dim {
        return Err(WalkFailure::Degenerate);
    }
    let mut visited: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    visited.insert(t0.clone());
    queue.push_back((x0, t0));
    while let Some((x, active)) = queue.pop_front() {
        let dirs = edge_directions(facets, &active).ok_or(WalkFailure::Degenerate)?;
        for (i, e) in dirs.iter().enumerate() {
            let mut best: Option<(Rational, Vec<usize>)> = None;
            for (j, f) in facets.iter().enumerate() {
                if active.contains(&j) {
                    continue;
                }
                let rate = f.normal.dot_rat(e);
                if !rate.is_positive() {
                    continue;
                }
                let t = slack(f, &x) / rate;
                match &mut best {
                    Some((bt, hits)) if *bt == t => hits.push(j),
                    Some((bt, _)) if *bt < t => {}
                    _ => best = Some((t, vec![j])),
                }
            }
            let (t, hits) = best.ok_or(WalkFailure::Unbounded)?;
            if hits.len() > 1 || t.is_zero() {
                return Err(WalkFailure::Degenerate);
            }
            let mut next: Vec<usize> = active.iter().copied().filter(|&k| k != active[i]).collect();
            next.push(hits[0]);
            next.sort_unstable();
            if visited.insert(next.clone()) {
                let y: Vec<Rational> = x.iter().zip(e).map(|(a, d)| a + &t * d).collect();
                queue.push_back((y, next));
            }
        }
        out.push(Vertex { point: x, active });
    }
    out.sort_by(|a, b| a.point.cmp(&b.point));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_are_lexicographic_and_complete() {
        let s = subsets(4, 2);
        assert_eq!(s.len(), 6);
        assert_eq!(s[0], vec![0, 1]);
        assert_eq!(s[5], vec![2, 3]);
        assert_eq!(subsets(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
        assert!(subsets(2, 3).is_empty());
    }
}
