//! Duistermaat-Heckman profiles of the `x_1` circle: one exact polynomial
//! per chamber between consecutive vertex levels, with exact log-concavity
//! and local-minimum tests.

mod wall;

pub use wall::{wall_crossing_check, CrossingDirection, ExceptionalTag, FixedVertexInfo, SlopeEntry, WallReport};

use serde::Serialize;
use serde_json::{json, Value};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{rat, Rational};
use crate::poly::{sign, sign_samples, Poly};
use crate::polytope::{LabeledPolytope, Slice};

/// Distinct vertex levels `x_1`, sorted.
pub fn critical_values(p: &LabeledPolytope) -> Result<Vec<Rational>> {
    let mut vals: Vec<Rational> = p.vertices()?.into_iter().map(|v| v.point[0].clone()).collect();
    vals.sort();
    vals.dedup();
    Ok(vals)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chamber {
    pub lo: Rational,
    pub hi: Rational,
    pub poly: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DHProfile {
    /// Sorted walls, including both ends of the range.
    pub walls: Vec<Rational>,
    /// `chambers[i]` spans `(walls[i], walls[i+1])`.
    pub chambers: Vec<Chamber>,
}

/// Euclidean volume of the slice at `s`; zero when empty or degenerate.
pub fn slice_volume(p: &LabeledPolytope, s: &Rational) -> Result<Rational> {
    match p.slice(s)? {
        Slice::Full(sp) => sp.polytope.volume(),
        Slice::Empty | Slice::Degenerate => Ok(Rational::zero()),
    }
}

/// `lo + (hi - lo) * j / k`
fn lerp(lo: &Rational, hi: &Rational, j: i64, k: i64) -> Rational {
    lo + (hi - lo) * rat(j, k)
}

pub fn dh_profile(p: &LabeledPolytope) -> Result<DHProfile> {
    let n = p.dim();
    if n < 2 {
        return Err(Error::Precondition("DH profile needs dimension at least 2".into()));
    }
    let walls = critical_values(p)?;
    let k = n as i64;
    let mut chambers = Vec::new();
    for w in walls.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let samples = (1..=k)
            .map(|j| {
                let s = lerp(lo, hi, j, k + 1);
                let v = slice_volume(p, &s)?;
                Ok((s, v))
            })
            .collect::<Result<Vec<_>>>()?;
        let poly = Poly::interpolate(&samples);
        let check = lerp(lo, hi, 1, 2 * (k + 1));
        if poly.eval(&check) != slice_volume(p, &check)? {
            return Err(Error::InterpolationMismatch(check.to_string()));
        }
        chambers.push(Chamber { lo: lo.clone(), hi: hi.clone(), poly });
    }
    Ok(DHProfile { walls, chambers })
}

impl DHProfile {
    /// Profile from explicit pieces; `walls` has one more entry than `polys`.
    pub fn from_pieces(walls: Vec<Rational>, polys: Vec<Poly>) -> Result<Self> {
        if walls.len() != polys.len() + 1 || walls.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition("walls must be increasing with one more wall than pieces".into()));
        }
        let chambers = walls
            .windows(2)
            .zip(polys)
            .map(|(w, poly)| Chamber { lo: w[0].clone(), hi: w[1].clone(), poly })
            .collect();
        Ok(DHProfile { walls, chambers })
    }

    pub fn range(&self) -> (&Rational, &Rational) {
        (&self.walls[0], self.walls.last().expect("nonempty"))
    }

    /// Value at `s`. Inside a chamber this is its polynomial; at a wall it is
    /// the smaller one-sided limit (the one-sided limit at the range ends);
    /// outside the range it is 0.
    pub fn eval(&self, s: &Rational) -> Rational {
        let (lo, hi) = self.range();
        if s < lo || s > hi || self.chambers.is_empty() {
            return Rational::zero();
        }
        if let Some(c) = self.chambers.iter().find(|c| &c.lo < s && s < &c.hi) {
            return c.poly.eval(s);
        }
        let left = self.chambers.iter().find(|c| &c.hi == s).map(|c| c.poly.eval(s));
        let right = self.chambers.iter().find(|c| &c.lo == s).map(|c| c.poly.eval(s));
        match (left, right) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => Rational::zero(),
        }
    }

    /// Exact integral over the whole range.
    pub fn integral(&self) -> Rational {
        self.chambers.iter().map(|c| c.poly.definite_integral(&c.lo, &c.hi)).sum()
    }

    /// Profile of the reversed action: `s -> -s`.
    pub fn mirror(&self) -> Self {
        let mut walls: Vec<Rational> = self.walls.iter().map(|w| -w).collect();
        walls.reverse();
        let chambers = self
            .chambers
            .iter()
            .rev()
            .map(|c| Chamber { lo: -&c.hi, hi: -&c.lo, poly: c.poly.mirror() })
            .collect();
        DHProfile { walls, chambers }
    }

    /// `N + 1` equally spaced rational samples across the range.
    pub fn samples(&self, count: usize) -> Vec<(Rational, Rational)> {
        let (lo, hi) = self.range();
        if count <= 1 {
            return vec![(lo.clone(), self.eval(lo))];
        }
        let k = (count - 1) as i64;
        (0..=k)
            .map(|j| {
                let s = lerp(lo, hi, j, k);
                let v = self.eval(&s);
                (s, v)
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "walls": self.walls.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "chambers": self.chambers.iter().map(|c| json!({
                "lo": c.lo.to_string(),
                "hi": c.hi.to_string(),
                "coefficients": c.poly.coeff_strings(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_csv(&self, count: usize) -> String {
        let mut s = String::from("s,mu\n");
        for (x, y) in self.samples(count) {
            s.push_str(&format!("{x},{y}\n"));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `mu mu'' - mu'^2 > 0` at this point of a closed chamber.
    Chamber { lo: String, hi: String, at: String },
    /// The logarithmic derivative jumps up across a wall.
    Wall { at: String, left_log_slope: String, right_log_slope: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct LogConcavityReport {
    pub log_concave: bool,
    pub first_violation: Option<Violation>,
    pub violations: Vec<Violation>,
}

fn log_gap(p: &Poly) -> Poly {
    let d = p.derivative();
    let dd = d.derivative();
    &(p * &dd) - &(&d * &d)
}

pub fn check_log_concavity(profile: &DHProfile) -> LogConcavityReport {
    let mut violations = Vec::new();
    for c in &profile.chambers {
        let g = log_gap(&c.poly);
        if let Some((x, _)) = sign_samples(&g, &c.lo, &c.hi).into_iter().find(|(_, s)| *s > 0) {
            violations.push(Violation::Chamber { lo: c.lo.to_string(), hi: c.hi.to_string(), at: x.to_string() });
        }
    }
    for w in profile.chambers.windows(2) {
        let (l, r) = (&w[0], &w[1]);
        let a = &l.hi;
        let (ml, mr) = (l.poly.eval(a), r.poly.eval(a));
        if !ml.is_positive() || !mr.is_positive() {
            continue;
        }
        let (dl, dr) = (l.poly.derivative().eval(a), r.poly.derivative().eval(a));
        let (sl, sr) = (&dl / &ml, &dr / &mr);
        if sl < sr {
            violations.push(Violation::Wall {
                at: a.to_string(),
                left_log_slope: sl.to_string(),
                right_log_slope: sr.to_string(),
            });
        }
    }
    LogConcavityReport {
        log_concave: violations.is_empty(),
        first_violation: violations.first().cloned(),
        violations,
    }
}

/// Sign of `q` just to the right (`side = 1`) or left (`side = -1`) of `a`,
/// from the first nonvanishing derivative.
fn side_sign(q: &Poly, a: &Rational, side: i8) -> i8 {
    let mut d = q.clone();
    let mut k = 0u32;
    while !d.is_zero() {
        let s = sign(&d.eval(a));
        if s != 0 {
            return if side < 0 && k % 2 == 1 { -s } else { s };
        }
        d = d.derivative();
        k += 1;
    }
    0
}

/// A strict local minimum, exact when rational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Minimum {
    Exact { at: String },
    /// Irrational point isolated in `(lo, hi)`.
    Between { lo: String, hi: String },
}

fn strict_min_at(left: &Poly, right: &Poly, a: &Rational, value: &Rational) -> bool {
    let c = Poly::constant(value.clone());
    side_sign(&(left - &c), a, -1) > 0 && side_sign(&(right - &c), a, 1) > 0
}

/// Strict local minima at interior points of the range.
pub fn find_strict_local_minima(profile: &DHProfile) -> Vec<Minimum> {
    let mut out = Vec::new();
    for (i, c) in profile.chambers.iter().enumerate() {
        let d = c.poly.derivative();
        if !d.is_zero() {
            let samples = sign_samples(&d, &c.lo, &c.hi);
            for w in samples.windows(3) {
                let (x, s) = (&w[1].0, w[1].1);
                if &c.lo < x && x < &c.hi && s == 0 && strict_min_at(&c.poly, &c.poly, x, &c.poly.eval(x)) {
                    out.push(Minimum::Exact { at: x.to_string() });
                }
            }
            for w in samples.windows(2) {
                // a sign change between consecutive nonzero samples brackets an irrational root
                if w[0].1 < 0 && w[1].1 > 0 {
                    out.push(Minimum::Between { lo: w[0].0.to_string(), hi: w[1].0.to_string() });
                }
            }
        }
        if let Some(next) = profile.chambers.get(i + 1) {
            let a = &c.hi;
            let value = profile.eval(a);
            if strict_min_at(&c.poly, &next.poly, a, &value) {
                out.push(Minimum::Exact { at: a.to_string() });
            }
        }
    }
    out
}

/// Whether the slices over the open interval share one combinatorial type
/// with offsets affine in `s`.
pub fn chamber_affine_check(p: &LabeledPolytope, lo: &Rational, hi: &Rational) -> Result<bool> {
    if lo >= hi {
        return Err(Error::Precondition(format!("empty interval ({lo}, {hi})")));
    }
    let crit = critical_values(p)?;
    if let Some(c) = crit.iter().find(|c| lo < *c && *c < hi) {
        return Err(Error::Precondition(format!("critical value {c} lies inside ({lo}, {hi})")));
    }
    let (min, max) = (crit.first().ok_or(Error::EmptyResult)?, crit.last().ok_or(Error::EmptyResult)?);
    if hi <= min || lo >= max {
        return Err(Error::Precondition(format!("({lo}, {hi}) misses the moment image")));
    }
    let samples: Vec<Rational> = (1..=3).map(|j| lerp(lo, hi, j, 4)).collect();
    let mut types = Vec::new();
    for s in &samples {
        let sp = p.slice(s)?.into_sliced().ok_or_else(|| Error::Internal(format!("slice at {s} is not full")))?;
        let verts: Vec<Vec<usize>> = sp
            .polytope
            .vertices()?
            .into_iter()
            .map(|v| {
                let mut a: Vec<usize> = v.active.iter().map(|&i| sp.sources[i]).collect();
                a.sort_unstable();
                a
            })
            .collect();
        let mut verts = verts;
        verts.sort();
        types.push((sp.sources.clone(), verts, sp.polytope));
    }
    if types.windows(2).any(|w| w[0].0 != w[1].0 || w[0].1 != w[1].1) {
        return Ok(false);
    }
    // offsets at three equally spaced samples must be collinear
    let m = types[0].2.facets().len();
    for i in 0..m {
        let o: Vec<&Rational> = types.iter().map(|t| &t.2.facet(i).offset).collect();
        if o[1] - o[0] != o[2] - o[1] {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn poly(c: &[(i64, i64)]) -> Poly {
        Poly::new(c.iter().map(|&(p, q)| rat(p, q)).collect())
    }

    #[test]
    fn critical_value_examples() {
        assert_eq!(critical_values(&corpus::unit_square()).unwrap(), vec![rat(0, 1), rat(1, 1)]);
        assert_eq!(critical_values(&corpus::delta3()).unwrap(), vec![rat(-1, 1), rat(0, 1), rat(1, 1)]);
        assert_eq!(critical_values(&corpus::pex2()).unwrap(), vec![rat(-1, 1), rat(1, 1)]);
    }

    #[test]
    fn profile_examples() {
        let sq = dh_profile(&corpus::unit_square()).unwrap();
        assert_eq!(sq.chambers.len(), 1);
        assert_eq!(sq.chambers[0].poly, poly(&[(1, 1)]));

        let tri = dh_profile(&corpus::simplex(2)).unwrap();
        assert_eq!(tri.chambers[0].poly, poly(&[(1, 1), (-1, 1)]));

        let d3 = dh_profile(&corpus::delta3()).unwrap();
        assert_eq!(d3.chambers.len(), 2);
        assert!(d3.chambers.iter().all(|c| c.poly.degree().unwrap_or(0) <= 2));
        let z = rat(0, 1);
        assert_eq!(d3.chambers[0].poly.eval(&z), d3.chambers[1].poly.eval(&z));
        assert_eq!(d3.integral(), rat(1, 6));
    }

    #[test]
    fn log_concavity_examples() {
        let walls = vec![rat(0, 1), rat(1, 1)];
        assert!(check_log_concavity(&DHProfile::from_pieces(walls.clone(), vec![poly(&[(1, 1), (-1, 1)])]).unwrap()).log_concave);
        assert!(check_log_concavity(&DHProfile::from_pieces(walls, vec![poly(&[(1, 1)])]).unwrap()).log_concave);
        let glued = DHProfile::from_pieces(
            vec![rat(-1, 1), rat(0, 1), rat(1, 1)],
            vec![poly(&[(1, 1), (-1, 1)]), poly(&[(1, 1), (1, 1)])],
        )
        .unwrap();
        let r = check_log_concavity(&glued);
        assert!(!r.log_concave);
        assert!(matches!(r.first_violation, Some(Violation::Wall { .. })));
    }

    #[test]
    fn local_minimum_examples() {
        let down = DHProfile::from_pieces(vec![rat(0, 1), rat(1, 1)], vec![poly(&[(1, 1), (-1, 1)])]).unwrap();
        assert!(find_strict_local_minima(&down).is_empty());
        let glued = DHProfile::from_pieces(
            vec![rat(-1, 1), rat(0, 1), rat(1, 1)],
            vec![poly(&[(1, 1), (-1, 1)]), poly(&[(1, 1), (1, 1)])],
        )
        .unwrap();
        assert_eq!(find_strict_local_minima(&glued), vec![Minimum::Exact { at: "0".into() }]);
        let cap = DHProfile::from_pieces(vec![rat(-1, 1), rat(1, 1)], vec![poly(&[(1, 1), (0, 1), (-1, 1)])]).unwrap();
        assert!(find_strict_local_minima(&cap).is_empty());
        let cup = DHProfile::from_pieces(vec![rat(-1, 1), rat(1, 1)], vec![poly(&[(1, 1), (0, 1), (1, 1)])]).unwrap();
        assert_eq!(find_strict_local_minima(&cup), vec![Minimum::Exact { at: "0".into() }]);
        let irr = DHProfile::from_pieces(vec![rat(0, 1), rat(2, 1)], vec![poly(&[(5, 1), (0, 1), (-2, 1), (0, 1), (1, 1)])])
            .unwrap();
        // x^4 - 2x^2 + 5 has its minimum at x = 1 (rational) on (0, 2)
        assert_eq!(find_strict_local_minima(&irr), vec![Minimum::Exact { at: "1".into() }]);
        let irr = DHProfile::from_pieces(vec![rat(0, 1), rat(2, 1)], vec![poly(&[(5, 1), (0, 1), (-3, 1), (0, 1), (1, 1)])])
            .unwrap();
        // minimum at sqrt(3/2)
        assert!(matches!(find_strict_local_minima(&irr)[..], [Minimum::Between { .. }]));
    }

    #[test]
    fn affine_chamber_examples() {
        assert!(chamber_affine_check(&corpus::unit_square(), &rat(1, 4), &rat(3, 4)).unwrap());
        assert!(chamber_affine_check(&corpus::delta3(), &rat(-3, 4), &rat(-1, 4)).unwrap());
        assert!(chamber_affine_check(&corpus::delta3(), &rat(-1, 4), &rat(1, 4)).is_err());
    }

    #[test]
    fn mirror_matches_reversed() {
        let p = corpus::delta3();
        let r = crate::ops::reversed(&p);
        assert_eq!(dh_profile(&r).unwrap(), dh_profile(&p).unwrap().mirror());
    }

    #[test]
    fn csv_has_header_and_rational_rows() {
        let csv = dh_profile(&corpus::simplex(2)).unwrap().to_csv(5);
        assert_eq!(csv, "s,mu\n0,1\n1/4,3/4\n1/2,1/2\n3/4,1/4\n1,0\n");
    }
}
