//! Exact integer and rational linear algebra.
//!
//! Everything here works on arbitrary-precision integers: chains of cuts and
//! blow-ups grow denominators and nothing is allowed to round. Determinants
//! and solves use fraction-free (Bareiss) elimination so intermediate entries
//! stay bounded by minors of the input.

use std::fmt;
use std::ops::{Deref, Index};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rational = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

/// `num / den` as a reduced rational. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(Int::from(num), Int::from(den))
}

pub fn rat_int(v: &Int) -> Rational {
    Rational::from_integer(v.clone())
}

/// Parses `"p/q"` or `"p"`. Decimal and exponent notation is rejected with a
/// suggested exact spelling so that callers never smuggle floats in.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let err = |reason: String| Error::ParseRational { text: text.to_string(), reason };
    if t.is_empty() {
        return Err(err("empty string".into()));
    }
    if t.contains(['.', 'e', 'E']) {
        return Err(err(match decimal_suggestion(t) {
            Some(s) => format!("floats are not accepted; write it as \"{s}\""),
            None => "floats are not accepted; use p/q".into(),
        }));
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: Int = num.parse().map_err(|_| err(format!("bad numerator {num:?}")))?;
    let den: Int = den.parse().map_err(|_| err(format!("bad denominator {den:?}")))?;
    if den.is_zero() {
        return Err(err("zero denominator".into()));
    }
    Ok(Rational::new(num, den))
}

fn decimal_suggestion(t: &str) -> Option<String> {
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (whole, frac) = body.split_once('.')?;
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let num: Int = if digits.is_empty() { Int::zero() } else { digits.parse().ok()? };
    let den = num_traits::pow(Int::from(10), frac.len());
    let mut r = Rational::new(num, den);
    if neg {
        r = -r;
    }
    Some(r.to_string())
}

/// Integer vector of fixed ambient dimension; facet normals and circle
/// directions live here.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntVector(pub Vec<Int>);

impl IntVector {
    pub fn new(entries: Vec<Int>) -> Self {
        IntVector(entries)
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        IntVector(entries.iter().map(|&v| Int::from(v)).collect())
    }

    /// Standard basis vector `e_i` (zero-based) of `R^dim`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![Int::zero(); dim];
        v[i] = Int::one();
        IntVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// gcd of the entries (0 for the zero vector).
    pub fn content(&self) -> Int {
        self.0.iter().fold(Int::zero(), |g, x| g.gcd(x))
    }

    pub fn dot(&self, other: &IntVector) -> Int {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn dot_rat(&self, x: &[Rational]) -> Rational {
        self.0
            .iter()
            .zip(x)
            .fold(Rational::zero(), |acc, (a, b)| acc + b * a)
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> IntVector {
        IntVector(self.0.iter().map(|a| -a).collect())
    }

    pub fn to_rationals(&self) -> Vec<Rational> {
        self.0.iter().map(rat_int).collect()
    }

    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }
}

impl Deref for IntVector {
    type Target = [Int];
    fn deref(&self) -> &[Int] {
        &self.0
    }
}

impl Index<usize> for IntVector {
    type Output = Int;
    fn index(&self, i: usize) -> &Int {
        &self.0[i]
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// `v` divided by the gcd of its entries.
pub fn primitive(v: &IntVector) -> Result<IntVector> {
    let g = v.content();
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(IntVector(v.0.iter().map(|x| x / &g).collect()))
}

/// Index of the sublattice spanned by `n` integer vectors in `Z^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeIndex {
    Index(Int),
    /// The vectors are linearly dependent.
    Degenerate,
}

impl LatticeIndex {
    pub fn value(&self) -> Option<&Int> {
        match self {
            LatticeIndex::Index(i) => Some(i),
            LatticeIndex::Degenerate => None,
        }
    }

    pub fn is(&self, v: i64) -> bool {
        matches!(self, LatticeIndex::Index(i) if *i == Int::from(v))
    }
}

pub fn lattice_index(vs: &[IntVector]) -> Result<LatticeIndex> {
    let n = vs.len();
    if let Some(bad) = vs.iter().find(|v| v.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.dim() });
    }
    let rows: Vec<Vec<Int>> = vs.iter().map(|v| v.0.clone()).collect();
    let d = determinant(&rows).abs();
    Ok(if d.is_zero() { LatticeIndex::Degenerate } else { LatticeIndex::Index(d) })
}

/// True iff `(v_1 + ... + v_k) / 2` is an integer vector.
pub fn half_sum_integral(vs: &[IntVector]) -> bool {
    let Some(first) = vs.first() else { return true };
    let sum = vs[1..].iter().fold(first.clone(), |acc, v| acc.add(v));
    sum.0.iter().all(|x| x.is_even())
}

/// Determinant of a square integer matrix by Bareiss elimination.
pub fn determinant(rows: &[Vec<Int>]) -> Int {
    let n = rows.len();
    if n == 0 {
        return Int::one();
    }
    let mut m: Vec<Vec<Int>> = rows.to_vec();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return Int::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Scales a rational row to integers by the lcm of its denominators.
fn integerize(row: &[Rational]) -> Vec<Int> {
    let l = row.iter().fold(Int::one(), |l, x| l.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
}

/// Reduces integer rows in place to a row-echelon form with Bareiss steps and
/// returns the pivot columns.
fn bareiss_echelon(m: &mut [Vec<Int>], cols: usize) -> Vec<usize> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut prev = Int::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in (c + 1)..m[i].len() {
                let v = &m[i][j] * &m[r][c] - &m[i][c] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][c] = Int::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solves the square system `A x = b` exactly, or `None` when `A` is singular.
pub fn solve_exact(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    assert_eq!(b.len(), n, "solve_exact: right-hand side length");
    let mut m: Vec<Vec<Int>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            assert_eq!(row.len(), n, "solve_exact: matrix must be square");
            let mut full = row.clone();
            full.push(bi.clone());
            integerize(&full)
        })
        .collect();
    let pivots = bareiss_echelon(&mut m, n);
    if pivots.len() < n {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = rat_int(&m[i][n]);
        for j in i + 1..n {
            acc -= &x[j] * &m[i][j];
        }
        x[i] = acc / rat_int(&m[i][i]);
    }
    Some(x)
}

/// Rank over Q of a rational matrix given by rows.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let cols = first.len();
    let mut m: Vec<Vec<Int>> = rows.iter().map(|r| integerize(r)).collect();
    bareiss_echelon(&mut m, cols).len()
}

pub fn rank_int(rows: &[IntVector]) -> usize {
    let r: Vec<Vec<Rational>> = rows.iter().map(IntVector::to_rationals).collect();
    rank(&r)
}

/// Integer matrix as rows.
pub type IntMatrix = Vec<Vec<Int>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal, `d_i | d_{i+1}`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: Vec<Int>,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut d = a.clone();
    let mut u = identity(m);
    let mut v = identity(n);

    let mut t = 0;
    while t < m.min(n) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let Some((pi, pj)) = smallest_nonzero(&d, t) else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = d[i][t].div_floor(&d[t][t]);
                row_axpy(&mut d, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                if !d[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = d[t][j].div_floor(&d[t][t]);
                col_axpy(&mut d, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                if !d[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let (pi, pj) = smallest_nonzero_cross(&d, t);
                d.swap(t, pi);
                u.swap(t, pi);
                swap_cols(&mut d, t, pj);
                swap_cols(&mut v, t, pj);
                continue;
            }
            // pivot must divide the remaining block
            let bad = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !d[i][j].is_multiple_of(&d[t][t]));
            match bad {
                Some((i, _)) => {
                    let one = -Int::one();
                    row_axpy(&mut d, t, i, &one);
                    row_axpy(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        t += 1;
    }
    let diagonal = (0..m.min(n)).map(|i| d[i][i].clone()).collect();
    SmithForm { diagonal, u, v }
}

fn smallest_nonzero(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in d.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < d[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Smallest nonzero entry in row `t` / column `t` of the trailing block.
fn smallest_nonzero_cross(d: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let mut val = d[t][t].abs();
    for (i, row) in d.iter().enumerate().skip(t + 1) {
        if !row[t].is_zero() && row[t].abs() < val {
            val = row[t].abs();
            best = (i, t);
        }
    }
    for (j, x) in d[t].iter().enumerate().skip(t + 1) {
        if !x.is_zero() && x.abs() < val {
            val = x.abs();
            best = (t, j);
        }
    }
    best
}

/// row[i] -= q * row[k]
fn row_axpy(m: &mut IntMatrix, i: usize, k: usize, q: &Int) {
    let src = m[k].clone();
    for (x, s) in m[i].iter_mut().zip(src) {
        *x -= q * s;
    }
}

/// col[j] -= q * col[k]
fn col_axpy(m: &mut IntMatrix, j: usize, k: usize, q: &Int) {
    for row in m.iter_mut() {
        let s = row[k].clone();
        row[j] -= q * s;
    }
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

/// Basis of the saturated lattice `{ w in Z^n : A w = 0 }` for `A` given by
/// rows of length `n`.
pub fn integer_kernel(rows: &[IntVector], n: usize) -> Vec<IntVector> {
    if rows.is_empty() {
        return (0..n).map(|i| IntVector::unit(n, i)).collect();
    }
    let a: IntMatrix = rows.iter().map(|r| r.0.clone()).collect();
    let snf = smith_normal_form(&a);
    let r = snf.rank();
    (r..n)
        .map(|j| IntVector((0..n).map(|i| snf.v[i][j].clone()).collect()))
        .collect()
}

/// Exact inverse of a square integer matrix with `|det| = 1`.
pub fn unimodular_inverse(a: &IntMatrix) -> Result<IntMatrix> {
    let n = a.len();
    let det = determinant(a);
    if det.abs() != Int::one() {
        return Err(Error::NotUnimodular(det.abs().to_string()));
    }
    let ra: Vec<Vec<Rational>> = a.iter().map(|r| r.iter().map(rat_int).collect()).collect();
    let mut inv = vec![vec![Int::zero(); n]; n];
    for j in 0..n {
        let e: Vec<Rational> = (0..n)
            .map(|i| if i == j { Rational::one() } else { Rational::zero() })
            .collect();
        let col = solve_exact(&ra, &e).ok_or_else(|| Error::Internal("unimodular solve".into()))?;
        for i in 0..n {
            if !col[i].is_integer() {
                return Err(Error::Internal("non-integral unimodular inverse".into()));
            }
            inv[i][j] = col[i].to_integer();
        }
    }
    Ok(inv)
}

pub fn transpose(a: &IntMatrix) -> IntMatrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_vec(a: &IntMatrix, v: &IntVector) -> IntVector {
    IntVector(a.iter().map(|r| r.iter().zip(&v.0).map(|(x, y)| x * y).sum()).collect())
}

/// Clears denominators of a rational direction and returns the primitive
/// integer vector pointing the same way.
pub fn primitive_direction(x: &[Rational]) -> Result<IntVector> {
    let v = IntVector(integerize(x));
    primitive(&v)
}
