//! Dense univariate polynomials over Q with Sturm-sequence root isolation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use num_integer::Integer;

use crate::lattice::{Int, Rational};

/// Coefficients in increasing degree; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// `a + b s`
    pub fn linear(a: Rational, b: Rational) -> Self {
        Poly::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(i.into()))
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Poly {
        let mut c = vec![Rational::zero()];
        c.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, a)| a / Rational::from_integer((i + 1).into())),
        );
        Poly::new(c)
    }

    pub fn definite_integral(&self, lo: &Rational, hi: &Rational) -> Rational {
        let f = self.integral();
        f.eval(hi) - f.eval(lo)
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `p(-s)`
    pub fn mirror(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// `p(s + h)`
    pub fn shift(&self, h: &Rational) -> Poly {
        // Horner in polynomial arithmetic
        let x = Poly::linear(h.clone(), Rational::one());
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| &(&acc * &x) + &Poly::constant(c.clone()))
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dl = d.leading().expect("division by zero polynomial").clone();
        let dd = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &dl;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(l) => self.scale(&(Rational::one() / l)),
            None => Poly::zero(),
        }
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`: same roots, all simple.
    pub fn squarefree(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }

    /// Lagrange interpolation through distinct nodes.
    pub fn interpolate(points: &[(Rational, Rational)]) -> Poly {
        let mut out = Poly::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut basis = Poly::constant(yi.clone());
            for (j, (xj, _)) in points.iter().enumerate() {
                if i != j {
                    let denom = xi - xj;
                    basis = &basis * &Poly::linear(-xj / &denom, Rational::one() / &denom);
                }
            }
            out = &out + &basis;
        }
        out
    }

    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}*")?;
                    }
                    if i == 1 {
                        write!(f, "s")?;
                    } else {
                        write!(f, "s^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                    match o.coeffs.get(i) {
                        Some(b) => a + b,
                        None => a,
                    }
                })
                .collect(),
        )
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

pub fn sign(x: &Rational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Sturm chain of a nonzero polynomial.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<Poly>,
}

impl SturmChain {
    pub fn new(p: &Poly) -> Self {
        let mut chain = vec![p.clone()];
        if p.is_zero() {
            return SturmChain { chain };
        }
        let mut next = p.derivative();
        while !next.is_zero() {
            let r = chain.last().unwrap().div_rem(&next).1;
            chain.push(next);
            next = -&r;
        }
        SturmChain { chain }
    }

    fn variations(&self, x: &Rational) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for p in &self.chain {
            let s = sign(&p.eval(x));
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_roots(&self, a: &Rational, b: &Rational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

/// Location of a single real root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootLocation {
    /// The root is exactly this rational.
    Exact(Rational),
    /// The root lies strictly inside `(lo, hi)`; neither endpoint is a root.
    Between(Rational, Rational),
}

impl RootLocation {
    pub fn lower(&self) -> &Rational {
        match self {
            RootLocation::Exact(r) => r,
            RootLocation::Between(lo, _) => lo,
        }
    }

    pub fn upper(&self) -> &Rational {
        match self {
            RootLocation::Exact(r) => r,
            RootLocation::Between(_, hi) => hi,
        }
    }
}

/// Isolates the distinct real roots of `p` in the closed interval `[lo, hi]`,
/// in increasing order. `p` must be nonzero. Rational roots found by the
/// rational root test are reported exactly.
pub fn isolate_roots(p: &Poly, lo: &Rational, hi: &Rational) -> Vec<RootLocation> {
    assert!(!p.is_zero(), "isolate_roots on the zero polynomial");
    let q = p.squarefree();
    let sturm = SturmChain::new(&q);
    let mut out = Vec::new();
    if q.eval(lo).is_zero() {
        out.push(RootLocation::Exact(lo.clone()));
    }
    isolate_in(&q, &sturm, lo.clone(), hi.clone(), &mut out);
    if out.iter().any(|r| matches!(r, RootLocation::Between(..))) {
        let exact = rational_roots(&q);
        for r in &mut out {
            if let RootLocation::Between(a, b) = r {
                if let Some(x) = exact.iter().find(|x| &*a < *x && *x < &*b) {
                    *r = RootLocation::Exact(x.clone());
                }
            }
        }
    }
    out
}

/// Divisors of `n` found by trial division up to `10^6`; a leftover cofactor
/// is treated as prime, so some divisors of numbers with two large prime
/// factors are missed.
fn divisors(n: &Int) -> Vec<Int> {
    let mut n = n.abs();
    let mut primes: Vec<(Int, u32)> = Vec::new();
    let mut d = Int::from(2);
    let limit = Int::from(1_000_000);
    while &d * &d <= n && d <= limit {
        let mut e = 0;
        while (&n % &d).is_zero() {
            n /= &d;
            e += 1;
        }
        if e > 0 {
            primes.push((d.clone(), e));
        }
        d += 1;
    }
    if n > Int::one() {
        primes.push((n, 1));
    }
    let mut out = vec![Int::one()];
    for (p, e) in primes {
        let mut next = Vec::new();
        for x in &out {
            let mut m = x.clone();
            for _ in 0..=e {
                next.push(m.clone());
                m *= &p;
            }
        }
        out = next;
    }
    out
}

/// Distinct rational roots, via the rational root test.
pub fn rational_roots(p: &Poly) -> Vec<Rational> {
    let mut out = Vec::new();
    if p.is_zero() {
        return out;
    }
    let l = p.coeffs.iter().fold(Int::one(), |l, x| l.lcm(x.denom()));
    let mut c: Vec<Int> = p.coeffs.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    if c[0].is_zero() {
        out.push(Rational::zero());
        while c[0].is_zero() {
            c.remove(0);
        }
    }
    if c.len() < 2 {
        return out;
    }
    let (a0, an) = (&c[0], c.last().expect("nonempty"));
    let nums = divisors(a0);
    let dens = divisors(an);
    for q in &dens {
        for n in &nums {
            for sgn in [1i32, -1] {
                let x = Rational::new(n * Int::from(sgn), q.clone());
                if !out.contains(&x) && p.eval(&x).is_zero() {
                    out.push(x);
                }
            }
        }
    }
    out.sort();
    out
}

/// Roots in `(a, b]`.
fn isolate_in(q: &Poly, sturm: &SturmChain, a: Rational, b: Rational, out: &mut Vec<RootLocation>) {
    let n = sturm.count_roots(&a, &b);
    if n == 0 {
        return;
    }
    if n == 1 {
        if q.eval(&b).is_zero() {
            out.push(RootLocation::Exact(b));
        } else if q.eval(&a).is_zero() {
            // root is `a` itself only if counted below; `(a, b]` excludes it
            let mid = (&a + &b) / Rational::from_integer(2.into());
            isolate_in(q, sturm, a, mid.clone(), out);
            isolate_in(q, sturm, mid, b, out);
        } else {
            out.push(RootLocation::Between(a, b));
        }
        return;
    }
    let mid = (&a + &b) / Rational::from_integer(2.into());
    isolate_in(q, sturm, a, mid.clone(), out);
    isolate_in(q, sturm, mid, b, out);
}

/// Sign of `p` at enough rational points of `[lo, hi]` to cover every interval
/// on which it is constant, plus zeros at the roots. The maximum over the
/// result is the sign of `sup p` on the interval.
pub fn sign_samples(p: &Poly, lo: &Rational, hi: &Rational) -> Vec<(Rational, i8)> {
    if p.is_zero() {
        return vec![(lo.clone(), 0), (hi.clone(), 0)];
    }
    let roots = isolate_roots(p, lo, hi);
    let two = Rational::from_integer(2.into());
    let mut pts: Vec<Rational> = vec![lo.clone()];
    let mut prev = lo.clone();
    for r in &roots {
        let l = r.lower();
        if l > &prev {
            pts.push((&prev + l) / &two);
        }
        if let RootLocation::Between(a, b) = r {
            pts.push(a.clone());
            pts.push(b.clone());
        } else {
            pts.push(l.clone());
        }
        prev = r.upper().clone();
    }
    if hi > &prev {
        pts.push((&prev + hi) / &two);
    }
    pts.push(hi.clone());
    pts.sort();
    pts.dedup();
    pts.into_iter()
        .map(|x| {
            let s = sign(&p.eval(&x));
            (x, s)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;

    fn p(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&x| rat(x, 1)).collect())
    }

    #[test]
    fn arithmetic_and_calculus() {
        let a = p(&[1, -1]); // 1 - s
        let b = p(&[1, 1]);
        assert_eq!(&a * &b, p(&[1, 0, -1]));
        assert_eq!((&a * &b).derivative(), p(&[0, -2]));
        assert_eq!(a.definite_integral(&rat(0, 1), &rat(1, 1)), rat(1, 2));
        assert_eq!(a.mirror(), b);
        assert_eq!(a.shift(&rat(1, 1)), p(&[0, -1]));
        assert_eq!(p(&[0, 0, 0]).degree(), None);
    }

    #[test]
    fn division_and_gcd() {
        let f = &p(&[-1, 1]) * &p(&[-1, 1]);
        let (q, r) = f.div_rem(&p(&[-1, 1]));
        assert_eq!(q, p(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(f.squarefree().monic(), p(&[-1, 1]));
    }

    #[test]
    fn interpolation_recovers_quadratic() {
        let f = p(&[3, -2, 5]);
        let pts: Vec<_> = [0, 1, 2].iter().map(|&x| (rat(x, 1), f.eval(&rat(x, 1)))).collect();
        assert_eq!(Poly::interpolate(&pts), f);
    }

    #[test]
    fn sturm_counts_and_isolates() {
        let f = p(&[-2, 0, 1]); // s^2 - 2
        let s = SturmChain::new(&f);
        assert_eq!(s.count_roots(&rat(-2, 1), &rat(2, 1)), 2);
        assert_eq!(s.count_roots(&rat(0, 1), &rat(2, 1)), 1);
        let roots = isolate_roots(&f, &rat(-2, 1), &rat(2, 1));
        assert_eq!(roots.len(), 2);
        for r in &roots {
            let RootLocation::Between(a, b) = r else { panic!("irrational root reported exact") };
            assert!(sign(&f.eval(a)) * sign(&f.eval(b)) < 0);
        }
        let g = &p(&[0, 1]) * &p(&[-1, 2]); // s (2s - 1)
        let roots = isolate_roots(&g, &rat(0, 1), &rat(1, 1));
        assert_eq!(roots, vec![RootLocation::Exact(rat(0, 1)), RootLocation::Exact(rat(1, 2))]);
    }

    #[test]
    fn sign_samples_cover_positive_bump() {
        let f = p(&[-1, 0, 4]); // 4s^2 - 1, positive outside (-1/2, 1/2)
        let max = sign_samples(&f, &rat(-1, 4), &rat(1, 1)).iter().map(|x| x.1).max();
        assert_eq!(max, Some(1));
        let max = sign_samples(&f, &rat(-1, 4), &rat(1, 4)).iter().map(|x| x.1).max();
        assert_eq!(max, Some(-1));
    }
}
