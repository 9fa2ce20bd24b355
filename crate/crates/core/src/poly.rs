//! Dense real polynomials and real-root isolation.
//!
//! Roots are isolated by recursing on the derivative: the critical points
//! split the Cauchy-bound interval into monotone pieces, each of which holds
//! at most one root and is bisected to full precision. Critical points whose
//! value lies inside the evaluation error bound are reported as (multiple)
//! roots.

use std::ops::{Add, Mul, Neg, Sub};

/// Coefficients in ascending order: `coeffs[k]` multiplies `x^k`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if *c == 0.0) {
            self.coeffs.pop();
        }
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Running-error bound of Horner evaluation at `x`.
    pub fn eval_error_bound(&self, x: f64) -> f64 {
        let ax = x.abs();
        let mag = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * ax + c.abs());
        let deg = self.coeffs.len().max(1) as f64;
        4.0 * deg * f64::EPSILON * mag
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(1.0), |acc, _| &acc * self)
    }

    /// Divide by `(x − r)` with synthetic division, returning the quotient
    /// and the remainder.
    pub fn deflate(&self, r: f64) -> (Self, f64) {
        let Some(deg) = self.degree() else {
            return (Self::default(), 0.0);
        };
        if deg == 0 {
            return (Self::default(), self.coeffs[0]);
        }
        let mut q = vec![0.0; deg];
        let mut carry = self.coeffs[deg];
        for k in (0..deg).rev() {
            q[k] = carry;
            carry = self.coeffs[k] + r * carry;
        }
        (Self::new(q), carry)
    }

    /// Divide by `x^m`, returning the quotient and the dropped low-order
    /// coefficients.
    pub fn shift_down(&self, m: usize) -> (Self, Vec<f64>) {
        let m = m.min(self.coeffs.len());
        (
            Self::new(self.coeffs[m..].to_vec()),
            self.coeffs[..m].to_vec(),
        )
    }

    /// Drop every coefficient above `max_degree`, returning the truncated
    /// polynomial and the dropped coefficients.
    pub fn truncate(&self, max_degree: usize) -> (Self, Vec<f64>) {
        let keep = (max_degree + 1).min(self.coeffs.len());
        (
            Self::new(self.coeffs[..keep].to_vec()),
            self.coeffs[keep..].to_vec(),
        )
    }

    /// `1 + max_k |c_k / c_n|`; every root lies strictly inside this radius.
    pub fn cauchy_bound(&self) -> f64 {
        let lead = self.leading();
        let n = self.coeffs.len();
        1.0 + self.coeffs[..n.saturating_sub(1)]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max)
    }

    /// Sorted distinct real roots.
    pub fn real_roots(&self) -> Vec<f64> {
        let deg = match self.degree() {
            None | Some(0) => return Vec::new(),
            Some(d) => d,
        };
        if deg == 1 {
            return vec![-self.coeffs[0] / self.coeffs[1]];
        }
        let bound = self.cauchy_bound();
        let crit: Vec<f64> = self
            .derivative()
            .real_roots()
            .into_iter()
            .filter(|x| x.abs() < bound)
            .collect();

        let mut knots = Vec::with_capacity(crit.len() + 2);
        knots.push(-bound);
        knots.extend(crit.iter().copied());
        knots.push(bound);

        let is_zero = |x: f64| self.eval(x).abs() <= self.eval_error_bound(x);
        let mut roots = Vec::new();
        for w in knots.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if is_zero(lo) {
                push_distinct(&mut roots, lo);
            }
            let (flo, fhi) = (self.eval(lo), self.eval(hi));
            if !is_zero(lo) && !is_zero(hi) && flo.signum() != fhi.signum() {
                push_distinct(&mut roots, self.bisect(lo, hi, flo));
            }
        }
        if let Some(last) = knots.last() {
            if is_zero(*last) {
                push_distinct(&mut roots, *last);
            }
        }
        roots
    }

    pub fn largest_real_root(&self) -> Option<f64> {
        self.real_roots().last().copied()
    }

    pub fn has_real_root(&self) -> bool {
        !self.real_roots().is_empty()
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, mut flo: f64) -> f64 {
        for _ in 0..2100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = self.eval(mid);
            if fm == 0.0 {
                return mid;
            }
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn push_distinct(roots: &mut Vec<f64>, x: f64) {
    let dup = roots
        .last()
        .is_some_and(|r| (x - r).abs() <= 1e-10 * x.abs().max(1.0));
    if !dup {
        roots.push(x);
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new(
            (0..len)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(0.0)
                        + rhs.coeffs.get(k).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Poly::default();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (a, ca) in self.coeffs.iter().enumerate() {
            for (b, cb) in rhs.coeffs.iter().enumerate() {
                out[a + b] += ca * cb;
            }
        }
        Poly::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn from_roots(roots: &[f64]) -> Poly {
        roots
            .iter()
            .fold(Poly::constant(1.0), |acc, r| &acc * &Poly::new(vec![-r, 1.0]))
    }

    #[test]
    fn simple_roots() {
        let p = from_roots(&[-3.0, 0.5, 2.0, 7.0]);
        let r = p.real_roots();
        assert_eq!(r.len(), 4);
        for (a, b) in r.iter().zip([-3.0, 0.5, 2.0, 7.0]) {
            assert_relative_eq!(*a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn no_roots() {
        assert!(Poly::new(vec![1.0, 0.0, 0.0, 0.0, 1.0]).real_roots().is_empty());
        assert!(Poly::new(vec![2.0, 0.0, 1.0]).real_roots().is_empty());
        assert!(Poly::constant(3.0).real_roots().is_empty());
    }

    #[test]
    fn double_root_is_found() {
        let p = from_roots(&[2.0, 2.0, -1.0]);
        let r = p.real_roots();
        assert_eq!(r.len(), 2);
        assert_relative_eq!(r[1], 2.0, epsilon = 1e-7);
        let q = &from_roots(&[1.0, 1.0]) * &Poly::new(vec![1.0, 0.0, 1.0]);
        assert_eq!(q.real_roots().len(), 1);
    }

    #[test]
    fn deflation() {
        let p = from_roots(&[2.0, 2.0, -1.0, 0.0, 0.0]);
        let (q, low) = p.shift_down(2);
        assert!(low.iter().all(|c| *c == 0.0));
        let (q, r1) = q.deflate(2.0);
        let (q, r2) = q.deflate(2.0);
        assert!(r1.abs() < 1e-12 && r2.abs() < 1e-12);
        assert_eq!(q.degree(), Some(1));
        assert_relative_eq!(q.real_roots()[0], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn arithmetic() {
        let x = Poly::x();
        let p = &(&x * &x) - &Poly::constant(4.0);
        assert_eq!(p.coeffs(), &[-4.0, 0.0, 1.0]);
        assert_eq!(p.derivative().coeffs(), &[0.0, 2.0]);
        assert_eq!((&x + &Poly::constant(-1.0)).pow(2).coeffs(), &[1.0, -2.0, 1.0]);
        assert_eq!(p.eval(3.0), 5.0);
        assert_eq!((&p - &p).degree(), None);
    }

    #[test]
    fn widely_spread_roots() {
        let p = from_roots(&[1e-3, 10.0, 1e4]);
        let r = p.real_roots();
        assert_eq!(r.len(), 3);
        assert_relative_eq!(r[0], 1e-3, max_relative = 1e-8);
        assert_relative_eq!(r[2], 1e4, max_relative = 1e-10);
    }
}
