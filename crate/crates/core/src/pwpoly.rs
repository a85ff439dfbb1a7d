//! Exact rational piecewise polynomials and the centered B-splines.
//!
//! A [`PiecewisePolynomial`] is zero outside `[first, last]` breakpoint. Each
//! piece stores monomial coefficients in powers of `(x - a)`, where `a` is the
//! left breakpoint of its interval. Values exactly at a breakpoint are never
//! stored: [`PiecewisePolynomial::eval_limits`] returns both one-sided limits
//! and their midpoint.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{self, Rational, PQ};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PwPolyError {
    #[error("B-spline order must be at least 1")]
    ZeroOrder,
    #[error("breakpoints must be strictly increasing")]
    UnsortedBreakpoints,
    #[error("expected {expected} pieces for the given breakpoints, got {got}")]
    PieceCount { expected: usize, got: usize },
}

/// One-sided limits at a point together with their midpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    pub left: Rational,
    pub right: Rational,
    pub avg: Rational,
}

impl Limits {
    fn new(left: Rational, right: Rational) -> Self {
        let avg = (&left + &right) / rational::int(2);
        Limits { left, right, avg }
    }

    fn zero() -> Self {
        Limits::new(Rational::zero(), Rational::zero())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<Rational>,
    pieces: Vec<Vec<Rational>>,
}

impl PiecewisePolynomial {
    /// Builds a piecewise polynomial from breakpoints and local coefficient
    /// vectors. An empty breakpoint list denotes the zero function.
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Vec<Rational>>) -> Result<Self, PwPolyError> {
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PwPolyError::UnsortedBreakpoints);
        }
        let expected = breakpoints.len().saturating_sub(1);
        if pieces.len() != expected || breakpoints.len() == 1 {
            return Err(PwPolyError::PieceCount {
                expected,
                got: pieces.len(),
            });
        }
        let pieces = pieces.into_iter().map(trim).collect();
        Ok(PiecewisePolynomial { breakpoints, pieces })
    }

    pub fn zero() -> Self {
        PiecewisePolynomial {
            breakpoints: Vec::new(),
            pieces: Vec::new(),
        }
    }

    /// The unit box: 1 on (-1/2, 1/2), 0 outside.
    pub fn unit_box() -> Self {
        PiecewisePolynomial {
            breakpoints: vec![rational::ratio(-1, 2), rational::ratio(1, 2)],
            pieces: vec![vec![Rational::one()]],
        }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Vec<Rational>] {
        &self.pieces
    }

    /// `[first, last]` breakpoint, or `None` for the zero function.
    pub fn support(&self) -> Option<(&Rational, &Rational)> {
        Some((self.breakpoints.first()?, self.breakpoints.last()?))
    }

    pub fn degree(&self) -> Option<usize> {
        self.pieces.iter().filter_map(|p| p.len().checked_sub(1)).max()
    }

    /// One convolution step with the unit box:
    /// `(B * box)(x) = F(x + 1/2) - F(x - 1/2)` with `F` an antiderivative of `B`.
    pub fn convolve_box(&self) -> Self {
        if self.pieces.is_empty() {
            return Self::zero();
        }
        let half = rational::ratio(1, 2);
        let antiderivative = Antiderivative::new(self);

        let mut breakpoints: Vec<Rational> = self
            .breakpoints
            .iter()
            .flat_map(|a| [a - &half, a + &half])
            .collect();
        breakpoints.sort();
        breakpoints.dedup();

        let pieces = breakpoints
            .windows(2)
            .map(|w| {
                let (u, v) = (&w[0], &w[1]);
                let mid = (u + v) / rational::int(2);
                let upper = antiderivative.local(&(&mid + &half), &(u + &half));
                let lower = antiderivative.local(&(&mid - &half), &(u - &half));
                trim(sub(&upper, &lower))
            })
            .collect();
        PiecewisePolynomial { breakpoints, pieces }
    }

    /// One-sided limits at `x` (zero outside the support) and their midpoint.
    pub fn eval_limits(&self, x: &Rational) -> Limits {
        let Some((first, last)) = self.support() else {
            return Limits::zero();
        };
        if x < first || x > last {
            return Limits::zero();
        }
        let left = if x == first {
            Rational::zero()
        } else {
            // Interval (a_i, a_{i+1}] containing x.
            let i = self.breakpoints.partition_point(|a| a < x) - 1;
            horner(&self.pieces[i], &(x - &self.breakpoints[i]))
        };
        let right = if x == last {
            Rational::zero()
        } else {
            // Interval [a_i, a_{i+1}) containing x.
            let i = self.breakpoints.partition_point(|a| a <= x) - 1;
            horner(&self.pieces[i], &(x - &self.breakpoints[i]))
        };
        Limits::new(left, right)
    }

    /// Value at a float argument in floating point; midpoint at breakpoints.
    pub fn eval_f64(&self, x: f64) -> f64 {
        if self.breakpoints.is_empty() {
            return 0.0;
        }
        let at = |i: usize| {
            let a = rational::to_f64(&self.breakpoints[i]);
            let t = x - a;
            self.pieces[i]
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * t + rational::to_f64(c))
        };
        let n = self.pieces.len();
        let bp = |i: usize| rational::to_f64(&self.breakpoints[i]);
        if x < bp(0) || x > bp(n) {
            return 0.0;
        }
        // Index of the last breakpoint <= x.
        let i = (0..=n).rev().find(|&i| bp(i) <= x).unwrap_or(0);
        if bp(i) == x {
            let left = if i == 0 { 0.0 } else { at(i - 1) };
            let right = if i == n { 0.0 } else { at(i) };
            0.5 * (left + right)
        } else {
            at(i)
        }
    }

    /// Exact integral over the real line.
    pub fn total_integral(&self) -> Rational {
        self.breakpoints
            .windows(2)
            .zip(&self.pieces)
            .map(|(w, p)| horner(&integrate(p), &(&w[1] - &w[0])))
            .fold(Rational::zero(), |acc, v| acc + v)
    }

    /// Piecewise derivative on the same breakpoints.
    pub fn derivative(&self) -> Self {
        let pieces = self.pieces.iter().map(|p| differentiate(p)).collect();
        PiecewisePolynomial {
            breakpoints: self.breakpoints.clone(),
            pieces,
        }
    }
}

/// The centered B-spline of order `k`: the k-fold self-convolution of the
/// unit box, supported on `[-k/2, k/2]`, of degree `k - 1`.
pub fn bspline(k: u32) -> Result<PiecewisePolynomial, PwPolyError> {
    if k == 0 {
        return Err(PwPolyError::ZeroOrder);
    }
    let mut spline = PiecewisePolynomial::unit_box();
    for _ in 1..k {
        spline = spline.convolve_box();
    }
    Ok(spline)
}

impl fmt::Display for PiecewisePolynomial {
    /// One line per interval: `[a, b) : c0 + c1*(x-a) + c2*(x-a)^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (w, piece) in self.breakpoints.windows(2).zip(&self.pieces) {
            let a = &w[0];
            let shift = if a.is_negative() {
                format!("(x-({}))", PQ(a))
            } else {
                format!("(x-{})", PQ(a))
            };
            write!(f, "[{}, {}) : ", PQ(a), PQ(&w[1]))?;
            if piece.is_empty() {
                write!(f, "0/1")?;
            }
            for (j, c) in piece.iter().enumerate() {
                if j > 0 {
                    write!(f, " + ")?;
                }
                match j {
                    0 => write!(f, "{}", PQ(c))?,
                    1 => write!(f, "{}*{}", PQ(c), shift)?,
                    _ => write!(f, "{}*{}^{}", PQ(c), shift, j)?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Continuous antiderivative of a piecewise polynomial, constant outside the
/// support.
struct Antiderivative<'a> {
    base: &'a PiecewisePolynomial,
    integrals: Vec<Vec<Rational>>,
    offsets: Vec<Rational>,
}

impl<'a> Antiderivative<'a> {
    fn new(base: &'a PiecewisePolynomial) -> Self {
        let integrals: Vec<_> = base.pieces.iter().map(|p| integrate(p)).collect();
        let mut offsets = Vec::with_capacity(integrals.len() + 1);
        offsets.push(Rational::zero());
        for (w, q) in base.breakpoints.windows(2).zip(&integrals) {
            let prev = offsets.last().unwrap().clone();
            offsets.push(prev + horner(q, &(&w[1] - &w[0])));
        }
        Antiderivative {
            base,
            integrals,
            offsets,
        }
    }

    /// The antiderivative on the region containing `probe`, re-expanded in
    /// powers of `(t - origin)`.
    fn local(&self, probe: &Rational, origin: &Rational) -> Vec<Rational> {
        let bps = &self.base.breakpoints;
        if probe <= &bps[0] {
            return Vec::new();
        }
        if probe >= bps.last().unwrap() {
            return trim(vec![self.offsets.last().unwrap().clone()]);
        }
        let i = bps.partition_point(|a| a <= probe) - 1;
        let mut poly = self.integrals[i].clone();
        if poly.is_empty() {
            poly.push(Rational::zero());
        }
        poly[0] += &self.offsets[i];
        taylor_shift(&poly, &(origin - &bps[i]))
    }
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn horner(p: &[Rational], y: &Rational) -> Rational {
    p.iter()
        .rev()
        .fold(Rational::zero(), |acc, c| acc * y + c)
}

fn integrate(p: &[Rational]) -> Vec<Rational> {
    if p.is_empty() {
        return Vec::new();
    }
    std::iter::once(Rational::zero())
        .chain(
            p.iter()
                .enumerate()
                .map(|(j, c)| c / rational::int(j as i64 + 1)),
        )
        .collect()
}

fn differentiate(p: &[Rational]) -> Vec<Rational> {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c * rational::int(j as i64))
            .collect(),
    )
}

fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|j| {
            let x = a.get(j).cloned().unwrap_or_else(Rational::zero);
            let y = b.get(j).cloned().unwrap_or_else(Rational::zero);
            x - y
        })
        .collect()
}

/// Coefficients of `q(y) = p(y + delta)`.
fn taylor_shift(p: &[Rational], delta: &Rational) -> Vec<Rational> {
    let mut out = p.to_vec();
    if delta.is_zero() {
        return out;
    }
    // Repeated synthetic division by (y - (-delta)).
    let n = out.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let carry = &out[j + 1] * delta;
            out[j] += carry;
        }
    }
    out
}
