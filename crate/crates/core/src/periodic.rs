//! Period-`T` integrands and their mean-normalized Fourier coefficients
//! `c_n = (1/T) ∫_{-T/2}^{T/2} p(x) e^{-2πinx/T} dx`.

use std::f64::consts::PI;
use std::io::Read;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::expr::{self, Expr, ParseError};
use crate::quad::{self, QuadError};
use crate::rational::{self, Rational};

pub const MIN_SAMPLES: usize = 8;
/// Coefficient tolerances must lie in `(0, MAX_COEFF_TOL]`.
pub const MAX_COEFF_TOL: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PeriodicError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("period must be positive, got {0}")]
    NonPositivePeriod(String),
    #[error("jump point {0} lies outside the fundamental interval [-T/2, T/2]")]
    JumpOutsidePeriod(String),
    #[error("at least {MIN_SAMPLES} samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("coefficient tolerance must lie in (0, {MAX_COEFF_TOL}], got {0}")]
    InvalidTolerance(f64),
    #[error("coefficient quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
    #[error("linear combination requires a common period")]
    PeriodMismatch,
    #[error("empty linear combination")]
    EmptyCombination,
    #[error("sample file line {line}: {message}")]
    Samples { line: usize, message: String },
}

/// Closed-form catalog integrands. All are written in terms of `u = x / T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Catalog {
    Constant(Complex64),
    /// `cos(2π m x / T)`
    Cosine(u32),
    /// `sin(2π m x / T)`
    Sine(u32),
    /// `+1` on `(0, T/2)`, `-1` on `(-T/2, 0)`.
    Square,
    /// `2x/T` on `(-T/2, T/2)`.
    Sawtooth,
    /// `1 - 4|x|/T` on `[-T/2, T/2]`.
    Triangle,
    /// `|sin(π x / T)|`
    AbsSine,
}

impl Catalog {
    fn eval(self, u: f64) -> Complex64 {
        let re = |v: f64| Complex64::new(v, 0.0);
        match self {
            Catalog::Constant(c) => c,
            Catalog::Cosine(m) => re((2.0 * PI * m as f64 * u).cos()),
            Catalog::Sine(m) => re((2.0 * PI * m as f64 * u).sin()),
            Catalog::Square => re(if u.abs() == 0.5 || u == 0.0 { 0.0 } else { u.signum() }),
            Catalog::Sawtooth => re(if u.abs() == 0.5 { 0.0 } else { 2.0 * u }),
            Catalog::Triangle => re(1.0 - 4.0 * u.abs()),
            Catalog::AbsSine => re((PI * u).sin().abs()),
        }
    }

    fn coefficient(self, n: i64) -> Complex64 {
        let nf = n as f64;
        let zero = Complex64::zero();
        match self {
            Catalog::Constant(c) => {
                if n == 0 {
                    c
                } else {
                    zero
                }
            }
            Catalog::Cosine(0) => Catalog::Constant(Complex64::new(1.0, 0.0)).coefficient(n),
            Catalog::Cosine(m) => {
                if n.unsigned_abs() == m as u64 {
                    Complex64::new(0.5, 0.0)
                } else {
                    zero
                }
            }
            Catalog::Sine(0) => zero,
            Catalog::Sine(m) => {
                if n == m as i64 {
                    Complex64::new(0.0, -0.5)
                } else if n == -(m as i64) {
                    Complex64::new(0.0, 0.5)
                } else {
                    zero
                }
            }
            // 2 / (iπn) for odd n
            Catalog::Square => {
                if n % 2 != 0 {
                    Complex64::new(0.0, -2.0 / (PI * nf))
                } else {
                    zero
                }
            }
            // i(-1)^n / (πn)
            Catalog::Sawtooth => {
                if n == 0 {
                    zero
                } else {
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    Complex64::new(0.0, sign / (PI * nf))
                }
            }
            // 4 / (π² n²) for odd n
            Catalog::Triangle => {
                if n % 2 != 0 {
                    Complex64::new(4.0 / (PI * PI * nf * nf), 0.0)
                } else {
                    zero
                }
            }
            Catalog::AbsSine => Complex64::new(2.0 / (PI * (1.0 - 4.0 * nf * nf)), 0.0),
        }
    }

    /// Points of `[-1/2, 1/2]` (in units of `T`) where the function jumps or kinks.
    fn breaks(self) -> Vec<Rational> {
        let half = rational::ratio(1, 2);
        match self {
            Catalog::Constant(_) | Catalog::Cosine(_) | Catalog::Sine(_) => Vec::new(),
            Catalog::Sawtooth => vec![-half.clone(), half],
            Catalog::Square | Catalog::Triangle | Catalog::AbsSine => {
                vec![-half.clone(), Rational::zero(), half]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Body {
    Expr(Expr),
    Samples(Vec<Complex64>),
    Catalog(Catalog),
    Combination(Vec<(Complex64, PeriodicFunction)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicFunction {
    period: Rational,
    period_f64: f64,
    body: Body,
    jump_points: Vec<Rational>,
    analytic: bool,
}

impl PeriodicFunction {
    fn build(period: Rational, body: Body, mut jump_points: Vec<Rational>) -> Result<Self, PeriodicError> {
        if !period.is_positive() {
            return Err(PeriodicError::NonPositivePeriod(rational::pq(&period)));
        }
        let half = &period / rational::int(2);
        if let Some(bad) = jump_points.iter().find(|j| j.abs() > half) {
            return Err(PeriodicError::JumpOutsidePeriod(rational::pq(bad)));
        }
        jump_points.sort();
        jump_points.dedup();
        let analytic = match &body {
            Body::Catalog(_) => true,
            Body::Combination(terms) => terms.iter().all(|(_, p)| p.analytic),
            Body::Expr(_) | Body::Samples(_) => false,
        };
        Ok(PeriodicFunction {
            period_f64: rational::to_f64(&period),
            period,
            body,
            jump_points,
            analytic,
        })
    }

    pub fn from_expr(expr: Expr, period: Rational, jumps: Vec<Rational>) -> Result<Self, PeriodicError> {
        Self::build(period, Body::Expr(expr), jumps)
    }

    /// Uniform samples on `[-T/2, T/2)` joined by periodic linear interpolation.
    pub fn from_samples(values: Vec<Complex64>, period: Rational) -> Result<Self, PeriodicError> {
        if values.len() < MIN_SAMPLES {
            return Err(PeriodicError::TooFewSamples(values.len()));
        }
        let wrap = -(&period / rational::int(2));
        Self::build(period, Body::Samples(values), vec![wrap])
    }

    pub fn catalog(kind: Catalog, period: Rational) -> Result<Self, PeriodicError> {
        let jumps = kind.breaks().iter().map(|u| u * &period).collect();
        Self::build(period, Body::Catalog(kind), jumps)
    }

    pub fn constant(c: f64, period: Rational) -> Result<Self, PeriodicError> {
        Self::catalog(Catalog::Constant(Complex64::new(c, 0.0)), period)
    }

    pub fn cosine(m: u32, period: Rational) -> Result<Self, PeriodicError> {
        Self::catalog(Catalog::Cosine(m), period)
    }

    pub fn sine(m: u32, period: Rational) -> Result<Self, PeriodicError> {
        Self::catalog(Catalog::Sine(m), period)
    }

    pub fn square_wave(period: Rational) -> Result<Self, PeriodicError> {
        Self::catalog(Catalog::Square, period)
    }

    pub fn sawtooth(period: Rational) -> Result<Self, PeriodicError> {
        Self::catalog(Catalog::Sawtooth, period)
    }

    pub fn triangle_wave(period: Rational) -> Result<Self, PeriodicError> {
        Self::catalog(Catalog::Triangle, period)
    }

    pub fn abs_sine(period: Rational) -> Result<Self, PeriodicError> {
        Self::catalog(Catalog::AbsSine, period)
    }

    /// `Σ α_j p_j` over functions sharing one period. Closed-form
    /// coefficients survive when every member has them.
    pub fn linear_combination(terms: Vec<(Complex64, PeriodicFunction)>) -> Result<Self, PeriodicError> {
        let first = terms.first().ok_or(PeriodicError::EmptyCombination)?;
        let period = first.1.period.clone();
        if terms.iter().any(|(_, p)| p.period != period) {
            return Err(PeriodicError::PeriodMismatch);
        }
        let jumps = terms
            .iter()
            .flat_map(|(_, p)| p.jump_points.iter().cloned())
            .collect();
        Self::build(period, Body::Combination(terms), jumps)
    }

    pub fn period(&self) -> &Rational {
        &self.period
    }

    pub fn period_f64(&self) -> f64 {
        self.period_f64
    }

    pub fn jump_points(&self) -> &[Rational] {
        &self.jump_points
    }

    pub fn has_analytic_coefficients(&self) -> bool {
        self.analytic
    }

    /// Points in `[-T/2, T/2]` where the body may fail to be smooth: declared
    /// jumps, the interval ends, and interpolation nodes for sampled bodies.
    pub fn smoothness_breaks(&self) -> Vec<f64> {
        let t = self.period_f64;
        let mut out: Vec<f64> = self.jump_points.iter().map(rational::to_f64).collect();
        out.push(-0.5 * t);
        out.push(0.5 * t);
        self.collect_sample_nodes(&mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_sample_nodes(&self, out: &mut Vec<f64>) {
        match &self.body {
            Body::Samples(v) => {
                let t = self.period_f64;
                let n = v.len();
                out.extend((0..n).map(|j| -0.5 * t + t * j as f64 / n as f64));
            }
            Body::Combination(terms) => terms.iter().for_each(|(_, p)| p.collect_sample_nodes(out)),
            _ => {}
        }
    }

    /// Reduces `x` into the fundamental interval; points already inside are
    /// returned unchanged.
    pub fn reduce(&self, x: f64) -> f64 {
        let t = self.period_f64;
        if x.abs() <= 0.5 * t {
            return x;
        }
        let r = x - t * ((x + 0.5 * t) / t).floor();
        r.clamp(-0.5 * t, 0.5 * t)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let x = self.reduce(x);
        self.eval_reduced(x)
    }

    fn eval_reduced(&self, x: f64) -> Complex64 {
        let t = self.period_f64;
        match &self.body {
            Body::Expr(e) => Complex64::new(e.eval(x), 0.0),
            Body::Catalog(c) => c.eval(x / t),
            Body::Samples(v) => {
                let n = v.len();
                let u = (x / t + 0.5) * n as f64;
                let j = (u.floor() as usize).min(n - 1);
                let frac = u - j as f64;
                v[j] * (1.0 - frac) + v[(j + 1) % n] * frac
            }
            Body::Combination(terms) => terms.iter().map(|(a, p)| a * p.eval_reduced(x)).sum(),
        }
    }

    fn analytic_coefficient(&self, n: i64) -> Option<Complex64> {
        match &self.body {
            Body::Catalog(c) => Some(c.coefficient(n)),
            Body::Combination(terms) if self.analytic => Some(
                terms
                    .iter()
                    .map(|(a, p)| a * p.analytic_coefficient(n).expect("analytic member"))
                    .sum(),
            ),
            _ => None,
        }
    }

    /// Mean-normalized coefficient by adaptive quadrature, ignoring any closed form.
    pub fn numeric_coefficient(&self, n: i64, tol: f64) -> Result<Complex64, PeriodicError> {
        check_tol(tol)?;
        let t = self.period_f64;
        let omega = -2.0 * PI * n as f64 / t;
        let integrand = |x: f64| self.eval_reduced(x) * Complex64::from_polar(1.0, omega * x);
        let r = quad::integrate_split(
            &integrand,
            -0.5 * t,
            0.5 * t,
            &self.smoothness_breaks(),
            tol * t,
            quad::DEFAULT_MAX_PANELS,
        )?;
        Ok(r.value / t)
    }
}

fn check_tol(tol: f64) -> Result<(), PeriodicError> {
    if tol > 0.0 && tol <= MAX_COEFF_TOL {
        Ok(())
    } else {
        Err(PeriodicError::InvalidTolerance(tol))
    }
}

/// `c_n(p)`: the closed form when the function has one, otherwise adaptive
/// quadrature to absolute error `tol`.
pub fn fourier_coefficient(p: &PeriodicFunction, n: i64, tol: f64) -> Result<Complex64, PeriodicError> {
    check_tol(tol)?;
    match p.analytic_coefficient(n) {
        Some(c) => Ok(c),
        None => p.numeric_coefficient(n, tol),
    }
}

pub fn parse_periodic(
    source: &str,
    period: Rational,
    jumps: Option<Vec<Rational>>,
) -> Result<PeriodicFunction, PeriodicError> {
    let expr = expr::parse_expr(source)?;
    PeriodicFunction::from_expr(expr, period, jumps.unwrap_or_default())
}

pub fn from_samples(values: Vec<Complex64>, period: Rational) -> Result<PeriodicFunction, PeriodicError> {
    PeriodicFunction::from_samples(values, period)
}

/// Reads one complex sample per line as `re` or `re,im`.
pub fn read_samples_csv<R: Read>(reader: R) -> Result<Vec<Complex64>, PeriodicError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| PeriodicError::Samples {
            line: i + 1,
            message: e.to_string(),
        })?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        let field = |k: usize| -> Result<f64, PeriodicError> {
            record[k].parse().map_err(|_| PeriodicError::Samples {
                line,
                message: format!("`{}` is not a number", &record[k]),
            })
        };
        let value = match record.len() {
            1 => Complex64::new(field(0)?, 0.0),
            2 => Complex64::new(field(0)?, field(1)?),
            n => {
                return Err(PeriodicError::Samples {
                    line,
                    message: format!("expected `re` or `re,im`, found {n} fields"),
                })
            }
        };
        out.push(value);
    }
    Ok(out)
}
