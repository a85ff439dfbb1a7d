//! Brute-force evaluation of `∫ ĝ(x) p(x) dx` on the real line, independent
//! of the Parseval sum.
//!
//! The truncated integral over `[-(M + 1/2), M + 1/2]` is split into unit
//! blocks `[m - 1/2, m + 1/2]`, each further split at the translated jump
//! points of `p` and integrated adaptively. Blocks are accumulated in the
//! fixed order `0, 1, -1, 2, -2, ...`. Three ways to handle the tail:
//!
//! * [`Method::Plain`]: drop it; the error estimate carries an absolute
//!   tail bound from the kernel's decay class.
//! * [`Method::BlockAveraged`]: average the last tenth of the symmetric
//!   cumulative sums to damp oscillatory, conditionally convergent tails.
//! * [`Method::TailCorrected`]: for kernels with rational dilation, write
//!   `ĝ(x) p(x)` for large `|x|` as a sum of `u_j(x) / x^σ_j` with `u_j`
//!   periodic (exact for `sinc^k`, the Hankel expansion for the Bessel
//!   kernels), expand the remaining integral in moments of each `u_j` over
//!   one common period and sum the resulting Hurwitz zeta series.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{self, EngineError, EvaluationResult};
use crate::exec::Execution;
use crate::kernels::{BandlimitedKernel, DecayClass, Scale};
use crate::periodic::{PeriodicFunction, MAX_COEFF_TOL};
use crate::quad::{self, QuadError};
use crate::bessel::sin_pi;
use crate::rational::{self, Rational};
use crate::series;

pub const MIN_RADIUS: f64 = 10.0;
/// Panel cap for one block segment.
const BLOCK_PANELS: usize = 400;
/// Moments kept in the tail expansion.
const TAIL_MOMENTS: usize = 16;
/// Radius used for block averaging of slowly decaying kernels.
pub const AVERAGED_RADIUS: f64 = 500.0;
/// `sup_{y>0} sqrt(y) |J1(y)|` is below this constant.
pub const J1_ENVELOPE: f64 = 0.85;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Plain,
    BlockAveraged,
    TailCorrected,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("truncation radius must be at least {MIN_RADIUS}, got {0}")]
    RadiusTooSmall(f64),
    #[error("tolerance must lie in (0, {MAX_COEFF_TOL}], got {0}")]
    InvalidTolerance(f64),
    #[error("block [{a}, {b}]: {source}")]
    Block { a: f64, b: f64, source: QuadError },
    #[error("tail correction needs a rational dilation factor")]
    TailModelUnavailable,
    #[error("radius {radius} too small for a tail expansion over common period {period}")]
    PeriodTooLong { radius: f64, period: f64 },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureReport {
    /// Plain: interleaved sum of `block_values`; averaged: Cesàro mean of the
    /// symmetric cumulative sums; tail-corrected: interleaved sum plus
    /// `tail_correction`.
    pub value: Complex64,
    pub truncation_radius: f64,
    /// Integrals over `[m - 1/2, m + 1/2]` for `m = -M..=M`, ascending.
    pub block_values: Vec<Complex64>,
    pub tail_correction: Complex64,
    pub quadrature_error: f64,
    pub tail_error: f64,
    pub error_estimate: f64,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[derive(Default)]
pub struct OracleOptions {
    pub execution: Execution,
    /// Upper limit on the number of unit blocks (`2M + 1`).
    pub max_blocks: Option<usize>,
}


fn check_inputs(radius: f64, tol: f64) -> Result<(), OracleError> {
    if !(radius >= MIN_RADIUS) {
        return Err(OracleError::RadiusTooSmall(radius));
    }
    if !(tol > 0.0 && tol <= MAX_COEFF_TOL) {
        return Err(OracleError::InvalidTolerance(tol));
    }
    Ok(())
}

/// Half-width `M` such that `[-(M + 1/2), M + 1/2]` covers `[-X, X]`,
/// possibly capped by `max_blocks`.
fn half_width(radius: f64, max_blocks: Option<usize>) -> u64 {
    let m = (radius - 0.5).ceil().max(0.0) as u64;
    match max_blocks {
        Some(cap) => m.min((cap.saturating_sub(1) / 2) as u64).max(1),
        None => m,
    }
}

/// Break points of `p` translated into `[a, b]`.
fn cuts_in(p: &PeriodicFunction, a: f64, b: f64) -> Vec<f64> {
    let t = p.period_f64();
    let base = p.smoothness_breaks();
    let lo = ((a - 0.5 * t) / t).floor() as i64 - 1;
    let hi = ((b + 0.5 * t) / t).ceil() as i64 + 1;
    let mut cuts: Vec<f64> = (lo..=hi)
        .flat_map(|j| base.iter().map(move |c| c + j as f64 * t))
        .filter(|&c| c > a && c < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

fn integrand<'a>(p: &'a PeriodicFunction, k: &'a BandlimitedKernel) -> impl Fn(f64) -> Complex64 + Sync + 'a {
    move |x| p.eval(x) * k.transform(x)
}

fn integrate_blocks(
    p: &PeriodicFunction,
    kernel: &BandlimitedKernel,
    blocks: Vec<(f64, f64)>,
    block_tol: f64,
    execution: Execution,
) -> Result<Vec<quad::QuadResult>, OracleError> {
    let f = integrand(p, kernel);
    execution
        .map(blocks, |(a, b)| {
            quad::integrate_split(&f, a, b, &cuts_in(p, a, b), block_tol, BLOCK_PANELS)
                .map_err(|source| OracleError::Block { a, b, source })
        })
        .into_iter()
        .collect()
}

/// Cumulative symmetric sums `S_0 = B_0`, `S_j = S_{j-1} + B_j + B_{-j}`.
fn symmetric_sums(blocks: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(m + 1);
    let mut acc = blocks[m];
    out.push(acc);
    for j in 1..=m {
        acc += blocks[m + j];
        acc += blocks[m - j];
        out.push(acc);
    }
    out
}

/// Estimate of `sup |p|` from a dense sample of one period.
pub fn sup_norm_estimate(p: &PeriodicFunction) -> f64 {
    let t = p.period_f64();
    let n = 4096;
    let grid = (0..=n).map(|j| -0.5 * t + t * j as f64 / n as f64);
    let breaks = p.smoothness_breaks().into_iter().flat_map(|c| [c - 1e-12 * t, c, c + 1e-12 * t]);
    grid.chain(breaks)
        .map(|x| p.eval(x).norm())
        .fold(0.0, f64::max)
}

/// Absolute bound on `|∫_{|x| > R} ĝ p|` from the kernel envelope, or
/// infinity when `ĝ` is not absolutely integrable.
pub fn analytic_tail_bound(kernel: &BandlimitedKernel, sup_p: f64, radius: f64) -> f64 {
    let s = kernel.scale().to_f64();
    match kernel.decay_class() {
        DecayClass::Power(k) if k >= 2 => {
            let k = k as i32;
            2.0 * sup_p * s.powi(1 - k) / (PI.powi(k) * (k - 1) as f64 * radius.powi(k - 1))
        }
        DecayClass::Jinc => {
            // |ĝ(x)| <= s * C / sqrt(2π s x) / (2 s x)
            let c = J1_ENVELOPE / (2.0 * (2.0 * PI * s).sqrt());
            2.0 * sup_p * c * 2.0 / radius.sqrt()
        }
        _ => f64::INFINITY,
    }
}

pub fn oracle_integral(
    p: &PeriodicFunction,
    kernel: &BandlimitedKernel,
    radius: f64,
    tol: f64,
    method: Method,
) -> Result<QuadratureReport, OracleError> {
    oracle_integral_with(p, kernel, radius, tol, method, OracleOptions::default())
}

pub fn oracle_integral_with(
    p: &PeriodicFunction,
    kernel: &BandlimitedKernel,
    radius: f64,
    tol: f64,
    method: Method,
    options: OracleOptions,
) -> Result<QuadratureReport, OracleError> {
    check_inputs(radius, tol)?;
    let tail_model = match method {
        Method::TailCorrected => Some(TailModel::new(p, kernel)?),
        _ => None,
    };
    let m = half_width(radius, options.max_blocks) as i64;
    let truncation_radius = m as f64 + 0.5;
    if let Some(model) = &tail_model {
        if truncation_radius < 4.0 * model.period {
            return Err(OracleError::PeriodTooLong {
                radius: truncation_radius,
                period: model.period,
            });
        }
    }

    let blocks: Vec<(f64, f64)> = (-m..=m).map(|j| (j as f64 - 0.5, j as f64 + 0.5)).collect();
    let block_tol = 0.5 * tol / blocks.len() as f64;
    let results = integrate_blocks(p, kernel, blocks, block_tol, options.execution)?;
    let block_values: Vec<Complex64> = results.iter().map(|r| r.value).collect();
    let quadrature_error: f64 = results.iter().map(|r| r.error).sum();

    let sums = symmetric_sums(&block_values, m as usize);
    let truncated = *sums.last().unwrap();
    let (value, tail_correction, tail_error) = match method {
        Method::Plain => {
            let bound = analytic_tail_bound(kernel, sup_norm_estimate(p), truncation_radius);
            (truncated, Complex64::zero(), bound)
        }
        Method::BlockAveraged => {
            let avg = series::cesaro_tail(&sums, series::tail_window(m as usize));
            (avg.value, Complex64::zero(), avg.spread)
        }
        Method::TailCorrected => {
            let model = tail_model.expect("built above");
            let (tail, err) = model.tail(p, truncation_radius, block_tol)?;
            (truncated + tail, tail, err)
        }
    };
    Ok(QuadratureReport {
        value,
        truncation_radius,
        block_values,
        tail_correction,
        quadrature_error,
        tail_error,
        error_estimate: quadrature_error + tail_error,
        method,
    })
}

/// Plain truncation exploiting evenness of `ĝ p`: integrates `[0, R]` and
/// doubles. Callers are responsible for the symmetry.
pub fn oracle_integral_even(
    p: &PeriodicFunction,
    kernel: &BandlimitedKernel,
    radius: f64,
    tol: f64,
) -> Result<QuadratureReport, OracleError> {
    check_inputs(radius, tol)?;
    let m = half_width(radius, None) as i64;
    let truncation_radius = m as f64 + 0.5;
    let mut blocks = vec![(0.0, 0.5)];
    blocks.extend((1..=m).map(|j| (j as f64 - 0.5, j as f64 + 0.5)));
    let block_tol = 0.25 * tol / (m as f64 + 1.0);
    let results = integrate_blocks(p, kernel, blocks, block_tol, Execution::default())?;
    let half: Complex64 = results.iter().map(|r| r.value).sum();
    let quadrature_error = 2.0 * results.iter().map(|r| r.error).sum::<f64>();
    let tail_error = analytic_tail_bound(kernel, sup_norm_estimate(p), truncation_radius);
    Ok(QuadratureReport {
        value: 2.0 * half,
        truncation_radius,
        block_values: results.iter().map(|r| 2.0 * r.value).collect(),
        tail_correction: Complex64::zero(),
        quadrature_error,
        tail_error,
        error_estimate: quadrature_error + tail_error,
        method: Method::Plain,
    })
}

/// Periodic factor of one term `x^(-σ) N(x)` of the large-`x` expansion of
/// `ĝ` on the positive half-line.
#[derive(Debug, Clone, Copy)]
enum Numerator {
    /// `λ^(1-k) sin^k(πλx) / π^k`
    SincPower { k: u32, lambda: f64 },
    /// `amp · sin(π(2λx + shift))`
    Wave { amp: f64, lambda: f64, shift: f64 },
}

impl Numerator {
    fn eval(&self, x: f64) -> f64 {
        match *self {
            Numerator::SincPower { k, lambda } => {
                let k = k as i32;
                lambda.powi(1 - k) * sin_pi(lambda * x).powi(k) / PI.powi(k)
            }
            Numerator::Wave { amp, lambda, shift } => amp * sin_pi(2.0 * lambda * x + shift),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct PowerTerm {
    sigma: f64,
    numerator: Numerator,
}

/// Hankel terms kept for the Bessel kernels.
const HANKEL_TERMS: u32 = 8;

/// `ĝ(x) = Σ x^(-σ_j) N_j(x)` for large `x > 0`, each `N_j` periodic, and
/// `ĝ(-x)` obtained from the kernel's parity.
#[derive(Debug, Clone)]
struct TailModel {
    terms: Vec<PowerTerm>,
    /// Sign relating `ĝ(-x)` to the mirrored numerators.
    odd_power: bool,
    /// Common period of every `N_j` and `p`.
    period: f64,
    /// `(c, σ)` with `|remainder(x)| <= c x^(-σ)` past the kept terms.
    remainder: Option<(f64, f64)>,
}

impl TailModel {
    fn new(p: &PeriodicFunction, kernel: &BandlimitedKernel) -> Result<Self, OracleError> {
        let Scale::Exact(lambda_q) = kernel.scale() else {
            return Err(OracleError::TailModelUnavailable);
        };
        let lambda = rational::to_f64(lambda_q);
        let common = |numerator_period: Rational| rational::to_f64(&rational::lcm(&numerator_period, p.period()));
        match kernel.decay_class() {
            DecayClass::Power(k) => Ok(TailModel {
                terms: vec![PowerTerm {
                    sigma: k as f64,
                    numerator: Numerator::SincPower { k, lambda },
                }],
                odd_power: k % 2 == 1,
                period: common(rational::int(if k % 2 == 0 { 1 } else { 2 }) / lambda_q),
                remainder: None,
            }),
            class @ (DecayClass::Jinc | DecayClass::BesselZero) => {
                // πλ J_ν(z) z^(-e) with z = 2πλx; ν = 1, e = 1 for jinc.
                let (order, extra) = if class == DecayClass::Jinc { (1u32, 1.0) } else { (0, 0.0) };
                let mu = 4.0 * (order * order) as f64;
                let base = PI * lambda * (2.0 / PI).sqrt();
                let z_scale = 2.0 * PI * lambda;
                let mut a = 1.0;
                let mut terms = Vec::new();
                for j in 0..=HANKEL_TERMS {
                    if j > 0 {
                        let odd = (2 * j - 1) as f64;
                        a *= (mu - odd * odd) / (j as f64 * 8.0);
                    }
                    let sigma = 0.5 + j as f64 + extra;
                    let amp = base * a * z_scale.powf(-sigma);
                    if j == HANKEL_TERMS {
                        return Ok(TailModel {
                            terms,
                            odd_power: false,
                            period: common(rational::int(1) / lambda_q),
                            remainder: Some((amp.abs(), sigma)),
                        });
                    }
                    // cos χ and -sin χ with χ = z - (2ν + 1)π/4, signs (-1)^floor(j/2).
                    let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
                    let phase = 0.5 * order as f64 + 0.25;
                    let shift = if j % 2 == 0 { 0.5 - phase } else { 1.0 - phase };
                    terms.push(PowerTerm {
                        sigma,
                        numerator: Numerator::Wave { amp: sign * amp, lambda, shift },
                    });
                }
                unreachable!("loop returns at the last term")
            }
        }
    }

    /// `∫_{|x| > R} ĝ p` and an error estimate.
    fn tail(&self, p: &PeriodicFunction, radius: f64, tol: f64) -> Result<(Complex64, f64), OracleError> {
        let len = self.period;
        let mut cuts: Vec<f64> = cuts_in(p, radius, radius + len)
            .into_iter()
            .chain(cuts_in(p, -radius - len, -radius).into_iter().map(|c| -c))
            .map(|x| (x - radius) / len)
            .collect();
        cuts.extend((1..len.ceil() as i64).map(|j| j as f64 / len));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let a = radius / len;
        let mut tail = Complex64::zero();
        let mut err = 0.0;
        for term in &self.terms {
            // ĝ(-y) = ±y^(-σ) N(-y) for the sinc family, y^(-σ) N(y) for the even Bessel terms.
            let mirror = |y: f64| match term.numerator {
                Numerator::SincPower { .. } => {
                    let n = term.numerator.eval(-y);
                    if self.odd_power { -n } else { n }
                }
                Numerator::Wave { .. } => term.numerator.eval(y),
            };
            let u = |s: f64| {
                let y = radius + len * s;
                p.eval(y) * term.numerator.eval(y) + p.eval(-y) * mirror(y)
            };
            let sigma = term.sigma;
            let mut rising = 1.0; // (σ)_r / r!
            let mut last_term = 0.0;
            for r in 0..TAIL_MOMENTS {
                if r > 0 {
                    rising *= (sigma + r as f64 - 1.0) / r as f64;
                }
                let weight = |s: f64| u(s) * s.powi(r as i32);
                let moment = quad::integrate_split(&weight, 0.0, 1.0, &cuts, tol, 4 * BLOCK_PANELS)
                    .map_err(|source| OracleError::Block {
                        a: radius,
                        b: radius + len,
                        source,
                    })?;
                let s = sigma + r as f64;
                if s <= 1.0 {
                    // Only reachable for r = 0: the period mean of u vanishes
                    // off resonance; charge what a nonzero mean would add out
                    // to x = 1e6 L.
                    let far = 1e6f64;
                    let growth = if s == 1.0 { far.ln() } else { far.powf(1.0 - s) / (1.0 - s) };
                    err += moment.value.norm() * len.powf(1.0 - sigma) * growth;
                    continue;
                }
                let coeff = if r % 2 == 0 { rising } else { -rising } * len.powf(1.0 - sigma) * hurwitz_zeta(s, a);
                let contribution = moment.value * coeff;
                tail += contribution;
                err += moment.error * coeff.abs();
                last_term = contribution.norm();
            }
            err += last_term;
        }
        if let Some((c, sigma)) = self.remainder {
            err += 2.0 * sup_norm_estimate(p) * c * radius.powf(1.0 - sigma) / (sigma - 1.0);
        }
        Ok((tail, err))
    }
}

/// Hurwitz zeta `Σ_{j>=0} (a + j)^(-s)` for `s > 1`, `a > 0`, by
/// Euler-Maclaurin after ten explicit terms.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    const BERNOULLI: [f64; 6] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
    ];
    let n = 10;
    let mut sum: f64 = (0..n).map(|j| (a + j as f64).powf(-s)).sum();
    let b = a + n as f64;
    sum += b.powf(1.0 - s) / (s - 1.0) + 0.5 * b.powf(-s);
    // B_{2i} / (2i)! * s (s+1) ... (s+2i-2) * b^(-s-2i+1)
    let mut rising = s; // s (s+1) ... (s+2i-2)
    let mut factorial = 2.0; // (2i)!
    let mut power = b.powf(-s - 1.0);
    for (i, bern) in BERNOULLI.iter().enumerate() {
        if i > 0 {
            let m = 2.0 * i as f64;
            rising *= (s + m - 1.0) * (s + m);
            factorial *= (m + 1.0) * (m + 2.0);
            power /= b * b;
        }
        sum += bern / factorial * rising * power;
    }
    sum
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub engine: EvaluationResult,
    pub oracle: QuadratureReport,
    pub difference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Oracle settings chosen from the kernel's decay class.
pub fn auto_settings(p: &PeriodicFunction, kernel: &BandlimitedKernel, tol: f64) -> (Method, f64) {
    let s = kernel.scale().to_f64();
    let averaged_radius = AVERAGED_RADIUS.max(AVERAGED_RADIUS / s);
    if let Ok(model) = TailModel::new(p, kernel) {
        let radius = (16.0 * model.period).max(64.0);
        return match kernel.decay_class() {
            DecayClass::Power(_) => (Method::TailCorrected, radius),
            _ => (Method::TailCorrected, radius.max(averaged_radius)),
        };
    }
    match kernel.decay_class() {
        DecayClass::Power(k) if k >= 2 => {
            let k = k as i32;
            let sup = sup_norm_estimate(p).max(f64::MIN_POSITIVE);
            let need = 2.0 * sup * s.powi(1 - k) / (PI.powi(k) * (k - 1) as f64 * 0.5 * tol);
            (Method::Plain, need.powf(1.0 / (k - 1) as f64).max(MIN_RADIUS))
        }
        _ => (Method::BlockAveraged, averaged_radius),
    }
}

/// Runs the engine and the oracle on the same input and compares.
pub fn oracle_compare(
    p: &PeriodicFunction,
    kernel: &BandlimitedKernel,
    tol: f64,
) -> Result<CompareReport, OracleError> {
    oracle_compare_with(p, kernel, tol, OracleOptions::default())
}

pub fn oracle_compare_with(
    p: &PeriodicFunction,
    kernel: &BandlimitedKernel,
    tol: f64,
    options: OracleOptions,
) -> Result<CompareReport, OracleError> {
    if !(tol > 0.0) {
        return Err(OracleError::InvalidTolerance(tol));
    }
    let engine = engine::mixed_parseval_with(p, kernel, 0.1 * tol, options.execution)?;
    let (method, radius) = auto_settings(p, kernel, tol);
    let oracle_tol = (0.25 * tol).min(MAX_COEFF_TOL);
    let oracle = oracle_integral_with(p, kernel, radius, oracle_tol, method, options)?;
    let difference = (engine.value - oracle.value).norm();
    Ok(CompareReport {
        pass: difference <= tol,
        engine,
        oracle,
        difference,
        tolerance: tol,
    })
}
