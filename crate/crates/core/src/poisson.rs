//! Numerical check of compact-support Poisson summation
//! `Σ_m ĝ(m + ξ) = Σ_{|n| <= A} (g(n⁺) + g(n⁻))/2 · e^{-2πinξ}`.

use num_complex::Complex64;
use num_traits::Zero;
use thiserror::Error;

use crate::bessel::sin_pi;
use crate::exec::Execution;
use crate::kernels::{BandlimitedKernel, KernelError};
use crate::rational::{self, Rational};
use crate::series;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PoissonError {
    #[error("kernel is not of bounded variation at integer point(s) n = {}", .0.iter().map(i64::to_string).collect::<Vec<_>>().join(", "))]
    ExcludedPoint(Vec<i64>),
    #[error("truncation half-width must be at least 1")]
    ZeroTerms,
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonReport {
    pub kernel: String,
    pub xi: Rational,
    /// Exact finite right-hand side.
    pub rhs: Complex64,
    /// Cesàro-averaged symmetric partial sum of the left-hand side.
    pub lhs_partial: Complex64,
    /// Truncation half-width of the last evaluated partial sum.
    pub m: u64,
    pub tail_estimate: f64,
    pub tolerance: f64,
    pub converged: bool,
}

/// `e^{-2πiθ}` with `θ` reduced exactly modulo one first.
fn unit_phase(theta: &Rational) -> Complex64 {
    let f = rational::to_f64(&rational::fract_unit(theta));
    Complex64::new(sin_pi(2.0 * f + 0.5), -sin_pi(2.0 * f))
}

/// Exact finite sum `Σ_{|n| <= A} midpoint-g(n) e^{-2πinξ}`.
pub fn poisson_rhs(kernel: &BandlimitedKernel, xi: &Rational) -> Result<Complex64, PoissonError> {
    let a = kernel.support_radius();
    let bound = a.floor() as i64 + 1;
    let exact = kernel.support_radius_exact();
    let mut bad = Vec::new();
    let mut sum = Complex64::zero();
    for n in -bound..=bound {
        let node = rational::int(n);
        let inside = match &exact {
            Some(a) => num_traits::Signed::abs(&node) <= *a,
            None => (n as f64).abs() <= a,
        };
        if !inside {
            continue;
        }
        match kernel.time_side(&node) {
            Ok(l) => sum += unit_phase(&(&node * xi)) * l.avg,
            Err(KernelError::ExcludedPoint { .. }) => bad.push(n),
            Err(e) => return Err(e.into()),
        }
    }
    if bad.is_empty() {
        Ok(sum)
    } else {
        Err(PoissonError::ExcludedPoint(bad))
    }
}

/// Symmetric partial sums `S_j = Σ_{|m| <= j} ĝ(m + ξ)` for `j = 0..=m_max`.
pub fn symmetric_partial_sums(kernel: &BandlimitedKernel, xi: f64, m_max: u64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(m_max as usize + 1);
    let mut acc = kernel.transform(xi);
    out.push(Complex64::new(acc, 0.0));
    for m in 1..=m_max {
        let m = m as f64;
        acc += kernel.transform(m + xi) + kernel.transform(-m + xi);
        out.push(Complex64::new(acc, 0.0));
    }
    out
}

/// Averaged symmetric partial sum of the left-hand side and the spread of
/// the averaged sequence.
pub fn poisson_lhs(kernel: &BandlimitedKernel, xi: &Rational, m: u64) -> Result<(Complex64, f64), PoissonError> {
    if m == 0 {
        return Err(PoissonError::ZeroTerms);
    }
    let partials = symmetric_partial_sums(kernel, rational::to_f64(xi), m);
    let tail = series::cesaro_tail(&partials, series::tail_window(m as usize));
    Ok((tail.value, tail.spread))
}

/// Doubles the truncation half-width from 1 until the averaged left side is
/// within `tol` of the right side or would exceed `m_max`.
pub fn poisson_check(
    kernel: &BandlimitedKernel,
    xi: &Rational,
    tol: f64,
    m_max: u64,
) -> Result<PoissonReport, PoissonError> {
    if !(tol > 0.0) {
        return Err(PoissonError::InvalidTolerance(tol));
    }
    if m_max == 0 {
        return Err(PoissonError::ZeroTerms);
    }
    let rhs = poisson_rhs(kernel, xi)?;
    let mut m = 1;
    loop {
        let (lhs, spread) = poisson_lhs(kernel, xi, m)?;
        let converged = (lhs - rhs).norm() <= tol;
        if converged || m.saturating_mul(2) > m_max {
            return Ok(PoissonReport {
                kernel: kernel.name(),
                xi: xi.clone(),
                rhs,
                lhs_partial: lhs,
                m,
                tail_estimate: spread,
                tolerance: tol,
                converged,
            });
        }
        m *= 2;
    }
}

/// Runs [`poisson_check`] for many shifts; reports come back in input order.
pub fn poisson_batch(
    kernel: &BandlimitedKernel,
    xis: Vec<Rational>,
    tol: f64,
    m_max: u64,
    execution: Execution,
) -> Vec<Result<PoissonReport, PoissonError>> {
    execution.map(xis, |xi| poisson_check(kernel, &xi, tol, m_max))
}
