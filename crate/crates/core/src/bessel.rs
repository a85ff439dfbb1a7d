//! Bessel functions of the first kind, orders 0 and 1, and the normalized
//! cardinal sine.
//!
//! `|x| < 4` uses the power series, `4 <= |x| < 25` Miller's backward
//! recurrence normalized by `J0 + 2 Σ J_2k = 1`, and `|x| >= 25` Hankel's
//! asymptotic expansion truncated at its smallest term.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use thiserror::Error;

/// Largest accepted `|x|` for [`bessel_j`].
pub const MAX_ARGUMENT: f64 = 1e6;

const SERIES_LIMIT: f64 = 4.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum BesselError {
    #[error("Bessel order {0} unsupported (only 0 and 1)")]
    Order(u32),
    #[error("|x| = {0} exceeds the supported range {MAX_ARGUMENT:e}")]
    OutOfRange(f64),
}

/// `J_order(x)` for order 0 or 1 and `|x| <= 1e6`.
pub fn bessel_j(order: u32, x: f64) -> Result<f64, BesselError> {
    if !(x.abs() <= MAX_ARGUMENT) {
        return Err(BesselError::OutOfRange(x.abs()));
    }
    match order {
        0 => Ok(j0(x)),
        1 => Ok(j1(x)),
        n => Err(BesselError::Order(n)),
    }
}

pub fn j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_LIMIT {
        series(0, ax)
    } else if ax < ASYMPTOTIC_LIMIT {
        miller(ax).0
    } else {
        hankel(0, ax)
    }
}

pub fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < SERIES_LIMIT {
        series(1, ax)
    } else if ax < ASYMPTOTIC_LIMIT {
        miller(ax).1
    } else {
        hankel(1, ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

fn series(order: u32, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let (mut term, scale) = if order == 0 { (1.0, 1.0) } else { (1.0, 0.5 * x) };
    let mut sum = term;
    for k in 1..60 {
        let k = k as f64;
        term *= q / (k * (k + order as f64));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum * scale
}

/// Returns `(J0(x), J1(x))` for `x > 0`.
fn miller(x: f64) -> (f64, f64) {
    let mut start = x.ceil() as usize + 50;
    start += start % 2;
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    let mut norm = 0.0;
    let mut j1 = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{k-1}
        if k - 1 == 1 {
            j1 = cur;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e200 {
            cur *= 1e-200;
            next *= 1e-200;
            norm *= 1e-200;
            j1 *= 1e-200;
        }
    }
    norm += cur;
    (cur / norm, j1 / norm)
}

fn hankel(order: u32, x: f64) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() >= last || term == 0.0 {
            break;
        }
        last = term.abs();
        // a_k / x^k enters P (even k) or Q (odd k) with sign (-1)^{floor(k/2)}.
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let (s, c) = x.sin_cos();
    // chi = x - (2*order + 1) π / 4, expanded to avoid rounding π/4.
    let (cos_chi, sin_chi) = if order == 0 {
        ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2)
    } else {
        ((s - c) * FRAC_1_SQRT_2, -(s + c) * FRAC_1_SQRT_2)
    };
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// `sin(πx)`, exact zero at integers.
pub fn sin_pi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let n = (2.0 * x).round();
    let r = x - 0.5 * n;
    let quadrant = n.rem_euclid(4.0) as u8;
    let pr = PI * r;
    match quadrant {
        0 => pr.sin(),
        1 => pr.cos(),
        2 => -pr.sin(),
        _ => -pr.cos(),
    }
}

/// Normalized cardinal sine `sin(πx)/(πx)`, 1 at 0.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let y = PI * x;
        let y2 = y * y;
        1.0 - y2 / 6.0 + y2 * y2 / 120.0
    } else {
        sin_pi(x) / (PI * x)
    }
}
