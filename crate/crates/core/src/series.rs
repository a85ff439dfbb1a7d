//! Cesàro averaging of the tail of a sequence of partial sums.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedTail {
    /// Mean of the last `window` partial sums.
    pub value: Complex64,
    /// Twice the largest distance from `value` of the running averages over
    /// the second half of the window (at least two of them).
    pub spread: f64,
    pub window: usize,
}

/// Window of `ceil(len / 10)` partial sums, at least one.
pub fn tail_window(len: usize) -> usize {
    len.div_ceil(10).max(1)
}

/// Averages the last `window` entries of `partials` once and measures how
/// far the running averages still wander.
pub fn cesaro_tail(partials: &[Complex64], window: usize) -> AveragedTail {
    assert!(!partials.is_empty(), "no partial sums to average");
    let window = window.clamp(1, partials.len());
    let tail = &partials[partials.len() - window..];
    let mut running = Vec::with_capacity(window);
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, s) in tail.iter().enumerate() {
        acc += s;
        running.push(acc / (i + 1) as f64);
    }
    let value = *running.last().unwrap();
    let spread = if window == 1 {
        // Nothing was averaged; fall back to the last step of the sequence.
        match partials {
            [.., a, b] => (b - a).norm() / 2.0,
            _ => 0.0,
        }
    } else {
        let settled = &running[(window / 2).min(window - 2)..];
        settled
            .iter()
            .map(|a| (a - value).norm())
            .fold(0.0, f64::max)
    };
    AveragedTail {
        value,
        spread: 2.0 * spread,
        window,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn window_sizes() {
        assert_eq!(tail_window(1), 1);
        assert_eq!(tail_window(10), 1);
        assert_eq!(tail_window(11), 2);
        assert_eq!(tail_window(1000), 100);
    }

    #[test]
    fn short_windows_still_report_a_spread() {
        let s = [re(1.0), re(2.0), re(1.5)];
        assert_eq!(cesaro_tail(&s, 1).spread, 0.5);
        assert_eq!(cesaro_tail(&s, 2).spread, 0.5);
    }

    #[test]
    fn constant_sequence_has_zero_spread() {
        let s = vec![re(3.0); 20];
        let t = cesaro_tail(&s, 5);
        assert_eq!(t.value, re(3.0));
        assert_eq!(t.spread, 0.0);
    }

    #[test]
    fn alternating_partial_sums_average_out() {
        // Partial sums of Σ (-1)^n / (n + 1): oscillate around ln 2.
        let mut acc = 0.0;
        let partials: Vec<_> = (0..2000)
            .map(|n| {
                acc += if n % 2 == 0 { 1.0 } else { -1.0 } / (n as f64 + 1.0);
                re(acc)
            })
            .collect();
        let plain_err = (partials.last().unwrap().re - 2f64.ln()).abs();
        let t = cesaro_tail(&partials, tail_window(partials.len()));
        let avg_err = (t.value.re - 2f64.ln()).abs();
        assert!(avg_err < plain_err / 50.0, "{avg_err} vs {plain_err}");
        assert!(avg_err <= t.spread);
    }
}
