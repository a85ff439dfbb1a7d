//! Closed-form evaluation of `∫ p(x) ĝ(x) dx` as the finite mixed-type
//! Parseval sum
//!
//! ```text
//! Σ_{n : |n/T| <= A}  c_n(p) · (g((n/T)⁻) + g((n/T)⁺)) / 2
//! ```
//!
//! with mean-normalized coefficients `c_n`. Terms are produced and summed in
//! ascending `n`, so results are bit-reproducible regardless of how the
//! coefficient computations are scheduled.

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exec::Execution;
use crate::kernels::{self, BandlimitedKernel, KernelError};
use crate::periodic::{self, PeriodicError, PeriodicFunction};
use crate::rational::{self, Rational};

pub const NORMALIZATION_NOTE: &str = "coefficients are mean-normalized, c_n = (1/T) * integral over [-T/2, T/2] of p(x) exp(-2 pi i n x / T) dx; \
the unnormalized coefficient (without 1/T) makes the sum scale with T and is only correct for T = 1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("kernel is not of bounded variation at node(s) n/T for n = {}", fmt_ns(.ns))]
    ExcludedPoint { ns: Vec<i64>, nodes: Vec<String> },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Coefficient(#[from] PeriodicError),
}

fn fmt_ns(ns: &[i64]) -> String {
    ns.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub n: i64,
    /// `n / T`
    pub node: Rational,
    pub coefficient: Complex64,
    /// `(g(node⁻) + g(node⁺)) / 2`
    pub kernel_avg: f64,
    pub contribution: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationResult {
    pub value: Complex64,
    pub terms: Vec<Term>,
    pub kernel_name: String,
    pub period: Rational,
    pub normalization_note: &'static str,
}

impl EvaluationResult {
    fn from_terms(terms: Vec<Term>, kernel_name: String, period: Rational) -> Self {
        let value = terms
            .iter()
            .fold(Complex64::zero(), |acc, t| acc + t.contribution);
        EvaluationResult {
            value,
            terms,
            kernel_name,
            period,
            normalization_note: NORMALIZATION_NOTE,
        }
    }
}

/// All `(n, n/T)` with `|n/T| <= A`, ascending in `n`.
pub fn parseval_nodes(period: &Rational, kernel: &BandlimitedKernel) -> Vec<(i64, Rational)> {
    let in_range: Box<dyn Fn(&Rational) -> bool> = match kernel.support_radius_exact() {
        Some(a) => Box::new(move |node: &Rational| node.abs() <= a),
        None => {
            let a = kernel.support_radius();
            Box::new(move |node: &Rational| rational::to_f64(node).abs() <= a)
        }
    };
    let bound = (kernel.support_radius() * rational::to_f64(period)).floor() as i64 + 1;
    (-bound..=bound)
        .map(|n| (n, rational::int(n) / period))
        .filter(|(_, node)| in_range(node))
        .collect()
}

pub fn mixed_parseval(
    p: &PeriodicFunction,
    kernel: &BandlimitedKernel,
    tol: f64,
) -> Result<EvaluationResult, EngineError> {
    mixed_parseval_with(p, kernel, tol, Execution::default())
}

pub fn mixed_parseval_with(
    p: &PeriodicFunction,
    kernel: &BandlimitedKernel,
    tol: f64,
    execution: Execution,
) -> Result<EvaluationResult, EngineError> {
    if !(tol > 0.0) {
        return Err(EngineError::InvalidTolerance(tol));
    }
    let nodes = parseval_nodes(p.period(), kernel);

    let mut samples = Vec::with_capacity(nodes.len());
    let mut bad = Vec::new();
    for (n, node) in &nodes {
        match kernel.time_side(node) {
            Ok(limits) => samples.push(limits.avg),
            Err(KernelError::ExcludedPoint { .. }) => bad.push((*n, rational::pq(node))),
            Err(e) => return Err(e.into()),
        }
    }
    if !bad.is_empty() {
        let (ns, nodes) = bad.into_iter().unzip();
        return Err(EngineError::ExcludedPoint { ns, nodes });
    }

    let per_term = (tol / nodes.len().max(1) as f64).min(periodic::MAX_COEFF_TOL);
    let indices: Vec<i64> = nodes.iter().map(|(n, _)| *n).collect();
    let coefficients = execution.map(indices, |n| periodic::fourier_coefficient(p, n, per_term));

    let mut terms = Vec::with_capacity(nodes.len());
    for (((n, node), avg), coefficient) in nodes.into_iter().zip(samples).zip(coefficients) {
        let coefficient = coefficient?;
        terms.push(Term {
            n,
            node,
            coefficient,
            kernel_avg: avg,
            contribution: coefficient * avg,
        });
    }
    Ok(EvaluationResult::from_terms(terms, kernel.name(), p.period().clone()))
}

/// `∫ sinc^k(x) p(x) dx`. For `k >= 2` the endpoint nodes `|n/T| = k/2`
/// contribute exactly zero and are dropped from the term list.
pub fn lobachevsky(p: &PeriodicFunction, k: u32, tol: f64) -> Result<EvaluationResult, EngineError> {
    let kernel = kernels::kernel_bspline(k)?;
    let full = mixed_parseval(p, &kernel, tol)?;
    if k < 2 {
        return Ok(full);
    }
    let edge = rational::ratio(k as i64, 2);
    let terms = full
        .terms
        .into_iter()
        .filter(|t| t.node.abs() != edge)
        .collect();
    Ok(EvaluationResult::from_terms(terms, full.kernel_name, full.period))
}

/// Whether only the `n = 0` term can survive: `kT <= 2` for `k >= 2`, or
/// `0 < T < 2` for `k = 1`.
pub fn single_term_check(p: &PeriodicFunction, k: u32) -> bool {
    let t = p.period();
    match k {
        0 => false,
        1 => t.is_positive() && *t < rational::int(2),
        _ => rational::int(k as i64) * t <= rational::int(2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{dilate, kernel_arcsine, kernel_bspline, kernel_semicircle};
    use crate::periodic::parse_periodic;
    use crate::rational::{int, ratio};

    const TOL: f64 = 1e-10;

    fn expr(src: &str, t: Rational) -> PeriodicFunction {
        parse_periodic(src, t, None).unwrap()
    }

    #[test]
    fn dirichlet_for_any_small_period() {
        for t in [ratio(1, 2), int(1), ratio(3, 2), int(2)] {
            let one = PeriodicFunction::constant(1.0, t).unwrap();
            let r = mixed_parseval(&one, &kernel_bspline(1).unwrap(), TOL).unwrap();
            assert_eq!(r.value, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn half_weight_at_box_edge() {
        let p = expr("cos(pi*x)", int(2));
        let r = mixed_parseval(&p, &kernel_bspline(1).unwrap(), 1e-12).unwrap();
        let ns: Vec<_> = r.terms.iter().map(|t| t.n).collect();
        assert_eq!(ns, vec![-1, 0, 1]);
        assert_eq!(r.terms[0].kernel_avg, 0.5);
        assert!((r.value.re - 0.5).abs() < 1e-11);
    }

    #[test]
    fn arcsine_rejects_integer_period() {
        let p = PeriodicFunction::cosine(1, int(1)).unwrap();
        let err = mixed_parseval(&p, &kernel_arcsine(), TOL).unwrap_err();
        assert_eq!(
            err,
            EngineError::ExcludedPoint {
                ns: vec![-1, 1],
                nodes: vec!["-1/1".into(), "1/1".into()]
            }
        );
        assert!(err.to_string().contains("n = -1, 1"));
    }

    #[test]
    fn arcsine_small_period() {
        let one = PeriodicFunction::constant(1.0, ratio(1, 2)).unwrap();
        let r = mixed_parseval(&one, &kernel_arcsine(), TOL).unwrap();
        assert_eq!(r.value, Complex64::new(1.0, 0.0));
        assert_eq!(r.terms.len(), 1);
    }

    #[test]
    fn lobachevsky_reference_values() {
        let one = PeriodicFunction::constant(1.0, int(1)).unwrap();
        for (k, expect) in [(1, 1.0), (2, 1.0), (3, 0.75), (4, 2.0 / 3.0)] {
            let r = lobachevsky(&one, k, TOL).unwrap();
            assert!((r.value.re - expect).abs() < 1e-15, "k={k}");
        }
        let c = PeriodicFunction::cosine(1, int(1)).unwrap();
        let r = lobachevsky(&c, 3, TOL).unwrap();
        assert_eq!(r.value, Complex64::new(0.125, 0.0));
        let c = expr("cos(2*pi*x)", int(1));
        assert!((lobachevsky(&c, 3, TOL).unwrap().value.re - 0.125).abs() < 1e-10);
    }

    #[test]
    fn endpoint_nodes_dropped_for_k_at_least_two() {
        let one = PeriodicFunction::constant(1.0, int(1)).unwrap();
        let full = mixed_parseval(&one, &kernel_bspline(4).unwrap(), TOL).unwrap();
        let reduced = lobachevsky(&one, 4, TOL).unwrap();
        assert_eq!(full.terms.len(), 5);
        assert_eq!(reduced.terms.len(), 3);
        assert_eq!(full.value, reduced.value);
        let k1 = lobachevsky(&PeriodicFunction::constant(1.0, int(2)).unwrap(), 1, TOL).unwrap();
        assert_eq!(k1.terms.len(), 3);
    }

    #[test]
    fn single_term_condition() {
        let p = |t: Rational| PeriodicFunction::constant(1.0, t).unwrap();
        assert!(single_term_check(&p(ratio(1, 2)), 4));
        assert!(!single_term_check(&p(int(1)), 3));
        assert!(single_term_check(&p(ratio(3, 2)), 1));
        assert!(!single_term_check(&p(int(2)), 1));
        for (t, k) in [(ratio(1, 2), 4), (ratio(2, 3), 3), (ratio(3, 2), 1), (int(1), 2)] {
            let q = PeriodicFunction::cosine(1, t.clone()).unwrap();
            assert!(single_term_check(&q, k));
            let r = lobachevsky(&q, k, TOL).unwrap();
            assert_eq!(r.terms.len(), 1, "T={t} k={k}");
            assert_eq!(r.terms[0].n, 0);
        }
    }

    #[test]
    fn value_is_ordered_sum_of_contributions() {
        let p = expr("x^2 + sin(2*pi*x/3)", int(3));
        let r = mixed_parseval(&p, &kernel_bspline(3).unwrap(), 1e-9).unwrap();
        let resum = r.terms.iter().fold(Complex64::zero(), |acc, t| acc + t.contribution);
        assert_eq!(resum.re.to_bits(), r.value.re.to_bits());
        assert_eq!(resum.im.to_bits(), r.value.im.to_bits());
        assert!(r.terms.windows(2).all(|w| w[0].n < w[1].n));
        assert!(r.terms.iter().all(|t| t.node.abs() <= ratio(3, 2)));
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let p = expr("abs(x) - x^3", ratio(7, 2));
        let k = kernel_bspline(5).unwrap();
        let a = mixed_parseval_with(&p, &k, 1e-9, Execution::Sequential).unwrap();
        let b = mixed_parseval_with(&p, &k, 1e-9, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn jinc_with_cosine() {
        let p = PeriodicFunction::cosine(1, int(2)).unwrap();
        let r = mixed_parseval(&p, &kernel_semicircle(), TOL).unwrap();
        assert!((r.value.re - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn irrational_dilation_nodes() {
        let boxk = dilate(&kernel_bspline(1).unwrap(), 1.0 / std::f64::consts::PI).unwrap();
        let one = PeriodicFunction::constant(1.0, int(1)).unwrap();
        let r = mixed_parseval(&one, &boxk, TOL).unwrap();
        assert_eq!(r.terms.len(), 1);
        assert_eq!(r.value, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn rejects_bad_tolerance() {
        let one = PeriodicFunction::constant(1.0, int(1)).unwrap();
        assert_eq!(
            mixed_parseval(&one, &kernel_bspline(1).unwrap(), 0.0),
            Err(EngineError::InvalidTolerance(0.0))
        );
    }
}
