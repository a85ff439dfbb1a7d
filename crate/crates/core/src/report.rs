//! Serializable views of evaluation, oracle, comparison and Poisson results,
//! plus their CSV and plain-text renderings.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::engine::EvaluationResult;
use crate::oracle::{CompareReport, Method, QuadratureReport};
use crate::poisson::PoissonReport;
use crate::pwpoly::PiecewisePolynomial;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermJson {
    pub n: i64,
    pub node: String,
    pub coeff: ComplexJson,
    pub kernel_avg: f64,
    pub contribution: ComplexJson,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationJson {
    pub value: ComplexJson,
    pub period: String,
    pub kernel: String,
    pub terms: Vec<TermJson>,
    pub normalization_note: String,
}

impl From<&EvaluationResult> for EvaluationJson {
    fn from(r: &EvaluationResult) -> Self {
        EvaluationJson {
            value: r.value.into(),
            period: rational::pq(&r.period),
            kernel: r.kernel_name.clone(),
            terms: r
                .terms
                .iter()
                .map(|t| TermJson {
                    n: t.n,
                    node: rational::pq(&t.node),
                    coeff: t.coefficient.into(),
                    kernel_avg: t.kernel_avg,
                    contribution: t.contribution.into(),
                })
                .collect(),
            normalization_note: r.normalization_note.to_string(),
        }
    }
}

/// Non-finite bounds (non-integrable tails) serialize as `null`.
fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureJson {
    pub value: ComplexJson,
    pub method: Method,
    pub truncation_radius: f64,
    pub tail_correction: ComplexJson,
    pub quadrature_error: f64,
    pub tail_error: Option<f64>,
    pub error_estimate: Option<f64>,
    pub block_values: Vec<ComplexJson>,
}

impl QuadratureJson {
    pub fn new(r: &QuadratureReport, with_blocks: bool) -> Self {
        QuadratureJson {
            value: r.value.into(),
            method: r.method,
            truncation_radius: r.truncation_radius,
            tail_correction: r.tail_correction.into(),
            quadrature_error: r.quadrature_error,
            tail_error: finite(r.tail_error),
            error_estimate: finite(r.error_estimate),
            block_values: if with_blocks {
                r.block_values.iter().map(|&z| z.into()).collect()
            } else {
                Vec::new()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareJson {
    pub kernel: String,
    pub period: String,
    pub engine: ComplexJson,
    pub oracle: QuadratureJson,
    pub difference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl From<&CompareReport> for CompareJson {
    fn from(r: &CompareReport) -> Self {
        CompareJson {
            kernel: r.engine.kernel_name.clone(),
            period: rational::pq(&r.engine.period),
            engine: r.engine.value.into(),
            oracle: QuadratureJson::new(&r.oracle, false),
            difference: r.difference,
            tolerance: r.tolerance,
            pass: r.pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonJson {
    pub kernel: String,
    pub xi: String,
    pub rhs: ComplexJson,
    pub lhs_partial: ComplexJson,
    pub m: u64,
    pub tail_estimate: f64,
    pub tolerance: f64,
    pub converged: bool,
}

impl From<&PoissonReport> for PoissonJson {
    fn from(r: &PoissonReport) -> Self {
        PoissonJson {
            kernel: r.kernel.clone(),
            xi: rational::pq(&r.xi),
            rhs: r.rhs.into(),
            lhs_partial: r.lhs_partial.into(),
            m: r.m,
            tail_estimate: r.tail_estimate,
            tolerance: r.tolerance,
            converged: r.converged,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PieceJson {
    pub left: String,
    pub right: String,
    /// Coefficients in powers of `x - left`.
    pub coefficients: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointJson {
    pub x: String,
    pub left: String,
    pub right: String,
    pub avg: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BsplineJson {
    pub k: u32,
    pub support: [String; 2],
    pub integral: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pieces: Option<Vec<PieceJson>>,
    pub values: Vec<PointJson>,
}

impl BsplineJson {
    pub fn new(k: u32, spline: &PiecewisePolynomial, with_pieces: bool, at: &[Rational]) -> Self {
        let (a, b) = spline.support().expect("B-splines have nonempty support");
        let bp = spline.breakpoints();
        let pieces = with_pieces.then(|| {
            spline
                .pieces()
                .iter()
                .enumerate()
                .map(|(i, c)| PieceJson {
                    left: rational::pq(&bp[i]),
                    right: rational::pq(&bp[i + 1]),
                    coefficients: c.iter().map(rational::pq).collect(),
                })
                .collect()
        });
        let values = at
            .iter()
            .map(|x| {
                let l = spline.eval_limits(x);
                PointJson {
                    x: rational::pq(x),
                    left: rational::pq(&l.left),
                    right: rational::pq(&l.right),
                    avg: rational::pq(&l.avg),
                }
            })
            .collect();
        BsplineJson {
            k,
            support: [rational::pq(a), rational::pq(b)],
            integral: rational::pq(&spline.total_integral()),
            pieces,
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRow {
    pub identity: String,
    pub kernel: String,
    pub function: String,
    pub period: String,
    pub engine: f64,
    pub oracle: f64,
    /// One-period quadrature of the closed-form right-hand side.
    pub closed_form: f64,
    pub diff: f64,
    pub closed_form_diff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityTable {
    pub rows: Vec<IdentityRow>,
    pub pass: bool,
}

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    write(&mut w).expect("writing CSV to memory");
    String::from_utf8(w.into_inner().expect("flushing CSV to memory")).expect("CSV is UTF-8")
}

/// One row per Parseval term.
pub fn evaluation_csv(r: &EvaluationJson) -> String {
    csv_string(|w| {
        w.write_record([
            "n", "node", "coeff_re", "coeff_im", "kernel_avg", "contribution_re", "contribution_im",
        ])?;
        for t in &r.terms {
            w.write_record([
                t.n.to_string(),
                t.node.clone(),
                num(t.coeff.re),
                num(t.coeff.im),
                num(t.kernel_avg),
                num(t.contribution.re),
                num(t.contribution.im),
            ])?;
        }
        Ok(())
    })
}

pub fn evaluation_text(r: &EvaluationJson) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "kernel  {}", r.kernel);
    let _ = writeln!(s, "period  {}", r.period);
    let _ = writeln!(s, "value   {}", complex(&r.value));
    let _ = writeln!(s, "terms   {}", r.terms.len());
    for t in &r.terms {
        let _ = writeln!(
            s,
            "  n={:<4} node={:<8} c_n={}  g={}",
            t.n,
            t.node,
            complex(&t.coeff),
            num(t.kernel_avg)
        );
    }
    s
}

/// One row per unit block, ascending.
pub fn quadrature_csv(r: &QuadratureJson) -> String {
    let m = (r.block_values.len() / 2) as i64;
    csv_string(|w| {
        w.write_record(["m", "block_re", "block_im"])?;
        for (j, b) in r.block_values.iter().enumerate() {
            w.write_record([(j as i64 - m).to_string(), num(b.re), num(b.im)])?;
        }
        Ok(())
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "inf".to_string(), num)
}

/// Plain decimal for moderate magnitudes, scientific otherwise.
pub fn num(v: f64) -> String {
    if v == 0.0 || !v.is_finite() || (1e-4..1e16).contains(&v.abs()) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn complex(z: &ComplexJson) -> String {
    format!("{} {}{}i", num(z.re), if z.im.is_sign_negative() { "-" } else { "+" }, num(z.im.abs()))
}

pub fn quadrature_text(r: &QuadratureJson) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "value             {}", complex(&r.value));
    let _ = writeln!(s, "method            {}", method_name(r.method));
    let _ = writeln!(s, "truncation radius {}", r.truncation_radius);
    let _ = writeln!(s, "tail correction   {}", complex(&r.tail_correction));
    let _ = writeln!(s, "error estimate    {}", opt(r.error_estimate));
    s
}

pub fn method_name(m: Method) -> &'static str {
    match m {
        Method::Plain => "plain",
        Method::BlockAveraged => "block_averaged",
        Method::TailCorrected => "tail_corrected",
    }
}

pub fn compare_csv(r: &CompareJson) -> String {
    csv_string(|w| {
        w.write_record([
            "kernel", "period", "engine_re", "engine_im", "oracle_re", "oracle_im", "method", "difference", "tolerance", "pass",
        ])?;
        w.write_record([
            r.kernel.clone(),
            r.period.clone(),
            num(r.engine.re),
            num(r.engine.im),
            num(r.oracle.value.re),
            num(r.oracle.value.im),
            method_name(r.oracle.method).to_string(),
            num(r.difference),
            num(r.tolerance),
            r.pass.to_string(),
        ])
    })
}

pub fn compare_text(r: &CompareJson) -> String {
    format!(
        "kernel     {}\nperiod     {}\nengine     {}\noracle     {} ({})\ndifference {}\nresult     {}\n",
        r.kernel,
        r.period,
        complex(&r.engine),
        complex(&r.oracle.value),
        method_name(r.oracle.method),
        num(r.difference),
        if r.pass { "pass" } else { "FAIL" }
    )
}

pub fn poisson_csv(r: &PoissonJson) -> String {
    csv_string(|w| {
        w.write_record([
            "kernel", "xi", "rhs_re", "rhs_im", "lhs_re", "lhs_im", "m", "tail_estimate", "converged",
        ])?;
        w.write_record([
            r.kernel.clone(),
            r.xi.clone(),
            num(r.rhs.re),
            num(r.rhs.im),
            num(r.lhs_partial.re),
            num(r.lhs_partial.im),
            r.m.to_string(),
            num(r.tail_estimate),
            r.converged.to_string(),
        ])
    })
}

pub fn poisson_text(r: &PoissonJson) -> String {
    format!(
        "kernel   {}\nxi       {}\nrhs      {}\nlhs      {}\nM        {}\nspread   {}\nresult   {}\n",
        r.kernel,
        r.xi,
        complex(&r.rhs),
        complex(&r.lhs_partial),
        r.m,
        num(r.tail_estimate),
        if r.converged { "converged" } else { "not converged" }
    )
}

pub fn bspline_csv(r: &BsplineJson) -> String {
    csv_string(|w| {
        match &r.pieces {
            Some(pieces) => {
                w.write_record(["left", "right", "coefficients"])?;
                for p in pieces {
                    w.write_record([p.left.clone(), p.right.clone(), p.coefficients.join(" ")])?;
                }
            }
            None => {
                w.write_record(["x", "left", "right", "avg"])?;
                for v in &r.values {
                    w.write_record([&v.x, &v.left, &v.right, &v.avg])?;
                }
            }
        }
        Ok(())
    })
}

pub fn bspline_text(r: &BsplineJson, spline: &PiecewisePolynomial) -> String {
    let mut s = format!("k        {}\nsupport  [{}, {}]\nintegral {}\n", r.k, r.support[0], r.support[1], r.integral);
    if r.pieces.is_some() {
        s.push_str(&spline.to_string());
    }
    for v in &r.values {
        let _ = writeln!(s, "g({}) = {}  (left {}, right {})", v.x, v.avg, v.left, v.right);
    }
    s
}

pub fn table_csv(t: &IdentityTable) -> String {
    csv_string(|w| {
        w.write_record([
            "identity", "kernel", "function", "period", "engine", "oracle", "closed_form", "diff", "closed_form_diff", "tolerance", "pass",
        ])?;
        for r in &t.rows {
            w.write_record([
                r.identity.clone(),
                r.kernel.clone(),
                r.function.clone(),
                r.period.clone(),
                num(r.engine),
                num(r.oracle),
                num(r.closed_form),
                num(r.diff),
                num(r.closed_form_diff),
                num(r.tolerance),
                r.pass.to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn table_text(t: &IdentityTable) -> String {
    let mut s = format!(
        "{:<18} {:<10} {:<18} {:>20} {:>20} {:>20} {:>10}\n",
        "identity", "kernel", "f", "engine", "oracle", "closed form", "|diff|"
    );
    for r in &t.rows {
        let _ = writeln!(
            s,
            "{:<18} {:<10} {:<18} {:>20.15} {:>20.15} {:>20.15} {:>10.2e}{}",
            r.identity,
            r.kernel,
            r.function,
            r.engine,
            r.oracle,
            r.closed_form,
            r.diff.max(r.closed_form_diff),
            if r.pass { "" } else { "  FAIL" }
        );
    }
    s
}
