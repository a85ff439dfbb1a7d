//! Closed-form evaluation of Lobachevsky-type integrals
//! `∫ sinc^k(x) p(x) dx` and, more generally, `∫ p(x) ĝ(x) dx` for periodic
//! `p` and compactly supported `g`, through the mixed-type Parseval sum
//! `Σ_{|n/T| ≤ A} c_n(p) · (g((n/T)⁻) + g((n/T)⁺)) / 2`.
//!
//! Every closed-form value can be cross-checked against [`oracle`], which
//! integrates the left-hand side directly on the real line.

pub mod bessel;
pub mod cli;
pub mod engine;
pub mod exec;
pub mod expr;
pub mod kernels;
pub mod oracle;
pub mod periodic;
pub mod poisson;
pub mod pwpoly;
pub mod quad;
pub mod rational;
pub mod report;
pub mod series;
