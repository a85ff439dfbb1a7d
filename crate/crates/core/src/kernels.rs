//! Band-limited kernels `(g, ĝ)`: a compactly supported time side `g`, read
//! through one-sided limits, and its Fourier transform `ĝ(ξ) = ∫ g(x) e^{-2πixξ} dx`.
//!
//! Catalog: the centered B-splines (`ĝ = sinc^k`), the semicircle
//! `√(1-x²)` (`ĝ = J1(2πξ)/(2ξ)`, "jinc") and the arcsine density
//! `1/√(1-x²)` (`ĝ = π J0(2πξ)`). Any of them can be dilated.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::bessel::{j0, j1, sinc};
use crate::pwpoly::{self, PiecewisePolynomial};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("B-spline kernel order must be at least 1")]
    ZeroOrder,
    #[error("dilation factor must be positive and finite")]
    NonPositiveScale,
    #[error("time side queried at {point}, where g is not of locally bounded variation")]
    ExcludedPoint { point: String },
    #[error("unknown kernel selector `{0}` (expected sinc:k=<int>, jinc or j0, optionally :dilate=<factor>)")]
    UnknownSelector(String),
    #[error("bad dilation `{0}` in kernel selector: expected a rational or a constant such as 1/pi")]
    BadDilation(String),
}

/// Dilation factor. Rational factors keep every breakpoint test exact;
/// real factors (such as `1/π`) are approximated in floating point.
#[derive(Debug, Clone, PartialEq)]
pub enum Scale {
    Exact(Rational),
    Real(f64),
}

impl Scale {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scale::Exact(q) => rational::to_f64(q),
            Scale::Real(v) => *v,
        }
    }

    fn is_positive(&self) -> bool {
        match self {
            Scale::Exact(q) => q.is_positive(),
            Scale::Real(v) => *v > 0.0 && v.is_finite(),
        }
    }

    fn compose(&self, other: &Scale) -> Scale {
        match (self, other) {
            (Scale::Exact(a), Scale::Exact(b)) => Scale::Exact(a * b),
            _ => Scale::Real(self.to_f64() * other.to_f64()),
        }
    }
}

impl From<Rational> for Scale {
    fn from(q: Rational) -> Self {
        Scale::Exact(q)
    }
}

impl From<f64> for Scale {
    fn from(v: f64) -> Self {
        Scale::Real(v)
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scale::Exact(q) => write!(f, "{}", rational::PQ(q)),
            Scale::Real(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    BSpline { k: u32, spline: Arc<PiecewisePolynomial> },
    Semicircle,
    Arcsine,
}

/// How fast `|ĝ(x)|` decays, used by the oracle to size truncation radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayClass {
    /// `|ĝ(x)| <= (λ^(1-k) / π^k) |x|^-k` for the dilated `sinc^k` family.
    Power(u32),
    /// `x^(-3/2)` oscillatory envelope.
    Jinc,
    /// `x^(-1/2)` oscillatory envelope; only conditionally integrable.
    BesselZero,
}

/// One-sided limits of the time side and their midpoint, in floating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeLimits {
    pub left: f64,
    pub right: f64,
    pub avg: f64,
}

impl TimeLimits {
    fn continuous(v: f64) -> Self {
        TimeLimits { left: v, right: v, avg: v }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandlimitedKernel {
    family: Family,
    scale: Scale,
}

pub fn kernel_bspline(k: u32) -> Result<BandlimitedKernel, KernelError> {
    let spline = pwpoly::bspline(k).map_err(|_| KernelError::ZeroOrder)?;
    Ok(BandlimitedKernel {
        family: Family::BSpline {
            k,
            spline: Arc::new(spline),
        },
        scale: Scale::Exact(Rational::one()),
    })
}

pub fn kernel_semicircle() -> BandlimitedKernel {
    BandlimitedKernel {
        family: Family::Semicircle,
        scale: Scale::Exact(Rational::one()),
    }
}

pub fn kernel_arcsine() -> BandlimitedKernel {
    BandlimitedKernel {
        family: Family::Arcsine,
        scale: Scale::Exact(Rational::one()),
    }
}

/// `h(x) = g(x/λ)`, `ĥ(ξ) = λ ĝ(λξ)`, support radius `λA`.
pub fn dilate(kernel: &BandlimitedKernel, factor: impl Into<Scale>) -> Result<BandlimitedKernel, KernelError> {
    let factor = factor.into();
    if !factor.is_positive() {
        return Err(KernelError::NonPositiveScale);
    }
    Ok(BandlimitedKernel {
        family: kernel.family.clone(),
        scale: kernel.scale.compose(&factor),
    })
}

/// Parses `sinc:k=<int>`, `jinc` or `j0`, each optionally followed by
/// `:dilate=<rational>`.
pub fn parse_kernel(selector: &str) -> Result<BandlimitedKernel, KernelError> {
    let unknown = || KernelError::UnknownSelector(selector.to_string());
    let mut parts = selector.trim().split(':');
    let head = parts.next().ok_or_else(unknown)?;
    let mut kernel = match head {
        "jinc" => kernel_semicircle(),
        "j0" => kernel_arcsine(),
        "sinc" => {
            let order = parts
                .next()
                .and_then(|p| p.strip_prefix("k="))
                .and_then(|k| k.parse::<u32>().ok())
                .ok_or_else(unknown)?;
            kernel_bspline(order)?
        }
        _ => return Err(unknown()),
    };
    for part in parts {
        let factor = part.strip_prefix("dilate=").ok_or_else(unknown)?;
        kernel = dilate(&kernel, parse_factor(factor)?)?;
    }
    Ok(kernel)
}

/// A rational stays exact; anything else must be a constant expression.
fn parse_factor(text: &str) -> Result<Scale, KernelError> {
    if let Ok(q) = rational::parse_rational(text) {
        return Ok(Scale::Exact(q));
    }
    match crate::expr::parse_expr(text) {
        Ok(e) if !e.mentions_x() => Ok(Scale::Real(e.eval(0.0))),
        _ => Err(KernelError::BadDilation(text.to_string())),
    }
}

impl BandlimitedKernel {
    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn scale(&self) -> &Scale {
        &self.scale
    }

    /// B-spline order for the `sinc^k` family.
    pub fn sinc_power(&self) -> Option<u32> {
        match self.family {
            Family::BSpline { k, .. } => Some(k),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        let base = match &self.family {
            Family::BSpline { k, .. } => format!("sinc:k={k}"),
            Family::Semicircle => "jinc".to_string(),
            Family::Arcsine => "j0".to_string(),
        };
        match &self.scale {
            Scale::Exact(q) if q.is_one() => base,
            s => format!("{base}:dilate={s}"),
        }
    }

    fn base_radius(&self) -> Rational {
        match &self.family {
            Family::BSpline { k, .. } => rational::ratio(*k as i64, 2),
            Family::Semicircle | Family::Arcsine => Rational::one(),
        }
    }

    /// `A` with `supp g ⊂ [-A, A]`, when it is exactly rational.
    pub fn support_radius_exact(&self) -> Option<Rational> {
        match &self.scale {
            Scale::Exact(q) => Some(self.base_radius() * q),
            Scale::Real(_) => None,
        }
    }

    pub fn support_radius(&self) -> f64 {
        match self.support_radius_exact() {
            Some(a) => rational::to_f64(&a),
            None => rational::to_f64(&self.base_radius()) * self.scale.to_f64(),
        }
    }

    /// Points where `g` fails to be of locally bounded variation, when exactly known.
    pub fn excluded_points(&self) -> Vec<Rational> {
        let base = match self.family {
            Family::Arcsine => vec![-Rational::one(), Rational::one()],
            _ => Vec::new(),
        };
        match &self.scale {
            Scale::Exact(q) => base.into_iter().map(|p| p * q).collect(),
            Scale::Real(_) => Vec::new(),
        }
    }

    pub fn excluded_points_f64(&self) -> Vec<f64> {
        match self.family {
            Family::Arcsine => {
                let s = self.scale.to_f64();
                vec![-s, s]
            }
            _ => Vec::new(),
        }
    }

    pub fn decay_class(&self) -> DecayClass {
        match self.family {
            Family::BSpline { k, .. } => DecayClass::Power(k),
            Family::Semicircle => DecayClass::Jinc,
            Family::Arcsine => DecayClass::BesselZero,
        }
    }

    /// The point of the undilated kernel that `x` maps to.
    fn preimage(&self, x: &Rational) -> Rational {
        match &self.scale {
            Scale::Exact(q) => x / q,
            Scale::Real(s) => rational::from_f64(rational::to_f64(x) / s).unwrap_or_else(Rational::zero),
        }
    }

    /// One-sided limits of `g` at `x` and their midpoint (zero outside the support).
    pub fn time_side(&self, x: &Rational) -> Result<TimeLimits, KernelError> {
        let u = self.preimage(x);
        match &self.family {
            Family::BSpline { spline, .. } => {
                let l = spline.eval_limits(&u);
                Ok(TimeLimits {
                    left: rational::to_f64(&l.left),
                    right: rational::to_f64(&l.right),
                    avg: rational::to_f64(&l.avg),
                })
            }
            Family::Semicircle => {
                let gap = Rational::one() - &u * &u;
                let v = if gap.is_positive() {
                    rational::to_f64(&gap).sqrt()
                } else {
                    0.0
                };
                Ok(TimeLimits::continuous(v))
            }
            Family::Arcsine => {
                let gap = Rational::one() - &u * &u;
                if gap.is_zero() {
                    Err(KernelError::ExcludedPoint {
                        point: rational::pq(x),
                    })
                } else if gap.is_positive() {
                    Ok(TimeLimits::continuous(1.0 / rational::to_f64(&gap).sqrt()))
                } else {
                    Ok(TimeLimits::continuous(0.0))
                }
            }
        }
    }

    /// Exact rational limits for B-spline kernels with rational dilation.
    pub fn time_side_exact(&self, x: &Rational) -> Option<pwpoly::Limits> {
        match (&self.family, &self.scale) {
            (Family::BSpline { spline, .. }, Scale::Exact(q)) => Some(spline.eval_limits(&(x / q))),
            _ => None,
        }
    }

    /// `g(x)` at an interior float point, for quadrature of the time side.
    pub fn time_value(&self, x: f64) -> f64 {
        let u = x / self.scale.to_f64();
        match &self.family {
            Family::BSpline { spline, .. } => spline.eval_f64(u),
            Family::Semicircle => (1.0 - u * u).max(0.0).sqrt(),
            Family::Arcsine => {
                if u.abs() < 1.0 {
                    1.0 / (1.0 - u * u).sqrt()
                } else {
                    0.0
                }
            }
        }
    }

    /// `ĝ(ξ)`.
    pub fn transform(&self, xi: f64) -> f64 {
        let s = self.scale.to_f64();
        s * self.base_transform(s * xi)
    }

    fn base_transform(&self, u: f64) -> f64 {
        match self.family {
            Family::BSpline { k, .. } => sinc(u).powi(k as i32),
            Family::Semicircle => {
                if u == 0.0 {
                    0.5 * PI
                } else {
                    j1(2.0 * PI * u) / (2.0 * u)
                }
            }
            Family::Arcsine => PI * j0(2.0 * PI * u),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use crate::rational::{int, ratio};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bspline_kernel_values() {
        let k1 = kernel_bspline(1).unwrap();
        assert_eq!(k1.transform(0.0), 1.0);
        assert_eq!(k1.transform(1.0), 0.0);
        let k2 = kernel_bspline(2).unwrap();
        assert!((k2.transform(0.5) - (2.0 / PI).powi(2)).abs() < 1e-16);
        assert!((k2.transform(0.5) - 0.405_284_734_569_351).abs() < 1e-12);
        let k3 = kernel_bspline(3).unwrap();
        assert_eq!(k3.time_side(&int(1)).unwrap().avg, 0.125);
        assert_eq!(k3.support_radius_exact(), Some(ratio(3, 2)));
        assert!(k3.excluded_points().is_empty());
        assert_eq!(kernel_bspline(0), Err(KernelError::ZeroOrder));
    }

    #[test]
    fn semicircle_kernel() {
        let k = kernel_semicircle();
        assert_eq!(k.time_side(&int(0)).unwrap().avg, 1.0);
        assert!((k.time_side(&ratio(1, 2)).unwrap().avg - 0.866_025_403_784_438_6).abs() < 1e-15);
        assert_eq!(k.time_side(&int(1)).unwrap().avg, 0.0);
        assert_eq!(k.time_side(&int(2)).unwrap().avg, 0.0);
        assert_eq!(k.transform(0.0), PI / 2.0);
        assert!((k.transform(1e-9) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn arcsine_kernel() {
        let k = kernel_arcsine();
        assert_eq!(k.time_side(&int(0)).unwrap().avg, 1.0);
        assert_eq!(k.transform(0.0), PI);
        assert!(matches!(k.time_side(&int(1)), Err(KernelError::ExcludedPoint { .. })));
        assert!(matches!(k.time_side(&int(-1)), Err(KernelError::ExcludedPoint { .. })));
        assert_eq!(k.time_side(&ratio(3, 2)).unwrap().avg, 0.0);
        assert_eq!(k.excluded_points(), vec![int(-1), int(1)]);
    }

    #[test]
    fn dilation_rules() {
        let boxk = kernel_bspline(1).unwrap();
        let d = dilate(&boxk, 1.0 / PI).unwrap();
        for xi in [0.0, 0.3, 1.7, -4.2] {
            let expect = sinc(xi / PI) / PI;
            assert!((d.transform(xi) - expect).abs() < 1e-15);
        }
        assert_eq!(d.time_side(&int(0)).unwrap().avg, 1.0);
        assert_eq!(d.time_side(&int(1)).unwrap().avg, 0.0);

        let s2 = dilate(&kernel_semicircle(), int(2)).unwrap();
        assert_eq!(s2.support_radius_exact(), Some(int(2)));
        assert!((s2.transform(0.0) - PI).abs() < 1e-15);
        // Direct quadrature of √(1 - (x/2)²) over [-2, 2] via x = 2 sin θ.
        let f = |t: f64| Complex64::new(2.0 * t.cos() * t.cos(), 0.0);
        let direct = quad::integrate(&f, -PI / 2.0, PI / 2.0, 1e-14, 100).unwrap();
        assert!((direct.value.re - s2.transform(0.0)).abs() < 1e-12);

        let a = dilate(&kernel_arcsine(), ratio(3, 2)).unwrap();
        assert_eq!(a.excluded_points(), vec![ratio(-3, 2), ratio(3, 2)]);
        assert!(a.time_side(&ratio(3, 2)).is_err());

        assert_eq!(dilate(&boxk, int(0)), Err(KernelError::NonPositiveScale));
        assert_eq!(dilate(&boxk, -1.0), Err(KernelError::NonPositiveScale));
    }

    #[test]
    fn identity_dilation_and_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for base in [kernel_bspline(3).unwrap(), kernel_semicircle(), kernel_arcsine()] {
            let same = dilate(&base, int(1)).unwrap();
            let ab = dilate(&dilate(&base, ratio(2, 3)).unwrap(), ratio(5, 4)).unwrap();
            let direct = dilate(&base, ratio(5, 6)).unwrap();
            assert_eq!(ab.support_radius_exact(), direct.support_radius_exact());
            assert_eq!(ab.excluded_points(), direct.excluded_points());
            for _ in 0..100 {
                let xi: f64 = rng.gen_range(-5.0..5.0);
                assert_eq!(same.transform(xi), base.transform(xi));
                assert!((ab.transform(xi) - direct.transform(xi)).abs() <= 1e-13);
                let x = ratio(rng.gen_range(-40..40), 16);
                assert_eq!(same.time_side(&x).ok(), base.time_side(&x).ok());
                assert_eq!(ab.time_side(&x).ok(), direct.time_side(&x).ok());
            }
        }
    }

    #[test]
    fn evenness() {
        for x in [0.1, 0.5, 1.0, 2.75, 13.3] {
            for k in 1..=6 {
                let kern = kernel_bspline(k).unwrap();
                assert_eq!(kern.transform(x), kern.transform(-x));
            }
            for kern in [kernel_semicircle(), kernel_arcsine()] {
                assert!((kern.transform(x) - kern.transform(-x)).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn selectors() {
        assert_eq!(parse_kernel("sinc:k=4").unwrap().name(), "sinc:k=4");
        assert_eq!(parse_kernel("jinc").unwrap().name(), "jinc");
        let j = parse_kernel("j0:dilate=3/2").unwrap();
        assert_eq!(j.name(), "j0:dilate=3/2");
        assert_eq!(j.support_radius_exact(), Some(ratio(3, 2)));
        assert_eq!(parse_kernel("sinc:k=1:dilate=0.5").unwrap().support_radius(), 0.25);
        assert!(matches!(parse_kernel("sinc"), Err(KernelError::UnknownSelector(_))));
        assert!(matches!(parse_kernel("gauss"), Err(KernelError::UnknownSelector(_))));
        assert!(matches!(parse_kernel("jinc:dilate=x"), Err(KernelError::BadDilation(_))));
        assert!(matches!(parse_kernel("jinc:dilate=2*x"), Err(KernelError::BadDilation(_))));
        let k = parse_kernel("sinc:k=1:dilate=1/pi").unwrap();
        assert_eq!(k.scale(), &Scale::Real(1.0 / PI));
        assert!(matches!(parse_kernel("sinc:k=1:dilate=3/4").unwrap().scale(), Scale::Exact(_)));
        assert_eq!(parse_kernel("sinc:k=0"), Err(KernelError::ZeroOrder));
        assert_eq!(parse_kernel("jinc:dilate=-1"), Err(KernelError::NonPositiveScale));
    }
}
