#![allow(dead_code)]

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lobachevsky::bessel::{j0, j1};
use lobachevsky::engine;
use lobachevsky::kernels::{dilate, kernel_arcsine, kernel_bspline, kernel_semicircle, BandlimitedKernel, Family};
use lobachevsky::oracle;
use lobachevsky::periodic::{parse_periodic, PeriodicFunction};
use lobachevsky::pwpoly::bspline;
use lobachevsky::quad;
use lobachevsky::rational::{int, ratio, Rational};

pub type Outcome = Result<String, String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rational(rng: &mut impl Rng, lo: i64, hi: i64, max_den: i64) -> Rational {
    let q = rng.gen_range(1..=max_den);
    let p = rng.gen_range(lo * q..=hi * q);
    ratio(p, q)
}

/// Exact check of `Σ_j avg g(x - j) = 1` for B-splines of order 1..=8.
pub fn partition_of_unity(probes: usize, seed: u64) -> Outcome {
    let mut rng = rng(seed);
    for k in 1..=8u32 {
        let spline = bspline(k).unwrap();
        let reach = k as i64 / 2 + 1;
        for i in 0..probes {
            // Every fourth probe sits on a half-integer grid to hit breakpoints.
            let x = if i % 4 == 0 {
                ratio(rng.gen_range(-40..=40), 2)
            } else {
                random_rational(&mut rng, -10, 10, 97)
            };
            let centre = x.floor().to_integer().to_i64().unwrap();
            let sum = (centre - reach..=centre + reach)
                .map(|j| spline.eval_limits(&(&x - int(j))).avg)
                .fold(Rational::zero(), |a, b| a + b);
            if sum != Rational::one() {
                return Err(format!("k={k}, x={x}: sum {sum}"));
            }
        }
    }
    Ok(format!("8 orders x {probes} probes exact"))
}

/// Samples of the box on `h Z`, with 1/2 at the jumps.
fn sampled_box(h: f64) -> Vec<f64> {
    let half = (0.5 / h).round() as i64;
    (-half..=half)
        .map(|j| if j.abs() == half { 0.5 } else { 1.0 })
        .collect()
}

fn discrete_bspline(k: u32, h: f64) -> Vec<f64> {
    let b = sampled_box(h);
    let mut acc = b.clone();
    for _ in 1..k {
        let mut next = vec![0.0; acc.len() + b.len() - 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, v) in b.iter().enumerate() {
                next[i + j] += a * v * h;
            }
        }
        acc = next;
    }
    acc
}

/// Trapezoid repeated convolution of the sampled box on steps 1/64, 1/128
/// and 1/256, against the exact spline on the 1/64 grid. Zero-length overlaps
/// leave an O(h) error next to the O(h^2) one, so both are extrapolated away.
pub fn grid_oracle(max_k: u32) -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 1..=max_k {
        let spline = bspline(k).unwrap();
        let grids: Vec<Vec<f64>> = [64.0, 128.0, 256.0].iter().map(|n| discrete_bspline(k, 1.0 / n)).collect();
        let n = (grids[0].len() - 1) / 2;
        for i in 0..grids[0].len() {
            let (a, b, c) = (grids[0][i], grids[1][2 * i], grids[2][4 * i]);
            let (ab, bc) = (2.0 * b - a, 2.0 * c - b);
            let estimate = (4.0 * bc - ab) / 3.0;
            let j = i as i64 - n as i64;
            let exact = spline.eval_limits(&ratio(j, 64)).avg;
            let err = (estimate - lobachevsky::rational::to_f64(&exact)).abs();
            worst = worst.max(err);
            if err > 1e-6 {
                return Err(format!("k={k}, x={j}/64: {estimate} vs {exact}"));
            }
        }
    }
    Ok(format!("max deviation {worst:.1e}"))
}

/// Direct quadrature of `∫ g(x) cos(2πxξ) dx` (all catalog kernels are even).
pub fn direct_transform(kernel: &BandlimitedKernel, xi: f64) -> f64 {
    let s = kernel.scale().to_f64();
    let tol = 1e-13;
    match kernel.family() {
        Family::BSpline { spline, .. } => {
            let bp: Vec<f64> = spline.breakpoints().iter().map(lobachevsky::rational::to_f64).collect();
            let (a, b) = (bp[0] * s, bp[bp.len() - 1] * s);
            let cuts: Vec<f64> = bp[1..bp.len() - 1].iter().map(|c| c * s).collect();
            let f = |x: f64| num_complex::Complex64::new(kernel.time_value(x) * (2.0 * PI * x * xi).cos(), 0.0);
            quad::integrate_split(&f, a, b, &cuts, tol, 4000).unwrap().value.re
        }
        // x = s sin θ: semicircle s cos θ · s cos θ, arcsine (1/cos θ) · s cos θ.
        Family::Semicircle => {
            let f = |t: f64| {
                let c = t.cos();
                num_complex::Complex64::new(s * c * c * (2.0 * PI * s * t.sin() * xi).cos(), 0.0)
            };
            quad::integrate(&f, -PI / 2.0, PI / 2.0, tol, 4000).unwrap().value.re
        }
        Family::Arcsine => {
            let f = |t: f64| num_complex::Complex64::new(s * (2.0 * PI * s * t.sin() * xi).cos(), 0.0);
            quad::integrate(&f, -PI / 2.0, PI / 2.0, tol, 4000).unwrap().value.re
        }
    }
}

pub fn catalog_kernels() -> Vec<BandlimitedKernel> {
    let mut out: Vec<_> = (1..=8).map(|k| kernel_bspline(k).unwrap()).collect();
    out.push(kernel_semicircle());
    out.push(kernel_arcsine());
    out.push(dilate(&kernel_bspline(3).unwrap(), ratio(3, 2)).unwrap());
    out.push(dilate(&kernel_semicircle(), ratio(2, 5)).unwrap());
    out.push(dilate(&kernel_arcsine(), 1.0 / PI).unwrap());
    out
}

pub fn transform_consistency(probes: usize, seed: u64) -> Outcome {
    let mut rng = rng(seed);
    let mut worst: f64 = 0.0;
    for kernel in catalog_kernels() {
        for _ in 0..probes {
            let xi: f64 = rng.gen_range(-5.0..5.0);
            let direct = direct_transform(&kernel, xi);
            let closed = kernel.transform(xi);
            let err = (direct - closed).abs();
            worst = worst.max(err);
            if err > 1e-8 {
                return Err(format!("{} at {xi}: direct {direct} vs {closed}", kernel.name()));
            }
        }
    }
    Ok(format!("{} kernels x {probes} probes, max deviation {worst:.1e}", catalog_kernels().len()))
}

/// Random real trigonometric polynomial of degree <= 5 in `x / T`, as an
/// expression so that the engine computes its coefficients by quadrature.
pub fn random_trig_polynomial(rng: &mut impl Rng) -> (PeriodicFunction, String) {
    let period = loop {
        let t = random_rational(rng, 0, 3, 6);
        if t >= ratio(1, 4) {
            break t;
        }
    };
    let (p, q) = (period.numer().clone(), period.denom().clone());
    let degree = rng.gen_range(0..=5);
    let mut src = format!("{:?}", rng.gen_range(-1.0..1.0f64));
    for n in 1..=degree {
        let a: f64 = rng.gen_range(-1.0..1.0);
        let b: f64 = rng.gen_range(-1.0..1.0);
        src.push_str(&format!(" + {a:?}*cos(2*pi*{n}*{q}/{p}*x) + {b:?}*sin(2*pi*{n}*{q}/{p}*x)"));
    }
    let f = parse_periodic(&src, period.clone(), None).unwrap();
    (f, format!("T={period}: {src}"))
}

pub fn engine_oracle_equivalence(polys: usize, seed: u64) -> Outcome {
    let mut rng = rng(seed);
    let mut worst = [0.0f64; 6];
    for _ in 0..polys {
        let (p, label) = random_trig_polynomial(&mut rng);
        for k in 1..=6u32 {
            let tol = if k == 1 { 1e-3 } else { 1e-6 };
            let kernel = kernel_bspline(k).unwrap();
            let r = oracle::oracle_compare(&p, &kernel, tol).map_err(|e| format!("k={k}, {label}: {e}"))?;
            worst[k as usize - 1] = worst[k as usize - 1].max(r.difference);
            if !r.pass {
                return Err(format!("k={k}, {label}: engine {} oracle {}", r.engine.value, r.oracle.value));
            }
        }
    }
    Ok(format!(
        "{polys} polynomials x k=1..6, max |diff| per k {:?}",
        worst.iter().map(|w| format!("{w:.1e}")).collect::<Vec<_>>()
    ))
}

/// `J_order(x)` by the power series in exact fixed-point integer arithmetic.
pub fn bessel_series_oracle(order: u32, x: f64) -> f64 {
    const BITS: u64 = 400;
    let scale = BigInt::one() << BITS;
    let half = exact_fixed(x / 2.0, BITS);
    let half_sq = (&half * &half) >> BITS;
    let mut term = scale.clone();
    for _ in 0..order {
        term = (&term * &half) >> BITS;
    }
    let mut sum = term.clone();
    let mut m: u64 = 0;
    loop {
        m += 1;
        term = -((&term * &half_sq) >> BITS) / BigInt::from(m * (m + order as u64));
        sum += &term;
        if term.is_zero() || (term.abs().bits() < 8 && m as f64 > x.abs()) {
            break;
        }
    }
    // Keep 64 significant fractional bits before converting.
    let shifted = &sum >> (BITS - 64);
    shifted.to_f64().unwrap() / 2f64.powi(64)
}

fn exact_fixed(v: f64, bits: u64) -> BigInt {
    let (mantissa, exponent, sign) = num_traits::float::FloatCore::integer_decode(v);
    let m = BigInt::from(mantissa) * sign as i64;
    let shift = bits as i64 + exponent as i64;
    if shift >= 0 {
        m << shift as u64
    } else {
        m >> (-shift) as u64
    }
}

/// Implementation against the series oracle: `|err| <= 1e-12 |J| + 1e-14`.
pub fn bessel_against_series(points: usize, seed: u64) -> Outcome {
    let mut rng = rng(seed);
    let mut worst_rel: f64 = 0.0;
    for i in 0..points {
        let x: f64 = match i % 4 {
            0 => rng.gen_range(-4.0..4.0),
            1 => rng.gen_range(4.0..25.0),
            _ => rng.gen_range(-60.0..60.0),
        };
        for order in [0, 1] {
            let reference = bessel_series_oracle(order, x);
            let got = if order == 0 { j0(x) } else { j1(x) };
            let err = (got - reference).abs();
            if err > 1e-12 * reference.abs() + 1e-14 {
                return Err(format!("J{order}({x:?}) = {got:?}, series {reference:?}"));
            }
            if reference.abs() > 1e-3 {
                worst_rel = worst_rel.max(err / reference.abs());
            }
        }
    }
    Ok(format!("{points} points x 2 orders, max relative error {worst_rel:.1e} away from zeros"))
}

pub fn closed_form_rhs(p: &PeriodicFunction, c: f64) -> f64 {
    let half = 0.5 * p.period_f64();
    let f = |x: f64| {
        let s = lobachevsky::bessel::sin_pi(x);
        p.eval(x) * (1.0 - c * s * s)
    };
    quad::integrate_split(&f, -half, half, &p.smoothness_breaks(), 1e-14, 4000)
        .unwrap()
        .value
        .re
}

pub fn engine_value(p: &PeriodicFunction, kernel: &BandlimitedKernel) -> num_complex::Complex64 {
    engine::mixed_parseval(p, kernel, 1e-12).unwrap().value
}
