mod common;

use lobachevsky::pwpoly::bspline;
use lobachevsky::rational::{ratio, Rational};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

#[test]
fn partition_of_unity_is_exact() {
    common::partition_of_unity(1000, 7).unwrap();
}

#[test]
fn grid_convolution_matches_exact_splines() {
    common::grid_oracle(8).unwrap();
}

#[test]
fn derivatives_continuous_up_to_order_k_minus_2() {
    for k in 2..=8u32 {
        let mut f = bspline(k).unwrap();
        for order in 0..=(k - 2) {
            for b in f.breakpoints().to_vec() {
                let l = f.eval_limits(&b);
                assert_eq!(l.left, l.right, "k={k}, derivative {order} at {b}");
            }
            f = f.derivative();
        }
        // The (k-1)-th derivative is piecewise constant and jumps.
        let jumps = f
            .breakpoints()
            .iter()
            .filter(|b| {
                let l = f.eval_limits(b);
                l.left != l.right
            })
            .count();
        assert_eq!(jumps, k as usize + 1, "k={k}");
    }
}

fn rational_strategy() -> impl Strategy<Value = Rational> {
    (-2000i64..2000, 1i64..60).prop_map(|(p, q)| ratio(p, q))
}

proptest! {
    #[test]
    fn symmetric_and_non_negative(k in 1u32..=8, x in rational_strategy()) {
        let s = bspline(k).unwrap();
        let here = s.eval_limits(&x);
        let mirror = s.eval_limits(&-x.clone());
        prop_assert_eq!(&here.avg, &mirror.avg);
        prop_assert_eq!(&here.left, &mirror.right);
        prop_assert!(!here.avg.is_negative());
        let outside = x.abs() > ratio(k as i64, 2);
        prop_assert!(!outside || here.avg.is_zero());
    }
}
