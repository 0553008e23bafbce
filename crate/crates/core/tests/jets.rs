mod common;

use proptest::prelude::*;
use taubnut_core::fd::{fd_oracle, relative_error};
use taubnut_core::Jet2;

fn poly(y: [Jet2; 3]) -> Jet2 {
    y[0] * y[1] * 3.0 + y[2] * y[2] * y[0] - y[1] + 2.0
}

fn close(a: &Jet2, b: &Jet2) -> bool {
    let s = 1.0 + a.value.abs() + a.gradient.iter().map(|v| v.abs()).sum::<f64>();
    (a.value - b.value).abs() <= 1e-12 * s
        && (0..3).all(|i| (a.gradient[i] - b.gradient[i]).abs() <= 1e-12 * s)
        && (0..3).all(|i| (0..3).all(|j| (a.hessian(i, j) - b.hessian(i, j)).abs() <= 1e-11 * s))
}

proptest! {
    #[test]
    fn product_is_commutative_bitwise(x in common::vec3(3.0)) {
        let s = Jet2::seed_point(x);
        let a = poly(s);
        let b = s[0] * s[2] + 1.5;
        prop_assert_eq!(a * b, b * a);
    }

    #[test]
    fn quotient_rule(x in common::vec3(3.0)) {
        let s = Jet2::seed_point(x);
        let a = poly(s);
        let b = s[0] * s[0] + s[1] * s[1] + 1.0;
        let q = a.checked_div(b).unwrap();
        prop_assert!(close(&(q * b), &a));
    }

    #[test]
    fn powers_agree(x in common::vec3(3.0)) {
        prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 0.01);
        let s = Jet2::seed_point(x);
        let r = Jet2::norm(&s).unwrap();
        let a = r.powi(-3).unwrap();
        let b = r.checked_powf(-3.0).unwrap();
        let c = Jet2::inv_norm(&s).unwrap().powi(3).unwrap();
        prop_assert!(close(&a, &b) && close(&a, &c));
    }

    #[test]
    fn polynomial_jet_matches_differences(x in common::vec3(3.0)) {
        let j = poly(Jet2::seed_point(x));
        let (g, h) = fd_oracle(|y| poly(Jet2::seed_point(y)).value, x, 1e-3);
        prop_assert!(relative_error(&j.gradient, &g) <= 1e-8);
        prop_assert!(relative_error(j.hessian_matrix().as_flattened(), h.as_flattened()) <= 1e-6);
    }
}
