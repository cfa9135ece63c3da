use conelim_core::{Form, Rational, Scalar};
use num_traits::Zero;
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=9).prop_map(|(n, d)| Rational::ratio(n, d))
}

fn form(degree: usize) -> impl Strategy<Value = Form> {
    proptest::collection::vec(rat(), degree + 1).prop_map(move |c| Form::new(degree, c).unwrap())
}

fn nonzero_form(degree: usize) -> impl Strategy<Value = Form> {
    form(degree).prop_filter("nonzero", |f| !f.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn add_then_subtract(a in form(3), b in form(3)) {
        let back = a.checked_add(&b).unwrap().checked_sub(&b).unwrap();
        prop_assert_eq!(back.coeffs(), a.coeffs());
        prop_assert_eq!(back, a);
    }

    #[test]
    fn multiply_then_divide(a in form(2), b in nonzero_form(3)) {
        let q = (&a * &b).exact_div(&b).unwrap();
        prop_assert_eq!(q.coeffs(), a.coeffs());
        prop_assert_eq!(q, a);
    }

    #[test]
    fn product_degrees_add(a in nonzero_form(2), b in nonzero_form(4)) {
        prop_assert_eq!((&a * &b).degree(), Some(6));
    }

    #[test]
    fn homogeneity(f in form(4), x in rat(), y in rat(), ts in proptest::collection::vec(rat(), 20)) {
        let base = f.eval(&x, &y);
        for t in ts {
            let scaled = f.eval(&(t.clone() * x.clone()), &(t.clone() * y.clone()));
            let mut tp = Rational::from_int(1);
            for _ in 0..4 {
                tp *= t.clone();
            }
            prop_assert_eq!(scaled, tp * base.clone());
        }
    }

    #[test]
    fn gcd_divides_and_extracts_common_factor(g in nonzero_form(1), a in nonzero_form(2), b in nonzero_form(2)) {
        let (ga, gb) = (&g * &a, &g * &b);
        let d = ga.gcd(&gb);
        prop_assert!(ga.exact_div(&d).is_ok());
        prop_assert!(gb.exact_div(&d).is_ok());
        prop_assert!(d.exact_div(&g).is_ok());
        // normalised: highest nonzero coefficient is one
        prop_assert_eq!(d.coeffs().iter().rev().find(|c| !c.is_zero()).cloned(), Some(Rational::from_int(1)));
    }

    #[test]
    fn gcd_with_zero_is_normalised_input(a in nonzero_form(3)) {
        prop_assert_eq!(a.gcd(&Form::zero()), a.normalized());
    }
}
