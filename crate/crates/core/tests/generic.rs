//! The pipeline is generic over the scalar; run it with num-rational's
//! BigRational and compare with the default alias.

use conelim_core::flow::run_flow;
use conelim_core::forms::BinaryForm;
use conelim_core::limits::{classify, limit, LimitCase};
use conelim_core::model::HitchinPair;
use conelim_core::stability::is_stable;
use conelim_core::Scalar;
use num_rational::BigRational;
use num_traits::Zero;

fn fixture_b<T: Scalar>() -> HitchinPair<T> {
    let z = BinaryForm::<T>::zero;
    HitchinPair::new(
        vec![0, 0, -1],
        2,
        vec![vec![z(), z(), z()], vec![z(), z(), z()], vec![BinaryForm::x(), BinaryForm::y(), z()]],
    )
    .unwrap()
}

fn summary<T: Scalar>() -> (LimitCase, Vec<Vec<i64>>, bool, String, bool) {
    let p = fixture_b::<T>();
    let c = classify(&p).unwrap();
    let h = limit(&p).unwrap();
    let (_, _, f) = run_flow(&p).unwrap();
    let v = is_stable(&p).unwrap();
    (c.case, h.pieces, v.stable, c.slopes.quotient.unwrap().to_string(), f.matches_prediction)
}

#[test]
fn big_rational_agrees_with_default_scalar() {
    let a = summary::<BigRational>();
    let b = summary::<conelim_core::Rational>();
    assert_eq!(a, b);
    assert_eq!(a.0, LimitCase::IntermediateC2);
    assert_eq!(a.1, vec![vec![0, 0], vec![-1]]);
}
