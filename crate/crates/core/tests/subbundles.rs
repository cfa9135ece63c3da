use conelim_core::filtration::quotient_projection;
use conelim_core::polymat::{image_saturation, kernel_basis, saturate, SubbundleBasis, TwistedMatrix};
use conelim_core::testkit::{attempt_rng, random_form, random_subbundle, splitting_from_h0};
use conelim_core::Rational;
use proptest::prelude::*;
use rand::Rng;

fn ambient(rng: &mut impl Rng, rank: usize) -> Vec<i64> {
    let mut t: Vec<i64> = (0..rank).map(|_| rng.gen_range(-3..=3)).collect();
    t.sort_unstable_by(|a, b| b.cmp(a));
    t
}

fn random_matrix(rng: &mut impl Rng, rows: &[i64], cols: &[i64]) -> TwistedMatrix<Rational> {
    let entries = rows
        .iter()
        .map(|r| cols.iter().map(|c| if rng.gen_bool(0.7) { random_form(rng, r - c, 3) } else { random_form(rng, -1, 3) }).collect())
        .collect();
    TwistedMatrix::new(rows.to_vec(), cols.to_vec(), entries).unwrap()
}

fn random_sub(seed: u64) -> (Vec<i64>, SubbundleBasis<Rational>) {
    let mut rng = attempt_rng(seed, 0);
    let n = rng.gen_range(2..=4);
    let amb = ambient(&mut rng, n);
    let k = rng.gen_range(1..=n);
    let f = random_subbundle(&mut rng, &amb, k).unwrap();
    (amb, f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn splitting_type_matches_h0_oracle(seed in any::<u64>()) {
        let (_, f) = random_sub(seed);
        prop_assert!(f.is_saturated());
        let st = f.splitting_type().unwrap();
        prop_assert_eq!(&st, &splitting_from_h0(&f).unwrap());
        prop_assert_eq!(st.iter().sum::<i64>(), f.degree().unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn saturation_is_idempotent(seed in any::<u64>()) {
        let (_, f) = random_sub(seed);
        let again = saturate(f.basis()).unwrap();
        prop_assert_eq!(again.splitting_type().unwrap(), f.splitting_type().unwrap());
        prop_assert_eq!(again.basis().col_twists(), f.basis().col_twists());
        // same span: each contains the other
        prop_assert!(conelim_core::polymat::contains(&again, &f));
        prop_assert!(conelim_core::polymat::contains(&f, &again));
    }

    #[test]
    fn saturating_a_multiple_raises_twists(seed in any::<u64>(), extra in 1i64..3) {
        let (amb, f) = random_sub(seed);
        let mut rng = attempt_rng(seed, 1);
        // multiply the first column by a random form of degree `extra`
        let g = loop {
            let g = random_form(&mut rng, extra, 3);
            if !num_traits::Zero::is_zero(&g) { break g; }
        };
        let b = f.basis();
        let mut tw = b.col_twists().to_vec();
        tw[0] -= extra;
        let entries = b.entries().iter().map(|row| {
            row.iter().enumerate().map(|(j, e)| if j == 0 { e * &g } else { e.clone() }).collect()
        }).collect();
        let m = TwistedMatrix::new(amb.clone(), tw.clone(), entries).unwrap();
        let sat = saturate(&m).unwrap();
        prop_assert_eq!(sat.degree().unwrap(), f.degree().unwrap());
        prop_assert!(sat.degree().unwrap() > tw.iter().sum::<i64>());
    }

    #[test]
    fn degree_law_inequality(seed in any::<u64>()) {
        let mut rng = attempt_rng(seed, 0);
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=3);
        let dom = ambient(&mut rng, n);
        let tgt = ambient(&mut rng, m);
        let a = random_matrix(&mut rng, &tgt, &dom);
        let ker = kernel_basis(&a);
        prop_assert!(ker.is_saturated());
        prop_assert_eq!(ker.rank(), n - a.rank());
        let dk = if ker.rank() == 0 { 0 } else { ker.degree().unwrap() };
        let img = image_saturation(&a);
        let di = if img.rank() == 0 { 0 } else { img.degree().unwrap() };
        prop_assert!(dk + di >= dom.iter().sum::<i64>());
    }

    #[test]
    fn degree_law_on_quotients(seed in any::<u64>()) {
        let (amb, f) = random_sub(seed);
        prop_assume!(f.rank() < amb.len());
        let whole = SubbundleBasis::whole(&amb);
        let q = quotient_projection(&whole, &f).unwrap();
        let ker = kernel_basis(&q.projection);
        prop_assert_eq!(ker.degree().unwrap(), f.degree().unwrap());
        let img = image_saturation(&q.projection);
        prop_assert_eq!(ker.degree().unwrap() + img.degree().unwrap(), amb.iter().sum::<i64>());
    }
}

#[test]
fn kernel_of_fixture_b_row() {
    let x = conelim_core::Form::x();
    let y = conelim_core::Form::y();
    let z = <conelim_core::Form as num_traits::Zero>::zero;
    let row = TwistedMatrix::new(vec![1], vec![0, 0, -1], vec![vec![x, y, z()]]).unwrap();
    let k = kernel_basis(&row);
    assert_eq!(k.basis().col_twists(), &[-1, -1]);
    assert_eq!(splitting_from_h0(&k).unwrap(), vec![-1, -1]);
}
