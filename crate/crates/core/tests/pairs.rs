use conelim_core::filtration::{kernel_filtration, rank3_filtration};
use conelim_core::limits::{classify, limit, limit_data, LimitCase};
use conelim_core::polymat::{contains, image_saturation, SubbundleBasis, TwistedMatrix};
use conelim_core::stability::{is_stable, is_stable_hodge};
use conelim_core::testkit::{attempt_rng, pointwise_nilpotency_oracle, random_form, random_pair, random_unstructured_pair, GenParams, Shape};
use conelim_core::{Error, Form, Pair, Rational, Scalar};
use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;
use rayon::prelude::*;

fn params(seed: u64, rank: usize, shape: Shape, stable: bool) -> GenParams {
    GenParams { seed, rank, shape, require_stable: stable, ..GenParams::default() }
}

/// A random section of `F(-γ)` pushed into `E`, as a column of forms with twist `γ`.
fn random_section(rng: &mut impl Rng, f: &SubbundleBasis<Rational>) -> (Vec<Form>, i64) {
    let tw = f.basis().col_twists();
    let gamma = tw.iter().max().unwrap() - rng.gen_range(0..=2);
    let coeffs: Vec<Form> = tw.iter().map(|b| random_form(rng, b - gamma, 3)).collect();
    let col = f
        .basis()
        .entries()
        .iter()
        .map(|row| row.iter().zip(&coeffs).fold(Form::zero(), |acc, (e, c)| acc.checked_add(&(e * c)).unwrap()))
        .collect();
    (col, gamma)
}

/// Saturation of the smallest Φ-stable span containing the given sections.
fn invariant_closure(pair: &Pair, seeds: Vec<(Vec<Form>, i64)>) -> SubbundleBasis<Rational> {
    let l = pair.l_degree();
    let mut cols = Vec::new();
    for (mut v, mut gamma) in seeds {
        for _ in 0..pair.rank() {
            if v.iter().all(|e| e.is_zero()) {
                break;
            }
            cols.push((v.clone(), gamma));
            let m = TwistedMatrix::new(pair.twists().to_vec(), vec![gamma], v.iter().map(|e| vec![e.clone()]).collect()).unwrap();
            let w = pair.higgs().mul(&m).unwrap();
            v = w.column(0);
            gamma -= l;
        }
    }
    let twists = cols.iter().map(|c| c.1).collect();
    let entries = (0..pair.rank()).map(|i| cols.iter().map(|c| c.0[i].clone()).collect()).collect();
    image_saturation(&TwistedMatrix::new(pair.twists().to_vec(), twists, entries).unwrap())
}

fn sample_invariant(rng: &mut impl Rng, pair: &Pair, steps: &[SubbundleBasis<Rational>]) -> SubbundleBasis<Rational> {
    let n = rng.gen_range(1..=2);
    let seeds = (0..n)
        .map(|_| {
            let k = rng.gen_range(0..steps.len());
            random_section(rng, &steps[k])
        })
        .collect();
    invariant_closure(pair, seeds)
}

fn slope_of(f: &SubbundleBasis<Rational>) -> Rational {
    Rational::ratio(f.degree().unwrap(), f.rank() as i64)
}

#[test]
fn nilpotency_matches_pointwise_oracle() {
    let disagreements: Vec<u64> = (0..240u64)
        .into_par_iter()
        .filter(|&seed| {
            let rank = 2 + (seed % 3) as usize;
            let density = [30, 60, 100][(seed / 3 % 3) as usize];
            let p = random_unstructured_pair(seed, rank, density, seed % 2 == 0).unwrap();
            let symbolic = p.nilpotency_order().is_ok();
            symbolic != pointwise_nilpotency_oracle(&p, 0, seed) || symbolic != p.hitchin_map().is_zero()
        })
        .collect();
    assert!(disagreements.is_empty(), "seeds {disagreements:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn hitchin_map_scales_by_powers(seed in 0u64..10_000, n in -9i64..=9, d in 1i64..=5) {
        prop_assume!(n != 0);
        let lambda = Rational::ratio(n, d);
        let p = random_unstructured_pair(seed, 2 + (seed % 3) as usize, 80, false).unwrap();
        let scaled = p.scale(&lambda).unwrap().hitchin_map();
        let base = p.hitchin_map();
        let mut pow = Rational::from_int(1);
        for (k, c) in base.coefficients.iter().enumerate() {
            pow *= lambda.clone();
            prop_assert_eq!(&scaled.coefficients[k], &c.scale(&pow), "coefficient {}", k + 1);
        }
    }

    #[test]
    fn generated_pairs_lie_in_the_nilpotent_cone(seed in 0u64..10_000) {
        let p = random_pair(&params(seed, 3, Shape::Any, false)).unwrap();
        prop_assert!(p.hitchin_map().is_zero());
        prop_assert!(p.is_nilpotent());
    }
}

#[test]
fn conservation_and_saturated_kernels() {
    let shapes = [Shape::Regular, Shape::Rank3Intermediate, Shape::Zero];
    (0..90u64).into_par_iter().for_each(|seed| {
        let shape = shapes[(seed % 3) as usize];
        let rank = if shape == Shape::Rank3Intermediate { 3 } else { 2 + (seed / 3 % 3) as usize };
        let p = random_pair(&params(seed, rank, shape, false)).unwrap();
        let filt = match classify(&p) {
            Ok(c) => c.filtration,
            Err(Error::BoundaryCase) => rank3_filtration(&p).unwrap(),
            Err(e) => panic!("seed {seed}: {e}"),
        };
        for s in &filt.steps {
            assert!(s.is_saturated(), "seed {seed}");
            assert_eq!(s.splitting_type().unwrap().iter().sum::<i64>(), s.degree().unwrap());
        }
        assert_eq!(filt.ranks()[0], rank);
        assert_eq!(filt.degrees()[0], p.degree());
        if let Ok(data) = limit_data(&p) {
            let h = &data.hodge;
            assert_eq!(h.type_vector().iter().sum::<usize>(), rank, "seed {seed}");
            assert_eq!(h.piece_degrees().iter().sum::<i64>(), p.degree(), "seed {seed}");
            assert_eq!(data.graded.type_vector(), h.type_vector());
        }
        for s in &kernel_filtration(&p).unwrap().steps {
            assert!(s.is_saturated());
        }
    });
}

#[test]
fn stability_verdicts_are_sound_against_sampled_subbundles() {
    let shapes = [Shape::Regular, Shape::Rank3Intermediate];
    let failures: Vec<String> = (0..100u64)
        .into_par_iter()
        .flat_map_iter(|seed| {
            let shape = shapes[(seed % 2) as usize];
            let rank = if shape == Shape::Rank3Intermediate { 3 } else { 2 + (seed / 2 % 2) as usize };
            let p = random_pair(&params(seed, rank, shape, true)).unwrap();
            let v = is_stable(&p).unwrap();
            assert!(v.stable);
            let max_slope = v.checks.iter().map(|c| c.slope.clone()).fold(None, |m: Option<Rational>, s| match m {
                Some(m) if m >= s => Some(m),
                _ => Some(s),
            });
            let max_slope = max_slope.unwrap();
            let steps = match classify(&p).map(|c| c.filtration) {
                Ok(f) => f.steps,
                Err(_) => rank3_filtration(&p).unwrap().steps,
            };
            let mut rng = attempt_rng(seed, 77);
            let mut bad = Vec::new();
            for _ in 0..1000 {
                let f = sample_invariant(&mut rng, &p, &steps);
                if f.rank() == 0 || f.rank() == rank {
                    continue;
                }
                if slope_of(&f) > max_slope {
                    bad.push(format!("seed {seed}: sampled slope {} above {max_slope}", slope_of(&f)));
                }
            }
            bad
        })
        .collect();
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn invariant_subbundles_of_regular_fields_are_kernel_steps() {
    (0..60u64).into_par_iter().for_each(|seed| {
        let rank = 2 + (seed % 3) as usize;
        let p = random_pair(&params(seed, rank, Shape::Regular, false)).unwrap();
        let steps = kernel_filtration(&p).unwrap().steps;
        let mut rng = attempt_rng(seed, 5);
        for _ in 0..20 {
            let f = sample_invariant(&mut rng, &p, &steps);
            if f.rank() == 0 {
                continue;
            }
            // F = E_{r-k+1} for F of rank k
            let e = &steps[rank - f.rank()];
            assert!(contains(e, &f) && contains(&f, e), "seed {seed}: rank {} sample is not a kernel step", f.rank());
        }
    });
}

#[test]
fn stability_transfers_to_the_limit() {
    let shapes = [Shape::Regular, Shape::Rank3Intermediate, Shape::Any];
    (0..90u64).into_par_iter().for_each(|seed| {
        let shape = shapes[(seed % 3) as usize];
        let rank = if shape == Shape::Regular { 2 + (seed / 3 % 3) as usize } else { 3 };
        let p = random_pair(&params(seed, rank, shape, true)).unwrap();
        match limit(&p) {
            Ok(h) => assert!(is_stable_hodge(&h).unwrap().stable, "seed {seed}"),
            Err(Error::BoundaryCase) => {}
            Err(e) => panic!("seed {seed}: {e}"),
        }
    });
}

#[test]
fn zero_fields_classify_as_zero() {
    let p = random_pair(&params(3, 3, Shape::Zero, false)).unwrap();
    assert_eq!(classify(&p).unwrap().case, LimitCase::Zero);
    assert_eq!(limit(&p).unwrap().pieces, vec![p.twists().to_vec()]);
}
