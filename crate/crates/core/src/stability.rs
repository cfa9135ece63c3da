//! Slope stability of nilpotent pairs and of Hodge bundles.
//!
//! Stability only has to be tested on Φ-invariant subbundles, and for the
//! shapes handled here the invariant subbundles fall into a few families,
//! each with a slope-maximal member:
//!
//! * `Φ = 0`: every subbundle is invariant; the top summand `O(a_1)` has the
//!   largest slope of any proper subbundle.
//! * regular `Φ`: an invariant subbundle of rank `k` lies in `ker Φ^k` and has
//!   the same rank, so it is `E_(r-k+1)`.
//! * rank 3, `Φ² = 0 ≠ Φ`: an invariant subbundle either lies in `E_2 = ker Φ`
//!   (the best line is the top summand of `E_2`; the only plane is `E_2`), or
//!   it is a plane with `Φ(F) ≠ 0`, which then contains `E_3` and is the
//!   preimage of a line in `E/E_3`. The best such plane has degree
//!   `deg E_3 + max(splitting type of E/E_3)`.

use crate::error::{Error, Result};
use crate::filtration::{kernel_filtration, quotient_projection, rank3_filtration};
use crate::limits::HodgeBundle;
use crate::model::{is_coprime, HitchinPair};
use crate::polymat::{image_saturation, kernel_basis, SubbundleBasis};
use crate::scalar::Scalar;

/// One comparison `μ(F) < μ(E)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubbundleCheck<T> {
    pub description: String,
    pub degree: i64,
    pub rank: usize,
    pub slope: T,
    pub bound: T,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityVerdict<T> {
    pub stable: bool,
    pub semistable: bool,
    pub bundle_slope: T,
    pub checks: Vec<SubbundleCheck<T>>,
    /// The failing check of largest slope.
    pub witness: Option<SubbundleCheck<T>>,
    pub coprime: bool,
}

impl<T: Scalar> StabilityVerdict<T> {
    fn from_checks(degree: i64, rank: usize, subs: Vec<(String, i64, usize)>) -> Self {
        let bound = T::ratio(degree, rank as i64);
        let checks: Vec<SubbundleCheck<T>> = subs
            .into_iter()
            .map(|(description, d, r)| {
                let slope = T::ratio(d, r as i64);
                let passes = slope < bound;
                SubbundleCheck { description, degree: d, rank: r, slope, bound: bound.clone(), passes }
            })
            .collect();
        let stable = checks.iter().all(|c| c.passes);
        let semistable = checks.iter().all(|c| c.slope <= c.bound);
        let mut witness: Option<SubbundleCheck<T>> = None;
        for c in checks.iter().filter(|c| !c.passes) {
            if witness.as_ref().is_none_or(|w| c.slope > w.slope) {
                witness = Some(c.clone());
            }
        }
        StabilityVerdict { stable, semistable, bundle_slope: bound, checks, witness, coprime: is_coprime(rank, degree) }
    }
}

/// Φ-invariant subbundles whose slopes bound those of all invariant
/// proper subbundles.
pub fn invariant_candidates<T: Scalar>(pair: &HitchinPair<T>) -> Result<Vec<(SubbundleBasis<T>, String)>> {
    let p = pair.nilpotency_order()?;
    let r = pair.rank();
    if p == 1 {
        if r == 1 {
            return Ok(Vec::new());
        }
        let whole = SubbundleBasis::whole(pair.twists());
        let top = SubbundleBasis::new(whole.basis().select_cols(&[0]))?;
        return Ok(vec![(top, "max line of E".to_string())]);
    }
    if p == r {
        let filt = kernel_filtration(pair)?;
        return Ok(filt.steps.into_iter().enumerate().skip(1).map(|(j, s)| (s, format!("E_{}", j + 1))).collect());
    }
    if r == 3 && p == 2 {
        let filt = rank3_filtration(pair)?;
        let (e1, e2, e3) = (&filt.steps[0], &filt.steps[1], &filt.steps[2]);
        let line = SubbundleBasis::new(e2.basis().select_cols(&[0]))?;
        let quotient = quotient_projection(e1, e3)?;
        // E_1 carries the identity basis, so the projection is in E coordinates
        let rest = quotient.projection.select_rows(&[1]);
        let plane = kernel_basis(&rest);
        return Ok(vec![
            (line, "max line of E_2".to_string()),
            (e2.clone(), "E_2".to_string()),
            (plane, "preimage of max line of E/E_3".to_string()),
        ]);
    }
    Err(Error::Unsupported(format!("nilpotent of order {p} in rank {r} is neither regular nor of rank 3")))
}

pub fn is_stable<T: Scalar>(pair: &HitchinPair<T>) -> Result<StabilityVerdict<T>> {
    let subs = invariant_candidates(pair)?
        .into_iter()
        .map(|(b, desc)| Ok((desc, b.degree()?, b.rank())))
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilityVerdict::from_checks(pair.degree(), pair.rank(), subs))
}

/// Stability of a Hodge bundle of type `(1,…,1)`, `(1,2)` or `(2,1)`.
pub fn is_stable_hodge<T: Scalar>(h: &HodgeBundle<T>) -> Result<StabilityVerdict<T>> {
    let types = h.type_vector();
    let degs: Vec<i64> = h.pieces.iter().map(|p| p.iter().sum()).collect();
    let l = h.l_degree;
    let mut subs = Vec::new();
    if types.iter().all(|&t| t == 1) {
        let k = types.len();
        for start in 1..k {
            let deg: i64 = degs[start..].iter().sum();
            subs.push((format!("pieces {}..{}", start + 1, k), deg, k - start));
        }
        // A vanishing map splits the bundle; the head is then invariant too.
        for (j, m) in h.maps.iter().enumerate() {
            if m.is_zero() {
                subs.push((format!("pieces 1..{}", j + 1), degs[..=j].iter().sum(), j + 1));
            }
        }
    } else if types == [1, 2] {
        let phi = &h.maps[0];
        let v2 = &h.pieces[1];
        subs.push(("max line of V_2".to_string(), v2[0], 1));
        subs.push(("V_2".to_string(), degs[1], 2));
        if phi.is_zero() {
            subs.push(("V_1".to_string(), degs[0], 1));
        } else {
            let image = image_saturation(phi).degree()? - l;
            subs.push(("V_1 + image line".to_string(), degs[0] + image, 2));
        }
    } else if types == [2, 1] {
        let phi = &h.maps[0];
        let w1 = &h.pieces[0];
        subs.push(("max line of W_1 + W_2".to_string(), w1[0] + degs[1], 2));
        subs.push(("W_2".to_string(), degs[1], 1));
        if phi.is_zero() {
            subs.push(("W_1".to_string(), degs[0], 2));
        } else {
            let kernel = kernel_basis(phi);
            subs.push(("kernel of φ".to_string(), kernel.degree()?, 1));
        }
    } else if types.len() == 1 {
        // zero map: the top summand is invariant
        subs.push(("max line".to_string(), h.pieces[0][0], 1));
    } else {
        return Err(Error::UnsupportedType(types));
    }
    Ok(StabilityVerdict::from_checks(h.degree(), h.rank(), subs))
}
