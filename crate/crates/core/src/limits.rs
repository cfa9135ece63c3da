//! Closed-form `z → ∞` limits of `(E, zΦ)` for nilpotent `Φ`.
//!
//! * `Φ = 0`: the pair is already fixed.
//! * regular `Φ`: the graded bundle of the kernel filtration, type `(1,…,1)`.
//! * rank 3 with `Φ² = 0 ≠ Φ`: with `E_2 = ker Φ`, `E_3` the saturated image
//!   twisted down by `L`, compare `μ(E/E_2 ⊕ E_3) = (d - deg E_2 + deg E_3)/2`
//!   with `μ(E)`. Below: pieces `(E/E_2, E_2)`, type `(1,2)`. Above: pieces
//!   `(E/E_3, E_3)`, type `(2,1)`. Equality only happens when `3 | d`.

use std::fmt;

use crate::error::{Error, Result};
use crate::filtration::{graded_steps, kernel_filtration, rank3_filtration, Filtration, FiltrationKind, GradedData};
use crate::model::{BundleModel, HitchinPair, ModelConfig};
use crate::polymat::{SubbundleBasis, TwistedMatrix};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitCase {
    Zero,
    Regular,
    /// Limit of type (1,2).
    IntermediateC1,
    /// Limit of type (2,1).
    IntermediateC2,
    Unsupported(String),
}

impl fmt::Display for LimitCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LimitCase::Zero => "Zero",
            LimitCase::Regular => "Regular",
            LimitCase::IntermediateC1 => "IntermediateC1",
            LimitCase::IntermediateC2 => "IntermediateC2",
            LimitCase::Unsupported(_) => "Unsupported",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Slopes<T> {
    pub bundle: T,
    pub e2: Option<T>,
    pub e3: Option<T>,
    /// `μ(E/E_2 ⊕ E_3)`, rank-3 intermediate only.
    pub quotient: Option<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification<T> {
    pub case: LimitCase,
    pub slopes: Slopes<T>,
    pub filtration: Filtration<T>,
}

/// A pair `(⊕ V_j, φ_j : V_j → V_{j+1} ⊗ L)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HodgeBundle<T> {
    pub l_degree: i64,
    /// Splitting type of each piece, descending.
    pub pieces: Vec<Vec<i64>>,
    pub maps: Vec<TwistedMatrix<T>>,
}

impl<T: Scalar> HodgeBundle<T> {
    pub fn new(l_degree: i64, pieces: Vec<Vec<i64>>, maps: Vec<TwistedMatrix<T>>) -> Result<Self> {
        if pieces.is_empty() || pieces.iter().any(|p| p.is_empty()) {
            return Err(Error::InvalidBundle("Hodge pieces must be nonempty".into()));
        }
        if pieces.iter().any(|p| p.windows(2).any(|w| w[0] < w[1])) {
            return Err(Error::InvalidBundle("piece twists must be sorted descending".into()));
        }
        if maps.len() + 1 != pieces.len() {
            return Err(Error::ShapeMismatch(format!("{} pieces need {} maps", pieces.len(), pieces.len() - 1)));
        }
        for (j, m) in maps.iter().enumerate() {
            let target: Vec<i64> = pieces[j + 1].iter().map(|t| t + l_degree).collect();
            if m.col_twists() != pieces[j].as_slice() || m.row_twists() != target.as_slice() {
                return Err(Error::ShapeMismatch(format!("map {j} does not go from piece {j} to piece {} ⊗ L", j + 1)));
            }
        }
        Ok(HodgeBundle { l_degree, pieces, maps })
    }

    pub fn type_vector(&self) -> Vec<usize> {
        self.pieces.iter().map(|p| p.len()).collect()
    }

    pub fn rank(&self) -> usize {
        self.pieces.iter().map(|p| p.len()).sum()
    }

    pub fn degree(&self) -> i64 {
        self.pieces.iter().flatten().sum()
    }

    pub fn piece_degrees(&self) -> Vec<i64> {
        self.pieces.iter().map(|p| p.iter().sum()).collect()
    }

    /// The underlying pair, with the summands re-sorted by descending twist
    /// (stable within equal twists).
    pub fn as_pair(&self) -> Result<HitchinPair<T>> {
        let concat: Vec<i64> = self.pieces.iter().flatten().copied().collect();
        let n = concat.len();
        let mut offsets = vec![0];
        for p in &self.pieces {
            offsets.push(offsets.last().unwrap() + p.len());
        }
        let mut big = TwistedMatrix::zero(concat.iter().map(|t| t + self.l_degree).collect(), concat.clone());
        let mut entries = big.entries().to_vec();
        for (j, m) in self.maps.iter().enumerate() {
            for (a, row) in m.entries().iter().enumerate() {
                for (b, e) in row.iter().enumerate() {
                    entries[offsets[j + 1] + a][offsets[j] + b] = e.clone();
                }
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by(|&x, &y| concat[y].cmp(&concat[x]));
        let sorted: Vec<i64> = perm.iter().map(|&k| concat[k]).collect();
        let permuted = perm.iter().map(|&x| perm.iter().map(|&y| entries[x][y].clone()).collect()).collect();
        big = TwistedMatrix::new(sorted.iter().map(|t| t + self.l_degree).collect(), sorted.clone(), permuted)?;
        let config = ModelConfig { min_l_degree: self.l_degree };
        HitchinPair::from_matrix(BundleModel::new(sorted)?, self.l_degree, big, config)
    }

    fn from_graded(l_degree: i64, g: &GradedData<T>) -> Self {
        HodgeBundle { l_degree, pieces: g.piece_twists(), maps: g.induced_maps.clone() }
    }
}

pub fn classify<T: Scalar>(pair: &HitchinPair<T>) -> Result<Classification<T>> {
    let p = pair.nilpotency_order()?;
    let r = pair.rank();
    let d = pair.degree();
    let bundle = T::ratio(d, r as i64);
    let (case, filtration) = if p == 1 {
        (LimitCase::Zero, kernel_filtration(pair)?)
    } else if p == r {
        (LimitCase::Regular, kernel_filtration(pair)?)
    } else if r == 3 {
        let f = rank3_filtration(pair)?;
        let (d2, d3) = (f.steps[1].degree()?, f.steps[2].degree()?);
        // compare (d - d2 + d3)/2 with d/3
        let lhs = 3 * (d - d2 + d3);
        let case = match lhs.cmp(&(2 * d)) {
            std::cmp::Ordering::Less => LimitCase::IntermediateC1,
            std::cmp::Ordering::Greater => LimitCase::IntermediateC2,
            std::cmp::Ordering::Equal => return Err(Error::BoundaryCase),
        };
        (case, f)
    } else {
        let reason = format!("nilpotent of order {p} in rank {r}: no closed-form limit for this shape");
        (LimitCase::Unsupported(reason), kernel_filtration(pair)?)
    };
    let slope_of = |s: &SubbundleBasis<T>| -> Result<T> { Ok(T::ratio(s.degree()?, s.rank() as i64)) };
    let e2 = filtration.steps.get(1).map(slope_of).transpose()?;
    let e3 = filtration.steps.get(2).map(slope_of).transpose()?;
    let quotient = if filtration.kind == FiltrationKind::Rank3Intermediate {
        let degs = filtration.degrees();
        Some(T::ratio(d - degs[1] + degs[2], 2))
    } else {
        None
    };
    Ok(Classification { case, slopes: Slopes { bundle, e2, e3, quotient }, filtration })
}

/// Everything the limit is built from.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitData<T> {
    pub classification: Classification<T>,
    pub graded: GradedData<T>,
    pub hodge: HodgeBundle<T>,
}

pub fn limit_data<T: Scalar>(pair: &HitchinPair<T>) -> Result<LimitData<T>> {
    let classification = classify(pair)?;
    let steps = &classification.filtration.steps;
    let chain: Vec<SubbundleBasis<T>> = match &classification.case {
        LimitCase::Zero | LimitCase::Regular => steps.clone(),
        LimitCase::IntermediateC1 => vec![steps[0].clone(), steps[1].clone()],
        LimitCase::IntermediateC2 => vec![steps[0].clone(), steps[2].clone()],
        LimitCase::Unsupported(reason) => return Err(Error::Unsupported(reason.clone())),
    };
    let graded = graded_steps(pair, &chain)?;
    let hodge = HodgeBundle::from_graded(pair.l_degree(), &graded);
    Ok(LimitData { classification, graded, hodge })
}

/// `lim_{z→∞} (E, zΦ)`.
pub fn limit<T: Scalar>(pair: &HitchinPair<T>) -> Result<HodgeBundle<T>> {
    Ok(limit_data(pair)?.hodge)
}

/// For a rank-3 pair with `Φ² = 0 ≠ Φ`, the two possible limits:
/// `(E/E_2, E_2)` of type (1,2) and `(E/E_3, E_3)` of type (2,1).
pub fn intermediate_candidates<T: Scalar>(pair: &HitchinPair<T>) -> Result<(HodgeBundle<T>, HodgeBundle<T>)> {
    let f = rank3_filtration(pair)?;
    let s = &f.steps;
    let l = pair.l_degree();
    let c1 = graded_steps(pair, &[s[0].clone(), s[1].clone()])?;
    let c2 = graded_steps(pair, &[s[0].clone(), s[2].clone()])?;
    Ok((HodgeBundle::from_graded(l, &c1), HodgeBundle::from_graded(l, &c2)))
}

/// A strict or non-strict comparison of two exact values.
#[derive(Clone, Debug, PartialEq)]
pub struct Inequality<T> {
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
}

/// `lower < value < upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct Window<T> {
    pub lower: T,
    pub value: T,
    pub upper: T,
    pub holds: bool,
}

/// The slope relations satisfied by stable rank-3 pairs with `Φ² = 0 ≠ Φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintReport<T> {
    /// `μ(E) - ℓ/2 < μ(E/E_2 ⊕ E_3) < μ(E) + ℓ/2`
    pub quotient_slope_window: Window<T>,
    /// `3 deg E_3 < d`
    pub image_line_bound: Inequality<T>,
    /// `3 deg E_2 < 2d`
    pub kernel_bound: Inequality<T>,
    /// `deg E_3 + ℓ ≥ d - deg E_2`: the induced map `E/E_2 → E_3 ⊗ L` is nonzero.
    pub induced_map_bound: Inequality<T>,
}

impl<T: Scalar> ConstraintReport<T> {
    pub fn all_hold(&self) -> bool {
        self.quotient_slope_window.holds
            && self.image_line_bound.holds
            && self.kernel_bound.holds
            && self.induced_map_bound.holds
    }
}

pub fn check_slope_constraints<T: Scalar>(pair: &HitchinPair<T>) -> Result<ConstraintReport<T>> {
    let f = rank3_filtration(pair)?;
    let degs = f.degrees();
    let (d, d2, d3, l) = (pair.degree(), degs[1], degs[2], pair.l_degree());
    let mu = T::ratio(d, 3);
    let half_l = T::ratio(l, 2);
    let value = T::ratio(d - d2 + d3, 2);
    let lower = mu.clone() - half_l.clone();
    let upper = mu + half_l;
    let holds = lower < value && value < upper;
    let strict = |lhs: i64, rhs: i64| Inequality { lhs: T::from_int(lhs), rhs: T::from_int(rhs), holds: lhs < rhs };
    Ok(ConstraintReport {
        quotient_slope_window: Window { lower, value, upper, holds },
        image_line_bound: strict(3 * d3, d),
        kernel_bound: strict(3 * d2, 2 * d),
        induced_map_bound: Inequality { lhs: T::from_int(d3 + l), rhs: T::from_int(d - d2), holds: d3 + l >= d - d2 },
    })
}
