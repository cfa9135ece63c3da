//! Kernel and kernel/image filtrations of nilpotent pairs and their graded
//! Hodge pieces.
//!
//! Quotients `E_j / E_{j+1}` are presented concretely: if `C` expresses the
//! basis of `E_{j+1}` in the basis of `E_j`, the canonical basis `K` of
//! `ker Cᵀ` gives a surjection `π_j = Kᵀ` from `E_j` onto the quotient, whose
//! target twists are the splitting type of the quotient. Induced maps are
//! then solved from `φ_j π_j = π_{j+1} Φ` exactly.

use crate::error::{Error, Result};
use crate::model::HitchinPair;
use crate::polymat::{factor_through, kernel_basis, image_saturation, SubbundleBasis, TwistedMatrix};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiltrationKind {
    /// `Φ = 0`; the only step is `E`.
    Zero,
    /// `E_j = ker Φ^(p-j+1)`.
    KernelChain,
    /// Rank 3 with `Φ² = 0 ≠ Φ`: `E ⊃ ker Φ ⊃ (im Φ)^sat ⊗ L⁻¹`.
    Rank3Intermediate,
}

/// `E = E_1 ⊃ E_2 ⊃ …`, all saturated.
#[derive(Clone, Debug, PartialEq)]
pub struct Filtration<T> {
    pub kind: FiltrationKind,
    pub steps: Vec<SubbundleBasis<T>>,
}

impl<T: Scalar> Filtration<T> {
    pub fn ranks(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.rank()).collect()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.steps.iter().map(|s| s.degree().expect("filtration steps are saturated")).collect()
    }
}

/// One graded piece `E_j / E_{j+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedPiece<T> {
    /// Splitting type of the piece (descending).
    pub twists: Vec<i64>,
    /// Surjection from `E_j` (in the coordinates of its basis) onto the piece.
    pub projection: TwistedMatrix<T>,
}

/// The graded bundle of a weight-one filtration.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedData<T> {
    pub steps: Vec<SubbundleBasis<T>>,
    pub pieces: Vec<GradedPiece<T>>,
    /// `φ_j : piece j → piece j+1 ⊗ L`.
    pub induced_maps: Vec<TwistedMatrix<T>>,
}

impl<T: Scalar> GradedData<T> {
    pub fn piece_twists(&self) -> Vec<Vec<i64>> {
        self.pieces.iter().map(|p| p.twists.clone()).collect()
    }

    pub fn piece_degrees(&self) -> Vec<i64> {
        self.pieces.iter().map(|p| p.twists.iter().sum()).collect()
    }

    pub fn type_vector(&self) -> Vec<usize> {
        self.pieces.iter().map(|p| p.twists.len()).collect()
    }
}

/// The filtration used for the limit: zero, kernel chain, or the rank-3
/// kernel/image filtration. Nilpotents of rank above 3 that are neither zero
/// nor regular get the plain kernel chain.
pub fn filtration<T: Scalar>(pair: &HitchinPair<T>) -> Result<Filtration<T>> {
    let p = pair.nilpotency_order()?;
    if pair.rank() == 3 && p == 2 {
        rank3_filtration(pair)
    } else {
        kernel_filtration(pair)
    }
}

pub fn kernel_filtration<T: Scalar>(pair: &HitchinPair<T>) -> Result<Filtration<T>> {
    let p = pair.nilpotency_order()?;
    if p == 1 {
        return Ok(Filtration { kind: FiltrationKind::Zero, steps: vec![SubbundleBasis::whole(pair.twists())] });
    }
    let steps: Vec<SubbundleBasis<T>> = (1..=p).map(|j| kernel_basis(&pair.power(p - j + 1))).collect();
    for (j, step) in steps.iter().enumerate() {
        check_weight_one(pair, step, steps.get(j + 1))?;
    }
    Ok(Filtration { kind: FiltrationKind::KernelChain, steps })
}

pub fn rank3_filtration<T: Scalar>(pair: &HitchinPair<T>) -> Result<Filtration<T>> {
    let p = pair.nilpotency_order()?;
    if pair.rank() != 3 || p != 2 {
        return Err(Error::WrongShape(format!("need rank 3 with Φ² = 0 ≠ Φ, got rank {} and order {p}", pair.rank())));
    }
    let e2 = kernel_basis(pair.higgs());
    let e3 = image_saturation(pair.higgs()).twisted(-pair.l_degree());
    let internal = |what: &str| Error::Internal(format!("rank-3 filtration: {what}"));
    if e2.rank() != 2 || e3.rank() != 1 {
        return Err(internal("unexpected kernel or image rank"));
    }
    factor_through(e3.basis(), &e2).map_err(|_| internal("image is not inside the kernel"))?;
    let e1 = SubbundleBasis::whole(pair.twists());
    // Φ(E_1) ⊆ E_3 ⊗ L and Φ(E_2) = 0
    check_weight_one(pair, &e1, Some(&e3))?;
    check_weight_one(pair, &e2, None)?;
    Ok(Filtration { kind: FiltrationKind::Rank3Intermediate, steps: vec![e1, e2, e3] })
}

fn check_weight_one<T: Scalar>(
    pair: &HitchinPair<T>,
    step: &SubbundleBasis<T>,
    next: Option<&SubbundleBasis<T>>,
) -> Result<TwistedMatrix<T>> {
    let image = pair.higgs().mul(step.basis())?;
    let target = match next {
        Some(n) => n.twisted(pair.l_degree()),
        None => SubbundleBasis::zero(&pair.bundle().twisted(pair.l_degree())),
    };
    factor_through(&image, &target)
        .map_err(|_| Error::Internal("Φ does not move the filtration down one step".into()))
}

/// The surjection from `big` onto `big / small`, in the coordinates of the
/// basis of `big`.
pub fn quotient_projection<T: Scalar>(big: &SubbundleBasis<T>, small: &SubbundleBasis<T>) -> Result<GradedPiece<T>> {
    let source = big.basis().col_twists().to_vec();
    if small.rank() == 0 {
        let mut twists = source.clone();
        twists.sort_unstable_by(|a, b| b.cmp(a));
        let mut order: Vec<usize> = (0..source.len()).collect();
        order.sort_by(|&a, &b| source[b].cmp(&source[a]));
        let projection = TwistedMatrix::identity(&source).select_rows(&order);
        return Ok(GradedPiece { twists, projection });
    }
    let c = factor_through(small.basis(), big)?;
    let k = kernel_basis(&c.transpose());
    let pi = k.basis().transpose();
    // Rows by descending twist, keeping the canonical order inside a twist.
    let mut order: Vec<usize> = (0..pi.nrows()).collect();
    order.sort_by(|&a, &b| pi.row_twists()[b].cmp(&pi.row_twists()[a]));
    let projection = pi.select_rows(&order);
    Ok(GradedPiece { twists: projection.row_twists().to_vec(), projection })
}

/// Graded pieces and induced maps of a chain satisfying
/// `Φ(E_j) ⊆ E_{j+1} ⊗ L` (and `Φ(E_last) = 0`).
pub fn graded_steps<T: Scalar>(pair: &HitchinPair<T>, steps: &[SubbundleBasis<T>]) -> Result<GradedData<T>> {
    let l = pair.l_degree();
    let zero = SubbundleBasis::zero(pair.twists());
    let pieces = (0..steps.len())
        .map(|j| quotient_projection(&steps[j], steps.get(j + 1).unwrap_or(&zero)))
        .collect::<Result<Vec<_>>>()?;
    let mut induced_maps = Vec::new();
    for j in 0..steps.len().saturating_sub(1) {
        let d = check_weight_one(pair, &steps[j], Some(&steps[j + 1]))?;
        let g = pieces[j + 1].projection.shifted(l).mul(&d)?;
        let pt = SubbundleBasis::saturated_unchecked(pieces[j].projection.transpose());
        let phi_t = factor_through(&g.transpose(), &pt)
            .map_err(|_| Error::Internal("induced map does not descend to the quotient".into()))?;
        induced_maps.push(phi_t.transpose());
    }
    Ok(GradedData { steps: steps.to_vec(), pieces, induced_maps })
}

/// The graded bundle of a filtration. For the rank-3 kernel/image filtration
/// this uses the coarsening `E_1 ⊃ E_3` (the Hodge bundle of type (2,1)).
pub fn graded<T: Scalar>(pair: &HitchinPair<T>, filt: &Filtration<T>) -> Result<GradedData<T>> {
    match filt.kind {
        FiltrationKind::Zero | FiltrationKind::KernelChain => graded_steps(pair, &filt.steps),
        FiltrationKind::Rank3Intermediate => graded_steps(pair, &[filt.steps[0].clone(), filt.steps[2].clone()]),
    }
}
