//! The gauge flow `g(z)⁻¹ (zΦ) g(z)` computed symbolically.
//!
//! Over the affine chart every filtration by saturated subbundles splits:
//! completing bases of the steps from the bottom up gives a polynomial frame
//! `P` with constant determinant whose trailing columns span each step. In
//! that frame `Φ` is block lower triangular (a block of the graded type per
//! piece) and the diagonal gauge `g(z) = z^(k-1)` on block `k` turns block
//! `(i, j)` into `z^(1+j-i) · Φ_ij`. Sub-diagonal blocks survive as
//! `z → ∞`, deeper blocks decay, and anything on or above the diagonal blows
//! up; that last case is exactly a non-nilpotent `Φ`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::filtration::GradedData;
use crate::forms::{Laurent, Poly};
use crate::limits::{limit_data, HodgeBundle};
use crate::model::HitchinPair;
use crate::polymat::{PolyMatrix, SubbundleBasis};
use crate::scalar::Scalar;

/// A polynomial change of basis grouped into blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedFrame<T> {
    pub change_of_basis: PolyMatrix<T>,
    pub block_sizes: Vec<usize>,
    /// For each block, the matrix expressing its columns in the graded piece
    /// (invertible over `k[t]`); empty when the frame was not built from a
    /// filtration.
    pub graded_coords: Vec<PolyMatrix<T>>,
}

impl<T: Scalar> AdaptedFrame<T> {
    /// The standard frame with arbitrary blocks; used to push pairs that
    /// have no adapted frame through the flow.
    pub fn identity(block_sizes: Vec<usize>) -> Self {
        let n = block_sizes.iter().sum();
        AdaptedFrame { change_of_basis: PolyMatrix::identity(n), block_sizes, graded_coords: Vec::new() }
    }

    pub fn determinant(&self) -> Poly<T> {
        self.change_of_basis.det()
    }

    fn offsets(&self) -> Vec<usize> {
        block_offsets(&self.block_sizes)
    }
}

fn block_offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0];
    for s in sizes {
        out.push(out.last().unwrap() + s);
    }
    out
}

/// A frame whose trailing columns span every step of `chain` (all of which
/// must be saturated). Columns are grouped by `block_sizes`; each block
/// boundary must fall on a step.
pub fn adapted_frame<T: Scalar>(chain: &[SubbundleBasis<T>], block_sizes: &[usize]) -> Result<AdaptedFrame<T>> {
    let last = chain.last().ok_or(Error::EmptyBasis)?;
    let mut cur = last.basis().dehomogenize();
    for step in chain[..chain.len() - 1].iter().rev() {
        let a = step.basis().dehomogenize();
        let coords = a.left_inverse()?.mul(&cur);
        let completion = a.mul(&coords.unimodular_completion()?);
        cur = completion.hconcat(&cur);
    }
    let r = cur.nrows();
    if cur.ncols() != r || block_sizes.iter().sum::<usize>() != r {
        return Err(Error::Internal("filtration does not start with the whole bundle".into()));
    }
    Ok(AdaptedFrame { change_of_basis: cur, block_sizes: block_sizes.to_vec(), graded_coords: Vec::new() })
}

/// Frame for the limit described by `graded`, refined by `full` (the whole
/// filtration, which may have more steps than the graded pieces).
pub fn frame_for_limit<T: Scalar>(full: &[SubbundleBasis<T>], graded: &GradedData<T>) -> Result<AdaptedFrame<T>> {
    let blocks = graded.type_vector();
    let mut frame = adapted_frame(full, &blocks)?;
    let offsets = frame.offsets();
    let mut coords = Vec::new();
    for (i, piece) in graded.pieces.iter().enumerate() {
        let cols: Vec<usize> = (offsets[i]..offsets[i + 1]).collect();
        let q = frame.change_of_basis.select_cols(&cols);
        let step = graded.steps[i].basis().dehomogenize();
        let in_step = step.left_inverse()?.mul(&q);
        coords.push(piece.projection.dehomogenize().mul(&in_step));
    }
    frame.graded_coords = coords;
    Ok(frame)
}

/// `g(z)⁻¹ (zΦ) g(z)` in a frame, entries Laurent in `z` with polynomial
/// coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowMatrix<T> {
    pub entries: Vec<Vec<Laurent<Poly<T>>>>,
    pub block_sizes: Vec<usize>,
}

pub fn conjugate_flow<T: Scalar>(pair: &HitchinPair<T>, frame: &AdaptedFrame<T>) -> Result<FlowMatrix<T>> {
    let p = &frame.change_of_basis;
    let m = p.inverse_unimodular()?.mul(&pair.higgs().dehomogenize()).mul(p);
    let block_of = block_index(&frame.block_sizes);
    let n = m.nrows();
    let entries = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let e = 1 + block_of[b] as i64 - block_of[a] as i64;
                    Laurent::monomial(m.get(a, b).clone(), e)
                })
                .collect()
        })
        .collect();
    Ok(FlowMatrix { entries, block_sizes: frame.block_sizes.clone() })
}

fn block_index(sizes: &[usize]) -> Vec<usize> {
    sizes.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat_n(i, s)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowReport<T> {
    /// The `z⁰` part of the flow matrix.
    pub limit_matrix: PolyMatrix<T>,
    /// For each pair of blocks, the exponent of `z` carried by its nonzero
    /// entries (`None` for a zero block).
    pub exponent_table: Vec<Vec<Option<i64>>>,
    pub diverges: bool,
    pub matches_prediction: bool,
}

/// Read off the limit and compare it with the predicted Hodge bundle: the
/// `(i+1, i)` block must equal `S_(i+1)⁻¹ φ_i S_i`, with `S` the graded
/// coordinates of the frame, and every other block must vanish.
pub fn flow_report<T: Scalar>(fm: &FlowMatrix<T>, frame: &AdaptedFrame<T>, predicted: &HodgeBundle<T>) -> Result<FlowReport<T>> {
    let k = fm.block_sizes.len();
    let offsets = block_offsets(&fm.block_sizes);
    let n = fm.entries.len();
    let mut table = vec![vec![None; k]; k];
    for bi in 0..k {
        for bj in 0..k {
            let mut exps: Vec<i64> = Vec::new();
            for a in offsets[bi]..offsets[bi + 1] {
                for b in offsets[bj]..offsets[bj + 1] {
                    exps.extend(fm.entries[a][b].exponents());
                }
            }
            exps.sort_unstable();
            exps.dedup();
            if exps.len() > 1 {
                return Err(Error::Internal(format!("block ({bi}, {bj}) mixes exponents {exps:?}")));
            }
            table[bi][bj] = exps.first().copied();
        }
    }
    let diverges = table.iter().flatten().any(|e| e.is_some_and(|e| e > 0));
    let limit_matrix = PolyMatrix::from_fn(n, n, |a, b| fm.entries[a][b].coeff(0));
    let matches_prediction = !diverges && matches(&limit_matrix, frame, predicted, &offsets)?;
    Ok(FlowReport { limit_matrix, exponent_table: table, diverges, matches_prediction })
}

fn matches<T: Scalar>(limit: &PolyMatrix<T>, frame: &AdaptedFrame<T>, predicted: &HodgeBundle<T>, offsets: &[usize]) -> Result<bool> {
    let k = frame.block_sizes.len();
    if predicted.type_vector() != frame.block_sizes || frame.graded_coords.len() != k {
        return Ok(false);
    }
    for bi in 0..k {
        for bj in 0..k {
            let block = limit.block(offsets[bi]..offsets[bi + 1], offsets[bj]..offsets[bj + 1]);
            let expected = if bi == bj + 1 {
                let s_in = &frame.graded_coords[bj];
                let s_out_inv = frame.graded_coords[bi].inverse_unimodular()?;
                s_out_inv.mul(&predicted.maps[bj].dehomogenize()).mul(s_in)
            } else {
                PolyMatrix::zeros(block.nrows(), block.ncols())
            };
            if block != expected {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The limit of the flow, or `Divergent` at the first block carrying a
/// positive exponent.
pub fn flow_limit<T: Scalar>(fm: &FlowMatrix<T>, frame: &AdaptedFrame<T>, predicted: &HodgeBundle<T>) -> Result<FlowReport<T>> {
    let report = flow_report(fm, frame, predicted)?;
    for (row, r) in report.exponent_table.iter().enumerate() {
        for (col, e) in r.iter().enumerate() {
            if let Some(exponent) = *e {
                if exponent > 0 {
                    return Err(Error::Divergent { row, col, exponent });
                }
            }
        }
    }
    Ok(report)
}

/// Predicted limit, adapted frame and flow, all from the pair.
pub fn run_flow<T: Scalar>(pair: &HitchinPair<T>) -> Result<(HodgeBundle<T>, AdaptedFrame<T>, FlowReport<T>)> {
    let data = limit_data(pair)?;
    let frame = frame_for_limit(&data.classification.filtration.steps, &data.graded)?;
    let fm = conjugate_flow(pair, &frame)?;
    let report = flow_limit(&fm, &frame, &data.hodge)?;
    Ok((data.hodge, frame, report))
}

/// Push a pair through the flow in the standard frame with blocks of size 1;
/// a nilpotent lower-triangular `Φ` has a limit, anything else diverges.
pub fn force_flow<T: Scalar>(pair: &HitchinPair<T>) -> Result<FlowReport<T>> {
    let frame = AdaptedFrame::identity(vec![1; pair.rank()]);
    let fm = conjugate_flow(pair, &frame)?;
    let trivial = HodgeBundle { l_degree: pair.l_degree(), pieces: vec![pair.twists().to_vec()], maps: Vec::new() };
    flow_limit(&fm, &frame, &trivial)
}

/// Exponent of `z` in front of the extension term in block `(i, j)` of
/// `g(z)⁻¹ ∂̄ g(z)`: `j - i` on and below the diagonal. Above the diagonal the
/// extension terms of a frame adapted to a filtration vanish.
pub fn extension_weight_table(block_sizes: &[usize]) -> Vec<Vec<Option<i64>>> {
    let k = block_sizes.len();
    (0..k).map(|i| (0..k).map(|j| if i >= j { Some(j as i64 - i as i64) } else { None }).collect()).collect()
}

impl<T: Scalar> FlowMatrix<T> {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.is_zero())
    }
}
