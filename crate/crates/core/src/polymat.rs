//! Matrices of forms and the subbundle calculus on the split model.
//!
//! A [`TwistedMatrix`] is a map `⊕ O(c_j) → ⊕ O(r_i)` on the projective line:
//! entry `(i, j)` is a form of degree `r_i - c_j` (zero when negative).
//! A subbundle of `E = ⊕ O(a_i)` is presented by a [`SubbundleBasis`], an
//! injective map `⊕ O(b_j) → E` whose columns are its generators.
//!
//! Saturation, kernels and images all run through the same two steps:
//!
//! 1. In the affine chart `t = X/Y` the saturated module `V ∩ k[t]^r` is the
//!    polynomial kernel of an annihilator of `V`; polynomial kernels come out
//!    of a unimodular echelon transform and are irreducible at every finite
//!    point.
//! 2. A shifted column reduction (shifts = ambient twists) makes the basis
//!    full rank at infinity. The shifted column degrees are then minus the
//!    splitting type, and homogenizing gives a saturated basis.
//!
//! The result is finally put in a canonical form (see [`canonical_basis`]) so
//! that equal subbundles have identical bases.

use num_traits::{One, Zero};
use std::ops::{Add, Mul, Neg};

use crate::error::{Error, Result};
use crate::forms::{BinaryForm, Poly};
use crate::linalg;
use crate::scalar::Scalar;

/// Dense matrix over `k[t]`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Poly<T>>,
}

/// Output of [`PolyMatrix::echelon`]: `transform * input = reduced` and
/// `inverse * transform = I`, both unimodular.
#[derive(Clone, Debug)]
pub struct Echelon<T> {
    pub reduced: PolyMatrix<T>,
    pub transform: PolyMatrix<T>,
    pub inverse: PolyMatrix<T>,
    pub rank: usize,
}

impl<T: Scalar> PolyMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, cols, data: vec![Poly::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = PolyMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Poly::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Poly<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        PolyMatrix { rows, cols, data }
    }

    pub fn from_columns(rows: usize, columns: &[Vec<Poly<T>>]) -> Self {
        PolyMatrix::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly<T> {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Poly<T>) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Poly<T>> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|p| p.is_zero())
    }

    pub fn transpose(&self) -> Self {
        PolyMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        PolyMatrix::from_fn(rows.len(), self.cols, |i, j| self.get(rows[i], j).clone())
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        PolyMatrix::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let (r0, c0) = (rows.start, cols.start);
        PolyMatrix::from_fn(rows.len(), cols.len(), |i, j| self.get(r0 + i, c0 + j).clone())
    }

    pub fn hconcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        PolyMatrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        PolyMatrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(Poly::zero(), |acc, k| {
                let (a, b) = (self.get(i, k), other.get(k, j));
                if a.is_zero() || b.is_zero() {
                    acc
                } else {
                    &acc + &(a * b)
                }
            })
        })
    }

    pub fn map(&self, f: impl Fn(&Poly<T>) -> Poly<T>) -> Self {
        PolyMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += f * row[src]`
    fn add_row_multiple(&mut self, dst: usize, src: usize, f: &Poly<T>) {
        for j in 0..self.cols {
            let s = self.get(src, j);
            if s.is_zero() {
                continue;
            }
            let v = self.get(dst, j) + &(f * s);
            self.set(dst, j, v);
        }
    }

    /// `col[dst] += f * col[src]`
    fn add_col_multiple(&mut self, dst: usize, src: usize, f: &Poly<T>) {
        for i in 0..self.rows {
            let s = self.get(i, src);
            if s.is_zero() {
                continue;
            }
            let v = self.get(i, dst) + &(f * s);
            self.set(i, dst, v);
        }
    }

    fn scale_row(&mut self, i: usize, c: &T) {
        for j in 0..self.cols {
            let v = self.get(i, j).scale(c);
            self.set(i, j, v);
        }
    }

    fn scale_col(&mut self, j: usize, c: &T) {
        for i in 0..self.rows {
            let v = self.get(i, j).scale(c);
            self.set(i, j, v);
        }
    }

    /// Row echelon form by unimodular row operations (Euclid down each
    /// column); pivots are made monic.
    pub fn echelon(&self) -> Echelon<T> {
        let mut a = self.clone();
        let mut transform = PolyMatrix::identity(self.rows);
        let mut inverse = PolyMatrix::identity(self.rows);
        let mut r0 = 0;
        for c in 0..self.cols {
            if r0 == self.rows {
                break;
            }
            loop {
                let best = (r0..self.rows)
                    .filter(|&i| !a.get(i, c).is_zero())
                    .min_by_key(|&i| a.get(i, c).degree());
                let Some(best) = best else { break };
                a.swap_rows(best, r0);
                transform.swap_rows(best, r0);
                inverse.swap_cols(best, r0);
                let mut cleared = true;
                for i in r0 + 1..self.rows {
                    if a.get(i, c).is_zero() {
                        continue;
                    }
                    let (q, rem) = a.get(i, c).div_rem(a.get(r0, c));
                    let neg_q = -&q;
                    a.add_row_multiple(i, r0, &neg_q);
                    transform.add_row_multiple(i, r0, &neg_q);
                    inverse.add_col_multiple(r0, i, &q);
                    if !rem.is_zero() {
                        cleared = false;
                    }
                }
                if cleared {
                    let lead = a.get(r0, c).leading().cloned().expect("pivot is nonzero");
                    let inv = T::one() / lead.clone();
                    a.scale_row(r0, &inv);
                    transform.scale_row(r0, &inv);
                    inverse.scale_col(r0, &lead);
                    r0 += 1;
                    break;
                }
            }
        }
        Echelon { reduced: a, transform, inverse, rank: r0 }
    }

    /// Rank over the fraction field, by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<Poly<T>>> =
            (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).clone()).collect()).collect();
        let mut prev = Poly::one();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, p);
            for i in r + 1..self.rows {
                for j in c + 1..self.cols {
                    let num = &(&a[r][c] * &a[i][j]) - &(&a[i][c] * &a[r][j]);
                    let (q, rem) = num.div_rem(&prev);
                    debug_assert!(rem.is_zero(), "Bareiss division is exact");
                    a[i][j] = q;
                }
                a[i][c] = Poly::zero();
            }
            prev = a[r][c].clone();
            r += 1;
        }
        r
    }

    /// Basis of the polynomial kernel `{v : M v = 0}` as columns; the basis is
    /// irreducible (full rank at every point of the affine line).
    pub fn kernel(&self) -> Self {
        let e = self.transpose().echelon();
        let rows: Vec<usize> = (e.rank..self.cols).collect();
        e.transform.select_rows(&rows).transpose()
    }

    /// Rows `w` with `w M = 0`, spanning the polynomial left kernel.
    pub fn left_kernel(&self) -> Self {
        let e = self.echelon();
        let rows: Vec<usize> = (e.rank..self.rows).collect();
        e.transform.select_rows(&rows)
    }

    pub fn det(&self) -> Poly<T> {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let rows: Vec<Vec<Poly<T>>> =
            (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).clone()).collect()).collect();
        laplace_det(&rows)
    }

    /// Inverse of a matrix whose determinant is a nonzero constant.
    pub fn inverse_unimodular(&self) -> Result<Self> {
        let det = self.det();
        if det.is_zero() || !det.is_constant() {
            return Err(Error::Internal("matrix is not unimodular".into()));
        }
        let inv_det = T::one() / det.coeff(0);
        let n = self.rows;
        let rows: Vec<Vec<Poly<T>>> =
            (0..n).map(|i| (0..n).map(|j| self.get(i, j).clone()).collect()).collect();
        Ok(PolyMatrix::from_fn(n, n, |i, j| {
            // adj[i][j] = (-1)^(i+j) det(minor without row j, col i)
            let minor: Vec<Vec<Poly<T>>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| rows[r][c].clone()).collect())
                .collect();
            let d = laplace_det(&minor).scale(&inv_det);
            if (i + j) % 2 == 1 {
                -d
            } else {
                d
            }
        }))
    }

    /// For an irreducible `A` (n×k), the polynomial left inverse `L` with
    /// `L A = I`.
    pub fn left_inverse(&self) -> Result<Self> {
        let k = self.cols;
        let e = self.echelon();
        if e.rank != k {
            return Err(Error::RankDeficient);
        }
        let top = e.reduced.block(0..k, 0..k);
        // Upper triangular with monic pivots; irreducible iff they are all 1.
        for i in 0..k {
            if top.get(i, i).degree() != Some(0) {
                return Err(Error::NotSaturated);
            }
        }
        let top_inv = top.inverse_unimodular()?;
        let first: Vec<usize> = (0..k).collect();
        Ok(top_inv.mul(&e.transform.select_rows(&first)))
    }

    /// Columns `C'` making `[A | C']` unimodular, for irreducible `A`.
    pub fn unimodular_completion(&self) -> Result<Self> {
        let k = self.cols;
        let e = self.echelon();
        if e.rank != k {
            return Err(Error::RankDeficient);
        }
        for i in 0..k {
            if e.reduced.get(i, i).degree() != Some(0) {
                return Err(Error::NotSaturated);
            }
        }
        let rest: Vec<usize> = (k..self.rows).collect();
        Ok(e.inverse.select_cols(&rest))
    }
}

pub(crate) fn laplace_det<E>(m: &[Vec<E>]) -> E
where
    E: Clone + Zero + One + Add<Output = E> + Mul<Output = E> + Neg<Output = E>,
{
    let n = m.len();
    match n {
        0 => E::one(),
        1 => m[0][0].clone(),
        2 => m[0][0].clone() * m[1][1].clone() + -(m[0][1].clone() * m[1][0].clone()),
        _ => {
            let mut acc = E::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<E>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect())
                    .collect();
                let term = m[0][j].clone() * laplace_det(&minor);
                acc = if j % 2 == 0 { acc + term } else { acc + -term };
            }
            acc
        }
    }
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// A map `⊕ O(col_twists[j]) → ⊕ O(row_twists[i])` on the projective line.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedMatrix<T> {
    row_twists: Vec<i64>,
    col_twists: Vec<i64>,
    entries: Vec<Vec<BinaryForm<T>>>,
}

impl<T: Scalar> TwistedMatrix<T> {
    /// Checks the degree law: entry `(i, j)` is zero or of degree
    /// `row_twists[i] - col_twists[j]`.
    pub fn new(row_twists: Vec<i64>, col_twists: Vec<i64>, entries: Vec<Vec<BinaryForm<T>>>) -> Result<Self> {
        if entries.len() != row_twists.len() || entries.iter().any(|r| r.len() != col_twists.len()) {
            return Err(Error::ShapeMismatch(format!(
                "expected {}x{} entries",
                row_twists.len(),
                col_twists.len()
            )));
        }
        for (i, row) in entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if let Some(d) = e.degree() {
                    let expected = row_twists[i] - col_twists[j];
                    if d as i64 != expected {
                        return Err(Error::EntryDegree { row: i, col: j, expected, found: d as i64 });
                    }
                }
            }
        }
        Ok(TwistedMatrix { row_twists, col_twists, entries })
    }

    pub fn zero(row_twists: Vec<i64>, col_twists: Vec<i64>) -> Self {
        let entries = vec![vec![BinaryForm::zero(); col_twists.len()]; row_twists.len()];
        TwistedMatrix { row_twists, col_twists, entries }
    }

    pub fn identity(twists: &[i64]) -> Self {
        let mut m = TwistedMatrix::zero(twists.to_vec(), twists.to_vec());
        for i in 0..twists.len() {
            m.entries[i][i] = BinaryForm::constant(T::one());
        }
        m
    }

    /// Homogenize an affine matrix against the given twists.
    pub fn from_affine(aff: &PolyMatrix<T>, row_twists: Vec<i64>, col_twists: Vec<i64>) -> Result<Self> {
        let mut entries = Vec::with_capacity(row_twists.len());
        for (i, r) in row_twists.iter().enumerate() {
            let mut row = Vec::with_capacity(col_twists.len());
            for (j, c) in col_twists.iter().enumerate() {
                let p = aff.get(i, j);
                let f = BinaryForm::homogenize_signed(p, r - c).map_err(|_| Error::EntryDegree {
                    row: i,
                    col: j,
                    expected: r - c,
                    found: p.degree().map_or(-1, |d| d as i64),
                })?;
                row.push(f);
            }
            entries.push(row);
        }
        Ok(TwistedMatrix { row_twists, col_twists, entries })
    }

    pub fn nrows(&self) -> usize {
        self.row_twists.len()
    }

    pub fn ncols(&self) -> usize {
        self.col_twists.len()
    }

    pub fn row_twists(&self) -> &[i64] {
        &self.row_twists
    }

    pub fn col_twists(&self) -> &[i64] {
        &self.col_twists
    }

    pub fn entry(&self, i: usize, j: usize) -> &BinaryForm<T> {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<BinaryForm<T>>] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<BinaryForm<T>> {
        self.entries.iter().map(|r| r[j].clone()).collect()
    }

    pub fn expected_degree(&self, i: usize, j: usize) -> i64 {
        self.row_twists[i] - self.col_twists[j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.is_zero())
    }

    pub fn dehomogenize(&self) -> PolyMatrix<T> {
        PolyMatrix::from_fn(self.nrows(), self.ncols(), |i, j| self.entries[i][j].dehomogenize())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.col_twists != other.row_twists {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose: source twists {:?} vs target twists {:?}",
                self.col_twists, other.row_twists
            )));
        }
        let entries = (0..self.nrows())
            .map(|i| {
                (0..other.ncols())
                    .map(|j| {
                        (0..self.ncols()).fold(BinaryForm::zero(), |acc, k| {
                            let p = &self.entries[i][k] * &other.entries[k][j];
                            acc.checked_add(&p).expect("degree law keeps sums homogeneous")
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(TwistedMatrix { row_twists: self.row_twists.clone(), col_twists: other.col_twists.clone(), entries })
    }

    /// Tensor source and target by `O(s)`; entries are unchanged.
    pub fn shifted(&self, s: i64) -> Self {
        TwistedMatrix {
            row_twists: self.row_twists.iter().map(|r| r + s).collect(),
            col_twists: self.col_twists.iter().map(|c| c + s).collect(),
            entries: self.entries.clone(),
        }
    }

    /// The dual map.
    pub fn transpose(&self) -> Self {
        TwistedMatrix {
            row_twists: self.col_twists.iter().map(|c| -c).collect(),
            col_twists: self.row_twists.iter().map(|r| -r).collect(),
            entries: (0..self.ncols()).map(|j| self.column(j)).collect(),
        }
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        TwistedMatrix {
            row_twists: self.row_twists.clone(),
            col_twists: cols.iter().map(|&j| self.col_twists[j]).collect(),
            entries: self.entries.iter().map(|r| cols.iter().map(|&j| r[j].clone()).collect()).collect(),
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        TwistedMatrix {
            row_twists: rows.iter().map(|&i| self.row_twists[i]).collect(),
            col_twists: self.col_twists.clone(),
            entries: rows.iter().map(|&i| self.entries[i].clone()).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        TwistedMatrix {
            row_twists: self.row_twists.clone(),
            col_twists: self.col_twists.clone(),
            entries: self.entries.iter().map(|r| r.iter().map(|e| e.scale(c)).collect()).collect(),
        }
    }

    pub fn map_entries(&self, f: impl Fn(usize, usize, &BinaryForm<T>) -> BinaryForm<T>) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().enumerate().map(|(j, e)| f(i, j, e)).collect())
            .collect();
        TwistedMatrix::new(self.row_twists.clone(), self.col_twists.clone(), entries)
    }

    pub fn det(&self) -> BinaryForm<T> {
        assert_eq!(self.nrows(), self.ncols(), "determinant of a non-square matrix");
        laplace_det(&self.entries)
    }

    /// All `size × size` minors (rows and columns in lexicographic order).
    pub fn minors(&self, size: usize) -> Vec<BinaryForm<T>> {
        let mut out = Vec::new();
        for rows in combinations(self.nrows(), size) {
            for cols in combinations(self.ncols(), size) {
                let sub: Vec<Vec<BinaryForm<T>>> =
                    rows.iter().map(|&i| cols.iter().map(|&j| self.entries[i][j].clone()).collect()).collect();
                out.push(laplace_det(&sub));
            }
        }
        out
    }

    /// Normalized gcd of all `size × size` minors.
    pub fn minor_gcd(&self, size: usize) -> BinaryForm<T> {
        self.minors(size).iter().fold(BinaryForm::zero(), |g, m| g.gcd(m))
    }

    pub fn rank(&self) -> usize {
        self.dehomogenize().rank()
    }

    /// Inverse of an automorphism (constant nonzero determinant).
    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det.is_zero() || !det.is_constant() {
            return Err(Error::NotFactorable);
        }
        let inv_det = T::one() / det.coeffs()[0].clone();
        let n = self.nrows();
        let mut entries = vec![vec![BinaryForm::zero(); n]; n];
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                let minor: Vec<Vec<BinaryForm<T>>> = (0..n)
                    .filter(|&r| r != j)
                    .map(|r| (0..n).filter(|&c| c != i).map(|c| self.entries[r][c].clone()).collect())
                    .collect();
                let d = laplace_det(&minor).scale(&inv_det);
                *e = if (i + j) % 2 == 1 { -&d } else { d };
            }
        }
        TwistedMatrix::new(self.col_twists.clone(), self.row_twists.clone(), entries)
    }
}

/// A subbundle of the ambient bundle, given by generator columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SubbundleBasis<T> {
    basis: TwistedMatrix<T>,
    saturated: bool,
}

impl<T: Scalar> SubbundleBasis<T> {
    /// Wrap a full-column-rank matrix; the saturated flag is decided by the
    /// gcd of the maximal minors.
    pub fn new(basis: TwistedMatrix<T>) -> Result<Self> {
        let k = basis.ncols();
        if k == 0 {
            return Err(Error::EmptyBasis);
        }
        if basis.rank() != k {
            return Err(Error::RankDeficient);
        }
        let saturated = basis.minor_gcd(k).is_constant();
        Ok(SubbundleBasis { basis, saturated })
    }

    /// The zero subbundle.
    pub fn zero(ambient: &[i64]) -> Self {
        SubbundleBasis { basis: TwistedMatrix::zero(ambient.to_vec(), Vec::new()), saturated: true }
    }

    /// The whole bundle with its canonical basis.
    pub fn whole(ambient: &[i64]) -> Self {
        SubbundleBasis { basis: canonical_basis(&TwistedMatrix::identity(ambient)), saturated: true }
    }

    pub(crate) fn saturated_unchecked(basis: TwistedMatrix<T>) -> Self {
        SubbundleBasis { basis, saturated: true }
    }

    pub fn basis(&self) -> &TwistedMatrix<T> {
        &self.basis
    }

    pub fn ambient_twists(&self) -> &[i64] {
        self.basis.row_twists()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    /// `F ⊗ O(s)` inside `E ⊗ O(s)`.
    pub fn twisted(&self, s: i64) -> Self {
        SubbundleBasis { basis: self.basis.shifted(s), saturated: self.saturated }
    }

    pub fn splitting_type(&self) -> Result<Vec<i64>> {
        splitting_type(self)
    }

    pub fn degree(&self) -> Result<i64> {
        subbundle_degree(self)
    }
}

/// Polynomial kernel of the map, as a saturated canonical subbundle of the
/// source.
pub fn kernel_basis<T: Scalar>(m: &TwistedMatrix<T>) -> SubbundleBasis<T> {
    let k = m.ncols() - m.rank();
    if k == 0 {
        return SubbundleBasis::zero(m.col_twists());
    }
    let src = m.col_twists();
    // Lowest possible generator twist: deg ker ≥ deg E - (sum of the top
    // rank-many target twists), and the other generators sit at most at the top.
    let mut tgt = m.row_twists().to_vec();
    tgt.sort_unstable_by(|x, y| y.cmp(x));
    let top = *src.iter().max().expect("nonempty source");
    let floor = src.iter().sum::<i64>() - tgt[..m.ncols() - k].iter().sum::<i64>() - (k as i64 - 1) * top;
    let mut accepted: Vec<(Vec<BinaryForm<T>>, i64)> = Vec::new();
    let mut beta = top;
    while accepted.len() < k {
        assert!(beta >= floor, "kernel generators below the degree floor");
        let sections = kernel_sections(m, beta);
        accepted.extend(new_generators(&accepted, sections, src, beta));
        beta -= 1;
    }
    let col_twists: Vec<i64> = accepted.iter().map(|(_, t)| *t).collect();
    let entries = (0..src.len()).map(|i| accepted.iter().map(|(g, _)| g[i].clone()).collect()).collect();
    let basis = TwistedMatrix::new(src.to_vec(), col_twists, entries).expect("sections respect the degree law");
    SubbundleBasis::saturated_unchecked(basis)
}

/// Coordinates (as in `section_coords`) of a basis of the sections `v` of
/// `E(-β)` with `m v = 0`.
fn kernel_sections<T: Scalar>(m: &TwistedMatrix<T>, beta: i64) -> Vec<Vec<T>> {
    let src = m.col_twists();
    let mut offsets = Vec::with_capacity(src.len());
    let mut dim = 0usize;
    for a in src {
        offsets.push(dim);
        dim += (a - beta + 1).max(0) as usize;
    }
    if dim == 0 {
        return Vec::new();
    }
    let mut rows: Vec<Vec<T>> = Vec::new();
    for (i, g) in m.row_twists().iter().enumerate() {
        let e = g - beta;
        if e < 0 {
            continue;
        }
        let mut eqs = vec![vec![T::zero(); dim]; e as usize + 1];
        for (j, a) in src.iter().enumerate() {
            let d = a - beta;
            let entry = m.entry(i, j);
            if d < 0 || entry.is_zero() {
                continue;
            }
            for (s, c) in entry.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for u in 0..=d as usize {
                    // unknown for X^u sits at offset + (d - u)
                    let col = offsets[j] + d as usize - u;
                    eqs[s + u][col] = eqs[s + u][col].clone() + c.clone();
                }
            }
        }
        rows.extend(eqs);
    }
    linalg::nullspace(&rows, dim)
}

/// Sections at twist `β` not generated by the accepted generators, in
/// reduced row echelon form.
fn new_generators<T: Scalar>(
    accepted: &[(Vec<BinaryForm<T>>, i64)],
    sections: Vec<Vec<T>>,
    ambient: &[i64],
    beta: i64,
) -> Vec<(Vec<BinaryForm<T>>, i64)> {
    if sections.is_empty() {
        return Vec::new();
    }
    let dim: usize = ambient.iter().map(|a| (a - beta + 1).max(0) as usize).sum();
    let mut old = Vec::new();
    for (g, bg) in accepted {
        let e = (bg - beta) as usize;
        for px in 0..=e {
            let mono = BinaryForm::monomial(T::one(), px, e - px);
            let shifted: Vec<BinaryForm<T>> = g.iter().map(|f| f * &mono).collect();
            old.push(section_coords(&shifted, ambient, beta));
        }
    }
    let (old_rref, old_piv) = linalg::rref(&old, dim);
    let fresh: Vec<Vec<T>> = sections.iter().map(|v| linalg::reduce_against(v, &old_rref, &old_piv)).collect();
    let (new_rref, _) = linalg::rref(&fresh, dim);
    new_rref.into_iter().map(|v| (section_from_coords(&v, ambient, beta), beta)).collect()
}

/// Saturation of the subsheaf generated by the columns of `b`.
pub fn saturate<T: Scalar>(b: &TwistedMatrix<T>) -> Result<SubbundleBasis<T>> {
    if b.ncols() == 0 {
        return Err(Error::EmptyBasis);
    }
    if b.rank() != b.ncols() {
        return Err(Error::RankDeficient);
    }
    Ok(saturate_span(b))
}

/// Saturation of the image sheaf of `m` inside its target (zero subbundle
/// for the zero map).
pub fn image_saturation<T: Scalar>(m: &TwistedMatrix<T>) -> SubbundleBasis<T> {
    saturate_span(m)
}

fn saturate_span<T: Scalar>(m: &TwistedMatrix<T>) -> SubbundleBasis<T> {
    if m.is_zero() {
        return SubbundleBasis::zero(m.row_twists());
    }
    // the saturation is the kernel of the annihilator of the image
    let ann = kernel_basis(&m.transpose());
    if ann.rank() == 0 {
        return SubbundleBasis::whole(m.row_twists());
    }
    kernel_basis(&ann.basis().transpose())
}

/// Sorted (descending) line-bundle degrees of a saturated subbundle.
pub fn splitting_type<T: Scalar>(b: &SubbundleBasis<T>) -> Result<Vec<i64>> {
    if !b.saturated {
        return Err(Error::NotSaturated);
    }
    // A saturated basis is injective on every fibre, so its columns split
    // the subbundle.
    let mut s = b.basis.col_twists().to_vec();
    s.sort_unstable_by(|a, b| b.cmp(a));
    Ok(s)
}

pub fn subbundle_degree<T: Scalar>(b: &SubbundleBasis<T>) -> Result<i64> {
    Ok(splitting_type(b)?.iter().sum())
}

/// Degree of the saturation of the span of `b`, computed from the maximal
/// minors alone: `Σ col_twists + deg gcd(minors)`.
pub fn saturation_degree<T: Scalar>(b: &TwistedMatrix<T>) -> Result<i64> {
    let k = b.ncols();
    let g = b.minor_gcd(k);
    let extra = g.degree().ok_or(Error::RankDeficient)? as i64;
    Ok(b.col_twists().iter().sum::<i64>() + extra)
}

/// Solve `a = b · c` exactly.
pub fn factor_through<T: Scalar>(a: &TwistedMatrix<T>, b: &SubbundleBasis<T>) -> Result<TwistedMatrix<T>> {
    let bm = &b.basis;
    if a.row_twists() != bm.row_twists() {
        return Err(Error::ShapeMismatch(format!(
            "map lands in {:?}, subbundle sits in {:?}",
            a.row_twists(),
            bm.row_twists()
        )));
    }
    let k = bm.ncols();
    if k == 0 {
        return if a.is_zero() {
            Ok(TwistedMatrix::zero(Vec::new(), a.col_twists().to_vec()))
        } else {
            Err(Error::NotFactorable)
        };
    }
    let mut pick = None;
    for rows in combinations(bm.nrows(), k) {
        let sub = bm.select_rows(&rows);
        let d = sub.det();
        if !d.is_zero() {
            pick = Some((rows, sub, d));
            break;
        }
    }
    let (rows, sub, det) = pick.ok_or(Error::RankDeficient)?;
    let mut entries = vec![vec![BinaryForm::zero(); a.ncols()]; k];
    for q in 0..a.ncols() {
        let rhs: Vec<BinaryForm<T>> = rows.iter().map(|&i| a.entry(i, q).clone()).collect();
        for (j, row) in entries.iter_mut().enumerate() {
            let mut m: Vec<Vec<BinaryForm<T>>> = sub.entries().to_vec();
            for (r, v) in rhs.iter().enumerate() {
                m[r][j] = v.clone();
            }
            // Cramer's rule; the replaced column breaks the degree law, so
            // the determinant may mix degrees only if the span condition fails.
            let num = checked_det(&m).ok_or(Error::NotFactorable)?;
            row[q] = num.exact_div(&det).map_err(|_| Error::NotFactorable)?;
        }
    }
    let c = TwistedMatrix::new(bm.col_twists().to_vec(), a.col_twists().to_vec(), entries)
        .map_err(|_| Error::NotFactorable)?;
    if bm.mul(&c)? != *a {
        return Err(Error::NotFactorable);
    }
    Ok(c)
}

fn checked_det<T: Scalar>(m: &[Vec<BinaryForm<T>>]) -> Option<BinaryForm<T>> {
    let n = m.len();
    if n == 0 {
        return Some(BinaryForm::one());
    }
    if n == 1 {
        return Some(m[0][0].clone());
    }
    let mut acc = BinaryForm::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BinaryForm<T>>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = &m[0][j] * &checked_det(&minor)?;
        acc = if j % 2 == 0 { acc.checked_add(&term).ok()? } else { acc.checked_sub(&term).ok()? };
    }
    Some(acc)
}

/// Whether the span of `inner` lies in `outer`.
pub fn contains<T: Scalar>(outer: &SubbundleBasis<T>, inner: &SubbundleBasis<T>) -> bool {
    factor_through(inner.basis(), outer).is_ok()
}

/// Coordinates of a section of `E(-β)`: row by row, coefficients from the
/// highest `X` power down.
fn section_coords<T: Scalar>(col: &[BinaryForm<T>], ambient: &[i64], beta: i64) -> Vec<T> {
    let mut out = Vec::new();
    for (f, a) in col.iter().zip(ambient) {
        let d = a - beta;
        if d < 0 {
            continue;
        }
        for k in (0..=d as usize).rev() {
            out.push(f.coeffs().get(k).cloned().unwrap_or_else(T::zero));
        }
    }
    out
}

fn section_from_coords<T: Scalar>(v: &[T], ambient: &[i64], beta: i64) -> Vec<BinaryForm<T>> {
    let mut pos = 0;
    let mut out = Vec::with_capacity(ambient.len());
    for a in ambient {
        let d = a - beta;
        if d < 0 {
            out.push(BinaryForm::zero());
            continue;
        }
        let n = d as usize + 1;
        let mut coeffs: Vec<T> = v[pos..pos + n].to_vec();
        coeffs.reverse();
        pos += n;
        out.push(BinaryForm::new(d as usize, coeffs).expect("length matches"));
    }
    out
}

/// Canonical generators of the subbundle spanned by a saturated basis.
///
/// Generators are emitted by descending twist. For twist `β`, the sections of
/// `F(-β)` coming from higher generators form a subspace `U`; the new
/// generators are the reduced row echelon basis of the remaining sections
/// after reduction modulo `U`. Both spaces are intrinsic to `F`, so the
/// output depends only on the subbundle.
pub fn canonical_basis<T: Scalar>(b: &TwistedMatrix<T>) -> TwistedMatrix<T> {
    let ambient = b.row_twists().to_vec();
    let mut twists: Vec<i64> = b.col_twists().to_vec();
    twists.sort_unstable_by(|x, y| y.cmp(x));
    twists.dedup();
    let mut accepted: Vec<(Vec<BinaryForm<T>>, i64)> = Vec::new();
    for &beta in &twists {
        let sections: Vec<Vec<T>> = (0..b.ncols())
            .filter(|&j| b.col_twists()[j] == beta)
            .map(|j| section_coords(&b.column(j), &ambient, beta))
            .collect();
        let fresh = new_generators(&accepted, sections, &ambient, beta);
        accepted.extend(fresh);
    }
    let col_twists: Vec<i64> = accepted.iter().map(|(_, t)| *t).collect();
    let entries = (0..ambient.len()).map(|i| accepted.iter().map(|(g, _)| g[i].clone()).collect()).collect();
    TwistedMatrix::new(ambient, col_twists, entries).expect("canonical generators respect the degree law")
}
