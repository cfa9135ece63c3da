//! Seeded random instances and independent oracles.
//!
//! Every attempt draws from its own ChaCha8 stream: the generator is seeded
//! with `seed` and the stream number is the attempt index, so attempt `k` of
//! seed `s` is reproducible on its own.
//!
//! Nilpotent pairs are built backwards from a random saturated flag: the Higgs
//! fields moving the flag down one step form a linear space (the conditions
//! `Φ(F_k) ⊆ F_(k+1) ⊗ L` are linear in the coefficients), and a random
//! integer point of that space is taken. The result is finally conjugated by
//! a random automorphism of `E`.

use dashu_int::ops::{Gcd, UnsignedAbs};
use dashu_int::UBig;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{BundleModel, HitchinPair};
use crate::polymat::{kernel_basis, laplace_det, saturate, SubbundleBasis, TwistedMatrix};
use crate::scalar::Scalar;
use crate::stability::is_stable;
use crate::{Form, Pair, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Regular,
    Rank3Intermediate,
    Zero,
    Any,
}

impl std::str::FromStr for Shape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "regular" => Ok(Shape::Regular),
            "rank3intermediate" | "intermediate" => Ok(Shape::Rank3Intermediate),
            "zero" => Ok(Shape::Zero),
            "any" => Ok(Shape::Any),
            _ => Err(Error::InvalidParams(format!("unknown shape {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenParams {
    pub seed: u64,
    pub rank: usize,
    pub twist_range: (i64, i64),
    pub l_range: (i64, i64),
    pub shape: Shape,
    pub require_stable: bool,
    pub max_attempts: u32,
    /// Conjugate by a random automorphism of `E` at the end.
    pub conjugate: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 0,
            rank: 3,
            twist_range: (-3, 3),
            l_range: (1, 6),
            shape: Shape::Regular,
            require_stable: false,
            max_attempts: 200,
            conjugate: true,
        }
    }
}

impl GenParams {
    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if self.rank == 0 || self.rank > 6 {
            return bad("rank must be between 1 and 6");
        }
        if self.twist_range.0 > self.twist_range.1 {
            return bad("empty twist range");
        }
        if self.l_range.0 > self.l_range.1 || self.l_range.0 < 1 {
            return bad("line degree range must be nonempty and at least 1");
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be at least 1");
        }
        if self.shape == Shape::Rank3Intermediate && self.rank != 3 {
            return bad("the intermediate shape needs rank 3");
        }
        if self.shape == Shape::Regular && self.rank < 2 {
            return bad("a regular nilpotent needs rank at least 2");
        }
        Ok(())
    }
}

/// The RNG for one attempt.
pub fn attempt_rng(seed: u64, attempt: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt as u64);
    rng
}

fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

pub fn random_form(rng: &mut impl Rng, degree: i64, coeff_bound: i64) -> Form {
    if degree < 0 {
        return Form::zero();
    }
    let coeffs = (0..=degree).map(|_| q(rng.gen_range(-coeff_bound..=coeff_bound))).collect();
    Form::new(degree as usize, coeffs).expect("length matches")
}

fn random_twists(rng: &mut impl Rng, rank: usize, range: (i64, i64)) -> Vec<i64> {
    let mut t: Vec<i64> = (0..rank).map(|_| rng.gen_range(range.0..=range.1)).collect();
    t.sort_unstable_by(|a, b| b.cmp(a));
    t
}

/// A random column `O(β) → E` with `β` at most the top twist.
fn random_column(rng: &mut impl Rng, ambient: &[i64]) -> (Vec<Form>, i64) {
    let top = ambient[0];
    let bottom = *ambient.last().unwrap();
    let beta = rng.gen_range(bottom - 2..=top);
    let col = ambient.iter().map(|a| random_form(rng, a - beta, 3)).collect();
    (col, beta)
}

/// The positive rational multiple of `v` that is a primitive integer vector.
fn primitive_factor<'a>(v: impl IntoIterator<Item = &'a Rational>) -> Rational {
    let mut den = UBig::ONE;
    let mut num = UBig::ZERO;
    for c in v.into_iter().filter(|c| !c.is_zero()) {
        let d = c.denominator();
        den = &den / (&den).gcd(d) * d;
        let n = c.numerator().unsigned_abs();
        num = if num.is_zero() { n } else { (&num).gcd(&n) };
    }
    if num.is_zero() {
        return Rational::ONE;
    }
    Rational::from_parts(den.into(), num)
}

/// Rescale every column to a primitive integer vector; the span and all
/// saturation properties are unchanged.
fn primitive_columns(m: &TwistedMatrix<Rational>) -> TwistedMatrix<Rational> {
    let factors: Vec<Rational> = (0..m.ncols())
        .map(|j| primitive_factor(m.column(j).iter().flat_map(|f| f.coeffs().iter()).collect::<Vec<_>>()))
        .collect();
    m.map_entries(|_, j, e| e.scale(&factors[j])).expect("scaling keeps degrees")
}

fn primitive_matrix(m: &TwistedMatrix<Rational>) -> TwistedMatrix<Rational> {
    let f = primitive_factor(m.entries().iter().flatten().flat_map(|e| e.coeffs().iter()));
    m.scale(&f)
}

/// A random saturated subbundle of the given rank.
pub fn random_subbundle(rng: &mut impl Rng, ambient: &[i64], rank: usize) -> Result<SubbundleBasis<Rational>> {
    let mut cur: Option<SubbundleBasis<Rational>> = None;
    let mut guard = 0;
    while cur.as_ref().map_or(0, |c| c.rank()) < rank {
        guard += 1;
        if guard > 100 {
            return Err(Error::Internal("could not extend a random flag".into()));
        }
        if let Some(next) = extend(rng, ambient, cur.as_ref()) {
            cur = Some(next);
        }
    }
    cur.ok_or(Error::EmptyBasis)
}

/// Saturation of `cur` plus one random column, if that raises the rank.
fn extend(rng: &mut impl Rng, ambient: &[i64], cur: Option<&SubbundleBasis<Rational>>) -> Option<SubbundleBasis<Rational>> {
    let (col, beta) = random_column(rng, ambient);
    let mut twists: Vec<i64> = cur.map(|c| c.basis().col_twists().to_vec()).unwrap_or_default();
    twists.push(beta);
    let entries = (0..ambient.len())
        .map(|i| {
            let mut row: Vec<Form> = cur.map(|c| c.basis().entries()[i].clone()).unwrap_or_default();
            row.push(col[i].clone());
            row
        })
        .collect();
    let m = TwistedMatrix::new(ambient.to_vec(), twists, entries).ok()?;
    let sat = saturate(&m).ok()?;
    Some(SubbundleBasis::saturated_unchecked(primitive_columns(sat.basis())))
}

/// The saturation of a random section of `F(-β)`, for a random `β` reaching
/// a little below the splitting type of `F`.
fn random_line_in(rng: &mut impl Rng, f: &SubbundleBasis<Rational>) -> Option<SubbundleBasis<Rational>> {
    let tw = f.basis().col_twists();
    let (lo, hi) = (*tw.iter().min()?, *tw.iter().max()?);
    let beta = rng.gen_range(lo - 2..=hi);
    let coeffs: Vec<Vec<Form>> = tw.iter().map(|b| vec![random_form(rng, b - beta, 3)]).collect();
    let c = TwistedMatrix::new(tw.to_vec(), vec![beta], coeffs).ok()?;
    let col = f.basis().mul(&c).ok()?;
    if col.is_zero() {
        return None;
    }
    let sat = saturate(&col).ok()?;
    Some(SubbundleBasis::saturated_unchecked(primitive_columns(sat.basis())))
}

/// `W` with `ker W = F` exactly (identity for the zero subbundle).
fn annihilator(f: &SubbundleBasis<Rational>) -> TwistedMatrix<Rational> {
    if f.rank() == 0 {
        return TwistedMatrix::identity(f.ambient_twists());
    }
    primitive_columns(kernel_basis(&f.basis().transpose()).basis()).transpose()
}

/// Higgs fields with `(W_k ⊗ L) · Φ · B_k = 0` for each `(W_k, B_k)`: a basis of
/// the solution space, each element listed as its matrix.
fn solution_space(
    twists: &[i64],
    l: i64,
    conditions: &[(TwistedMatrix<Rational>, TwistedMatrix<Rational>)],
) -> Vec<TwistedMatrix<Rational>> {
    let r = twists.len();
    // unknowns: coefficient k of entry (i, j)
    let mut unknowns = Vec::new();
    for i in 0..r {
        for j in 0..r {
            let d = twists[i] + l - twists[j];
            for k in 0..=d.max(-1) {
                unknowns.push((i, j, k as usize));
            }
        }
    }
    let n = unknowns.len();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (w, b) in conditions {
        for p in 0..w.nrows() {
            for c in 0..b.ncols() {
                let out_deg = w.row_twists()[p] + l - b.col_twists()[c];
                if out_deg < 0 {
                    continue;
                }
                let mut eqs = vec![vec![q(0); n]; out_deg as usize + 1];
                for (u, &(i, j, k)) in unknowns.iter().enumerate() {
                    let prod = w.entry(p, i) * b.entry(j, c);
                    if prod.is_zero() {
                        continue;
                    }
                    for (m, coeff) in prod.coeffs().iter().enumerate() {
                        eqs[m + k][u] = eqs[m + k][u].clone() + coeff.clone();
                    }
                }
                rows.extend(eqs);
            }
        }
    }
    let basis = linalg::nullspace(&rows, n);
    basis
        .into_iter()
        .map(|v| {
            let f = primitive_factor(&v);
            let v: Vec<Rational> = v.iter().map(|c| c * &f).collect();
            let mut coeffs: Vec<Vec<Vec<Rational>>> =
                (0..r).map(|i| (0..r).map(|j| vec![q(0); (twists[i] + l - twists[j] + 1).max(0) as usize]).collect()).collect();
            for (u, &(i, j, k)) in unknowns.iter().enumerate() {
                coeffs[i][j][k] = v[u].clone();
            }
            let entries = (0..r)
                .map(|i| {
                    (0..r)
                        .map(|j| {
                            let d = twists[i] + l - twists[j];
                            if d < 0 {
                                Form::zero()
                            } else {
                                Form::new(d as usize, coeffs[i][j].clone()).expect("length matches")
                            }
                        })
                        .collect()
                })
                .collect();
            let rows: Vec<i64> = twists.iter().map(|a| a + l).collect();
            TwistedMatrix::new(rows, twists.to_vec(), entries).expect("degree law by construction")
        })
        .collect()
}

fn random_combination(rng: &mut impl Rng, basis: &[TwistedMatrix<Rational>], twists: &[i64], l: i64) -> TwistedMatrix<Rational> {
    let rows: Vec<i64> = twists.iter().map(|a| a + l).collect();
    let mut acc = TwistedMatrix::zero(rows, twists.to_vec());
    for b in basis {
        let c = q(rng.gen_range(-3..=3));
        let term = b.scale(&c);
        acc = acc
            .map_entries(|i, j, e| e.checked_add(term.entry(i, j)).expect("same slot degree"))
            .expect("degree law");
    }
    acc
}

/// A random automorphism of `E`: integer blocks of determinant 1 on equal
/// twists, random forms above them.
pub fn random_automorphism(rng: &mut impl Rng, twists: &[i64]) -> TwistedMatrix<Rational> {
    let r = twists.len();
    let mut entries = vec![vec![Form::zero(); r]; r];
    let mut start = 0;
    while start < r {
        let end = (start..r).find(|&k| twists[k] != twists[start]).unwrap_or(r);
        let size = end - start;
        let block = unit_integer_matrix(rng, size);
        for a in 0..size {
            for b in 0..size {
                entries[start + a][start + b] = Form::constant(q(block[a][b]));
            }
        }
        start = end;
    }
    for i in 0..r {
        for j in 0..r {
            if twists[i] > twists[j] {
                entries[i][j] = random_form(rng, twists[i] - twists[j], 2);
            }
        }
    }
    TwistedMatrix::new(twists.to_vec(), twists.to_vec(), entries).expect("degree law by construction")
}

fn unit_integer_matrix(rng: &mut impl Rng, size: usize) -> Vec<Vec<i64>> {
    for _ in 0..500 {
        let m: Vec<Vec<i64>> = (0..size).map(|_| (0..size).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        let as_q: Vec<Vec<Rational>> = m.iter().map(|row| row.iter().map(|&v| q(v)).collect()).collect();
        if laplace_det(&as_q) == q(1) {
            return m;
        }
    }
    (0..size).map(|i| (0..size).map(|j| i64::from(i == j)).collect()).collect()
}

/// Degree conditions a regular field with kernel flag `flag` must meet: each
/// graded step `F_k/F_(k+1) → F_(k+1)/F_(k+2) ⊗ L` needs room to be nonzero,
/// and stability is decided by the slopes of the flag members.
fn flag_admissible(flag: &[SubbundleBasis<Rational>], l: i64, stable: bool) -> Result<bool> {
    let r = flag.len() - 1;
    let degs = flag.iter().map(|f| if f.rank() == 0 { Ok(0) } else { f.degree() }).collect::<Result<Vec<i64>>>()?;
    let quotients: Vec<i64> = (0..r).map(|k| degs[k] - degs[k + 1]).collect();
    if quotients.windows(2).any(|w| w[1] + l < w[0]) {
        return Ok(false);
    }
    let d = degs[0];
    Ok(!stable || (1..r).all(|j| degs[j] * (r as i64) < d * (r - j) as i64))
}

fn candidate(rng: &mut impl Rng, params: &GenParams, shape: Shape) -> Result<Option<Pair>> {
    let r = params.rank;
    let twists = random_twists(rng, r, params.twist_range);
    let l = rng.gen_range(params.l_range.0..=params.l_range.1);
    let bundle = BundleModel::new(twists.clone())?;
    if shape == Shape::Zero {
        return Ok(Some(HitchinPair::zero(bundle, l)));
    }
    let whole = SubbundleBasis::whole(&twists);
    let conditions = match shape {
        Shape::Regular => {
            // F_1 = E ⊃ F_2 ⊃ … ⊃ F_r ⊃ 0, built from the bottom
            let mut flag = vec![SubbundleBasis::zero(&twists)];
            for _ in 1..r {
                match extend(rng, &twists, flag.last().filter(|f| f.rank() > 0)) {
                    Some(next) if next.rank() == flag.last().unwrap().rank() + 1 => flag.push(next),
                    _ => return Ok(None),
                }
            }
            flag.push(whole);
            flag.reverse();
            if !flag_admissible(&flag, l, params.require_stable)? {
                return Ok(None);
            }
            (0..r).map(|k| (annihilator(&flag[k + 1]), flag[k].basis().clone())).collect::<Vec<_>>()
        }
        Shape::Rank3Intermediate => {
            let Some(line) = extend(rng, &twists, None) else { return Ok(None) };
            let Some(e2) = extend(rng, &twists, Some(&line)) else { return Ok(None) };
            if e2.rank() != 2 {
                return Ok(None);
            }
            let Some(e3) = random_line_in(rng, &e2) else { return Ok(None) };
            let (d, d2, d3) = (bundle.degree(), e2.degree()?, e3.degree()?);
            // Φ factors through E/E_2 → E_3 ⊗ L, a map of line bundles
            if d - d2 > d3 + l {
                return Ok(None);
            }
            let top_line = e2.basis().col_twists()[0];
            if params.require_stable && (3 * d2 >= 2 * d || 3 * top_line >= d) {
                return Ok(None);
            }
            vec![
                (annihilator(&e3), whole.basis().clone()),
                (TwistedMatrix::identity(&twists), e2.basis().clone()),
            ]
        }
        Shape::Zero | Shape::Any => unreachable!("resolved by the caller"),
    };
    let space = solution_space(&twists, l, &conditions);
    if space.is_empty() {
        return Ok(None);
    }
    let phi = primitive_matrix(&random_combination(rng, &space, &twists, l));
    let mut pair = HitchinPair::from_matrix(bundle, l, phi, Default::default())?;
    if params.conjugate {
        let g = random_automorphism(rng, &twists);
        pair = pair.conjugate(&g)?;
    }
    let ok = match (shape, pair.nilpotency_order()) {
        (Shape::Regular, Ok(p)) => p == r,
        (Shape::Rank3Intermediate, Ok(p)) => p == 2,
        _ => false,
    };
    Ok(ok.then_some(pair))
}

/// A random pair of the requested shape, deterministic in the parameters.
pub fn random_pair(params: &GenParams) -> Result<Pair> {
    params.check()?;
    for attempt in 0..params.max_attempts {
        let mut rng = attempt_rng(params.seed, attempt);
        let shape = match params.shape {
            Shape::Any => {
                let mut options = vec![Shape::Zero];
                if params.rank >= 2 {
                    options.push(Shape::Regular);
                }
                if params.rank == 3 {
                    options.push(Shape::Rank3Intermediate);
                }
                options[rng.gen_range(0..options.len())]
            }
            s => s,
        };
        let Some(pair) = candidate(&mut rng, params, shape)? else { continue };
        if params.require_stable && !is_stable(&pair)?.stable {
            continue;
        }
        return Ok(pair);
    }
    Err(Error::ExhaustedAttempts(params.max_attempts))
}

/// A random pair with no structure imposed: each slot is a random form,
/// kept with probability `density` (in percent). Sparse lower-triangular
/// draws are nilpotent; most others are not.
pub fn random_unstructured_pair(seed: u64, rank: usize, density: u32, lower_only: bool) -> Result<Pair> {
    let mut rng = attempt_rng(seed, 0);
    let twists = random_twists(&mut rng, rank, (-3, 3));
    let l = rng.gen_range(1..=4);
    let entries = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| {
                    let keep = rng.gen_range(0..100) < density && (!lower_only || i > j);
                    if keep {
                        random_form(&mut rng, twists[i] + l - twists[j], 3)
                    } else {
                        Form::zero()
                    }
                })
                .collect()
        })
        .collect();
    HitchinPair::new(twists, l, entries)
}

/// `h⁰(F(m))` by linear algebra on sections of `E(m)`: a section lies in the
/// saturated `F` iff every maximal minor of `[B | v]` vanishes.
pub fn h0(f: &SubbundleBasis<Rational>, m: i64) -> Result<usize> {
    if !f.is_saturated() {
        return Err(Error::NotSaturated);
    }
    let ambient = f.ambient_twists();
    let k = f.rank();
    let r = ambient.len();
    // unknowns: coefficients of v_i of degree a_i + m
    let mut unknowns = Vec::new();
    for (i, a) in ambient.iter().enumerate() {
        for e in 0..=(a + m).max(-1) {
            unknowns.push((i, e as usize));
        }
    }
    let n = unknowns.len();
    if n == 0 {
        return Ok(0);
    }
    if k == r {
        return Ok(n);
    }
    let b = f.basis();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for sel in crate::polymat::combinations(r, k + 1) {
        // expand along the v column: Σ ± v_i det(B without row i)
        let cofactors: Vec<(usize, Form)> = sel
            .iter()
            .enumerate()
            .map(|(pos, &i)| {
                let others: Vec<usize> = sel.iter().copied().filter(|&x| x != i).collect();
                let minor: Vec<Vec<Form>> = others.iter().map(|&o| b.entries()[o].clone()).collect();
                let d = laplace_det(&minor);
                let sign = if (pos + k).is_multiple_of(2) { 1 } else { -1 };
                (i, d.scale(&q(sign)))
            })
            .collect();
        let out_deg = cofactors
            .iter()
            .filter_map(|(i, c)| c.degree().map(|d| d as i64 + ambient[*i] + m))
            .max();
        let Some(out_deg) = out_deg else { continue };
        if out_deg < 0 {
            continue;
        }
        let mut eqs = vec![vec![q(0); n]; out_deg as usize + 1];
        for (u, &(i, e)) in unknowns.iter().enumerate() {
            for (ci, c) in &cofactors {
                if *ci != i || c.is_zero() {
                    continue;
                }
                for (pos, coeff) in c.coeffs().iter().enumerate() {
                    eqs[pos + e][u] = eqs[pos + e][u].clone() + coeff.clone();
                }
            }
        }
        rows.extend(eqs);
    }
    Ok(n - linalg::rank(&rows, n))
}

/// `h⁰(F(m))` for `m = 0..=m_max`.
pub fn h0_profile(f: &SubbundleBasis<Rational>, m_max: i64) -> Result<Vec<usize>> {
    (0..=m_max).map(|m| h0(f, m)).collect()
}

/// Splitting type recovered from second differences of `m ↦ h⁰(F(m))`:
/// the number of summands `O(b)` with `b = -m` is
/// `h⁰(m) - 2h⁰(m-1) + h⁰(m-2)`.
pub fn splitting_from_h0(f: &SubbundleBasis<Rational>) -> Result<Vec<i64>> {
    let k = f.rank();
    let top = f.ambient_twists()[0];
    let mut m = -top - 1;
    let (mut prev2, mut prev1) = (h0(f, m - 2)?, h0(f, m - 1)?);
    let mut out = Vec::new();
    while out.len() < k {
        if m > top + 200 {
            return Err(Error::Internal("h⁰ profile did not stabilize".into()));
        }
        let cur = h0(f, m)?;
        let count = cur + prev2 - 2 * prev1;
        out.extend(std::iter::repeat_n(-m, count));
        prev2 = prev1;
        prev1 = cur;
        m += 1;
    }
    Ok(out)
}

/// Nilpotency tested pointwise: `Φ(t, 1)^r = 0` at enough distinct rational
/// points that the degree-`rℓ` entries of `Φ^r` must vanish identically.
pub fn pointwise_nilpotency_oracle(pair: &Pair, samples: usize, seed: u64) -> bool {
    let r = pair.rank();
    let needed = samples.max(r * pair.l_degree().max(0) as usize + 1);
    let mut rng = attempt_rng(seed, 0);
    let mut points: Vec<Rational> = Vec::new();
    while points.len() < needed {
        let p = Rational::ratio(rng.gen_range(-50..=50), rng.gen_range(1..=7));
        if !points.contains(&p) {
            points.push(p);
        }
    }
    let one = q(1);
    points.iter().all(|t| {
        let m: Vec<Vec<Rational>> =
            (0..r).map(|i| (0..r).map(|j| pair.higgs().entry(i, j).eval(t, &one)).collect()).collect();
        let mut acc = m.clone();
        for _ in 1..r {
            acc = (0..r)
                .map(|i| (0..r).map(|j| (0..r).map(|k| m[i][k].clone() * acc[k][j].clone()).fold(q(0), |s, x| s + x)).collect())
                .collect();
        }
        acc.iter().flatten().all(|v: &Rational| *v == q(0))
    })
}
