//! Split bundles, Hitchin pairs, the Hitchin map and the `C*`-action.

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::forms::BinaryForm;
use crate::polymat::TwistedMatrix;
use crate::scalar::Scalar;

/// `E = ⊕ O(a_i)` with `a_1 ≥ … ≥ a_r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BundleModel {
    twists: Vec<i64>,
}

impl BundleModel {
    pub fn new(twists: Vec<i64>) -> Result<Self> {
        if twists.is_empty() {
            return Err(Error::InvalidBundle("a bundle needs at least one summand".into()));
        }
        if twists.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidBundle(format!("twists {twists:?} are not sorted descending")));
        }
        Ok(BundleModel { twists })
    }

    pub fn twists(&self) -> &[i64] {
        &self.twists
    }

    pub fn rank(&self) -> usize {
        self.twists.len()
    }

    pub fn degree(&self) -> i64 {
        self.twists.iter().sum()
    }

    pub fn twisted(&self, s: i64) -> Vec<i64> {
        self.twists.iter().map(|a| a + s).collect()
    }
}

/// Validation knobs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelConfig {
    /// Smallest accepted `ℓ = deg L`.
    pub min_l_degree: i64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { min_l_degree: 1 }
    }
}

/// A pair `(E, Φ)` with `Φ : E → E ⊗ O(ℓ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HitchinPair<T> {
    bundle: BundleModel,
    l_degree: i64,
    higgs: TwistedMatrix<T>,
}

/// Coefficients `e_1, …, e_r` of the characteristic polynomial
/// `det(λ - Φ) = λ^r - e_1 λ^(r-1) + … + (-1)^r e_r`; `e_k` has degree `kℓ`.
#[derive(Clone, Debug, PartialEq)]
pub struct HitchinImage<T> {
    pub coefficients: Vec<BinaryForm<T>>,
}

impl<T: Scalar> HitchinImage<T> {
    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|c| c.is_zero())
    }
}

impl<T: Scalar> HitchinPair<T> {
    pub fn new(twists: Vec<i64>, l_degree: i64, entries: Vec<Vec<BinaryForm<T>>>) -> Result<Self> {
        Self::validate(BundleModel::new(twists)?, l_degree, entries, ModelConfig::default())
    }

    /// Check every entry against the degree `a_i + ℓ - a_j` its slot requires.
    pub fn validate(
        bundle: BundleModel,
        l_degree: i64,
        entries: Vec<Vec<BinaryForm<T>>>,
        config: ModelConfig,
    ) -> Result<Self> {
        if l_degree < config.min_l_degree {
            return Err(Error::LineDegreeTooSmall { l: l_degree, min: config.min_l_degree });
        }
        let r = bundle.rank();
        if entries.len() != r || entries.iter().any(|row| row.len() != r) {
            return Err(Error::ShapeMismatch(format!("Higgs field must be {r}x{r}")));
        }
        let a = bundle.twists();
        for (i, row) in entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if let Some(d) = e.degree() {
                    let expected = a[i] + l_degree - a[j];
                    if d as i64 != expected {
                        return Err(Error::HolomorphyViolation { row: i, col: j, expected, found: d as i64 });
                    }
                }
            }
        }
        let higgs = TwistedMatrix::new(bundle.twisted(l_degree), a.to_vec(), entries)?;
        Ok(HitchinPair { bundle, l_degree, higgs })
    }

    pub fn from_matrix(bundle: BundleModel, l_degree: i64, higgs: TwistedMatrix<T>, config: ModelConfig) -> Result<Self> {
        if higgs.col_twists() != bundle.twists() || higgs.row_twists() != bundle.twisted(l_degree).as_slice() {
            return Err(Error::ShapeMismatch("Higgs twists do not match the bundle".into()));
        }
        Self::validate(bundle, l_degree, higgs.entries().to_vec(), config)
    }

    pub fn zero(bundle: BundleModel, l_degree: i64) -> Self {
        let higgs = TwistedMatrix::zero(bundle.twisted(l_degree), bundle.twists().to_vec());
        HitchinPair { bundle, l_degree, higgs }
    }

    pub fn bundle(&self) -> &BundleModel {
        &self.bundle
    }

    pub fn twists(&self) -> &[i64] {
        self.bundle.twists()
    }

    pub fn rank(&self) -> usize {
        self.bundle.rank()
    }

    pub fn degree(&self) -> i64 {
        self.bundle.degree()
    }

    pub fn l_degree(&self) -> i64 {
        self.l_degree
    }

    pub fn higgs(&self) -> &TwistedMatrix<T> {
        &self.higgs
    }

    /// `Φ^k : E → E ⊗ L^k` (identity for `k = 0`).
    pub fn power(&self, k: usize) -> TwistedMatrix<T> {
        let mut acc = TwistedMatrix::identity(self.twists());
        for step in 0..k {
            acc = self.higgs.shifted(step as i64 * self.l_degree).mul(&acc).expect("powers compose");
        }
        acc
    }

    /// Characteristic coefficients from power traces via Newton's identities.
    pub fn hitchin_map(&self) -> HitchinImage<T> {
        let r = self.rank();
        let traces: Vec<BinaryForm<T>> = (1..=r)
            .map(|k| {
                let m = self.power(k);
                (0..r).fold(BinaryForm::zero(), |acc, i| acc.checked_add(m.entry(i, i)).expect("trace degree"))
            })
            .collect();
        let mut e: Vec<BinaryForm<T>> = vec![BinaryForm::constant(T::one())];
        for k in 1..=r {
            let mut acc = BinaryForm::zero();
            for i in 1..=k {
                let term = &e[k - i] * &traces[i - 1];
                acc = if i % 2 == 1 { acc.checked_add(&term) } else { acc.checked_sub(&term) }
                    .expect("Newton identity terms share a degree");
            }
            e.push(acc.scale(&(T::one() / T::from_int(k as i64))));
        }
        HitchinImage { coefficients: e.split_off(1) }
    }

    /// Least `p ≥ 1` with `Φ^p = 0`.
    pub fn nilpotency_order(&self) -> Result<usize> {
        let mut acc = TwistedMatrix::identity(self.twists());
        for p in 1..=self.rank() {
            acc = self.higgs.shifted((p as i64 - 1) * self.l_degree).mul(&acc)?;
            if acc.is_zero() {
                return Ok(p);
            }
        }
        Err(Error::NotNilpotent)
    }

    pub fn is_nilpotent(&self) -> bool {
        self.nilpotency_order().is_ok()
    }

    /// `Φ^(r-1) ≠ 0` for a nilpotent `Φ`.
    pub fn is_regular(&self) -> bool {
        self.nilpotency_order().map(|p| p == self.rank()).unwrap_or(false)
    }

    /// The `C*`-action `(E, Φ) ↦ (E, λΦ)`.
    pub fn scale(&self, lambda: &T) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::ZeroScalar);
        }
        Ok(HitchinPair { bundle: self.bundle.clone(), l_degree: self.l_degree, higgs: self.higgs.scale(lambda) })
    }

    /// `(g ⊗ L)^{-1} Φ g` for an automorphism `g` of `E`.
    pub fn conjugate(&self, g: &TwistedMatrix<T>) -> Result<Self> {
        if g.row_twists() != self.twists() || g.col_twists() != self.twists() {
            return Err(Error::ShapeMismatch("gauge transformation must be an endomorphism of E".into()));
        }
        let gl_inv = g.inverse()?.shifted(self.l_degree);
        let higgs = gl_inv.mul(&self.higgs)?.mul(g)?;
        Ok(HitchinPair { bundle: self.bundle.clone(), l_degree: self.l_degree, higgs })
    }

    pub fn slope(&self) -> T {
        T::ratio(self.degree(), self.rank() as i64)
    }

    pub fn is_coprime(&self) -> bool {
        is_coprime(self.rank(), self.degree())
    }
}

/// `deg / rank` as an exact scalar.
pub fn slope<T: Scalar>(degree: i64, rank: usize) -> Result<T> {
    if rank == 0 {
        return Err(Error::ZeroRank);
    }
    Ok(T::ratio(degree, rank as i64))
}

pub fn is_coprime(rank: usize, degree: i64) -> bool {
    (rank as i64).gcd(&degree) == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Form, Rational};
    use num_traits::Zero;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn fixture_a() -> HitchinPair<Rational> {
        let z = Form::zero;
        HitchinPair::new(vec![1, 0, -1], 2, vec![vec![z(), z(), z()], vec![Form::x(), z(), z()], vec![z(), Form::y(), z()]])
            .unwrap()
    }

    fn fixture_b() -> HitchinPair<Rational> {
        let z = Form::zero;
        HitchinPair::new(vec![0, 0, -1], 2, vec![vec![z(), z(), z()], vec![z(), z(), z()], vec![Form::x(), Form::y(), z()]])
            .unwrap()
    }

    #[test]
    fn zero_field_is_valid_and_nilpotent() {
        let p = HitchinPair::<Rational>::zero(BundleModel::new(vec![2, 0, -3]).unwrap(), 1);
        assert!(p.hitchin_map().is_zero());
        assert_eq!(p.nilpotency_order(), Ok(1));
    }

    #[test]
    fn negative_degree_slot_must_be_zero() {
        let cfg = ModelConfig { min_l_degree: 0 };
        let bundle = BundleModel::new(vec![1, 0]).unwrap();
        let bad = vec![vec![Form::zero(), Form::zero()], vec![Form::x(), Form::zero()]];
        let err = HitchinPair::validate(bundle.clone(), 0, bad, cfg).unwrap_err();
        assert_eq!(err, Error::HolomorphyViolation { row: 1, col: 0, expected: -1, found: 1 });
        let good = vec![vec![Form::zero(), Form::x()], vec![Form::zero(), Form::zero()]];
        assert!(HitchinPair::validate(bundle, 0, good, cfg).is_ok());
    }

    #[test]
    fn wrong_degree_is_reported_with_position() {
        let bad = vec![vec![Form::zero(), Form::zero()], vec![Form::x() * Form::x(), Form::zero()]];
        let err = HitchinPair::new(vec![2, 0], 1, bad).unwrap_err();
        assert_eq!(err, Error::HolomorphyViolation { row: 1, col: 0, expected: -1, found: 2 });
    }

    #[test]
    fn small_line_degree_rejected_by_default() {
        let err = HitchinPair::<Rational>::new(vec![0], 0, vec![vec![Form::zero()]]).unwrap_err();
        assert_eq!(err, Error::LineDegreeTooSmall { l: 0, min: 1 });
    }

    #[test]
    fn unsorted_twists_rejected() {
        assert!(matches!(BundleModel::new(vec![0, 1]), Err(Error::InvalidBundle(_))));
        assert!(matches!(BundleModel::new(vec![]), Err(Error::InvalidBundle(_))));
    }

    #[test]
    fn fixture_orders() {
        assert!(fixture_a().hitchin_map().is_zero());
        assert_eq!(fixture_a().nilpotency_order(), Ok(3));
        assert!(fixture_a().is_regular());
        assert_eq!(fixture_b().nilpotency_order(), Ok(2));
        assert!(!fixture_b().is_regular());
    }

    #[test]
    fn two_by_two_characteristic_coefficients() {
        let p = HitchinPair::new(vec![0, 0], 1, vec![vec![Form::zero(), Form::x()], vec![Form::y(), Form::zero()]])
            .unwrap();
        let h = p.hitchin_map();
        assert!(h.coefficients[0].is_zero());
        assert_eq!(h.coefficients[1], -&(Form::x() * Form::y()));
        assert_eq!(p.nilpotency_order(), Err(Error::NotNilpotent));
    }

    #[test]
    fn slopes() {
        assert_eq!(slope::<Rational>(0, 3), Ok(q(0)));
        assert_eq!(slope::<Rational>(-1, 3), Ok(Rational::ratio(-1, 3)));
        assert_eq!(slope::<Rational>(-2, 2), Ok(q(-1)));
        assert_eq!(slope::<Rational>(1, 0), Err(Error::ZeroRank));
        assert_eq!(fixture_b().slope(), Rational::ratio(-1, 3));
    }

    #[test]
    fn scaling() {
        let b = fixture_b();
        assert_eq!(b.scale(&q(1)).unwrap(), b);
        let b2 = b.scale(&q(2)).unwrap();
        assert_eq!(b2.higgs().entry(2, 0), &Form::x().scale(&q(2)));
        assert_eq!(b2.higgs().entry(2, 1), &Form::y().scale(&q(2)));
        assert_eq!(b.scale(&q(0)), Err(Error::ZeroScalar));
    }

    #[test]
    fn conjugation_preserves_characteristic_coefficients() {
        let p = HitchinPair::new(vec![0, 0], 1, vec![vec![Form::x(), Form::y()], vec![Form::y(), Form::zero()]]).unwrap();
        let one = Form::constant(q(1));
        let g = TwistedMatrix::new(vec![0, 0], vec![0, 0], vec![vec![one.clone(), Form::constant(q(2))], vec![Form::zero(), one]])
            .unwrap();
        let c = p.conjugate(&g).unwrap();
        assert_eq!(c.hitchin_map(), p.hitchin_map());
    }
}
