//! Exact polynomial arithmetic.
//!
//! Three value types live here:
//!
//! * [`Poly`], a dense univariate polynomial. It is the affine-chart picture of
//!   a form (`t = X/Y`) and the entry type of [`crate::polymat::PolyMatrix`].
//! * [`BinaryForm`], a homogeneous polynomial in `X, Y` with a declared degree.
//!   The coefficient of `X^k Y^(d-k)` sits at index `k`, so the coefficient
//!   vector of a form is exactly its dehomogenization `f(t, 1)`.
//! * [`Laurent`], finite Laurent series in the flow parameter `z`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense univariate polynomial with trailing zeros trimmed; the zero
/// polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    pub fn monomial(c: T, power: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![T::zero(); power + 1];
        coeffs[power] = c;
        Poly { coeffs }
    }

    /// The affine coordinate `t`.
    pub fn t() -> Self {
        Poly::monomial(T::one(), 1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, t: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * t.clone() + c.clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![T::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Euclidean division. Panics when `divisor` is zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree() else {
            return (Poly::zero(), Poly::zero());
        };
        if nd < dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = rem[k + dd].clone() / lead.clone();
            if c.is_zero() {
                continue;
            }
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] = rem[k + i].clone() - c.clone() * d.clone();
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn make_monic(&self) -> Self {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => {
                let inv = T::one() / l.clone();
                self.scale(&inv)
            }
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.make_monic()
    }
}

impl<T: Scalar> Zero for Poly<T> {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<T: Scalar> One for Poly<T> {
    fn one() -> Self {
        Poly::constant(T::one())
    }
}

impl<T: Scalar> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Scalar> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Scalar> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<T: Scalar> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

macro_rules! owned_binop {
    ($ty:ident, $tr:ident, $m:ident) => {
        impl<T: Scalar> $tr for $ty<T> {
            type Output = $ty<T>;
            fn $m(self, rhs: $ty<T>) -> $ty<T> {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_binop!(Poly, Add, add);
owned_binop!(Poly, Sub, sub);
owned_binop!(Poly, Mul, mul);

impl<T: Scalar> Neg for Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        -&self
    }
}

impl<T: Scalar> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.coeffs.iter().enumerate().rev().map(|(k, c)| (c, monomial_name("t", k, "", 0))))
    }
}

fn monomial_name(x: &str, px: usize, y: &str, py: usize) -> String {
    let mut parts = Vec::new();
    for (name, p) in [(x, px), (y, py)] {
        match p {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{p}")),
        }
    }
    parts.join("*")
}

fn write_terms<'a, T: Scalar>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (&'a T, String)>,
) -> fmt::Result {
    let mut first = true;
    for (c, mono) in terms {
        if c.is_zero() {
            continue;
        }
        let (neg, abs) = if *c < T::zero() { (true, -c.clone()) } else { (false, c.clone()) };
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        first = false;
        match (abs.is_one(), mono.is_empty()) {
            (_, true) => write!(f, "{abs}")?,
            (true, false) => write!(f, "{mono}")?,
            (false, false) => write!(f, "{abs}*{mono}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// Homogeneous binary form. The zero form carries no degree and fits every
/// slot; a nonzero form always has `degree + 1` stored coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryForm<T> {
    degree: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> BinaryForm<T> {
    /// Build from `degree + 1` coefficients, `coeffs[k]` multiplying
    /// `X^k Y^(degree-k)`. All-zero input gives the zero form.
    pub fn new(degree: usize, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != degree + 1 {
            return Err(Error::CoefficientCount { expected: degree + 1, found: coeffs.len() });
        }
        if coeffs.iter().all(|c| c.is_zero()) {
            return Ok(BinaryForm::zero());
        }
        Ok(BinaryForm { degree, coeffs })
    }

    pub fn from_ints(degree: usize, coeffs: &[i64]) -> Result<Self> {
        BinaryForm::new(degree, coeffs.iter().map(|&c| T::from_int(c)).collect())
    }

    pub fn constant(c: T) -> Self {
        BinaryForm::monomial(c, 0, 0)
    }

    /// `c * X^px * Y^py`.
    pub fn monomial(c: T, px: usize, py: usize) -> Self {
        if c.is_zero() {
            return BinaryForm::zero();
        }
        let mut coeffs = vec![T::zero(); px + py + 1];
        coeffs[px] = c;
        BinaryForm { degree: px + py, coeffs }
    }

    pub fn x() -> Self {
        BinaryForm::monomial(T::one(), 1, 0)
    }

    pub fn y() -> Self {
        BinaryForm::monomial(T::one(), 0, 1)
    }

    /// `None` for the zero form.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.degree)
        }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        match (self.degree(), other.degree()) {
            (None, _) => Ok(other.clone()),
            (_, None) => Ok(self.clone()),
            (Some(a), Some(b)) if a != b => Err(Error::DegreeMismatch { left: a, right: b }),
            (Some(a), Some(_)) => BinaryForm::new(
                a,
                self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x.clone() + y.clone()).collect(),
            ),
        }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() || self.is_zero() {
            return BinaryForm::zero();
        }
        BinaryForm { degree: self.degree, coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    /// Exact quotient `self / divisor`.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        let Some(db) = divisor.degree() else {
            return Err(Error::InexactDivision);
        };
        let Some(da) = self.degree() else {
            return Ok(BinaryForm::zero());
        };
        if da < db {
            return Err(Error::InexactDivision);
        }
        let (q, r) = self.dehomogenize().div_rem(&divisor.dehomogenize());
        if !r.is_zero() {
            return Err(Error::InexactDivision);
        }
        BinaryForm::homogenize(&q, da - db).map_err(|_| Error::InexactDivision)
    }

    /// Largest `e` with `Y^e` dividing the form.
    fn y_order(&self) -> usize {
        self.degree - self.dehomogenize().degree().unwrap_or(0)
    }

    /// Greatest common divisor, normalized so that the highest nonzero
    /// `X`-power coefficient is 1 (monic in `X` unless `Y` divides it).
    pub fn gcd(&self, other: &Self) -> Self {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return BinaryForm::zero(),
            (true, false) => return other.normalized(),
            (false, true) => return self.normalized(),
            _ => {}
        }
        let ey = self.y_order().min(other.y_order());
        let g = self.dehomogenize().gcd(&other.dehomogenize());
        let d = g.degree().unwrap_or(0);
        BinaryForm::homogenize(&g, d + ey).expect("degree fits")
    }

    /// Scale so the highest nonzero coefficient is 1.
    pub fn normalized(&self) -> Self {
        match self.coeffs.iter().rev().find(|c| !c.is_zero()) {
            None => BinaryForm::zero(),
            Some(l) => self.scale(&(T::one() / l.clone())),
        }
    }

    pub fn eval(&self, x: &T, y: &T) -> T {
        let mut acc = T::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = acc + c.clone() * pow(x, k) * pow(y, self.degree - k);
        }
        acc
    }

    /// The polynomial `f(t, 1)`.
    pub fn dehomogenize(&self) -> Poly<T> {
        Poly::new(self.coeffs.clone())
    }

    /// `Y^degree p(X/Y)`; fails if `p` has larger degree.
    pub fn homogenize(p: &Poly<T>, degree: usize) -> Result<Self> {
        match p.degree() {
            None => Ok(BinaryForm::zero()),
            Some(d) if d > degree => Err(Error::CoefficientCount { expected: degree + 1, found: d + 1 }),
            Some(_) => {
                let mut coeffs = p.coeffs().to_vec();
                coeffs.resize(degree + 1, T::zero());
                Ok(BinaryForm { degree, coeffs })
            }
        }
    }

    /// Same as [`BinaryForm::homogenize`] with a signed target degree; a
    /// negative degree admits only the zero polynomial.
    pub fn homogenize_signed(p: &Poly<T>, degree: i64) -> Result<Self> {
        if degree < 0 {
            return if p.is_zero() {
                Ok(BinaryForm::zero())
            } else {
                Err(Error::CoefficientCount { expected: 0, found: p.coeffs().len() })
            };
        }
        BinaryForm::homogenize(p, degree as usize)
    }
}

fn pow<T: Scalar>(x: &T, k: usize) -> T {
    (0..k).fold(T::one(), |acc, _| acc * x.clone())
}

impl<T: Scalar> Zero for BinaryForm<T> {
    fn zero() -> Self {
        BinaryForm { degree: 0, coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Panics on a degree mismatch; use [`BinaryForm::checked_add`] when the
/// degrees are not known to agree.
impl<T: Scalar> Add for BinaryForm<T> {
    type Output = BinaryForm<T>;
    fn add(self, rhs: BinaryForm<T>) -> BinaryForm<T> {
        self.checked_add(&rhs).expect("adding forms of different degree")
    }
}

impl<T: Scalar> Mul for &BinaryForm<T> {
    type Output = BinaryForm<T>;
    fn mul(self, rhs: &BinaryForm<T>) -> BinaryForm<T> {
        if self.is_zero() || rhs.is_zero() {
            return BinaryForm::zero();
        }
        let p = &self.dehomogenize() * &rhs.dehomogenize();
        BinaryForm::homogenize(&p, self.degree + rhs.degree).expect("product degree")
    }
}

impl<T: Scalar> Mul for BinaryForm<T> {
    type Output = BinaryForm<T>;
    fn mul(self, rhs: BinaryForm<T>) -> BinaryForm<T> {
        &self * &rhs
    }
}

impl<T: Scalar> Neg for &BinaryForm<T> {
    type Output = BinaryForm<T>;
    fn neg(self) -> BinaryForm<T> {
        BinaryForm { degree: self.degree, coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

impl<T: Scalar> One for BinaryForm<T> {
    fn one() -> Self {
        BinaryForm::constant(T::one())
    }
}

impl<T: Scalar> Neg for BinaryForm<T> {
    type Output = BinaryForm<T>;
    fn neg(self) -> BinaryForm<T> {
        -&self
    }
}

impl<T: Scalar> fmt::Display for BinaryForm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree;
        write_terms(f, self.coeffs.iter().enumerate().rev().map(|(k, c)| (c, monomial_name("X", k, "Y", d - k))))
    }
}

/// Finite Laurent series `sum c_e z^e`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent<C> {
    terms: BTreeMap<i64, C>,
}

impl<C: Clone + Zero> Laurent<C> {
    pub fn monomial(coeff: C, exponent: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exponent, coeff);
        }
        Laurent { terms }
    }

    pub fn terms(&self) -> &BTreeMap<i64, C> {
        &self.terms
    }

    pub fn coeff(&self, exponent: i64) -> C {
        self.terms.get(&exponent).cloned().unwrap_or_else(C::zero)
    }

    pub fn exponents(&self) -> impl Iterator<Item = i64> + '_ {
        self.terms.keys().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }
}

impl<C: Clone + Zero> Zero for Laurent<C> {
    fn zero() -> Self {
        Laurent { terms: BTreeMap::new() }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<C: Clone + Zero> Add for Laurent<C> {
    type Output = Laurent<C>;
    fn add(self, rhs: Laurent<C>) -> Laurent<C> {
        let mut terms = self.terms;
        for (e, c) in rhs.terms {
            let sum = match terms.remove(&e) {
                Some(prev) => prev + c,
                None => c,
            };
            if !sum.is_zero() {
                terms.insert(e, sum);
            }
        }
        Laurent { terms }
    }
}

impl<C: Clone + Zero + Mul<Output = C>> Mul for Laurent<C> {
    type Output = Laurent<C>;
    fn mul(self, rhs: Laurent<C>) -> Laurent<C> {
        let mut out = Laurent::zero();
        for (ea, a) in &self.terms {
            for (eb, b) in &rhs.terms {
                out = out + Laurent::monomial(a.clone() * b.clone(), ea + eb);
            }
        }
        out
    }
}

impl<C: Clone + Zero + fmt::Display> fmt::Display for Laurent<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("z^{e}*({c})")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
