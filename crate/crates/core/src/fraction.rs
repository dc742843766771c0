//! Quotients of truncated series: the computational stand-in for the
//! fraction field where eigencoordinates live.
//!
//! Equality is cross-multiplied equality of truncations: a/b = c/d iff
//! trunc(a*d) = trunc(c*b) at the common order. This is exact for
//! identities of honest rational functions because truncation is a ring
//! homomorphism; what it cannot see are coefficients beyond the order, so
//! the useful precision of a fraction drops with the valuation of its
//! denominator.
//!
//! Denominators are kept as a multiset of series factors rather than one
//! multiplied-out series. The factors arising in eigencoordinate chains are
//! heavily shared (differences of diagonal entries), and cancelling the
//! common factors on addition keeps denominator valuations near their
//! structural minimum instead of doubling on every sum. Operations fail
//! with `ZeroDenominator` when a denominator product still truncates away
//! entirely; callers fix that by rebuilding inputs at a larger order.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{AlgebraError, Result};
use crate::rational::Rational;
use crate::scalar::{ExpScalar, FieldScalar, Scalar};
use crate::series::TruncSeries;

#[derive(Clone)]
pub struct SeriesFraction {
    num: TruncSeries,
    /// Non-unit denominator factors, canonically sorted.
    den_factors: Vec<TruncSeries>,
    /// Cached product of the factors; nonzero by construction.
    den_product: TruncSeries,
}

impl SeriesFraction {
    pub fn new(num: TruncSeries, den: TruncSeries) -> Result<Self> {
        if num.num_vars() != den.num_vars() || num.order() != den.order() {
            return Err(AlgebraError::ShapeMismatch(format!(
                "fraction parts disagree: ({}, {}) vs ({}, {})",
                num.num_vars(),
                num.order(),
                den.num_vars(),
                den.order()
            )));
        }
        Self::from_parts(num, vec![den])
    }

    pub fn from_series(num: TruncSeries) -> Self {
        let den_product = num.one_like();
        SeriesFraction {
            num,
            den_factors: Vec::new(),
            den_product,
        }
    }

    /// Normalizing constructor: clears unit factors into the numerator,
    /// cancels factors that divide the numerator exactly, drops everything
    /// on a zero numerator, sorts factors, and validates that the
    /// denominator survives truncation.
    fn from_parts(mut num: TruncSeries, factors: Vec<TruncSeries>) -> Result<Self> {
        let mut kept = Vec::with_capacity(factors.len());
        for f in factors {
            if f.is_zero_series() {
                return Err(AlgebraError::ZeroDenominator(
                    "fraction with denominator zero at the available order".into(),
                ));
            }
            if num_traits::Zero::is_zero(&f.constant_term()) {
                if let Some(quotient) = num.exact_div(&f) {
                    // exact cancellation keeps the cross-multiplied value
                    num = quotient;
                } else {
                    kept.push(f);
                }
            } else {
                // unit factor: fold its inverse into the numerator
                num = num.checked_mul(&f.invert_unit()?)?;
            }
        }
        if num.is_zero_series() {
            let den_product = num.one_like();
            return Ok(SeriesFraction {
                num,
                den_factors: Vec::new(),
                den_product,
            });
        }
        kept.sort_by(|a, b| a.canonical_cmp(b));
        let mut den_product = num.one_like();
        for f in &kept {
            den_product = den_product.checked_mul(f)?;
            if den_product.is_zero_series() {
                return Err(AlgebraError::ZeroDenominator(
                    "denominator product truncates to zero; increase the truncation order".into(),
                ));
            }
        }
        Ok(SeriesFraction {
            num,
            den_factors: kept,
            den_product,
        })
    }

    pub fn num(&self) -> &TruncSeries {
        &self.num
    }

    /// The multiplied-out denominator.
    pub fn den(&self) -> &TruncSeries {
        &self.den_product
    }

    pub fn num_vars(&self) -> usize {
        self.num.num_vars()
    }

    pub fn order(&self) -> u32 {
        self.num.order()
    }

    /// True when the denominator is 1.
    pub fn is_polynomial(&self) -> bool {
        self.den_factors.is_empty()
    }

    /// The underlying series, when the denominator is 1.
    pub fn as_series(&self) -> Option<&TruncSeries> {
        if self.is_polynomial() {
            Some(&self.num)
        } else {
            None
        }
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.num_vars() != other.num_vars() || self.order() != other.order() {
            return Err(AlgebraError::ShapeMismatch(format!(
                "fractions of shape ({}, {}) vs ({}, {})",
                self.num_vars(),
                self.order(),
                other.num_vars(),
                other.order()
            )));
        }
        Ok(())
    }

    /// Splits the two factor multisets into (common, only-self, only-other).
    fn factor_split(&self, other: &Self) -> (Vec<TruncSeries>, Vec<TruncSeries>, Vec<TruncSeries>) {
        let mut common = Vec::new();
        let mut mine = Vec::new();
        let mut theirs: Vec<Option<&TruncSeries>> = other.den_factors.iter().map(Some).collect();
        for f in &self.den_factors {
            match theirs
                .iter_mut()
                .find(|slot| slot.map(|g| g == f).unwrap_or(false))
            {
                Some(slot) => {
                    common.push(f.clone());
                    *slot = None;
                }
                None => mine.push(f.clone()),
            }
        }
        let rest = theirs.into_iter().flatten().cloned().collect();
        (common, mine, rest)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        if self.num.is_zero_series() {
            return Ok(other.clone());
        }
        if other.num.is_zero_series() {
            return Ok(self.clone());
        }
        let (common, mine, theirs) = self.factor_split(other);
        // a / (C * M) + c / (C * T) = (a * PT + c * PM) / (C * M * T)
        let mut cross_mine = self.num.clone();
        for f in &theirs {
            cross_mine = cross_mine.checked_mul(f)?;
        }
        let mut cross_theirs = other.num.clone();
        for f in &mine {
            cross_theirs = cross_theirs.checked_mul(f)?;
        }
        let num = cross_mine.checked_add(&cross_theirs)?;
        let mut factors = common;
        factors.extend(mine);
        factors.extend(theirs);
        Self::from_parts(num, factors)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.negated())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let num = self.num.checked_mul(&other.num)?;
        let mut factors = self.den_factors.clone();
        factors.extend(other.den_factors.iter().cloned());
        Self::from_parts(num, factors)
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        if other.num.is_zero_series() {
            return Err(AlgebraError::ZeroDenominator(
                "division by a zero fraction".into(),
            ));
        }
        let mut num = self.num.clone();
        for f in &other.den_factors {
            num = num.checked_mul(f)?;
        }
        let mut factors = self.den_factors.clone();
        factors.push(other.num.clone());
        Self::from_parts(num, factors)
    }

    pub fn negated(&self) -> Self {
        SeriesFraction {
            num: self.num.negated(),
            den_factors: self.den_factors.clone(),
            den_product: self.den_product.clone(),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.num.is_zero_series() {
            return Err(AlgebraError::ZeroDenominator(
                "inverse of a zero fraction".into(),
            ));
        }
        Self::from_parts(self.den_product.clone(), vec![self.num.clone()])
    }

    /// Cross-multiplied equality at the available order.
    pub fn eq_cross(&self, other: &Self) -> bool {
        if self.num_vars() != other.num_vars() || self.order() != other.order() {
            return false;
        }
        // cancel shared factors first; they are exactly equal by
        // construction so this is sound and keeps the products low-degree
        let (_, mine, theirs) = self.factor_split(other);
        let mut lhs = self.num.clone();
        for f in &theirs {
            lhs = lhs.mul(f);
        }
        let mut rhs = other.num.clone();
        for f in &mine {
            rhs = rhs.mul(f);
        }
        lhs == rhs
    }

    /// Deterministic ordering for canonical sorting.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        if self.eq_cross(other) {
            return Ordering::Equal;
        }
        self.num
            .canonical_cmp(&other.num)
            .then_with(|| self.den_product.canonical_cmp(&other.den_product))
    }
}

impl PartialEq for SeriesFraction {
    fn eq(&self, other: &Self) -> bool {
        self.eq_cross(other)
    }
}

impl fmt::Debug for SeriesFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?}) / ({:?})", self.num, self.den_product)
        }
    }
}

impl Scalar for SeriesFraction {
    fn zero_like(&self) -> Self {
        SeriesFraction::from_series(self.num.zero_like())
    }
    fn one_like(&self) -> Self {
        SeriesFraction::from_series(self.num.one_like())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero_series()
    }
    fn add(&self, rhs: &Self) -> Self {
        self.checked_add(rhs)
            .expect("fraction addition failed; the truncation order is too small")
    }
    fn neg(&self) -> Self {
        self.negated()
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.checked_mul(rhs)
            .expect("fraction multiplication failed; the truncation order is too small")
    }
    fn embed_rational(&self, q: &Rational) -> Self {
        SeriesFraction::from_series(self.num.embed_rational(q))
    }
    fn scale(&self, q: &Rational) -> Self {
        if num_traits::Zero::is_zero(q) {
            return self.zero_like();
        }
        SeriesFraction {
            num: self.num.scaled(q),
            den_factors: self.den_factors.clone(),
            den_product: self.den_product.clone(),
        }
    }
}

impl FieldScalar for SeriesFraction {
    fn invert(&self) -> Result<Self> {
        self.inverse()
    }
    fn div(&self, rhs: &Self) -> Result<Self> {
        self.checked_div(rhs)
    }
}

impl ExpScalar for SeriesFraction {
    /// Exponential of a fraction that reduces to a series with zero
    /// constant term. Fractions with genuine denominators have no
    /// exponential here.
    fn exp(&self) -> Result<Self> {
        match self.as_series() {
            Some(s) => Ok(SeriesFraction::from_series(s.exp()?)),
            None => Err(AlgebraError::Unsupported(
                "exp of a fraction with a non-unit denominator".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn t(i: usize) -> TruncSeries {
        TruncSeries::var(2, 6, i).unwrap()
    }

    #[test]
    fn cross_multiplied_equality() {
        // t1/t2 == (t1*t1)/(t1*t2)
        let a = SeriesFraction::new(t(0), t(1)).unwrap();
        let b = SeriesFraction::new(
            t(0).checked_mul(&t(0)).unwrap(),
            t(0).checked_mul(&t(1)).unwrap(),
        )
        .unwrap();
        assert_eq!(a, b);
        let c = SeriesFraction::new(t(1), t(0)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn equality_is_equivalence_on_samples() {
        let one = TruncSeries::one(2, 6);
        let x = SeriesFraction::new(t(0), one.checked_add(&t(1)).unwrap()).unwrap();
        let y = SeriesFraction::new(
            t(0).checked_mul(&t(1)).unwrap(),
            t(1).checked_mul(&one.checked_add(&t(1)).unwrap()).unwrap(),
        )
        .unwrap();
        let z = SeriesFraction::new(
            t(0).checked_mul(&t(0)).unwrap(),
            t(0).checked_mul(&one.checked_add(&t(1)).unwrap()).unwrap(),
        )
        .unwrap();
        assert_eq!(x, x);
        assert_eq!(x, y);
        assert_eq!(y, x);
        assert_eq!(y, z);
        assert_eq!(x, z);
    }

    #[test]
    fn arithmetic() {
        let half = SeriesFraction::from_series(TruncSeries::constant(2, 6, rat(1, 2)));
        let t1 = SeriesFraction::from_series(t(0));
        let q = t1.checked_div(&half).unwrap();
        assert_eq!(q, SeriesFraction::from_series(t(0).scaled(&rat_int(2))));
        // (t1/t2) * (t2/t1) = 1
        let a = SeriesFraction::new(t(0), t(1)).unwrap();
        let b = SeriesFraction::new(t(1), t(0)).unwrap();
        assert_eq!(a.checked_mul(&b).unwrap(), half.one_like());
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(SeriesFraction::new(t(0), TruncSeries::zero(2, 6)).is_err());
        let zero = SeriesFraction::from_series(TruncSeries::zero(2, 6));
        let t1 = SeriesFraction::from_series(t(0));
        assert!(t1.checked_div(&zero).is_err());
        assert!(zero.inverse().is_err());
    }

    #[test]
    fn unit_denominators_are_cleared() {
        let one_plus = TruncSeries::one(2, 6).checked_add(&t(0)).unwrap();
        let f = SeriesFraction::new(t(1), one_plus.clone()).unwrap();
        assert!(f.is_polynomial());
        assert_eq!(
            f.num(),
            &t(1).checked_mul(&one_plus.invert_unit().unwrap()).unwrap()
        );
    }

    #[test]
    fn shared_factors_cancel_on_addition() {
        // x/t1 + y/t1 keeps denominator valuation 1, and
        // x/t1 + y/(t1 t2) keeps it at 2, not 3
        let x = SeriesFraction::new(t(1), t(0)).unwrap();
        let y = SeriesFraction::new(TruncSeries::one(2, 6), t(0)).unwrap();
        let sum = x.checked_add(&y).unwrap();
        assert_eq!(sum.den().valuation(), Some(1));
        let z = SeriesFraction::new(TruncSeries::one(2, 6), t(0))
            .unwrap()
            .checked_div(&SeriesFraction::from_series(t(1)))
            .unwrap();
        let sum2 = x.checked_add(&z).unwrap();
        assert!(sum2.den().valuation().unwrap() <= 2);
        // value is correct: (t2^2 + 1) / (t1 t2) against cross-check
        let expect = SeriesFraction::new(
            t(1).checked_mul(&t(1)).unwrap().checked_add(&TruncSeries::one(2, 6)).unwrap(),
            t(0).checked_mul(&t(1)).unwrap(),
        )
        .unwrap();
        assert_eq!(sum2, expect);
    }

    #[test]
    fn deep_chains_do_not_collapse() {
        // sum of six fractions over the same factor with interleaved
        // divisions stays well within order 6
        let mut acc = SeriesFraction::from_series(TruncSeries::one(2, 6));
        let d = SeriesFraction::new(TruncSeries::one(2, 6), t(0)).unwrap();
        for _ in 0..6 {
            acc = acc.checked_add(&d).unwrap();
            acc = acc.checked_div(&d).unwrap();
        }
        assert!(acc.den().valuation().unwrap_or(0) <= 6);
    }
}
