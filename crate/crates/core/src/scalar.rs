//! Scalar abstraction shared by matrices and elimination kernels.
//!
//! Truncated series carry their shape (variable count and truncation order)
//! in the value, so zero and one cannot be built out of thin air; every
//! constructor here takes a witness value to copy the shape from. Shape
//! mismatches inside arithmetic are programming errors and panic; the
//! fallible module-level entry points validate shapes up front.

use std::fmt::Debug;

use crate::error::Result;
use crate::rational::Rational;

/// Commutative ring operations with shape-aware constants.
pub trait Scalar: Clone + PartialEq + Debug + Send + Sync + Sized {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// Embeds a rational constant using `self` as the shape witness.
    fn embed_rational(&self, q: &Rational) -> Self;

    /// Multiplies by a rational constant.
    fn scale(&self, q: &Rational) -> Self {
        self.mul(&self.embed_rational(q))
    }
}

/// Scalars supporting exact division. Division may still fail for values
/// that are not invertible at the available truncation order.
pub trait FieldScalar: Scalar {
    fn invert(&self) -> Result<Self>;

    fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.invert()?))
    }
}

/// Scalars with an exponential (truncated series with zero constant term,
/// or the numeric backend).
pub trait ExpScalar: Scalar {
    fn exp(&self) -> Result<Self>;
}

impl Scalar for Rational {
    fn zero_like(&self) -> Self {
        num_traits::Zero::zero()
    }
    fn one_like(&self) -> Self {
        num_traits::One::one()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn embed_rational(&self, q: &Rational) -> Self {
        q.clone()
    }
}

impl FieldScalar for Rational {
    fn invert(&self) -> Result<Self> {
        if num_traits::Zero::is_zero(self) {
            return Err(crate::error::AlgebraError::ZeroDenominator(
                "inverse of zero rational".into(),
            ));
        }
        Ok(self.recip())
    }
}
