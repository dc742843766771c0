//! Truncated multivariate power series over exact rationals.
//!
//! A value represents an element of Q[[t_1,...,t_m]] known modulo total
//! degree `order + 1`: every stored term has total degree <= `order`, zero
//! coefficients are never stored, and two series are equal iff they have the
//! same shape (`num_vars`, `order`) and the same term map.
//!
//! The truncation order is part of the value and checked on every binary
//! operation; mixing orders is an error, not an implicit coercion.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::error::{AlgebraError, Result};
use crate::rational::{inverse_factorial, random_rational, rat_int, Rational};
use crate::scalar::Scalar;

/// Exponent vector of one monomial; length equals `num_vars`.
pub type Exponents = Vec<u32>;

fn total_degree(exps: &[u32]) -> u32 {
    exps.iter().sum()
}

#[derive(Clone, PartialEq, Eq)]
pub struct TruncSeries {
    num_vars: usize,
    order: u32,
    terms: BTreeMap<Exponents, Rational>,
}

impl TruncSeries {
    pub fn zero(num_vars: usize, order: u32) -> Self {
        TruncSeries {
            num_vars,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(num_vars: usize, order: u32) -> Self {
        Self::constant(num_vars, order, rat_int(1))
    }

    pub fn constant(num_vars: usize, order: u32, value: Rational) -> Self {
        let mut s = Self::zero(num_vars, order);
        if !num_traits::Zero::is_zero(&value) {
            s.terms.insert(vec![0; num_vars], value);
        }
        s
    }

    /// The variable t_{index+1} as a series.
    pub fn var(num_vars: usize, order: u32, index: usize) -> Result<Self> {
        if index >= num_vars {
            return Err(AlgebraError::IndexOutOfBounds(format!(
                "variable index {index} with {num_vars} variables"
            )));
        }
        if order == 0 {
            return Ok(Self::zero(num_vars, order));
        }
        let mut exps = vec![0u32; num_vars];
        exps[index] = 1;
        Self::from_terms(num_vars, order, vec![(exps, rat_int(1))])
    }

    /// Builds a series from raw terms, dropping zero coefficients and
    /// rejecting exponents beyond the truncation order.
    pub fn from_terms(
        num_vars: usize,
        order: u32,
        terms: impl IntoIterator<Item = (Exponents, Rational)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (exps, coeff) in terms {
            if exps.len() != num_vars {
                return Err(AlgebraError::ShapeMismatch(format!(
                    "exponent vector of length {} in a series with {} variables",
                    exps.len(),
                    num_vars
                )));
            }
            if total_degree(&exps) > order {
                return Err(AlgebraError::ShapeMismatch(format!(
                    "term of total degree {} exceeds truncation order {}",
                    total_degree(&exps),
                    order
                )));
            }
            if coeff.is_zero() {
                continue;
            }
            let entry = map.entry(exps).or_insert_with(|| rat_int(0));
            *entry += coeff;
        }
        map.retain(|_, c: &mut Rational| !c.is_zero());
        Ok(TruncSeries {
            num_vars,
            order,
            terms: map,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(|| rat_int(0))
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&vec![0; self.num_vars])
    }

    pub fn is_zero_series(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest total degree among stored terms; `None` for the zero series.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(|e| total_degree(e)).min()
    }

    fn check_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.num_vars != other.num_vars || self.order != other.order {
            return Err(AlgebraError::ShapeMismatch(format!(
                "{what}: ({} vars, order {}) vs ({} vars, order {})",
                self.num_vars, self.order, other.num_vars, other.order
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other, "series_add")?;
        let mut terms = self.terms.clone();
        for (exps, coeff) in &other.terms {
            let entry = terms.entry(exps.clone()).or_insert_with(|| rat_int(0));
            *entry += coeff;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(TruncSeries {
            num_vars: self.num_vars,
            order: self.order,
            terms,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other, "series_sub")?;
        let mut terms = self.terms.clone();
        for (exps, coeff) in &other.terms {
            let entry = terms.entry(exps.clone()).or_insert_with(|| rat_int(0));
            *entry -= coeff;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(TruncSeries {
            num_vars: self.num_vars,
            order: self.order,
            terms,
        })
    }

    /// Convolution product with all terms of total degree > order discarded.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other, "series_mul")?;
        let order = self.order;
        let mut terms: BTreeMap<Exponents, Rational> = BTreeMap::new();
        // Iterate the sparser operand on the outside.
        let (a, b) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        for (ea, ca) in &a.terms {
            let da = total_degree(ea);
            for (eb, cb) in &b.terms {
                if da + total_degree(eb) > order {
                    continue;
                }
                let exps: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let entry = terms.entry(exps).or_insert_with(|| rat_int(0));
                *entry += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(TruncSeries {
            num_vars: self.num_vars,
            order,
            terms,
        })
    }

    pub fn negated(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), -c.clone()))
            .collect();
        TruncSeries {
            num_vars: self.num_vars,
            order: self.order,
            terms,
        }
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero(self.num_vars, self.order);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c * factor))
            .collect();
        TruncSeries {
            num_vars: self.num_vars,
            order: self.order,
            terms,
        }
    }

    /// Truncated power, by repeated multiplication.
    pub fn pow_trunc(&self, exp: u32) -> Self {
        let mut acc = Self::one(self.num_vars, self.order);
        for _ in 0..exp {
            acc = acc.checked_mul(self).expect("shape preserved");
        }
        acc
    }

    /// Truncated exponential: sum_{k<=order} self^k / k!.
    ///
    /// Exact to the truncation order because the argument has no constant
    /// term, so the omitted tail only contributes beyond the order.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(AlgebraError::NonzeroConstantTerm(
                "series_exp requires a zero constant term".into(),
            ));
        }
        let mut acc = Self::one(self.num_vars, self.order);
        let mut power = Self::one(self.num_vars, self.order);
        for k in 1..=u64::from(self.order) {
            power = power.checked_mul(self)?;
            if power.is_zero_series() {
                break;
            }
            acc = acc.checked_add(&power.scaled(&inverse_factorial(k)))?;
        }
        Ok(acc)
    }

    /// Formal partial derivative. The result is only known to `order - 1`.
    pub fn partial_derivative(&self, var_index: usize) -> Result<Self> {
        if var_index >= self.num_vars {
            return Err(AlgebraError::IndexOutOfBounds(format!(
                "derivative in variable {var_index} of a series with {} variables",
                self.num_vars
            )));
        }
        let new_order = self.order.saturating_sub(1);
        let mut terms = BTreeMap::new();
        for (exps, coeff) in &self.terms {
            let e = exps[var_index];
            if e == 0 {
                continue;
            }
            let mut lowered = exps.clone();
            lowered[var_index] = e - 1;
            terms.insert(lowered, coeff * rat_int(i64::from(e)));
        }
        Ok(TruncSeries {
            num_vars: self.num_vars,
            order: new_order,
            terms,
        })
    }

    /// Exact evaluation at a rational point.
    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.num_vars {
            return Err(AlgebraError::ShapeMismatch(format!(
                "evaluation point of length {} for {} variables",
                point.len(),
                self.num_vars
            )));
        }
        let mut total = rat_int(0);
        for (exps, coeff) in &self.terms {
            let mut value = coeff.clone();
            for (p, &e) in point.iter().zip(exps) {
                for _ in 0..e {
                    value *= p;
                }
            }
            total += value;
        }
        Ok(total)
    }

    /// Drops terms beyond `new_order` and lowers the order tag.
    pub fn truncated_to(&self, new_order: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| total_degree(e) <= new_order)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        TruncSeries {
            num_vars: self.num_vars,
            order: new_order.min(self.order),
            terms,
        }
    }

    /// Re-tags the series at a higher truncation order.
    ///
    /// Only valid when the value is an exact polynomial rather than the
    /// truncation of a longer series; the caller asserts that by calling
    /// this. Used by the checker to rebuild polynomial families at a larger
    /// working order.
    pub fn assume_exact_to(&self, new_order: u32) -> Result<Self> {
        if new_order < self.order {
            return Err(AlgebraError::ShapeMismatch(format!(
                "assume_exact_to would lower the order ({} -> {})",
                self.order, new_order
            )));
        }
        Ok(TruncSeries {
            num_vars: self.num_vars,
            order: new_order,
            terms: self.terms.clone(),
        })
    }

    /// Exact polynomial division: returns `self / divisor` when the
    /// division leaves no remainder on the stored terms, `None` otherwise.
    /// Works lex-leading-term first, so it is a genuine polynomial division
    /// (used for cancelling structural factors out of fractions).
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero_series() || self.num_vars != divisor.num_vars {
            return None;
        }
        if self.is_zero_series() {
            return Some(self.clone());
        }
        let (lead_exp, lead_coeff) = divisor.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone()))?;
        let mut remainder = self.terms.clone();
        let mut quotient: BTreeMap<Exponents, Rational> = BTreeMap::new();
        while let Some((rexp, rcoeff)) = remainder.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            // leading monomial of the remainder must be divisible, and an
            // exact quotient never pushes past the truncation degree
            if total_degree(&rexp) > self.order || rexp.iter().zip(&lead_exp).any(|(a, b)| a < b) {
                return None;
            }
            let qexp: Exponents = rexp.iter().zip(&lead_exp).map(|(a, b)| a - b).collect();
            let qcoeff = rcoeff / &lead_coeff;
            for (dexp, dcoeff) in &divisor.terms {
                let target: Exponents = qexp.iter().zip(dexp).map(|(a, b)| a + b).collect();
                let entry = remainder.entry(target).or_insert_with(|| rat_int(0));
                *entry -= &qcoeff * dcoeff;
            }
            remainder.retain(|_, c| !c.is_zero());
            quotient.insert(qexp, qcoeff);
        }
        Some(TruncSeries {
            num_vars: self.num_vars,
            order: self.order,
            terms: quotient,
        })
    }

    /// Inverse of a unit (nonzero constant term), by geometric series.
    pub fn invert_unit(&self) -> Result<Self> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(AlgebraError::ZeroDenominator(
                "series inverse requires a nonzero constant term".into(),
            ));
        }
        // self = c (1 - r) with r of positive valuation; 1/self = (1/c) sum r^k.
        let c_inv = c.recip();
        let r = Self::constant(self.num_vars, self.order, c.clone())
            .checked_sub(self)?
            .scaled(&c_inv);
        let mut acc = Self::one(self.num_vars, self.order);
        let mut power = Self::one(self.num_vars, self.order);
        for _ in 1..=self.order {
            power = power.checked_mul(&r)?;
            if power.is_zero_series() {
                break;
            }
            acc = acc.checked_add(&power)?;
        }
        Ok(acc.scaled(&c_inv))
    }

    /// Deterministic total order used for canonical sorting of eigenvalues.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.num_vars, other.num_vars);
        let mut a = self.terms.iter();
        let mut b = other.terms.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ea, ca)), Some((eb, cb))) => {
                    match ea.cmp(eb).then_with(|| ca.cmp(cb)) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
            }
        }
    }

    /// Random polynomial of total degree <= `max_degree` with small integer
    /// coefficients, optionally forced to have no constant term.
    pub fn random_polynomial<R: Rng + ?Sized>(
        rng: &mut R,
        num_vars: usize,
        order: u32,
        max_degree: u32,
        coeff_height: u32,
        zero_constant: bool,
    ) -> Self {
        let max_degree = max_degree.min(order);
        let mut terms = BTreeMap::new();
        for exps in exponents_up_to(num_vars, max_degree) {
            if zero_constant && exps.iter().all(|&e| e == 0) {
                continue;
            }
            // Sparse by default: keep roughly half the candidate monomials.
            if rng.gen_bool(0.5) {
                let c = random_rational(rng, coeff_height);
                if !c.is_zero() {
                    terms.insert(exps, c);
                }
            }
        }
        TruncSeries {
            num_vars,
            order,
            terms,
        }
    }
}

/// All exponent vectors in `num_vars` variables with total degree <= `max`.
pub fn exponents_up_to(num_vars: usize, max: u32) -> Vec<Exponents> {
    let mut out = Vec::new();
    let mut current = vec![0u32; num_vars];
    fn rec(out: &mut Vec<Exponents>, current: &mut Exponents, pos: usize, remaining: u32) {
        if pos == current.len() {
            out.push(current.clone());
            return;
        }
        for e in 0..=remaining {
            current[pos] = e;
            rec(out, current, pos + 1, remaining - e);
        }
        current[pos] = 0;
    }
    rec(&mut out, &mut current, 0, max);
    out.sort();
    out
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series[{} vars, D={}](", self.num_vars, self.order)?;
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (exps, coeff)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{coeff}")?;
            for (v, &e) in exps.iter().enumerate() {
                if e == 1 {
                    write!(f, "*t{}", v + 1)?;
                } else if e > 1 {
                    write!(f, "*t{}^{}", v + 1, e)?;
                }
            }
        }
        write!(f, ")")
    }
}

impl Scalar for TruncSeries {
    fn zero_like(&self) -> Self {
        Self::zero(self.num_vars, self.order)
    }
    fn one_like(&self) -> Self {
        Self::one(self.num_vars, self.order)
    }
    fn is_zero(&self) -> bool {
        self.is_zero_series()
    }
    fn add(&self, rhs: &Self) -> Self {
        self.checked_add(rhs).expect("series shape mismatch")
    }
    fn neg(&self) -> Self {
        self.negated()
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.checked_mul(rhs).expect("series shape mismatch")
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.checked_sub(rhs).expect("series shape mismatch")
    }
    fn embed_rational(&self, q: &Rational) -> Self {
        Self::constant(self.num_vars, self.order, q.clone())
    }
    fn scale(&self, q: &Rational) -> Self {
        self.scaled(q)
    }
}

impl crate::scalar::ExpScalar for TruncSeries {
    fn exp(&self) -> Result<Self> {
        TruncSeries::exp(self)
    }
}

/// Module-level names mirroring the public operation list.
pub fn series_add(a: &TruncSeries, b: &TruncSeries) -> Result<TruncSeries> {
    a.checked_add(b)
}

pub fn series_mul(a: &TruncSeries, b: &TruncSeries) -> Result<TruncSeries> {
    a.checked_mul(b)
}

pub fn series_exp(s: &TruncSeries) -> Result<TruncSeries> {
    s.exp()
}

pub fn partial_derivative(s: &TruncSeries, var_index: usize) -> Result<TruncSeries> {
    s.partial_derivative(var_index)
}

impl PartialOrd for TruncSeries {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.num_vars != other.num_vars || self.order != other.order {
            return None;
        }
        Some(self.canonical_cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn t(i: usize) -> TruncSeries {
        TruncSeries::var(2, 4, i).unwrap()
    }

    #[test]
    fn add_basics() {
        let sum = series_add(&t(0), &t(1)).unwrap();
        assert_eq!(sum.coefficient(&[1, 0]), rat_int(1));
        assert_eq!(sum.coefficient(&[0, 1]), rat_int(1));
        let s = TruncSeries::random_polynomial(&mut crate::rng::stream_rng(1, 0), 2, 4, 3, 5, false);
        assert_eq!(series_add(&s, &s.zero_like()).unwrap(), s);
    }

    #[test]
    fn add_cancellation_at_low_order() {
        // (t1 + t1^2) + (-t1^2) at D=2 -> t1
        let d2 = |v: usize| TruncSeries::var(1, 2, v).unwrap();
        let t1 = d2(0);
        let t1sq = t1.checked_mul(&t1).unwrap();
        let lhs = t1.checked_add(&t1sq).unwrap();
        let sum = lhs.checked_add(&t1sq.negated()).unwrap();
        assert_eq!(sum, t1);
    }

    #[test]
    fn add_shape_mismatch() {
        let a = TruncSeries::zero(2, 4);
        let b = TruncSeries::zero(2, 5);
        assert!(matches!(
            series_add(&a, &b),
            Err(AlgebraError::ShapeMismatch(_))
        ));
        let c = TruncSeries::zero(3, 4);
        assert!(series_mul(&a, &c).is_err());
    }

    #[test]
    fn mul_truncates() {
        let t1 = TruncSeries::var(1, 2, 0).unwrap();
        let sq = series_mul(&t1, &t1).unwrap();
        assert_eq!(sq.coefficient(&[2]), rat_int(1));
        let t1_d1 = TruncSeries::var(1, 1, 0).unwrap();
        assert!(series_mul(&t1_d1, &t1_d1).unwrap().is_zero_series());
    }

    #[test]
    fn mul_difference_of_squares() {
        // (1+t1)(1-t1) at D=2 -> 1 - t1^2
        let one = TruncSeries::one(1, 2);
        let t1 = TruncSeries::var(1, 2, 0).unwrap();
        let product = series_mul(
            &one.checked_add(&t1).unwrap(),
            &one.checked_sub(&t1).unwrap(),
        )
        .unwrap();
        let expected = one
            .checked_sub(&series_mul(&t1, &t1).unwrap())
            .unwrap();
        assert_eq!(product, expected);
    }

    #[test]
    fn exp_taylor_coefficients() {
        let t1 = TruncSeries::var(1, 3, 0).unwrap();
        let e = series_exp(&t1).unwrap();
        assert_eq!(e.coefficient(&[0]), rat_int(1));
        assert_eq!(e.coefficient(&[1]), rat_int(1));
        assert_eq!(e.coefficient(&[2]), rat(1, 2));
        assert_eq!(e.coefficient(&[3]), rat(1, 6));
        assert_eq!(series_exp(&TruncSeries::zero(2, 4)).unwrap(), TruncSeries::one(2, 4));
    }

    #[test]
    fn exp_rejects_constant_term() {
        let s = TruncSeries::one(1, 3);
        assert!(matches!(
            series_exp(&s),
            Err(AlgebraError::NonzeroConstantTerm(_))
        ));
    }

    #[test]
    fn exp_is_homomorphism() {
        // exp(t1+t2) = exp(t1)*exp(t2) at D=4
        let t1 = TruncSeries::var(2, 4, 0).unwrap();
        let t2 = TruncSeries::var(2, 4, 1).unwrap();
        let lhs = series_exp(&t1.checked_add(&t2).unwrap()).unwrap();
        let rhs = series_mul(&series_exp(&t1).unwrap(), &series_exp(&t2).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_basics() {
        // d(t1^2 t2)/dt1 = 2 t1 t2
        let t1 = TruncSeries::var(2, 4, 0).unwrap();
        let t2 = TruncSeries::var(2, 4, 1).unwrap();
        let m = series_mul(&series_mul(&t1, &t1).unwrap(), &t2).unwrap();
        let d = partial_derivative(&m, 0).unwrap();
        assert_eq!(d.order(), 3);
        assert_eq!(d.coefficient(&[1, 1]), rat_int(2));
        let c = TruncSeries::constant(2, 4, rat(5, 3));
        assert!(partial_derivative(&c, 1).unwrap().is_zero_series());
    }

    #[test]
    fn derivative_of_exp_matches_exp() {
        let t1 = TruncSeries::var(1, 6, 0).unwrap();
        let e = series_exp(&t1).unwrap();
        let de = partial_derivative(&e, 0).unwrap();
        assert_eq!(de, e.truncated_to(5));
    }

    #[test]
    fn unit_inverse() {
        let one = TruncSeries::one(1, 5);
        let t1 = TruncSeries::var(1, 5, 0).unwrap();
        let u = one.checked_add(&t1).unwrap();
        let inv = u.invert_unit().unwrap();
        assert_eq!(series_mul(&u, &inv).unwrap(), one);
        assert!(t1.invert_unit().is_err());
    }

    #[test]
    fn evaluation() {
        let t1 = TruncSeries::var(2, 4, 0).unwrap();
        let t2 = TruncSeries::var(2, 4, 1).unwrap();
        let s = series_add(&series_mul(&t1, &t1).unwrap(), &t2).unwrap();
        let v = s.evaluate(&[rat(1, 2), rat(3, 1)]).unwrap();
        assert_eq!(v, rat(13, 4));
    }

    #[test]
    fn exponent_enumeration_counts() {
        // C(2+4, 2) = 15 monomials of degree <= 4 in 2 variables
        assert_eq!(exponents_up_to(2, 4).len(), 15);
        assert_eq!(exponents_up_to(3, 8).len(), 165);
        assert_eq!(exponents_up_to(1, 0).len(), 1);
    }
}
