//! Exact rational numbers and small helpers around them.
//!
//! The coefficient field everywhere in this crate is Q. We use
//! [`num_rational::BigRational`], which keeps values reduced to lowest terms
//! with a positive denominator, exactly the canonical form we need.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{AlgebraError, Result};

pub type Rational = num_rational::BigRational;

/// Shorthand for a rational from an integer pair. Panics on zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from a single integer.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// 1/n!, used by the truncated exponentials.
pub fn inverse_factorial(n: u64) -> Rational {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= BigInt::from(k);
    }
    Rational::new(BigInt::one(), f)
}

/// Parses the "p/q" (or plain "p") wire format.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let mut parts = text.splitn(2, '/');
    let num_text = parts.next().unwrap_or("").trim();
    let num: BigInt = num_text
        .parse()
        .map_err(|_| AlgebraError::Validation(format!("bad rational numerator in {text:?}")))?;
    match parts.next() {
        None => Ok(Rational::from_integer(num)),
        Some(den_text) => {
            let den: BigInt = den_text.trim().parse().map_err(|_| {
                AlgebraError::Validation(format!("bad rational denominator in {text:?}"))
            })?;
            if den.is_zero() {
                return Err(AlgebraError::ZeroDenominator(format!(
                    "rational literal {text:?}"
                )));
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// Canonical "p/q" rendering; integers print without the "/1".
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Default height bound for random rational sample points. Small enough to
/// keep exact elimination fast, large enough that accidental rank drops at
/// sampled points are improbable.
pub const DEFAULT_SAMPLE_HEIGHT: u32 = 97;

/// Uniform random rational with |numerator| <= height, 1 <= denominator <= height.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, height: u32) -> Rational {
    let h = height.max(1) as i64;
    let num = rng.gen_range(-h..=h);
    let den = rng.gen_range(1..=h);
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Random nonzero rational, same height bound.
pub fn random_nonzero_rational<R: Rng + ?Sized>(rng: &mut R, height: u32) -> Rational {
    loop {
        let q = random_rational(rng, height);
        if !q.is_zero() {
            return q;
        }
    }
}

/// Scales a rational vector to coprime integers with positive leading entry.
/// Returns `None` for the zero vector.
pub fn normalize_to_integers(vector: &[Rational]) -> Option<Vec<BigInt>> {
    if vector.iter().all(|q| q.is_zero()) {
        return None;
    }
    let mut lcm = BigInt::one();
    for q in vector {
        lcm = num_integer::lcm(lcm, q.denom().clone());
    }
    let mut ints: Vec<BigInt> = vector
        .iter()
        .map(|q| q.numer() * (&lcm / q.denom()))
        .collect();
    let mut gcd = BigInt::zero();
    for v in &ints {
        gcd = num_integer::gcd(gcd, v.abs());
    }
    if !gcd.is_zero() && !gcd.is_one() {
        for v in &mut ints {
            *v /= &gcd;
        }
    }
    if let Some(first) = ints.iter().find(|v| !v.is_zero()) {
        if first.sign() == Sign::Minus {
            for v in &mut ints {
                *v = -v.clone();
            }
        }
    }
    Some(ints)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for text in ["3/4", "-7/2", "0", "12", "-5"] {
            let q = parse_rational(text).unwrap();
            assert_eq!(format_rational(&q), text);
        }
        assert_eq!(format_rational(&parse_rational("6/4").unwrap()), "3/2");
        assert_eq!(format_rational(&parse_rational("0/9").unwrap()), "0");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn inverse_factorials() {
        assert_eq!(inverse_factorial(0), rat_int(1));
        assert_eq!(inverse_factorial(1), rat_int(1));
        assert_eq!(inverse_factorial(4), rat(1, 24));
    }

    #[test]
    fn integer_normalization() {
        let v = vec![rat(1, 2), rat(-3, 4), rat_int(0)];
        let ints = normalize_to_integers(&v).unwrap();
        assert_eq!(ints, vec![BigInt::from(2), BigInt::from(-3), BigInt::from(0)]);
        // leading sign is flipped to positive
        let w = vec![rat(-1, 3), rat(1, 3)];
        assert_eq!(
            normalize_to_integers(&w).unwrap(),
            vec![BigInt::from(1), BigInt::from(-1)]
        );
        assert!(normalize_to_integers(&[rat_int(0)]).is_none());
    }
}
