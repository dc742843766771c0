//! High-precision numeric scalars: complex numbers over arbitrary-precision
//! binary floats.
//!
//! The working precision is a global, configurable constant (default 128
//! bits). Every comparison against zero or between values takes an explicit
//! tolerance; nothing in this module decides equality implicitly.

use std::cell::RefCell;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use astro_float::{BigFloat, Consts, RoundingMode};
use num_traits::ToPrimitive;

use crate::error::{AlgebraError, Result};
use crate::matrix::Matrix;
use crate::rational::Rational;
use crate::scalar::{ExpScalar, FieldScalar, Scalar};

static PRECISION_BITS: AtomicUsize = AtomicUsize::new(128);

/// Extra guard bits carried internally beyond the configured precision.
const GUARD_BITS: usize = 32;

const RM: RoundingMode = RoundingMode::ToEven;

pub fn set_precision(bits: usize) {
    PRECISION_BITS.store(bits.max(64), Ordering::SeqCst);
}

pub fn precision() -> usize {
    PRECISION_BITS.load(Ordering::SeqCst)
}

fn working_bits() -> usize {
    precision() + GUARD_BITS
}

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// 2^k as a BigFloat; used for tolerances like 2^-48.
pub fn pow2(k: i32) -> BigFloat {
    BigFloat::from_f64(1.0, working_bits()).mul(
        &{
            let mut two_k = BigFloat::from_f64(1.0, working_bits());
            let e = two_k.exponent().expect("finite");
            two_k.set_exponent(e + k);
            two_k
        },
        working_bits(),
        RM,
    )
}

fn bf_zero() -> BigFloat {
    BigFloat::from_f64(0.0, working_bits())
}

fn bf_from_rational(q: &Rational) -> BigFloat {
    let p = working_bits();
    let num_text = q.numer().to_string();
    let den_text = q.denom().to_string();
    with_consts(|cc| {
        let num = BigFloat::parse(&num_text, astro_float::Radix::Dec, p + 32, RM, cc);
        let den = BigFloat::parse(&den_text, astro_float::Radix::Dec, p + 32, RM, cc);
        num.div(&den, p, RM)
    })
}

/// Complex scalar with high-precision real and imaginary parts.
#[derive(Clone)]
pub struct NumericScalar {
    re: BigFloat,
    im: BigFloat,
}

impl NumericScalar {
    pub fn zero() -> Self {
        NumericScalar {
            re: bf_zero(),
            im: bf_zero(),
        }
    }

    pub fn from_f64(v: f64) -> Self {
        NumericScalar {
            re: BigFloat::from_f64(v, working_bits()),
            im: bf_zero(),
        }
    }

    pub fn from_rational(q: &Rational) -> Self {
        NumericScalar {
            re: bf_from_rational(q),
            im: bf_zero(),
        }
    }

    pub fn re(&self) -> &BigFloat {
        &self.re
    }

    pub fn im(&self) -> &BigFloat {
        &self.im
    }

    pub fn is_finite(&self) -> bool {
        !(self.re.is_nan() || self.im.is_nan() || self.re.is_inf() || self.im.is_inf())
    }

    /// 1-norm |re| + |im|; cheap magnitude for pivoting and tolerances.
    pub fn magnitude(&self) -> BigFloat {
        let p = working_bits();
        self.re.abs().add(&self.im.abs(), p, RM)
    }

    /// `|self - other| <= tol * max(1, |self|, |other|)`, with the 1-norm.
    pub fn approx_eq(&self, other: &Self, tol: &BigFloat) -> bool {
        let p = working_bits();
        let diff = self.sub(other).magnitude();
        let mut scale = BigFloat::from_f64(1.0, p);
        scale = scale.max(&self.magnitude());
        scale = scale.max(&other.magnitude());
        diff.cmp(&tol.mul(&scale, p, RM)).map(|c| c <= 0).unwrap_or(false)
    }

    pub fn below(&self, tol: &BigFloat) -> bool {
        self.magnitude().cmp(tol).map(|c| c <= 0).unwrap_or(false)
    }

    /// Complex exponential.
    pub fn exp_value(&self) -> Self {
        let p = working_bits();
        let radius = with_consts(|cc| self.re.exp(p, RM, cc));
        if self.im.is_zero() {
            return NumericScalar {
                re: radius,
                im: bf_zero(),
            };
        }
        let (cos_im, sin_im) = with_consts(|cc| (self.im.cos(p, RM, cc), self.im.sin(p, RM, cc)));
        NumericScalar {
            re: radius.mul(&cos_im, p, RM),
            im: radius.mul(&sin_im, p, RM),
        }
    }

    /// Best-effort f64 view of the real part (for reports and rational
    /// reconstruction of small values; never used in exactness decisions).
    pub fn re_to_f64(&self) -> f64 {
        format!("{}", self.re).parse::<f64>().unwrap_or(f64::NAN)
    }
}

impl fmt::Debug for NumericScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}

impl PartialEq for NumericScalar {
    /// Bitwise comparison of the parts. Numeric decisions go through
    /// `approx_eq` with an explicit tolerance; this exists so the scalar can
    /// participate in the generic matrix plumbing.
    fn eq(&self, other: &Self) -> bool {
        self.re.cmp(&other.re) == Some(0) && self.im.cmp(&other.im) == Some(0)
    }
}

impl Scalar for NumericScalar {
    fn zero_like(&self) -> Self {
        NumericScalar::zero()
    }
    fn one_like(&self) -> Self {
        NumericScalar::from_f64(1.0)
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        let p = working_bits();
        NumericScalar {
            re: self.re.add(&rhs.re, p, RM),
            im: self.im.add(&rhs.im, p, RM),
        }
    }
    fn neg(&self) -> Self {
        NumericScalar {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        let p = working_bits();
        let ac = self.re.mul(&rhs.re, p, RM);
        let bd = self.im.mul(&rhs.im, p, RM);
        let ad = self.re.mul(&rhs.im, p, RM);
        let bc = self.im.mul(&rhs.re, p, RM);
        NumericScalar {
            re: ac.sub(&bd, p, RM),
            im: ad.add(&bc, p, RM),
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        let p = working_bits();
        NumericScalar {
            re: self.re.sub(&rhs.re, p, RM),
            im: self.im.sub(&rhs.im, p, RM),
        }
    }
    fn embed_rational(&self, q: &Rational) -> Self {
        NumericScalar::from_rational(q)
    }
}

impl FieldScalar for NumericScalar {
    fn invert(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(AlgebraError::ZeroDenominator(
                "numeric inverse of exact zero".into(),
            ));
        }
        let p = working_bits();
        // 1/(a+bi) = (a - bi) / (a^2 + b^2)
        let norm = self
            .re
            .mul(&self.re, p, RM)
            .add(&self.im.mul(&self.im, p, RM), p, RM);
        Ok(NumericScalar {
            re: self.re.div(&norm, p, RM),
            im: self.im.neg().div(&norm, p, RM),
        })
    }
}

impl ExpScalar for NumericScalar {
    fn exp(&self) -> Result<Self> {
        Ok(self.exp_value())
    }
}

/// Numeric rank with tolerance pivoting after column scaling, plus a basis
/// of the numeric nullspace. `rel_tol` is relative to scaled columns.
pub fn numeric_rank_nullspace(
    mat: &Matrix<NumericScalar>,
    rel_tol: &BigFloat,
) -> (usize, Vec<Vec<NumericScalar>>) {
    let rows = mat.rows();
    let cols = mat.cols();
    let p = working_bits();
    // Column scaling: divide each column by its max magnitude (if above tol).
    // Nullvectors of the scaled matrix are unscaled before returning.
    let mut scaled = mat.clone();
    let mut col_scale = vec![BigFloat::from_f64(1.0, p); cols];
    for c in 0..cols {
        let mut max = bf_zero();
        for r in 0..rows {
            max = max.max(&scaled.at(r, c).magnitude());
        }
        if max.cmp(rel_tol).map(|x| x > 0).unwrap_or(false) {
            let inv = BigFloat::from_f64(1.0, p).div(&max, p, RM);
            col_scale[c] = inv.clone();
            for r in 0..rows {
                let v = scaled.at(r, c).clone();
                scaled.set(
                    r,
                    c,
                    NumericScalar {
                        re: v.re.mul(&inv, p, RM),
                        im: v.im.mul(&inv, p, RM),
                    },
                );
            }
        }
    }

    let mut m = scaled;
    let mut pivot_cols = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        // max-magnitude pivot in rows r..
        let mut best_row = r;
        let mut best_mag = m.at(r, c).magnitude();
        for i in r + 1..rows {
            let mag = m.at(i, c).magnitude();
            if mag.cmp(&best_mag).map(|x| x > 0).unwrap_or(false) {
                best_mag = mag;
                best_row = i;
            }
        }
        if best_mag.cmp(rel_tol).map(|x| x <= 0).unwrap_or(true) {
            // treat whole column as zero below this row
            for i in r..rows {
                m.set(i, c, NumericScalar::zero());
            }
            continue;
        }
        if best_row != r {
            for cc in 0..cols {
                let tmp = m.at(r, cc).clone();
                m.set(r, cc, m.at(best_row, cc).clone());
                m.set(best_row, cc, tmp);
            }
        }
        let inv = m.at(r, c).invert().expect("pivot above tolerance");
        for cc in c..cols {
            let v = m.at(r, cc).mul(&inv);
            m.set(r, cc, v);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = m.at(i, c).clone();
            if factor.below(rel_tol) {
                continue;
            }
            for cc in c..cols {
                let v = m.at(i, cc).sub(&factor.mul(m.at(r, cc)));
                m.set(i, cc, v);
            }
        }
        pivot_cols.push(c);
        r += 1;
    }

    let rank = r;
    let mut pivot_of_col = vec![None; cols];
    for (row, &pc) in pivot_cols.iter().enumerate() {
        pivot_of_col[pc] = Some(row);
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![NumericScalar::zero(); cols];
        v[free] = NumericScalar::from_f64(1.0);
        for (col, pr) in pivot_of_col.iter().enumerate() {
            if let Some(row) = pr {
                v[col] = m.at(*row, free).neg();
            }
        }
        for (c, entry) in v.iter_mut().enumerate() {
            entry.re = entry.re.mul(&col_scale[c], p, RM);
            entry.im = entry.im.mul(&col_scale[c], p, RM);
        }
        basis.push(v);
    }
    (rank, basis)
}

/// Reconstructs a small rational from a numeric value by continued
/// fractions, confirming the result against the input at tolerance `tol`.
pub fn reconstruct_rational(x: &NumericScalar, max_den: u64, tol: &BigFloat) -> Option<Rational> {
    if !x.is_finite() || !x.im.is_zero() && !x.im.abs().cmp(tol).map(|c| c <= 0).unwrap_or(false) {
        return None;
    }
    let v = x.re_to_f64();
    if !v.is_finite() {
        return None;
    }
    // floor-based continued fraction in f64: plenty for small rationals
    let a0 = v.floor();
    let (mut p0, mut q0, mut p1, mut q1) = (1i128, 0i128, a0 as i128, 1i128);
    let mut frac = v - a0;
    for _ in 0..24 {
        if (p1 as f64 / q1 as f64 - v).abs() < 1e-13 || frac.abs() < 1e-13 {
            break;
        }
        let recip = 1.0 / frac;
        let a = recip.floor();
        frac = recip - a;
        let (np, nq) = (a as i128 * p1 + p0, a as i128 * q1 + q0);
        p0 = p1;
        q0 = q1;
        p1 = np;
        q1 = nq;
        if q1 > max_den as i128 {
            return None;
        }
    }
    if q1 <= 0 || q1 > max_den as i128 {
        return None;
    }
    let candidate = Rational::new(p1.into(), q1.into());
    let back = NumericScalar::from_rational(&candidate);
    if back.approx_eq(x, tol) {
        Some(candidate)
    } else {
        None
    }
}

/// Rationals whose f64 image can be reconstructed; convenience for reports.
pub fn reconstruct_f64(v: f64, max_den: u64) -> Option<Rational> {
    reconstruct_rational(&NumericScalar::from_f64(v), max_den, &pow2(-40))
}

impl ToPrimitive for NumericScalar {
    fn to_i64(&self) -> Option<i64> {
        let v = self.re_to_f64();
        if v.is_finite() {
            Some(v as i64)
        } else {
            None
        }
    }
    fn to_u64(&self) -> Option<u64> {
        self.to_i64().map(|v| v as u64)
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.re_to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn exp_matches_reference() {
        let one = NumericScalar::from_f64(1.0);
        let e = one.exp_value();
        let expected = NumericScalar::from_f64(std::f64::consts::E);
        assert!(e.approx_eq(&expected, &pow2(-50)));
        // high-precision digits beyond f64
        let s = format!("{:?}", e);
        assert!(s.starts_with("2.71828182845904523536028747135266"), "{s}");
    }

    #[test]
    fn complex_arithmetic() {
        let i = NumericScalar {
            re: bf_zero(),
            im: BigFloat::from_f64(1.0, working_bits()),
        };
        let minus_one = i.mul(&i);
        assert!(minus_one.approx_eq(&NumericScalar::from_f64(-1.0), &pow2(-90)));
        let inv = i.invert().unwrap();
        assert!(inv.approx_eq(&i.neg(), &pow2(-90)));
    }

    #[test]
    fn rank_with_tolerance() {
        // a perturbation above the tolerance keeps full rank...
        let eps_above = NumericScalar::from_f64(2.0).add(&{
            let mut v = NumericScalar::from_f64(1.0);
            v.re = pow2(-30);
            v
        });
        let a = Matrix::from_rows(vec![
            vec![NumericScalar::from_f64(1.0), NumericScalar::from_f64(2.0)],
            vec![NumericScalar::from_f64(1.0), eps_above],
        ])
        .unwrap();
        let (rank_a, _) = numeric_rank_nullspace(&a, &pow2(-48));
        assert_eq!(rank_a, 2);
        // ...one below it collapses the rank
        let eps_below = NumericScalar::from_f64(2.0).add(&{
            let mut v = NumericScalar::from_f64(1.0);
            v.re = pow2(-80);
            v
        });
        let b = Matrix::from_rows(vec![
            vec![NumericScalar::from_f64(1.0), NumericScalar::from_f64(2.0)],
            vec![NumericScalar::from_f64(1.0), eps_below],
        ])
        .unwrap();
        let (rank_b, null_b) = numeric_rank_nullspace(&b, &pow2(-48));
        assert_eq!(rank_b, 1);
        assert_eq!(null_b.len(), 1);
        // b * v ~ 0 for the reported nullvector
        let v = &null_b[0];
        for r in 0..2 {
            let resid = b.at(r, 0).mul(&v[0]).add(&b.at(r, 1).mul(&v[1]));
            assert!(resid.below(&pow2(-40)));
        }
    }

    #[test]
    fn rational_reconstruction() {
        let x = NumericScalar::from_rational(&rat(-22, 7));
        let q = reconstruct_rational(&x, 1000, &pow2(-40)).unwrap();
        assert_eq!(q, rat(-22, 7));
        assert_eq!(reconstruct_f64(0.5, 10).unwrap(), rat(1, 2));
        // garbage does not reconstruct
        assert!(reconstruct_f64(0.1234567890123, 50).is_none());
    }
}
