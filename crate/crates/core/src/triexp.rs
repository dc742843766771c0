//! Exponentials of upper triangular matrices.
//!
//! The primary algorithms are the case-free homogeneous sum forms of the
//! divided differences: `f_n(s,t,N) = sum_{a+b=N-1} s^a t^b` equals
//! `(s^N - t^N)/(s - t)` off the diagonal and `N s^{N-1}` on it, with no
//! division and no singular limits. The closed forms stay available as
//! cross-check oracles.

use astro_float::BigFloat;

use crate::error::{AlgebraError, Result};
use crate::matrix::Matrix;
use crate::numeric::{self, NumericScalar};
use crate::rational::{inverse_factorial, rat_int};
use crate::scalar::{FieldScalar, Scalar};
use crate::series::TruncSeries;

/// Divided-difference power sum: `s^{N-1} + s^{N-2} t + ... + t^{N-1}`.
pub fn f_n<S: Scalar>(s: &S, t: &S, n: u32) -> S {
    let mut acc = s.zero_like();
    if n == 0 {
        return acc;
    }
    let mut s_pow = s.one_like();
    let mut s_powers = Vec::with_capacity(n as usize);
    for _ in 0..n {
        s_powers.push(s_pow.clone());
        s_pow = s_pow.mul(s);
    }
    let mut t_pow = s.one_like();
    for a in (0..n).rev() {
        acc = acc.add(&s_powers[a as usize].mul(&t_pow));
        t_pow = t_pow.mul(t);
    }
    acc
}

/// Closed form of `f_n`: `(s^N - t^N)/(s - t)` when `s != t`, confluent
/// value `N s^{N-1}` when `s = t`. Cross-check oracle for the sum form.
pub fn f_n_closed<S: FieldScalar>(s: &S, t: &S, n: u32) -> Result<S> {
    let diff = s.sub(t);
    if diff.is_zero() {
        if n == 0 {
            return Ok(s.zero_like());
        }
        let mut p = s.one_like();
        for _ in 1..n {
            p = p.mul(s);
        }
        return Ok(p.scale(&rat_int(i64::from(n))));
    }
    let mut sn = s.one_like();
    let mut tn = s.one_like();
    for _ in 0..n {
        sn = sn.mul(s);
        tn = tn.mul(t);
    }
    sn.sub(&tn).div(&diff)
}

/// Exponential divided difference over truncated series:
/// `sum_{N=1}^{D+1} f_n(s,t,N)/N!`, exact to the truncation order.
pub fn f_exp(s: &TruncSeries, t: &TruncSeries) -> Result<TruncSeries> {
    if !num_traits::Zero::is_zero(&s.constant_term())
        || !num_traits::Zero::is_zero(&t.constant_term())
    {
        return Err(AlgebraError::NonzeroConstantTerm(
            "f_exp over series requires zero constant terms".into(),
        ));
    }
    let order = s.order();
    let mut acc = TruncSeries::zero(s.num_vars(), order);
    for n in 1..=(order + 1) {
        // f_n(s,t,N) has valuation >= N-1, so the sum stops contributing.
        let term = f_n(s, t, n).scaled(&inverse_factorial(u64::from(n)));
        acc = acc.checked_add(&term)?;
    }
    Ok(acc)
}

/// Numeric exponential divided difference by the same sum form, summed
/// until terms vanish at working precision. Matches `(e^s - e^t)/(s - t)`
/// off the diagonal and `e^s` on it.
pub fn f_exp_numeric(s: &NumericScalar, t: &NumericScalar) -> NumericScalar {
    divided_difference_exp_numeric(&[s.clone(), t.clone()])
}

/// Confluent exponential divided difference over any node list, computed
/// case-free as `sum_{q>=0} h_q(nodes)/(q+r)!` with `h_q` the complete
/// homogeneous symmetric polynomials.
pub fn divided_difference_exp_numeric(nodes: &[NumericScalar]) -> NumericScalar {
    assert!(!nodes.is_empty());
    let r = nodes.len() - 1;
    let eps = numeric::pow2(-(numeric::precision() as i32) - 16);
    let mut sum = nodes[0].one_like().scale(&inverse_factorial(r as u64));
    let mut q = 0usize;
    let mut small_streak = 0;
    // h-table over nodes, extended one degree per iteration
    let mut h = vec![nodes[0].one_like()];
    while small_streak < 3 && q < 400 {
        q += 1;
        h.push(next_homogeneous_degree(nodes, &h));
        let term = h[q].scale(&inverse_factorial((q + r) as u64));
        sum = sum.add(&term);
        if term.below(&eps) {
            small_streak += 1;
        } else {
            small_streak = 0;
        }
    }
    sum
}

/// Given h_0..h_{d-1} of the nodes, computes h_d via the Newton-like
/// recurrence on the node list.
fn next_homogeneous_degree(nodes: &[NumericScalar], lower: &[NumericScalar]) -> NumericScalar {
    // h_d(z_0..z_u) = h_d(z_0..z_{u-1}) + z_u * h_{d-1}(z_0..z_u):
    // build a fresh DP table for degrees 0..=d over the node prefix.
    let d = lower.len();
    let mut table = vec![nodes[0].zero_like(); d + 1];
    table[0] = nodes[0].one_like();
    for z in nodes {
        for deg in 1..=d {
            let add = table[deg - 1].mul(z);
            table[deg] = table[deg].add(&add);
        }
    }
    table[d].clone()
}

/// `G_N(x,s,t) = x^N F_1(s,t) + x^{N-1} F_2(s,t) + ... + F_{N+1}(s,t)`,
/// in the division-free sum form.
pub fn g_n<S: Scalar>(x: &S, s: &S, t: &S, n: u32) -> S {
    let mut acc = x.zero_like();
    let mut x_pow = x.one_like();
    for l in (0..=n).rev() {
        acc = acc.add(&x_pow.mul(&f_n(s, t, l + 1)));
        if l > 0 {
            x_pow = x_pow.mul(x);
        }
    }
    acc
}

/// The closed-form branches for `G_N`, used only as oracles: distinct
/// `s != t`; confluent `s = t != x`; fully confluent `s = t = x`.
pub fn g_n_closed<S: FieldScalar>(x: &S, s: &S, t: &S, n: u32) -> Result<S> {
    let st = s.sub(t);
    if !st.is_zero() {
        // (F_{N+2}(s,x) - F_{N+2}(t,x)) / (s - t)
        let lhs = f_n(s, x, n + 2);
        let rhs = f_n(t, x, n + 2);
        return lhs.sub(&rhs).div(&st);
    }
    let sx = s.sub(x);
    if !sx.is_zero() {
        // (x^{N+2} - x (N+2) s^{N+1} + (N+1) s^{N+2}) / (s - x)^2
        let mut x_pow = x.one_like();
        for _ in 0..(n + 2) {
            x_pow = x_pow.mul(x);
        }
        let mut s_pow = s.one_like();
        for _ in 0..(n + 1) {
            s_pow = s_pow.mul(s);
        }
        let term2 = x.mul(&s_pow).scale(&rat_int(i64::from(n) + 2));
        let term3 = s_pow.mul(s).scale(&rat_int(i64::from(n) + 1));
        let numerator = x_pow.sub(&term2).add(&term3);
        return numerator.div(&sx.mul(&sx));
    }
    // (N+2)(N+1) s^N / 2
    let mut s_pow = s.one_like();
    for _ in 0..n {
        s_pow = s_pow.mul(s);
    }
    Ok(s_pow.scale(&crate::rational::rat(
        (i64::from(n) + 2) * (i64::from(n) + 1),
        2,
    )))
}

fn require_upper_triangular<S: Scalar>(a: &Matrix<S>, what: &str) -> Result<()> {
    if !a.is_square() {
        return Err(AlgebraError::MatrixShape(format!(
            "{what}: non-square matrix"
        )));
    }
    if !a.is_upper_triangular() {
        return Err(AlgebraError::MatrixShape(format!(
            "{what}: matrix is not upper triangular"
        )));
    }
    Ok(())
}

/// The (1,n) entry of `A^N` by the descending recursion over trailing
/// diagonal submatrices; an oracle independent of matrix powering.
pub fn tri_power_entry<S: Scalar>(a: &Matrix<S>, n_pow: u32) -> Result<S> {
    require_upper_triangular(a, "tri_power_entry")?;
    let n = a.rows();
    if n < 2 {
        return Err(AlgebraError::MatrixShape(
            "tri_power_entry needs size >= 2".into(),
        ));
    }
    if n_pow == 0 {
        return Ok(a.witness().zero_like());
    }
    let np = n_pow as usize;
    // table[k][r] is the (1,k) entry of B_k^r, B_k the trailing k-by-k
    // diagonal submatrix.
    let zero = a.witness().zero_like();
    let mut table: Vec<Vec<S>> = vec![vec![zero.clone(); np + 1]; n + 1];
    let z_last = a.at(n - 1, n - 1);
    let mut p = a.witness().one_like();
    for r in 1..=np {
        p = p.mul(z_last);
        table[1][r] = p.clone();
    }
    for k in 2..=n {
        let off = n - k;
        let z_lead = a.at(off, off);
        table[k][1] = a.at(off, n - 1).clone();
        for r in 1..np {
            let mut acc = z_lead.mul(&table[k][r]);
            for j in 2..=k {
                let x = a.at(off, off + j - 1);
                if x.is_zero() {
                    continue;
                }
                acc = acc.add(&x.mul(&table[k - j + 1][r]));
            }
            table[k][r + 1] = acc;
        }
    }
    Ok(table[n][np].clone())
}

/// Exponential of an upper triangular series matrix, exact to the
/// truncation order. All entries must have zero constant term, which makes
/// the Taylor sum finite: terms `A^N/N!` with `N > D` vanish entirely.
///
/// Evaluated in Horner form `I + A(I + A/2(I + ... (I + A/D)...))`.
pub fn tri_exp(a: &Matrix<TruncSeries>) -> Result<Matrix<TruncSeries>> {
    require_upper_triangular(a, "tri_exp")?;
    if !a.has_zero_constant_terms() {
        return Err(AlgebraError::NonzeroConstantTerm(
            "tri_exp requires zero constant terms".into(),
        ));
    }
    horner_exp(a)
}

pub(crate) fn horner_exp(a: &Matrix<TruncSeries>) -> Result<Matrix<TruncSeries>> {
    let n = a.rows();
    let order = a.witness().order();
    let identity = Matrix::identity(n, a.witness());
    let mut b = identity.clone();
    for k in (1..=u64::from(order)).rev() {
        let ab = a.checked_mul(&b)?;
        b = identity.checked_add(&ab.scaled(&crate::rational::rat(1, k as i64)))?;
    }
    Ok(b)
}

/// Default relative threshold below which diagonal entries are treated as
/// confluent in the numeric backend.
pub fn default_confluence_threshold() -> BigFloat {
    numeric::pow2(-40)
}

/// Numeric exponential of an upper triangular matrix.
///
/// Diagonal: `e^{z_i}`. Adjacent off-diagonals use the exponential divided
/// difference directly. Longer-range entries use the commutation recurrence
/// `(z_i - z_j) E_ij = sum E_ik A_kj - sum A_ik E_kj`; when `|z_i - z_j|`
/// falls below the confluence threshold the entry falls back to the
/// case-free path sum over confluent divided differences.
pub fn tri_exp_numeric(
    a: &Matrix<NumericScalar>,
    confluence_threshold: Option<BigFloat>,
) -> Result<Matrix<NumericScalar>> {
    require_upper_triangular(a, "tri_exp_numeric")?;
    let n = a.rows();
    let tol = confluence_threshold.unwrap_or_else(default_confluence_threshold);
    let mut e = Matrix::zero(n, n, a.witness());
    for i in 0..n {
        e.set(i, i, a.at(i, i).exp_value());
    }
    for span in 1..n {
        for i in 0..(n - span) {
            let j = i + span;
            let value = if span == 1 {
                a.at(i, j).mul(&f_exp_numeric(a.at(i, i), a.at(j, j)))
            } else {
                let zi = a.at(i, i);
                let zj = a.at(j, j);
                let diff = zi.sub(zj);
                let mut scale = NumericScalar::from_f64(1.0).magnitude();
                scale = scale.max(&zi.magnitude());
                scale = scale.max(&zj.magnitude());
                let p = numeric::precision() + 32;
                let cutoff = tol.mul(&scale, p, astro_float::RoundingMode::ToEven);
                let confluent = diff
                    .magnitude()
                    .cmp(&cutoff)
                    .map(|c| c < 0)
                    .unwrap_or(true);
                if confluent {
                    path_sum_entry(a, i, j)
                } else {
                    let mut acc = e.at(i, i).mul(a.at(i, j));
                    for k in i + 1..j {
                        acc = acc.add(&e.at(i, k).mul(a.at(k, j)));
                    }
                    for k in i + 1..=j {
                        acc = acc.sub(&a.at(i, k).mul(e.at(k, j)));
                    }
                    acc.div(&diff)?
                }
            };
            e.set(i, j, value);
        }
    }
    Ok(e)
}

/// Case-free evaluation of one exponential entry as a sum over increasing
/// index paths, each weighted by the confluent divided difference of the
/// exponential over the path's diagonal nodes.
fn path_sum_entry(a: &Matrix<NumericScalar>, i: usize, j: usize) -> NumericScalar {
    let mut total = a.witness().zero_like();
    let interior: Vec<usize> = ((i + 1)..j).collect();
    let subsets = 1usize << interior.len();
    for mask in 0..subsets {
        let mut path = vec![i];
        for (bit, &k) in interior.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                path.push(k);
            }
        }
        path.push(j);
        let mut weight = a.witness().one_like();
        for w in path.windows(2) {
            weight = weight.mul(a.at(w[0], w[1]));
            if weight.is_zero() {
                break;
            }
        }
        if weight.is_zero() {
            continue;
        }
        let nodes: Vec<NumericScalar> = path.iter().map(|&k| a.at(k, k).clone()).collect();
        total = total.add(&weight.mul(&divided_difference_exp_numeric(&nodes)));
    }
    total
}

/// Numeric scaling-and-squaring Taylor reference for validation.
pub fn exp_numeric_reference(a: &Matrix<NumericScalar>, squarings: u32) -> Matrix<NumericScalar> {
    let n = a.rows();
    let scale = crate::rational::Rational::new(
        1.into(),
        num_bigint::BigInt::from(2u64).pow(squarings),
    );
    let scaled = a.scaled(&scale);
    let mut sum = Matrix::identity(n, a.witness());
    let mut term = Matrix::identity(n, a.witness());
    let eps = numeric::pow2(-(numeric::precision() as i32) - 8);
    for k in 1..64u64 {
        term = term
            .checked_mul(&scaled)
            .expect("square matrices")
            .scaled(&crate::rational::rat(1, k as i64));
        sum = sum.checked_add(&term).expect("same shape");
        if term.entries().iter().all(|v| v.below(&eps)) {
            break;
        }
    }
    let mut result = sum;
    for _ in 0..squarings {
        result = result.checked_mul(&result).expect("square");
    }
    result
}
