//! Exact dense linear algebra: rank, nullspace and solving over any exact
//! field scalar, plus a fraction-free integer elimination for rationals and
//! the sampled-point Jacobian rank.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{AlgebraError, Result};
use crate::matrix::Matrix;
use crate::rational::{normalize_to_integers, random_rational, Rational, DEFAULT_SAMPLE_HEIGHT};
use crate::rng::stream_rng;
use crate::scalar::FieldScalar;
use crate::series::TruncSeries;

/// Pivot selection order. Any rule gives the same rank; exposing two lets
/// tests cross-check the elimination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotRule {
    FirstNonZero,
    LastNonZero,
}

pub struct Echelon<K> {
    pub mat: Matrix<K>,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

/// Gauss-Jordan reduction to reduced row echelon form over an exact field.
pub fn reduced_row_echelon<K: FieldScalar>(mat: &Matrix<K>, rule: PivotRule) -> Result<Echelon<K>> {
    let mut m = mat.clone();
    let rows = m.rows();
    let cols = m.cols();
    let mut pivot_cols = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let pivot_row = {
            let mut found = None;
            for i in r..rows {
                if !m.at(i, c).is_zero() {
                    found = Some(i);
                    if rule == PivotRule::FirstNonZero {
                        break;
                    }
                }
            }
            found
        };
        let Some(p) = pivot_row else { continue };
        if p != r {
            for cc in 0..cols {
                let tmp = m.at(r, cc).clone();
                m.set(r, cc, m.at(p, cc).clone());
                m.set(p, cc, tmp);
            }
        }
        let inv = m.at(r, c).invert()?;
        for cc in c..cols {
            let v = m.at(r, cc).mul(&inv);
            m.set(r, cc, v);
        }
        for i in 0..rows {
            if i == r || m.at(i, c).is_zero() {
                continue;
            }
            let factor = m.at(i, c).clone();
            for cc in c..cols {
                let v = m.at(i, cc).sub(&factor.mul(m.at(r, cc)));
                m.set(i, cc, v);
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    Ok(Echelon {
        mat: m,
        rank: r,
        pivot_cols,
    })
}

/// Rank over an exact field.
pub fn rank<K: FieldScalar>(mat: &Matrix<K>) -> Result<usize> {
    Ok(reduced_row_echelon(mat, PivotRule::FirstNonZero)?.rank)
}

/// Canonical basis of the right nullspace: one vector per free column, with
/// a 1 in the free position. Vectors are in the order of the free columns.
pub fn kernel_basis<K: FieldScalar>(mat: &Matrix<K>) -> Result<Vec<Vec<K>>> {
    let ech = reduced_row_echelon(mat, PivotRule::FirstNonZero)?;
    let cols = mat.cols();
    let witness = mat.witness();
    let mut basis = Vec::new();
    let pivot_set: Vec<Option<usize>> = {
        let mut v = vec![None; cols];
        for (row, &pc) in ech.pivot_cols.iter().enumerate() {
            v[pc] = Some(row);
        }
        v
    };
    for free in 0..cols {
        if pivot_set[free].is_some() {
            continue;
        }
        let mut vec = vec![witness.zero_like(); cols];
        vec[free] = witness.one_like();
        for (col, pr) in pivot_set.iter().enumerate() {
            if let Some(row) = pr {
                vec[col] = ech.mat.at(*row, free).neg();
            }
        }
        basis.push(vec);
    }
    Ok(basis)
}

/// Solves `a * x = rhs` column by column. Requires full column rank of `a`
/// and consistency; both are verified exactly.
pub fn solve_matrix<K: FieldScalar>(a: &Matrix<K>, rhs: &Matrix<K>) -> Result<Matrix<K>> {
    if a.rows() != rhs.rows() {
        return Err(AlgebraError::MatrixShape(format!(
            "solve with {} equation rows vs {} rhs rows",
            a.rows(),
            rhs.rows()
        )));
    }
    let n = a.cols();
    let augmented = Matrix::from_fn(a.rows(), n + rhs.cols(), |r, c| {
        if c < n {
            a.at(r, c).clone()
        } else {
            rhs.at(r, c - n).clone()
        }
    });
    let ech = reduced_row_echelon(&augmented, PivotRule::FirstNonZero)?;
    if ech.pivot_cols.iter().any(|&c| c >= n) {
        return Err(AlgebraError::Singular("inconsistent linear system".into()));
    }
    if ech.rank < n {
        return Err(AlgebraError::Singular(
            "coefficient matrix does not have full column rank".into(),
        ));
    }
    Ok(Matrix::from_fn(n, rhs.cols(), |r, c| {
        ech.mat.at(r, n + c).clone()
    }))
}

/// Exact inverse of a square matrix.
pub fn invert<K: FieldScalar>(mat: &Matrix<K>) -> Result<Matrix<K>> {
    if !mat.is_square() {
        return Err(AlgebraError::MatrixShape("inverse of non-square matrix".into()));
    }
    solve_matrix(mat, &Matrix::identity(mat.rows(), mat.witness()))
}

/// Exact rank of a rational matrix via fraction-free (Bareiss) elimination
/// on the denominator-cleared integer matrix.
pub fn exact_rank(mat: &Matrix<Rational>) -> usize {
    exact_rank_with_pivot(mat, PivotRule::FirstNonZero)
}

pub fn exact_rank_with_pivot(mat: &Matrix<Rational>, rule: PivotRule) -> usize {
    let rows = mat.rows();
    let cols = mat.cols();
    // Clear denominators row by row; scaling rows by nonzero constants
    // preserves rank.
    let mut m: Vec<Vec<BigInt>> = (0..rows)
        .map(|r| {
            let mut lcm = BigInt::from(1);
            for c in 0..cols {
                lcm = lcm.lcm(mat.at(r, c).denom());
            }
            (0..cols)
                .map(|c| mat.at(r, c).numer() * (&lcm / mat.at(r, c).denom()))
                .collect()
        })
        .collect();

    let mut rank = 0usize;
    let mut prev_pivot = BigInt::from(1);
    for c in 0..cols {
        if rank >= rows {
            break;
        }
        let pivot_row = {
            let mut found = None;
            for r in rank..rows {
                if !m[r][c].is_zero() {
                    found = Some(r);
                    if rule == PivotRule::FirstNonZero {
                        break;
                    }
                }
            }
            found
        };
        let Some(p) = pivot_row else { continue };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for r in rank + 1..rows {
            for cc in c + 1..cols {
                let v = (&m[rank][c] * &m[r][cc] - &m[r][c] * &m[rank][cc]) / &prev_pivot;
                m[r][cc] = v;
            }
            m[r][c] = BigInt::zero();
        }
        prev_pivot = pivot;
        rank += 1;
    }
    rank
}

/// Basis of the right nullspace of a rational matrix, scaled to integer
/// entries with gcd 1 and a positive first nonzero entry.
pub fn exact_nullspace(mat: &Matrix<Rational>) -> Vec<Vec<BigInt>> {
    let basis = kernel_basis(mat).expect("rational elimination cannot fail");
    basis
        .into_iter()
        .map(|v| normalize_to_integers(&v).expect("kernel vectors are nonzero"))
        .collect()
}

/// Maximum exact rank of the Jacobian of `fns` over sampled rational points.
///
/// A certified lower bound for the generic rank; equal to it with
/// overwhelming probability. Monotone in `samples` by construction.
pub fn jacobian_rank_at_points(
    fns: &[TruncSeries],
    samples: u32,
    seed: u64,
    height: Option<u32>,
) -> Result<usize> {
    if fns.is_empty() {
        return Ok(0);
    }
    let num_vars = fns[0].num_vars();
    let order = fns[0].order();
    for f in fns {
        if f.num_vars() != num_vars || f.order() != order {
            return Err(AlgebraError::ShapeMismatch(
                "jacobian over series of mixed shapes".into(),
            ));
        }
    }
    let height = height.unwrap_or(DEFAULT_SAMPLE_HEIGHT);
    let mut jacobian = Vec::with_capacity(fns.len());
    for f in fns {
        let mut row = Vec::with_capacity(num_vars);
        for v in 0..num_vars {
            row.push(f.partial_derivative(v)?);
        }
        jacobian.push(row);
    }
    let mut best = 0usize;
    for s in 0..samples {
        let mut rng = stream_rng(seed, u64::from(s));
        let point: Vec<Rational> = (0..num_vars)
            .map(|_| random_rational(&mut rng, height))
            .collect();
        let values = Matrix::from_fn(fns.len(), num_vars, |r, c| {
            jacobian[r][c].evaluate(&point).expect("point length checked")
        });
        best = best.max(exact_rank(&values));
        if best == num_vars.min(fns.len()) {
            break;
        }
    }
    Ok(best)
}

/// Integer relation basis of the columns viewed as vectors: returns
/// normalized integer vectors `v` with `sum_i v_i * cols_i = 0`.
pub fn integer_column_relations(mat: &Matrix<Rational>) -> Vec<Vec<BigInt>> {
    exact_nullspace(mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn m(rows: Vec<Vec<i64>>) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(rat_int).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn rank_basics() {
        assert_eq!(exact_rank(&m(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]])), 3);
        assert_eq!(exact_rank(&m(vec![vec![0, 0], vec![0, 0]])), 0);
        assert_eq!(exact_rank(&m(vec![vec![1, 2], vec![2, 4]])), 1);
    }

    #[test]
    fn rank_pivot_rules_agree() {
        let cases = vec![
            m(vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]),
            m(vec![vec![0, 1], vec![1, 0], vec![1, 1]]),
            m(vec![vec![2, 4, 6], vec![1, 2, 3]]),
        ];
        for mat in cases {
            assert_eq!(
                exact_rank_with_pivot(&mat, PivotRule::FirstNonZero),
                exact_rank_with_pivot(&mat, PivotRule::LastNonZero)
            );
            assert_eq!(exact_rank(&mat), rank(&mat).unwrap());
        }
    }

    #[test]
    fn nullspace_examples() {
        let basis = exact_nullspace(&m(vec![vec![1, 2, -1]]));
        assert_eq!(basis.len(), 2);
        for v in &basis {
            let dot: BigInt = &v[0] + &v[1] * 2 - &v[2];
            assert!(dot.is_zero());
        }
        assert!(exact_nullspace(&m(vec![vec![1, 0], vec![0, 1]])).is_empty());
        let basis = exact_nullspace(&m(vec![vec![1, 1], vec![1, 1]]));
        assert_eq!(basis, vec![vec![BigInt::from(1), BigInt::from(-1)]]);
    }

    #[test]
    fn solve_and_invert() {
        let a = m(vec![vec![2, 1], vec![1, 1]]);
        let inv = invert(&a).unwrap();
        assert_eq!(a.checked_mul(&inv).unwrap(), Matrix::identity(2, &rat_int(1)));
        let singular = m(vec![vec![1, 2], vec![2, 4]]);
        assert!(invert(&singular).is_err());
        let rhs = m(vec![vec![3], vec![2]]);
        let x = solve_matrix(&a, &rhs).unwrap();
        assert_eq!(a.checked_mul(&x).unwrap(), rhs);
    }

    #[test]
    fn solve_detects_inconsistency() {
        let a = m(vec![vec![1, 0], vec![1, 0]]);
        let rhs = m(vec![vec![1], vec![2]]);
        assert!(solve_matrix(&a, &rhs).is_err());
    }

    #[test]
    fn rational_entries() {
        let a = Matrix::from_rows(vec![
            vec![rat(1, 2), rat(1, 3)],
            vec![rat(1, 5), rat(1, 1)],
        ])
        .unwrap();
        assert_eq!(exact_rank(&a), 2);
        // proportional rows with fractional entries
        let b = Matrix::from_rows(vec![
            vec![rat(1, 2), rat(1, 3)],
            vec![rat(3, 2), rat(1, 1)],
        ])
        .unwrap();
        assert_eq!(exact_rank(&b), 1);
    }

    #[test]
    fn jacobian_rank_examples() {
        let t1 = TruncSeries::var(2, 4, 0).unwrap();
        let t2 = TruncSeries::var(2, 4, 1).unwrap();
        let sum = t1.checked_add(&t2).unwrap();
        // [t1, t2, t1+t2] has rank 2
        assert_eq!(
            jacobian_rank_at_points(&[t1.clone(), t2.clone(), sum], 4, 11, None).unwrap(),
            2
        );
        // [t1, t1^2] in one variable has rank 1
        let u = TruncSeries::var(1, 4, 0).unwrap();
        let usq = u.checked_mul(&u).unwrap();
        assert_eq!(jacobian_rank_at_points(&[u, usq], 4, 11, None).unwrap(), 1);
        // [t1, t2, t1*t2] capped by the variable count
        let prod = t1.checked_mul(&t2).unwrap();
        assert_eq!(
            jacobian_rank_at_points(&[t1, t2, prod], 4, 11, None).unwrap(),
            2
        );
    }
}
