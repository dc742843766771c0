//! Canonical generalized-eigenbases and eigencoordinates of upper
//! triangular matrices.
//!
//! For an upper triangular `A` with diagonal `f` the canonical basis
//! consists of vectors `v_j = (-t_{1,j}, ..., -t_{j-1,j}, 1, 0, ..., 0)`
//! with `t_{i,j} = 0` whenever `f_i = f_j`, and
//! `A v_j = f_j v_j + sum_p s_{i_p,j} v_{i_p}` over the earlier positions
//! `i_p` carrying the same eigenvalue. The eigencoordinate `T_{i,j}` is
//! `t_{i,j}` for distinct eigenvalue pairs and `s_{i,j}` for equal ones.
//!
//! Everything here is generic over an exact field scalar: series fractions
//! for matrices over truncated series, plain rationals for rational
//! matrices.

use std::collections::BTreeMap;

use crate::error::{AlgebraError, Result};
use crate::matrix::Matrix;
use crate::scalar::{ExpScalar, FieldScalar, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoordKind {
    /// Eigenvector coefficient, pair with distinct eigenvalues.
    T,
    /// Nilpotent-action coefficient, pair with equal eigenvalues.
    S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoordValue<K> {
    pub kind: CoordKind,
    pub value: K,
}

/// The canonical basis data: all `t` coefficients (including the zeros
/// forced on equal-eigenvalue pairs) and the `s` coefficients.
#[derive(Clone, Debug)]
pub struct CanonicalBasis<K> {
    n: usize,
    diagonal: Vec<K>,
    t: BTreeMap<(usize, usize), K>,
    s: BTreeMap<(usize, usize), K>,
}

impl<K: FieldScalar> CanonicalBasis<K> {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn diagonal(&self) -> &[K] {
        &self.diagonal
    }

    pub fn t_value(&self, i: usize, j: usize) -> &K {
        &self.t[&(i, j)]
    }

    pub fn s_value(&self, i: usize, j: usize) -> Option<&K> {
        self.s.get(&(i, j))
    }

    /// The basis as the columns of an upper unitriangular matrix.
    pub fn basis_matrix(&self) -> Matrix<K> {
        let witness = &self.diagonal[0];
        Matrix::from_fn(self.n, self.n, |r, c| {
            if r == c {
                witness.one_like()
            } else if r < c {
                self.t[&(r, c)].neg()
            } else {
                witness.zero_like()
            }
        })
    }

    /// Positions before `j` carrying the same eigenvalue.
    fn earlier_same(&self, j: usize) -> Vec<usize> {
        (0..j)
            .filter(|&i| self.diagonal[i] == self.diagonal[j])
            .collect()
    }
}

/// The eigencoordinate map `(i,j) -> T_{i,j}(A)` together with the diagonal.
#[derive(Clone, Debug)]
pub struct Eigencoordinates<K> {
    n: usize,
    diagonal: Vec<K>,
    entries: BTreeMap<(usize, usize), CoordValue<K>>,
}

impl<K: FieldScalar> Eigencoordinates<K> {
    pub fn new(diagonal: Vec<K>, entries: BTreeMap<(usize, usize), CoordValue<K>>) -> Result<Self> {
        let n = diagonal.len();
        if entries.len() != n * (n - 1) / 2 {
            return Err(AlgebraError::Validation(format!(
                "expected {} eigencoordinate entries, got {}",
                n * (n - 1) / 2,
                entries.len()
            )));
        }
        for (&(i, j), coord) in &entries {
            if i >= j || j >= n {
                return Err(AlgebraError::Validation(format!(
                    "eigencoordinate index ({i},{j}) out of range"
                )));
            }
            let same = diagonal[i] == diagonal[j];
            let expected = if same { CoordKind::S } else { CoordKind::T };
            if coord.kind != expected {
                return Err(AlgebraError::Validation(format!(
                    "eigencoordinate ({i},{j}) tagged {:?} but the diagonal says {:?}",
                    coord.kind, expected
                )));
            }
        }
        Ok(Eigencoordinates {
            n,
            diagonal,
            entries,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn diagonal(&self) -> &[K] {
        &self.diagonal
    }

    pub fn entry(&self, i: usize, j: usize) -> &CoordValue<K> {
        &self.entries[&(i, j)]
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &CoordValue<K>)> {
        self.entries.iter()
    }

    /// The `t` coefficient of a pair: the stored value for T-pairs, zero
    /// for S-pairs (condition 2 of the canonical basis).
    fn t_of(&self, i: usize, j: usize) -> K {
        let coord = &self.entries[&(i, j)];
        match coord.kind {
            CoordKind::T => coord.value.clone(),
            CoordKind::S => coord.value.zero_like(),
        }
    }

    /// Structural equality: same diagonal and same coordinate values.
    pub fn equals(&self, other: &Self) -> bool {
        self.n == other.n
            && self.diagonal == other.diagonal
            && self.entries.len() == other.entries.len()
            && self.entries.iter().all(|(key, coord)| {
                other
                    .entries
                    .get(key)
                    .map(|o| o.kind == coord.kind && o.value == coord.value)
                    .unwrap_or(false)
            })
    }
}

fn validate_upper<K: Scalar>(a: &Matrix<K>) -> Result<()> {
    if !a.is_square() {
        return Err(AlgebraError::MatrixShape(
            "eigencoordinates of a non-square matrix".into(),
        ));
    }
    if !a.is_upper_triangular() {
        return Err(AlgebraError::MatrixShape(
            "eigencoordinates need an upper triangular matrix".into(),
        ));
    }
    Ok(())
}

/// Solves for the canonical basis by back-substitution, column by column,
/// rows j-1 down to 1 within each column: each row equation determines
/// exactly one new unknown (`t_{r,j}` off the eigenvalue class, `s_{r,j}`
/// on it).
pub fn canonical_basis<K: FieldScalar>(a: &Matrix<K>) -> Result<CanonicalBasis<K>> {
    validate_upper(a)?;
    let n = a.rows();
    let diagonal = a.diagonal_entries();
    let mut basis = CanonicalBasis {
        n,
        diagonal,
        t: BTreeMap::new(),
        s: BTreeMap::new(),
    };
    for j in 0..n {
        let same_class = basis.earlier_same(j);
        for r in (0..j).rev() {
            // u_r = g_{r,j} - sum_{r<c<j} g_{r,c} t_{c,j}
            let mut u = a.at(r, j).clone();
            for c in (r + 1)..j {
                let t_cj = &basis.t[&(c, j)];
                if !t_cj.is_zero() && !a.at(r, c).is_zero() {
                    u = u.sub(&a.at(r, c).mul(t_cj));
                }
            }
            // + sum over later same-class positions p > r: s_{p,j} t_{r,p}
            for &p in same_class.iter().filter(|&&p| p > r) {
                let s_pj = &basis.s[&(p, j)];
                let t_rp = &basis.t[&(r, p)];
                if !s_pj.is_zero() && !t_rp.is_zero() {
                    u = u.add(&s_pj.mul(t_rp));
                }
            }
            if basis.diagonal[r] == basis.diagonal[j] {
                // designated unknown is s_{r,j}; condition 2 forces t = 0
                basis.t.insert((r, j), u.zero_like());
                basis.s.insert((r, j), u);
            } else {
                let pivot = basis.diagonal[r].sub(&basis.diagonal[j]);
                debug_assert!(!pivot.is_zero(), "designated pivot vanished");
                basis.t.insert((r, j), u.div(&pivot)?);
            }
        }
    }
    Ok(basis)
}

/// The eigencoordinates of an upper triangular matrix.
pub fn eigencoordinates<K: FieldScalar>(a: &Matrix<K>) -> Result<Eigencoordinates<K>> {
    let basis = canonical_basis(a)?;
    let mut entries = BTreeMap::new();
    for j in 0..basis.n {
        for i in 0..j {
            let coord = if basis.diagonal[i] == basis.diagonal[j] {
                CoordValue {
                    kind: CoordKind::S,
                    value: basis.s[&(i, j)].clone(),
                }
            } else {
                CoordValue {
                    kind: CoordKind::T,
                    value: basis.t[&(i, j)].clone(),
                }
            };
            entries.insert((i, j), coord);
        }
    }
    Eigencoordinates::new(basis.diagonal, entries)
}

/// Reconstructs the unique upper triangular matrix with the given
/// eigencoordinates, by running the defining equations forward.
pub fn matrix_from_eigencoordinates<K: FieldScalar>(
    ec: &Eigencoordinates<K>,
) -> Result<Matrix<K>> {
    let n = ec.n;
    let witness = &ec.diagonal[0];
    let mut a = Matrix::zero(n, n, witness);
    for i in 0..n {
        a.set(i, i, ec.diagonal[i].clone());
    }
    for j in 0..n {
        let same_class: Vec<usize> = (0..j)
            .filter(|&i| ec.diagonal[i] == ec.diagonal[j])
            .collect();
        for r in (0..j).rev() {
            // w_r is the designated unknown's defining combination
            let coord = &ec.entries[&(r, j)];
            let w = match coord.kind {
                CoordKind::S => coord.value.clone(),
                CoordKind::T => {
                    let pivot = ec.diagonal[r].sub(&ec.diagonal[j]);
                    coord.value.mul(&pivot)
                }
            };
            // u_r = w_r - sum_{p same, p > r} s_{p,j} t_{r,p}
            let mut u = w;
            for &p in same_class.iter().filter(|&&p| p > r) {
                let s_pj = &ec.entries[&(p, j)].value;
                let t_rp = ec.t_of(r, p);
                if !s_pj.is_zero() && !t_rp.is_zero() {
                    u = u.sub(&s_pj.mul(&t_rp));
                }
            }
            // g_{r,j} = u_r + sum_{r<c<j} g_{r,c} t_{c,j}
            let mut g = u;
            for c in (r + 1)..j {
                let t_cj = ec.t_of(c, j);
                if !t_cj.is_zero() && !a.at(r, c).is_zero() {
                    g = g.add(&a.at(r, c).mul(&t_cj));
                }
            }
            a.set(r, j, g);
        }
    }
    Ok(a)
}

/// Predicts the eigencoordinates of `E(A)` from those of `A` without
/// computing the exponential: `T` entries are unchanged; each repeated
/// eigenvalue block `S` maps to `e^z (exp(S) - I)` where `exp(S)` is the
/// finite nilpotent exponential of the block.
pub fn predict_exp_eigencoords<K>(ec: &Eigencoordinates<K>) -> Result<Eigencoordinates<K>>
where
    K: FieldScalar + ExpScalar,
{
    let n = ec.n;
    let mut new_diagonal = Vec::with_capacity(n);
    for d in &ec.diagonal {
        new_diagonal.push(d.exp()?);
    }
    let mut entries = ec.entries.clone();

    // group positions by eigenvalue class, in order of first occurrence
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        match classes
            .iter_mut()
            .find(|c| ec.diagonal[c[0]] == ec.diagonal[i])
        {
            Some(class) => class.push(i),
            None => classes.push(vec![i]),
        }
    }

    for class in classes.iter().filter(|c| c.len() > 1) {
        let k = class.len();
        let witness = &ec.diagonal[class[0]];
        // strictly upper block of s-values in the class basis
        let s_block = Matrix::from_fn(k, k, |l, r| {
            if l < r {
                ec.entries[&(class[l], class[r])].value.clone()
            } else {
                witness.zero_like()
            }
        });
        // exp(S) - I as a finite sum S + S^2/2! + ... + S^{k-1}/(k-1)!
        let mut power = s_block.clone();
        let mut exp_minus_id = s_block.clone();
        for deg in 2..k as u64 {
            power = power.checked_mul(&s_block)?;
            exp_minus_id = exp_minus_id
                .checked_add(&power.scaled(&crate::rational::inverse_factorial(deg)))?;
        }
        let ez = ec.diagonal[class[0]].exp()?;
        for l in 0..k {
            for r in (l + 1)..k {
                let value = ez.mul(exp_minus_id.at(l, r));
                entries.insert(
                    (class[l], class[r]),
                    CoordValue {
                        kind: CoordKind::S,
                        value,
                    },
                );
            }
        }
    }
    Eigencoordinates::new(new_diagonal, entries)
}

/// Exact residual check of the defining identity
/// `A v_j = f_j v_j + sum_p s_{i_p,j} v_{i_p}` for every column.
pub fn verify_basis_identity<K: FieldScalar>(
    a: &Matrix<K>,
    basis: &CanonicalBasis<K>,
) -> Result<bool> {
    validate_upper(a)?;
    let n = a.rows();
    let bm = basis.basis_matrix();
    for j in 0..n {
        // lhs = A v_j
        for r in 0..n {
            let mut lhs = a.at(r, 0).zero_like();
            for c in 0..n {
                if !a.at(r, c).is_zero() && !bm.at(c, j).is_zero() {
                    lhs = lhs.add(&a.at(r, c).mul(bm.at(c, j)));
                }
            }
            let mut rhs = basis.diagonal[j].mul(bm.at(r, j));
            for &p in basis.earlier_same(j).iter() {
                let s = &basis.s[&(p, j)];
                if !s.is_zero() && !bm.at(r, p).is_zero() {
                    rhs = rhs.add(&s.mul(bm.at(r, p)));
                }
            }
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
