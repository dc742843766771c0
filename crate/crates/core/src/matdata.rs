//! The data of a matrix: distinct eigenvalues, multiplicities, generalized
//! eigenspaces, and the nilpotent operators induced on them, together with
//! the chart that parametrizes the eigenspace/nilpotent information and the
//! exponential's action on all of it.
//!
//! Exact decomposition requires exact eigenvalue access: either the matrix
//! is upper triangular (eigenvalues on the diagonal) or it was built through
//! `phi` with the eigenvalues supplied. General matrices with unknown
//! eigenvalues are out of the exact scope.
//!
//! Bases are canonicalized in two steps: the generalized eigenspace gets
//! its column-reduced echelon basis, and that basis is then refined along
//! the kernel filtration `ker N ⊂ ker N^2 ⊂ ...` of the nilpotent part, so
//! the stored nilpotent block is literally strictly upper triangular. The
//! refinement is intrinsic, and the exponential preserves it (`exp(N) - I`
//! is `N` times a unit commuting with `N`), which is what makes data of
//! `E(A)` directly comparable with the exponential of the data of `A`.

use crate::error::{AlgebraError, Result};
use crate::linalg::{invert, kernel_basis, reduced_row_echelon, solve_matrix, PivotRule};
use crate::matrix::Matrix;
use crate::rational::inverse_factorial;
use crate::scalar::{ExpScalar, FieldScalar, Scalar};
use crate::series::TruncSeries;

/// One eigenvalue block of the data.
#[derive(Clone, Debug)]
pub struct DataBlock<K> {
    pub eigenvalue: K,
    pub multiplicity: usize,
    /// Flag-adapted canonical basis of the generalized eigenspace, as the
    /// columns of an n-by-m matrix.
    pub basis: Matrix<K>,
    /// The action of `A - z` in that basis; strictly upper triangular.
    pub nilpotent: Matrix<K>,
    /// For each basis column, the row carrying its normalized 1.
    pub pivot_rows: Vec<usize>,
    /// For each basis column, its kernel-filtration piece (0-based): the
    /// least `l` with the column annihilated by `N^{l+1}`.
    pub piece_of_col: Vec<usize>,
}

/// The data of a matrix. Blocks are kept in first-occurrence order of the
/// eigenvalue list they were derived from.
#[derive(Clone, Debug)]
pub struct MatrixData<K> {
    pub n: usize,
    pub blocks: Vec<DataBlock<K>>,
}

impl<K: FieldScalar> MatrixData<K> {
    pub fn distinct_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn eigenvalues(&self) -> Vec<K> {
        self.blocks.iter().map(|b| b.eigenvalue.clone()).collect()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.multiplicity).collect()
    }

    /// The transition matrix P whose column blocks are the eigenspace bases.
    pub fn transition_matrix(&self) -> Matrix<K> {
        let witness = &self.blocks[0].eigenvalue;
        let n = self.n;
        let mut p = Matrix::zero(n, n, witness);
        let mut col = 0;
        for block in &self.blocks {
            for c in 0..block.multiplicity {
                for r in 0..n {
                    p.set(r, col, block.basis.at(r, c).clone());
                }
                col += 1;
            }
        }
        p
    }

    /// The block diagonal `J = blockdiag(z_i I + N_i)`.
    pub fn block_diagonal(&self) -> Matrix<K> {
        let witness = &self.blocks[0].eigenvalue;
        let n = self.n;
        let mut j = Matrix::zero(n, n, witness);
        let mut off = 0;
        for block in &self.blocks {
            let m = block.multiplicity;
            for r in 0..m {
                for c in 0..m {
                    let mut v = block.nilpotent.at(r, c).clone();
                    if r == c {
                        v = v.add(&block.eigenvalue);
                    }
                    j.set(off + r, off + c, v);
                }
            }
            off += m;
        }
        j
    }

    /// Reassembles `P J P^{-1}`; exact inverse of the decomposition.
    pub fn reconstruct(&self) -> Result<Matrix<K>> {
        let p = self.transition_matrix();
        let j = self.block_diagonal();
        let p_inv = invert(&p)?;
        p.checked_mul(&j)?.checked_mul(&p_inv)
    }

    /// Structural equality, block by block.
    pub fn equals(&self, other: &Self) -> bool {
        self.n == other.n
            && self.blocks.len() == other.blocks.len()
            && self.blocks.iter().zip(&other.blocks).all(|(a, b)| {
                a.eigenvalue == b.eigenvalue
                    && a.multiplicity == b.multiplicity
                    && a.basis == b.basis
                    && a.nilpotent == b.nilpotent
                    && a.pivot_rows == b.pivot_rows
                    && a.piece_of_col == b.piece_of_col
            })
    }
}

/// Row-space echelon of a set of vectors: canonical spanning rows in
/// reduced echelon form together with their pivot columns.
fn row_space_echelon<K: FieldScalar>(
    vectors: &[Vec<K>],
) -> Result<(Vec<Vec<K>>, Vec<usize>)> {
    let mat = Matrix::from_rows(vectors.to_vec())?;
    let ech = reduced_row_echelon(&mat, PivotRule::FirstNonZero)?;
    let rows = (0..ech.rank)
        .map(|r| (0..mat.cols()).map(|c| ech.mat.at(r, c).clone()).collect())
        .collect();
    Ok((rows, ech.pivot_cols))
}

/// Canonicalizes one eigenvalue block from the raw kernel span.
fn build_block<K: FieldScalar>(
    a: &Matrix<K>,
    z: &K,
    kernel: Vec<Vec<K>>,
) -> Result<DataBlock<K>> {
    let n = a.rows();
    // Step 1: column-reduced echelon basis B0 of the eigenspace.
    let (rows, eigen_pivots) = row_space_echelon(&kernel)?;
    let m = rows.len();
    let b0 = Matrix::from_fn(n, m, |r, c| rows[c][r].clone());
    // Step 2: the nilpotent action in that basis.
    let shifted = a.checked_sub(&Matrix::diagonal(&vec![z.clone(); n]))?;
    let image = shifted.checked_mul(&b0)?;
    let n0 = solve_matrix(&b0, &image)?;
    if !n0.pow(m as u32)?.is_zero() {
        return Err(AlgebraError::NotNilpotent(
            "restriction to the generalized eigenspace is not nilpotent".into(),
        ));
    }
    // Step 3: refine along the kernel filtration of N0 so the block
    // becomes strictly upper triangular.
    let witness = a.witness();
    let mut m_cols: Vec<Vec<K>> = Vec::with_capacity(m);
    let mut piece_of_col = Vec::with_capacity(m);
    let mut prev_pivots: Vec<usize> = Vec::new();
    let mut power = Matrix::identity(m, witness);
    let mut piece = 0usize;
    while m_cols.len() < m {
        power = power.checked_mul(&n0)?;
        let ker = kernel_basis(&power)?;
        let (ker_rows, ker_pivots) = row_space_echelon(&ker)?;
        for (row, &pivot) in ker_rows.iter().zip(&ker_pivots) {
            if !prev_pivots.contains(&pivot) {
                m_cols.push(row.clone());
                piece_of_col.push(piece);
            }
        }
        prev_pivots = ker_pivots;
        piece += 1;
        if piece > m {
            return Err(AlgebraError::NotNilpotent(
                "kernel filtration failed to exhaust the block".into(),
            ));
        }
    }
    let m_mat = Matrix::from_fn(m, m, |r, c| m_cols[c][r].clone());
    let basis = b0.checked_mul(&m_mat)?;
    let nilpotent = solve_matrix(&m_mat, &n0.checked_mul(&m_mat)?)?;
    // strictness is guaranteed by the filtration; verify defensively
    for r in 0..m {
        for c in 0..=r {
            if !nilpotent.at(r, c).is_zero() {
                return Err(AlgebraError::NotNilpotent(
                    "flag-adapted nilpotent block is not strictly upper".into(),
                ));
            }
        }
    }
    // pivot row of basis column c: the eigenspace pivot row selected by the
    // block-coordinate pivot of the filtration vector
    let pivot_rows: Vec<usize> = (0..m)
        .map(|c| {
            let block_pivot = m_cols[c]
                .iter()
                .position(|v| !v.is_zero())
                .expect("filtration vector nonzero");
            eigen_pivots[block_pivot]
        })
        .collect();
    Ok(DataBlock {
        eigenvalue: z.clone(),
        multiplicity: m,
        basis,
        nilpotent,
        pivot_rows,
        piece_of_col,
    })
}

/// Computes the data of `a` given exact eigenvalues (with or without
/// repetitions; order of first occurrence is kept).
pub fn matrix_data<K: FieldScalar>(a: &Matrix<K>, eigenvalues: &[K]) -> Result<MatrixData<K>> {
    if !a.is_square() {
        return Err(AlgebraError::MatrixShape(
            "data of a non-square matrix".into(),
        ));
    }
    let n = a.rows();
    if eigenvalues.is_empty() {
        return Err(AlgebraError::Unsupported(
            "matrix_data requires exact eigenvalues (triangular input or phi-built)".into(),
        ));
    }
    let mut distinct: Vec<K> = Vec::new();
    for z in eigenvalues {
        if !distinct.iter().any(|w| w == z) {
            distinct.push(z.clone());
        }
    }
    let mut blocks = Vec::with_capacity(distinct.len());
    let mut total = 0usize;
    for z in &distinct {
        let shifted = a.checked_sub(&Matrix::diagonal(&vec![z.clone(); n]))?;
        let power = shifted.pow(n as u32)?;
        let kernel = kernel_basis(&power)?;
        if kernel.is_empty() {
            return Err(AlgebraError::Unsupported(format!(
                "supplied eigenvalue produces a trivial eigenspace: {z:?}"
            )));
        }
        let block = build_block(a, z, kernel)?;
        total += block.multiplicity;
        blocks.push(block);
    }
    if total != n {
        return Err(AlgebraError::Unsupported(format!(
            "eigenvalue list does not exhaust the space: multiplicities sum to {total}, size is {n}"
        )));
    }
    Ok(MatrixData { n, blocks })
}

/// Data of an upper triangular matrix: eigenvalues read off the diagonal.
pub fn matrix_data_triangular<K: FieldScalar>(a: &Matrix<K>) -> Result<MatrixData<K>> {
    if !a.is_upper_triangular() {
        return Err(AlgebraError::MatrixShape(
            "matrix_data_triangular needs an upper triangular matrix".into(),
        ));
    }
    let diag = a.diagonal_entries();
    matrix_data(a, &diag)
}

/// Finite nilpotent exponential `sum_{r<n} N^r / r!`.
pub fn nilpotent_exp<K: FieldScalar>(n_mat: &Matrix<K>) -> Result<Matrix<K>> {
    let n = n_mat.rows();
    if !n_mat.is_square() {
        return Err(AlgebraError::MatrixShape(
            "nilpotent_exp of non-square".into(),
        ));
    }
    if !n_mat.pow(n as u32)?.is_zero() {
        return Err(AlgebraError::NotNilpotent(
            "nilpotent_exp requires N^n = 0".into(),
        ));
    }
    let mut sum = Matrix::identity(n, n_mat.witness());
    let mut power = Matrix::identity(n, n_mat.witness());
    for r in 1..n as u64 {
        power = power.checked_mul(n_mat)?;
        if power.is_zero() {
            break;
        }
        sum = sum.checked_add(&power.scaled(&inverse_factorial(r)))?;
    }
    Ok(sum)
}

/// Finite nilpotent logarithm `sum_{r>=1} (-1)^{r+1} (U - I)^r / r`; the
/// exact two-sided inverse of `nilpotent_exp` on nilpotents.
pub fn nilpotent_log<K: FieldScalar>(u_mat: &Matrix<K>) -> Result<Matrix<K>> {
    let n = u_mat.rows();
    if !u_mat.is_square() {
        return Err(AlgebraError::MatrixShape(
            "nilpotent_log of non-square".into(),
        ));
    }
    let shifted = u_mat.checked_sub(&Matrix::identity(n, u_mat.witness()))?;
    if !shifted.pow(n as u32)?.is_zero() {
        return Err(AlgebraError::NotNilpotent(
            "nilpotent_log requires U - I nilpotent".into(),
        ));
    }
    let mut sum = Matrix::zero(n, n, u_mat.witness());
    let mut power = Matrix::identity(n, u_mat.witness());
    for r in 1..n as i64 {
        power = power.checked_mul(&shifted)?;
        if power.is_zero() {
            break;
        }
        let coeff = crate::rational::rat(if r % 2 == 1 { 1 } else { -1 }, r);
        sum = sum.checked_add(&power.scaled(&coeff))?;
    }
    Ok(sum)
}

/// The exponential's action on data: eigenvalues exponentiate, bases,
/// multiplicities and filtration structure stay, and each nilpotent block
/// maps to `e^z (exp(N) - I)`.
pub fn exp_data<K>(data: &MatrixData<K>) -> Result<MatrixData<K>>
where
    K: FieldScalar + ExpScalar,
{
    let mut blocks = Vec::with_capacity(data.blocks.len());
    for block in &data.blocks {
        let ez = block.eigenvalue.exp()?;
        let m = block.multiplicity;
        let exp_n = nilpotent_exp(&block.nilpotent)?;
        let n_prime = exp_n
            .checked_sub(&Matrix::identity(m, block.nilpotent.witness()))?
            .scale_by(&ez);
        blocks.push(DataBlock {
            eigenvalue: ez,
            multiplicity: m,
            basis: block.basis.clone(),
            nilpotent: n_prime,
            pivot_rows: block.pivot_rows.clone(),
            piece_of_col: block.piece_of_col.clone(),
        });
    }
    Ok(MatrixData {
        n: data.n,
        blocks,
    })
}

/// Truncated exponential of a general (not necessarily triangular) series
/// matrix by explicit accumulation of powers; exact to the truncation
/// order because all entries vanish at order zero.
pub fn general_exp(a: &Matrix<TruncSeries>) -> Result<Matrix<TruncSeries>> {
    if !a.is_square() {
        return Err(AlgebraError::MatrixShape(
            "general_exp of non-square".into(),
        ));
    }
    if !a.has_zero_constant_terms() {
        return Err(AlgebraError::NonzeroConstantTerm(
            "general_exp requires zero constant terms".into(),
        ));
    }
    let n = a.rows();
    let order = a.witness().order();
    let mut sum = Matrix::identity(n, a.witness());
    let mut power = Matrix::identity(n, a.witness());
    for k in 1..=u64::from(order) {
        power = power.checked_mul(a)?;
        if power.is_zero() {
            break;
        }
        sum = sum.checked_add(&power.scaled(&inverse_factorial(k)))?;
    }
    Ok(sum)
}

/// Chart point on the eigenspace/nilpotent parameter variety.
///
/// Per block, the stored structure is: the pivot row of each basis column,
/// the filtration piece of each column, and the free coordinates. A basis
/// entry at the pivot row of column `c'` is forced (1 on the own pivot,
/// 0 otherwise) whenever `piece(c') <= piece(c)`, and free otherwise; all
/// remaining basis entries and the strict upper nilpotent entries are free.
#[derive(Clone, Debug, PartialEq)]
pub struct WkmPoint<K> {
    pub n: usize,
    pub multiplicities: Vec<usize>,
    pub pivot_rows: Vec<Vec<usize>>,
    pub piece_of_col: Vec<Vec<usize>>,
    pub coords: Vec<K>,
}

impl<K: FieldScalar> WkmPoint<K> {
    pub fn coordinate_count(&self) -> usize {
        self.coords.len()
    }
}

fn basis_entry_is_free(pivot_rows: &[usize], piece_of_col: &[usize], r: usize, c: usize) -> bool {
    match pivot_rows.iter().position(|&p| p == r) {
        None => true,
        Some(cp) => piece_of_col[cp] > piece_of_col[c],
    }
}

/// Encodes data into its chart point (dropping the eigenvalues).
pub fn encode_wkm<K: FieldScalar>(data: &MatrixData<K>) -> WkmPoint<K> {
    let mut coords = Vec::new();
    let mut pivot_rows = Vec::new();
    let mut pieces = Vec::new();
    for block in &data.blocks {
        let m = block.multiplicity;
        for c in 0..m {
            for r in 0..data.n {
                if basis_entry_is_free(&block.pivot_rows, &block.piece_of_col, r, c) {
                    coords.push(block.basis.at(r, c).clone());
                }
            }
        }
        for r in 0..m {
            for c in (r + 1)..m {
                coords.push(block.nilpotent.at(r, c).clone());
            }
        }
        pivot_rows.push(block.pivot_rows.clone());
        pieces.push(block.piece_of_col.clone());
    }
    WkmPoint {
        n: data.n,
        multiplicities: data.multiplicities(),
        pivot_rows,
        piece_of_col: pieces,
        coords,
    }
}

/// Decodes a chart point back into bases and nilpotent blocks, attaching
/// the supplied pairwise distinct eigenvalues.
pub fn decode_wkm<K: FieldScalar>(point: &WkmPoint<K>, eigenvalues: &[K]) -> Result<MatrixData<K>> {
    let k = point.multiplicities.len();
    if eigenvalues.len() != k {
        return Err(AlgebraError::Validation(format!(
            "{} eigenvalues for {} blocks",
            eigenvalues.len(),
            k
        )));
    }
    for i in 0..k {
        for j in 0..i {
            if eigenvalues[i] == eigenvalues[j] {
                return Err(AlgebraError::Validation(
                    "chart eigenvalues must be pairwise distinct".into(),
                ));
            }
        }
    }
    if point.multiplicities.iter().sum::<usize>() != point.n {
        return Err(AlgebraError::Validation(
            "multiplicities do not sum to the size".into(),
        ));
    }
    let witness = eigenvalues
        .first()
        .ok_or_else(|| AlgebraError::Validation("no eigenvalues".into()))?;
    let mut blocks = Vec::with_capacity(k);
    let mut cursor = 0usize;
    for (b, &m) in point.multiplicities.iter().enumerate() {
        let pivots = &point.pivot_rows[b];
        let pieces = &point.piece_of_col[b];
        if pivots.len() != m || pieces.len() != m {
            return Err(AlgebraError::Validation(
                "chart structure does not match the multiplicity".into(),
            ));
        }
        let mut basis = Matrix::zero(point.n, m, witness);
        for c in 0..m {
            for r in 0..point.n {
                if basis_entry_is_free(pivots, pieces, r, c) {
                    if cursor >= point.coords.len() {
                        return Err(AlgebraError::Validation(
                            "chart coordinate list too short".into(),
                        ));
                    }
                    basis.set(r, c, point.coords[cursor].clone());
                    cursor += 1;
                } else {
                    let cp = pivots.iter().position(|&p| p == r).unwrap();
                    basis.set(
                        r,
                        c,
                        if cp == c {
                            witness.one_like()
                        } else {
                            witness.zero_like()
                        },
                    );
                }
            }
        }
        let mut nilpotent = Matrix::zero(m, m, witness);
        for r in 0..m {
            for c in (r + 1)..m {
                if cursor >= point.coords.len() {
                    return Err(AlgebraError::Validation(
                        "chart coordinate list too short".into(),
                    ));
                }
                nilpotent.set(r, c, point.coords[cursor].clone());
                cursor += 1;
            }
        }
        blocks.push(DataBlock {
            eigenvalue: eigenvalues[b].clone(),
            multiplicity: m,
            basis,
            nilpotent,
            pivot_rows: pivots.clone(),
            piece_of_col: pieces.clone(),
        });
    }
    if cursor != point.coords.len() {
        return Err(AlgebraError::Validation(format!(
            "chart has {} coordinates, consumed {cursor}",
            point.coords.len()
        )));
    }
    Ok(MatrixData {
        n: point.n,
        blocks,
    })
}

/// The parametrization map: reassembles `P J P^{-1}` from a chart point
/// and pairwise distinct eigenvalues.
pub fn phi<K: FieldScalar>(point: &WkmPoint<K>, eigenvalues: &[K]) -> Result<Matrix<K>> {
    decode_wkm(point, eigenvalues)?.reconstruct()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraction::SeriesFraction;
    use crate::rational::{rat_int, random_rational, Rational};
    use crate::rng::{stream_rng, StreamRng};

    fn m(rows: Vec<Vec<i64>>) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(rat_int).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn diagonal_data() {
        // diag(1,1,2): k=2, multiplicities (2,1), trivial nilpotents
        let a = m(vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 2]]);
        let data = matrix_data_triangular(&a).unwrap();
        assert_eq!(data.distinct_count(), 2);
        assert_eq!(data.multiplicities(), vec![2, 1]);
        assert!(data.blocks.iter().all(|b| b.nilpotent.is_zero()));
        assert_eq!(
            data.blocks[0].basis,
            m(vec![vec![1, 0], vec![0, 1], vec![0, 0]])
        );
        assert_eq!(data.reconstruct().unwrap(), a);
    }

    #[test]
    fn jordan_block_data() {
        let z = rat_int(5);
        let a = Matrix::from_rows(vec![
            vec![z.clone(), rat_int(1)],
            vec![rat_int(0), z.clone()],
        ])
        .unwrap();
        let data = matrix_data_triangular(&a).unwrap();
        assert_eq!(data.distinct_count(), 1);
        assert_eq!(data.multiplicities(), vec![2]);
        assert_eq!(data.blocks[0].nilpotent, m(vec![vec![0, 1], vec![0, 0]]));
        assert_eq!(data.blocks[0].piece_of_col, vec![0, 1]);
    }

    fn random_invertible(rng: &mut StreamRng, n: usize) -> Matrix<Rational> {
        loop {
            let p = Matrix::from_fn(n, n, |_, _| random_rational(rng, 5));
            if crate::linalg::exact_rank(&p) == n {
                return p;
            }
        }
    }

    #[test]
    fn phi_basics() {
        let data =
            matrix_data(&m(vec![vec![3, 0], vec![0, 4]]), &[rat_int(3), rat_int(4)]).unwrap();
        let point = encode_wkm(&data);
        assert_eq!(
            phi(&point, &[rat_int(3), rat_int(4)]).unwrap(),
            m(vec![vec![3, 0], vec![0, 4]])
        );
        // repeated eigenvalues are a domain error
        assert!(phi(&point, &[rat_int(3), rat_int(3)]).is_err());
        // k=1, z=0, single Jordan block, P=I: the block itself
        let jordan = m(vec![vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]]);
        let jdata = matrix_data(&jordan, &[rat_int(0)]).unwrap();
        let jpoint = encode_wkm(&jdata);
        assert_eq!(phi(&jpoint, &[rat_int(0)]).unwrap(), jordan);
    }

    #[test]
    fn phi_decompose_round_trip() {
        let mut rng = stream_rng(31, 0);
        for trial in 0..6 {
            let n = 4;
            let zs = vec![rat_int(trial as i64), rat_int(trial as i64 + 3)];
            let p = random_invertible(&mut rng, n);
            let mut j = Matrix::zero(n, n, &rat_int(0));
            for i in 0..3 {
                j.set(i, i, zs[0].clone());
            }
            j.set(0, 1, rat_int(1));
            j.set(1, 2, random_rational(&mut rng, 4));
            j.set(3, 3, zs[1].clone());
            let a = p
                .checked_mul(&j)
                .unwrap()
                .checked_mul(&invert(&p).unwrap())
                .unwrap();
            let data = matrix_data(&a, &zs).unwrap();
            assert_eq!(data.multiplicities(), vec![3, 1]);
            assert_eq!(data.reconstruct().unwrap(), a, "trial {trial}");
            // the flag-adapted nilpotent is strictly upper
            for r in 0..3 {
                for c in 0..=r {
                    assert!(data.blocks[0].nilpotent.at(r, c).is_zero());
                }
            }
            // encode/decode round trip in the chart
            let point = encode_wkm(&data);
            let back = decode_wkm(&point, &data.eigenvalues()).unwrap();
            assert!(back.equals(&data));
            assert_eq!(phi(&point, &data.eigenvalues()).unwrap(), a);
        }
    }

    #[test]
    fn nilpotent_exp_log_basics() {
        let zero3 = Matrix::zero(3, 3, &rat_int(0));
        assert_eq!(
            nilpotent_exp(&zero3).unwrap(),
            Matrix::identity(3, &rat_int(0))
        );
        assert_eq!(
            nilpotent_log(&Matrix::identity(3, &rat_int(0))).unwrap(),
            zero3
        );
        // [[0,a],[0,0]] -> [[1,a],[0,1]] and back
        let a = m(vec![vec![0, 7], vec![0, 0]]);
        let e = nilpotent_exp(&a).unwrap();
        assert_eq!(e, m(vec![vec![1, 7], vec![0, 1]]));
        assert_eq!(nilpotent_log(&e).unwrap(), a);
        // 4x4 Jordan block: I + N + N^2/2 + N^3/6
        let n4 = Matrix::from_fn(4, 4, |r, c| if c == r + 1 { rat_int(1) } else { rat_int(0) });
        let expect = Matrix::identity(4, &rat_int(0))
            .checked_add(&n4)
            .unwrap()
            .checked_add(&n4.pow(2).unwrap().scaled(&crate::rational::rat(1, 2)))
            .unwrap()
            .checked_add(&n4.pow(3).unwrap().scaled(&crate::rational::rat(1, 6)))
            .unwrap();
        assert_eq!(nilpotent_exp(&n4).unwrap(), expect);
        // non-nilpotent input errors
        assert!(nilpotent_exp(&m(vec![vec![1, 0], vec![0, 0]])).is_err());
        assert!(nilpotent_log(&m(vec![vec![2, 0], vec![0, 1]])).is_err());
    }

    #[test]
    fn nilpotent_exp_log_inverse_property() {
        let mut rng = stream_rng(32, 0);
        for n in 2..=6usize {
            for _ in 0..5 {
                let nil = Matrix::from_fn(n, n, |r, c| {
                    if r < c {
                        random_rational(&mut rng, 9)
                    } else {
                        rat_int(0)
                    }
                });
                let back = nilpotent_log(&nilpotent_exp(&nil).unwrap()).unwrap();
                assert_eq!(back, nil, "n={n}");
            }
        }
    }

    fn embed(q: &Rational, num_vars: usize, order: u32) -> SeriesFraction {
        SeriesFraction::from_series(TruncSeries::constant(num_vars, order, q.clone()))
    }

    #[test]
    fn exp_data_matches_general_exp() {
        // phi-built series matrix: P rational, eigenvalue series distinct.
        // Orders must cover the minor degrees of the kernel eliminations
        // (roughly n times the entry degree), hence 24 here rather than 8.
        let mut rng = stream_rng(33, 0);
        let order = 24;
        let t1 = TruncSeries::var(1, order, 0).unwrap();
        let zs = vec![
            SeriesFraction::from_series(t1.clone()),
            SeriesFraction::from_series(t1.scaled(&rat_int(2))),
        ];
        let n = 4;
        let p_rat = random_invertible(&mut rng, n);
        let p = p_rat.map(|q| embed(q, 1, order));
        let zero = zs[0].zero_like();
        let mut j = Matrix::zero(n, n, &zero);
        for i in 0..3 {
            j.set(i, i, zs[0].clone());
        }
        j.set(0, 1, zs[0].scale(&rat_int(2)));
        j.set(1, 2, zs[0].scale(&rat_int(-3)));
        j.set(3, 3, zs[1].clone());
        let a_frac = p
            .checked_mul(&j)
            .unwrap()
            .checked_mul(&invert(&p).unwrap())
            .unwrap();
        let a_series = a_frac
            .try_map(|f| {
                f.as_series()
                    .cloned()
                    .ok_or_else(|| AlgebraError::Validation("non-polynomial entry".into()))
            })
            .unwrap();
        let data = matrix_data(&a_frac, &zs).unwrap();
        assert_eq!(data.multiplicities(), vec![3, 1]);

        let lhs = exp_data(&data).unwrap();
        let e = general_exp(&a_series).unwrap();
        let e_frac = e.to_fractions();
        let ezs: Vec<SeriesFraction> = zs.iter().map(|z| z.exp().unwrap()).collect();
        let rhs = matrix_data(&e_frac, &ezs).unwrap();
        assert!(lhs.equals(&rhs));
    }

    #[test]
    fn exp_data_trivial_cases() {
        // all N = 0: E(A) is diagonal in the same basis
        let t1 = TruncSeries::var(1, 6, 0).unwrap();
        let zs = vec![
            SeriesFraction::from_series(t1.clone()),
            SeriesFraction::from_series(t1.scaled(&rat_int(3))),
        ];
        let diag = Matrix::diagonal(&zs);
        let sdata = matrix_data(&diag, &zs).unwrap();
        let edata = exp_data(&sdata).unwrap();
        for (b, z) in edata.blocks.iter().zip(&zs) {
            assert_eq!(&b.eigenvalue, &z.exp().unwrap());
            assert!(b.nilpotent.is_zero());
        }
        // z = 0 single Jordan block: N' = exp(N) - I
        let nil = m(vec![vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]]);
        let nil_s = nil.map(|q| embed(q, 1, 6));
        let zero_eig = vec![SeriesFraction::from_series(TruncSeries::zero(1, 6))];
        let ndata = matrix_data(&nil_s, &zero_eig).unwrap();
        let endata = exp_data(&ndata).unwrap();
        let expected = nilpotent_exp(&ndata.blocks[0].nilpotent)
            .unwrap()
            .checked_sub(&Matrix::identity(3, &zero_eig[0].one_like()))
            .unwrap();
        assert!(endata.blocks[0].nilpotent == expected);
    }

    #[test]
    fn general_exp_block_diagonal_and_similarity() {
        let mut rng = stream_rng(34, 0);
        let order = 6;
        let mk = |rng: &mut StreamRng| TruncSeries::random_polynomial(rng, 2, order, 3, 3, true);
        let z = TruncSeries::zero(2, order);
        let b11 = mk(&mut rng);
        let b12 = mk(&mut rng);
        let b21 = mk(&mut rng);
        let b22 = mk(&mut rng);
        let c11 = mk(&mut rng);
        let block = Matrix::from_rows(vec![
            vec![b11.clone(), b12.clone(), z.clone()],
            vec![b21.clone(), b22.clone(), z.clone()],
            vec![z.clone(), z.clone(), c11.clone()],
        ])
        .unwrap();
        let e = general_exp(&block).unwrap();
        let top = general_exp(
            &Matrix::from_rows(vec![
                vec![b11.clone(), b12.clone()],
                vec![b21.clone(), b22.clone()],
            ])
            .unwrap(),
        )
        .unwrap();
        assert_eq!(e.at(0, 0), top.at(0, 0));
        assert_eq!(e.at(0, 1), top.at(0, 1));
        assert_eq!(e.at(1, 0), top.at(1, 0));
        assert_eq!(e.at(1, 1), top.at(1, 1));
        assert_eq!(e.at(2, 2), &c11.exp().unwrap());
        assert!(e.at(0, 2).is_zero_series() && e.at(2, 0).is_zero_series());
        // zero matrix
        let zero_mat = Matrix::zero(2, 2, &z);
        assert_eq!(general_exp(&zero_mat).unwrap(), Matrix::identity(2, &z));
        // similarity: E(P A P^{-1}) = P E(A) P^{-1} with rational P
        let a = Matrix::from_fn(3, 3, |_, _| mk(&mut rng));
        let p_rat = random_invertible(&mut rng, 3);
        let p = p_rat.map(|q| embed(q, 2, order));
        let p_inv = invert(&p).unwrap();
        let a_frac = a.to_fractions();
        let conj = p.checked_mul(&a_frac).unwrap().checked_mul(&p_inv).unwrap();
        let conj_series = conj
            .try_map(|f| {
                f.as_series()
                    .cloned()
                    .ok_or_else(|| AlgebraError::Validation("non-polynomial".into()))
            })
            .unwrap();
        let lhs = general_exp(&conj_series).unwrap().to_fractions();
        let rhs = p
            .checked_mul(&general_exp(&a).unwrap().to_fractions())
            .unwrap()
            .checked_mul(&p_inv)
            .unwrap();
        assert!(lhs == rhs);
    }
}
