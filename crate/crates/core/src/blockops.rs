//! Dense block assembly primitives and a banded Cholesky solver.
//!
//! The merge operators interleave the columns (or rows) of a coarse-indexed
//! block and a surplus-indexed block according to an [`IndexSets`] partition.
//! The stacking operators glue element blocks along a shared node: vertically
//! with one shared column, horizontally with one shared row, or with the
//! shared corner summed (finite element assembly).

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Row-major dense matrix of `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims("DenseMatrix::from_vec", rows * cols, data.len()));
        }
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn column_vector(values: &[f64]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::dims(
                "matmul",
                format!("{} rows", self.cols),
                format!("{} rows", rhs.rows),
            ));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = rhs.row(k);
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::dims("matvec", self.cols, x.len()));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn add(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn sub(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    fn zip_with(
        &self,
        rhs: &DenseMatrix,
        op: &'static str,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<DenseMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::dims(
                op,
                format!("{:?}", self.shape()),
                format!("{:?}", rhs.shape()),
            ));
        }
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise absolute difference; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Number of entries with `|x| > tol`.
    pub fn count_nonzero(&self, tol: f64) -> usize {
        self.data.iter().filter(|v| v.abs() > tol).count()
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    fn place(&mut self, block: &DenseMatrix, r0: usize, c0: usize, accumulate: bool) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                let v = block[(i, j)];
                let dst = &mut self[(r0 + i, c0 + j)];
                if accumulate {
                    *dst += v;
                } else {
                    *dst = v;
                }
            }
        }
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Partition of the fine-level node indices `0..n` into the coarse set
/// `delta` and the surplus set `nabla`, both ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSets {
    pub delta: Vec<usize>,
    pub nabla: Vec<usize>,
}

impl IndexSets {
    /// Builds and validates a partition of `0..delta.len() + nabla.len()`.
    pub fn new(delta: Vec<usize>, nabla: Vec<usize>) -> Result<Self> {
        let n = delta.len() + nabla.len();
        let mut seen = vec![false; n];
        for &k in delta.iter().chain(&nabla) {
            if k >= n || seen[k] {
                return Err(Error::InvalidArgument(format!(
                    "index sets do not partition 0..{n} (offending index {k})"
                )));
            }
            seen[k] = true;
        }
        if !delta.windows(2).all(|w| w[0] < w[1]) || !nabla.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("index sets must be ascending".into()));
        }
        Ok(Self { delta, nabla })
    }

    /// Even indices coarse, odd indices surplus.
    pub fn even_odd(n: usize) -> Self {
        Self {
            delta: (0..n).step_by(2).collect(),
            nabla: (1..n).step_by(2).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.delta.len() + self.nabla.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Merges the columns of `a` (indexed by `idx.delta`) and `b` (indexed by
/// `idx.nabla`) into one matrix with `idx.len()` columns.
pub fn merge_cols(a: &DenseMatrix, b: &DenseMatrix, idx: &IndexSets) -> Result<DenseMatrix> {
    if a.rows != b.rows {
        return Err(Error::dims("merge_cols rows", a.rows, b.rows));
    }
    if a.cols != idx.delta.len() {
        return Err(Error::dims("merge_cols |delta|", idx.delta.len(), a.cols));
    }
    if b.cols != idx.nabla.len() {
        return Err(Error::dims("merge_cols |nabla|", idx.nabla.len(), b.cols));
    }
    let mut out = DenseMatrix::zeros(a.rows, idx.len());
    for i in 0..a.rows {
        for (c, &k) in idx.delta.iter().enumerate() {
            out[(i, k)] = a[(i, c)];
        }
        for (c, &k) in idx.nabla.iter().enumerate() {
            out[(i, k)] = b[(i, c)];
        }
    }
    Ok(out)
}

/// Row analogue of [`merge_cols`].
pub fn merge_rows(a: &DenseMatrix, b: &DenseMatrix, idx: &IndexSets) -> Result<DenseMatrix> {
    if a.cols != b.cols {
        return Err(Error::dims("merge_rows cols", a.cols, b.cols));
    }
    if a.rows != idx.delta.len() {
        return Err(Error::dims("merge_rows |delta|", idx.delta.len(), a.rows));
    }
    if b.rows != idx.nabla.len() {
        return Err(Error::dims("merge_rows |nabla|", idx.nabla.len(), b.rows));
    }
    let mut out = DenseMatrix::zeros(idx.len(), a.cols);
    for (r, &k) in idx.delta.iter().enumerate() {
        out.data[k * a.cols..(k + 1) * a.cols].copy_from_slice(a.row(r));
    }
    for (r, &k) in idx.nabla.iter().enumerate() {
        out.data[k * a.cols..(k + 1) * a.cols].copy_from_slice(b.row(r));
    }
    Ok(out)
}

/// Stacks `b` below `a` so that `b`'s first column lies under `a`'s last
/// column. Shape `(m + p) x (n + q - 1)`.
pub fn stack_col_overlap(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let cols = (a.cols + b.cols).saturating_sub(1);
    let mut out = DenseMatrix::zeros(a.rows + b.rows, cols);
    out.place(a, 0, 0, false);
    out.place(b, a.rows, a.cols.saturating_sub(1), false);
    out
}

/// Places `b` to the right of `a` so that `b`'s first row continues `a`'s
/// last row. Shape `(m + p - 1) x (n + q)`.
pub fn stack_row_overlap(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let rows = (a.rows + b.rows).saturating_sub(1);
    let mut out = DenseMatrix::zeros(rows, a.cols + b.cols);
    out.place(a, 0, 0, false);
    out.place(b, a.rows.saturating_sub(1), a.cols, false);
    out
}

/// Diagonal concatenation with the shared corner entry summed.
/// Shape `(m + p - 1) x (n + q - 1)`.
pub fn stack_overlap_sum(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let rows = (a.rows + b.rows).saturating_sub(1);
    let cols = (a.cols + b.cols).saturating_sub(1);
    let mut out = DenseMatrix::zeros(rows, cols);
    out.place(a, 0, 0, false);
    out.place(
        b,
        a.rows.saturating_sub(1),
        a.cols.saturating_sub(1),
        true,
    );
    out
}

/// Plain block-diagonal concatenation. Shape `(m + p) x (n + q)`.
pub fn block_diag(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(a.rows + b.rows, a.cols + b.cols);
    out.place(a, 0, 0, false);
    out.place(b, a.rows, a.cols, false);
    out
}

/// Folds `count` copies of `block` with a binary stacking operator.
pub fn repeat_stack(
    block: &DenseMatrix,
    count: usize,
    op: fn(&DenseMatrix, &DenseMatrix) -> DenseMatrix,
) -> DenseMatrix {
    assert!(count > 0, "repeat_stack needs at least one block");
    (1..count).fold(block.clone(), |acc, _| op(&acc, block))
}

/// Symmetric positive-definite matrix in lower band storage.
///
/// Row `i` stores the entries `(i, i - bandwidth) ..= (i, i)`; positions
/// left of column zero are padding.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedSpdMatrix {
    dim: usize,
    bandwidth: usize,
    band: Vec<f64>,
}

impl BandedSpdMatrix {
    pub fn zeros(dim: usize, bandwidth: usize) -> Self {
        Self {
            dim,
            bandwidth,
            band: vec![0.0; dim * (bandwidth + 1)],
        }
    }

    /// Extracts the lower band of a symmetric dense matrix. Entries outside
    /// the band are ignored.
    pub fn from_dense(m: &DenseMatrix, bandwidth: usize) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::dims("BandedSpdMatrix::from_dense", "square", format!("{:?}", m.shape())));
        }
        let mut out = Self::zeros(m.rows, bandwidth);
        for i in 0..m.rows {
            for j in i.saturating_sub(bandwidth)..=i {
                out.set(i, j, m[(i, j)]);
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bandwidth);
        i * (self.bandwidth + 1) + (self.bandwidth + j - i)
    }

    /// Entry `(i, j)`; symmetric, zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bandwidth {
            0.0
        } else {
            self.band[self.slot(i, j)]
        }
    }

    /// Sets entry `(i, j)` (and implicitly `(j, i)`).
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.bandwidth, "entry ({i}, {j}) outside the band");
        let s = self.slot(i, j);
        self.band[s] = value;
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.bandwidth, "entry ({i}, {j}) outside the band");
        let s = self.slot(i, j);
        self.band[s] += value;
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in i.saturating_sub(self.bandwidth)..=i {
                let v = self.get(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    /// `y = G x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        let mut y = vec![0.0; self.dim];
        for i in 0..self.dim {
            let d = self.band[self.slot(i, i)];
            y[i] += d * x[i];
            for j in i.saturating_sub(self.bandwidth)..i {
                let v = self.band[self.slot(i, j)];
                y[i] += v * x[j];
                y[j] += v * x[i];
            }
        }
        y
    }

    /// Band Cholesky `G = L L^T` in O(dim * bandwidth^2).
    pub fn cholesky(&self) -> Result<BandedCholesky> {
        let b = self.bandwidth;
        let mut l = self.clone();
        for i in 0..self.dim {
            let lo = i.saturating_sub(b);
            for j in lo..=i {
                let mut sum = l.band[l.slot(i, j)];
                for k in lo.max(j.saturating_sub(b))..j {
                    sum -= l.band[l.slot(i, k)] * l.band[l.slot(j, k)];
                }
                if j == i {
                    if sum.is_nan() || sum <= 0.0 || !sum.is_finite() {
                        return Err(Error::NotSpd { row: i, pivot: sum });
                    }
                    let s = l.slot(i, i);
                    l.band[s] = sum.sqrt();
                } else {
                    let s = l.slot(i, j);
                    l.band[s] = sum / l.band[l.slot(j, j)];
                }
            }
        }
        Ok(BandedCholesky { factor: l })
    }
}

/// Lower band Cholesky factor of a [`BandedSpdMatrix`].
#[derive(Clone, Debug)]
pub struct BandedCholesky {
    factor: BandedSpdMatrix,
}

impl BandedCholesky {
    pub fn dim(&self) -> usize {
        self.factor.dim
    }

    /// Overwrites `x` with `G^{-1} x`.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let l = &self.factor;
        let b = l.bandwidth;
        assert_eq!(x.len(), l.dim);
        for i in 0..l.dim {
            let mut s = x[i];
            let lo = i.saturating_sub(b);
            for (k, xk) in x.iter().enumerate().take(i).skip(lo) {
                s -= l.band[l.slot(i, k)] * xk;
            }
            x[i] = s / l.band[l.slot(i, i)];
        }
        for i in (0..l.dim).rev() {
            let mut s = x[i];
            let hi = (i + b + 1).min(l.dim);
            for (k, xk) in x.iter().enumerate().take(hi).skip(i + 1) {
                s -= l.band[l.slot(k, i)] * xk;
            }
            x[i] = s / l.band[l.slot(i, i)];
        }
    }
}

/// Solves `G X = rhs` column by column through a band Cholesky factorization.
pub fn banded_cholesky_solve(g: &BandedSpdMatrix, rhs: &DenseMatrix) -> Result<DenseMatrix> {
    if rhs.rows != g.dim {
        return Err(Error::dims("banded_cholesky_solve", g.dim, rhs.rows));
    }
    let chol = g.cholesky()?;
    let mut out = DenseMatrix::zeros(rhs.rows, rhs.cols);
    let mut col = vec![0.0; rhs.rows];
    for j in 0..rhs.cols {
        for (i, c) in col.iter_mut().enumerate() {
            *c = rhs[(i, j)];
        }
        chol.solve_in_place(&mut col);
        for (i, c) in col.iter().enumerate() {
            out[(i, j)] = *c;
        }
    }
    Ok(out)
}

/// Dense LU solve (partial pivoting). Used only to cross-check the banded path.
pub fn dense_solve(a: &DenseMatrix, rhs: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows != a.cols || rhs.rows != a.rows {
        return Err(Error::dims(
            "dense_solve",
            format!("square {}x{}", a.rows, a.rows),
            format!("{:?} / rhs {:?}", a.shape(), rhs.shape()),
        ));
    }
    let m = nalgebra::DMatrix::from_row_slice(a.rows, a.cols, &a.data);
    let r = nalgebra::DMatrix::from_row_slice(rhs.rows, rhs.cols, &rhs.data);
    let x = m
        .lu()
        .solve(&r)
        .ok_or_else(|| Error::InvalidArgument("singular matrix in dense_solve".into()))?;
    let mut out = DenseMatrix::zeros(rhs.rows, rhs.cols);
    for i in 0..rhs.rows {
        for j in 0..rhs.cols {
            out[(i, j)] = x[(i, j)];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    fn random(rows: usize, cols: usize, seed: &mut u64) -> DenseMatrix {
        let data = (0..rows * cols).map(|_| lcg(seed)).collect();
        DenseMatrix::from_vec(rows, cols, data).unwrap()
    }

    #[test]
    fn merge_cols_trivial() {
        let idx = IndexSets::new(vec![0], vec![1]).unwrap();
        let m = merge_cols(&DenseMatrix::from_rows(&[[1.0]]), &DenseMatrix::from_rows(&[[2.0]]), &idx).unwrap();
        assert_eq!(m, DenseMatrix::from_rows(&[[1.0, 2.0]]));
    }

    #[test]
    fn merge_of_identities_is_permutation() {
        let idx = IndexSets::even_odd(5);
        let mut a = DenseMatrix::zeros(5, 3);
        let mut b = DenseMatrix::zeros(5, 2);
        for (k, &d) in idx.delta.iter().enumerate() {
            a[(d, k)] = 1.0;
        }
        for (k, &n) in idx.nabla.iter().enumerate() {
            b[(n, k)] = 1.0;
        }
        assert_eq!(merge_cols(&a, &b, &idx).unwrap(), DenseMatrix::identity(5));
        let at = a.transpose();
        let bt = b.transpose();
        assert_eq!(merge_rows(&at, &bt, &idx).unwrap(), DenseMatrix::identity(5));
    }

    #[test]
    fn haar_level_one_blocks() {
        // A_0 = (I - U P) merged with U, P = I, U = 1/2.
        let idx = IndexSets::even_odd(2);
        let a = merge_cols(
            &DenseMatrix::from_rows(&[[0.5]]),
            &DenseMatrix::from_rows(&[[0.5]]),
            &idx,
        )
        .unwrap();
        assert_eq!(a, DenseMatrix::from_rows(&[[0.5, 0.5]]));
        let c = merge_rows(&DenseMatrix::identity(1), &DenseMatrix::identity(1), &idx).unwrap();
        assert_eq!(c, DenseMatrix::from_rows(&[[1.0], [1.0]]));
    }

    #[test]
    fn merge_dimension_errors() {
        let idx = IndexSets::even_odd(3);
        let a = DenseMatrix::zeros(2, 2);
        let b = DenseMatrix::zeros(3, 1);
        assert!(matches!(merge_cols(&a, &b, &idx), Err(Error::DimensionMismatch { .. })));
        let b = DenseMatrix::zeros(2, 2);
        assert!(merge_cols(&a, &b, &idx).is_err());
        assert!(merge_rows(&a.transpose(), &DenseMatrix::zeros(1, 3), &idx).is_err());
    }

    #[test]
    fn merge_product_identity() {
        let mut seed = 7;
        let idx = IndexSets::new(vec![0, 3, 4], vec![1, 2, 5]).unwrap();
        let a = random(3, 3, &mut seed);
        let b = random(3, 3, &mut seed);
        let c = random(3, 3, &mut seed);
        let d = random(3, 3, &mut seed);
        let lhs = merge_cols(&a, &b, &idx)
            .unwrap()
            .matmul(&merge_rows(&c, &d, &idx).unwrap())
            .unwrap();
        let rhs = a.matmul(&c).unwrap().add(&b.matmul(&d).unwrap()).unwrap();
        assert!(lhs.max_abs_diff(&rhs) <= 1e-13);
        let t = merge_cols(&a, &b, &idx).unwrap().transpose();
        assert_eq!(t, merge_rows(&a.transpose(), &b.transpose(), &idx).unwrap());
    }

    #[test]
    fn index_sets_reject_bad_partitions() {
        assert!(IndexSets::new(vec![0, 1], vec![1]).is_err());
        assert!(IndexSets::new(vec![0, 3], vec![1]).is_err());
        assert!(IndexSets::new(vec![2, 0], vec![1]).is_err());
    }

    #[test]
    fn stacking_shapes_and_values() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0]]);
        let b = DenseMatrix::from_rows(&[[3.0, 4.0]]);
        assert_eq!(
            stack_col_overlap(&a, &b),
            DenseMatrix::from_rows(&[[1.0, 2.0, 0.0], [0.0, 3.0, 4.0]])
        );
        assert_eq!(
            stack_row_overlap(&a.transpose(), &b.transpose()),
            DenseMatrix::from_rows(&[[1.0, 0.0], [2.0, 3.0], [0.0, 4.0]])
        );
        let half = DenseMatrix::from_rows(&[[0.5, 0.5]]);
        assert_eq!(
            stack_col_overlap(&half, &half),
            DenseMatrix::from_rows(&[[0.5, 0.5, 0.0], [0.0, 0.5, 0.5]])
        );
        let one = DenseMatrix::from_rows(&[[1.0]]);
        assert_eq!(stack_overlap_sum(&one, &one), DenseMatrix::from_rows(&[[2.0]]));
        let h = 0.125;
        let g = DenseMatrix::from_rows(&[[2.0 * h]]);
        assert_eq!(stack_overlap_sum(&g, &g), DenseMatrix::from_rows(&[[4.0 * h]]));
        assert_eq!(
            stack_row_overlap(&DenseMatrix::from_rows(&[[h]]), &DenseMatrix::from_rows(&[[h]])),
            DenseMatrix::from_rows(&[[h, h]])
        );

        for (m, n, p, q) in [(2, 3, 2, 3), (1, 4, 3, 2), (3, 1, 1, 1)] {
            let a = DenseMatrix::zeros(m, n);
            let b = DenseMatrix::zeros(p, q);
            assert_eq!(stack_col_overlap(&a, &b).shape(), (m + p, n + q - 1));
            assert_eq!(stack_row_overlap(&a, &b).shape(), (m + p - 1, n + q));
            assert_eq!(stack_overlap_sum(&a, &b).shape(), (m + p - 1, n + q - 1));
            assert_eq!(block_diag(&a, &b).shape(), (m + p, n + q));
        }
        for q in 1..5 {
            for r in 1..6 {
                let s = repeat_stack(&DenseMatrix::zeros(q, q + 1), r, stack_col_overlap);
                assert_eq!(s.shape(), (r * q, r * q + 1));
            }
        }
    }

    #[test]
    fn block_diag_examples() {
        let one = DenseMatrix::from_rows(&[[1.0]]);
        let two = DenseMatrix::from_rows(&[[2.0]]);
        assert_eq!(block_diag(&one, &two), DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 2.0]]));
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(
            block_diag(&a, &one),
            DenseMatrix::from_rows(&[[1.0, 2.0, 0.0], [3.0, 4.0, 0.0], [0.0, 0.0, 1.0]])
        );
        assert_eq!(block_diag(&a, &a).row(3), &[0.0, 0.0, 3.0, 4.0]);
    }

    #[test]
    fn linear_mass_assembly_matches_global_quadrature() {
        // Two linear elements of width h on [0, 2h]: the exact global mass
        // matrix of the three hats, integrated independently by Simpson's
        // rule per element (exact for the quadratic integrands).
        let h = 0.25;
        let local = DenseMatrix::from_rows(&[[h / 3.0, h / 6.0], [h / 6.0, h / 3.0]]);
        let assembled = stack_overlap_sum(&local, &local);
        let hat = |k: usize, x: f64| (1.0 - ((x - k as f64 * h) / h).abs()).max(0.0);
        let mut oracle = DenseMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for e in 0..2 {
                    let (a, b) = (e as f64 * h, (e + 1) as f64 * h);
                    let m = 0.5 * (a + b);
                    let f = |x: f64| hat(i, x) * hat(j, x);
                    s += (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
                }
                oracle[(i, j)] = s;
            }
        }
        assert!(assembled.max_abs_diff(&oracle) < 1e-15);
    }

    #[test]
    fn banded_solve_examples() {
        let g = BandedSpdMatrix::from_dense(&DenseMatrix::identity(4), 0).unwrap();
        let rhs = DenseMatrix::column_vector(&[1.0, -2.0, 3.0, 0.5]);
        assert_eq!(banded_cholesky_solve(&g, &rhs).unwrap(), rhs);

        let g = BandedSpdMatrix::from_dense(&DenseMatrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]), 1).unwrap();
        let x = banded_cholesky_solve(&g, &DenseMatrix::column_vector(&[1.0, 1.0])).unwrap();
        assert!((x[(0, 0)] - 1.0 / 3.0).abs() < 1e-15);
        assert!((x[(1, 0)] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn banded_solve_rejects_indefinite() {
        let g = BandedSpdMatrix::from_dense(&DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]), 1).unwrap();
        let err = banded_cholesky_solve(&g, &DenseMatrix::column_vector(&[1.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::NotSpd { row: 1, .. }));
    }

    #[test]
    fn band_storage_roundtrip_and_matvec() {
        let mut seed = 3;
        let mut g = BandedSpdMatrix::zeros(6, 2);
        for i in 0usize..6 {
            for j in i.saturating_sub(2)..=i {
                g.set(i, j, lcg(&mut seed));
            }
        }
        let dense = g.to_dense();
        assert_eq!(BandedSpdMatrix::from_dense(&dense, 2).unwrap(), g);
        let x: Vec<f64> = (0..6).map(|_| lcg(&mut seed)).collect();
        let y = g.matvec(&x);
        let yd = dense.matvec(&x).unwrap();
        for (a, b) in y.iter().zip(&yd) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
