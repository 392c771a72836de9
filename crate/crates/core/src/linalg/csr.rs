use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::vector::{dot, norm, Vector};
use crate::error::{check_dim, Error, Result};

/// Compressed sparse row matrix.
///
/// Column indices are sorted and unique within each row and all stored
/// values are finite.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR arrays, validating every invariant.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::MalformedMatrix("matrix must have at least one row and column".into()));
        }
        if row_offsets.len() != n_rows + 1 {
            return Err(Error::MalformedMatrix(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                n_rows + 1
            )));
        }
        if row_offsets[0] != 0 {
            return Err(Error::MalformedMatrix("row_offsets[0] must be 0".into()));
        }
        if col_indices.len() != values.len() || row_offsets[n_rows] != values.len() {
            return Err(Error::MalformedMatrix(
                "row_offsets, col_indices and values lengths are inconsistent".into(),
            ));
        }
        for r in 0..n_rows {
            let (start, end) = (row_offsets[r], row_offsets[r + 1]);
            if start > end {
                return Err(Error::MalformedMatrix(format!("row_offsets decrease at row {r}")));
            }
            let cols = &col_indices[start..end];
            if cols.iter().any(|&c| c >= n_cols) {
                return Err(Error::MalformedMatrix(format!("column index out of range in row {r}")));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::MalformedMatrix(format!(
                    "column indices of row {r} are not sorted and unique"
                )));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix values"));
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Builds a matrix from `(row, col, value)` triplets in any order.
    /// Duplicate coordinates are summed.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(r, c, v) in &entries {
            if r >= n_rows || c >= n_cols {
                return Err(Error::MalformedMatrix(format!(
                    "entry ({r}, {c}) outside a {n_rows}x{n_cols} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("matrix values"));
            }
        }
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut row_offsets = vec![0usize; n_rows + 1];
        let mut col_indices = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            col_indices.push(c);
            values.push(v);
            row_offsets[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..n_rows {
            row_offsets[r + 1] += row_offsets[r];
        }
        Self::new(n_rows, n_cols, row_offsets, col_indices, values)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0))).expect("identity is well formed")
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self::from_triplets(n_rows, n_cols, std::iter::empty()).expect("zero matrix is well formed")
    }

    /// Converts a dense row-major matrix, dropping exact zeros.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::MalformedMatrix("dense rows have unequal lengths".into()));
        }
        let triplets = rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(move |(j, v)| (i, j, *v))
        });
        Self::from_triplets(n_rows, n_cols, triplets)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (r, row) in dense.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                row[*c] = *v;
            }
        }
        dense
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (start, end) = (self.row_offsets[r], self.row_offsets[r + 1]);
        (&self.col_indices[start..end], &self.values[start..end])
    }

    /// Iterates over stored entries as `(row, col, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(c, v)| (r, *c, *v))
        })
    }

    /// `A x`
    pub fn matvec(&self, x: &[f64]) -> Result<Vector> {
        check_dim("matvec", self.n_cols, x.len())?;
        let out = (0..self.n_rows)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(|(c, v)| v * x[*c]).sum()
            })
            .collect();
        Ok(Vector::from_vec_unchecked(out))
    }

    /// `Aᵀ y`
    pub fn matvec_transpose(&self, y: &[f64]) -> Result<Vector> {
        check_dim("matvec_transpose", self.n_rows, y.len())?;
        let mut out = vec![0.0; self.n_cols];
        for (r, yr) in y.iter().enumerate() {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                out[*c] += v * yr;
            }
        }
        Ok(Vector::from_vec_unchecked(out))
    }

    /// Sum of each column.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n_cols];
        for (c, v) in self.col_indices.iter().zip(&self.values) {
            sums[*c] += v;
        }
        sums
    }

    /// Lower estimate of the spectral norm `‖A‖₂` by power iteration on
    /// `AᵀA` from a seeded random start.
    ///
    /// The returned value is the Rayleigh-type quantity `‖A v‖` for a unit
    /// vector `v`, so it never exceeds `‖A‖₂`.
    pub fn operator_norm_estimate(&self, iterations: usize, seed: u64) -> f64 {
        let iterations = iterations.max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<f64> = (0..self.n_cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nv = norm(&v);
        if nv == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|x| *x /= nv);

        for _ in 0..iterations {
            let av = self.matvec(&v).expect("dimensions agree");
            let w = self.matvec_transpose(&av).expect("dimensions agree");
            let nw = norm(&w);
            if nw == 0.0 {
                return norm(&av);
            }
            v = w.iter().map(|x| x / nw).collect();
        }
        let av = self.matvec(&v).expect("dimensions agree");
        dot(&av, &av).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> CsrMatrix {
        CsrMatrix::from_dense(&[vec![1.0, 2.0], vec![0.0, 3.0]]).unwrap()
    }

    #[test]
    fn matvec_examples() {
        let id = CsrMatrix::identity(3);
        assert_eq!(id.matvec(&[1.0, 2.0, 3.0]).unwrap().as_slice(), &[1.0, 2.0, 3.0]);
        let z = CsrMatrix::zeros(2, 3);
        assert_eq!(z.matvec(&[1.0, -4.0, 2.0]).unwrap().as_slice(), &[0.0, 0.0]);
        assert_eq!(example().matvec(&[1.0, 1.0]).unwrap().as_slice(), &[3.0, 3.0]);
    }

    #[test]
    fn matvec_transpose_examples() {
        let id = CsrMatrix::identity(2);
        assert_eq!(id.matvec_transpose(&[4.0, 5.0]).unwrap().as_slice(), &[4.0, 5.0]);
        assert_eq!(example().matvec_transpose(&[1.0, 1.0]).unwrap().as_slice(), &[1.0, 5.0]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = example();
        assert!(matches!(a.matvec(&[1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            a.matvec_transpose(&[1.0, 2.0, 3.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn triplets_are_sorted_and_summed() {
        let a = CsrMatrix::from_triplets(2, 3, vec![(1, 2, 1.0), (0, 1, 2.0), (1, 0, 4.0), (1, 2, 0.5)])
            .unwrap();
        assert_eq!(a.row_offsets(), &[0, 1, 3]);
        assert_eq!(a.col_indices(), &[1, 0, 2]);
        assert_eq!(a.values(), &[2.0, 4.0, 1.5]);
    }

    #[test]
    fn rejects_malformed_arrays() {
        assert!(CsrMatrix::new(1, 2, vec![0, 2], vec![1, 0], vec![1.0, 1.0]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 2], vec![0, 0], vec![1.0, 1.0]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![1, 2], vec![0], vec![1.0]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 1], vec![2], vec![1.0]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 1], vec![0], vec![f64::NAN]).is_err());
        assert!(CsrMatrix::new(2, 2, vec![0, 1], vec![0], vec![1.0]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 1], vec![1], vec![1.0]).is_ok());
    }

    #[test]
    fn norm_estimate_simple_cases() {
        assert!((CsrMatrix::identity(5).operator_norm_estimate(10, 1) - 1.0).abs() < 1e-9);
        let d = CsrMatrix::from_dense(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((d.operator_norm_estimate(60, 3) - 2.0).abs() < 1e-6);
        assert_eq!(CsrMatrix::zeros(3, 4).operator_norm_estimate(10, 0), 0.0);
        let a = example();
        assert_eq!(a.operator_norm_estimate(20, 9), a.operator_norm_estimate(20, 9));
    }
}
