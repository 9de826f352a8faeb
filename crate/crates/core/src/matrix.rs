//! Design matrices in dense row-major or compressed sparse row storage.

use crate::error::{check_dim, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum DesignMatrix {
    Dense {
        rows: usize,
        cols: usize,
        /// Row-major, `rows * cols` entries.
        data: Vec<f64>,
    },
    Csr(CsrMatrix),
}

/// Row-compressed sparse matrix. Column indices are 0-based and strictly
/// increasing within a row; explicit zeros are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        check_dim("csr indptr", rows + 1, indptr.len())?;
        check_dim("csr values", indices.len(), values.len())?;
        if indptr[0] != 0 || indptr[rows] != indices.len() {
            return Err(Error::domain("csr indptr does not span the index array"));
        }
        for r in 0..rows {
            let (lo, hi) = (indptr[r], indptr[r + 1]);
            if lo > hi {
                return Err(Error::domain(format!("csr indptr decreases at row {r}")));
            }
            let row = &indices[lo..hi];
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::domain(format!(
                    "csr column indices not strictly increasing in row {r}"
                )));
            }
            if row.last().is_some_and(|&c| c >= cols) {
                return Err(Error::domain(format!("csr column index out of range in row {r}")));
            }
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::domain("matrix entries must be finite"));
        }
        Ok(CsrMatrix {
            rows,
            cols,
            indptr,
            indices,
            values,
        })
    }

    /// `(column, value)` pairs of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.indptr[r], self.indptr[r + 1]);
        self.indices[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }
}

impl DesignMatrix {
    pub fn dense(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_dim("dense matrix data", rows * cols, data.len())?;
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::domain("matrix entries must be finite"));
        }
        Ok(DesignMatrix::Dense { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(m * n);
        for r in rows {
            check_dim("matrix row length", n, r.len())?;
            data.extend_from_slice(r);
        }
        Self::dense(m, n, data)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut data = vec![0.0; n * n];
        for (i, &v) in d.iter().enumerate() {
            data[i * n + i] = v;
        }
        DesignMatrix::Dense {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            DesignMatrix::Dense { rows, .. } => *rows,
            DesignMatrix::Csr(c) => c.rows,
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            DesignMatrix::Dense { cols, .. } => *cols,
            DesignMatrix::Csr(c) => c.cols,
        }
    }

    /// Row `r` as `(column, value)` pairs, zeros skipped for dense storage.
    pub fn row_entries(&self, r: usize) -> Vec<(usize, f64)> {
        match self {
            DesignMatrix::Dense { cols, data, .. } => data[r * cols..(r + 1) * cols]
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(c, v)| (c, *v))
                .collect(),
            DesignMatrix::Csr(c) => c.row(r).collect(),
        }
    }

    /// `out = A x`.
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols());
        debug_assert_eq!(out.len(), self.rows());
        match self {
            DesignMatrix::Dense { cols, data, .. } => {
                for (o, row) in out.iter_mut().zip(data.chunks_exact(*cols)) {
                    *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
            DesignMatrix::Csr(c) => {
                for (r, o) in out.iter_mut().enumerate() {
                    *o = c.row(r).map(|(j, v)| v * x[j]).sum();
                }
            }
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows()];
        self.matvec_into(x, &mut out);
        out
    }

    /// `out = Aᵀ y`.
    pub fn matvec_t_into(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows());
        debug_assert_eq!(out.len(), self.cols());
        out.iter_mut().for_each(|o| *o = 0.0);
        match self {
            DesignMatrix::Dense { cols, data, .. } => {
                for (row, &yr) in data.chunks_exact(*cols).zip(y) {
                    if yr == 0.0 {
                        continue;
                    }
                    for (o, a) in out.iter_mut().zip(row) {
                        *o += a * yr;
                    }
                }
            }
            DesignMatrix::Csr(c) => {
                for (r, &yr) in y.iter().enumerate() {
                    for (j, v) in c.row(r) {
                        out[j] += v * yr;
                    }
                }
            }
        }
    }

    pub fn matvec_t(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols()];
        self.matvec_t_into(y, &mut out);
        out
    }

    /// `Σ_ij A_ij² = trace(AᵀA)`.
    pub fn frobenius_sq(&self) -> f64 {
        match self {
            DesignMatrix::Dense { data, .. } => data.iter().map(|v| v * v).sum(),
            DesignMatrix::Csr(c) => c.values.iter().map(|v| v * v).sum(),
        }
    }

    pub fn to_csr(&self) -> CsrMatrix {
        match self {
            DesignMatrix::Csr(c) => c.clone(),
            DesignMatrix::Dense { rows, cols, .. } => {
                let mut indptr = vec![0];
                let mut indices = Vec::new();
                let mut values = Vec::new();
                for r in 0..*rows {
                    for (j, v) in self.row_entries(r) {
                        indices.push(j);
                        values.push(v);
                    }
                    indptr.push(indices.len());
                }
                CsrMatrix {
                    rows: *rows,
                    cols: *cols,
                    indptr,
                    indices,
                    values,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (DesignMatrix, DesignMatrix) {
        let dense = DesignMatrix::from_rows(&[
            vec![1.0, 0.0, 2.0],
            vec![0.0, 0.0, 0.0],
            vec![-3.0, 4.0, 0.0],
        ])
        .unwrap();
        let sparse = DesignMatrix::Csr(dense.to_csr());
        (dense, sparse)
    }

    #[test]
    fn dense_and_sparse_agree() {
        let (d, s) = sample();
        let x = [0.5, -1.0, 2.0];
        assert_eq!(d.matvec(&x), vec![4.5, 0.0, -5.5]);
        assert_eq!(d.matvec(&x), s.matvec(&x));
        let y = [1.0, 7.0, -1.0];
        assert_eq!(d.matvec_t(&y), vec![4.0, -4.0, 2.0]);
        assert_eq!(d.matvec_t(&y), s.matvec_t(&y));
        assert_eq!(d.frobenius_sq(), 30.0);
        assert_eq!(s.frobenius_sq(), 30.0);
    }

    #[test]
    fn csr_validation() {
        assert!(CsrMatrix::new(1, 3, vec![0, 2], vec![2, 1], vec![1.0, 1.0]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 1], vec![2], vec![1.0]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 1], vec![0], vec![f64::NAN]).is_err());
        // explicit zero is fine
        assert!(CsrMatrix::new(1, 2, vec![0, 1], vec![1], vec![0.0]).is_ok());
    }

    #[test]
    fn rejects_nonfinite_dense() {
        assert!(DesignMatrix::dense(1, 1, vec![f64::INFINITY]).is_err());
        assert!(DesignMatrix::dense(2, 1, vec![1.0]).is_err());
    }
}
