use rayon::prelude::*;

use crate::error::{Error, Result};

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense2D {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Output rows handed to one worker. Fixed so results do not depend on the
/// thread count.
const ROW_CHUNK: usize = 32;

impl Dense2D {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense2D {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Dense2D {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Dense2D::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                op: "from_vec",
                left: (rows, cols),
                right: (data.len(), 1),
            });
        }
        Ok(Dense2D { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::ShapeMismatch {
                    op: "from_rows",
                    left: (rows.len(), cols),
                    right: (1, r.len()),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Dense2D {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn row_vector(v: &[f64]) -> Self {
        Dense2D {
            rows: 1,
            cols: v.len(),
            data: v.to_vec(),
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

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Dense2D {
        Dense2D {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Dense2D, f: impl Fn(f64, f64) -> f64) -> Dense2D {
        debug_assert_eq!(self.shape(), other.shape());
        Dense2D {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Dense2D) {
        debug_assert_eq!(self.shape(), other.shape());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn fill(&mut self, v: f64) {
        self.data.iter_mut().for_each(|x| *x = v);
    }

    pub fn transpose(&self) -> Dense2D {
        let mut out = Dense2D::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max_abs_diff(&self, other: &Dense2D) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &Dense2D) -> Result<Dense2D> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(gemm(self, false, other, false))
    }
}

/// `op(a) * op(b)` where `op` optionally transposes.
///
/// Panics on incompatible shapes; callers validate first.
pub(crate) fn gemm(a: &Dense2D, trans_a: bool, b: &Dense2D, trans_b: bool) -> Dense2D {
    let (m, k) = if trans_a { (a.cols, a.rows) } else { (a.rows, a.cols) };
    let (k2, n) = if trans_b { (b.cols, b.rows) } else { (b.rows, b.cols) };
    assert_eq!(k, k2, "gemm inner dimensions");
    let mut out = Dense2D::zeros(m, n);
    if m == 0 || n == 0 || k == 0 {
        return out;
    }
    // (row stride, col stride) of op(a) and op(b)
    let (rsa, csa) = if trans_a { (1, a.cols) } else { (a.cols, 1) };
    let (rsb, csb) = if trans_b { (1, b.cols) } else { (b.cols, 1) };
    // addresses, so the closure stays Send + Sync
    let a_addr = a.data.as_ptr() as usize;
    let b_addr = b.data.as_ptr() as usize;
    let run = |start: usize, chunk: &mut [f64]| {
        let rows = chunk.len() / n;
        // SAFETY: strides describe matrices that lie inside `a.data`,
        // `b.data` and `chunk`; `start + rows <= m`.
        unsafe {
            matrixmultiply::dgemm(
                rows,
                k,
                n,
                1.0,
                (a_addr as *const f64).add(start * rsa),
                rsa as isize,
                csa as isize,
                b_addr as *const f64,
                rsb as isize,
                csb as isize,
                0.0,
                chunk.as_mut_ptr(),
                n as isize,
                1,
            );
        }
    };
    if m * n * k < 1 << 15 {
        run(0, &mut out.data);
    } else {
        out.data
            .par_chunks_mut(ROW_CHUNK * n)
            .enumerate()
            .for_each(|(i, chunk)| run(i * ROW_CHUNK, chunk));
    }
    out
}

/// Row-wise softmax with max subtraction.
pub fn softmax_rows(m: &Dense2D) -> Dense2D {
    let mut out = m.clone();
    for r in 0..out.rows {
        let row = out.row_mut(r);
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            total += *v;
        }
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(a: &Dense2D, b: &Dense2D) -> Dense2D {
        let mut out = Dense2D::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut s = 0.0;
                for k in 0..a.cols() {
                    s += a.get(i, k) * b.get(k, j);
                }
                out.set(i, j, s);
            }
        }
        out
    }

    fn pseudo(rows: usize, cols: usize, salt: u64) -> Dense2D {
        let data = (0..rows * cols)
            .map(|i| (((i as u64 + 1) * 2654435761 + salt * 97) % 1000) as f64 / 500.0 - 1.0)
            .collect();
        Dense2D::from_vec(rows, cols, data).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let m = pseudo(3, 5, 1);
        assert_eq!(Dense2D::identity(3).matmul(&m).unwrap(), m);
    }

    #[test]
    fn hand_product() {
        let a = Dense2D::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = Dense2D::from_rows(&[vec![5.0], vec![6.0]]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.data(), &[17.0, 39.0]);
    }

    #[test]
    fn shape_mismatch() {
        let a = Dense2D::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn transposed_products_match_naive() {
        let a = pseudo(70, 19, 2);
        let b = pseudo(19, 41, 3);
        let c = naive(&a, &b);
        assert!(gemm(&a, false, &b, false).max_abs_diff(&c) < 1e-12);
        let at = a.transpose();
        let bt = b.transpose();
        assert!(gemm(&at, true, &b, false).max_abs_diff(&c) < 1e-12);
        assert!(gemm(&a, false, &bt, true).max_abs_diff(&c) < 1e-12);
        assert!(gemm(&at, true, &bt, true).max_abs_diff(&c) < 1e-12);
    }

    #[test]
    fn chunked_rows_are_bit_identical_to_single_rows() {
        let a = pseudo(131, 128, 4);
        let b = pseudo(128, 128, 5);
        let full = gemm(&a, false, &b, false);
        for r in [0, 31, 32, 77, 130] {
            let single = Dense2D::row_vector(a.row(r));
            let one = gemm(&single, false, &b, false);
            assert_eq!(one.row(0), full.row(r));
        }
    }

    #[test]
    fn softmax_examples() {
        let m = Dense2D::from_rows(&[vec![2.0; 4]]).unwrap();
        assert_eq!(softmax_rows(&m).data(), &[0.25; 4]);
        let m = Dense2D::from_rows(&[vec![0.0, 3f64.ln()]]).unwrap();
        let s = softmax_rows(&m);
        assert!((s.get(0, 0) - 0.25).abs() < 1e-15);
        assert!((s.get(0, 1) - 0.75).abs() < 1e-15);
        let m = Dense2D::from_rows(&[vec![-7.5]]).unwrap();
        assert_eq!(softmax_rows(&m).data(), &[1.0]);
    }

    proptest! {
        #[test]
        fn softmax_rows_sum_to_one(row in proptest::collection::vec(-1e3f64..1e3, 1..12)) {
            let s = softmax_rows(&Dense2D::row_vector(&row));
            let total: f64 = s.data().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(s.data().iter().all(|&v| v >= 0.0));
        }
    }
}
