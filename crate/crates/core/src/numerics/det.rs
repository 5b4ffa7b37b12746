use std::ops::{Index, IndexMut};

use super::scaled::ScaledValue;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Matrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row vectors; panics if they are not square.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "row {i} has the wrong length");
            m.data[i * dim..(i + 1) * dim].copy_from_slice(row);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn set_row(&mut self, i: usize, values: &[f64]) {
        self.data[i * self.dim..(i + 1) * self.dim].copy_from_slice(values);
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        Matrix::from_fn(n, |i, j| (0..n).map(|k| self[(i, k)] * other[(k, j)]).sum())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Binary exponent `e` with `|x| = m * 2^e`, `m` in `[0.5, 1)`.
fn binary_exponent(x: f64) -> i32 {
    debug_assert!(x != 0.0 && x.is_finite());
    let bits = x.abs().to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i32;
    if raw == 0 {
        // subnormal
        binary_exponent(x * 2f64.powi(64)) - 64
    } else {
        raw - 1022
    }
}

/// `(sign, ln|det m|)` of a square matrix.
///
/// Rows and then columns are equilibrated by powers of two (exact), after
/// which Gaussian elimination with partial pivoting runs on entries of
/// order one. The removed scales are accumulated in the logarithm.
/// Exactly singular input gives [`ScaledValue::ZERO`].
pub fn det_scaled(m: &Matrix) -> ScaledValue {
    let n = m.dim;
    let mut a = m.data.clone();
    let mut log2_scale: i64 = 0;

    for i in 0..n {
        let row = &mut a[i * n..(i + 1) * n];
        let max = row.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if max == 0.0 {
            return ScaledValue::ZERO;
        }
        let e = binary_exponent(max);
        let s = 2f64.powi(-e);
        row.iter_mut().for_each(|x| *x *= s);
        log2_scale += i64::from(e);
    }
    for j in 0..n {
        let max = (0..n).fold(0.0f64, |acc, i| acc.max(a[i * n + j].abs()));
        if max == 0.0 {
            return ScaledValue::ZERO;
        }
        let e = binary_exponent(max);
        let s = 2f64.powi(-e);
        for i in 0..n {
            a[i * n + j] *= s;
        }
        log2_scale += i64::from(e);
    }

    let mut sign: i8 = 1;
    let mut log_abs = 0.0;
    for col in 0..n {
        let (piv, pmax) =
            (col..n)
                .map(|r| (r, a[r * n + col].abs()))
                .fold(
                    (col, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if pmax == 0.0 {
            return ScaledValue::ZERO;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            sign = -sign;
        }
        let p = a[col * n + col];
        if p < 0.0 {
            sign = -sign;
        }
        log_abs += p.abs().ln();
        for r in col + 1..n {
            let factor = a[r * n + col] / p;
            if factor != 0.0 {
                for k in col + 1..n {
                    a[r * n + k] -= factor * a[col * n + k];
                }
            }
        }
    }
    ScaledValue::new(sign, log_abs + (log2_scale as f64) * std::f64::consts::LN_2)
}

/// Determinant of a matrix whose entries are themselves [`ScaledValue`]s
/// (row-major, `dim * dim` entries).
///
/// Each row and column is divided by its largest magnitude in log space so
/// the reduced matrix fits in `f64` even when the raw entries would not.
pub fn det_scaled_entries(dim: usize, entries: &[ScaledValue]) -> ScaledValue {
    assert_eq!(entries.len(), dim * dim, "entry count must be dim^2");
    let logs: Vec<f64> = entries.iter().map(|e| e.log_mag()).collect();
    let row_shift: Vec<f64> = (0..dim)
        .map(|i| {
            logs[i * dim..(i + 1) * dim]
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    if row_shift.contains(&f64::NEG_INFINITY) {
        return ScaledValue::ZERO;
    }
    let col_shift: Vec<f64> = (0..dim)
        .map(|j| {
            (0..dim)
                .map(|i| logs[i * dim + j] - row_shift[i])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    if col_shift.contains(&f64::NEG_INFINITY) {
        return ScaledValue::ZERO;
    }
    let reduced = Matrix::from_fn(dim, |i, j| {
        let e = entries[i * dim + j];
        match e.sign() {
            0 => 0.0,
            s => f64::from(s) * (e.log_mag() - row_shift[i] - col_shift[j]).exp(),
        }
    });
    let shift: f64 = row_shift.iter().sum::<f64>() + col_shift.iter().sum::<f64>();
    det_scaled(&reduced) * ScaledValue::from_ln(shift)
}
