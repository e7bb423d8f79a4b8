//! Dense `f64` vectors and row-major matrices plus the handful of
//! activations and losses the trainers need. Everything is plain loops:
//! widths here are a few dozen, so BLAS would be overkill.

use std::fmt;
use std::ops::{Index, IndexMut};

/// Probabilities are floored at this value before taking a log.
pub const LOG_FLOOR: f64 = 1e-12;

/// A dense vector of 64-bit floats.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
}

impl Vector {
    pub fn zeros(len: usize) -> Self {
        Vector { data: vec![0.0; len] }
    }

    pub fn from_vec(data: Vec<f64>) -> Self {
        Vector { data }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.data.iter()
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Index of the largest entry; ties resolve to the lowest index.
    pub fn argmax(&self) -> usize {
        assert!(!self.data.is_empty(), "argmax of an empty vector");
        let mut best = 0;
        for (i, &x) in self.data.iter().enumerate().skip(1) {
            if x > self.data[best] {
                best = i;
            }
        }
        best
    }
}

impl From<Vec<f64>> for Vector {
    fn from(data: Vec<f64>) -> Self {
        Vector::from_vec(data)
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

/// A dense row-major matrix of 64-bit floats.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Builds a matrix from explicit rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows: expected {c} columns, got {}", row.len());
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
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

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Standard matrix-vector product. Panics on shape mismatch, quoting
    /// both shapes.
    pub fn matvec(&self, v: &Vector) -> Vector {
        assert_eq!(
            self.cols,
            v.len(),
            "matvec dimension mismatch: matrix is {}x{}, vector has length {}",
            self.rows,
            self.cols,
            v.len()
        );
        let mut out = vec![0.0; self.rows];
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            *o = dot(row, v.as_slice());
        }
        Vector::from_vec(out)
    }

    /// Applies the matrix to `v` augmented with a trailing constant 1, i.e.
    /// the last column acts as a bias. Requires `cols == v.len() + 1`.
    pub fn affine_apply(&self, v: &Vector) -> Vector {
        assert_eq!(
            self.cols,
            v.len() + 1,
            "affine_apply dimension mismatch: matrix is {}x{}, vector has length {} (+1 bias)",
            self.rows,
            self.cols,
            v.len()
        );
        let n = v.len();
        let mut out = vec![0.0; self.rows];
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            *o = dot(&row[..n], v.as_slice()) + row[n];
        }
        Vector::from_vec(out)
    }

    /// Accumulates `scale * transpose(W_without_bias_column) * delta` into `out`.
    /// Used to push deltas one layer down during backpropagation.
    pub fn accumulate_transpose_apply(&self, delta: &[f64], scale: f64, out: &mut [f64]) {
        assert_eq!(delta.len(), self.rows, "delta length {} != rows {}", delta.len(), self.rows);
        assert_eq!(out.len(), self.cols - 1, "out length {} != cols-1 {}", out.len(), self.cols - 1);
        for (row, &d) in self.data.chunks_exact(self.cols).zip(delta) {
            let s = scale * d;
            if s != 0.0 {
                for (o, &w) in out.iter_mut().zip(&row[..self.cols - 1]) {
                    *o += s * w;
                }
            }
        }
    }

    /// Accumulates `scale * delta ⊗ augment(input)` where `augment` appends a
    /// constant 1. The gradient of an affine layer with respect to its weights.
    pub fn accumulate_scaled_outer_affine(&mut self, delta: &[f64], input: &[f64], scale: f64) {
        assert_eq!(delta.len(), self.rows);
        assert_eq!(input.len(), self.cols - 1);
        let n = input.len();
        for (row, &d) in self.data.chunks_exact_mut(self.cols).zip(delta) {
            let s = scale * d;
            if s != 0.0 {
                for (w, &x) in row[..n].iter_mut().zip(input) {
                    *w += s * x;
                }
                row[n] += s;
            }
        }
    }

    /// `self += scale * other`, entrywise.
    pub fn accumulate_scaled(&mut self, other: &Matrix, scale: f64) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += scale * b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for x in &mut self.data {
            *x *= s;
        }
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} matrix", self.rows, self.cols)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Elementwise `max(0, x)`. Written so NaN propagates (f64::max would
/// swallow it) and a poisoned weight matrix cannot hide behind a dead unit.
pub fn relu(v: &Vector) -> Vector {
    Vector::from_vec(v.iter().map(|&x| if x < 0.0 { 0.0 } else { x }).collect())
}

/// Elementwise ReLU subgradient: 1 where the input is strictly positive,
/// 0 elsewhere (including exactly 0).
pub fn relu_grad(v: &Vector) -> Vector {
    Vector::from_vec(v.iter().map(|&x| if x > 0.0 { 1.0 } else { 0.0 }).collect())
}

/// Softmax with max-subtraction so large logits cannot overflow.
pub fn softmax(v: &Vector) -> Vector {
    assert!(v.len() >= 2, "softmax needs at least 2 entries, got {}", v.len());
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = v.iter().map(|&x| (x - max).exp()).collect();
    let z: f64 = out.iter().sum();
    for x in &mut out {
        *x /= z;
    }
    Vector::from_vec(out)
}

/// Cross-entropy `-ln(pred[label])` with the probability floored at
/// [`LOG_FLOOR`] so a zero never reaches the log.
pub fn cross_entropy(pred: &Vector, label: usize) -> f64 {
    assert!(
        label < pred.len(),
        "label {} out of range for {} classes",
        label,
        pred.len()
    );
    // Non-finite predictions are allowed through: trainers detect them via
    // their gradient checks and report a proper error instead of panicking.
    debug_assert!(
        !pred.sum().is_finite() || (pred.sum() - 1.0).abs() < 1e-9,
        "pred is not a distribution"
    );
    -pred[label].max(LOG_FLOOR).ln()
}
