//! Dense rank-4 tensors with equal side length, stored row-major.

use nalgebra::{DMatrix, Scalar};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor4<T> {
    side: usize,
    data: Vec<T>,
}

impl<T: Clone + Default> Tensor4<T> {
    pub fn zeros(side: usize) -> Self {
        Tensor4 {
            side,
            data: vec![T::default(); side.pow(4)],
        }
    }

    pub fn from_fn(side: usize, mut f: impl FnMut(usize, usize, usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(side.pow(4));
        for a in 0..side {
            for b in 0..side {
                for c in 0..side {
                    for d in 0..side {
                        data.push(f(a, b, c, d));
                    }
                }
            }
        }
        Tensor4 { side, data }
    }

    pub fn from_vec(side: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), side.pow(4), "tensor data has the wrong length");
        Tensor4 { side, data }
    }
}

impl<T> Tensor4<T> {
    pub fn side(&self) -> usize {
        self.side
    }

    #[inline]
    pub fn offset(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.side + b) * self.side + c) * self.side + d
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> &T {
        &self.data[self.offset(a, b, c, d)]
    }

    #[inline]
    pub fn get_mut(&mut self, a: usize, b: usize, c: usize, d: usize) -> &mut T {
        let o = self.offset(a, b, c, d);
        &mut self.data[o]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Tensor4<U> {
        Tensor4 {
            side: self.side,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Scalar + Copy> Tensor4<T> {
    /// Matrix over composite indices `(a, b) x (c, d)`.
    pub fn matricize(&self) -> DMatrix<T> {
        let m2 = self.side * self.side;
        DMatrix::from_row_slice(m2, m2, &self.data)
    }

    pub fn from_matrix(side: usize, m: &DMatrix<T>) -> Self {
        let m2 = side * side;
        assert_eq!(m.shape(), (m2, m2));
        let mut data = Vec::with_capacity(m2 * m2);
        for r in 0..m2 {
            for c in 0..m2 {
                data.push(m[(r, c)]);
            }
        }
        Tensor4 { side, data }
    }
}

impl Tensor4<f64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn to_complex(&self) -> Tensor4<Complex64> {
        self.map(|v| Complex64::new(*v, 0.0))
    }
}

impl Tensor4<Complex64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}
