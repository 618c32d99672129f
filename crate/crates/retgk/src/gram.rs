//! Symmetric kernel matrix over a graph dataset.

use crate::eigen::symmetric_eigen;
use crate::error::Result;
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    values: Matrix,
}

impl GramMatrix {
    /// Wrap a square matrix, forcing exact symmetry from the upper triangle.
    pub fn from_upper(mut values: Matrix) -> Self {
        assert_eq!(values.rows(), values.cols());
        for i in 0..values.rows() {
            for j in 0..i {
                values[(i, j)] = values[(j, i)];
            }
        }
        GramMatrix { values }
    }

    pub fn len(&self) -> usize {
        self.values.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.values
    }

    pub fn trace(&self) -> f64 {
        (0..self.len()).map(|i| self.get(i, i)).sum()
    }

    /// (min, max) eigenvalues; the positive-semidefiniteness check.
    pub fn eigenvalue_range(&self) -> Result<(f64, f64)> {
        let es = symmetric_eigen(&self.values)?;
        let max = es.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = es.values.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok((min, max))
    }

    pub fn max_abs_diff(&self, other: &GramMatrix) -> f64 {
        assert_eq!(self.len(), other.len());
        self.values
            .as_slice()
            .iter()
            .zip(other.values.as_slice())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}
