//! Dense matrices over `F_q`.
//!
//! Vectors act on matrices from the left: a `k × n` generator `G` maps the
//! message `x` to `x·G`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::galois::{FieldElement, FieldSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> Result<Matrix, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::Shape("ragged rows".into()));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [FieldElement] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, field: &FieldSpec, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let mut acc = vec![FieldElement::ZERO; other.cols];
            for (l, &a) in self.row(i).iter().enumerate() {
                field.axpy(&mut acc, a, other.row(l));
            }
            out.row_mut(i).copy_from_slice(&acc);
        }
        Ok(out)
    }

    /// `x·M` for a row vector `x`.
    pub fn vec_mul(
        &self,
        field: &FieldSpec,
        x: &[FieldElement],
    ) -> Result<Vec<FieldElement>, LinalgError> {
        if x.len() != self.rows {
            return Err(LinalgError::Shape(format!(
                "vector of length {} times {}x{}",
                x.len(),
                self.rows,
                self.cols
            )));
        }
        let mut acc = vec![FieldElement::ZERO; self.cols];
        for (i, &a) in x.iter().enumerate() {
            field.axpy(&mut acc, a, self.row(i));
        }
        Ok(acc)
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self, field: &FieldSpec) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = field.inv(self.get(r, c)).expect("pivot is nonzero");
            for v in self.row_mut(r) {
                *v = field.mul(*v, inv);
            }
            let pivot_row = self.row(r).to_vec();
            for i in 0..self.rows {
                let f = self.get(i, c);
                if i != r && !f.is_zero() {
                    field.axpy(self.row_mut(i), field.neg(f), &pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, field: &FieldSpec) -> usize {
        self.clone().rref(field).len()
    }

    /// Basis (as rows) of `{h : M·hᵀ = 0}`.
    pub fn null_space(&self, field: &FieldSpec) -> Matrix {
        let mut r = self.clone();
        let pivots = r.rref(field);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Matrix::zeros(free.len(), self.cols);
        for (b, &f) in free.iter().enumerate() {
            basis.set(b, f, FieldElement::ONE);
            for (pr, &pc) in pivots.iter().enumerate() {
                basis.set(b, pc, field.neg(r.get(pr, f)));
            }
        }
        basis
    }

    pub fn inverse(&self, field: &FieldSpec) -> Result<Matrix, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            aug.row_mut(i)[..n].copy_from_slice(self.row(i));
            aug.set(i, n + i, FieldElement::ONE);
        }
        let pivots = aug.rref(field);
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(LinalgError::Singular);
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            inv.row_mut(i).copy_from_slice(&aug.row(i)[n..]);
        }
        Ok(inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::make_field;
    use crate::rng::Stream;

    fn random(f: &FieldSpec, rows: usize, cols: usize, s: &mut Stream) -> Matrix {
        Matrix::from_rows(
            (0..rows)
                .map(|_| (0..cols).map(|_| f.uniform(s)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn null_space_annihilates() {
        for q in [2, 3, 4, 5] {
            let f = make_field(q).unwrap();
            let mut s = Stream::new(q);
            for _ in 0..20 {
                let m = random(&f, 3, 7, &mut s);
                let ns = m.null_space(&f);
                assert_eq!(ns.rows() + m.rank(&f), 7);
                let prod = m.mul(&f, &ns.transpose()).unwrap();
                assert!(prod.data.iter().all(|v| v.is_zero()));
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let f = make_field(7).unwrap();
        let mut s = Stream::new(1);
        let mut done = 0;
        while done < 10 {
            let m = random(&f, 4, 4, &mut s);
            match m.inverse(&f) {
                Ok(inv) => {
                    assert_eq!(m.mul(&f, &inv).unwrap(), Matrix::identity(4));
                    done += 1;
                }
                Err(e) => {
                    assert_eq!(e, LinalgError::Singular);
                    assert!(m.rank(&f) < 4);
                }
            }
        }
    }
}
