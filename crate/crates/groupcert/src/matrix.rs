//! Dense rational matrices and exact Gaussian elimination.
//!
//! `rank_and_solve` classifies `A y = b` exactly: inconsistent, unique
//! solution, or an affine solution space reported as a particular solution
//! plus a nullspace basis. No pivot thresholds exist; a pivot is any nonzero
//! rational.

use crate::rational::Rat;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix rows have inconsistent lengths")]
    RaggedRows,
    #[error("dimension mismatch: matrix is {rows}x{cols}, argument has length {arg}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        arg: usize,
    },
    #[error("operation requires a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

/// Exact classification of the solution set of `A y = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Inconsistent,
    Unique(Vec<Rat>),
    /// Solution space of dimension `nullspace.len() >= 1`.
    Underdetermined {
        particular: Vec<Rat>,
        nullspace: Vec<Vec<Rat>>,
    },
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(MatrixError::RaggedRows);
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Rat {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[Rat]) -> Result<Vec<Rat>, MatrixError> {
        if x.len() != self.cols {
            return Err(MatrixError::DimensionMismatch {
                rows: self.rows,
                cols: self.cols,
                arg: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| crate::rational::dot(self.row(r), x))
            .collect())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut pr = 0;
        for pc in 0..self.cols {
            if pr == self.rows {
                break;
            }
            let Some(src) = (pr..self.rows).find(|&r| !self.at(r, pc).is_zero()) else {
                continue;
            };
            self.swap_rows(pr, src);
            let inv = self.at(pr, pc).recip();
            for c in pc..self.cols {
                let v = self.at(pr, c) * &inv;
                *self.at_mut(pr, c) = v;
            }
            for r in 0..self.rows {
                if r != pr && !self.at(r, pc).is_zero() {
                    let factor = self.at(r, pc).clone();
                    for c in pc..self.cols {
                        let v = self.at(r, c) - &factor * self.at(pr, c);
                        *self.at_mut(r, c) = v;
                    }
                }
            }
            pivots.push(pc);
            pr += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        work.rref().len()
    }

    /// Determinant of a square matrix.
    pub fn det(&self) -> Result<Rat, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut work = self.clone();
        let mut det = Rat::one();
        for pc in 0..n {
            let Some(src) = (pc..n).find(|&r| !work.at(r, pc).is_zero()) else {
                return Ok(Rat::zero());
            };
            if src != pc {
                work.swap_rows(pc, src);
                det = -det;
            }
            let pivot = work.at(pc, pc).clone();
            det *= &pivot;
            for r in pc + 1..n {
                if !work.at(r, pc).is_zero() {
                    let factor = work.at(r, pc) / &pivot;
                    for c in pc..n {
                        let v = work.at(r, c) - &factor * work.at(pc, c);
                        *work.at_mut(r, c) = v;
                    }
                }
            }
        }
        Ok(det)
    }

    /// Inverse of a square matrix, `None` if singular.
    pub fn invert(&self) -> Result<Option<RatMatrix>, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut work = RatMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                *work.at_mut(r, c) = self.at(r, c).clone();
            }
            *work.at_mut(r, n + r) = Rat::one();
        }
        let pivots = work.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return Ok(None);
        }
        let mut inv = RatMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                *inv.at_mut(r, c) = work.at(r, n + c).clone();
            }
        }
        Ok(Some(inv))
    }

    /// Exact solve of `A y = b` with full solution-space classification.
    pub fn rank_and_solve(&self, b: &[Rat]) -> Result<SolveOutcome, MatrixError> {
        if b.len() != self.rows {
            return Err(MatrixError::DimensionMismatch {
                rows: self.rows,
                cols: self.cols,
                arg: b.len(),
            });
        }
        let n = self.cols;
        let mut aug = RatMatrix::zeros(self.rows, n + 1);
        for (r, rhs) in b.iter().enumerate() {
            for c in 0..n {
                *aug.at_mut(r, c) = self.at(r, c).clone();
            }
            *aug.at_mut(r, n) = rhs.clone();
        }
        let pivots = aug.rref();
        // A pivot in the augmented column means some row reads 0 = 1.
        if pivots.last() == Some(&n) {
            return Ok(SolveOutcome::Inconsistent);
        }
        let rank = pivots.len();
        let mut particular = vec![Rat::zero(); n];
        for (r, &pc) in pivots.iter().enumerate() {
            particular[pc] = aug.at(r, n).clone();
        }
        if rank == n {
            return Ok(SolveOutcome::Unique(particular));
        }
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut nullspace = Vec::new();
        for free in (0..n).filter(|c| !pivot_set.contains(c)) {
            let mut h = vec![Rat::zero(); n];
            h[free] = Rat::one();
            for (r, &pc) in pivots.iter().enumerate() {
                h[pc] = -aug.at(r, free).clone();
            }
            nullspace.push(h);
        }
        Ok(SolveOutcome::Underdetermined {
            particular,
            nullspace,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn one_by_one_unique() {
        let a = RatMatrix::from_rows(vec![vec![int(2)]]).unwrap();
        assert_eq!(
            a.rank_and_solve(&[int(1)]).unwrap(),
            SolveOutcome::Unique(vec![rat(1, 2)])
        );
    }

    #[test]
    fn redundant_row_is_consistent() {
        let a = RatMatrix::from_rows(vec![vec![int(1), int(1)], vec![int(2), int(2)]]).unwrap();
        match a.rank_and_solve(&[int(1), int(2)]).unwrap() {
            SolveOutcome::Underdetermined {
                particular,
                nullspace,
            } => {
                assert_eq!(nullspace.len(), 1);
                assert_eq!(a.mul_vec(&particular).unwrap(), vec![int(1), int(2)]);
                let h = &nullspace[0];
                assert_eq!(a.mul_vec(h).unwrap(), vec![int(0), int(0)]);
            }
            other => panic!("expected underdetermined, got {other:?}"),
        }
    }

    #[test]
    fn inconsistent_system() {
        let a = RatMatrix::from_rows(vec![vec![int(1), int(1)], vec![int(1), int(1)]]).unwrap();
        assert_eq!(
            a.rank_and_solve(&[int(1), int(2)]).unwrap(),
            SolveOutcome::Inconsistent
        );
    }

    #[test]
    fn unique_two_by_two() {
        let a =
            RatMatrix::from_rows(vec![vec![rat(3, 5), int(0)], vec![int(0), rat(-2, 5)]]).unwrap();
        assert_eq!(
            a.rank_and_solve(&[int(1), int(1)]).unwrap(),
            SolveOutcome::Unique(vec![rat(5, 3), rat(-5, 2)])
        );
    }

    #[test]
    fn det_and_invert() {
        let a = RatMatrix::from_rows(vec![vec![int(2), int(1)], vec![int(1), int(1)]]).unwrap();
        assert_eq!(a.det().unwrap(), int(1));
        let inv = a.invert().unwrap().unwrap();
        assert_eq!(
            inv.mul_vec(&[int(2), int(1)]).unwrap(),
            vec![int(1), int(0)]
        );
        let sing = RatMatrix::from_rows(vec![vec![int(1), int(2)], vec![int(2), int(4)]]).unwrap();
        assert_eq!(sing.det().unwrap(), int(0));
        assert!(sing.invert().unwrap().is_none());
    }

    #[test]
    fn rank_examples() {
        let a = RatMatrix::from_rows(vec![
            vec![int(1), int(0), int(1)],
            vec![int(0), int(1), int(1)],
            vec![int(1), int(1), int(2)],
        ])
        .unwrap();
        assert_eq!(a.rank(), 2);
    }
}
