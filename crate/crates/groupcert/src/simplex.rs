//! Full-dimensional rational simplices.
//!
//! A `Simplex` in `R^k` stores its `k+1` affinely independent vertices along
//! with the inverse edge matrix, so barycentric coordinates of a point are a
//! single exact matrix-vector product. Membership, facet half-spaces,
//! bounding boxes, and exact segment clipping all derive from that.

use crate::lp::LinearConstraint;
use crate::matrix::RatMatrix;
use crate::rational::{dot, sub_vec, Rat};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimplexError {
    #[error("a simplex in R^{k} needs {} vertices, got {got}", k + 1)]
    WrongVertexCount { k: usize, got: usize },
    #[error("vertices are affinely dependent")]
    Degenerate,
    #[error("vertex {index} has dimension {got}, expected {k}")]
    MixedDimensions { index: usize, got: usize, k: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simplex {
    dim: usize,
    vertices: Vec<Vec<Rat>>,
    /// Inverse of the edge matrix with columns `v_i - v_0`; maps `p - v_0`
    /// to the barycentric coordinates `(lambda_1, ..., lambda_k)`.
    inv_edges: RatMatrix,
    /// |det of the edge matrix| = k! * volume.
    det_abs: Rat,
}

impl Simplex {
    pub fn new(vertices: Vec<Vec<Rat>>) -> Result<Self, SimplexError> {
        let k = vertices
            .first()
            .map(Vec::len)
            .ok_or(SimplexError::WrongVertexCount { k: 0, got: 0 })?;
        if vertices.len() != k + 1 {
            return Err(SimplexError::WrongVertexCount {
                k,
                got: vertices.len(),
            });
        }
        for (index, v) in vertices.iter().enumerate() {
            if v.len() != k {
                return Err(SimplexError::MixedDimensions {
                    index,
                    got: v.len(),
                    k,
                });
            }
        }
        let mut edges = RatMatrix::zeros(k, k);
        for col in 0..k {
            let e = sub_vec(&vertices[col + 1], &vertices[0]);
            for (row, coord) in e.iter().enumerate() {
                *edges.at_mut(row, col) = coord.clone();
            }
        }
        let det = edges.det().expect("square by construction");
        if det.is_zero() {
            return Err(SimplexError::Degenerate);
        }
        let inv_edges = edges
            .invert()
            .expect("square by construction")
            .expect("nonzero determinant");
        Ok(Simplex {
            dim: k,
            vertices,
            inv_edges,
            det_abs: det.abs(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<Rat>] {
        &self.vertices
    }

    /// `k! * volume`; summing this over a complex covering `[0,1]^k` must
    /// give exactly `k!`.
    pub fn volume_times_factorial(&self) -> Rat {
        self.det_abs.clone()
    }

    /// All `k+1` barycentric coordinates of `p`, in vertex order.
    pub fn barycentric(&self, p: &[Rat]) -> Vec<Rat> {
        let rel = sub_vec(p, &self.vertices[0]);
        let tail = self.inv_edges.mul_vec(&rel).expect("dimension checked");
        let mut out = Vec::with_capacity(self.dim + 1);
        let sum: Rat = tail.iter().sum();
        out.push(Rat::one() - sum);
        out.extend(tail);
        out
    }

    pub fn contains(&self, p: &[Rat]) -> bool {
        self.barycentric(p).iter().all(|l| !l.is_negative())
    }

    /// The `k+1` facet half-spaces `lambda_i(x) >= 0` in `coeffs.x <= rhs`
    /// form; `strict` turns them into the open interior.
    pub fn halfspaces(&self, strict: bool) -> Vec<LinearConstraint> {
        // lambda_i(x) = row_i . (x - v_0) for i >= 1, lambda_0 = 1 - sum.
        let k = self.dim;
        let mut rows: Vec<(Vec<Rat>, Rat)> = Vec::with_capacity(k + 1);
        let mut sum_row = vec![Rat::zero(); k];
        let mut sum_off = Rat::zero();
        for i in 0..k {
            let row: Vec<Rat> = (0..k).map(|c| self.inv_edges.at(i, c).clone()).collect();
            let off = -dot(&row, &self.vertices[0]);
            for (s, r) in sum_row.iter_mut().zip(&row) {
                *s += r;
            }
            sum_off += &off;
            rows.push((row, off));
        }
        let mut out = Vec::with_capacity(k + 1);
        // lambda_0 = 1 - (sum_row . x + sum_off) >= 0  <=>  sum_row . x <= 1 - sum_off
        out.push(LinearConstraint {
            coeffs: sum_row,
            rhs: Rat::one() - sum_off,
            strict,
        });
        for (row, off) in rows {
            // row . x + off >= 0  <=>  -row . x <= off
            out.push(LinearConstraint {
                coeffs: crate::rational::neg_vec(&row),
                rhs: off,
                strict,
            });
        }
        out
    }

    /// Componentwise (min, max) over the vertices.
    pub fn bbox(&self) -> (Vec<Rat>, Vec<Rat>) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for (i, x) in v.iter().enumerate() {
                if *x < lo[i] {
                    lo[i] = x.clone();
                }
                if *x > hi[i] {
                    hi[i] = x.clone();
                }
            }
        }
        (lo, hi)
    }

    pub fn translate(&self, w: &[Rat]) -> Simplex {
        let vertices = self
            .vertices
            .iter()
            .map(|v| crate::rational::add_vec(v, w))
            .collect();
        Simplex {
            dim: self.dim,
            vertices,
            inv_edges: self.inv_edges.clone(),
            det_abs: self.det_abs.clone(),
        }
    }

    /// Exact clip of the parameterized segment `p + t (q - p)`, `t in [0,1]`,
    /// against the simplex: the parameter interval `[lo, hi]`, or `None` when
    /// the intersection is empty. A degenerate segment (`p == q`) inside the
    /// simplex returns the point interval `[0, 0]`.
    pub fn clip_segment(&self, p: &[Rat], q: &[Rat]) -> Option<(Rat, Rat)> {
        if p == q {
            return if self.contains(p) {
                Some((Rat::zero(), Rat::zero()))
            } else {
                None
            };
        }
        let bp = self.barycentric(p);
        let bq = self.barycentric(q);
        let mut lo = Rat::zero();
        let mut hi = Rat::one();
        for (a, b) in bp.iter().zip(&bq) {
            // coordinate along the segment: a + t (b - a) >= 0
            let slope = b - a;
            match crate::rational::sign(&slope) {
                0 => {
                    if a.is_negative() {
                        return None;
                    }
                }
                1 => {
                    let bound = -a / &slope; // t >= bound
                    if bound > lo {
                        lo = bound;
                    }
                }
                _ => {
                    let bound = -a / &slope; // t <= bound
                    if bound < hi {
                        hi = bound;
                    }
                }
            }
        }
        if lo <= hi {
            Some((lo, hi))
        } else {
            None
        }
    }
}
