//! Piecewise linear lattice-periodic functions on a simplicial complex.
//!
//! A `PeriodicPLF` is the validated form of a raw description: one affine
//! piece `gradient . x + offset` per full-dimensional simplex, the simplices
//! covering the fundamental domain `[0,1]^k` exactly once, and the induced
//! function continuous both inside the domain and across the periodic seam.
//! Validation is exact and produces a witness for every rejection:
//!
//! * cells are genuine simplices inside the box;
//! * simplex volumes sum to exactly 1 and interiors are pairwise disjoint
//!   (Fourier-Motzkin feasibility of the open overlap system), so the cells
//!   tile the box;
//! * the affine pieces of any two cells agree on every vertex of their
//!   intersection, including intersections with integer translates across
//!   the seam. Agreement at intersection vertices extends affinely to the
//!   whole intersection, so this is full continuity of the periodic
//!   extension, not just vertex agreement; T-junctions between cells are
//!   covered by the same check.
//!
//! After validation `evaluate` is total: reduce modulo `Z^k`, find any
//! containing cell, apply its affine piece.

use crate::grid::GridIndexer;
use crate::lp;
use crate::matrix::RatMatrix;
use crate::rational::{
    add_vec, dot, format_rat, int, is_zero_vec, l1_norm, rat, sub_vec, vec_mod1, Rat,
};
use crate::simplex::Simplex;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawCell {
    pub vertices: Vec<Vec<Rat>>,
    pub gradient: Vec<Rat>,
    pub offset: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawFunction {
    pub k: usize,
    pub f: Vec<Rat>,
    pub cells: Vec<RawCell>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineCell {
    pub simplex: Simplex,
    pub gradient: Vec<Rat>,
    pub offset: Rat,
}

impl AffineCell {
    pub fn value_at(&self, p: &[Rat]) -> Rat {
        dot(&self.gradient, p) + &self.offset
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValidationError {
    #[error("k must be >= 1")]
    ZeroDimension,
    #[error("f has dimension {got}, expected {k}")]
    BadGroupElement { k: usize, got: usize },
    #[error("cell list is empty")]
    NoCells,
    #[error("cell {index} is not a full-dimensional simplex: {reason}")]
    NonSimplexCell { index: usize, reason: String },
    #[error("cell {index} has a vertex outside [0,1]^k: ({})", coords.join(", "))]
    VertexOutsideDomain { index: usize, coords: Vec<String> },
    #[error("cell {index} has gradient dimension {got}, expected {k}")]
    BadGradient { index: usize, k: usize, got: usize },
    #[error(
        "discontinuity at ({}): values {a} and {b} disagree",
        vertex.join(", ")
    )]
    Discontinuity {
        vertex: Vec<String>,
        a: String,
        b: String,
    },
    #[error("cells {i} and {j} overlap with interior point ({})", point.join(", "))]
    Overlap {
        i: usize,
        j: usize,
        point: Vec<String>,
    },
    #[error(
        "cells do not cover the fundamental domain: volume deficit {deficit}{}",
        point.as_ref().map(|p| format!(", uncovered point ({})", p.join(", "))).unwrap_or_default()
    )]
    CoverageGap {
        deficit: String,
        point: Option<Vec<String>>,
    },
}

/// A validated piecewise linear periodic function. Cells are stored in
/// canonical order: each cell's vertices sorted lexicographically, then the
/// cells sorted by their vertex lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicPLF {
    k: usize,
    f: Vec<Rat>,
    cells: Vec<AffineCell>,
    vertex_values: BTreeMap<Vec<Rat>, Rat>,
}

/// Gradient classes in order of first appearance over the canonical cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopePartition {
    pub classes: Vec<SlopeClass>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeClass {
    pub gradient: Vec<Rat>,
    pub cells: Vec<usize>,
}

impl SlopePartition {
    pub fn class_of_cell(&self, cell: usize) -> usize {
        self.classes
            .iter()
            .position(|c| c.cells.contains(&cell))
            .expect("every cell belongs to a class")
    }

    pub fn gradients(&self) -> Vec<Vec<Rat>> {
        self.classes.iter().map(|c| c.gradient.clone()).collect()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("grid modulus must be >= 1")]
    ZeroModulus,
    #[error("{what} is not on the (1/{q})-grid: ({})", coords.join(", "))]
    OffGrid {
        what: String,
        q: u64,
        coords: Vec<String>,
    },
}

impl PeriodicPLF {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn f(&self) -> &[Rat] {
        &self.f
    }

    pub fn cells(&self) -> &[AffineCell] {
        &self.cells
    }

    pub fn vertex_values(&self) -> &BTreeMap<Vec<Rat>, Rat> {
        &self.vertex_values
    }

    pub fn validate(raw: RawFunction) -> Result<PeriodicPLF, ValidationError> {
        if raw.k == 0 {
            return Err(ValidationError::ZeroDimension);
        }
        if raw.f.len() != raw.k {
            return Err(ValidationError::BadGroupElement {
                k: raw.k,
                got: raw.f.len(),
            });
        }
        if raw.cells.is_empty() {
            return Err(ValidationError::NoCells);
        }
        let k = raw.k;
        let f = vec_mod1(&raw.f);

        // Canonicalize: sort vertices within each cell, then sort cells.
        let mut cell_inputs: Vec<RawCell> = raw.cells;
        for cell in &mut cell_inputs {
            cell.vertices.sort();
        }
        cell_inputs.sort_by(|a, b| a.vertices.cmp(&b.vertices));

        let zero = Rat::zero();
        let one = Rat::one();
        let mut cells = Vec::with_capacity(cell_inputs.len());
        for (index, rc) in cell_inputs.into_iter().enumerate() {
            if rc.gradient.len() != k {
                return Err(ValidationError::BadGradient {
                    index,
                    k,
                    got: rc.gradient.len(),
                });
            }
            for v in &rc.vertices {
                if v.len() == k && v.iter().any(|x| x < &zero || x > &one) {
                    return Err(ValidationError::VertexOutsideDomain {
                        index,
                        coords: v.iter().map(format_rat).collect(),
                    });
                }
            }
            let simplex =
                Simplex::new(rc.vertices).map_err(|e| ValidationError::NonSimplexCell {
                    index,
                    reason: e.to_string(),
                })?;
            cells.push(AffineCell {
                simplex,
                gradient: rc.gradient,
                offset: rc.offset,
            });
        }

        // Vertex values, keyed by the literal vertex and by its mod-1 class.
        let mut vertex_values: BTreeMap<Vec<Rat>, Rat> = BTreeMap::new();
        let mut class_values: BTreeMap<Vec<Rat>, Rat> = BTreeMap::new();
        for cell in &cells {
            for v in cell.simplex.vertices() {
                let val = cell.value_at(v);
                if let Some(prev) = vertex_values.get(v) {
                    if *prev != val {
                        return Err(discontinuity(v, prev, &val));
                    }
                } else {
                    vertex_values.insert(v.clone(), val.clone());
                }
                let class: Vec<Rat> = v
                    .iter()
                    .map(|x| if x.is_one() { Rat::zero() } else { x.clone() })
                    .collect();
                if let Some(prev) = class_values.get(&class) {
                    if *prev != val {
                        return Err(discontinuity(v, prev, &val));
                    }
                } else {
                    class_values.insert(class, val);
                }
            }
        }

        // Pairwise interior disjointness (exact, open overlap system).
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                if !bbox_overlap_open(&cells[i].simplex, &cells[j].simplex) {
                    continue;
                }
                let mut system = cells[i].simplex.halfspaces(true);
                system.extend(cells[j].simplex.halfspaces(true));
                if let Some(point) = lp::feasible_point(&system, k) {
                    return Err(ValidationError::Overlap {
                        i,
                        j,
                        point: point.iter().map(format_rat).collect(),
                    });
                }
            }
        }

        // Covering: with disjoint interiors inside the box, covering the box
        // is exactly "volumes sum to 1".
        let total: Rat = cells
            .iter()
            .map(|c| c.simplex.volume_times_factorial())
            .sum();
        let factorial: Rat = (1..=k as i64).map(int).product();
        if total != factorial {
            let deficit = (&factorial - &total) / factorial;
            let point = gap_witness(&cells, k);
            return Err(ValidationError::CoverageGap {
                deficit: format_rat(&deficit),
                point: point.map(|p| p.iter().map(format_rat).collect()),
            });
        }

        // Continuity over every pairwise intersection, including integer
        // translates across the periodic seam.
        check_intersection_agreement(&cells, k)?;

        Ok(PeriodicPLF {
            k,
            f,
            cells,
            vertex_values,
        })
    }

    /// Value of the periodic extension at any rational point.
    pub fn evaluate(&self, x: &[Rat]) -> Rat {
        assert_eq!(x.len(), self.k, "evaluate: dimension mismatch");
        let r = vec_mod1(x);
        for cell in &self.cells {
            if cell.simplex.contains(&r) {
                return cell.value_at(&r);
            }
        }
        unreachable!("validated cells cover the fundamental domain");
    }

    pub fn slope_partition(&self) -> SlopePartition {
        let mut classes: Vec<SlopeClass> = Vec::new();
        for (idx, cell) in self.cells.iter().enumerate() {
            match classes.iter_mut().find(|c| c.gradient == cell.gradient) {
                Some(c) => c.cells.push(idx),
                None => classes.push(SlopeClass {
                    gradient: cell.gradient.clone(),
                    cells: vec![idx],
                }),
            }
        }
        SlopePartition { classes }
    }

    /// Exact Lipschitz constant pair: `max_i ||g_i||_1` bounds `|phi(x) -
    /// phi(y)| <= L ||x - y||_inf` on each cell, hence globally by convexity
    /// of segments within cells.
    pub fn lipschitz_constant(&self) -> Rat {
        self.cells
            .iter()
            .map(|c| l1_norm(&c.gradient))
            .max()
            .expect("nonempty cell list")
    }

    /// Per class: does some member cell touch a lattice point? Cells live in
    /// `[0,1]^k`, so the only candidates are the `2^k` box corners.
    pub fn origin_incidence(&self, partition: &SlopePartition) -> Vec<bool> {
        let corners = box_corners(self.k);
        partition
            .classes
            .iter()
            .map(|class| {
                class.cells.iter().any(|&ci| {
                    corners
                        .iter()
                        .any(|corner| self.cells[ci].simplex.contains(corner))
                })
            })
            .collect()
    }

    /// Values on the grid `(1/q)Z^k / Z^k`, flat-indexed by `GridIndexer`.
    pub fn grid_values(&self, q: u64) -> Result<Vec<Rat>, GridError> {
        if q == 0 {
            return Err(GridError::ZeroModulus);
        }
        let g = GridIndexer::new(self.k, q);
        Ok((0..g.len()).map(|i| self.evaluate(&g.point(i))).collect())
    }

    /// Checks that `f` and every cell vertex lie on the `(1/q)`-grid.
    pub fn grid_compatible(&self, q: u64) -> Result<(), GridError> {
        if q == 0 {
            return Err(GridError::ZeroModulus);
        }
        let qr = int(q as i64);
        let on_grid = |v: &[Rat]| v.iter().all(|x| (x * &qr).is_integer());
        if !on_grid(&self.f) {
            return Err(GridError::OffGrid {
                what: "f".to_string(),
                q,
                coords: self.f.iter().map(format_rat).collect(),
            });
        }
        for cell in &self.cells {
            for v in cell.simplex.vertices() {
                if !on_grid(v) {
                    return Err(GridError::OffGrid {
                        what: "a cell vertex".to_string(),
                        q,
                        coords: v.iter().map(format_rat).collect(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Least q such that f and all breakpoints lie on the (1/q)-grid.
    pub fn natural_grid(&self) -> u64 {
        let mut l = BigInt::one();
        for x in &self.f {
            l = num_integer::Integer::lcm(&l, x.denom());
        }
        for cell in &self.cells {
            for v in cell.simplex.vertices() {
                for x in v {
                    l = num_integer::Integer::lcm(&l, x.denom());
                }
            }
        }
        l.to_u64()
            .expect("grid modulus fits in u64 at artifact scale")
    }
}

fn discontinuity(v: &[Rat], a: &Rat, b: &Rat) -> ValidationError {
    ValidationError::Discontinuity {
        vertex: v.iter().map(format_rat).collect(),
        a: format_rat(a),
        b: format_rat(b),
    }
}

pub fn box_corners(k: usize) -> Vec<Vec<Rat>> {
    (0..(1usize << k))
        .map(|mask| {
            (0..k)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        Rat::one()
                    } else {
                        Rat::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn bbox_overlap_open(a: &Simplex, b: &Simplex) -> bool {
    let (alo, ahi) = a.bbox();
    let (blo, bhi) = b.bbox();
    alo.iter()
        .zip(&ahi)
        .zip(blo.iter().zip(&bhi))
        .all(|((al, ah), (bl, bh))| al < bh && bl < ah)
}

fn bbox_touch(a: &Simplex, b: &Simplex) -> bool {
    let (alo, ahi) = a.bbox();
    let (blo, bhi) = b.bbox();
    alo.iter()
        .zip(&ahi)
        .zip(blo.iter().zip(&bhi))
        .all(|((al, ah), (bl, bh))| al <= bh && bl <= ah)
}

/// Vertices of the polytope cut out by the joint constraint set of two
/// simplices: every k-subset of the 2(k+1) facet hyperplanes is solved and
/// feasibility-filtered. Exact and dimension-generic; only hit at toy sizes.
fn intersection_vertices(a: &Simplex, b: &Simplex, k: usize) -> Vec<Vec<Rat>> {
    let mut constraints = a.halfspaces(false);
    constraints.extend(b.halfspaces(false));
    let n = constraints.len();
    let mut out: Vec<Vec<Rat>> = Vec::new();
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let rows: Vec<Vec<Rat>> = subset
            .iter()
            .map(|&i| constraints[i].coeffs.clone())
            .collect();
        let rhs: Vec<Rat> = subset.iter().map(|&i| constraints[i].rhs.clone()).collect();
        let m = RatMatrix::from_rows(rows).expect("rectangular");
        if let Ok(crate::matrix::SolveOutcome::Unique(p)) = m.rank_and_solve(&rhs) {
            if constraints.iter().all(|c| c.satisfied_by(&p)) && !out.contains(&p) {
                out.push(p);
            }
        }
        // next k-combination of 0..n
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if subset[i] != i + n - k {
                subset[i] += 1;
                for j in i + 1..k {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Affine agreement of every cell pair on their intersection, including
/// integer-translated pairs across the periodic seam. Agreement is checked
/// at the exact vertices of each intersection polytope, which determines
/// agreement on the whole intersection.
fn check_intersection_agreement(cells: &[AffineCell], k: usize) -> Result<(), ValidationError> {
    let shifts = integer_shifts(k);
    for i in 0..cells.len() {
        for j in i..cells.len() {
            for w in &shifts {
                if i == j && is_zero_vec(w) {
                    continue;
                }
                // (i, j, w) and (j, i, -w) describe the same contact; keep
                // one representative when i == j.
                if i == j
                    && w.iter()
                        .rev()
                        .find(|x| !x.is_zero())
                        .is_none_or(Signed::is_negative)
                {
                    continue;
                }
                let shifted = cells[j].simplex.translate(w);
                if !bbox_touch(&cells[i].simplex, &shifted) {
                    continue;
                }
                for u in intersection_vertices(&cells[i].simplex, &shifted, k) {
                    let a = cells[i].value_at(&u);
                    let b = cells[j].value_at(&sub_vec(&u, w));
                    if a != b {
                        return Err(discontinuity(&u, &a, &b));
                    }
                }
            }
        }
    }
    Ok(())
}

fn integer_shifts(k: usize) -> Vec<Vec<Rat>> {
    let mut out = Vec::new();
    let mut current = vec![0i64; k];
    fn rec(k: usize, pos: usize, current: &mut Vec<i64>, out: &mut Vec<Vec<Rat>>) {
        if pos == k {
            out.push(current.iter().map(|&c| int(c)).collect());
            return;
        }
        for c in [-1i64, 0, 1] {
            current[pos] = c;
            rec(k, pos + 1, current, out);
        }
    }
    rec(k, 0, &mut current, &mut out);
    out
}

/// Witness point for a coverage gap: exact for k = 1 (midpoint of the first
/// uncovered interval) and k = 2 (probing both sides of every elementary
/// sub-edge of the cell-edge arrangement); `None` for k >= 3.
fn gap_witness(cells: &[AffineCell], k: usize) -> Option<Vec<Rat>> {
    let covered = |p: &[Rat]| cells.iter().any(|c| c.simplex.contains(p));
    match k {
        1 => {
            let mut marks: Vec<Rat> = vec![Rat::zero(), Rat::one()];
            for c in cells {
                for v in c.simplex.vertices() {
                    marks.push(v[0].clone());
                }
            }
            marks.sort();
            marks.dedup();
            for pair in marks.windows(2) {
                let mid = (&pair[0] + &pair[1]) / int(2);
                if !covered(std::slice::from_ref(&mid)) {
                    return Some(vec![mid]);
                }
            }
            None
        }
        2 => {
            // Collect all cell edges plus the box edges as (p, q) segments.
            let mut segments: Vec<(Vec<Rat>, Vec<Rat>)> = Vec::new();
            for c in cells {
                let vs = c.simplex.vertices();
                for a in 0..vs.len() {
                    for b in a + 1..vs.len() {
                        segments.push((vs[a].clone(), vs[b].clone()));
                    }
                }
            }
            let corners = [
                (rat(0, 1), rat(0, 1)),
                (rat(1, 1), rat(0, 1)),
                (rat(1, 1), rat(1, 1)),
                (rat(0, 1), rat(1, 1)),
            ];
            for i in 0..4 {
                let (ax, ay) = corners[i].clone();
                let (bx, by) = corners[(i + 1) % 4].clone();
                segments.push((vec![ax, ay], vec![bx, by]));
            }
            // Subdivide each segment at every crossing with another segment's
            // supporting line, then probe both sides of each sub-midpoint.
            for (p, q) in &segments {
                let dir = sub_vec(q, p);
                let mut params: Vec<Rat> = vec![Rat::zero(), Rat::one()];
                for (a, b) in &segments {
                    if (a, b) == (p, q) {
                        continue;
                    }
                    // line through a,b: normal n = perp(b - a)
                    let d2 = sub_vec(b, a);
                    let n = vec![-d2[1].clone(), d2[0].clone()];
                    let denom = dot(&n, &dir);
                    if denom.is_zero() {
                        continue;
                    }
                    let t = (dot(&n, a) - dot(&n, p)) / denom;
                    if t > Rat::zero() && t < Rat::one() {
                        params.push(t);
                    }
                }
                params.sort();
                params.dedup();
                let normal = vec![-dir[1].clone(), dir[0].clone()];
                for pair in params.windows(2) {
                    let tm = (&pair[0] + &pair[1]) / int(2);
                    let m = add_vec(p, &crate::rational::scale_vec(&dir, &tm));
                    // Step off the edge by half the distance to the nearest
                    // other supporting line along the normal.
                    let mut min_step: Option<Rat> = None;
                    for (a, b) in &segments {
                        let d2 = sub_vec(b, a);
                        let n2 = vec![-d2[1].clone(), d2[0].clone()];
                        let denom = dot(&n2, &normal);
                        if denom.is_zero() {
                            continue;
                        }
                        let s = (dot(&n2, a) - dot(&n2, &m)) / denom;
                        let s_abs = s.abs();
                        if s_abs.is_positive() && min_step.as_ref().is_none_or(|ms| s_abs < *ms) {
                            min_step = Some(s_abs);
                        }
                    }
                    let step = min_step.unwrap_or_else(|| rat(1, 2)) / int(2);
                    for sgn in [1i64, -1] {
                        let probe = add_vec(
                            &m,
                            &crate::rational::scale_vec(&normal, &(int(sgn) * &step)),
                        );
                        let inside_box =
                            probe.iter().all(|x| *x >= Rat::zero() && *x <= Rat::one());
                        if inside_box && !covered(&probe) {
                            return Some(probe);
                        }
                    }
                }
            }
            None
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    pub fn interval_cells(breaks: &[(Rat, Rat)]) -> Vec<RawCell> {
        // consecutive (x, value) pairs to interval cells with interpolated
        // affine data; last value pairs with (1, first value) wrap.
        let mut cells = Vec::new();
        for w in breaks.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            let g = (y1 - y0) / (x1 - x0);
            let off = y0 - &g * x0;
            cells.push(RawCell {
                vertices: vec![vec![x0.clone()], vec![x1.clone()]],
                gradient: vec![g],
                offset: off,
            });
        }
        cells
    }

    fn gmi_raw() -> RawFunction {
        RawFunction {
            k: 1,
            f: vec![rat(2, 5)],
            cells: interval_cells(&[(int(0), int(0)), (rat(3, 5), int(1)), (int(1), int(0))]),
        }
    }

    #[test]
    fn validates_gmi_shape() {
        let phi = PeriodicPLF::validate(gmi_raw()).unwrap();
        assert_eq!(phi.cells().len(), 2);
        assert_eq!(phi.cells()[0].gradient, vec![rat(5, 3)]);
        assert_eq!(phi.cells()[1].gradient, vec![rat(-5, 2)]);
        assert_eq!(phi.cells()[1].offset, rat(5, 2));
        assert_eq!(phi.evaluate(&[rat(1, 5)]), rat(1, 3));
        assert_eq!(phi.evaluate(&[rat(4, 5)]), rat(1, 2));
        // periodicity
        assert_eq!(phi.evaluate(&[rat(9, 5)]), rat(4, 5).pipe_eval(&phi));
    }

    trait PipeEval {
        fn pipe_eval(self, phi: &PeriodicPLF) -> Rat;
    }
    impl PipeEval for Rat {
        fn pipe_eval(self, phi: &PeriodicPLF) -> Rat {
            phi.evaluate(&[self])
        }
    }

    #[test]
    fn rejects_discontinuity() {
        let mut raw = gmi_raw();
        // same breakpoints, second offset zeroed: left value 1, right -3/2 at 3/5
        raw.cells[1].offset = int(0);
        match PeriodicPLF::validate(raw).unwrap_err() {
            ValidationError::Discontinuity { vertex, a, b } => {
                assert_eq!(vertex, vec!["3/5".to_string()]);
                assert_eq!((a.as_str(), b.as_str()), ("1", "-3/2"));
            }
            other => panic!("expected discontinuity, got {other}"),
        }
    }

    #[test]
    fn rejects_seam_mismatch() {
        // identity on [0,1]: continuous inside, but phi(1) = 1 != phi(0) = 0
        let raw = RawFunction {
            k: 1,
            f: vec![rat(1, 2)],
            cells: vec![RawCell {
                vertices: vec![vec![int(0)], vec![int(1)]],
                gradient: vec![int(1)],
                offset: int(0),
            }],
        };
        assert!(matches!(
            PeriodicPLF::validate(raw).unwrap_err(),
            ValidationError::Discontinuity { .. }
        ));
    }

    #[test]
    fn rejects_gap_with_witness() {
        let raw = RawFunction {
            k: 1,
            f: vec![rat(1, 2)],
            cells: interval_cells(&[(int(0), int(0)), (rat(1, 2), int(0))]),
        };
        match PeriodicPLF::validate(raw).unwrap_err() {
            ValidationError::CoverageGap { point, .. } => {
                assert_eq!(point, Some(vec!["3/4".to_string()]));
            }
            other => panic!("expected gap, got {other}"),
        }
    }

    #[test]
    fn rejects_overlap_with_witness() {
        let raw = RawFunction {
            k: 1,
            f: vec![rat(1, 2)],
            cells: vec![
                RawCell {
                    vertices: vec![vec![int(0)], vec![rat(3, 5)]],
                    gradient: vec![int(0)],
                    offset: int(0),
                },
                RawCell {
                    vertices: vec![vec![rat(2, 5)], vec![int(1)]],
                    gradient: vec![int(0)],
                    offset: int(0),
                },
            ],
        };
        match PeriodicPLF::validate(raw).unwrap_err() {
            ValidationError::Overlap { i, j, point } => {
                assert_eq!((i, j), (0, 1));
                let p = crate::rational::parse_rat(&point[0]).unwrap();
                assert!(p > rat(2, 5) && p < rat(3, 5));
            }
            other => panic!("expected overlap, got {other}"),
        }
    }

    #[test]
    fn rejects_t_junction_discontinuity() {
        // Two triangles covering the square, but the left edge of one is
        // split by a hanging vertex with inconsistent affine data.
        // Upper-left triangle pair vs one lower-right triangle:
        // cells: A = conv{(0,0),(1,0),(1,1)} with gradient (0,0) offset 0,
        //        B = conv{(0,0),(1,1),(0,1)} with gradient g making a break
        // along the diagonal while agreeing at (0,0) and (1,1) but not at the
        // diagonal midpoint... affine on both sides agreeing at both shared
        // vertices must agree along the edge, so instead split B into two
        // and give the sub-triangles different data agreeing at shared
        // vertices of the split but conflicting at the hanging midpoint on
        // the diagonal of A.
        let h = |a: i64, b: i64| rat(a, b);
        let raw = RawFunction {
            k: 2,
            f: vec![rat(1, 2), rat(1, 2)],
            cells: vec![
                RawCell {
                    vertices: vec![
                        vec![h(0, 1), h(0, 1)],
                        vec![h(1, 1), h(0, 1)],
                        vec![h(1, 1), h(1, 1)],
                    ],
                    gradient: vec![int(0), int(0)],
                    offset: int(0),
                },
                RawCell {
                    vertices: vec![
                        vec![h(0, 1), h(0, 1)],
                        vec![h(1, 2), h(1, 2)],
                        vec![h(0, 1), h(1, 1)],
                    ],
                    // vanishes at (0,0) and at (1/2,1/2)? g.(1/2,1/2) = 1/2 - 1/2 = 0,
                    // g.(0,1) = -1 + offset ... choose data zero on the diagonal but
                    // nonzero at (0,1): gradient (1,-1), offset 0 works: (0,1) -> -1.
                    gradient: vec![int(1), int(-1)],
                    offset: int(0),
                },
                RawCell {
                    vertices: vec![
                        vec![h(1, 2), h(1, 2)],
                        vec![h(1, 1), h(1, 1)],
                        vec![h(0, 1), h(1, 1)],
                    ],
                    // agree with previous at (1/2,1/2) -> 0 and (0,1) -> -1:
                    // gradient (a,b), offset c: a/2+b/2+c = 0, b+c = -1, and at
                    // (1,1): a+b+c. Take a = 1, b = -2, c = 1: checks: 1/2-1+1 = 1/2 no.
                    // Solve: a/2 + b/2 + c = 0, b + c = -1 -> a = -2c - b ... choose
                    // c = 0, b = -1, a = 1: (1,1) -> 0 agrees with cell A at (1,1)?
                    // A gives 0 there. And at (1,1) value 1 - 1 = 0 ok. But along
                    // the diagonal from (1/2,1/2) to (1,1) of cell A values are 0;
                    // this cell gives x - y = 0 on the diagonal too. Make it differ:
                    // b = -3, c = 2 -> a = 1: at (1/2,1/2): 1/2 - 3/2 + 2 = 1 != 0.
                    // That breaks agreement at the hanging vertex itself, good.
                    gradient: vec![int(1), int(-3)],
                    offset: int(2),
                },
            ],
        };
        assert!(matches!(
            PeriodicPLF::validate(raw).unwrap_err(),
            ValidationError::Discontinuity { .. }
        ));
    }

    #[test]
    fn slope_partition_orders_by_first_appearance() {
        let phi = PeriodicPLF::validate(gmi_raw()).unwrap();
        let p = phi.slope_partition();
        assert_eq!(p.classes.len(), 2);
        assert_eq!(p.classes[0].gradient, vec![rat(5, 3)]);
        assert_eq!(p.classes[1].gradient, vec![rat(-5, 2)]);
        assert_eq!(p.classes[0].cells, vec![0]);
    }

    #[test]
    fn lipschitz_gmi() {
        let phi = PeriodicPLF::validate(gmi_raw()).unwrap();
        assert_eq!(phi.lipschitz_constant(), rat(5, 2));
    }

    #[test]
    fn origin_incidence_examples() {
        let phi = PeriodicPLF::validate(gmi_raw()).unwrap();
        let part = phi.slope_partition();
        assert_eq!(phi.origin_incidence(&part), vec![true, true]);

        // middle cell's gradient appears only on [1/4,1/2]: not incident
        let raw = RawFunction {
            k: 1,
            f: vec![rat(1, 2)],
            cells: interval_cells(&[
                (int(0), int(0)),
                (rat(1, 4), rat(1, 4)),
                (rat(1, 2), int(1)),
                (int(1), int(0)),
            ]),
        };
        let phi = PeriodicPLF::validate(raw).unwrap();
        let part = phi.slope_partition();
        assert_eq!(part.classes.len(), 3);
        assert_eq!(phi.origin_incidence(&part), vec![true, false, true]);
    }

    #[test]
    fn grid_values_gmi() {
        let phi = PeriodicPLF::validate(gmi_raw()).unwrap();
        let vals = phi.grid_values(5).unwrap();
        assert_eq!(vals, vec![int(0), rat(1, 3), rat(2, 3), int(1), rat(1, 2)]);
        assert!(phi.grid_compatible(5).is_ok());
        assert!(matches!(
            phi.grid_compatible(7),
            Err(GridError::OffGrid { .. })
        ));
        assert_eq!(phi.natural_grid(), 5);
    }
}
