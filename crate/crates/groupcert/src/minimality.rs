//! Minimality of a validated periodic function: nonnegativity, value zero at
//! the origin, the symmetry relation `phi(x) + phi(-f-x) = 1`, and
//! subadditivity `phi(x) + phi(y) >= phi(x+y)`.
//!
//! For k <= 2 every check is exact over the rationals. Nonnegativity reduces
//! to the cell vertices. Symmetry reduces to finitely many affine identities:
//! in one dimension `phi(x) + phi(-f-x) - 1` is affine between merged
//! breakpoints, in two dimensions it is affine on each intersection of a cell
//! with a reflected translated cell, so vanishing at region vertices decides
//! the identity. Subadditivity is a finite family of linear programs, one per
//! cell triple and integer carry, solved by Fourier-Motzkin elimination.
//!
//! For k >= 3 symmetry and subadditivity fall back to a dense grid at twice
//! the natural grid of the function; the report mode records this weaker
//! `GridVerified` status.
//!
//! Every rejection carries a `ViolationWitness` that can be re-verified from
//! the function alone by `reverify`, independent of the search that found it.

use crate::grid::GridIndexer;
use crate::lp::{self, LinearConstraint, LpOutcome};
use crate::plf::PeriodicPLF;
use crate::polygon;
use crate::rational::{add_vec, dot, int, neg_vec, sub_vec, vec_mod1, zero_vec, Rat};
use crate::simplex::Simplex;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Exact,
    GridVerified { q: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Negativity,
    Origin,
    Symmetry,
    Subadditivity,
}

/// A concrete point (or pair of points) at which one of the minimality
/// conditions fails, together with both sides of the violated relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationWitness {
    pub kind: ViolationKind,
    pub points: Vec<Vec<Rat>>,
    pub lhs: Rat,
    pub rhs: Rat,
}

impl ViolationWitness {
    /// Recomputes the violated relation from the function alone. A witness
    /// found by any search strategy must survive this to be trusted.
    pub fn reverify(&self, phi: &PeriodicPLF) -> bool {
        match self.kind {
            ViolationKind::Negativity => {
                self.points.len() == 1
                    && phi.evaluate(&self.points[0]) == self.lhs
                    && self.rhs.is_zero()
                    && self.lhs < self.rhs
            }
            ViolationKind::Origin => {
                self.points.len() == 1
                    && self.points[0].iter().all(Zero::is_zero)
                    && phi.evaluate(&self.points[0]) == self.lhs
                    && self.rhs.is_zero()
                    && self.lhs != self.rhs
            }
            ViolationKind::Symmetry => {
                if self.points.len() != 1 {
                    return false;
                }
                let x = &self.points[0];
                let reflected = neg_vec(&add_vec(phi.f(), x));
                phi.evaluate(x) + phi.evaluate(&reflected) == self.lhs
                    && self.rhs.is_one()
                    && self.lhs != self.rhs
            }
            ViolationKind::Subadditivity => {
                if self.points.len() != 2 {
                    return false;
                }
                let (x, y) = (&self.points[0], &self.points[1]);
                phi.evaluate(x) + phi.evaluate(y) == self.lhs
                    && phi.evaluate(&add_vec(x, y)) == self.rhs
                    && self.lhs < self.rhs
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalityReport {
    pub mode: CheckMode,
    pub nonnegativity: Option<ViolationWitness>,
    pub origin: Option<ViolationWitness>,
    pub symmetry: Option<ViolationWitness>,
    pub subadditivity: Option<ViolationWitness>,
}

impl MinimalityReport {
    pub fn is_minimal(&self) -> bool {
        self.nonnegativity.is_none()
            && self.origin.is_none()
            && self.symmetry.is_none()
            && self.subadditivity.is_none()
    }

    pub fn first_violation(&self) -> Option<&ViolationWitness> {
        self.nonnegativity
            .as_ref()
            .or(self.origin.as_ref())
            .or(self.symmetry.as_ref())
            .or(self.subadditivity.as_ref())
    }

    pub fn violations(&self) -> Vec<&ViolationWitness> {
        [
            &self.nonnegativity,
            &self.origin,
            &self.symmetry,
            &self.subadditivity,
        ]
        .into_iter()
        .flatten()
        .collect()
    }
}

pub fn check_minimality(phi: &PeriodicPLF) -> MinimalityReport {
    let (mode, symmetry, subadditivity) = if phi.k() <= 2 {
        (
            CheckMode::Exact,
            check_symmetry_exact(phi),
            check_subadditivity_exact(phi),
        )
    } else {
        let q = 2 * phi.natural_grid();
        (
            CheckMode::GridVerified { q },
            symmetry_on_grid(phi, q),
            subadditivity_on_grid(phi, q),
        )
    };
    MinimalityReport {
        mode,
        nonnegativity: check_nonnegativity(phi),
        origin: check_origin(phi),
        symmetry,
        subadditivity,
    }
}

/// The function is affine on each cell, so its minimum over a cell sits at a
/// vertex; scanning vertices in canonical cell order is exact for every k.
pub fn check_nonnegativity(phi: &PeriodicPLF) -> Option<ViolationWitness> {
    for cell in phi.cells() {
        for v in cell.simplex.vertices() {
            let value = cell.value_at(v);
            if value.is_negative() {
                return Some(ViolationWitness {
                    kind: ViolationKind::Negativity,
                    points: vec![v.clone()],
                    lhs: value,
                    rhs: Rat::zero(),
                });
            }
        }
    }
    None
}

pub fn check_origin(phi: &PeriodicPLF) -> Option<ViolationWitness> {
    let zero = zero_vec(phi.k());
    let value = phi.evaluate(&zero);
    if value.is_zero() {
        None
    } else {
        Some(ViolationWitness {
            kind: ViolationKind::Origin,
            points: vec![zero],
            lhs: value,
            rhs: Rat::zero(),
        })
    }
}

/// Exact symmetry check, k <= 2 only.
pub fn check_symmetry_exact(phi: &PeriodicPLF) -> Option<ViolationWitness> {
    match phi.k() {
        1 => symmetry_exact_1d(phi),
        2 => symmetry_exact_2d(phi),
        _ => panic!("exact symmetry check supports k <= 2"),
    }
}

fn symmetry_witness(phi: &PeriodicPLF, x: &[Rat]) -> ViolationWitness {
    let reflected = neg_vec(&add_vec(phi.f(), x));
    ViolationWitness {
        kind: ViolationKind::Symmetry,
        points: vec![x.to_vec()],
        lhs: phi.evaluate(x) + phi.evaluate(&reflected),
        rhs: Rat::one(),
    }
}

/// `s(x) = phi(x) + phi(-f-x) - 1` is affine between consecutive marks of
/// the merged breakpoint set `B union (-f-B mod 1)`, so it vanishes on [0,1]
/// iff it vanishes at every mark.
fn symmetry_exact_1d(phi: &PeriodicPLF) -> Option<ViolationWitness> {
    let f = &phi.f()[0];
    let mut marks: Vec<Rat> = vec![Rat::zero(), Rat::one()];
    for cell in phi.cells() {
        for v in cell.simplex.vertices() {
            marks.push(v[0].clone());
            marks.push(vec_mod1(&[-f - &v[0]])[0].clone());
        }
    }
    marks.sort();
    marks.dedup();
    for x in &marks {
        let w = symmetry_witness(phi, std::slice::from_ref(x));
        if w.lhs != w.rhs {
            return Some(w);
        }
    }
    None
}

/// For x in cell i with `-f-x+w` in cell j, `phi(x) + phi(-f-x) - 1` is
/// affine; the regions with positive area cover each cell up to measure
/// zero, and the sum is continuous, so checking region vertices is complete.
fn symmetry_exact_2d(phi: &PeriodicPLF) -> Option<ViolationWitness> {
    let cells = phi.cells();
    let f = phi.f();
    for ci in cells {
        let poly_i: Vec<Vec<Rat>> = ci.simplex.vertices().to_vec();
        for cj in cells {
            for w1 in 0..=2i64 {
                for w2 in 0..=2i64 {
                    let shift = vec![int(w1) - &f[0], int(w2) - &f[1]];
                    // reflected translated cell: { shift - y : y in cell j }
                    let reflected: Vec<Vec<Rat>> = cj
                        .simplex
                        .vertices()
                        .iter()
                        .map(|v| sub_vec(&shift, v))
                        .collect();
                    let reflected =
                        Simplex::new(reflected).expect("point reflection preserves nondegeneracy");
                    let region = polygon::intersect_convex(&poly_i, &reflected.halfspaces(false));
                    if region.len() < 3 || !polygon::signed_area_twice(&region).is_positive() {
                        continue;
                    }
                    let mut bad: Option<Vec<Rat>> = None;
                    for u in &region {
                        let s = ci.value_at(u) + cj.value_at(&sub_vec(&shift, u)) - Rat::one();
                        if !s.is_zero() && bad.as_ref().is_none_or(|b| u < b) {
                            bad = Some(u.clone());
                        }
                    }
                    if let Some(u) = bad {
                        return Some(symmetry_witness(phi, &u));
                    }
                }
            }
        }
    }
    None
}

/// Exact subadditivity check via one linear program per cell triple and
/// integer carry. Pairs are enumerated with i <= j (the defect is symmetric
/// in x and y), triples in lexicographic order; the first violating triple
/// yields the witness, taken as the lexicographically least minimizer.
pub fn check_subadditivity_exact(phi: &PeriodicPLF) -> Option<ViolationWitness> {
    let cells = phi.cells();
    let k = phi.k();
    let carries = carry_shifts(k);
    let boxes: Vec<(Vec<Rat>, Vec<Rat>)> = cells.iter().map(|c| c.simplex.bbox()).collect();
    let halfspaces: Vec<Vec<LinearConstraint>> =
        cells.iter().map(|c| c.simplex.halfspaces(false)).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..cells.len() {
        for j in i..cells.len() {
            pairs.push((i, j));
        }
    }
    pairs.par_iter().find_map_first(|&(i, j)| {
        let sum_lo = add_vec(&boxes[i].0, &boxes[j].0);
        let sum_hi = add_vec(&boxes[i].1, &boxes[j].1);
        for (l, cell_l) in cells.iter().enumerate() {
            for w in &carries {
                let touches = boxes[l]
                    .0
                    .iter()
                    .zip(&boxes[l].1)
                    .zip(w)
                    .zip(sum_lo.iter().zip(&sum_hi))
                    .all(|(((lo, hi), wc), (slo, shi))| &(lo + wc) <= shi && slo <= &(hi + wc));
                if !touches {
                    continue;
                }
                // variables z = (x, y) in R^{2k}
                let mut system: Vec<LinearConstraint> = Vec::new();
                for c in &halfspaces[i] {
                    let mut coeffs = c.coeffs.clone();
                    coeffs.extend(std::iter::repeat_with(Rat::zero).take(k));
                    system.push(LinearConstraint::new(coeffs, c.rhs.clone()));
                }
                for c in &halfspaces[j] {
                    let mut coeffs = vec![Rat::zero(); k];
                    coeffs.extend_from_slice(&c.coeffs);
                    system.push(LinearConstraint::new(coeffs, c.rhs.clone()));
                }
                for c in &halfspaces[l] {
                    let mut coeffs = c.coeffs.clone();
                    coeffs.extend_from_slice(&c.coeffs);
                    system.push(LinearConstraint::new(coeffs, &c.rhs + dot(&c.coeffs, w)));
                }
                // defect on the region:
                //   (g_i - g_l).x + (g_j - g_l).y + (c_i + c_j - c_l + g_l.w)
                let mut objective = sub_vec(&cells[i].gradient, &cell_l.gradient);
                objective.extend(sub_vec(&cells[j].gradient, &cell_l.gradient));
                let constant =
                    &cells[i].offset + &cells[j].offset - &cell_l.offset + dot(&cell_l.gradient, w);
                let LpOutcome::Optimal { value, .. } = lp::minimize(&objective, &constant, &system)
                else {
                    continue;
                };
                if !value.is_negative() {
                    continue;
                }
                // pin the objective to its minimum, then take the lex-least
                // point of the optimal face as the canonical witness
                let level = &value - &constant;
                let mut pinned = system.clone();
                pinned.push(LinearConstraint::new(objective.clone(), level.clone()));
                pinned.push(LinearConstraint::new(neg_vec(&objective), -level));
                let z = lp::lex_min_point(&pinned, 2 * k)
                    .expect("optimal face of a feasible bounded program is nonempty");
                let x = z[..k].to_vec();
                let y = z[k..].to_vec();
                let lhs = phi.evaluate(&x) + phi.evaluate(&y);
                let rhs = phi.evaluate(&add_vec(&x, &y));
                debug_assert_eq!(&lhs - &rhs, value);
                return Some(ViolationWitness {
                    kind: ViolationKind::Subadditivity,
                    points: vec![x, y],
                    lhs,
                    rhs,
                });
            }
        }
        None
    })
}

/// Integer carries w with x + y - w back in the fundamental domain: each
/// coordinate of x + y lies in [0, 2], so w ranges over {0,1,2}^k.
fn carry_shifts(k: usize) -> Vec<Vec<Rat>> {
    let mut out: Vec<Vec<Rat>> = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=2i64).map(move |c| {
                    let mut v = prefix.clone();
                    v.push(int(c));
                    v
                })
            })
            .collect();
    }
    out
}

/// Dense symmetry check on the (1/q)-grid. Complete only for functions whose
/// behavior is determined by that grid; reported as `GridVerified`.
pub fn symmetry_on_grid(phi: &PeriodicPLF, q: u64) -> Option<ViolationWitness> {
    let g = GridIndexer::new(phi.k(), q);
    let values = phi.grid_values(q).expect("q >= 1");
    let f_idx = grid_index_of(&g, phi.f(), q);
    for a in 0..g.len() {
        let b = g.reflect(f_idx, a);
        let sum = &values[a] + &values[b];
        if !sum.is_one() {
            return Some(ViolationWitness {
                kind: ViolationKind::Symmetry,
                points: vec![g.point(a)],
                lhs: sum,
                rhs: Rat::one(),
            });
        }
    }
    None
}

/// Dense subadditivity check on the (1/q)-grid over all unordered pairs.
pub fn subadditivity_on_grid(phi: &PeriodicPLF, q: u64) -> Option<ViolationWitness> {
    let g = GridIndexer::new(phi.k(), q);
    let values = phi.grid_values(q).expect("q >= 1");
    for a in 0..g.len() {
        for b in a..g.len() {
            let c = g.add(a, b);
            let lhs = &values[a] + &values[b];
            if lhs < values[c] {
                return Some(ViolationWitness {
                    kind: ViolationKind::Subadditivity,
                    points: vec![g.point(a), g.point(b)],
                    lhs,
                    rhs: values[c].clone(),
                });
            }
        }
    }
    None
}

/// All unordered grid pairs `(a, b)` with `phi(a) + phi(b) = phi(a + b)`,
/// as flat indices with `a <= b`. These are the tight subadditivity
/// relations; the finite-group oracle turns each into a linear equation.
pub fn additivity_set_on_grid(
    phi: &PeriodicPLF,
    q: u64,
) -> Result<Vec<(usize, usize)>, crate::plf::GridError> {
    phi.grid_compatible(q)?;
    let g = GridIndexer::new(phi.k(), q);
    let values = phi.grid_values(q)?;
    Ok(additive_pairs_of_values(&values, &g))
}

pub(crate) fn additive_pairs_of_values(values: &[Rat], g: &GridIndexer) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for a in 0..g.len() {
        for b in a..g.len() {
            if &values[a] + &values[b] == values[g.add(a, b)] {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

/// Flat index of a grid point given as rationals; panics off-grid, callers
/// check `grid_compatible` first.
fn grid_index_of(g: &GridIndexer, x: &[Rat], q: u64) -> usize {
    let coords: Vec<u64> = x
        .iter()
        .map(|c| {
            let scaled = c * int(q as i64);
            assert!(scaled.is_integer(), "point is not on the (1/{q})-grid");
            scaled
                .to_integer()
                .to_u64()
                .expect("grid coordinate fits u64")
        })
        .collect();
    g.flatten(&coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::plf::{RawCell, RawFunction};
    use crate::rational::rat;

    #[test]
    fn gmi_is_minimal() {
        let phi = catalog::gmi(&rat(2, 5)).unwrap();
        let report = check_minimality(&phi);
        assert!(report.is_minimal());
        assert_eq!(report.mode, CheckMode::Exact);
    }

    #[test]
    fn wrong_peak_fails_symmetry_only() {
        let phi = catalog::wrong_peak(&rat(2, 5)).unwrap();
        let report = check_minimality(&phi);
        assert!(report.nonnegativity.is_none());
        assert!(report.origin.is_none());
        assert!(report.subadditivity.is_none());
        let w = report.symmetry.expect("symmetry fails");
        assert_eq!(w.points, vec![vec![int(0)]]);
        assert_eq!(w.lhs, rat(2, 3));
        assert_eq!(w.rhs, int(1));
        assert!(w.reverify(&phi));
    }

    #[test]
    fn spike_fails_subadditivity_and_symmetry() {
        let phi = catalog::spike().unwrap();
        let report = check_minimality(&phi);
        let sub = report.subadditivity.expect("subadditivity fails");
        assert_eq!(sub.points, vec![vec![rat(1, 4)], vec![rat(1, 4)]]);
        assert_eq!(sub.lhs, rat(1, 5));
        assert_eq!(sub.rhs, rat(9, 10));
        assert!(sub.reverify(&phi));

        let sym = report.symmetry.expect("symmetry fails");
        assert_eq!(sym.points, vec![vec![rat(1, 10)]]);
        assert_eq!(sym.lhs, rat(47, 50));
        assert!(sym.reverify(&phi));
    }

    #[test]
    fn negative_function_caught_at_vertex() {
        let phi = crate::plf::PeriodicPLF::validate(RawFunction {
            k: 1,
            f: vec![rat(1, 2)],
            cells: vec![
                RawCell {
                    vertices: vec![vec![int(0)], vec![rat(1, 2)]],
                    gradient: vec![rat(-1, 2)],
                    offset: int(0),
                },
                RawCell {
                    vertices: vec![vec![rat(1, 2)], vec![int(1)]],
                    gradient: vec![rat(1, 2)],
                    offset: rat(-1, 2),
                },
            ],
        })
        .unwrap();
        let w = check_nonnegativity(&phi).expect("negative");
        assert_eq!(w.points, vec![vec![rat(1, 2)]]);
        assert_eq!(w.lhs, rat(-1, 4));
        assert!(w.reverify(&phi));
    }

    #[test]
    fn constant_one_fails_origin() {
        let phi = crate::plf::PeriodicPLF::validate(RawFunction {
            k: 1,
            f: vec![rat(1, 2)],
            cells: vec![RawCell {
                vertices: vec![vec![int(0)], vec![int(1)]],
                gradient: vec![int(0)],
                offset: int(1),
            }],
        })
        .unwrap();
        let report = check_minimality(&phi);
        let w = report.origin.expect("origin fails");
        assert_eq!(w.lhs, int(1));
        assert!(w.reverify(&phi));
        assert!(report.symmetry.is_some());
    }

    fn zero_function_2d() -> crate::plf::PeriodicPLF {
        let z = int(0);
        crate::plf::PeriodicPLF::validate(RawFunction {
            k: 2,
            f: vec![rat(1, 2), rat(1, 2)],
            cells: vec![
                RawCell {
                    vertices: vec![
                        vec![z.clone(), z.clone()],
                        vec![int(1), z.clone()],
                        vec![int(1), int(1)],
                    ],
                    gradient: vec![z.clone(), z.clone()],
                    offset: z.clone(),
                },
                RawCell {
                    vertices: vec![
                        vec![z.clone(), z.clone()],
                        vec![z.clone(), int(1)],
                        vec![int(1), int(1)],
                    ],
                    gradient: vec![z.clone(), z.clone()],
                    offset: z.clone(),
                },
            ],
        })
        .unwrap()
    }

    #[test]
    fn zero_function_2d_fails_symmetry_with_lex_least_vertex() {
        let phi = zero_function_2d();
        let report = check_minimality(&phi);
        assert!(report.subadditivity.is_none());
        assert!(report.nonnegativity.is_none());
        assert!(report.origin.is_none());
        let w = report.symmetry.expect("0 + 0 != 1");
        assert_eq!(w.points, vec![vec![int(0), rat(1, 2)]]);
        assert_eq!(w.lhs, int(0));
        assert!(w.reverify(&phi));
    }

    #[test]
    fn grid_checks_agree_on_small_examples() {
        let gmi = catalog::gmi(&rat(2, 5)).unwrap();
        assert!(symmetry_on_grid(&gmi, 10).is_none());
        assert!(subadditivity_on_grid(&gmi, 10).is_none());

        let spike = catalog::spike().unwrap();
        let w = subadditivity_on_grid(&spike, 20).expect("violated on grid");
        assert!(w.reverify(&spike));
        let s = symmetry_on_grid(&spike, 20).expect("violated on grid");
        assert!(s.reverify(&spike));
    }

    #[test]
    fn tampered_witness_fails_reverify() {
        let spike = catalog::spike().unwrap();
        let mut w = check_subadditivity_exact(&spike).unwrap();
        w.lhs += rat(1, 100);
        assert!(!w.reverify(&spike));
    }

    #[test]
    fn additivity_set_of_gmi_on_its_natural_grid() {
        let gmi = catalog::gmi(&rat(2, 5)).unwrap();
        // values on the (1/5)-grid: 0, 1/3, 2/3, 1, 1/2
        let pairs = additivity_set_on_grid(&gmi, 5).unwrap();
        assert_eq!(
            pairs,
            vec![
                (0, 0),
                (0, 1),
                (0, 2),
                (0, 3),
                (0, 4),
                (1, 1),
                (1, 2),
                (4, 4)
            ]
        );
        assert!(additivity_set_on_grid(&gmi, 7).is_err());
    }
}
