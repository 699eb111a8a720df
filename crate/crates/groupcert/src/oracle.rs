//! Brute-force extremality oracle on the finite group `(1/q) Z^k / Z^k`.
//!
//! A minimal function on the finite group is extreme exactly when it is the
//! unique minimal solution of the linear system that collects every relation
//! it satisfies with equality: `u(0) = 0`, the symmetry identities
//! `u(a) + u(-f-a) = 1`, and one equation `u(a) + u(b) = u(a+b)` per tight
//! subadditivity pair. Any convex combination `u = (v + w)/2` of minimal
//! functions forces `v` and `w` to satisfy the same tight relations, so a
//! one-dimensional solution set already yields a pair of distinct minimal
//! functions through `u`, and a zero-dimensional one pins `u` down.
//!
//! The oracle works from the table of grid values alone. It never looks at
//! slopes, cells, or the direction search, so its agreement with
//! `certify_facet` on a compatible grid is evidence, not a restatement.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::certify::{certify_facet, CertifyError, Verdict};
use crate::grid::GridIndexer;
use crate::matrix::{RatMatrix, SolveOutcome};
use crate::minimality::{additive_pairs_of_values, CheckMode, ViolationKind, ViolationWitness};
use crate::plf::{GridError, PeriodicPLF};
use crate::rational::{int, rat, Rat};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
}

/// A function on the finite group, given by its value table in flat index
/// order together with the index of `f`. Everything the oracle computes is
/// read off this table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupModel {
    pub k: usize,
    pub q: u64,
    pub f_index: usize,
    pub values: Vec<Rat>,
}

impl FiniteGroupModel {
    pub fn indexer(&self) -> GridIndexer {
        GridIndexer::new(self.k, self.q)
    }
}

/// Restriction of a validated function to the `(1/q)`-grid. Requires `f` and
/// every breakpoint to lie on the grid; otherwise the restriction would not
/// determine the function and grid verdicts would say nothing about it.
pub fn restrict_to_grid(phi: &PeriodicPLF, q: u64) -> Result<FiniteGroupModel, GridError> {
    phi.grid_compatible(q)?;
    let g = GridIndexer::new(phi.k(), q);
    let coords: Vec<u64> = phi
        .f()
        .iter()
        .map(|c| {
            (c * int(q as i64))
                .to_integer()
                .to_u64()
                .expect("f lies in [0,1)^k")
        })
        .collect();
    Ok(FiniteGroupModel {
        k: phi.k(),
        q,
        f_index: g.flatten(&coords),
        values: phi.grid_values(q)?,
    })
}

/// Grid analogue of the minimality report. Witness points are genuine group
/// elements, so when the model came from `restrict_to_grid` each witness
/// re-verifies against the original function via `ViolationWitness::reverify`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMinimalityReport {
    pub q: u64,
    pub nonnegativity: Option<ViolationWitness>,
    pub origin: Option<ViolationWitness>,
    pub symmetry: Option<ViolationWitness>,
    pub subadditivity: Option<ViolationWitness>,
}

impl GridMinimalityReport {
    pub fn is_minimal(&self) -> bool {
        self.nonnegativity.is_none()
            && self.origin.is_none()
            && self.symmetry.is_none()
            && self.subadditivity.is_none()
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

/// Checks the four minimality conditions on the grid. Negativity, origin and
/// symmetry witnesses are the first failures in flat index order. The
/// subadditivity witness is the pair with the largest defect (ties broken
/// lexicographically): a maximal violation is the most robust thing to hand
/// to an independent re-check, a barely-failing pair the least.
pub fn oracle_minimality(model: &FiniteGroupModel) -> GridMinimalityReport {
    let g = model.indexer();
    let v = &model.values;

    let origin = (!v[0].is_zero()).then(|| ViolationWitness {
        kind: ViolationKind::Origin,
        points: vec![g.point(0)],
        lhs: v[0].clone(),
        rhs: Rat::zero(),
    });

    let nonnegativity = (0..g.len())
        .find(|&a| v[a].is_negative())
        .map(|a| ViolationWitness {
            kind: ViolationKind::Negativity,
            points: vec![g.point(a)],
            lhs: v[a].clone(),
            rhs: Rat::zero(),
        });

    let symmetry = (0..g.len())
        .find(|&a| !(&v[a] + &v[g.reflect(model.f_index, a)]).is_one())
        .map(|a| ViolationWitness {
            kind: ViolationKind::Symmetry,
            points: vec![g.point(a)],
            lhs: &v[a] + &v[g.reflect(model.f_index, a)],
            rhs: Rat::one(),
        });

    let mut worst: Option<(Rat, usize, usize)> = None;
    for a in 0..g.len() {
        for b in a..g.len() {
            let defect = &v[a] + &v[b] - &v[g.add(a, b)];
            if defect.is_negative() && worst.as_ref().is_none_or(|(d, _, _)| defect < *d) {
                worst = Some((defect, a, b));
            }
        }
    }
    let subadditivity = worst.map(|(_, a, b)| ViolationWitness {
        kind: ViolationKind::Subadditivity,
        points: vec![g.point(a), g.point(b)],
        lhs: &v[a] + &v[b],
        rhs: v[g.add(a, b)].clone(),
    });

    GridMinimalityReport {
        q: model.q,
        nonnegativity,
        origin,
        symmetry,
        subadditivity,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleVerdict {
    /// The model fails a minimality condition; extremality is moot.
    NotMinimal,
    /// The tight system pins the model down: extreme on this grid.
    Unique,
    /// The tight system has a positive-dimensional solution set.
    Degenerate,
}

impl OracleVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            OracleVerdict::NotMinimal => "not-minimal",
            OracleVerdict::Unique => "unique",
            OracleVerdict::Degenerate => "degenerate",
        }
    }
}

/// A constructive witness of non-extremality: both `u + epsilon * delta` and
/// `u - epsilon * delta` are minimal, so `u` is their proper convex
/// combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Perturbation {
    pub epsilon: Rat,
    pub delta: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub q: u64,
    pub unknowns: usize,
    pub rows: usize,
    pub rank: usize,
    pub verdict: OracleVerdict,
    pub minimality: GridMinimalityReport,
    /// Basis of the solution space of the homogeneous tight system, full
    /// length; empty exactly when the verdict is `Unique` or `NotMinimal`.
    pub nullspace: Vec<Vec<Rat>>,
    pub perturbation: Option<Perturbation>,
}

/// One sparse equation `sum coeff * u(index) = rhs` over the grid unknowns.
type SparseRow = (Vec<(usize, Rat)>, Rat);

fn accumulate(terms: &[(usize, i64)]) -> Vec<(usize, Rat)> {
    let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
    for &(i, c) in terms {
        *acc.entry(i).or_insert(0) += c;
    }
    acc.into_iter()
        .filter(|&(_, c)| c != 0)
        .map(|(i, c)| (i, int(c)))
        .collect()
}

/// Every relation a minimal grid function satisfies with equality, built from
/// the value table: the origin, all symmetry identities (one per unordered
/// reflection pair), and the tight subadditivity pairs of this model.
fn tight_rows(model: &FiniteGroupModel) -> Vec<SparseRow> {
    let g = model.indexer();
    let mut rows: Vec<SparseRow> = vec![(vec![(0, Rat::one())], Rat::zero())];
    for a in 0..g.len() {
        let s = g.reflect(model.f_index, a);
        if a <= s {
            rows.push((accumulate(&[(a, 1), (s, 1)]), Rat::one()));
        }
    }
    for (a, b) in additive_pairs_of_values(&model.values, &g) {
        let row = accumulate(&[(a, 1), (b, 1), (g.add(a, b), -1)]);
        // coefficients sum to 1, so cancellation can never empty a row
        debug_assert!(!row.is_empty());
        rows.push((row, Rat::zero()));
    }
    rows
}

/// Decides extremality of a minimal grid function by the dimension of the
/// solution set of its tight system.
///
/// The system is solved in three stages, all exact. Constraint propagation
/// first: a row with a single unresolved unknown pins that unknown in every
/// solution, and chasing these to a fixpoint resolves most of the table for
/// well-behaved functions. The remaining rows are then folded into a reduced
/// echelon form incrementally, discarding dependent rows as they arrive and
/// stopping early once the residual rank is full. Only if free columns
/// survive is a dense solve run, on the echelon rows alone; dropped rows were
/// combinations of kept ones, so the solution set is unchanged.
pub fn oracle_extremality(model: &FiniteGroupModel) -> OracleReport {
    let minimality = oracle_minimality(model);
    let g = model.indexer();
    let n = g.len();
    if !minimality.is_minimal() {
        return OracleReport {
            q: model.q,
            unknowns: n,
            rows: 0,
            rank: 0,
            verdict: OracleVerdict::NotMinimal,
            minimality,
            nullspace: Vec::new(),
            perturbation: None,
        };
    }

    let rows = tight_rows(model);
    for (row, rhs) in &rows {
        let got = row
            .iter()
            .fold(Rat::zero(), |acc, (i, c)| acc + c * &model.values[*i]);
        debug_assert_eq!(&got, rhs, "the model must satisfy its own tight system");
    }

    // propagation: a row with one unresolved unknown determines it
    let mut assigned: Vec<Option<Rat>> = vec![None; n];
    loop {
        let mut progress = false;
        for (row, rhs) in &rows {
            let mut residue = rhs.clone();
            let mut pending: Option<(usize, &Rat)> = None;
            let mut single = true;
            for (i, c) in row {
                match &assigned[*i] {
                    Some(value) => residue -= c * value,
                    None if pending.is_some() => {
                        single = false;
                        break;
                    }
                    None => pending = Some((*i, c)),
                }
            }
            if !single {
                continue;
            }
            if let Some((i, c)) = pending {
                assigned[i] = Some(&residue / c);
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }
    for (i, a) in assigned.iter().enumerate() {
        if let Some(value) = a {
            debug_assert_eq!(
                value, &model.values[i],
                "propagation must reproduce the model"
            );
        }
    }

    let residual: Vec<usize> = (0..n).filter(|i| assigned[*i].is_none()).collect();
    let width = residual.len();
    let col_of: BTreeMap<usize, usize> =
        residual.iter().enumerate().map(|(c, i)| (*i, c)).collect();

    // incremental reduced echelon over the residual unknowns, rhs appended
    let mut pivot_rows: Vec<Vec<Rat>> = Vec::new();
    let mut leads: Vec<usize> = Vec::new();
    'rows: for (row, rhs) in &rows {
        if pivot_rows.len() == width {
            break 'rows;
        }
        let mut dense = vec![Rat::zero(); width + 1];
        dense[width] = rhs.clone();
        let mut touches = false;
        for (i, c) in row {
            match &assigned[*i] {
                Some(value) => dense[width] -= c * value,
                None => {
                    dense[col_of[i]] = c.clone();
                    touches = true;
                }
            }
        }
        if !touches {
            debug_assert!(dense[width].is_zero());
            continue;
        }
        for (p, lead) in pivot_rows.iter().zip(&leads) {
            if !dense[*lead].is_zero() {
                let factor = std::mem::replace(&mut dense[*lead], Rat::zero());
                for j in lead + 1..=width {
                    let t = &factor * &p[j];
                    dense[j] -= t;
                }
            }
        }
        let Some(lead) = (0..width).find(|j| !dense[*j].is_zero()) else {
            debug_assert!(
                dense[width].is_zero(),
                "tight rows cannot contradict each other"
            );
            continue;
        };
        let head = dense[lead].clone();
        for entry in &mut dense[lead..=width] {
            *entry = &*entry / &head;
        }
        // keep earlier pivot rows reduced against the new one
        for p in pivot_rows.iter_mut() {
            if !p[lead].is_zero() {
                let factor = std::mem::replace(&mut p[lead], Rat::zero());
                for j in lead + 1..=width {
                    let t = &factor * &dense[j];
                    p[j] -= t;
                }
            }
        }
        let pos = leads
            .binary_search(&lead)
            .expect_err("lead column is fresh");
        leads.insert(pos, lead);
        pivot_rows.insert(pos, dense);
    }

    let nullspace: Vec<Vec<Rat>> = if pivot_rows.len() == width {
        Vec::new()
    } else {
        let coeffs: Vec<Vec<Rat>> = pivot_rows.iter().map(|r| r[..width].to_vec()).collect();
        let rhs: Vec<Rat> = pivot_rows.iter().map(|r| r[width].clone()).collect();
        let m = RatMatrix::from_rows(coeffs).expect("echelon rows share a width");
        match m.rank_and_solve(&rhs).expect("row and rhs counts agree") {
            SolveOutcome::Underdetermined { nullspace, .. } => nullspace
                .into_iter()
                .map(|h| {
                    let mut full = vec![Rat::zero(); n];
                    for (c, i) in residual.iter().enumerate() {
                        full[*i] = h[c].clone();
                    }
                    full
                })
                .collect(),
            SolveOutcome::Unique(_) => unreachable!("rank below width leaves free columns"),
            SolveOutcome::Inconsistent => unreachable!("the model solves the system"),
        }
    };

    let verdict = if nullspace.is_empty() {
        OracleVerdict::Unique
    } else {
        OracleVerdict::Degenerate
    };
    let perturbation = find_perturbation(model, &nullspace);
    OracleReport {
        q: model.q,
        unknowns: n,
        rows: rows.len(),
        rank: n - nullspace.len(),
        verdict,
        minimality,
        nullspace,
        perturbation,
    }
}

/// Line search for a concrete non-extremality witness: the first nullspace
/// direction and step `1/2^m` for which both `u + eps*h` and `u - eps*h`
/// stay minimal. Larger steps are tried first. The floor of `2^-20` is far
/// below the resolution of any grid this oracle is meant for, so running out
/// means no symmetric pair exists along the basis directions, not a near
/// miss.
fn find_perturbation(model: &FiniteGroupModel, nullspace: &[Vec<Rat>]) -> Option<Perturbation> {
    for h in nullspace {
        for m in 0..=20 {
            let epsilon = rat(1, 1i64 << m);
            let mut plus = model.clone();
            let mut minus = model.clone();
            for (i, hi) in h.iter().enumerate() {
                plus.values[i] += &epsilon * hi;
                minus.values[i] -= &epsilon * hi;
            }
            if oracle_minimality(&plus).is_minimal() && oracle_minimality(&minus).is_minimal() {
                return Some(Perturbation {
                    epsilon,
                    delta: h.clone(),
                });
            }
        }
    }
    None
}

/// Joint verdict of the exact pipeline and the grid oracle for one function
/// and one modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub q: u64,
    pub exact_minimal: bool,
    pub grid_minimal: bool,
    pub verdict: Verdict,
    pub oracle: OracleVerdict,
    pub consistent: bool,
}

/// Runs both the facet certification pipeline and the grid oracle and checks
/// the two implications that must hold between them: exactly-verified
/// minimality survives restriction to a compatible grid, and a facet
/// certificate forces the oracle verdict `Unique`. The converses are false
/// in general (a coarse grid can miss a violation, and a non-facet can
/// restrict to an extreme grid function), so they are not enforced.
pub fn cross_check(phi: &PeriodicPLF, q: u64) -> Result<ConsistencyReport, OracleError> {
    let model = restrict_to_grid(phi, q)?;
    let cert = certify_facet(phi)?;
    let report = oracle_extremality(&model);
    let exact_minimal = matches!(cert.hypotheses.minimality.mode, CheckMode::Exact)
        && cert.hypotheses.minimality.is_minimal();
    let grid_minimal = report.minimality.is_minimal();
    let consistent = (!exact_minimal || grid_minimal)
        && (cert.verdict != Verdict::FacetCertified || report.verdict == OracleVerdict::Unique);
    Ok(ConsistencyReport {
        q,
        exact_minimal,
        grid_minimal,
        verdict: cert.verdict,
        oracle: report.verdict,
        consistent,
    })
}
