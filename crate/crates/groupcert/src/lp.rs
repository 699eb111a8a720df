//! Exact linear programming by Fourier-Motzkin elimination.
//!
//! Systems are lists of constraints `coeffs . x <= rhs` (strict when flagged)
//! over a fixed variable count. Eliminating a variable combines every
//! positive-coefficient row with every negative-coefficient row; a derived
//! row is strict iff either parent is. Constraints are normalized to
//! primitive integer form and deduplicated between stages, keeping only the
//! tightest right-hand side per coefficient vector, which contains the
//! quadratic growth at the dimensions used here (<= 5 variables, tens of
//! rows).
//!
//! Feasibility, exact minimization with an attained witness, and
//! lexicographic minimization are built on the same elimination kernel.
//! Witnesses are recovered by back-substitution through the recorded
//! elimination stages.

use crate::matrix::RatMatrix;
use crate::rational::{dot, int, unit_vec, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

/// `coeffs . x <= rhs`, or `< rhs` when `strict`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rat>,
    pub rhs: Rat,
    pub strict: bool,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        LinearConstraint {
            coeffs,
            rhs,
            strict: false,
        }
    }

    pub fn new_strict(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        LinearConstraint {
            coeffs,
            rhs,
            strict: true,
        }
    }

    pub fn satisfied_by(&self, x: &[Rat]) -> bool {
        let lhs = dot(&self.coeffs, x);
        if self.strict {
            lhs < self.rhs
        } else {
            lhs <= self.rhs
        }
    }

    /// Primitive integer form: clears denominators and divides by the gcd of
    /// all entries including the right-hand side. Scaling is positive, so the
    /// constraint is unchanged as a set.
    fn normalized_key(&self) -> (Vec<BigInt>, BigInt) {
        let l =
            crate::rational::denominator_lcm(self.coeffs.iter().chain(std::iter::once(&self.rhs)));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&l / c.denom()))
            .collect();
        let rhs_int = self.rhs.numer() * (&l / self.rhs.denom());
        let mut g = rhs_int.clone();
        for c in &ints {
            g = g.gcd(c);
        }
        if g.is_zero() {
            g = BigInt::one();
        }
        (ints.iter().map(|c| c / &g).collect(), rhs_int / &g)
    }
}

/// Result of exact minimization over a closed constraint system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rat, point: Vec<Rat> },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConeError {
    #[error("cone test requires at least one vector")]
    Empty,
    #[error("cone test requires dimension >= 1")]
    ZeroDimension,
    #[error("vectors have mismatched dimensions")]
    MixedDimensions,
    #[error("proper-subset independence requires exactly k+1 vectors in R^k, got {got} in R^{k}")]
    WrongCount { got: usize, k: usize },
}

/// Normalizes, drops trivially true rows, keeps the tightest rhs per
/// coefficient vector. Returns `None` when a row is identically false.
fn compact(system: Vec<LinearConstraint>) -> Option<Vec<LinearConstraint>> {
    let mut best: BTreeMap<Vec<BigInt>, (BigInt, bool)> = BTreeMap::new();
    for con in system {
        let (key, rhs) = con.normalized_key();
        if key.iter().all(Zero::is_zero) {
            let falsified = rhs.is_negative() || (rhs.is_zero() && con.strict);
            if falsified {
                return None;
            }
            continue;
        }
        match best.get_mut(&key) {
            None => {
                best.insert(key, (rhs, con.strict));
            }
            Some(existing) => {
                let tighter = rhs < existing.0 || (rhs == existing.0 && con.strict);
                if tighter {
                    *existing = (rhs, con.strict);
                }
            }
        }
    }
    Some(
        best.into_iter()
            .map(|(key, (rhs, strict))| LinearConstraint {
                coeffs: key.into_iter().map(Rat::from_integer).collect(),
                rhs: Rat::from_integer(rhs),
                strict,
            })
            .collect(),
    )
}

/// Eliminates `var`; every returned row has zero coefficient on `var`.
fn eliminate(system: &[LinearConstraint], var: usize) -> Vec<LinearConstraint> {
    let mut out = Vec::new();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for con in system {
        match crate::rational::sign(&con.coeffs[var]) {
            0 => out.push(con.clone()),
            1 => pos.push(con),
            _ => neg.push(con),
        }
    }
    for p in &pos {
        for n in &neg {
            let a = &p.coeffs[var];
            let b = -&n.coeffs[var];
            // b * p + a * n cancels the pivot coefficient; both scalars positive.
            let coeffs: Vec<Rat> = p
                .coeffs
                .iter()
                .zip(&n.coeffs)
                .map(|(pc, nc)| pc * &b + nc * a)
                .collect();
            let rhs = &p.rhs * &b + &n.rhs * a;
            out.push(LinearConstraint {
                coeffs,
                rhs,
                strict: p.strict || n.strict,
            });
        }
    }
    out
}

/// Greedy elimination order: the variable minimizing pos*neg fill.
fn pick_var(system: &[LinearConstraint], remaining: &[usize]) -> usize {
    *remaining
        .iter()
        .min_by_key(|&&v| {
            let mut pos = 0usize;
            let mut neg = 0usize;
            for con in system {
                match crate::rational::sign(&con.coeffs[v]) {
                    1 => pos += 1,
                    -1 => neg += 1,
                    _ => {}
                }
            }
            pos * neg + pos + neg
        })
        .expect("nonempty remaining variable list")
}

struct Elimination {
    /// (variable, system before that variable was eliminated)
    stages: Vec<(usize, Vec<LinearConstraint>)>,
    /// System over the surviving variables; `None` when infeasible.
    residual: Option<Vec<LinearConstraint>>,
}

fn run_elimination(system: Vec<LinearConstraint>, vars: &[usize]) -> Elimination {
    let mut stages = Vec::new();
    let mut remaining: Vec<usize> = vars.to_vec();
    let mut current = match compact(system) {
        Some(s) => s,
        None => {
            return Elimination {
                stages,
                residual: None,
            }
        }
    };
    while !remaining.is_empty() {
        let v = pick_var(&current, &remaining);
        remaining.retain(|&r| r != v);
        stages.push((v, current.clone()));
        current = match compact(eliminate(&current, v)) {
            Some(s) => s,
            None => {
                return Elimination {
                    stages,
                    residual: None,
                }
            }
        };
    }
    Elimination {
        stages,
        residual: Some(current),
    }
}

/// Back-substitutes through the stages, extending `assignment` (indexed by
/// variable) with a feasible value for each eliminated variable.
fn recover(stages: &[(usize, Vec<LinearConstraint>)], assignment: &mut [Option<Rat>]) {
    for (var, system) in stages.iter().rev() {
        let mut lo: Option<(Rat, bool)> = None;
        let mut hi: Option<(Rat, bool)> = None;
        for con in system {
            let cv = &con.coeffs[*var];
            if cv.is_zero() {
                continue;
            }
            let mut rest = con.rhs.clone();
            for (j, cj) in con.coeffs.iter().enumerate() {
                if j != *var && !cj.is_zero() {
                    let xj = assignment[j]
                        .as_ref()
                        .expect("back-substitution visits variables in reverse elimination order");
                    rest -= cj * xj;
                }
            }
            let bound = &rest / cv;
            if cv.is_positive() {
                // var <= bound
                let tighter = match &hi {
                    None => true,
                    Some((b, s)) => bound < *b || (bound == *b && con.strict && !s),
                };
                if tighter {
                    hi = Some((bound, con.strict));
                }
            } else {
                // var >= bound
                let tighter = match &lo {
                    None => true,
                    Some((b, s)) => bound > *b || (bound == *b && con.strict && !s),
                };
                if tighter {
                    lo = Some((bound, con.strict));
                }
            }
        }
        let value = match (&lo, &hi) {
            (Some((l, false)), _) => l.clone(),
            (Some((l, true)), Some((h, _))) => (l + h) / int(2),
            (Some((l, true)), None) => l + Rat::one(),
            (None, Some((h, false))) => h.clone(),
            (None, Some((h, true))) => h - Rat::one(),
            (None, None) => Rat::zero(),
        };
        assignment[*var] = Some(value);
    }
}

/// A feasible point of the system over `dim` variables, `None` if empty.
/// Strict constraints are honored exactly.
pub fn feasible_point(system: &[LinearConstraint], dim: usize) -> Option<Vec<Rat>> {
    debug_assert!(system.iter().all(|c| c.coeffs.len() == dim));
    let vars: Vec<usize> = (0..dim).collect();
    let elim = run_elimination(system.to_vec(), &vars);
    elim.residual.as_ref()?;
    let mut assignment: Vec<Option<Rat>> = vec![None; dim];
    recover(&elim.stages, &mut assignment);
    let point: Vec<Rat> = assignment
        .into_iter()
        .map(|v| v.expect("all variables assigned"))
        .collect();
    debug_assert!(system.iter().all(|c| c.satisfied_by(&point)));
    Some(point)
}

/// Exact minimum of `objective . x + constant` over a closed system.
/// The witness point attains the minimum.
pub fn minimize(objective: &[Rat], constant: &Rat, system: &[LinearConstraint]) -> LpOutcome {
    let dim = objective.len();
    debug_assert!(system.iter().all(|c| c.coeffs.len() == dim && !c.strict));
    // Auxiliary variable t at index `dim` with objective . x <= t; the
    // minimum of t over the lifted system equals the minimum of the
    // objective. t never acquires an upper bound because its only row has
    // coefficient -1.
    let mut lifted: Vec<LinearConstraint> = system
        .iter()
        .map(|c| {
            let mut coeffs = c.coeffs.clone();
            coeffs.push(Rat::zero());
            LinearConstraint {
                coeffs,
                rhs: c.rhs.clone(),
                strict: c.strict,
            }
        })
        .collect();
    let mut obj_row = objective.to_vec();
    obj_row.push(-Rat::one());
    lifted.push(LinearConstraint::new(obj_row, Rat::zero()));

    let vars: Vec<usize> = (0..dim).collect();
    let elim = run_elimination(lifted, &vars);
    let Some(residual) = &elim.residual else {
        return LpOutcome::Infeasible;
    };
    let mut best_lower: Option<Rat> = None;
    for con in residual {
        let ct = &con.coeffs[dim];
        debug_assert!(!ct.is_positive(), "t cannot acquire an upper bound");
        if ct.is_negative() {
            let bound = &con.rhs / ct;
            if best_lower.as_ref().is_none_or(|b| bound > *b) {
                best_lower = Some(bound);
            }
        }
    }
    let Some(t_star) = best_lower else {
        return LpOutcome::Unbounded;
    };
    let mut assignment: Vec<Option<Rat>> = vec![None; dim + 1];
    assignment[dim] = Some(t_star.clone());
    recover(&elim.stages, &mut assignment);
    let point: Vec<Rat> = assignment[..dim]
        .iter()
        .map(|v| v.clone().expect("all variables assigned"))
        .collect();
    debug_assert!(system.iter().all(|c| c.satisfied_by(&point)));
    debug_assert_eq!(dot(objective, &point), t_star);
    LpOutcome::Optimal {
        value: &t_star + constant,
        point,
    }
}

/// Lexicographically smallest point of a closed system: minimizes x_0, then
/// x_1 subject to the optimal x_0, and so on. `None` if infeasible.
pub fn lex_min_point(system: &[LinearConstraint], dim: usize) -> Option<Vec<Rat>> {
    let mut pinned: Vec<LinearConstraint> = system.to_vec();
    let mut out = Vec::with_capacity(dim);
    for i in 0..dim {
        match minimize(&unit_vec(dim, i), &Rat::zero(), &pinned) {
            LpOutcome::Optimal { value, .. } => {
                // pin x_i = value with a pair of inequalities
                let e = unit_vec(dim, i);
                pinned.push(LinearConstraint::new(e.clone(), value.clone()));
                pinned.push(LinearConstraint::new(
                    crate::rational::neg_vec(&e),
                    -value.clone(),
                ));
                out.push(value);
            }
            LpOutcome::Infeasible => return None,
            LpOutcome::Unbounded => return None,
        }
    }
    Some(out)
}

/// True iff the conic hull of `vectors` is all of `R^k`: every signed unit
/// vector is a nonnegative combination of them. Zero vectors contribute
/// nothing and are permitted.
pub fn cone_spans(vectors: &[Vec<Rat>]) -> Result<bool, ConeError> {
    if vectors.is_empty() {
        return Err(ConeError::Empty);
    }
    let k = vectors[0].len();
    if k == 0 {
        return Err(ConeError::ZeroDimension);
    }
    if vectors.iter().any(|v| v.len() != k) {
        return Err(ConeError::MixedDimensions);
    }
    let m = vectors.len();
    for j in 0..k {
        for s in [1i64, -1] {
            // lambda >= 0 with sum lambda_i v_i = s * e_j
            let mut system = Vec::with_capacity(2 * k + m);
            for row in 0..k {
                let coeffs: Vec<Rat> = vectors.iter().map(|v| v[row].clone()).collect();
                let target = if row == j { int(s) } else { int(0) };
                system.push(LinearConstraint::new(coeffs.clone(), target.clone()));
                system.push(LinearConstraint::new(
                    crate::rational::neg_vec(&coeffs),
                    -target,
                ));
            }
            for i in 0..m {
                let mut coeffs = crate::rational::zero_vec(m);
                coeffs[i] = -Rat::one();
                system.push(LinearConstraint::new(coeffs, Rat::zero()));
            }
            if feasible_point(&system, m).is_none() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// For exactly `k+1` vectors in `R^k`: every `k`-subset is linearly
/// independent.
pub fn proper_subsets_independent(vectors: &[Vec<Rat>]) -> Result<bool, ConeError> {
    if vectors.is_empty() {
        return Err(ConeError::Empty);
    }
    let k = vectors[0].len();
    if k == 0 {
        return Err(ConeError::ZeroDimension);
    }
    if vectors.iter().any(|v| v.len() != k) {
        return Err(ConeError::MixedDimensions);
    }
    if vectors.len() != k + 1 {
        return Err(ConeError::WrongCount {
            got: vectors.len(),
            k,
        });
    }
    for omit in 0..vectors.len() {
        let rows: Vec<Vec<Rat>> = vectors
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != omit)
            .map(|(_, v)| v.clone())
            .collect();
        let m = RatMatrix::from_rows(rows).expect("rectangular by construction");
        if m.rank() < k {
            return Ok(false);
        }
    }
    Ok(true)
}
