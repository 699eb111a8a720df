//! Built-in example functions: classical cut functions, deliberately broken
//! variants for witness tests, lifted two-dimensional constructions, and a
//! seeded random generator for cross-checking the exact checks against the
//! finite-group oracle.

use crate::matrix::{RatMatrix, SolveOutcome};
use crate::plf::{PeriodicPLF, RawCell, RawFunction, ValidationError};
use crate::polygon;
use crate::rational::{int, rat, vec_mod1, Rat};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("construction produced an invalid function: {0}")]
    Invalid(#[from] ValidationError),
}

/// One-dimensional function from consecutive `(x, value)` breakpoints; the
/// list must start at x = 0 and end at x = 1.
pub fn interval_function(f: Rat, points: &[(Rat, Rat)]) -> RawFunction {
    debug_assert!(points.first().is_some_and(|(x, _)| x.is_zero()));
    debug_assert!(points.last().is_some_and(|(x, _)| x.is_one()));
    let cells = points
        .windows(2)
        .map(|w| {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            let g = (y1 - y0) / (x1 - x0);
            let offset = y0 - &g * x0;
            RawCell {
                vertices: vec![vec![x0.clone()], vec![x1.clone()]],
                gradient: vec![g],
                offset,
            }
        })
        .collect();
    RawFunction {
        k: 1,
        f: vec![f],
        cells,
    }
}

fn unit_interval_param(name: &str, f: &Rat) -> Result<(), CatalogError> {
    if f <= &Rat::zero() || f >= &Rat::one() {
        return Err(CatalogError::BadParameter(format!(
            "{name} requires 0 < f < 1, got {}",
            crate::rational::format_rat(f)
        )));
    }
    Ok(())
}

/// The classical two-slope function with peak at `1 - f`: slope `1/(1-f)`
/// rising on `[0, 1-f]`, slope `-1/f` falling back to zero on `[1-f, 1]`.
pub fn gmi(f: &Rat) -> Result<PeriodicPLF, CatalogError> {
    unit_interval_param("gmi", f)?;
    let peak = Rat::one() - f;
    let raw = interval_function(
        f.clone(),
        &[
            (Rat::zero(), Rat::zero()),
            (peak, Rat::one()),
            (Rat::one(), Rat::zero()),
        ],
    );
    Ok(PeriodicPLF::validate(raw)?)
}

/// Same tent shape with the peak misplaced at `f` itself. Subadditive, but
/// the symmetry relation fails for this `f`.
pub fn wrong_peak(f: &Rat) -> Result<PeriodicPLF, CatalogError> {
    unit_interval_param("wrong_peak", f)?;
    let raw = interval_function(
        f.clone(),
        &[
            (Rat::zero(), Rat::zero()),
            (f.clone(), Rat::one()),
            (Rat::one(), Rat::zero()),
        ],
    );
    Ok(PeriodicPLF::validate(raw)?)
}

/// A continuous periodic function with a steep interior spike. Valid as a
/// function but not minimal: it violates both subadditivity and symmetry.
pub fn spike() -> Result<PeriodicPLF, CatalogError> {
    let raw = interval_function(
        rat(2, 5),
        &[
            (Rat::zero(), Rat::zero()),
            (rat(1, 4), rat(1, 10)),
            (rat(1, 2), rat(9, 10)),
            (rat(3, 5), Rat::one()),
            (Rat::one(), Rat::zero()),
        ],
    );
    Ok(PeriodicPLF::validate(raw)?)
}

/// Minimal three-slope function on twelfths that is not extreme: the two
/// flat plateaus can be tilted in opposite directions without losing
/// minimality, so it is a proper convex combination of distinct minimal
/// functions. Slope count 3 also exceeds the k + 1 = 2 bound, so the facet
/// certification pipeline reports a hypothesis failure rather than a
/// certificate.
pub fn three_slope_nonextreme() -> Result<PeriodicPLF, CatalogError> {
    let h = rat(1, 2);
    let raw = interval_function(
        rat(1, 2),
        &[
            (Rat::zero(), Rat::zero()),
            (rat(1, 12), h.clone()),
            (rat(5, 12), h.clone()),
            (rat(1, 2), Rat::one()),
            (rat(7, 12), h.clone()),
            (rat(11, 12), h),
            (Rat::one(), Rat::zero()),
        ],
    );
    Ok(PeriodicPLF::validate(raw)?)
}

/// Lifts a one-dimensional function along the diagonal: the result takes the
/// value `phi1(x + y)` on the unit square. Every gradient is a multiple of
/// (1, 1), so the lift is never genuinely two-dimensional; it is the stock
/// example of a minimal function that fails that hypothesis.
pub fn diagonal_lift(phi1: &PeriodicPLF, f: Vec<Rat>) -> Result<PeriodicPLF, CatalogError> {
    if phi1.k() != 1 {
        return Err(CatalogError::BadParameter(
            "diagonal_lift takes a one-dimensional function".to_string(),
        ));
    }
    if f.len() != 2 {
        return Err(CatalogError::BadParameter(
            "diagonal_lift produces a two-dimensional function; f must have two coordinates"
                .to_string(),
        ));
    }
    // The lift satisfies the symmetry relation for f exactly when the
    // coordinates of f sum to the base function's f modulo 1.
    let sum = vec_mod1(&[&f[0] + &f[1]]);
    if sum[0] != phi1.f()[0] {
        return Err(CatalogError::BadParameter(format!(
            "f = ({}, {}) is incompatible with the base function: coordinates must sum to {} modulo 1",
            f[0],
            f[1],
            phi1.f()[0]
        )));
    }
    // Thresholds t with x + y = t along a breakpoint of phi1, in both layers
    // of [0, 2].
    let mut thresholds: Vec<Rat> = Vec::new();
    for cell in phi1.cells() {
        for v in cell.simplex.vertices() {
            thresholds.push(v[0].clone());
            thresholds.push(&v[0] + Rat::one());
        }
    }
    thresholds.sort();
    thresholds.dedup();

    let square = vec![
        vec![Rat::zero(), Rat::zero()],
        vec![Rat::one(), Rat::zero()],
        vec![Rat::one(), Rat::one()],
        vec![Rat::zero(), Rat::one()],
    ];
    let mut cells: Vec<RawCell> = Vec::new();
    for t in thresholds.windows(2) {
        let (lo, hi) = (&t[0], &t[1]);
        let band = polygon::intersect_convex(
            &square,
            &[
                crate::lp::LinearConstraint::new(vec![-Rat::one(), -Rat::one()], -lo.clone()),
                crate::lp::LinearConstraint::new(vec![Rat::one(), Rat::one()], hi.clone()),
            ],
        );
        if band.len() < 3 || !polygon::signed_area_twice(&band).is_positive() {
            continue;
        }
        // The band lies in one layer: x + y - layer stays inside [0, 1] and
        // inside a single cell of phi1, sampled at the band's midline.
        let layer = if hi <= &Rat::one() {
            Rat::zero()
        } else {
            Rat::one()
        };
        let mid = (lo + hi) / int(2) - &layer;
        let source = phi1
            .cells()
            .iter()
            .find(|c| c.simplex.contains(std::slice::from_ref(&mid)))
            .expect("band midline lies in some cell");
        let slope = source.gradient[0].clone();
        let offset = &source.offset - &slope * &layer;
        for i in 1..band.len() - 1 {
            let tri = vec![band[0].clone(), band[i].clone(), band[i + 1].clone()];
            if polygon::signed_area_twice(&tri).is_zero() {
                continue;
            }
            cells.push(RawCell {
                vertices: tri,
                gradient: vec![slope.clone(), slope.clone()],
                offset: offset.clone(),
            });
        }
    }
    Ok(PeriodicPLF::validate(RawFunction { k: 2, f, cells })?)
}

/// Genuinely two-dimensional three-slope function obtained by periodizing
/// the gauge of the triangle with vertices (0,0), (2,0), (0,2) around
/// f = (1/2, 1/2). Ten cells, gradients (1,1), (-2,0), (0,-2); compare
/// `triangle_gauge_formula` for a closed form used as an independent check.
pub fn triangle_lifting() -> Result<PeriodicPLF, CatalogError> {
    let t = |ax: Rat, ay: Rat, bx: Rat, by: Rat, cx: Rat, cy: Rat, g: (i64, i64), offset: Rat| {
        RawCell {
            vertices: vec![vec![ax, ay], vec![bx, by], vec![cx, cy]],
            gradient: vec![int(g.0), int(g.1)],
            offset,
        }
    };
    let (z, o) = (Rat::zero(), Rat::one());
    let q34 = rat(3, 4);
    let q23 = rat(2, 3);
    let q12 = rat(1, 2);
    let cells = vec![
        // central diamond around the diagonal, value x + y
        t(
            z.clone(),
            z.clone(),
            q23.clone(),
            z.clone(),
            q12.clone(),
            q12.clone(),
            (1, 1),
            z.clone(),
        ),
        t(
            z.clone(),
            z.clone(),
            z.clone(),
            q23.clone(),
            q12.clone(),
            q12.clone(),
            (1, 1),
            z.clone(),
        ),
        // right wedge, value 2 - 2x
        t(
            q23.clone(),
            z.clone(),
            o.clone(),
            z.clone(),
            q34.clone(),
            q34.clone(),
            (-2, 0),
            int(2),
        ),
        t(
            q23.clone(),
            z.clone(),
            q34.clone(),
            q34.clone(),
            q12.clone(),
            q12.clone(),
            (-2, 0),
            int(2),
        ),
        // top wedge, value 2 - 2y
        t(
            z.clone(),
            q23.clone(),
            z.clone(),
            o.clone(),
            q34.clone(),
            q34.clone(),
            (0, -2),
            int(2),
        ),
        t(
            z.clone(),
            q23.clone(),
            q34.clone(),
            q34.clone(),
            q12.clone(),
            q12.clone(),
            (0, -2),
            int(2),
        ),
        // corner pieces, value x + y - 1
        t(
            o.clone(),
            z.clone(),
            o.clone(),
            q23.clone(),
            q34.clone(),
            q34.clone(),
            (1, 1),
            -o.clone(),
        ),
        t(
            z.clone(),
            o.clone(),
            q23.clone(),
            o.clone(),
            q34.clone(),
            q34.clone(),
            (1, 1),
            -o.clone(),
        ),
        t(
            o.clone(),
            q23.clone(),
            o.clone(),
            o.clone(),
            q34.clone(),
            q34.clone(),
            (0, -2),
            int(2),
        ),
        t(
            q23.clone(),
            o.clone(),
            o.clone(),
            o.clone(),
            q34.clone(),
            q34.clone(),
            (-2, 0),
            int(2),
        ),
    ];
    let raw = RawFunction {
        k: 2,
        f: vec![q12.clone(), q12],
        cells,
    };
    Ok(PeriodicPLF::validate(raw)?)
}

/// Closed form for `triangle_lifting`: the minimum over nearby periods of
/// the gauge `max(-2u, -2v, u + v)` evaluated at the translated point.
/// Derived independently of the cell data, so agreement on a fine grid is a
/// genuine cross-check of the complex.
pub fn triangle_gauge_formula(x: &Rat, y: &Rat) -> Rat {
    let mut best: Option<Rat> = None;
    for w1 in -2..=2i64 {
        for w2 in -2..=2i64 {
            let u = x + int(w1);
            let v = y + int(w2);
            let gauge = [-int(2) * &u, -int(2) * &v, &u + &v]
                .into_iter()
                .max()
                .expect("nonempty");
            if best.as_ref().is_none_or(|b| &gauge < b) {
                best = Some(gauge);
            }
        }
    }
    best.expect("nonempty")
}

/// Seeded random continuous function on the (1/q)-grid with values in
/// half-grid steps: breakpoint values `n / (2q)`, zero at the origin, `f` a
/// nonzero grid point. For k = 2 each grid square is split along its main
/// diagonal. Construction guarantees validity; the same seed always yields
/// the same function.
pub fn random_plf(k: usize, q: u64, seed: u64) -> Result<PeriodicPLF, CatalogError> {
    if !(1..=2).contains(&k) {
        return Err(CatalogError::BadParameter(
            "random_plf supports k in {1, 2}".to_string(),
        ));
    }
    if q < 2 {
        return Err(CatalogError::BadParameter(
            "random_plf requires q >= 2".to_string(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let denom = 2 * q as i64;
    let draw_value = |rng: &mut ChaCha8Rng| rat(rng.gen_range(0..=denom), denom);
    match k {
        1 => {
            let f = rat(rng.gen_range(1..q as i64), q as i64);
            let mut points: Vec<(Rat, Rat)> = vec![(Rat::zero(), Rat::zero())];
            for i in 1..q as i64 {
                points.push((rat(i, q as i64), draw_value(&mut rng)));
            }
            points.push((Rat::one(), Rat::zero()));
            Ok(PeriodicPLF::validate(interval_function(f, &points))?)
        }
        _ => {
            let f = loop {
                let a = rng.gen_range(0..q as i64);
                let b = rng.gen_range(0..q as i64);
                if a != 0 || b != 0 {
                    break vec![rat(a, q as i64), rat(b, q as i64)];
                }
            };
            let n = q as usize;
            let mut values = vec![vec![Rat::zero(); n]; n];
            for (i, row) in values.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    if i != 0 || j != 0 {
                        *v = draw_value(&mut rng);
                    }
                }
            }
            let value_at = |i: usize, j: usize| values[i % n][j % n].clone();
            let point = |i: usize, j: usize| vec![rat(i as i64, q as i64), rat(j as i64, q as i64)];
            let mut cells = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let corners =
                        [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)].map(|(a, b)| point(a, b));
                    let vals = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
                        .map(|(a, b)| value_at(a, b));
                    for tri in [[0usize, 1, 2], [0, 2, 3]] {
                        let vertices: Vec<Vec<Rat>> =
                            tri.iter().map(|&c| corners[c].clone()).collect();
                        let tri_vals: Vec<Rat> = tri.iter().map(|&c| vals[c].clone()).collect();
                        let (gradient, offset) = affine_from_values(&vertices, &tri_vals);
                        cells.push(RawCell {
                            vertices,
                            gradient,
                            offset,
                        });
                    }
                }
            }
            Ok(PeriodicPLF::validate(RawFunction { k: 2, f, cells })?)
        }
    }
}

/// Affine interpolation through k+1 points in general position.
fn affine_from_values(vertices: &[Vec<Rat>], values: &[Rat]) -> (Vec<Rat>, Rat) {
    let k = vertices[0].len();
    let rows: Vec<Vec<Rat>> = vertices
        .iter()
        .map(|v| {
            let mut row = v.clone();
            row.push(Rat::one());
            row
        })
        .collect();
    let m = RatMatrix::from_rows(rows).expect("rectangular");
    match m.rank_and_solve(values).expect("square system") {
        SolveOutcome::Unique(sol) => (sol[..k].to_vec(), sol[k].clone()),
        _ => unreachable!("interpolation points are affinely independent"),
    }
}
