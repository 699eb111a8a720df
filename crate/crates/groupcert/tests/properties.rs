//! Property-based invariants on randomized inputs: lattice periodicity,
//! segment decompositions, the GMI closed form, exact linear algebra, and
//! oracle relabeling symmetry.

use groupcert::catalog;
use groupcert::certify::{self, segment_mu, SystemOutcome, Verdict};
use groupcert::matrix::{RatMatrix, SolveOutcome};
use groupcert::minimality;
use groupcert::oracle;
use groupcert::rational::{dot, int, rat, Rat};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-24i64..=24, 1i64..=8).prop_map(|(n, d)| rat(n, d))
}

fn cut_point() -> impl Strategy<Value = Rat> {
    (2i64..=16).prop_flat_map(|d| (1..d).prop_map(move |n| rat(n, d)))
}

proptest! {
    #[test]
    fn evaluate_is_lattice_periodic(
        seed in 0u64..512,
        q in 2u64..=8,
        x in small_rat(),
        shift in -3i64..=3,
    ) {
        let phi = catalog::random_plf(1, q, seed).unwrap();
        let shifted = &x + int(shift);
        prop_assert_eq!(phi.evaluate(&[x]), phi.evaluate(&[shifted]));
    }

    #[test]
    fn segment_masses_are_convex_and_reconstruct(
        f in cut_point(),
        r in small_rat(),
    ) {
        let phi = catalog::gmi(&f).unwrap();
        let partition = phi.slope_partition();
        let dec = segment_mu(&phi, &partition, std::slice::from_ref(&r));
        prop_assert!(dec.masses.iter().sum::<Rat>().is_one());
        prop_assert!(dec.masses.iter().all(|m| !m.is_negative()));
        let rebuilt: Rat = partition
            .classes
            .iter()
            .zip(&dec.masses)
            .map(|(class, m)| m * dot(&class.gradient, std::slice::from_ref(&r)))
            .sum();
        prop_assert_eq!(phi.evaluate(&[r]), rebuilt);
    }

    #[test]
    fn gmi_certifies_with_the_closed_form(f in cut_point()) {
        let phi = catalog::gmi(&f).unwrap();
        let cert = certify::certify_facet(&phi).unwrap();
        prop_assert_eq!(cert.verdict, Verdict::FacetCertified);
        let one = Rat::one();
        let expected = vec![vec![&one / (&one - &f)], vec![-(&one / &f)]];
        prop_assert_eq!(&cert.class_gradients, &expected);
        match cert.system.unwrap().outcome {
            SystemOutcome::Unique { gradients } => prop_assert_eq!(gradients, expected),
            SystemOutcome::Degenerate { .. } => prop_assert!(false, "degenerate GMI system"),
        }
        certify::verify_certificate(&phi, &certify::certify_facet(&phi).unwrap()).unwrap();
    }

    /// `rank_and_solve` against a right-hand side built from a known
    /// solution: the outcome is never inconsistent, any unique solution is
    /// the planted one, and every nullspace vector annihilates the matrix.
    #[test]
    fn rank_and_solve_is_sound_on_planted_systems(
        entries in proptest::collection::vec((-9i64..=9, 1i64..=4), 4..=12),
        planted in proptest::collection::vec((-9i64..=9, 1i64..=3), 2..=4),
    ) {
        let cols = planted.len();
        let rows: Vec<Vec<Rat>> = entries
            .chunks(cols)
            .filter(|c| c.len() == cols)
            .map(|c| c.iter().map(|&(n, d)| rat(n, d)).collect())
            .collect();
        prop_assume!(!rows.is_empty());
        let x: Vec<Rat> = planted.iter().map(|&(n, d)| rat(n, d)).collect();
        let b: Vec<Rat> = rows.iter().map(|row| dot(row, &x)).collect();
        let m = RatMatrix::from_rows(rows.clone()).unwrap();
        match m.rank_and_solve(&b).unwrap() {
            SolveOutcome::Inconsistent => {
                prop_assert!(false, "a planted system cannot be inconsistent")
            }
            SolveOutcome::Unique(y) => {
                prop_assert_eq!(y, x);
                prop_assert_eq!(m.rank(), cols);
            }
            SolveOutcome::Underdetermined { particular, nullspace } => {
                prop_assert_eq!(m.rank() + nullspace.len(), cols);
                for row in &rows {
                    prop_assert_eq!(dot(row, &particular), dot(row, &x));
                    for h in &nullspace {
                        prop_assert!(dot(row, h).is_zero());
                    }
                }
            }
        }
    }

    /// Grid restriction commutes with evaluation, and relabeling the group
    /// by negation preserves the oracle's verdict.
    #[test]
    fn oracle_is_stable_under_group_negation(seed in 0u64..256, q in 2u64..=6) {
        let phi = catalog::random_plf(1, q, seed).unwrap();
        let model = oracle::restrict_to_grid(&phi, q).unwrap();
        let g = model.indexer();
        for a in 0..g.len() {
            prop_assert_eq!(phi.evaluate(&g.point(a)), model.values[a].clone());
        }
        let report = oracle::oracle_extremality(&model);
        let mut mirrored = model.clone();
        mirrored.f_index = g.neg(model.f_index);
        for a in 0..g.len() {
            mirrored.values[g.neg(a)] = model.values[a].clone();
        }
        let mirrored_report = oracle::oracle_extremality(&mirrored);
        prop_assert_eq!(report.verdict, mirrored_report.verdict);
        prop_assert_eq!(report.rank, mirrored_report.rank);
    }

    /// Exact subadditivity witnesses always survive independent
    /// re-evaluation, and a pass at the exact level implies a pass on any
    /// refinement of the natural grid.
    #[test]
    fn subadditivity_witnesses_reverify(seed in 0u64..512, q in 2u64..=8, m in 1u64..=3) {
        let phi = catalog::random_plf(1, q, seed).unwrap();
        match minimality::check_subadditivity_exact(&phi) {
            None => prop_assert!(minimality::subadditivity_on_grid(&phi, m * q).is_none()),
            Some(w) => prop_assert!(w.reverify(&phi)),
        }
    }
}
