//! Exact certification of minimality and facetness for piecewise linear,
//! lattice-periodic cut-generating functions of the group relaxation.
//!
//! A candidate function is a continuous piecewise linear `phi: R^k -> R`,
//! periodic modulo `Z^k`, described by a simplicial cell complex on the
//! fundamental domain `[0,1]^k` together with one affine piece per cell.
//! The library checks, in exact rational arithmetic:
//!
//! * minimality: `phi(0) = 0`, `phi >= 0`, subadditivity
//!   `phi(x) + phi(y) >= phi(x+y)`, and the symmetry condition
//!   `phi(x) + phi(-f-x) = 1` for the group element `f`;
//! * facetness: for a minimal function with at most `k+1` slope values whose
//!   gradients positively span `R^k`, a certificate is assembled from segment
//!   decompositions, a direction set found in the local fan at the origin,
//!   and anchor points of `Z^k - f`; the resulting square linear system has
//!   the function's own gradients as its unique solution exactly when the
//!   function is a facet (hence extreme).
//!
//! An independent finite-group oracle restricts the function to the grid
//! `(1/q)Z^k / Z^k` and decides extremality of the restriction by brute-force
//! rank computation, cross-checking the certifier.

pub mod catalog;
pub mod certify;
pub mod doc;
pub mod grid;
pub mod lp;
pub mod matrix;
pub mod minimality;
pub mod oracle;
pub mod plf;
pub mod polygon;
pub mod rational;
pub mod simplex;

pub use certify::{certify_facet, Certificate, Verdict};
pub use minimality::check_minimality;
pub use oracle::{cross_check, oracle_extremality, oracle_minimality};
pub use plf::PeriodicPLF;
pub use rational::Rat;
