//! Lower bounds for multicolour Ramsey numbers by energy minimization.
//!
//! An edge colouring of `K_N` with colours `0..l` gets energy
//! `sum_i K_i * #{monochromatic x_i-cliques of colour i}`, which vanishes
//! exactly on colourings that certify `R(x_1, ..., x_l) > N`. The
//! [`anneal`] module drives that energy to zero with a clique-biased
//! Metropolis search, [`verify`] checks results independently and issues
//! [`verify::Certificate`]s, and [`analysis`] looks at the landscape around
//! clique-free colourings and at cyclic constructions.

pub mod analysis;
pub mod anneal;
pub mod colouring;
pub mod energy;
pub mod error;
pub mod par;
pub mod problem;
pub mod verify;

pub use colouring::{Colouring, Edge, MAX_VERTICES};
pub use error::{ParseError, RamseyError, Result};
pub use par::Execution;
pub use problem::Problem;
