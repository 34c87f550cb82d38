//! Clique-biased Metropolis annealing with reheating and vertex-by-vertex
//! growth of certified colourings.

mod config;
mod search;
mod state;

pub use config::{AnnealConfig, CONFIG_KEYS};
pub use search::{
    anneal, anneal_observed, derive_seed, extend_colouring, search_ramsey, AttemptRecord, Progress,
    ProgressFn, RamseySearch, RamseySearchReport, SearchOutcome, SearchStatus,
};
pub use state::{metropolis_accept, AnnealState, Proposal, Thermostat};
