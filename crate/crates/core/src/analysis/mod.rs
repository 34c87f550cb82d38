//! Energy-landscape diagnostics and cyclic colourings.

mod cyclic;
mod dos;

pub use cyclic::{
    circular_distance, cyclic_search, CyclicColouring, CyclicMode, CyclicSearchResult,
    DEFAULT_CYCLIC_BUDGET,
};
pub use dos::{single_flip_dos, single_flip_dos_with, DosHistogram};
