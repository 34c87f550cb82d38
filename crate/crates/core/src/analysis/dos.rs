use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::colouring::Colouring;
use crate::energy::{check_compatible, flip_counts, mono_counts};
use crate::error::Result;
use crate::par::{self, Execution};
use crate::problem::Problem;

/// Energies of all colourings one edge recolouring away from a base
/// colouring, with every weight set to 1 so energies are clique counts.
#[derive(Clone, Debug, PartialEq)]
pub struct DosHistogram {
    counts: BTreeMap<u64, u64>,
    neighbours: u64,
    base_energy: u64,
    off_manifold: bool,
}

impl DosHistogram {
    /// Neighbour count per energy.
    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    /// Normalized density per energy.
    pub fn densities(&self) -> BTreeMap<u64, f64> {
        self.counts
            .iter()
            .map(|(&e, &k)| (e, k as f64 / self.neighbours as f64))
            .collect()
    }

    pub fn density(&self, energy: u64) -> f64 {
        self.counts
            .get(&energy)
            .map_or(0.0, |&k| k as f64 / self.neighbours as f64)
    }

    /// `N(N-1)/2 * (l-1)`.
    pub fn neighbours(&self) -> u64 {
        self.neighbours
    }

    pub fn base_energy(&self) -> u64 {
        self.base_energy
    }

    /// Set when the base colouring was not clique-free.
    pub fn off_manifold(&self) -> bool {
        self.off_manifold
    }

    pub fn mean_energy(&self) -> f64 {
        let sum: f64 = self.counts.iter().map(|(&e, &k)| e as f64 * k as f64).sum();
        sum / self.neighbours as f64
    }

    /// `energy density` lines for plotting, preceded by a `#` header.
    pub fn to_two_column(&self) -> String {
        let mut out = String::from("# energy density\n");
        for (e, d) in self.densities() {
            let _ = writeln!(out, "{e} {d}");
        }
        out
    }
}

/// Single-flip density of states around `c` for the clique sizes of `prob`.
///
/// Weights in `prob` are ignored; every clique counts 1.
pub fn single_flip_dos(c: &Colouring, prob: &Problem) -> Result<DosHistogram> {
    single_flip_dos_with(c, prob, Execution::default())
}

pub fn single_flip_dos_with(
    c: &Colouring,
    prob: &Problem,
    exec: Execution,
) -> Result<DosHistogram> {
    check_compatible(c, prob)?;
    let unit = Problem::with_unit_weights(prob.clique_sizes().to_vec())?;
    let base: u64 = mono_counts(c, &unit)?.iter().sum();
    let edges: Vec<_> = c.edges().collect();
    let l = c.n_colours();

    let per_edge = par::map_collect(exec, edges.len(), |i| {
        let e = edges[i];
        let current = c.colour(e);
        (0..l)
            .filter(|&b| b != current)
            .map(|b| {
                let (destroyed, created) = flip_counts(c, &unit, e, b)?;
                Ok(base - destroyed + created)
            })
            .collect::<Result<Vec<u64>>>()
    });

    let mut counts = BTreeMap::new();
    for energies in per_edge {
        for e in energies? {
            *counts.entry(e).or_insert(0) += 1;
        }
    }
    Ok(DosHistogram {
        counts,
        neighbours: (edges.len() * (l - 1)) as u64,
        base_energy: base,
        off_manifold: base != 0,
    })
}
