//! Cyclic (circulant) colourings, where the colour of `{p, q}` depends only
//! on the circular distance `min(|p - q|, N - |p - q|)`.
//!
//! Rotation `v -> v + 1 mod N` is an automorphism of such a colouring, so a
//! monochromatic clique exists iff one exists through vertex 0. The
//! exhaustive search only looks there.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::anneal::{metropolis_accept, AnnealConfig, Thermostat};
use crate::colouring::{Colouring, MAX_VERTICES};
use crate::energy::mono_counts;
use crate::error::{RamseyError, Result};
use crate::par::{self, Execution};
use crate::problem::Problem;
use crate::verify::verify_clique_free;

/// Default cap on class assignments tried by exhaustive search.
pub const DEFAULT_CYCLIC_BUDGET: u64 = 1 << 31;

const SEARCH_CHUNK: u64 = 1 << 12;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclicColouring {
    n: usize,
    l: usize,
    class_colours: Vec<u8>,
}

/// Circular distance between two vertices of `Z_n`.
#[inline]
pub fn circular_distance(p: usize, q: usize, n: usize) -> usize {
    let d = (q + n - p) % n;
    d.min(n - d)
}

impl CyclicColouring {
    /// `class_colours[d]` colours every edge at circular distance `d + 1`.
    pub fn new(n: usize, l: usize, class_colours: Vec<u8>) -> Result<Self> {
        if !(2..=MAX_VERTICES).contains(&n) || l < 2 {
            return Err(RamseyError::precondition(format!(
                "invalid shape n={n}, l={l}"
            )));
        }
        if class_colours.len() != n / 2 {
            return Err(RamseyError::precondition(format!(
                "{} distance classes given, K_{n} has {}",
                class_colours.len(),
                n / 2
            )));
        }
        if let Some(c) = class_colours.iter().find(|&&c| c as usize >= l) {
            return Err(RamseyError::precondition(format!(
                "class colour {c} out of range"
            )));
        }
        Ok(Self {
            n,
            l,
            class_colours,
        })
    }

    /// The assignment whose base-`l` digits (class 0 least significant) spell `index`.
    pub fn from_index(n: usize, l: usize, mut index: u64) -> Result<Self> {
        let classes = (0..n / 2)
            .map(|_| {
                let d = (index % l as u64) as u8;
                index /= l as u64;
                d
            })
            .collect();
        Self::new(n, l, classes)
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_colours(&self) -> usize {
        self.l
    }

    pub fn class_colours(&self) -> &[u8] {
        &self.class_colours
    }

    pub fn expand(&self) -> Colouring {
        Colouring::from_fn(self.n, self.l, |p, q| {
            self.class_colours[circular_distance(p, q, self.n) - 1] as usize
        })
        .expect("validated on construction")
    }
}

impl fmt::Display for CyclicColouring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.class_colours.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Clique test on circulant colourings, working on vertex 0's neighbourhoods.
struct CirculantCheck<'a> {
    n: usize,
    full: u64,
    sizes: &'a [usize],
}

impl<'a> CirculantCheck<'a> {
    fn new(n: usize, sizes: &'a [usize]) -> Self {
        Self {
            n,
            full: if n == 64 { !0 } else { (1u64 << n) - 1 },
            sizes,
        }
    }

    #[inline]
    fn rotate(&self, set: u64, by: usize) -> u64 {
        ((set << by) | (set >> (self.n - by))) & self.full
    }

    fn has_clique(&self, connection: u64, mut cand: u64, k: usize) -> bool {
        if k == 0 {
            return true;
        }
        while cand != 0 {
            if (cand.count_ones() as usize) < k {
                return false;
            }
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            if self.has_clique(connection, cand & self.rotate(connection, v), k - 1) {
                return true;
            }
        }
        false
    }

    fn is_clique_free(&self, classes: &[u8]) -> bool {
        for (colour, &x) in self.sizes.iter().enumerate() {
            if x > self.n {
                continue;
            }
            // vertices joined to 0 in this colour
            let mut conn = 0u64;
            for v in 1..self.n {
                if classes[v.min(self.n - v) - 1] as usize == colour {
                    conn |= 1 << v;
                }
            }
            if self.has_clique(conn, conn, x - 1) {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum CyclicMode {
    /// Tries every class assignment in index order, up to `budget` of them.
    Exhaustive { budget: u64 },
    /// Metropolis annealing over class colours.
    Annealed(AnnealConfig),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CyclicSearchResult {
    pub found: Option<CyclicColouring>,
    /// Assignments evaluated (exhaustive) or proposals made plus the start (annealed).
    pub candidates_tested: u64,
}

/// Looks for a clique-free cyclic colouring of `K_n`.
///
/// Any colouring returned has passed [`verify_clique_free`].
pub fn cyclic_search(
    prob: &Problem,
    n: usize,
    mode: &CyclicMode,
    exec: Execution,
) -> Result<CyclicSearchResult> {
    if !(2..=MAX_VERTICES).contains(&n) {
        return Err(RamseyError::config(format!(
            "vertex count must lie in 2..={MAX_VERTICES}, got {n}"
        )));
    }
    let result = match mode {
        CyclicMode::Exhaustive { budget } => exhaustive(prob, n, *budget, exec)?,
        CyclicMode::Annealed(cfg) => annealed(prob, n, cfg)?,
    };
    if let Some(cc) = &result.found {
        assert!(
            verify_clique_free(&cc.expand(), prob)?,
            "cyclic search produced a colouring the verifier rejects: {cc}"
        );
    }
    Ok(result)
}

fn exhaustive(
    prob: &Problem,
    n: usize,
    budget: u64,
    exec: Execution,
) -> Result<CyclicSearchResult> {
    let l = prob.n_colours();
    let classes = n / 2;
    let required = (l as u128).checked_pow(classes as u32).unwrap_or(u128::MAX);
    if required > budget as u128 {
        return Err(RamseyError::BudgetExceeded {
            required,
            budget: budget as u128,
        });
    }
    let total = required as u64;
    let check = CirculantCheck::new(n, prob.clique_sizes());

    let hit = par::find_first(exec, total, SEARCH_CHUNK, |start, end| {
        let mut digits = CyclicColouring::from_index(n, l, start).ok()?.class_colours;
        for idx in start..end {
            if check.is_clique_free(&digits) {
                return Some(idx);
            }
            for d in digits.iter_mut() {
                *d += 1;
                if (*d as usize) < l {
                    break;
                }
                *d = 0;
            }
        }
        None
    });

    Ok(match hit {
        Some(idx) => CyclicSearchResult {
            found: Some(CyclicColouring::from_index(n, l, idx)?),
            candidates_tested: idx + 1,
        },
        None => CyclicSearchResult {
            found: None,
            candidates_tested: total,
        },
    })
}

fn class_energy(prob: &Problem, cc: &CyclicColouring) -> Result<(f64, bool)> {
    let counts = mono_counts(&cc.expand(), prob)?;
    Ok((
        prob.energy_from_counts(&counts),
        counts.iter().all(|&c| c == 0),
    ))
}

fn annealed(prob: &Problem, n: usize, cfg: &AnnealConfig) -> Result<CyclicSearchResult> {
    cfg.validate()?;
    let l = prob.n_colours();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let classes = (0..n / 2).map(|_| rng.random_range(0..l) as u8).collect();
    let mut current = CyclicColouring::new(n, l, classes)?;
    let (mut energy, mut zero) = class_energy(prob, &current)?;
    let mut thermostat = Thermostat::new(cfg, energy);
    let mut steps = 0u64;
    let sweep_len = (n / 2).max(1);

    while !zero && steps < cfg.max_steps {
        for _ in 0..sweep_len {
            if zero || steps >= cfg.max_steps {
                break;
            }
            steps += 1;
            let class = rng.random_range(0..n / 2);
            let old = current.class_colours[class] as usize;
            let mut colour = rng.random_range(0..l - 1);
            if colour >= old {
                colour += 1;
            }
            current.class_colours[class] = colour as u8;
            let (proposed, proposed_zero) = class_energy(prob, &current)?;
            if metropolis_accept(proposed - energy, thermostat.temperature(), &mut rng) {
                energy = proposed;
                zero = proposed_zero;
            } else {
                current.class_colours[class] = old as u8;
            }
        }
        thermostat.adapt(energy, cfg);
    }

    Ok(CyclicSearchResult {
        found: zero.then_some(current),
        candidates_tested: steps + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pentagon_is_the_cyclic_five_cycle() {
        let cc = CyclicColouring::new(5, 2, vec![0, 1]).unwrap();
        let c = cc.expand();
        assert_eq!(c.colour_between(0, 1), 0);
        assert_eq!(c.colour_between(0, 2), 1);
        assert_eq!(c.colour_between(0, 4), 0);
        let prob = Problem::with_default_weights(vec![3, 3]).unwrap();
        assert!(verify_clique_free(&c, &prob).unwrap());
    }

    #[test]
    fn distance_handles_antipodes() {
        assert_eq!(circular_distance(0, 3, 6), 3);
        assert_eq!(circular_distance(5, 1, 6), 2);
        assert_eq!(circular_distance(4, 0, 5), 1);
    }

    #[test]
    fn rejects_wrong_class_count() {
        assert!(CyclicColouring::new(6, 2, vec![0, 1]).is_err());
        assert!(CyclicColouring::new(6, 2, vec![0, 1, 2]).is_err());
    }

    #[test]
    fn circulant_check_matches_verifier_at_small_n() {
        let prob = Problem::with_unit_weights(vec![3, 4]).unwrap();
        for n in [5, 7, 8, 9] {
            let check = CirculantCheck::new(n, prob.clique_sizes());
            for idx in 0..(1u64 << (n / 2)) {
                let cc = CyclicColouring::from_index(n, 2, idx).unwrap();
                assert_eq!(
                    check.is_clique_free(cc.class_colours()),
                    verify_clique_free(&cc.expand(), &prob).unwrap(),
                    "n={n} classes={cc}"
                );
            }
        }
    }

    #[test]
    fn exhaustive_budget_is_enforced() {
        let prob = Problem::with_unit_weights(vec![3, 3, 4]).unwrap();
        let mode = CyclicMode::Exhaustive { budget: 1000 };
        assert!(matches!(
            cyclic_search(&prob, 29, &mode, Execution::Sequential),
            Err(RamseyError::BudgetExceeded {
                required: 4_782_969,
                ..
            })
        ));
    }
}
