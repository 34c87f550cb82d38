use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{RamseyError, Result};

const MAX_DENOMINATOR: u64 = 1_000;
const MAX_COMMON_DENOMINATOR: u64 = 1_000_000;

/// A Ramsey target `R(x_1, ..., x_l)` with one positive weight per colour.
///
/// Energies are `sum_i K_i * (number of monochromatic x_i-cliques in colour i)`.
/// When every weight is a rational with a small denominator the weights are
/// also held as integers over a common denominator, so that energy
/// differences of equal magnitude cancel exactly instead of leaving float
/// residue that would break ties in the acceptance test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemSpec", into = "ProblemSpec")]
pub struct Problem {
    clique_sizes: Vec<usize>,
    weights: Vec<f64>,
    scaled: Option<ScaledWeights>,
}

#[derive(Clone, Debug, PartialEq)]
struct ScaledWeights {
    units: Vec<i64>,
    denominator: i64,
}

#[derive(Serialize, Deserialize)]
struct ProblemSpec {
    clique_sizes: Vec<usize>,
    weights: Vec<f64>,
}

impl TryFrom<ProblemSpec> for Problem {
    type Error = RamseyError;

    fn try_from(spec: ProblemSpec) -> Result<Self> {
        Problem::new(spec.clique_sizes, spec.weights)
    }
}

impl From<Problem> for ProblemSpec {
    fn from(p: Problem) -> Self {
        Self {
            clique_sizes: p.clique_sizes,
            weights: p.weights,
        }
    }
}

impl Problem {
    pub fn new(clique_sizes: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if clique_sizes.len() < 2 {
            return Err(RamseyError::config("at least two colours are required"));
        }
        if clique_sizes.len() != weights.len() {
            return Err(RamseyError::config(format!(
                "{} clique sizes but {} weights",
                clique_sizes.len(),
                weights.len()
            )));
        }
        if let Some(x) = clique_sizes.iter().find(|&&x| x < 2) {
            return Err(RamseyError::config(format!("clique size {x} is below 2")));
        }
        if let Some(k) = weights.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
            return Err(RamseyError::config(format!(
                "weight {k} is not a positive real"
            )));
        }
        let scaled = scale_weights(&weights);
        Ok(Self {
            clique_sizes,
            weights,
            scaled,
        })
    }

    /// Weights `K_i = 1 / x_i`.
    pub fn with_default_weights(clique_sizes: Vec<usize>) -> Result<Self> {
        let weights = clique_sizes
            .iter()
            .map(|&x| 1.0 / x.max(1) as f64)
            .collect();
        Self::new(clique_sizes, weights)
    }

    /// Weights `K_i = 1`, so energies count monochromatic cliques.
    pub fn with_unit_weights(clique_sizes: Vec<usize>) -> Result<Self> {
        let weights = vec![1.0; clique_sizes.len()];
        Self::new(clique_sizes, weights)
    }

    #[inline]
    pub fn n_colours(&self) -> usize {
        self.clique_sizes.len()
    }

    #[inline]
    pub fn clique_sizes(&self) -> &[usize] {
        &self.clique_sizes
    }

    #[inline]
    pub fn clique_size(&self, colour: usize) -> usize {
        self.clique_sizes[colour]
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Whether the weights are held exactly as scaled integers.
    pub fn has_exact_weights(&self) -> bool {
        self.scaled.is_some()
    }

    pub fn has_unit_weights(&self) -> bool {
        self.weights.iter().all(|&k| k == 1.0)
    }

    /// `sum_i K_i * counts[i]`.
    pub fn energy_from_counts(&self, counts: &[u64]) -> f64 {
        debug_assert_eq!(counts.len(), self.n_colours());
        match &self.scaled {
            Some(s) => {
                let num: i64 = counts
                    .iter()
                    .zip(&s.units)
                    .map(|(&c, &u)| c as i64 * u)
                    .sum();
                num as f64 / s.denominator as f64
            }
            None => counts
                .iter()
                .zip(&self.weights)
                .map(|(&c, &k)| c as f64 * k)
                .sum(),
        }
    }

    /// Energy change from losing `destroyed` cliques of colour `old` and
    /// gaining `created` cliques of colour `new`.
    #[inline]
    pub fn energy_delta(&self, old: usize, destroyed: u64, new: usize, created: u64) -> f64 {
        match &self.scaled {
            Some(s) => {
                let num = s.units[new] * created as i64 - s.units[old] * destroyed as i64;
                num as f64 / s.denominator as f64
            }
            None => self.weights[new] * created as f64 - self.weights[old] * destroyed as f64,
        }
    }
}

fn small_denominator(k: f64) -> Option<u64> {
    (1..=MAX_DENOMINATOR).find(|&d| {
        let scaled = k * d as f64;
        (scaled - scaled.round()).abs() <= 1e-9 * scaled.max(1.0)
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn scale_weights(weights: &[f64]) -> Option<ScaledWeights> {
    let mut denominator = 1u64;
    for &k in weights {
        let d = small_denominator(k)?;
        denominator = denominator / gcd(denominator, d) * d;
        if denominator > MAX_COMMON_DENOMINATOR {
            return None;
        }
    }
    let units = weights
        .iter()
        .map(|&k| (k * denominator as f64).round() as i64)
        .collect::<Vec<_>>();
    // keep headroom so clique counts times units cannot overflow
    if units.iter().any(|&u| u > 1 << 24) {
        return None;
    }
    Some(ScaledWeights {
        units,
        denominator: denominator as i64,
    })
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("R(")?;
        for (i, x) in self.clique_sizes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// Parses comma-separated clique sizes such as `3,3,4`.
pub fn parse_targets(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .ok()
                .filter(|&x| x >= 2)
                .ok_or_else(|| {
                    RamseyError::config(format!("invalid clique size `{t}` (need an integer >= 2)"))
                })
        })
        .collect()
}
