use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AnnealConfig, AnnealState};
use crate::colouring::{Colouring, MAX_VERTICES};
use crate::error::{RamseyError, Result};
use crate::par::{self, Execution};
use crate::problem::Problem;
use crate::verify::{make_certificate, Certificate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    FoundZeroEnergy,
    BudgetExhausted,
    /// Stopped because a lower-numbered parallel attempt already succeeded.
    Cancelled,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    /// The lowest-energy colouring reached (the zero-energy one on success).
    pub colouring: Colouring,
    pub best_energy: f64,
    pub steps_taken: u64,
    pub sweeps: u64,
    pub elapsed: Duration,
}

impl SearchOutcome {
    pub fn found(&self) -> bool {
        self.status == SearchStatus::FoundZeroEnergy
    }
}

/// Snapshot handed to progress observers.
#[derive(Clone, Debug)]
pub struct Progress {
    pub n: usize,
    pub attempt: usize,
    pub step: u64,
    pub energy: f64,
    pub temperature: f64,
    pub best_energy: f64,
}

pub type ProgressFn<'a> = &'a (dyn Fn(&Progress) + Sync);

#[derive(Default, Clone, Copy)]
struct Hooks<'a> {
    progress: Option<ProgressFn<'a>>,
    cancel: Option<&'a (dyn Fn() -> bool + Sync)>,
    attempt: usize,
}

/// Anneals a colouring of `K_n` towards zero energy.
///
/// Starts from `initial` or from an i.i.d. uniform colouring drawn from
/// `cfg.rng_seed`, and alternates biased sweeps with temperature adaptation
/// until the energy is zero or `cfg.max_steps` proposals have been made.
pub fn anneal(
    prob: &Problem,
    n: usize,
    cfg: &AnnealConfig,
    initial: Option<&Colouring>,
) -> Result<SearchOutcome> {
    run_anneal(prob, n, cfg, initial, Hooks::default())
}

/// [`anneal`] reporting progress every `cfg.progress_interval` proposals.
pub fn anneal_observed(
    prob: &Problem,
    n: usize,
    cfg: &AnnealConfig,
    initial: Option<&Colouring>,
    progress: ProgressFn<'_>,
) -> Result<SearchOutcome> {
    run_anneal(
        prob,
        n,
        cfg,
        initial,
        Hooks {
            progress: Some(progress),
            ..Hooks::default()
        },
    )
}

fn run_anneal(
    prob: &Problem,
    n: usize,
    cfg: &AnnealConfig,
    initial: Option<&Colouring>,
    hooks: Hooks<'_>,
) -> Result<SearchOutcome> {
    cfg.validate()?;
    if !(2..=MAX_VERTICES).contains(&n) {
        return Err(RamseyError::config(format!(
            "vertex count must lie in 2..={MAX_VERTICES}, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let colouring = match initial {
        Some(c) if c.n_vertices() != n || c.n_colours() != prob.n_colours() => {
            return Err(RamseyError::config(format!(
                "initial colouring is K_{} with {} colours, expected K_{n} with {}",
                c.n_vertices(),
                c.n_colours(),
                prob.n_colours()
            )))
        }
        Some(c) => c.clone(),
        None => Colouring::random(n, prob.n_colours(), &mut rng)?,
    };
    let start = Instant::now();
    let mut state = AnnealState::with_rng(colouring, prob.clone(), cfg, rng)?;
    let mut next_report = cfg.progress_interval;
    let mut cancelled = false;

    while !state.is_ground() && state.steps_taken() < cfg.max_steps {
        if hooks.cancel.is_some_and(|c| c()) {
            cancelled = true;
            break;
        }
        state.biased_sweep(cfg);
        state.adapt_temperature(cfg);
        if let Some(report) = hooks.progress {
            if next_report > 0 && state.steps_taken() >= next_report {
                report(&Progress {
                    n,
                    attempt: hooks.attempt,
                    step: state.steps_taken(),
                    energy: state.energy(),
                    temperature: state.temperature(),
                    best_energy: state.best_energy(),
                });
                next_report =
                    (state.steps_taken() / cfg.progress_interval + 1) * cfg.progress_interval;
            }
        }
    }

    let status = if state.is_ground() {
        SearchStatus::FoundZeroEnergy
    } else if cancelled {
        SearchStatus::Cancelled
    } else {
        SearchStatus::BudgetExhausted
    };
    let (steps_taken, sweeps, best_energy) =
        (state.steps_taken(), state.sweeps(), state.best_energy());
    let (current, best) = state.into_parts();
    Ok(SearchOutcome {
        status,
        colouring: if status == SearchStatus::FoundZeroEnergy {
            current
        } else {
            best
        },
        best_energy,
        steps_taken,
        sweeps,
        elapsed: start.elapsed(),
    })
}

/// Adds one vertex; each new edge `(p, N)` takes the colour least used
/// among `p`'s existing edges, ties broken uniformly with `rng`.
pub fn extend_colouring<R: Rng + ?Sized>(c: &Colouring, rng: &mut R) -> Result<Colouring> {
    let n = c.n_vertices();
    if n + 1 > MAX_VERTICES {
        return Err(RamseyError::precondition(format!(
            "cannot extend beyond {MAX_VERTICES} vertices"
        )));
    }
    let new_edges: Vec<usize> = (0..n)
        .map(|p| {
            let counts = c.incident_counts(p);
            let least = *counts.iter().min().expect("at least two colours");
            let tied: Vec<usize> = (0..counts.len())
                .filter(|&col| counts[col] == least)
                .collect();
            if tied.len() == 1 {
                tied[0]
            } else {
                tied[rng.random_range(0..tied.len())]
            }
        })
        .collect();
    Colouring::from_fn(n + 1, c.n_colours(), |p, q| {
        if q == n {
            new_edges[p]
        } else {
            c.colour_between(p, q)
        }
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of attempt `attempt` at size `n`, derived from the master seed.
pub fn derive_seed(master: u64, n: usize, attempt: usize) -> u64 {
    splitmix64(splitmix64(master ^ ((n as u64) << 48)) ^ attempt as u64)
}

/// One annealing attempt as recorded in search reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub n: usize,
    pub attempt: usize,
    pub seed: u64,
    pub status: SearchStatus,
    pub best_energy: f64,
    pub steps_taken: u64,
    pub elapsed_ms: u128,
}

/// Result of a search over one or more vertex counts.
#[derive(Clone, Debug, Default)]
pub struct RamseySearchReport {
    /// One certificate per size certified, in increasing size.
    pub certificates: Vec<Certificate>,
    pub attempts: Vec<AttemptRecord>,
    /// The size at which every attempt ran out of budget, if any.
    pub failed_at: Option<usize>,
    /// Lowest energy reached at `failed_at`.
    pub best_energy_at_failure: Option<f64>,
    /// A colouring reaching that energy.
    pub best_at_failure: Option<Colouring>,
}

impl RamseySearchReport {
    /// Largest `N + 1` established, i.e. the certified lower bound on `R`.
    pub fn best_bound(&self) -> Option<usize> {
        self.certificates.last().map(Certificate::implied_bound)
    }

    pub fn best_certificate(&self) -> Option<&Certificate> {
        self.certificates.last()
    }
}

/// Driver for repeated, optionally parallel annealing attempts.
///
/// At each size, attempts `0..=restarts` run in rounds of `jobs`; within a
/// round the lowest-numbered success wins, so the result depends only on the
/// master seed and `jobs`, not on thread timing.
pub struct RamseySearch<'a> {
    problem: Problem,
    config: AnnealConfig,
    jobs: usize,
    progress: Option<ProgressFn<'a>>,
}

impl<'a> RamseySearch<'a> {
    pub fn new(problem: Problem, config: AnnealConfig) -> Self {
        Self {
            problem,
            config,
            jobs: 1,
            progress: None,
        }
    }

    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }

    pub fn progress(mut self, f: ProgressFn<'a>) -> Self {
        self.progress = Some(f);
        self
    }

    /// Certifies `start_n, start_n + 1, ...` up to `max_n`, seeding each size
    /// with the extension of the previous certificate.
    pub fn run_range(&self, start_n: usize, max_n: usize) -> Result<RamseySearchReport> {
        self.config.validate()?;
        if start_n < 2 || start_n > max_n || max_n > MAX_VERTICES {
            return Err(RamseyError::config(format!(
                "need 2 <= start <= max <= {MAX_VERTICES}, got {start_n}..{max_n}"
            )));
        }
        let mut report = RamseySearchReport::default();
        let mut previous: Option<Colouring> = None;
        for n in start_n..=max_n {
            let (winner, records, best) = self.run_size(n, previous.as_ref())?;
            report.attempts.extend(records);
            match winner {
                Some(cert) => {
                    previous = Some(cert.colouring().clone());
                    report.certificates.push(cert);
                }
                None => {
                    report.failed_at = Some(n);
                    if let Some((energy, colouring)) = best {
                        report.best_energy_at_failure = Some(energy);
                        report.best_at_failure = Some(colouring);
                    }
                    break;
                }
            }
        }
        Ok(report)
    }

    /// Attempts a single size from random starts.
    pub fn run_single(&self, n: usize) -> Result<RamseySearchReport> {
        self.run_range(n, n)
    }

    #[allow(clippy::type_complexity)]
    fn run_size(
        &self,
        n: usize,
        previous: Option<&Colouring>,
    ) -> Result<(
        Option<Certificate>,
        Vec<AttemptRecord>,
        Option<(f64, Colouring)>,
    )> {
        let total = self.config.restarts + 1;
        let exec = if self.jobs > 1 {
            Execution::Parallel
        } else {
            Execution::Sequential
        };
        let mut records = Vec::new();
        let mut best: Option<(f64, Colouring)> = None;

        for round in (0..total).step_by(self.jobs) {
            let width = self.jobs.min(total - round);
            let winner = AtomicUsize::new(usize::MAX);
            let outcomes = par::map_collect(exec, width, |k| {
                let attempt = round + k;
                let seed = derive_seed(self.config.rng_seed, n, attempt);
                let cfg = AnnealConfig {
                    rng_seed: seed,
                    ..self.config.clone()
                };
                let initial = match previous {
                    Some(c) => Some(extend_colouring(
                        c,
                        &mut ChaCha8Rng::seed_from_u64(splitmix64(seed)),
                    )?),
                    None => None,
                };
                let cancel = || winner.load(Ordering::Relaxed) < attempt;
                let hooks = Hooks {
                    progress: self.progress,
                    cancel: Some(&cancel),
                    attempt,
                };
                let outcome = run_anneal(&self.problem, n, &cfg, initial.as_ref(), hooks)?;
                if outcome.found() {
                    winner.fetch_min(attempt, Ordering::Relaxed);
                }
                Ok::<_, RamseyError>((attempt, seed, outcome))
            });

            let mut found = None;
            for result in outcomes {
                let (attempt, seed, outcome) = result?;
                if best.as_ref().is_none_or(|(e, _)| outcome.best_energy < *e) {
                    best = Some((outcome.best_energy, outcome.colouring.clone()));
                }
                records.push(AttemptRecord {
                    n,
                    attempt,
                    seed,
                    status: outcome.status,
                    best_energy: outcome.best_energy,
                    steps_taken: outcome.steps_taken,
                    elapsed_ms: outcome.elapsed.as_millis(),
                });
                if found.is_none() && outcome.found() {
                    found = Some(outcome.colouring);
                }
            }
            if let Some(colouring) = found {
                return Ok((
                    Some(make_certificate(&colouring, &self.problem)?),
                    records,
                    None,
                ));
            }
        }
        Ok((None, records, best))
    }
}

/// Grows certified colourings from `start_n` up to `max_n` with default
/// sequential scheduling.
pub fn search_ramsey(
    prob: &Problem,
    start_n: usize,
    max_n: usize,
    cfg: &AnnealConfig,
) -> Result<RamseySearchReport> {
    RamseySearch::new(prob.clone(), cfg.clone()).run_range(start_n, max_n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extension_prefers_least_used_colour() {
        // vertex 0: three edges of colour 0, one of colour 1
        let c = Colouring::from_fn(5, 2, |p, q| (p == 0 && q == 4) as usize).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ext = extend_colouring(&c, &mut rng).unwrap();
        assert_eq!(ext.n_vertices(), 6);
        assert_eq!(ext.colour_between(0, 5), 1);
        for e in c.edges() {
            assert_eq!(ext.colour(e), c.colour(e));
        }
    }

    #[test]
    fn extension_of_k2() {
        let c = Colouring::uniform(2, 2, 1).unwrap();
        let ext = extend_colouring(&c, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(ext.as_slice(), &[1, 0, 0]);
    }

    #[test]
    fn tiny_graphs_are_already_ground_states() {
        let prob = Problem::with_default_weights(vec![3, 3]).unwrap();
        let out = anneal(&prob, 2, &AnnealConfig::default(), None).unwrap();
        assert_eq!(out.status, SearchStatus::FoundZeroEnergy);
        assert_eq!(out.steps_taken, 0);
    }

    #[test]
    fn mismatched_initial_is_rejected() {
        let prob = Problem::with_default_weights(vec![3, 3]).unwrap();
        let c = Colouring::uniform(4, 2, 0).unwrap();
        assert!(anneal(&prob, 5, &AnnealConfig::default(), Some(&c)).is_err());
        let bad = AnnealConfig {
            cooling_factor: 2.0,
            ..AnnealConfig::default()
        };
        assert!(anneal(&prob, 5, &bad, None).is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(7, 10, 0);
        assert_ne!(a, derive_seed(7, 10, 1));
        assert_ne!(a, derive_seed(7, 11, 0));
        assert_ne!(a, derive_seed(8, 10, 0));
        assert_eq!(a, derive_seed(7, 10, 0));
    }
}
