use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::AnnealConfig;
use crate::colouring::{Colouring, Edge};
use crate::energy::EnergyTracker;
use crate::error::Result;
use crate::problem::Problem;

/// Metropolis rule: downhill and level moves always pass; an uphill move of
/// `delta` passes with probability `exp(-delta / temperature)`, consuming
/// exactly one uniform draw.
#[inline]
pub fn metropolis_accept<R: Rng + ?Sized>(delta: f64, temperature: f64, rng: &mut R) -> bool {
    if delta <= 0.0 {
        return true;
    }
    rng.random::<f64>() < (-delta / temperature).exp()
}

/// Reheating temperature controller.
#[derive(Clone, Debug, PartialEq)]
pub struct Thermostat {
    temperature: f64,
    reference_energy: f64,
    stagnant: u64,
}

impl Thermostat {
    pub fn new(cfg: &AnnealConfig, energy: f64) -> Self {
        Self {
            temperature: cfg.initial_temperature,
            reference_energy: energy,
            stagnant: 0,
        }
    }

    #[inline]
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn set_temperature(&mut self, t: f64) {
        self.temperature = t;
    }

    /// Adaptation calls since the energy last went down.
    #[inline]
    pub fn stagnant_sweeps(&self) -> u64 {
        self.stagnant
    }

    /// Cools if `energy` is below its value at the previous call, otherwise
    /// counts a stuck sweep and heats once `stagnation_window` is reached.
    pub fn adapt(&mut self, energy: f64, cfg: &AnnealConfig) -> f64 {
        if energy < self.reference_energy {
            self.temperature = (self.temperature * cfg.cooling_factor).max(cfg.t_min);
            self.stagnant = 0;
        } else {
            self.stagnant += 1;
            if self.stagnant >= cfg.stagnation_window {
                self.temperature = (self.temperature * cfg.heating_factor).min(cfg.t_max);
            }
        }
        self.reference_energy = energy;
        self.temperature
    }
}

/// One recorded proposal.
#[derive(Clone, Debug, PartialEq)]
pub struct Proposal {
    pub edge: Edge,
    pub colour: usize,
    pub delta: f64,
    pub accepted: bool,
}

/// The Markov chain: a tracked colouring, its temperature and counters.
#[derive(Clone, Debug)]
pub struct AnnealState {
    tracker: EnergyTracker,
    best_energy: f64,
    best: Colouring,
    thermostat: Thermostat,
    steps_taken: u64,
    sweeps: u64,
    rng: ChaCha8Rng,
    all_edges: Vec<Edge>,
    scratch: Vec<Edge>,
    trace: Option<Vec<Proposal>>,
}

impl AnnealState {
    /// A chain seeded from `cfg.rng_seed`.
    pub fn new(colouring: Colouring, problem: Problem, cfg: &AnnealConfig) -> Result<Self> {
        Self::with_rng(
            colouring,
            problem,
            cfg,
            ChaCha8Rng::seed_from_u64(cfg.rng_seed),
        )
    }

    pub fn with_rng(
        colouring: Colouring,
        problem: Problem,
        cfg: &AnnealConfig,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        cfg.validate()?;
        let all_edges = colouring.edges().collect();
        let best = colouring.clone();
        let tracker = EnergyTracker::new(colouring, problem)?;
        let energy = tracker.energy();
        Ok(Self {
            best_energy: energy,
            best,
            thermostat: Thermostat::new(cfg, energy),
            tracker,
            steps_taken: 0,
            sweeps: 0,
            rng,
            all_edges,
            scratch: Vec::new(),
            trace: None,
        })
    }

    #[inline]
    pub fn energy(&self) -> f64 {
        self.tracker.energy()
    }

    #[inline]
    pub fn best_energy(&self) -> f64 {
        self.best_energy
    }

    /// Lowest-energy colouring seen so far.
    pub fn best_colouring(&self) -> &Colouring {
        &self.best
    }

    #[inline]
    pub fn is_ground(&self) -> bool {
        self.tracker.is_zero()
    }

    #[inline]
    pub fn temperature(&self) -> f64 {
        self.thermostat.temperature()
    }

    pub fn set_temperature(&mut self, t: f64) {
        self.thermostat.set_temperature(t);
    }

    #[inline]
    pub fn steps_taken(&self) -> u64 {
        self.steps_taken
    }

    #[inline]
    pub fn sweeps(&self) -> u64 {
        self.sweeps
    }

    #[inline]
    pub fn stagnant_sweeps(&self) -> u64 {
        self.thermostat.stagnant_sweeps()
    }

    pub fn colouring(&self) -> &Colouring {
        self.tracker.colouring()
    }

    pub fn tracker(&self) -> &EnergyTracker {
        &self.tracker
    }

    pub fn into_parts(self) -> (Colouring, Colouring) {
        (self.tracker.into_colouring(), self.best)
    }

    /// Starts recording every proposal.
    pub fn enable_trace(&mut self) {
        self.trace = Some(Vec::new());
    }

    pub fn take_trace(&mut self) -> Vec<Proposal> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }

    /// A uniformly random colour other than the current colour of `e`.
    pub fn propose_colour(&mut self, e: Edge) -> usize {
        let l = self.tracker.colouring().n_colours();
        let current = self.tracker.colouring().colour(e);
        let c = self.rng.random_range(0..l - 1);
        if c >= current {
            c + 1
        } else {
            c
        }
    }

    /// Proposes recolouring `e` and applies it if the Metropolis rule accepts.
    pub fn metropolis_step(&mut self, e: Edge, new_colour: usize) -> bool {
        self.steps_taken += 1;
        let delta = self.tracker.delta(e, new_colour);
        let accepted = metropolis_accept(delta, self.thermostat.temperature(), &mut self.rng);
        if accepted {
            self.tracker.apply(e, new_colour);
            if self.tracker.energy() < self.best_energy {
                self.best_energy = self.tracker.energy();
                self.best.clone_from(self.tracker.colouring());
            }
        }
        if let Some(trace) = &mut self.trace {
            trace.push(Proposal {
                edge: e,
                colour: new_colour,
                delta,
                accepted,
            });
        }
        accepted
    }

    /// One pass over the hot edges in random order, or over every edge on
    /// each `full_sweep_period`-th sweep. Stops early at zero energy or when
    /// `max_steps` is used up. Returns the number of accepted flips.
    pub fn biased_sweep(&mut self, cfg: &AnnealConfig) -> usize {
        self.sweeps += 1;
        if self.is_ground() {
            return 0;
        }
        let full =
            self.sweeps.is_multiple_of(cfg.full_sweep_period) || self.tracker.hot_edge_count() == 0;
        let mut order = std::mem::take(&mut self.scratch);
        order.clear();
        if full {
            order.extend_from_slice(&self.all_edges);
        } else {
            order.extend(self.tracker.hot_edges());
        }
        order.shuffle(&mut self.rng);

        let mut accepted = 0;
        for &e in &order {
            if self.steps_taken >= cfg.max_steps || self.is_ground() {
                break;
            }
            let colour = self.propose_colour(e);
            accepted += self.metropolis_step(e, colour) as usize;
        }
        self.scratch = order;
        accepted
    }

    /// Applies the reheating rule after a sweep; returns the new temperature.
    pub fn adapt_temperature(&mut self, cfg: &AnnealConfig) -> f64 {
        self.thermostat.adapt(self.tracker.energy(), cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn downhill_and_level_moves_always_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for t in [1e-3, 1.0, 10.0] {
            assert!(metropolis_accept(-2.0, t, &mut rng));
            assert!(metropolis_accept(0.0, t, &mut rng));
        }
    }

    #[test]
    fn heating_after_stagnation_window() {
        let cfg = AnnealConfig {
            heating_factor: 1.5,
            stagnation_window: 3,
            ..AnnealConfig::default()
        };
        let mut th = Thermostat::new(&cfg, 4.0);
        assert_eq!(th.adapt(4.0, &cfg), 1.0);
        assert_eq!(th.adapt(4.0, &cfg), 1.0);
        assert_eq!(th.stagnant_sweeps(), 2);
        assert_eq!(th.adapt(4.0, &cfg), 1.5);
    }

    #[test]
    fn cooling_on_energy_drop() {
        let cfg = AnnealConfig {
            cooling_factor: 0.9,
            ..AnnealConfig::default()
        };
        let mut th = Thermostat::new(&cfg, 4.0);
        th.set_temperature(1.5);
        let t = th.adapt(3.0, &cfg);
        assert!((t - 1.35).abs() < 1e-12);
        assert_eq!(th.stagnant_sweeps(), 0);
    }

    #[test]
    fn temperature_is_clamped() {
        let cfg = AnnealConfig {
            stagnation_window: 1,
            ..AnnealConfig::default()
        };
        let mut th = Thermostat::new(&cfg, 1.0);
        th.set_temperature(cfg.t_max);
        assert_eq!(th.adapt(1.0, &cfg), cfg.t_max);
        th.set_temperature(cfg.t_min);
        assert_eq!(th.adapt(0.5, &cfg), cfg.t_min);
    }

    #[test]
    fn first_sweep_on_uniform_k6_visits_all_edges() {
        let prob = Problem::with_default_weights(vec![3, 3]).unwrap();
        let cfg = AnnealConfig::default();
        let mut state = AnnealState::new(Colouring::uniform(6, 2, 0).unwrap(), prob, &cfg).unwrap();
        state.enable_trace();
        state.biased_sweep(&cfg);
        let trace = state.take_trace();
        let mut seen: Vec<_> = trace.iter().map(|p| p.edge).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(trace.len(), 15);
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn ground_state_makes_no_proposals() {
        let prob = Problem::with_default_weights(vec![3, 3]).unwrap();
        let cfg = AnnealConfig::default();
        let pentagon =
            Colouring::parse("ramsey-colouring v1\nn=5 colours=2\n0 0 1 1\n1 1 0\n0 1\n0\n")
                .unwrap();
        let mut state = AnnealState::new(pentagon, prob, &cfg).unwrap();
        assert_eq!(state.biased_sweep(&cfg), 0);
        assert_eq!(state.steps_taken(), 0);
    }
}
