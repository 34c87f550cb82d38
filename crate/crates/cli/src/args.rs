use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ramsey_core::anneal::AnnealConfig;
use ramsey_core::problem::parse_targets;
use ramsey_core::Problem;

#[derive(Debug, Parser)]
#[command(
    name = "ramsey",
    version,
    about = "Search for and verify Ramsey lower-bound colourings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Anneal towards a clique-free colouring of K_N and certify it.
    Search(SearchArgs),
    /// Check a colouring or certificate file for monochromatic target cliques.
    Verify(VerifyArgs),
    /// Add one vertex to a colouring, giving each new edge the locally rarest colour.
    Extend(ExtendArgs),
    /// Single-flip density of states around a colouring.
    Dos(DosArgs),
    /// Search for a clique-free cyclic colouring.
    Cyclic(CyclicArgs),
    /// Re-run a command from a manifest written by an earlier run.
    Replay(ReplayArgs),
}

/// Comma-separated clique sizes, e.g. `3,3,4`.
#[derive(Clone, Debug)]
pub struct Targets(pub Vec<usize>);

impl FromStr for Targets {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let sizes = parse_targets(s).map_err(|e| e.to_string())?;
        if sizes.len() < 2 {
            return Err("need at least two clique sizes, one per colour".into());
        }
        Ok(Self(sizes))
    }
}

/// Comma-separated positive weights, one per colour.
#[derive(Clone, Debug)]
pub struct Weights(pub Vec<f64>);

impl FromStr for Weights {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("invalid weight `{t}`"))
            })
            .collect::<Result<_, _>>()
            .map(Self)
    }
}

/// Inclusive vertex-count range `a:b`.
#[derive(Clone, Copy, Debug)]
pub struct NRange {
    pub start: usize,
    pub end: usize,
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(':').ok_or("expected `start:end`")?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid vertex count `{t}`"))
        };
        let (start, end) = (parse(a)?, parse(b)?);
        if start > end {
            return Err(format!("empty range {start}:{end}"));
        }
        Ok(Self { start, end })
    }
}

#[derive(Clone, Debug, Args)]
pub struct ProblemArgs {
    /// Clique size per colour, e.g. `4,4` or `3,3,4`.
    #[arg(long)]
    pub targets: Targets,
    /// Energy weight per colour (default 1/x for clique size x).
    #[arg(long)]
    pub weights: Option<Weights>,
}

impl ProblemArgs {
    pub fn problem(&self) -> ramsey_core::Result<Problem> {
        match &self.weights {
            Some(w) => Problem::new(self.targets.0.clone(), w.0.clone()),
            None => Problem::with_default_weights(self.targets.0.clone()),
        }
    }
}

/// Annealing settings. Flags override values from `--config`.
#[derive(Clone, Debug, Default, Args)]
pub struct AnnealArgs {
    /// `key = value` file with annealing settings.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Master seed; drawn from system entropy when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Proposal budget per attempt [default: 20000000].
    #[arg(long)]
    pub max_steps: Option<u64>,
    /// Extra attempts per vertex count after the first fails [default: 5].
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Starting temperature [default: 1.0].
    #[arg(long)]
    pub initial_temperature: Option<f64>,
    /// Factor applied to T when the energy drops [default: 0.95].
    #[arg(long)]
    pub cooling: Option<f64>,
    /// Factor applied to T while stuck [default: 1.25].
    #[arg(long)]
    pub heating: Option<f64>,
    /// Sweeps without improvement before heating [default: 5].
    #[arg(long)]
    pub stagnation_window: Option<u64>,
    /// Every this many sweeps visit all edges [default: 50].
    #[arg(long)]
    pub full_sweep_period: Option<u64>,
    /// Lower temperature clamp [default: 0.001].
    #[arg(long)]
    pub t_min: Option<f64>,
    /// Upper temperature clamp [default: 10].
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Proposals between progress lines on stderr, 0 for none [default: 1000000].
    #[arg(long)]
    pub progress_interval: Option<u64>,
}

impl AnnealArgs {
    /// Defaults, then the config file, then flags. The seed is left at its default.
    pub fn apply(&self, cfg: &mut AnnealConfig) -> ramsey_core::Result<()> {
        if let Some(v) = self.max_steps {
            cfg.max_steps = v;
        }
        if let Some(v) = self.restarts {
            cfg.restarts = v;
        }
        if let Some(v) = self.initial_temperature {
            cfg.initial_temperature = v;
        }
        if let Some(v) = self.cooling {
            cfg.cooling_factor = v;
        }
        if let Some(v) = self.heating {
            cfg.heating_factor = v;
        }
        if let Some(v) = self.stagnation_window {
            cfg.stagnation_window = v;
        }
        if let Some(v) = self.full_sweep_period {
            cfg.full_sweep_period = v;
        }
        if let Some(v) = self.t_min {
            cfg.t_min = v;
        }
        if let Some(v) = self.t_max {
            cfg.t_max = v;
        }
        if let Some(v) = self.progress_interval {
            cfg.progress_interval = v;
        }
        cfg.validate()
    }
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("size").required(true))]
pub struct SearchArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Vertex count for a single search.
    #[arg(long, group = "size")]
    pub n: Option<usize>,
    /// Grow from `a` to `b` vertices, seeding each size from the previous one.
    #[arg(long, group = "size", value_name = "A:B")]
    pub n_range: Option<NRange>,
    #[command(flatten)]
    pub anneal: AnnealArgs,
    /// Attempts run in parallel per vertex count.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Directory for colourings, certificates and the manifest.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Colouring or certificate file.
    pub path: PathBuf,
    /// Clique sizes to check against; required for bare colouring files.
    #[arg(long)]
    pub targets: Option<Targets>,
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    /// Colouring file to extend.
    pub path: PathBuf,
    /// Seed for tie-breaking; drawn from system entropy when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DosArgs {
    /// Colouring file.
    pub path: PathBuf,
    /// Clique size per colour.
    #[arg(long)]
    pub targets: Targets,
    /// Output file for the `energy density` table (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Annealed,
}

#[derive(Debug, Args)]
pub struct CyclicArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Vertex count.
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    pub mode: ModeArg,
    /// Maximum class assignments for exhaustive mode [default: 2^31].
    #[arg(long)]
    pub budget: Option<u64>,
    #[command(flatten)]
    pub anneal: AnnealArgs,
    /// Output file for the expanded colouring [default: r<targets>_n<N>.cyclic.colouring].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Manifest file.
    pub manifest: PathBuf,
    /// Write outputs here instead of the recorded locations.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_targets_and_ranges() {
        assert_eq!("3, 3,4".parse::<Targets>().unwrap().0, vec![3, 3, 4]);
        assert!("4".parse::<Targets>().is_err());
        assert!("3,x".parse::<Targets>().is_err());
        let r: NRange = "10:17".parse().unwrap();
        assert_eq!((r.start, r.end), (10, 17));
        assert!("17:10".parse::<NRange>().is_err());
        assert!("10".parse::<NRange>().is_err());
        assert_eq!("0.5,0.25".parse::<Weights>().unwrap().0, vec![0.5, 0.25]);
    }

    #[test]
    fn flags_override_config() {
        let args = AnnealArgs {
            cooling: Some(0.8),
            t_max: Some(4.0),
            ..AnnealArgs::default()
        };
        let mut cfg =
            AnnealConfig::from_key_values("cooling_factor = 0.9\nheating_factor = 1.1\n").unwrap();
        args.apply(&mut cfg).unwrap();
        assert_eq!(cfg.cooling_factor, 0.8);
        assert_eq!(cfg.heating_factor, 1.1);
        assert_eq!(cfg.t_max, 4.0);
    }

    #[test]
    fn command_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
