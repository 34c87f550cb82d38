mod args;
mod exit;
mod plan;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use ramsey_core::analysis::{CyclicMode, DEFAULT_CYCLIC_BUDGET};
use ramsey_core::anneal::AnnealConfig;
use ramsey_core::verify::{find_violation, Certificate};
use ramsey_core::{Colouring, Execution, Problem, RamseyError};

use args::{AnnealArgs, Cli, Command, ModeArg, VerifyArgs};
use exit::{read_input, CliResult, Failure, PARSE, SUCCESS, VERIFICATION_FAILED};
use plan::{CyclicPlan, DosPlan, ExtendPlan, Plan, RunManifest, SearchPlan};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(exit::USAGE),
            };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Verify(a) => verify(&a),
        Command::Replay(a) => {
            let text = read_input(&a.manifest)?;
            let manifest: RunManifest = serde_json::from_str(&text)
                .map_err(|e| Failure::new(PARSE, format!("{}: {e}", a.manifest.display())))?;
            let mut plan = manifest.plan;
            if let Some(dir) = &a.out_dir {
                plan.redirect(&absolute(dir)?);
            }
            plan.execute()
        }
        other => resolve(other)?.execute(),
    }
}

fn absolute(path: &Path) -> CliResult<PathBuf> {
    std::path::absolute(path)
        .map_err(|e| Failure::usage(format!("bad path {}: {e}", path.display())))
}

fn entropy_seed() -> u64 {
    rand::random()
}

/// Defaults, then `--config`, then flags. The seed comes from `--seed`, the
/// config file, or system entropy, in that order.
fn resolve_config(a: &AnnealArgs) -> CliResult<AnnealConfig> {
    let mut cfg = AnnealConfig::default();
    let mut file_seed = false;
    if let Some(path) = &a.config {
        let text = read_input(path)?;
        cfg.apply_key_values(&text)
            .map_err(|e| Failure::new(PARSE, format!("{}: {e}", path.display())))?;
        file_seed = text.lines().any(|l| {
            l.split('#')
                .next()
                .and_then(|l| l.split_once('='))
                .is_some_and(|(k, _)| matches!(k.trim(), "seed" | "rng_seed"))
        });
    }
    a.apply(&mut cfg)?;
    match a.seed {
        Some(seed) => cfg.rng_seed = seed,
        None if !file_seed => cfg.rng_seed = entropy_seed(),
        None => {}
    }
    Ok(cfg)
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn resolve(command: Command) -> CliResult<Plan> {
    Ok(match command {
        Command::Search(a) => {
            let (start_n, end_n) = match (a.n, a.n_range) {
                (Some(n), _) => (n, n),
                (None, Some(r)) => (r.start, r.end),
                (None, None) => return Err(Failure::usage("one of --n or --n-range is required")),
            };
            if a.jobs == 0 {
                return Err(Failure::usage("--jobs must be at least 1"));
            }
            Plan::Search(SearchPlan {
                problem: a.problem.problem()?,
                start_n,
                end_n,
                config: resolve_config(&a.anneal)?,
                jobs: a.jobs,
                out_dir: absolute(&a.out_dir)?,
            })
        }
        Command::Extend(a) => Plan::Extend(ExtendPlan {
            input: absolute(&a.path)?,
            seed: a.seed.unwrap_or_else(entropy_seed),
            out: a.out.as_deref().map(absolute).transpose()?,
        }),
        Command::Dos(a) => Plan::Dos(DosPlan {
            input: absolute(&a.path)?,
            targets: a.targets.0,
            execution: execution(a.sequential),
            out: a.out.as_deref().map(absolute).transpose()?,
        }),
        Command::Cyclic(a) => {
            let problem = a.problem.problem()?;
            let mode = match a.mode {
                ModeArg::Exhaustive => CyclicMode::Exhaustive {
                    budget: a.budget.unwrap_or(DEFAULT_CYCLIC_BUDGET),
                },
                ModeArg::Annealed => CyclicMode::Annealed(resolve_config(&a.anneal)?),
            };
            let out = a.out.unwrap_or_else(|| {
                let sizes: Vec<String> = problem
                    .clique_sizes()
                    .iter()
                    .map(|x| x.to_string())
                    .collect();
                PathBuf::from(format!("r{}_n{}.cyclic.colouring", sizes.join("-"), a.n))
            });
            Plan::Cyclic(CyclicPlan {
                problem,
                n: a.n,
                mode,
                execution: execution(a.sequential),
                out: absolute(&out)?,
            })
        }
        Command::Verify(_) | Command::Replay(_) => unreachable!("handled before planning"),
    })
}

fn verify(a: &VerifyArgs) -> CliResult {
    let text = read_input(&a.path)?;
    let located = |e: RamseyError| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", a.path.display(), f.message);
        f
    };

    if text.trim_start().starts_with("ramsey-certificate") {
        let cert = match Certificate::parse(&text) {
            Ok(cert) => cert,
            Err(RamseyError::NotCliqueFree(v)) => {
                println!("NOT CLIQUE-FREE: {v}");
                return Ok(VERIFICATION_FAILED);
            }
            Err(RamseyError::CertificateMismatch(m)) => {
                println!("REJECTED: {m}");
                return Ok(VERIFICATION_FAILED);
            }
            Err(e) => return Err(located(e)),
        };
        if let Some(t) = &a.targets {
            if t.0 != cert.problem().clique_sizes() {
                println!(
                    "REJECTED: certificate is for {}, not R({})",
                    cert.problem(),
                    join(&t.0)
                );
                return Ok(VERIFICATION_FAILED);
            }
        }
        println!("CLIQUE-FREE: {}", cert.statement());
        println!("{}: {}", cert.hash_algorithm(), cert.checksum());
        return Ok(SUCCESS);
    }

    let targets = a
        .targets
        .as_ref()
        .ok_or_else(|| Failure::usage("--targets is required to verify a bare colouring file"))?;
    let c = Colouring::parse(&text).map_err(|e| located(e.into()))?;
    let prob = Problem::with_unit_weights(targets.0.clone())?;
    match find_violation(&c, &prob)? {
        Some(v) => {
            println!("NOT CLIQUE-FREE: {v}");
            Ok(VERIFICATION_FAILED)
        }
        None => {
            println!("CLIQUE-FREE: {prob} >= {}", c.n_vertices() + 1);
            Ok(SUCCESS)
        }
    }
}

fn join(sizes: &[usize]) -> String {
    sizes
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
