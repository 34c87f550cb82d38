//! Fully resolved runs. Each subcommand that writes files is first turned
//! into a [`Plan`] holding every setting, including the seed, so the run can
//! be repeated from its manifest.

use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use ramsey_core::analysis::{cyclic_search, single_flip_dos_with, CyclicMode};
use ramsey_core::anneal::{extend_colouring, AnnealConfig, Progress, RamseySearch};
use ramsey_core::energy::mono_counts;
use ramsey_core::{Colouring, Execution, Problem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::exit::{read_input, write_output, CliResult, Failure, PARSE, SEARCH_EXHAUSTED, SUCCESS};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum Plan {
    Search(SearchPlan),
    Extend(ExtendPlan),
    Dos(DosPlan),
    Cyclic(CyclicPlan),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchPlan {
    pub problem: Problem,
    pub start_n: usize,
    pub end_n: usize,
    pub config: AnnealConfig,
    pub jobs: usize,
    pub out_dir: PathBuf,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtendPlan {
    pub input: PathBuf,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DosPlan {
    pub input: PathBuf,
    pub targets: Vec<usize>,
    pub execution: Execution,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CyclicPlan {
    pub problem: Problem,
    pub n: usize,
    pub mode: CyclicMode,
    pub execution: Execution,
    pub out: PathBuf,
}

/// Written next to the outputs of every run.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub plan: Plan,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
    pub exit_code: u8,
    pub outcome: serde_json::Value,
}

struct Report {
    exit_code: u8,
    outputs: Vec<PathBuf>,
    outcome: serde_json::Value,
}

fn targets_stem(sizes: &[usize]) -> String {
    let sizes: Vec<String> = sizes.iter().map(|x| x.to_string()).collect();
    format!("r{}", sizes.join("-"))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn load_colouring(path: &Path) -> CliResult<Colouring> {
    Colouring::parse(&read_input(path)?)
        .map_err(|e| Failure::new(PARSE, format!("{}: {e}", path.display())))
}

impl Plan {
    pub fn name(&self) -> &'static str {
        match self {
            Plan::Search(_) => "search",
            Plan::Extend(_) => "extend",
            Plan::Dos(_) => "dos",
            Plan::Cyclic(_) => "cyclic",
        }
    }

    fn inputs(&self) -> Vec<PathBuf> {
        match self {
            Plan::Extend(p) => vec![p.input.clone()],
            Plan::Dos(p) => vec![p.input.clone()],
            Plan::Search(_) | Plan::Cyclic(_) => vec![],
        }
    }

    /// Where the manifest goes, or `None` when nothing is written to disk.
    fn manifest_path(&self) -> Option<PathBuf> {
        match self {
            Plan::Search(p) => Some(p.out_dir.join(format!(
                "{}_search.manifest.json",
                targets_stem(p.problem.clique_sizes())
            ))),
            Plan::Extend(ExtendPlan { out, .. }) | Plan::Dos(DosPlan { out, .. }) => {
                out.as_deref().map(|o| with_suffix(o, ".manifest.json"))
            }
            Plan::Cyclic(p) => Some(with_suffix(&p.out, ".manifest.json")),
        }
    }

    /// Moves every output into `dir`, keeping file names.
    pub fn redirect(&mut self, dir: &Path) {
        let move_file = |p: &mut PathBuf| {
            if let Some(name) = p.file_name() {
                *p = dir.join(name);
            }
        };
        match self {
            Plan::Search(p) => p.out_dir = dir.to_path_buf(),
            Plan::Extend(ExtendPlan { out, .. }) | Plan::Dos(DosPlan { out, .. }) => {
                if let Some(o) = out.as_mut() {
                    move_file(o);
                }
            }
            Plan::Cyclic(p) => move_file(&mut p.out),
        }
    }

    /// Runs the plan and writes its manifest.
    pub fn execute(&self) -> CliResult {
        let started_at = Utc::now();
        let report = match self {
            Plan::Search(p) => run_search(p)?,
            Plan::Extend(p) => run_extend(p)?,
            Plan::Dos(p) => run_dos(p)?,
            Plan::Cyclic(p) => run_cyclic(p)?,
        };
        if let Some(path) = self.manifest_path() {
            let manifest = RunManifest {
                tool: env!("CARGO_PKG_NAME").into(),
                version: env!("CARGO_PKG_VERSION").into(),
                subcommand: self.name().into(),
                plan: self.clone(),
                inputs: self.inputs(),
                outputs: report.outputs,
                started_at,
                finished_at: Utc::now(),
                exit_code: report.exit_code,
                outcome: report.outcome,
            };
            let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
            write_output(&path, &(text + "\n"))?;
            eprintln!("manifest: {}", path.display());
        }
        Ok(report.exit_code)
    }
}

fn print_progress(p: &Progress) {
    eprintln!(
        "step={} N={} E={:.6} T={:.6} best={:.6}",
        p.step, p.n, p.energy, p.temperature, p.best_energy
    );
}

fn run_search(plan: &SearchPlan) -> CliResult<Report> {
    let progress = print_progress;
    let mut search = RamseySearch::new(plan.problem.clone(), plan.config.clone()).jobs(plan.jobs);
    if plan.config.progress_interval > 0 {
        search = search.progress(&progress);
    }
    let report = search.run_range(plan.start_n, plan.end_n)?;

    let stem = targets_stem(plan.problem.clique_sizes());
    let mut outputs = vec![];
    let mut certified = vec![];
    for cert in &report.certificates {
        let n = cert.colouring().n_vertices();
        let colouring_path = plan.out_dir.join(format!("{stem}_n{n}.colouring"));
        let cert_path = plan.out_dir.join(format!("{stem}_n{n}.cert"));
        write_output(&colouring_path, &cert.colouring().to_canonical_string())?;
        write_output(&cert_path, &cert.to_file_string())?;
        println!(
            "CERTIFIED: {} (N={n}) -> {}",
            cert.statement(),
            cert_path.display()
        );
        certified.push(json!({
            "n": n,
            "statement": cert.statement(),
            "colouring": colouring_path,
            "certificate": cert_path,
            "hash": cert.checksum(),
        }));
        outputs.extend([colouring_path, cert_path]);
    }

    let mut failure = serde_json::Value::Null;
    if let (Some(n), Some(best)) = (report.failed_at, &report.best_at_failure) {
        let counts = mono_counts(best, &plan.problem)?;
        let path = plan.out_dir.join(format!("{stem}_n{n}.best.colouring"));
        write_output(&path, &best.to_canonical_string())?;
        let energy = report.best_energy_at_failure.unwrap_or(f64::NAN);
        let attempts = report.attempts.iter().filter(|a| a.n == n).count();
        println!(
            "EXHAUSTED: N={n} best_energy={energy:.6} ({} monochromatic cliques, per colour {counts:?}) after {attempts} attempts -> {}",
            counts.iter().sum::<u64>(),
            path.display()
        );
        failure =
            json!({ "n": n, "best_energy": energy, "mono_counts": counts, "best_colouring": path });
        outputs.push(path);
    }

    let exit_code = match report.best_certificate() {
        Some(cert) => {
            println!("best bound: {}", cert.statement());
            SUCCESS
        }
        None => SEARCH_EXHAUSTED,
    };
    Ok(Report {
        exit_code,
        outputs,
        outcome: json!({
            "best_bound": report.best_bound(),
            "certified": certified,
            "failure": failure,
            "attempts": report.attempts,
        }),
    })
}

fn run_extend(plan: &ExtendPlan) -> CliResult<Report> {
    let c = load_colouring(&plan.input)?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let ext = extend_colouring(&c, &mut rng)?;
    let text = ext.to_canonical_string();
    match &plan.out {
        Some(path) => {
            write_output(path, &text)?;
            eprintln!(
                "extended K_{} to K_{} -> {}",
                c.n_vertices(),
                ext.n_vertices(),
                path.display()
            );
        }
        None => print!("{text}"),
    }
    Ok(Report {
        exit_code: SUCCESS,
        outputs: plan.out.iter().cloned().collect(),
        outcome: json!({ "n_vertices": ext.n_vertices(), "seed": plan.seed }),
    })
}

fn run_dos(plan: &DosPlan) -> CliResult<Report> {
    let c = load_colouring(&plan.input)?;
    let prob = Problem::with_unit_weights(plan.targets.clone())?;
    let h = single_flip_dos_with(&c, &prob, plan.execution)?;
    if h.off_manifold() {
        eprintln!(
            "warning: base colouring holds {} monochromatic target cliques; histogram is off the clique-free manifold",
            h.base_energy()
        );
    }
    let table = h.to_two_column();
    match &plan.out {
        Some(path) => write_output(path, &table)?,
        None => print!("{table}"),
    }
    eprintln!(
        "neighbours={} mean_energy={:.6}",
        h.neighbours(),
        h.mean_energy()
    );
    Ok(Report {
        exit_code: SUCCESS,
        outputs: plan.out.iter().cloned().collect(),
        outcome: json!({
            "neighbours": h.neighbours(),
            "base_energy": h.base_energy(),
            "off_manifold": h.off_manifold(),
            "mean_energy": h.mean_energy(),
            "counts": h.counts(),
        }),
    })
}

fn run_cyclic(plan: &CyclicPlan) -> CliResult<Report> {
    let r = cyclic_search(&plan.problem, plan.n, &plan.mode, plan.execution)?;
    let Some(found) = r.found else {
        println!(
            "NOT FOUND: no clique-free cyclic colouring of K_{} for {} ({} candidates)",
            plan.n, plan.problem, r.candidates_tested
        );
        return Ok(Report {
            exit_code: SEARCH_EXHAUSTED,
            outputs: vec![],
            outcome: json!({ "found": null, "candidates_tested": r.candidates_tested }),
        });
    };
    write_output(&plan.out, &found.expand().to_canonical_string())?;
    println!("classes: {found}");
    println!(
        "CLIQUE-FREE: {} >= {} (cyclic, {} candidates) -> {}",
        plan.problem,
        plan.n + 1,
        r.candidates_tested,
        plan.out.display()
    );
    Ok(Report {
        exit_code: SUCCESS,
        outputs: vec![plan.out.clone()],
        outcome: json!({ "found": found.class_colours(), "candidates_tested": r.candidates_tested }),
    })
}
