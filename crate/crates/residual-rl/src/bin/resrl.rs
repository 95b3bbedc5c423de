//! Thin command-line front end for the experiment harness.
//!
//! ```text
//! resrl eval-linear [flags]   linear policy evaluation on a diagnostic MDP
//! resrl train       [flags]   model-free DDPG-variant training
//! resrl plan        [flags]   model-based training (Dyna or MVE)
//! resrl summarize --out DIR   rebuild summary.json from per-seed CSVs
//!
//! flags: --config PATH --seed N --seeds N1,N2,... --env ID --variant ID
//!        --eta X --steps N --out DIR
//! ```
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use residual_rl::harness::{self, ExperimentConfig, ExperimentKind};

const USAGE: &str = "usage: resrl <eval-linear|train|plan|summarize> [flags]

flags:
  --config PATH       load a key = value config file first
  --seed N            run a single seed
  --seeds N1,N2,...   run a list of seeds
  --env ID            environment id (pendulum, point_mass, star, random_chain)
  --variant ID        agent variant (vanilla, bi_res, res, to_res, ot_res, tt_res)
                      or learner mode for eval-linear
  --eta X             mix coefficient for the selected kind
  --steps N           training / evaluation steps
  --out DIR           output directory for CSVs and summary.json
";

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    eprint!("{USAGE}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = args.first() else {
        return usage_error("missing subcommand");
    };

    let kind = match command.as_str() {
        "eval-linear" => ExperimentKind::PolicyEval,
        "train" => ExperimentKind::ModelFree,
        "plan" => ExperimentKind::ModelBased,
        "summarize" => {
            let mut out: Option<PathBuf> = None;
            let mut it = args[1..].iter();
            while let Some(flag) = it.next() {
                match flag.as_str() {
                    "--out" => out = it.next().map(PathBuf::from),
                    other => return usage_error(&format!("unknown flag '{other}'")),
                }
            }
            let Some(dir) = out else {
                return usage_error("summarize needs --out DIR");
            };
            return match harness::summarize_dir(&dir) {
                Ok(summary) => {
                    println!(
                        "summarized {} seeds -> {}",
                        summary.seeds.len(),
                        dir.join("summary.json").display()
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            };
        }
        other => return usage_error(&format!("unknown subcommand '{other}'")),
    };

    // Flags are collected first so --config applies before overrides.
    let mut config_path: Option<PathBuf> = None;
    let mut overrides: Vec<(String, String)> = Vec::new();
    let mut it = args[1..].iter();
    while let Some(flag) = it.next() {
        let mut take = |name: &str| -> Option<String> {
            let v = it.next().cloned();
            if v.is_none() {
                eprintln!("error: flag {name} needs a value");
            }
            v
        };
        match flag.as_str() {
            "--config" => match take("--config") {
                Some(v) => config_path = Some(PathBuf::from(v)),
                None => return ExitCode::from(1),
            },
            "--seed" | "--seeds" | "--env" | "--variant" | "--eta" | "--steps" | "--out" => {
                match take(flag) {
                    Some(v) => overrides.push((flag.clone(), v)),
                    None => return ExitCode::from(1),
                }
            }
            other => return usage_error(&format!("unknown flag '{other}'")),
        }
    }

    let mut cfg = match config_path {
        Some(path) => match ExperimentConfig::from_file(&path) {
            Ok(mut c) => {
                // The subcommand pins the kind even when the file disagrees.
                c.kind = kind;
                c
            }
            Err(e) => return usage_error(&e.to_string()),
        },
        None => ExperimentConfig::new(kind),
    };

    for (flag, value) in &overrides {
        let result = match flag.as_str() {
            "--seed" => cfg.set("experiment", "seeds", value),
            "--seeds" => cfg.set("experiment", "seeds", value),
            "--env" => cfg.set("experiment", "env", value),
            "--steps" => cfg.set("experiment", "steps", value),
            "--out" => cfg.set("experiment", "out", value),
            "--variant" => match kind {
                ExperimentKind::PolicyEval => cfg.set("policy_eval", "mode", value),
                _ => cfg.set("agent", "variant", value),
            },
            "--eta" => match kind {
                ExperimentKind::PolicyEval => cfg.set("policy_eval", "eta", value),
                ExperimentKind::ModelBased => cfg.set("planning", "eta", value),
                ExperimentKind::ModelFree => cfg.set("agent", "eta", value),
            },
            _ => unreachable!(),
        };
        if let Err(e) = result {
            return usage_error(&e.to_string());
        }
    }

    if let Err(e) = cfg.validate() {
        return usage_error(&e.to_string());
    }

    match harness::run_experiment(&cfg) {
        Ok(summary) => {
            for stat in &summary.per_seed {
                match cfg.kind {
                    ExperimentKind::PolicyEval => println!(
                        "seed {}: status={} final_msbe={:?} final_mspbe={:?}",
                        stat.seed, stat.status, stat.final_msbe, stat.final_mspbe
                    ),
                    _ => println!(
                        "seed {}: status={} auc={:?} final_return={:?}",
                        stat.seed, stat.status, stat.auc, stat.final_return
                    ),
                }
            }
            if let Some(auc_mean) = summary.auc_mean {
                println!("auc_mean={auc_mean}");
            }
            if let Some(dir) = &cfg.out_dir {
                println!("results written to {}", dir.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
