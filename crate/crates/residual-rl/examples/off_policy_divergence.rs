//! Off-policy divergence on the 7-state star MDP: semi-gradient TD blows
//! up, residual gradient converges, and the same TD setup run on-policy is
//! perfectly fine.
//!
//! ```text
//! cargo run --release -p residual-rl --example off_policy_divergence
//! ```

use residual_rl::env::star_counterexample;
use residual_rl::linear::{run_policy_evaluation, EvalRunConfig, LearnerConfig, RunStatus};

fn main() -> residual_rl::Result<()> {
    let star = star_counterexample();

    // Off-policy semi-gradient TD.
    let mut cfg = EvalRunConfig::new(LearnerConfig::semi_gradient(0.01)?);
    cfg.initial_weights = star.initial_weights.clone();
    cfg.log_interval = 2000;
    let run = run_policy_evaluation(
        &star.mdp, &star.target, &star.behavior, &star.features, &cfg, 100_000, 0,
    )?;
    println!("off-policy semi-gradient TD:");
    for s in &run.samples {
        println!("  step {:>6}  |w|_inf = {:.3e}", s.step, s.w_norm);
    }
    match run.status {
        RunStatus::Diverged { step } => println!("  => DIVERGED at step {step}\n"),
        RunStatus::Completed => println!("  => unexpectedly completed\n"),
    }

    // Residual gradient on the same stream.
    let mut cfg = EvalRunConfig::new(LearnerConfig::residual_gradient(0.05)?);
    cfg.initial_weights = star.initial_weights.clone();
    cfg.log_interval = 20_000;
    let run = run_policy_evaluation(
        &star.mdp, &star.target, &star.behavior, &star.features, &cfg, 100_000, 0,
    )?;
    println!("residual gradient (status {:?}):", run.status);
    for s in &run.samples {
        println!("  step {:>6}  msbe = {:.3e}", s.step, s.msbe);
    }
    println!("  => converges toward the minimal MSBE (zero here)\n");

    // On-policy TD with the same features converges.
    let mut cfg = EvalRunConfig::new(LearnerConfig::semi_gradient(0.01)?);
    cfg.initial_weights = star.initial_weights.clone();
    cfg.log_interval = 20_000;
    let run = run_policy_evaluation(
        &star.mdp, &star.behavior, &star.behavior, &star.features, &cfg, 100_000, 0,
    )?;
    println!("on-policy semi-gradient TD (status {:?}):", run.status);
    for s in &run.samples {
        println!("  step {:>6}  mspbe = {:.3e}", s.step, s.mspbe);
    }
    Ok(())
}
