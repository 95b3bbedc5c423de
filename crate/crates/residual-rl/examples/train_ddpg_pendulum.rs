//! Trains vanilla DDPG on the pendulum swing-up task and writes the
//! evaluation curve as CSV. A short demonstration run by default; pass a
//! step budget for a full training run (30k steps reaches roughly -110
//! evaluation return).
//!
//! ```text
//! cargo run --release -p residual-rl --example train_ddpg_pendulum [steps] [seed]
//! ```

use residual_rl::agent::Variant;
use residual_rl::harness::{run_experiment, ExperimentConfig, ExperimentKind};

fn main() -> residual_rl::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let steps: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(8000);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0);

    let mut cfg = ExperimentConfig::new(ExperimentKind::ModelFree);
    cfg.env = "pendulum".into();
    cfg.seeds = vec![seed];
    cfg.steps = steps;
    cfg.eval_interval = 1000;
    cfg.eval_episodes = 10;
    cfg.out_dir = Some("results/ddpg_pendulum".into());
    cfg.agent.variant = Variant::Vanilla;
    cfg.agent.actor_lr = 1e-3;
    cfg.agent.critic_lr = 1e-3;
    cfg.agent.tau = 0.01;
    cfg.agent.noise_scale = 0.4;

    println!("training vanilla DDPG on pendulum for {steps} steps (seed {seed})...");
    let summary = run_experiment(&cfg)?;
    println!("step, mean evaluation return:");
    for s in &summary.per_step {
        println!("  {:>6}  {:>8.1}", s.step, s.mean);
    }
    println!(
        "AUC = {:.0}; CSV written to results/ddpg_pendulum/seed_{seed}.csv",
        summary.auc_mean.unwrap_or(f64::NAN)
    );
    Ok(())
}
