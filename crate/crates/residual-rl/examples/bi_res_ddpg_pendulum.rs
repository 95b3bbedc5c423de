//! Bi-Res-DDPG against vanilla DDPG on the pendulum, under shared seed
//! streams so the comparison is paired, reporting the relative AUC
//! improvement. Also demonstrates the degenerate equalities: bi_res and
//! to_res at eta = 0 produce bitwise the same critic gradients as vanilla.
//!
//! ```text
//! cargo run --release -p residual-rl --example bi_res_ddpg_pendulum [steps] [seeds]
//! ```

use residual_rl::agent::{AgentConfig, DdpgAgent, Transition, Variant};
use residual_rl::env::{pendulum_env, ContinuousEnv};
use residual_rl::harness::{auc_improvement, run_experiment, ExperimentConfig, ExperimentKind};
use residual_rl::seeding::SeedStreams;

fn main() -> residual_rl::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let steps: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(8000);
    let n_seeds: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(2);

    // The eta = 0 boundary first: one critic update, three variants,
    // identical bits.
    let env = pendulum_env();
    let streams = SeedStreams::new(0);
    let mut cfg = AgentConfig::new(Variant::Vanilla);
    cfg.hidden = vec![16, 16];
    cfg.eta = 0.0;
    let mut agent = DdpgAgent::new(&env, cfg, &streams)?;
    let mut rng = streams.rng("env-train");
    let mut s = env.initial_state(&mut rng);
    for _ in 0..64 {
        let a = agent.act(&s, true)?;
        let r = env.step(&s, &a);
        agent.buffer.push(Transition {
            state: s.clone(),
            action: a,
            reward: r.reward,
            next_state: r.next_state.clone(),
            terminal: r.terminal,
        });
        s = r.next_state;
    }
    let batch = agent.buffer.sample_batch(32);
    let g_vanilla = agent.critic_update_vanilla(&batch)?;
    let g_bi = agent.critic_update_bi_res(&batch)?;
    let g_to = agent.critic_update_variant(&batch, Variant::ToRes)?;
    assert!(g_vanilla.iter().zip(&g_bi).all(|(a, b)| a.to_bits() == b.to_bits()));
    assert!(g_vanilla.iter().zip(&g_to).all(|(a, b)| a.to_bits() == b.to_bits()));
    println!("eta = 0: bi_res and to_res critic gradients are bitwise vanilla\n");

    // Paired training comparison.
    let run = |variant: Variant, eta: f64| -> residual_rl::Result<f64> {
        let mut cfg = ExperimentConfig::new(ExperimentKind::ModelFree);
        cfg.env = "pendulum".into();
        cfg.seeds = (0..n_seeds).collect();
        cfg.steps = steps;
        cfg.eval_interval = 1000;
        cfg.eval_episodes = 5;
        cfg.agent.variant = variant;
        cfg.agent.eta = eta;
        cfg.agent.actor_lr = 1e-3;
        cfg.agent.critic_lr = 1e-3;
        cfg.agent.tau = 0.01;
        cfg.agent.noise_scale = 0.4;
        println!("training {} (eta = {eta}) for {steps} steps x {n_seeds} seeds...", variant.as_str());
        let summary = run_experiment(&cfg)?;
        Ok(summary.auc_mean.unwrap())
    };
    let auc_vanilla = run(Variant::Vanilla, 0.0)?;
    let auc_bi_res = run(Variant::BiRes, 0.05)?;
    println!("\nAUC vanilla  = {auc_vanilla:.0}");
    println!("AUC bi_res   = {auc_bi_res:.0}");
    println!(
        "relative AUC improvement = {:+.1}%",
        100.0 * auc_improvement(auc_bi_res, auc_vanilla)?
    );
    Ok(())
}
