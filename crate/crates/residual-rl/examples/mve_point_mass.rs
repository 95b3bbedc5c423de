//! k-step model-value expansion: unrolls a learned model under the target
//! actor, shows the rollout losses (the plain k-step form and the
//! rebalanced one that anchors on the real transition), then trains with
//! the rebalanced Huber loss and compares against model-free DDPG.
//!
//! ```text
//! cargo run --release -p residual-rl --example mve_point_mass [steps] [seeds]
//! ```

use residual_rl::agent::{AgentConfig, DdpgAgent, Transition, Variant};
use residual_rl::env::{point_mass_env, ContinuousEnv};
use residual_rl::harness::{run_experiment, ExperimentConfig, ExperimentKind, ModelKind};
use residual_rl::model::{mve_loss, mve_loss_stabilized, unroll, PlanningUpdate, TransitionModel};
use residual_rl::seeding::SeedStreams;

fn main() -> residual_rl::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let steps: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(6000);
    let n_seeds: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(2);

    // Anatomy of one rollout against the oracle model.
    let env = point_mass_env();
    let streams = SeedStreams::new(1);
    let mut cfg = AgentConfig::new(Variant::Vanilla);
    cfg.hidden = vec![16, 16];
    let agent = DdpgAgent::new(&env, cfg, &streams)?;
    let model = TransitionModel::oracle(Box::new(env.clone()));
    let mut rng = streams.rng("env-train");
    let s = env.initial_state(&mut rng);
    let a = agent.act_deterministic(&s)?;
    let r = env.step(&s, &a);
    let t = Transition {
        state: s,
        action: a,
        reward: r.reward,
        next_state: r.next_state,
        terminal: false,
    };
    let k = 3;
    let traj = unroll(&agent, &model, &t, k)?;
    println!("k = {k} rollout: {} states, {} actions, {} rewards", traj.states.len(), traj.actions.len(), traj.rewards.len());
    let (plain, _) = mve_loss(&agent.critic.online, &agent.critic.target, &traj, k, 0.99)?;
    let (stab, _) = mve_loss_stabilized(&agent.critic.online, &agent.critic.target, &traj, k, 0.99, false, 1.0)?;
    let (hub, _) = mve_loss_stabilized(&agent.critic.online, &agent.critic.target, &traj, k, 0.99, true, 1.0)?;
    println!("k-step loss = {plain:.5}, rebalanced = {stab:.5}, rebalanced+Huber = {hub:.5}\n");

    // Training comparison with a learned model.
    let base = |kind: ExperimentKind| {
        let mut cfg = ExperimentConfig::new(kind);
        cfg.env = "point_mass".into();
        cfg.seeds = (0..n_seeds).collect();
        cfg.steps = steps;
        cfg.eval_interval = 500;
        cfg.eval_episodes = 5;
        cfg.agent.actor_lr = 1e-3;
        cfg.agent.critic_lr = 1e-3;
        cfg.agent.tau = 0.01;
        cfg.agent.warmup = 500;
        cfg
    };
    println!("model-free DDPG baseline ({steps} steps x {n_seeds} seeds)...");
    let model_free = run_experiment(&base(ExperimentKind::ModelFree))?;

    println!("MVE (k = 3, rebalanced Huber loss, learned model)...");
    let mut cfg = base(ExperimentKind::ModelBased);
    cfg.model_kind = ModelKind::Learned;
    cfg.planning.update_kind = PlanningUpdate::Mve;
    cfg.planning.unroll_k = 3;
    let mve = run_experiment(&cfg)?;

    println!("\nAUC model-free = {:.1}", model_free.auc_mean.unwrap_or(f64::NAN));
    println!("AUC MVE(k=3)   = {:.1}", mve.auc_mean.unwrap_or(f64::NAN));
    Ok(())
}
