use residual_rl::agent::Variant;
use residual_rl::harness::*;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let actor_lr: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(1e-3);
    let tau: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0.005);
    let variant = args.get(3).map(|s| Variant::parse(s).unwrap()).unwrap_or(Variant::Vanilla);
    let eta: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(0.05);
    let seed: u64 = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(0);

    let mut cfg = ExperimentConfig::new(ExperimentKind::ModelFree);
    cfg.env = "pendulum".into();
    cfg.seeds = vec![seed];
    cfg.steps = 30_000;
    cfg.eval_interval = 2000;
    cfg.eval_episodes = 10;
    cfg.agent.variant = variant;
    cfg.agent.eta = eta;
    cfg.agent.actor_lr = actor_lr;
    cfg.agent.critic_lr = 1e-3;
    cfg.agent.tau = tau;
    cfg.agent.noise_scale = 0.2;

    let t0 = Instant::now();
    let summary = run_experiment(&cfg).unwrap();
    let curve: Vec<String> = summary.per_step.iter().map(|s| format!("{}:{:.0}", s.step, s.mean)).collect();
    println!("variant={} eta={} actor_lr={} tau={} seed={} | {:?} | auc={:.0} best={:.0} | {}",
        variant.as_str(), eta, actor_lr, tau, seed, t0.elapsed(),
        summary.auc_mean.unwrap_or(f64::NAN),
        summary.per_seed[0].best_return.unwrap_or(f64::NAN),
        curve.join(" "));
}
