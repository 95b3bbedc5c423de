use residual_rl::agent::Variant;
use residual_rl::harness::*;

fn main() {
    for (variant, eta) in [(Variant::Vanilla, 0.0), (Variant::BiRes, 0.05), (Variant::Res, 0.0)] {
        let mut cfg = ExperimentConfig::new(ExperimentKind::ModelFree);
        cfg.env = "pendulum".into();
        cfg.seeds = vec![0, 1, 2, 3, 4];
        cfg.steps = 30_000;
        cfg.eval_interval = 2000;
        cfg.eval_episodes = 10;
        cfg.agent.variant = variant;
        cfg.agent.eta = eta;
        cfg.agent.actor_lr = 1e-3;
        cfg.agent.critic_lr = 1e-3;
        cfg.agent.tau = 0.01;
        cfg.agent.noise_scale = 0.4;
        let summary = run_experiment(&cfg).unwrap();
        let aucs: Vec<String> = summary.per_seed.iter().map(|s| format!("{:.3e}", s.auc.unwrap_or(f64::NAN))).collect();
        let bests: Vec<String> = summary.per_seed.iter().map(|s| format!("{:.0}", s.best_return.unwrap_or(f64::NAN))).collect();
        println!("{} eta={}: auc_mean={:.3e} auc=[{}] best=[{}]", variant.as_str(), eta, summary.auc_mean.unwrap(), aucs.join(","), bests.join(","));
    }
}
