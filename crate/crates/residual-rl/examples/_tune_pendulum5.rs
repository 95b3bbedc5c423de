use residual_rl::agent::Variant;
use residual_rl::harness::*;
use std::time::Instant;

fn main() {
    let t_all = Instant::now();
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
        cfg.agent.tau = 0.005;
        cfg.agent.noise_scale = 0.2;
        let t0 = Instant::now();
        let summary = run_experiment(&cfg).unwrap();
        let aucs: Vec<String> = summary.per_seed.iter().map(|s| format!("{:.0}", s.auc.unwrap_or(f64::NAN))).collect();
        let bests: Vec<String> = summary.per_seed.iter().map(|s| format!("{:.0}", s.best_return.unwrap_or(f64::NAN))).collect();
        println!("variant={} eta={}: elapsed {:?} auc_mean={:.0} per-seed auc=[{}] best=[{}]",
            variant.as_str(), eta, t0.elapsed(), summary.auc_mean.unwrap(), aucs.join(","), bests.join(","));
    }
    println!("total {:?}", t_all.elapsed());
}
