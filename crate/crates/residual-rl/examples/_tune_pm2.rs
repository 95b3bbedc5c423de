use residual_rl::harness::*;
use residual_rl::model::PlanningUpdate;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which: String = args.get(1).cloned().unwrap_or_else(|| "res-oracle".into());
    let steps: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(10_000);
    let eta: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(0.2);
    let sigma: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(0.1);

    let mut cfg = ExperimentConfig::new(ExperimentKind::ModelBased);
    cfg.env = "point_mass".into();
    cfg.seeds = vec![0,1,2,3,4];
    cfg.steps = steps;
    cfg.eval_interval = 1000;
    cfg.eval_episodes = 10;
    cfg.agent.actor_lr = 1e-3;
    cfg.agent.critic_lr = 1e-3;
    cfg.agent.tau = 0.01;
    cfg.agent.noise_scale = 0.4;
    cfg.agent.warmup = 1000;
    cfg.planning.eta = eta;
    cfg.planning.noise_sigma = sigma;
    cfg.model_kind = if which.contains("oracle") { ModelKind::Oracle } else { ModelKind::Learned };
    cfg.planning.update_kind = if which.contains("semi") { PlanningUpdate::SemiGradient }
        else if which.contains("mve") { PlanningUpdate::Mve } else { PlanningUpdate::Residual };
    let t = Instant::now();
    let s = run_experiment(&cfg).unwrap();
    let aucs: Vec<String> = s.per_seed.iter().map(|p| format!("{:.2e}", p.auc.unwrap_or(f64::NAN))).collect();
    let curve: Vec<String> = s.per_step.iter().step_by(2).map(|p| format!("{}:{:.0}", p.step, p.mean)).collect();
    println!("{which} eta={eta} sigma={sigma}: {:?} auc_mean={:.3e} [{}]\n  {}", t.elapsed(), s.auc_mean.unwrap(), aucs.join(","), curve.join(" "));
}
