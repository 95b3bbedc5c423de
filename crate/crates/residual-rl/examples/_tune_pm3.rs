use residual_rl::harness::*;
use residual_rl::model::PlanningUpdate;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which: String = args.get(1).cloned().unwrap_or_else(|| "mf".into());
    let steps: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(10_000);
    let mut cfg = ExperimentConfig::new(if which == "mf" { ExperimentKind::ModelFree } else { ExperimentKind::ModelBased });
    cfg.env = "point_mass".into();
    cfg.seeds = vec![0,1,2,3,4];
    cfg.steps = steps;
    cfg.eval_interval = 1000;
    cfg.eval_episodes = 10;
    cfg.agent.actor_lr = 1e-3;
    cfg.agent.critic_lr = 1e-3;
    cfg.agent.tau = 0.01;
    cfg.agent.noise_scale = 0.4;
    cfg.agent.warmup = 2000;
    cfg.model_kind = ModelKind::Learned;
    cfg.planning.eta = 0.2;
    cfg.planning.model_grad_steps = 4;
    cfg.planning.update_kind = match which.as_str() {
        "res" => PlanningUpdate::Residual,
        "semi" => PlanningUpdate::SemiGradient,
        "mve" => PlanningUpdate::Mve,
        _ => PlanningUpdate::Residual,
    };
    cfg.planning.unroll_k = 3;
    let t = Instant::now();
    let s = run_experiment(&cfg).unwrap();
    let aucs: Vec<String> = s.per_seed.iter().map(|p| format!("{:.3e}", p.auc.unwrap_or(f64::NAN))).collect();
    let curve: Vec<String> = s.per_step.iter().map(|p| format!("{}:{:.0}", p.step, p.mean)).collect();
    println!("{which}: {:?} auc_mean={:.4e} [{}]\n  {}", t.elapsed(), s.auc_mean.unwrap(), aucs.join(","), curve.join(" "));
}
