use residual_rl::agent::Variant;
use residual_rl::harness::*;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let variant = Variant::parse(&args[1]).unwrap();
    let eta: f64 = args[2].parse().unwrap();
    let actor_lr: f64 = args[3].parse().unwrap();
    let seeds: Vec<u64> = args[4].split(',').map(|s| s.parse().unwrap()).collect();
    let steps: usize = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(30_000);

    let mut cfg = ExperimentConfig::new(ExperimentKind::ModelFree);
    cfg.env = "pendulum".into();
    cfg.seeds = seeds;
    cfg.steps = steps;
    cfg.eval_interval = 2000;
    cfg.eval_episodes = 10;
    cfg.agent.variant = variant;
    cfg.agent.eta = eta;
    cfg.agent.actor_lr = actor_lr;
    cfg.agent.critic_lr = 1e-3;
    cfg.agent.tau = 0.005;
    cfg.agent.noise_scale = 0.2;
    let summary = run_experiment(&cfg).unwrap();
    let aucs: Vec<String> = summary.per_seed.iter().map(|s| format!("{:.2e}", s.auc.unwrap_or(f64::NAN))).collect();
    let bests: Vec<String> = summary.per_seed.iter().map(|s| format!("{:.0}", s.best_return.unwrap_or(f64::NAN))).collect();
    let finals: Vec<String> = summary.per_seed.iter().map(|s| format!("{:.0}", s.final_return.unwrap_or(f64::NAN))).collect();
    println!("{} eta={} alr={}: auc=[{}] best=[{}] final=[{}]", variant.as_str(), eta, actor_lr, aucs.join(","), bests.join(","), finals.join(","));
}
