use residual_rl::harness::*;
use residual_rl::model::PlanningUpdate;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let steps: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(10_000);
    let which: String = args.get(2).cloned().unwrap_or_else(|| "all".into());

    let base = |kind: ExperimentKind| {
        let mut cfg = ExperimentConfig::new(kind);
        cfg.env = "point_mass".into();
        cfg.seeds = vec![0,1,2,3,4];
        cfg.steps = steps;
        cfg.eval_interval = 1000;
        cfg.eval_episodes = 10;
        cfg.agent.actor_lr = 1e-3;
        cfg.agent.critic_lr = 1e-3;
        cfg.agent.tau = 0.005;
        cfg.agent.warmup = 1000;
        cfg
    };
    let show = |name: &str, s: &ExperimentSummary, t: Instant| {
        let curve: Vec<String> = s.per_step.iter().step_by(2).map(|p| format!("{}:{:.1}", p.step, p.mean)).collect();
        let aucs: Vec<String> = s.per_seed.iter().map(|p| format!("{:.0}", p.auc.unwrap_or(f64::NAN))).collect();
        println!("{name}: {:?} auc_mean={:.0} per-seed=[{}]\n  curve: {}", t.elapsed(), s.auc_mean.unwrap(), aucs.join(","), curve.join(" "));
    };

    if which == "all" || which == "mf" {
        let t = Instant::now();
        let s = run_experiment(&base(ExperimentKind::ModelFree)).unwrap();
        show("model-free", &s, t);
    }
    if which == "all" || which == "res" {
        let t = Instant::now();
        let mut cfg = base(ExperimentKind::ModelBased);
        cfg.model_kind = ModelKind::Learned;
        cfg.planning.update_kind = PlanningUpdate::Residual;
        cfg.planning.eta = 0.2;
        let s = run_experiment(&cfg).unwrap();
        show("res-dyna(0.2)", &s, t);
    }
    if which == "all" || which == "mve" {
        let t = Instant::now();
        let mut cfg = base(ExperimentKind::ModelBased);
        cfg.model_kind = ModelKind::Learned;
        cfg.planning.update_kind = PlanningUpdate::Mve;
        cfg.planning.unroll_k = 3;
        let s = run_experiment(&cfg).unwrap();
        show("mve(k=3)", &s, t);
    }
}
