use residual_rl::env;
use residual_rl::linear::*;
use std::time::Instant;

fn main() {
    let star = env::star_counterexample();
    let t0 = Instant::now();
    let mut diverged = 0;
    let mut max_step = 0;
    for seed in 0..20u64 {
        let mut cfg = EvalRunConfig::new(LearnerConfig::semi_gradient(0.01).unwrap());
        cfg.initial_weights = star.initial_weights.clone();
        cfg.log_interval = 10_000;
        let run = run_policy_evaluation(&star.mdp, &star.target, &star.behavior, &star.features, &cfg, 100_000, seed).unwrap();
        if let RunStatus::Diverged { step } = run.status { diverged += 1; max_step = max_step.max(step); }
    }
    println!("TD diverged {diverged}/20, latest step {max_step}, elapsed {:?}", t0.elapsed());

    let t0 = Instant::now();
    let mut ok = 0;
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let mut cfg = EvalRunConfig::new(LearnerConfig::residual_gradient(0.05).unwrap());
        cfg.initial_weights = star.initial_weights.clone();
        cfg.log_interval = 10_000;
        let run = run_policy_evaluation(&star.mdp, &star.target, &star.behavior, &star.features, &cfg, 100_000, seed).unwrap();
        let last = run.samples.last().unwrap();
        if last.msbe < 1e-3 && run.status == RunStatus::Completed { ok += 1; }
        worst = worst.max(last.msbe);
    }
    println!("RG ok {ok}/20, worst final msbe {worst:.3e}, elapsed {:?}", t0.elapsed());
}
