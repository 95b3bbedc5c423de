//! Dyna-style planning on the point-mass task with a learned model:
//! model-free DDPG vs. planning with the semi-gradient update vs. planning
//! with the residual update (which trains the critic on both ends of each
//! imaginary transition).
//!
//! ```text
//! cargo run --release -p residual-rl --example dyna_point_mass [steps] [seeds]
//! ```

use residual_rl::harness::{run_experiment, ExperimentConfig, ExperimentKind, ModelKind};
use residual_rl::model::PlanningUpdate;

fn main() -> residual_rl::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let steps: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(6000);
    let n_seeds: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(2);

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

    println!("Dyna with semi-gradient planning updates...");
    let mut cfg = base(ExperimentKind::ModelBased);
    cfg.model_kind = ModelKind::Learned;
    cfg.planning.update_kind = PlanningUpdate::SemiGradient;
    let dyna_semi = run_experiment(&cfg)?;

    println!("Dyna with residual planning updates (eta = 0.2)...");
    let mut cfg = base(ExperimentKind::ModelBased);
    cfg.model_kind = ModelKind::Learned;
    cfg.planning.update_kind = PlanningUpdate::Residual;
    cfg.planning.eta = 0.2;
    let dyna_res = run_experiment(&cfg)?;

    println!("\n              AUC        final return");
    for (name, s) in [
        ("model-free ", &model_free),
        ("dyna semi  ", &dyna_semi),
        ("dyna res   ", &dyna_res),
    ] {
        let final_mean = s.per_step.last().map(|p| p.mean).unwrap_or(f64::NAN);
        println!("{name}  {:>10.1}  {:>10.2}", s.auc_mean.unwrap_or(f64::NAN), final_mean);
    }
    println!("\nplanning defaults: 1 planning pass, action noise sigma 0.1, eta 0.2");
    Ok(())
}
