use residual_rl::agent::*;
use residual_rl::env::{point_mass_env, ContinuousEnv};
use residual_rl::model::*;
use residual_rl::seeding::SeedStreams;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let seed: u64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(0);
    let env = point_mass_env();
    let mut cfg = AgentConfig::new(Variant::Vanilla);
    cfg.actor_lr = 1e-3;
    cfg.critic_lr = 1e-3;
    cfg.tau = 0.01;
    cfg.noise_scale = 0.4;
    cfg.warmup = 2000;
    let streams = SeedStreams::new(seed);
    let mut agent = DdpgAgent::new(&env, cfg, &streams).unwrap();
    let mut model = {
        let mut r = streams.rng("model-init");
        TransitionModel::learned_with_lr(4, 2, 3e-3, &mut r).unwrap()
    };
    let mut model_rng = streams.rng("model-fit");
    let mut plan_rng = streams.rng("plan-noise");
    let pcfg = PlanningConfig { eta: 0.2, model_grad_steps: 4, model_lr: 3e-3, ..Default::default() };
    let mut env_rng = streams.rng("env-train");
    let mut eval_rng = streams.rng("env-eval");
    let eval_inits: Vec<Vec<f64>> = (0..5).map(|_| env.initial_state(&mut eval_rng)).collect();
    let mut s = env.initial_state(&mut env_rng);
    let mut ep = 0;
    for t in 0..10_000usize {
        let a = agent.act(&s, true).unwrap();
        let sr = env.step(&s, &a);
        dyna_train_step(&mut agent, Transition { state: s.clone(), action: a, reward: sr.reward, next_state: sr.next_state.clone(), terminal: false }, &mut model, &pcfg, &mut model_rng, &mut plan_rng).unwrap();
        ep += 1;
        if ep >= env.horizon() { s = env.initial_state(&mut env_rng); ep = 0; } else { s = sr.next_state; }
        if (t + 1) % 1000 == 0 {
            let batch = agent.buffer.sample_batch(256);
            let rmse = one_step_state_rmse(&model, &batch).unwrap();
            let mut r_mae = 0.0;
            for tr in &batch {
                let (rhat, _) = model.imagine(&tr.state, &tr.action).unwrap();
                r_mae += (rhat - tr.reward).abs();
            }
            r_mae /= batch.len() as f64;
            let mut ret = 0.0;
            for init in &eval_inits {
                let mut es = init.clone();
                for _ in 0..env.horizon() {
                    let ea = agent.act_deterministic(&es).unwrap();
                    let er = env.step(&es, &ea);
                    ret += er.reward;
                    es = er.next_state;
                }
            }
            println!("t={:>6} state_rmse={:.5} reward_mae={:.5} fit_loss={:.5} eval={:>8.1}",
                t + 1, rmse, r_mae, model.last_fit_loss().unwrap_or(f64::NAN), ret / 5.0);
        }
    }
}
