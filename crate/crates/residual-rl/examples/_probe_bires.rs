use residual_rl::agent::*;
use residual_rl::env::{pendulum_env, ContinuousEnv};
use residual_rl::nn::Activation;
use residual_rl::seeding::SeedStreams;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let variant = Variant::parse(args.get(1).map(|s| s.as_str()).unwrap_or("bi_res")).unwrap();
    let eta: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0.05);
    let seed: u64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(1);
    let tau: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(0.005);
    let act = args.get(5).map(|s| Activation::parse(s).unwrap()).unwrap_or(Activation::Relu);
    let noise: f64 = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(0.2);
    let steps: usize = args.get(7).map(|s| s.parse().unwrap()).unwrap_or(20_000);

    let env = pendulum_env();
    let mut cfg = AgentConfig::new(variant);
    cfg.eta = eta;
    cfg.actor_lr = 1e-3;
    cfg.critic_lr = 1e-3;
    cfg.tau = tau;
    cfg.noise_scale = noise;
    cfg.hidden_activation = act;
    cfg.record_diagnostics = true;
    let streams = SeedStreams::new(seed);
    let mut agent = DdpgAgent::new(&env, cfg, &streams).unwrap();
    let mut env_rng = streams.rng("env-train");
    let mut eval_rng = streams.rng("env-eval");
    let eval_inits: Vec<Vec<f64>> = (0..5).map(|_| env.initial_state(&mut eval_rng)).collect();
    let mut s = env.initial_state(&mut env_rng);
    let mut ep = 0;
    for t in 0..steps {
        let a = agent.act(&s, true).unwrap();
        let r = env.step(&s, &a);
        agent.train_step(Transition { state: s.clone(), action: a, reward: r.reward, next_state: r.next_state.clone(), terminal: r.terminal }).unwrap();
        ep += 1;
        if ep >= env.horizon() { s = env.initial_state(&mut env_rng); ep = 0; } else { s = r.next_state; }
        if (t + 1) % 4000 == 0 {
            let d = agent.last_diagnostics.unwrap();
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
            println!("t={:>6} |delta|={:>8.3} |gc|={:>9.3} |ga|={:>9.4} eval={:>8.1}",
                t + 1, d.mean_abs_delta, d.critic_grad_norm, d.actor_grad_norm, ret / 5.0);
        }
    }
}
