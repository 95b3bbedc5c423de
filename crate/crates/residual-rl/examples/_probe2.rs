use residual_rl::agent::*;
use residual_rl::env::{pendulum_env, ContinuousEnv};
use residual_rl::nn::Activation;
use residual_rl::seeding::SeedStreams;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let variant = Variant::parse(args.get(1).map(|s| s.as_str()).unwrap_or("bi_res")).unwrap();
    let eta: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0.05);
    let seed: u64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(1);

    let env = pendulum_env();
    let mut cfg = AgentConfig::new(variant);
    cfg.eta = eta;
    cfg.actor_lr = 1e-3;
    cfg.critic_lr = 1e-3;
    cfg.tau = 0.005;
    cfg.noise_scale = 0.2;
    cfg.hidden_activation = Activation::Relu;
    let streams = SeedStreams::new(seed);
    let mut agent = DdpgAgent::new(&env, cfg, &streams).unwrap();
    let mut env_rng = streams.rng("env-train");
    let mut s = env.initial_state(&mut env_rng);
    let mut ep = 0;
    for t in 0..6000usize {
        let a = agent.act(&s, true).unwrap();
        let r = env.step(&s, &a);
        agent.train_step(Transition { state: s.clone(), action: a, reward: r.reward, next_state: r.next_state.clone(), terminal: r.terminal }).unwrap();
        ep += 1;
        if ep >= env.horizon() { s = env.initial_state(&mut env_rng); ep = 0; } else { s = r.next_state; }
        if (t + 1) % 500 == 0 {
            // Measure dQ/da and actor saturation over a probe batch.
            let batch = agent.buffer.sample_batch(64);
            let mut mean_dqda = 0.0;
            let mut mean_u = 0.0;
            let mut sat = 0;
            for tr in &batch {
                let u = agent.actor.online.forward(&tr.state).unwrap()[0];
                mean_u += u.abs();
                if u.abs() > 0.999 { sat += 1; }
                let act = 2.0 * u;
                let inp: Vec<f64> = tr.state.iter().chain([act].iter()).copied().collect();
                let cache = agent.critic.online.forward_cached(&inp).unwrap();
                let (_, ig) = agent.critic.online.backward(&cache, &[1.0]).unwrap();
                mean_dqda += ig[3].abs();
            }
            println!("t={:>5} mean|dQ/da|={:.6} mean|u|={:.4} saturated={}/64", t + 1, mean_dqda / 64.0, mean_u / 64.0, sat);
        }
    }
}
