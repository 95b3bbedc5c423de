//! Model-free deep agents: DDPG and its residual variants.
//!
//! The critic update is where the variants differ. With online networks
//! `Q, mu`, target networks `Qb, mub`, and shorthand
//! `g = eta * gamma * grad Q(s', mu(s')) - grad Q(s, a)`, the update applied
//! to the critic parameters is `theta <- theta - alpha * coeff * g` where:
//!
//! - `vanilla`: the usual semi-gradient step with target-network bootstrap
//!   (no successor-gradient term at all);
//! - `res`:    coeff bootstraps and bases on the online network;
//! - `to_res`: coeff = r + gamma Qb(s', mub(s')) - Q(s, a);
//! - `ot_res`: coeff = r + gamma Q(s', mu(s')) - Qb(s, a);
//! - `tt_res`: coeff = r + gamma Qb(s', mub(s')) - Qb(s, a);
//! - `bi_res`: two separate error terms, stabilizing bootstrapping in both
//!   value-propagation directions with one shared target pair:
//!   backward `r + gamma Qb(s', mub(s')) - Q(s, a)` weighting
//!   `grad Q(s, a)`, and forward `r + gamma Q(s', mu(s')) - Qb(s, a)`
//!   weighting `eta * gamma * grad Q(s', mu(s'))`.
//!
//! At `eta = 0`, `bi_res` and `to_res` coincide with `vanilla` bit for bit,
//! and `res` is DDPG without a target network. The actor update is the
//! deterministic policy gradient through the online critic's action-input
//! gradient and is identical for every variant.

use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::env::ContinuousEnv;
use crate::error::{Error, Result};
use crate::linalg;
use crate::nn::{Activation, Mlp, Optimizer, TargetPair};
use crate::seeding::{standard_normal, SeedStreams};

/// One environment transition.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: Vec<f64>,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub terminal: bool,
}

/// Uniform-sampling ring buffer.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    items: Vec<Transition>,
    next_slot: usize,
    rng: ChaCha8Rng,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, rng: ChaCha8Rng) -> Self {
        ReplayBuffer {
            capacity,
            items: Vec::with_capacity(capacity.min(4096)),
            next_slot: 0,
            rng,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn get(&self, i: usize) -> &Transition {
        &self.items[i]
    }

    /// Inserts, evicting the oldest entry once full.
    pub fn push(&mut self, t: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.next_slot] = t;
            self.next_slot = (self.next_slot + 1) % self.capacity;
        }
    }

    /// Uniform indices with replacement.
    pub fn sample_indices(&mut self, batch: usize) -> Vec<usize> {
        (0..batch)
            .map(|_| self.rng.gen_range(0..self.items.len()))
            .collect()
    }

    pub fn sample_batch(&mut self, batch: usize) -> Vec<Transition> {
        self.sample_indices(batch)
            .into_iter()
            .map(|i| self.items[i].clone())
            .collect()
    }
}

/// Critic-update rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Vanilla,
    BiRes,
    Res,
    ToRes,
    OtRes,
    TtRes,
}

impl Variant {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "vanilla" => Ok(Variant::Vanilla),
            "bi_res" => Ok(Variant::BiRes),
            "res" => Ok(Variant::Res),
            "to_res" => Ok(Variant::ToRes),
            "ot_res" => Ok(Variant::OtRes),
            "tt_res" => Ok(Variant::TtRes),
            other => Err(Error::Config(format!("unknown agent variant '{other}'"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Vanilla => "vanilla",
            Variant::BiRes => "bi_res",
            Variant::Res => "res",
            Variant::ToRes => "to_res",
            Variant::OtRes => "ot_res",
            Variant::TtRes => "tt_res",
        }
    }
}

/// Exploration-noise process on actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    /// Uncorrelated Gaussian per step.
    Gaussian,
    /// Ornstein-Uhlenbeck, the correlated process of the classic DDPG setup.
    OrnsteinUhlenbeck,
}

#[derive(Debug, Clone)]
pub struct AgentConfig {
    pub variant: Variant,
    /// Mix coefficient for the residual term; unused by `vanilla`.
    pub eta: f64,
    pub gamma: f64,
    pub batch_size: usize,
    /// Learning starts once the buffer holds this many transitions.
    pub warmup: usize,
    pub buffer_capacity: usize,
    pub tau: f64,
    pub critic_lr: f64,
    pub actor_lr: f64,
    pub hidden: Vec<usize>,
    pub hidden_activation: Activation,
    pub noise: NoiseKind,
    /// Noise stddev as a fraction of the per-dimension action half-range.
    pub noise_scale: f64,
    /// Adam when true, plain SGD otherwise.
    pub adam: bool,
    /// Record per-step TD-error/gradient-norm diagnostics.
    pub record_diagnostics: bool,
}

impl AgentConfig {
    pub fn new(variant: Variant) -> Self {
        AgentConfig {
            variant,
            eta: 0.05,
            gamma: 0.99,
            batch_size: 64,
            warmup: 1000,
            buffer_capacity: 100_000,
            tau: 0.001,
            critic_lr: 1e-3,
            actor_lr: 1e-4,
            hidden: vec![64, 64],
            hidden_activation: Activation::Relu,
            noise: NoiseKind::Gaussian,
            noise_scale: 0.2,
            adam: true,
            record_diagnostics: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::InvalidArgument(format!("eta {} not in [0,1]", self.eta)));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::InvalidArgument(format!("gamma {} not in [0,1)", self.gamma)));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::InvalidArgument(format!("tau {} not in (0,1]", self.tau)));
        }
        if self.batch_size == 0 || self.buffer_capacity == 0 {
            return Err(Error::InvalidArgument("batch and capacity must be positive".into()));
        }
        Ok(())
    }
}

/// Per-learn-step diagnostics (populated when enabled in the config).
#[derive(Debug, Clone, Copy)]
pub struct StepDiagnostics {
    pub mean_abs_delta: f64,
    pub critic_grad_norm: f64,
    pub actor_grad_norm: f64,
}

/// DDPG agent: critic and actor target pairs, replay buffer, noise process.
#[derive(Debug, Clone)]
pub struct DdpgAgent {
    pub critic: TargetPair,
    pub actor: TargetPair,
    pub buffer: ReplayBuffer,
    cfg: AgentConfig,
    state_dim: usize,
    action_dim: usize,
    action_low: Vec<f64>,
    action_high: Vec<f64>,
    critic_opt: Optimizer,
    actor_opt: Optimizer,
    noise_rng: ChaCha8Rng,
    ou_state: Vec<f64>,
    learn_steps: u64,
    pub last_diagnostics: Option<StepDiagnostics>,
}

impl DdpgAgent {
    pub fn new(env: &dyn ContinuousEnv, cfg: AgentConfig, streams: &SeedStreams) -> Result<Self> {
        Self::with_dims(
            env.state_dim(),
            env.action_dim(),
            env.action_low().to_vec(),
            env.action_high().to_vec(),
            cfg,
            streams,
        )
    }

    pub fn with_dims(
        state_dim: usize,
        action_dim: usize,
        action_low: Vec<f64>,
        action_high: Vec<f64>,
        cfg: AgentConfig,
        streams: &SeedStreams,
    ) -> Result<Self> {
        cfg.validate()?;
        if action_low.len() != action_dim || action_high.len() != action_dim {
            return Err(Error::DimensionMismatch("action bounds".into()));
        }
        let mut init_rng = streams.rng("agent-init");
        let mut critic_sizes = vec![state_dim + action_dim];
        critic_sizes.extend_from_slice(&cfg.hidden);
        critic_sizes.push(1);
        let mut actor_sizes = vec![state_dim];
        actor_sizes.extend_from_slice(&cfg.hidden);
        actor_sizes.push(action_dim);

        let critic_net = Mlp::new(
            &critic_sizes,
            cfg.hidden_activation,
            Activation::Linear,
            &mut init_rng,
        )?;
        let actor_net = Mlp::new(
            &actor_sizes,
            cfg.hidden_activation,
            Activation::Tanh,
            &mut init_rng,
        )?;
        let critic_params = critic_net.params().len();
        let actor_params = actor_net.params().len();

        let critic_opt = if cfg.adam {
            Optimizer::adam(cfg.critic_lr, critic_params)
        } else {
            Optimizer::sgd(cfg.critic_lr)
        };
        let actor_opt = if cfg.adam {
            Optimizer::adam(cfg.actor_lr, actor_params)
        } else {
            Optimizer::sgd(cfg.actor_lr)
        };

        Ok(DdpgAgent {
            critic: TargetPair::new(critic_net, cfg.tau)?,
            actor: TargetPair::new(actor_net, cfg.tau)?,
            buffer: ReplayBuffer::new(cfg.buffer_capacity, streams.rng("replay")),
            state_dim,
            action_dim,
            action_low,
            action_high,
            critic_opt,
            actor_opt,
            noise_rng: streams.rng("noise"),
            ou_state: vec![0.0; action_dim],
            learn_steps: 0,
            last_diagnostics: None,
            cfg,
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.cfg
    }

    pub fn learn_steps(&self) -> u64 {
        self.learn_steps
    }

    pub(crate) fn increment_learn_steps(&mut self) {
        self.learn_steps += 1;
    }

    pub fn action_low(&self) -> &[f64] {
        &self.action_low
    }

    pub fn action_high(&self) -> &[f64] {
        &self.action_high
    }

    /// Greedy action of the *target* actor, scaled to the bounds.
    pub fn act_target(&self, s: &[f64]) -> Result<Vec<f64>> {
        self.policy_action(&self.actor.target, s)
    }

    fn half_range(&self, i: usize) -> f64 {
        0.5 * (self.action_high[i] - self.action_low[i])
    }

    fn center(&self, i: usize) -> f64 {
        0.5 * (self.action_high[i] + self.action_low[i])
    }

    fn scale_action(&self, u: &[f64]) -> Vec<f64> {
        (0..self.action_dim)
            .map(|i| self.center(i) + self.half_range(i) * u[i])
            .collect()
    }

    fn critic_input(&self, s: &[f64], a: &[f64]) -> Vec<f64> {
        let mut input = Vec::with_capacity(self.state_dim + self.action_dim);
        input.extend_from_slice(s);
        input.extend_from_slice(a);
        input
    }

    /// Greedy action of a given actor network, scaled to the bounds.
    fn policy_action(&self, actor: &Mlp, s: &[f64]) -> Result<Vec<f64>> {
        Ok(self.scale_action(&actor.forward(s)?))
    }

    fn q_value(&self, critic: &Mlp, s: &[f64], a: &[f64]) -> Result<f64> {
        Ok(critic.forward(&self.critic_input(s, a))?[0])
    }

    /// Deterministic greedy action; touches no mutable state.
    pub fn act_deterministic(&self, s: &[f64]) -> Result<Vec<f64>> {
        self.policy_action(&self.actor.online, s)
    }

    /// Greedy action plus exploration noise when `explore` is set, clipped
    /// to the action bounds.
    pub fn act(&mut self, s: &[f64], explore: bool) -> Result<Vec<f64>> {
        let mut a = self.act_deterministic(s)?;
        if explore {
            match self.cfg.noise {
                NoiseKind::Gaussian => {
                    for i in 0..self.action_dim {
                        let sigma = self.cfg.noise_scale * self.half_range(i);
                        a[i] += sigma * standard_normal(&mut self.noise_rng);
                    }
                }
                NoiseKind::OrnsteinUhlenbeck => {
                    // theta = 0.15 mean reversion toward zero, per-step.
                    for i in 0..self.action_dim {
                        let sigma = self.cfg.noise_scale * self.half_range(i);
                        self.ou_state[i] += 0.15 * (0.0 - self.ou_state[i])
                            + sigma * standard_normal(&mut self.noise_rng);
                        a[i] += self.ou_state[i];
                    }
                }
            }
            for i in 0..self.action_dim {
                a[i] = a[i].max(self.action_low[i]).min(self.action_high[i]);
            }
        }
        Ok(a)
    }

    /// Semi-gradient critic update with target-network bootstrap.
    ///
    /// Returns the batch-mean descent gradient for the online critic:
    /// per sample `-(r + gamma Qb(s', mub(s')) - Q(s, a)) grad Q(s, a)`,
    /// with the bootstrap zeroed at terminals.
    pub fn critic_update_vanilla(&self, batch: &[Transition]) -> Result<Vec<f64>> {
        if batch.is_empty() {
            return Err(Error::InvalidArgument("empty batch".into()));
        }
        let mut grad = vec![0.0; self.critic.online.params().len()];
        for t in batch {
            let cache = self.critic.online.forward_cached(&self.critic_input(&t.state, &t.action))?;
            let q_sa = cache.output()[0];
            let bootstrap = if t.terminal {
                0.0
            } else {
                let a_next = self.policy_action(&self.actor.target, &t.next_state)?;
                self.q_value(&self.critic.target, &t.next_state, &a_next)?
            };
            let delta = t.reward + self.cfg.gamma * bootstrap - q_sa;
            if !delta.is_finite() {
                return Err(Error::NonFinite("critic TD error".into()));
            }
            let (pg, _) = self.critic.online.backward(&cache, &[1.0])?;
            for (g, p) in grad.iter_mut().zip(&pg) {
                *g -= delta * p;
            }
        }
        let inv = 1.0 / batch.len() as f64;
        for g in &mut grad {
            *g *= inv;
        }
        Ok(grad)
    }

    /// Bidirectional-target-network critic update.
    pub fn critic_update_bi_res(&self, batch: &[Transition]) -> Result<Vec<f64>> {
        self.bi_res_gradient(batch, self.cfg.eta)
    }

    pub(crate) fn bi_res_gradient(&self, batch: &[Transition], eta: f64) -> Result<Vec<f64>> {
        if batch.is_empty() {
            return Err(Error::InvalidArgument("empty batch".into()));
        }
        let mut grad = vec![0.0; self.critic.online.params().len()];
        for t in batch {
            let cache = self.critic.online.forward_cached(&self.critic_input(&t.state, &t.action))?;
            let q_sa = cache.output()[0];
            let bootstrap = if t.terminal {
                0.0
            } else {
                let a_next = self.policy_action(&self.actor.target, &t.next_state)?;
                self.q_value(&self.critic.target, &t.next_state, &a_next)?
            };
            let delta_b = t.reward + self.cfg.gamma * bootstrap - q_sa;
            if !delta_b.is_finite() {
                return Err(Error::NonFinite("critic TD error".into()));
            }
            let (pg, _) = self.critic.online.backward(&cache, &[1.0])?;
            for (g, p) in grad.iter_mut().zip(&pg) {
                *g -= delta_b * p;
            }
            // Forward term: the prediction moves the successor's value; both
            // gradient and bootstrap stay on the online networks while the
            // anchored side comes from the target pair. Terminals drop it.
            if eta != 0.0 && !t.terminal {
                let a_next = self.policy_action(&self.actor.online, &t.next_state)?;
                let cache_next = self
                    .critic
                    .online
                    .forward_cached(&self.critic_input(&t.next_state, &a_next))?;
                let q_next = cache_next.output()[0];
                let q_bar_sa = self.q_value(&self.critic.target, &t.state, &t.action)?;
                let delta_f = t.reward + self.cfg.gamma * q_next - q_bar_sa;
                if !delta_f.is_finite() {
                    return Err(Error::NonFinite("critic forward error".into()));
                }
                let (pg_next, _) = self.critic.online.backward(&cache_next, &[1.0])?;
                let c = eta * self.cfg.gamma * delta_f;
                for (g, p) in grad.iter_mut().zip(&pg_next) {
                    *g += c * p;
                }
            }
        }
        let inv = 1.0 / batch.len() as f64;
        for g in &mut grad {
            *g *= inv;
        }
        Ok(grad)
    }

    /// Single-coefficient residual variants (`res`, `to_res`, `ot_res`,
    /// `tt_res`): descent gradient `coeff * (eta gamma grad Q(s', mu(s')) -
    /// grad Q(s, a))` with the variant choosing which networks feed `coeff`.
    pub fn critic_update_variant(&self, batch: &[Transition], variant: Variant) -> Result<Vec<f64>> {
        self.variant_gradient(batch, variant, self.cfg.eta)
    }

    pub(crate) fn variant_gradient(
        &self,
        batch: &[Transition],
        variant: Variant,
        eta: f64,
    ) -> Result<Vec<f64>> {
        if batch.is_empty() {
            return Err(Error::InvalidArgument("empty batch".into()));
        }
        let (online_boot, online_base) = match variant {
            Variant::Res => (true, true),
            Variant::ToRes => (false, true),
            Variant::OtRes => (true, false),
            Variant::TtRes => (false, false),
            Variant::Vanilla | Variant::BiRes => {
                return Err(Error::InvalidArgument(format!(
                    "variant '{}' has a dedicated update",
                    variant.as_str()
                )))
            }
        };
        let mut grad = vec![0.0; self.critic.online.params().len()];
        for t in batch {
            let cache = self.critic.online.forward_cached(&self.critic_input(&t.state, &t.action))?;
            let base = if online_base {
                cache.output()[0]
            } else {
                self.q_value(&self.critic.target, &t.state, &t.action)?
            };
            // Successor evaluation, shared by the bootstrap and (when the
            // bootstrap is online) the gradient term. Skipped at terminals.
            let mut next_cache = None;
            let bootstrap = if t.terminal {
                0.0
            } else if online_boot {
                let a_next = self.policy_action(&self.actor.online, &t.next_state)?;
                let c = self
                    .critic
                    .online
                    .forward_cached(&self.critic_input(&t.next_state, &a_next))?;
                let q = c.output()[0];
                next_cache = Some(c);
                q
            } else {
                let a_next = self.policy_action(&self.actor.target, &t.next_state)?;
                self.q_value(&self.critic.target, &t.next_state, &a_next)?
            };
            let coeff = t.reward + self.cfg.gamma * bootstrap - base;
            if !coeff.is_finite() {
                return Err(Error::NonFinite("critic TD error".into()));
            }
            let (pg, _) = self.critic.online.backward(&cache, &[1.0])?;
            for (g, p) in grad.iter_mut().zip(&pg) {
                *g -= coeff * p;
            }
            // The shorthand's successor gradient always uses the online
            // networks, whatever fed the coefficient.
            if eta != 0.0 && !t.terminal {
                let cache_next = match next_cache {
                    Some(c) => c,
                    None => {
                        let a_next = self.policy_action(&self.actor.online, &t.next_state)?;
                        self.critic
                            .online
                            .forward_cached(&self.critic_input(&t.next_state, &a_next))?
                    }
                };
                let (pg_next, _) = self.critic.online.backward(&cache_next, &[1.0])?;
                let c = coeff * (eta * self.cfg.gamma);
                for (g, p) in grad.iter_mut().zip(&pg_next) {
                    *g += c * p;
                }
            }
        }
        let inv = 1.0 / batch.len() as f64;
        for g in &mut grad {
            *g *= inv;
        }
        Ok(grad)
    }

    /// Dispatches on the configured variant.
    pub fn critic_update(&self, batch: &[Transition]) -> Result<Vec<f64>> {
        match self.cfg.variant {
            Variant::Vanilla => self.critic_update_vanilla(batch),
            Variant::BiRes => self.critic_update_bi_res(batch),
            v => self.critic_update_variant(batch, v),
        }
    }

    /// Deterministic policy gradient through the online critic.
    ///
    /// Returns the batch-mean descent gradient for the actor (descending
    /// `-Q(s, mu(s))`); identical for every variant.
    pub fn actor_update(&self, batch: &[Transition]) -> Result<Vec<f64>> {
        if batch.is_empty() {
            return Err(Error::InvalidArgument("empty batch".into()));
        }
        let mut grad = vec![0.0; self.actor.online.params().len()];
        for t in batch {
            let actor_cache = self.actor.online.forward_cached(&t.state)?;
            let action = self.scale_action(actor_cache.output());
            let critic_cache = self
                .critic
                .online
                .forward_cached(&self.critic_input(&t.state, &action))?;
            let (_, input_grad) = self.critic.online.backward(&critic_cache, &[1.0])?;
            // dQ/da chained through the action scaling.
            let cot: Vec<f64> = (0..self.action_dim)
                .map(|i| input_grad[self.state_dim + i] * self.half_range(i))
                .collect();
            let (pg, _) = self.actor.online.backward(&actor_cache, &cot)?;
            for (g, p) in grad.iter_mut().zip(&pg) {
                *g -= p;
            }
        }
        let inv = 1.0 / batch.len() as f64;
        for g in &mut grad {
            *g *= inv;
            if !g.is_finite() {
                return Err(Error::NonFinite("actor gradient".into()));
            }
        }
        Ok(grad)
    }

    pub fn apply_critic_gradient(&mut self, grad: &[f64]) {
        self.critic_opt.step(self.critic.online.params_mut(), grad);
    }

    pub fn apply_actor_gradient(&mut self, grad: &[f64]) {
        self.actor_opt.step(self.actor.online.params_mut(), grad);
    }

    pub fn soft_sync_targets(&mut self) {
        self.critic.soft_sync();
        self.actor.soft_sync();
    }

    /// True once the buffer can feed learning.
    pub fn warmed_up(&self) -> bool {
        self.buffer.len() >= self.cfg.warmup.max(self.cfg.batch_size)
    }

    /// Stores one transition and, past warmup, runs one learning iteration:
    /// critic update (per variant), actor update, target sync.
    pub fn train_step(&mut self, t: Transition) -> Result<()> {
        self.buffer.push(t);
        if !self.warmed_up() {
            return Ok(());
        }
        let batch = self.buffer.sample_batch(self.cfg.batch_size);
        let critic_grad = self.critic_update(&batch)?;
        self.apply_critic_gradient(&critic_grad);
        let actor_grad = self.actor_update(&batch)?;
        self.apply_actor_gradient(&actor_grad);
        self.soft_sync_targets();
        self.learn_steps += 1;
        if self.cfg.record_diagnostics {
            let mean_abs_delta = self.mean_abs_td_error(&batch)?;
            self.last_diagnostics = Some(StepDiagnostics {
                mean_abs_delta,
                critic_grad_norm: linalg::l2_norm(&critic_grad),
                actor_grad_norm: linalg::l2_norm(&actor_grad),
            });
        }
        Ok(())
    }

    /// Mean |TD error| of a batch under the target-network bootstrap.
    pub fn mean_abs_td_error(&self, batch: &[Transition]) -> Result<f64> {
        let mut total = 0.0;
        for t in batch {
            let q_sa = self.q_value(&self.critic.online, &t.state, &t.action)?;
            let bootstrap = if t.terminal {
                0.0
            } else {
                let a_next = self.policy_action(&self.actor.target, &t.next_state)?;
                self.q_value(&self.critic.target, &t.next_state, &a_next)?
            };
            total += (t.reward + self.cfg.gamma * bootstrap - q_sa).abs();
        }
        Ok(total / batch.len().max(1) as f64)
    }

    /// Writes the four networks under `dir`.
    pub fn save_networks(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.critic.online.save(&dir.join("critic_online.mlp"))?;
        self.critic.target.save(&dir.join("critic_target.mlp"))?;
        self.actor.online.save(&dir.join("actor_online.mlp"))?;
        self.actor.target.save(&dir.join("actor_target.mlp"))?;
        Ok(())
    }

    pub fn load_networks(&mut self, dir: &Path) -> Result<()> {
        self.critic.online = Mlp::load(&dir.join("critic_online.mlp"))?;
        self.critic.target = Mlp::load(&dir.join("critic_target.mlp"))?;
        self.actor.online = Mlp::load(&dir.join("actor_online.mlp"))?;
        self.actor.target = Mlp::load(&dir.join("actor_target.mlp"))?;
        Ok(())
    }
}
