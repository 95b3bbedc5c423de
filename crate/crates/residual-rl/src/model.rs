//! Deterministic transition models and model-based critic training.
//!
//! A [`TransitionModel`] maps `(s, a)` to `(r, s')`: either an oracle
//! wrapping an environment copy, or a small network trained by regression
//! on replayed transitions (predicting reward and state *delta* on
//! standardized inputs and outputs).
//!
//! Two ways of exploiting the model:
//!
//! - [`dyna_train_step`]: after the usual real-data critic/actor updates,
//!   run `P` planning passes per batch. Each pass perturbs the replayed
//!   action with Gaussian noise, queries the model, and applies a critic
//!   update `f` to the imaginary transition — either the semi-gradient rule
//!   ([`planning_update_semi`]) or the residual rule
//!   ([`planning_update_residual`]), which trains the critic on both ends
//!   of the imaginary transition and thereby counters the distribution
//!   mismatch between real and imagined states. Planning touches only the
//!   critic; the actor never trains on imaginary data.
//! - [`mve_train_step`]: unroll the model `k` steps under the target actor
//!   and fit the critic against k-step bootstrapped targets along the whole
//!   rollout ([`mve_loss`]), or the rebalanced variant that anchors harder
//!   on the real transition ([`mve_loss_stabilized`]), optionally with a
//!   Huber loss on each residual.

use rand_chacha::ChaCha8Rng;

use crate::agent::{DdpgAgent, ReplayBuffer, Transition};
use crate::env::ContinuousEnv;
use crate::error::{Error, Result};
use crate::nn::{huber, Activation, Mlp, Optimizer};
use crate::seeding::standard_normal;

/// Deterministic `(s, a) -> (r, s')` predictor.
pub enum TransitionModel {
    Oracle(OracleModel),
    Learned(LearnedModel),
}

impl TransitionModel {
    /// Wraps a copy of the environment's pure step function.
    pub fn oracle(env: Box<dyn ContinuousEnv>) -> Self {
        TransitionModel::Oracle(OracleModel { env })
    }

    pub fn learned(state_dim: usize, action_dim: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        Self::learned_with_lr(state_dim, action_dim, 1e-3, rng)
    }

    pub fn learned_with_lr(
        state_dim: usize,
        action_dim: usize,
        lr: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self> {
        Ok(TransitionModel::Learned(LearnedModel::new(
            state_dim, action_dim, lr, rng,
        )?))
    }

    pub fn is_oracle(&self) -> bool {
        matches!(self, TransitionModel::Oracle(_))
    }

    /// Deterministic one-step prediction. The oracle returns exactly the
    /// environment's step output for `(s, a)`.
    pub fn imagine(&self, s: &[f64], a: &[f64]) -> Result<(f64, Vec<f64>)> {
        match self {
            TransitionModel::Oracle(m) => {
                let r = m.env.step(s, a);
                Ok((r.reward, r.next_state))
            }
            TransitionModel::Learned(m) => m.predict(s, a),
        }
    }

    pub fn last_fit_loss(&self) -> Option<f64> {
        match self {
            TransitionModel::Oracle(_) => None,
            TransitionModel::Learned(m) => m.last_fit_loss,
        }
    }
}

pub struct OracleModel {
    env: Box<dyn ContinuousEnv>,
}

/// Network model with input/output standardization statistics.
pub struct LearnedModel {
    net: Mlp,
    opt: Optimizer,
    state_dim: usize,
    in_mean: Vec<f64>,
    in_std: Vec<f64>,
    out_mean: Vec<f64>,
    out_std: Vec<f64>,
    fit_calls: u64,
    /// Normalization statistics are recomputed from the buffer every this
    /// many fit calls (and on the first).
    pub norm_refresh_interval: u64,
    last_fit_loss: Option<f64>,
}

impl LearnedModel {
    pub fn new(state_dim: usize, action_dim: usize, lr: f64, rng: &mut ChaCha8Rng) -> Result<Self> {
        let in_dim = state_dim + action_dim;
        let out_dim = 1 + state_dim; // reward, state delta
        let net = Mlp::new(&[in_dim, 64, 64, out_dim], Activation::Tanh, Activation::Linear, rng)?;
        let n_params = net.params().len();
        Ok(LearnedModel {
            net,
            opt: Optimizer::adam(lr, n_params),
            state_dim,
            in_mean: vec![0.0; in_dim],
            in_std: vec![1.0; in_dim],
            out_mean: vec![0.0; out_dim],
            out_std: vec![1.0; out_dim],
            fit_calls: 0,
            norm_refresh_interval: 1000,
            last_fit_loss: None,
        })
    }

    fn input_of(&self, s: &[f64], a: &[f64]) -> Vec<f64> {
        s.iter()
            .chain(a.iter())
            .enumerate()
            .map(|(i, &x)| (x - self.in_mean[i]) / self.in_std[i])
            .collect()
    }

    fn target_of(&self, t: &Transition) -> Vec<f64> {
        let mut raw = Vec::with_capacity(1 + self.state_dim);
        raw.push(t.reward);
        for i in 0..self.state_dim {
            raw.push(t.next_state[i] - t.state[i]);
        }
        raw.iter()
            .enumerate()
            .map(|(i, &x)| (x - self.out_mean[i]) / self.out_std[i])
            .collect()
    }

    fn predict(&self, s: &[f64], a: &[f64]) -> Result<(f64, Vec<f64>)> {
        let out = self.net.forward(&self.input_of(s, a))?;
        let reward = out[0] * self.out_std[0] + self.out_mean[0];
        let next: Vec<f64> = (0..self.state_dim)
            .map(|i| s[i] + out[i + 1] * self.out_std[i + 1] + self.out_mean[i + 1])
            .collect();
        Ok((reward, next))
    }

    fn refresh_normalization(&mut self, buffer: &ReplayBuffer) {
        let n = buffer.len();
        if n == 0 {
            return;
        }
        let in_dim = self.in_mean.len();
        let out_dim = self.out_mean.len();
        let mut in_sum = vec![0.0; in_dim];
        let mut in_sq = vec![0.0; in_dim];
        let mut out_sum = vec![0.0; out_dim];
        let mut out_sq = vec![0.0; out_dim];
        for idx in 0..n {
            let t = buffer.get(idx);
            for (i, x) in t.state.iter().chain(t.action.iter()).enumerate() {
                in_sum[i] += x;
                in_sq[i] += x * x;
            }
            out_sum[0] += t.reward;
            out_sq[0] += t.reward * t.reward;
            for i in 0..self.state_dim {
                let d = t.next_state[i] - t.state[i];
                out_sum[i + 1] += d;
                out_sq[i + 1] += d * d;
            }
        }
        let nf = n as f64;
        for i in 0..in_dim {
            self.in_mean[i] = in_sum[i] / nf;
            self.in_std[i] = ((in_sq[i] / nf - self.in_mean[i] * self.in_mean[i]).max(0.0))
                .sqrt()
                .max(1e-6);
        }
        for i in 0..out_dim {
            self.out_mean[i] = out_sum[i] / nf;
            self.out_std[i] = ((out_sq[i] / nf - self.out_mean[i] * self.out_mean[i]).max(0.0))
                .sqrt()
                .max(1e-6);
        }
    }
}

/// Runs `grad_steps` minibatch regression updates on the learned model.
///
/// Each step draws indices from the model's own random stream, so model
/// fitting never perturbs the agent's replay sampling. Oracles are never
/// fitted.
pub fn model_fit_step(
    model: &mut TransitionModel,
    buffer: &ReplayBuffer,
    batch_size: usize,
    grad_steps: usize,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let m = match model {
        TransitionModel::Oracle(_) => {
            return Err(Error::InvalidArgument(
                "oracle models are never fitted".into(),
            ))
        }
        TransitionModel::Learned(m) => m,
    };
    if buffer.is_empty() {
        return Err(Error::InvalidArgument("cannot fit a model from an empty buffer".into()));
    }
    if grad_steps == 0 {
        return Ok(());
    }
    // While the buffer is small, statistics are cheap to recompute and
    // change fast; afterwards, refresh on the configured cadence.
    if buffer.len() <= 4096 || m.fit_calls % m.norm_refresh_interval == 0 {
        m.refresh_normalization(buffer);
    }
    m.fit_calls += 1;

    use rand::Rng;
    for _ in 0..grad_steps {
        let mut grad = vec![0.0; m.net.params().len()];
        let mut loss = 0.0;
        let scale = 1.0 / batch_size as f64;
        for _ in 0..batch_size {
            let t = buffer.get(rng.gen_range(0..buffer.len()));
            let input = m.input_of(&t.state, &t.action);
            let target = m.target_of(t);
            let cache = m.net.forward_cached(&input)?;
            let resid: Vec<f64> = cache
                .output()
                .iter()
                .zip(&target)
                .map(|(p, y)| p - y)
                .collect();
            loss += 0.5 * resid.iter().map(|r| r * r).sum::<f64>() * scale;
            let cot: Vec<f64> = resid.iter().map(|r| r * scale).collect();
            let (pg, _) = m.net.backward(&cache, &cot)?;
            for (g, p) in grad.iter_mut().zip(&pg) {
                *g += p;
            }
        }
        if !loss.is_finite() {
            return Err(Error::NonFinite("model fit loss".into()));
        }
        m.opt.step(m.net.params_mut(), &grad);
        m.last_fit_loss = Some(loss);
    }
    Ok(())
}

/// RMS error of the model's next-state prediction over given transitions.
pub fn one_step_state_rmse(model: &TransitionModel, transitions: &[Transition]) -> Result<f64> {
    if transitions.is_empty() {
        return Err(Error::InvalidArgument("no transitions".into()));
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for t in transitions {
        let (_, s_next) = model.imagine(&t.state, &t.action)?;
        for (p, y) in s_next.iter().zip(&t.next_state) {
            total += (p - y) * (p - y);
            count += 1;
        }
    }
    Ok((total / count as f64).sqrt())
}

/// Which critic update runs on imaginary transitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanningUpdate {
    SemiGradient,
    Residual,
    /// k-step model-value expansion instead of one-step planning.
    Mve,
}

impl PlanningUpdate {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "semi" => Ok(PlanningUpdate::SemiGradient),
            "residual" => Ok(PlanningUpdate::Residual),
            "mve" => Ok(PlanningUpdate::Mve),
            other => Err(Error::Config(format!("unknown planning update '{other}'"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PlanningUpdate::SemiGradient => "semi",
            PlanningUpdate::Residual => "residual",
            PlanningUpdate::Mve => "mve",
        }
    }
}

/// Planning-loop configuration.
#[derive(Debug, Clone)]
pub struct PlanningConfig {
    /// Planning passes per training step.
    pub planning_steps: usize,
    /// Stddev of the Gaussian action perturbation (action units).
    pub noise_sigma: f64,
    /// Residual mix coefficient for planning updates.
    pub eta: f64,
    pub update_kind: PlanningUpdate,
    /// Rollout depth for MVE.
    pub unroll_k: usize,
    pub model_batch: usize,
    /// Model regression minibatches per environment step.
    pub model_grad_steps: usize,
    /// Adam learning rate of the learned model.
    pub model_lr: f64,
    /// Use the rebalanced MVE loss (anchoring on the real transition).
    pub mve_stabilized: bool,
    /// Replace squared residuals with Huber residuals in the MVE losses.
    pub mve_huber: bool,
    pub huber_delta: f64,
}

impl Default for PlanningConfig {
    fn default() -> Self {
        PlanningConfig {
            planning_steps: 1,
            noise_sigma: 0.1,
            eta: 0.2,
            update_kind: PlanningUpdate::Residual,
            unroll_k: 3,
            model_batch: 64,
            model_grad_steps: 1,
            model_lr: 1e-3,
            mve_stabilized: true,
            mve_huber: true,
            huber_delta: 1.0,
        }
    }
}

impl PlanningConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::InvalidArgument(format!("planning eta {} not in [0,1]", self.eta)));
        }
        if self.noise_sigma < 0.0 {
            return Err(Error::InvalidArgument("noise sigma must be nonnegative".into()));
        }
        if self.unroll_k == 0 {
            return Err(Error::InvalidArgument("unroll depth must be at least 1".into()));
        }
        Ok(())
    }
}

/// Semi-gradient critic update on an imaginary batch: the same rule as the
/// real-data update, target-network bootstrap included.
pub fn planning_update_semi(agent: &DdpgAgent, batch: &[Transition]) -> Result<Vec<f64>> {
    agent.critic_update_vanilla(batch)
}

/// Residual critic update on an imaginary batch, entirely on the online
/// networks:
/// `theta <- theta - a (r + g Q(s',mu(s')) - Q(s,a)) (eta g grad Q(s',mu(s')) - grad Q(s,a))`.
///
/// Trains the critic on both the replayed state and the imagined successor.
pub fn planning_update_residual(
    agent: &DdpgAgent,
    batch: &[Transition],
    eta: f64,
) -> Result<Vec<f64>> {
    agent.variant_gradient(batch, crate::agent::Variant::Res, eta)
}

fn imaginary_batch(
    agent: &DdpgAgent,
    model: &TransitionModel,
    batch: &[Transition],
    sigma: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Transition>> {
    let low = agent.action_low().to_vec();
    let high = agent.action_high().to_vec();
    let mut out = Vec::with_capacity(batch.len());
    for t in batch {
        let mut a_hat = t.action.clone();
        for (i, a) in a_hat.iter_mut().enumerate() {
            *a += sigma * standard_normal(rng);
            *a = a.max(low[i]).min(high[i]);
        }
        let (r_hat, s_hat) = model.imagine(&t.state, &a_hat)?;
        out.push(Transition {
            state: t.state.clone(),
            action: a_hat,
            reward: r_hat,
            next_state: s_hat,
            terminal: false,
        });
    }
    Ok(out)
}

/// Per-step planning diagnostics (populated when the agent records
/// diagnostics): mean |TD error| over the last imaginary batch and the
/// model's one-step state RMSE on the replayed batch.
#[derive(Debug, Clone, Copy)]
pub struct PlanningDiagnostics {
    pub imaginary_abs_delta: f64,
    pub model_state_rmse: f64,
}

/// One Dyna training step.
///
/// Stores the real transition, fits the model, applies the usual real-data
/// critic and actor updates to one replayed batch, then runs
/// `planning_steps` imaginary passes over the same batch (fresh action noise
/// each pass) updating only the critic, and finally soft-syncs the targets.
/// With `planning_steps = 0` this is exactly the model-free training step.
pub fn dyna_train_step(
    agent: &mut DdpgAgent,
    t: Transition,
    model: &mut TransitionModel,
    cfg: &PlanningConfig,
    model_rng: &mut ChaCha8Rng,
    plan_rng: &mut ChaCha8Rng,
) -> Result<Option<PlanningDiagnostics>> {
    cfg.validate()?;
    agent.buffer.push(t);
    // Fitting starts once one full minibatch of distinct data exists.
    if !model.is_oracle() && cfg.model_grad_steps > 0 && agent.buffer.len() >= cfg.model_batch {
        model_fit_step(model, &agent.buffer, cfg.model_batch, cfg.model_grad_steps, model_rng)?;
    }
    if !agent.warmed_up() {
        return Ok(None);
    }
    let batch_size = agent.config().batch_size;
    let batch = agent.buffer.sample_batch(batch_size);

    let critic_grad = agent.critic_update_vanilla(&batch)?;
    agent.apply_critic_gradient(&critic_grad);
    let actor_grad = agent.actor_update(&batch)?;
    agent.apply_actor_gradient(&actor_grad);

    let mut last_imaginary = None;
    for _ in 0..cfg.planning_steps {
        let imaginary = imaginary_batch(agent, model, &batch, cfg.noise_sigma, plan_rng)?;
        let g = match cfg.update_kind {
            PlanningUpdate::SemiGradient => planning_update_semi(agent, &imaginary)?,
            PlanningUpdate::Residual => planning_update_residual(agent, &imaginary, cfg.eta)?,
            PlanningUpdate::Mve => {
                return Err(Error::InvalidArgument(
                    "MVE uses mve_train_step, not the planning loop".into(),
                ))
            }
        };
        agent.apply_critic_gradient(&g);
        last_imaginary = Some(imaginary);
    }

    agent.soft_sync_targets();
    agent.increment_learn_steps();

    if agent.config().record_diagnostics {
        if let Some(imaginary) = last_imaginary {
            return Ok(Some(PlanningDiagnostics {
                imaginary_abs_delta: agent.mean_abs_td_error(&imaginary)?,
                model_state_rmse: one_step_state_rmse(model, &batch)?,
            }));
        }
    }
    Ok(None)
}

/// A `k`-step model rollout starting from a real transition.
///
/// `states` holds `s_-1 .. s_k` (the real pair first, then imagined),
/// `actions` holds `a_-1 .. a_k` where `a_0 .. a_k` come from the target
/// actor, and `rewards` holds `r_0 .. r_k` (model rewards after the first).
#[derive(Debug, Clone)]
pub struct MveTrajectory {
    pub states: Vec<Vec<f64>>,
    pub actions: Vec<Vec<f64>>,
    pub rewards: Vec<f64>,
}

impl MveTrajectory {
    fn check(&self, k: usize) -> Result<()> {
        if self.states.len() != k + 2 || self.actions.len() != k + 2 || self.rewards.len() != k + 1
        {
            return Err(Error::DimensionMismatch(format!(
                "trajectory with {} states / {} actions / {} rewards does not match k = {k}",
                self.states.len(),
                self.actions.len(),
                self.rewards.len()
            )));
        }
        Ok(())
    }
}

/// Unrolls the model `k` steps from a real transition, following the target
/// actor.
pub fn unroll(
    agent: &DdpgAgent,
    model: &TransitionModel,
    t: &Transition,
    k: usize,
) -> Result<MveTrajectory> {
    let mut states = Vec::with_capacity(k + 2);
    let mut actions = Vec::with_capacity(k + 2);
    let mut rewards = Vec::with_capacity(k + 1);
    states.push(t.state.clone());
    states.push(t.next_state.clone());
    actions.push(t.action.clone());
    rewards.push(t.reward);
    let mut s = t.next_state.clone();
    for _ in 0..k {
        let a = agent.act_target(&s)?;
        let (r, s_next) = model.imagine(&s, &a)?;
        actions.push(a);
        rewards.push(r);
        states.push(s_next.clone());
        s = s_next;
    }
    // Bootstrap action at the rollout tip.
    actions.push(agent.act_target(&s)?);
    let traj = MveTrajectory { states, actions, rewards };
    traj.check(k)?;
    Ok(traj)
}

fn q_input(s: &[f64], a: &[f64]) -> Vec<f64> {
    s.iter().chain(a.iter()).copied().collect()
}

/// k-step bootstrapped targets shared by both loss shapes:
/// `target(t) = sum_{i=t+1..k} gamma^{i-t-1} r_i + gamma^{k-t} Qb(s_k, a_k)`
/// for `t = -1 .. k-1` (index `t+1` in the returned vector).
fn mve_targets(
    critic_target: &Mlp,
    traj: &MveTrajectory,
    k: usize,
    gamma: f64,
) -> Result<Vec<f64>> {
    let q_boot = critic_target.forward(&q_input(&traj.states[k + 1], &traj.actions[k + 1]))?[0];
    let mut targets = Vec::with_capacity(k + 1);
    for idx in 0..=k {
        // idx = t + 1.
        let mut target = 0.0;
        let mut discount = 1.0;
        for i in idx..=k {
            target += discount * traj.rewards[i];
            discount *= gamma;
        }
        target += discount * q_boot;
        targets.push(target);
    }
    Ok(targets)
}

/// Residuals `Q(s_t, a_t) - target(t)` of the k-step loss, `t = -1 .. k-1`.
pub fn mve_residuals(
    critic: &Mlp,
    critic_target: &Mlp,
    traj: &MveTrajectory,
    k: usize,
    gamma: f64,
) -> Result<Vec<f64>> {
    traj.check(k)?;
    let targets = mve_targets(critic_target, traj, k, gamma)?;
    let mut out = Vec::with_capacity(k + 1);
    for idx in 0..=k {
        let q = critic.forward(&q_input(&traj.states[idx], &traj.actions[idx]))?[0];
        out.push(q - targets[idx]);
    }
    Ok(out)
}

/// Residuals of the rebalanced loss: the first is the one-step error on the
/// real transition, `Q(s_-1, a_-1) - (r_0 + gamma Qb(s_0, a_0))`; the rest
/// equal the k-step residuals for `t = 0 .. k-1`.
pub fn mve_stabilized_residuals(
    critic: &Mlp,
    critic_target: &Mlp,
    traj: &MveTrajectory,
    k: usize,
    gamma: f64,
) -> Result<Vec<f64>> {
    traj.check(k)?;
    let targets = mve_targets(critic_target, traj, k, gamma)?;
    let mut out = Vec::with_capacity(k + 1);
    let q_first = critic.forward(&q_input(&traj.states[0], &traj.actions[0]))?[0];
    let qb_next = critic_target.forward(&q_input(&traj.states[1], &traj.actions[1]))?[0];
    out.push(q_first - (traj.rewards[0] + gamma * qb_next));
    for idx in 1..=k {
        let q = critic.forward(&q_input(&traj.states[idx], &traj.actions[idx]))?[0];
        out.push(q - targets[idx]);
    }
    Ok(out)
}

fn accumulate_loss_terms(
    critic: &Mlp,
    traj: &MveTrajectory,
    residuals: &[f64],
    term_weights: &[f64],
    use_huber: bool,
    huber_delta: f64,
    grad: &mut [f64],
) -> Result<f64> {
    let mut loss = 0.0;
    for (idx, (&rho, &w)) in residuals.iter().zip(term_weights).enumerate() {
        let (term, dterm) = if use_huber {
            huber(rho, huber_delta)
        } else {
            (rho * rho, 2.0 * rho)
        };
        loss += w * term;
        let cache = critic.forward_cached(&q_input(&traj.states[idx], &traj.actions[idx]))?;
        let (pg, _) = critic.backward(&cache, &[w * dterm])?;
        for (g, p) in grad.iter_mut().zip(&pg) {
            *g += p;
        }
    }
    Ok(loss)
}

/// k-step model-value-expansion loss and its critic gradient.
///
/// `loss = 1/(k+1) sum_{t=-1}^{k-1} (Q(s_t, a_t) - target(t))^2` with the
/// targets held fixed (they only read the target networks), so the gradient
/// flows through the `Q(s_t, a_t)` terms alone.
pub fn mve_loss(
    critic: &Mlp,
    critic_target: &Mlp,
    traj: &MveTrajectory,
    k: usize,
    gamma: f64,
) -> Result<(f64, Vec<f64>)> {
    let residuals = mve_residuals(critic, critic_target, traj, k, gamma)?;
    let weights = vec![1.0 / (k + 1) as f64; k + 1];
    let mut grad = vec![0.0; critic.params().len()];
    let loss = accumulate_loss_terms(critic, traj, &residuals, &weights, false, 1.0, &mut grad)?;
    Ok((loss, grad))
}

/// Rebalanced k-step loss: full weight on the real-transition term plus the
/// `1/k`-weighted imaginary terms; optionally Huber on every residual
/// (quadratic branch `r^2/2`, so below the threshold it is exactly half the
/// squared version).
pub fn mve_loss_stabilized(
    critic: &Mlp,
    critic_target: &Mlp,
    traj: &MveTrajectory,
    k: usize,
    gamma: f64,
    use_huber: bool,
    huber_delta: f64,
) -> Result<(f64, Vec<f64>)> {
    let residuals = mve_stabilized_residuals(critic, critic_target, traj, k, gamma)?;
    let mut weights = vec![1.0 / k as f64; k + 1];
    weights[0] = 1.0;
    let mut grad = vec![0.0; critic.params().len()];
    let loss = accumulate_loss_terms(
        critic,
        traj,
        &residuals,
        &weights,
        use_huber,
        huber_delta,
        &mut grad,
    )?;
    Ok((loss, grad))
}

/// One MVE training step: fit the model, replace the critic's one-step
/// regression with the k-step rollout loss (batch mean), keep the usual
/// actor update on real states, and soft-sync the targets.
pub fn mve_train_step(
    agent: &mut DdpgAgent,
    t: Transition,
    model: &mut TransitionModel,
    cfg: &PlanningConfig,
    model_rng: &mut ChaCha8Rng,
) -> Result<Option<PlanningDiagnostics>> {
    cfg.validate()?;
    agent.buffer.push(t);
    if !model.is_oracle() && cfg.model_grad_steps > 0 && agent.buffer.len() >= cfg.model_batch {
        model_fit_step(model, &agent.buffer, cfg.model_batch, cfg.model_grad_steps, model_rng)?;
    }
    if !agent.warmed_up() {
        return Ok(None);
    }
    let batch_size = agent.config().batch_size;
    let batch = agent.buffer.sample_batch(batch_size);

    let mut grad = vec![0.0; agent.critic.online.params().len()];
    let mut abs_residuals = 0.0;
    let mut n_residuals = 0usize;
    let record = agent.config().record_diagnostics;
    for t in &batch {
        let traj = unroll(agent, model, t, cfg.unroll_k)?;
        let (_, g) = if cfg.mve_stabilized {
            mve_loss_stabilized(
                &agent.critic.online,
                &agent.critic.target,
                &traj,
                cfg.unroll_k,
                agent.config().gamma,
                cfg.mve_huber,
                cfg.huber_delta,
            )?
        } else {
            mve_loss(
                &agent.critic.online,
                &agent.critic.target,
                &traj,
                cfg.unroll_k,
                agent.config().gamma,
            )?
        };
        for (acc, gi) in grad.iter_mut().zip(&g) {
            *acc += gi;
        }
        if record {
            let residuals = if cfg.mve_stabilized {
                mve_stabilized_residuals(
                    &agent.critic.online,
                    &agent.critic.target,
                    &traj,
                    cfg.unroll_k,
                    agent.config().gamma,
                )?
            } else {
                mve_residuals(
                    &agent.critic.online,
                    &agent.critic.target,
                    &traj,
                    cfg.unroll_k,
                    agent.config().gamma,
                )?
            };
            abs_residuals += residuals.iter().map(|r| r.abs()).sum::<f64>();
            n_residuals += residuals.len();
        }
    }
    let inv = 1.0 / batch.len() as f64;
    for g in &mut grad {
        *g *= inv;
        if !g.is_finite() {
            return Err(Error::NonFinite("MVE critic gradient".into()));
        }
    }
    agent.apply_critic_gradient(&grad);

    let actor_grad = agent.actor_update(&batch)?;
    agent.apply_actor_gradient(&actor_grad);
    agent.soft_sync_targets();
    agent.increment_learn_steps();

    if record {
        return Ok(Some(PlanningDiagnostics {
            imaginary_abs_delta: abs_residuals / n_residuals.max(1) as f64,
            model_state_rmse: one_step_state_rmse(model, &batch)?,
        }));
    }
    Ok(None)
}
