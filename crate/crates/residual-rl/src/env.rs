//! Deterministic desk-scale environments.
//!
//! Continuous-control tasks ([`Pendulum`], [`PointMass`]) drive the deep
//! agents; diagnostic finite MDPs ([`star_counterexample`], [`random_chain`])
//! drive the linear learners. Every `step` is a pure function of
//! `(state, action)` — identical inputs give bitwise-identical outputs —
//! which is what makes single-sample residual gradients unbiased here and
//! lets an oracle model wrap an environment copy.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::mdp::{FiniteMdp, PolicyTable};
use crate::objectives::FeatureMap;
use crate::seeding::{standard_normal, stream_rng};

/// Outcome of one environment step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub reward: f64,
    pub next_state: Vec<f64>,
    /// True terminal (not a horizon cut; the runner tracks the horizon).
    pub terminal: bool,
}

/// A bounded-action continuous-control task with deterministic dynamics.
pub trait ContinuousEnv: Send + Sync {
    fn id(&self) -> &'static str;
    fn state_dim(&self) -> usize;
    fn action_dim(&self) -> usize;
    fn action_low(&self) -> &[f64];
    fn action_high(&self) -> &[f64];
    fn horizon(&self) -> usize;
    /// Draws an initial state from the episode-start distribution.
    fn initial_state(&self, rng: &mut ChaCha8Rng) -> Vec<f64>;
    /// Pure transition; out-of-bounds actions are clipped before dynamics.
    fn step(&self, state: &[f64], action: &[f64]) -> StepResult;
    fn clone_box(&self) -> Box<dyn ContinuousEnv>;
}

impl Clone for Box<dyn ContinuousEnv> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

fn clip(x: f64, low: f64, high: f64) -> f64 {
    x.max(low).min(high)
}

/// Torque-limited pendulum swing-up.
///
/// State `(cos th, sin th, thdot)` with `th = 0` upright; one bounded torque
/// input; semi-implicit Euler dynamics; dense negative cost
/// `-(th^2 + 0.1 thdot^2 + 0.001 u^2)`. Physics constants are fixed
/// stand-ins, documented here: g = 10, m = 1, l = 1, dt = 0.05,
/// |u| <= 2, |thdot| <= 8, horizon 200.
#[derive(Debug, Clone)]
pub struct Pendulum {
    low: [f64; 1],
    high: [f64; 1],
}

impl Pendulum {
    const G: f64 = 10.0;
    const M: f64 = 1.0;
    const L: f64 = 1.0;
    const DT: f64 = 0.05;
    const MAX_SPEED: f64 = 8.0;
    const MAX_TORQUE: f64 = 2.0;

    pub fn new() -> Self {
        Pendulum {
            low: [-Self::MAX_TORQUE],
            high: [Self::MAX_TORQUE],
        }
    }

    fn angle_normalize(th: f64) -> f64 {
        let two_pi = std::f64::consts::TAU;
        let x = (th + std::f64::consts::PI).rem_euclid(two_pi);
        x - std::f64::consts::PI
    }
}

impl Default for Pendulum {
    fn default() -> Self {
        Self::new()
    }
}

impl ContinuousEnv for Pendulum {
    fn id(&self) -> &'static str {
        "pendulum"
    }

    fn state_dim(&self) -> usize {
        3
    }

    fn action_dim(&self) -> usize {
        1
    }

    fn action_low(&self) -> &[f64] {
        &self.low
    }

    fn action_high(&self) -> &[f64] {
        &self.high
    }

    fn horizon(&self) -> usize {
        200
    }

    fn initial_state(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let th = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let thdot = rng.gen_range(-1.0..1.0);
        vec![th.cos(), th.sin(), thdot]
    }

    fn step(&self, state: &[f64], action: &[f64]) -> StepResult {
        let th = state[1].atan2(state[0]);
        let thdot = state[2];
        let u = clip(action[0], -Self::MAX_TORQUE, Self::MAX_TORQUE);

        let angle = Self::angle_normalize(th);
        let cost = angle * angle + 0.1 * thdot * thdot + 0.001 * u * u;

        let accel = 3.0 * Self::G / (2.0 * Self::L) * th.sin()
            + 3.0 / (Self::M * Self::L * Self::L) * u;
        let new_thdot = clip(thdot + accel * Self::DT, -Self::MAX_SPEED, Self::MAX_SPEED);
        let new_th = th + new_thdot * Self::DT;

        StepResult {
            reward: -cost,
            next_state: vec![new_th.cos(), new_th.sin(), new_thdot],
            terminal: false,
        }
    }

    fn clone_box(&self) -> Box<dyn ContinuousEnv> {
        Box::new(self.clone())
    }
}

/// Builds the pendulum swing-up task.
pub fn pendulum_env() -> Pendulum {
    Pendulum::new()
}

/// 2-d point mass with bounded acceleration and quadratic cost to the origin.
///
/// Dynamics are affine away from the state clamps — `p' = p + dt v`,
/// `v' = v + dt a`, with positions clamped at +/-3 and velocities at +/-5
/// (outside normal operation) — so a learned one-step model can fit them
/// essentially exactly and returns stay bounded under arbitrary policies.
/// dt = 0.1, horizon 100, actions in [-1,1]^2,
/// reward `-(|p|^2 + 0.1 |v|^2 + 0.01 |a|^2)`.
#[derive(Debug, Clone)]
pub struct PointMass {
    low: [f64; 2],
    high: [f64; 2],
}

impl PointMass {
    const DT: f64 = 0.1;
    const MAX_SPEED: f64 = 5.0;
    const MAX_POS: f64 = 3.0;

    pub fn new() -> Self {
        PointMass {
            low: [-1.0, -1.0],
            high: [1.0, 1.0],
        }
    }
}

impl Default for PointMass {
    fn default() -> Self {
        Self::new()
    }
}

impl ContinuousEnv for PointMass {
    fn id(&self) -> &'static str {
        "point_mass"
    }

    fn state_dim(&self) -> usize {
        4
    }

    fn action_dim(&self) -> usize {
        2
    }

    fn action_low(&self) -> &[f64] {
        &self.low
    }

    fn action_high(&self) -> &[f64] {
        &self.high
    }

    fn horizon(&self) -> usize {
        100
    }

    fn initial_state(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        vec![
            rng.gen_range(-2.5..2.5),
            rng.gen_range(-2.5..2.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        ]
    }

    fn step(&self, state: &[f64], action: &[f64]) -> StepResult {
        let (px, py, vx, vy) = (state[0], state[1], state[2], state[3]);
        let ax = clip(action[0], -1.0, 1.0);
        let ay = clip(action[1], -1.0, 1.0);

        let cost = px * px + py * py + 0.1 * (vx * vx + vy * vy) + 0.01 * (ax * ax + ay * ay);

        let npx = clip(px + Self::DT * vx, -Self::MAX_POS, Self::MAX_POS);
        let npy = clip(py + Self::DT * vy, -Self::MAX_POS, Self::MAX_POS);
        let nvx = clip(vx + Self::DT * ax, -Self::MAX_SPEED, Self::MAX_SPEED);
        let nvy = clip(vy + Self::DT * ay, -Self::MAX_SPEED, Self::MAX_SPEED);

        StepResult {
            reward: -cost,
            next_state: vec![npx, npy, nvx, nvy],
            terminal: false,
        }
    }

    fn clone_box(&self) -> Box<dyn ContinuousEnv> {
        Box::new(self.clone())
    }
}

/// Builds the point-mass task.
pub fn point_mass_env() -> PointMass {
    PointMass::new()
}

/// Replays an action sequence from an initial state and dumps the
/// trajectory as CSV (`step,s_0..,a_0..,reward`) for debugging.
pub fn trajectory_csv(
    env: &dyn ContinuousEnv,
    initial_state: &[f64],
    actions: &[Vec<f64>],
) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("step");
    for i in 0..env.state_dim() {
        write!(out, ",s{i}").unwrap();
    }
    for i in 0..env.action_dim() {
        write!(out, ",a{i}").unwrap();
    }
    out.push_str(",reward\n");
    let mut state = initial_state.to_vec();
    for (step, action) in actions.iter().enumerate() {
        let r = env.step(&state, action);
        write!(out, "{step}").unwrap();
        for x in &state {
            write!(out, ",{x}").unwrap();
        }
        for a in action {
            write!(out, ",{a}").unwrap();
        }
        writeln!(out, ",{}", r.reward).unwrap();
        state = r.next_state;
        if r.terminal {
            break;
        }
    }
    out
}

/// Looks up a continuous environment by its string id.
pub fn env_by_id(id: &str) -> Result<Box<dyn ContinuousEnv>> {
    match id {
        "pendulum" => Ok(Box::new(pendulum_env())),
        "point_mass" => Ok(Box::new(point_mass_env())),
        other => Err(Error::Config(format!("unknown environment id '{other}'"))),
    }
}

/// A finite MDP bundled with features and designated policies, used by the
/// linear-learner experiments.
#[derive(Debug, Clone)]
pub struct DiagnosticMdp {
    pub mdp: FiniteMdp,
    pub features: FeatureMap,
    pub behavior: PolicyTable,
    pub target: PolicyTable,
    /// Conventional starting weights, when the fixture defines them.
    pub initial_weights: Option<Vec<f64>>,
}

/// The classic 7-state star MDP on which off-policy semi-gradient TD
/// diverges while residual gradient converges.
///
/// Construction (a repo-level fixture, adopted from the off-policy
/// divergence literature rather than defined here):
///
/// - States 0..=6; action 0 ("dashed") jumps uniformly to one of states
///   0..=5, action 1 ("solid") jumps to state 6.
/// - All rewards are 0, gamma = 0.99, so the true value function is 0.
/// - Over-parameterized linear features (8 weights for 7 states):
///   `v(i) = 2 w_i + w_7` for `i < 6`, and `v(6) = w_6 + 2 w_7`.
/// - Behavior policy takes "dashed" with probability 6/7 (its stationary
///   distribution is uniform); the target policy always takes "solid".
/// - Conventional initial weights: all ones except `w_6 = 10`.
pub fn star_counterexample() -> DiagnosticMdp {
    let n = 7;
    let mut transition = vec![vec![vec![0.0; n]; 2]; n];
    for s in 0..n {
        for t in 0..6 {
            transition[s][0][t] = 1.0 / 6.0;
        }
        // Normalize the last entry exactly.
        let sum: f64 = transition[s][0].iter().sum();
        transition[s][0][5] += 1.0 - sum;
        transition[s][1][6] = 1.0;
    }
    let reward = vec![vec![0.0; 2]; n];
    let mdp = FiniteMdp::new(transition, reward, 0.99).expect("star MDP is valid");

    let mut rows = vec![vec![0.0; 8]; n];
    for (i, row) in rows.iter_mut().enumerate().take(6) {
        row[i] = 2.0;
        row[7] = 1.0;
    }
    rows[6][6] = 1.0;
    rows[6][7] = 2.0;
    let features = FeatureMap::from_rows(&rows).expect("star features are valid");

    let behavior =
        PolicyTable::new(vec![vec![6.0 / 7.0, 1.0 / 7.0]; n]).expect("behavior policy is valid");
    let target = PolicyTable::deterministic(n, 2, 1).expect("target policy is valid");

    DiagnosticMdp {
        mdp,
        features,
        behavior,
        target,
        initial_weights: Some(vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 10.0, 1.0]),
    }
}

/// Seeded random ergodic MDP with Gaussian features of the given rank.
///
/// Transition rows are floored away from zero, which keeps every chain
/// irreducible and aperiodic. Behavior and target policies coincide
/// (on-policy) and are themselves random and floored.
pub fn random_chain(
    n_states: usize,
    n_actions: usize,
    feature_dim: usize,
    seed: u64,
) -> Result<DiagnosticMdp> {
    if n_states == 0 || n_actions == 0 || feature_dim == 0 {
        return Err(Error::InvalidArgument(
            "random_chain needs positive dimensions".into(),
        ));
    }
    let mut rng = stream_rng(seed, "random-chain");
    let mut transition = vec![vec![vec![0.0; n_states]; n_actions]; n_states];
    let mut reward = vec![vec![0.0; n_actions]; n_states];
    for s in 0..n_states {
        for a in 0..n_actions {
            let raw: Vec<f64> = (0..n_states).map(|_| rng.gen_range(0.05..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            for sp in 0..n_states {
                transition[s][a][sp] = raw[sp] / sum;
            }
            let s2: f64 = transition[s][a].iter().sum();
            transition[s][a][n_states - 1] += 1.0 - s2;
            reward[s][a] = rng.gen_range(-1.0..1.0);
        }
    }
    let mdp = FiniteMdp::new(transition, reward, 0.9)?;

    let mut policy_rows = vec![vec![0.0; n_actions]; n_states];
    for row in policy_rows.iter_mut() {
        let raw: Vec<f64> = (0..n_actions).map(|_| rng.gen_range(0.1..1.0)).collect();
        let sum: f64 = raw.iter().sum();
        for a in 0..n_actions {
            row[a] = raw[a] / sum;
        }
        let s2: f64 = row.iter().sum();
        row[n_actions - 1] += 1.0 - s2;
    }
    let policy = PolicyTable::new(policy_rows)?;

    let features = FeatureMap::new(Mat::from_fn(n_states, feature_dim, |_, _| {
        standard_normal(&mut rng)
    }))?;

    Ok(DiagnosticMdp {
        mdp,
        features,
        behavior: policy.clone(),
        target: policy,
        initial_weights: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{induced_dynamics, stationary_distribution};

    #[test]
    fn pendulum_rest_at_stable_equilibrium() {
        let env = pendulum_env();
        // Hanging straight down with no velocity and no torque.
        let mut state = vec![(std::f64::consts::PI).cos(), (std::f64::consts::PI).sin(), 0.0];
        for _ in 0..50 {
            let r = env.step(&state, &[0.0]);
            state = r.next_state;
        }
        assert!((state[0] + 1.0).abs() < 1e-9, "cos drifted: {}", state[0]);
        assert!(state[1].abs() < 1e-9, "sin drifted: {}", state[1]);
        assert!(state[2].abs() < 1e-9, "speed drifted: {}", state[2]);
    }

    #[test]
    fn pendulum_trajectories_replay_bitwise() {
        let env = pendulum_env();
        let mut rng = stream_rng(3, "env-test");
        let s0 = env.initial_state(&mut rng);
        let actions: Vec<f64> = (0..20).map(|i| ((i as f64) * 0.37).sin()).collect();
        let run = |start: &[f64]| {
            let mut s = start.to_vec();
            let mut out = Vec::new();
            for &a in &actions {
                let r = env.step(&s, &[a]);
                out.push((r.reward, r.next_state.clone()));
                s = r.next_state;
            }
            out
        };
        assert_eq!(run(&s0), run(&s0));
    }

    #[test]
    fn pendulum_energy_pumping_increases_speed() {
        let env = pendulum_env();
        // From rest near the bottom, constant torque spins it up.
        let th = std::f64::consts::PI - 0.3;
        let mut state = vec![th.cos(), th.sin(), 0.0];
        let mut prev_speed = 0.0;
        for _ in 0..5 {
            let r = env.step(&state, &[2.0]);
            state = r.next_state;
            assert!(state[2].abs() >= prev_speed, "speed should grow early");
            prev_speed = state[2].abs();
        }
        assert!(prev_speed > 0.1);
    }

    #[test]
    fn pendulum_clips_actions() {
        let env = pendulum_env();
        let s = vec![0.5f64.cos(), 0.5f64.sin(), 1.0];
        assert_eq!(env.step(&s, &[100.0]), env.step(&s, &[2.0]));
    }

    #[test]
    fn point_mass_static_and_affine() {
        let env = point_mass_env();
        let s = vec![0.4, -0.2, 0.0, 0.0];
        let r = env.step(&s, &[0.0, 0.0]);
        assert_eq!(r.next_state, s);
        // One step matches the affine map.
        let s = vec![0.4, -0.2, 0.3, -0.1];
        let a = [0.5, -0.7];
        let r = env.step(&s, &a);
        assert_eq!(r.next_state[0], 0.4 + 0.1 * 0.3);
        assert_eq!(r.next_state[1], -0.2 + 0.1 * -0.1);
        assert_eq!(r.next_state[2], 0.3 + 0.1 * 0.5);
        assert_eq!(r.next_state[3], -0.1 + 0.1 * -0.7);
    }

    #[test]
    fn point_mass_goal_is_max_reward() {
        let env = point_mass_env();
        let r = env.step(&[0.0, 0.0, 0.0, 0.0], &[0.0, 0.0]);
        assert_eq!(r.reward, 0.0);
        let r2 = env.step(&[0.5, 0.0, 0.0, 0.0], &[0.0, 0.0]);
        assert!(r2.reward < 0.0);
    }

    #[test]
    fn star_structure() {
        let star = star_counterexample();
        assert_eq!(star.mdp.n_states(), 7);
        assert_eq!(star.features.dim(), 8);
        assert!(!star.features.full_rank());
        // Behavior chain is ergodic with uniform stationary distribution.
        let (p, _) = induced_dynamics(&star.mdp, &star.behavior).unwrap();
        let d = stationary_distribution(&p).unwrap();
        for s in 0..7 {
            assert!((d[s] - 1.0 / 7.0).abs() < 1e-9, "state {s}: {}", d[s]);
        }
        // Target policy funnels everything into state 6.
        let (pt, _) = induced_dynamics(&star.mdp, &star.target).unwrap();
        for s in 0..7 {
            assert_eq!(pt.get(s, 6), 1.0);
        }
    }

    #[test]
    fn random_chain_is_seeded_and_ergodic() {
        let a = random_chain(5, 3, 2, 17).unwrap();
        let b = random_chain(5, 3, 2, 17).unwrap();
        assert_eq!(a.mdp, b.mdp);
        for s in 0..5 {
            for act in 0..3 {
                let sum: f64 = a.mdp.transition_row(s, act).iter().sum();
                assert!((sum - 1.0).abs() < 1e-12);
            }
        }
        let (p, _) = induced_dynamics(&a.mdp, &a.behavior).unwrap();
        assert!(stationary_distribution(&p).is_ok());
    }

    #[test]
    fn env_ids_resolve() {
        assert!(env_by_id("pendulum").is_ok());
        assert!(env_by_id("point_mass").is_ok());
        assert!(env_by_id("nope").is_err());
    }

    #[test]
    fn point_mass_clips_actions() {
        let env = point_mass_env();
        let s = vec![0.1, 0.2, 0.3, 0.4];
        assert_eq!(env.step(&s, &[9.0, -9.0]), env.step(&s, &[1.0, -1.0]));
    }

    #[test]
    fn trajectory_dump_has_stable_shape() {
        let env = point_mass_env();
        let actions = vec![vec![0.5, -0.5]; 3];
        let csv = trajectory_csv(&env, &[0.0, 0.0, 0.0, 0.0], &actions);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("step,s0,s1,s2,s3,a0,a1,reward"));
        assert_eq!(lines.count(), 3);
    }
}
