//! Exact finite MDPs.
//!
//! A [`FiniteMdp`] stores the full transition tensor `p[s][a][s']`, the mean
//! reward matrix `r[s][a]`, and a discount `gamma < 1`. Together with a
//! [`PolicyTable`] this is enough to compute everything in closed form: the
//! policy-induced chain `P`, reward vector `r`, stationary distribution `d`,
//! the Bellman operator `T v = r + gamma * P v`, and its unique fixed point
//! `v`. These exact quantities are the ground truth the incremental learners
//! are verified against.
//!
//! # File format
//!
//! An MDP round-trips through a plain-text form:
//!
//! ```text
//! states=N actions=M gamma=G
//! r(0,0) p(0'|0,0) p(1'|0,0) ... p(N-1'|0,0)
//! r(0,1) ...
//! ```
//!
//! One line per `(s, a)` pair in state-major order; every float is written
//! with 17 significant digits, so write-then-read reproduces the exact bits.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

const ROW_SUM_TOL: f64 = 1e-12;

/// Exact finite MDP: transition tensor, mean rewards, and discount.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMdp {
    n_states: usize,
    n_actions: usize,
    /// `transition[s][a][s']`, each `[s][a]` row a probability distribution.
    transition: Vec<Vec<Vec<f64>>>,
    /// `reward[s][a]`, mean reward for taking `a` in `s`.
    reward: Vec<Vec<f64>>,
    gamma: f64,
}

impl FiniteMdp {
    pub fn new(
        transition: Vec<Vec<Vec<f64>>>,
        reward: Vec<Vec<f64>>,
        gamma: f64,
    ) -> Result<Self> {
        let n_states = transition.len();
        if n_states == 0 {
            return Err(Error::InvalidArgument("MDP needs at least one state".into()));
        }
        let n_actions = transition[0].len();
        if n_actions == 0 {
            return Err(Error::InvalidArgument("MDP needs at least one action".into()));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::InvalidArgument(format!(
                "gamma must be in [0, 1), got {gamma}"
            )));
        }
        if reward.len() != n_states {
            return Err(Error::DimensionMismatch("reward rows != n_states".into()));
        }
        for s in 0..n_states {
            if transition[s].len() != n_actions || reward[s].len() != n_actions {
                return Err(Error::DimensionMismatch(format!(
                    "state {s}: expected {n_actions} actions"
                )));
            }
            for a in 0..n_actions {
                let row = &transition[s][a];
                if row.len() != n_states {
                    return Err(Error::DimensionMismatch(format!(
                        "transition row ({s},{a}) has length {}",
                        row.len()
                    )));
                }
                let mut sum = 0.0;
                for &p in row {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Error::InvalidArgument(format!(
                            "transition probability {p} out of [0,1] at ({s},{a})"
                        )));
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > ROW_SUM_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "transition row ({s},{a}) sums to {sum}"
                    )));
                }
                if !reward[s][a].is_finite() {
                    return Err(Error::NonFinite(format!("reward ({s},{a})")));
                }
            }
        }
        Ok(FiniteMdp {
            n_states,
            n_actions,
            transition,
            reward,
            gamma,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn transition_row(&self, s: usize, a: usize) -> &[f64] {
        &self.transition[s][a]
    }

    pub fn reward(&self, s: usize, a: usize) -> f64 {
        self.reward[s][a]
    }

    /// Serializes to the plain-text format (17 significant digits).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "states={} actions={} gamma={:.16e}",
            self.n_states, self.n_actions, self.gamma
        )
        .unwrap();
        for s in 0..self.n_states {
            for a in 0..self.n_actions {
                write!(out, "{:.16e}", self.reward[s][a]).unwrap();
                for sp in 0..self.n_states {
                    write!(out, " {:.16e}", self.transition[s][a][sp]).unwrap();
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty MDP file".into()))?;
        let mut n_states = None;
        let mut n_actions = None;
        let mut gamma = None;
        for tok in header.split_whitespace() {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header token '{tok}'")))?;
            match key {
                "states" => {
                    n_states =
                        Some(value.parse::<usize>().map_err(|e| {
                            Error::Parse(format!("'{tok}': {e}"))
                        })?)
                }
                "actions" => {
                    n_actions =
                        Some(value.parse::<usize>().map_err(|e| {
                            Error::Parse(format!("'{tok}': {e}"))
                        })?)
                }
                "gamma" => gamma = Some(value.parse::<f64>().map_err(parse_err(tok))?),
                _ => return Err(Error::Parse(format!("unknown header key '{key}'"))),
            }
        }
        let (n, m, g) = match (n_states, n_actions, gamma) {
            (Some(n), Some(m), Some(g)) => (n, m, g),
            _ => return Err(Error::Parse("header must set states, actions, gamma".into())),
        };
        let mut transition = vec![vec![vec![0.0; n]; m]; n];
        let mut reward = vec![vec![0.0; m]; n];
        for s in 0..n {
            for a in 0..m {
                let line = lines.next().ok_or_else(|| {
                    Error::Parse(format!("missing line for state {s}, action {a}"))
                })?;
                let mut toks = line.split_whitespace();
                reward[s][a] = toks
                    .next()
                    .ok_or_else(|| Error::Parse(format!("empty line for ({s},{a})")))?
                    .parse::<f64>()
                    .map_err(parse_err(line))?;
                for sp in 0..n {
                    transition[s][a][sp] = toks
                        .next()
                        .ok_or_else(|| {
                            Error::Parse(format!("line ({s},{a}) has too few probabilities"))
                        })?
                        .parse::<f64>()
                        .map_err(parse_err(line))?;
                }
                if toks.next().is_some() {
                    return Err(Error::Parse(format!("line ({s},{a}) has trailing tokens")));
                }
            }
        }
        FiniteMdp::new(transition, reward, g)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

fn parse_err(context: &str) -> impl FnOnce(std::num::ParseFloatError) -> Error + '_ {
    move |e| Error::Parse(format!("'{context}': {e}"))
}

/// Stochastic policy as a `pi[s][a]` probability table.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTable {
    probs: Vec<Vec<f64>>,
}

impl PolicyTable {
    pub fn new(probs: Vec<Vec<f64>>) -> Result<Self> {
        for (s, row) in probs.iter().enumerate() {
            let mut sum = 0.0;
            for &p in row {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidArgument(format!(
                        "policy probability {p} out of [0,1] at state {s}"
                    )));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidArgument(format!(
                    "policy row {s} sums to {sum}"
                )));
            }
        }
        Ok(PolicyTable { probs })
    }

    /// Policy that always takes `action` in every state.
    pub fn deterministic(n_states: usize, n_actions: usize, action: usize) -> Result<Self> {
        if action >= n_actions {
            return Err(Error::InvalidArgument(format!(
                "action {action} out of range"
            )));
        }
        let mut probs = vec![vec![0.0; n_actions]; n_states];
        for row in &mut probs {
            row[action] = 1.0;
        }
        PolicyTable::new(probs)
    }

    pub fn uniform(n_states: usize, n_actions: usize) -> Self {
        let p = 1.0 / n_actions as f64;
        PolicyTable {
            probs: vec![vec![p; n_actions]; n_states],
        }
    }

    pub fn n_states(&self) -> usize {
        self.probs.len()
    }

    pub fn n_actions(&self) -> usize {
        self.probs.first().map(|r| r.len()).unwrap_or(0)
    }

    pub fn prob(&self, s: usize, a: usize) -> f64 {
        self.probs[s][a]
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.probs[s]
    }
}

/// Exact solution of a policy-evaluation problem.
#[derive(Debug, Clone)]
pub struct ExactSolution {
    /// State values `v[s]`.
    pub v: Vec<f64>,
    /// State-action values `q[s][a]`.
    pub q: Vec<Vec<f64>>,
    /// Stationary distribution of the induced chain.
    pub d: Vec<f64>,
}

fn check_dims(mdp: &FiniteMdp, policy: &PolicyTable) -> Result<()> {
    if policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions() {
        return Err(Error::DimensionMismatch(format!(
            "policy is {}x{}, MDP is {}x{}",
            policy.n_states(),
            policy.n_actions(),
            mdp.n_states(),
            mdp.n_actions()
        )));
    }
    Ok(())
}

/// Policy-induced transition matrix and reward vector:
/// `P[s][s'] = sum_a pi(a|s) p(s'|s,a)`, `r[s] = sum_a pi(a|s) r(s,a)`.
pub fn induced_dynamics(mdp: &FiniteMdp, policy: &PolicyTable) -> Result<(Mat, Vec<f64>)> {
    check_dims(mdp, policy)?;
    let n = mdp.n_states();
    let mut p = Mat::zeros(n, n);
    let mut r = vec![0.0; n];
    for s in 0..n {
        for a in 0..mdp.n_actions() {
            let w = policy.prob(s, a);
            if w == 0.0 {
                continue;
            }
            r[s] += w * mdp.reward(s, a);
            let row = mdp.transition_row(s, a);
            for sp in 0..n {
                p.set(s, sp, p.get(s, sp) + w * row[sp]);
            }
        }
    }
    Ok((p, r))
}

/// Stationary distribution of a row-stochastic matrix.
///
/// Damped power iteration (`d <- (d + dP) / 2`, which preserves the fixed
/// point and converges for any irreducible chain, periodic or not) with a
/// dense left-eigenvector fallback for small matrices. Failure of both is
/// reported as [`Error::NonErgodic`].
pub fn stationary_distribution(p: &Mat) -> Result<Vec<f64>> {
    let n = p.rows();
    if p.cols() != n {
        return Err(Error::DimensionMismatch("transition matrix not square".into()));
    }
    let mut d = vec![1.0 / n as f64; n];
    let cap = 1_000_000usize;
    for _ in 0..cap {
        let mut next = vec![0.0; n];
        for s in 0..n {
            let ds = d[s];
            if ds == 0.0 {
                continue;
            }
            let row = p.row(s);
            for sp in 0..n {
                next[sp] += ds * row[sp];
            }
        }
        let mut diff = 0.0;
        for s in 0..n {
            next[s] = 0.5 * (next[s] + d[s]);
            diff += (next[s] - d[s]).abs();
        }
        d = next;
        if diff < 1e-13 {
            let sum: f64 = d.iter().sum();
            for x in &mut d {
                *x /= sum;
            }
            return verify_stationary(p, d);
        }
    }
    if n <= 64 {
        if let Ok(d) = dense_stationary(p) {
            return verify_stationary(p, d);
        }
    }
    Err(Error::NonErgodic)
}

fn verify_stationary(p: &Mat, d: Vec<f64>) -> Result<Vec<f64>> {
    let n = p.rows();
    let mut dp = vec![0.0; n];
    for s in 0..n {
        let row = p.row(s);
        for sp in 0..n {
            dp[sp] += d[s] * row[sp];
        }
    }
    for s in 0..n {
        if (dp[s] - d[s]).abs() > 1e-10 || d[s] < -1e-12 {
            return Err(Error::NonErgodic);
        }
    }
    Ok(d)
}

/// Solves `d^T P = d^T`, `sum d = 1` as a dense linear system.
fn dense_stationary(p: &Mat) -> Result<Vec<f64>> {
    let n = p.rows();
    // Rows of (P^T - I), with the last equation replaced by normalization.
    let mut a = Mat::from_fn(n, n, |i, j| {
        p.get(j, i) - if i == j { 1.0 } else { 0.0 }
    });
    let mut b = vec![0.0; n];
    for j in 0..n {
        a.set(n - 1, j, 1.0);
    }
    b[n - 1] = 1.0;
    let d = linalg::lu_solve(&a, &b, "stationary system")?;
    if d.iter().any(|&x| x < -1e-9) {
        return Err(Error::NonErgodic);
    }
    Ok(d.into_iter().map(|x| x.max(0.0)).collect())
}

/// One application of the Bellman operator: `T v = r + gamma * P v`.
pub fn bellman_apply(mdp: &FiniteMdp, policy: &PolicyTable, v: &[f64]) -> Result<Vec<f64>> {
    check_dims(mdp, policy)?;
    if v.len() != mdp.n_states() {
        return Err(Error::DimensionMismatch(format!(
            "value vector length {} != {} states",
            v.len(),
            mdp.n_states()
        )));
    }
    let (p, r) = induced_dynamics(mdp, policy)?;
    let pv = p.matvec(v);
    Ok(r.iter()
        .zip(&pv)
        .map(|(ri, pvi)| ri + mdp.gamma() * pvi)
        .collect())
}

/// Exact `v`, `q`, and stationary distribution for a policy.
///
/// `v` solves `(I - gamma P) v = r` by a direct dense solve;
/// `q[s][a] = r(s,a) + gamma * sum_s' p(s'|s,a) v[s']`.
pub fn solve_exact(mdp: &FiniteMdp, policy: &PolicyTable) -> Result<ExactSolution> {
    check_dims(mdp, policy)?;
    let n = mdp.n_states();
    let (p, r) = induced_dynamics(mdp, policy)?;
    let a = Mat::from_fn(n, n, |i, j| {
        (if i == j { 1.0 } else { 0.0 }) - mdp.gamma() * p.get(i, j)
    });
    let v = linalg::lu_solve(&a, &r, "I - gamma*P")?;

    // Fixed-point residual guard.
    let tv = bellman_apply(mdp, policy, &v)?;
    let resid = v
        .iter()
        .zip(&tv)
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()));
    if resid > 1e-10 {
        return Err(Error::NonFinite(format!(
            "Bellman fixed-point residual {resid}"
        )));
    }

    let mut q = vec![vec![0.0; mdp.n_actions()]; n];
    for s in 0..n {
        for act in 0..mdp.n_actions() {
            let row = mdp.transition_row(s, act);
            let exp: f64 = row.iter().zip(&v).map(|(pi, vi)| pi * vi).sum();
            q[s][act] = mdp.reward(s, act) + mdp.gamma() * exp;
        }
    }
    let d = stationary_distribution(&p)?;
    Ok(ExactSolution { v, q, d })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Two-state deterministic cycle with reward 1 everywhere.
    pub fn two_cycle(gamma: f64) -> (FiniteMdp, PolicyTable) {
        let transition = vec![
            vec![vec![0.0, 1.0]],
            vec![vec![1.0, 0.0]],
        ];
        let reward = vec![vec![1.0], vec![1.0]];
        let mdp = FiniteMdp::new(transition, reward, gamma).unwrap();
        let policy = PolicyTable::deterministic(2, 1, 0).unwrap();
        (mdp, policy)
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::two_cycle;
    use super::*;
    use crate::seeding::stream_rng;
    use proptest::prelude::*;
    use rand::Rng;

    pub(crate) fn random_mdp(seed: u64, n: usize, m: usize, gamma: f64) -> FiniteMdp {
        let mut rng = stream_rng(seed, "random-mdp");
        let mut transition = vec![vec![vec![0.0; n]; m]; n];
        let mut reward = vec![vec![0.0; m]; n];
        for s in 0..n {
            for a in 0..m {
                let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
                let sum: f64 = raw.iter().sum();
                for sp in 0..n {
                    transition[s][a][sp] = raw[sp] / sum;
                }
                // Renormalize exactly.
                let s2: f64 = transition[s][a].iter().sum();
                transition[s][a][n - 1] += 1.0 - s2;
                reward[s][a] = rng.gen_range(-1.0..1.0);
            }
        }
        FiniteMdp::new(transition, reward, gamma).unwrap()
    }

    fn random_policy(seed: u64, n: usize, m: usize) -> PolicyTable {
        let mut rng = stream_rng(seed, "random-policy");
        let mut probs = vec![vec![0.0; m]; n];
        for row in probs.iter_mut() {
            let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            for a in 0..m {
                row[a] = raw[a] / sum;
            }
            let s2: f64 = row.iter().sum();
            row[m - 1] += 1.0 - s2;
        }
        PolicyTable::new(probs).unwrap()
    }

    #[test]
    fn induced_dynamics_two_cycle() {
        let (mdp, policy) = two_cycle(0.5);
        let (p, r) = induced_dynamics(&mdp, &policy).unwrap();
        assert_eq!(p.row(0), &[0.0, 1.0]);
        assert_eq!(p.row(1), &[1.0, 0.0]);
        assert_eq!(r, vec![1.0, 1.0]);
    }

    #[test]
    fn induced_dynamics_uniform_mix() {
        // Action 0 self-loops, action 1 moves forward; uniform policy halves each.
        let transition = vec![
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        ];
        let reward = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        let mdp = FiniteMdp::new(transition, reward, 0.9).unwrap();
        let policy = PolicyTable::uniform(2, 2);
        let (p, _) = induced_dynamics(&mdp, &policy).unwrap();
        assert_eq!(p.row(0), &[0.5, 0.5]);
    }

    #[test]
    fn induced_dynamics_matches_bruteforce() {
        let mdp = random_mdp(11, 5, 3, 0.9);
        let policy = random_policy(12, 5, 3);
        let (p, r) = induced_dynamics(&mdp, &policy).unwrap();
        for s in 0..5 {
            let mut r_ref = 0.0;
            for a in 0..3 {
                r_ref += policy.prob(s, a) * mdp.reward(s, a);
            }
            assert!((r[s] - r_ref).abs() < 1e-14);
            let mut row_sum = 0.0;
            for sp in 0..5 {
                let mut p_ref = 0.0;
                for a in 0..3 {
                    p_ref += policy.prob(s, a) * mdp.transition_row(s, a)[sp];
                }
                assert!((p.get(s, sp) - p_ref).abs() < 1e-14);
                row_sum += p.get(s, sp);
            }
            assert!((row_sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn stationary_two_cycle_and_lazy_chain() {
        let p = Mat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let d = stationary_distribution(&p).unwrap();
        assert!((d[0] - 0.5).abs() < 1e-10);
        assert!((d[1] - 0.5).abs() < 1e-10);

        let lazy = Mat::from_rows(&[vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
        let d = stationary_distribution(&lazy).unwrap();
        assert!((d[0] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn stationary_matches_dense_eigensolve() {
        let mdp = random_mdp(21, 6, 2, 0.9);
        let policy = random_policy(22, 6, 2);
        let (p, _) = induced_dynamics(&mdp, &policy).unwrap();
        let d = stationary_distribution(&p).unwrap();
        // Independent oracle: dense left-eigenvector via the linear system.
        let d_ref = dense_stationary(&p).unwrap();
        for s in 0..6 {
            assert!((d[s] - d_ref[s]).abs() < 1e-9, "state {s}: {} vs {}", d[s], d_ref[s]);
        }
        assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bellman_apply_cases() {
        let (mdp, policy) = two_cycle(0.5);
        // v = 0 returns r.
        let tv = bellman_apply(&mdp, &policy, &[0.0, 0.0]).unwrap();
        assert_eq!(tv, vec![1.0, 1.0]);
        // Hand-evaluated affine map.
        let tv = bellman_apply(&mdp, &policy, &[1.0, 2.0]).unwrap();
        assert_eq!(tv, vec![2.0, 1.5]);
        // Fixed point stays fixed.
        let sol = solve_exact(&mdp, &policy).unwrap();
        let tv = bellman_apply(&mdp, &policy, &sol.v).unwrap();
        for s in 0..2 {
            assert!((tv[s] - sol.v[s]).abs() < 1e-10);
        }
    }

    #[test]
    fn solve_exact_two_cycle_geometric() {
        let (mdp, policy) = two_cycle(0.5);
        let sol = solve_exact(&mdp, &policy).unwrap();
        assert!((sol.v[0] - 2.0).abs() < 1e-12);
        assert!((sol.v[1] - 2.0).abs() < 1e-12);
        assert!((sol.d[0] - 0.5).abs() < 1e-10);
        // q = r + gamma * v(next).
        assert!((sol.q[0][0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn solve_exact_zero_rewards() {
        let transition = vec![vec![vec![0.0, 1.0]], vec![vec![1.0, 0.0]]];
        let reward = vec![vec![0.0], vec![0.0]];
        let mdp = FiniteMdp::new(transition, reward, 0.5).unwrap();
        let policy = PolicyTable::deterministic(2, 1, 0).unwrap();
        let sol = solve_exact(&mdp, &policy).unwrap();
        assert_eq!(sol.v, vec![0.0, 0.0]);
        assert_eq!(sol.q, vec![vec![0.0], vec![0.0]]);
    }

    #[test]
    fn solve_exact_matches_value_iteration() {
        let mdp = random_mdp(31, 5, 3, 0.9);
        let policy = random_policy(32, 5, 3);
        let sol = solve_exact(&mdp, &policy).unwrap();
        // Independent oracle: value iteration to 1e-12.
        let mut v = vec![0.0; 5];
        for _ in 0..10_000 {
            let tv = bellman_apply(&mdp, &policy, &v).unwrap();
            let diff = v
                .iter()
                .zip(&tv)
                .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));
            v = tv;
            if diff < 1e-13 {
                break;
            }
        }
        for s in 0..5 {
            assert!((sol.v[s] - v[s]).abs() < 1e-10);
        }
    }

    #[test]
    fn stationary_ignores_rewards() {
        let mdp = random_mdp(41, 4, 2, 0.8);
        let policy = random_policy(42, 4, 2);
        let (p, _) = induced_dynamics(&mdp, &policy).unwrap();
        let d1 = stationary_distribution(&p).unwrap();
        // Same transitions, different rewards.
        let mut reward = vec![vec![0.0; 2]; 4];
        for (s, row) in reward.iter_mut().enumerate() {
            for (a, r) in row.iter_mut().enumerate() {
                *r = (s * 2 + a) as f64;
            }
        }
        let transition: Vec<Vec<Vec<f64>>> = (0..4)
            .map(|s| (0..2).map(|a| mdp.transition_row(s, a).to_vec()).collect())
            .collect();
        let mdp2 = FiniteMdp::new(transition, reward, 0.8).unwrap();
        let (p2, _) = induced_dynamics(&mdp2, &policy).unwrap();
        let d2 = stationary_distribution(&p2).unwrap();
        assert_eq!(d1, d2);
    }

    #[test]
    fn text_roundtrip_is_bitwise() {
        let mdp = random_mdp(51, 7, 3, 0.95);
        let text = mdp.to_text();
        let back = FiniteMdp::from_text(&text).unwrap();
        assert_eq!(mdp, back);
        // Exact bit equality of all floats.
        for s in 0..7 {
            for a in 0..3 {
                assert_eq!(mdp.reward(s, a).to_bits(), back.reward(s, a).to_bits());
                for sp in 0..7 {
                    assert_eq!(
                        mdp.transition_row(s, a)[sp].to_bits(),
                        back.transition_row(s, a)[sp].to_bits()
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad_rows = FiniteMdp::new(
            vec![vec![vec![0.5, 0.4]], vec![vec![1.0, 0.0]]],
            vec![vec![0.0], vec![0.0]],
            0.9,
        );
        assert!(bad_rows.is_err());
        let bad_gamma = FiniteMdp::new(
            vec![vec![vec![0.0, 1.0]], vec![vec![1.0, 0.0]]],
            vec![vec![0.0], vec![0.0]],
            1.0,
        );
        assert!(bad_gamma.is_err());
        assert!(bellman_apply(&two_cycle(0.5).0, &two_cycle(0.5).1, &[1.0]).is_err());
    }

    proptest! {
        // Bellman operator is a gamma-contraction in the max norm.
        #[test]
        fn bellman_is_gamma_contraction(
            seed in 0u64..500,
            v in proptest::collection::vec(-10.0f64..10.0, 5),
            u in proptest::collection::vec(-10.0f64..10.0, 5),
        ) {
            let mdp = random_mdp(seed, 5, 2, 0.9);
            let policy = random_policy(seed.wrapping_add(1), 5, 2);
            let tv = bellman_apply(&mdp, &policy, &v).unwrap();
            let tu = bellman_apply(&mdp, &policy, &u).unwrap();
            let lhs = tv.iter().zip(&tu).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            let rhs = v.iter().zip(&u).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            prop_assert!(lhs <= mdp.gamma() * rhs + 1e-12);
        }
    }
}
