//! Closed-form objectives for linear policy evaluation.
//!
//! With features `X`, weights `w`, value estimate `v = X w`, stationary
//! distribution `d`, and Bellman operator `T`, this module computes exactly:
//!
//! - `MSVE(w)  = || v - v_true ||^2_d`
//! - `MSBE(w)  = || v - T v ||^2_d`
//! - `MSPBE(w) = || v - Proj T v ||^2_d`
//!
//! where `Proj` is the d-weighted projection onto the column space of `X`,
//! plus the TD fixed point (`MSPBE = 0`) and the MSBE minimizer, both as
//! direct linear-algebra solves. These are the oracles the incremental
//! learners in [`crate::linear`] are tested against, so everything here is
//! dense, double precision, and non-iterative.
//!
//! The state weighting defaults to the stationary distribution of the
//! evaluated policy. For off-policy diagnostics, [`ExactObjectives`] accepts
//! an explicit weighting (the behavior policy's stationary distribution)
//! while the Bellman operator stays that of the target policy, which is the
//! objective an off-policy learner actually descends.

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, WlsSolution};
use crate::mdp::{self, FiniteMdp, PolicyTable};

/// State-feature matrix, one row per state.
#[derive(Debug, Clone)]
pub struct FeatureMap {
    features: Mat,
    full_rank: bool,
}

impl FeatureMap {
    pub fn new(features: Mat) -> Result<Self> {
        if features.rows() == 0 || features.cols() == 0 {
            return Err(Error::InvalidArgument("empty feature matrix".into()));
        }
        if features.data().iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("feature matrix".into()));
        }
        // Column rank via the spectrum of X^T X.
        let xtx = features.transpose().matmul(&features);
        let (eigvals, _) = linalg::symmetric_eigen(&xtx)?;
        let max_eig = eigvals.first().copied().unwrap_or(0.0);
        let full_rank = eigvals
            .iter()
            .all(|&l| l > max_eig * 1e-12 && l > 0.0);
        Ok(FeatureMap { features, full_rank })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        FeatureMap::new(Mat::from_rows(rows)?)
    }

    /// Identity features: one indicator per state.
    pub fn tabular(n_states: usize) -> Self {
        FeatureMap {
            features: Mat::identity(n_states),
            full_rank: true,
        }
    }

    pub fn n_states(&self) -> usize {
        self.features.rows()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn full_rank(&self) -> bool {
        self.full_rank
    }

    pub fn matrix(&self) -> &Mat {
        &self.features
    }

    /// Feature vector of one state.
    pub fn row(&self, s: usize) -> &[f64] {
        self.features.row(s)
    }

    /// `v = X w`.
    pub fn values(&self, w: &[f64]) -> Vec<f64> {
        self.features.matvec(w)
    }
}

/// Weight vector of a linear value function.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearValueFn {
    pub weights: Vec<f64>,
}

impl LinearValueFn {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("weights".into()));
        }
        Ok(LinearValueFn { weights })
    }

    pub fn zeros(dim: usize) -> Self {
        LinearValueFn { weights: vec![0.0; dim] }
    }
}

/// MSBE minimizer with a rank-deficiency warning flag.
#[derive(Debug, Clone)]
pub struct MsbeMinimizer {
    pub weights: LinearValueFn,
    /// Set when `(I - gamma P) X` was rank deficient and the minimum-norm
    /// minimizer was returned.
    pub rank_deficient: bool,
}

/// Precomputed exact quantities for one (MDP, target policy, weighting).
#[derive(Debug, Clone)]
pub struct ExactObjectives {
    p: Mat,
    r: Vec<f64>,
    gamma: f64,
    /// State weighting used by all norms.
    dist: Vec<f64>,
    /// True value function of the target policy.
    v_true: Vec<f64>,
}

impl ExactObjectives {
    /// On-policy: weighting is the stationary distribution of `policy`.
    pub fn on_policy(mdp: &FiniteMdp, policy: &PolicyTable) -> Result<Self> {
        let (p, _) = mdp::induced_dynamics(mdp, policy)?;
        let dist = mdp::stationary_distribution(&p)?;
        Self::with_weights(mdp, policy, dist)
    }

    /// Explicit weighting: the Bellman operator belongs to `policy`, the
    /// norm weighting (e.g. a behavior policy's stationary distribution) is
    /// supplied by the caller.
    pub fn with_weights(mdp: &FiniteMdp, policy: &PolicyTable, dist: Vec<f64>) -> Result<Self> {
        if dist.len() != mdp.n_states() {
            return Err(Error::DimensionMismatch("weighting length".into()));
        }
        if dist.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::InvalidArgument("weighting must be nonnegative".into()));
        }
        let (p, r) = mdp::induced_dynamics(mdp, policy)?;
        let v_true = mdp::solve_exact(mdp, policy)?.v;
        Ok(ExactObjectives {
            p,
            r,
            gamma: mdp.gamma(),
            dist,
            v_true,
        })
    }

    pub fn weighting(&self) -> &[f64] {
        &self.dist
    }

    pub fn v_true(&self) -> &[f64] {
        &self.v_true
    }

    fn check_features(&self, x: &FeatureMap) -> Result<()> {
        if x.n_states() != self.r.len() {
            return Err(Error::DimensionMismatch(format!(
                "feature map has {} states, MDP has {}",
                x.n_states(),
                self.r.len()
            )));
        }
        Ok(())
    }

    fn check_weights(&self, x: &FeatureMap, w: &[f64]) -> Result<()> {
        self.check_features(x)?;
        if w.len() != x.dim() {
            return Err(Error::DimensionMismatch(format!(
                "weight vector length {} != feature dim {}",
                w.len(),
                x.dim()
            )));
        }
        Ok(())
    }

    /// `T v` for an arbitrary value vector.
    fn bellman(&self, v: &[f64]) -> Vec<f64> {
        let pv = self.p.matvec(v);
        self.r
            .iter()
            .zip(&pv)
            .map(|(ri, pvi)| ri + self.gamma * pvi)
            .collect()
    }

    pub fn msve(&self, x: &FeatureMap, w: &[f64]) -> Result<f64> {
        self.check_weights(x, w)?;
        let v = x.values(w);
        let diff: Vec<f64> = v.iter().zip(&self.v_true).map(|(a, b)| a - b).collect();
        Ok(linalg::weighted_sq_norm(&diff, &self.dist))
    }

    /// d-weighted projection of `v` onto the column space of the features.
    pub fn project(&self, x: &FeatureMap, v: &[f64]) -> Result<Vec<f64>> {
        self.check_features(x)?;
        if v.len() != self.r.len() {
            return Err(Error::DimensionMismatch("projection input length".into()));
        }
        let sol = linalg::weighted_least_squares(x.matrix(), &self.dist, v)?;
        Ok(x.values(&sol.weights))
    }

    pub fn msbe(&self, x: &FeatureMap, w: &[f64]) -> Result<f64> {
        self.check_weights(x, w)?;
        let v = x.values(w);
        let tv = self.bellman(&v);
        let diff: Vec<f64> = v.iter().zip(&tv).map(|(a, b)| a - b).collect();
        Ok(linalg::weighted_sq_norm(&diff, &self.dist))
    }

    pub fn mspbe(&self, x: &FeatureMap, w: &[f64]) -> Result<f64> {
        self.check_weights(x, w)?;
        let v = x.values(w);
        let tv = self.bellman(&v);
        let ptv = self.project(x, &tv)?;
        let diff: Vec<f64> = v.iter().zip(&ptv).map(|(a, b)| a - b).collect();
        Ok(linalg::weighted_sq_norm(&diff, &self.dist))
    }

    /// Design matrix `(I - gamma P) X` of the Bellman-residual least squares.
    fn residual_design(&self, x: &FeatureMap) -> Mat {
        let n = self.r.len();
        let i_minus_gp = Mat::from_fn(n, n, |i, j| {
            (if i == j { 1.0 } else { 0.0 }) - self.gamma * self.p.get(i, j)
        });
        i_minus_gp.matmul(x.matrix())
    }

    /// TD fixed point: solves `A w = b` with
    /// `A = X^T D (I - gamma P) X`, `b = X^T D r`.
    pub fn td_fixed_point(&self, x: &FeatureMap) -> Result<LinearValueFn> {
        self.check_features(x)?;
        let d = x.dim();
        let xt = x.matrix().transpose();
        let design = self.residual_design(x);
        // A = X^T D design, b = X^T D r.
        let mut a = Mat::zeros(d, d);
        let mut b = vec![0.0; d];
        for s in 0..self.r.len() {
            let wgt = self.dist[s];
            if wgt == 0.0 {
                continue;
            }
            for i in 0..d {
                let xi = xt.get(i, s) * wgt;
                b[i] += xi * self.r[s];
                for j in 0..d {
                    a.set(i, j, a.get(i, j) + xi * design.get(s, j));
                }
            }
        }
        let w = linalg::lu_solve(&a, &b, "A = X^T D (I - gamma P) X")?;
        LinearValueFn::new(w)
    }

    /// Minimizer of MSBE via weighted least squares on
    /// `|| (I - gamma P) X w - r ||^2_d`.
    pub fn msbe_minimizer(&self, x: &FeatureMap) -> Result<MsbeMinimizer> {
        self.check_features(x)?;
        let design = self.residual_design(x);
        let WlsSolution { weights, rank_deficient } =
            linalg::weighted_least_squares(&design, &self.dist, &self.r)?;
        Ok(MsbeMinimizer {
            weights: LinearValueFn::new(weights)?,
            rank_deficient,
        })
    }

    /// Analytic MSBE gradient from the quadratic form:
    /// `grad = 2 M^T D (M w - r)` with `M = (I - gamma P) X`.
    pub fn msbe_gradient(&self, x: &FeatureMap, w: &[f64]) -> Result<Vec<f64>> {
        self.check_weights(x, w)?;
        let design = self.residual_design(x);
        let mw = design.matvec(w);
        let d = x.dim();
        let mut grad = vec![0.0; d];
        for s in 0..self.r.len() {
            let resid = self.dist[s] * (mw[s] - self.r[s]);
            for i in 0..d {
                grad[i] += 2.0 * design.get(s, i) * resid;
            }
        }
        Ok(grad)
    }

    /// Analytic MSPBE gradient.
    ///
    /// With `A = X^T D (I - gamma P) X`, `b = X^T D r`, `C = X^T D X`:
    /// `MSPBE(w) = (b - A w)^T C^{-1} (b - A w)` and
    /// `grad = -2 A^T C^{-1} (b - A w)`. Requires full-rank features.
    pub fn mspbe_gradient(&self, x: &FeatureMap, w: &[f64]) -> Result<Vec<f64>> {
        self.check_weights(x, w)?;
        let d = x.dim();
        let design = self.residual_design(x);
        let mut a = Mat::zeros(d, d);
        let mut b = vec![0.0; d];
        let mut c = Mat::zeros(d, d);
        let xm = x.matrix();
        for s in 0..self.r.len() {
            let wgt = self.dist[s];
            if wgt == 0.0 {
                continue;
            }
            for i in 0..d {
                let xi = xm.get(s, i) * wgt;
                b[i] += xi * self.r[s];
                for j in 0..d {
                    a.set(i, j, a.get(i, j) + xi * design.get(s, j));
                    c.set(i, j, c.get(i, j) + xi * xm.get(s, j));
                }
            }
        }
        let aw = a.matvec(w);
        let resid: Vec<f64> = b.iter().zip(&aw).map(|(bi, awi)| bi - awi).collect();
        let cinv_resid = linalg::lu_solve(&c, &resid, "C = X^T D X")?;
        let at = a.transpose();
        Ok(at.matvec(&cinv_resid).iter().map(|g| -2.0 * g).collect())
    }
}

/// `MSVE(w)` under the stationary distribution of `policy`.
pub fn msve(mdp: &FiniteMdp, policy: &PolicyTable, x: &FeatureMap, w: &LinearValueFn) -> Result<f64> {
    ExactObjectives::on_policy(mdp, policy)?.msve(x, &w.weights)
}

/// d-weighted projection of `v` onto the feature span.
pub fn project(mdp: &FiniteMdp, policy: &PolicyTable, x: &FeatureMap, v: &[f64]) -> Result<Vec<f64>> {
    ExactObjectives::on_policy(mdp, policy)?.project(x, v)
}

/// `MSBE(w)` under the stationary distribution of `policy`.
pub fn msbe(mdp: &FiniteMdp, policy: &PolicyTable, x: &FeatureMap, w: &LinearValueFn) -> Result<f64> {
    ExactObjectives::on_policy(mdp, policy)?.msbe(x, &w.weights)
}

/// `MSPBE(w)` under the stationary distribution of `policy`.
pub fn mspbe(mdp: &FiniteMdp, policy: &PolicyTable, x: &FeatureMap, w: &LinearValueFn) -> Result<f64> {
    ExactObjectives::on_policy(mdp, policy)?.mspbe(x, &w.weights)
}

/// The weight vector at which on-policy linear TD converges (MSPBE = 0).
pub fn td_fixed_point(mdp: &FiniteMdp, policy: &PolicyTable, x: &FeatureMap) -> Result<LinearValueFn> {
    ExactObjectives::on_policy(mdp, policy)?.td_fixed_point(x)
}

/// Closed-form minimizer of MSBE.
pub fn msbe_minimizer(mdp: &FiniteMdp, policy: &PolicyTable, x: &FeatureMap) -> Result<MsbeMinimizer> {
    ExactObjectives::on_policy(mdp, policy)?.msbe_minimizer(x)
}
