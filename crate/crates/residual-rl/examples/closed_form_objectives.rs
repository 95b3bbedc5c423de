//! Closed-form MSVE / MSBE / MSPBE, the weighted projection, the TD fixed
//! point, and the MSBE minimizer on a two-state example where everything
//! can be checked by hand.
//!
//! ```text
//! cargo run --release -p residual-rl --example closed_form_objectives
//! ```

use residual_rl::env;
use residual_rl::mdp::{FiniteMdp, PolicyTable};
use residual_rl::objectives::{ExactObjectives, FeatureMap, LinearValueFn};

fn main() -> residual_rl::Result<()> {
    // Two-state cycle, gamma 0.5, true values v = (2, 2); a single feature
    // column (1; 2) that cannot represent the constant function.
    let mdp = FiniteMdp::new(
        vec![vec![vec![0.0, 1.0]], vec![vec![1.0, 0.0]]],
        vec![vec![1.0], vec![1.0]],
        0.5,
    )?;
    let policy = PolicyTable::deterministic(2, 1, 0)?;
    let features = FeatureMap::from_rows(&[vec![1.0], vec![2.0]])?;
    let obj = ExactObjectives::on_policy(&mdp, &policy)?;

    println!(" w      MSVE     MSBE     MSPBE");
    for i in 0..=10 {
        let w = i as f64 * 0.2;
        println!(
            "{w:4.1}  {:7.4}  {:7.4}  {:8.5}",
            obj.msve(&features, &[w])?,
            obj.msbe(&features, &[w])?,
            obj.mspbe(&features, &[w])?
        );
    }

    let w_td = obj.td_fixed_point(&features)?;
    println!(
        "TD fixed point w* = {:.6}, MSPBE(w*) = {:.3e}",
        w_td.weights[0],
        obj.mspbe(&features, &w_td.weights)?
    );

    let min = obj.msbe_minimizer(&features)?;
    println!(
        "MSBE minimizer w = {:.6} (analytic 2/3), MSBE = {:.6}, rank_deficient = {}",
        min.weights.weights[0],
        obj.msbe(&features, &min.weights.weights)?,
        min.rank_deficient
    );

    // Projection of the true value function onto the feature span.
    let proj = obj.project(&features, &[2.0, 2.0])?;
    println!("projection of v onto span(X) = {proj:?} (closed form: 1.2, 2.4)");

    // MSBE upper-bounds MSPBE everywhere; spot-check on random problems.
    let mut worst_gap = f64::INFINITY;
    for seed in 0..200 {
        let d = env::random_chain(5, 2, 3, seed)?;
        let o = ExactObjectives::on_policy(&d.mdp, &d.target)?;
        let w = LinearValueFn::new(vec![0.3, -0.8, 1.1])?;
        let gap = o.msbe(&d.features, &w.weights)? - o.mspbe(&d.features, &w.weights)?;
        worst_gap = worst_gap.min(gap);
    }
    println!("min over 200 random problems of MSBE - MSPBE = {worst_gap:.3e} (never negative)");
    Ok(())
}
