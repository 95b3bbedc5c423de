//! Exact finite-MDP machinery: induced dynamics, stationary distribution,
//! Bellman operator, closed-form values, and the plain-text file format.
//!
//! ```text
//! cargo run --release -p residual-rl --example exact_mdp
//! ```

use residual_rl::env;
use residual_rl::mdp::{
    bellman_apply, induced_dynamics, solve_exact, stationary_distribution, FiniteMdp, PolicyTable,
};

fn main() -> residual_rl::Result<()> {
    // A two-state cycle: s0 -> s1 -> s0, reward 1 per step, gamma = 0.5.
    // The discounted return is the geometric series 1 / (1 - gamma) = 2.
    let mdp = FiniteMdp::new(
        vec![vec![vec![0.0, 1.0]], vec![vec![1.0, 0.0]]],
        vec![vec![1.0], vec![1.0]],
        0.5,
    )?;
    let policy = PolicyTable::deterministic(2, 1, 0)?;

    let (p, r) = induced_dynamics(&mdp, &policy)?;
    println!("P = [{:?}, {:?}], r = {:?}", p.row(0), p.row(1), r);

    let d = stationary_distribution(&p)?;
    println!("stationary d = {d:?}");

    let sol = solve_exact(&mdp, &policy)?;
    println!("v = {:?} (geometric series gives 2)", sol.v);

    // The value function is the Bellman operator's fixed point.
    let tv = bellman_apply(&mdp, &policy, &sol.v)?;
    println!("T v = {tv:?}");

    // Round-trip through the text format is lossless.
    let text = mdp.to_text();
    println!("--- serialized ---\n{text}------------------");
    let back = FiniteMdp::from_text(&text)?;
    assert_eq!(mdp, back);
    println!("text round-trip: exact");

    // The same machinery on a random ergodic chain.
    let diag = env::random_chain(6, 3, 4, 7)?;
    let sol = solve_exact(&diag.mdp, &diag.target)?;
    println!(
        "random 6-state chain: v[0] = {:.6}, d sums to {:.12}",
        sol.v[0],
        sol.d.iter().sum::<f64>()
    );
    Ok(())
}
