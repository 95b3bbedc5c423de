//! Verifies the network engine's exact gradients against central finite
//! differences: parameter gradients, input gradients (the ones the
//! deterministic policy gradient chains through), Huber derivatives, and a
//! hand-checked Adam step.
//!
//! ```text
//! cargo run --release -p residual-rl --example gradient_check
//! ```

use rand::Rng;
use residual_rl::nn::{huber, Activation, Mlp, Optimizer};
use residual_rl::seeding::stream_rng;

fn main() -> residual_rl::Result<()> {
    let mut rng = stream_rng(0, "gradient-check");
    let h = 1e-5;
    let mut worst_param: f64 = 0.0;
    let mut worst_input: f64 = 0.0;

    for case in 0..50 {
        let sizes = [
            rng.gen_range(2..5usize),
            rng.gen_range(3..8),
            rng.gen_range(3..8),
            rng.gen_range(1..3),
        ];
        let hidden = if case % 2 == 0 { Activation::Tanh } else { Activation::Relu };
        let mut net = Mlp::new(&sizes, hidden, Activation::Linear, &mut rng)?;
        for i in 0..net.params().len() {
            net.params_mut()[i] = rng.gen_range(-0.8..0.8);
        }
        let input: Vec<f64> = (0..sizes[0]).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let cot: Vec<f64> = (0..sizes[3]).map(|_| rng.gen_range(-1.0..1.0)).collect();

        let cache = net.forward_cached(&input)?;
        let (pg, ig) = net.backward(&cache, &cot)?;
        let scalar = |net: &Mlp, x: &[f64]| -> f64 {
            net.forward(x).unwrap().iter().zip(&cot).map(|(y, c)| y * c).sum()
        };

        for i in (0..net.params().len()).step_by(5) {
            let mut plus = net.clone();
            let mut minus = net.clone();
            plus.params_mut()[i] += h;
            minus.params_mut()[i] -= h;
            let fd = (scalar(&plus, &input) - scalar(&minus, &input)) / (2.0 * h);
            if fd.abs().max(pg[i].abs()) > 1e-10 {
                worst_param =
                    worst_param.max((fd - pg[i]).abs() / fd.abs().max(pg[i].abs()));
            }
        }
        for i in 0..input.len() {
            let mut xp = input.clone();
            let mut xm = input.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (scalar(&net, &xp) - scalar(&net, &xm)) / (2.0 * h);
            if fd.abs().max(ig[i].abs()) > 1e-10 {
                worst_input = worst_input.max((fd - ig[i]).abs() / fd.abs().max(ig[i].abs()));
            }
        }
    }
    println!("50 random networks (tanh/relu hidden, sampled coordinates):");
    println!("  worst parameter-gradient relative error: {worst_param:.2e}");
    println!("  worst input-gradient relative error:     {worst_input:.2e}");
    assert!(worst_param < 1e-4 && worst_input < 1e-4);

    // Huber loss: quadratic inside, linear outside, derivative clamped.
    for r in [-3.0, -1.0, -0.4, 0.0, 0.4, 1.0, 3.0] {
        let (loss, grad) = huber(r, 1.0);
        println!("huber(r = {r:4.1}, delta = 1) = ({loss:.3}, {grad:+.1})");
    }

    // One Adam step from fresh state: lr-scaled, sign-normalized.
    let mut params = vec![0.0];
    let mut opt = Optimizer::adam(0.01, 1);
    opt.step(&mut params, &[0.37]);
    println!("first Adam step with grad 0.37, lr 0.01: delta = {:.6}", params[0]);
    Ok(())
}
