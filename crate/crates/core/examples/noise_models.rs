//! Telegraph noise statistics: analytic moments, PSD and trispectrum samples, and a
//! sampled ensemble checked against them.
//!
//! Run with `cargo run --release --example noise_models`.

use qns::{rng, NoiseModel};

fn main() -> qns::Result<()> {
    let plain = NoiseModel::telegraph(0.02, 0.6)?;
    let modulated = NoiseModel::modulated(0.02, 0.6, 0.9947)?;

    for (name, m) in [("plain", &plain), ("modulated", &modulated)] {
        println!("{name}: γ={} g={} Ω={}", m.gamma(), m.g(), m.omega());
        println!("  ⟨β(2)β(0)⟩ = {:.6}", m.moment(&[2.0, 0.0])?);
        println!("  ⟨β(3)β(2)β(1)β(0)⟩ = {:.6}", m.moment(&[3.0, 2.0, 1.0, 0.0])?);
        println!("  C4(3,2,1,0) = {:.3e}", m.cumulant(&[3.0, 2.0, 1.0, 0.0])?);
        for w in [0.0, 0.5, 0.9947, 2.0] {
            println!("  S1({w:.4}) = {:>10.4}   S3({w:.4},0,0) = {:>12.4}", m.psd(w), m.trispectrum(w, 0.0, 0.0));
        }
    }

    // sampled ξ(t)ξ(0) against e^{−2γt}
    let mut r = rng::stream(1, 0);
    let n = 200_000;
    let lag = 25.0;
    let mut acc = 0.0;
    let mut switches = 0usize;
    for _ in 0..n {
        let tr = plain.sample_trajectory(lag, &mut r)?;
        acc += tr.sign_at(lag) * tr.sign_at(0.0);
        switches += tr.switch_times.len();
    }
    println!(
        "sampled ⟨ξ({lag})ξ(0)⟩ = {:.4} (analytic {:.4}), mean switches {:.4} (γt = {})",
        acc / n as f64,
        (-2.0 * plain.gamma() * lag).exp(),
        switches as f64 / n as f64,
        plain.gamma() * lag
    );
    Ok(())
}
