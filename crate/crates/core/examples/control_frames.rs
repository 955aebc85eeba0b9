//! Digital controls in the window frame: CPMG, free evolution and a random sequence,
//! their switching functions and frequency-domain filter functions.
//!
//! Run with `cargo run --release --example control_frames`.

use qns::{rng, DigitalControl, RandomControlLaw};

fn main() -> qns::Result<()> {
    let (l, t) = (4, 3.2);
    let random = DigitalControl::random(l, t, &RandomControlLaw::default(), &mut rng::stream(5, 0))?;
    for (name, c) in [
        ("free evolution", DigitalControl::free_evolution(l, t)?),
        ("CPMG", DigitalControl::cpmg(l, t)?),
        ("random", random),
    ] {
        println!("{name}");
        for (n, (p, y)) in c.pulses().iter().zip(c.switching()).enumerate() {
            let [theta, polar, azimuth] = p.angles();
            println!(
                "  window {}: pulse θ={theta:.3} axis=({polar:.3}, {azimuth:.3})  y = ({:+.3}, {:+.3}, {:+.3})",
                n + 1,
                y[0],
                y[1],
                y[2]
            );
        }
        let ff: Vec<String> = [0.0, 1.0, 2.0, 4.0]
            .iter()
            .map(|&w| {
                let f = c.frequency_ff(w);
                format!("|Fz({w})|={:.3}", f[2].norm())
            })
            .collect();
        println!("  {}", ff.join("  "));
        println!("  net unitary trace = {:.3}", c.net_unitary().trace());
    }
    Ok(())
}
