//! Noise-tailored decoupling at three modulation frequencies: optimize four pulses
//! against exact CA spectra truncated at K=2 and K=4, then score the winners and
//! CPMG on the untruncated dynamics.
//!
//! Run with `cargo run --release --example optimize_dd`.

use std::f64::consts::PI;
use std::time::Instant;

use qns::exact::exact_fidelity;
use qns::optimize::{optimize_dd, OptimizeConfig};
use qns::spectra::ca_spectra_exact;
use qns::{DigitalControl, NoiseModel};

fn main() -> qns::Result<()> {
    let (gamma, t, l) = (0.02, 3.2, 4);
    let g = 30.0 * gamma;
    let config = OptimizeConfig { mc_trajectories: 20_000, ..Default::default() };
    for label in [0.0, 6.25, 12.5] {
        let model = NoiseModel::new(gamma, g, label / (2.0 * PI))?;
        let spectra = ca_spectra_exact(&model, l, t, 4)?;
        let cpmg = exact_fidelity(&DigitalControl::cpmg(l, t)?, &model);
        println!("Ω = {label}/2π rad/μs: CPMG true fidelity {cpmg:.4}");
        for k in [2, 4] {
            let start = Instant::now();
            let r = optimize_dd(&spectra, k, l, t, &config, Some(&model))?;
            let yz: Vec<String> = r.best_control.yz().iter().map(|v| format!("{v:+.3}")).collect();
            println!(
                "  K={k}: model {:.4} (CPMG {:.4})  true {:.4} ± {:.4}  exact {:.4}  y_z [{}]  ({:.1?})",
                r.best_fidelity_model,
                r.cpmg_fidelity_model.unwrap_or(f64::NAN),
                r.best_fidelity_true.map_or(f64::NAN, |e| e.mean),
                r.best_fidelity_true.map_or(f64::NAN, |e| e.std_error),
                r.best_fidelity_exact.unwrap_or(f64::NAN),
                yz.join(" "),
                start.elapsed()
            );
        }
    }
    Ok(())
}
