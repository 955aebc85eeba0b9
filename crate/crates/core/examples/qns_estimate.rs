//! Noise spectroscopy: design the K=2 and K=4 protocols, measure with Monte Carlo,
//! invert, and compare against exact CA spectra.
//!
//! Run with `cargo run --release --example qns_estimate`.

use qns::montecarlo::monte_carlo_expectation;
use qns::qns::{design_protocol, estimate_ca_spectra, propagate_errors, synthetic_measurements, DesignOptions, UnknownSet};
use qns::spectra::ca_spectra_exact;
use qns::NoiseModel;

fn main() -> qns::Result<()> {
    let (l, t) = (4, 3.2);
    let model = NoiseModel::telegraph(0.02, 0.2)?;
    for k in [2, 4] {
        let unknowns = UnknownSet::for_truncation(l, k)?;
        let design = design_protocol(&unknowns, t, &DesignOptions::default(), 10 + k as u64)?;
        let truth = ca_spectra_exact(&model, l, t, k)?;
        println!("K={k}: {} settings, condition {:.2e}", design.settings.len(), design.condition);

        let ideal = estimate_ca_spectra(&design, &synthetic_measurements(&design, &truth)?, 0.0)?;
        println!("  noiseless round trip, relative errors {:?}", ideal.errors_against(&truth)?);

        let est: Vec<_> = design
            .settings
            .iter()
            .enumerate()
            .map(|(i, s)| monte_carlo_expectation(&s.control, &model, &s.rho0, &s.observable, 50_000, 100 + i as u64))
            .collect::<qns::Result<_>>()?;
        let measured: Vec<f64> = est.iter().map(|e| e.mean).collect();
        let sigma = propagate_errors(&design, &est.iter().map(|e| e.std_error).collect::<Vec<_>>())?;
        let noisy = estimate_ca_spectra(&design, &measured, 0.0)?;
        println!("  Monte Carlo data, relative errors {:?}", noisy.errors_against(&truth)?);
        for (key, s) in design.keys.iter().zip(&sigma).take(5) {
            println!("    {:?}: {:+.5} ± {:.5}", key.n, noisy.spectra.get(key).unwrap_or(0.0), s);
        }
    }
    Ok(())
}
