//! Predicting ⟨σx⟩ for random four-pulse controls from CA spectra (K=2, K=4) and
//! from comb-derived spectra at three resolutions, against the exact dynamics.
//!
//! Run with `cargo run --release --example predict_random [count] [Ω label]`.

use std::f64::consts::PI;
use std::time::Instant;

use qns::comb::{comb_to_ca_spectra, sample_polyspectra, ReconstructionOptions};
use qns::predict::{predict_random, summarize, Predictor};
use qns::spectra::ca_spectra_exact;
use qns::{DensityMatrix, NoiseModel, Observable, RandomControlLaw};

fn main() -> qns::Result<()> {
    let count: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10_000);
    let (gamma, t, l) = (0.02, 3.2, 4);
    let label: f64 = std::env::args().nth(2).and_then(|a| a.parse().ok()).unwrap_or(6.25);
    let model = NoiseModel::new(gamma, 30.0 * gamma, label / (2.0 * PI))?;
    let exact = ca_spectra_exact(&model, l, t, 4)?;
    let omega_max = 6.5 / (2.0 * PI);
    let combs = [("comb-coarse", 10), ("comb-middle", 15), ("comb-fine", 47)]
        .map(|(label, m)| -> qns::Result<_> {
            let grid = sample_polyspectra(&model, omega_max / m as f64, m, 20, None)?;
            Ok((label, comb_to_ca_spectra(&grid, l, t, &ReconstructionOptions::default())?))
        });
    let mut predictors = vec![
        Predictor { label: "CA K=2".into(), spectra: &exact, order: 2 },
        Predictor { label: "CA K=4".into(), spectra: &exact, order: 4 },
    ];
    let combs: Vec<_> = combs.into_iter().collect::<qns::Result<_>>()?;
    for (label, s) in &combs {
        predictors.push(Predictor { label: format!("{label} K=4"), spectra: s, order: 4 });
    }
    let start = Instant::now();
    let rows = predict_random(
        &model,
        l,
        t,
        count,
        &RandomControlLaw::default(),
        &DensityMatrix::pauli_eigenstate(2, 1.0),
        &Observable::pauli(1),
        &predictors,
        7,
    )?;
    println!("{count} controls in {:.1?}", start.elapsed());
    for s in summarize(&rows, &predictors, 0.1) {
        println!("  {:<16} P(|err| < 0.1) = {:.3}   mean |err| = {:.3}", s.label, s.fraction_below, s.mean_abs_error);
    }
    Ok(())
}
