//! The truncated Dyson functional against the brute-force time-grid oracle for a
//! few random controls, plus the Monte Carlo reference.
//!
//! Run with `cargo run --release --example dyson_oracle`.

use std::time::Instant;

use qns::dyson::{brute_force_oracle, expectation_functional, truncated_expectation};
use qns::montecarlo::monte_carlo_expectation;
use qns::rng;
use qns::spectra::ca_spectra_exact;
use qns::{DensityMatrix, DigitalControl, NoiseModel, Observable, RandomControlLaw};

fn main() -> qns::Result<()> {
    let (l, t) = (4, 3.2);
    let model = NoiseModel::modulated(0.02, 0.2, 1.0)?;
    let spectra = ca_spectra_exact(&model, l, t, 4)?;
    let rho = DensityMatrix::pauli_eigenstate(1, 1.0);
    let obs = Observable::pauli(1);
    for i in 0..3 {
        let control = DigitalControl::random(l, t, &RandomControlLaw::default(), &mut rng::stream(99, i))?;
        let mc = monte_carlo_expectation(&control, &model, &rho, &obs, 100_000, i)?;
        println!("control {i}: Monte Carlo {:.5} ± {:.5}", mc.mean, mc.std_error);
        for (k, grid) in [(2, 800), (4, 200)] {
            let engine = truncated_expectation(&expectation_functional(&control, &rho, &obs, k)?, &spectra)?;
            let start = Instant::now();
            let oracle = brute_force_oracle(&control, &model, &rho, &obs, k, grid)?;
            println!("  K={k}: engine {engine:.6}  oracle(n={grid}) {oracle:.6}  gap {:.1e}  ({:.1?})", (engine - oracle).abs(), start.elapsed());
        }
    }
    Ok(())
}
