//! Comb-based spectroscopy at three resolutions: resource counts and how well the
//! reconstructed CA spectra match the exact ones.
//!
//! All three grids share the cutoff `m_max·ω0 ≈ 1.03 rad/μs`. A fourth, wider grid
//! shows that a broadband model is limited by that cutoff and not by the method.
//!
//! Run with `cargo run --release --example comb_baseline`.

use std::f64::consts::PI;

use qns::comb::{comb_to_ca_spectra, delta_tau, principal_domain_and_count, sample_polyspectra, ReconstructionOptions};
use qns::spectra::ca_spectra_exact;
use qns::NoiseModel;

fn main() -> qns::Result<()> {
    let t = 3.2;
    let models = [
        ("modulated", NoiseModel::modulated(0.02, 0.6, 6.25 / (2.0 * PI))?),
        ("broadband", NoiseModel::telegraph(0.1, 0.3)?),
    ];
    let grids = [
        ("coarse", 6.5 / (2.0 * PI * 10.0), 10),
        ("middle", 6.5 / (2.0 * PI * 15.0), 15),
        ("fine", 6.5 / (2.0 * PI * 47.0), 47),
        ("wide", 0.2, 47),
    ];
    for (name, model) in &models {
        let exact = ca_spectra_exact(model, 4, t, 4)?;
        println!("{name}: γ={} g={} Ω={:.4} rad/μs", model.gamma(), model.g(), model.omega());
        for (label, omega0, m_max) in grids {
            let grid = sample_polyspectra(model, omega0, m_max, 20, None)?;
            let comb = comb_to_ca_spectra(&grid, 4, t, &ReconstructionOptions::default())?;
            let err = comb.relative_errors(&exact)?;
            let (_, count) = principal_domain_and_count(m_max)?;
            println!(
                "  {label:>6}: m_max={m_max:>2} ω0={omega0:.4} settings={count:>5} Δτ={:.3} μs  rel.err k=2 {:.2e}  k=4 {:.2e}",
                delta_tau(100.0, 20, m_max),
                err[&2],
                err[&4],
            );
        }
    }
    Ok(())
}
