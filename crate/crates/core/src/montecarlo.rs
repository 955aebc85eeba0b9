//! Exact reference dynamics by averaging over sampled noise trajectories.
//!
//! Within a window `β(t)σ_z` commutes with itself, so each window contributes a
//! single phase `exp(−iΦσ_z)` with `Φ = ∫β` evaluated in closed form.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::DigitalControl;
use crate::error::{QnsError, Result};
use crate::noise::{NoiseModel, Trajectory};
use crate::pauli::{sigma, z_phase, DensityMatrix, Mat2, Observable};
use crate::rng;

/// Trajectories per seeded block; fixes the reduction order independent of threads.
const BLOCK: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    /// Whether `value` lies within `sigmas` standard errors (plus a tiny absolute slack).
    pub fn contains(&self, value: f64, sigmas: f64) -> bool {
        (self.mean - value).abs() <= sigmas * self.std_error + 1e-12
    }
}

/// Propagator of one trajectory under the given control.
pub fn trajectory_unitary(control: &DigitalControl, model: &NoiseModel, tr: &Trajectory) -> Mat2 {
    let tau = control.tau();
    let mut u = sigma(0);
    for (n, p) in control.pulses().iter().enumerate() {
        let a = n as f64 * tau;
        let b = if n + 1 == control.windows() { control.total_time() } else { a + tau };
        u = z_phase(tr.phase_integral(model, a, b)) * p.unitary() * u;
    }
    u
}

/// Ensemble mean and standard error of `f(U)` over `n_traj` trajectories.
pub fn monte_carlo<F>(
    control: &DigitalControl,
    model: &NoiseModel,
    n_traj: usize,
    master_seed: u64,
    f: F,
) -> Result<Estimate>
where
    F: Fn(&Mat2) -> f64 + Sync,
{
    if n_traj == 0 {
        return Err(QnsError::param("n_traj", "need at least one trajectory"));
    }
    let blocks = n_traj.div_ceil(BLOCK);
    let sums: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut stream = rng::stream(master_seed, b as u64);
            let count = BLOCK.min(n_traj - b * BLOCK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let tr = model
                    .sample_trajectory(control.total_time(), &mut stream)
                    .expect("horizon validated by control");
                let v = f(&trajectory_unitary(control, model, &tr));
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = n_traj as f64;
    let mean = s / n;
    let var = if n_traj > 1 {
        ((s2 - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(Estimate {
        mean,
        std_error: (var / n).sqrt(),
    })
}

/// `Tr[U ρ0 U† O]` averaged over the noise.
pub fn monte_carlo_expectation(
    control: &DigitalControl,
    model: &NoiseModel,
    rho0: &DensityMatrix,
    observable: &Observable,
    n_traj: usize,
    master_seed: u64,
) -> Result<Estimate> {
    let rho = rho0.matrix();
    let o = observable.matrix();
    monte_carlo(control, model, n_traj, master_seed, |u| {
        (u * rho * u.adjoint() * o).trace().re
    })
}

/// Process fidelity with the identity gate, `⟨|Tr U|²⟩/4`.
pub fn monte_carlo_fidelity(
    control: &DigitalControl,
    model: &NoiseModel,
    n_traj: usize,
    master_seed: u64,
) -> Result<Estimate> {
    monte_carlo(control, model, n_traj, master_seed, |u| u.trace().norm_sqr() / 4.0)
}

/// Free-evolution coherence `⟨cos 2Φ(t)⟩` of the plain telegraph model, where
/// `Φ = g∫ξ`: `e^{−γt}[cos νt + (γ/ν) sin νt]` with `ν = √(4g² − γ²)`, continued
/// analytically through `ν² < 0`.
pub fn telegraph_coherence(gamma: f64, g: f64, t: f64) -> f64 {
    let nu2 = 4.0 * g * g - gamma * gamma;
    let decay = (-gamma * t).exp();
    if nu2 > 0.0 {
        let nu = nu2.sqrt();
        decay * ((nu * t).cos() + gamma / nu * (nu * t).sin())
    } else if nu2 < 0.0 {
        let mu = (-nu2).sqrt();
        decay * ((mu * t).cosh() + gamma / mu * (mu * t).sinh())
    } else {
        decay * (1.0 + gamma * t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::RandomControlLaw;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_coupling_is_noiseless() {
        let mut r = rng::stream(31, 0);
        let c = DigitalControl::random(4, 3.2, &RandomControlLaw::default(), &mut r).unwrap();
        let m = NoiseModel::telegraph(0.5, 0.0).unwrap();
        let rho = DensityMatrix::pauli_eigenstate(1, 1.0);
        let o = Observable::pauli(2);
        let e = monte_carlo_expectation(&c, &m, &rho, &o, 1000, 1).unwrap();
        let u = c.net_unitary();
        let direct = (u * rho.matrix() * u.adjoint() * o.matrix()).trace().re;
        assert_abs_diff_eq!(e.mean, direct, epsilon = 1e-12);
        assert!(e.std_error < 1e-7);
    }

    #[test]
    fn seeded_and_thread_independent() {
        let c = DigitalControl::cpmg(4, 3.2).unwrap();
        let m = NoiseModel::modulated(0.3, 1.0, 1.0).unwrap();
        let a = monte_carlo_fidelity(&c, &m, 3000, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| monte_carlo_fidelity(&c, &m, 3000, 9).unwrap());
        assert_eq!(a, b);
        assert!(monte_carlo_fidelity(&c, &m, 0, 9).is_err());
    }

    #[test]
    fn free_evolution_matches_closed_form() {
        let (gamma, g, t) = (0.5, 0.8, 3.0);
        let c = DigitalControl::free_evolution(4, t).unwrap();
        let m = NoiseModel::telegraph(gamma, g).unwrap();
        let rho = DensityMatrix::pauli_eigenstate(1, 1.0);
        let e = monte_carlo_expectation(&c, &m, &rho, &Observable::pauli(1), 20_000, 5).unwrap();
        let exact = telegraph_coherence(gamma, g, t);
        assert!(e.contains(exact, 4.0), "{e:?} vs {exact}");
    }
}
