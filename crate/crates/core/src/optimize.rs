//! Noise-tailored dynamical decoupling: multi-start simplex search over `L` pulses
//! for the identity gate, scored by the truncated process fidelity.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::DigitalControl;
use crate::dyson::check_order;
use crate::error::{QnsError, Result};
use crate::exact::exact_fidelity;
use crate::montecarlo::{monte_carlo_fidelity, Estimate};
use crate::noise::NoiseModel;
use crate::process::process_matrix_and_fidelity;
use crate::rng;
use crate::simplex::{minimize, SimplexOptions};
use crate::spectra::CASpectra;

/// Weight of the complete-positivity penalty. Strong noise drives truncated channels
/// out of the CP cone, where the model fidelity can exceed one.
pub const CP_PENALTY: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeConfig {
    pub starts: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Trajectories for the Monte Carlo "true" fidelity of the winner.
    pub mc_trajectories: usize,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self { starts: 32, max_iters: 6000, seed: 0, mc_trajectories: 100_000 }
    }
}

impl OptimizeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(QnsError::param("starts", "must be ≥ 1"));
        }
        if self.max_iters == 0 {
            return Err(QnsError::param("max_iters", "must be ≥ 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartKind {
    Cpmg,
    FreeEvolution,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartTrace {
    pub start: usize,
    pub kind: StartKind,
    pub objective: f64,
    pub fidelity_model: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best objective every hundred simplex iterations.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub order: usize,
    pub windows: usize,
    pub total_time: f64,
    /// `(θ, polar, azimuth)` per pulse.
    pub best_params: Vec<f64>,
    pub best_control: DigitalControl,
    pub best_objective: f64,
    pub best_fidelity_model: f64,
    /// Smallest eigenvalue of the truncated process matrix; negative values measure
    /// how far truncation pushed the channel outside the physical set.
    pub chi_min_eigenvalue: f64,
    pub best_fidelity_true: Option<Estimate>,
    pub best_fidelity_exact: Option<f64>,
    pub cpmg_fidelity_model: Option<f64>,
    pub free_fidelity_model: f64,
    pub trace: Vec<StartTrace>,
    pub seed: u64,
}

/// `F_model + CP_PENALTY·min(0, 2λ_min(χ))` for the control given by `params`.
pub fn penalized_objective(control: &DigitalControl, spectra: &CASpectra, order: usize) -> Result<(f64, f64, f64)> {
    let (pm, f) = process_matrix_and_fidelity(control, spectra, order)?;
    let lam = pm.min_eigenvalue();
    Ok((f + CP_PENALTY * (2.0 * lam).min(0.0), f, lam))
}

pub fn optimize_dd(
    spectra: &CASpectra,
    order: usize,
    windows: usize,
    total_time: f64,
    config: &OptimizeConfig,
    truth: Option<&NoiseModel>,
) -> Result<OptimizationResult> {
    check_order(order)?;
    config.validate()?;
    if spectra.windows != windows {
        return Err(QnsError::param("L", format!("spectra are for L={}, asked for L={windows}", spectra.windows)));
    }
    if (spectra.total_time - total_time).abs() > 1e-9 * total_time.abs().max(1.0) {
        return Err(QnsError::param("T", format!("spectra are for T={}, asked for T={total_time}", spectra.total_time)));
    }

    let free = DigitalControl::free_evolution(windows, total_time)?;
    let cpmg = DigitalControl::cpmg(windows, total_time).ok();
    let free_fidelity_model = penalized_objective(&free, spectra, order)?.1;
    let cpmg_fidelity_model = cpmg.as_ref().map(|c| penalized_objective(c, spectra, order)).transpose()?.map(|v| v.1);

    let mut seeds: Vec<(StartKind, Vec<f64>)> = Vec::with_capacity(config.starts);
    if let Some(c) = &cpmg {
        seeds.push((StartKind::Cpmg, c.params()));
    }
    seeds.push((StartKind::FreeEvolution, free.params()));
    seeds.truncate(config.starts);
    for i in seeds.len()..config.starts {
        let mut r = rng::substream(config.seed, 2, i as u64);
        let p = (0..windows)
            .flat_map(|_| [r.random_range(0.0..PI), r.random_range(0.0..PI), r.random_range(0.0..2.0 * PI)])
            .collect();
        seeds.push((StartKind::Random, p));
    }

    let opts = SimplexOptions { max_iters: config.max_iters, max_evals: config.max_iters, ..Default::default() };
    let runs: Vec<(StartTrace, Vec<f64>)> = seeds
        .into_par_iter()
        .enumerate()
        .map(|(start, (kind, x0))| {
            let objective = |x: &[f64]| -> f64 {
                DigitalControl::from_params(x, windows, total_time)
                    .and_then(|c| penalized_objective(&c, spectra, order))
                    .map(|v| -v.0)
                    .unwrap_or(f64::INFINITY)
            };
            let r = minimize(objective, &x0, &opts);
            let control = DigitalControl::from_params(&r.x, windows, total_time)?;
            let (obj, fid, _) = penalized_objective(&control, spectra, order)?;
            let trace = StartTrace {
                start,
                kind,
                objective: obj,
                fidelity_model: fid,
                iterations: r.iterations,
                evaluations: r.evaluations,
                converged: r.converged,
                history: r.history.iter().map(|v| -v).collect(),
            };
            Ok((trace, r.x))
        })
        .collect::<Result<_>>()?;

    // first index wins ties, so the outcome is independent of thread scheduling
    let (best_idx, _) = runs
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, (t, _))| if t.objective > bv { (i, t.objective) } else { (bi, bv) });
    let best_params = runs[best_idx].1.clone();
    let best_control = DigitalControl::from_params(&best_params, windows, total_time)?;
    let (best_objective, best_fidelity_model, chi_min_eigenvalue) = penalized_objective(&best_control, spectra, order)?;

    let (best_fidelity_true, best_fidelity_exact) = match truth {
        Some(model) => {
            let mc = monte_carlo_fidelity(&best_control, model, config.mc_trajectories, rng::derive(config.seed, 3))?;
            (Some(mc), Some(exact_fidelity(&best_control, model)))
        }
        None => (None, None),
    };

    Ok(OptimizationResult {
        order,
        windows,
        total_time,
        best_params,
        best_control,
        best_objective,
        best_fidelity_model,
        chi_min_eigenvalue,
        best_fidelity_true,
        best_fidelity_exact,
        cpmg_fidelity_model,
        free_fidelity_model,
        trace: runs.into_iter().map(|(t, _)| t).collect(),
        seed: config.seed,
    })
}
