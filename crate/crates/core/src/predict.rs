//! Predicting observables of random controls from CA spectra, scored against the
//! exact dynamics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::{DigitalControl, RandomControlLaw};
use crate::dyson::{check_order, DysonTerms};
use crate::error::Result;
use crate::exact::ExactDynamics;
use crate::noise::NoiseModel;
use crate::pauli::{DensityMatrix, Observable};
use crate::rng;
use crate::spectra::CASpectra;

/// One way of predicting: a spectra set read at truncation order `order`.
#[derive(Debug, Clone)]
pub struct Predictor<'a> {
    pub label: String,
    pub spectra: &'a CASpectra,
    pub order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub index: usize,
    pub exact: f64,
    /// Same order as the predictors.
    pub predicted: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSummary {
    pub label: String,
    pub order: usize,
    /// Share of controls with `|predicted − exact| < threshold`.
    pub fraction_below: f64,
    pub threshold: f64,
    pub mean_abs_error: f64,
}

/// Draws `count` controls from `law` (control `i` uses its own stream) and predicts
/// `⟨O(T)⟩` with every predictor.
#[allow(clippy::too_many_arguments)]
pub fn predict_random(
    model: &NoiseModel,
    windows: usize,
    total_time: f64,
    count: usize,
    law: &RandomControlLaw,
    rho0: &DensityMatrix,
    observable: &Observable,
    predictors: &[Predictor<'_>],
    seed: u64,
) -> Result<Vec<PredictionRow>> {
    for p in predictors {
        check_order(p.order)?;
    }
    let exact = ExactDynamics::new(model, windows, total_time);
    let max_order = predictors.iter().map(|p| p.order).max().unwrap_or(2);
    (0..count)
        .into_par_iter()
        .map(|index| {
            let mut r = rng::substream(seed, 4, index as u64);
            let control = DigitalControl::random(windows, total_time, law, &mut r)?;
            // coefficients at the highest order contain every lower one
            let full = DysonTerms::new(&control, max_order).coefficient_map(rho0, observable);
            let predicted = predictors
                .iter()
                .map(|p| {
                    let cm = full.restricted(p.order);
                    crate::dyson::truncated_expectation(&cm, p.spectra)
                })
                .collect::<Result<_>>()?;
            Ok(PredictionRow { index, exact: exact.expectation(&control, rho0, observable), predicted })
        })
        .collect()
}

pub fn summarize(rows: &[PredictionRow], predictors: &[Predictor<'_>], threshold: f64) -> Vec<PredictionSummary> {
    let n = rows.len().max(1) as f64;
    predictors
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let errs = rows.iter().map(|r| (r.predicted[j] - r.exact).abs());
            let below = errs.clone().filter(|e| *e < threshold).count() as f64 / n;
            PredictionSummary {
                label: p.label.clone(),
                order: p.order,
                fraction_below: below,
                threshold,
                mean_abs_error: errs.sum::<f64>() / n,
            }
        })
        .collect()
}
