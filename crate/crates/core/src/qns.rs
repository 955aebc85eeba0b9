//! Control-adapted noise spectroscopy: experiment design and linear inversion.
//!
//! Every setting (control, ρ0, O) gives a measurement that is affine in the CA
//! spectra. Stacking enough well-chosen settings yields a square, well-conditioned
//! system whose solution is the spectra.
//!
//! Keys with three consecutive equal windows are linearly dependent on lower
//! orders (`R(n)³ = −4R(n)`), so a K=4 design over orders {1,2,3,4} estimates the
//! 49 irreducible effective spectra at L=4; see [`CASpectra::fold`].

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::{DigitalControl, RandomControlLaw};
use crate::dyson::{CoefficientMap, DysonTerms};
use crate::error::{QnsError, Result};
use crate::pauli::{DensityMatrix, Observable};
use crate::rng;
use crate::spectra::{unknown_keys, CASpectra, Provenance, SpectrumKey};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSetting {
    pub control: DigitalControl,
    pub rho0: DensityMatrix,
    pub observable: Observable,
    pub label: String,
}

impl ExperimentSetting {
    pub fn new(control: DigitalControl, rho0: DensityMatrix, observable: Observable, label: impl Into<String>) -> Result<Self> {
        observable.ensure_invertible()?;
        Ok(ExperimentSetting {
            control,
            rho0,
            observable,
            label: label.into(),
        })
    }
}

/// Which spectra a design estimates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnknownSet {
    pub windows: usize,
    pub orders: BTreeSet<usize>,
    /// Estimate irreducible effective spectra instead of raw ones.
    pub folded: bool,
}

impl UnknownSet {
    pub fn new(windows: usize, orders: &[usize], folded: bool) -> Result<Self> {
        let orders: BTreeSet<usize> = orders.iter().copied().collect();
        if orders.is_empty() || orders.iter().any(|k| !(1..=4).contains(k)) {
            return Err(QnsError::param("orders", format!("must be a non-empty subset of 1..=4, got {orders:?}")));
        }
        if windows == 0 {
            return Err(QnsError::param("L", "need at least one window"));
        }
        Ok(UnknownSet { windows, orders, folded })
    }

    /// Default for truncation order `K`: orders {1,2} for K=2; {1,2,3,4} folded for K=4.
    pub fn for_truncation(windows: usize, order: usize) -> Result<Self> {
        match order {
            2 => Self::new(windows, &[1, 2], false),
            4 => Self::new(windows, &[1, 2, 3, 4], true),
            _ => Err(QnsError::UnsupportedOrder {
                order,
                supported: "K ∈ {2, 4}",
            }),
        }
    }

    /// Truncation order of the coefficient rows: the highest order, rounded up to even.
    pub fn truncation(&self) -> usize {
        let top = *self.orders.iter().max().expect("non-empty");
        top + top % 2
    }

    pub fn keys(&self) -> Vec<SpectrumKey> {
        unknown_keys(self.windows, &self.orders, self.folded)
    }

    /// Orders up to the truncation that are not estimated and hence taken as zero.
    pub fn declared_zero(&self) -> BTreeSet<usize> {
        (1..=self.truncation()).filter(|k| !self.orders.contains(k)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignOptions {
    pub pool_size: usize,
    /// Designs with a larger condition number are rejected.
    pub max_condition: f64,
    pub law: RandomControlLaw,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            pool_size: 400,
            max_condition: 1e8,
            law: RandomControlLaw::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Design {
    pub unknowns: UnknownSet,
    pub total_time: f64,
    pub keys: Vec<SpectrumKey>,
    pub settings: Vec<ExperimentSetting>,
    pub rows: Vec<Vec<f64>>,
    pub constants: Vec<f64>,
    pub sigma_min: f64,
    pub condition: f64,
}

/// Row and constant of one setting.
pub fn setting_row(setting: &ExperimentSetting, unknowns: &UnknownSet, keys: &[SpectrumKey]) -> (Vec<f64>, f64) {
    let cm = coefficient_map(setting, unknowns.truncation());
    (cm.row(keys, unknowns.folded), cm.constant)
}

fn coefficient_map(setting: &ExperimentSetting, order: usize) -> CoefficientMap {
    DysonTerms::new(&setting.control, order).coefficient_map(&setting.rho0, &setting.observable)
}

fn singular_values(rows: &[&Vec<f64>], cols: usize) -> Vec<f64> {
    let m = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Draws a random pool of settings and greedily keeps exactly as many as there are
/// unknowns, each step adding the row that maximises the smallest singular value of
/// the (row-normalised) selection.
pub fn design_protocol(
    unknowns: &UnknownSet,
    total_time: f64,
    options: &DesignOptions,
    seed: u64,
) -> Result<Design> {
    let keys = unknowns.keys();
    let n = keys.len();
    if options.pool_size < n {
        return Err(QnsError::param(
            "pool_size",
            format!("pool of {} cannot supply {n} settings", options.pool_size),
        ));
    }
    let pool: Vec<(ExperimentSetting, Vec<f64>, f64)> = (0..options.pool_size)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let mut r = rng::substream(seed, 1, i as u64);
            let control = DigitalControl::random(unknowns.windows, total_time, &options.law, &mut r)?;
            let state = rand::Rng::random_range(&mut r, 0..6usize);
            let rho0 = DensityMatrix::pauli_eigenstate(state / 2 + 1, if state % 2 == 0 { 1.0 } else { -1.0 });
            let observable = Observable::pauli(rand::Rng::random_range(&mut r, 1..=3usize));
            let setting = ExperimentSetting::new(control, rho0, observable, format!("pool-{i}"))?;
            let (row, c) = setting_row(&setting, unknowns, &keys);
            Ok((setting, row, c))
        })
        .collect::<Result<_>>()?;
    let normalized: Vec<Vec<f64>> = pool
        .iter()
        .map(|(_, row, _)| {
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            row.iter().map(|x| if norm > 0.0 { x / norm } else { 0.0 }).collect()
        })
        .collect();

    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; pool.len()];
    for step in 0..n {
        let best = (0..pool.len())
            .into_par_iter()
            .filter(|&i| !used[i])
            .map(|i| {
                let mut sel: Vec<&Vec<f64>> = chosen.iter().map(|&c| &normalized[c]).collect();
                sel.push(&normalized[i]);
                let s = singular_values(&sel, n);
                (s[step.min(s.len() - 1)], i)
            })
            .reduce(|| (f64::NEG_INFINITY, usize::MAX), |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            });
        chosen.push(best.1);
        used[best.1] = true;
    }

    let rows: Vec<Vec<f64>> = chosen.iter().map(|&i| pool[i].1.clone()).collect();
    let s = singular_values(&rows.iter().collect::<Vec<_>>(), n);
    let sigma_min = *s.last().unwrap_or(&0.0);
    let condition = if sigma_min > 0.0 { s[0] / sigma_min } else { f64::INFINITY };
    if !(condition <= options.max_condition) {
        return Err(QnsError::DesignFailure {
            pool: options.pool_size,
            condition,
        });
    }
    let settings = chosen
        .iter()
        .enumerate()
        .map(|(j, &i)| {
            let mut s = pool[i].0.clone();
            s.label = format!("setting-{j}");
            s
        })
        .collect();
    Ok(Design {
        unknowns: unknowns.clone(),
        total_time,
        keys,
        settings,
        rows,
        constants: chosen.iter().map(|&i| pool[i].2).collect(),
        sigma_min,
        condition,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Estimation {
    pub spectra: CASpectra,
    pub residual_norm: f64,
    pub condition: f64,
}

impl Estimation {
    /// Per-order relative error against ground truth (folded as the estimate is).
    pub fn errors_against(&self, truth: &CASpectra) -> Result<BTreeMap<usize, f64>> {
        let truth = match self.spectra.folded {
            Some(k) => truth.fold(k)?,
            None => truth.clone(),
        };
        self.spectra.relative_errors(&truth)
    }
}

fn design_matrix(design: &Design) -> DMatrix<f64> {
    DMatrix::from_fn(design.rows.len(), design.keys.len(), |i, j| design.rows[i][j])
}

/// Least squares (`ridge = 0`) or ridge-regularised solve of `rows · S̄ = measured − constants`.
pub fn estimate_ca_spectra(design: &Design, measured: &[f64], ridge: f64) -> Result<Estimation> {
    if measured.len() != design.rows.len() {
        return Err(QnsError::param(
            "measured",
            format!("{} values for {} settings", measured.len(), design.rows.len()),
        ));
    }
    if !(ridge >= 0.0) {
        return Err(QnsError::param("ridge", "must be ≥ 0"));
    }
    let a = design_matrix(design);
    let b = DVector::from_iterator(measured.len(), measured.iter().zip(&design.constants).map(|(m, c)| m - c));
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let x = if ridge == 0.0 {
        if smin <= 1e-12 * smax {
            return Err(QnsError::RankDeficient { condition });
        }
        svd.solve(&b, 0.0).map_err(|e| QnsError::Config(e.to_string()))?
    } else {
        let ata = a.transpose() * &a + DMatrix::identity(a.ncols(), a.ncols()) * ridge;
        ata.lu()
            .solve(&(a.transpose() * &b))
            .ok_or(QnsError::RankDeficient { condition })?
    };
    let residual_norm = (&a * &x - &b).norm();
    let mut spectra = CASpectra::new(design.unknowns.windows, design.total_time, Provenance::Estimated);
    for (key, v) in design.keys.iter().zip(x.iter()) {
        spectra.insert(key.clone(), *v);
    }
    spectra.declared_zero_orders = design.unknowns.declared_zero();
    if design.unknowns.folded {
        spectra.folded = Some(design.unknowns.truncation());
    }
    Ok(Estimation {
        spectra,
        residual_norm,
        condition,
    })
}

/// Standard deviation of each estimated spectrum induced by independent
/// measurement errors with the given standard deviations.
pub fn propagate_errors(design: &Design, std_errors: &[f64]) -> Result<Vec<f64>> {
    let a = design_matrix(design);
    let n = a.ncols();
    let pinv = a
        .pseudo_inverse(1e-14)
        .map_err(|e| QnsError::Config(e.to_string()))?;
    Ok((0..n)
        .map(|j| {
            pinv.row(j)
                .iter()
                .zip(std_errors)
                .map(|(p, s)| (p * s).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect())
}

/// Noiseless synthetic data: each setting's truncated expectation under `spectra`.
pub fn synthetic_measurements(design: &Design, spectra: &CASpectra) -> Result<Vec<f64>> {
    let order = design.unknowns.truncation();
    design
        .settings
        .par_iter()
        .map(|s| crate::dyson::truncated_expectation(&coefficient_map(s, order), spectra))
        .collect()
}
