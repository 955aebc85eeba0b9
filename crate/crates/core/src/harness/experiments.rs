use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::json;

use super::config::{Experiment, ExperimentConfig};
use super::output::{histogram, histogram_plot, line_plot, num, Artifacts, Provenance, Series, Table};
use crate::comb::{
    comb_to_ca_spectra, delta_tau, principal_domain_and_count, sample_polyspectra, ReconstructionOptions,
};
use crate::control::{DigitalControl, RandomControlLaw};
use crate::dyson::{check_order, expectation_functional, truncated_expectation};
use crate::error::{QnsError, Result};
use crate::exact::ExactDynamics;
use crate::montecarlo::{monte_carlo_expectation, monte_carlo_fidelity, Estimate};
use crate::noise::NoiseModel;
use crate::optimize::{optimize_dd, penalized_objective, OptimizationResult, OptimizeConfig};
use crate::pauli::{DensityMatrix, Observable};
use crate::predict::{predict_random, summarize, Predictor};
use crate::qns::{design_protocol, estimate_ca_spectra, propagate_errors, synthetic_measurements, DesignOptions, UnknownSet};
use crate::rng;
use crate::spectra::{ca_spectra_exact, CASpectra};

/// Parameters shared by every experiment.
#[derive(Debug, Clone)]
struct Common {
    gamma: f64,
    omega: f64,
    windows: usize,
    total_time: f64,
    seed: u64,
}

impl Common {
    fn from_config(c: &ExperimentConfig, default_omega: f64) -> Result<Self> {
        let out = Common {
            gamma: c.get("gamma", 0.02)?,
            omega: c.frequency("omega", default_omega)?,
            windows: c.get("L", 4)?,
            total_time: c.get("T", 3.2)?,
            seed: c.seed()?,
        };
        NoiseModel::new(out.gamma, 0.0, out.omega)?;
        DigitalControl::free_evolution(out.windows, out.total_time)?;
        Ok(out)
    }

    fn model(&self, ratio: f64) -> Result<NoiseModel> {
        NoiseModel::new(self.gamma, ratio * self.gamma, self.omega)
    }
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(QnsError::param(name, "must be positive"))
    }
}

fn at_least(name: &'static str, v: usize, min: usize) -> Result<usize> {
    if v >= min {
        Ok(v)
    } else {
        Err(QnsError::param(name, format!("must be ≥ {min}")))
    }
}

fn orders(c: &ExperimentConfig) -> Result<Vec<usize>> {
    let o = c.list("orders", &[2usize, 4])?;
    if o.is_empty() {
        return Err(QnsError::param("orders", "must not be empty"));
    }
    o.iter().try_for_each(|&k| check_order(k))?;
    Ok(o)
}

pub(super) enum Plan {
    TruncationScan(TruncationScan),
    QnsEstimate(QnsEstimate),
    OptimizeDd(OptimizeDd),
    PredictRandom(PredictRandom),
    ResourcesTable(ResourcesTable),
}

impl Plan {
    pub(super) fn from_config(c: &ExperimentConfig) -> Result<Self> {
        Ok(match c.experiment {
            Experiment::TruncationScan => Plan::TruncationScan(TruncationScan::from_config(c)?),
            Experiment::QnsEstimate => Plan::QnsEstimate(QnsEstimate::from_config(c)?),
            Experiment::OptimizeDd => Plan::OptimizeDd(OptimizeDd::from_config(c)?),
            Experiment::PredictRandom => Plan::PredictRandom(PredictRandom::from_config(c)?),
            Experiment::ResourcesTable => Plan::ResourcesTable(ResourcesTable::from_config(c)?),
        })
    }

    pub(super) fn run(&self, prov: &Provenance) -> Result<Artifacts> {
        let mut art = Artifacts::default();
        match self {
            Plan::TruncationScan(p) => p.run(prov, &mut art)?,
            Plan::QnsEstimate(p) => p.run(prov, &mut art)?,
            Plan::OptimizeDd(p) => p.run(prov, &mut art)?,
            Plan::PredictRandom(p) => p.run(prov, &mut art)?,
            Plan::ResourcesTable(p) => p.run(prov, &mut art)?,
        }
        Ok(art)
    }
}

// ---------------------------------------------------------------- truncation-scan

pub(super) struct TruncationScan {
    common: Common,
    ratios: Vec<f64>,
    mc_trajectories: usize,
    rho0: DensityMatrix,
    observable: (String, Observable),
}

impl TruncationScan {
    fn from_config(c: &ExperimentConfig) -> Result<Self> {
        let common = Common::from_config(c, 0.0)?;
        let lo: f64 = c.get("g_over_gamma_min", 0.0)?;
        let hi: f64 = c.get("g_over_gamma_max", 60.0)?;
        let points = at_least("points", c.get("points", 61)?, 2)?;
        if !(lo >= 0.0 && hi > lo) {
            return Err(QnsError::param("g_over_gamma_min/max", "need 0 ≤ min < max"));
        }
        let ratios = (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect();
        Ok(TruncationScan {
            common,
            ratios,
            mc_trajectories: at_least("mc_trajectories", c.get("mc_trajectories", 100_000)?, 2)?,
            rho0: c.state("rho0", "+y")?,
            observable: c.observable("observable", "y")?,
        })
    }

    fn run(&self, prov: &Provenance, art: &mut Artifacts) -> Result<()> {
        let cm = &self.common;
        let control = DigitalControl::free_evolution(cm.windows, cm.total_time)?;
        // reference pair: ρ0 = (𝟙+σy)/2 read out with σx
        let literal_rho = DensityMatrix::pauli_eigenstate(2, 1.0);
        let literal_obs = Observable::pauli(1);
        let f4 = expectation_functional(&control, &self.rho0, &self.observable.1, 4)?;
        let f2 = f4.restricted(2);
        let l4 = expectation_functional(&control, &literal_rho, &literal_obs, 4)?;
        let l2 = l4.restricted(2);

        let mut table = Table::new(&[
            "g_over_gamma",
            "g",
            "k2",
            "k4",
            "mc_mean",
            "mc_std_error",
            "exact",
            "literal_k2",
            "literal_k4",
            "literal_exact",
        ]);
        let mut series: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
        let mcs = rng::derive(cm.seed, 20);
        let (mut d2, mut d4, mut max_se) = (0.0, 0.0, 0.0f64);
        for (i, &ratio) in self.ratios.iter().enumerate() {
            let model = cm.model(ratio)?;
            let spectra = ca_spectra_exact(&model, cm.windows, cm.total_time, 4)?;
            let (k2, k4) = (truncated_expectation(&f2, &spectra)?, truncated_expectation(&f4, &spectra)?);
            let mc = monte_carlo_expectation(&control, &model, &self.rho0, &self.observable.1, self.mc_trajectories, mcs.wrapping_add(i as u64))?;
            let dynamics = ExactDynamics::new(&model, cm.windows, cm.total_time);
            let exact = dynamics.expectation(&control, &self.rho0, &self.observable.1);
            let (lk2, lk4) = (truncated_expectation(&l2, &spectra)?, truncated_expectation(&l4, &spectra)?);
            let lexact = dynamics.expectation(&control, &literal_rho, &literal_obs);
            table.push(
                [ratio, model.g(), k2, k4, mc.mean, mc.std_error, exact, lk2, lk4, lexact].map(num).to_vec(),
            );
            d2 += (k2 - mc.mean).abs();
            d4 += (k4 - mc.mean).abs();
            max_se = max_se.max(mc.std_error);
            series.entry("K=2").or_default().push((ratio, k2));
            series.entry("K=4").or_default().push((ratio, k4));
            series.entry("Monte Carlo").or_default().push((ratio, mc.mean));
        }
        let n = self.ratios.len() as f64;
        art.csv("truncation_scan.csv", &table, prov);
        art.json(
            "summary.json",
            &json!({
                "experiment": prov.experiment,
                "observable": self.observable.0,
                "rho0_bloch": self.rho0.bloch(),
                "omega": cm.omega,
                "mean_abs_k2_minus_mc": d2 / n,
                "mean_abs_k4_minus_mc": d4 / n,
                "max_mc_std_error": max_se,
            }),
        )?;
        let series: Vec<Series> = series.into_iter().map(|(l, p)| Series { label: l.to_string(), points: p }).collect();
        art.text(
            "truncation_scan.svg",
            line_plot(
                &format!("free evolution, <σ{}>", self.observable.0),
                "g/γ",
                "expectation",
                &series,
            ),
        );
        Ok(())
    }
}

// ---------------------------------------------------------------- qns-estimate

#[derive(Debug, Clone, Copy, PartialEq)]
enum Measurement {
    Truncated,
    MonteCarlo,
    Exact,
}

pub(super) struct QnsEstimate {
    common: Common,
    ratio: f64,
    orders: Vec<usize>,
    measurement: Measurement,
    mc_trajectories: usize,
    design: DesignOptions,
    ridge: f64,
}

impl QnsEstimate {
    fn from_config(c: &ExperimentConfig) -> Result<Self> {
        let measurement = match c.get("measurement", "truncated".to_string())?.as_str() {
            "truncated" => Measurement::Truncated,
            "monte-carlo" => Measurement::MonteCarlo,
            "exact" => Measurement::Exact,
            other => return Err(QnsError::Config(format!("measurement: expected truncated, monte-carlo or exact, got '{other}'"))),
        };
        let ridge: f64 = c.get("ridge", 0.0)?;
        if !(ridge >= 0.0) {
            return Err(QnsError::param("ridge", "must be ≥ 0"));
        }
        let design = DesignOptions {
            pool_size: at_least("pool_size", c.get("pool_size", 400)?, 1)?,
            max_condition: positive("max_condition", c.get("max_condition", 1e8)?)?,
            ..Default::default()
        };
        let p = QnsEstimate {
            common: Common::from_config(c, 0.0)?,
            ratio: c.get("g_over_gamma", 20.0)?,
            orders: orders(c)?,
            measurement,
            mc_trajectories: at_least("mc_trajectories", c.get("mc_trajectories", 100_000)?, 2)?,
            design,
            ridge,
        };
        p.common.model(p.ratio)?;
        Ok(p)
    }

    fn run(&self, prov: &Provenance, art: &mut Artifacts) -> Result<()> {
        let cm = &self.common;
        let model = cm.model(self.ratio)?;
        let mut summaries = Vec::new();
        for &k in &self.orders {
            let unknowns = UnknownSet::for_truncation(cm.windows, k)?;
            let design = design_protocol(&unknowns, cm.total_time, &self.design, rng::derive(cm.seed, 10 + k as u64))?;
            let truth = ca_spectra_exact(&model, cm.windows, cm.total_time, k)?;
            let (measured, std_errors) = match self.measurement {
                Measurement::Truncated => (synthetic_measurements(&design, &truth)?, None),
                Measurement::Exact => (exact_measurements(&design, &model), None),
                Measurement::MonteCarlo => {
                    let base = rng::derive(cm.seed, 30 + k as u64);
                    let est: Vec<Estimate> = design
                        .settings
                        .iter()
                        .enumerate()
                        .map(|(i, s)| {
                            monte_carlo_expectation(&s.control, &model, &s.rho0, &s.observable, self.mc_trajectories, base.wrapping_add(i as u64))
                        })
                        .collect::<Result<_>>()?;
                    (est.iter().map(|e| e.mean).collect(), Some(est.iter().map(|e| e.std_error).collect::<Vec<_>>()))
                }
            };
            let estimate = estimate_ca_spectra(&design, &measured, self.ridge)?;
            let errors = estimate.errors_against(&truth)?;
            let truth_cmp = if unknowns.folded { truth.fold(k)? } else { truth.clone() };
            let propagated = std_errors.as_ref().map(|s| propagate_errors(&design, s)).transpose()?;

            // shot-noise consistency: compare against the estimate from exact data
            let shot_noise = match &propagated {
                Some(sig) => {
                    let reference = estimate_ca_spectra(&design, &exact_measurements(&design, &model), self.ridge)?;
                    let z = design
                        .keys
                        .iter()
                        .zip(sig)
                        .map(|(key, s)| {
                            let d = estimate.spectra.get(key).unwrap_or(0.0) - reference.spectra.get(key).unwrap_or(0.0);
                            if *s > 0.0 { d.abs() / s } else { 0.0 }
                        })
                        .fold(0.0, f64::max);
                    Some(z)
                }
                None => None,
            };

            let mut table = Table::new(&["k", "n1", "n2", "n3", "n4", "estimate", "exact", "abs_error", "propagated_std"]);
            for (j, key) in design.keys.iter().enumerate() {
                let mut row = vec![key.k.to_string()];
                let mut n: Vec<String> = key.n.iter().map(|v| v.to_string()).collect();
                n.resize(4, String::new());
                row.extend(n);
                let (e, t) = (estimate.spectra.get(key).unwrap_or(0.0), truth_cmp.get(key).unwrap_or(0.0));
                row.extend([num(e), num(t), num((e - t).abs())]);
                row.push(propagated.as_ref().map_or(String::new(), |p| num(p[j])));
                table.push(row);
            }
            art.csv(&format!("estimate_K{k}.csv"), &table, prov);
            let mut body = Vec::new();
            estimate.spectra.write_csv(&mut body)?;
            art.csv_body(&format!("spectra_K{k}.csv"), String::from_utf8_lossy(&body).into_owned(), prov);
            art.json(&format!("design_K{k}.json"), &design.settings)?;
            summaries.push(json!({
                "K": k,
                "settings": design.settings.len(),
                "unknowns": design.keys.len(),
                "condition": design.condition,
                "residual_norm": estimate.residual_norm,
                "relative_errors": errors,
                "max_shot_noise_z": shot_noise,
            }));
        }
        art.json(
            "summary.json",
            &json!({
                "experiment": prov.experiment,
                "g_over_gamma": self.ratio,
                "omega": cm.omega,
                "measurement": format!("{:?}", self.measurement),
                "orders": summaries,
            }),
        )?;
        Ok(())
    }
}

fn exact_measurements(design: &crate::qns::Design, model: &NoiseModel) -> Vec<f64> {
    let dynamics = ExactDynamics::new(model, design.unknowns.windows, design.total_time);
    design.settings.iter().map(|s| dynamics.expectation(&s.control, &s.rho0, &s.observable)).collect()
}

// ---------------------------------------------------------------- optimize-dd

#[derive(Debug, Clone, Copy, PartialEq)]
enum SpectraSource {
    Exact,
    Estimated,
}

pub(super) struct OptimizeDd {
    common: Common,
    omegas: Vec<f64>,
    ratios: Vec<f64>,
    orders: Vec<usize>,
    source: SpectraSource,
    opt: OptimizeConfig,
    ff_points: usize,
    ff_omega_max: f64,
}

impl OptimizeDd {
    fn from_config(c: &ExperimentConfig) -> Result<Self> {
        let common = Common::from_config(c, 0.0)?;
        let source = match c.get("spectra_source", "exact".to_string())?.as_str() {
            "exact" => SpectraSource::Exact,
            "estimated" => SpectraSource::Estimated,
            other => return Err(QnsError::Config(format!("spectra_source: expected exact or estimated, got '{other}'"))),
        };
        let opt = OptimizeConfig {
            starts: c.get("starts", 32)?,
            max_iters: c.get("max_iters", 6000)?,
            seed: common.seed,
            mc_trajectories: at_least("mc_trajectories", c.get("mc_trajectories", 100_000)?, 2)?,
        };
        opt.validate()?;
        let p = OptimizeDd {
            omegas: c.frequencies("omegas", &[0.0, 0.994_718_394_324_346, 1.989_436_788_648_692])?,
            ratios: c.list("g_over_gamma", &[30.0])?,
            orders: orders(c)?,
            source,
            opt,
            ff_points: at_least("ff_points", c.get("ff_points", 400)?, 2)?,
            ff_omega_max: positive("ff_omega_max", c.frequency("ff_omega_max", 4.0)?)?,
            common,
        };
        for &w in &p.omegas {
            for &r in &p.ratios {
                NoiseModel::new(p.common.gamma, r * p.common.gamma, w)?;
            }
        }
        Ok(p)
    }

    fn spectra(&self, model: &NoiseModel, k: usize) -> Result<CASpectra> {
        let cm = &self.common;
        let exact = ca_spectra_exact(model, cm.windows, cm.total_time, 4)?;
        match self.source {
            SpectraSource::Exact => Ok(exact),
            SpectraSource::Estimated => {
                let unknowns = UnknownSet::for_truncation(cm.windows, k)?;
                let design = design_protocol(&unknowns, cm.total_time, &DesignOptions::default(), rng::derive(cm.seed, 10 + k as u64))?;
                let measured = synthetic_measurements(&design, &exact)?;
                Ok(estimate_ca_spectra(&design, &measured, 0.0)?.spectra)
            }
        }
    }

    fn run(&self, prov: &Provenance, art: &mut Artifacts) -> Result<()> {
        let cm = &self.common;
        let l = cm.windows;
        let mut cols = vec![
            "omega",
            "g_over_gamma",
            "scheme",
            "fidelity_model",
            "fidelity_true",
            "fidelity_true_std_error",
            "fidelity_exact",
        ];
        let ycols: Vec<String> = (1..=l).map(|n| format!("yz{n}")).collect();
        cols.extend(ycols.iter().map(String::as_str));
        let mut table = Table::new(&cols);
        let mut ff = Table::new(&["noise_omega", "scheme", "omega", "abs_fx", "abs_fy", "abs_fz", "psd"]);
        let mut results: Vec<serde_json::Value> = Vec::new();
        let mut curves: BTreeMap<(usize, String), Vec<(f64, f64)>> = BTreeMap::new();
        let cpmg = DigitalControl::cpmg(l, cm.total_time).ok();
        let kmax = *self.orders.iter().max().unwrap_or(&4);

        for (wi, &omega) in self.omegas.iter().enumerate() {
            for (ri, &ratio) in self.ratios.iter().enumerate() {
                let model = NoiseModel::new(cm.gamma, ratio * cm.gamma, omega)?;
                let dynamics = ExactDynamics::new(&model, l, cm.total_time);
                let mut winners: Vec<(String, DigitalControl)> = Vec::new();
                let push_row = |scheme: &str, control: &DigitalControl, model_f: f64, tru: Option<Estimate>, table: &mut Table| {
                    let exact = dynamics.fidelity(control);
                    let mut row = vec![num(omega), num(ratio), scheme.to_string(), num(model_f)];
                    row.push(tru.map_or(String::new(), |e| num(e.mean)));
                    row.push(tru.map_or(String::new(), |e| num(e.std_error)));
                    row.push(num(exact));
                    row.extend(control.yz().into_iter().map(num));
                    table.push(row);
                    exact
                };
                if let Some(c) = &cpmg {
                    let s = self.spectra(&model, kmax)?;
                    let (_, fm, _) = penalized_objective(c, &s, kmax)?;
                    let mc = monte_carlo_fidelity(c, &model, self.opt.mc_trajectories, rng::derive(cm.seed, 40 + (wi * 1000 + ri) as u64))?;
                    let ex = push_row("cpmg", c, fm, Some(mc), &mut table);
                    curves.entry((wi, "CPMG".into())).or_default().push((ratio, ex));
                    winners.push(("cpmg".into(), c.clone()));
                }
                for &k in &self.orders {
                    let s = self.spectra(&model, k)?;
                    let r: OptimizationResult = optimize_dd(&s, k, l, cm.total_time, &self.opt, Some(&model))?;
                    let scheme = format!("K{k}-opt");
                    let ex = push_row(&scheme, &r.best_control, r.best_fidelity_model, r.best_fidelity_true, &mut table);
                    curves.entry((wi, format!("K={k} optimized"))).or_default().push((ratio, ex));
                    winners.push((scheme.clone(), r.best_control.clone()));
                    results.push(json!({ "omega": omega, "g_over_gamma": ratio, "scheme": scheme, "result": r }));
                }
                if ri == 0 {
                    for (scheme, c) in &winners {
                        for i in 0..self.ff_points {
                            let w = self.ff_omega_max * i as f64 / (self.ff_points - 1) as f64;
                            let f = c.frequency_ff(w);
                            ff.push(vec![
                                num(omega),
                                scheme.clone(),
                                num(w),
                                num(f[0].norm()),
                                num(f[1].norm()),
                                num(f[2].norm()),
                                num(model.psd(w)),
                            ]);
                        }
                    }
                }
            }
        }
        art.csv("fidelities.csv", &table, prov);
        art.csv("filter_functions.csv", &ff, prov);
        art.json("results.json", &results)?;
        for (wi, &omega) in self.omegas.iter().enumerate() {
            let series: Vec<Series> = curves
                .iter()
                .filter(|((w, _), _)| *w == wi)
                .map(|((_, l), p)| Series { label: l.clone(), points: p.clone() })
                .collect();
            art.text(
                &format!("fidelity_omega{wi}.svg"),
                line_plot(&format!("Ω = {omega:.4} rad/μs"), "g/γ", "exact fidelity", &series),
            );
        }
        Ok(())
    }
}

// ---------------------------------------------------------------- comb grids

#[derive(Debug, Clone, Serialize)]
struct CombGrid {
    label: String,
    m_max: usize,
    omega0: f64,
}

fn comb_grids(c: &ExperimentConfig, default_m: &[usize]) -> Result<(Vec<CombGrid>, usize)> {
    let ms: Vec<usize> = c.list("comb_m_max", default_m)?;
    // default coarse grid: cutoff 6.5 in label units
    let omega_max = positive("comb_omega_max", c.frequency("comb_omega_max", 6.5 / (2.0 * std::f64::consts::PI))?)?;
    let omega0s: Vec<f64> = c.frequencies("comb_omega0", &[])?;
    if !omega0s.is_empty() && omega0s.len() != ms.len() {
        return Err(QnsError::param("comb_omega0", "needs one value per comb_m_max entry"));
    }
    let names = |m: usize| match m {
        4 => "min".to_string(),
        10 => "coarse".to_string(),
        15 => "middle".to_string(),
        47 => "fine".to_string(),
        m => format!("m{m}"),
    };
    let grids = ms
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            at_least("comb_m_max", m, 1)?;
            let omega0 = positive("comb_omega0", omega0s.get(i).copied().unwrap_or(omega_max / m as f64))?;
            Ok(CombGrid { label: names(m), m_max: m, omega0 })
        })
        .collect::<Result<_>>()?;
    let reps = at_least("comb_repetitions", c.get("comb_repetitions", 20)?, 1)?;
    Ok((grids, reps))
}

fn comb_spectra(model: &NoiseModel, grid: &CombGrid, reps: usize, l: usize, t: f64) -> Result<CASpectra> {
    let samples = sample_polyspectra(model, grid.omega0, grid.m_max, reps, None)?;
    comb_to_ca_spectra(&samples, l, t, &ReconstructionOptions::default())
}

// ---------------------------------------------------------------- predict-random

pub(super) struct PredictRandom {
    common: Common,
    ratio: f64,
    controls: usize,
    threshold: f64,
    law: RandomControlLaw,
    rho0: DensityMatrix,
    observable: (String, Observable),
    grids: Vec<CombGrid>,
    reps: usize,
    bins: usize,
}

impl PredictRandom {
    fn from_config(c: &ExperimentConfig) -> Result<Self> {
        let common = Common::from_config(c, 0.994_718_394_324_346)?;
        let (grids, reps) = comb_grids(c, &[10, 15, 47])?;
        let p = PredictRandom {
            ratio: c.get("g_over_gamma", 30.0)?,
            controls: at_least("controls", c.get("controls", 10_000)?, 1)?,
            threshold: positive("threshold", c.get("threshold", 0.1)?)?,
            law: RandomControlLaw { theta_max: positive("theta_max", c.get("theta_max", std::f64::consts::PI)?)? },
            rho0: c.state("rho0", "+y")?,
            observable: c.observable("observable", "x")?,
            grids,
            reps,
            bins: at_least("histogram_bins", c.get("histogram_bins", 60)?, 1)?,
            common,
        };
        p.common.model(p.ratio)?;
        Ok(p)
    }

    fn run(&self, prov: &Provenance, art: &mut Artifacts) -> Result<()> {
        let cm = &self.common;
        let model = cm.model(self.ratio)?;
        let exact = ca_spectra_exact(&model, cm.windows, cm.total_time, 4)?;
        let combs: Vec<CASpectra> = self
            .grids
            .iter()
            .map(|g| comb_spectra(&model, g, self.reps, cm.windows, cm.total_time))
            .collect::<Result<_>>()?;
        let mut predictors = vec![
            Predictor { label: "CA K=2".into(), spectra: &exact, order: 2 },
            Predictor { label: "CA K=4".into(), spectra: &exact, order: 4 },
        ];
        for (g, s) in self.grids.iter().zip(&combs) {
            predictors.push(Predictor { label: format!("comb-{} K=4", g.label), spectra: s, order: 4 });
        }
        let rows = predict_random(
            &model,
            cm.windows,
            cm.total_time,
            self.controls,
            &self.law,
            &self.rho0,
            &self.observable.1,
            &predictors,
            cm.seed,
        )?;
        let summary = summarize(&rows, &predictors, self.threshold);

        let slug = |l: &str| l.to_lowercase().replace([' ', '='], "_").replace("__", "_");
        let mut cols = vec!["index".to_string(), "exact".to_string()];
        cols.extend(predictors.iter().map(|p| format!("pred_{}", slug(&p.label))));
        let mut table = Table { columns: cols, rows: Vec::new() };
        for r in &rows {
            let mut row = vec![r.index.to_string(), num(r.exact)];
            row.extend(r.predicted.iter().map(|v| num(*v)));
            table.push(row);
        }
        art.csv("predictions.csv", &table, prov);

        let mut st = Table::new(&["predictor", "order", "fraction_below_threshold", "threshold", "mean_abs_error"]);
        for s in &summary {
            st.push(vec![s.label.clone(), s.order.to_string(), num(s.fraction_below), num(s.threshold), num(s.mean_abs_error)]);
        }
        art.csv("summary.csv", &st, prov);

        let (lo, hi) = (-1.0, 1.0);
        let edges: Vec<f64> = (0..=self.bins).map(|i| lo + (hi - lo) * i as f64 / self.bins as f64).collect();
        let counts: Vec<(String, Vec<usize>)> = predictors
            .iter()
            .enumerate()
            .map(|(j, p)| (p.label.clone(), histogram(rows.iter().map(|r| r.predicted[j] - r.exact), lo, hi, self.bins)))
            .collect();
        let mut ht = Table::new(&["bin_low", "bin_high"]);
        ht.columns.extend(predictors.iter().map(|p| format!("count_{}", slug(&p.label))));
        for b in 0..self.bins {
            let mut row = vec![num(edges[b]), num(edges[b + 1])];
            row.extend(counts.iter().map(|c| c.1[b].to_string()));
            ht.push(row);
        }
        art.csv("histogram.csv", &ht, prov);
        let (ca, comb): (Vec<_>, Vec<_>) = counts.into_iter().partition(|c| c.0.starts_with("CA"));
        let what = format!("<σ{}> prediction error", self.observable.0);
        art.text("histogram_ca.svg", histogram_plot("CA spectra", &what, &edges, &ca));
        art.text("histogram_comb.svg", histogram_plot("comb-derived spectra", &what, &edges, &comb));
        art.json(
            "summary.json",
            &json!({
                "experiment": prov.experiment,
                "g_over_gamma": self.ratio,
                "omega": cm.omega,
                "controls": self.controls,
                "theta_max": self.law.theta_max,
                "comb_grids": self.grids,
                "predictors": summary,
            }),
        )?;
        Ok(())
    }
}

// ---------------------------------------------------------------- resources-table

pub(super) struct ResourcesTable {
    common: Common,
    ratio: f64,
    t_coherence: f64,
    grids: Vec<CombGrid>,
    reps: usize,
    optimize: bool,
    opt: OptimizeConfig,
}

impl ResourcesTable {
    fn from_config(c: &ExperimentConfig) -> Result<Self> {
        let common = Common::from_config(c, 0.994_718_394_324_346)?;
        let (grids, reps) = comb_grids(c, &[47, 15, 10, 4])?;
        let opt = OptimizeConfig {
            starts: c.get("starts", 32)?,
            max_iters: c.get("max_iters", 6000)?,
            seed: common.seed,
            mc_trajectories: at_least("mc_trajectories", c.get("mc_trajectories", 100_000)?, 2)?,
        };
        opt.validate()?;
        let p = ResourcesTable {
            ratio: c.get("g_over_gamma", 30.0)?,
            t_coherence: positive("t_coherence", c.get("t_coherence", 100.0)?)?,
            grids,
            reps,
            optimize: c.get("optimize", true)?,
            opt,
            common,
        };
        p.common.model(p.ratio)?;
        Ok(p)
    }

    fn run(&self, prov: &Provenance, art: &mut Artifacts) -> Result<()> {
        let cm = &self.common;
        let model = cm.model(self.ratio)?;
        let mut table = Table::new(&[
            "method",
            "m_max",
            "omega0",
            "min_delta_tau",
            "settings",
            "fidelity_true",
            "fidelity_true_std_error",
            "fidelity_exact",
        ]);
        let dynamics = ExactDynamics::new(&model, cm.windows, cm.total_time);
        let fidelity = |spectra: &CASpectra| -> Result<[String; 3]> {
            if !self.optimize {
                return Ok([String::new(), String::new(), String::new()]);
            }
            let r = optimize_dd(spectra, 4, cm.windows, cm.total_time, &self.opt, None)?;
            let mc = monte_carlo_fidelity(&r.best_control, &model, self.opt.mc_trajectories, rng::derive(cm.seed, 50))?;
            Ok([num(mc.mean), num(mc.std_error), num(dynamics.fidelity(&r.best_control))])
        };
        let ca_settings = UnknownSet::for_truncation(cm.windows, 4)?.keys().len();
        let exact = ca_spectra_exact(&model, cm.windows, cm.total_time, 4)?;
        let mut row = vec![
            "CA".to_string(),
            String::new(),
            String::new(),
            num(cm.total_time / cm.windows as f64),
            ca_settings.to_string(),
        ];
        row.extend(fidelity(&exact)?);
        table.push(row);
        for g in &self.grids {
            let (_, count) = principal_domain_and_count(g.m_max)?;
            let mut row = vec![
                format!("comb-{}", g.label),
                g.m_max.to_string(),
                num(g.omega0),
                num(delta_tau(self.t_coherence, self.reps, g.m_max)),
                count.to_string(),
            ];
            let spectra = if self.optimize { Some(comb_spectra(&model, g, self.reps, cm.windows, cm.total_time)?) } else { None };
            match spectra {
                Some(s) => row.extend(fidelity(&s)?),
                None => row.extend([String::new(), String::new(), String::new()]),
            }
            table.push(row);
        }
        art.csv("resources.csv", &table, prov);
        art.json(
            "summary.json",
            &json!({
                "experiment": prov.experiment,
                "g_over_gamma": self.ratio,
                "omega": cm.omega,
                "t_coherence": self.t_coherence,
                "repetitions": self.reps,
                "comb_grids": self.grids,
            }),
        )?;
        Ok(())
    }
}
