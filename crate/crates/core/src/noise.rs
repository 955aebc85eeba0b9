//! Symmetric random telegraph noise, optionally with a randomly phased coupling
//! modulation `g(t) = g cos(Ωt + φ)`.
//!
//! All rates and frequencies are angular and expressed in rad/μs; times in μs.
//! The noise field is `β(t) = g(t) ξ(t)` with `ξ(t) = ±1` flipping at Poisson rate γ,
//! so `⟨ξ(t)ξ(s)⟩ = e^{-2γ|t-s|}`.

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{QnsError, Result};
use crate::pauli::{C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    gamma: f64,
    g: f64,
    omega: f64,
    modulated: bool,
}

/// One separable term `coef · exp(Σ_j rates[j] t_j)` of a correlation function
/// restricted to descending times `t_1 ≥ … ≥ t_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpTerm {
    pub coef: C64,
    pub rates: Vec<C64>,
}

impl NoiseModel {
    /// Plain telegraph noise, `β(t) = g ξ(t)`.
    pub fn telegraph(gamma: f64, g: f64) -> Result<Self> {
        Self::validate(gamma, g, 0.0)?;
        Ok(NoiseModel {
            gamma,
            g,
            omega: 0.0,
            modulated: false,
        })
    }

    /// Telegraph noise with coupling `g cos(Ωt + φ)`, φ uniform per realisation.
    pub fn modulated(gamma: f64, g: f64, omega: f64) -> Result<Self> {
        Self::validate(gamma, g, omega)?;
        if omega <= 0.0 {
            return Err(QnsError::param("omega", "modulated model needs Ω > 0"));
        }
        Ok(NoiseModel {
            gamma,
            g,
            omega,
            modulated: true,
        })
    }

    /// `Ω = 0` gives the plain model, anything positive the modulated one.
    pub fn new(gamma: f64, g: f64, omega: f64) -> Result<Self> {
        if omega == 0.0 {
            Self::telegraph(gamma, g)
        } else {
            Self::modulated(gamma, g, omega)
        }
    }

    fn validate(gamma: f64, g: f64, omega: f64) -> Result<()> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(QnsError::param("gamma", format!("must be > 0, got {gamma}")));
        }
        if !(g >= 0.0 && g.is_finite()) {
            return Err(QnsError::param("g", format!("must be >= 0, got {g}")));
        }
        if !(omega >= 0.0 && omega.is_finite()) {
            return Err(QnsError::param("omega", format!("must be >= 0, got {omega}")));
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn g(&self) -> f64 {
        self.g
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn is_modulated(&self) -> bool {
        self.modulated
    }

    /// Same process with a different coupling strength.
    pub fn with_coupling(&self, g: f64) -> Result<Self> {
        Self::new(self.gamma, g, self.omega)
    }

    /// `⟨β(t1)…β(tk)⟩` for descending times, `k ≤ 4`.
    pub fn moment(&self, times: &[f64]) -> Result<f64> {
        check_times(times)?;
        Ok(self.moment_unchecked(times))
    }

    pub(crate) fn moment_unchecked(&self, t: &[f64]) -> f64 {
        let k = t.len();
        if k % 2 == 1 {
            return 0.0;
        }
        let two_gamma = 2.0 * self.gamma;
        let g = self.g;
        match k {
            0 => 1.0,
            2 => {
                let base = g * g * (-two_gamma * (t[0] - t[1])).exp();
                if self.modulated {
                    0.5 * base * (self.omega * (t[0] - t[1])).cos()
                } else {
                    base
                }
            }
            4 => {
                let base = g.powi(4) * (-two_gamma * (t[0] - t[1] + t[2] - t[3])).exp();
                if self.modulated {
                    let w = self.omega;
                    let avg = ((w * (t[0] + t[1] - t[2] - t[3])).cos()
                        + (w * (t[0] - t[1] + t[2] - t[3])).cos()
                        + (w * (t[0] - t[1] - t[2] + t[3])).cos())
                        / 8.0;
                    base * avg
                } else {
                    base
                }
            }
            _ => unreachable!("order checked by caller"),
        }
    }

    /// Joint cumulant for `k ∈ {2, 4}`: the zero-mean Wick subtraction of the moment.
    pub fn cumulant(&self, times: &[f64]) -> Result<f64> {
        check_times(times)?;
        match times.len() {
            2 => Ok(self.moment_unchecked(times)),
            4 => {
                let m2 = |a: usize, b: usize| self.moment_unchecked(&[times[a], times[b]]);
                Ok(self.moment_unchecked(times)
                    - m2(0, 1) * m2(2, 3)
                    - m2(0, 2) * m2(1, 3)
                    - m2(0, 3) * m2(1, 2))
            }
            k => Err(QnsError::UnsupportedOrder {
                order: k,
                supported: "2 or 4",
            }),
        }
    }

    /// Separable exponential expansion of the order-`k` moment on descending times.
    /// Empty for odd orders.
    pub fn moment_kernel(&self, k: usize) -> Result<Vec<ExpTerm>> {
        if k == 0 || k > 4 {
            return Err(QnsError::UnsupportedOrder {
                order: k,
                supported: "1..=4",
            });
        }
        if k % 2 == 1 {
            return Ok(Vec::new());
        }
        let two_gamma = 2.0 * self.gamma;
        let base: Vec<C64> = (0..k)
            .map(|j| C64::from(if j % 2 == 0 { -two_gamma } else { two_gamma }))
            .collect();
        let gk = self.g.powi(k as i32);
        if !self.modulated {
            return Ok(vec![ExpTerm {
                coef: C64::from(gk),
                rates: base,
            }]);
        }
        // φ-average of ∏cos(Ωt_j+φ): cosines of signed time combinations with
        // zero net sign, each split into two complex exponentials.
        let (patterns, coef): (&[&[f64]], f64) = if k == 2 {
            (&[&[1.0, -1.0]], gk / 4.0)
        } else {
            (
                &[
                    &[1.0, 1.0, -1.0, -1.0],
                    &[1.0, -1.0, 1.0, -1.0],
                    &[1.0, -1.0, -1.0, 1.0],
                ],
                gk / 16.0,
            )
        };
        let mut terms = Vec::with_capacity(2 * patterns.len());
        for pattern in patterns {
            for s in [1.0, -1.0] {
                let rates = base
                    .iter()
                    .zip(pattern.iter())
                    .map(|(b, p)| b + I * (self.omega * s * p))
                    .collect();
                terms.push(ExpTerm {
                    coef: C64::from(coef),
                    rates,
                });
            }
        }
        Ok(terms)
    }

    /// Separable expansion of the fourth cumulant on descending times, with
    /// identical-rate terms merged (the pair that factorises cancels exactly).
    pub fn cumulant4_kernel(&self) -> Vec<ExpTerm> {
        let m4 = self.moment_kernel(4).expect("order 4 supported");
        let m2 = self.moment_kernel(2).expect("order 2 supported");
        let mut terms = m4;
        for (a, b, c, d) in [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)] {
            for p in &m2 {
                for q in &m2 {
                    let mut rates = vec![C64::from(0.0); 4];
                    rates[a] = p.rates[0];
                    rates[b] = p.rates[1];
                    rates[c] = q.rates[0];
                    rates[d] = q.rates[1];
                    terms.push(ExpTerm {
                        coef: -p.coef * q.coef,
                        rates,
                    });
                }
            }
        }
        merge_terms(terms, self.g.powi(4))
    }

    /// Power spectral density `S_1(ω) = ∫ dτ ⟨β(τ)β(0)⟩ e^{-iωτ}`.
    pub fn psd(&self, omega: f64) -> f64 {
        let two_gamma = 2.0 * self.gamma;
        let lorentz = |w: f64| 2.0 * two_gamma / (two_gamma * two_gamma + w * w);
        let g2 = self.g * self.g;
        if self.modulated {
            0.25 * g2 * (lorentz(omega - self.omega) + lorentz(omega + self.omega))
        } else {
            g2 * lorentz(omega)
        }
    }

    /// Trispectrum `S_3(ω1,ω2,ω3) = ∫ d³τ C4(τ1,τ2,τ3,0) e^{-i Σ ω_j τ_j}`.
    ///
    /// Evaluated in closed form over the 24 time orderings. The modulated model has a
    /// cumulant component that does not decay in the gap between its two pairs; its
    /// transform is a principal value plus a delta sheet on `ω_a + ω_b = ±2Ω`. Point
    /// samples keep the principal value and omit the sheet.
    pub fn trispectrum(&self, w1: f64, w2: f64, w3: f64) -> f64 {
        self.trispectrum_damped(w1, w2, w3, 0.0)
    }

    /// Trispectrum of the windowed cumulant `C4(τ)·e^{−ε·span(τ)}`, where `span` is
    /// the largest minus the smallest of the four times. For `ε > 0` every component
    /// decays, which resolves the delta sheet into a Lorentzian ridge of width `ε`.
    pub fn trispectrum_damped(&self, w1: f64, w2: f64, w3: f64, eps: f64) -> f64 {
        let kernel = self.cumulant4_kernel();
        let labels = [w1, w2, w3, -(w1 + w2 + w3)];
        let mut total = C64::from(0.0);
        for perm in permutations4() {
            for term in &kernel {
                let mut partial = C64::from(0.0);
                let mut value = term.coef;
                for m in 0..3 {
                    partial += term.rates[m] - I * labels[perm[m]];
                    let p = if partial.re == 0.0 { partial - eps } else { partial };
                    if p.norm() == 0.0 {
                        value = C64::from(0.0);
                        break;
                    }
                    value /= -p;
                }
                total += value;
            }
        }
        total.re
    }

    /// `order = 1` is the PSD, `order = 3` the trispectrum. The bispectrum (order 2)
    /// vanishes identically for symmetric telegraph noise and is rejected.
    pub fn polyspectrum(&self, order: usize, freqs: &[f64]) -> Result<f64> {
        match (order, freqs) {
            (1, [w]) => Ok(self.psd(*w)),
            (3, [a, b, c]) => Ok(self.trispectrum(*a, *b, *c)),
            (1, _) | (3, _) => Err(QnsError::param(
                "freqs",
                format!("order {order} takes {order} frequencies, got {}", freqs.len()),
            )),
            _ => Err(QnsError::UnsupportedOrder {
                order,
                supported: "1 (PSD) or 3 (trispectrum); S_2 ≡ 0 for symmetric telegraph noise",
            }),
        }
    }

    pub fn sample_trajectory<R: Rng + ?Sized>(&self, horizon: f64, rng: &mut R) -> Result<Trajectory> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(QnsError::param("T", format!("must be > 0, got {horizon}")));
        }
        let initial_sign: i8 = if rng.random::<bool>() { 1 } else { -1 };
        let mean = self.gamma * horizon;
        let count = if mean > 0.0 {
            Poisson::new(mean)
                .map_err(|e| QnsError::param("gamma", e.to_string()))?
                .sample(rng) as usize
        } else {
            0
        };
        // (0, T]: 1 - u with u ∈ [0, 1)
        let mut switch_times: Vec<f64> = (0..count)
            .map(|_| horizon * (1.0 - rng.random::<f64>()))
            .collect();
        switch_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        switch_times.dedup();
        let phi = self
            .modulated
            .then(|| 2.0 * PI * rng.random::<f64>());
        Ok(Trajectory {
            initial_sign,
            switch_times,
            phi,
            horizon,
        })
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    let k = times.len();
    if k == 0 || k > 4 {
        return Err(QnsError::UnsupportedOrder {
            order: k,
            supported: "1..=4",
        });
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[0] < w[1]) {
        return Err(QnsError::Ordering(times.to_vec()));
    }
    Ok(())
}

fn merge_terms(mut terms: Vec<ExpTerm>, scale: f64) -> Vec<ExpTerm> {
    let key = |t: &ExpTerm| -> Vec<(u64, u64)> {
        t.rates.iter().map(|r| (r.re.to_bits(), r.im.to_bits())).collect()
    };
    terms.sort_by_key(key);
    let mut merged: Vec<ExpTerm> = Vec::new();
    for t in terms {
        match merged.last_mut() {
            Some(last) if key(last) == key(&t) => last.coef += t.coef,
            _ => merged.push(t),
        }
    }
    let tol = 1e-14 * scale.max(f64::MIN_POSITIVE);
    merged.retain(|t| t.coef.norm() > tol);
    merged
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let distinct = (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j]));
                    if distinct {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// One realisation of the noise on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub initial_sign: i8,
    pub switch_times: Vec<f64>,
    pub phi: Option<f64>,
    pub horizon: f64,
}

impl Trajectory {
    /// `ξ(t)`; a switch at time `s` takes effect for `t ≥ s`.
    pub fn sign_at(&self, t: f64) -> f64 {
        let flips = self.switch_times.partition_point(|&s| s <= t);
        let s = f64::from(self.initial_sign);
        if flips % 2 == 0 {
            s
        } else {
            -s
        }
    }

    /// `∫_a^b β(t) dt` in closed form across switch events.
    pub fn phase_integral(&self, model: &NoiseModel, a: f64, b: f64) -> f64 {
        let start = self.switch_times.partition_point(|&s| s <= a);
        let mut sign = self.sign_at(a);
        let mut left = a;
        let mut acc = 0.0;
        let mut seg = |l: f64, r: f64, sgn: f64| {
            acc += sgn * self.envelope_integral(model, l, r);
        };
        for &s in &self.switch_times[start..] {
            if s >= b {
                break;
            }
            seg(left, s, sign);
            sign = -sign;
            left = s;
        }
        seg(left, b, sign);
        model.g * acc
    }

    fn envelope_integral(&self, model: &NoiseModel, l: f64, r: f64) -> f64 {
        match self.phi {
            Some(phi) if model.modulated => {
                let w = model.omega;
                ((w * r + phi).sin() - (w * l + phi).sin()) / w
            }
            _ => r - l,
        }
    }
}

/// Debug dump of an ensemble: one row per switch (a blank `switch_time` for
/// trajectories without switches).
pub fn write_trajectories_csv<W: Write>(out: &mut W, trajectories: &[Trajectory]) -> Result<()> {
    writeln!(out, "trajectory_id,initial_sign,phi,switch_time")?;
    for (id, tr) in trajectories.iter().enumerate() {
        let phi = tr.phi.map(|p| format!("{p}")).unwrap_or_default();
        if tr.switch_times.is_empty() {
            writeln!(out, "{id},{},{phi},", tr.initial_sign)?;
        }
        for s in &tr.switch_times {
            writeln!(out, "{id},{},{phi},{s}", tr.initial_sign)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_relative_eq;

    fn plain() -> NoiseModel {
        NoiseModel::telegraph(0.02, 0.6).unwrap()
    }

    #[test]
    fn validation() {
        assert!(NoiseModel::telegraph(0.0, 1.0).is_err());
        assert!(NoiseModel::telegraph(0.1, -1.0).is_err());
        assert!(NoiseModel::modulated(0.1, 1.0, 0.0).is_err());
        assert!(!NoiseModel::new(0.1, 1.0, 0.0).unwrap().is_modulated());
    }

    #[test]
    fn zero_lag_second_moment() {
        let m = plain();
        assert_relative_eq!(m.moment(&[1.3, 1.3]).unwrap(), 0.36, epsilon = 1e-15);
    }

    #[test]
    fn fourth_moment_with_vanishing_exponent() {
        let m = plain();
        assert_relative_eq!(m.moment(&[2.0, 2.0, 0.5, 0.5]).unwrap(), 0.1296, epsilon = 1e-15);
    }

    #[test]
    fn modulated_zero_lag_matches_phase_average() {
        let m = NoiseModel::modulated(0.02, 0.6, 3.1).unwrap();
        let t = 0.77;
        // numerical φ-average of g²cos²(Ωt+φ)
        let n = 4096;
        let avg: f64 = (0..n)
            .map(|i| {
                let phi = 2.0 * PI * i as f64 / n as f64;
                0.36 * (3.1 * t + phi).cos().powi(2)
            })
            .sum::<f64>()
            / n as f64;
        assert_relative_eq!(m.moment(&[t, t]).unwrap(), avg, epsilon = 1e-12);
        assert_relative_eq!(m.moment(&[t, t]).unwrap(), 0.18, epsilon = 1e-15);
    }

    #[test]
    fn modulated_fourth_moment_matches_phase_average() {
        let m = NoiseModel::modulated(0.05, 0.9, 2.3).unwrap();
        let t = [2.9, 2.0, 1.1, 0.3];
        let n = 4096;
        let avg: f64 = (0..n)
            .map(|i| {
                let phi = 2.0 * PI * i as f64 / n as f64;
                t.iter().map(|tj| (2.3 * tj + phi).cos()).product::<f64>()
            })
            .sum::<f64>()
            / n as f64;
        let expect = 0.9f64.powi(4) * (-0.1 * (t[0] - t[1] + t[2] - t[3])).exp() * avg;
        assert_relative_eq!(m.moment(&t).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn kernel_reproduces_moment() {
        for model in [plain(), NoiseModel::modulated(0.03, 0.7, 1.9).unwrap()] {
            for t in [vec![2.5, 0.4], vec![3.0, 2.2, 1.4, 0.1], vec![1.0, 1.0, 1.0, 1.0]] {
                let kernel = model.moment_kernel(t.len()).unwrap();
                let v: C64 = kernel
                    .iter()
                    .map(|term| {
                        term.coef
                            * term
                                .rates
                                .iter()
                                .zip(&t)
                                .map(|(r, tj)| (r * tj).exp())
                                .product::<C64>()
                    })
                    .sum();
                assert_relative_eq!(v.re, model.moment(&t).unwrap(), epsilon = 1e-14);
                assert!(v.im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn ordering_and_order_errors() {
        let m = plain();
        assert!(matches!(m.moment(&[0.1, 0.5]), Err(QnsError::Ordering(_))));
        assert!(matches!(
            m.moment(&[5.0, 4.0, 3.0, 2.0, 1.0]),
            Err(QnsError::UnsupportedOrder { .. })
        ));
        assert!(matches!(
            m.cumulant(&[3.0, 2.0, 1.0]),
            Err(QnsError::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn cumulant_equal_times_is_minus_two_g4() {
        let m = plain();
        let c = m.cumulant(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_relative_eq!(c, -2.0 * 0.6f64.powi(4), epsilon = 1e-15);
        assert_eq!(m.cumulant(&[2.0, 1.0]).unwrap(), m.moment(&[2.0, 1.0]).unwrap());
    }

    #[test]
    fn cumulant_kernel_matches_direct_subtraction() {
        for model in [plain(), NoiseModel::modulated(0.03, 0.7, 1.9).unwrap()] {
            let t = [3.1, 1.7, 1.2, 0.2];
            let kernel = model.cumulant4_kernel();
            let v: f64 = kernel
                .iter()
                .map(|term| {
                    (term.coef
                        * term
                            .rates
                            .iter()
                            .zip(&t)
                            .map(|(r, tj)| (r * tj).exp())
                            .product::<C64>())
                    .re
                })
                .sum();
            assert_relative_eq!(v, model.cumulant(&t).unwrap(), epsilon = 1e-14);
        }
        // plain telegraph: a single merged term −2g⁴e^{−2γ(t1+t2−t3−t4)}
        let k = plain().cumulant4_kernel();
        assert_eq!(k.len(), 1);
        assert_relative_eq!(k[0].coef.re, -2.0 * 0.6f64.powi(4), epsilon = 1e-15);
    }

    #[test]
    fn psd_at_zero_is_g2_over_gamma() {
        let m = plain();
        assert_relative_eq!(m.psd(0.0), 0.36 / 0.02, epsilon = 1e-12);
        assert_eq!(m.polyspectrum(1, &[0.0]).unwrap(), m.psd(0.0));
    }

    #[test]
    fn polyspectrum_rejects_bispectrum() {
        let m = plain();
        assert!(matches!(
            m.polyspectrum(2, &[0.1, 0.2]),
            Err(QnsError::UnsupportedOrder { order: 2, .. })
        ));
        assert!(m.polyspectrum(3, &[0.1]).is_err());
    }

    #[test]
    fn trispectrum_is_real_and_symmetric() {
        let m = NoiseModel::telegraph(0.3, 0.5).unwrap();
        let a = m.trispectrum(0.2, -0.4, 0.7);
        let b = m.trispectrum(-0.4, 0.7, 0.2);
        let c = m.trispectrum(-0.2, 0.4, -0.7);
        let d = m.trispectrum(0.2, -0.4, -(0.2 - 0.4 + 0.7));
        assert_relative_eq!(a, b, epsilon = 1e-12);
        assert_relative_eq!(a, c, epsilon = 1e-12);
        assert_relative_eq!(a, d, epsilon = 1e-12);
    }

    #[test]
    fn trajectory_sign_and_phase() {
        let tr = Trajectory {
            initial_sign: 1,
            switch_times: vec![1.0, 2.5],
            phi: None,
            horizon: 3.0,
        };
        assert_eq!(tr.sign_at(0.5), 1.0);
        assert_eq!(tr.sign_at(1.0), -1.0);
        assert_eq!(tr.sign_at(2.9), 1.0);
        let m = NoiseModel::telegraph(0.1, 2.0).unwrap();
        // 2·(1 − 1.5 + 0.5)
        assert_relative_eq!(tr.phase_integral(&m, 0.0, 3.0), 0.0, epsilon = 1e-15);
        assert_relative_eq!(tr.phase_integral(&m, 0.5, 2.0), 2.0 * (0.5 - 1.0), epsilon = 1e-15);
    }

    #[test]
    fn sampling_is_seeded_and_valid() {
        let m = NoiseModel::modulated(0.5, 1.0, 2.0).unwrap();
        let a = m.sample_trajectory(10.0, &mut rng::stream(3, 0)).unwrap();
        let b = m.sample_trajectory(10.0, &mut rng::stream(3, 0)).unwrap();
        assert_eq!(a, b);
        assert!(a.switch_times.windows(2).all(|w| w[0] < w[1]));
        assert!(a.switch_times.iter().all(|&s| s > 0.0 && s <= 10.0));
        assert!(a.phi.is_some());
        assert!(m.sample_trajectory(0.0, &mut rng::stream(3, 0)).is_err());
    }

    #[test]
    fn vanishing_horizon_has_no_switches() {
        let m = plain();
        let mut r = rng::stream(1, 0);
        for _ in 0..1000 {
            assert!(m.sample_trajectory(1e-12, &mut r).unwrap().switch_times.is_empty());
        }
    }

    #[test]
    fn csv_dump() {
        let trs = vec![
            Trajectory {
                initial_sign: -1,
                switch_times: vec![],
                phi: None,
                horizon: 1.0,
            },
            Trajectory {
                initial_sign: 1,
                switch_times: vec![0.25, 0.5],
                phi: Some(1.5),
                horizon: 1.0,
            },
        ];
        let mut buf = Vec::new();
        write_trajectories_csv(&mut buf, &trs).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(
            s,
            "trajectory_id,initial_sign,phi,switch_time\n0,-1,,\n1,1,1.5,0.25\n1,1,1.5,0.5\n"
        );
    }
}
