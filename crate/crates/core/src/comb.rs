//! Frequency-comb baseline: principal domain of the trispectrum grid, resource
//! counts, idealised sampling of the polyspectra and reconstruction of CA spectra
//! from the samples.
//!
//! Samples are interpolated with hat functions on the comb, whose inverse Fourier
//! transform is closed form:
//! `C(τ) = (ω0/2π)^d Π_j sinc²(ω0 τ_j/2) Σ_m S(mω0) e^{i ω0 m·τ}`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::io::{BufRead, Write};

use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::DigitalControl;
use crate::error::{QnsError, Result};
use crate::noise::NoiseModel;
use crate::pauli::{C64, I};
use crate::quad::ordered_window_integral;
use crate::rng;
use crate::spectra::{multi_indices, CASpectra, Provenance};

pub type Triple = [i64; 3];

/// Orbit label of a trispectrum grid point under permutations of
/// `(m1, m2, m3, −Σm)` and a global sign flip.
pub fn canonical(m: &Triple) -> [i64; 4] {
    let mut a = [m[0], m[1], m[2], -(m[0] + m[1] + m[2])];
    let mut b = a.map(|x| -x);
    a.sort_unstable();
    b.sort_unstable();
    a.max(b)
}

/// One representative per orbit of the cube `|m_j| ≤ m_max`, plus the total
/// settings count (PSD samples `m = 1..m_max` and the trispectrum orbits).
pub fn principal_domain_and_count(m_max: usize) -> Result<(Vec<Triple>, usize)> {
    if m_max < 1 {
        return Err(QnsError::param("m_max", "must be ≥ 1"));
    }
    let reps = principal_domain(m_max);
    let count = m_max + reps.len();
    Ok((reps, count))
}

fn principal_domain(m_max: usize) -> Vec<Triple> {
    let m = m_max as i64;
    let mut seen = HashMap::new();
    let mut reps = Vec::new();
    for a in -m..=m {
        for b in -m..=m {
            for c in -m..=m {
                let t = [a, b, c];
                seen.entry(canonical(&t)).or_insert_with(|| {
                    reps.push(t);
                });
            }
        }
    }
    reps
}

/// Closed-form settings count `m + (m+1)(m+2)(2m+3)/6`.
pub fn resource_count(m_max: usize) -> usize {
    let m = m_max;
    m + (m + 1) * (m + 2) * (2 * m + 3) / 6
}

/// Sampling time step `T_coherence / M / m_max`.
pub fn delta_tau(coherence_time: f64, repetitions: usize, m_max: usize) -> f64 {
    coherence_time / repetitions as f64 / m_max as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyspectraGrid {
    pub omega0: f64,
    pub m_max: usize,
    /// `S_1(mω0)` for `m = 0..=m_max`.
    pub psd_samples: Vec<f64>,
    /// `S_3(ω0·m)` keyed by principal-domain representatives.
    pub tri_samples: BTreeMap<Triple, f64>,
    pub repetitions: usize,
    pub tau0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingNoise {
    pub sigma: f64,
    pub seed: u64,
}

/// Evaluates the analytic polyspectra on the comb (optionally with additive
/// Gaussian noise on every sample).
pub fn sample_polyspectra(
    model: &NoiseModel,
    omega0: f64,
    m_max: usize,
    repetitions: usize,
    noise: Option<SamplingNoise>,
) -> Result<PolyspectraGrid> {
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(QnsError::param("omega0", "must be > 0"));
    }
    let reps = principal_domain_and_count(m_max)?.0;
    let mut psd_samples: Vec<f64> = (0..=m_max).map(|m| model.psd(m as f64 * omega0)).collect();
    let mut tri: Vec<f64> = reps
        .par_iter()
        .map(|t| model.trispectrum_damped(t[0] as f64 * omega0, t[1] as f64 * omega0, t[2] as f64 * omega0, omega0))
        .collect();
    if let Some(n) = noise {
        let normal = Normal::new(0.0, n.sigma).map_err(|e| QnsError::param("sigma", e.to_string()))?;
        let mut r = rng::substream(n.seed, 2, 0);
        for v in psd_samples.iter_mut() {
            *v = (*v + normal.sample(&mut r)).max(0.0);
        }
        for v in tri.iter_mut() {
            *v += normal.sample(&mut r);
        }
    }
    Ok(PolyspectraGrid {
        omega0,
        m_max,
        psd_samples,
        tri_samples: reps.into_iter().zip(tri).collect(),
        repetitions,
        tau0: 2.0 * PI / omega0,
    })
}

impl PolyspectraGrid {
    /// All-zero grid of the given shape.
    pub fn zeros(omega0: f64, m_max: usize, repetitions: usize) -> Result<Self> {
        let reps = principal_domain_and_count(m_max)?.0;
        Ok(PolyspectraGrid {
            omega0,
            m_max,
            psd_samples: vec![0.0; m_max + 1],
            tri_samples: reps.into_iter().map(|t| (t, 0.0)).collect(),
            repetitions,
            tau0: 2.0 * PI / omega0,
        })
    }

    /// Number of experimental settings this grid stands for.
    pub fn settings_count(&self) -> usize {
        self.m_max + self.tri_samples.len()
    }

    /// Hat-interpolated PSD.
    pub fn psd(&self, omega: f64) -> f64 {
        let x = omega.abs() / self.omega0;
        let i = x.floor() as usize;
        let f = x - i as f64;
        let at = |m: usize| self.psd_samples.get(m).copied().unwrap_or(0.0);
        (1.0 - f) * at(i) + f * at(i + 1)
    }

    /// Reconstructed second cumulant `C2(τ)`.
    pub fn correlation(&self, tau: f64) -> f64 {
        let w = self.omega0;
        let mut s = self.psd_samples[0];
        for (m, v) in self.psd_samples.iter().enumerate().skip(1) {
            s += 2.0 * v * (m as f64 * w * tau).cos();
        }
        w / (2.0 * PI) * sinc2(0.5 * w * tau) * s
    }

    /// Full cube of trispectrum samples indexed `[m1+M][m2+M][m3+M]`.
    fn tri_cube(&self) -> Vec<f64> {
        let m = self.m_max as i64;
        let side = (2 * m + 1) as usize;
        let by_orbit: HashMap<[i64; 4], f64> = self.tri_samples.iter().map(|(t, v)| (canonical(t), *v)).collect();
        let mut cube = vec![0.0; side * side * side];
        for a in -m..=m {
            for b in -m..=m {
                for c in -m..=m {
                    let idx = (((a + m) as usize) * side + (b + m) as usize) * side + (c + m) as usize;
                    cube[idx] = by_orbit[&canonical(&[a, b, c])];
                }
            }
        }
        cube
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "kind,m1,m2,m3,value")?;
        for (m, v) in self.psd_samples.iter().enumerate() {
            writeln!(out, "psd,{m},,,{v:e}")?;
        }
        for (t, v) in &self.tri_samples {
            writeln!(out, "trispectrum,{},{},{},{v:e}", t[0], t[1], t[2])?;
        }
        writeln!(out, "# omega0={}", self.omega0)?;
        writeln!(out, "# m_max={}", self.m_max)?;
        writeln!(out, "# repetitions={}", self.repetitions)?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let bad = |l: usize| QnsError::Config(format!("polyspectra CSV line {l} is malformed"));
        let (mut omega0, mut m_max, mut repetitions) = (None, None, 1usize);
        let mut psd = BTreeMap::new();
        let mut tri = BTreeMap::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if i == 0 || line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((k, v)) = meta.trim().split_once('=') {
                    match k {
                        "omega0" => omega0 = Some(v.parse::<f64>().map_err(|_| bad(i + 1))?),
                        "m_max" => m_max = Some(v.parse::<usize>().map_err(|_| bad(i + 1))?),
                        "repetitions" => repetitions = v.parse().map_err(|_| bad(i + 1))?,
                        _ => {}
                    }
                }
                continue;
            }
            let c: Vec<&str> = line.split(',').collect();
            if c.len() != 5 {
                return Err(bad(i + 1));
            }
            let v: f64 = c[4].parse().map_err(|_| bad(i + 1))?;
            let p = |s: &str| s.parse::<i64>().map_err(|_| bad(i + 1));
            match c[0] {
                "psd" => {
                    psd.insert(p(c[1])? as usize, v);
                }
                "trispectrum" => {
                    tri.insert([p(c[1])?, p(c[2])?, p(c[3])?], v);
                }
                _ => return Err(bad(i + 1)),
            }
        }
        let omega0 = omega0.ok_or_else(|| QnsError::Config("polyspectra CSV lacks `# omega0=`".into()))?;
        let m_max = m_max.ok_or_else(|| QnsError::Config("polyspectra CSV lacks `# m_max=`".into()))?;
        Ok(PolyspectraGrid {
            omega0,
            m_max,
            psd_samples: (0..=m_max).map(|m| psd.get(&m).copied().unwrap_or(0.0)).collect(),
            tri_samples: tri,
            repetitions,
            tau0: 2.0 * PI / omega0,
        })
    }
}

fn sinc2(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0
    } else {
        (x.sin() / x).powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionOptions {
    /// Lag-grid points per axis on `[0, T]` for the fourth cumulant.
    pub lag_points: usize,
    /// Gauss–Legendre nodes per time variable.
    pub quadrature_nodes: usize,
}

impl Default for ReconstructionOptions {
    fn default() -> Self {
        ReconstructionOptions {
            lag_points: 97,
            quadrature_nodes: 8,
        }
    }
}

/// CA spectra (orders 1..=4) implied by the sampled polyspectra.
pub fn comb_to_ca_spectra(
    grid: &PolyspectraGrid,
    windows: usize,
    total_time: f64,
    options: &ReconstructionOptions,
) -> Result<CASpectra> {
    if grid.psd_samples.is_empty() {
        return Err(QnsError::Config("empty polyspectra grid".into()));
    }
    if windows == 0 || !(total_time > 0.0) {
        return Err(QnsError::param("L/T", "need L ≥ 1 and T > 0"));
    }
    let spacing = total_time / (options.lag_points.max(2) - 1) as f64;
    let nyquist = PI / (grid.m_max as f64 * grid.omega0);
    if spacing > nyquist {
        return Err(QnsError::Config(format!(
            "lag spacing {spacing:.4} μs exceeds the Nyquist limit {nyquist:.4} μs of the comb cutoff"
        )));
    }
    let lag = LagGrid::build(grid, total_time, options.lag_points);
    let tau = total_time / windows as f64;
    let n = options.quadrature_nodes;
    let mut out = CASpectra::new(windows, total_time, Provenance::CombDerived);
    for k in 1..=4 {
        out.orders.insert(k);
        let keys = multi_indices(windows, k);
        let vals: Vec<f64> = keys
            .par_iter()
            .map(|key| match k {
                2 => ordered_window_integral(&key.n, tau, 2 * n, |t| grid.correlation(t[0] - t[1])),
                4 => ordered_window_integral(&key.n, tau, n, |t| {
                    let c = |a: usize, b: usize| grid.correlation(t[a] - t[b]);
                    lag.eval(t[0] - t[3], t[1] - t[3], t[2] - t[3]) + c(0, 1) * c(2, 3) + c(0, 2) * c(1, 3) + c(0, 3) * c(1, 2)
                }),
                _ => 0.0,
            })
            .collect();
        for (key, v) in keys.into_iter().zip(vals) {
            out.values.insert(key, v);
        }
    }
    Ok(out)
}

/// Reconstructed fourth cumulant tabulated on `[0,T]³`.
struct LagGrid {
    points: usize,
    spacing: f64,
    values: Vec<f64>,
}

impl LagGrid {
    fn build(grid: &PolyspectraGrid, total_time: f64, points: usize) -> Self {
        let m = grid.m_max as i64;
        let side = (2 * m + 1) as usize;
        let w = grid.omega0;
        let spacing = total_time / (points - 1) as f64;
        let cube = grid.tri_cube();
        let lags: Vec<f64> = (0..points).map(|i| i as f64 * spacing).collect();
        // phase[i][a] = e^{i ω0 (a−M) τ_i}
        let phase: Vec<Vec<C64>> = lags
            .iter()
            .map(|t| (-m..=m).map(|a| (I * (a as f64 * w * t)).exp()).collect())
            .collect();
        // contract m3, then m2, then m1
        let stage1: Vec<C64> = (0..side * side)
            .into_par_iter()
            .flat_map_iter(|ab| {
                let row = &cube[ab * side..(ab + 1) * side];
                phase.iter().map(move |ph| row.iter().zip(ph).map(|(v, p)| p * v).sum::<C64>())
            })
            .collect(); // [a][b][k]
        let stage2: Vec<C64> = (0..side)
            .into_par_iter()
            .flat_map_iter(|a| {
                let stage1 = &stage1;
                let phase = &phase;
                (0..points).flat_map(move |j| {
                    (0..points).map(move |k| {
                        (0..side)
                            .map(|b| phase[j][b] * stage1[(a * side + b) * points + k])
                            .sum::<C64>()
                    })
                })
            })
            .collect(); // [a][j][k]
        let norm = (w / (2.0 * PI)).powi(3);
        let values: Vec<f64> = (0..points * points * points)
            .into_par_iter()
            .map(|idx| {
                let (i, j, k) = (idx / (points * points), (idx / points) % points, idx % points);
                let s: C64 = (0..side).map(|a| phase[i][a] * stage2[(a * points + j) * points + k]).sum();
                let env = sinc2(0.5 * w * lags[i]) * sinc2(0.5 * w * lags[j]) * sinc2(0.5 * w * lags[k]);
                norm * env * s.re
            })
            .collect();
        LagGrid { points, spacing, values }
    }

    /// Trilinear interpolation; lags are non-negative for descending times.
    fn eval(&self, x: f64, y: f64, z: f64) -> f64 {
        let n = self.points;
        let locate = |v: f64| -> (usize, f64) {
            let u = (v / self.spacing).clamp(0.0, (n - 1) as f64);
            let i = (u.floor() as usize).min(n - 2);
            (i, u - i as f64)
        };
        let ((i, fx), (j, fy), (k, fz)) = (locate(x), locate(y), locate(z));
        let at = |a: usize, b: usize, c: usize| self.values[(a * n + b) * n + c];
        let mut s = 0.0;
        for (da, wa) in [(0, 1.0 - fx), (1, fx)] {
            for (db, wb) in [(0, 1.0 - fy), (1, fy)] {
                for (dc, wc) in [(0, 1.0 - fz), (1, fz)] {
                    s += wa * wb * wc * at(i + da, j + db, k + dc);
                }
            }
        }
        s
    }
}

/// Second-order dynamical integral `(1/2π)∫|F_z(ω)|² S(ω) dω` of `base` repeated
/// `repetitions` times, directly and in the comb approximation
/// `(M/τ0) Σ_m |F_z^{base}(mω0)|² S(mω0)` with `ω0 = 2π/τ0`.
pub fn comb_dynamical_integral(base: &DigitalControl, repetitions: usize, model: &NoiseModel) -> Result<(f64, f64)> {
    if repetitions == 0 {
        return Err(QnsError::param("repetitions", "must be ≥ 1"));
    }
    let tau0 = base.total_time();
    let w0 = 2.0 * PI / tau0;
    let mr = repetitions as f64;
    let f_base = |w: f64| base.frequency_ff(w)[2];
    let comb_factor = |w: f64| -> f64 {
        let x = 0.5 * w * tau0;
        if x.sin().abs() < 1e-12 {
            mr * mr
        } else {
            ((mr * x).sin() / x.sin()).powi(2)
        }
    };
    // direct integral on a grid fine enough to resolve the comb teeth (width ω0/M)
    let w_max = 40.0 * w0 + 40.0 * model.gamma() + 4.0 * model.omega();
    let dw = w0 / (mr * 64.0);
    let steps = (w_max / dw).ceil() as usize;
    let direct: f64 = (0..=steps)
        .into_par_iter()
        .map(|i| {
            let w = i as f64 * dw;
            let weight = if i == 0 { 0.5 } else { 1.0 };
            weight * f_base(w).norm_sqr() * comb_factor(w) * model.psd(w)
        })
        .sum::<f64>()
        * 2.0
        * dw
        / (2.0 * PI);
    let m_cut = (w_max / w0).ceil() as i64;
    let comb: f64 = (-m_cut..=m_cut)
        .map(|m| {
            let w = m as f64 * w0;
            f_base(w).norm_sqr() * model.psd(w)
        })
        .sum::<f64>()
        * mr
        / tau0;
    Ok((direct, comb))
}
