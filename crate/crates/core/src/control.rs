//! Digital control: `L` instantaneous pulses on an equispaced grid of windows.
//!
//! Window `n` (1-based in the docs, 0-based in code) covers `[(n−1)τ, nτ]` with
//! `τ = T/L`; pulse `n` acts at the start of window `n`. A pulse `(θ, n̂)` is the
//! unitary `exp(iθ n̂·σ)`, so a π rotation about x has `θ = π/2`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QnsError, Result};
use crate::pauli::{pauli_components, rotation, sigma, Mat2, C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub theta: f64,
    pub axis: [f64; 3],
}

impl Pulse {
    pub fn identity() -> Self {
        Pulse {
            theta: 0.0,
            axis: [0.0, 0.0, 1.0],
        }
    }

    /// π rotation about `x`.
    pub fn pi_x() -> Self {
        Pulse {
            theta: FRAC_PI_2,
            axis: [1.0, 0.0, 0.0],
        }
    }

    /// Axis from polar angle `polar` and azimuth `azimuth`.
    pub fn from_angles(theta: f64, polar: f64, azimuth: f64) -> Self {
        Pulse {
            theta,
            axis: [
                polar.sin() * azimuth.cos(),
                polar.sin() * azimuth.sin(),
                polar.cos(),
            ],
        }
    }

    /// `(θ, polar, azimuth)`; inverse of [`Pulse::from_angles`] up to angle wrapping.
    pub fn angles(&self) -> [f64; 3] {
        let [x, y, z] = self.axis;
        [self.theta, z.clamp(-1.0, 1.0).acos(), y.atan2(x)]
    }

    pub fn unitary(&self) -> Mat2 {
        rotation(self.theta, &self.axis)
    }
}

/// Sampling law for random controls: `θ ~ U[0, theta_max]`, axis uniform on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomControlLaw {
    pub theta_max: f64,
}

impl Default for RandomControlLaw {
    fn default() -> Self {
        RandomControlLaw { theta_max: PI }
    }
}

impl RandomControlLaw {
    pub fn sample_pulse<R: Rng + ?Sized>(&self, rng: &mut R) -> Pulse {
        let theta = self.theta_max * rng.random::<f64>();
        let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
        let phi = 2.0 * PI * rng.random::<f64>();
        let r = (1.0 - z * z).max(0.0).sqrt();
        Pulse {
            theta,
            axis: [r * phi.cos(), r * phi.sin(), z],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ControlRecord", into = "ControlRecord")]
pub struct DigitalControl {
    total_time: f64,
    pulses: Vec<Pulse>,
    y: Vec<[f64; 3]>,
    net: Mat2,
}

#[derive(Serialize, Deserialize)]
struct ControlRecord {
    #[serde(rename = "T")]
    total_time: f64,
    #[serde(rename = "L")]
    windows: usize,
    pulses: Vec<Pulse>,
}

impl TryFrom<ControlRecord> for DigitalControl {
    type Error = QnsError;
    fn try_from(r: ControlRecord) -> Result<Self> {
        DigitalControl::compile(r.pulses, r.windows, r.total_time)
    }
}

impl From<DigitalControl> for ControlRecord {
    fn from(c: DigitalControl) -> Self {
        ControlRecord {
            total_time: c.total_time,
            windows: c.windows(),
            pulses: c.pulses,
        }
    }
}

impl DigitalControl {
    pub fn compile(pulses: Vec<Pulse>, windows: usize, total_time: f64) -> Result<Self> {
        if windows == 0 {
            return Err(QnsError::param("L", "need at least one window"));
        }
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(QnsError::param("T", format!("must be > 0, got {total_time}")));
        }
        if pulses.len() != windows {
            return Err(QnsError::Arity {
                expected: windows,
                got: pulses.len(),
            });
        }
        for (index, p) in pulses.iter().enumerate() {
            let norm = Vector3::from(p.axis).norm();
            if !p.theta.is_finite() || !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
                return Err(QnsError::NonUnitAxis { index, norm });
            }
        }
        let mut q = sigma(0);
        let mut y = Vec::with_capacity(windows);
        for p in &pulses {
            q = p.unitary() * q;
            let toggled = q.adjoint() * sigma(3) * q;
            let c = pauli_components(&toggled);
            y.push([c[1].re, c[2].re, c[3].re]);
        }
        Ok(DigitalControl {
            total_time,
            pulses,
            y,
            net: q,
        })
    }

    pub fn free_evolution(windows: usize, total_time: f64) -> Result<Self> {
        Self::compile(vec![Pulse::identity(); windows], windows, total_time)
    }

    /// π-x pulses at `T/4` and `3T/4`; needs `L` divisible by 4.
    pub fn cpmg(windows: usize, total_time: f64) -> Result<Self> {
        if windows == 0 || windows % 4 != 0 {
            return Err(QnsError::param(
                "L",
                format!("CPMG on this grid needs L divisible by 4, got {windows}"),
            ));
        }
        let mut pulses = vec![Pulse::identity(); windows];
        pulses[windows / 4] = Pulse::pi_x();
        pulses[3 * windows / 4] = Pulse::pi_x();
        Self::compile(pulses, windows, total_time)
    }

    /// From `3L` parameters `(θ, polar, azimuth)` per pulse.
    pub fn from_params(params: &[f64], windows: usize, total_time: f64) -> Result<Self> {
        if params.len() != 3 * windows {
            return Err(QnsError::Arity {
                expected: 3 * windows,
                got: params.len() / 3,
            });
        }
        let pulses = params
            .chunks_exact(3)
            .map(|p| Pulse::from_angles(p[0], p[1], p[2]))
            .collect();
        Self::compile(pulses, windows, total_time)
    }

    pub fn params(&self) -> Vec<f64> {
        self.pulses.iter().flat_map(|p| p.angles()).collect()
    }

    pub fn random<R: Rng + ?Sized>(
        windows: usize,
        total_time: f64,
        law: &RandomControlLaw,
        rng: &mut R,
    ) -> Result<Self> {
        let pulses = (0..windows).map(|_| law.sample_pulse(rng)).collect();
        Self::compile(pulses, windows, total_time)
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }
    pub fn windows(&self) -> usize {
        self.pulses.len()
    }
    pub fn tau(&self) -> f64 {
        self.total_time / self.windows() as f64
    }
    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    /// Switching vectors `y⃗(n)` for each window (0-based).
    pub fn switching(&self) -> &[[f64; 3]] {
        &self.y
    }

    /// `y_z(n)` over the windows.
    pub fn yz(&self) -> Vec<f64> {
        self.y.iter().map(|v| v[2]).collect()
    }

    /// Noiseless propagator `U0(T) = P_L ⋯ P_1`.
    pub fn net_unitary(&self) -> Mat2 {
        self.net
    }

    pub fn frame_coefficients(&self) -> FrameCoefficients {
        FrameCoefficients {
            values: self.y.clone(),
        }
    }

    /// `F_u(ω,T) = ∫_0^T e^{iωs} y_u(s) ds`, exact for piecewise-constant switching.
    pub fn frequency_ff(&self, omega: f64) -> [C64; 3] {
        let tau = self.tau();
        // ∫ over one window = e^{iω·mid}·τ·sinc(ωτ/2)
        let half = 0.5 * omega * tau;
        let sinc = if half == 0.0 { 1.0 } else { half.sin() / half };
        let mut out = [C64::from(0.0); 3];
        for (n, y) in self.y.iter().enumerate() {
            let mid = (n as f64 + 0.5) * tau;
            let w = (I * (omega * mid)).exp() * (tau * sinc);
            for u in 0..3 {
                out[u] += w * y[u];
            }
        }
        out
    }
}

/// Window-frame filter function `F_u(n)`; equals `y_u(n)` for digital control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameCoefficients {
    pub values: Vec<[f64; 3]>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_abs_diff_eq;

    const T: f64 = 3.2;

    #[test]
    fn free_evolution_points_along_z() {
        let c = DigitalControl::free_evolution(4, T).unwrap();
        for y in c.switching() {
            assert_eq!(*y, [0.0, 0.0, 1.0]);
        }
        let f = c.frequency_ff(0.0);
        assert_abs_diff_eq!(f[2].re, T, epsilon = 1e-14);
    }

    #[test]
    fn cpmg_pattern() {
        let c = DigitalControl::cpmg(4, T).unwrap();
        let yz = c.yz();
        let expect = [1.0, -1.0, -1.0, 1.0];
        for (a, b) in yz.iter().zip(expect) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
        for y in c.switching() {
            assert_abs_diff_eq!(y[0], 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(y[1], 0.0, epsilon = 1e-14);
        }
        assert!(c.frequency_ff(0.0)[2].norm() < 1e-14);
        assert!(DigitalControl::cpmg(6, T).is_err());
    }

    #[test]
    fn quarter_turn_about_x() {
        let mut pulses = vec![Pulse::identity(); 3];
        pulses[0] = Pulse {
            theta: PI / 4.0,
            axis: [1.0, 0.0, 0.0],
        };
        let c = DigitalControl::compile(pulses, 3, 1.0).unwrap();
        for y in c.switching() {
            assert_abs_diff_eq!(y[0], 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(y[1], -1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(y[2], 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            DigitalControl::compile(vec![Pulse::identity(); 3], 4, T),
            Err(QnsError::Arity { expected: 4, got: 3 })
        ));
        let bad = vec![
            Pulse {
                theta: 1.0,
                axis: [1.0, 1.0, 0.0],
            };
            2
        ];
        assert!(matches!(
            DigitalControl::compile(bad, 2, T),
            Err(QnsError::NonUnitAxis { index: 0, .. })
        ));
        assert!(DigitalControl::free_evolution(4, 0.0).is_err());
    }

    #[test]
    fn unit_switching_norm_for_random_controls() {
        let mut r = rng::stream(11, 0);
        let law = RandomControlLaw::default();
        for _ in 0..200 {
            let c = DigitalControl::random(4, T, &law, &mut r).unwrap();
            for y in c.switching() {
                let n2: f64 = y.iter().map(|v| v * v).sum();
                assert_abs_diff_eq!(n2, 1.0, epsilon = 1e-10);
            }
            assert_eq!(c.frame_coefficients().values, c.switching());
        }
    }

    #[test]
    fn appending_identity_preserves_switching() {
        let mut r = rng::stream(12, 0);
        let law = RandomControlLaw::default();
        let c = DigitalControl::random(3, 3.0, &law, &mut r).unwrap();
        let mut pulses = c.pulses().to_vec();
        pulses.push(Pulse::identity());
        let d = DigitalControl::compile(pulses, 4, 4.0).unwrap();
        assert_eq!(&d.switching()[..3], c.switching());
        assert_eq!(d.switching()[3], c.switching()[2]);
    }

    #[test]
    fn params_roundtrip() {
        let mut r = rng::stream(13, 0);
        let c = DigitalControl::random(4, T, &RandomControlLaw::default(), &mut r).unwrap();
        let d = DigitalControl::from_params(&c.params(), 4, T).unwrap();
        for (a, b) in c.switching().iter().zip(d.switching()) {
            for u in 0..3 {
                assert_abs_diff_eq!(a[u], b[u], epsilon = 1e-12);
            }
        }
        assert!(DigitalControl::from_params(&[0.0; 5], 4, T).is_err());
    }

    #[test]
    fn frequency_ff_symmetry_and_limit() {
        let mut r = rng::stream(14, 0);
        let c = DigitalControl::random(4, T, &RandomControlLaw::default(), &mut r).unwrap();
        for w in [0.3, 1.7, 12.0] {
            let (p, m) = (c.frequency_ff(w), c.frequency_ff(-w));
            for u in 0..3 {
                assert_abs_diff_eq!(p[u].norm(), m[u].norm(), epsilon = 1e-13);
            }
        }
        let (a, b) = (c.frequency_ff(1e-9), c.frequency_ff(0.0));
        for u in 0..3 {
            assert!((a[u] - b[u]).norm() < 1e-7);
        }
    }

    #[test]
    fn parseval() {
        for c in [
            DigitalControl::free_evolution(4, T).unwrap(),
            DigitalControl::cpmg(4, T).unwrap(),
        ] {
            let (w_max, dw) = (4000.0, 0.005);
            let n = (2.0 * w_max / dw) as usize;
            let sum: f64 = (0..=n)
                .map(|i| {
                    let w = -w_max + i as f64 * dw;
                    let weight = if i == 0 || i == n { 0.5 } else { 1.0 };
                    weight * c.frequency_ff(w)[2].norm_sqr()
                })
                .sum();
            let integral = sum * dw / (2.0 * PI);
            assert!((integral - T).abs() / T < 1e-3, "{integral}");
        }
    }

    #[test]
    fn json_roundtrip() {
        let c = DigitalControl::cpmg(4, T).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"T\":3.2") && s.contains("\"L\":4"));
        let d: DigitalControl = serde_json::from_str(&s).unwrap();
        assert_eq!(c, d);
        let bad = r#"{"T":1.0,"L":2,"pulses":[{"theta":0.0,"axis":[0,0,1]}]}"#;
        assert!(serde_json::from_str::<DigitalControl>(bad).is_err());
    }
}
