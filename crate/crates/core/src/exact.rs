//! Deterministic noise-averaged dynamics.
//!
//! The pair (qubit, ξ) is jointly Markov. With `r_±(t) = E[r(t)·1{ξ(t)=±1}]` the
//! Bloch vectors obey `ṙ_s = 2 s g(t) ẑ × r_s + γ(r_{−s} − r_s)` in the lab frame, and
//! pulses rotate both. The random modulation phase is averaged by the trapezoid rule,
//! which converges geometrically for this periodic integrand.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Matrix4, SMatrix};
use rayon::prelude::*;

use crate::control::DigitalControl;
use crate::noise::NoiseModel;
use crate::pauli::{adjoint_rotation, DensityMatrix, Observable};

type Mat6 = SMatrix<f64, 6, 6>;

const PHASE_NODES: usize = 64;
const STEPS_PER_WINDOW: usize = 400;

/// Window propagators of the joint (qubit, telegraph) Bloch equations for a fixed
/// model and window grid. They do not depend on the pulses, so one cache serves any
/// number of controls.
#[derive(Debug, Clone)]
pub struct ExactDynamics {
    windows: usize,
    total_time: f64,
    /// `[phase][window]`; a single phase for unmodulated noise.
    props: Vec<Vec<Mat6>>,
}

impl ExactDynamics {
    pub fn new(model: &NoiseModel, windows: usize, total_time: f64) -> Self {
        let tau = total_time / windows as f64;
        let props = if model.is_modulated() {
            (0..PHASE_NODES)
                .into_par_iter()
                .map(|i| {
                    let phi = 2.0 * PI * i as f64 / PHASE_NODES as f64;
                    (0..windows).map(|n| integrate_modulated(model, phi, n as f64 * tau, tau)).collect()
                })
                .collect()
        } else {
            vec![vec![(generator(model, model.g()) * tau).exp(); windows]]
        };
        Self { windows, total_time, props }
    }

    /// Noise-averaged Bloch map `r(0) ↦ r(T)` as a transfer matrix (affine part included).
    pub fn transfer(&self, control: &DigitalControl) -> Matrix4<f64> {
        assert_eq!(control.windows(), self.windows, "window count differs from the cached grid");
        debug_assert!((control.total_time() - self.total_time).abs() < 1e-9 * self.total_time.max(1.0));
        let rots: Vec<Matrix3<f64>> = control.pulses().iter().map(|p| adjoint_rotation(&p.unitary())).collect();
        let mut linear = Matrix3::zeros();
        for props in &self.props {
            linear += bloch_map(&rots, props);
        }
        linear /= self.props.len() as f64;
        // dephasing channels are unital
        let mut out = Matrix4::identity();
        out.fixed_view_mut::<3, 3>(1, 1).copy_from(&linear);
        out
    }

    pub fn expectation(&self, control: &DigitalControl, rho0: &DensityMatrix, observable: &Observable) -> f64 {
        let m = self.transfer(control);
        let b = rho0.bloch();
        let o = observable.components();
        let mut out = o[0];
        for u in 0..3 {
            out += o[u + 1] * (m[(u + 1, 1)] * b[0] + m[(u + 1, 2)] * b[1] + m[(u + 1, 3)] * b[2]);
        }
        out
    }

    /// Identity-gate process fidelity of the averaged channel, `(1 + Tr M)/4`.
    pub fn fidelity(&self, control: &DigitalControl) -> f64 {
        let m = self.transfer(control);
        (1.0 + m[(1, 1)] + m[(2, 2)] + m[(3, 3)]) / 4.0
    }
}

pub fn exact_transfer(control: &DigitalControl, model: &NoiseModel) -> Matrix4<f64> {
    ExactDynamics::new(model, control.windows(), control.total_time()).transfer(control)
}

/// `⟨O(T)⟩` without truncation or sampling error.
pub fn exact_expectation(
    control: &DigitalControl,
    model: &NoiseModel,
    rho0: &DensityMatrix,
    observable: &Observable,
) -> f64 {
    ExactDynamics::new(model, control.windows(), control.total_time()).expectation(control, rho0, observable)
}

pub fn exact_fidelity(control: &DigitalControl, model: &NoiseModel) -> f64 {
    ExactDynamics::new(model, control.windows(), control.total_time()).fidelity(control)
}

/// Columns: images of the three unit Bloch vectors for one modulation phase.
fn bloch_map(rots: &[Matrix3<f64>], props: &[Mat6]) -> Matrix3<f64> {
    // the two telegraph branches start with equal weight
    let mut state = SMatrix::<f64, 6, 3>::zeros();
    for col in 0..3 {
        state[(col, col)] = 0.5;
        state[(3 + col, col)] = 0.5;
    }
    for (rot, prop) in rots.iter().zip(props) {
        let a = rot * state.fixed_rows::<3>(0);
        let b = rot * state.fixed_rows::<3>(3);
        state.fixed_rows_mut::<3>(0).copy_from(&a);
        state.fixed_rows_mut::<3>(3).copy_from(&b);
        state = prop * state;
    }
    state.fixed_rows::<3>(0) + state.fixed_rows::<3>(3)
}

fn generator(model: &NoiseModel, amplitude: f64) -> Mat6 {
    let gamma = model.gamma();
    let mut z = Matrix3::zeros();
    // ẑ × r
    z[(0, 1)] = -1.0;
    z[(1, 0)] = 1.0;
    let mut gen = Mat6::zeros();
    let eye = Matrix3::identity();
    gen.fixed_view_mut::<3, 3>(0, 0).copy_from(&(z * (2.0 * amplitude) - eye * gamma));
    gen.fixed_view_mut::<3, 3>(3, 3).copy_from(&(z * (-2.0 * amplitude) - eye * gamma));
    gen.fixed_view_mut::<3, 3>(0, 3).copy_from(&(eye * gamma));
    gen.fixed_view_mut::<3, 3>(3, 0).copy_from(&(eye * gamma));
    gen
}

/// Propagator over `[t0, t0 + tau]` for modulation phase `phi` (RK4 on the matrix).
fn integrate_modulated(model: &NoiseModel, phi: f64, t0: f64, tau: f64) -> Mat6 {
    let h = tau / STEPS_PER_WINDOW as f64;
    let amp = |t: f64| model.g() * (model.omega() * t + phi).cos();
    let mut state = Mat6::identity();
    for i in 0..STEPS_PER_WINDOW {
        let t = t0 + i as f64 * h;
        let g1 = generator(model, amp(t));
        let g2 = generator(model, amp(t + 0.5 * h));
        let g3 = generator(model, amp(t + h));
        let k1 = g1 * state;
        let k2 = g2 * (state + k1 * (0.5 * h));
        let k3 = g2 * (state + k2 * (0.5 * h));
        let k4 = g3 * (state + k3 * h);
        state += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    state
}
