//! Process matrices of the truncated channel and identity-gate fidelity.

use std::sync::OnceLock;

use nalgebra::{Matrix4, SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::control::DigitalControl;
use crate::dyson::{check_order, DysonTerms};
use crate::error::Result;
use crate::pauli::{sigma, Mat2, C64};
use crate::spectra::CASpectra;

type Mat16 = SMatrix<C64, 16, 16>;

/// `χ` in the Pauli basis: `E(ρ) = Σ_uv χ_uv σ_u ρ σ_v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessMatrix {
    /// Row-major `[[re, im]; 16]`.
    entries: Vec<[f64; 2]>,
}

impl ProcessMatrix {
    pub fn from_chi(chi: &Matrix4<C64>) -> Self {
        let mut entries = Vec::with_capacity(16);
        for u in 0..4 {
            for v in 0..4 {
                entries.push([chi[(u, v)].re, chi[(u, v)].im]);
            }
        }
        ProcessMatrix { entries }
    }

    pub fn chi(&self) -> Matrix4<C64> {
        Matrix4::from_fn(|u, v| {
            let [re, im] = self.entries[4 * u + v];
            C64::new(re, im)
        })
    }

    /// Converts a Pauli transfer matrix `R_ij = ½Tr[σ_i E(σ_j)]`.
    pub fn from_transfer(ptm: &Matrix4<f64>) -> Self {
        let b = SVector::<C64, 16>::from_fn(|r, _| C64::from(ptm[(r / 4, r % 4)]));
        let x = transfer_inverse() * b;
        Self::from_chi(&Matrix4::from_fn(|u, v| x[4 * u + v]))
    }

    pub fn hermiticity_residue(&self) -> f64 {
        let chi = self.chi();
        (chi - chi.adjoint()).norm()
    }

    /// `‖Σ_uv χ_uv σ_v σ_u − 𝟙‖`; zero for trace-preserving maps.
    pub fn trace_residue(&self) -> f64 {
        let chi = self.chi();
        let mut acc = Mat2::zeros();
        for u in 0..4 {
            for v in 0..4 {
                acc += sigma(v) * sigma(u) * chi[(u, v)];
            }
        }
        (acc - sigma(0)).norm()
    }

    /// Smallest eigenvalue of `χ`; negative values flag a map that is not
    /// completely positive.
    pub fn min_eigenvalue(&self) -> f64 {
        let chi = self.chi();
        let herm = (chi + chi.adjoint()) * C64::from(0.5);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Process fidelity with the identity gate, `Re χ_00`.
    pub fn fidelity(&self) -> f64 {
        self.entries[0][0]
    }
}

/// Inverse of the linear map `χ ↦ R` with `R_ij = ½ Σ_uv χ_uv Tr[σ_i σ_u σ_j σ_v]`.
fn transfer_inverse() -> &'static Mat16 {
    static INV: OnceLock<Mat16> = OnceLock::new();
    INV.get_or_init(|| {
        let a = Mat16::from_fn(|r, c| {
            let (i, j) = (r / 4, r % 4);
            let (u, v) = (c / 4, c % 4);
            (sigma(i) * sigma(u) * sigma(j) * sigma(v)).trace() * 0.5
        });
        a.try_inverse().expect("Pauli transfer map is invertible")
    })
}

/// Truncated channel of `control` under `spectra` at order `K`, and its fidelity.
///
/// The channel is probed tomographically: truncated expectations of `σx, σy, σz`
/// for inputs `|0⟩, |1⟩, |+⟩, |+i⟩` fix the affine Bloch map.
pub fn process_matrix_and_fidelity(
    control: &DigitalControl,
    spectra: &CASpectra,
    order: usize,
) -> Result<(ProcessMatrix, f64)> {
    check_order(order)?;
    let terms = DysonTerms::new(control, order);
    let full = terms.transfer(spectra)?;
    let pm = ProcessMatrix::from_transfer(&tomography(&full));
    let f = pm.fidelity();
    Ok((pm, f))
}

/// Rebuilds a transfer matrix from output Bloch vectors of the four probe states.
fn tomography(full: &Matrix4<f64>) -> Matrix4<f64> {
    let output = |bloch: [f64; 3]| -> [f64; 3] {
        let r = [1.0, bloch[0], bloch[1], bloch[2]];
        let mut out = [0.0; 3];
        for (u, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|j| full[(u + 1, j)] * r[j]).sum();
        }
        out
    };
    let zero = output([0.0, 0.0, 1.0]);
    let one = output([0.0, 0.0, -1.0]);
    let plus = output([1.0, 0.0, 0.0]);
    let plus_i = output([0.0, 1.0, 0.0]);
    let mut ptm = Matrix4::zeros();
    ptm[(0, 0)] = 1.0;
    for u in 0..3 {
        let c = 0.5 * (zero[u] + one[u]);
        ptm[(u + 1, 0)] = c;
        ptm[(u + 1, 1)] = plus[u] - c;
        ptm[(u + 1, 2)] = plus_i[u] - c;
        ptm[(u + 1, 3)] = 0.5 * (zero[u] - one[u]);
    }
    ptm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{Pulse, RandomControlLaw};
    use crate::noise::NoiseModel;
    use crate::pauli::adjoint_rotation;
    use crate::rng;
    use crate::spectra::ca_spectra_exact;
    use approx::assert_abs_diff_eq;

    fn zero_spectra() -> CASpectra {
        ca_spectra_exact(&NoiseModel::telegraph(0.02, 0.0).unwrap(), 4, 3.2, 4).unwrap()
    }

    #[test]
    fn identity_control_is_perfect() {
        let c = DigitalControl::cpmg(4, 3.2).unwrap();
        let (pm, f) = process_matrix_and_fidelity(&c, &zero_spectra(), 4).unwrap();
        assert_abs_diff_eq!(f, 1.0, epsilon = 1e-13);
        let chi = pm.chi();
        for u in 0..4 {
            for v in 0..4 {
                let e = if u == 0 && v == 0 { 1.0 } else { 0.0 };
                assert!((chi[(u, v)] - C64::from(e)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn net_x_flip_has_zero_fidelity() {
        let mut pulses = vec![Pulse::identity(); 4];
        pulses[1] = Pulse::pi_x();
        let c = DigitalControl::compile(pulses, 4, 3.2).unwrap();
        let (pm, f) = process_matrix_and_fidelity(&c, &zero_spectra(), 2).unwrap();
        assert_abs_diff_eq!(f, 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(pm.chi()[(1, 1)].re, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn unitary_channel_chi_is_rank_one() {
        let mut r = rng::stream(41, 0);
        let c = DigitalControl::random(4, 3.2, &RandomControlLaw::default(), &mut r).unwrap();
        let u = c.net_unitary();
        let mut ptm = Matrix4::identity();
        ptm.fixed_view_mut::<3, 3>(1, 1).copy_from(&adjoint_rotation(&u));
        let pm = ProcessMatrix::from_transfer(&ptm);
        assert!(pm.hermiticity_residue() < 1e-12);
        assert!(pm.trace_residue() < 1e-12);
        assert_abs_diff_eq!(pm.fidelity(), u.trace().norm_sqr() / 4.0, epsilon = 1e-12);
        assert!(pm.min_eigenvalue() > -1e-12);
    }

    #[test]
    fn noisy_channel_invariants() {
        let m = NoiseModel::modulated(0.02, 0.6, 1.0).unwrap();
        let s = ca_spectra_exact(&m, 4, 3.2, 4).unwrap();
        let mut r = rng::stream(42, 0);
        for _ in 0..10 {
            let c = DigitalControl::random(4, 3.2, &RandomControlLaw::default(), &mut r).unwrap();
            for k in [2, 4] {
                let (pm, f) = process_matrix_and_fidelity(&c, &s, k).unwrap();
                assert!(pm.hermiticity_residue() < 1e-10);
                assert!(pm.trace_residue() < 1e-10);
                assert!(f.is_finite());
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let c = DigitalControl::cpmg(4, 3.2).unwrap();
        let (pm, _) = process_matrix_and_fidelity(&c, &zero_spectra(), 2).unwrap();
        let s = serde_json::to_string(&pm).unwrap();
        let back: ProcessMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, pm);
    }
}
