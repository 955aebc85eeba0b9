//! Single-qubit operator algebra in the Pauli basis {σ0, σx, σy, σz}.

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QnsError, Result};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;

pub const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Pauli matrix `σ_u` with `u = 0` the identity.
pub fn sigma(u: usize) -> Mat2 {
    match u {
        0 => Mat2::new(ONE, ZERO, ZERO, ONE),
        1 => Mat2::new(ZERO, ONE, ONE, ZERO),
        2 => Mat2::new(ZERO, -I, I, ZERO),
        3 => Mat2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index out of range: {u}"),
    }
}

/// `n·σ` for a real 3-vector.
pub fn dot_sigma(n: &[f64; 3]) -> Mat2 {
    sigma(1) * C64::from(n[0]) + sigma(2) * C64::from(n[1]) + sigma(3) * C64::from(n[2])
}

/// The pulse unitary `exp(iθ n·σ)`. A π rotation about `n` corresponds to θ = π/2.
pub fn rotation(theta: f64, axis: &[f64; 3]) -> Mat2 {
    sigma(0) * C64::from(theta.cos()) + dot_sigma(axis) * (I * theta.sin())
}

/// Dephasing segment `exp(-iΦσz)`.
pub fn z_phase(phi: f64) -> Mat2 {
    Mat2::new(C64::from_polar(1.0, -phi), ZERO, ZERO, C64::from_polar(1.0, phi))
}

/// Real Pauli components `½Tr[M σ_u]` for u = 0..3 (complex for non-Hermitian input).
pub fn pauli_components(m: &Mat2) -> [C64; 4] {
    let mut out = [ZERO; 4];
    for (u, o) in out.iter_mut().enumerate() {
        *o = (m * sigma(u)).trace() * 0.5;
    }
    out
}

/// Rotation matrix (SO(3)) of the adjoint action `σ ↦ U σ U†` on Bloch vectors.
pub fn adjoint_rotation(u: &Mat2) -> Matrix3<f64> {
    let ud = u.adjoint();
    Matrix3::from_fn(|i, j| (sigma(i + 1) * u * sigma(j + 1) * ud).trace().re * 0.5)
}

pub fn hermiticity_residue(m: &Mat2) -> f64 {
    (m - m.adjoint()).norm()
}

/// Single-qubit density matrix, stored as its Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    bloch: [f64; 3],
}

impl DensityMatrix {
    pub fn from_bloch(bloch: [f64; 3]) -> Result<Self> {
        let r = Vector3::from(bloch).norm();
        if !bloch.iter().all(|x| x.is_finite()) || r > 1.0 + 1e-9 {
            return Err(QnsError::InvalidState(format!(
                "Bloch vector {bloch:?} has norm {r} > 1"
            )));
        }
        Ok(DensityMatrix { bloch })
    }

    /// Validates positivity and unit trace of an explicit 2×2 matrix.
    pub fn from_matrix(rho: &Mat2) -> Result<Self> {
        if hermiticity_residue(rho) > 1e-10 {
            return Err(QnsError::InvalidState("not Hermitian".into()));
        }
        let tr = rho.trace();
        if (tr - ONE).norm() > 1e-10 {
            return Err(QnsError::InvalidState(format!("trace {tr} != 1")));
        }
        let c = pauli_components(rho);
        Self::from_bloch([2.0 * c[1].re, 2.0 * c[2].re, 2.0 * c[3].re])
    }

    /// Eigenstate `(𝟙 + sign·σ_u)/2` for `u ∈ {1,2,3}`.
    pub fn pauli_eigenstate(u: usize, sign: f64) -> Self {
        let mut bloch = [0.0; 3];
        bloch[u - 1] = sign.signum();
        DensityMatrix { bloch }
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    pub fn matrix(&self) -> Mat2 {
        (sigma(0) + dot_sigma(&self.bloch)) * C64::from(0.5)
    }
}

/// Hermitian single-qubit observable `o0 𝟙 + o·σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    components: [f64; 4],
}

impl Observable {
    pub fn pauli(u: usize) -> Self {
        assert!((1..=3).contains(&u), "Pauli observable index must be 1..=3");
        let mut components = [0.0; 4];
        components[u] = 1.0;
        Observable { components }
    }

    pub fn from_components(components: [f64; 4]) -> Self {
        Observable { components }
    }

    pub fn from_matrix(m: &Mat2) -> Result<Self> {
        let res = hermiticity_residue(m);
        if res > 1e-10 {
            return Err(QnsError::NonHermitian(res));
        }
        let c = pauli_components(m);
        Ok(Observable {
            components: [c[0].re, c[1].re, c[2].re, c[3].re],
        })
    }

    pub fn components(&self) -> [f64; 4] {
        self.components
    }

    pub fn matrix(&self) -> Mat2 {
        let c = self.components;
        sigma(0) * C64::from(c[0]) + dot_sigma(&[c[1], c[2], c[3]])
    }

    /// `det O = o0² − |o|²`.
    pub fn determinant(&self) -> f64 {
        let c = self.components;
        c[0] * c[0] - (c[1] * c[1] + c[2] * c[2] + c[3] * c[3])
    }

    pub fn ensure_invertible(&self) -> Result<()> {
        let det = self.determinant();
        if det.abs() < 1e-12 {
            return Err(QnsError::SingularObservable(det));
        }
        Ok(())
    }

    /// Largest |eigenvalue|; any physical expectation lies within ±this bound.
    pub fn spectral_bound(&self) -> f64 {
        let c = self.components;
        c[0].abs() + (c[1] * c[1] + c[2] * c[2] + c[3] * c[3]).sqrt()
    }

    /// Heisenberg-picture conjugation `U† O U`.
    pub fn conjugated(&self, u: &Mat2) -> Observable {
        let m = u.adjoint() * self.matrix() * u;
        let c = pauli_components(&m);
        Observable {
            components: [c[0].re, c[1].re, c[2].re, c[3].re],
        }
    }

    /// `Tr[ρ O]`.
    pub fn expectation(&self, rho: &DensityMatrix) -> f64 {
        let c = self.components;
        let r = rho.bloch();
        c[0] + c[1] * r[0] + c[2] * r[1] + c[3] * r[2]
    }
}
