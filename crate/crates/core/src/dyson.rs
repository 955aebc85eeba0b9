//! Truncated Dyson expansion of `⟨O(T)⟩` as an affine functional of CA spectra.
//!
//! For every ordered window multi-index the interaction-picture superoperator
//! `ρ ↦ Σ_{A ⊔ B} (−i)^{|A|} i^{|B|} (Π_{A↑} Y) ρ (Π_{B↓} Y)` is accumulated over all
//! splits of the `k` time-ordered insertions into a left group `A` and a right group
//! `B` (the shuffles). `Y(n) = y⃗(n)·σ⃗` and position 1 is the latest time. Expectations
//! then read `⟨O⟩|^K = Tr[ρ0 Õ] + Σ_{k ≤ K} Σ_n⃗ α^(k)(n⃗) S̄^(k)(n⃗)` with `Õ = U0† O U0`.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Matrix4, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::DigitalControl;
use crate::error::{QnsError, Result};
use crate::noise::NoiseModel;
use crate::pauli::{adjoint_rotation, dot_sigma, sigma, Mat2, C64, I};
use crate::pauli::{DensityMatrix, Observable};
use crate::spectra::{multi_indices, CASpectra, SpectrumKey};

pub(crate) fn check_order(order: usize) -> Result<()> {
    if order == 2 || order == 4 {
        Ok(())
    } else {
        Err(QnsError::UnsupportedOrder {
            order,
            supported: "K ∈ {2, 4}",
        })
    }
}

/// Per-multi-index superoperators of one control, in the Pauli transfer basis.
#[derive(Debug, Clone)]
pub struct DysonTerms {
    order: usize,
    net: Mat2,
    terms: Vec<(SpectrumKey, Matrix4<f64>)>,
}

impl DysonTerms {
    /// All orders `k = 1..=order`. `order` may be any value up to 4 here; the public
    /// functionals restrict it to `K ∈ {2, 4}`.
    pub fn new(control: &DigitalControl, order: usize) -> Self {
        let ys: Vec<Mat2> = control.switching().iter().map(dot_sigma).collect();
        let mut terms = Vec::new();
        for k in 1..=order {
            for key in multi_indices(control.windows(), k) {
                let factors: Vec<&Mat2> = key.n.iter().map(|n| &ys[n - 1]).collect();
                terms.push((key, shuffle_superoperator(&factors)));
            }
        }
        DysonTerms {
            order,
            net: control.net_unitary(),
            terms,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> &[(SpectrumKey, Matrix4<f64>)] {
        &self.terms
    }

    pub fn coefficient_map(&self, rho0: &DensityMatrix, observable: &Observable) -> CoefficientMap {
        let o = observable.conjugated(&self.net).components();
        let b = rho0.bloch();
        let r = [1.0, b[0], b[1], b[2]];
        let contract = |m: &Matrix4<f64>| -> f64 {
            let mut s = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    s += o[i] * m[(i, j)] * r[j];
                }
            }
            s
        };
        let constant = contract(&Matrix4::identity());
        let coeffs = self.terms.iter().map(|(k, m)| (k.clone(), contract(m))).collect();
        CoefficientMap {
            order: self.order,
            constant,
            coeffs,
            rho0: *rho0,
            observable: *observable,
        }
    }

    /// Interaction-picture transfer matrix `𝟙 + Σ S̄·E` for the given spectra.
    pub fn interaction_transfer(&self, spectra: &CASpectra) -> Result<Matrix4<f64>> {
        let mut total = Matrix4::identity();
        for (key, m) in &self.terms {
            if let Some(s) = spectrum_for(key, self.order, spectra)? {
                total += m * s;
            }
        }
        Ok(total)
    }

    /// Full transfer matrix including the noiseless propagator.
    pub fn transfer(&self, spectra: &CASpectra) -> Result<Matrix4<f64>> {
        let mut ru = Matrix4::identity();
        ru.fixed_view_mut::<3, 3>(1, 1).copy_from(&adjoint_rotation(&self.net));
        Ok(ru * self.interaction_transfer(spectra)?)
    }
}

/// Value of `key` to contract against, `None` if the key does not contribute.
fn spectrum_for(key: &SpectrumKey, order: usize, spectra: &CASpectra) -> Result<Option<f64>> {
    match spectra.folded {
        Some(k) if k != order => Err(QnsError::param(
            "spectra",
            format!("spectra folded for K={k} used at K={order}"),
        )),
        Some(_) if !key.is_irreducible() => Ok(None),
        _ => spectra.lookup(key).map(Some),
    }
}

/// Transfer matrix `E_ij = ½Tr[σ_i E(σ_j)]` of the shuffle sum for one multi-index.
fn shuffle_superoperator(factors: &[&Mat2]) -> Matrix4<f64> {
    let k = factors.len();
    let mut out = Matrix4::zeros();
    for j in 0..4 {
        let input = sigma(j);
        let mut acc = Mat2::zeros();
        for mask in 0u32..(1 << k) {
            let l = mask.count_ones() as i32;
            let mut left = sigma(0);
            let mut right = sigma(0);
            for (p, y) in factors.iter().enumerate() {
                if mask & (1 << p) != 0 {
                    left *= *y;
                } else {
                    right = *y * right;
                }
            }
            let phase = (-I).powi(l) * I.powi(k as i32 - l);
            acc += left * input * right * phase;
        }
        for i in 0..4 {
            let v: C64 = (sigma(i) * acc).trace() * 0.5;
            out[(i, j)] = v.re;
        }
    }
    out
}

/// `⟨O(T)⟩|^K = constant + Σ α·S̄` for one (control, ρ0, O, K).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientMap {
    pub order: usize,
    pub constant: f64,
    #[serde(with = "keyed")]
    pub coeffs: BTreeMap<SpectrumKey, f64>,
    pub rho0: DensityMatrix,
    pub observable: Observable,
}

mod keyed {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        k: usize,
        n: Vec<usize>,
        value: f64,
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<SpectrumKey, f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Entry> = m
            .iter()
            .map(|(key, value)| Entry {
                k: key.k,
                n: key.n.clone(),
                value: *value,
            })
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<SpectrumKey, f64>, D::Error> {
        let v = Vec::<Entry>::deserialize(d)?;
        Ok(v.into_iter().map(|e| (SpectrumKey::new(e.n), e.value)).collect())
    }
}

impl CoefficientMap {
    /// The same functional truncated at a lower order.
    pub fn restricted(&self, order: usize) -> CoefficientMap {
        CoefficientMap {
            order: order.min(self.order),
            coeffs: self.coeffs.iter().filter(|(k, _)| k.k <= order).map(|(k, v)| (k.clone(), *v)).collect(),
            ..self.clone()
        }
    }

    /// Row of coefficients over `keys`. With `folded` set, reducible keys are skipped:
    /// their contribution is carried by the effective spectra of their fold targets.
    pub fn row(&self, keys: &[SpectrumKey], folded: bool) -> Vec<f64> {
        let index: BTreeMap<&SpectrumKey, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let mut row = vec![0.0; keys.len()];
        for (key, a) in &self.coeffs {
            if folded && !key.is_irreducible() {
                continue;
            }
            if let Some(&i) = index.get(key) {
                row[i] += a;
            }
        }
        row
    }
}

pub fn expectation_functional(
    control: &DigitalControl,
    rho0: &DensityMatrix,
    observable: &Observable,
    order: usize,
) -> Result<CoefficientMap> {
    observable.ensure_invertible()?;
    check_order(order)?;
    Ok(DysonTerms::new(control, order).coefficient_map(rho0, observable))
}

/// `constant + Σ α·S̄`. Keys missing from `spectra` count as zero only when their
/// order is declared zero; folded spectra are contracted on irreducible keys.
/// Results outside the physical range are returned as is.
pub fn truncated_expectation(cm: &CoefficientMap, spectra: &CASpectra) -> Result<f64> {
    let mut total = cm.constant;
    for (key, a) in &cm.coeffs {
        if let Some(s) = spectrum_for(key, cm.order, spectra)? {
            total += a * s;
        }
    }
    Ok(total)
}

/// Direct time-discretised Dyson sum from analytic moments, independent of the
/// window/shuffle machinery: midpoint grid, ordered tuples with tied-index
/// weights `h^k / Π m!`, Bloch-vector propagation `dr/dt = 2β(t) ŷ(t) × r`.
pub fn brute_force_oracle(
    control: &DigitalControl,
    model: &NoiseModel,
    rho0: &DensityMatrix,
    observable: &Observable,
    order: usize,
    n_grid: usize,
) -> Result<f64> {
    if n_grid < 50 {
        return Err(QnsError::param("n_grid", format!("must be ≥ 50, got {n_grid}")));
    }
    if order > 4 {
        return Err(QnsError::UnsupportedOrder {
            order,
            supported: "K ≤ 4",
        });
    }
    let tt = control.total_time();
    let h = tt / n_grid as f64;
    let tau = control.tau();
    let times: Vec<f64> = (0..n_grid).map(|i| (i as f64 + 0.5) * h).collect();
    let rs: Vec<Matrix3<f64>> = times
        .iter()
        .map(|t| {
            let n = ((t / tau) as usize).min(control.windows() - 1);
            let y = Vector3::from(control.switching()[n]);
            y.cross_matrix() * 2.0
        })
        .collect();
    let oc = observable.conjugated(&control.net_unitary()).components();
    let o = Vector3::new(oc[1], oc[2], oc[3]);
    let r0 = Vector3::from(rho0.bloch());
    let constant = oc[0] + o.dot(&r0);
    let rr: Vec<Vector3<f64>> = rs.iter().map(|r| r * r0).collect();

    let mut total = constant;
    // odd moments vanish, so only even orders are summed
    if order >= 2 {
        let per_i: Vec<f64> = (0..n_grid)
            .into_par_iter()
            .map(|i1| {
                let l1 = o.transpose() * rs[i1];
                let mut s = 0.0;
                for i2 in 0..=i1 {
                    let w = tie_weight(&[i1, i2], h);
                    s += w * model.moment_unchecked(&[times[i1], times[i2]]) * (l1 * rr[i2])[0];
                }
                s
            })
            .collect();
        total += per_i.iter().sum::<f64>();
    }
    if order >= 4 {
        let per_i: Vec<f64> = (0..n_grid)
            .into_par_iter()
            .map(|i1| {
                let l1 = o.transpose() * rs[i1];
                let mut s = 0.0;
                for i2 in 0..=i1 {
                    let l2 = l1 * rs[i2];
                    for i3 in 0..=i2 {
                        let l3 = l2 * rs[i3];
                        for i4 in 0..=i3 {
                            let w = tie_weight(&[i1, i2, i3, i4], h);
                            let m = model.moment_unchecked(&[times[i1], times[i2], times[i3], times[i4]]);
                            s += w * m * (l3 * rr[i4])[0];
                        }
                    }
                }
                s
            })
            .collect();
        total += per_i.iter().sum::<f64>();
    }
    Ok(total)
}

/// Volume of the ordered sub-simplex inside one grid cell per tied group.
fn tie_weight(idx: &[usize], h: f64) -> f64 {
    let mut w = h.powi(idx.len() as i32);
    let mut run = 1;
    for j in 1..=idx.len() {
        if j < idx.len() && idx[j] == idx[j - 1] {
            run += 1;
        } else {
            for m in 2..=run {
                w /= m as f64;
            }
            run = 1;
        }
    }
    w
}
