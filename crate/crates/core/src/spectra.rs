//! Control-adapted (CA) spectra: ordered-simplex window integrals of noise moments,
//! `S̄^(k)(n⃗) = ∫_{t_1 ≥ … ≥ t_k, t_j ∈ W_{n_j}} ⟨β(t_1)…β(t_k)⟩`.
//!
//! Window multi-indices are 1-based and descending, `L ≥ n_1 ≥ … ≥ n_k ≥ 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{QnsError, Result};
use crate::noise::NoiseModel;
use crate::pauli::C64;

/// Order `k` is the length of `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpectrumKey {
    pub k: usize,
    pub n: Vec<usize>,
}

impl SpectrumKey {
    pub fn new(n: Vec<usize>) -> Self {
        SpectrumKey { k: n.len(), n }
    }

    /// No three consecutive equal windows. Keys that fail this carry operator
    /// products `R(n)³ = −4R(n)` and are linearly dependent on lower orders.
    pub fn is_irreducible(&self) -> bool {
        !self.n.windows(3).any(|w| w[0] == w[1] && w[1] == w[2])
    }

    /// Collapses the first run of three equal windows into one, lowering the order by 2.
    pub fn collapse(&self) -> Option<SpectrumKey> {
        let pos = self.n.windows(3).position(|w| w[0] == w[1] && w[1] == w[2])?;
        let mut n = self.n.clone();
        n.drain(pos + 1..pos + 3);
        Some(SpectrumKey::new(n))
    }

    /// Irreducible key this one folds into, with the accumulated factor `(−4)^j`.
    pub fn fold_target(&self) -> (SpectrumKey, f64) {
        let mut key = self.clone();
        let mut factor = 1.0;
        while let Some(next) = key.collapse() {
            key = next;
            factor *= -4.0;
        }
        (key, factor)
    }
}

impl fmt::Display for SpectrumKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.n.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All descending multi-indices of length `k` over `L` windows; `C(L+k−1, k)` of them.
pub fn multi_indices(windows: usize, k: usize) -> Vec<SpectrumKey> {
    fn rec(max: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<SpectrumKey>) {
        if left == 0 {
            out.push(SpectrumKey::new(cur.clone()));
            return;
        }
        for n in (1..=max).rev() {
            cur.push(n);
            rec(n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        rec(windows, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Unknowns for the given orders, optionally restricted to irreducible keys.
pub fn unknown_keys(windows: usize, orders: &BTreeSet<usize>, folded: bool) -> Vec<SpectrumKey> {
    orders
        .iter()
        .flat_map(|&k| multi_indices(windows, k))
        .filter(|key| !folded || key.is_irreducible())
        .collect()
}

pub fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    Estimated,
    CombDerived,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Exact => "exact",
            Provenance::Estimated => "estimated",
            Provenance::CombDerived => "comb-derived",
        })
    }
}

impl std::str::FromStr for Provenance {
    type Err = QnsError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Provenance::Exact),
            "estimated" => Ok(Provenance::Estimated),
            "comb-derived" => Ok(Provenance::CombDerived),
            other => Err(QnsError::Config(format!("unknown provenance `{other}`"))),
        }
    }
}

/// A set of CA spectra.
///
/// `folded = Some(K)` means the values live on irreducible keys only and already
/// absorb the contributions of reducible keys up to order `K`; such spectra are
/// meant for truncation order `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CASpectra {
    pub windows: usize,
    pub total_time: f64,
    pub orders: BTreeSet<usize>,
    pub values: BTreeMap<SpectrumKey, f64>,
    pub provenance: Provenance,
    pub declared_zero_orders: BTreeSet<usize>,
    pub folded: Option<usize>,
}

impl CASpectra {
    pub fn new(windows: usize, total_time: f64, provenance: Provenance) -> Self {
        CASpectra {
            windows,
            total_time,
            orders: BTreeSet::new(),
            values: BTreeMap::new(),
            provenance,
            declared_zero_orders: BTreeSet::new(),
            folded: None,
        }
    }

    pub fn tau(&self) -> f64 {
        self.total_time / self.windows as f64
    }

    pub fn insert(&mut self, key: SpectrumKey, value: f64) {
        self.orders.insert(key.k);
        self.values.insert(key, value);
    }

    pub fn get(&self, key: &SpectrumKey) -> Option<f64> {
        self.values.get(key).copied()
    }

    /// Value for `key`, treating declared-zero orders as 0.
    pub fn lookup(&self, key: &SpectrumKey) -> Result<f64> {
        match self.values.get(key) {
            Some(v) => Ok(*v),
            None if self.declared_zero_orders.contains(&key.k) => Ok(0.0),
            None => Err(QnsError::IncompleteSpectra {
                order: key.k,
                windows: key.n.clone(),
            }),
        }
    }

    pub fn order_values(&self, k: usize) -> impl Iterator<Item = (&SpectrumKey, &f64)> {
        self.values.iter().filter(move |(key, _)| key.k == k)
    }

    /// Every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.values.values_mut().for_each(|v| *v *= factor);
        out
    }

    /// Effective spectra on irreducible keys for truncation order `order`: each
    /// reducible key's value is added to its fold target with factor `(−4)^j`.
    pub fn fold(&self, order: usize) -> Result<CASpectra> {
        if let Some(done) = self.folded {
            if done == order {
                return Ok(self.clone());
            }
            return Err(QnsError::param(
                "order",
                format!("spectra already folded for K={done}, cannot refold for K={order}"),
            ));
        }
        let mut out = CASpectra {
            values: BTreeMap::new(),
            orders: BTreeSet::new(),
            folded: Some(order),
            ..self.clone()
        };
        out.declared_zero_orders = self
            .declared_zero_orders
            .iter()
            .copied()
            .filter(|k| *k <= order)
            .collect();
        for k in 1..=order {
            if !self.orders.contains(&k) && !self.declared_zero_orders.contains(&k) {
                return Err(QnsError::IncompleteSpectra {
                    order: k,
                    windows: Vec::new(),
                });
            }
            for key in multi_indices(self.windows, k) {
                let v = self.lookup(&key)?;
                let (target, factor) = key.fold_target();
                out.orders.insert(target.k);
                *out.values.entry(target).or_insert(0.0) += factor * v;
            }
        }
        Ok(out)
    }

    /// Per-order relative error `‖self − truth‖ / ‖truth‖` (Frobenius) over the
    /// keys of `self`; the absolute norm is used when the truth vanishes.
    pub fn relative_errors(&self, truth: &CASpectra) -> Result<BTreeMap<usize, f64>> {
        let mut acc: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
        for (key, v) in &self.values {
            let t = truth.lookup(key)?;
            let e = acc.entry(key.k).or_insert((0.0, 0.0));
            e.0 += (v - t).powi(2);
            e.1 += t * t;
        }
        Ok(acc
            .into_iter()
            .map(|(k, (d, n))| {
                let err = if n > 0.0 { (d / n).sqrt() } else { d.sqrt() };
                (k, err)
            })
            .collect())
    }

    /// CSV with columns `k,n1,n2,n3,n4,value,provenance` plus `#` metadata lines.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "k,n1,n2,n3,n4,value,provenance")?;
        for (key, v) in &self.values {
            let mut cols: Vec<String> = key.n.iter().map(|n| n.to_string()).collect();
            cols.resize(4, String::new());
            writeln!(out, "{},{},{v:e},{}", key.k, cols.join(","), self.provenance)?;
        }
        let join = |s: &BTreeSet<usize>| {
            s.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(";")
        };
        writeln!(out, "# L={}", self.windows)?;
        writeln!(out, "# T={}", self.total_time)?;
        writeln!(out, "# orders={}", join(&self.orders))?;
        writeln!(out, "# declared_zero_orders={}", join(&self.declared_zero_orders))?;
        if let Some(k) = self.folded {
            writeln!(out, "# folded={k}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<CASpectra> {
        let bad = |line: usize, what: &str| QnsError::Config(format!("spectra CSV line {line}: {what}"));
        let mut values = BTreeMap::new();
        let mut provenance = None;
        let (mut windows, mut total_time) = (None, None);
        let (mut orders, mut declared, mut folded) = (BTreeSet::new(), BTreeSet::new(), None);
        let parse_set = |s: &str| -> Result<BTreeSet<usize>> {
            s.split(';')
                .filter(|p| !p.is_empty())
                .map(|p| p.parse().map_err(|_| QnsError::Config(format!("bad order list `{s}`"))))
                .collect()
        };
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if i == 0 || line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                let Some((k, v)) = meta.trim().split_once('=') else { continue };
                match k.trim() {
                    "L" => windows = Some(v.parse().map_err(|_| bad(i + 1, "bad L"))?),
                    "T" => total_time = Some(v.parse().map_err(|_| bad(i + 1, "bad T"))?),
                    "orders" => orders = parse_set(v)?,
                    "declared_zero_orders" => declared = parse_set(v)?,
                    "folded" => folded = Some(v.parse().map_err(|_| bad(i + 1, "bad folded"))?),
                    _ => {}
                }
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 7 {
                return Err(bad(i + 1, "expected 7 columns"));
            }
            let k: usize = cols[0].parse().map_err(|_| bad(i + 1, "bad k"))?;
            let n: Vec<usize> = cols[1..=k.min(4)]
                .iter()
                .map(|c| c.parse().map_err(|_| bad(i + 1, "bad window index")))
                .collect::<Result<_>>()?;
            let v: f64 = cols[5].parse().map_err(|_| bad(i + 1, "bad value"))?;
            provenance = Some(cols[6].parse()?);
            values.insert(SpectrumKey::new(n), v);
        }
        let windows = windows.ok_or_else(|| QnsError::Config("spectra CSV lacks `# L=`".into()))?;
        let total_time = total_time.ok_or_else(|| QnsError::Config("spectra CSV lacks `# T=`".into()))?;
        Ok(CASpectra {
            windows,
            total_time,
            orders,
            values,
            provenance: provenance.unwrap_or(Provenance::Exact),
            declared_zero_orders: declared,
            folded,
        })
    }
}

/// `∫_{a ≤ t_m ≤ … ≤ t_1 ≤ a+h} exp(Σ_j c_j t_j)` for rates listed latest-first.
///
/// With gaps `d_i = t_i − t_{i+1}` the exponent becomes `Σ_i s_i d_i` with partial sums
/// `s_i = c_1 + … + c_i`; the simplex integral is `h^m` times the divided difference
/// of `exp` on the nodes `{0, h s_1, …, h s_m}`, read off a bidiagonal matrix exponential.
pub fn ordered_block_integral(rates: &[C64], start: f64, width: f64) -> C64 {
    let m = rates.len();
    if m == 0 {
        return C64::from(1.0);
    }
    let mut a = DMatrix::<C64>::zeros(m + 1, m + 1);
    let mut s = C64::from(0.0);
    for (i, c) in rates.iter().enumerate() {
        s += c;
        a[(i + 1, i + 1)] = s * width;
        a[(i, i + 1)] = C64::from(1.0);
    }
    let dd = a.exp()[(0, m)];
    (s * start).exp() * dd * width.powi(m as i32)
}

/// Ground-truth CA spectra for `k = 1..=order`, evaluated in closed form from the
/// separable moment kernel.
pub fn ca_spectra_exact(model: &NoiseModel, windows: usize, total_time: f64, order: usize) -> Result<CASpectra> {
    if order == 0 || order > 4 {
        return Err(QnsError::UnsupportedOrder {
            order,
            supported: "1..=4",
        });
    }
    if windows == 0 || !(total_time > 0.0) {
        return Err(QnsError::param("L/T", "need L ≥ 1 and T > 0"));
    }
    let tau = total_time / windows as f64;
    let mut out = CASpectra::new(windows, total_time, Provenance::Exact);
    for k in 1..=order {
        let kernel = model.moment_kernel(k)?;
        out.orders.insert(k);
        for key in multi_indices(windows, k) {
            let v: f64 = kernel
                .iter()
                .map(|term| term.coef * window_product(&key.n, &term.rates, tau))
                .sum::<C64>()
                .re;
            out.values.insert(key, v);
        }
    }
    Ok(out)
}

/// Product over runs of equal windows of the in-window ordered integrals.
fn window_product(n: &[usize], rates: &[C64], tau: f64) -> C64 {
    let mut acc = C64::from(1.0);
    let mut i = 0;
    while i < n.len() {
        let mut j = i;
        while j < n.len() && n[j] == n[i] {
            j += 1;
        }
        acc *= ordered_block_integral(&rates[i..j], (n[i] - 1) as f64 * tau, tau);
        i = j;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::ordered_window_integral;
    use approx::assert_relative_eq;

    #[test]
    fn index_counts() {
        for (k, c) in [(1, 4), (2, 10), (3, 20), (4, 35)] {
            let keys = multi_indices(4, k);
            assert_eq!(keys.len(), c);
            assert_eq!(binomial(4 + k - 1, k), c);
            assert!(keys.iter().all(|key| key.n.windows(2).all(|w| w[0] >= w[1])));
        }
        let irreducible: Vec<usize> = (1..=4)
            .map(|k| multi_indices(4, k).iter().filter(|x| x.is_irreducible()).count())
            .collect();
        assert_eq!(irreducible, vec![4, 10, 16, 19]);
        let all: BTreeSet<usize> = (1..=4).collect();
        assert_eq!(unknown_keys(4, &all, true).len(), 49);
    }

    #[test]
    fn fold_targets() {
        let (t, f) = SpectrumKey::new(vec![3, 3, 3, 1]).fold_target();
        assert_eq!((t.n, f), (vec![3, 1], -4.0));
        let (t, f) = SpectrumKey::new(vec![2, 2, 2, 2]).fold_target();
        assert_eq!((t.n, f), (vec![2, 2], -4.0));
        let (t, f) = SpectrumKey::new(vec![4, 2, 2, 1]).fold_target();
        assert_eq!((t.n, f), (vec![4, 2, 2, 1], 1.0));
    }

    #[test]
    fn odd_orders_vanish() {
        let m = NoiseModel::modulated(0.02, 0.6, 1.0).unwrap();
        let s = ca_spectra_exact(&m, 4, 3.2, 4).unwrap();
        for k in [1, 3] {
            assert!(s.order_values(k).all(|(_, v)| *v == 0.0));
        }
        assert_eq!(s.order_values(4).count(), 35);
    }

    #[test]
    fn same_window_second_order_closed_form() {
        let (gamma, g, tt) = (0.3, 0.7, 3.2);
        let m = NoiseModel::telegraph(gamma, g).unwrap();
        let s = ca_spectra_exact(&m, 4, tt, 2).unwrap();
        let tau = tt / 4.0;
        let expect = g * g * (2.0 * gamma * tau - 1.0 + (-2.0 * gamma * tau).exp()) / (4.0 * gamma * gamma);
        for n in 1..=4 {
            assert_relative_eq!(s.get(&SpectrumKey::new(vec![n, n])).unwrap(), expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn slow_switching_limit() {
        let m = NoiseModel::telegraph(1e-9, 0.5).unwrap();
        let s = ca_spectra_exact(&m, 4, 2.0, 2).unwrap();
        assert_relative_eq!(s.get(&SpectrumKey::new(vec![2, 2])).unwrap(), 0.25 * 0.25 / 2.0, max_relative = 1e-8);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for m in [
            NoiseModel::telegraph(0.4, 0.8).unwrap(),
            NoiseModel::modulated(0.3, 0.8, 2.1).unwrap(),
        ] {
            let s = ca_spectra_exact(&m, 4, 3.2, 4).unwrap();
            for k in [2, 4] {
                for key in multi_indices(4, k) {
                    let q = ordered_window_integral(&key.n, 0.8, 10, |t| m.moment(t).unwrap());
                    let v = s.get(&key).unwrap();
                    assert!((v - q).abs() < 1e-12 * (1.0 + q.abs()), "{key}: {v} vs {q}");
                }
            }
        }
    }

    #[test]
    fn decays_with_window_separation() {
        let m = NoiseModel::telegraph(0.5, 1.0).unwrap();
        let s = ca_spectra_exact(&m, 6, 6.0, 2).unwrap();
        // distinct windows only; the same-window entry integrates over half the area
        let vals: Vec<f64> = (1..6).map(|d| s.get(&SpectrumKey::new(vec![6, 6 - d])).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
    }

    #[test]
    fn folding_preserves_contractions() {
        // Σ_all c(key)·S(key) equals Σ_irreducible c(key)·S_eff(key) when c obeys the
        // fold relation c(reducible) = (−4)^j c(target).
        let m = NoiseModel::telegraph(0.1, 0.9).unwrap();
        let s = ca_spectra_exact(&m, 4, 3.2, 4).unwrap();
        let f = s.fold(4).unwrap();
        assert_eq!(f.values.len(), 49);
        let weight = |key: &SpectrumKey| (key.n.iter().sum::<usize>() as f64).sin() + key.k as f64;
        let full: f64 = s
            .values
            .iter()
            .map(|(key, v)| {
                let (t, fac) = key.fold_target();
                fac * weight(&t) * v
            })
            .sum();
        let folded: f64 = f.values.iter().map(|(key, v)| weight(key) * v).sum();
        assert_relative_eq!(full, folded, max_relative = 1e-13);
        assert!(f.fold(2).is_err());
    }

    #[test]
    fn lookup_rules() {
        let mut s = CASpectra::new(2, 1.0, Provenance::Estimated);
        s.insert(SpectrumKey::new(vec![1]), 0.5);
        s.declared_zero_orders.insert(3);
        assert_eq!(s.lookup(&SpectrumKey::new(vec![2, 1, 1])).unwrap(), 0.0);
        assert!(matches!(
            s.lookup(&SpectrumKey::new(vec![2, 1])),
            Err(QnsError::IncompleteSpectra { order: 2, .. })
        ));
    }

    #[test]
    fn csv_roundtrip() {
        let m = NoiseModel::telegraph(0.02, 0.6).unwrap();
        let mut s = ca_spectra_exact(&m, 4, 3.2, 4).unwrap().fold(4).unwrap();
        s.declared_zero_orders.insert(3);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("k,n1,n2,n3,n4,value,provenance\n1,1,,,,"));
        let back = CASpectra::read_csv(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(back, s);
    }
}
