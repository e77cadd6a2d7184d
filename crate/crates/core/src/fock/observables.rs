//! Photon densities, two-time density correlators and time series.

use std::collections::BTreeMap;

use serde::Serialize;

use super::basis::{FockBasis, StateVector};
use super::evolve::Propagator;
use crate::error::{Error, Result};

fn check_mode(basis: &FockBasis, r: i64) -> Result<usize> {
    if r < 0 || r as usize >= basis.modes() {
        return Err(Error::domain(format!("mode index {r} outside 0..{}", basis.modes())));
    }
    Ok(r as usize)
}

fn check_state(basis: &FockBasis, psi: &StateVector) -> Result<()> {
    if psi.amplitudes.len() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: psi.amplitudes.len(),
        });
    }
    Ok(())
}

/// `<n_r>`.
pub fn density(basis: &FockBasis, psi: &StateVector, r: usize) -> Result<f64> {
    check_state(basis, psi)?;
    let r = check_mode(basis, r as i64)?;
    Ok(basis
        .states()
        .iter()
        .zip(&psi.amplitudes)
        .map(|(s, a)| s[r] as f64 * a.norm_sqr())
        .sum())
}

pub fn total_number(basis: &FockBasis, psi: &StateVector) -> Result<f64> {
    check_state(basis, psi)?;
    Ok((0..basis.dim()).map(|i| basis.total(i) as f64 * psi.amplitudes[i].norm_sqr()).sum())
}

fn apply_number(basis: &FockBasis, psi: &StateVector, r: usize) -> StateVector {
    StateVector {
        amplitudes: basis
            .states()
            .iter()
            .zip(&psi.amplitudes)
            .map(|(s, a)| a * s[r] as f64)
            .collect(),
    }
}

/// Time evolution used by the correlators. With an interaction time set,
/// the full Hamiltonian acts up to that time and the hopping-only one after.
#[derive(Debug, Clone)]
pub struct Schedule {
    pub full: Propagator,
    pub quench: Option<(f64, Propagator)>,
}

impl Schedule {
    pub fn new(full: Propagator) -> Self {
        Schedule { full, quench: None }
    }

    pub fn with_quench(full: Propagator, interaction_time: f64, hopping_only: Propagator) -> Result<Self> {
        if !(interaction_time >= 0.0) || !interaction_time.is_finite() {
            return Err(Error::domain("interaction time must be finite and non-negative"));
        }
        Ok(Schedule {
            full,
            quench: Some((interaction_time, hopping_only)),
        })
    }

    pub fn apply(&self, psi: &StateVector, tau: f64) -> Result<StateVector> {
        match &self.quench {
            Some((t_int, hop)) if tau > *t_int => {
                let mid = self.full.apply(psi, *t_int)?;
                hop.apply(&mid, tau - t_int)
            }
            _ => self.full.apply(psi, tau),
        }
    }

    pub fn non_unitary(&self) -> bool {
        self.full.non_unitary || self.quench.as_ref().is_some_and(|(_, p)| p.non_unitary)
    }
}

/// `Re <psi0| n_r U+ n_{r+R} U |psi0>`, from the two evolved vectors
/// `U psi0` and `U n_r psi0`.
pub fn two_time_correlator(basis: &FockBasis, evo: &Schedule, psi0: &StateVector, r: usize, offset: i64, tau: f64) -> Result<f64> {
    check_state(basis, psi0)?;
    let r = check_mode(basis, r as i64)?;
    let target = check_mode(basis, r as i64 + offset)?;
    let left = evo.apply(&apply_number(basis, psi0, r), tau)?;
    let right = evo.apply(psi0, tau)?;
    Ok(sandwich(basis, &left, &right, target))
}

fn sandwich(basis: &FockBasis, left: &StateVector, right: &StateVector, target: usize) -> f64 {
    basis
        .states()
        .iter()
        .zip(left.amplitudes.iter().zip(&right.amplitudes))
        .map(|(s, (l, rr))| (l.conj() * rr * s[target] as f64).re)
        .sum()
}

/// Sum of `two_time_correlator` over every offset with `r + R` in range.
/// The two evolutions are shared across offsets.
pub fn nonlocal_sum(basis: &FockBasis, evo: &Schedule, psi0: &StateVector, r: usize, tau: f64) -> Result<f64> {
    check_state(basis, psi0)?;
    let r = check_mode(basis, r as i64)?;
    let left = evo.apply(&apply_number(basis, psi0, r), tau)?;
    let right = evo.apply(psi0, tau)?;
    Ok((0..basis.modes()).map(|t| sandwich(basis, &left, &right, t)).sum())
}

/// One requested observable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Observable {
    Density(usize),
    TotalNumber,
    Norm,
    Correlator { r: usize, offset: i64 },
    NonlocalSum(usize),
}

impl Observable {
    pub fn label(&self) -> String {
        match self {
            Observable::Density(r) => format!("n_{r}"),
            Observable::TotalNumber => "N_total".into(),
            Observable::Norm => "norm".into(),
            Observable::Correlator { r, offset } => format!("C_{r}_{offset}"),
            Observable::NonlocalSum(r) => format!("S_{r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    /// Per time, label to value.
    pub values: Vec<BTreeMap<String, f64>>,
    /// Labels in request order.
    pub labels: Vec<String>,
}

impl ObservableSeries {
    pub fn get(&self, t: usize, label: &str) -> Option<f64> {
        self.values.get(t)?.get(label).copied()
    }

    /// Rows `(tau, label, value)` ordered by time, then request order.
    pub fn rows(&self) -> Vec<(f64, String, f64)> {
        let mut out = Vec::new();
        for (t, map) in self.times.iter().zip(&self.values) {
            for l in &self.labels {
                out.push((*t, l.clone(), map[l]));
            }
        }
        out
    }
}

pub fn observable_series(basis: &FockBasis, evo: &Schedule, psi0: &StateVector, times: &[f64], observables: &[Observable]) -> Result<ObservableSeries> {
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("series times must be strictly increasing"));
    }
    let labels: Vec<String> = observables.iter().map(Observable::label).collect();
    let mut values = Vec::with_capacity(times.len());
    for &tau in times {
        let psi = evo.apply(psi0, tau)?;
        let mut map = BTreeMap::new();
        for (obs, label) in observables.iter().zip(&labels) {
            let v = match obs {
                Observable::Density(r) => density(basis, &psi, *r)?,
                Observable::TotalNumber => total_number(basis, &psi)?,
                Observable::Norm => psi.norm(),
                Observable::Correlator { r, offset } => two_time_correlator(basis, evo, psi0, *r, *offset, tau)?,
                Observable::NonlocalSum(r) => nonlocal_sum(basis, evo, psi0, *r, tau)?,
            };
            map.insert(label.clone(), v);
        }
        values.push(map);
    }
    Ok(ObservableSeries {
        times: times.to_vec(),
        values,
        labels,
    })
}

/// `n` evenly spaced times on `[start, stop]`.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n).map(|i| start + (stop - start) * i as f64 / (n - 1) as f64).collect(),
    }
}
