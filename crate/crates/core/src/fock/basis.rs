//! Occupation-number bases.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest basis built unless a caller raises the cap.
pub const DEFAULT_CAP: usize = 200_000;

pub type Occupation = Vec<u16>;

/// Occupation vectors of `M` modes, either with a fixed photon number or
/// with every photon number up to a bound. Within one photon number the
/// order is descending lexicographic, so `(N, 0, ..)` comes first.
#[derive(Debug, Clone)]
pub struct FockBasis {
    modes: usize,
    photons: usize,
    fixed: bool,
    states: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

/// `C(n + m - 1, n)`, saturating at `u128::MAX`.
pub fn sector_dimension(m: usize, n: usize) -> u128 {
    if m == 0 {
        return u128::from(n == 0);
    }
    let mut acc: u128 = 1;
    for i in 1..=n as u128 {
        match acc.checked_mul(m as u128 - 1 + i) {
            Some(v) => acc = v / i,
            None => return u128::MAX,
        }
    }
    acc
}

impl FockBasis {
    /// Fixed photon number `n` over `m` modes.
    pub fn new(m: usize, n: usize) -> Result<Self> {
        Self::with_cap(m, n, DEFAULT_CAP)
    }

    pub fn with_cap(m: usize, n: usize, cap: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("a Fock basis needs at least one mode"));
        }
        let dim = sector_dimension(m, n);
        if dim > cap as u128 {
            return Err(Error::Capacity {
                dimension: dim.min(usize::MAX as u128) as usize,
                cap,
            });
        }
        let mut states = Vec::with_capacity(dim as usize);
        let mut cur = vec![0u16; m];
        fill(&mut cur, 0, n, &mut states);
        Ok(Self::from_states(m, n, true, states))
    }

    /// Every photon number `0..=n_max`, sectors in ascending order.
    pub fn truncated(m: usize, n_max: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("a Fock basis needs at least one mode"));
        }
        let dim: u128 = (0..=n_max).map(|n| sector_dimension(m, n)).fold(0u128, |a, b| a.saturating_add(b));
        if dim > DEFAULT_CAP as u128 {
            return Err(Error::Capacity {
                dimension: dim.min(usize::MAX as u128) as usize,
                cap: DEFAULT_CAP,
            });
        }
        let mut states = Vec::with_capacity(dim as usize);
        for n in 0..=n_max {
            let mut cur = vec![0u16; m];
            fill(&mut cur, 0, n, &mut states);
        }
        Ok(Self::from_states(m, n_max, false, states))
    }

    fn from_states(modes: usize, photons: usize, fixed: bool, states: Vec<Occupation>) -> Self {
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        FockBasis {
            modes,
            photons,
            fixed,
            states,
            index,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Photon number of a fixed sector, or `None` for a truncated basis.
    pub fn photons(&self) -> Option<usize> {
        self.fixed.then_some(self.photons)
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &Occupation {
        &self.states[i]
    }

    pub fn index_of(&self, occ: &[u16]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    pub fn total(&self, i: usize) -> usize {
        self.states[i].iter().map(|&x| x as usize).sum()
    }
}

fn fill(cur: &mut Vec<u16>, pos: usize, left: usize, out: &mut Vec<Occupation>) {
    if pos + 1 == cur.len() {
        cur[pos] = left as u16;
        out.push(cur.clone());
        return;
    }
    for k in (0..=left).rev() {
        cur[pos] = k as u16;
        fill(cur, pos + 1, left - k, out);
    }
    cur[pos] = 0;
}

/// Normalized amplitudes over a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn overlap(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }
}

/// `|1> = sum_n C_n a+_n |0>`, normalized. Needs a one-photon basis.
pub fn prepare_product_state(c: &[Complex64], basis: &FockBasis) -> Result<StateVector> {
    if basis.photons() != Some(1) {
        return Err(Error::domain("single-photon preparation needs an N = 1 basis"));
    }
    if c.len() != basis.modes() {
        return Err(Error::DimensionMismatch {
            expected: basis.modes(),
            found: c.len(),
        });
    }
    let norm = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::domain("mode amplitudes must not all vanish"));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
    for (n, cn) in c.iter().enumerate() {
        let mut occ = vec![0u16; basis.modes()];
        occ[n] = 1;
        amps[basis.index_of(&occ).expect("single-photon state present")] = cn / norm;
    }
    Ok(StateVector { amplitudes: amps })
}

/// The number state `occ`.
pub fn number_state(basis: &FockBasis, occ: &[u16]) -> Result<StateVector> {
    let i = basis
        .index_of(occ)
        .ok_or_else(|| Error::domain(format!("occupation {occ:?} is not in the basis")))?;
    let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
    amps[i] = Complex64::new(1.0, 0.0);
    Ok(StateVector { amplitudes: amps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dimensions() {
        assert_eq!(FockBasis::new(2, 1).unwrap().dim(), 2);
        assert_eq!(FockBasis::new(3, 2).unwrap().dim(), 6);
        assert_eq!(FockBasis::new(26, 1).unwrap().dim(), 26);
        assert_eq!(FockBasis::truncated(3, 2).unwrap().dim(), 1 + 3 + 6);
    }

    #[test]
    fn order_is_descending_lexicographic() {
        let b = FockBasis::new(3, 2).unwrap();
        let expect: Vec<Occupation> = vec![vec![2, 0, 0], vec![1, 1, 0], vec![1, 0, 1], vec![0, 2, 0], vec![0, 1, 1], vec![0, 0, 2]];
        assert_eq!(b.states(), &expect[..]);
    }

    #[test]
    fn capacity_is_enforced() {
        match FockBasis::new(30, 10) {
            Err(Error::Capacity { cap, .. }) => assert_eq!(cap, DEFAULT_CAP),
            other => panic!("{other:?}"),
        }
        assert!(FockBasis::with_cap(4, 3, 19).is_err());
        assert!(FockBasis::with_cap(4, 3, 20).is_ok());
    }

    #[test]
    fn product_state_follows_born_rule() {
        let b = FockBasis::new(3, 1).unwrap();
        let c = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(-2.0, 0.0)];
        let s = prepare_product_state(&c, &b).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert!((s.amplitudes[1].norm_sqr() - 4.0 / 9.0).abs() < 1e-15);
        assert!(prepare_product_state(&[Complex64::new(0.0, 0.0); 3], &b).is_err());
        assert!(prepare_product_state(&c, &FockBasis::new(3, 2).unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn index_map_is_a_bijection(m in 1usize..6, n in 0usize..5) {
            let b = FockBasis::new(m, n).unwrap();
            prop_assert_eq!(b.dim() as u128, sector_dimension(m, n));
            for (i, s) in b.states().iter().enumerate() {
                prop_assert_eq!(b.index_of(s), Some(i));
                prop_assert_eq!(b.total(i), n);
            }
        }
    }
}
