//! Packaged coefficients of the effective Hamiltonian
//! `H = sum Theta_nk a+_n a_k - sum U_abcd a+_a a_b a+_c a_d`
//! or, in LG-diagonal form, `- sum Ucal_nk n_n n_k`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hopping::{hermiticity_defect, HoppingMatrix};
use crate::error::{Error, Result};
use crate::tensor::Tensor4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionForm {
    Full,
    LgDiagonal,
}

#[derive(Debug, Clone)]
pub enum Interaction {
    None,
    Full(Tensor4<Complex64>),
    LgDiagonal(DMatrix<Complex64>),
}

impl Interaction {
    pub fn dim(&self) -> Option<usize> {
        match self {
            Interaction::None => None,
            Interaction::Full(u) => Some(u.side()),
            Interaction::LgDiagonal(u) => Some(u.nrows()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    pub theta: DMatrix<Complex64>,
    pub interaction: Interaction,
    /// `max |Theta - Theta^dagger|`.
    pub hopping_defect: f64,
    /// Full form: `max |U_abcd - conj(U_dcba)|`. LG form: `max |Im Ucal|`.
    pub interaction_defect: f64,
    /// LG form only: `max |Ucal - Ucal^T|`.
    pub symmetry_defect: f64,
}

impl EffectiveHamiltonian {
    pub fn dim(&self) -> usize {
        self.theta.nrows()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.hopping_defect.max(self.interaction_defect)
    }

    pub fn form(&self) -> Option<InteractionForm> {
        match self.interaction {
            Interaction::None => None,
            Interaction::Full(_) => Some(InteractionForm::Full),
            Interaction::LgDiagonal(_) => Some(InteractionForm::LgDiagonal),
        }
    }

    /// Same hopping, no interaction.
    pub fn hopping_only(&self) -> Self {
        EffectiveHamiltonian {
            theta: self.theta.clone(),
            interaction: Interaction::None,
            hopping_defect: self.hopping_defect,
            interaction_defect: 0.0,
            symmetry_defect: 0.0,
        }
    }
}

pub fn assemble_hamiltonian(theta: &HoppingMatrix, interaction: Interaction) -> Result<EffectiveHamiltonian> {
    assemble_from_matrix(theta.entries.clone(), interaction)
}

pub fn assemble_from_matrix(theta: DMatrix<Complex64>, interaction: Interaction) -> Result<EffectiveHamiltonian> {
    if theta.nrows() != theta.ncols() {
        return Err(Error::DimensionMismatch {
            expected: theta.nrows(),
            found: theta.ncols(),
        });
    }
    let m = theta.nrows();
    if let Some(d) = interaction.dim() {
        if d != m {
            return Err(Error::DimensionMismatch { expected: m, found: d });
        }
    }
    let (interaction_defect, symmetry_defect) = match &interaction {
        Interaction::None => (0.0, 0.0),
        Interaction::Full(u) => {
            let mut worst: f64 = 0.0;
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        for d in 0..m {
                            worst = worst.max((u.get(a, b, c, d) - u.get(d, c, b, a).conj()).norm());
                        }
                    }
                }
            }
            (worst, 0.0)
        }
        Interaction::LgDiagonal(u) => {
            let imag = u.iter().fold(0.0f64, |x, c| x.max(c.im.abs()));
            let sym = (u - u.transpose()).iter().fold(0.0f64, |x, c| x.max(c.norm()));
            (imag, sym)
        }
    };
    Ok(EffectiveHamiltonian {
        hopping_defect: hermiticity_defect(&theta),
        theta,
        interaction,
        interaction_defect,
        symmetry_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::hopping::HoppingKind;

    #[test]
    fn hermitian_inputs_have_no_defect() {
        let theta = DMatrix::from_fn(3, 3, |i, j| Complex64::new((i + j) as f64, i as f64 - j as f64));
        let u = DMatrix::from_fn(3, 3, |i, j| Complex64::new((i * j) as f64 + 1.0, 0.0));
        let h = assemble_hamiltonian(&HoppingMatrix::new(HoppingKind::Total, theta), Interaction::LgDiagonal(u)).unwrap();
        assert!(h.hermiticity_defect() < 1e-12);
        assert_eq!(h.symmetry_defect, 0.0);
    }

    #[test]
    fn injected_asymmetry_is_reported() {
        let mut theta = DMatrix::<Complex64>::identity(2, 2);
        theta[(0, 1)] = Complex64::new(0.25, 0.0);
        let h = assemble_from_matrix(theta, Interaction::None).unwrap();
        assert!((h.hopping_defect - 0.25).abs() < 1e-15);
        let bad = assemble_from_matrix(DMatrix::identity(2, 2), Interaction::LgDiagonal(DMatrix::zeros(3, 3)));
        assert!(bad.is_err());
    }
}
