//! A photon hopping between two modes, evolved densely and with Krylov
//! steps, against the closed form cos^2(theta tau).
//!
//! cargo run --release --example rabi_dynamics

use nalgebra::DMatrix;
use num_complex::Complex64;
use photon_coupler::coupling::{assemble_from_matrix, Interaction};
use photon_coupler::fock::{density, hamiltonian_matrix, number_state, EvolveOptions, FockBasis, Method, Propagator};

fn main() -> photon_coupler::Result<()> {
    let theta = 0.8;
    let t = DMatrix::from_row_slice(2, 2, &[0.0, theta, theta, 0.0]).map(|x| Complex64::new(x, 0.0));
    let basis = FockBasis::new(2, 1)?;
    let h = hamiltonian_matrix(&assemble_from_matrix(t, Interaction::None)?, &basis)?;
    let psi = number_state(&basis, &[1, 0])?;
    let dense = Propagator::new(&h, EvolveOptions::default())?;
    let krylov = Propagator::new(&h, EvolveOptions { method: Method::Krylov, ..Default::default() })?;
    println!("{:>6} {:>12} {:>12} {:>12}", "tau", "dense", "krylov", "cos^2");
    for k in 0..=10 {
        let tau = k as f64 / theta;
        let a = density(&basis, &dense.apply(&psi, tau)?, 0)?;
        let b = density(&basis, &krylov.apply(&psi, tau)?, 0)?;
        println!("{tau:>6.2} {a:>12.9} {b:>12.9} {:>12.9}", (theta * tau).cos().powi(2));
    }
    Ok(())
}
