//! Local and nonlocal two-time density correlators for two photons in a
//! chain of four modes with on-site attraction, with and without switching
//! the interaction off halfway.
//!
//! cargo run --release --example correlators

use nalgebra::DMatrix;
use num_complex::Complex64;
use photon_coupler::coupling::{assemble_from_matrix, Interaction};
use photon_coupler::fock::{hamiltonian_matrix, number_state, observable_series, EvolveOptions, FockBasis, Observable, Propagator, Schedule};

fn main() -> photon_coupler::Result<()> {
    let m = 4;
    let theta = DMatrix::from_fn(m, m, |i, j| Complex64::new(if i.abs_diff(j) == 1 { -1.0 } else { 0.0 }, 0.0));
    let ucal = DMatrix::from_fn(m, m, |i, j| Complex64::new(if i == j { 1.5 } else { 0.0 }, 0.0));
    let h = assemble_from_matrix(theta, Interaction::LgDiagonal(ucal))?;
    let basis = FockBasis::new(m, 2)?;
    let full = Propagator::new(&hamiltonian_matrix(&h, &basis)?, EvolveOptions::default())?;
    let hop = Propagator::new(&hamiltonian_matrix(&h.hopping_only(), &basis)?, EvolveOptions::default())?;
    let psi = number_state(&basis, &[0, 2, 0, 0])?;
    let obs = [
        Observable::Density(1),
        Observable::Correlator { r: 1, offset: 0 },
        Observable::Correlator { r: 1, offset: 1 },
        Observable::NonlocalSum(1),
    ];
    let times: Vec<f64> = (0..=8).map(|k| 0.5 * k as f64).collect();
    for (name, sched) in [("interacting", Schedule::new(full.clone())), ("quenched at 2", Schedule::with_quench(full, 2.0, hop)?)] {
        let s = observable_series(&basis, &sched, &psi, &times, &obs)?;
        println!("{name}");
        println!("{:>5} {}", "tau", s.labels.iter().map(|l| format!("{l:>10}")).collect::<String>());
        for (i, t) in s.times.iter().enumerate() {
            println!("{t:>5.1} {}", s.labels.iter().map(|l| format!("{:>10.5}", s.get(i, l).unwrap())).collect::<String>());
        }
    }
    Ok(())
}
