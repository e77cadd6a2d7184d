//! End to end on a uniform annulus: hopping, scattering potential, geometry
//! tensor, LG-diagonal interaction, then two photons evolved in the lowest
//! radial modes.
//!
//! cargo run --release --example uc_pipeline

use photon_coupler::coupling::analysis::{confinement_block, real_part};
use photon_coupler::coupling::{
    assemble_hamiltonian, hopping_coherent_pp, hopping_incoherent_pp, interaction_tensor, reduce_lg_diagonal, scattering_potential,
    structural_tensor, total_hopping, Interaction, PotentialOptions,
};
use photon_coupler::fock::{density, hamiltonian_matrix, number_commutator_norm, number_state, EvolveOptions, FockBasis, Propagator};
use photon_coupler::geometry::gen_uniform_cylinder;
use photon_coupler::modes::{power_radius, BasisSpec, ModeIndex};

fn main() -> photon_coupler::Result<()> {
    let spec = BasisSpec::radial(7);
    let c = power_radius(ModeIndex::new(0, 25), 0.95, &BasisSpec::radial(25))?;
    let arch = gen_uniform_cylinder(0.05 * c, 0.25 * c, 400, 7)?.with_couplings(1e-3, 1e-3);

    let inc = hopping_incoherent_pp(&arch, &spec);
    let theta = total_hopping(arch.omega0, &hopping_coherent_pp(&arch, &spec), &inc);
    let block = confinement_block(&real_part(&inc.entries));
    println!("confinement block p {}..{}, flanked: {}", block.start, block.end, block.is_flanked());

    let v = scattering_potential(&spec, 0.001 * spec.q_max * spec.q_max, &PotentialOptions::default())?;
    let u = interaction_tensor(&structural_tensor(&arch, &spec), &v.entries.to_complex())?;
    let red = reduce_lg_diagonal(&u);
    println!("LG-diagonal reduction discards {:.1}% of |U|", 100.0 * red.discarded_weight);

    let h = assemble_hamiltonian(&theta, Interaction::LgDiagonal(red.matrix))?;
    println!("defects: hopping {:.2e}, Im Ucal {:.2e}, Ucal asymmetry {:.2e}", h.hopping_defect, h.interaction_defect, h.symmetry_defect);

    let basis = FockBasis::new(spec.mode_count(), 2)?;
    let mat = hamiltonian_matrix(&h, &basis)?;
    println!("Fock dimension {}, [H, N] = {:.1e}", basis.dim(), number_commutator_norm(&mat, &basis));
    let mut occ = vec![0u16; spec.mode_count()];
    occ[2] = 2;
    let psi = number_state(&basis, &occ)?;
    let prop = Propagator::new(&mat, EvolveOptions::default())?;
    for tau in [0.0, 50.0, 200.0] {
        let out = prop.apply(&psi, tau)?;
        let n: Vec<String> = (0..spec.mode_count()).map(|r| format!("{:.3}", density(&basis, &out, r).unwrap())).collect();
        println!("tau {tau:>5}: norm {:.12}, n = [{}]", out.norm(), n.join(", "));
    }
    Ok(())
}
