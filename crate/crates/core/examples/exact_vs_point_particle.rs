//! Hopping from the momentum integrals against the point-particle sums for a
//! tight cluster of scatterers, with the principal-value stability checks.
//!
//! cargo run --release --example exact_vs_point_particle

use photon_coupler::coupling::analysis::scale_free_correlation;
use photon_coupler::coupling::exact::epsilon_halving_change;
use photon_coupler::coupling::{hopping_coherent_exact, hopping_coherent_pp, hopping_incoherent_exact, hopping_incoherent_pp, ExactOptions};
use photon_coupler::geometry::{Architecture, Scatterer};
use photon_coupler::modes::BasisSpec;
use photon_coupler::pv::PvScheme;

fn main() -> photon_coupler::Result<()> {
    let spec = BasisSpec::full(1, 2).with_q_max(30.0);
    let arch = Architecture::new(
        "cluster",
        vec![Scatterer::point(0.02, 0.0), Scatterer::point(-0.01, 0.03), Scatterer::point(0.0, -0.04), Scatterer::point(0.035, 0.02)],
    )
    .with_gaps(&[1e-4]);
    let opts = ExactOptions::default();
    let coh = hopping_coherent_exact(&arch, &spec, &opts)?;
    let inc = hopping_incoherent_exact(&arch, &spec, &opts)?;
    println!("{} modes, q_max = {}", spec.mode_count(), spec.q_max);
    println!("coherent   correlation with point particle: {:.4}", scale_free_correlation(&coh.entries, &hopping_coherent_pp(&arch, &spec).entries));
    println!("incoherent correlation with point particle: {:.4}", scale_free_correlation(&inc.combined.entries, &hopping_incoherent_pp(&arch, &spec).entries));
    println!("incoherent Hermiticity defect: {:.3e}", inc.combined.hermiticity_defect());
    let excluded = ExactOptions { scheme: PvScheme::Excluded, ..opts };
    let (c, i) = epsilon_halving_change(&arch, &spec, &excluded)?;
    println!("excluded-window scheme, epsilon halved: coherent {c:.3e}, incoherent {i:.3e}");
    Ok(())
}
