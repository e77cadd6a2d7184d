//! Incoherent hopping on uniform annuli of 2000 point scatterers. Radii are
//! fractions of the 95 % power radius of the p = 25 mode. Narrow annuli
//! confine the positive diagonal to a few radial modes.
//!
//! cargo run --release --example hopping_confinement

use photon_coupler::coupling::analysis::{confinement_block, real_part};
use photon_coupler::coupling::hopping_incoherent_pp;
use photon_coupler::geometry::gen_uniform_cylinder;
use photon_coupler::modes::{power_radius, BasisSpec, ModeIndex};

fn main() -> photon_coupler::Result<()> {
    let spec = BasisSpec::radial(25);
    let c = power_radius(ModeIndex::new(0, 25), 0.95, &spec)?;
    println!("boundary c = {c:.6} w0");
    for (i, (a, b)) in [(0.1, 0.9), (0.2, 0.8), (0.4, 1.0), (0.4, 0.6)].into_iter().enumerate() {
        let arch = gen_uniform_cylinder(a * c, b * c, 2000, 1 + i as u64)?;
        let theta = real_part(&hopping_incoherent_pp(&arch, &spec).entries);
        let block = confinement_block(&theta);
        let diag: String = (0..26).map(|n| if theta[(n, n)] >= 0.5 * theta[(block.peak, block.peak)] { '+' } else { '.' }).collect();
        println!(
            "({a}, {b}): block p {:>2}..{:>2} (extent {:>2}), {:>2}/{} neighbours negative  {diag}",
            block.start, block.end, block.extent, block.negative_neighbours, block.neighbours
        );
    }
    Ok(())
}
