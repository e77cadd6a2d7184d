//! Ratio of coherent to incoherent hopping norms on disordered annuli, averaged
//! over ten seeds, as the scatterer count grows.
//!
//! cargo run --release --example coherent_suppression

use photon_coupler::coupling::{hopping_coherent_pp, hopping_incoherent_pp};
use photon_coupler::geometry::gen_uniform_cylinder;
use photon_coupler::modes::BasisSpec;

fn frobenius(m: &nalgebra::DMatrix<num_complex::Complex64>) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn main() -> photon_coupler::Result<()> {
    let spec = BasisSpec::radial(25);
    for count in [50, 200, 1000, 2000] {
        let mut sum = 0.0;
        for seed in 0..10 {
            let arch = gen_uniform_cylinder(0.7, 6.4, count, seed)?;
            sum += frobenius(&hopping_coherent_pp(&arch, &spec).entries) / frobenius(&hopping_incoherent_pp(&arch, &spec).entries);
        }
        println!("{count:>5} scatterers: <|coh|/|inc|> = {:.3}", sum / 10.0);
    }
    Ok(())
}
