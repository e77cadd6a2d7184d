//! Four-mode scattering potential on the l = 0, p <= 25 basis for the gap
//! values 0.001, 0.01, 0.02 and 0.05 (in units of q_max^2). Prints how
//! delta-like the partial traces are and how wide their bands get.
//!
//! cargo run --release --example scattering_potential

use std::time::Instant;

use photon_coupler::coupling::analysis::{half_max_bandwidth, offdiag_ratio};
use photon_coupler::coupling::{partial_trace, scattering_potential, PotentialOptions, TracePair};
use photon_coupler::modes::BasisSpec;

fn main() -> photon_coupler::Result<()> {
    let spec = BasisSpec::radial(25);
    let opts = PotentialOptions::default();
    println!("q_max = {:.6}, {} modes", spec.q_max, spec.mode_count());
    println!("{:>8} {:>13} {:>13} {:>10} {:>10} {:>8}", "D/q^2", "V_nm[0,0]", "V_nm[10,11]", "ratio_nm", "ratio_kl", "bw_mk");
    for frac in [0.001, 0.01, 0.02, 0.05] {
        let start = Instant::now();
        let v = scattering_potential(&spec, frac * spec.q_max * spec.q_max, &opts)?;
        let nm = partial_trace(&v.entries, TracePair::Last);
        let kl = partial_trace(&v.entries, TracePair::First);
        let mk = partial_trace(&v.entries, TracePair::Outer);
        println!(
            "{:>8} {:>13.7} {:>13.8} {:>10.4} {:>10.4} {:>8}   ({:.1?})",
            frac,
            nm[(0, 0)],
            nm[(10, 11)],
            offdiag_ratio(&nm),
            offdiag_ratio(&kl),
            half_max_bandwidth(&mk),
            start.elapsed()
        );
    }
    Ok(())
}
