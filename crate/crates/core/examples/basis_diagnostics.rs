//! Orthonormality, closure and power radii of a truncated LG basis, plus
//! the longitudinal attenuation of the highest transverse momenta.
//!
//! cargo run --release --example basis_diagnostics

use photon_coupler::modes::{
    attenuation_decades, completeness_residual, default_grid, gram_matrix, gram_residual, power_radius, BasisSpec, ModeIndex,
};

fn main() -> photon_coupler::Result<()> {
    let spec = BasisSpec::full(3, 5);
    let gram = gram_matrix(&spec, &default_grid(&spec));
    println!("{} modes, q_max = {:.4}", spec.mode_count(), spec.q_max);
    println!("max |G - I| = {:.3e}", gram_residual(&gram));

    // Closure improves as the basis grows; at the origin it never does.
    for p_max in [2, 8, 16] {
        let s = BasisSpec::full(2, p_max);
        let near = completeness_residual(&s, [0.4, 0.2], [0.3, -0.1])?;
        let origin = completeness_residual(&s, [0.0, 0.0], [0.0, 0.0])?;
        println!("p_max {p_max:>2}: closure residual {near:.3e} near the axis, {origin:.3} at the origin");
    }

    let radial = BasisSpec::radial(25);
    for p in [0, 5, 10, 25] {
        let c = power_radius(ModeIndex::new(0, p), 0.95, &radial)?;
        println!("95% power radius of (0, {p:>2}) = {c:.6} w0");
    }
    for (l, p) in [(1, 1), (2, 2), (2, 3)] {
        println!("attenuation, 10^{l} wavelengths at q_max = 10^-{p} k0: {:.5}", attenuation_decades(l, p, radial.k0));
    }
    Ok(())
}
