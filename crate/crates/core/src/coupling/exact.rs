//! Hopping matrices from the full momentum integrals.
//!
//! With orbital factors `w(k) = exp(-k^2 sigma^2 / 2)` (point particles:
//! `sigma = 0`, `w = 1`):
//!
//! ```text
//! coherent:    2 sum_{a != b} int d2k d2q d2s exp(-i (k-q).r_a + i (s-q).r_b)
//!                  conj(phi_n(k)) w(k-q) w(s-q) phi_m(s) / (q^2 - k^2)
//! incoherent:  2 sum_a int d2k d2q' d2s exp(-i (k-s).r_a)
//!                  conj(phi_n(k)) w(k-q') w(s-q') phi_m(s) / (q'^2 - k^2 - D)
//! ```
//!
//! In the incoherent term `s` is the outgoing momentum and `q'` the virtual
//! one carrying the energy denominator.
//!
//! For `w = 1` the virtual-momentum integral factorizes out and is done
//! first (fast path). For finite orbital widths the virtual momentum is the
//! outer loop and the `k` integral is a principal value per virtual node
//! (general path, meant for small grids).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hopping::{HoppingKind, HoppingMatrix};
use super::potential::{mode_extent, relative_change};
use crate::error::{Error, Result};
use crate::geometry::{Architecture, Scatterer};
use crate::modes::BasisSpec;
use crate::pv::{pv_weights, PvNodes, PvScheme};
use crate::quadrature::RadialRule;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactOptions {
    pub nodes_per_panel: usize,
    pub n_theta: usize,
    pub scheme: PvScheme,
    /// Exclusion half-width in units of `q_max^2` (excluded scheme only).
    pub epsilon_rel: f64,
    /// Use the general path even when every orbital width is zero.
    pub force_general: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            nodes_per_panel: 120,
            n_theta: 64,
            scheme: PvScheme::Subtracted,
            epsilon_rel: 1e-3,
            force_general: false,
        }
    }
}

/// `theta(+D)` and `theta(-D)` summed over scatterers and their gaps, and the
/// combination `theta(+D) + theta(-D)^dagger` that enters the Hamiltonian.
#[derive(Debug, Clone)]
pub struct IncoherentPair {
    pub plus: DMatrix<Complex64>,
    pub minus: DMatrix<Complex64>,
    pub combined: HoppingMatrix,
}

fn orbital(width: f64, k2: f64) -> f64 {
    if width == 0.0 {
        1.0
    } else {
        (-0.5 * k2 * width * width).exp()
    }
}

/// Bessel `J0(x)` from the periodic trapezoid rule on
/// `(1 / 2pi) int_0^{2pi} cos(x sin t) dt`, exact once the node count exceeds `|x|`.
pub fn bessel_j0(x: f64) -> f64 {
    let n = 24 + (1.5 * x.abs()) as usize;
    let h = 2.0 * PI / n as f64;
    (0..n).map(|j| (x * (h * j as f64).sin()).cos()).sum::<f64>() / n as f64
}

/// Angular moments `R_n(k_i) = sum_theta w_theta phi_n(k_i, theta) exp(i k.r)`
/// on a radial rule, for one position `r`.
fn angular_moments(spec: &BasisSpec, rule: &RadialRule, n_theta: usize, r: (f64, f64)) -> Vec<Vec<Complex64>> {
    let dth = 2.0 * PI / n_theta as f64;
    rule.nodes
        .iter()
        .map(|&k| {
            let mut acc = vec![Complex64::new(0.0, 0.0); spec.mode_count()];
            for j in 0..n_theta {
                let th = dth * j as f64;
                let phase = Complex64::from_polar(dth, k * (th.cos() * r.0 + th.sin() * r.1));
                for (a, v) in acc.iter_mut().zip(spec.momentum_values(k, th)) {
                    *a += v * phase;
                }
            }
            acc
        })
        .collect()
}

fn check(spec: &BasisSpec, arch: &Architecture, opts: &ExactOptions) -> Result<()> {
    spec.validate()?;
    arch.validate()?;
    if opts.nodes_per_panel < 2 || opts.n_theta == 0 {
        return Err(Error::domain("quadrature needs at least two radial nodes and one angle"));
    }
    Ok(())
}

fn general_path(arch: &Architecture, opts: &ExactOptions) -> bool {
    opts.force_general || arch.scatterers.iter().any(|s| s.orbital_width > 0.0)
}

/// Incoherent exact hopping for every gap of every scatterer.
pub fn hopping_incoherent_exact(arch: &Architecture, spec: &BasisSpec, opts: &ExactOptions) -> Result<IncoherentPair> {
    check(spec, arch, opts)?;
    let m = spec.mode_count();
    let mut jobs = Vec::new();
    for (alpha, s) in arch.scatterers.iter().enumerate() {
        for d in arch.deltas(alpha) {
            jobs.push((s, d));
        }
    }
    let general = general_path(arch, opts);
    let parts: Vec<(DMatrix<Complex64>, DMatrix<Complex64>)> = jobs
        .par_iter()
        .map(|(s, d)| {
            if general {
                (incoherent_general(spec, s, *d, opts), incoherent_general(spec, s, -*d, opts))
            } else {
                incoherent_fast(spec, s, *d, opts)
            }
        })
        .collect();
    let mut plus = DMatrix::zeros(m, m);
    let mut minus = DMatrix::zeros(m, m);
    for (p, q) in parts {
        plus += p;
        minus += q;
    }
    let g = Complex64::new(arch.g_inc, 0.0);
    plus *= g;
    minus *= g;
    let combined = HoppingMatrix::new(HoppingKind::Incoherent, &plus + minus.adjoint());
    Ok(IncoherentPair { plus, minus, combined })
}

/// Both signs for one scatterer and gap on a shared grid.
fn incoherent_fast(spec: &BasisSpec, s: &Scatterer, delta: f64, opts: &ExactOptions) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let q_max = spec.q_max;
    let big_v = q_max * q_max;
    let ad = delta.abs();
    let ext = mode_extent(spec);
    let outer = RadialRule::graded(q_max, &[ext, ad.sqrt(), (big_v - ad).max(0.0).sqrt()], opts.nodes_per_panel);
    let inner = PvNodes::from_radial(&RadialRule::graded(q_max, &[ext], opts.nodes_per_panel + 1));
    let eps = opts.epsilon_rel * big_v;
    let moments = angular_moments(spec, &outer, opts.n_theta, (s.x, s.y));
    let m = spec.mode_count();
    let ones = vec![1.0; inner.len()];
    // L(k) = PV int d2q' 1 / (q'^2 - k^2 - D) = -pi H[1](k^2 + D)
    let lfun = |sv: f64| -PI * pv_weights(&inner, sv, opts.scheme, eps).apply(&ones, 1.0);
    let mut tilde = vec![Complex64::new(0.0, 0.0); m];
    let mut chi_p = vec![Complex64::new(0.0, 0.0); m];
    let mut chi_m = vec![Complex64::new(0.0, 0.0); m];
    for ((k, w), r) in outer.nodes.iter().zip(&outer.weights).zip(&moments) {
        let kw = k * w;
        let lp = lfun(k * k + ad) * kw;
        let lm = lfun(k * k - ad) * kw;
        for n in 0..m {
            tilde[n] += r[n] * kw;
            chi_p[n] += r[n] * lp;
            chi_m[n] += r[n] * lm;
        }
    }
    let build = |chi: &[Complex64]| DMatrix::from_fn(m, m, |n, j| chi[n].conj() * tilde[j] * 2.0);
    let (p, q) = (build(&chi_p), build(&chi_m));
    if delta >= 0.0 {
        (p, q)
    } else {
        (q, p)
    }
}

/// One signed gap through the virtual-momentum loop. Handles any orbital width.
fn incoherent_general(spec: &BasisSpec, s: &Scatterer, delta: f64, opts: &ExactOptions) -> DMatrix<Complex64> {
    let q_max = spec.q_max;
    let big_v = q_max * q_max;
    let ad = delta.abs();
    let ext = mode_extent(spec);
    let m = spec.mode_count();
    let eps = opts.epsilon_rel * big_v;
    let sigma = s.orbital_width;
    let dth = 2.0 * PI / opts.n_theta as f64;
    // virtual momentum q'
    let vrule = RadialRule::graded(q_max, &[ext, ad.sqrt(), (big_v - ad).max(0.0).sqrt()], opts.nodes_per_panel);
    // integration momentum k (PV) and outgoing s share one polar grid
    let krule = RadialRule::graded(q_max, &[ext], opts.nodes_per_panel + 1);
    let knodes = PvNodes::from_radial(&krule);
    let kgrid = polar_values(spec, &krule, opts.n_theta, (s.x, s.y));

    let per_q: Vec<DMatrix<Complex64>> = vrule
        .nodes
        .par_iter()
        .zip(&vrule.weights)
        .map(|(&qp, &wq)| {
            let mut out = DMatrix::zeros(m, m);
            for jt in 0..opts.n_theta {
                let tq = dth * jt as f64;
                let qv = (qp * tq.cos(), qp * tq.sin());
                // b_m = int d2s phi_m(s) exp(i s.r) w(s - q')
                // a-side radial integrand g_n(k) = int dtheta conj(phi_n) exp(-i k.r) w(k - q')
                let mut b = vec![Complex64::new(0.0, 0.0); m];
                let mut g: Vec<Vec<Complex64>> = Vec::with_capacity(krule.len());
                for (i, (&k, &wk)) in krule.nodes.iter().zip(&krule.weights).enumerate() {
                    let mut gi = vec![Complex64::new(0.0, 0.0); m];
                    for (jk, pv) in kgrid[i].iter().enumerate() {
                        let th = dth * jk as f64;
                        let dx = k * th.cos() - qv.0;
                        let dy = k * th.sin() - qv.1;
                        let w = orbital(sigma, dx * dx + dy * dy) * dth;
                        for n in 0..m {
                            b[n] += pv[n] * (w * k * wk);
                            gi[n] += pv[n].conj() * w;
                        }
                    }
                    g.push(gi);
                }
                // A_n = int k dk g_n(k) / (q'^2 - D - k^2) = H[g](q'^2 - D) / 2
                let sv = qp * qp - delta;
                let pw = pv_weights(&knodes, sv, opts.scheme, eps);
                let mut a = vec![Complex64::new(0.0, 0.0); m];
                for (c, gi) in pw.node.iter().zip(&g) {
                    for n in 0..m {
                        a[n] += gi[n] * *c;
                    }
                }
                if pw.anchor_coeff != 0.0 {
                    let ga = radial_g(spec, pw.anchor.sqrt(), opts.n_theta, (s.x, s.y), sigma, qv);
                    for n in 0..m {
                        a[n] += ga[n] * pw.anchor_coeff;
                    }
                }
                let wt = wq * qp * dth;
                for n in 0..m {
                    let an = a[n] * (0.5 * wt * 2.0);
                    for j in 0..m {
                        out[(n, j)] += an * b[j];
                    }
                }
            }
            out
        })
        .collect();
    per_q.into_iter().fold(DMatrix::zeros(m, m), |acc, x| acc + x)
}

/// `phi_n(k, theta) exp(i k.r)` on a polar grid, indexed `[radial][angle][mode]`.
fn polar_values(spec: &BasisSpec, rule: &RadialRule, n_theta: usize, r: (f64, f64)) -> Vec<Vec<Vec<Complex64>>> {
    let dth = 2.0 * PI / n_theta as f64;
    rule.nodes
        .par_iter()
        .map(|&k| {
            (0..n_theta)
                .map(|j| {
                    let th = dth * j as f64;
                    let ph = Complex64::from_polar(1.0, k * (th.cos() * r.0 + th.sin() * r.1));
                    spec.momentum_values(k, th).into_iter().map(|v| v * ph).collect()
                })
                .collect()
        })
        .collect()
}

fn radial_g(spec: &BasisSpec, k: f64, n_theta: usize, r: (f64, f64), sigma: f64, qv: (f64, f64)) -> Vec<Complex64> {
    let dth = 2.0 * PI / n_theta as f64;
    let mut g = vec![Complex64::new(0.0, 0.0); spec.mode_count()];
    for j in 0..n_theta {
        let th = dth * j as f64;
        let ph = Complex64::from_polar(1.0, -k * (th.cos() * r.0 + th.sin() * r.1));
        let dx = k * th.cos() - qv.0;
        let dy = k * th.sin() - qv.1;
        let w = orbital(sigma, dx * dx + dy * dy) * dth;
        for (gi, v) in g.iter_mut().zip(spec.momentum_values(k, th)) {
            *gi += v.conj() * ph * w;
        }
    }
    g
}

/// Coherent exact hopping over ordered scatterer pairs.
pub fn hopping_coherent_exact(arch: &Architecture, spec: &BasisSpec, opts: &ExactOptions) -> Result<HoppingMatrix> {
    check(spec, arch, opts)?;
    let m = spec.mode_count();
    let n = arch.len();
    let general = general_path(arch, opts);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).filter(move |b| *b != a).map(move |b| (a, b))).collect();
    let out = if general {
        let parts: Vec<DMatrix<Complex64>> = pairs
            .par_iter()
            .map(|&(a, b)| coherent_general(spec, &arch.scatterers[a], &arch.scatterers[b], opts))
            .collect();
        parts.into_iter().fold(DMatrix::zeros(m, m), |acc, x| acc + x)
    } else {
        coherent_fast(spec, arch, &pairs, opts)
    };
    Ok(HoppingMatrix::new(HoppingKind::Coherent, out * Complex64::new(arch.g_coh, 0.0)))
}

fn coherent_fast(spec: &BasisSpec, arch: &Architecture, pairs: &[(usize, usize)], opts: &ExactOptions) -> DMatrix<Complex64> {
    let q_max = spec.q_max;
    let big_v = q_max * q_max;
    let ext = mode_extent(spec);
    let m = spec.mode_count();
    let eps = opts.epsilon_rel * big_v;
    let outer = RadialRule::graded(q_max, &[ext], opts.nodes_per_panel);
    let inner = PvNodes::from_radial(&RadialRule::graded(q_max, &[ext], opts.nodes_per_panel + 1));
    let moments: Vec<Vec<Vec<Complex64>>> = arch
        .scatterers
        .par_iter()
        .map(|s| angular_moments(spec, &outer, opts.n_theta, (s.x, s.y)))
        .collect();
    let kw: Vec<f64> = outer.nodes.iter().zip(&outer.weights).map(|(k, w)| k * w).collect();
    let tilde: Vec<Vec<Complex64>> = moments
        .iter()
        .map(|mom| {
            let mut t = vec![Complex64::new(0.0, 0.0); m];
            for (r, w) in mom.iter().zip(&kw) {
                for n in 0..m {
                    t[n] += r[n] * *w;
                }
            }
            t
        })
        .collect();
    let weights: Vec<_> = outer
        .nodes
        .iter()
        .map(|k| pv_weights(&inner, k * k, opts.scheme, eps))
        .collect();
    let parts: Vec<DMatrix<Complex64>> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let sa = &arch.scatterers[a];
            let sb = &arch.scatterers[b];
            let d = (sa.x - sb.x).hypot(sa.y - sb.y);
            let g_nodes: Vec<f64> = inner.v.iter().map(|v| bessel_j0(v.sqrt() * d)).collect();
            let mut chi = vec![Complex64::new(0.0, 0.0); m];
            for ((r, w), pw) in moments[a].iter().zip(&kw).zip(&weights) {
                // G(k; d) = PV int d2q exp(i q.d) / (q^2 - k^2) = -pi H[J0(|q| d)](k^2)
                let g = -PI * pw.apply(&g_nodes, bessel_j0(pw.anchor.sqrt() * d));
                for n in 0..m {
                    chi[n] += r[n] * (g * w);
                }
            }
            DMatrix::from_fn(m, m, |n, j| chi[n].conj() * tilde[b][j] * 2.0)
        })
        .collect();
    parts.into_iter().fold(DMatrix::zeros(m, m), |acc, x| acc + x)
}

fn coherent_general(spec: &BasisSpec, sa: &Scatterer, sb: &Scatterer, opts: &ExactOptions) -> DMatrix<Complex64> {
    let q_max = spec.q_max;
    let big_v = q_max * q_max;
    let ext = mode_extent(spec);
    let m = spec.mode_count();
    let eps = opts.epsilon_rel * big_v;
    let dth = 2.0 * PI / opts.n_theta as f64;
    let qrule = RadialRule::graded(q_max, &[ext], opts.nodes_per_panel);
    let krule = RadialRule::graded(q_max, &[ext], opts.nodes_per_panel + 1);
    let knodes = PvNodes::from_radial(&krule);
    let ga = polar_values(spec, &krule, opts.n_theta, (sa.x, sa.y));
    let gb = polar_values(spec, &krule, opts.n_theta, (sb.x, sb.y));
    let (d0, d1) = (sa.x - sb.x, sa.y - sb.y);
    let per_q: Vec<DMatrix<Complex64>> = qrule
        .nodes
        .par_iter()
        .zip(&qrule.weights)
        .map(|(&q, &wq)| {
            let mut out = DMatrix::zeros(m, m);
            for jt in 0..opts.n_theta {
                let tq = dth * jt as f64;
                let qv = (q * tq.cos(), q * tq.sin());
                let mut bvec = vec![Complex64::new(0.0, 0.0); m];
                let mut g: Vec<Vec<Complex64>> = Vec::with_capacity(krule.len());
                for (i, (&k, &wk)) in krule.nodes.iter().zip(&krule.weights).enumerate() {
                    let mut gi = vec![Complex64::new(0.0, 0.0); m];
                    for jk in 0..opts.n_theta {
                        let th = dth * jk as f64;
                        let dx = k * th.cos() - qv.0;
                        let dy = k * th.sin() - qv.1;
                        let w = orbital(sa.orbital_width, dx * dx + dy * dy) * dth;
                        let wb = orbital(sb.orbital_width, dx * dx + dy * dy) * dth;
                        for n in 0..m {
                            gi[n] += ga[i][jk][n].conj() * w;
                            bvec[n] += gb[i][jk][n] * (wb * k * wk);
                        }
                    }
                    g.push(gi);
                }
                // A_n = int k dk g_n(k) / (q^2 - k^2) = H[g](q^2) / 2
                let pw = pv_weights(&knodes, q * q, opts.scheme, eps);
                let mut a = vec![Complex64::new(0.0, 0.0); m];
                for (c, gi) in pw.node.iter().zip(&g) {
                    for n in 0..m {
                        a[n] += gi[n] * *c;
                    }
                }
                if pw.anchor_coeff != 0.0 {
                    let gext = radial_g(spec, pw.anchor.sqrt(), opts.n_theta, (sa.x, sa.y), sa.orbital_width, qv);
                    for n in 0..m {
                        a[n] += gext[n] * pw.anchor_coeff;
                    }
                }
                let phase = Complex64::from_polar(wq * q * dth, qv.0 * d0 + qv.1 * d1);
                for n in 0..m {
                    // factor 2 of the hopping times 1/2 of the radial PV
                    let an = a[n] * phase;
                    for j in 0..m {
                        out[(n, j)] += an * bvec[j];
                    }
                }
            }
            out
        })
        .collect();
    per_q.into_iter().fold(DMatrix::zeros(m, m), |acc, x| acc + x)
}

/// Largest entry change, relative to the largest entry, when the exclusion
/// width is halved. Returns `(coherent, incoherent combined)`.
pub fn epsilon_halving_change(arch: &Architecture, spec: &BasisSpec, opts: &ExactOptions) -> Result<(f64, f64)> {
    let mut half = opts.clone();
    half.epsilon_rel *= 0.5;
    compare(arch, spec, opts, &half)
}

/// Same as [`epsilon_halving_change`] for doubling the radial node count.
pub fn refinement_change(arch: &Architecture, spec: &BasisSpec, opts: &ExactOptions) -> Result<(f64, f64)> {
    let mut fine = opts.clone();
    fine.nodes_per_panel *= 2;
    compare(arch, spec, opts, &fine)
}

fn compare(arch: &Architecture, spec: &BasisSpec, a: &ExactOptions, b: &ExactOptions) -> Result<(f64, f64)> {
    let flat = |x: &DMatrix<Complex64>| x.iter().flat_map(|c| [c.re, c.im]).collect::<Vec<_>>();
    let coh = if arch.len() > 1 {
        let ca = hopping_coherent_exact(arch, spec, a)?;
        let cb = hopping_coherent_exact(arch, spec, b)?;
        relative_change(&flat(&ca.entries), &flat(&cb.entries))
    } else {
        0.0
    };
    let ia = hopping_incoherent_exact(arch, spec, a)?;
    let ib = hopping_incoherent_exact(arch, spec, b)?;
    Ok((coh, relative_change(&flat(&ia.combined.entries), &flat(&ib.combined.entries))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::analysis::max_norm;
    use crate::coupling::analysis::scale_free_correlation;
    use crate::coupling::hopping::{hopping_coherent_pp, hopping_incoherent_pp};

    #[test]
    fn bessel_values() {
        // reference values of J0
        for (x, j) in [(0.0, 1.0), (1.0, 0.7651976865579666), (2.404825557695773, 0.0), (10.0, -0.2459357644513483), (50.0, 0.05581232766925182)] {
            assert!((bessel_j0(x) - j).abs() < 1e-13, "{x}");
        }
    }

    fn small() -> ExactOptions {
        ExactOptions {
            nodes_per_panel: 24,
            n_theta: 24,
            ..Default::default()
        }
    }

    fn cluster() -> Architecture {
        Architecture::new(
            "cluster",
            vec![Scatterer::point(0.5, 0.01), Scatterer::point(0.52, -0.02), Scatterer::point(0.47, 0.015)],
        )
        .with_gaps(&[1e-6])
    }

    #[test]
    fn single_scatterer_coherent_is_zero() {
        let arch = Architecture::new("one", vec![Scatterer::point(0.2, 0.1)]);
        let spec = BasisSpec::full(1, 1);
        let c = hopping_coherent_exact(&arch, &spec, &small()).unwrap();
        assert_eq!(max_norm(&c.entries), 0.0);
    }

    #[test]
    fn fast_and_general_paths_agree_for_point_particles() {
        let spec = BasisSpec::full(1, 1);
        let arch = Architecture::new("pair", vec![Scatterer::point(0.3, 0.1), Scatterer::point(-0.2, 0.25)])
            .with_gaps(&[2e-3]);
        let fast = hopping_incoherent_exact(&arch, &spec, &small()).unwrap();
        let gen = hopping_incoherent_exact(&arch, &spec, &ExactOptions { force_general: true, ..small() }).unwrap();
        let diff = max_norm(&(&fast.plus - &gen.plus)) / max_norm(&fast.plus);
        assert!(diff < 2e-3, "incoherent {diff}");
        let fast = hopping_coherent_exact(&arch, &spec, &small()).unwrap();
        let gen = hopping_coherent_exact(&arch, &spec, &ExactOptions { force_general: true, ..small() }).unwrap();
        let diff = max_norm(&(&fast.entries - &gen.entries)) / max_norm(&fast.entries);
        assert!(diff < 2e-3, "coherent {diff}");
    }

    #[test]
    fn combined_incoherent_is_hermitian_at_zero_gap() {
        let spec = BasisSpec::full(1, 1);
        let arch = Architecture::new("pair", vec![Scatterer::point(0.3, 0.1), Scatterer::point(-0.2, 0.25)])
            .with_gaps(&[0.0]);
        let pair = hopping_incoherent_exact(&arch, &spec, &small()).unwrap();
        assert!(pair.combined.hermiticity_defect() < 1e-12 * max_norm(&pair.combined.entries));
    }

    #[test]
    fn point_particle_limit_of_clustered_scatterers() {
        let spec = BasisSpec::full(1, 1).with_q_max(30.0);
        let arch = cluster();
        let opts = ExactOptions { nodes_per_panel: 60, n_theta: 32, ..Default::default() };
        let coh = hopping_coherent_exact(&arch, &spec, &opts).unwrap();
        let pp = hopping_coherent_pp(&arch, &spec);
        assert!(scale_free_correlation(&coh.entries, &pp.entries) > 0.9);
        let inc = hopping_incoherent_exact(&arch, &spec, &opts).unwrap();
        let pp = hopping_incoherent_pp(&arch, &spec);
        assert!(scale_free_correlation(&inc.combined.entries, &pp.entries) > 0.9);
    }

    #[test]
    fn orbital_width_damps_hopping() {
        let spec = BasisSpec::full(0, 1);
        let mut arch = Architecture::new("one", vec![Scatterer::point(0.2, 0.0)]).with_gaps(&[1e-3]);
        let point = hopping_incoherent_exact(&arch, &spec, &ExactOptions { force_general: true, ..small() }).unwrap();
        arch.scatterers[0].orbital_width = 0.5;
        let wide = hopping_incoherent_exact(&arch, &spec, &small()).unwrap();
        assert!(max_norm(&wide.plus) < max_norm(&point.plus));
        assert!(max_norm(&wide.plus) > 0.0);
    }
}
