//! Four-mode scattering potential
//!
//! ```text
//! V(a,b,c,d) = int d2k conj(phi_a(k)) phi_c(k) int d2q phi_b(q) conj(phi_d(q))
//!              * [1/(k^2 - q^2 - D) - 1/(k^2 - q^2 + D)]
//! ```
//!
//! Slots `a, c` live at the outer momentum `k`, slots `b, d` at the inner `q`.
//! The angular integrals reduce each side to pair densities
//! `D_xy(k) = int dtheta conj(phi_x) phi_y`, and with `u = q^2` the inner
//! integral becomes `(H[D](k^2 - D) - H[D](k^2 + D)) / 2` where
//! `H[g](s) = PV int_0^{q_max^2} g(u) / (s - u) du`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{auto_q_max, BasisSpec};
use crate::pv::{pv_weights, PvNodes, PvScheme};
use crate::quadrature::RadialRule;
use crate::tensor::Tensor4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialOptions {
    /// Gauss-Legendre nodes per radial panel.
    pub nodes_per_panel: usize,
    pub n_theta: usize,
    pub scheme: PvScheme,
    /// Exclusion half-width in units of `q_max^2`; only the excluded scheme uses it.
    pub epsilon_rel: f64,
}

impl Default for PotentialOptions {
    fn default() -> Self {
        PotentialOptions {
            nodes_per_panel: 160,
            n_theta: 128,
            scheme: PvScheme::Subtracted,
            epsilon_rel: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringPotential {
    pub entries: Tensor4<f64>,
    pub delta: f64,
    pub q_max: f64,
    pub options: PotentialOptions,
    /// Largest imaginary part dropped when storing the real tensor.
    pub max_imag: f64,
    pub n_outer: usize,
    pub n_inner: usize,
}

impl ScatteringPotential {
    pub fn delta_over_qmax2(&self) -> f64 {
        self.delta / (self.q_max * self.q_max)
    }

    pub fn side(&self) -> usize {
        self.entries.side()
    }
}

/// Radius beyond which every basis mode is negligible in momentum space.
pub fn mode_extent(spec: &BasisSpec) -> f64 {
    auto_q_max(spec.w0, spec.l_max, spec.p_max, spec.sector).min(spec.q_max)
}

/// Pair densities `D_xy(q)` at one radius, flattened as `x * M + y`.
fn pair_densities(spec: &BasisSpec, q: f64, n_theta: usize) -> Vec<Complex64> {
    let m = spec.mode_count();
    let mut out = vec![Complex64::new(0.0, 0.0); m * m];
    let dth = 2.0 * std::f64::consts::PI / n_theta as f64;
    for j in 0..n_theta {
        let v = spec.momentum_values(q, dth * j as f64);
        for x in 0..m {
            let cx = v[x].conj() * dth;
            for y in 0..m {
                out[x * m + y] += cx * v[y];
            }
        }
    }
    out
}

/// Builds the tensor for gap `delta` (any sign). `delta = 0` gives zeros.
pub fn scattering_potential(spec: &BasisSpec, delta: f64, opts: &PotentialOptions) -> Result<ScatteringPotential> {
    spec.validate()?;
    if !delta.is_finite() {
        return Err(Error::domain("delta must be finite"));
    }
    if opts.nodes_per_panel < 2 || opts.n_theta == 0 {
        return Err(Error::domain("quadrature needs at least two radial nodes and one angle"));
    }
    let m = spec.mode_count();
    let q_max = spec.q_max;
    let big_v = q_max * q_max;
    let ext = mode_extent(spec);
    let inner_rule = RadialRule::graded(q_max, &[ext], opts.nodes_per_panel + 1);
    let abs_d = delta.abs();
    let outer_rule = RadialRule::graded(
        q_max,
        &[ext, abs_d.sqrt(), (big_v - abs_d).max(0.0).sqrt()],
        opts.nodes_per_panel,
    );
    let mut result = ScatteringPotential {
        entries: Tensor4::zeros(m),
        delta,
        q_max,
        options: opts.clone(),
        max_imag: 0.0,
        n_outer: outer_rule.len(),
        n_inner: inner_rule.len(),
    };
    if delta == 0.0 {
        return Ok(result);
    }

    let inner = PvNodes::from_radial(&inner_rule);
    let eps = opts.epsilon_rel * big_v;
    let d_inner: Vec<Vec<Complex64>> = inner_rule
        .nodes
        .par_iter()
        .map(|&q| pair_densities(spec, q, opts.n_theta))
        .collect();
    let sign = delta.signum();

    // F(k) = sign * (H(k^2 - |D|) - H(k^2 + |D|)) for every pair, per outer node.
    let per_node: Vec<(Vec<Complex64>, Vec<Complex64>)> = outer_rule
        .nodes
        .par_iter()
        .map(|&k| {
            let mut f = vec![Complex64::new(0.0, 0.0); m * m];
            for (s, sgn) in [(k * k - abs_d, sign), (k * k + abs_d, -sign)] {
                let w = pv_weights(&inner, s, opts.scheme, eps);
                for (c, d) in w.node.iter().zip(&d_inner) {
                    if *c != 0.0 {
                        for (fi, di) in f.iter_mut().zip(d) {
                            *fi += di * (c * sgn);
                        }
                    }
                }
                if w.anchor_coeff != 0.0 {
                    let da = pair_densities(spec, w.anchor.sqrt(), opts.n_theta);
                    for (fi, di) in f.iter_mut().zip(&da) {
                        *fi += di * (w.anchor_coeff * sgn);
                    }
                }
            }
            (pair_densities(spec, k, opts.n_theta), f)
        })
        .collect();

    let weights: Vec<f64> = outer_rule
        .nodes
        .iter()
        .zip(&outer_rule.weights)
        .map(|(k, w)| 0.5 * k * w)
        .collect();

    // V(a,b,c,d) = sum_i w_i D_ac(k_i) F_db(k_i), one row `a` per task.
    let rows: Vec<(Vec<f64>, f64)> = (0..m)
        .into_par_iter()
        .map(|a| {
            let mut acc = vec![Complex64::new(0.0, 0.0); m * m * m];
            for ((dk, f), w) in per_node.iter().zip(&weights) {
                for c in 0..m {
                    let dac = dk[a * m + c] * *w;
                    if dac == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for b in 0..m {
                        for d in 0..m {
                            acc[(b * m + c) * m + d] += dac * f[d * m + b];
                        }
                    }
                }
            }
            let imag = acc.iter().fold(0.0f64, |x, v| x.max(v.im.abs()));
            (acc.into_iter().map(|v| v.re).collect(), imag)
        })
        .collect();

    let mut data = Vec::with_capacity(m.pow(4));
    for (row, imag) in rows {
        data.extend(row);
        result.max_imag = result.max_imag.max(imag);
    }
    result.entries = Tensor4::from_vec(m, data);
    Ok(result)
}

/// Largest entry change relative to the largest entry when the radial node
/// count doubles.
pub fn potential_refinement_change(spec: &BasisSpec, delta: f64, opts: &PotentialOptions) -> Result<f64> {
    let coarse = scattering_potential(spec, delta, opts)?;
    let mut fine_opts = opts.clone();
    fine_opts.nodes_per_panel *= 2;
    let fine = scattering_potential(spec, delta, &fine_opts)?;
    Ok(relative_change(coarse.entries.as_slice(), fine.entries.as_slice()))
}

pub(crate) fn relative_change(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

/// Which pair of slots a partial trace sums over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TracePair {
    /// `V_nm = sum_j V(n, m, j, j)`.
    Last,
    /// `V_kl = sum_j V(j, j, k, l)`.
    First,
    /// `V_mk = sum_j V(j, m, k, j)`.
    Outer,
}

impl TracePair {
    pub fn label(&self) -> &'static str {
        match self {
            TracePair::Last => "V_nm",
            TracePair::First => "V_kl",
            TracePair::Outer => "V_mk",
        }
    }
}

pub fn partial_trace(v: &Tensor4<f64>, pair: TracePair) -> DMatrix<f64> {
    let m = v.side();
    DMatrix::from_fn(m, m, |x, y| {
        (0..m)
            .map(|j| match pair {
                TracePair::Last => *v.get(x, y, j, j),
                TracePair::First => *v.get(j, j, x, y),
                TracePair::Outer => *v.get(j, x, y, j),
            })
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_opts() -> PotentialOptions {
        PotentialOptions {
            nodes_per_panel: 60,
            n_theta: 16,
            ..Default::default()
        }
    }

    #[test]
    fn zero_gap_is_exactly_zero() {
        let spec = BasisSpec::radial(3);
        let v = scattering_potential(&spec, 0.0, &small_opts()).unwrap();
        assert!(v.entries.as_slice().iter().all(|x| *x == 0.0));
    }

    #[test]
    fn odd_in_the_gap() {
        let spec = BasisSpec::full(1, 1);
        let d = 0.01 * spec.q_max * spec.q_max;
        let plus = scattering_potential(&spec, d, &small_opts()).unwrap();
        let minus = scattering_potential(&spec, -d, &small_opts()).unwrap();
        for (p, q) in plus.entries.as_slice().iter().zip(minus.entries.as_slice()) {
            assert_eq!(*p, -*q);
        }
        assert!(plus.entries.max_abs() > 0.0);
        assert!(plus.max_imag < 1e-12 * plus.entries.max_abs());
    }

    #[test]
    fn angular_selection_rule() {
        // Pair densities vanish unless the two l values agree.
        let spec = BasisSpec::full(1, 1);
        let d = 0.02 * spec.q_max * spec.q_max;
        let v = scattering_potential(&spec, d, &small_opts()).unwrap();
        let modes = spec.modes();
        let scale = v.entries.max_abs();
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    for e in 0..6 {
                        if modes[a].l != modes[c].l || modes[b].l != modes[e].l {
                            assert!(v.entries.get(a, b, c, e).abs() < 1e-13 * scale);
                        }
                    }
                }
            }
        }
    }

    /// Independent oracle: the same double integral done as a 2-D product
    /// rule in (k, u) where the kernel is smooth because the gap is large
    /// compared with the whole band (|k^2 - u| <= q_max^2 < D).
    #[test]
    fn matches_direct_quadrature_when_kernel_is_regular() {
        use crate::modes::{eval_lg_momentum, ModeIndex};
        use crate::quadrature::gauss_legendre;
        let spec = BasisSpec::radial(2);
        let big_v = spec.q_max * spec.q_max;
        let d = 1.5 * big_v;
        let v = scattering_potential(&spec, d, &small_opts()).unwrap();
        let (x, w) = gauss_legendre(200);
        let nodes: Vec<(f64, f64)> = x
            .iter()
            .zip(&w)
            .map(|(t, w)| (0.5 * spec.q_max * (t + 1.0), 0.5 * spec.q_max * w))
            .collect();
        let phi = |p: u32, q: f64| eval_lg_momentum(ModeIndex::new(0, p), q, 0.0, &spec).re;
        for (a, b, c, e) in [(0, 0, 0, 0), (0, 1, 2, 1), (2, 2, 1, 0)] {
            let mut total = 0.0;
            for &(k, wk) in &nodes {
                for &(q, wq) in &nodes {
                    let kern = 1.0 / (k * k - q * q - d) - 1.0 / (k * k - q * q + d);
                    total += wk * wq * k * q * phi(a, k) * phi(c, k) * phi(b, q) * phi(e, q) * kern;
                }
            }
            total *= 4.0 * std::f64::consts::PI * std::f64::consts::PI;
            let got = *v.entries.get(a as usize, b as usize, c as usize, e as usize);
            assert!((got - total).abs() < 1e-9 * total.abs().max(1e-3), "{got} vs {total}");
        }
    }

    #[test]
    fn partial_traces_pick_the_right_slots() {
        let t = Tensor4::from_fn(3, |a, b, c, d| (a * 1000 + b * 100 + c * 10 + d) as f64);
        let nm = partial_trace(&t, TracePair::Last);
        assert_eq!(nm[(1, 2)], (0..3).map(|j| (1200 + j * 11) as f64).sum::<f64>());
        let kl = partial_trace(&t, TracePair::First);
        assert_eq!(kl[(1, 2)], (0..3).map(|j| (j * 1100 + 12) as f64).sum::<f64>());
        let mk = partial_trace(&t, TracePair::Outer);
        assert_eq!(mk[(1, 2)], (0..3).map(|j| (j * 1001 + 120) as f64).sum::<f64>());
    }
}
