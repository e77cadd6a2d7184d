//! Laguerre-Gauss modes at the waist plane, in position and transverse
//! momentum, plus the basis diagnostics built on them.
//!
//! Position modes are the usual normalized LG profiles
//!
//! ```text
//! psi_lp(r, phi) = sqrt(2 p! / (pi (p+|l|)!)) / w0 * (sqrt2 r / w0)^|l|
//!                  * L_p^|l|(2 r^2 / w0^2) * exp(-r^2 / w0^2) * exp(i l phi)
//! ```
//!
//! Momentum modes are their unitary Fourier transforms with kernel
//! `exp(-i q.r) / 2pi`. That transform maps an LG mode onto the same profile
//! with waist `2 / w0` times the phase `(-i)^(2p+|l|)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{QuadratureGrid, RadialRule};

/// LG quantum numbers: signed azimuthal `l` and radial `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    pub l: i32,
    pub p: u32,
}

impl ModeIndex {
    pub const fn new(l: i32, p: u32) -> Self {
        ModeIndex { l, p }
    }

    /// Compact label used in CSV headers, e.g. `l-1p3`.
    pub fn label(&self) -> String {
        format!("l{}p{}", self.l, self.p)
    }

    pub fn abs_l(&self) -> u32 {
        self.l.unsigned_abs()
    }
}

impl std::fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.l, self.p)
    }
}

/// Which `(l, p)` pairs a basis keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    /// `-l_max..=l_max` times `0..=p_max`.
    #[default]
    Full,
    /// `l = 0` only.
    Radial,
}

/// Truncated LG basis together with its length and momentum scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub w0: f64,
    pub k0: f64,
    pub q_max: f64,
    pub l_max: u32,
    pub p_max: u32,
    pub sector: Sector,
}

/// Default longitudinal wavevector in units of `1 / w0`; keeps `q_max / k0` small.
pub const DEFAULT_K0: f64 = 1.0e4;

/// Distance, in units of the momentum-space waist, added beyond the
/// outermost radial node when choosing `q_max` automatically.
pub const Q_MAX_MARGIN: f64 = 3.5;

impl BasisSpec {
    pub fn full(l_max: u32, p_max: u32) -> Self {
        Self::with_sector(l_max, p_max, Sector::Full)
    }

    /// `l = 0` basis with radial indices `0..=p_max`.
    pub fn radial(p_max: u32) -> Self {
        Self::with_sector(0, p_max, Sector::Radial)
    }

    fn with_sector(l_max: u32, p_max: u32, sector: Sector) -> Self {
        let w0 = 1.0;
        BasisSpec {
            w0,
            k0: DEFAULT_K0,
            q_max: auto_q_max(w0, l_max, p_max, sector),
            l_max,
            p_max,
            sector,
        }
    }

    pub fn with_q_max(mut self, q_max: f64) -> Self {
        self.q_max = q_max;
        self
    }

    pub fn with_k0(mut self, k0: f64) -> Self {
        self.k0 = k0;
        self
    }

    /// Changes the waist and rescales an automatically chosen `q_max` with it.
    pub fn with_w0(mut self, w0: f64) -> Self {
        self.q_max *= self.w0 / w0;
        self.w0 = w0;
        self
    }

    /// Degree of paraxiality `q_max / (sqrt2 k0)`.
    pub fn paraxiality(&self) -> f64 {
        self.q_max / (std::f64::consts::SQRT_2 * self.k0)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("w0", self.w0)?;
        positive("k0", self.k0)?;
        positive("q_max", self.q_max)?;
        if self.sector == Sector::Radial && self.l_max != 0 {
            return Err(Error::domain("radial sector requires l_max = 0"));
        }
        let t = self.paraxiality();
        if t >= 1.0 {
            return Err(Error::domain(format!(
                "paraxiality q_max/(sqrt2 k0) = {t} is not below 1"
            )));
        }
        Ok(())
    }

    pub fn mode_count(&self) -> usize {
        match self.sector {
            Sector::Full => (2 * self.l_max as usize + 1) * (self.p_max as usize + 1),
            Sector::Radial => self.p_max as usize + 1,
        }
    }

    pub fn modes(&self) -> Vec<ModeIndex> {
        enumerate_modes(self)
    }

    /// Flat index of `mode`, if the basis contains it.
    pub fn index_of(&self, mode: ModeIndex) -> Option<usize> {
        if mode.p > self.p_max || mode.abs_l() > self.l_max {
            return None;
        }
        let np = self.p_max as usize + 1;
        match self.sector {
            Sector::Radial => (mode.l == 0).then_some(mode.p as usize),
            Sector::Full => Some((mode.l + self.l_max as i32) as usize * np + mode.p as usize),
        }
    }

    /// All position-space modes at `(rho, phi)`, in flat order.
    pub fn position_values(&self, rho: f64, phi: f64) -> Vec<Complex64> {
        self.values(rho, phi, self.w0, |_| Complex64::new(1.0, 0.0))
    }

    /// All momentum-space modes at `(q, theta)`, in flat order.
    pub fn momentum_values(&self, q: f64, theta: f64) -> Vec<Complex64> {
        self.values(q, theta, 2.0 / self.w0, momentum_phase)
    }

    /// Position-space modes at Cartesian `(x, y)`.
    pub fn position_values_xy(&self, x: f64, y: f64) -> Vec<Complex64> {
        self.position_values(x.hypot(y), y.atan2(x))
    }

    fn values(
        &self,
        r: f64,
        angle: f64,
        waist: f64,
        phase: impl Fn(ModeIndex) -> Complex64,
    ) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.mode_count());
        let ls: Vec<i32> = match self.sector {
            Sector::Full => (-(self.l_max as i32)..=self.l_max as i32).collect(),
            Sector::Radial => vec![0],
        };
        for l in ls {
            let radial = radial_profiles(l.unsigned_abs(), self.p_max, r, waist);
            let azimuth = Complex64::from_polar(1.0, l as f64 * angle);
            for (p, v) in radial.into_iter().enumerate() {
                out.push(phase(ModeIndex::new(l, p as u32)) * azimuth * v);
            }
        }
        out
    }
}

/// Automatic momentum cutoff: the outer radial scale of the widest mode in
/// momentum space plus [`Q_MAX_MARGIN`] momentum waists.
pub fn auto_q_max(w0: f64, l_max: u32, p_max: u32, sector: Sector) -> f64 {
    let l = match sector {
        Sector::Full => l_max,
        Sector::Radial => 0,
    };
    (2.0 / w0) * ((2.0 * p_max as f64 + l as f64 + 1.0).sqrt() + Q_MAX_MARGIN)
}

/// Deterministic flat ordering: `l` ascending from `-l_max`, then `p` ascending.
pub fn enumerate_modes(spec: &BasisSpec) -> Vec<ModeIndex> {
    let ls: Vec<i32> = match spec.sector {
        Sector::Full => (-(spec.l_max as i32)..=spec.l_max as i32).collect(),
        Sector::Radial => vec![0],
    };
    ls.into_iter()
        .flat_map(|l| (0..=spec.p_max).map(move |p| ModeIndex::new(l, p)))
        .collect()
}

/// Generalized Laguerre polynomial `L_p^alpha(x)` by three-term recurrence.
pub fn laguerre(p: u32, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if p == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..p {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Normalized radial LG profiles for `p = 0..=p_max` at fixed `|l|`, without
/// the azimuthal phase. Each profile has unit norm over the plane once the
/// phase is attached.
pub fn radial_profiles(abs_l: u32, p_max: u32, r: f64, waist: f64) -> Vec<f64> {
    let alpha = abs_l as f64;
    let x = 2.0 * r * r / (waist * waist);
    // p = 0 constant sqrt(2 / (pi |l|!)) / w
    let mut log_fact = 0.0;
    for k in 2..=abs_l {
        log_fact += (k as f64).ln();
    }
    let mut norm = (2.0 / PI).sqrt() * (-0.5 * log_fact).exp() / waist;
    let envelope = if abs_l == 0 {
        (-0.5 * x).exp()
    } else {
        // (sqrt x)^|l| e^{-x/2}, done in logs to avoid overflow at large x
        if x == 0.0 {
            0.0
        } else {
            (0.5 * alpha * x.ln() - 0.5 * x).exp()
        }
    };
    let mut out = Vec::with_capacity(p_max as usize + 1);
    let mut prev = 0.0;
    let mut cur = 1.0;
    for p in 0..=p_max {
        if p > 0 {
            let k = (p - 1) as f64;
            let next = if p == 1 {
                1.0 + alpha - x
            } else {
                ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0)
            };
            prev = cur;
            cur = next;
            norm *= (p as f64 / (p as f64 + alpha)).sqrt();
        }
        out.push(norm * envelope * cur);
    }
    out
}

/// Real radial profile of a single mode with waist `waist`.
pub fn lg_radial(mode: ModeIndex, r: f64, waist: f64) -> f64 {
    radial_profiles(mode.abs_l(), mode.p, r, waist)[mode.p as usize]
}

/// `(-i)^(2p+|l|)`.
pub fn momentum_phase(mode: ModeIndex) -> Complex64 {
    let n = (2 * mode.p + mode.abs_l()) % 4;
    match n {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

pub fn eval_lg_position(mode: ModeIndex, rho: f64, phi: f64, spec: &BasisSpec) -> Complex64 {
    Complex64::from_polar(lg_radial(mode, rho, spec.w0), mode.l as f64 * phi)
}

pub fn eval_lg_momentum(mode: ModeIndex, q: f64, theta: f64, spec: &BasisSpec) -> Complex64 {
    momentum_phase(mode) * Complex64::from_polar(lg_radial(mode, q, 2.0 / spec.w0), mode.l as f64 * theta)
}

/// Default momentum grid for a basis: `N_r = 200`, `N_theta = 128`.
pub fn default_grid(spec: &BasisSpec) -> QuadratureGrid {
    QuadratureGrid::new(spec.q_max, 200, 128)
}

/// Gram matrix `G_ab = int conj(phi_a) phi_b d^2q` on `grid`, row-major `M x M`.
pub fn gram_matrix(spec: &BasisSpec, grid: &QuadratureGrid) -> Vec<Vec<Complex64>> {
    let m = spec.mode_count();
    let mut g = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for pt in grid.points() {
        let v = spec.momentum_values(pt.q, pt.theta);
        for a in 0..m {
            let ca = v[a].conj() * pt.weight;
            for b in 0..m {
                g[a][b] += ca * v[b];
            }
        }
    }
    g
}

/// `max |G - I|` over all entries.
pub fn gram_residual(gram: &[Vec<Complex64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, row) in gram.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((v - target).norm());
        }
    }
    worst
}

/// Truncation error of the closure relation at one `(q, rho)` pair:
/// `|2 pi sum_n conj(phi_n(q)) psi_n(rho) - exp(i q.rho)|`.
///
/// The `2 pi` matches the unitary transform convention of the momentum modes.
pub fn completeness_residual(spec: &BasisSpec, q: [f64; 2], rho: [f64; 2]) -> Result<f64> {
    let qn = q[0].hypot(q[1]);
    if qn > spec.q_max * (1.0 + 1e-12) {
        return Err(Error::domain(format!("|q| = {qn} exceeds q_max = {}", spec.q_max)));
    }
    let phis = spec.momentum_values(qn, q[1].atan2(q[0]));
    let psis = spec.position_values_xy(rho[0], rho[1]);
    let sum: Complex64 = phis.iter().zip(&psis).map(|(f, s)| f.conj() * s).sum();
    let plane = Complex64::from_polar(1.0, q[0] * rho[0] + q[1] * rho[1]);
    Ok((2.0 * PI * sum - plane).norm())
}

const POWER_PANELS: usize = 16;
const POWER_NODES: usize = 32;

/// Smallest radius enclosing `fraction` of the mode's power.
pub fn power_radius(mode: ModeIndex, fraction: f64, spec: &BasisSpec) -> Result<f64> {
    power_radius_with(mode, fraction, spec, POWER_NODES)
}

/// [`power_radius`] with `nodes` Gauss-Legendre nodes per radial panel.
pub fn power_radius_with(mode: ModeIndex, fraction: f64, spec: &BasisSpec, nodes: usize) -> Result<f64> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::domain(format!("power fraction must lie in (0, 1), got {fraction}")));
    }
    let w0 = spec.w0;
    let density = |r: f64| {
        let v = lg_radial(mode, r, w0);
        2.0 * PI * r * v * v
    };
    // Outer radius where the envelope has decayed far past the last radial node.
    let x_out = 2.0 * mode.p as f64 + mode.abs_l() as f64 + 1.0;
    let r_out = w0 * (0.5 * (x_out.sqrt() + 8.0).powi(2)).sqrt();
    let enclosed = |c: f64| {
        let panels: Vec<f64> = (1..POWER_PANELS).map(|k| c * k as f64 / POWER_PANELS as f64).collect();
        RadialRule::graded(c, &panels, nodes).integrate(density)
    };
    let total = enclosed(r_out);
    let target = fraction * total;
    let (mut lo, mut hi) = (0.0, r_out);
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if enclosed(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Intensity transmitted through a slab of thickness `dz`:
/// `exp(-q_max^2 dz / k0)`.
pub fn attenuation_factor(q_max: f64, k0: f64, dz: f64) -> f64 {
    (-q_max * q_max * dz / k0).exp()
}

/// Attenuation for `q_max = 10^-p k0` and `dz = 10^l` carrier wavelengths.
/// Independent of `k0`; equals `exp(-2 pi 10^(l - 2p))`.
pub fn attenuation_decades(l: i32, p: i32, k0: f64) -> f64 {
    let q_max = 10f64.powi(-p) * k0;
    let dz = 10f64.powi(l) * 2.0 * PI / k0;
    attenuation_factor(q_max, k0, dz)
}
