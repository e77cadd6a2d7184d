//! Gauss-Legendre rules and the polar grids used for transverse-momentum
//! integrals.
//!
//! Radial rules live on `[0, q_max]`. Composite rules split that interval at
//! breakpoints where an integrand is known to be non-smooth (logarithmic
//! endpoint behaviour of principal-value integrals) and grade each panel
//! towards both of its ends with a smoothstep map, which turns an endpoint
//! `ln|x|` into an integrable `t ln t` that Gauss-Legendre handles well.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[m - 1] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A one-dimensional rule on `[0, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub upper: f64,
}

impl RadialRule {
    /// Plain Gauss-Legendre on `[0, upper]`.
    pub fn gauss(upper: f64, n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let half = 0.5 * upper;
        RadialRule {
            nodes: x.iter().map(|t| half * (t + 1.0)).collect(),
            weights: w.iter().map(|w| half * w).collect(),
            upper,
        }
    }

    /// Composite rule with `n` graded nodes per panel. Breakpoints outside
    /// `(0, upper)` or closer than `1e-12 * upper` to another are dropped.
    pub fn graded(upper: f64, breakpoints: &[f64], n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let mut cuts: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|b| b.is_finite() && *b > 0.0 && *b < upper)
            .collect();
        cuts.push(0.0);
        cuts.push(upper);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * upper);

        let mut nodes = Vec::with_capacity(n * (cuts.len() - 1));
        let mut weights = Vec::with_capacity(n * (cuts.len() - 1));
        for pair in cuts.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let len = hi - lo;
            for (t, wt) in x.iter().zip(&w) {
                let t = 0.5 * (t + 1.0);
                let s = t * t * (3.0 - 2.0 * t);
                let ds = 6.0 * t * (1.0 - t);
                nodes.push(lo + len * s);
                weights.push(len * ds * 0.5 * wt);
            }
        }
        RadialRule {
            nodes,
            weights,
            upper,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

/// Polar product grid on the disk `|q| <= q_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub q_max: f64,
    pub radial: RadialRule,
    pub angles: Vec<f64>,
}

/// One grid point with its full 2-D weight (radial Jacobian included).
#[derive(Debug, Clone, Copy)]
pub struct GridPoint {
    pub q: f64,
    pub theta: f64,
    pub weight: f64,
}

impl QuadratureGrid {
    /// Gauss-Legendre radial nodes on `[0, q_max]`, uniform angles.
    pub fn new(q_max: f64, n_r: usize, n_theta: usize) -> Self {
        QuadratureGrid {
            q_max,
            radial: RadialRule::gauss(q_max, n_r),
            angles: uniform_angles(n_theta),
        }
    }

    /// Graded composite radial rule split at `breakpoints`, `n_r` nodes per panel.
    pub fn with_breakpoints(q_max: f64, breakpoints: &[f64], n_r: usize, n_theta: usize) -> Self {
        QuadratureGrid {
            q_max,
            radial: RadialRule::graded(q_max, breakpoints, n_r),
            angles: uniform_angles(n_theta),
        }
    }

    pub fn n_r(&self) -> usize {
        self.radial.len()
    }

    pub fn n_theta(&self) -> usize {
        self.angles.len()
    }

    pub fn angle_weight(&self) -> f64 {
        2.0 * PI / self.angles.len() as f64
    }

    pub fn points(&self) -> impl Iterator<Item = GridPoint> + '_ {
        let aw = self.angle_weight();
        self.radial
            .nodes
            .iter()
            .zip(&self.radial.weights)
            .flat_map(move |(&q, &w)| {
                self.angles.iter().map(move |&theta| GridPoint {
                    q,
                    theta,
                    weight: w * q * aw,
                })
            })
    }

    /// Sum of all 2-D weights; reproduces `pi q_max^2`.
    pub fn area(&self) -> f64 {
        self.points().map(|p| p.weight).sum()
    }
}

fn uniform_angles(n: usize) -> Vec<f64> {
    assert!(n > 0, "angular rule needs at least one node");
    (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(12);
        for deg in 0..24 {
            let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((approx - exact).abs() < 1e-13, "degree {deg}: {approx} vs {exact}");
        }
    }

    #[test]
    fn large_rule_weights_sum_to_two() {
        let (x, w) = gauss_legendre(401);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        assert!(w.iter().all(|w| *w > 0.0));
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn grid_area_matches_disk() {
        for grid in [
            QuadratureGrid::new(3.5, 200, 128),
            QuadratureGrid::with_breakpoints(3.5, &[0.7, 2.0], 40, 16),
        ] {
            let area = grid.area();
            let exact = PI * 3.5 * 3.5;
            assert!(((area - exact) / exact).abs() < 1e-10);
            assert!(grid.points().all(|p| p.weight > 0.0));
        }
    }

    #[test]
    fn graded_rule_tames_endpoint_log() {
        // int_0^1 ln(x) dx = -1, singular at the left end.
        let rule = RadialRule::graded(1.0, &[], 40);
        let v = rule.integrate(|x| x.ln());
        assert!((v + 1.0).abs() < 5e-6, "{v}");
        let finer = RadialRule::graded(1.0, &[], 80).integrate(|x| x.ln());
        assert!((finer + 1.0).abs() < (v + 1.0).abs() / 8.0);
        // interior log singularity at a breakpoint
        let rule = RadialRule::graded(2.0, &[0.5], 40);
        let v = rule.integrate(|x| (x - 0.5).abs().ln());
        let exact = 0.5 * (0.5f64.ln() - 1.0) + 1.5 * (1.5f64.ln() - 1.0);
        assert!((v - exact).abs() < 5e-6, "{v} vs {exact}");
    }
}
