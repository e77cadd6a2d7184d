//! Principal-value integrals with a simple pole,
//! `H[g](s) = PV int_0^V g(v) / (s - v) dv`, discretized on a fixed set of
//! nodes `v_j` so that `H[g](s) = sum_j c_j g(v_j) + c_a g(a)`.
//!
//! Callers evaluate `g` at the nodes once and at the anchor `a`, then reuse
//! the coefficients for every function sharing the same pole.

use serde::{Deserialize, Serialize};

use crate::quadrature::RadialRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PvScheme {
    /// Singularity subtraction: integrate `(g(v) - g(a)) / (s - v)` with the
    /// plain rule and add `g(a) ln|s / (s - V)|` analytically, anchored at
    /// `a = clamp(s, 0, V)`. Converges at the rate of the underlying rule.
    #[default]
    Subtracted,
    /// Drop every node with `|s - v_j| < eps` and sum the rest. No analytic
    /// correction; converges only as `eps` and the node spacing shrink together.
    Excluded,
}

/// Nodes in the squared variable `v = q^2`, with weights for `dv`.
#[derive(Debug, Clone)]
pub struct PvNodes {
    pub v: Vec<f64>,
    pub weights: Vec<f64>,
    pub upper: f64,
}

impl PvNodes {
    /// Maps a radial rule in `q` on `[0, q_max]` to `v = q^2` on `[0, q_max^2]`.
    pub fn from_radial(rule: &RadialRule) -> Self {
        PvNodes {
            v: rule.nodes.iter().map(|q| q * q).collect(),
            weights: rule.nodes.iter().zip(&rule.weights).map(|(q, w)| 2.0 * q * w).collect(),
            upper: rule.upper * rule.upper,
        }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }
}

/// Coefficients of one PV evaluation.
#[derive(Debug, Clone)]
pub struct PvWeights {
    pub node: Vec<f64>,
    /// Point where `g` must be evaluated for the anchor term.
    pub anchor: f64,
    pub anchor_coeff: f64,
}

impl PvWeights {
    pub fn apply(&self, g_nodes: &[f64], g_anchor: f64) -> f64 {
        self.node.iter().zip(g_nodes).map(|(c, g)| c * g).sum::<f64>() + self.anchor_coeff * g_anchor
    }
}

/// Relative distance, in units of `V`, below which a node counts as sitting on the pole.
const COINCIDENCE: f64 = 1e-12;

/// Coefficients for `PV int_0^V g(v) / (s - v) dv` on `nodes`.
pub fn pv_weights(nodes: &PvNodes, s: f64, scheme: PvScheme, eps: f64) -> PvWeights {
    let big_v = nodes.upper;
    let guard = match scheme {
        PvScheme::Subtracted => COINCIDENCE * big_v,
        PvScheme::Excluded => eps,
    };
    let node: Vec<f64> = nodes
        .v
        .iter()
        .zip(&nodes.weights)
        .map(|(v, w)| {
            let d = s - v;
            if d.abs() < guard {
                0.0
            } else {
                w / d
            }
        })
        .collect();
    match scheme {
        PvScheme::Excluded => PvWeights {
            node,
            anchor: s.clamp(0.0, big_v),
            anchor_coeff: 0.0,
        },
        PvScheme::Subtracted => {
            let log = if s.abs() <= COINCIDENCE * big_v || (s - big_v).abs() <= COINCIDENCE * big_v {
                0.0
            } else {
                (s.abs() / (s - big_v).abs()).ln()
            };
            let sum: f64 = node.iter().sum();
            PvWeights {
                node,
                anchor: s.clamp(0.0, big_v),
                anchor_coeff: log - sum,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nodes(upper: f64, brk: &[f64], n: usize) -> PvNodes {
        PvNodes::from_radial(&RadialRule::graded(upper.sqrt(), brk, n))
    }

    #[test]
    fn constant_integrand_is_the_log() {
        let nd = nodes(4.0, &[], 21);
        for s in [0.3, 1.7, 3.999, -0.5, 6.0] {
            let w = pv_weights(&nd, s, PvScheme::Subtracted, 0.0);
            let v = w.apply(&vec![1.0; nd.len()], 1.0);
            let exact = (s.abs() / (s - 4.0f64).abs()).ln();
            assert!((v - exact).abs() < 1e-12, "{s}: {v} vs {exact}");
        }
    }

    #[test]
    fn smooth_integrand_converges() {
        // PV int_0^1 v^2 / (s - v) dv = -s^2 ln|(s-1)/s| - s - 1/2
        let s: f64 = 0.37;
        let exact = -s * s * ((s - 1.0).abs() / s).ln() - s - 0.5;
        let nd = nodes(1.0, &[], 25);
        let g: Vec<f64> = nd.v.iter().map(|v| v * v).collect();
        let w = pv_weights(&nd, s, PvScheme::Subtracted, 0.0);
        let v = w.apply(&g, w.anchor * w.anchor);
        assert!((v - exact).abs() < 1e-10, "{v} vs {exact}");

        // Exclusion without correction is visibly worse at the same node count.
        let w = pv_weights(&nd, s, PvScheme::Excluded, 1e-3);
        let ex = w.apply(&g, 0.0);
        assert!((ex - exact).abs() > 1e-8);
    }

    #[test]
    fn exact_hit_on_a_node_is_guarded() {
        let nd = nodes(1.0, &[], 9);
        let s = nd.v[4];
        let g: Vec<f64> = nd.v.iter().map(|v| v.exp()).collect();
        let w = pv_weights(&nd, s, PvScheme::Subtracted, 0.0);
        assert!(w.node.iter().all(|c| c.is_finite()));
        assert!(w.apply(&g, s.exp()).is_finite());
    }
}
