//! Point-particle hopping matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::Architecture;
use crate::modes::BasisSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HoppingKind {
    Coherent,
    Incoherent,
    Total,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoppingMatrix {
    pub kind: HoppingKind,
    pub entries: DMatrix<Complex64>,
}

impl HoppingMatrix {
    pub fn new(kind: HoppingKind, entries: DMatrix<Complex64>) -> Self {
        HoppingMatrix { kind, entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `max |A - A^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.entries)
    }
}

pub fn hermiticity_defect(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Mode values `psi_n(r_alpha)` for every scatterer, in scatterer order.
pub fn site_values(arch: &Architecture, spec: &BasisSpec) -> Vec<Vec<Complex64>> {
    arch.scatterers
        .par_iter()
        .map(|s| spec.position_values_xy(s.x, s.y))
        .collect()
}

fn gram(values: &[Vec<Complex64>], m: usize) -> DMatrix<Complex64> {
    let mut g = DMatrix::zeros(m, m);
    for v in values {
        for n in 0..m {
            let cn = v[n].conj();
            for k in 0..m {
                g[(n, k)] += cn * v[k];
            }
        }
    }
    g
}

/// `theta_nk = g_inc sum_alpha conj(psi_n(r_alpha)) psi_k(r_alpha)`.
pub fn hopping_incoherent_pp(arch: &Architecture, spec: &BasisSpec) -> HoppingMatrix {
    let values = site_values(arch, spec);
    let g = gram(&values, spec.mode_count()) * Complex64::new(arch.g_inc, 0.0);
    HoppingMatrix::new(HoppingKind::Incoherent, g)
}

/// `theta_nm = g_coh sum_{alpha != beta} conj(psi_n(r_alpha)) psi_m(r_beta)`,
/// evaluated as the full double sum minus its diagonal.
pub fn hopping_coherent_pp(arch: &Architecture, spec: &BasisSpec) -> HoppingMatrix {
    let m = spec.mode_count();
    let values = site_values(arch, spec);
    let mut total = vec![Complex64::new(0.0, 0.0); m];
    for v in &values {
        for (t, x) in total.iter_mut().zip(v) {
            *t += x;
        }
    }
    let diag = gram(&values, m);
    let mut out = DMatrix::zeros(m, m);
    for n in 0..m {
        for k in 0..m {
            out[(n, k)] = (total[n].conj() * total[k] - diag[(n, k)]) * arch.g_coh;
        }
    }
    HoppingMatrix::new(HoppingKind::Coherent, out)
}

/// `Theta = omega0 (I - theta_coh - theta_inc)`.
pub fn total_hopping(omega0: f64, coherent: &HoppingMatrix, incoherent: &HoppingMatrix) -> HoppingMatrix {
    let m = coherent.dim();
    let id = DMatrix::<Complex64>::identity(m, m);
    let theta = (id - &coherent.entries - &incoherent.entries) * Complex64::new(omega0, 0.0);
    HoppingMatrix::new(HoppingKind::Total, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::analysis::max_norm;
    use crate::geometry::{gen_ring, gen_uniform_cylinder, Architecture, Scatterer};

    #[test]
    fn single_scatterer_has_no_coherent_term() {
        let arch = Architecture::new("one", vec![Scatterer::point(0.3, 0.2)]);
        let spec = BasisSpec::full(1, 2);
        assert_eq!(max_norm(&hopping_coherent_pp(&arch, &spec).entries), 0.0);
    }

    #[test]
    fn two_scatterers_expand_by_hand() {
        let arch = Architecture::new("two", vec![Scatterer::point(0.3, 0.2), Scatterer::point(-0.5, 0.9)])
            .with_couplings(0.7, 1.0);
        let spec = BasisSpec::full(1, 1);
        let th = hopping_coherent_pp(&arch, &spec).entries;
        let a = spec.position_values_xy(0.3, 0.2);
        let b = spec.position_values_xy(-0.5, 0.9);
        for n in 0..6 {
            for m in 0..6 {
                let e = (a[n].conj() * b[m] + b[n].conj() * a[m]) * 0.7;
                assert!((th[(n, m)] - e).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn origin_scatterer_couples_only_l_zero() {
        let arch = Architecture::new("origin", vec![Scatterer::point(0.0, 0.0)]);
        let spec = BasisSpec::full(2, 2);
        let th = hopping_incoherent_pp(&arch, &spec).entries;
        let modes = spec.modes();
        for (i, a) in modes.iter().enumerate() {
            for (j, b) in modes.iter().enumerate() {
                if a.l != 0 || b.l != 0 {
                    assert_eq!(th[(i, j)].norm(), 0.0);
                }
            }
        }
        assert!(th[(spec.index_of(crate::modes::ModeIndex::new(0, 0)).unwrap(), 7)].norm() > 0.0);
    }

    #[test]
    fn ring_selection_rule() {
        // sum_alpha exp(i (l_k - l_n) phi_alpha) vanishes unless 8 divides the difference
        let arch = gen_ring(0.9, 8).unwrap();
        let spec = BasisSpec::full(5, 1);
        let th = hopping_incoherent_pp(&arch, &spec).entries;
        let scale = max_norm(&th);
        let modes = spec.modes();
        for (i, a) in modes.iter().enumerate() {
            for (j, b) in modes.iter().enumerate() {
                let allowed = (b.l - a.l).rem_euclid(8) == 0;
                if !allowed {
                    assert!(th[(i, j)].norm() < 1e-13 * scale, "{a} {b}");
                }
            }
        }
        let (i, j) = (spec.index_of(crate::modes::ModeIndex::new(-4, 0)).unwrap(), spec.index_of(crate::modes::ModeIndex::new(4, 1)).unwrap());
        assert!(th[(i, j)].norm() > 1e-6 * scale);
    }

    #[test]
    fn incoherent_is_hermitian_psd() {
        let arch = gen_uniform_cylinder(0.2, 1.3, 300, 5).unwrap();
        let spec = BasisSpec::full(2, 3);
        let th = hopping_incoherent_pp(&arch, &spec);
        assert!(th.hermiticity_defect() < 1e-12);
        let eig = th.entries.clone().symmetric_eigen();
        assert!(eig.eigenvalues.min() > -1e-10);
        let coh = hopping_coherent_pp(&arch, &spec);
        assert!(coh.hermiticity_defect() < 1e-10);
        let total = total_hopping(1.0, &coh, &th);
        assert_eq!(total.kind, HoppingKind::Total);
        assert!((total.entries[(0, 0)] - (1.0 - coh.entries[(0, 0)] - th.entries[(0, 0)])).norm() < 1e-14);
    }
}
