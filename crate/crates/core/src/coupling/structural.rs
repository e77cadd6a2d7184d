//! Geometry tensor `S`, its contraction with the potential and the
//! LG-diagonal reduction.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::hopping::site_values;
use crate::error::{Error, Result};
use crate::geometry::Architecture;
use crate::modes::BasisSpec;
use crate::tensor::Tensor4;

/// `S[l][l'][s][s'] = sum_alpha conj(f_ll') f_ss'` with
/// `f_nm = conj(psi_n(r_alpha)) psi_m(r_alpha)`.
pub fn structural_tensor(arch: &Architecture, spec: &BasisSpec) -> Tensor4<Complex64> {
    let m = spec.mode_count();
    let values = site_values(arch, spec);
    let fs: Vec<Vec<Complex64>> = values
        .iter()
        .map(|v| {
            let mut f = Vec::with_capacity(m * m);
            for a in 0..m {
                for b in 0..m {
                    f.push(v[a].conj() * v[b]);
                }
            }
            f
        })
        .collect();
    let m2 = m * m;
    let rows: Vec<Vec<Complex64>> = (0..m2)
        .into_par_iter()
        .map(|row| {
            let mut acc = vec![Complex64::new(0.0, 0.0); m2];
            for f in &fs {
                let c = f[row].conj();
                for (x, y) in acc.iter_mut().zip(f) {
                    *x += c * y;
                }
            }
            acc
        })
        .collect();
    Tensor4::from_vec(m, rows.into_iter().flatten().collect())
}

/// Matrix over `(l, l') x (s, s')`; the Gram construction makes it Hermitian PSD.
pub fn structural_matrix(s: &Tensor4<Complex64>) -> DMatrix<Complex64> {
    s.matricize()
}

/// `U[a][b][c][d] = -sum_{c', d'} S[c][c'][d][d'] V[a][b][c'][d']`.
pub fn interaction_tensor(s: &Tensor4<Complex64>, v: &Tensor4<Complex64>) -> Result<Tensor4<Complex64>> {
    if s.side() != v.side() {
        return Err(Error::DimensionMismatch {
            expected: v.side(),
            found: s.side(),
        });
    }
    let m = s.side();
    let m2 = m * m;
    // T[(c', d'), (c, d)] = S[c][c'][d][d']
    let t = DMatrix::from_fn(m2, m2, |r, col| {
        let (cp, dp) = (r / m, r % m);
        let (c, d) = (col / m, col % m);
        *s.get(c, cp, d, dp)
    });
    let u = -(v.matricize() * t);
    Ok(Tensor4::from_matrix(m, &u))
}

#[derive(Debug, Clone)]
pub struct LgReduction {
    /// `U[n][n][k][k]`.
    pub matrix: DMatrix<Complex64>,
    /// `||U - U_kept|| / ||U||` in the Frobenius norm, where `U_kept` keeps
    /// only the entries with `a = b` and `c = d`.
    pub discarded_weight: f64,
}

pub fn reduce_lg_diagonal(u: &Tensor4<Complex64>) -> LgReduction {
    let m = u.side();
    let matrix = DMatrix::from_fn(m, m, |n, k| *u.get(n, n, k, k));
    let total = u.norm();
    let kept: f64 = matrix.iter().map(|c| c.norm_sqr()).sum();
    let discarded_weight = if total == 0.0 {
        0.0
    } else {
        ((total * total - kept).max(0.0)).sqrt() / total
    };
    LgReduction { matrix, discarded_weight }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::analysis::max_norm;
    use crate::geometry::{gen_uniform_cylinder, Scatterer};
    use proptest::prelude::*;

    fn brute_force(s: &Tensor4<Complex64>, v: &Tensor4<Complex64>) -> Tensor4<Complex64> {
        let m = s.side();
        Tensor4::from_fn(m, |a, b, c, d| {
            let mut acc = Complex64::new(0.0, 0.0);
            for cp in 0..m {
                for dp in 0..m {
                    acc -= s.get(c, cp, d, dp) * v.get(a, b, cp, dp);
                }
            }
            acc
        })
    }

    fn random_tensor(m: usize, seed: u64) -> Tensor4<Complex64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Tensor4::from_fn(m, |_, _, _, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn single_scatterer_is_rank_one() {
        let arch = Architecture::new("one", vec![Scatterer::point(0.4, -0.3)]);
        let spec = BasisSpec::full(1, 1);
        let s = structural_tensor(&arch, &spec);
        let v = spec.position_values_xy(0.4, -0.3);
        let f = |a: usize, b: usize| v[a].conj() * v[b];
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    for d in 0..6 {
                        let e = f(a, b).conj() * f(c, d);
                        assert!((s.get(a, b, c, d) - e).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn origin_scatterer_touches_only_l_zero() {
        let arch = Architecture::new("o", vec![Scatterer::point(0.0, 0.0)]);
        let spec = BasisSpec::full(1, 1);
        let s = structural_tensor(&arch, &spec);
        let modes = spec.modes();
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    for d in 0..6 {
                        if [a, b, c, d].iter().any(|&i| modes[i].l != 0) {
                            assert_eq!(s.get(a, b, c, d).norm(), 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn structural_matrix_is_hermitian_psd() {
        let arch = gen_uniform_cylinder(0.1, 1.2, 40, 3).unwrap();
        let spec = BasisSpec::full(1, 1);
        let m = structural_matrix(&structural_tensor(&arch, &spec));
        let herm = max_norm(&(&m - m.adjoint()));
        assert!(herm < 1e-12);
        assert!(m.symmetric_eigen().eigenvalues.min() > -1e-10);
    }

    #[test]
    fn contraction_identities() {
        let m = 3;
        let v = random_tensor(m, 1);
        let identity = Tensor4::from_fn(m, |c, cp, d, dp| {
            if c == cp && d == dp {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let u = interaction_tensor(&identity, &v).unwrap();
        for (x, y) in u.as_slice().iter().zip(v.as_slice()) {
            assert!((x + y).norm() < 1e-15);
        }
        let zero = Tensor4::zeros(m);
        assert_eq!(interaction_tensor(&identity, &zero).unwrap().max_abs(), 0.0);
        assert!(matches!(
            interaction_tensor(&Tensor4::zeros(2), &v),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn reduction_by_hand() {
        let u = Tensor4::from_fn(2, |a, b, c, d| Complex64::new((8 * a + 4 * b + 2 * c + d) as f64, 0.0));
        let r = reduce_lg_diagonal(&u);
        assert_eq!(r.matrix[(0, 0)].re, 0.0);
        assert_eq!(r.matrix[(0, 1)].re, 3.0);
        assert_eq!(r.matrix[(1, 0)].re, 12.0);
        assert_eq!(r.matrix[(1, 1)].re, 15.0);
        let zero = reduce_lg_diagonal(&Tensor4::zeros(3));
        assert_eq!(max_norm(&zero.matrix), 0.0);
        assert_eq!(zero.discarded_weight, 0.0);
    }

    proptest! {
        #[test]
        fn contraction_matches_six_loops(seed in 0u64..500, m in 1usize..=4) {
            let s = random_tensor(m, seed);
            let v = random_tensor(m, seed + 7919);
            let fast = interaction_tensor(&s, &v).unwrap();
            let slow = brute_force(&s, &v);
            for (x, y) in fast.as_slice().iter().zip(slow.as_slice()) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }
    }
}
