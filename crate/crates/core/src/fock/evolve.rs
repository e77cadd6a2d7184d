//! Time evolution `exp(-i H tau)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::StateVector;
use super::operator::SparseMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Dense eigendecomposition, or a dense exponential when `H` is not Hermitian.
    Dense,
    /// Arnoldi projection with adaptive substeps.
    Krylov,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveOptions {
    pub method: Method,
    /// Error budget for a whole propagation, in state-vector norm.
    pub tol: f64,
    pub krylov_dim: usize,
    /// Largest dimension handled densely.
    pub dense_cap: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            method: Method::Dense,
            tol: 1e-12,
            krylov_dim: 30,
            dense_cap: 2000,
        }
    }
}

#[derive(Debug, Clone)]
enum Kernel {
    Eigen { vectors: DMatrix<Complex64>, values: DVector<f64> },
    Generic(DMatrix<Complex64>),
    Krylov(SparseMatrix),
}

/// Applies `exp(-i H tau)` for any `tau >= 0`.
#[derive(Debug, Clone)]
pub struct Propagator {
    kernel: Kernel,
    opts: EvolveOptions,
    /// `H` failed the Hermiticity check, so the evolution is not unitary.
    pub non_unitary: bool,
}

const HERMITIAN_TOL: f64 = 1e-8;

impl Propagator {
    pub fn new(h: &SparseMatrix, opts: EvolveOptions) -> Result<Self> {
        let scale = 1.0 + h.max_abs();
        let non_unitary = h.hermiticity_defect() > HERMITIAN_TOL * scale;
        let kernel = match opts.method {
            Method::Dense => dense_kernel(h, &opts, non_unitary)?,
            Method::Krylov => Kernel::Krylov(h.clone()),
        };
        Ok(Propagator { kernel, opts, non_unitary })
    }

    pub fn method(&self) -> Method {
        match self.kernel {
            Kernel::Krylov(_) => Method::Krylov,
            _ => Method::Dense,
        }
    }

    pub fn apply(&self, psi: &StateVector, tau: f64) -> Result<StateVector> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(Error::domain(format!("evolution time must be finite and non-negative, got {tau}")));
        }
        let x = &psi.amplitudes;
        let out = match &self.kernel {
            Kernel::Eigen { vectors, values } => {
                let c = vectors.adjoint() * DVector::from_column_slice(x);
                let phased = DVector::from_fn(c.len(), |j, _| c[j] * Complex64::from_polar(1.0, -values[j] * tau));
                (vectors * phased).as_slice().to_vec()
            }
            Kernel::Generic(h) => {
                let u = (h * Complex64::new(0.0, -tau)).exp();
                (u * DVector::from_column_slice(x)).as_slice().to_vec()
            }
            Kernel::Krylov(h) => match expmv_krylov(h, x, tau, &self.opts) {
                Ok(v) => v,
                Err(Error::Convergence(_)) if h.dim() <= self.opts.dense_cap => {
                    let fallback = dense_kernel(h, &self.opts, self.non_unitary)?;
                    let p = Propagator {
                        kernel: fallback,
                        opts: self.opts,
                        non_unitary: self.non_unitary,
                    };
                    return p.apply(psi, tau);
                }
                Err(e) => return Err(e),
            },
        };
        Ok(StateVector { amplitudes: out })
    }
}

fn dense_kernel(h: &SparseMatrix, opts: &EvolveOptions, non_unitary: bool) -> Result<Kernel> {
    if h.dim() > opts.dense_cap {
        return Err(Error::Capacity {
            dimension: h.dim(),
            cap: opts.dense_cap,
        });
    }
    let dense = h.to_dense();
    if non_unitary {
        return Ok(Kernel::Generic(dense));
    }
    let herm = (&dense + dense.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    Ok(Kernel::Eigen {
        vectors: eig.eigenvectors,
        values: eig.eigenvalues,
    })
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `exp(-i tau H) x` by restarted Arnoldi. Each substep builds a Krylov
/// space of dimension `krylov_dim` and shrinks the step until the a
/// posteriori error estimate fits the share of the budget for that step.
pub fn expmv_krylov(h: &SparseMatrix, x: &[Complex64], tau: f64, opts: &EvolveOptions) -> Result<Vec<Complex64>> {
    let n = h.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    let mut w = x.to_vec();
    if tau == 0.0 || norm(&w) == 0.0 {
        return Ok(w);
    }
    let m_max = opts.krylov_dim.max(2).min(n.max(1));
    let mut t = 0.0;
    let mut step = tau;
    let min_step = tau * 1e-13;
    while t < tau {
        let beta = norm(&w);
        let mut v: Vec<Vec<Complex64>> = vec![w.iter().map(|z| z / beta).collect()];
        let mut hm = DMatrix::<Complex64>::zeros(m_max + 1, m_max);
        let mut m = m_max;
        let mut breakdown = false;
        for j in 0..m_max {
            let mut p = h.matvec(&v[j]);
            for _ in 0..2 {
                for (i, vi) in v.iter().enumerate() {
                    let c = dot(vi, &p);
                    hm[(i, j)] += c;
                    for (pk, vk) in p.iter_mut().zip(vi) {
                        *pk -= c * vk;
                    }
                }
            }
            let s = norm(&p);
            hm[(j + 1, j)] = Complex64::new(s, 0.0);
            if s <= 1e-13 * (1.0 + h.max_abs()) {
                m = j + 1;
                breakdown = true;
                break;
            }
            v.push(p.iter().map(|z| z / s).collect());
        }
        let h_small = hm.view((0, 0), (m, m)).into_owned();
        let h_next = hm[(m.min(m_max), m - 1)].norm();
        loop {
            let dt = step.min(tau - t);
            let f = (&h_small * Complex64::new(0.0, -dt)).exp();
            let err = if breakdown { 0.0 } else { beta * h_next * dt * f[(m - 1, 0)].norm() };
            if err <= opts.tol * dt / tau {
                let mut next = vec![Complex64::new(0.0, 0.0); n];
                for (k, vk) in v.iter().take(m).enumerate() {
                    let c = f[(k, 0)] * beta;
                    for (o, z) in next.iter_mut().zip(vk) {
                        *o += c * z;
                    }
                }
                w = next;
                t += dt;
                if err < 0.1 * opts.tol * dt / tau {
                    step = (step * 2.0).min(tau);
                }
                break;
            }
            step *= 0.5;
            if step < min_step {
                return Err(Error::Convergence(format!(
                    "Krylov substep fell below {min_step:e} at t = {t} of {tau}"
                )));
            }
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{assemble_from_matrix, Interaction};
    use crate::fock::basis::{number_state, FockBasis};
    use crate::fock::operator::hamiltonian_matrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_mode_rabi_oscillation() {
        let g = 0.7;
        let theta = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(g, 0.0), c(g, 0.0), c(0.0, 0.0)]);
        let basis = FockBasis::new(2, 1).unwrap();
        let h = hamiltonian_matrix(&assemble_from_matrix(theta, Interaction::None).unwrap(), &basis).unwrap();
        let psi = number_state(&basis, &[1, 0]).unwrap();
        for method in [Method::Dense, Method::Krylov] {
            let p = Propagator::new(&h, EvolveOptions { method, ..Default::default() }).unwrap();
            for k in 0..20 {
                let tau = 0.37 * k as f64;
                let out = p.apply(&psi, tau).unwrap();
                assert!((out.amplitudes[0].norm_sqr() - (g * tau).cos().powi(2)).abs() < 1e-12);
                assert!((out.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn krylov_agrees_with_dense() {
        use rand::{Rng, SeedableRng};
        let m = 5;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let a = DMatrix::from_fn(m, m, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let theta = (&a + a.adjoint()) * c(0.5, 0.0);
        let u = DMatrix::from_fn(m, m, |i, j| c(0.05 * ((i + j) % 3) as f64, 0.0));
        let basis = FockBasis::new(m, 3).unwrap();
        let h = hamiltonian_matrix(&assemble_from_matrix(theta, Interaction::LgDiagonal(u)).unwrap(), &basis).unwrap();
        let psi = number_state(&basis, &[1, 1, 1, 0, 0]).unwrap();
        let dense = Propagator::new(&h, EvolveOptions::default()).unwrap();
        let kry = Propagator::new(&h, EvolveOptions { method: Method::Krylov, krylov_dim: 12, ..Default::default() }).unwrap();
        for tau in [0.0, 0.5, 3.0, 12.0] {
            let a = dense.apply(&psi, tau).unwrap();
            let b = kry.apply(&psi, tau).unwrap();
            let ov = a.overlap(&b).norm();
            assert!(ov > 1.0 - 1e-9, "tau {tau}: {ov}");
        }
    }

    #[test]
    fn non_hermitian_input_is_flagged() {
        let theta = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let basis = FockBasis::new(2, 1).unwrap();
        let h = hamiltonian_matrix(&assemble_from_matrix(theta, Interaction::None).unwrap(), &basis).unwrap();
        let p = Propagator::new(&h, EvolveOptions::default()).unwrap();
        assert!(p.non_unitary);
        // nilpotent: exp(-i tau H) = 1 - i tau H
        let out = p.apply(&number_state(&basis, &[0, 1]).unwrap(), 2.0).unwrap();
        assert!((out.amplitudes[0] - c(0.0, -2.0)).norm() < 1e-12);
        assert!(p.apply(&out, -1.0).is_err());
    }

    #[test]
    fn dense_cap_is_enforced() {
        let basis = FockBasis::new(3, 1).unwrap();
        let h = hamiltonian_matrix(&assemble_from_matrix(DMatrix::identity(3, 3), Interaction::None).unwrap(), &basis).unwrap();
        let opts = EvolveOptions { dense_cap: 2, ..Default::default() };
        assert!(matches!(Propagator::new(&h, opts), Err(Error::Capacity { .. })));
    }
}
