//! Sparse many-body Hamiltonian in a Fock basis.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::FockBasis;
use crate::coupling::{EffectiveHamiltonian, Interaction};
use crate::error::{Error, Result};

/// Compressed sparse rows, columns sorted within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseMatrix {
    pub fn from_rows(rows: Vec<Vec<(usize, Complex64)>>) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for row in rows {
            for (c, v) in row {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        SparseMatrix { dim, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .into_par_iter()
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// `max |H_ij - conj(H_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        (0..self.dim)
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .map(|(i, j, v)| (v - self.get(j, i).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

/// Builds the Hamiltonian matrix over `basis`. Rows are filled in parallel
/// and assembled in basis order, so the result does not depend on the
/// thread count.
pub fn hamiltonian_matrix(h: &EffectiveHamiltonian, basis: &FockBasis) -> Result<SparseMatrix> {
    let m = h.dim();
    if basis.modes() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: basis.modes(),
        });
    }
    let rows: Vec<Vec<(usize, Complex64)>> = (0..basis.dim())
        .into_par_iter()
        .map(|col| column_entries(h, basis, col))
        .collect();
    // rows[col] holds H|col>; transpose into CSR rows.
    let mut by_row: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); basis.dim()];
    for (col, entries) in rows.into_iter().enumerate() {
        for (row, v) in entries {
            by_row[row].push((col, v));
        }
    }
    Ok(SparseMatrix::from_rows(by_row))
}

/// Nonzero entries of `H |state_col>` as `(row, value)`, rows sorted.
fn column_entries(h: &EffectiveHamiltonian, basis: &FockBasis, col: usize) -> Vec<(usize, Complex64)> {
    let m = h.dim();
    let occ = basis.state(col);
    let mut acc: std::collections::BTreeMap<usize, Complex64> = Default::default();
    let mut push = |target: &[u16], v: Complex64| {
        if v != Complex64::new(0.0, 0.0) {
            let i = basis.index_of(target).expect("number-conserving operator stays in basis");
            *acc.entry(i).or_default() += v;
        }
    };
    let mut work = occ.clone();

    // sum_nk Theta_nk a+_n a_k
    for k in 0..m {
        if occ[k] == 0 {
            continue;
        }
        let ak = (occ[k] as f64).sqrt();
        work[k] -= 1;
        for n in 0..m {
            let t = h.theta[(n, k)];
            if t == Complex64::new(0.0, 0.0) {
                continue;
            }
            let amp = ak * (work[n] as f64 + 1.0).sqrt();
            work[n] += 1;
            push(&work, t * amp);
            work[n] -= 1;
        }
        work[k] += 1;
    }

    match &h.interaction {
        Interaction::None => {}
        Interaction::LgDiagonal(u) => {
            let mut e = Complex64::new(0.0, 0.0);
            for n in 0..m {
                for k in 0..m {
                    e -= u[(n, k)] * (occ[n] as f64 * occ[k] as f64);
                }
            }
            push(occ, e);
        }
        Interaction::Full(u) => {
            // a+_a a_b a+_c a_d, rightmost first
            for d in 0..m {
                if work[d] == 0 {
                    continue;
                }
                let f_d = (work[d] as f64).sqrt();
                work[d] -= 1;
                for c in 0..m {
                    let f_c = f_d * (work[c] as f64 + 1.0).sqrt();
                    work[c] += 1;
                    for b in 0..m {
                        if work[b] == 0 {
                            continue;
                        }
                        let f_b = f_c * (work[b] as f64).sqrt();
                        work[b] -= 1;
                        for a in 0..m {
                            let coeff = *u.get(a, b, c, d);
                            if coeff == Complex64::new(0.0, 0.0) {
                                continue;
                            }
                            let f_a = f_b * (work[a] as f64 + 1.0).sqrt();
                            work[a] += 1;
                            push(&work, -coeff * f_a);
                            work[a] -= 1;
                        }
                        work[b] += 1;
                    }
                    work[c] -= 1;
                }
                work[d] += 1;
            }
        }
    }
    acc.into_iter().collect()
}

/// Diagonal of the total photon number operator.
pub fn number_diagonal(basis: &FockBasis) -> Vec<f64> {
    (0..basis.dim()).map(|i| basis.total(i) as f64).collect()
}

/// `max |[H, N]_ij| = max |H_ij (N_j - N_i)|`.
pub fn number_commutator_norm(h: &SparseMatrix, basis: &FockBasis) -> f64 {
    let n = number_diagonal(basis);
    (0..h.dim())
        .flat_map(|i| h.row(i).map(move |(j, v)| (i, j, v)))
        .map(|(i, j, v)| v.norm() * (n[j] - n[i]).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::assemble_from_matrix;
    use crate::tensor::Tensor4;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_theta(m: usize, seed: u64) -> DMatrix<Complex64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(m, m, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&a + a.adjoint()) * c(0.5, 0.0)
    }

    #[test]
    fn one_photon_block_is_theta() {
        let theta = random_theta(4, 1);
        let h = assemble_from_matrix(theta.clone(), Interaction::None).unwrap();
        let basis = FockBasis::new(4, 1).unwrap();
        let mat = hamiltonian_matrix(&h, &basis).unwrap().to_dense();
        // one-photon states are ordered mode 0 first
        assert!((mat - theta).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn two_mode_two_photon_by_hand() {
        // states |2,0>, |1,1>, |0,2>
        let theta = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(-1.0, 0.0)]);
        let u = DMatrix::from_row_slice(2, 2, &[c(0.2, 0.0), c(0.1, 0.0), c(0.1, 0.0), c(0.3, 0.0)]);
        let h = assemble_from_matrix(theta, Interaction::LgDiagonal(u)).unwrap();
        let basis = FockBasis::new(2, 2).unwrap();
        let mat = hamiltonian_matrix(&h, &basis).unwrap();
        let s2 = 2f64.sqrt();
        let expect = [
            [2.0 - 4.0 * 0.2, 0.5 * s2, 0.0],
            [0.5 * s2, -(0.2 + 0.1 + 0.1 + 0.3), 0.5 * s2],
            [0.0, 0.5 * s2, -2.0 - 4.0 * 0.3],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((mat.get(i, j) - c(expect[i][j], 0.0)).norm() < 1e-14, "{i}{j}");
            }
        }
    }

    #[test]
    fn full_form_of_a_diagonal_tensor_matches_lg_form() {
        // U_nnkk only: a+_n a_n a+_k a_k = n_n n_k
        let m = 3;
        let ucal = DMatrix::from_fn(m, m, |n, k| c(0.1 * (n + 2 * k) as f64 + 0.05, 0.0));
        let full = Tensor4::from_fn(m, |a, b, cc, d| if a == b && cc == d { ucal[(a, cc)] } else { c(0.0, 0.0) });
        let theta = random_theta(m, 5);
        let basis = FockBasis::new(m, 3).unwrap();
        let h1 = hamiltonian_matrix(&assemble_from_matrix(theta.clone(), Interaction::LgDiagonal(ucal)).unwrap(), &basis).unwrap();
        let h2 = hamiltonian_matrix(&assemble_from_matrix(theta, Interaction::Full(full)).unwrap(), &basis).unwrap();
        let diff = (h1.to_dense() - h2.to_dense()).iter().fold(0.0f64, |x, z| x.max(z.norm()));
        assert!(diff < 1e-13);
    }

    #[test]
    fn hamiltonian_conserves_photon_number() {
        use rand::{Rng, SeedableRng};
        let m = 3;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let u = Tensor4::from_fn(m, |_, _, _, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let h = assemble_from_matrix(random_theta(m, 2), Interaction::Full(u)).unwrap();
        let basis = FockBasis::truncated(m, 3).unwrap();
        let mat = hamiltonian_matrix(&h, &basis).unwrap();
        assert!(mat.nnz() > 0);
        assert!(number_commutator_norm(&mat, &basis) < 1e-12);
    }

    #[test]
    fn hermitian_coefficients_give_hermitian_matrix() {
        let m = 3;
        let ucal = DMatrix::from_fn(m, m, |n, k| c(((n + 1) * (k + 1)) as f64 * 0.1, 0.0));
        let h = assemble_from_matrix(random_theta(m, 4), Interaction::LgDiagonal(ucal)).unwrap();
        let mat = hamiltonian_matrix(&h, &FockBasis::new(m, 3).unwrap()).unwrap();
        assert!(mat.hermiticity_defect() < 1e-14);
        let x: Vec<Complex64> = (0..mat.dim()).map(|i| c(i as f64, 1.0)).collect();
        let dense = mat.to_dense() * nalgebra::DVector::from_vec(x.clone());
        let sparse = mat.matvec(&x);
        for (a, b) in dense.iter().zip(&sparse) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
