//! Fixed-photon-number Fock space: basis, Hamiltonian matrix, evolution
//! and observables.

pub mod basis;
pub mod evolve;
pub mod observables;
pub mod operator;

pub use basis::{number_state, prepare_product_state, sector_dimension, FockBasis, Occupation, StateVector, DEFAULT_CAP};
pub use evolve::{expmv_krylov, EvolveOptions, Method, Propagator};
pub use observables::{density, linspace, nonlocal_sum, observable_series, total_number, two_time_correlator, Observable, ObservableSeries, Schedule};
pub use operator::{hamiltonian_matrix, number_commutator_norm, number_diagonal, SparseMatrix};
