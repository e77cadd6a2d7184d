//! Coupling coefficients: hopping matrices, the four-mode scattering
//! potential, the geometry tensor and their assembly into an effective
//! Hamiltonian.

pub mod analysis;
pub mod exact;
pub mod hamiltonian;
pub mod hopping;
pub mod potential;
pub mod structural;

pub use exact::{hopping_coherent_exact, hopping_incoherent_exact, ExactOptions, IncoherentPair};
pub use hamiltonian::{assemble_from_matrix, assemble_hamiltonian, EffectiveHamiltonian, Interaction, InteractionForm};
pub use hopping::{hopping_coherent_pp, hopping_incoherent_pp, total_hopping, HoppingKind, HoppingMatrix};
pub use potential::{partial_trace, scattering_potential, PotentialOptions, ScatteringPotential, TracePair};
pub use structural::{interaction_tensor, reduce_lg_diagonal, structural_tensor, LgReduction};
