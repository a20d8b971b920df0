//! Modeling, simulation and fitting of Cooper-pair box spectra coupled to
//! one or two two-level fluctuators that shift both the island charge and
//! the junction critical current.

pub mod analysis;
pub mod cli;
pub mod eigen;
pub mod fitting;
pub mod hamiltonian;
pub mod io;
pub mod spectra;

pub use eigen::{eigendecompose, residual_norm, EigenError, EigenSystem};
pub use hamiltonian::{
    build_cpb_block, build_hamiltonian, build_single_tls, build_two_tls, ej_from_flux, CpbParams,
    HamiltonianError, ModelConfig, SymMatrix, TlsParams,
};
pub use spectra::{spectrum, transitions_at, SpectrumTable, TransitionLine};
