//! Numerical construction of four-qubit supercoherent qubits: collective
//! spin operators, the labeled irrep basis, single-qubit selection rules,
//! thermal Lindblad dynamics and encoded exchange gates.

pub mod basis;
pub mod error;
pub mod logic;
pub mod open_system;
pub mod operators;
pub mod selection;
pub mod spin;

pub use error::{Error, Result};
pub use operators::{Axis, DenseOperator, HamiltonianForm, SystemSpec};
pub use spin::HalfInt;

pub use num_complex::Complex64 as C64;
