//! Quantum error-correcting codes from absolutely maximally entangled and
//! k-uniform states built on MDS codes over prime fields.

pub mod codes;
pub mod construct;
pub mod cyclotomic;
pub mod error;
pub mod gf;
pub mod pauli;
pub mod record;
pub mod states;
pub mod verify;

pub use codes::{mds_generator, parity_check, singleton_array, ClassicalCode, GeneratorMatrix, DEFAULT_BUDGET};
pub use construct::{kuniform_code, modified_shorten, mtilde, shorten, QuantumCode};
pub use error::{Error, Result};
pub use gf::{FieldElement, MatrixGF, PrimeField};
pub use pauli::PauliString;
pub use record::CodeRecord;
pub use states::CodeState;
pub use verify::{code_distance, verify_code, DistanceMethod, VerificationReport, VerifyOptions};
