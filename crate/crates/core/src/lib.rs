//! Local-unitary invariants and equivalence decisions for two- and
//! three-qubit mixed states.

pub mod bloch;
pub mod equivalence2;
pub mod equivalence3;
pub mod error;
pub mod families;
pub mod invariants;
pub mod linalg;
pub mod pauli;
pub mod statekit;

pub use nalgebra;
pub use bloch::{BlochTensor2, BlochTensor3, DensityMatrix, Tensor3};
pub use equivalence2::{decide2, decide2_states, LocalUnitaryWitness, Verdict, VerdictKind};
pub use equivalence3::{coverage_compare, decide3, decide3_states, lps_check, CoverageRecord, LpsRecord};
pub use error::LuError;
pub use families::{build_families2, build_families3, VectorFamily};
pub use invariants::{fingerprint2, fingerprint3, fingerprints_equal, Certificate, Fingerprint, Fingerprint2, Fingerprint3};
pub use linalg::{RMat3, RVec3};
pub use pauli::{so3_to_su2, su2_to_so3, CMat2, C64};
