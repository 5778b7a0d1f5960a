//! Fixed fixtures for the benchmarks, built from deterministic seeds.

use luinv_core::bloch::{to_bloch2, to_bloch3};
use luinv_core::statekit::{orbit_pair, random_density, triple_counterexample, RngSeed};
use luinv_core::{BlochTensor2, BlochTensor3};

/// A random two-qubit state and a local-unitary image of it.
pub fn orbit2(seed: u64) -> (BlochTensor2, BlochTensor2) {
    let rho = random_density(4, None, RngSeed(seed)).expect("dimension 4 is valid");
    let (img, _) = orbit_pair(&rho, RngSeed(seed).derive(1));
    (to_bloch2(&rho).expect("two qubits"), to_bloch2(&img).expect("two qubits"))
}

/// Same as [`orbit2`] for three qubits.
pub fn orbit3(seed: u64) -> (BlochTensor3, BlochTensor3) {
    let rho = random_density(8, None, RngSeed(seed)).expect("dimension 8 is valid");
    let (img, _) = orbit_pair(&rho, RngSeed(seed).derive(1));
    (to_bloch3(&rho).expect("three qubits"), to_bloch3(&img).expect("three qubits"))
}

/// A pair that agrees on every Gram entry but not on orientation.
pub fn mirrored2(seed: u64) -> (BlochTensor2, BlochTensor2) {
    triple_counterexample(RngSeed(seed))
}
