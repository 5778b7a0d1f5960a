//! JSON state files.
//!
//! ```json
//! {"kind": "density", "dim": 4, "re": [[...], ...], "im": [[...], ...]}
//! {"kind": "bloch2", "t1": [3], "t2": [3], "t12": [9]}
//! {"kind": "bloch3", "t1": [3], "t2": [3], "t3": [3],
//!  "t12": [9], "t13": [9], "t23": [9], "t123": [27]}
//! ```
//!
//! Matrices are row-major (`t12[3*i + j]`), `t123[9*i + 3*j + k]`. Files with
//! `"kind": "witness"` hold ground-truth unitaries written by `gen` and are not
//! states.

use std::path::Path;

use luinv_core::bloch::{from_bloch2, from_bloch3, to_bloch2, to_bloch3};
use luinv_core::{BlochTensor2, BlochTensor3, CMat2, DensityMatrix, LuError, RMat3, RVec3, Tensor3, C64};
use luinv_core::nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateFile {
    Density { dim: usize, re: Vec<Vec<f64>>, im: Vec<Vec<f64>> },
    Bloch2 { t1: [f64; 3], t2: [f64; 3], t12: [f64; 9] },
    Bloch3 {
        t1: [f64; 3],
        t2: [f64; 3],
        t3: [f64; 3],
        t12: [f64; 9],
        t13: [f64; 9],
        t23: [f64; 9],
        t123: Vec<f64>,
    },
    Witness { unitaries: Vec<ComplexMatrix>, rotations: Vec<[f64; 9]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl ComplexMatrix {
    pub fn from_cmat2(u: &CMat2) -> Self {
        let plane = |f: fn(&C64) -> f64| (0..2).map(|i| (0..2).map(|j| f(&u[(i, j)])).collect()).collect();
        Self { re: plane(|c| c.re), im: plane(|c| c.im) }
    }
}

/// A validated state with both representations.
#[derive(Debug, Clone)]
pub enum State {
    Two { bloch: BlochTensor2, rho: DensityMatrix },
    Three { bloch: BlochTensor3, rho: DensityMatrix },
}

impl State {
    pub fn qubits(&self) -> usize {
        match self {
            State::Two { .. } => 2,
            State::Three { .. } => 3,
        }
    }
}

fn vec3(v: &[f64; 3]) -> RVec3 {
    RVec3::from_column_slice(v)
}

fn mat3(v: &[f64; 9]) -> RMat3 {
    RMat3::from_row_slice(v)
}

fn flat(m: &RMat3) -> [f64; 9] {
    std::array::from_fn(|k| m[(k / 3, k % 3)])
}

fn invalid(e: LuError) -> CliError {
    CliError::InvalidState(e.to_string())
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let n = m.nrows();
        let plane = |f: fn(&C64) -> f64| (0..n).map(|i| (0..n).map(|j| f(&m[(i, j)])).collect()).collect();
        StateFile::Density { dim: n, re: plane(|c| c.re), im: plane(|c| c.im) }
    }

    pub fn from_bloch2(b: &BlochTensor2) -> Self {
        StateFile::Bloch2 { t1: b.t1.into(), t2: b.t2.into(), t12: flat(&b.t12) }
    }

    pub fn is_state(&self) -> bool {
        !matches!(self, StateFile::Witness { .. })
    }

    /// Validates and converts; shape problems are parse errors, physical
    /// violations are invalid-state errors.
    pub fn into_state(self) -> Result<State, CliError> {
        match self {
            StateFile::Density { dim, re, im } => {
                if dim != 4 && dim != 8 {
                    return Err(CliError::Parse(format!("dim must be 4 or 8, got {dim}")));
                }
                let square = |p: &Vec<Vec<f64>>| p.len() == dim && p.iter().all(|r| r.len() == dim);
                if !square(&re) || !square(&im) {
                    return Err(CliError::Parse(format!("re and im must be {dim}x{dim}")));
                }
                let m = DMatrix::from_fn(dim, dim, |i, j| C64::new(re[i][j], im[i][j]));
                let rho = DensityMatrix::new(m).map_err(invalid)?;
                if dim == 4 {
                    Ok(State::Two { bloch: to_bloch2(&rho).map_err(invalid)?, rho })
                } else {
                    Ok(State::Three { bloch: to_bloch3(&rho).map_err(invalid)?, rho })
                }
            }
            StateFile::Bloch2 { t1, t2, t12 } => {
                let bloch = BlochTensor2 { t1: vec3(&t1), t2: vec3(&t2), t12: mat3(&t12) };
                let rho = from_bloch2(&bloch).map_err(invalid)?;
                Ok(State::Two { bloch, rho })
            }
            StateFile::Bloch3 { t1, t2, t3, t12, t13, t23, t123 } => {
                let t123: [f64; 27] = t123
                    .try_into()
                    .map_err(|v: Vec<f64>| CliError::Parse(format!("t123 needs 27 entries, got {}", v.len())))?;
                let bloch = BlochTensor3 {
                    t1: vec3(&t1),
                    t2: vec3(&t2),
                    t3: vec3(&t3),
                    t12: mat3(&t12),
                    t13: mat3(&t13),
                    t23: mat3(&t23),
                    t123: Tensor3(t123),
                };
                let rho = from_bloch3(&bloch).map_err(invalid)?;
                Ok(State::Three { bloch, rho })
            }
            StateFile::Witness { .. } => Err(CliError::Parse("file holds a witness, not a state".into())),
        }
    }
}

pub fn read(path: &Path) -> Result<StateFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn load(path: &Path) -> Result<State, CliError> {
    read(path)?.into_state()
}

pub fn write(path: &Path, file: &StateFile) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(file).expect("state files serialize");
    std::fs::write(path, text + "\n").map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
