//! Density matrices and their Bloch (Pauli-basis) coefficients.
//!
//! Qubit 1 is the leftmost tensor factor. Coefficients are
//! `T1[i] = tr(ρ σᵢ⊗I)`, `T12[(i, j)] = tr(ρ σᵢ⊗σⱼ)` and so on, with
//! σ₁, σ₂, σ₃ the x, y, z Pauli matrices.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SMatrix};

use crate::error::LuError;
use crate::linalg::{kron3, RMat3, RVec3};
use crate::pauli::{pauli_or_identity, CMat2, C64};

/// 3×9 unfolding of a 3×3×3 tensor.
pub type Mat3x9 = SMatrix<f64, 3, 9>;
/// 9×9 Gram matrix of an unfolding.
pub type Mat9 = SMatrix<f64, 9, 9>;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = 1e-10;

/// A validated density matrix on two or three qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (all to 1e-10).
    pub fn new(m: DMatrix<C64>) -> Result<Self, LuError> {
        let (rows, cols) = m.shape();
        if rows != cols || (rows != 4 && rows != 8) {
            return Err(LuError::WrongDimension { expected: if rows > 6 { 8 } else { 4 }, rows, cols });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LuError::NonFinite);
        }
        let herm = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > HERMITIAN_TOL {
            return Err(LuError::NotHermitian(herm));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(LuError::BadTrace(tr.re));
        }
        let lmin = min_eigenvalue(&m);
        if lmin < -POSITIVITY_TOL {
            return Err(LuError::NotPositive(lmin));
        }
        Ok(Self { m })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn qubits(&self) -> usize {
        if self.dim() == 4 {
            2
        } else {
            3
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    /// `U ρ U†` for a unitary `u` of matching size.
    pub fn conjugated(&self, u: &DMatrix<C64>) -> DensityMatrix {
        let m = u * &self.m * u.adjoint();
        // restore exact Hermiticity lost to rounding
        let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        DensityMatrix { m }
    }

    /// Conjugation by a product of single-qubit unitaries, qubit 1 leftmost.
    pub fn apply_local(&self, us: &[CMat2]) -> DensityMatrix {
        assert_eq!(1usize << us.len(), self.dim(), "one unitary per qubit");
        self.conjugated(&kron_all(us))
    }

    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = nalgebra::SymmetricEigen::new(self.m.clone()).eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        v
    }

    pub fn frobenius_distance(&self, other: &DensityMatrix) -> f64 {
        (&self.m - &other.m).norm()
    }
}

/// Smallest eigenvalue of a (Hermitian part of a) complex matrix.
pub fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    nalgebra::SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Kronecker product of single-qubit matrices, first factor leftmost.
pub fn kron_all(us: &[CMat2]) -> DMatrix<C64> {
    us.iter().fold(DMatrix::from_element(1, 1, C64::new(1.0, 0.0)), |acc, u| {
        let u = DMatrix::from_iterator(2, 2, u.iter().copied());
        acc.kronecker(&u)
    })
}

/// Pauli words for `n` qubits, indexed by base-4 digits (0 = identity),
/// most significant digit = qubit 1.
fn pauli_words(n: usize) -> &'static [DMatrix<C64>] {
    static TWO: OnceLock<Vec<DMatrix<C64>>> = OnceLock::new();
    static THREE: OnceLock<Vec<DMatrix<C64>>> = OnceLock::new();
    let cell = match n {
        2 => &TWO,
        3 => &THREE,
        _ => unreachable!("only 2 and 3 qubits are supported"),
    };
    cell.get_or_init(|| {
        (0..4usize.pow(n as u32))
            .map(|w| {
                let factors: Vec<CMat2> = (0..n).map(|q| pauli_or_identity((w >> (2 * (n - 1 - q))) & 3)).collect();
                kron_all(&factors)
            })
            .collect()
    })
}

fn expectation(m: &DMatrix<C64>, word: &DMatrix<C64>) -> f64 {
    // tr(ρW) = Σ ρ_ab W_ba
    let n = m.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            let w = word[(b, a)];
            if w.re != 0.0 || w.im != 0.0 {
                acc += m[(a, b)] * w;
            }
        }
    }
    acc.re
}

/// Bloch data of a two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochTensor2 {
    pub t1: RVec3,
    pub t2: RVec3,
    pub t12: RMat3,
}

impl BlochTensor2 {
    pub fn zero() -> Self {
        Self { t1: RVec3::zeros(), t2: RVec3::zeros(), t12: RMat3::zeros() }
    }

    /// Action of local rotations: `(O₁T₁, O₂T₂, O₁T₁₂O₂ᵗ)`.
    pub fn rotated(&self, o1: &RMat3, o2: &RMat3) -> Self {
        Self { t1: o1 * self.t1, t2: o2 * self.t2, t12: o1 * self.t12 * o2.transpose() }
    }

    /// Multiplies every coefficient by `p`, i.e. mixes with `I/4` at weight `1 − p`.
    pub fn scaled(&self, p: f64) -> Self {
        Self { t1: self.t1 * p, t2: self.t2 * p, t12: self.t12 * p }
    }

    pub fn is_finite(&self) -> bool {
        self.t1.iter().chain(self.t2.iter()).chain(self.t12.iter()).all(|x| x.is_finite())
    }

    /// The Hermitian unit-trace matrix of the Pauli expansion, without any
    /// positivity check.
    pub fn to_matrix(&self) -> DMatrix<C64> {
        let words = pauli_words(2);
        let mut m = words[0].clone();
        for i in 0..3 {
            m += &words[(i + 1) * 4] * C64::from(self.t1[i]);
            m += &words[i + 1] * C64::from(self.t2[i]);
            for j in 0..3 {
                m += &words[(i + 1) * 4 + j + 1] * C64::from(self.t12[(i, j)]);
            }
        }
        m * C64::new(0.25, 0.0)
    }
}

/// A 3×3×3 real tensor, `t[(i, j, k)]`, stored with `k` fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor3(pub [f64; 27]);

impl Tensor3 {
    pub fn zero() -> Self {
        Self([0.0; 27])
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.0[9 * i + 3 * j + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        self.0[9 * i + 3 * j + k] = v;
    }

    /// `(O₁⊗O₂⊗O₃)·T`.
    pub fn rotated(&self, o1: &RMat3, o2: &RMat3, o3: &RMat3) -> Self {
        let unfolded = unfold_1_23(self);
        let out = o1 * unfolded * kron3(o2, o3).transpose();
        fold_1_23(&out)
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }
}

impl std::ops::Mul<f64> for Tensor3 {
    type Output = Tensor3;
    fn mul(self, p: f64) -> Tensor3 {
        Tensor3(self.0.map(|x| x * p))
    }
}

/// Bloch data of a three-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochTensor3 {
    pub t1: RVec3,
    pub t2: RVec3,
    pub t3: RVec3,
    pub t12: RMat3,
    pub t13: RMat3,
    pub t23: RMat3,
    pub t123: Tensor3,
}

impl BlochTensor3 {
    pub fn zero() -> Self {
        Self {
            t1: RVec3::zeros(),
            t2: RVec3::zeros(),
            t3: RVec3::zeros(),
            t12: RMat3::zeros(),
            t13: RMat3::zeros(),
            t23: RMat3::zeros(),
            t123: Tensor3::zero(),
        }
    }

    pub fn rotated(&self, o1: &RMat3, o2: &RMat3, o3: &RMat3) -> Self {
        Self {
            t1: o1 * self.t1,
            t2: o2 * self.t2,
            t3: o3 * self.t3,
            t12: o1 * self.t12 * o2.transpose(),
            t13: o1 * self.t13 * o3.transpose(),
            t23: o2 * self.t23 * o3.transpose(),
            t123: self.t123.rotated(o1, o2, o3),
        }
    }

    pub fn scaled(&self, p: f64) -> Self {
        Self {
            t1: self.t1 * p,
            t2: self.t2 * p,
            t3: self.t3 * p,
            t12: self.t12 * p,
            t13: self.t13 * p,
            t23: self.t23 * p,
            t123: self.t123 * p,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t1
            .iter()
            .chain(self.t2.iter())
            .chain(self.t3.iter())
            .chain(self.t12.iter())
            .chain(self.t13.iter())
            .chain(self.t23.iter())
            .chain(self.t123.0.iter())
            .all(|x| x.is_finite())
    }

    /// Coefficient of the Pauli word `(a, b, c)` with 0 = identity.
    fn coefficient(&self, a: usize, b: usize, c: usize) -> f64 {
        match (a, b, c) {
            (0, 0, 0) => 1.0,
            (i, 0, 0) => self.t1[i - 1],
            (0, j, 0) => self.t2[j - 1],
            (0, 0, k) => self.t3[k - 1],
            (i, j, 0) => self.t12[(i - 1, j - 1)],
            (i, 0, k) => self.t13[(i - 1, k - 1)],
            (0, j, k) => self.t23[(j - 1, k - 1)],
            (i, j, k) => self.t123.get(i - 1, j - 1, k - 1),
        }
    }

    pub fn to_matrix(&self) -> DMatrix<C64> {
        let words = pauli_words(3);
        let mut m = DMatrix::zeros(8, 8);
        for (w, word) in words.iter().enumerate() {
            let coeff = self.coefficient(w >> 4, (w >> 2) & 3, w & 3);
            if coeff != 0.0 {
                m += word * C64::from(coeff);
            }
        }
        m * C64::new(0.125, 0.0)
    }
}

fn require_dim(rho: &DensityMatrix, dim: usize) -> Result<(), LuError> {
    if rho.dim() != dim {
        return Err(LuError::WrongDimension { expected: dim, rows: rho.dim(), cols: rho.dim() });
    }
    Ok(())
}

pub fn to_bloch2(rho: &DensityMatrix) -> Result<BlochTensor2, LuError> {
    require_dim(rho, 4)?;
    let words = pauli_words(2);
    let m = rho.matrix();
    let mut b = BlochTensor2::zero();
    for i in 0..3 {
        b.t1[i] = expectation(m, &words[(i + 1) * 4]);
        b.t2[i] = expectation(m, &words[i + 1]);
        for j in 0..3 {
            b.t12[(i, j)] = expectation(m, &words[(i + 1) * 4 + j + 1]);
        }
    }
    Ok(b)
}

/// Reconstructs the density matrix; fails with [`LuError::NonPhysical`] when
/// the expansion has an eigenvalue below −1e-10.
pub fn from_bloch2(b: &BlochTensor2) -> Result<DensityMatrix, LuError> {
    if !b.is_finite() {
        return Err(LuError::NonFinite);
    }
    physical(b.to_matrix())
}

pub fn to_bloch3(rho: &DensityMatrix) -> Result<BlochTensor3, LuError> {
    require_dim(rho, 8)?;
    let words = pauli_words(3);
    let m = rho.matrix();
    let mut b = BlochTensor3::zero();
    for (w, word) in words.iter().enumerate().skip(1) {
        let (a, bb, c) = (w >> 4, (w >> 2) & 3, w & 3);
        let v = expectation(m, word);
        match (a, bb, c) {
            (i, 0, 0) => b.t1[i - 1] = v,
            (0, j, 0) => b.t2[j - 1] = v,
            (0, 0, k) => b.t3[k - 1] = v,
            (i, j, 0) => b.t12[(i - 1, j - 1)] = v,
            (i, 0, k) => b.t13[(i - 1, k - 1)] = v,
            (0, j, k) => b.t23[(j - 1, k - 1)] = v,
            (i, j, k) => b.t123.set(i - 1, j - 1, k - 1, v),
        }
    }
    Ok(b)
}

pub fn from_bloch3(b: &BlochTensor3) -> Result<DensityMatrix, LuError> {
    if !b.is_finite() {
        return Err(LuError::NonFinite);
    }
    physical(b.to_matrix())
}

fn physical(m: DMatrix<C64>) -> Result<DensityMatrix, LuError> {
    let lmin = min_eigenvalue(&m);
    if lmin < -POSITIVITY_TOL {
        return Err(LuError::NonPhysical { min_eigenvalue: lmin });
    }
    Ok(DensityMatrix { m })
}

/// Unfoldings and Gram matrices of the three-body correlation tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Unfoldings3 {
    pub t1_23: Mat3x9,
    pub t2_13: Mat3x9,
    pub t3_12: Mat3x9,
    pub cal_t1: RMat3,
    pub cal_t2: RMat3,
    pub cal_t3: RMat3,
    pub cal_t23: Mat9,
    pub cal_t13: Mat9,
    pub cal_t12: Mat9,
}

/// Row i, column 3j + k.
pub fn unfold_1_23(t: &Tensor3) -> Mat3x9 {
    Mat3x9::from_fn(|i, col| t.get(i, col / 3, col % 3))
}

/// Row j, column 3i + k.
pub fn unfold_2_13(t: &Tensor3) -> Mat3x9 {
    Mat3x9::from_fn(|j, col| t.get(col / 3, j, col % 3))
}

/// Row k, column 3i + j.
pub fn unfold_3_12(t: &Tensor3) -> Mat3x9 {
    Mat3x9::from_fn(|k, col| t.get(col / 3, col % 3, k))
}

fn fold_1_23(m: &Mat3x9) -> Tensor3 {
    let mut t = Tensor3::zero();
    for i in 0..3 {
        for col in 0..9 {
            t.set(i, col / 3, col % 3, m[(i, col)]);
        }
    }
    t
}

pub fn unfold3(b: &BlochTensor3) -> Unfoldings3 {
    let t1_23 = unfold_1_23(&b.t123);
    let t2_13 = unfold_2_13(&b.t123);
    let t3_12 = unfold_3_12(&b.t123);
    Unfoldings3 {
        cal_t1: t1_23 * t1_23.transpose(),
        cal_t2: t2_13 * t2_13.transpose(),
        cal_t3: t3_12 * t3_12.transpose(),
        cal_t23: t1_23.transpose() * t1_23,
        cal_t13: t2_13.transpose() * t2_13,
        cal_t12: t3_12.transpose() * t3_12,
        t1_23,
        t2_13,
        t3_12,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pure(amps: &[C64]) -> DensityMatrix {
        let v = nalgebra::DVector::from_column_slice(amps);
        DensityMatrix::new(&v * v.adjoint()).unwrap()
    }

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn maximally_mixed_has_zero_tensors() {
        let rho = DensityMatrix::new(DMatrix::identity(4, 4) * c(0.25)).unwrap();
        assert_eq!(to_bloch2(&rho).unwrap(), BlochTensor2::zero());
        let rho = DensityMatrix::new(DMatrix::identity(8, 8) * c(0.125)).unwrap();
        assert_eq!(to_bloch3(&rho).unwrap(), BlochTensor3::zero());
    }

    #[test]
    fn bell_state_tensors() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rho = pure(&[c(s), c(0.0), c(0.0), c(s)]);
        let b = to_bloch2(&rho).unwrap();
        assert!(b.t1.norm() < 1e-15 && b.t2.norm() < 1e-15);
        assert!((b.t12 - RMat3::from_diagonal(&RVec3::new(1.0, -1.0, 1.0))).norm() < 1e-15);
        let back = from_bloch2(&b).unwrap();
        assert!(back.frobenius_distance(&rho) < 1e-15);
    }

    #[test]
    fn product_zero_state() {
        let rho = pure(&[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let b = to_bloch2(&rho).unwrap();
        assert_eq!(b.t1, RVec3::z());
        assert_eq!(b.t2, RVec3::z());
        assert_eq!(b.t12, RVec3::z() * RVec3::z().transpose());
    }

    #[test]
    fn from_bloch_flags_nonphysical() {
        let b = BlochTensor2 { t1: RVec3::new(2.0, 0.0, 0.0), ..BlochTensor2::zero() };
        assert!(matches!(from_bloch2(&b), Err(LuError::NonPhysical { .. })));
        let zero = from_bloch2(&BlochTensor2::zero()).unwrap();
        assert!((zero.matrix() - DMatrix::identity(4, 4) * c(0.25)).norm() < 1e-15);
    }

    #[test]
    fn ghz_tensors() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0); 8];
        amps[0] = c(s);
        amps[7] = c(s);
        let b = to_bloch3(&pure(&amps)).unwrap();
        assert!(b.t1.norm() + b.t2.norm() + b.t3.norm() < 1e-15);
        let zz = RMat3::from_diagonal(&RVec3::new(0.0, 0.0, 1.0));
        for m in [b.t12, b.t13, b.t23] {
            assert!((m - zz).norm() < 1e-15);
        }
        let mut expected = Tensor3::zero();
        expected.set(0, 0, 0, 1.0);
        expected.set(0, 1, 1, -1.0);
        expected.set(1, 0, 1, -1.0);
        expected.set(1, 1, 0, -1.0);
        for (x, y) in b.t123.0.iter().zip(expected.0.iter()) {
            assert!((x - y).abs() < 1e-15);
        }
        let u = unfold3(&b);
        assert!((u.cal_t1.trace() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn product_zero_state_three_qubits() {
        let mut amps = vec![c(0.0); 8];
        amps[0] = c(1.0);
        let b = to_bloch3(&pure(&amps)).unwrap();
        for v in [b.t1, b.t2, b.t3] {
            assert_eq!(v, RVec3::z());
        }
        let mut expected = Tensor3::zero();
        expected.set(2, 2, 2, 1.0);
        assert_eq!(b.t123, expected);
    }

    #[test]
    fn unfolding_layout() {
        let mut t = Tensor3::zero();
        t.set(0, 1, 2, 1.0); // t_{123}
        let b = BlochTensor3 { t123: t, ..BlochTensor3::zero() };
        let u = unfold3(&b);
        // row 1, column 6 in one-based terms
        assert_eq!(u.t1_23[(0, 5)], 1.0);
        assert_eq!(u.t1_23.iter().filter(|&&x| x != 0.0).count(), 1);
        // T_{2|13}: row j=2, column (i,k)=(1,3) -> 3
        assert_eq!(u.t2_13[(1, 2)], 1.0);
        // T_{3|12}: row k=3, column (i,j)=(1,2) -> 2
        assert_eq!(u.t3_12[(2, 1)], 1.0);
        assert_eq!(unfold3(&BlochTensor3::zero()).t1_23, Mat3x9::zeros());
    }

    #[test]
    fn rejects_invalid_density() {
        let mut m = DMatrix::identity(4, 4) * c(0.25);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(LuError::NotHermitian(_))));
        assert!(matches!(DensityMatrix::new(DMatrix::identity(4, 4) * c(0.3)), Err(LuError::BadTrace(_))));
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.5), c(-0.5), c(0.0), c(0.0)]));
        assert!(matches!(DensityMatrix::new(m), Err(LuError::NotPositive(_))));
        assert!(matches!(DensityMatrix::new(DMatrix::identity(2, 2) * c(0.5)), Err(LuError::WrongDimension { .. })));
        let rho = DensityMatrix::new(DMatrix::identity(8, 8) * c(0.125)).unwrap();
        assert!(to_bloch2(&rho).is_err());
    }
}
