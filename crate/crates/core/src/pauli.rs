//! Pauli matrices and the SU(2) → SO(3) double cover.
//!
//! Rotations use the column convention `U σ_k U† = Σ_l R[l][k] σ_l`, so a
//! Bloch vector transforms as `T ↦ R·T` under `ρ ↦ UρU†` and the map is a
//! group homomorphism `R(UV) = R(U)·R(V)`.

use nalgebra::{Complex, Matrix2, Quaternion, Rotation3, UnitQuaternion};

use crate::error::LuError;
use crate::linalg::{is_rotation, RMat3};

pub type C64 = Complex<f64>;
/// 2×2 complex matrix (single-qubit unitaries).
pub type CMat2 = Matrix2<C64>;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// σ₁, σ₂, σ₃ (x, y, z).
pub fn sigma(k: usize) -> CMat2 {
    match k {
        0 => CMat2::new(ZERO, ONE, ONE, ZERO),
        1 => CMat2::new(ZERO, -I, I, ZERO),
        2 => CMat2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index out of range: {k}"),
    }
}

/// Identity for index 0, σ_{k} for index k = 1..3.
pub fn pauli_or_identity(k: usize) -> CMat2 {
    if k == 0 {
        CMat2::identity()
    } else {
        sigma(k - 1)
    }
}

pub fn is_special_unitary(u: &CMat2, tol: f64) -> bool {
    (u.adjoint() * u - CMat2::identity()).norm() <= tol && (u.determinant() - ONE).norm() <= tol
}

/// Rotation `R` with `R[l][k] = ½ tr(σ_l U σ_k U†)`.
pub fn su2_to_so3(u: &CMat2) -> Result<RMat3, LuError> {
    if !is_special_unitary(u, 1e-10) {
        return Err(LuError::NotSpecialUnitary);
    }
    Ok(su2_to_so3_unchecked(u))
}

pub(crate) fn su2_to_so3_unchecked(u: &CMat2) -> RMat3 {
    let ud = u.adjoint();
    let mut r = RMat3::zeros();
    for k in 0..3 {
        let conj = u * sigma(k) * ud;
        for l in 0..3 {
            r[(l, k)] = 0.5 * (sigma(l) * conj).trace().re;
        }
    }
    r
}

/// The SU(2) preimage of a rotation, with the sign fixed so that the first
/// non-negligible quaternion component `(w, x, y, z)` is positive.
///
/// A rotation by `θ` about unit axis `n` lifts to
/// `U = cos(θ/2)·I − i·sin(θ/2)·(n·σ)`.
pub fn so3_to_su2(o: &RMat3) -> Result<CMat2, LuError> {
    if !is_rotation(o, 1e-8) {
        return Err(LuError::NotRotation);
    }
    let q = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(*o));
    let mut c = [q.w, q.i, q.j, q.k];
    if let Some(first) = c.iter().copied().find(|x| x.abs() > 1e-12) {
        if first < 0.0 {
            for x in c.iter_mut() {
                *x = -*x;
            }
        }
    }
    Ok(quaternion_to_su2(&Quaternion::new(c[0], c[1], c[2], c[3])))
}

/// `U = w·I − i(x σ₁ + y σ₂ + z σ₃)` for a unit quaternion.
pub fn quaternion_to_su2(q: &Quaternion<f64>) -> CMat2 {
    let (w, x, y, z) = (q.w, q.i, q.j, q.k);
    CMat2::new(
        C64::new(w, -z),
        C64::new(-y, -x),
        C64::new(y, -x),
        C64::new(w, z),
    )
}

/// Checks `U σ_k U† = Σ_l R[l][k] σ_l` for k = 1..3, returning the largest
/// Frobenius deviation.
pub fn conjugation_residual(u: &CMat2, r: &RMat3) -> f64 {
    let ud = u.adjoint();
    (0..3)
        .map(|k| {
            let lhs = u * sigma(k) * ud;
            let rhs = (0..3).fold(CMat2::zeros(), |acc, l| acc + sigma(l) * C64::from(r[(l, k)]));
            (lhs - rhs).norm()
        })
        .fold(0.0, f64::max)
}
