//! Three-qubit LU equivalence for states where at least two vector families
//! span three dimensions, and the eigenvalue-based LPS applicability test.

use crate::bloch::{to_bloch3, unfold3, BlochTensor3, DensityMatrix};
use crate::equivalence2::{align_gram, check_states, LocalUnitaryWitness, Route, Verdict};
use crate::error::LuError;
use crate::families::{build_families3, VectorFamily};
use crate::invariants::{fingerprint3_from, fingerprints_equal, Fingerprint};
use crate::linalg::{kron3, sym_eigen3, RMat3, RVec3};
use crate::pauli::so3_to_su2;

/// Default threshold on `|det ΛᵢΘᵢ|` in [`lps_check`].
pub const DEFAULT_LPS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LpsRecord {
    /// Eigenvalues of `𝒯ᵢ`, descending, per qubit.
    pub eigenvalues: [[f64; 3]; 3],
    /// Entries of `PᵢTᵢ` in the eigenbasis of `𝒯ᵢ`.
    pub rotated_means: [[f64; 3]; 3],
    pub det_lambda_theta: [f64; 3],
    pub applicable: bool,
}

pub fn lps_check(b: &BlochTensor3, tol: f64) -> LpsRecord {
    let u = unfold3(b);
    let cal = [u.cal_t1, u.cal_t2, u.cal_t3];
    let locals = [b.t1, b.t2, b.t3];
    let mut eigenvalues = [[0.0; 3]; 3];
    let mut rotated_means = [[0.0; 3]; 3];
    let mut det_lambda_theta = [0.0; 3];
    for i in 0..3 {
        let (t, vecs) = sym_eigen3(&cal[i]);
        let a = vecs.transpose() * locals[i];
        eigenvalues[i] = t;
        rotated_means[i] = [a[0], a[1], a[2]];
        det_lambda_theta[i] = (t[1] - t[0]) * (t[2] - t[0]) * (t[2] - t[1]) * a[0] * a[1] * a[2];
    }
    LpsRecord { eigenvalues, rotated_means, det_lambda_theta, applicable: det_lambda_theta.iter().all(|d| d.abs() > tol) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverageRecord {
    pub dims: [usize; 3],
    pub families_applicable: bool,
    pub lps_applicable: bool,
}

/// Whether the family criterion (two full families) and the LPS criterion
/// apply to `b`.
pub fn coverage_compare(b: &BlochTensor3, depth: usize) -> CoverageRecord {
    let fams = build_families3(b, depth);
    let dims = [fams[0].dim, fams[1].dim, fams[2].dim];
    CoverageRecord {
        dims,
        families_applicable: dims.iter().filter(|&&d| d == 3).count() >= 2,
        lps_applicable: lps_check(b, DEFAULT_LPS_TOL).applicable,
    }
}

/// Deviations of the seven Bloch-level relations under `(o1, o2, o3)`, in the
/// order `T1, T2, T3, T12, T13, T23, T123`.
pub fn relation_residuals3(a: &BlochTensor3, b: &BlochTensor3, o: &[RMat3; 3]) -> [f64; 7] {
    let r = a.rotated(&o[0], &o[1], &o[2]);
    let t123 = b.t123.0.iter().zip(r.t123.0.iter()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    [
        (b.t1 - r.t1).norm(),
        (b.t2 - r.t2).norm(),
        (b.t3 - r.t3).norm(),
        (b.t12 - r.t12).norm(),
        (b.t13 - r.t13).norm(),
        (b.t23 - r.t23).norm(),
        t123,
    ]
}

fn bloch3_distance(res: &[f64; 7]) -> f64 {
    (res.iter().map(|x| x * x).sum::<f64>() / 8.0).sqrt()
}

/// Rotation of a family that does not span three dimensions, pinned by the
/// pairwise and three-body correlations against the two known rotations.
fn derive_rotation(which: usize, a: &BlochTensor3, b: &BlochTensor3, fa: &VectorFamily, fb: &VectorFamily, known: &[Option<RMat3>; 3]) -> Option<RMat3> {
    let ua = unfold3(a);
    let ub = unfold3(b);
    let e = |k: usize| RVec3::ith(k, 1.0);
    let mut xs: Vec<RVec3> = Vec::new();
    let mut ys: Vec<RVec3> = Vec::new();
    // o_which · (m_a · o_jᵗ) = m_b, applied to basis vectors: o_which m_a e_k = m_b o_j e_k
    let mut push = |m_a: RMat3, m_b: RMat3, o_j: &RMat3| {
        for k in 0..3 {
            xs.push(m_a * e(k));
            ys.push(m_b * (o_j * e(k)));
        }
    };
    let (o1, o2, o3) = (known[0], known[1], known[2]);
    let (unf_a, unf_b, kron) = match which {
        0 => {
            let (o2, o3) = (o2?, o3?);
            push(a.t12, b.t12, &o2);
            push(a.t13, b.t13, &o3);
            (ua.t1_23, ub.t1_23, kron3(&o2, &o3))
        }
        1 => {
            let (o1, o3) = (o1?, o3?);
            push(a.t12.transpose(), b.t12.transpose(), &o1);
            push(a.t23, b.t23, &o3);
            (ua.t2_13, ub.t2_13, kron3(&o1, &o3))
        }
        _ => {
            let (o1, o2) = (o1?, o2?);
            push(a.t13.transpose(), b.t13.transpose(), &o1);
            push(a.t23.transpose(), b.t23.transpose(), &o2);
            (ua.t3_12, ub.t3_12, kron3(&o1, &o2))
        }
    };
    for m in 0..9 {
        xs.push(unf_a.column(m).into_owned());
        ys.push(unf_b * kron.column(m));
    }
    xs.extend(fa.vectors());
    ys.extend(fb.vectors());
    align_gram(&xs, &ys, true)
}

fn identity_witness(n: usize) -> LocalUnitaryWitness {
    let id = RMat3::identity();
    LocalUnitaryWitness {
        rotations: vec![id; n],
        unitaries: vec![so3_to_su2(&id).expect("identity lifts"); n],
        residual: 0.0,
        route: Route::Identical,
    }
}

/// Decides LU equivalence of three-qubit Bloch data.
///
/// Unequal fingerprints give `NotEquivalent`. Equal fingerprints give
/// `Equivalent` with a verified witness when at least two families span three
/// dimensions, and `Inconclusive` otherwise.
pub fn decide3(a: &BlochTensor3, b: &BlochTensor3, depth: usize, tol: f64) -> Result<Verdict, LuError> {
    if !(tol > 0.0) {
        return Err(LuError::InvalidTolerance(tol));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(LuError::NonFinite);
    }
    if a == b {
        return Ok(Verdict::Equivalent(identity_witness(3)));
    }
    let fa = build_families3(a, depth);
    let fb = build_families3(b, depth);
    let pa = fingerprint3_from(a, &fa, depth);
    let pb = fingerprint3_from(b, &fb, depth);
    if let Some(cert) = fingerprints_equal(&Fingerprint::Three(pa.clone()), &Fingerprint::Three(pb), tol)? {
        return Ok(Verdict::NotEquivalent(cert));
    }
    let anchors = pa.dims.map(|d| d == 3);
    if anchors.iter().filter(|&&x| x).count() < 2 {
        return Ok(Verdict::Inconclusive(format!(
            "invariants agree but family dimensions {:?} leave fewer than two full families",
            pa.dims
        )));
    }
    let mut known: [Option<RMat3>; 3] = [None; 3];
    for i in 0..3 {
        if anchors[i] {
            match align_gram(&fa[i].vectors(), &fb[i].vectors(), true) {
                Some(o) => known[i] = Some(o),
                None => return Ok(Verdict::Inconclusive(format!("invariants agree but family {} does not align", i + 1))),
            }
        }
    }
    for i in 0..3 {
        if known[i].is_none() {
            match derive_rotation(i, a, b, &fa[i], &fb[i], &known) {
                Some(o) => known[i] = Some(o),
                None => return Ok(Verdict::Inconclusive(format!("invariants agree but rotation {} is not pinned", i + 1))),
            }
        }
    }
    let o = known.map(|x| x.expect("all rotations set"));
    let res = relation_residuals3(a, b, &o);
    let worst = res.iter().copied().fold(0.0, f64::max);
    if worst > 10.0 * tol {
        return Ok(Verdict::Inconclusive(format!("invariants agree but witness misses by {worst:.3e}")));
    }
    let unitaries = match o.iter().map(so3_to_su2).collect::<Result<Vec<_>, _>>() {
        Ok(u) => u,
        Err(e) => return Ok(Verdict::Inconclusive(format!("rotation lift failed: {e}"))),
    };
    Ok(Verdict::Equivalent(LocalUnitaryWitness {
        rotations: o.to_vec(),
        unitaries,
        residual: bloch3_distance(&res),
        route: Route::Families { anchors },
    }))
}

pub fn decide3_states(a: &DensityMatrix, b: &DensityMatrix, depth: usize, tol: f64) -> Result<Verdict, LuError> {
    if a.qubits() != 3 || b.qubits() != 3 {
        return Err(LuError::WrongDimension { expected: 8, rows: a.dim().max(b.dim()), cols: a.dim().max(b.dim()) });
    }
    let verdict = decide3(&to_bloch3(a)?, &to_bloch3(b)?, depth, tol)?;
    Ok(check_states(verdict, a, b))
}
