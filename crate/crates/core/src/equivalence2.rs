//! Two-qubit LU equivalence: invariant comparison followed by explicit
//! witness construction and verification.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::bloch::{to_bloch2, BlochTensor2, DensityMatrix};
use crate::error::LuError;
use crate::families::{build_families2, VectorFamily};
use crate::invariants::{fingerprint2, fingerprints_equal, Certificate, Fingerprint, Fingerprint2};
use crate::linalg::{max_residual, procrustes, svd3, RMat3, RVec3};
use crate::pauli::{so3_to_su2, CMat2};

/// Singular values closer than this (relative to `max(1, t₁)`) are one block.
pub const DEGENERACY_TOL: f64 = 1e-7;
/// Singular values at or below this are treated as zero.
pub const ZERO_SINGULAR_TOL: f64 = 1e-7;
/// Bound on `‖ρ̂ − UρU†‖_F` when density matrices are supplied.
pub const STATE_RESIDUAL_TOL: f64 = 1e-8;

const ALIGN_TOL: f64 = 1e-8;

/// How a witness was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// The inputs were bitwise identical.
    Identical,
    /// Rotations aligned from vector families; `anchors[i]` is set when the
    /// family of qubit `i + 1` spans three dimensions.
    Families { anchors: [bool; 3] },
    /// Two-qubit route through the singular frames of `T12`.
    SingularFrame(DegeneracyCase),
}

/// Degeneracy pattern of the singular values `t₁ ≥ t₂ ≥ t₃` of `T12`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DegeneracyCase {
    /// All distinct and nonzero.
    Distinct,
    /// All distinct, `t₃ = 0`.
    DistinctWithZero,
    /// Exactly two equal (possibly both zero).
    Pair,
    /// All equal and nonzero.
    Scalar,
    /// `T12 = 0`.
    Zero,
}

impl fmt::Display for DegeneracyCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DegeneracyCase::Distinct => "distinct",
            DegeneracyCase::DistinctWithZero => "distinct-with-zero",
            DegeneracyCase::Pair => "pair",
            DegeneracyCase::Scalar => "scalar",
            DegeneracyCase::Zero => "zero",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitaryWitness {
    /// One SO(3) rotation per qubit.
    pub rotations: Vec<RMat3>,
    /// SU(2) lifts of `rotations`.
    pub unitaries: Vec<CMat2>,
    /// Frobenius distance between the target and the transformed source.
    pub residual: f64,
    pub route: Route,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    Equivalent,
    NotEquivalent,
    Inconclusive,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::Equivalent => "Equivalent",
            VerdictKind::NotEquivalent => "NotEquivalent",
            VerdictKind::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Equivalent(LocalUnitaryWitness),
    NotEquivalent(Certificate),
    Inconclusive(String),
}

impl Verdict {
    pub fn kind(&self) -> VerdictKind {
        match self {
            Verdict::Equivalent(_) => VerdictKind::Equivalent,
            Verdict::NotEquivalent(_) => VerdictKind::NotEquivalent,
            Verdict::Inconclusive(_) => VerdictKind::Inconclusive,
        }
    }

    pub fn witness(&self) -> Option<&LocalUnitaryWitness> {
        match self {
            Verdict::Equivalent(w) => Some(w),
            _ => None,
        }
    }
}

fn gram_scale(vs: &[RVec3]) -> f64 {
    vs.iter().map(|v| v.norm_squared()).fold(1.0, f64::max)
}

/// Orthogonal `O` with `O·xsᵢ = ysᵢ` for all `i`, or `None` when the Gram
/// matrices differ or no such map exists. With `want_special`, only maps
/// with determinant `+1` are returned; rank-deficient data always admits one.
pub fn align_gram(xs: &[RVec3], ys: &[RVec3], want_special: bool) -> Option<RMat3> {
    if xs.len() != ys.len() {
        return None;
    }
    let scale = gram_scale(xs).max(gram_scale(ys));
    for i in 0..xs.len() {
        for j in i..xs.len() {
            if (xs[i].dot(&xs[j]) - ys[i].dot(&ys[j])).abs() > ALIGN_TOL * scale {
                return None;
            }
        }
    }
    let tol = ALIGN_TOL * scale.sqrt();
    let signs: &[f64] = if want_special { &[1.0] } else { &[1.0, -1.0] };
    signs
        .iter()
        .map(|&s| {
            let o = procrustes(xs, ys, s);
            (max_residual(&o, xs, ys), o)
        })
        .filter(|(r, _)| *r <= tol)
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, o)| o)
}

/// Rotations `O₁, O₂` with `t12_hat = O₁·t12·O₂ᵗ`, built from the singular
/// frames of both matrices.
pub fn align_correlations(t12: &RMat3, t12_hat: &RMat3) -> Option<(RMat3, RMat3)> {
    let a = svd3(t12);
    let b = svd3(t12_hat);
    let scale = a.sigma[0].max(b.sigma[0]).max(1.0);
    if (0..3).any(|k| (a.sigma[k] - b.sigma[k]).abs() > ALIGN_TOL * scale) {
        return None;
    }
    let mut o1 = b.left * a.left.transpose();
    let mut o2 = b.right * a.right.transpose();
    let neg1 = o1.determinant() < 0.0;
    let neg2 = o2.determinant() < 0.0;
    if neg1 && neg2 {
        o1 = -o1;
        o2 = -o2;
    } else if neg1 != neg2 {
        // only possible through a zero singular value
        if a.sigma[2] > ALIGN_TOL * scale {
            return None;
        }
        let f = RMat3::from_diagonal(&RVec3::new(1.0, 1.0, -1.0));
        if neg1 {
            o1 = b.left * f * a.left.transpose();
        } else {
            o2 = b.right * f * a.right.transpose();
        }
    }
    if (o1 * t12 * o2.transpose() - t12_hat).norm() > ALIGN_TOL * scale {
        return None;
    }
    Some((o1, o2))
}

/// Output of [`stabilizer_align`]: `r1·x1 = y1`, `r2·x2 = y2` and
/// `r1·D·r2ᵗ = D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilizerSolution {
    pub r1: RMat3,
    pub r2: RMat3,
    pub case: DegeneracyCase,
}

/// Groups of equal singular values as index ranges, plus whether each is zero.
fn singular_blocks(d: &[f64; 3]) -> Vec<(std::ops::Range<usize>, bool)> {
    let eq_tol = DEGENERACY_TOL * d[0].max(1.0);
    let mut blocks: Vec<(std::ops::Range<usize>, bool)> = Vec::new();
    for i in 0..3 {
        let zero = d[i] <= ZERO_SINGULAR_TOL;
        match blocks.last_mut() {
            Some((r, z)) if *z == zero && (zero || (d[r.start] - d[i]).abs() <= eq_tol) => r.end = i + 1,
            _ => blocks.push((i..i + 1, zero)),
        }
    }
    blocks
}

pub fn degeneracy_case(d: &[f64; 3]) -> DegeneracyCase {
    let blocks = singular_blocks(d);
    match blocks.len() {
        3 if blocks[2].1 => DegeneracyCase::DistinctWithZero,
        3 => DegeneracyCase::Distinct,
        2 => DegeneracyCase::Pair,
        _ if blocks[0].1 => DegeneracyCase::Zero,
        _ => DegeneracyCase::Scalar,
    }
}

/// Orthogonal maps of `Rᵏ` sending each `xs[i]` to `ys[i]`, one per
/// achievable determinant.
fn block_maps(xs: &[DVector<f64>], ys: &[DVector<f64>], k: usize) -> Vec<(f64, DMatrix<f64>)> {
    let mut h = DMatrix::<f64>::zeros(k, k);
    let mut scale = 1.0f64;
    for (x, y) in xs.iter().zip(ys) {
        h += y * x.transpose();
        scale = scale.max(x.norm()).max(y.norm());
    }
    let svd = h.svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let smallest = svd.singular_values.argmin().0;
    let base = (&u * &vt).determinant().signum();
    let mut out = Vec::new();
    for s in [1.0, -1.0] {
        let mut diag = DVector::from_element(k, 1.0);
        if base * s < 0.0 {
            diag[smallest] = -1.0;
        }
        let o = &u * DMatrix::from_diagonal(&diag) * &vt;
        let ok = xs.iter().zip(ys).all(|(x, y)| (&o * x - y).norm() <= ALIGN_TOL * scale);
        if ok {
            out.push((s, o));
        }
    }
    out
}

fn sub(v: &RVec3, r: &std::ops::Range<usize>) -> DVector<f64> {
    DVector::from_iterator(r.len(), r.clone().map(|i| v[i]))
}

fn place(target: &mut RMat3, block: &DMatrix<f64>, r: &std::ops::Range<usize>) {
    for (a, i) in r.clone().enumerate() {
        for (b, j) in r.clone().enumerate() {
            target[(i, j)] = block[(a, b)];
        }
    }
}

/// Solves for block rotations in the singular frame of `T12 = diag(d)`.
///
/// Blocks of equal nonzero singular values must carry the same orthogonal
/// block in `r1` and `r2`; the zero block carries independent ones.
/// `target_dets` fixes `(det r1, det r2)`. The pair of `I` values must agree.
pub fn stabilizer_align(
    d: &[f64; 3],
    x1: &RVec3,
    y1: &RVec3,
    x2: &RVec3,
    y2: &RVec3,
    inv_i_pair: (f64, f64),
    target_dets: (f64, f64),
) -> Option<StabilizerSolution> {
    let (i_a, i_b) = inv_i_pair;
    if (i_a - i_b).abs() > ALIGN_TOL * i_a.abs().max(1.0) {
        return None;
    }
    let blocks = singular_blocks(d);
    // per block: candidate (det1, det2, q1, q2)
    let mut options: Vec<Vec<(f64, f64, DMatrix<f64>, DMatrix<f64>)>> = Vec::new();
    for (r, zero) in &blocks {
        let k = r.len();
        let (sx1, sy1, sx2, sy2) = (sub(x1, r), sub(y1, r), sub(x2, r), sub(y2, r));
        let opts = if *zero {
            let m1 = block_maps(std::slice::from_ref(&sx1), std::slice::from_ref(&sy1), k);
            let m2 = block_maps(std::slice::from_ref(&sx2), std::slice::from_ref(&sy2), k);
            let mut v = Vec::new();
            for (s1, q1) in &m1 {
                for (s2, q2) in &m2 {
                    v.push((*s1, *s2, q1.clone(), q2.clone()));
                }
            }
            v
        } else {
            block_maps(&[sx1, sx2], &[sy1, sy2], k)
                .into_iter()
                .map(|(s, q)| (s, s, q.clone(), q))
                .collect()
        };
        if opts.is_empty() {
            return None;
        }
        options.push(opts);
    }
    let mut choice = vec![0usize; options.len()];
    loop {
        let (mut p1, mut p2) = (1.0, 1.0);
        for (b, &c) in choice.iter().enumerate() {
            p1 *= options[b][c].0;
            p2 *= options[b][c].1;
        }
        if p1 == target_dets.0.signum() && p2 == target_dets.1.signum() {
            let mut r1 = RMat3::zeros();
            let mut r2 = RMat3::zeros();
            for (b, &c) in choice.iter().enumerate() {
                place(&mut r1, &options[b][c].2, &blocks[b].0);
                place(&mut r2, &options[b][c].3, &blocks[b].0);
            }
            return Some(StabilizerSolution { r1, r2, case: degeneracy_case(d) });
        }
        // odometer over the per-block options
        let mut b = 0;
        loop {
            if b == choice.len() {
                return None;
            }
            choice[b] += 1;
            if choice[b] < options[b].len() {
                break;
            }
            choice[b] = 0;
            b += 1;
        }
    }
}

/// `‖ρ̂ − ρ′‖_F` expressed through Bloch coefficient differences.
pub(crate) fn bloch2_distance(a: &BlochTensor2, b: &BlochTensor2) -> f64 {
    let sq = (a.t1 - b.t1).norm_squared() + (a.t2 - b.t2).norm_squared() + (a.t12 - b.t12).norm_squared();
    sq.sqrt() / 2.0
}

fn lift(rotations: Vec<RMat3>, residual: f64, route: Route) -> Result<LocalUnitaryWitness, String> {
    let unitaries = rotations
        .iter()
        .map(so3_to_su2)
        .collect::<Result<Vec<_>, LuError>>()
        .map_err(|e| format!("rotation lift failed: {e}"))?;
    Ok(LocalUnitaryWitness { rotations, unitaries, residual, route })
}

fn family_witness(a: &BlochTensor2, b: &BlochTensor2, fa: &(VectorFamily, VectorFamily), fb: &(VectorFamily, VectorFamily)) -> Result<(RMat3, RMat3), String> {
    let basis: Vec<RVec3> = (0..3).map(|k| RVec3::ith(k, 1.0)).collect();
    if fa.0.dim == 3 {
        let o1 = align_gram(&fa.0.vectors(), &fb.0.vectors(), true).ok_or("S₁ alignment failed")?;
        let mut xs: Vec<RVec3> = basis.iter().map(|e| a.t12.transpose() * e).collect();
        let mut ys: Vec<RVec3> = basis.iter().map(|e| b.t12.transpose() * (o1 * e)).collect();
        xs.extend(fa.1.vectors());
        ys.extend(fb.1.vectors());
        let o2 = align_gram(&xs, &ys, true).ok_or("partner alignment for qubit 2 failed")?;
        Ok((o1, o2))
    } else {
        let o2 = align_gram(&fa.1.vectors(), &fb.1.vectors(), true).ok_or("S₂ alignment failed")?;
        let mut xs: Vec<RVec3> = basis.iter().map(|e| a.t12 * e).collect();
        let mut ys: Vec<RVec3> = basis.iter().map(|e| b.t12 * (o2 * e)).collect();
        xs.extend(fa.0.vectors());
        ys.extend(fb.0.vectors());
        let o1 = align_gram(&xs, &ys, true).ok_or("partner alignment for qubit 1 failed")?;
        Ok((o1, o2))
    }
}

fn frame_witness(a: &BlochTensor2, b: &BlochTensor2, fp: &Fingerprint2, fq: &Fingerprint2) -> Result<(RMat3, RMat3, DegeneracyCase), String> {
    let sa = svd3(&a.t12);
    let sb = svd3(&b.t12);
    let d = [0, 1, 2].map(|k| 0.5 * (sa.sigma[k] + sb.sigma[k]));
    let (u, v, uh, vh) = (sa.left, sa.right, sb.left, sb.right);
    let x1 = u.transpose() * a.t1;
    let y1 = uh.transpose() * b.t1;
    let x2 = v.transpose() * a.t2;
    let y2 = vh.transpose() * b.t2;
    let dets = (u.determinant() * uh.determinant(), v.determinant() * vh.determinant());
    let sol = stabilizer_align(&d, &x1, &y1, &x2, &y2, (fp.inv_i, fq.inv_i), dets)
        .ok_or_else(|| format!("no block rotation found in the singular frame ({} case)", degeneracy_case(&d)))?;
    Ok((uh * sol.r1 * u.transpose(), vh * sol.r2 * v.transpose(), sol.case))
}

/// Largest deviation among the three Bloch-level relations.
pub fn relation_residuals2(a: &BlochTensor2, b: &BlochTensor2, o1: &RMat3, o2: &RMat3) -> [f64; 3] {
    [
        (b.t1 - o1 * a.t1).norm(),
        (b.t2 - o2 * a.t2).norm(),
        (b.t12 - o1 * a.t12 * o2.transpose()).norm(),
    ]
}

/// Decides whether `b` lies in the local-unitary orbit of `a`.
///
/// All fingerprint fields are compared at absolute tolerance `tol`. When they
/// agree a witness is constructed and each relation is checked to `10·tol`;
/// a witness that fails the check yields `Inconclusive`.
pub fn decide2(a: &BlochTensor2, b: &BlochTensor2, tol: f64) -> Result<Verdict, LuError> {
    if !(tol > 0.0) {
        return Err(LuError::InvalidTolerance(tol));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(LuError::NonFinite);
    }
    if a == b {
        let id = RMat3::identity();
        return Ok(Verdict::Equivalent(lift(vec![id, id], 0.0, Route::Identical).expect("identity lifts")));
    }
    let fp = fingerprint2(a);
    let fq = fingerprint2(b);
    if let Some(cert) = fingerprints_equal(&Fingerprint::Two(fp.clone()), &Fingerprint::Two(fq.clone()), tol)? {
        return Ok(Verdict::NotEquivalent(cert));
    }
    let built = if fp.dims[0] == 3 || fp.dims[1] == 3 {
        let fa = build_families2(a);
        let fb = build_families2(b);
        family_witness(a, b, &fa, &fb).map(|(o1, o2)| (o1, o2, Route::Families { anchors: [fp.dims[0] == 3, fp.dims[1] == 3, false] }))
    } else {
        frame_witness(a, b, &fp, &fq).map(|(o1, o2, c)| (o1, o2, Route::SingularFrame(c)))
    };
    let (o1, o2, route) = match built {
        Ok(x) => x,
        Err(msg) => return Ok(Verdict::Inconclusive(format!("invariants agree but {msg}"))),
    };
    let res = relation_residuals2(a, b, &o1, &o2);
    let worst = res.iter().copied().fold(0.0, f64::max);
    if worst > 10.0 * tol {
        return Ok(Verdict::Inconclusive(format!("invariants agree but witness misses by {worst:.3e}")));
    }
    let residual = bloch2_distance(b, &a.rotated(&o1, &o2));
    Ok(lift(vec![o1, o2], residual, route).map_or_else(Verdict::Inconclusive, Verdict::Equivalent))
}

/// [`decide2`] on density matrices, additionally checking the lifted
/// unitaries against the states themselves.
pub fn decide2_states(a: &DensityMatrix, b: &DensityMatrix, tol: f64) -> Result<Verdict, LuError> {
    if a.qubits() != 2 || b.qubits() != 2 {
        return Err(LuError::WrongDimension { expected: 4, rows: a.dim().max(b.dim()), cols: a.dim().max(b.dim()) });
    }
    let verdict = decide2(&to_bloch2(a)?, &to_bloch2(b)?, tol)?;
    Ok(check_states(verdict, a, b))
}

pub(crate) fn check_states(verdict: Verdict, a: &DensityMatrix, b: &DensityMatrix) -> Verdict {
    match verdict {
        Verdict::Equivalent(mut w) => {
            let r = b.frobenius_distance(&a.apply_local(&w.unitaries));
            if r <= STATE_RESIDUAL_TOL {
                w.residual = r;
                Verdict::Equivalent(w)
            } else {
                Verdict::Inconclusive(format!("witness fails on the density matrices by {r:.3e}"))
            }
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statekit::{random_rotation, RngSeed};
    use rand::SeedableRng;

    fn e(k: usize) -> RVec3 {
        RVec3::ith(k, 1.0)
    }

    #[test]
    fn align_identity() {
        let xs = [e(0), e(1), e(2)];
        let o = align_gram(&xs, &xs, true).unwrap();
        assert!((o - RMat3::identity()).norm() < 1e-14);
    }

    #[test]
    fn align_single_vector_special() {
        let o = align_gram(&[e(0)], &[e(1)], true).unwrap();
        assert!((o * e(0) - e(1)).norm() < 1e-12);
        assert!((o.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn align_recovers_planted_rotation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let o = random_rotation(&mut rng);
        let xs = [RVec3::new(0.3, -0.2, 0.5), RVec3::new(0.1, 0.4, 0.0), RVec3::new(-0.6, 0.1, 0.2), RVec3::new(0.2, 0.2, 0.2)];
        let ys: Vec<RVec3> = xs.iter().map(|x| o * x).collect();
        let got = align_gram(&xs, &ys, true).unwrap();
        assert!((got - o).norm() < 1e-8);
    }

    #[test]
    fn align_rejects_reflection_when_special() {
        let xs = [e(0), e(1), e(2)];
        let ys = [e(0), e(1), -e(2)];
        assert!(align_gram(&xs, &ys, true).is_none());
        let o = align_gram(&xs, &ys, false).unwrap();
        assert!((o.determinant() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn align_rejects_gram_mismatch() {
        assert!(align_gram(&[e(0)], &[e(1) * 2.0], false).is_none());
    }

    #[test]
    fn align_correlations_examples() {
        let d = RMat3::from_diagonal(&RVec3::new(3.0, 2.0, 1.0));
        let (o1, o2) = align_correlations(&d, &d).unwrap();
        assert!((o1 * d * o2.transpose() - d).norm() < 1e-12);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let t = RMat3::new(0.3, -0.1, 0.2, 0.05, 0.4, -0.3, 0.1, 0.2, 0.25);
        let (q1, q2) = (random_rotation(&mut rng), random_rotation(&mut rng));
        let th = q1 * t * q2.transpose();
        let (o1, o2) = align_correlations(&t, &th).unwrap();
        assert!((o1 * t * o2.transpose() - th).norm() < 1e-8);
        assert!((o1.determinant() - 1.0).abs() < 1e-10 && (o2.determinant() - 1.0).abs() < 1e-10);

        let f = RMat3::from_diagonal(&RVec3::new(1.0, 1.0, -1.0));
        assert!(align_correlations(&RMat3::identity(), &f).is_none());
    }

    #[test]
    fn stabilizer_distinct_with_zero_first_coordinates() {
        let d = [0.9, 0.5, 0.2];
        let x1 = RVec3::new(0.0, 0.3, -0.2);
        let x2 = RVec3::new(0.0, -0.1, 0.4);
        // flip the b and c signs together on both sides
        let s = RMat3::from_diagonal(&RVec3::new(1.0, -1.0, -1.0));
        let (y1, y2) = (s * x1, s * x2);
        let sol = stabilizer_align(&d, &x1, &y1, &x2, &y2, (0.0, 0.0), (1.0, 1.0)).unwrap();
        assert_eq!(sol.case, DegeneracyCase::Distinct);
        assert!((sol.r1 * x1 - y1).norm() < 1e-12 && (sol.r2 * x2 - y2).norm() < 1e-12);
        assert_eq!(sol.r1, sol.r2);
        assert!((sol.r1.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stabilizer_pair_block_with_zero() {
        let d = [0.6, 0.6, 0.0];
        let th: f64 = 0.7;
        let m = RMat3::new(th.cos(), -th.sin(), 0.0, th.sin(), th.cos(), 0.0, 0.0, 0.0, 1.0);
        let x1 = RVec3::new(0.2, 0.1, 0.3);
        let x2 = RVec3::new(-0.1, 0.25, 0.15);
        let r1 = m;
        let mut r2 = m;
        r2[(2, 2)] = -1.0;
        let sol = stabilizer_align(&d, &x1, &(r1 * x1), &x2, &(r2 * x2), (0.0, 0.0), (1.0, -1.0)).unwrap();
        assert_eq!(sol.case, DegeneracyCase::Pair);
        let dm = RMat3::from_diagonal(&RVec3::from(d));
        assert!((sol.r1 * dm * sol.r2.transpose() - dm).norm() < 1e-12);
        assert!((sol.r1 * x1 - r1 * x1).norm() < 1e-10 && (sol.r2 * x2 - r2 * x2).norm() < 1e-10);
    }

    #[test]
    fn stabilizer_zero_block() {
        let d = [0.0; 3];
        let x1 = RVec3::new(0.2, 0.1, 0.3);
        let y1 = RVec3::new(0.0, 0.0, x1.norm());
        let x2 = RVec3::new(0.0, 0.0, 0.0);
        let sol = stabilizer_align(&d, &x1, &y1, &x2, &x2, (0.0, 0.0), (1.0, 1.0)).unwrap();
        assert_eq!(sol.case, DegeneracyCase::Zero);
        assert!((sol.r1 * x1 - y1).norm() < 1e-12);
    }

    #[test]
    fn stabilizer_rejects_mismatched_i() {
        let v = RVec3::new(0.1, 0.2, 0.3);
        assert!(stabilizer_align(&[0.5, 0.4, 0.3], &v, &v, &v, &v, (0.1, 0.2), (1.0, 1.0)).is_none());
    }

    #[test]
    fn case_detection() {
        assert_eq!(degeneracy_case(&[0.9, 0.5, 0.2]), DegeneracyCase::Distinct);
        assert_eq!(degeneracy_case(&[0.9, 0.5, 0.0]), DegeneracyCase::DistinctWithZero);
        assert_eq!(degeneracy_case(&[0.5, 0.5, 0.2]), DegeneracyCase::Pair);
        assert_eq!(degeneracy_case(&[0.5, 0.0, 0.0]), DegeneracyCase::Pair);
        assert_eq!(degeneracy_case(&[0.4, 0.4, 0.4]), DegeneracyCase::Scalar);
        assert_eq!(degeneracy_case(&[0.0, 0.0, 0.0]), DegeneracyCase::Zero);
    }

    #[test]
    fn self_pair_is_identity() {
        let b = BlochTensor2 { t1: RVec3::new(0.1, 0.0, 0.2), t2: RVec3::zeros(), t12: RMat3::identity() * 0.3 };
        let v = decide2(&b, &b, 1e-9).unwrap();
        let w = v.witness().unwrap();
        assert!(w.residual <= 1e-12);
        assert!((w.rotations[0] - RMat3::identity()).norm() < 1e-12);
    }

    #[test]
    fn planted_orbit_is_found() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(RngSeed(5).0);
        let a = BlochTensor2 {
            t1: RVec3::new(0.1, -0.2, 0.15),
            t2: RVec3::new(0.05, 0.1, -0.1),
            t12: RMat3::new(0.3, -0.1, 0.2, 0.05, 0.4, -0.3, 0.1, 0.2, 0.25),
        };
        let (o1, o2) = (random_rotation(&mut rng), random_rotation(&mut rng));
        let b = a.rotated(&o1, &o2);
        let v = decide2(&a, &b, 1e-9).unwrap();
        let w = v.witness().expect("orbit pair");
        assert!((w.rotations[0] - o1).norm() < 1e-7 && (w.rotations[1] - o2).norm() < 1e-7);
    }

    #[test]
    fn reflected_local_vector_is_rejected() {
        let a = BlochTensor2 {
            t1: RVec3::new(0.1, -0.2, 0.15),
            t2: RVec3::zeros(),
            t12: RMat3::from_diagonal(&RVec3::new(0.5, 0.3, 0.1)),
        };
        let b = BlochTensor2 { t1: RVec3::new(0.1, -0.2, -0.15), ..a };
        let v = decide2(&a, &b, 1e-9).unwrap();
        assert_eq!(v.kind(), VerdictKind::NotEquivalent);
    }
}
