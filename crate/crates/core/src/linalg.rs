//! Small fixed-size real numerics: 3×3 SVD, symmetric eigen-decomposition,
//! tolerance-based rank, triple products and characteristic polynomials.
//!
//! Everything here works on `nalgebra` 3-vectors and 3×3 matrices. The SVD is a
//! one-sided (Hestenes) Jacobi iteration, which keeps small singular values
//! accurate to working precision; rank decisions reuse the same kernel on
//! stacked `n × 3` matrices.

use crate::error::LuError;

/// Real 3-vector (Bloch vectors, family members).
pub type RVec3 = nalgebra::Vector3<f64>;
/// Real 3×3 matrix (correlation matrices, rotations).
pub type RMat3 = nalgebra::Matrix3<f64>;

/// Default relative tolerance for [`rank_tol`].
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

const MAX_SWEEPS: usize = 60;

/// Result of [`svd3`]: `m = left · diag(sigma) · rightᵗ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Svd3Result {
    pub left: RMat3,
    pub right: RMat3,
    /// Singular values, descending.
    pub sigma: [f64; 3],
}

impl Svd3Result {
    pub fn reconstruct(&self) -> RMat3 {
        self.left * RMat3::from_diagonal(&RVec3::from(self.sigma)) * self.right.transpose()
    }

    /// Flip one column pair so that both factors become proper rotations, when
    /// the determinant of the input allows it.
    ///
    /// Negating column `k` in both factors leaves the product unchanged, so a
    /// common sign is always fixable. When `det(left) != det(right)` the input
    /// has a negative determinant (or is singular); only a zero singular value
    /// lets us flip a single factor. Returns `false` when the factors could not
    /// both be made special.
    pub fn make_proper(&mut self) -> bool {
        let dl = self.left.determinant() < 0.0;
        let dr = self.right.determinant() < 0.0;
        match (dl, dr) {
            (false, false) => true,
            (true, true) => {
                // flip the last column in both
                negate_column(&mut self.left, 2);
                negate_column(&mut self.right, 2);
                true
            }
            _ => {
                if self.sigma[2] == 0.0 {
                    if dl {
                        negate_column(&mut self.left, 2);
                    } else {
                        negate_column(&mut self.right, 2);
                    }
                    true
                } else {
                    false
                }
            }
        }
    }
}

fn negate_column(m: &mut RMat3, k: usize) {
    for r in 0..3 {
        m[(r, k)] = -m[(r, k)];
    }
}

/// One-sided Jacobi on the three columns `cols` (each of equal length), with
/// the accumulated right rotation returned. On return the columns are
/// mutually orthogonal to working precision.
fn hestenes(cols: &mut [Vec<f64>; 3]) -> RMat3 {
    let mut v = RMat3::identity();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let (alpha, beta, gamma) = cols[p].iter().zip(cols[q].iter()).fold(
                (0.0, 0.0, 0.0),
                |(a, b, g), (&x, &y)| (a + x * x, b + y * y, g + x * y),
            );
            if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                continue;
            }
            rotated = true;
            let zeta = (beta - alpha) / (2.0 * gamma);
            let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = c * t;
            let (cp, cq) = split_pair(cols, p, q);
            for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                let (a, b) = (*x, *y);
                *x = c * a - s * b;
                *y = s * a + c * b;
            }
            for r in 0..3 {
                let (a, b) = (v[(r, p)], v[(r, q)]);
                v[(r, p)] = c * a - s * b;
                v[(r, q)] = s * a + c * b;
            }
        }
        if !rotated {
            break;
        }
    }
    v
}

fn split_pair(cols: &mut [Vec<f64>; 3], p: usize, q: usize) -> (&mut Vec<f64>, &mut Vec<f64>) {
    debug_assert!(p < q);
    let (lo, hi) = cols.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Descending order of three values; ties keep the original index order.
fn descending_order(values: &[f64; 3]) -> [usize; 3] {
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap().then(a.cmp(&b)));
    idx
}

/// Any unit vector orthogonal to `u` (assumed unit length).
fn orthogonal_unit(u: &RVec3) -> RVec3 {
    // cross with the axis least aligned with u
    let i = u.iamin();
    let mut e = RVec3::zeros();
    e[i] = 1.0;
    u.cross(&e).normalize()
}

/// Singular value decomposition of a real 3×3 matrix.
///
/// Singular values are sorted descending (equal values keep their original
/// column order). Left singular vectors belonging to numerically zero
/// singular values are completed to an orthonormal basis.
pub fn svd3(m: &RMat3) -> Svd3Result {
    let mut cols = [
        m.column(0).iter().copied().collect::<Vec<_>>(),
        m.column(1).iter().copied().collect::<Vec<_>>(),
        m.column(2).iter().copied().collect::<Vec<_>>(),
    ];
    let v = hestenes(&mut cols);
    let norms = [norm(&cols[0]), norm(&cols[1]), norm(&cols[2])];
    let order = descending_order(&norms);

    let sigma = [norms[order[0]], norms[order[1]], norms[order[2]]];
    let mut right = RMat3::zeros();
    for (k, &j) in order.iter().enumerate() {
        right.set_column(k, &v.column(j));
    }

    let floor = sigma[0] * 1e-15;
    let mut us: Vec<RVec3> = Vec::with_capacity(3);
    for (k, &j) in order.iter().enumerate() {
        if sigma[k] > floor && sigma[k] > f64::MIN_POSITIVE {
            let mut u = RVec3::new(cols[j][0], cols[j][1], cols[j][2]) / sigma[k];
            // re-orthogonalise against the accepted columns
            for w in &us {
                u -= w * w.dot(&u);
            }
            us.push(u.normalize());
        } else {
            break;
        }
    }
    if us.is_empty() {
        us.push(RVec3::x());
    }
    if us.len() == 1 {
        let u1 = orthogonal_unit(&us[0]);
        us.push(u1);
    }
    if us.len() == 2 {
        let u2 = us[0].cross(&us[1]).normalize();
        us.push(u2);
    }
    let left = RMat3::from_columns(&[us[0], us[1], us[2]]);
    let mut sigma = sigma;
    // Columns completed above carry no weight.
    for s in sigma.iter_mut() {
        if *s <= floor {
            *s = 0.0;
        }
    }
    Svd3Result { left, right, sigma }
}

/// Singular values (descending) of the `n × 3` matrix whose rows are `rows`.
pub fn stacked_singular_values(rows: &[RVec3]) -> [f64; 3] {
    let mut cols = [
        rows.iter().map(|r| r[0]).collect::<Vec<_>>(),
        rows.iter().map(|r| r[1]).collect::<Vec<_>>(),
        rows.iter().map(|r| r[2]).collect::<Vec<_>>(),
    ];
    hestenes(&mut cols);
    let mut s = [norm(&cols[0]), norm(&cols[1]), norm(&cols[2])];
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Numerical rank of a list of 3-vectors: the number of singular values of
/// the stacked matrix above `tol_rel · max(1, σ_max)`.
pub fn rank_tol(vectors: &[RVec3], tol_rel: f64) -> Result<usize, LuError> {
    if vectors.is_empty() {
        return Err(LuError::EmptyInput("rank_tol needs at least one vector"));
    }
    if !(tol_rel > 0.0) {
        return Err(LuError::InvalidTolerance(tol_rel));
    }
    let s = stacked_singular_values(vectors);
    let threshold = tol_rel * s[0].max(1.0);
    Ok(s.iter().filter(|&&x| x > threshold).count())
}

/// Scalar triple product `⟨a, b × c⟩`.
pub fn triple(a: &RVec3, b: &RVec3, c: &RVec3) -> f64 {
    a.dot(&b.cross(c))
}

/// Coefficients `(c2, c1, c0)` with `m³ = c2·m² + c1·m + c0·I` for a symmetric
/// 3×3 matrix.
pub fn char_poly3(m: &RMat3) -> Result<(f64, f64, f64), LuError> {
    let scale = m.abs().max().max(1.0);
    if (m - m.transpose()).abs().max() > 1e-12 * scale {
        return Err(LuError::NotSymmetric);
    }
    let tr = m.trace();
    let tr2 = (m * m).trace();
    Ok((tr, -(tr * tr - tr2) / 2.0, m.determinant()))
}

/// Symmetric eigen-decomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching orthonormal
/// eigenvectors as matrix columns. Each eigenvector's largest-magnitude
/// entry is made positive (first such entry on ties).
pub fn sym_eigen3(m: &RMat3) -> ([f64; 3], RMat3) {
    let mut a = (m + m.transpose()) * 0.5;
    let mut v = RMat3::identity();
    let scale = a.norm();
    for _ in 0..MAX_SWEEPS {
        let off = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
        if off <= (f64::EPSILON * 1e-3 * scale).powi(2) {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = a[(p, q)];
            if apq == 0.0 {
                continue;
            }
            let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
            let t = if theta == 0.0 {
                1.0
            } else {
                theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
            };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let mut rot = RMat3::identity();
            rot[(p, p)] = c;
            rot[(q, q)] = c;
            rot[(p, q)] = s;
            rot[(q, p)] = -s;
            a = rot.transpose() * a * rot;
            a[(p, q)] = 0.0;
            a[(q, p)] = 0.0;
            v *= rot;
        }
    }
    let diag = [a[(0, 0)], a[(1, 1)], a[(2, 2)]];
    let order = descending_order(&diag);
    let mut vecs = RMat3::zeros();
    for (k, &j) in order.iter().enumerate() {
        let mut col: RVec3 = v.column(j).into();
        let imax = col.iamax();
        if col[imax] < 0.0 {
            col = -col;
        }
        vecs.set_column(k, &col);
    }
    ([diag[order[0]], diag[order[1]], diag[order[2]]], vecs)
}

/// Best orthogonal map (in the least-squares sense) from `xs` to `ys` with a
/// prescribed determinant sign (`+1` or `-1`).
pub fn procrustes(xs: &[RVec3], ys: &[RVec3], det_sign: f64) -> RMat3 {
    let mut h = RMat3::zeros();
    for (x, y) in xs.iter().zip(ys) {
        h += y * x.transpose();
    }
    let svd = svd3(&h);
    let d = (svd.left * svd.right.transpose()).determinant().signum();
    let fix = if d * det_sign < 0.0 { -1.0 } else { 1.0 };
    svd.left * RMat3::from_diagonal(&RVec3::new(1.0, 1.0, fix)) * svd.right.transpose()
}

/// `max_i ‖o·xs_i − ys_i‖`.
pub fn max_residual(o: &RMat3, xs: &[RVec3], ys: &[RVec3]) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (o * x - y).norm())
        .fold(0.0, f64::max)
}

/// Whether `m` is orthogonal with determinant `+1` within `tol`.
pub fn is_rotation(m: &RMat3, tol: f64) -> bool {
    (m.transpose() * m - RMat3::identity()).norm() <= tol && (m.determinant() - 1.0).abs() <= tol
}

/// Kronecker product of two 3×3 matrices as a 9×9 matrix, with row/column
/// index `3·a + b`.
pub fn kron3(a: &RMat3, b: &RMat3) -> nalgebra::SMatrix<f64, 9, 9> {
    let mut out = nalgebra::SMatrix::<f64, 9, 9>::zeros();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    out[(3 * i + k, 3 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of two 3-vectors, index `3·a + b`.
pub fn kron_vec(a: &RVec3, b: &RVec3) -> nalgebra::SVector<f64, 9> {
    nalgebra::SVector::<f64, 9>::from_fn(|r, _| a[r / 3] * b[r % 3])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot(axis: RVec3, angle: f64) -> RMat3 {
        *nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle).matrix()
    }

    #[test]
    fn svd_identity() {
        let s = svd3(&RMat3::identity());
        assert_eq!(s.sigma, [1.0, 1.0, 1.0]);
        assert!((s.left * s.right.transpose() - RMat3::identity()).norm() < 1e-14);
    }

    #[test]
    fn svd_diagonal() {
        let s = svd3(&RMat3::from_diagonal(&RVec3::new(3.0, 2.0, 1.0)));
        assert_eq!(s.sigma, [3.0, 2.0, 1.0]);
    }

    #[test]
    fn svd_sorts_and_ties_by_index() {
        let s = svd3(&RMat3::from_diagonal(&RVec3::new(1.0, 5.0, 1.0)));
        assert_eq!(s.sigma, [5.0, 1.0, 1.0]);
        // column 0 of the input keeps precedence over column 2
        assert!((s.right[(0, 1)].abs() - 1.0).abs() < 1e-15);
        assert!((s.right[(2, 2)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn svd_planted_factors() {
        let q1 = rot(RVec3::new(1.0, 2.0, -0.5), 0.7);
        let q2 = rot(RVec3::new(-0.3, 0.4, 1.0), 2.1);
        let m = q1 * RMat3::from_diagonal(&RVec3::new(0.5, 0.3, 0.1)) * q2.transpose();
        let s = svd3(&m);
        for (a, b) in s.sigma.iter().zip([0.5, 0.3, 0.1]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((s.reconstruct() - m).norm() < 1e-14);
    }

    #[test]
    fn svd_zero_and_rank_one() {
        let s = svd3(&RMat3::zeros());
        assert_eq!(s.sigma, [0.0, 0.0, 0.0]);
        assert!((s.left.transpose() * s.left - RMat3::identity()).norm() < 1e-14);

        let a = RVec3::new(1.0, -2.0, 0.5);
        let b = RVec3::new(0.3, 0.1, 0.9);
        let m = a * b.transpose();
        let s = svd3(&m);
        assert!((s.reconstruct() - m).norm() < 1e-13);
        assert!((s.left.transpose() * s.left - RMat3::identity()).norm() < 1e-13);
        assert_eq!(s.sigma[1], 0.0);
    }

    #[test]
    fn make_proper_on_negative_det_fails_unless_singular() {
        let mut s = svd3(&RMat3::from_diagonal(&RVec3::new(1.0, 1.0, -1.0)));
        assert!(!s.make_proper());
        let mut s = svd3(&RMat3::from_diagonal(&RVec3::new(2.0, -1.0, 0.0)));
        assert!(s.make_proper());
        assert!(s.left.determinant() > 0.0 && s.right.determinant() > 0.0);
        assert!((s.reconstruct() - RMat3::from_diagonal(&RVec3::new(2.0, -1.0, 0.0))).norm() < 1e-14);
    }

    #[test]
    fn rank_examples() {
        let e1 = RVec3::x();
        let e2 = RVec3::y();
        assert_eq!(rank_tol(&[e1, e2], DEFAULT_RANK_TOL).unwrap(), 2);
        assert_eq!(rank_tol(&[RVec3::zeros()], DEFAULT_RANK_TOL).unwrap(), 0);
        let v = [RVec3::new(1.0, 1.0, 1.0), RVec3::new(2.0, 2.0, 2.0), RVec3::new(1.0, 0.0, 0.0)];
        assert_eq!(rank_tol(&v, DEFAULT_RANK_TOL).unwrap(), 2);
    }

    #[test]
    fn rank_rejects_misuse() {
        assert!(matches!(rank_tol(&[], 1e-8), Err(LuError::EmptyInput(_))));
        assert!(rank_tol(&[RVec3::x()], 0.0).is_err());
    }

    #[test]
    fn triple_examples() {
        assert_eq!(triple(&RVec3::x(), &RVec3::y(), &RVec3::z()), 1.0);
        assert_eq!(triple(&RVec3::x(), &RVec3::x(), &RVec3::y()), 0.0);
        let t = triple(
            &RVec3::new(1.0, 2.0, 3.0),
            &RVec3::new(4.0, 5.0, 6.0),
            &RVec3::new(7.0, 8.0, 10.0),
        );
        assert!((t + 3.0).abs() < 1e-12);
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(char_poly3(&RMat3::identity()).unwrap(), (3.0, -3.0, 1.0));
        assert_eq!(char_poly3(&RMat3::zeros()).unwrap(), (0.0, 0.0, 0.0));
        let (c2, c1, c0) = char_poly3(&RMat3::from_diagonal(&RVec3::new(1.0, 2.0, 3.0))).unwrap();
        assert!((c2 - 6.0).abs() < 1e-12 && (c1 + 11.0).abs() < 1e-12 && (c0 - 6.0).abs() < 1e-12);
    }

    #[test]
    fn char_poly_rejects_asymmetric() {
        let mut m = RMat3::identity();
        m[(0, 1)] = 1.0;
        assert!(matches!(char_poly3(&m), Err(LuError::NotSymmetric)));
    }

    #[test]
    fn eigen_sign_convention() {
        let r = rot(RVec3::new(0.2, -1.0, 0.4), 1.1);
        let m = r * RMat3::from_diagonal(&RVec3::new(0.2, 0.9, 0.5)) * r.transpose();
        let (vals, vecs) = sym_eigen3(&m);
        assert!((vals[0] - 0.9).abs() < 1e-14 && (vals[1] - 0.5).abs() < 1e-14 && (vals[2] - 0.2).abs() < 1e-14);
        for k in 0..3 {
            let col: RVec3 = vecs.column(k).into();
            assert!(col[col.iamax()] > 0.0);
            assert!((m * col - col * vals[k]).norm() < 1e-13);
        }
    }

    #[test]
    fn procrustes_respects_requested_sign() {
        let xs = [RVec3::x()];
        let ys = [RVec3::y()];
        let o = procrustes(&xs, &ys, 1.0);
        assert!(is_rotation(&o, 1e-12));
        assert!(max_residual(&o, &xs, &ys) < 1e-12);
        let o = procrustes(&xs, &ys, -1.0);
        assert!((o.determinant() + 1.0).abs() < 1e-12);
        assert!(max_residual(&o, &xs, &ys) < 1e-12);
    }
}
