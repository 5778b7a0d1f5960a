//! LU-covariant vector families.
//!
//! Every member of family `i` is built from the Bloch data so that a local
//! rotation `(O₁, O₂, …)` maps it to `Oᵢ · member`. Inner products and triple
//! products of members are therefore LU invariants.

use crate::bloch::{unfold3, BlochTensor2, BlochTensor3};
use crate::linalg::{kron_vec, rank_tol, RMat3, RVec3, DEFAULT_RANK_TOL};

/// Upper bound on the size of a generated three-qubit family.
pub const MAX_FAMILY_SIZE: usize = 200;
/// Default generation depth for three-qubit families.
pub const DEFAULT_DEPTH: usize = 2;
/// Largest accepted generation depth.
pub const MAX_DEPTH: usize = 3;

// Generated vectors below this norm are treated as zero and dropped.
const ZERO_NORM: f64 = 1e-12;
// |cos| above 1 - PARALLEL_TOL counts as parallel.
const PARALLEL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub vector: RVec3,
    /// How the vector was built, e.g. `T12·ν2`.
    pub tag: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorFamily {
    /// Subsystem the family belongs to (1, 2 or 3).
    pub label: usize,
    pub members: Vec<Member>,
    /// Numerical dimension of the span of the members.
    pub dim: usize,
    /// Set when generation stopped at [`MAX_FAMILY_SIZE`].
    pub truncated: bool,
}

impl VectorFamily {
    fn new(label: usize, members: Vec<Member>, truncated: bool) -> Self {
        let vectors: Vec<RVec3> = members.iter().map(|m| m.vector).collect();
        let dim = if vectors.is_empty() { 0 } else { rank_tol(&vectors, DEFAULT_RANK_TOL).expect("nonempty") };
        Self { label, members, dim, truncated }
    }

    pub fn vectors(&self) -> Vec<RVec3> {
        self.members.iter().map(|m| m.vector).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Gram matrix of the members, row-major.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        self.members
            .iter()
            .map(|a| self.members.iter().map(|b| a.vector.dot(&b.vector)).collect())
            .collect()
    }
}

fn symbol(label: usize) -> &'static str {
    match label {
        1 => "μ",
        2 => "ν",
        _ => "ω",
    }
}

/// The six-member families S₁ = (μ₁…μ₆) and S₂ = (ν₁…ν₆).
///
/// With `M = T12·T12ᵗ` and `N = T12ᵗ·T12`:
/// `μ = (T1, T12·T2, M·T1, M·T12·T2, M²·T1, M²·T12·T2)` and
/// `ν = (T2, T12ᵗ·T1, N·T2, N·T12ᵗ·T1, N²·T2, N²·T12ᵗ·T1)`.
/// Later members reduce to these by Cayley–Hamilton. Zero members are kept so
/// that indices stay fixed.
pub fn build_families2(b: &BlochTensor2) -> (VectorFamily, VectorFamily) {
    let m = b.t12 * b.t12.transpose();
    let n = b.t12.transpose() * b.t12;
    let odd1 = b.t1;
    let even1 = b.t12 * b.t2;
    let odd2 = b.t2;
    let even2 = b.t12.transpose() * b.t1;

    let mu = vec![
        Member { vector: odd1, tag: "T1".into() },
        Member { vector: even1, tag: "T12·T2".into() },
        Member { vector: m * odd1, tag: "M·T1".into() },
        Member { vector: m * even1, tag: "M·T12·T2".into() },
        Member { vector: m * m * odd1, tag: "M²·T1".into() },
        Member { vector: m * m * even1, tag: "M²·T12·T2".into() },
    ];
    let nu = vec![
        Member { vector: odd2, tag: "T2".into() },
        Member { vector: even2, tag: "T12ᵗ·T1".into() },
        Member { vector: n * odd2, tag: "N·T2".into() },
        Member { vector: n * even2, tag: "N·T12ᵗ·T1".into() },
        Member { vector: n * n * odd2, tag: "N²·T2".into() },
        Member { vector: n * n * even2, tag: "N²·T12ᵗ·T1".into() },
    ];
    (VectorFamily::new(1, mu, false), VectorFamily::new(2, nu, false))
}

struct Growing {
    label: usize,
    members: Vec<Member>,
    truncated: bool,
}

impl Growing {
    fn offer(&mut self, v: RVec3, tag: impl FnOnce() -> String) {
        if self.truncated {
            return;
        }
        let norm = v.norm();
        if !(norm > ZERO_NORM) {
            return;
        }
        let parallel = self.members.iter().any(|m| {
            let cos = m.vector.dot(&v) / (m.vector.norm() * norm);
            cos.abs() >= 1.0 - PARALLEL_TOL
        });
        if parallel {
            return;
        }
        if self.members.len() >= MAX_FAMILY_SIZE {
            self.truncated = true;
            return;
        }
        self.members.push(Member { vector: v, tag: tag() });
    }
}

/// The three-qubit families S₁, S₂, S₃ generated to the given depth.
///
/// Seeds are the local Bloch vectors `Tᵢ`. Each round applies, in this order,
/// to family `i`: left multiplication by `𝒯ᵢ` and `𝒯ᵢ²`; the two-body maps
/// from the other families (`T12·S₂`, `T13·S₃` for family 1;
/// `T12ᵗ·S₁`, `T23·S₃` for family 2; `T13ᵗ·S₁`, `T23ᵗ·S₂` for family 3);
/// and the unfolding map `T_{i|jk}(v⊗w)` over the other two families. Only
/// inputs involving a member added in the previous round are used, so each
/// round appends to the previous lists. Zero vectors and vectors parallel to
/// an existing member are skipped.
///
/// `depth` is clamped to `1..=MAX_DEPTH`.
pub fn build_families3(b: &BlochTensor3, depth: usize) -> [VectorFamily; 3] {
    let depth = depth.clamp(1, MAX_DEPTH);
    let u = unfold3(b);
    let cal = [u.cal_t1, u.cal_t2, u.cal_t3];
    let cal_sq = [u.cal_t1 * u.cal_t1, u.cal_t2 * u.cal_t2, u.cal_t3 * u.cal_t3];
    let unfold = [u.t1_23, u.t2_13, u.t3_12];
    // two-body map into family i from family j, with its display name
    let cross = |i: usize, j: usize| -> (RMat3, &'static str) {
        match (i, j) {
            (0, 1) => (b.t12, "T12"),
            (0, 2) => (b.t13, "T13"),
            (1, 0) => (b.t12.transpose(), "T12ᵗ"),
            (1, 2) => (b.t23, "T23"),
            (2, 0) => (b.t13.transpose(), "T13ᵗ"),
            _ => (b.t23.transpose(), "T23ᵗ"),
        }
    };
    let unfold_name = ["T1|23", "T2|13", "T3|12"];
    let others = [(1usize, 2usize), (0, 2), (0, 1)];

    let mut fams: Vec<Growing> = (0..3).map(|i| Growing { label: i + 1, members: Vec::new(), truncated: false }).collect();
    for (i, seed) in [b.t1, b.t2, b.t3].into_iter().enumerate() {
        fams[i].offer(seed, || format!("T{}", i + 1));
    }
    let mut frontier = [0usize; 3];

    for _ in 0..depth {
        let snap: Vec<Vec<RVec3>> = fams.iter().map(|f| f.members.iter().map(|m| m.vector).collect()).collect();
        let start = frontier;
        for i in 0..3 {
            let name = |label: usize, idx: usize| format!("{}{}", symbol(label), idx + 1);
            for (k, v) in snap[i].iter().enumerate().skip(start[i]) {
                let label = i + 1;
                fams[i].offer(cal[i] * v, || format!("𝒯{}·{}", label, name(label, k)));
                fams[i].offer(cal_sq[i] * v, || format!("𝒯{}²·{}", label, name(label, k)));
            }
            let (j1, j2) = others[i];
            for j in [j1, j2] {
                let (m, mname) = cross(i, j);
                for (k, v) in snap[j].iter().enumerate().skip(start[j]) {
                    fams[i].offer(m * v, || format!("{}·{}", mname, name(j + 1, k)));
                }
            }
            for (a, va) in snap[j1].iter().enumerate() {
                for (c, vc) in snap[j2].iter().enumerate() {
                    if a < start[j1] && c < start[j2] {
                        continue;
                    }
                    let w = unfold[i] * kron_vec(va, vc);
                    fams[i].offer(w, || format!("{}({}⊗{})", unfold_name[i], name(j1 + 1, a), name(j2 + 1, c)));
                }
            }
        }
        frontier = [snap[0].len(), snap[1].len(), snap[2].len()];
    }

    let mut out = fams.into_iter().map(|g| VectorFamily::new(g.label, g.members, g.truncated));
    [out.next().unwrap(), out.next().unwrap(), out.next().unwrap()]
}

/// Zero-based indices of the lexicographically first linearly independent
/// triple of members, or `None` when the family spans less than three
/// dimensions.
pub fn pick_basis(f: &VectorFamily) -> Option<[usize; 3]> {
    if f.dim < 3 {
        return None;
    }
    let v = f.vectors();
    let n = v.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if rank_tol(&[v[i], v[j], v[k]], DEFAULT_RANK_TOL).ok() == Some(3) {
                    return Some([i, j, k]);
                }
            }
        }
    }
    // Borderline rank: fall back to the best-conditioned triple.
    let mut best = None;
    let mut best_score = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let denom = v[i].norm() * v[j].norm() * v[k].norm();
                if denom > 0.0 {
                    let score = crate::linalg::triple(&v[i], &v[j], &v[k]).abs() / denom;
                    if score > best_score {
                        best_score = score;
                        best = Some([i, j, k]);
                    }
                }
            }
        }
    }
    best
}
