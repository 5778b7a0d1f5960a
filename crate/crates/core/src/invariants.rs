//! LU-invariant fingerprints of two- and three-qubit Bloch data.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bloch::{unfold3, BlochTensor2, BlochTensor3};
use crate::error::LuError;
use crate::families::{build_families2, build_families3, pick_basis, VectorFamily};
use crate::linalg::{triple, RMat3, RVec3};

/// Default absolute tolerance for comparing invariants.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Labels of the nine entries of `L`, in storage order.
pub const L_LABELS: [&str; 9] = [
    "⟨μ₁,μ₁⟩", "⟨μ₂,μ₂⟩", "⟨μ₃,μ₃⟩", "⟨ν₁,ν₁⟩", "⟨ν₂,ν₂⟩", "⟨ν₃,ν₃⟩", "⟨μ₁,μ₂⟩", "⟨μ₁,μ₄⟩", "⟨μ₁,μ₆⟩",
];

/// Complete invariant record of two-qubit Bloch data.
///
/// Which fields decide equivalence depends on the family dimensions: when
/// either family spans three dimensions the nine `L` entries plus the
/// available triple products (10 or 11 numbers) suffice; otherwise `L`,
/// `tr_alpha`, `det_t12` and `inv_i` (13 numbers) are used. All fields are LU
/// invariants, so comparing all of them is always sound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint2 {
    pub dims: [usize; 2],
    pub l: [f64; 9],
    pub triple_mu: Option<f64>,
    pub triple_nu: Option<f64>,
    /// Zero-based member indices the triples were taken at.
    pub basis_mu: Option<[usize; 3]>,
    pub basis_nu: Option<[usize; 3]>,
    /// `tr (T12 T12ᵗ)^α` for α = 1, 2.
    pub tr_alpha: [f64; 2],
    pub det_t12: f64,
    pub inv_i: f64,
}

impl Fingerprint2 {
    /// Number of invariants the decision procedure needs for these dimensions.
    pub fn decision_relevant_count(&self) -> usize {
        if self.dims[0] == 3 || self.dims[1] == 3 {
            9 + usize::from(self.triple_mu.is_some()) + usize::from(self.triple_nu.is_some())
        } else {
            13
        }
    }

    /// Coefficients `(c2, c1, c0)` of the characteristic polynomial of
    /// `T12·T12ᵗ`, recovered from the stored invariants.
    pub fn char_poly_coefficients(&self) -> (f64, f64, f64) {
        let [t1, t2] = self.tr_alpha;
        (t1, -(t1 * t1 - t2) / 2.0, self.det_t12 * self.det_t12)
    }

    /// `⟨xᵢ, xⱼ⟩` for family 1 (`x = μ`) or 2 (`x = ν`) and any one-based
    /// indices, computed from `L` by Cayley–Hamilton recursion.
    pub fn inner_from_invariants(&self, family: usize, i: usize, j: usize) -> f64 {
        assert!(i >= 1 && j >= 1 && (family == 1 || family == 2));
        let coeffs = self.char_poly_coefficients();
        let l = &self.l;
        // p(a) = T1ᵗ M^a T1, q(a) = T2ᵗ N^a T2, r(b) = T1ᵗ T12 N^b T2
        let p = [l[0], l[4], l[2]];
        let q = [l[3], l[1], l[5]];
        let r = [l[6], l[7], l[8]];
        let (odd, even) = if family == 1 { (p, q) } else { (q, p) };
        match (i % 2, j % 2) {
            (1, 1) => recurse(odd, coeffs, (i + j - 2) / 2),
            (0, 0) => recurse(even, coeffs, (i + j - 2) / 2),
            _ => recurse(r, coeffs, (i + j - 3) / 2),
        }
    }
}

/// Extends a sequence `s(k) = vᵗ A^k w` from its first three terms using
/// `A³ = c2 A² + c1 A + c0 I`.
fn recurse(first: [f64; 3], (c2, c1, c0): (f64, f64, f64), k: usize) -> f64 {
    let mut s = first.to_vec();
    while s.len() <= k {
        let n = s.len();
        s.push(c2 * s[n - 1] + c1 * s[n - 2] + c0 * s[n - 3]);
    }
    s[k]
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `I = ε_{ijk} ε_{lmn} T1ⁱ T2ˡ T12^{jm} T12^{kn}`, summed term by term.
pub fn invariant_i(b: &BlochTensor2) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let e1 = levi_civita(i, j, k);
                if e1 == 0.0 {
                    continue;
                }
                for l in 0..3 {
                    for m in 0..3 {
                        for n in 0..3 {
                            let e2 = levi_civita(l, m, n);
                            if e2 == 0.0 {
                                continue;
                            }
                            acc += e1 * e2 * b.t1[i] * b.t2[l] * b.t12[(j, m)] * b.t12[(k, n)];
                        }
                    }
                }
            }
        }
    }
    acc
}

fn triple_at(f: &VectorFamily) -> (Option<[usize; 3]>, Option<f64>) {
    match pick_basis(f) {
        Some([i, j, k]) => (Some([i, j, k]), Some(triple(&f.members[i].vector, &f.members[j].vector, &f.members[k].vector))),
        None => (None, None),
    }
}

pub fn fingerprint2(b: &BlochTensor2) -> Fingerprint2 {
    let (s1, s2) = build_families2(b);
    let mu = s1.vectors();
    let nu = s2.vectors();
    let l = [
        mu[0].dot(&mu[0]),
        mu[1].dot(&mu[1]),
        mu[2].dot(&mu[2]),
        nu[0].dot(&nu[0]),
        nu[1].dot(&nu[1]),
        nu[2].dot(&nu[2]),
        mu[0].dot(&mu[1]),
        mu[0].dot(&mu[3]),
        mu[0].dot(&mu[5]),
    ];
    let (basis_mu, triple_mu) = triple_at(&s1);
    let (basis_nu, triple_nu) = triple_at(&s2);
    let m = b.t12 * b.t12.transpose();
    Fingerprint2 {
        dims: [s1.dim, s2.dim],
        l,
        triple_mu,
        triple_nu,
        basis_mu,
        basis_nu,
        tr_alpha: [m.trace(), (m * m).trace()],
        det_t12: b.t12.determinant(),
        inv_i: invariant_i(b),
    }
}

/// Invariant record of three-qubit Bloch data at a given family depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint3 {
    pub depth: usize,
    pub dims: [usize; 3],
    pub sizes: [usize; 3],
    /// Set when any family hit the size cap.
    pub truncated: bool,
    pub gram_mu: Vec<Vec<f64>>,
    pub gram_nu: Vec<Vec<f64>>,
    pub gram_omega: Vec<Vec<f64>>,
    /// Triple product of each family's first independent triple.
    pub triples: [Option<f64>; 3],
    pub bases: [Option<[usize; 3]>; 3],
    /// `aux_traces[i][r-1] = tr(𝒯ᵢ^r)`.
    pub aux_traces: [[f64; 3]; 3],
    /// `aux_quad[i][r-1] = Tᵢᵗ 𝒯ᵢ^{r-1} Tᵢ`.
    pub aux_quad: [[f64; 3]; 3],
}

pub fn fingerprint3(b: &BlochTensor3, depth: usize) -> Fingerprint3 {
    let fams = build_families3(b, depth);
    fingerprint3_from(b, &fams, depth)
}

pub(crate) fn fingerprint3_from(b: &BlochTensor3, fams: &[VectorFamily; 3], depth: usize) -> Fingerprint3 {
    let u = unfold3(b);
    let cal = [u.cal_t1, u.cal_t2, u.cal_t3];
    let locals = [b.t1, b.t2, b.t3];
    let mut aux_traces = [[0.0; 3]; 3];
    let mut aux_quad = [[0.0; 3]; 3];
    for i in 0..3 {
        let mut power = RMat3::identity();
        for r in 0..3 {
            aux_quad[i][r] = locals[i].dot(&(power * locals[i]));
            power *= cal[i];
            aux_traces[i][r] = power.trace();
        }
    }
    let mut triples = [None; 3];
    let mut bases = [None; 3];
    for (i, f) in fams.iter().enumerate() {
        let (basis, t) = triple_at(f);
        bases[i] = basis;
        triples[i] = t;
    }
    Fingerprint3 {
        depth: depth.clamp(1, crate::families::MAX_DEPTH),
        dims: [fams[0].dim, fams[1].dim, fams[2].dim],
        sizes: [fams[0].len(), fams[1].len(), fams[2].len()],
        truncated: fams.iter().any(|f| f.truncated),
        gram_mu: fams[0].gram(),
        gram_nu: fams[1].gram(),
        gram_omega: fams[2].gram(),
        triples,
        bases,
        aux_traces,
        aux_quad,
    }
}

/// Either kind of fingerprint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Fingerprint {
    Two(Fingerprint2),
    Three(Fingerprint3),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldValue {
    Real(f64),
    Count(usize),
    Missing,
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldValue::Real(x) => write!(f, "{x:.12e}"),
            FieldValue::Count(n) => write!(f, "{n}"),
            FieldValue::Missing => write!(f, "none"),
        }
    }
}

/// The first differing field between two fingerprints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub field: String,
    pub left: FieldValue,
    pub right: FieldValue,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} vs {}", self.field, self.left, self.right)
    }
}

/// Walks fields in a fixed order and records the first mismatch.
struct Comparer {
    tol: f64,
    first: Option<Certificate>,
}

impl Comparer {
    fn count(&mut self, field: impl FnOnce() -> String, a: usize, b: usize) {
        if self.first.is_none() && a != b {
            self.first = Some(Certificate { field: field(), left: FieldValue::Count(a), right: FieldValue::Count(b) });
        }
    }

    fn real(&mut self, field: impl FnOnce() -> String, a: f64, b: f64) {
        if self.first.is_none() && !((a - b).abs() <= self.tol) {
            self.first = Some(Certificate { field: field(), left: FieldValue::Real(a), right: FieldValue::Real(b) });
        }
    }

    fn optional(&mut self, field: &str, a: Option<f64>, b: Option<f64>) {
        match (a, b) {
            (Some(x), Some(y)) => self.real(|| field.to_string(), x, y),
            (None, None) => {}
            _ => {
                if self.first.is_none() {
                    let v = |o: Option<f64>| o.map_or(FieldValue::Missing, FieldValue::Real);
                    self.first = Some(Certificate { field: field.to_string(), left: v(a), right: v(b) });
                }
            }
        }
    }

    fn gram(&mut self, name: &str, a: &[Vec<f64>], b: &[Vec<f64>]) {
        for (i, (ra, rb)) in a.iter().zip(b).enumerate() {
            for (j, (x, y)) in ra.iter().zip(rb).enumerate() {
                self.real(|| format!("{name}[{},{}]", i + 1, j + 1), *x, *y);
            }
        }
    }
}

fn compare2(a: &Fingerprint2, b: &Fingerprint2, c: &mut Comparer) {
    c.count(|| "dim_S1".into(), a.dims[0], b.dims[0]);
    c.count(|| "dim_S2".into(), a.dims[1], b.dims[1]);
    for k in 0..9 {
        c.real(|| format!("L{}", L_LABELS[k]), a.l[k], b.l[k]);
    }
    c.optional("triple_mu", a.triple_mu, b.triple_mu);
    c.optional("triple_nu", a.triple_nu, b.triple_nu);
    c.real(|| "tr_alpha[1]".into(), a.tr_alpha[0], b.tr_alpha[0]);
    c.real(|| "tr_alpha[2]".into(), a.tr_alpha[1], b.tr_alpha[1]);
    c.real(|| "det_T12".into(), a.det_t12, b.det_t12);
    c.real(|| "inv_I".into(), a.inv_i, b.inv_i);
}

fn compare3(a: &Fingerprint3, b: &Fingerprint3, c: &mut Comparer) {
    for i in 0..3 {
        c.count(|| format!("dim_S{}", i + 1), a.dims[i], b.dims[i]);
    }
    for i in 0..3 {
        c.count(|| format!("size_S{}", i + 1), a.sizes[i], b.sizes[i]);
    }
    c.gram("gram_mu", &a.gram_mu, &b.gram_mu);
    c.gram("gram_nu", &a.gram_nu, &b.gram_nu);
    c.gram("gram_omega", &a.gram_omega, &b.gram_omega);
    for (i, name) in ["triple_mu", "triple_nu", "triple_omega"].iter().enumerate() {
        c.optional(name, a.triples[i], b.triples[i]);
    }
    for i in 0..3 {
        for r in 0..3 {
            c.real(|| format!("tr(𝒯{}^{})", i + 1, r + 1), a.aux_traces[i][r], b.aux_traces[i][r]);
        }
    }
    for i in 0..3 {
        for r in 0..3 {
            c.real(|| format!("T{0}ᵗ𝒯{0}^{1}T{0}", i + 1, r), a.aux_quad[i][r], b.aux_quad[i][r]);
        }
    }
}

/// Componentwise comparison at absolute tolerance `tol`; dimensions and
/// family sizes are compared exactly. Returns the first mismatch in fixed
/// field order, or `None` when the fingerprints agree.
pub fn fingerprints_equal(a: &Fingerprint, b: &Fingerprint, tol: f64) -> Result<Option<Certificate>, LuError> {
    if !(tol > 0.0) {
        return Err(LuError::InvalidTolerance(tol));
    }
    let mut c = Comparer { tol, first: None };
    match (a, b) {
        (Fingerprint::Two(x), Fingerprint::Two(y)) => compare2(x, y, &mut c),
        (Fingerprint::Three(x), Fingerprint::Three(y)) => {
            if x.depth != y.depth {
                return Err(LuError::Incomparable(format!("family depth {} vs {}", x.depth, y.depth)));
            }
            compare3(x, y, &mut c)
        }
        _ => return Err(LuError::Incomparable("two-qubit vs three-qubit fingerprint".into())),
    }
    Ok(c.first)
}

/// Rounds to the nearest multiple of `tol` and prints 12 significant digits.
fn canonical_real(x: f64, tol: f64) -> String {
    let r = (x / tol).round() * tol;
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r:.11e}")
}

fn canonical_opt(x: Option<f64>, tol: f64) -> String {
    x.map_or_else(|| "none".to_string(), |v| canonical_real(v, tol))
}

impl Fingerprint {
    /// Canonical `key=value` lines, one field per line in fixed order.
    pub fn canonical_text(&self, tol: f64) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        match self {
            Fingerprint::Two(f) => {
                line("kind", "two".into());
                line("dims", format!("{},{}", f.dims[0], f.dims[1]));
                for (k, label) in L_LABELS.iter().enumerate() {
                    line(&format!("L{label}"), canonical_real(f.l[k], tol));
                }
                line("triple_mu", canonical_opt(f.triple_mu, tol));
                line("triple_nu", canonical_opt(f.triple_nu, tol));
                line("tr_alpha[1]", canonical_real(f.tr_alpha[0], tol));
                line("tr_alpha[2]", canonical_real(f.tr_alpha[1], tol));
                line("det_T12", canonical_real(f.det_t12, tol));
                line("inv_I", canonical_real(f.inv_i, tol));
            }
            Fingerprint::Three(f) => {
                line("kind", "three".into());
                line("depth", f.depth.to_string());
                line("dims", format!("{},{},{}", f.dims[0], f.dims[1], f.dims[2]));
                line("sizes", format!("{},{},{}", f.sizes[0], f.sizes[1], f.sizes[2]));
                line("truncated", f.truncated.to_string());
                for (name, g) in [("gram_mu", &f.gram_mu), ("gram_nu", &f.gram_nu), ("gram_omega", &f.gram_omega)] {
                    for (i, row) in g.iter().enumerate() {
                        let vals: Vec<String> = row.iter().map(|x| canonical_real(*x, tol)).collect();
                        line(&format!("{name}[{}]", i + 1), vals.join(","));
                    }
                }
                for (i, name) in ["triple_mu", "triple_nu", "triple_omega"].iter().enumerate() {
                    line(name, canonical_opt(f.triples[i], tol));
                }
                for i in 0..3 {
                    let t: Vec<String> = f.aux_traces[i].iter().map(|x| canonical_real(*x, tol)).collect();
                    line(&format!("tr(𝒯{}^r)", i + 1), t.join(","));
                    let q: Vec<String> = f.aux_quad[i].iter().map(|x| canonical_real(*x, tol)).collect();
                    line(&format!("T{0}ᵗ𝒯{0}^(r-1)T{0}", i + 1), q.join(","));
                }
            }
        }
        out
    }
}

/// Cofactor matrix of a 3×3 matrix.
pub fn cofactor(m: &RMat3) -> RMat3 {
    let c = |r: usize, s: usize| -> RVec3 { m.row(r).transpose().cross(&m.row(s).transpose()) };
    RMat3::from_rows(&[c(1, 2).transpose(), c(2, 0).transpose(), c(0, 1).transpose()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_data_fingerprint() {
        let f = fingerprint2(&BlochTensor2::zero());
        assert_eq!(f.dims, [0, 0]);
        assert_eq!(f.l, [0.0; 9]);
        assert_eq!((f.triple_mu, f.triple_nu), (None, None));
        assert_eq!((f.tr_alpha, f.det_t12, f.inv_i), ([0.0; 2], 0.0, 0.0));
    }

    #[test]
    fn bell_fingerprint() {
        let b = BlochTensor2 { t12: RMat3::from_diagonal(&RVec3::new(1.0, -1.0, 1.0)), ..BlochTensor2::zero() };
        let f = fingerprint2(&b);
        assert_eq!(f.l, [0.0; 9]);
        assert_eq!(f.tr_alpha, [3.0, 3.0]);
        assert_eq!(f.det_t12, -1.0);
        assert_eq!(f.inv_i, 0.0);
        assert_eq!(f.dims, [0, 0]);
    }

    #[test]
    fn invariant_i_examples() {
        let b = BlochTensor2 { t1: RVec3::x(), t2: RVec3::x(), t12: RMat3::identity() };
        assert!((invariant_i(&b) - 2.0).abs() < 1e-15);
        let no_t1 = BlochTensor2 { t1: RVec3::zeros(), ..b };
        assert_eq!(invariant_i(&no_t1), 0.0);
        let no_t12 = BlochTensor2 { t12: RMat3::zeros(), ..b };
        assert_eq!(invariant_i(&no_t12), 0.0);
    }

    #[test]
    fn cofactor_of_diagonal() {
        let c = cofactor(&RMat3::from_diagonal(&RVec3::new(2.0, 3.0, 5.0)));
        assert_eq!(c, RMat3::from_diagonal(&RVec3::new(15.0, 10.0, 6.0)));
    }

    #[test]
    fn det_mismatch_certificate() {
        let f = fingerprint2(&BlochTensor2 {
            t1: RVec3::new(0.1, 0.2, 0.0),
            t2: RVec3::new(0.0, -0.3, 0.1),
            t12: RMat3::from_diagonal(&RVec3::new(0.5, 0.2, 0.1)),
        });
        let mut g = f.clone();
        g.det_t12 += 0.5;
        let cert = fingerprints_equal(&Fingerprint::Two(f.clone()), &Fingerprint::Two(g), DEFAULT_TOL)
            .unwrap()
            .unwrap();
        assert_eq!(cert.field, "det_T12");
        assert!(fingerprints_equal(&Fingerprint::Two(f.clone()), &Fingerprint::Two(f), DEFAULT_TOL).unwrap().is_none());
    }

    #[test]
    fn kind_and_depth_mismatch_are_errors() {
        let two = Fingerprint::Two(fingerprint2(&BlochTensor2::zero()));
        let three = Fingerprint::Three(fingerprint3(&BlochTensor3::zero(), 2));
        let three_d1 = Fingerprint::Three(fingerprint3(&BlochTensor3::zero(), 1));
        assert!(fingerprints_equal(&two, &three, 1e-9).is_err());
        assert!(fingerprints_equal(&three, &three_d1, 1e-9).is_err());
    }

    #[test]
    fn canonical_text_is_stable_under_tiny_noise() {
        let f = fingerprint2(&BlochTensor2 {
            t1: RVec3::new(0.1, 0.2, 0.0),
            t2: RVec3::new(0.0, -0.3, 0.1),
            t12: RMat3::from_diagonal(&RVec3::new(0.5, 0.2, 0.1)),
        });
        let mut g = f.clone();
        g.l[0] += 1e-14;
        let a = Fingerprint::Two(f).canonical_text(1e-9);
        let b = Fingerprint::Two(g).canonical_text(1e-9);
        assert_eq!(a, b);
        assert_eq!(a.lines().next(), Some("kind=two"));
        assert!(a.contains("\ndet_T12=1.00000000000e-2\n"), "{a}");
    }
}
