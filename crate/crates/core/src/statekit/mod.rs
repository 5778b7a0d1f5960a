//! Seeded generators for states, unitaries and the special constructions used
//! in tests, plus an optimisation-based equivalence oracle.

mod oracle;

pub use oracle::{oracle_min_distance, oracle_min_distance_with, spectral_lower_bound, OracleOptions, OracleResult};

use nalgebra::{DMatrix, Quaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::bloch::{min_eigenvalue, BlochTensor2, BlochTensor3, DensityMatrix};
use crate::equivalence2::DegeneracyCase;
use crate::error::LuError;
use crate::families::build_families2;
use crate::invariants::fingerprint2;
use crate::linalg::{RMat3, RVec3};
use crate::pauli::{quaternion_to_su2, su2_to_so3_unchecked, CMat2, C64};

pub use crate::pauli::su2_to_so3;

/// Seed for every generator in this module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent child seed (splitmix64 of the pair).
    pub fn derive(self, index: u64) -> RngSeed {
        let mut z = self.0 ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x6A09_E667_F3BC_C909);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        RngSeed(z ^ (z >> 31))
    }
}

/// `ρ = GG†/tr(GG†)` for a `dim × rank` complex Gaussian `G`.
pub fn random_density(dim: usize, rank: Option<usize>, seed: RngSeed) -> Result<DensityMatrix, LuError> {
    random_density_rng(dim, rank, &mut seed.rng())
}

pub fn random_density_rng<R: Rng>(dim: usize, rank: Option<usize>, rng: &mut R) -> Result<DensityMatrix, LuError> {
    if dim != 4 && dim != 8 {
        return Err(LuError::WrongDimension { expected: 4, rows: dim, cols: dim });
    }
    let rank = rank.unwrap_or(dim);
    if rank == 0 || rank > dim {
        return Err(LuError::InvalidRank { rank, dim });
    }
    let g = DMatrix::<C64>::from_fn(dim, rank, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let mut m = &g * g.adjoint();
    let tr = m.trace().re;
    m /= C64::new(tr, 0.0);
    DensityMatrix::new(m)
}

/// Haar-random element of SU(2) from a normalised Gaussian quaternion.
pub fn haar_su2(seed: RngSeed) -> CMat2 {
    haar_su2_rng(&mut seed.rng())
}

pub fn haar_su2_rng<R: Rng>(rng: &mut R) -> CMat2 {
    let mut q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    q.iter_mut().for_each(|x| *x /= n);
    quaternion_to_su2(&Quaternion::new(q[0], q[1], q[2], q[3]))
}

/// Uniformly random rotation, as the image of a Haar SU(2) element.
pub fn random_rotation<R: Rng>(rng: &mut R) -> RMat3 {
    su2_to_so3_unchecked(&haar_su2_rng(rng))
}

/// Applies independent Haar unitaries to every qubit and returns the image
/// together with the unitaries used.
pub fn orbit_pair(rho: &DensityMatrix, seed: RngSeed) -> (DensityMatrix, Vec<CMat2>) {
    let mut rng = seed.rng();
    let us: Vec<CMat2> = (0..rho.qubits()).map(|_| haar_su2_rng(&mut rng)).collect();
    (rho.apply_local(&us), us)
}

/// The Bell state `(|00⟩ + |11⟩)/√2`.
pub fn bell_phi_plus() -> DensityMatrix {
    let mut m = DMatrix::<C64>::zeros(4, 4);
    for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[(i, j)] = C64::new(0.5, 0.0);
    }
    DensityMatrix::new(m).expect("Bell state is valid")
}

/// The GHZ state `(|000⟩ + |111⟩)/√2`.
pub fn ghz() -> DensityMatrix {
    let mut m = DMatrix::<C64>::zeros(8, 8);
    for &(i, j) in &[(0, 0), (0, 7), (7, 0), (7, 7)] {
        m[(i, j)] = C64::new(0.5, 0.0);
    }
    DensityMatrix::new(m).expect("GHZ state is valid")
}

/// Random mixture of the four Bell states (`T1 = T2 = 0`, diagonal `T12`).
pub fn bell_diagonal(seed: RngSeed) -> BlochTensor2 {
    let mut rng = seed.rng();
    let w: [f64; 4] = std::array::from_fn(|_| Exp1.sample(&mut rng));
    let total: f64 = w.iter().sum();
    let diags = [[1.0, -1.0, 1.0], [-1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [-1.0, -1.0, -1.0]];
    let mut d = RVec3::zeros();
    for (wk, dk) in w.iter().zip(diags) {
        d += RVec3::from(dk) * (wk / total);
    }
    BlochTensor2 { t12: RMat3::from_diagonal(&d), ..BlochTensor2::zero() }
}

fn mixing_factor(m: &DMatrix<C64>, dim: usize, margin: f64) -> f64 {
    let shifted = m - DMatrix::<C64>::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0);
    let lam = min_eigenvalue(&shifted);
    if lam >= 0.0 {
        1.0
    } else {
        (margin / (-(dim as f64) * lam)).min(1.0)
    }
}

/// Scales Bloch data toward the maximally mixed state until the matrix it
/// describes is positive with room to spare (`margin < 1`).
pub fn mix_to_physical2(b: &BlochTensor2, margin: f64) -> BlochTensor2 {
    b.scaled(mixing_factor(&b.to_matrix(), 4, margin))
}

pub fn mix_to_physical3(b: &BlochTensor3, margin: f64) -> BlochTensor3 {
    b.scaled(mixing_factor(&b.to_matrix(), 8, margin))
}

fn uniform_vec<R: Rng>(rng: &mut R) -> RVec3 {
    RVec3::from_fn(|_, _| rng.random_range(-1.0..1.0))
}

/// Three distinct values in `[0.2, 1]` in descending order, pairwise at least
/// 0.05 apart.
fn distinct_values<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let mut v: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.2..1.0));
        v.sort_by(|a, b| b.total_cmp(a));
        if v[0] - v[1] >= 0.05 && v[1] - v[2] >= 0.05 {
            return v;
        }
    }
}

/// Two-qubit Bloch data whose `T12` has the singular-value pattern of `case`
/// and whose local vectors are placed so that neither vector family spans
/// three dimensions. Built in the singular frame, rotated by random frames,
/// then mixed toward `I/4` to be physical. Sub-variants are picked by the seed.
pub fn frame_state(case: DegeneracyCase, seed: RngSeed) -> BlochTensor2 {
    let mut rng = seed.rng();
    let mut x1 = uniform_vec(&mut rng);
    let mut x2 = uniform_vec(&mut rng);
    let d: RVec3 = match case {
        DegeneracyCase::Distinct => {
            let z = rng.random_range(0..3);
            x1[z] = 0.0;
            x2[z] = 0.0;
            RVec3::from(distinct_values(&mut rng))
        }
        DegeneracyCase::DistinctWithZero => {
            let z = rng.random_range(0..2);
            x1[z] = 0.0;
            x2[z] = 0.0;
            let v = distinct_values(&mut rng);
            RVec3::new(v[0], v[1], 0.0)
        }
        DegeneracyCase::Pair => {
            let v = distinct_values(&mut rng);
            match rng.random_range(0..4) {
                0 => {
                    // planar parts parallel
                    let lam = rng.random_range(-1.5..1.5);
                    x2[0] = lam * x1[0];
                    x2[1] = lam * x1[1];
                    RVec3::new(v[0], v[0], v[2])
                }
                1 => {
                    x1[2] = 0.0;
                    x2[2] = 0.0;
                    RVec3::new(v[0], v[0], v[2])
                }
                2 => {
                    let lam = rng.random_range(-1.5..1.5);
                    x2[0] = lam * x1[0];
                    x2[1] = lam * x1[1];
                    RVec3::new(v[0], v[0], 0.0)
                }
                _ => RVec3::new(v[0], 0.0, 0.0),
            }
        }
        DegeneracyCase::Scalar => {
            let t = rng.random_range(0.2..1.0);
            let last = if rng.random_bool(0.5) { t } else { -t };
            RVec3::new(t, t, last)
        }
        DegeneracyCase::Zero => RVec3::zeros(),
    };
    let q1 = random_rotation(&mut rng);
    let q2 = random_rotation(&mut rng);
    let b = BlochTensor2 { t1: q1 * x1, t2: q2 * x2, t12: q1 * RMat3::from_diagonal(&d) * q2.transpose() };
    mix_to_physical2(&b, 0.9)
}

/// A pair `(b, b̂)` sharing `T12` and all Gram-type invariants, with
/// `T̂₁ = F·T₁` for the reflection `F = diag(1, 1, −1)` and `T₂ = T̂₂ = 0`.
///
/// `T12` is block diagonal (a random 2×2 block and a scalar) with three
/// distinct singular values, so `F·T12·F = T12`. `T₁ ∝ (1, 1, 1)`; both
/// states are scaled by a common mixing factor to be positive. Resampled
/// until the first vector family spans three dimensions.
pub fn triple_counterexample(seed: RngSeed) -> (BlochTensor2, BlochTensor2) {
    let mut rng = seed.rng();
    let f = RMat3::from_diagonal(&RVec3::new(1.0, 1.0, -1.0));
    loop {
        let s = distinct_values(&mut rng);
        let rot = |t: f64| nalgebra::Matrix2::new(t.cos(), -t.sin(), t.sin(), t.cos());
        let block = rot(rng.random_range(0.0..std::f64::consts::TAU))
            * nalgebra::Matrix2::new(s[0], 0.0, 0.0, s[2])
            * rot(rng.random_range(0.0..std::f64::consts::TAU));
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let mut t12 = RMat3::zeros();
        t12.fixed_view_mut::<2, 2>(0, 0).copy_from(&block);
        t12[(2, 2)] = sign * s[1];
        let a = BlochTensor2 { t1: RVec3::new(1.0, 1.0, 1.0), t2: RVec3::zeros(), t12 };
        let b = BlochTensor2 { t1: f * a.t1, ..a };
        let p = mixing_factor(&a.to_matrix(), 4, 0.9).min(mixing_factor(&b.to_matrix(), 4, 0.9));
        let (a, b) = (a.scaled(p), b.scaled(p));
        if build_families2(&a).0.dim == 3 && fingerprint2(&a).triple_mu.is_some_and(|t| t.abs() > 1e-6) {
            return (a, b);
        }
    }
}

/// Three-qubit Bloch data with `T₃ = 0`: a random state with its third local
/// vector removed, mixed toward `I/8` to stay positive.
pub fn zero_t3_state(seed: RngSeed) -> Result<BlochTensor3, LuError> {
    let rho = random_density(8, None, seed)?;
    let mut b = crate::bloch::to_bloch3(&rho)?;
    b.t3 = RVec3::zeros();
    Ok(mix_to_physical3(&b, 0.9))
}
