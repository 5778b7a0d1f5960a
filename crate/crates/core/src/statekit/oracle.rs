use argmin::core::{CostFunction, Error as ArgminError, Executor, State};
use argmin::solver::neldermead::NelderMead;
use nalgebra::DMatrix;
use rand::Rng;

use super::RngSeed;
use crate::bloch::{kron_all, DensityMatrix};
use crate::pauli::{sigma, CMat2, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Best `‖σ − UρU†‖_F` found; an upper bound on the orbit distance.
    pub min_distance: f64,
    pub best_unitaries: Vec<CMat2>,
    pub restarts_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub restarts: usize,
    /// Stop as soon as a distance at or below this is reached.
    pub target_distance: f64,
    /// Nelder–Mead iterations per simplex.
    pub max_iters: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { restarts: 100, target_distance: 1e-10, max_iters: 4000 }
    }
}

/// `exp(−i (v·σ)/2)`.
fn rotation_unitary(v: &[f64]) -> CMat2 {
    let angle = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if angle == 0.0 {
        return CMat2::identity();
    }
    let (s, c) = (angle / 2.0).sin_cos();
    let mut gen = CMat2::zeros();
    for k in 0..3 {
        gen += sigma(k) * C64::new(v[k] / angle, 0.0);
    }
    CMat2::identity() * C64::new(c, 0.0) - gen * C64::new(0.0, s)
}

fn unitaries(theta: &[f64]) -> Vec<CMat2> {
    theta.chunks(3).map(rotation_unitary).collect()
}

struct Distance<'a> {
    rho: &'a DMatrix<C64>,
    sigma: &'a DMatrix<C64>,
}

impl Distance<'_> {
    fn eval(&self, theta: &[f64]) -> f64 {
        let u = kron_all(&unitaries(theta));
        (self.sigma - &u * self.rho * u.adjoint()).norm_squared()
    }
}

impl CostFunction for Distance<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> Result<f64, ArgminError> {
        Ok(self.eval(p))
    }
}

fn simplex(center: &[f64], step: f64) -> Vec<Vec<f64>> {
    let mut out = vec![center.to_vec()];
    for i in 0..center.len() {
        let mut v = center.to_vec();
        v[i] += step;
        out.push(v);
    }
    out
}

/// Iterations for the first, wide simplex; a start still farther than
/// `SCOUT_DISTANCE` afterwards is treated as a local minimum and dropped.
const SCOUT_ITERS: u64 = 800;
const SCOUT_DISTANCE: f64 = 1e-2;

fn nelder_mead(cost: &Distance<'_>, center: &[f64], step: f64, iters: u64, target: f64) -> Option<(f64, Vec<f64>)> {
    let solver = NelderMead::new(simplex(center, step)).with_sd_tolerance(0.0).ok()?;
    let res = Executor::new(Distance { rho: cost.rho, sigma: cost.sigma }, solver)
        .configure(|s| s.max_iters(iters).target_cost(target))
        .run()
        .ok()?;
    let state = res.state();
    state.get_best_param().map(|p| (state.get_best_cost(), p.clone()))
}

/// One local search: a wide scouting simplex followed by polishing passes.
fn local_search(cost: &Distance<'_>, start: Vec<f64>, opts: &OracleOptions) -> (f64, Vec<f64>) {
    let mut best = (cost.eval(&start), start);
    let target = opts.target_distance * opts.target_distance;
    for (pass, step) in [0.5, 0.05, 1e-3, 1e-6].into_iter().enumerate() {
        if best.0 <= target {
            break;
        }
        let iters = if pass == 0 { SCOUT_ITERS.min(opts.max_iters) } else { opts.max_iters };
        if let Some(found) = nelder_mead(cost, &best.1, step, iters, target) {
            if found.0 < best.0 {
                best = found;
            }
        }
        if pass == 0 && best.0 > SCOUT_DISTANCE * SCOUT_DISTANCE {
            break;
        }
    }
    best
}

/// Minimises `‖σ − (U₁⊗…⊗Uₙ)ρ(U₁⊗…⊗Uₙ)†‖_F` over per-qubit SU(2) factors by
/// Nelder–Mead from `restarts` starting points (the identity first).
pub fn oracle_min_distance(rho: &DensityMatrix, sigma: &DensityMatrix, restarts: usize, seed: RngSeed) -> OracleResult {
    oracle_min_distance_with(rho, sigma, seed, &OracleOptions { restarts, ..OracleOptions::default() })
}

pub fn oracle_min_distance_with(rho: &DensityMatrix, sigma: &DensityMatrix, seed: RngSeed, opts: &OracleOptions) -> OracleResult {
    assert_eq!(rho.dim(), sigma.dim(), "oracle needs states of equal dimension");
    let n = 3 * rho.qubits();
    let cost = Distance { rho: rho.matrix(), sigma: sigma.matrix() };
    let mut rng = seed.rng();
    let mut best = (f64::INFINITY, vec![0.0; n]);
    let mut used = 0;
    for r in 0..opts.restarts.max(1) {
        used = r + 1;
        let start = if r == 0 {
            vec![0.0; n]
        } else {
            (0..n).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
        };
        let found = local_search(&cost, start, opts);
        if found.0 < best.0 {
            best = found;
        }
        if best.0.sqrt() <= opts.target_distance {
            break;
        }
    }
    OracleResult { min_distance: best.0.max(0.0).sqrt(), best_unitaries: unitaries(&best.1), restarts_used: used }
}

/// `‖eigs(ρ) − eigs(σ)‖₂` with both spectra sorted; no unitary conjugation
/// can bring the states closer than this.
pub fn spectral_lower_bound(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    rho.eigenvalues()
        .iter()
        .zip(sigma.eigenvalues())
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt()
}
