use luinv_core::bloch::{from_bloch2, from_bloch3, to_bloch2, to_bloch3};
use luinv_core::equivalence2::align_gram;
use luinv_core::invariants::{cofactor, invariant_i};
use luinv_core::pauli::sigma;
use luinv_core::statekit::{haar_su2_rng, orbit_pair, random_density, random_rotation, RngSeed};
use luinv_core::{
    decide2, fingerprint2, fingerprint3, fingerprints_equal, so3_to_su2, su2_to_so3, BlochTensor2, Fingerprint, RMat3,
    RVec3, C64,
};
use proptest::prelude::*;

fn state2(seed: u64) -> BlochTensor2 {
    to_bloch2(&random_density(4, None, RngSeed(seed)).unwrap()).unwrap()
}

fn rotations(seed: u64, n: usize) -> Vec<RMat3> {
    let mut rng = RngSeed(seed).rng();
    (0..n).map(|_| random_rotation(&mut rng)).collect()
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn fingerprint2_is_rotation_invariant(s in any::<u64>(), r in any::<u64>()) {
        let b = state2(s);
        let o = rotations(r, 2);
        let a = Fingerprint::Two(fingerprint2(&b));
        let c = Fingerprint::Two(fingerprint2(&b.rotated(&o[0], &o[1])));
        prop_assert_eq!(fingerprints_equal(&a, &c, 1e-9).unwrap(), None);
    }

    #[test]
    fn fingerprint3_is_rotation_invariant(s in any::<u64>(), r in any::<u64>()) {
        let b = to_bloch3(&random_density(8, None, RngSeed(s)).unwrap()).unwrap();
        let o = rotations(r, 3);
        let a = Fingerprint::Three(fingerprint3(&b, 2));
        let c = Fingerprint::Three(fingerprint3(&b.rotated(&o[0], &o[1], &o[2]), 2));
        prop_assert_eq!(fingerprints_equal(&a, &c, 1e-9).unwrap(), None);
    }

    #[test]
    fn invariant_i_matches_cofactor_form(s in any::<u64>(), r in any::<u64>()) {
        let b = state2(s);
        let closed = 2.0 * (b.t1.transpose() * cofactor(&b.t12) * b.t2)[(0, 0)];
        prop_assert!((invariant_i(&b) - closed).abs() < 1e-12);
        let o = rotations(r, 2);
        prop_assert!((invariant_i(&b.rotated(&o[0], &o[1])) - closed).abs() < 1e-12);
    }

    #[test]
    fn su2_to_so3_is_a_homomorphism(s in any::<u64>()) {
        let mut rng = RngSeed(s).rng();
        let u = haar_su2_rng(&mut rng);
        let v = haar_su2_rng(&mut rng);
        let ouv = su2_to_so3(&(u * v)).unwrap();
        let prod = su2_to_so3(&u).unwrap() * su2_to_so3(&v).unwrap();
        prop_assert!((ouv - prod).norm() < 1e-12);
        // ±U give the same rotation
        prop_assert!((su2_to_so3(&(-u)).unwrap() - su2_to_so3(&u).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn so3_lift_round_trips(s in any::<u64>()) {
        let o = rotations(s, 1)[0];
        let u = so3_to_su2(&o).unwrap();
        prop_assert!((su2_to_so3(&u).unwrap() - o).norm() < 1e-12);
    }

    #[test]
    fn align_gram_recovers_rotation(s in any::<u64>(), n in 3usize..8) {
        let mut rng = RngSeed(s).rng();
        let o = random_rotation(&mut rng);
        let xs: Vec<RVec3> = (0..n).map(|_| random_rotation(&mut rng).column(0).into_owned() * (1.0 + n as f64)).collect();
        let ys: Vec<RVec3> = xs.iter().map(|x| o * x).collect();
        let found = align_gram(&xs, &ys, true).expect("aligned");
        prop_assert!((found - o).norm() < 1e-9);
    }

    #[test]
    fn decide2_is_symmetric(s in any::<u64>(), t in any::<u64>()) {
        let a = state2(s);
        let o = rotations(t, 2);
        let b = a.rotated(&o[0], &o[1]);
        let c = state2(t);
        prop_assert_eq!(decide2(&a, &b, 1e-9).unwrap().kind(), decide2(&b, &a, 1e-9).unwrap().kind());
        prop_assert_eq!(decide2(&a, &c, 1e-9).unwrap().kind(), decide2(&c, &a, 1e-9).unwrap().kind());
    }

    #[test]
    fn local_conjugation_rotates_bloch_data(s in any::<u64>(), t in any::<u64>()) {
        let rho = random_density(8, None, RngSeed(s)).unwrap();
        let (img, us) = orbit_pair(&rho, RngSeed(t));
        let o: Vec<RMat3> = us.iter().map(|u| su2_to_so3(u).unwrap()).collect();
        let expect = to_bloch3(&rho).unwrap().rotated(&o[0], &o[1], &o[2]);
        let got = to_bloch3(&img).unwrap();
        let diff: f64 = expect.t123.0.iter().zip(got.t123.0.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-12);
        prop_assert!((expect.t12 - got.t12).amax() < 1e-12);
        prop_assert!((expect.t3 - got.t3).amax() < 1e-12);
    }

    #[test]
    fn bloch_round_trips(s in any::<u64>()) {
        let rho2 = random_density(4, None, RngSeed(s)).unwrap();
        prop_assert!(from_bloch2(&to_bloch2(&rho2).unwrap()).unwrap().frobenius_distance(&rho2) < 1e-13);
        let rho3 = random_density(8, None, RngSeed(s)).unwrap();
        prop_assert!(from_bloch3(&to_bloch3(&rho3).unwrap()).unwrap().frobenius_distance(&rho3) < 1e-13);
    }
}

/// Expectation value `tr(ρ A⊗B)` computed directly.
fn expectation(rho: &luinv_core::DensityMatrix, a: &luinv_core::CMat2, b: &luinv_core::CMat2) -> f64 {
    let mut op = luinv_core::nalgebra::DMatrix::<C64>::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            op[(i, j)] = a[(i / 2, j / 2)] * b[(i % 2, j % 2)];
        }
    }
    (rho.matrix() * op).trace().re
}

#[test]
fn bloch_components_are_expectations() {
    let id = luinv_core::CMat2::identity();
    for seed in 0..10 {
        let rho = random_density(4, None, RngSeed(seed)).unwrap();
        let b = to_bloch2(&rho).unwrap();
        for i in 0..3 {
            assert!((b.t1[i] - expectation(&rho, &sigma(i), &id)).abs() < 1e-14);
            assert!((b.t2[i] - expectation(&rho, &id, &sigma(i))).abs() < 1e-14);
            for j in 0..3 {
                assert!((b.t12[(i, j)] - expectation(&rho, &sigma(i), &sigma(j))).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn haar_su2_is_uniform_on_first_entry() {
    let mut rng = RngSeed(99).rng();
    let n = 100_000;
    let mean = (0..n).map(|_| haar_su2_rng(&mut rng)[(0, 0)].norm_sqr()).sum::<f64>() / n as f64;
    // |U11|² is uniform on [0, 1], so the sample mean has sd ≈ 0.29/√n
    assert!((mean - 0.5).abs() < 0.005, "{mean}");
}
