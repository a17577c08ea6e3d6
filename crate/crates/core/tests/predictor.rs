use std::sync::Arc;

use poroelastic_ader::basis::{block_start, num_modes, ReferenceOperators};
use poroelastic_ader::material::{assemble_jacobians, Mat13};
use poroelastic_ader::stp::{
    assemble_system, build_operator, cost_model, predict, predict_counted, predict_intermediate, predict_oracle, random_instance,
    relative_deviation, residual, FlopTally, StpOperator, Variant,
};
use poroelastic_ader::{ExecMode, Jacobians, MaterialParameters, NUM_QUANTITIES};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const IDENTITY: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

fn reference(degree: usize) -> Arc<ReferenceOperators> {
    Arc::new(ReferenceOperators::new(degree).unwrap())
}

fn zero_jacobians() -> Jacobians {
    Jacobians { flux: [Mat13::zeros(); 3], source: Mat13::zeros() }
}

fn state(degree: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_instance(degree, &mut rng).unwrap().q0
}

#[test]
fn no_dynamics_keeps_state_constant() {
    for degree in 1..=5 {
        let op = build_operator(&zero_jacobians(), IDENTITY, 1.0, reference(degree)).unwrap();
        let q0 = state(degree, 3);
        let q = predict(&op, &q0).unwrap();
        for tau in [0.0, 0.3, 1.0] {
            for (a, b) in q.evaluate_in_time(tau).iter().zip(&q0) {
                assert!((a - b).abs() <= 1e-13 * b.abs().max(1.0));
            }
        }
        let oracle = predict_oracle(&op, &q0).unwrap();
        assert!(relative_deviation(&q, &oracle) < 1e-13);
        let (alg1, stats) = predict_intermediate(&op, &q0, Variant::Alg1).unwrap();
        assert_eq!(stats.solves, num_modes(degree));
        assert!(relative_deviation(&alg1, &q) < 1e-13);
    }
}

/// Pure source `dq/dt = e q` on one quantity, solved over a unit step.
fn exponential_error(degree: usize, e: f64) -> f64 {
    let mut jac = zero_jacobians();
    jac.source[(10, 10)] = e;
    let op = build_operator(&jac, IDENTITY, 1.0, reference(degree)).unwrap();
    let nb = num_modes(degree);
    let mut q0 = vec![0.0; NUM_QUANTITIES * nb];
    q0[10 * nb] = 1.0;
    let q = predict(&op, &q0).unwrap();
    (q.evaluate_in_time(1.0)[10 * nb] - e.exp()).abs()
}

#[test]
fn stiff_exponential_decay() {
    assert!(exponential_error(5, -2.0) < 1e-6);
    // Stays bounded for very stiff sources.
    for e in [-10.0, -1e3, -1e6] {
        assert!(exponential_error(3, e) < 1.0);
    }
}

#[test]
fn exponential_converges_in_dt() {
    for degree in 1..=4 {
        let errors: Vec<f64> = [-0.8, -0.4, -0.2].iter().map(|&e| exponential_error(degree, e)).collect();
        for w in errors.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= degree as f64 + 0.5, "degree {degree}: order {order}");
        }
    }
}

#[test]
fn variants_agree_on_random_instances() {
    for degree in 1..=3 {
        let r = reference(degree);
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let inst = random_instance(degree, &mut rng).unwrap();
            let op = inst.operator(r.clone()).unwrap();
            let fast = predict(&op, &inst.q0).unwrap();
            let (a1, _) = predict_intermediate(&op, &inst.q0, Variant::Alg1).unwrap();
            let (a2, _) = predict_intermediate(&op, &inst.q0, Variant::Alg2).unwrap();
            assert!(relative_deviation(&a1, &fast) < 1e-11);
            assert!(relative_deviation(&a2, &fast) < 1e-11);
            assert!(residual(&op, &inst.q0, &fast) < 1e-10);
        }
    }
}

#[test]
fn inviscid_skips_source_updates() {
    let jac = assemble_jacobians(&MaterialParameters::plane_wave_benchmark().inviscid()).unwrap();
    let op = build_operator(&jac, IDENTITY, 1e-5, reference(2)).unwrap();
    let (_, stats) = predict_intermediate(&op, &state(2, 1), Variant::Alg2).unwrap();
    assert_eq!(stats.source_updates, 0);
    let jac = assemble_jacobians(&MaterialParameters::plane_wave_benchmark()).unwrap();
    let op = build_operator(&jac, IDENTITY, 1e-5, reference(2)).unwrap();
    let (_, stats) = predict_intermediate(&op, &state(2, 1), Variant::Alg2).unwrap();
    assert_eq!(stats.source_updates, 3 * num_modes(2));
}

#[test]
fn flop_count_within_closed_form() {
    let jac = assemble_jacobians(&MaterialParameters::plane_wave_benchmark()).unwrap();
    for degree in 1..=7 {
        let op = build_operator(&jac, IDENTITY, 1e-5, reference(degree)).unwrap();
        let mut tally = FlopTally::default();
        predict_counted(&op, &state(degree, 2), &mut tally).unwrap();
        let bound = cost_model(degree).unwrap().flops_stp;
        assert!(tally.0 <= bound, "degree {degree}: {} > {bound}", tally.0);
        // Per degree block: resolvents, source coupling and, above the
        // constant block, three Jacobian products and lower-mode updates.
        let (q, nt) = (NUM_QUANTITIES as u64, degree as u64 + 1);
        let mut expected = q * num_modes(degree) as u64 * nt;
        for k in 0..=degree {
            let (lo, d) = (block_start(k) as u64, (num_modes(k) - block_start(k)) as u64);
            expected += q * 2 * d * nt * nt + 3 * 2 * d * nt;
            if k > 0 {
                expected += 3 * (2 * q * q * d * nt + 2 * lo * d * q * nt);
            }
        }
        assert_eq!(tally.0, expected, "degree {degree}");
    }
}

#[test]
fn rejects_non_finite_state() {
    let jac = assemble_jacobians(&MaterialParameters::plane_wave_benchmark()).unwrap();
    let op = build_operator(&jac, IDENTITY, 1e-5, reference(1)).unwrap();
    let mut q0 = state(1, 0);
    q0[7] = f64::NAN;
    assert!(predict(&op, &q0).unwrap_err().is_numerical());
    assert!(predict(&op, &q0[1..]).is_err());
}

/// Nonzeros of the assembled system only occur in the diagonal mode blocks
/// and in couplings from a mode to modes of strictly higher degree, diagonal
/// in the temporal index.
fn check_block_pattern(op: &StpOperator) {
    let degree = op.degree();
    let nt = degree + 1;
    let nb = num_modes(degree);
    let y = assemble_system(op);
    let deg = |k: usize| (0..=degree).find(|&n| k < num_modes(n)).unwrap();
    let mut diagonal_nonzeros = 0;
    let mut coupling_nonzeros = 0;
    for i in 0..y.nrows() {
        let (k, p, r) = (i / (NUM_QUANTITIES * nt), (i / nt) % NUM_QUANTITIES, i % nt);
        for j in 0..y.ncols() {
            let (l, q, s) = (j / (NUM_QUANTITIES * nt), (j / nt) % NUM_QUANTITIES, j % nt);
            let v = y[(i, j)];
            if v == 0.0 {
                continue;
            }
            if k == l {
                assert!(p == q || (r == s && q > p), "diagonal block entry ({k},{p},{r}) ({l},{q},{s})");
                diagonal_nonzeros += 1;
            } else {
                assert!(deg(l) > deg(k) && r == s, "coupling entry ({k},{p},{r}) ({l},{q},{s})");
                coupling_nonzeros += 1;
            }
        }
    }
    assert!(diagonal_nonzeros > 0 && coupling_nonzeros > 0);
    assert_eq!(block_start(1), 1);
    assert_eq!(y.nrows(), NUM_QUANTITIES * nb * nt);
}

#[test]
fn system_block_pattern() {
    let jac = assemble_jacobians(&MaterialParameters::plane_wave_benchmark()).unwrap();
    for degree in [1, 2] {
        let g = [[1.3, 0.2, -0.1], [0.4, 2.0, 0.3], [-0.2, 0.1, 0.9]];
        let op = build_operator(&jac, g, 1e-4, reference(degree)).unwrap();
        check_block_pattern(&op);
    }
}

#[test]
fn oracle_suite_runs_in_both_modes() {
    let seq = poroelastic_ader::stp::run_oracle_suite(2, 11, 6, ExecMode::Sequential).unwrap();
    let par = poroelastic_ader::stp::run_oracle_suite(2, 11, 6, ExecMode::Parallel).unwrap();
    assert_eq!(seq, par);
    assert!(seq.max_deviation() < 1e-10 && seq.max_residual < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn predict_matches_dense_solve(seed in any::<u64>(), degree in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(degree, &mut rng).unwrap();
        let op = inst.operator(reference(degree)).unwrap();
        let fast = predict(&op, &inst.q0).unwrap();
        let dense = predict_oracle(&op, &inst.q0).unwrap();
        prop_assert!(relative_deviation(&fast, &dense) < 1e-10);
        prop_assert!(residual(&op, &inst.q0, &fast) < 1e-10);
    }

    #[test]
    fn predict_is_linear(seed in any::<u64>(), a in -3.0f64..3.0) {
        let degree = 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(degree, &mut rng).unwrap();
        let other = random_instance(degree, &mut rng).unwrap().q0;
        let op = inst.operator(reference(degree)).unwrap();
        let combo: Vec<f64> = inst.q0.iter().zip(&other).map(|(x, y)| a * x + y).collect();
        let lhs = predict(&op, &combo).unwrap();
        let (p1, p2) = (predict(&op, &inst.q0).unwrap(), predict(&op, &other).unwrap());
        let rhs: Vec<f64> = p1.as_slice().iter().zip(p2.as_slice()).map(|(x, y)| a * x + y).collect();
        let rhs = poroelastic_ader::stp::DofTensor::from_vec(degree, rhs).unwrap();
        prop_assert!(relative_deviation(&lhs, &rhs) < 1e-12);
    }
}
