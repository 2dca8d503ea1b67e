use num_complex::Complex64;
use proptest::prelude::*;
use qimpc_core::quantum::{
    dense_unitary_oracle, hadamard, matmul2, random_circuit, rot, rx, ry, rz, Circuit, GateOp, Mat2, RotConvention,
    StateVector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn max_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            d = d.max((a[i][j] - b[i][j]).norm());
        }
    }
    d
}

fn pipeline(circuit: &Circuit) -> Vec<Complex64> {
    let mut s = StateVector::zero(circuit.n_qubits()).unwrap();
    s.apply_circuit(circuit).unwrap();
    s.amplitudes().to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn statevector_matches_dense_oracle(n in 1usize..=4, gates in 0usize..40, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circuit = random_circuit(n, gates, &mut rng).unwrap();
        let oracle = dense_unitary_oracle(&circuit).unwrap().apply_to_zero();
        for (a, b) in pipeline(&circuit).iter().zip(&oracle) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn norm_is_preserved(n in 1usize..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circuit = random_circuit(n, 300, &mut rng).unwrap();
        let mut s = StateVector::zero(n).unwrap();
        s.apply_circuit(&circuit).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn same_axis_rotations_compose(a in -10.0..10.0f64, b in -10.0..10.0f64) {
        prop_assert!(max_diff(&matmul2(&rx(a), &rx(b)), &rx(a + b)) < 1e-12);
        prop_assert!(max_diff(&matmul2(&ry(a), &ry(b)), &ry(a + b)) < 1e-12);
        prop_assert!(max_diff(&matmul2(&rz(a), &rz(b)), &rz(a + b)) < 1e-12);
    }

    #[test]
    fn rot_is_time_ordered_product(p in prop::array::uniform3(-7.0..7.0f64)) {
        let zyz = matmul2(&rz(p[2]), &matmul2(&ry(p[1]), &rz(p[0])));
        prop_assert!(max_diff(&rot(p, RotConvention::Zyz), &zyz) < 1e-12);
        let zyx = matmul2(&rx(p[2]), &matmul2(&ry(p[1]), &rz(p[0])));
        prop_assert!(max_diff(&rot(p, RotConvention::Zyx), &zyx) < 1e-12);
    }

    #[test]
    fn expectation_stays_in_unit_interval(n in 1usize..=5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circuit = random_circuit(n, 30, &mut rng).unwrap();
        let mut s = StateVector::zero(n).unwrap();
        s.apply_circuit(&circuit).unwrap();
        for w in 0..n {
            let z = s.expectation_z(w).unwrap();
            prop_assert!((-1.0..=1.0).contains(&z));
        }
    }
}

#[test]
fn norm_drift_after_a_thousand_gates() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let circuit = random_circuit(4, 1000, &mut rng).unwrap();
    let mut s = StateVector::zero(4).unwrap();
    s.apply_circuit(&circuit).unwrap();
    assert!((s.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn hadamard_is_self_inverse() {
    let hh = matmul2(&hadamard(), &hadamard());
    let id = [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ];
    assert!(max_diff(&hh, &id) < 1e-15);
}

#[test]
fn bell_pair_by_both_paths() {
    let c = Circuit::from_ops(2, vec![GateOp::H { wire: 0 }, GateOp::Cnot { control: 0, target: 1 }]).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let expected = [s, 0.0, 0.0, s];
    for (a, e) in pipeline(&c).iter().zip(expected) {
        assert!((a.re - e).abs() < 1e-15 && a.im.abs() < 1e-15);
    }
    let oracle = dense_unitary_oracle(&c).unwrap().apply_to_zero();
    for (a, e) in oracle.iter().zip(expected) {
        assert!((a.re - e).abs() < 1e-15);
    }
}

#[test]
fn sampling_is_reproducible() {
    let c = Circuit::from_ops(1, vec![GateOp::Ry { wire: 0, angle: 1.1 }]).unwrap();
    let mut s = StateVector::zero(1).unwrap();
    s.apply_circuit(&c).unwrap();
    let a = s.sample_expectation_z(0, 500, 42).unwrap();
    let b = s.sample_expectation_z(0, 500, 42).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
}
