use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weakform_qpinn::qsim::{
    adjoint_gradient, run_circuit, shift_rule_gradient, zero_state, Circuit, Gate, GateKind,
    Observable,
};

/// Random rotation/CNOT circuit; slots are reused at random so sharing is exercised.
fn random_circuit(rng: &mut ChaCha8Rng, max_qubits: usize, max_gates: usize) -> (Circuit, Vec<f64>) {
    let n = rng.gen_range(1..=max_qubits);
    let num_gates = rng.gen_range(1..=max_gates);
    let mut gates = Vec::new();
    let mut slots = 0usize;
    for _ in 0..num_gates {
        let pick = rng.gen_range(0..4);
        if pick == 3 && n > 1 {
            let c = rng.gen_range(0..n);
            let mut t = rng.gen_range(0..n - 1);
            if t >= c {
                t += 1;
            }
            gates.push(Gate::cnot(c, t));
        } else {
            let kind = [GateKind::Rx, GateKind::Ry, GateKind::Rz][pick % 3];
            let slot = if slots > 0 && rng.gen_bool(0.3) {
                rng.gen_range(0..slots)
            } else {
                slots += 1;
                slots - 1
            };
            gates.push(Gate::rotation(kind, rng.gen_range(0..n), slot));
        }
    }
    let angles = (0..slots).map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
    (Circuit::new(n, slots, gates).unwrap(), angles)
}

#[test]
fn zero_state_is_its_own_run() {
    assert_eq!(
        run_circuit(&Circuit::new(3, 0, vec![]).unwrap(), &[]).unwrap(),
        zero_state(3).unwrap()
    );
}

proptest! {
    #[test]
    fn norm_is_preserved(seed in any::<u64>()) {
        let (c, a) = random_circuit(&mut ChaCha8Rng::seed_from_u64(seed), 6, 40);
        prop_assert!((run_circuit(&c, &a).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cnot_is_an_involution(seed in any::<u64>()) {
        let (c, a) = random_circuit(&mut ChaCha8Rng::seed_from_u64(seed), 5, 20);
        prop_assume!(c.num_qubits() >= 2);
        let s = run_circuit(&c, &a).unwrap();
        let g = Gate::cnot(0, c.num_qubits() - 1);
        let mut t = s.clone();
        t.apply(&g, 0.0).unwrap();
        t.apply(&g, 0.0).unwrap();
        for (x, y) in s.amplitudes().iter().zip(t.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn shift_rule_matches_adjoint(seed in any::<u64>(), scale in 0.1f64..2.0, shift in -1.0f64..1.0) {
        let (c, a) = random_circuit(&mut ChaCha8Rng::seed_from_u64(seed), 5, 30);
        let obs = Observable::new(scale, shift);
        let (_, adj) = adjoint_gradient(&c, &a, &obs).unwrap();
        for s in 0..c.num_slots() {
            let sh = shift_rule_gradient(&c, &a, &obs, s).unwrap();
            prop_assert!((sh - adj[s]).abs() < 1e-10, "slot {}: {} vs {}", s, sh, adj[s]);
        }
    }

    #[test]
    fn adjoint_matches_finite_differences(seed in any::<u64>()) {
        let (c, a) = random_circuit(&mut ChaCha8Rng::seed_from_u64(seed), 4, 25);
        let obs = Observable::new(1.3, 0.4);
        let h = 1e-5;
        let (_, adj) = adjoint_gradient(&c, &a, &obs).unwrap();
        for s in 0..c.num_slots() {
            let mut p = a.clone();
            p[s] += h;
            let mut m = a.clone();
            m[s] -= h;
            let fd = (run_circuit(&c, &p).unwrap().expectation(&obs)
                - run_circuit(&c, &m).unwrap().expectation(&obs))
                / (2.0 * h);
            let rel = (fd - adj[s]).abs() / adj[s].abs().max(1e-8);
            prop_assert!(rel < 1e-6 || (fd - adj[s]).abs() < 1e-9, "slot {}: fd {} adj {}", s, fd, adj[s]);
        }
    }

    #[test]
    fn observable_is_affine(seed in 0u64..1000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c, angles) = random_circuit(&mut rng, 4, 15);
        let s = run_circuit(&c, &angles).unwrap();
        let unit = s.expectation(&Observable::magnetisation());
        let full = s.expectation(&Observable::new(a, b));
        prop_assert!((full - (a * unit + b)).abs() < 1e-12);
        let bound = a.abs() * c.num_qubits() as f64;
        prop_assert!(full <= bound + b + 1e-12 && full >= -bound + b - 1e-12);
    }
}
