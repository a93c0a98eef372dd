//! Build a small parameterised circuit and compare the three gradient routes:
//! adjoint, parameter shift, and finite differences.

use weakform_qpinn::qsim::{adjoint_gradient, run_circuit, shift_rule_gradient, Circuit, Gate, GateKind, Observable};

fn main() -> weakform_qpinn::Result<()> {
    let gates = vec![
        Gate::rotation(GateKind::Rx, 0, 0),
        Gate::rotation(GateKind::Ry, 1, 1),
        Gate::cnot(0, 1),
        Gate::rotation(GateKind::Rx, 1, 2),
        Gate::rotation(GateKind::Ry, 0, 1),
        Gate::cnot(1, 2),
        Gate::rotation(GateKind::Rx, 2, 0),
    ];
    let circuit = Circuit::new(3, 3, gates)?;
    let angles = [0.4, -1.1, 2.3];
    let obs = Observable::magnetisation();

    let state = run_circuit(&circuit, &angles)?;
    println!("<ΣZ> = {:.12}  (norm {:.15})", state.expectation(&obs), state.norm());

    let (value, adjoint) = adjoint_gradient(&circuit, &angles, &obs)?;
    println!("value via adjoint pass = {value:.12}");
    println!("slot   adjoint          shift rule       finite diff");
    for slot in 0..circuit.num_slots() {
        let shift = shift_rule_gradient(&circuit, &angles, &obs, slot)?;
        let h = 1e-5;
        let mut up = angles;
        up[slot] += h;
        let mut down = angles;
        down[slot] -= h;
        let fd = (run_circuit(&circuit, &up)?.expectation(&obs) - run_circuit(&circuit, &down)?.expectation(&obs))
            / (2.0 * h);
        println!("{slot:4}   {:+.12}  {shift:+.12}  {fd:+.12}", adjoint[slot]);
    }
    Ok(())
}
