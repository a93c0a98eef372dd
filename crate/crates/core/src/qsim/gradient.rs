use num_complex::Complex64;

use super::circuit::{Circuit, GateShift, Observable};
use super::state::{apply_inverse_unchecked, re_generator_inner, z_sum_apply};
use crate::error::{contract, Result};

use std::f64::consts::FRAC_PI_2;

/// Reverse-mode gradient of `<obs>` with respect to every angle slot.
///
/// Slots read by several gates accumulate one contribution per occurrence.
pub fn adjoint_gradient(
    circuit: &Circuit,
    angles: &[f64],
    obs: &Observable,
) -> Result<(f64, Vec<f64>)> {
    shifted_adjoint_gradient(circuit, angles, &[], obs)
}

/// [`adjoint_gradient`] of the circuit with extra per-occurrence shifts applied.
pub fn shifted_adjoint_gradient(
    circuit: &Circuit,
    angles: &[f64],
    shifts: &[GateShift],
    obs: &Observable,
) -> Result<(f64, Vec<f64>)> {
    circuit.check_angles(angles)?;
    let gate_angles = circuit.gate_angles(angles, shifts);
    let n = circuit.num_qubits();
    let state = circuit.run_gate_angles(&gate_angles);
    let value = state.expectation(obs);

    let mut psi = state.amplitudes().to_vec();
    let mut lam = vec![Complex64::new(0.0, 0.0); psi.len()];
    z_sum_apply(&psi, n, &mut lam);
    for l in lam.iter_mut() {
        *l *= obs.scale;
    }

    let mut grad = vec![0.0; circuit.num_slots()];
    for (g, &a) in circuit.gates().iter().zip(&gate_angles).rev() {
        if let Some(s) = g.slot {
            grad[s] += 2.0 * re_generator_inner(&lam, &psi, n, g);
        }
        apply_inverse_unchecked(&mut psi, n, g, a);
        apply_inverse_unchecked(&mut lam, n, g, a);
    }
    Ok((value, grad))
}

/// Two-point parameter-shift derivative of `<obs>` with respect to `slot`,
/// shifting each occurrence of the slot separately by ±π/2 and summing.
pub fn shift_rule_gradient(
    circuit: &Circuit,
    angles: &[f64],
    obs: &Observable,
    slot: usize,
) -> Result<f64> {
    circuit.check_angles(angles)?;
    if slot >= circuit.num_slots() {
        return Err(contract(format!("slot {slot} out of range")));
    }
    let mut total = 0.0;
    for gate in circuit.occurrences(slot) {
        if !circuit.gates()[gate].kind.is_rotation() {
            return Err(contract(format!("slot {slot} is read by a non-rotation gate")));
        }
        let plus = super::circuit::shifted_expectation(
            circuit,
            angles,
            &[GateShift { gate, offset: FRAC_PI_2 }],
            obs,
        )?;
        let minus = super::circuit::shifted_expectation(
            circuit,
            angles,
            &[GateShift { gate, offset: -FRAC_PI_2 }],
            obs,
        )?;
        total += 0.5 * (plus - minus);
    }
    Ok(total)
}
