use super::state::{apply_unchecked, zero_state, StateVector};
use crate::error::{config, contract, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    Cnot,
}

impl GateKind {
    pub fn is_rotation(self) -> bool {
        !matches!(self, GateKind::Cnot)
    }
}

/// One gate of a circuit. Rotations read their angle from `slot`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
    pub slot: Option<usize>,
}

impl Gate {
    pub fn rotation(kind: GateKind, target: usize, slot: usize) -> Self {
        assert!(kind.is_rotation(), "use Gate::cnot for CNOT");
        Self {
            kind,
            target,
            control: None,
            slot: Some(slot),
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::Cnot,
            target,
            control: Some(control),
            slot: None,
        }
    }

    pub(crate) fn check(&self, num_qubits: usize) -> Result<()> {
        if self.target >= num_qubits {
            return Err(config(format!(
                "gate target {} out of range for {num_qubits} qubits",
                self.target
            )));
        }
        match (self.kind, self.control, self.slot) {
            (GateKind::Cnot, Some(c), None) => {
                if c >= num_qubits {
                    return Err(config(format!("CNOT control {c} out of range")));
                }
                if c == self.target {
                    return Err(config(format!("CNOT control equals target ({c})")));
                }
                Ok(())
            }
            (GateKind::Cnot, _, _) => Err(config("CNOT needs a control and no angle slot")),
            (_, None, Some(_)) => Ok(()),
            _ => Err(config("rotation needs an angle slot and no control")),
        }
    }
}

/// `C = a Σ_j Z_j + b I`: scale `a` and shift `b` of the qubit magnetisation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observable {
    pub scale: f64,
    pub shift: f64,
}

impl Observable {
    pub fn new(scale: f64, shift: f64) -> Self {
        Self { scale, shift }
    }

    /// The bare magnetisation `Σ_j Z_j`.
    pub fn magnetisation() -> Self {
        Self::new(1.0, 0.0)
    }
}

/// An ordered gate list over a fixed register with shared angle slots.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    num_slots: usize,
    gates: Vec<Gate>,
}

/// Extra angle added to a single gate occurrence, independently of its slot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateShift {
    pub gate: usize,
    pub offset: f64,
}

impl Circuit {
    /// Validates indices and that every slot in `0..num_slots` is used by some rotation.
    pub fn new(num_qubits: usize, num_slots: usize, gates: Vec<Gate>) -> Result<Self> {
        zero_state(num_qubits)?;
        let mut used = vec![false; num_slots];
        for g in &gates {
            g.check(num_qubits)?;
            if let Some(s) = g.slot {
                if s >= num_slots {
                    return Err(config(format!("slot {s} out of range ({num_slots} slots)")));
                }
                used[s] = true;
            }
        }
        if let Some(s) = used.iter().position(|u| !u) {
            return Err(config(format!("angle slot {s} is not referenced by any gate")));
        }
        Ok(Self {
            num_qubits,
            num_slots,
            gates,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_slots(&self) -> usize {
        self.num_slots
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Indices of the gates reading `slot`.
    pub fn occurrences(&self, slot: usize) -> Vec<usize> {
        self.gates
            .iter()
            .enumerate()
            .filter(|(_, g)| g.slot == Some(slot))
            .map(|(i, _)| i)
            .collect()
    }

    pub(crate) fn check_angles(&self, angles: &[f64]) -> Result<()> {
        if angles.len() != self.num_slots {
            return Err(contract(format!(
                "expected {} angles, got {}",
                self.num_slots,
                angles.len()
            )));
        }
        if let Some(a) = angles.iter().find(|a| !a.is_finite()) {
            return Err(contract(format!("non-finite angle {a}")));
        }
        Ok(())
    }

    /// Angle seen by each gate (0 for CNOT) after applying per-occurrence shifts.
    pub(crate) fn gate_angles(&self, angles: &[f64], shifts: &[GateShift]) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .gates
            .iter()
            .map(|g| g.slot.map_or(0.0, |s| angles[s]))
            .collect();
        for sh in shifts {
            out[sh.gate] += sh.offset;
        }
        out
    }

    pub(crate) fn run_gate_angles(&self, gate_angles: &[f64]) -> StateVector {
        let mut state = zero_state(self.num_qubits).expect("validated register");
        let n = self.num_qubits;
        let amps = state.amps_mut();
        for (g, &a) in self.gates.iter().zip(gate_angles) {
            apply_unchecked(amps, n, g, a);
        }
        state
    }
}

/// Evolves `|0...0>` through the circuit.
pub fn run_circuit(circuit: &Circuit, angles: &[f64]) -> Result<StateVector> {
    circuit.check_angles(angles)?;
    Ok(circuit.run_gate_angles(&circuit.gate_angles(angles, &[])))
}

/// Runs with extra per-occurrence shifts and returns the observable's expectation.
pub fn shifted_expectation(
    circuit: &Circuit,
    angles: &[f64],
    shifts: &[GateShift],
    obs: &Observable,
) -> Result<f64> {
    circuit.check_angles(angles)?;
    if let Some(sh) = shifts.iter().find(|s| s.gate >= circuit.gates.len()) {
        return Err(contract(format!("shift targets missing gate {}", sh.gate)));
    }
    Ok(circuit
        .run_gate_angles(&circuit.gate_angles(angles, shifts))
        .expectation(obs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unused_slot_rejected() {
        let err = Circuit::new(1, 2, vec![Gate::rotation(GateKind::Ry, 0, 0)]);
        assert!(err.is_err());
    }

    #[test]
    fn empty_circuit_is_identity() {
        let c = Circuit::new(3, 0, vec![]).unwrap();
        assert_eq!(run_circuit(&c, &[]).unwrap(), zero_state(3).unwrap());
    }

    #[test]
    fn single_ry_gives_cosine() {
        let c = Circuit::new(1, 1, vec![Gate::rotation(GateKind::Ry, 0, 0)]).unwrap();
        for theta in [-2.0, -0.3, 0.0, 0.9, 2.5] {
            let e = run_circuit(&c, &[theta]).unwrap().expectation(&Observable::magnetisation());
            assert!((e - f64::cos(theta)).abs() < 1e-14);
        }
    }

    #[test]
    fn shared_slot_composes_angles() {
        let g = Gate::rotation(GateKind::Ry, 0, 0);
        let c = Circuit::new(1, 1, vec![g, g]).unwrap();
        for theta in [-1.7, 0.4, 3.0] {
            let e = run_circuit(&c, &[theta / 2.0])
                .unwrap()
                .expectation(&Observable::magnetisation());
            assert!((e - f64::cos(theta)).abs() < 1e-14);
        }
    }

    #[test]
    fn angle_count_mismatch_is_contract_error() {
        let c = Circuit::new(1, 1, vec![Gate::rotation(GateKind::Rx, 0, 0)]).unwrap();
        assert!(matches!(run_circuit(&c, &[]), Err(crate::Error::Contract(_))));
    }
}
