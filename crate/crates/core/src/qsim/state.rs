use num_complex::Complex64;

use super::circuit::{Gate, GateKind, Observable};
use crate::error::{config, contract, Result};

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 20;

/// Dense amplitude vector of an `n`-qubit register.
///
/// Qubit 0 is the most significant bit of the basis index, so the ket
/// `|q0 q1 ... q(n-1)>` sits at index `q0·2^(n-1) + ... + q(n-1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

/// The all-zeros computational basis state.
pub fn zero_state(num_qubits: usize) -> Result<StateVector> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(config(format!(
            "register size {num_qubits} outside 1..={MAX_QUBITS}"
        )));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
    amps[0] = Complex64::new(1.0, 0.0);
    Ok(StateVector { num_qubits, amps })
}

/// Applies `gate` with rotation angle `angle` (ignored by CNOT) and returns the new state.
pub fn apply_gate(mut state: StateVector, gate: &Gate, angle: f64) -> Result<StateVector> {
    state.apply(gate, angle)?;
    Ok(state)
}

impl StateVector {
    /// Builds a state from raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(contract(format!("amplitude count {len} is not 2^n with n >= 1")));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(config(format!("register size {num_qubits} exceeds {MAX_QUBITS}")));
        }
        Ok(Self { num_qubits, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let mut s = zero_state(num_qubits)?;
        if index >= s.amps.len() {
            return Err(contract(format!("basis index {index} out of range")));
        }
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Applies one gate in place.
    pub fn apply(&mut self, gate: &Gate, angle: f64) -> Result<()> {
        gate.check(self.num_qubits)?;
        if !angle.is_finite() {
            return Err(contract(format!("non-finite rotation angle {angle}")));
        }
        apply_unchecked(&mut self.amps, self.num_qubits, gate, angle);
        Ok(())
    }

    /// `a·Σ_j <Z_j> + b`, evaluated from the diagonal without building the operator.
    pub fn expectation(&self, obs: &Observable) -> f64 {
        obs.scale * z_sum(&self.amps, self.num_qubits) + obs.shift
    }
}

#[inline]
fn mask(num_qubits: usize, qubit: usize) -> usize {
    1 << (num_qubits - 1 - qubit)
}

/// Eigenvalue of `Σ_j Z_j` on basis index `i`.
#[inline]
pub(crate) fn z_sum_eigen(num_qubits: usize, i: usize) -> f64 {
    num_qubits as f64 - 2.0 * i.count_ones() as f64
}

pub(crate) fn z_sum(amps: &[Complex64], num_qubits: usize) -> f64 {
    amps.iter()
        .enumerate()
        .map(|(i, a)| a.norm_sqr() * z_sum_eigen(num_qubits, i))
        .sum()
}

/// `out = (Σ_j Z_j) · psi`.
pub(crate) fn z_sum_apply(psi: &[Complex64], num_qubits: usize, out: &mut [Complex64]) {
    for (i, (o, p)) in out.iter_mut().zip(psi).enumerate() {
        *o = p * z_sum_eigen(num_qubits, i);
    }
}

/// `Re <a|b>`.
#[inline]
pub(crate) fn re_inner(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

/// Applies the gate's unitary. Indices must already be validated.
pub(crate) fn apply_unchecked(amps: &mut [Complex64], n: usize, gate: &Gate, angle: f64) {
    match gate.kind {
        GateKind::Cnot => {
            let c = mask(n, gate.control.unwrap_or(0));
            let t = mask(n, gate.target);
            for i in 0..amps.len() {
                if i & c != 0 && i & t == 0 {
                    amps.swap(i, i | t);
                }
            }
        }
        kind => rotate(amps, mask(n, gate.target), kind, angle),
    }
}

/// Applies the inverse of the gate's unitary.
pub(crate) fn apply_inverse_unchecked(amps: &mut [Complex64], n: usize, gate: &Gate, angle: f64) {
    match gate.kind {
        GateKind::Cnot => apply_unchecked(amps, n, gate, 0.0),
        _ => apply_unchecked(amps, n, gate, -angle),
    }
}

fn rotate(amps: &mut [Complex64], m: usize, kind: GateKind, angle: f64) {
    let (s, c) = (0.5 * angle).sin_cos();
    match kind {
        GateKind::Rx => {
            for i in 0..amps.len() {
                if i & m == 0 {
                    let (a0, a1) = (amps[i], amps[i | m]);
                    // [[c, -is], [-is, c]]
                    amps[i] = Complex64::new(c * a0.re + s * a1.im, c * a0.im - s * a1.re);
                    amps[i | m] = Complex64::new(s * a0.im + c * a1.re, -s * a0.re + c * a1.im);
                }
            }
        }
        GateKind::Ry => {
            for i in 0..amps.len() {
                if i & m == 0 {
                    let (a0, a1) = (amps[i], amps[i | m]);
                    amps[i] = a0 * c - a1 * s;
                    amps[i | m] = a0 * s + a1 * c;
                }
            }
        }
        GateKind::Rz => {
            let lo = Complex64::new(c, -s);
            let hi = Complex64::new(c, s);
            for (i, a) in amps.iter_mut().enumerate() {
                *a *= if i & m == 0 { lo } else { hi };
            }
        }
        GateKind::Cnot => unreachable!("CNOT has no rotation"),
    }
}

/// `out = G · psi` with `G = -i P / 2`, the generator of the rotation gate
/// (so that `dU/dθ = G U`).
pub(crate) fn apply_generator(
    psi: &[Complex64],
    n: usize,
    gate: &Gate,
    out: &mut [Complex64],
) {
    let m = mask(n, gate.target);
    match gate.kind {
        GateKind::Rx => {
            for i in 0..psi.len() {
                if i & m == 0 {
                    let (a0, a1) = (psi[i], psi[i | m]);
                    out[i] = Complex64::new(0.5 * a1.im, -0.5 * a1.re);
                    out[i | m] = Complex64::new(0.5 * a0.im, -0.5 * a0.re);
                }
            }
        }
        GateKind::Ry => {
            for i in 0..psi.len() {
                if i & m == 0 {
                    let (a0, a1) = (psi[i], psi[i | m]);
                    out[i] = -0.5 * a1;
                    out[i | m] = 0.5 * a0;
                }
            }
        }
        GateKind::Rz => {
            for (i, (o, a)) in out.iter_mut().zip(psi).enumerate() {
                *o = if i & m == 0 {
                    Complex64::new(0.5 * a.im, -0.5 * a.re)
                } else {
                    Complex64::new(-0.5 * a.im, 0.5 * a.re)
                };
            }
        }
        GateKind::Cnot => unreachable!("CNOT has no generator"),
    }
}

/// `Re <lambda| G |psi>`, the building block of every adjoint gradient.
pub(crate) fn re_generator_inner(
    lambda: &[Complex64],
    psi: &[Complex64],
    n: usize,
    gate: &Gate,
) -> f64 {
    let m = mask(n, gate.target);
    let mut acc = 0.0;
    match gate.kind {
        GateKind::Rx => {
            // G psi at i is (-i/2) psi[i ^ m]
            for (i, l) in lambda.iter().enumerate() {
                let p = psi[i ^ m];
                acc += l.re * (0.5 * p.im) + l.im * (-0.5 * p.re);
            }
        }
        GateKind::Ry => {
            for (i, l) in lambda.iter().enumerate() {
                let p = psi[i ^ m];
                let sign = if i & m == 0 { -0.5 } else { 0.5 };
                acc += sign * (l.re * p.re + l.im * p.im);
            }
        }
        GateKind::Rz => {
            for (i, (l, p)) in lambda.iter().zip(psi).enumerate() {
                let sign = if i & m == 0 { 0.5 } else { -0.5 };
                // (-i sign') p with sign' = ±1/2 → (sign·p.im, -sign·p.re)
                acc += l.re * (sign * p.im) + l.im * (-sign * p.re);
            }
        }
        GateKind::Cnot => unreachable!("CNOT has no generator"),
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rot(kind: GateKind) -> Gate {
        Gate::rotation(kind, 0, 0)
    }

    #[test]
    fn zero_state_layout() {
        assert_eq!(zero_state(1).unwrap().amplitudes().len(), 2);
        let s = zero_state(5).unwrap();
        assert_eq!(s.amplitudes().len(), 32);
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| *a == Complex64::new(0.0, 0.0)));
        assert!(zero_state(0).is_err());
        assert!(zero_state(21).is_err());
    }

    #[test]
    fn ry_flips_and_balances() {
        let unit = Observable::new(1.0, 0.0);
        let s = apply_gate(zero_state(1).unwrap(), &rot(GateKind::Ry), PI).unwrap();
        assert!((s.expectation(&unit) + 1.0).abs() < 1e-15);
        let s = apply_gate(zero_state(1).unwrap(), &rot(GateKind::Ry), PI / 2.0).unwrap();
        assert!(s.expectation(&unit).abs() < 1e-15);
    }

    #[test]
    fn cnot_truth_table() {
        let s = StateVector::basis(2, 0b10).unwrap();
        let s = apply_gate(s, &Gate::cnot(0, 1), 0.0).unwrap();
        assert_eq!(s, StateVector::basis(2, 0b11).unwrap());
        let s = apply_gate(StateVector::basis(2, 0b01).unwrap(), &Gate::cnot(0, 1), 0.0).unwrap();
        assert_eq!(s, StateVector::basis(2, 0b01).unwrap());
    }

    #[test]
    fn bad_indices_rejected() {
        let mut s = zero_state(2).unwrap();
        assert!(s.apply(&Gate::rotation(GateKind::Rx, 2, 0), 0.1).is_err());
        assert!(s.apply(&Gate::cnot(1, 1), 0.0).is_err());
        assert!(s.apply(&Gate::rotation(GateKind::Rx, 0, 0), f64::NAN).is_err());
    }

    #[test]
    fn expectation_examples() {
        let unit = Observable::new(1.0, 0.0);
        assert_eq!(zero_state(5).unwrap().expectation(&unit), 5.0);
        assert_eq!(StateVector::basis(2, 0b11).unwrap().expectation(&unit), -2.0);
        let s = apply_gate(zero_state(1).unwrap(), &rot(GateKind::Ry), PI / 2.0).unwrap();
        assert!((s.expectation(&Observable::new(2.0, 1.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn generator_matches_finite_difference_of_unitary() {
        let s0 = {
            let mut s = zero_state(2).unwrap();
            s.apply(&Gate::rotation(GateKind::Rx, 0, 0), 0.7).unwrap();
            s.apply(&Gate::rotation(GateKind::Ry, 1, 0), -1.1).unwrap();
            s.apply(&Gate::cnot(0, 1), 0.0).unwrap();
            s
        };
        for kind in [GateKind::Rx, GateKind::Ry, GateKind::Rz] {
            let g = Gate::rotation(kind, 1, 0);
            let theta = 0.4;
            let h = 1e-6;
            let mut plus = s0.clone();
            plus.apply(&g, theta + h).unwrap();
            let mut minus = s0.clone();
            minus.apply(&g, theta - h).unwrap();
            let mut at = s0.clone();
            at.apply(&g, theta).unwrap();
            let mut gen = vec![Complex64::new(0.0, 0.0); 4];
            apply_generator(at.amplitudes(), 2, &g, &mut gen);
            for i in 0..4 {
                let fd = (plus.amplitudes()[i] - minus.amplitudes()[i]) / (2.0 * h);
                assert!((fd - gen[i]).norm() < 1e-9, "{kind:?}");
            }
            // the fused inner product agrees with the explicit one
            let lam: Vec<Complex64> =
                (0..4).map(|i| Complex64::new(0.3 * i as f64, 1.0 - 0.2 * i as f64)).collect();
            let direct = re_inner(&lam, &gen);
            let fused = re_generator_inner(&lam, at.amplitudes(), 2, &g);
            assert!((direct - fused).abs() < 1e-14, "{kind:?}");
        }
    }
}
