//! Second-order Taylor propagation of a statevector along one scalar input.
//!
//! Each slot angle is treated as a function `angle_s(t)` with known first and
//! second derivatives at the evaluation point. The forward pass carries
//! `(psi, dpsi/dt, d²psi/dt²)` through the circuit; the reverse pass returns
//! the gradient of any weighted combination of `(E, dE/dt, d²E/dt²)` with
//! respect to every slot angle. Both are exact and agree with the matching
//! parameter-shift tables up to rounding.
//!
//! A rotation `U(α) = exp(α G)`, `G = -iP/2`, whose angle moves with
//! tangent `τ` and curvature `κ` maps the jet `(ψ0, ψ1, ψ2)` to
//!
//! ```text
//! o0 = U ψ0
//! o1 = U ψ1 + τ G U ψ0
//! o2 = U ψ2 + 2τ G U ψ1 + (κ G - τ²/4) U ψ0
//! ```
//!
//! using `G² = -1/4`. Every block commutes with `G`, so `∂o/∂α = G o`.

use num_complex::Complex64;

use super::circuit::{Circuit, Gate, Observable};
use super::state::{
    apply_generator, apply_inverse_unchecked, apply_unchecked, re_generator_inner, re_inner,
    z_sum_apply,
};
use crate::error::{contract, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// First and second derivative of every slot angle along the input direction.
#[derive(Clone, Copy, Debug)]
pub struct SlotJet<'a> {
    pub tangent: &'a [f64],
    pub curvature: &'a [f64],
}

/// `E`, `dE/dt` and `d²E/dt²` of the observable; orders above the requested one are zero.
pub type Jet = [f64; 3];

struct Taylor {
    n: usize,
    order: usize,
    tmp: Vec<Complex64>,
}

impl Taylor {
    fn moving(&self, tau: f64, kappa: f64) -> bool {
        self.order > 0 && (tau != 0.0 || kappa != 0.0)
    }

    fn forward(&mut self, psi: &mut [Vec<Complex64>], g: &Gate, angle: f64, tau: f64, kappa: f64) {
        for p in psi.iter_mut() {
            apply_unchecked(p, self.n, g, angle);
        }
        if !self.moving(tau, kappa) {
            return;
        }
        let (n, tmp) = (self.n, &mut self.tmp);
        if self.order >= 2 {
            apply_generator(&psi[1], n, g, tmp);
            let (lo, hi) = psi.split_at_mut(2);
            axpy(&mut hi[0], 2.0 * tau, tmp);
            axpy(&mut hi[0], -0.25 * tau * tau, &lo[0]);
            apply_generator(&lo[0], n, g, tmp);
            axpy(&mut hi[0], kappa, tmp);
        } else {
            apply_generator(&psi[0], n, g, tmp);
        }
        axpy(&mut psi[1], tau, tmp);
    }

    /// Inverse of [`Taylor::forward`], used to walk the states back during the reverse pass.
    fn uncompute(&mut self, psi: &mut [Vec<Complex64>], g: &Gate, angle: f64, tau: f64, kappa: f64) {
        if self.moving(tau, kappa) {
            let (n, tmp) = (self.n, &mut self.tmp);
            apply_generator(&psi[0], n, g, tmp);
            axpy(&mut psi[1], -tau, tmp);
            if self.order >= 2 {
                let (lo, hi) = psi.split_at_mut(2);
                axpy(&mut hi[0], -kappa, tmp);
                axpy(&mut hi[0], 0.25 * tau * tau, &lo[0]);
                apply_generator(&lo[1], n, g, tmp);
                axpy(&mut hi[0], -2.0 * tau, tmp);
            }
        }
        for p in psi.iter_mut() {
            apply_inverse_unchecked(p, self.n, g, angle);
        }
    }

    /// Hermitian adjoint of the forward map applied to the co-states.
    fn pullback(&mut self, lam: &mut [Vec<Complex64>], g: &Gate, angle: f64, tau: f64, kappa: f64) {
        if self.moving(tau, kappa) {
            let (n, tmp) = (self.n, &mut self.tmp);
            // G is anti-Hermitian: (c G)† = -c G.
            apply_generator(&lam[1], n, g, tmp);
            {
                let (lo, _) = lam.split_at_mut(1);
                axpy(&mut lo[0], -tau, tmp);
            }
            if self.order >= 2 {
                apply_generator(&lam[2], n, g, tmp);
                let (lo, hi) = lam.split_at_mut(2);
                axpy(&mut lo[0], -kappa, tmp);
                axpy(&mut lo[1], -2.0 * tau, tmp);
                axpy(&mut lo[0], -0.25 * tau * tau, &hi[0]);
            }
        }
        for l in lam.iter_mut() {
            apply_inverse_unchecked(l, self.n, g, angle);
        }
    }
}

fn axpy(y: &mut [Complex64], a: f64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

struct Prepared {
    gate_angles: Vec<f64>,
    tangents: Vec<f64>,
    curvatures: Vec<f64>,
}

fn prepare(circuit: &Circuit, angles: &[f64], jet: SlotJet<'_>, order: usize) -> Result<Prepared> {
    circuit.check_angles(angles)?;
    if order > 2 {
        return Err(contract(format!("derivative order {order} exceeds 2")));
    }
    let slots = circuit.num_slots();
    if jet.tangent.len() != slots || jet.curvature.len() != slots {
        return Err(contract(format!(
            "slot jet lengths ({}, {}) differ from slot count {slots}",
            jet.tangent.len(),
            jet.curvature.len()
        )));
    }
    let per_gate = |v: &[f64]| -> Vec<f64> {
        circuit
            .gates()
            .iter()
            .map(|g| g.slot.map_or(0.0, |s| v[s]))
            .collect()
    };
    Ok(Prepared {
        gate_angles: per_gate(angles),
        tangents: per_gate(jet.tangent),
        curvatures: per_gate(jet.curvature),
    })
}

fn propagate(circuit: &Circuit, prep: &Prepared, order: usize) -> (Taylor, Vec<Vec<Complex64>>) {
    let dim = 1usize << circuit.num_qubits();
    let mut psi = vec![vec![ZERO; dim]; order + 1];
    psi[0][0] = Complex64::new(1.0, 0.0);
    let mut t = Taylor {
        n: circuit.num_qubits(),
        order,
        tmp: vec![ZERO; dim],
    };
    for (i, g) in circuit.gates().iter().enumerate() {
        t.forward(&mut psi, g, prep.gate_angles[i], prep.tangents[i], prep.curvatures[i]);
    }
    (t, psi)
}

/// Magnetisation jet `(Z, Z', Z'')` of the propagated states, scaled and shifted.
fn observe(psi: &[Vec<Complex64>], n: usize, obs: &Observable, scratch: &mut [Complex64]) -> Jet {
    let mut out = [0.0; 3];
    z_sum_apply(&psi[0], n, scratch);
    out[0] = obs.scale * re_inner(&psi[0], scratch) + obs.shift;
    if psi.len() > 1 {
        out[1] = obs.scale * 2.0 * re_inner(&psi[1], scratch);
    }
    if psi.len() > 2 {
        let mut z2 = 2.0 * re_inner(&psi[2], scratch);
        z_sum_apply(&psi[1], n, scratch);
        z2 += 2.0 * re_inner(&psi[1], scratch);
        out[2] = obs.scale * z2;
    }
    out
}

/// Values `(E, dE/dt, d²E/dt²)` up to `order` for angles moving along `jet`.
pub fn jet_expectation(
    circuit: &Circuit,
    angles: &[f64],
    jet: SlotJet<'_>,
    obs: &Observable,
    order: usize,
) -> Result<Jet> {
    let prep = prepare(circuit, angles, jet, order)?;
    let (mut t, psi) = propagate(circuit, &prep, order);
    Ok(observe(&psi, t.n, obs, &mut t.tmp))
}

/// Jet values plus the gradient of `Σ_k weights[k]·jet[k]` with respect to every
/// slot angle (jets held fixed).
pub fn jet_vjp(
    circuit: &Circuit,
    angles: &[f64],
    jet: SlotJet<'_>,
    obs: &Observable,
    order: usize,
    weights: [f64; 3],
) -> Result<(Jet, Vec<f64>)> {
    let prep = prepare(circuit, angles, jet, order)?;
    let (mut t, mut psi) = propagate(circuit, &prep, order);
    let n = t.n;
    let dim = 1usize << n;
    let values = observe(&psi, n, obs, &mut t.tmp);

    // Co-states λ_k = ∂(Σ w q)/∂ψ_k* for q0 = <ψ0|C|ψ0>, q1 = 2Re<ψ1|C|ψ0>,
    // q2 = 2Re<ψ2|C|ψ0> + 2<ψ1|C|ψ1>, with C = a Σ Z (the shift is constant).
    let mut c_psi = vec![vec![ZERO; dim]; order + 1];
    for (k, p) in psi.iter().enumerate() {
        z_sum_apply(p, n, &mut c_psi[k]);
        for v in c_psi[k].iter_mut() {
            *v *= obs.scale;
        }
    }
    let mut lam = vec![vec![ZERO; dim]; order + 1];
    axpy(&mut lam[0], weights[0], &c_psi[0]);
    if order >= 1 {
        axpy(&mut lam[0], weights[1], &c_psi[1]);
        axpy(&mut lam[1], weights[1], &c_psi[0]);
    }
    if order >= 2 {
        axpy(&mut lam[0], weights[2], &c_psi[2]);
        axpy(&mut lam[1], 2.0 * weights[2], &c_psi[1]);
        axpy(&mut lam[2], weights[2], &c_psi[0]);
    }

    let mut grad = vec![0.0; circuit.num_slots()];
    for (i, g) in circuit.gates().iter().enumerate().rev() {
        let (a, tau, kappa) = (prep.gate_angles[i], prep.tangents[i], prep.curvatures[i]);
        if let Some(s) = g.slot {
            let mut acc = 0.0;
            for (l, p) in lam.iter().zip(&psi) {
                acc += re_generator_inner(l, p, n, g);
            }
            grad[s] += 2.0 * acc;
        }
        t.pullback(&mut lam, g, a, tau, kappa);
        t.uncompute(&mut psi, g, a, tau, kappa);
    }
    Ok((values, grad))
}
