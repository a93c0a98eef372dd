//! Quantum-neural-network trial functions: tower feature maps, a
//! hardware-efficient ansatz and the scaled magnetisation readout.
//!
//! Two derivative engines are provided. The shift-table route
//! ([`Qnn::input_derivative`], [`Qnn::gradients`]) expresses input
//! derivatives as parameter-shift combinations of circuit evaluations, as
//! one would on hardware. The jet route ([`Qnn::jet`], [`Qnn::jet_vjp`])
//! propagates the exact Taylor expansion of the state and is what training
//! uses; the two agree to rounding.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{config, contract, Error, Result};
use crate::qsim::{
    jet_expectation, jet_vjp, shifted_adjoint_gradient, shifted_expectation, Circuit, Gate,
    GateKind, GateShift, Jet, Observable, SlotJet,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureMapKind {
    /// `φ_j(x) = m_j · arccos(s·x)`
    ChebyshevTower,
    /// `φ_j(x) = m_j · s · x`
    FourierTower,
}

/// Encoding of one input coordinate onto every qubit of the register.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMapSpec {
    pub kind: FeatureMapKind,
    pub axis: GateKind,
    /// Angle multiplier per qubit.
    pub multipliers: Vec<f64>,
    pub input_dim: usize,
    pub rescale: f64,
}

impl FeatureMapSpec {
    /// Tower map with multipliers `1, 2, ..., num_qubits` and RY rotations.
    pub fn tower(kind: FeatureMapKind, num_qubits: usize, input_dim: usize, rescale: f64) -> Self {
        Self {
            kind,
            axis: GateKind::Ry,
            multipliers: (1..=num_qubits).map(|m| m as f64).collect(),
            input_dim,
            rescale,
        }
    }

    pub fn chebyshev(num_qubits: usize, input_dim: usize, rescale: f64) -> Self {
        Self::tower(FeatureMapKind::ChebyshevTower, num_qubits, input_dim, rescale)
    }

    pub fn fourier(num_qubits: usize, input_dim: usize, rescale: f64) -> Self {
        Self::tower(FeatureMapKind::FourierTower, num_qubits, input_dim, rescale)
    }
}

/// Angle of one encoding rotation and its first two derivatives in the input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EncodedAngle {
    pub angle: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Per-qubit encoding angles of `x` under `fm`.
pub fn encode_angles(fm: &FeatureMapSpec, x: f64) -> Result<Vec<EncodedAngle>> {
    let s = fm.rescale;
    match fm.kind {
        FeatureMapKind::ChebyshevTower => {
            let u = s * x;
            if !(u.abs() < 1.0) {
                return Err(Error::Domain(format!(
                    "Chebyshev encoding needs |s·x| < 1, got s={s}, x={x}"
                )));
            }
            let w = 1.0 - u * u;
            let base = (u.acos(), -s / w.sqrt(), -s * s * s * x / (w * w.sqrt()));
            Ok(fm
                .multipliers
                .iter()
                .map(|m| EncodedAngle {
                    angle: m * base.0,
                    d1: m * base.1,
                    d2: m * base.2,
                })
                .collect())
        }
        FeatureMapKind::FourierTower => {
            if !x.is_finite() {
                return Err(Error::Domain(format!("non-finite input {x}")));
            }
            Ok(fm
                .multipliers
                .iter()
                .map(|m| EncodedAngle {
                    angle: m * s * x,
                    d1: m * s,
                    d2: 0.0,
                })
                .collect())
        }
    }
}

/// Hardware-efficient ansatz: per layer an (RX, RY, RX) triple on every
/// qubit followed by a CNOT chain `q → q+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnsatzSpec {
    pub depth: usize,
}

impl AnsatzSpec {
    pub fn num_params(&self, num_qubits: usize) -> usize {
        3 * num_qubits * self.depth
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Block {
    FeatureMap(FeatureMapSpec),
    Ansatz(AnsatzSpec),
}

#[derive(Clone, Debug, PartialEq)]
pub struct QnnLayout {
    pub num_qubits: usize,
    pub input_dims: usize,
    pub blocks: Vec<Block>,
}

impl QnnLayout {
    /// Encoding `x` then a single ansatz of the given depth.
    pub fn single_upload(num_qubits: usize, fm: FeatureMapSpec, depth: usize) -> Self {
        let mut blocks = vec![Block::FeatureMap(fm)];
        if depth > 0 {
            blocks.push(Block::Ansatz(AnsatzSpec { depth }));
        }
        Self {
            num_qubits,
            input_dims: 1,
            blocks,
        }
    }

    /// `uploads` rounds of (one map per coordinate, separated by shallow
    /// ansätze), then a final ansatz of depth `final_depth`.
    pub fn interleaved(
        num_qubits: usize,
        maps: &[FeatureMapSpec],
        uploads: usize,
        separator_depth: usize,
        final_depth: usize,
    ) -> Self {
        let mut blocks = Vec::new();
        let total = maps.len() * uploads;
        for i in 0..total {
            blocks.push(Block::FeatureMap(maps[i % maps.len()].clone()));
            if i + 1 < total && separator_depth > 0 {
                blocks.push(Block::Ansatz(AnsatzSpec { depth: separator_depth }));
            }
        }
        if final_depth > 0 {
            blocks.push(Block::Ansatz(AnsatzSpec { depth: final_depth }));
        }
        Self {
            num_qubits,
            input_dims: maps.len(),
            blocks,
        }
    }

    pub fn num_theta(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| match b {
                Block::Ansatz(a) => a.num_params(self.num_qubits),
                Block::FeatureMap(_) => 0,
            })
            .sum()
    }
}

/// Trainable parameters of one model: ansatz angles plus readout scale and shift.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub theta: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

impl ModelParams {
    /// Length of the flat `[theta..., a, b]` vector.
    pub fn flat_len(&self) -> usize {
        self.theta.len() + 2
    }

    pub fn write_flat(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(&self.theta);
        out.push(self.a);
        out.push(self.b);
    }

    pub fn read_flat(&mut self, flat: &[f64]) {
        let n = self.theta.len();
        self.theta.copy_from_slice(&flat[..n]);
        self.a = flat[n];
        self.b = flat[n + 1];
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DerivativeRequest {
    pub dim: usize,
    pub order: usize,
}

impl DerivativeRequest {
    pub fn value() -> Self {
        Self { dim: 0, order: 0 }
    }
}

/// A requested quantity with its gradient over `(theta, a, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelGradients {
    pub value: f64,
    pub theta: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

/// Slot-level shift table of the magnetisation for one coordinate: first
/// derivatives `D_m` and double derivatives `D_{m,m'}` with respect to the
/// encoding slots, summed over every occurrence of each slot.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftTable {
    pub slots: Vec<usize>,
    pub first: Vec<f64>,
    pub second: Vec<Vec<f64>>,
}

/// A layout compiled to a circuit with its slot bookkeeping.
#[derive(Clone, Debug)]
pub struct Qnn {
    layout: QnnLayout,
    circuit: Circuit,
    num_theta: usize,
    /// `coord_slots[d][q]`: slot encoding coordinate `d` on qubit `q`.
    coord_slots: Vec<Vec<usize>>,
    coord_maps: Vec<FeatureMapSpec>,
}

/// Compiles a layout: ansatz rotations get θ-slots `0..num_theta` in block
/// order, then each coordinate gets one slot per qubit, shared by every
/// re-upload of that coordinate.
pub fn compile(layout: &QnnLayout) -> Result<Qnn> {
    let n = layout.num_qubits;
    let mut coord_maps: Vec<Option<FeatureMapSpec>> = vec![None; layout.input_dims];
    for b in &layout.blocks {
        if let Block::FeatureMap(fm) = b {
            if fm.input_dim >= layout.input_dims {
                return Err(config(format!(
                    "feature map encodes coordinate {} of a {}-dimensional input",
                    fm.input_dim, layout.input_dims
                )));
            }
            if fm.multipliers.len() != n {
                return Err(config(format!(
                    "feature map has {} multipliers for {n} qubits",
                    fm.multipliers.len()
                )));
            }
            if !(fm.rescale > 0.0 && fm.rescale <= 1.0) {
                return Err(config(format!("feature map rescale {} outside (0, 1]", fm.rescale)));
            }
            if fm.axis == GateKind::Cnot {
                return Err(config("feature map rotation axis must be RX, RY or RZ"));
            }
            match &coord_maps[fm.input_dim] {
                Some(prev) if prev != fm => {
                    return Err(config(format!(
                        "coordinate {} is re-uploaded with a different feature map",
                        fm.input_dim
                    )))
                }
                _ => coord_maps[fm.input_dim] = Some(fm.clone()),
            }
        }
    }
    let coord_maps: Vec<FeatureMapSpec> = coord_maps
        .into_iter()
        .enumerate()
        .map(|(d, m)| m.ok_or_else(|| config(format!("coordinate {d} has no feature map"))))
        .collect::<Result<_>>()?;

    let num_theta = layout.num_theta();
    let coord_slots: Vec<Vec<usize>> = (0..layout.input_dims)
        .map(|d| (0..n).map(|q| num_theta + d * n + q).collect())
        .collect();

    let mut gates = Vec::new();
    let mut next_theta = 0;
    for b in &layout.blocks {
        match b {
            Block::FeatureMap(fm) => {
                for q in 0..n {
                    gates.push(Gate::rotation(fm.axis, q, coord_slots[fm.input_dim][q]));
                }
            }
            Block::Ansatz(a) => {
                if a.depth == 0 {
                    return Err(config("ansatz depth must be at least 1"));
                }
                for _ in 0..a.depth {
                    for q in 0..n {
                        for kind in [GateKind::Rx, GateKind::Ry, GateKind::Rx] {
                            gates.push(Gate::rotation(kind, q, next_theta));
                            next_theta += 1;
                        }
                    }
                    for q in 0..n.saturating_sub(1) {
                        gates.push(Gate::cnot(q, q + 1));
                    }
                }
            }
        }
    }
    let circuit = Circuit::new(n, num_theta + layout.input_dims * n, gates)?;
    Ok(Qnn {
        layout: layout.clone(),
        circuit,
        num_theta,
        coord_slots,
        coord_maps,
    })
}

impl Qnn {
    pub fn layout(&self) -> &QnnLayout {
        &self.layout
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn num_theta(&self) -> usize {
        self.num_theta
    }

    pub fn input_dims(&self) -> usize {
        self.layout.input_dims
    }

    /// Slots encoding coordinate `dim`, one per qubit.
    pub fn coord_slots(&self, dim: usize) -> &[usize] {
        &self.coord_slots[dim]
    }

    pub fn theta_slots(&self) -> std::ops::Range<usize> {
        0..self.num_theta
    }

    fn check(&self, params: &ModelParams, x: &[f64]) -> Result<()> {
        if params.theta.len() != self.num_theta {
            return Err(contract(format!(
                "model expects {} ansatz angles, got {}",
                self.num_theta,
                params.theta.len()
            )));
        }
        if x.len() != self.layout.input_dims {
            return Err(contract(format!(
                "model expects a {}-dimensional input, got {}",
                self.layout.input_dims,
                x.len()
            )));
        }
        Ok(())
    }

    /// Full slot-angle vector plus the encoding jets of every coordinate.
    fn encode(&self, params: &ModelParams, x: &[f64]) -> Result<(Vec<f64>, Vec<Vec<EncodedAngle>>)> {
        self.check(params, x)?;
        let mut angles = params.theta.clone();
        angles.resize(self.circuit.num_slots(), 0.0);
        let mut enc = Vec::with_capacity(x.len());
        for (d, fm) in self.coord_maps.iter().enumerate() {
            let e = encode_angles(fm, x[d])?;
            for (q, ea) in e.iter().enumerate() {
                angles[self.coord_slots[d][q]] = ea.angle;
            }
            enc.push(e);
        }
        Ok((angles, enc))
    }

    /// `f(x) = a·<Σ Z> + b`.
    pub fn value(&self, params: &ModelParams, x: &[f64]) -> Result<f64> {
        let (angles, _) = self.encode(params, x)?;
        shifted_expectation(&self.circuit, &angles, &[], &Observable::new(params.a, params.b))
    }

    /// Occurrences of coordinate `dim`'s slots with their encoding jets.
    fn occurrences(&self, dim: usize, enc: &[Vec<EncodedAngle>]) -> Vec<(usize, EncodedAngle)> {
        let mut out = Vec::new();
        for (q, &slot) in self.coord_slots[dim].iter().enumerate() {
            for g in self.circuit.occurrences(slot) {
                out.push((g, enc[dim][q]));
            }
        }
        out
    }

    /// Parameter-shift expansion of the requested magnetisation quantity as
    /// `Σ c_k · E(shifts_k)`.
    fn shift_terms(
        &self,
        req: DerivativeRequest,
        enc: &[Vec<EncodedAngle>],
    ) -> Result<Vec<(f64, Vec<GateShift>)>> {
        if req.dim >= self.layout.input_dims {
            return Err(contract(format!("derivative along missing coordinate {}", req.dim)));
        }
        let sh = |gate, offset| GateShift { gate, offset };
        let occ = self.occurrences(req.dim, enc);
        let mut terms = Vec::new();
        match req.order {
            0 => terms.push((1.0, vec![])),
            1 | 2 => {
                for &(g, ea) in &occ {
                    let w = if req.order == 1 { ea.d1 } else { ea.d2 };
                    if w != 0.0 {
                        terms.push((0.5 * w, vec![sh(g, FRAC_PI_2)]));
                        terms.push((-0.5 * w, vec![sh(g, -FRAC_PI_2)]));
                    }
                }
                if req.order == 2 {
                    for (i, &(g, ei)) in occ.iter().enumerate() {
                        let c = 0.25 * ei.d1 * ei.d1;
                        terms.push((c, vec![sh(g, PI)]));
                        terms.push((-2.0 * c, vec![]));
                        terms.push((c, vec![sh(g, -PI)]));
                        for &(h, ej) in &occ[i + 1..] {
                            // both orderings of the pair
                            let c = 0.5 * ei.d1 * ej.d1;
                            terms.push((c, vec![sh(g, FRAC_PI_2), sh(h, FRAC_PI_2)]));
                            terms.push((-c, vec![sh(g, FRAC_PI_2), sh(h, -FRAC_PI_2)]));
                            terms.push((-c, vec![sh(g, -FRAC_PI_2), sh(h, FRAC_PI_2)]));
                            terms.push((c, vec![sh(g, -FRAC_PI_2), sh(h, -FRAC_PI_2)]));
                        }
                    }
                }
            }
            o => return Err(contract(format!("derivative order {o} exceeds 2"))),
        }
        Ok(terms)
    }

    /// Input derivative of order 1 or 2 along `req.dim` via shift tables.
    pub fn input_derivative(
        &self,
        params: &ModelParams,
        x: &[f64],
        req: DerivativeRequest,
    ) -> Result<f64> {
        if req.order == 0 {
            return Err(contract("input_derivative needs order 1 or 2"));
        }
        let (angles, enc) = self.encode(params, x)?;
        let terms = self.shift_terms(req, &enc)?;
        let unit = Observable::magnetisation();
        let mut z = 0.0;
        for (c, shifts) in &terms {
            z += c * shifted_expectation(&self.circuit, &angles, shifts, &unit)?;
        }
        Ok(params.a * z)
    }

    /// Shift table of the magnetisation for coordinate `dim` at `x`.
    pub fn shift_table(&self, params: &ModelParams, x: &[f64], dim: usize) -> Result<ShiftTable> {
        let (angles, _) = self.encode(params, x)?;
        if dim >= self.layout.input_dims {
            return Err(contract(format!("missing coordinate {dim}")));
        }
        let slots = self.coord_slots[dim].clone();
        let unit = Observable::magnetisation();
        let e = |shifts: &[GateShift]| shifted_expectation(&self.circuit, &angles, shifts, &unit);
        let base = e(&[])?;
        let occ: Vec<Vec<usize>> = slots.iter().map(|&s| self.circuit.occurrences(s)).collect();
        let mut first = vec![0.0; slots.len()];
        let mut second = vec![vec![0.0; slots.len()]; slots.len()];
        for (m, gm) in occ.iter().enumerate() {
            for &g in gm {
                let p = e(&[GateShift { gate: g, offset: FRAC_PI_2 }])?;
                let q = e(&[GateShift { gate: g, offset: -FRAC_PI_2 }])?;
                first[m] += 0.5 * (p - q);
            }
            for (mm, gmm) in occ.iter().enumerate() {
                for &g in gm {
                    for &h in gmm {
                        second[m][mm] += if g == h {
                            let p = e(&[GateShift { gate: g, offset: PI }])?;
                            let q = e(&[GateShift { gate: g, offset: -PI }])?;
                            0.25 * (p - 2.0 * base + q)
                        } else {
                            let s = |a, b| {
                                e(&[GateShift { gate: g, offset: a }, GateShift { gate: h, offset: b }])
                            };
                            0.25 * (s(FRAC_PI_2, FRAC_PI_2)? - s(FRAC_PI_2, -FRAC_PI_2)?
                                - s(-FRAC_PI_2, FRAC_PI_2)?
                                + s(-FRAC_PI_2, -FRAC_PI_2)?)
                        };
                    }
                }
            }
        }
        Ok(ShiftTable { slots, first, second })
    }

    /// Requested quantity and its exact gradient over `(theta, a, b)`, with
    /// θ-gradients taken as the shift-table combination of adjoint gradients.
    pub fn gradients(
        &self,
        params: &ModelParams,
        x: &[f64],
        req: DerivativeRequest,
    ) -> Result<ModelGradients> {
        let (angles, enc) = self.encode(params, x)?;
        let terms = self.shift_terms(req, &enc)?;
        let unit = Observable::magnetisation();
        let mut z = 0.0;
        let mut dz = vec![0.0; self.num_theta];
        for (c, shifts) in &terms {
            let (v, g) = shifted_adjoint_gradient(&self.circuit, &angles, shifts, &unit)?;
            z += c * v;
            for (acc, gi) in dz.iter_mut().zip(&g[..self.num_theta]) {
                *acc += c * gi;
            }
        }
        let is_value = req.order == 0;
        Ok(ModelGradients {
            value: params.a * z + if is_value { params.b } else { 0.0 },
            theta: dz.into_iter().map(|g| params.a * g).collect(),
            a: z,
            b: if is_value { 1.0 } else { 0.0 },
        })
    }

    fn slot_jet(&self, dim: usize, enc: &[Vec<EncodedAngle>]) -> (Vec<f64>, Vec<f64>) {
        let mut tangent = vec![0.0; self.circuit.num_slots()];
        let mut curvature = vec![0.0; self.circuit.num_slots()];
        for (q, &s) in self.coord_slots[dim].iter().enumerate() {
            tangent[s] = enc[dim][q].d1;
            curvature[s] = enc[dim][q].d2;
        }
        (tangent, curvature)
    }

    /// `(f, ∂f/∂x_dim, ∂²f/∂x_dim²)` up to `order` by Taylor propagation.
    pub fn jet(&self, params: &ModelParams, x: &[f64], dim: usize, order: usize) -> Result<Jet> {
        let (angles, enc) = self.encode(params, x)?;
        if dim >= self.layout.input_dims {
            return Err(contract(format!("derivative along missing coordinate {dim}")));
        }
        let (tangent, curvature) = self.slot_jet(dim, &enc);
        jet_expectation(
            &self.circuit,
            &angles,
            SlotJet { tangent: &tangent, curvature: &curvature },
            &Observable::new(params.a, params.b),
            order,
        )
    }

    /// Jet values and the gradient of `Σ_k weights[k]·jet[k]` over `(theta, a, b)`.
    pub fn jet_vjp(
        &self,
        params: &ModelParams,
        x: &[f64],
        dim: usize,
        order: usize,
        weights: [f64; 3],
    ) -> Result<(Jet, ModelGradients)> {
        let (angles, enc) = self.encode(params, x)?;
        if dim >= self.layout.input_dims {
            return Err(contract(format!("derivative along missing coordinate {dim}")));
        }
        let (tangent, curvature) = self.slot_jet(dim, &enc);
        let scaled = weights.map(|w| w * params.a);
        let (z, grad) = jet_vjp(
            &self.circuit,
            &angles,
            SlotJet { tangent: &tangent, curvature: &curvature },
            &Observable::magnetisation(),
            order,
            scaled,
        )?;
        let values = [params.a * z[0] + params.b, params.a * z[1], params.a * z[2]];
        let combined: f64 = (0..3).map(|k| weights[k] * values[k]).sum();
        Ok((
            values,
            ModelGradients {
                value: combined,
                theta: grad[..self.num_theta].to_vec(),
                a: (0..3).map(|k| weights[k] * z[k]).sum(),
                b: weights[0],
            },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_qubit(kind: FeatureMapKind, s: f64) -> Qnn {
        let layout = QnnLayout::single_upload(1, FeatureMapSpec::tower(kind, 1, 0, s), 0);
        compile(&layout).unwrap()
    }

    fn unit_params() -> ModelParams {
        ModelParams { theta: vec![], a: 1.0, b: 0.0 }
    }

    #[test]
    fn slot_counts() {
        let l = QnnLayout::single_upload(5, FeatureMapSpec::chebyshev(5, 0, 0.9), 4);
        let q = compile(&l).unwrap();
        assert_eq!(q.num_theta(), 60);
        assert_eq!(q.coord_slots(0).len(), 5);

        let maps = [FeatureMapSpec::fourier(4, 0, 1.0), FeatureMapSpec::fourier(4, 1, 1.0)];
        let q = compile(&QnnLayout::interleaved(4, &maps, 2, 1, 6)).unwrap();
        assert_eq!(q.num_theta(), 108);
        assert_eq!(q.circuit().num_slots(), 108 + 8);
        for &s in q.coord_slots(0) {
            assert_eq!(q.circuit().occurrences(s).len(), 2);
        }

        let q = one_qubit(FeatureMapKind::FourierTower, 1.0);
        assert_eq!((q.num_theta(), q.coord_slots(0).len()), (0, 1));
    }

    #[test]
    fn missing_coordinate_map_is_config_error() {
        let layout = QnnLayout {
            num_qubits: 2,
            input_dims: 2,
            blocks: vec![Block::FeatureMap(FeatureMapSpec::fourier(2, 0, 1.0))],
        };
        assert!(matches!(compile(&layout), Err(Error::Config(_))));
    }

    #[test]
    fn encode_examples() {
        let fm = FeatureMapSpec::chebyshev(5, 0, 1.0);
        let e = encode_angles(&fm, 0.0).unwrap();
        for (j, ea) in e.iter().enumerate() {
            assert!((ea.angle - (j + 1) as f64 * FRAC_PI_2).abs() < 1e-15);
        }
        let e = encode_angles(&FeatureMapSpec::fourier(1, 0, 1.0), 0.5).unwrap();
        assert_eq!((e[0].angle, e[0].d1, e[0].d2), (0.5, 1.0, 0.0));
        let e = encode_angles(&FeatureMapSpec::chebyshev(1, 0, 0.9), 0.5).unwrap();
        assert!((e[0].d1 + 0.9 / (1.0f64 - 0.2025).sqrt()).abs() < 1e-14);
        assert!((e[0].d1 + 1.007_806_5).abs() < 1e-7);
        assert!(matches!(
            encode_angles(&FeatureMapSpec::chebyshev(1, 0, 1.0), 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn one_qubit_models_have_closed_forms() {
        let s = 0.8;
        let cheb = one_qubit(FeatureMapKind::ChebyshevTower, s);
        let four = one_qubit(FeatureMapKind::FourierTower, s);
        let p = unit_params();
        for x in [-0.9, -0.3, 0.0, 0.4, 0.95] {
            assert!((cheb.value(&p, &[x]).unwrap() - s * x).abs() < 1e-12);
            assert!((four.value(&p, &[x]).unwrap() - (s * x).cos()).abs() < 1e-12);
        }
        let flat = ModelParams { theta: vec![], a: 0.0, b: 1.7 };
        assert_eq!(four.value(&flat, &[0.3]).unwrap(), 1.7);
        let d = |q: &Qnn, x, order| q.input_derivative(&p, &[x], DerivativeRequest { dim: 0, order }).unwrap();
        assert!(d(&four, 0.0, 1).abs() < 1e-12);
        assert!((d(&four, 0.0, 2) + s * s).abs() < 1e-12);
        assert!((d(&cheb, 0.2, 1) - s).abs() < 1e-12);
        assert!(d(&cheb, 0.2, 2).abs() < 1e-8);
    }

    #[test]
    fn order_three_rejected() {
        let q = one_qubit(FeatureMapKind::FourierTower, 1.0);
        let r = q.input_derivative(&unit_params(), &[0.1], DerivativeRequest { dim: 0, order: 3 });
        assert!(matches!(r, Err(Error::Contract(_))));
    }

    #[test]
    fn flat_round_trip() {
        let p = ModelParams { theta: vec![1.0, 2.0], a: 3.0, b: 4.0 };
        let mut v = Vec::new();
        p.write_flat(&mut v);
        assert_eq!(v, vec![1.0, 2.0, 3.0, 4.0]);
        let mut q = ModelParams { theta: vec![0.0; 2], a: 0.0, b: 0.0 };
        q.read_flat(&v);
        assert_eq!(p, q);
    }
}
