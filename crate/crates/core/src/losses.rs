//! Loss terms and their strategy-gated combination.
//!
//! All terms are means of squares. A [`LossPlan`] lists every model probe the
//! terms need, so one forward pass feeds all of them and one reverse pass
//! turns their sensitivities into a parameter gradient.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::decomposition::{Decomposition, PiecewiseModel, TrialFunction};
use crate::error::{contract, Error, Result};
use crate::problems::{
    BoundaryLocation, Field2D, FieldBundle, FieldCotangent, Problem, Segment, TestFunction, TestSamples,
    WeakField,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Coll,
    CollJoin,
    Weak,
    Both,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Coll, Strategy::CollJoin, Strategy::Weak, Strategy::Both];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Coll => "coll",
            Strategy::CollJoin => "coll_join",
            Strategy::Weak => "weak",
            Strategy::Both => "both",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown strategy '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma_res: f64,
    pub gamma_wf: f64,
    pub gamma_sbc: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 1.0, gamma_res: 1.0, gamma_wf: 1.0, gamma_sbc: 1.0 }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha, self.beta, self.gamma_res, self.gamma_wf, self.gamma_sbc];
        if all.iter().all(|w| w.is_finite() && *w >= 0.0) {
            Ok(())
        } else {
            Err(Error::Config(format!("loss weights must be finite and non-negative: {self:?}")))
        }
    }
}

/// Switches for the two gating choices that are not fixed by the strategy name.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GatingOptions {
    /// `Weak` also penalises the boundary conditions.
    pub weak_with_ibv: bool,
    /// `Both` also penalises interface jumps.
    pub both_with_sbc: bool,
}

impl Default for GatingOptions {
    fn default() -> Self {
        Self { weak_with_ibv: true, both_with_sbc: false }
    }
}

/// Multipliers of each component in the total, for one strategy.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Gates {
    pub de: f64,
    pub ibv: f64,
    pub sbc: f64,
    pub wf: f64,
}

impl Gates {
    pub fn new(strategy: Strategy, w: &LossWeights, opts: &GatingOptions) -> Self {
        let res = |g: &mut Gates| {
            g.de = w.gamma_res * w.alpha;
            g.ibv = w.gamma_res * w.beta;
        };
        let mut g = Gates::default();
        match strategy {
            Strategy::Coll => res(&mut g),
            Strategy::CollJoin => {
                res(&mut g);
                g.sbc = w.gamma_sbc;
            }
            Strategy::Weak => {
                g.wf = w.gamma_wf;
                if opts.weak_with_ibv {
                    g.ibv = w.beta;
                }
            }
            Strategy::Both => {
                res(&mut g);
                g.wf = w.gamma_wf;
                if opts.both_with_sbc {
                    g.sbc = w.gamma_sbc;
                }
            }
        }
        g
    }

    fn only(&self, component: Component) -> Gates {
        let mut g = Gates::default();
        match component {
            Component::De => g.de = self.de,
            Component::Ibv => g.ibv = self.ibv,
            Component::Sbc => g.sbc = self.sbc,
            Component::Wf => g.wf = self.wf,
        }
        g
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    De,
    Ibv,
    Sbc,
    Wf,
}

impl Component {
    pub const ALL: [Component; 4] = [Component::De, Component::Ibv, Component::Sbc, Component::Wf];

    pub fn name(self) -> &'static str {
        match self {
            Component::De => "l_de",
            Component::Ibv => "l_ibv",
            Component::Sbc => "l_sbc",
            Component::Wf => "l_wf",
        }
    }
}

/// Loss components; `None` for one that was not computed.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct LossComponents {
    pub l_de: Option<f64>,
    pub l_ibv: Option<f64>,
    pub l_sbc: Option<f64>,
    pub l_wf: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct LossBreakdown {
    pub l_de: f64,
    pub l_ibv: f64,
    pub l_sbc: f64,
    pub l_wf: f64,
    pub total: f64,
}

impl LossBreakdown {
    pub fn get(&self, c: Component) -> f64 {
        match c {
            Component::De => self.l_de,
            Component::Ibv => self.l_ibv,
            Component::Sbc => self.l_sbc,
            Component::Wf => self.l_wf,
        }
    }
}

/// Strategy-gated weighted sum of the components.
pub fn total_loss(
    strategy: Strategy,
    weights: &LossWeights,
    opts: &GatingOptions,
    c: &LossComponents,
) -> Result<LossBreakdown> {
    let g = Gates::new(strategy, weights, opts);
    let need = |gate: f64, v: Option<f64>, name: &str| -> Result<f64> {
        match v {
            Some(x) => Ok(x),
            None if gate == 0.0 => Ok(0.0),
            None => Err(contract(format!("strategy {strategy} needs {name}"))),
        }
    };
    let l_de = need(g.de, c.l_de, "l_de")?;
    let l_ibv = need(g.ibv, c.l_ibv, "l_ibv")?;
    let l_sbc = need(g.sbc, c.l_sbc, "l_sbc")?;
    let l_wf = need(g.wf, c.l_wf, "l_wf")?;
    Ok(LossBreakdown {
        l_de,
        l_ibv,
        l_sbc,
        l_wf,
        total: g.de * l_de + g.ibv * l_ibv + g.sbc * l_sbc + g.wf * l_wf,
    })
}

/// A model evaluation the losses need: subdomain, point, and derivative orders per coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct Probe {
    pub subdomain: usize,
    pub point: Vec<f64>,
    pub orders: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
enum WeakIndex {
    /// Probe per segment grid point.
    OneD(Vec<Vec<usize>>),
    TwoD {
        f: Vec<usize>,
        fx_low: Vec<usize>,
        fx_high: Vec<usize>,
        fy_low: Vec<usize>,
        fy_high: Vec<usize>,
    },
}

/// Every probe the four loss components need, with their index maps.
#[derive(Clone, Debug)]
pub struct LossPlan {
    problem: Problem,
    decomposition: Decomposition,
    family: Vec<TestFunction>,
    probes: Vec<Probe>,
    colloc: Vec<usize>,
    /// Per condition: `(probe, target)`.
    ibv: Vec<Vec<(usize, f64)>>,
    /// `(lower, upper)` probes of each interface sample.
    sbc: Vec<(usize, usize)>,
    weak: WeakIndex,
    samples: Vec<TestSamples>,
}

struct ProbeSet {
    probes: Vec<Probe>,
    index: HashMap<(usize, Vec<u64>), usize>,
}

impl ProbeSet {
    fn add(&mut self, subdomain: usize, point: &[f64], orders: &[usize]) -> usize {
        let key = (subdomain, point.iter().map(|x| x.to_bits()).collect());
        let probes = &mut self.probes;
        let k = *self.index.entry(key).or_insert_with(|| {
            probes.push(Probe { subdomain, point: point.to_vec(), orders: vec![0; orders.len()] });
            probes.len() - 1
        });
        for (o, &n) in self.probes[k].orders.iter_mut().zip(orders) {
            *o = (*o).max(n);
        }
        k
    }
}

impl LossPlan {
    pub fn new(problem: &Problem, decomposition: &Decomposition, family: Vec<TestFunction>) -> Result<Self> {
        let dims = problem.dims();
        if decomposition.dims() != dims {
            return Err(contract("decomposition and problem dimensionality differ"));
        }
        if family.is_empty() {
            return Err(contract("test-function family is empty"));
        }
        let mut set = ProbeSet { probes: Vec::new(), index: HashMap::new() };
        let res_orders = problem.id.residual_orders();
        let value = vec![0; dims];

        let colloc = decomposition
            .points
            .iter()
            .map(|tp| set.add(tp.owner, &tp.point, &res_orders))
            .collect();

        let mut ibv = Vec::new();
        for bc in problem.boundary_conditions() {
            let pts: Vec<Vec<f64>> = match bc.location {
                BoundaryLocation::Point(x) => vec![vec![x]],
                BoundaryLocation::Edge { fixed_dim, at } => decomposition
                    .points
                    .iter()
                    .filter(|tp| tp.point[fixed_dim] == at)
                    .map(|tp| tp.point.clone())
                    .collect(),
            };
            if pts.is_empty() {
                return Err(contract(format!("no training points on boundary {:?}", bc.location)));
            }
            let mut cond = Vec::with_capacity(pts.len());
            for p in pts {
                let owner = decomposition.locate(&p)?;
                cond.push((set.add(owner, &p, &value), bc.target.eval(&p)));
            }
            ibv.push(cond);
        }

        let mut sbc = Vec::new();
        for i in &decomposition.interfaces {
            for p in &i.samples {
                sbc.push((set.add(i.lower, p, &value), set.add(i.upper, p, &value)));
            }
        }

        let weak = match &decomposition.global_grid {
            None => {
                let orders = if matches!(problem.id, crate::problems::ProblemId::StationaryBurgers) {
                    vec![1]
                } else {
                    vec![0]
                };
                WeakIndex::OneD(
                    decomposition
                        .subdomains
                        .iter()
                        .enumerate()
                        .map(|(s, sub)| {
                            let g = sub.grid.as_ref().expect("1D subdomains carry grids");
                            g.points().iter().map(|&x| set.add(s, &[x], &orders)).collect()
                        })
                        .collect(),
                )
            }
            Some(g) => {
                let mut add = |p: [f64; 2], orders: [usize; 2]| -> Result<usize> {
                    let owner = decomposition.locate(&p)?;
                    Ok(set.add(owner, &p, &orders))
                };
                let f = (0..g.len()).map(|k| add(g.point(k), [0, 0])).collect::<Result<Vec<_>>>()?;
                let edges = matches!(problem.id, crate::problems::ProblemId::Laplace2D);
                let (xs, ys) = (g.x.points(), g.y.points());
                let (x0, x1) = (xs[0], xs[xs.len() - 1]);
                let (y0, y1) = (ys[0], ys[ys.len() - 1]);
                let mut edge = |pts: Vec<[f64; 2]>, orders: [usize; 2]| -> Result<Vec<usize>> {
                    if edges {
                        pts.into_iter().map(|p| add(p, orders)).collect()
                    } else {
                        Ok(Vec::new())
                    }
                };
                WeakIndex::TwoD {
                    f,
                    fx_low: edge(ys.iter().map(|&y| [x0, y]).collect(), [1, 0])?,
                    fx_high: edge(ys.iter().map(|&y| [x1, y]).collect(), [1, 0])?,
                    fy_low: edge(xs.iter().map(|&x| [x, y0]).collect(), [0, 1])?,
                    fy_high: edge(xs.iter().map(|&x| [x, y1]).collect(), [0, 1])?,
                }
            }
        };

        let mut plan = LossPlan {
            problem: problem.clone(),
            decomposition: decomposition.clone(),
            family,
            probes: set.probes,
            colloc,
            ibv,
            sbc,
            weak,
            samples: Vec::new(),
        };
        let shape = plan.weak_field(&vec![FieldBundle::default(); plan.probes.len()]);
        plan.samples = plan.family.iter().map(|v| TestSamples::sample(v, &shape)).collect();
        Ok(plan)
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.decomposition
    }

    pub fn family(&self) -> &[TestFunction] {
        &self.family
    }

    pub fn probes(&self) -> &[Probe] {
        &self.probes
    }

    /// Evaluates every probe.
    pub fn evaluate(&self, trial: &impl TrialFunction) -> Result<Vec<FieldBundle>> {
        self.probes
            .iter()
            .map(|p| trial.bundle(p.subdomain, &p.point, &p.orders))
            .collect()
    }

    fn weak_field(&self, fields: &[FieldBundle]) -> WeakField {
        let f = |k: usize| fields[k].f;
        let d = |k: usize, dim: usize| fields[k].df[dim].unwrap_or(0.0);
        match &self.weak {
            WeakIndex::OneD(segs) => WeakField::OneD(
                segs.iter()
                    .zip(&self.decomposition.subdomains)
                    .map(|(idx, sub)| Segment {
                        grid: sub.grid.clone().expect("1D subdomains carry grids"),
                        f: idx.iter().map(|&k| f(k)).collect(),
                        df: idx.iter().map(|&k| d(k, 0)).collect(),
                    })
                    .collect(),
            ),
            WeakIndex::TwoD { f: fi, fx_low, fx_high, fy_low, fy_high } => WeakField::TwoD(Field2D {
                grid: self.decomposition.global_grid.clone().expect("2D layouts carry a global grid"),
                f: fi.iter().map(|&k| f(k)).collect(),
                fx_low: fx_low.iter().map(|&k| d(k, 0)).collect(),
                fx_high: fx_high.iter().map(|&k| d(k, 0)).collect(),
                fy_low: fy_low.iter().map(|&k| d(k, 1)).collect(),
                fy_high: fy_high.iter().map(|&k| d(k, 1)).collect(),
            }),
        }
    }

    /// All four components from probe values, adding `gate · ∂component/∂field`
    /// into `cot` when given.
    pub fn components(
        &self,
        fields: &[FieldBundle],
        mut cot: Option<(&mut [FieldCotangent], Gates)>,
    ) -> Result<LossComponents> {
        if fields.len() != self.probes.len() {
            return Err(contract("one field bundle per probe expected"));
        }
        let p = &self.problem;

        let n = self.colloc.len() as f64;
        let mut l_de = 0.0;
        for &k in &self.colloc {
            let r = p.residual(&self.probes[k].point, &fields[k])?;
            l_de += r * r / n;
            if let Some((c, g)) = cot.as_mut() {
                if g.de != 0.0 {
                    let part = p.residual_partials(&fields[k])?;
                    c[k].add_scaled(&part, g.de * 2.0 * r / n);
                }
            }
        }

        let mut l_ibv = 0.0;
        for cond in &self.ibv {
            let n = cond.len() as f64;
            for &(k, target) in cond {
                let e = fields[k].f - target;
                l_ibv += e * e / n;
                if let Some((c, g)) = cot.as_mut() {
                    c[k].f += g.ibv * 2.0 * e / n;
                }
            }
        }

        let mut l_sbc = None;
        if !self.sbc.is_empty() {
            let n = self.sbc.len() as f64;
            let mut s = 0.0;
            for &(lo, hi) in &self.sbc {
                let j = fields[hi].f - fields[lo].f;
                s += j * j / n;
                if let Some((c, g)) = cot.as_mut() {
                    c[hi].f += g.sbc * 2.0 * j / n;
                    c[lo].f -= g.sbc * 2.0 * j / n;
                }
            }
            l_sbc = Some(s);
        }

        let field = self.weak_field(fields);
        let nv = self.samples.len() as f64;
        let wf_gate = cot.as_ref().map_or(0.0, |(_, g)| g.wf);
        let mut acc = (wf_gate != 0.0).then(|| field.zeros_like());
        let mut l_wf = 0.0;
        for s in &self.samples {
            let t = p.weak_term_sampled(s, &field, None)?;
            l_wf += t * t / nv;
            if let Some(a) = acc.as_mut() {
                p.weak_term_sampled(s, &field, Some((a, wf_gate * 2.0 * t / nv)))?;
            }
        }
        if let (Some(acc), Some((c, _))) = (acc, cot.as_mut()) {
            self.scatter_weak(&acc, c);
        }

        Ok(LossComponents { l_de: Some(l_de), l_ibv: Some(l_ibv), l_sbc, l_wf: Some(l_wf) })
    }

    fn scatter_weak(&self, acc: &WeakField, cot: &mut [FieldCotangent]) {
        match (&self.weak, acc) {
            (WeakIndex::OneD(idx), WeakField::OneD(segs)) => {
                for (ix, s) in idx.iter().zip(segs) {
                    for (i, &k) in ix.iter().enumerate() {
                        cot[k].f += s.f[i];
                        cot[k].df[0] += s.df[i];
                    }
                }
            }
            (WeakIndex::TwoD { f, fx_low, fx_high, fy_low, fy_high }, WeakField::TwoD(a)) => {
                for (i, &k) in f.iter().enumerate() {
                    cot[k].f += a.f[i];
                }
                for (ix, vals, dim) in [
                    (fx_low, &a.fx_low, 0),
                    (fx_high, &a.fx_high, 0),
                    (fy_low, &a.fy_low, 1),
                    (fy_high, &a.fy_high, 1),
                ] {
                    for (i, &k) in ix.iter().enumerate() {
                        cot[k].df[dim] += vals[i];
                    }
                }
            }
            _ => unreachable!("weak accumulator shaped like the plan"),
        }
    }

    /// Pulls probe cotangents back to the flat parameter vector of `pm`.
    pub fn backward(&self, pm: &PiecewiseModel, cot: &[FieldCotangent]) -> Result<Vec<f64>> {
        let offsets: Vec<usize> = pm
            .params
            .iter()
            .scan(0, |off, p| {
                let o = *off;
                *off += p.flat_len();
                Some(o)
            })
            .collect();
        let mut grad = vec![0.0; pm.flat_len()];
        for (probe, c) in self.probes.iter().zip(cot) {
            if c.is_zero() {
                continue;
            }
            let params = &pm.params[probe.subdomain];
            let active: Vec<usize> = (0..probe.orders.len())
                .filter(|&d| probe.orders[d] > 0 && (c.df[d] != 0.0 || c.d2f[d] != 0.0))
                .collect();
            let mut passes: Vec<(usize, usize, [f64; 3])> = active
                .iter()
                .map(|&d| (d, probe.orders[d], [0.0, c.df[d], c.d2f[d]]))
                .collect();
            match passes.first_mut() {
                Some(first) => first.2[0] = c.f,
                None => passes.push((0, 0, [c.f, 0.0, 0.0])),
            }
            let off = offsets[probe.subdomain];
            let nt = params.theta.len();
            for (dim, order, w) in passes {
                let (_, g) = pm.qnn.jet_vjp(params, &probe.point, dim, order, w)?;
                for (dst, src) in grad[off..off + nt].iter_mut().zip(&g.theta) {
                    *dst += src;
                }
                grad[off + nt] += g.a;
                grad[off + nt + 1] += g.b;
            }
        }
        Ok(grad)
    }
}

/// Mean squared residual over the training points.
pub fn collocation_loss(plan: &LossPlan, trial: &impl TrialFunction) -> Result<f64> {
    Ok(plan.components(&plan.evaluate(trial)?, None)?.l_de.unwrap_or(0.0))
}

/// Sum over boundary conditions of the mean squared boundary mismatch.
pub fn ibv_loss(plan: &LossPlan, trial: &impl TrialFunction) -> Result<f64> {
    Ok(plan.components(&plan.evaluate(trial)?, None)?.l_ibv.unwrap_or(0.0))
}

/// Mean squared jump over all interface samples.
pub fn sbc_loss(plan: &LossPlan, trial: &impl TrialFunction) -> Result<f64> {
    plan.components(&plan.evaluate(trial)?, None)?
        .l_sbc
        .ok_or_else(|| contract("decomposition has no interfaces"))
}

/// Mean over the family of squared weak terms.
pub fn weak_loss(plan: &LossPlan, trial: &impl TrialFunction) -> Result<f64> {
    Ok(plan.components(&plan.evaluate(trial)?, None)?.l_wf.unwrap_or(0.0))
}

/// A strategy's total loss over a fixed plan.
#[derive(Clone, Debug)]
pub struct Objective {
    pub plan: LossPlan,
    pub strategy: Strategy,
    pub weights: LossWeights,
    pub gating: GatingOptions,
}

impl Objective {
    pub fn gates(&self) -> Gates {
        Gates::new(self.strategy, &self.weights, &self.gating)
    }

    pub fn evaluate(&self, pm: &PiecewiseModel) -> Result<LossBreakdown> {
        let fields = self.plan.evaluate(pm)?;
        let c = self.plan.components(&fields, None)?;
        self.breakdown(&c)
    }

    fn breakdown(&self, c: &LossComponents) -> Result<LossBreakdown> {
        let mut b = total_loss(self.strategy, &self.weights, &self.gating, c)?;
        b.l_sbc = c.l_sbc.unwrap_or(0.0);
        Ok(b)
    }

    /// Loss breakdown and the gradient of the total over the flat parameters.
    pub fn value_and_grad(&self, pm: &PiecewiseModel) -> Result<(LossBreakdown, Vec<f64>)> {
        let fields = self.plan.evaluate(pm)?;
        let mut cot = vec![FieldCotangent::default(); fields.len()];
        let c = self.plan.components(&fields, Some((&mut cot, self.gates())))?;
        let b = self.breakdown(&c)?;
        let grad = self.plan.backward(pm, &cot)?;
        Ok((b, grad))
    }

    /// Gradient of one gated component alone.
    pub fn component_grad(&self, pm: &PiecewiseModel, component: Component) -> Result<Vec<f64>> {
        let fields = self.plan.evaluate(pm)?;
        let mut cot = vec![FieldCotangent::default(); fields.len()];
        self.plan.components(&fields, Some((&mut cot, self.gates().only(component))))?;
        self.plan.backward(pm, &cot)
    }
}
