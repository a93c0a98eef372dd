//! The four benchmark differential equations.
//!
//! | problem              | residual                          | domain   |
//! |----------------------|-----------------------------------|----------|
//! | damped oscillator    | `f' + κe^{-κx}cos λx + λe^{-κx}sin λx` | `[-1, 1]` |
//! | stationary Burgers   | `f f' - ν f''`                    | `[-1, 1]` |
//! | linear 2D            | `f_x + f_y - 2(x + y)`            | `[0, 1]²` |
//! | Laplace              | `f_xx + f_yy`                     | `[0, 1]²` |
//!
//! Weak terms are the integration-by-parts forms of `∫ v · residual`,
//! evaluated by trapezium rules on the training grid.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{contract, Error, Result};
use crate::quadrature::{Grid1D, Grid2D};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemId {
    DampedOscillator,
    StationaryBurgers,
    Linear2D,
    Laplace2D,
}

impl ProblemId {
    pub const ALL: [ProblemId; 4] = [
        ProblemId::DampedOscillator,
        ProblemId::StationaryBurgers,
        ProblemId::Linear2D,
        ProblemId::Laplace2D,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::DampedOscillator => "damped_oscillator",
            ProblemId::StationaryBurgers => "burgers",
            ProblemId::Linear2D => "linear_2d",
            ProblemId::Laplace2D => "laplace",
        }
    }

    pub fn dims(self) -> usize {
        match self {
            ProblemId::DampedOscillator | ProblemId::StationaryBurgers => 1,
            ProblemId::Linear2D | ProblemId::Laplace2D => 2,
        }
    }

    pub fn domain(self) -> Vec<(f64, f64)> {
        match self.dims() {
            1 => vec![(-1.0, 1.0)],
            _ => vec![(0.0, 1.0), (0.0, 1.0)],
        }
    }

    /// Highest derivative order the residual needs along each coordinate.
    pub fn residual_orders(self) -> Vec<usize> {
        match self {
            ProblemId::DampedOscillator => vec![1],
            ProblemId::StationaryBurgers => vec![2],
            ProblemId::Linear2D => vec![1, 1],
            ProblemId::Laplace2D => vec![2, 2],
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown problem '{s}'")))
    }
}

/// Field values at one point: `f` and the derivatives a residual may need.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FieldBundle {
    pub f: f64,
    pub df: [Option<f64>; 2],
    pub d2f: [Option<f64>; 2],
}

impl FieldBundle {
    pub fn value(f: f64) -> Self {
        Self { f, ..Self::default() }
    }

    fn d(&self, dim: usize) -> Result<f64> {
        self.df[dim].ok_or_else(|| contract(format!("residual needs ∂f/∂x{dim}")))
    }

    fn d2(&self, dim: usize) -> Result<f64> {
        self.d2f[dim].ok_or_else(|| contract(format!("residual needs ∂²f/∂x{dim}²")))
    }
}

/// Sensitivity of a scalar with respect to each entry of a [`FieldBundle`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FieldCotangent {
    pub f: f64,
    pub df: [f64; 2],
    pub d2f: [f64; 2],
}

impl FieldCotangent {
    pub fn add_scaled(&mut self, other: &FieldCotangent, s: f64) {
        self.f += s * other.f;
        for d in 0..2 {
            self.df[d] += s * other.df[d];
            self.d2f[d] += s * other.d2f[d];
        }
    }

    pub fn is_zero(&self) -> bool {
        self.f == 0.0 && self.df == [0.0; 2] && self.d2f == [0.0; 2]
    }
}

/// Where a Dirichlet condition is imposed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryLocation {
    /// A single point of a 1D domain.
    Point(f64),
    /// The edge `x_{fixed_dim} = at` of a 2D domain.
    Edge { fixed_dim: usize, at: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryTarget {
    Constant(f64),
    /// `sin(π x_dim)`
    SinPi { dim: usize },
    /// `x_dim²`
    Square { dim: usize },
}

impl BoundaryTarget {
    pub fn eval(&self, point: &[f64]) -> f64 {
        match *self {
            BoundaryTarget::Constant(c) => c,
            BoundaryTarget::SinPi { dim } => (PI * point[dim]).sin(),
            BoundaryTarget::Square { dim } => point[dim] * point[dim],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryCondition {
    pub location: BoundaryLocation,
    pub target: BoundaryTarget,
}

/// A smooth test function with closed-form derivatives up to second order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TestFunction {
    /// `cos(π j x)` for `j < 0`, `1` for `j = 0`, `sin(π j x)` for `j > 0`.
    Sinusoid1D { j: i32 },
    /// `cos(π j x) · sin(π k y)`
    CosSin { j: f64, k: f64 },
}

impl TestFunction {
    /// `(v, ∂v/∂x_dim, ∂²v/∂x_dim²)` at `p`.
    pub fn jet(&self, p: &[f64], dim: usize) -> [f64; 3] {
        match *self {
            TestFunction::Sinusoid1D { j } => {
                let w = PI * j as f64;
                let (s, c) = (w * p[0]).sin_cos();
                match j {
                    0 => [1.0, 0.0, 0.0],
                    j if j < 0 => [c, -w * s, -w * w * c],
                    _ => [s, w * c, -w * w * s],
                }
            }
            TestFunction::CosSin { j, k } => {
                let (wj, wk) = (PI * j, PI * k);
                let (sx, cx) = (wj * p[0]).sin_cos();
                let (sy, cy) = (wk * p[1]).sin_cos();
                if dim == 0 {
                    [cx * sy, -wj * sx * sy, -wj * wj * cx * sy]
                } else {
                    [cx * sy, wk * cx * cy, -wk * wk * cx * sy]
                }
            }
        }
    }

    pub fn value(&self, p: &[f64]) -> f64 {
        self.jet(p, 0)[0]
    }
}

/// Physical constants of the benchmark problems.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProblemConstants {
    pub kappa: f64,
    pub lambda: f64,
    pub nu: f64,
    /// Burgers solution slope parameter.
    pub burgers_a: f64,
    /// Burgers solution offset parameter.
    pub burgers_b: f64,
}

impl Default for ProblemConstants {
    fn default() -> Self {
        Self {
            kappa: 1.0,
            lambda: 10.0,
            nu: 1.0,
            burgers_a: 3.0,
            burgers_b: 0.0,
        }
    }
}

/// A benchmark problem instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub id: ProblemId,
    pub constants: ProblemConstants,
    /// Burgers only: use the known boundary values instead of the model in
    /// the `[ν f v']` boundary term.
    pub burgers_known_boundary: bool,
}

impl Problem {
    pub fn new(id: ProblemId) -> Self {
        Self {
            id,
            constants: ProblemConstants::default(),
            burgers_known_boundary: false,
        }
    }

    pub fn dims(&self) -> usize {
        self.id.dims()
    }

    /// Damped-oscillator forcing, `κe^{-κx}cos λx + λe^{-κx}sin λx`.
    fn oscillator_source(&self, x: f64) -> f64 {
        let ProblemConstants { kappa, lambda, .. } = self.constants;
        let e = (-kappa * x).exp();
        kappa * e * (lambda * x).cos() + lambda * e * (lambda * x).sin()
    }

    /// Burgers boundary value `f(x)` at `x = ±1`.
    pub fn burgers_boundary(&self, x: f64) -> f64 {
        self.analytic_solution_for(ProblemId::StationaryBurgers, &[x])
    }

    /// Closed-form solution at `p`.
    pub fn analytic_solution(&self, p: &[f64]) -> f64 {
        self.analytic_solution_for(self.id, p)
    }

    fn analytic_solution_for(&self, id: ProblemId, p: &[f64]) -> f64 {
        let c = &self.constants;
        match id {
            ProblemId::DampedOscillator => (-c.kappa * p[0]).exp() * (c.lambda * p[0]).cos(),
            ProblemId::StationaryBurgers => {
                (2.0 * c.nu * c.burgers_a).sqrt()
                    * ((c.burgers_a / (2.0 * c.nu)).sqrt() * (p[0] + c.burgers_b)).tan()
            }
            ProblemId::Linear2D => p[0] * p[0] + p[1] * p[1],
            ProblemId::Laplace2D => (PI * (p[0] - 1.0)).sinh() / (-PI).sinh() * (PI * p[1]).sin(),
        }
    }

    /// Residual of the equation at `p`.
    pub fn residual(&self, p: &[f64], b: &FieldBundle) -> Result<f64> {
        let nu = self.constants.nu;
        Ok(match self.id {
            ProblemId::DampedOscillator => b.d(0)? + self.oscillator_source(p[0]),
            ProblemId::StationaryBurgers => b.f * b.d(0)? - nu * b.d2(0)?,
            ProblemId::Linear2D => b.d(0)? + b.d(1)? - 2.0 * (p[0] + p[1]),
            ProblemId::Laplace2D => b.d2(0)? + b.d2(1)?,
        })
    }

    /// Partial derivatives of [`Problem::residual`] with respect to the field entries.
    pub fn residual_partials(&self, b: &FieldBundle) -> Result<FieldCotangent> {
        let nu = self.constants.nu;
        let mut c = FieldCotangent::default();
        match self.id {
            ProblemId::DampedOscillator => c.df[0] = 1.0,
            ProblemId::StationaryBurgers => {
                c.f = b.d(0)?;
                c.df[0] = b.f;
                c.d2f[0] = -nu;
            }
            ProblemId::Linear2D => c.df = [1.0, 1.0],
            ProblemId::Laplace2D => c.d2f = [1.0, 1.0],
        }
        Ok(c)
    }

    /// Dirichlet conditions, one entry per condition.
    pub fn boundary_conditions(&self) -> Vec<BoundaryCondition> {
        use BoundaryLocation::*;
        use BoundaryTarget::*;
        let bc = |location, target| BoundaryCondition { location, target };
        match self.id {
            ProblemId::DampedOscillator => vec![bc(Point(0.0), Constant(1.0))],
            ProblemId::StationaryBurgers => vec![
                bc(Point(-1.0), Constant(self.burgers_boundary(-1.0))),
                bc(Point(1.0), Constant(self.burgers_boundary(1.0))),
            ],
            ProblemId::Linear2D => vec![
                bc(Edge { fixed_dim: 0, at: 0.0 }, Square { dim: 1 }),
                bc(Edge { fixed_dim: 1, at: 0.0 }, Square { dim: 0 }),
            ],
            ProblemId::Laplace2D => vec![
                bc(Edge { fixed_dim: 0, at: 0.0 }, SinPi { dim: 1 }),
                bc(Edge { fixed_dim: 0, at: 1.0 }, Constant(0.0)),
                bc(Edge { fixed_dim: 1, at: 0.0 }, Constant(0.0)),
                bc(Edge { fixed_dim: 1, at: 1.0 }, Constant(0.0)),
            ],
        }
    }

    /// Test-function family; `seed` only affects the Laplace labels.
    pub fn test_functions(&self, seed: u64) -> Vec<TestFunction> {
        match self.id {
            ProblemId::DampedOscillator | ProblemId::StationaryBurgers => {
                (-5..=5).map(|j| TestFunction::Sinusoid1D { j }).collect()
            }
            ProblemId::Linear2D => (1..=3)
                .flat_map(|j| (1..=3).map(move |k| TestFunction::CosSin { j: j as f64, k: k as f64 }))
                .collect(),
            ProblemId::Laplace2D => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..144)
                    .map(|_| {
                        let j = rng.gen_range(0.1..10.0);
                        let k = rng.gen_range(0.1..10.0);
                        TestFunction::CosSin { j, k }
                    })
                    .collect()
            }
        }
    }

    pub fn default_family_size(&self) -> usize {
        match self.id {
            ProblemId::DampedOscillator | ProblemId::StationaryBurgers => 11,
            ProblemId::Linear2D => 9,
            ProblemId::Laplace2D => 144,
        }
    }
}

/// Model values on one closed 1D subdomain grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub grid: Grid1D,
    pub f: Vec<f64>,
    /// `f'` at the grid points; only read where the weak term needs it.
    pub df: Vec<f64>,
}

/// Model values on the global 2D grid plus normal derivatives on its edges.
#[derive(Clone, Debug, PartialEq)]
pub struct Field2D {
    pub grid: Grid2D,
    /// Row-major values, see [`Grid2D`].
    pub f: Vec<f64>,
    /// `∂f/∂x` on the `x = x_min` edge, indexed by `y`.
    pub fx_low: Vec<f64>,
    /// `∂f/∂x` on the `x = x_max` edge.
    pub fx_high: Vec<f64>,
    /// `∂f/∂y` on the `y = y_min` edge, indexed by `x`.
    pub fy_low: Vec<f64>,
    /// `∂f/∂y` on the `y = y_max` edge.
    pub fy_high: Vec<f64>,
}

/// Inputs of a weak term: the trial function sampled where the integrals need it.
#[derive(Clone, Debug, PartialEq)]
pub enum WeakField {
    /// Subdomain segments in order; the first starts and the last ends on the domain boundary.
    OneD(Vec<Segment>),
    TwoD(Field2D),
}

impl WeakField {
    /// Same shape, all zeros; used to accumulate partial derivatives.
    pub fn zeros_like(&self) -> WeakField {
        match self {
            WeakField::OneD(segs) => WeakField::OneD(
                segs.iter()
                    .map(|s| Segment {
                        grid: s.grid.clone(),
                        f: vec![0.0; s.f.len()],
                        df: vec![0.0; s.df.len()],
                    })
                    .collect(),
            ),
            WeakField::TwoD(f) => WeakField::TwoD(Field2D {
                grid: f.grid.clone(),
                f: vec![0.0; f.f.len()],
                fx_low: vec![0.0; f.fx_low.len()],
                fx_high: vec![0.0; f.fx_high.len()],
                fy_low: vec![0.0; f.fy_low.len()],
                fy_high: vec![0.0; f.fy_high.len()],
            }),
        }
    }
}

/// A test function sampled on the integration points of a [`WeakField`].
#[derive(Clone, Debug, PartialEq)]
pub enum TestSamples {
    /// Per segment `(v, v', v'')` and trapezium weights.
    OneD(Vec<SegmentSamples>),
    TwoD(GridSamples),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentSamples {
    pub weights: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    pub d2v: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSamples {
    pub wx: Vec<f64>,
    pub wy: Vec<f64>,
    /// Product weights in storage order.
    pub w: Vec<f64>,
    pub v: Vec<f64>,
    pub vx: Vec<f64>,
    pub vy: Vec<f64>,
    pub lap_v: Vec<f64>,
}

impl TestSamples {
    pub fn sample(v: &TestFunction, field: &WeakField) -> Self {
        match field {
            WeakField::OneD(segs) => TestSamples::OneD(
                segs.iter()
                    .map(|s| {
                        let jets: Vec<[f64; 3]> =
                            s.grid.points().iter().map(|&x| v.jet(&[x], 0)).collect();
                        SegmentSamples {
                            weights: s.grid.weights(),
                            v: jets.iter().map(|j| j[0]).collect(),
                            dv: jets.iter().map(|j| j[1]).collect(),
                            d2v: jets.iter().map(|j| j[2]).collect(),
                        }
                    })
                    .collect(),
            ),
            WeakField::TwoD(f) => {
                let g = &f.grid;
                let n = g.len();
                let (mut vv, mut vx, mut vy, mut lap) =
                    (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
                for k in 0..n {
                    let p = g.point(k);
                    let jx = v.jet(&p, 0);
                    let jy = v.jet(&p, 1);
                    vv[k] = jx[0];
                    vx[k] = jx[1];
                    vy[k] = jy[1];
                    lap[k] = jx[2] + jy[2];
                }
                TestSamples::TwoD(GridSamples {
                    wx: g.x.weights(),
                    wy: g.y.weights(),
                    w: g.weights(),
                    v: vv,
                    vx,
                    vy,
                    lap_v: lap,
                })
            }
        }
    }
}

impl Problem {
    /// Unsquared weak-form term of one test function, from samples.
    ///
    /// When `partials` is given, `scale · ∂term/∂entry` is added to the
    /// matching entry of the accumulator, which must be shaped like `field`.
    pub fn weak_term_sampled(
        &self,
        samples: &TestSamples,
        field: &WeakField,
        mut partials: Option<(&mut WeakField, f64)>,
    ) -> Result<f64> {
        let nu = self.constants.nu;
        match (self.id, samples, field) {
            (ProblemId::DampedOscillator, TestSamples::OneD(ts), WeakField::OneD(segs)) => {
                check_segments(ts, segs)?;
                let (first, last) = (&segs[0], &segs[segs.len() - 1]);
                let (t0, tl) = (&ts[0], &ts[ts.len() - 1]);
                let ilast = last.f.len() - 1;
                let mut term = last.f[ilast] * tl.v[ilast] - first.f[0] * t0.v[0];
                for (s, t) in segs.iter().zip(ts) {
                    for i in 0..s.f.len() {
                        let x = s.grid.points()[i];
                        term += t.weights[i] * (-s.f[i] * t.dv[i] + t.v[i] * self.oscillator_source(x));
                    }
                }
                if let Some((WeakField::OneD(acc), scale)) = partials.as_mut() {
                    for (a, t) in acc.iter_mut().zip(ts) {
                        for i in 0..a.f.len() {
                            a.f[i] -= *scale * t.weights[i] * t.dv[i];
                        }
                    }
                    let n = acc.len();
                    acc[n - 1].f[ilast] += *scale * tl.v[ilast];
                    acc[0].f[0] -= *scale * t0.v[0];
                }
                Ok(term)
            }
            (ProblemId::StationaryBurgers, TestSamples::OneD(ts), WeakField::OneD(segs)) => {
                check_segments(ts, segs)?;
                let nseg = segs.len();
                let (first, last) = (&segs[0], &segs[nseg - 1]);
                let (t0, tl) = (&ts[0], &ts[nseg - 1]);
                let il = last.f.len() - 1;
                let (f_hi, f_lo) = if self.burgers_known_boundary {
                    (self.burgers_boundary(1.0), self.burgers_boundary(-1.0))
                } else {
                    (last.f[il], first.f[0])
                };
                let mut term = nu * (f_hi * tl.dv[il] - f_lo * t0.dv[0])
                    - nu * (last.df[il] * tl.v[il] - first.df[0] * t0.v[0]);
                for (s, t) in segs.iter().zip(ts) {
                    for i in 0..s.f.len() {
                        term += t.weights[i] * (-nu * s.f[i] * t.d2v[i] + s.f[i] * s.df[i] * t.v[i]);
                    }
                }
                if let Some((WeakField::OneD(acc), scale)) = partials.as_mut() {
                    let scale = *scale;
                    for ((a, s), t) in acc.iter_mut().zip(segs).zip(ts) {
                        for i in 0..a.f.len() {
                            a.f[i] += scale * t.weights[i] * (-nu * t.d2v[i] + s.df[i] * t.v[i]);
                            a.df[i] += scale * t.weights[i] * s.f[i] * t.v[i];
                        }
                    }
                    if !self.burgers_known_boundary {
                        acc[nseg - 1].f[il] += scale * nu * tl.dv[il];
                        acc[0].f[0] -= scale * nu * t0.dv[0];
                    }
                    acc[nseg - 1].df[il] -= scale * nu * tl.v[il];
                    acc[0].df[0] += scale * nu * t0.v[0];
                }
                Ok(term)
            }
            (ProblemId::Linear2D, TestSamples::TwoD(t), WeakField::TwoD(fd)) => {
                check_grid(t, fd)?;
                let g = &fd.grid;
                let (nx, ny) = (g.x.len(), g.y.len());
                let idx = |i, j| g.index(i, j);
                let mut term = 0.0;
                // x-boundary: ∫ [f v]_{x=0}^{1} dy, then y-boundary
                for j in 0..ny {
                    let (hi, lo) = (idx(nx - 1, j), idx(0, j));
                    term += t.wy[j] * (fd.f[hi] * t.v[hi] - fd.f[lo] * t.v[lo]);
                }
                for i in 0..nx {
                    let (hi, lo) = (idx(i, ny - 1), idx(i, 0));
                    term += t.wx[i] * (fd.f[hi] * t.v[hi] - fd.f[lo] * t.v[lo]);
                }
                for k in 0..g.len() {
                    let p = g.point(k);
                    term += t.w[k] * (-fd.f[k] * (t.vx[k] + t.vy[k]) - 2.0 * (p[0] + p[1]) * t.v[k]);
                }
                if let Some((WeakField::TwoD(acc), scale)) = partials.as_mut() {
                    let scale = *scale;
                    for k in 0..g.len() {
                        acc.f[k] -= scale * t.w[k] * (t.vx[k] + t.vy[k]);
                    }
                    for j in 0..ny {
                        let (hi, lo) = (idx(nx - 1, j), idx(0, j));
                        acc.f[hi] += scale * t.wy[j] * t.v[hi];
                        acc.f[lo] -= scale * t.wy[j] * t.v[lo];
                    }
                    for i in 0..nx {
                        let (hi, lo) = (idx(i, ny - 1), idx(i, 0));
                        acc.f[hi] += scale * t.wx[i] * t.v[hi];
                        acc.f[lo] -= scale * t.wx[i] * t.v[lo];
                    }
                }
                Ok(term)
            }
            (ProblemId::Laplace2D, TestSamples::TwoD(t), WeakField::TwoD(fd)) => {
                check_grid(t, fd)?;
                let g = &fd.grid;
                let (nx, ny) = (g.x.len(), g.y.len());
                if fd.fx_low.len() != ny || fd.fx_high.len() != ny || fd.fy_low.len() != nx || fd.fy_high.len() != nx {
                    return Err(contract("Laplace weak term needs normal derivatives on all four edges"));
                }
                let idx = |i, j| g.index(i, j);
                let mut term: f64 = (0..g.len()).map(|k| t.w[k] * fd.f[k] * t.lap_v[k]).sum();
                for j in 0..ny {
                    let y = g.y.points()[j];
                    let (lo, hi) = (idx(0, j), idx(nx - 1, j));
                    // known trace f(0, y) = sin(πy) replaces the model in -∮ f ∂v/∂n on x = 0
                    term += t.wy[j]
                        * ((PI * y).sin() * t.vx[lo] - fd.fx_low[j] * t.v[lo] + fd.fx_high[j] * t.v[hi]);
                }
                for i in 0..nx {
                    let (lo, hi) = (idx(i, 0), idx(i, ny - 1));
                    term += t.wx[i] * (fd.fy_high[i] * t.v[hi] - fd.fy_low[i] * t.v[lo]);
                }
                if let Some((WeakField::TwoD(acc), scale)) = partials.as_mut() {
                    let scale = *scale;
                    for k in 0..g.len() {
                        acc.f[k] += scale * t.w[k] * t.lap_v[k];
                    }
                    for j in 0..ny {
                        acc.fx_low[j] -= scale * t.wy[j] * t.v[idx(0, j)];
                        acc.fx_high[j] += scale * t.wy[j] * t.v[idx(nx - 1, j)];
                    }
                    for i in 0..nx {
                        acc.fy_low[i] -= scale * t.wx[i] * t.v[idx(i, 0)];
                        acc.fy_high[i] += scale * t.wx[i] * t.v[idx(i, ny - 1)];
                    }
                }
                Ok(term)
            }
            _ => Err(contract(format!(
                "weak field / samples do not match the dimensionality of {}",
                self.id
            ))),
        }
    }

    /// Unsquared weak term of `v` for the trial function sampled in `field`.
    pub fn weak_term(&self, v: &TestFunction, field: &WeakField) -> Result<f64> {
        self.weak_term_sampled(&TestSamples::sample(v, field), field, None)
    }
}

fn check_segments(ts: &[SegmentSamples], segs: &[Segment]) -> Result<()> {
    if segs.is_empty() || ts.len() != segs.len() {
        return Err(contract("weak term needs one sample set per segment"));
    }
    for (s, t) in segs.iter().zip(ts) {
        if s.f.len() != s.grid.len() || s.df.len() != s.grid.len() || t.v.len() != s.grid.len() {
            return Err(contract("segment values do not match the segment grid"));
        }
    }
    Ok(())
}

fn check_grid(t: &GridSamples, fd: &Field2D) -> Result<()> {
    if fd.f.len() != fd.grid.len() || t.v.len() != fd.grid.len() {
        return Err(contract("2D field does not match its grid"));
    }
    Ok(())
}
