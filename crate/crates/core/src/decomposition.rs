//! Domain decomposition into axis-aligned subdomains, each with its own model.
//!
//! Subdomains form a tensor product of per-coordinate cells and are indexed
//! row-major (`cell_x * cells_y + cell_y`). Points on a shared boundary belong
//! to the lowest-indexed subdomain that contains them.

use crate::diffqnn::{DerivativeRequest, ModelParams, Qnn};
use crate::error::{config, contract, Result};
use crate::problems::{FieldBundle, ProblemId};
use crate::quadrature::{Grid1D, Grid2D};

/// How training points are laid out.
#[derive(Clone, Debug, PartialEq)]
pub enum GridSpec {
    /// 1D only: a closed uniform grid with this many points in every subdomain.
    PerSubdomain(usize),
    /// 2D only: one global uniform grid with `[nx, ny]` points, partitioned by owner.
    Global([usize; 2]),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Subdomain {
    pub bounds: Vec<(f64, f64)>,
    /// Own closed quadrature grid (1D layouts only).
    pub grid: Option<Grid1D>,
}

impl Subdomain {
    pub fn contains(&self, p: &[f64]) -> bool {
        self.bounds.iter().zip(p).all(|(&(lo, hi), &x)| lo <= x && x <= hi)
    }
}

/// A training point and the subdomain whose model is evaluated there.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingPoint {
    pub point: Vec<f64>,
    pub owner: usize,
}

/// Boundary shared by two adjacent subdomains.
#[derive(Clone, Debug, PartialEq)]
pub struct Interface {
    pub lower: usize,
    pub upper: usize,
    /// Coordinate normal to the interface.
    pub normal_dim: usize,
    pub at: f64,
    pub samples: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub domain: Vec<(f64, f64)>,
    /// Per coordinate: domain start, splits, domain end.
    pub cuts: Vec<Vec<f64>>,
    pub subdomains: Vec<Subdomain>,
    pub interfaces: Vec<Interface>,
    pub global_grid: Option<Grid2D>,
    pub points: Vec<TrainingPoint>,
}

impl Decomposition {
    pub fn build(domain: &[(f64, f64)], splits: &[Vec<f64>], grid: &GridSpec) -> Result<Self> {
        let dims = domain.len();
        if !(1..=2).contains(&dims) || splits.len() != dims {
            return Err(config(format!("need splits for each of the {dims} coordinates")));
        }
        let mut cuts = Vec::with_capacity(dims);
        for (d, (&(lo, hi), s)) in domain.iter().zip(splits).enumerate() {
            let mut c = vec![lo];
            for &x in s {
                if !(x > *c.last().unwrap() && x < hi) {
                    return Err(config(format!(
                        "split {x} on coordinate {d} must be increasing and strictly inside ({lo}, {hi})"
                    )));
                }
                c.push(x);
            }
            c.push(hi);
            cuts.push(c);
        }
        let cells: Vec<usize> = cuts.iter().map(|c| c.len() - 1).collect();
        let count: usize = cells.iter().product();

        let global_grid = match (dims, grid) {
            (1, GridSpec::PerSubdomain(n)) if *n >= 2 => None,
            (2, GridSpec::Global([nx, ny])) if *nx >= 2 && *ny >= 2 => Some(Grid2D::new(
                Grid1D::uniform(domain[0].0, domain[0].1, *nx)?,
                Grid1D::uniform(domain[1].0, domain[1].1, *ny)?,
            )),
            _ => return Err(config(format!("grid {grid:?} does not fit a {dims}D domain"))),
        };

        let mut subdomains = Vec::with_capacity(count);
        for idx in 0..count {
            let multi = unflatten(idx, &cells);
            let bounds: Vec<(f64, f64)> =
                (0..dims).map(|d| (cuts[d][multi[d]], cuts[d][multi[d] + 1])).collect();
            let grid = match grid {
                GridSpec::PerSubdomain(n) => Some(Grid1D::uniform(bounds[0].0, bounds[0].1, *n)?),
                GridSpec::Global(_) => None,
            };
            subdomains.push(Subdomain { bounds, grid });
        }

        let mut dec = Decomposition {
            domain: domain.to_vec(),
            cuts,
            subdomains,
            interfaces: Vec::new(),
            global_grid,
            points: Vec::new(),
        };

        dec.points = match &dec.global_grid {
            None => dec
                .subdomains
                .iter()
                .enumerate()
                .flat_map(|(owner, s)| {
                    s.grid.as_ref().unwrap().points().iter().map(move |&x| TrainingPoint { point: vec![x], owner })
                })
                .collect(),
            Some(g) => (0..g.len())
                .map(|k| {
                    let point = g.point(k).to_vec();
                    dec.locate(&point).map(|owner| TrainingPoint { point, owner })
                })
                .collect::<Result<_>>()?,
        };

        for d in 0..dims {
            for k in 0..cells[d] - 1 {
                for idx in 0..count {
                    let multi = unflatten(idx, &cells);
                    if multi[d] != k {
                        continue;
                    }
                    let mut up = multi.clone();
                    up[d] += 1;
                    let at = dec.cuts[d][k + 1];
                    let samples = match &dec.global_grid {
                        None => vec![vec![at]],
                        Some(g) => {
                            let e = 1 - d;
                            let (lo, hi) = dec.subdomains[idx].bounds[e];
                            let axis = if e == 0 { &g.x } else { &g.y };
                            axis.points()
                                .iter()
                                .filter(|&&t| lo <= t && t <= hi)
                                .map(|&t| {
                                    let mut p = vec![0.0; 2];
                                    p[d] = at;
                                    p[e] = t;
                                    p
                                })
                                .collect()
                        }
                    };
                    dec.interfaces.push(Interface {
                        lower: idx,
                        upper: flatten(&up, &cells),
                        normal_dim: d,
                        at,
                        samples,
                    });
                }
            }
        }
        Ok(dec)
    }

    /// Default layout for a benchmark problem.
    pub fn for_problem(id: ProblemId) -> Result<Self> {
        let (splits, grid) = default_layout(id);
        Self::build(&id.domain(), &splits, &grid)
    }

    pub fn dims(&self) -> usize {
        self.domain.len()
    }

    pub fn len(&self) -> usize {
        self.subdomains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subdomains.is_empty()
    }

    /// Index of the lowest-numbered subdomain containing `p`.
    pub fn locate(&self, p: &[f64]) -> Result<usize> {
        if p.len() != self.dims() {
            return Err(contract(format!("point has {} coordinates, domain has {}", p.len(), self.dims())));
        }
        let cells: Vec<usize> = self.cuts.iter().map(|c| c.len() - 1).collect();
        let mut multi = Vec::with_capacity(p.len());
        for (d, &x) in p.iter().enumerate() {
            let c = &self.cuts[d];
            if !(c[0] <= x && x <= c[c.len() - 1]) {
                return Err(contract(format!("point {p:?} lies outside the domain")));
            }
            multi.push((0..cells[d]).find(|&k| x <= c[k + 1]).unwrap());
        }
        Ok(flatten(&multi, &cells))
    }
}

/// Default splits and grid of each benchmark problem.
pub fn default_layout(id: ProblemId) -> (Vec<Vec<f64>>, GridSpec) {
    match id {
        ProblemId::DampedOscillator | ProblemId::StationaryBurgers => {
            (vec![vec![-0.33, 0.33]], GridSpec::PerSubdomain(30))
        }
        ProblemId::Linear2D => (vec![vec![0.5], vec![0.5]], GridSpec::Global([20, 20])),
        ProblemId::Laplace2D => (vec![vec![0.5], vec![0.5]], GridSpec::Global([21, 21])),
    }
}

fn unflatten(mut idx: usize, cells: &[usize]) -> Vec<usize> {
    let mut m = vec![0; cells.len()];
    for d in (0..cells.len()).rev() {
        m[d] = idx % cells[d];
        idx /= cells[d];
    }
    m
}

fn flatten(multi: &[usize], cells: &[usize]) -> usize {
    multi.iter().zip(cells).fold(0, |acc, (&m, &c)| acc * c + m)
}

/// Model values, input derivatives, or both, at a point of a given subdomain.
pub trait TrialFunction {
    /// `orders[d]` is the highest derivative needed along coordinate `d`.
    fn bundle(&self, subdomain: usize, point: &[f64], orders: &[usize]) -> Result<FieldBundle>;
}

/// One shared circuit structure with independent parameters per subdomain.
#[derive(Clone, Debug)]
pub struct PiecewiseModel {
    pub qnn: Qnn,
    pub params: Vec<ModelParams>,
}

impl PiecewiseModel {
    pub fn flat_len(&self) -> usize {
        self.params.iter().map(ModelParams::flat_len).sum()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.flat_len());
        for p in &self.params {
            p.write_flat(&mut out);
        }
        out
    }

    pub fn set_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.flat_len() {
            return Err(contract(format!("expected {} parameters, got {}", self.flat_len(), flat.len())));
        }
        let mut off = 0;
        for p in &mut self.params {
            let n = p.flat_len();
            p.read_flat(&flat[off..off + n]);
            off += n;
        }
        Ok(())
    }

    fn model(&self, subdomain: usize) -> Result<&ModelParams> {
        self.params
            .get(subdomain)
            .ok_or_else(|| contract(format!("no model for subdomain {subdomain}")))
    }
}

impl TrialFunction for PiecewiseModel {
    fn bundle(&self, subdomain: usize, point: &[f64], orders: &[usize]) -> Result<FieldBundle> {
        let params = self.model(subdomain)?;
        let mut b = FieldBundle::default();
        let mut have_value = false;
        for (d, &o) in orders.iter().enumerate() {
            if o == 0 {
                continue;
            }
            let j = self.qnn.jet(params, point, d, o)?;
            b.f = j[0];
            have_value = true;
            b.df[d] = Some(j[1]);
            if o == 2 {
                b.d2f[d] = Some(j[2]);
            }
        }
        if !have_value {
            b.f = self.qnn.value(params, point)?;
        }
        Ok(b)
    }
}

/// Evaluates the owning subdomain's model at `p`.
pub fn piecewise_eval(
    dec: &Decomposition,
    trial: &impl TrialFunction,
    p: &[f64],
    req: DerivativeRequest,
) -> Result<f64> {
    let owner = dec.locate(p)?;
    let mut orders = vec![0; dec.dims()];
    if req.order > 0 {
        *orders
            .get_mut(req.dim)
            .ok_or_else(|| contract(format!("derivative along missing coordinate {}", req.dim)))? = req.order;
    }
    let b = trial.bundle(owner, p, &orders)?;
    Ok(match req.order {
        0 => b.f,
        1 => b.df[req.dim].unwrap(),
        _ => b.d2f[req.dim].unwrap(),
    })
}

/// Squared model jumps `(f_upper − f_lower)²` at every interface sample, per interface.
pub fn interface_jumps(dec: &Decomposition, trial: &impl TrialFunction) -> Result<Vec<Vec<f64>>> {
    let zero = vec![0; dec.dims()];
    dec.interfaces
        .iter()
        .map(|i| {
            i.samples
                .iter()
                .map(|p| {
                    let lo = trial.bundle(i.lower, p, &zero)?.f;
                    let hi = trial.bundle(i.upper, p, &zero)?.f;
                    Ok((hi - lo).powi(2))
                })
                .collect()
        })
        .collect()
}

/// Sum over all interface samples of the squared jump.
pub fn summed_squared_jump(dec: &Decomposition, trial: &impl TrialFunction) -> Result<f64> {
    Ok(interface_jumps(dec, trial)?.iter().flatten().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_counts() {
        let osc = Decomposition::for_problem(ProblemId::DampedOscillator).unwrap();
        assert_eq!((osc.len(), osc.interfaces.len(), osc.points.len()), (3, 2, 90));
        let lin = Decomposition::for_problem(ProblemId::Linear2D).unwrap();
        assert_eq!((lin.len(), lin.interfaces.len(), lin.points.len()), (4, 4, 400));
        for s in 0..4 {
            assert_eq!(lin.points.iter().filter(|p| p.owner == s).count(), 100);
        }
        let lap = Decomposition::for_problem(ProblemId::Laplace2D).unwrap();
        assert_eq!((lap.len(), lap.points.len()), (4, 441));
        let per: Vec<usize> = (0..4).map(|s| lap.points.iter().filter(|p| p.owner == s).count()).collect();
        assert_eq!(per, vec![121, 110, 110, 100]);
    }

    #[test]
    fn no_splits_is_one_subdomain() {
        let d = Decomposition::build(&[(-1.0, 1.0)], &[vec![]], &GridSpec::PerSubdomain(5)).unwrap();
        assert_eq!((d.len(), d.interfaces.len()), (1, 0));
    }

    #[test]
    fn bad_splits_are_rejected() {
        for s in [vec![1.0], vec![-1.5], vec![0.3, 0.1]] {
            assert!(Decomposition::build(&[(-1.0, 1.0)], &[s], &GridSpec::PerSubdomain(5)).is_err());
        }
        assert!(Decomposition::build(&[(0.0, 1.0)], &[vec![]], &GridSpec::Global([3, 3])).is_err());
    }

    #[test]
    fn locate_tie_breaks_low() {
        let d = Decomposition::for_problem(ProblemId::DampedOscillator).unwrap();
        assert_eq!(d.locate(&[-0.5]).unwrap(), 0);
        assert_eq!(d.locate(&[-0.33]).unwrap(), 0);
        assert_eq!(d.locate(&[0.33]).unwrap(), 1);
        assert_eq!(d.locate(&[1.0]).unwrap(), 2);
        assert!(d.locate(&[1.01]).is_err());
        let d = Decomposition::for_problem(ProblemId::Laplace2D).unwrap();
        assert_eq!(d.locate(&[0.5, 0.5]).unwrap(), 0);
        assert_eq!(d.locate(&[0.5, 0.7]).unwrap(), 1);
        assert_eq!(d.locate(&[0.7, 0.5]).unwrap(), 2);
        assert_eq!(d.locate(&[0.7, 0.7]).unwrap(), 3);
    }

    #[test]
    fn interfaces_2d() {
        let d = Decomposition::for_problem(ProblemId::Linear2D).unwrap();
        let pairs: Vec<(usize, usize)> = d.interfaces.iter().map(|i| (i.lower, i.upper)).collect();
        assert_eq!(pairs, vec![(0, 2), (1, 3), (0, 1), (2, 3)]);
        for i in &d.interfaces {
            assert_eq!(i.samples.len(), 10);
            assert!(i.samples.iter().all(|p| p[i.normal_dim] == 0.5));
        }
        let d = Decomposition::for_problem(ProblemId::Laplace2D).unwrap();
        assert!(d.interfaces.iter().all(|i| i.samples.len() == 11));
    }
}
