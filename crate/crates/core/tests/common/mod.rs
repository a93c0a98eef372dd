#![allow(dead_code)]

use weakform_qpinn::decomposition::TrialFunction;
use weakform_qpinn::experiment::{Experiment, ModelSettings};
use weakform_qpinn::decomposition::GridSpec;
use weakform_qpinn::problems::{FieldBundle, Problem, ProblemId};
use weakform_qpinn::Result;

/// The same closed-form function in every subdomain, derivatives by central differences.
pub struct Oracle<F: Fn(&[f64]) -> f64>(pub F);

impl<F: Fn(&[f64]) -> f64> TrialFunction for Oracle<F> {
    fn bundle(&self, _sub: usize, p: &[f64], orders: &[usize]) -> Result<FieldBundle> {
        let mut b = FieldBundle::value((self.0)(p));
        for (d, &o) in orders.iter().enumerate() {
            let at = |h: f64| {
                let mut q = p.to_vec();
                q[d] += h;
                (self.0)(&q)
            };
            if o >= 1 {
                let h = 1e-5;
                b.df[d] = Some((at(h) - at(-h)) / (2.0 * h));
            }
            if o >= 2 {
                let h = 1e-4;
                b.d2f[d] = Some((at(h) - 2.0 * b.f + at(-h)) / (h * h));
            }
        }
        Ok(b)
    }
}

/// A constant per subdomain.
pub struct Constants(pub Vec<f64>);

impl TrialFunction for Constants {
    fn bundle(&self, sub: usize, _p: &[f64], orders: &[usize]) -> Result<FieldBundle> {
        let mut b = FieldBundle::value(self.0[sub]);
        for (d, &o) in orders.iter().enumerate() {
            if o >= 1 {
                b.df[d] = Some(0.0);
            }
            if o >= 2 {
                b.d2f[d] = Some(0.0);
            }
        }
        Ok(b)
    }
}

/// Two qubits, depth-1 ansatz, 8 training points, 3 test functions.
pub fn shrunken(id: ProblemId) -> Experiment {
    let problem = Problem::new(id);
    let family = problem.test_functions(0).into_iter().take(3).collect();
    let mut model = ModelSettings::for_problem(id);
    model.num_qubits = 2;
    model.depth = 1;
    let (splits, grid) = if id.dims() == 1 {
        (vec![vec![0.0]], GridSpec::PerSubdomain(4))
    } else {
        (vec![vec![0.5], vec![0.5]], GridSpec::Global([4, 2]))
    };
    Experiment::custom(problem, &model, &splits, &grid, family).unwrap()
}
