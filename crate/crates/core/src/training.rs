//! Full-batch ADAM training of all subdomain models against one strategy's loss.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomposition::{piecewise_eval, Decomposition, PiecewiseModel, TrialFunction};
use crate::diffqnn::{DerivativeRequest, ModelParams, Qnn};
use crate::error::{contract, Error, Result};
use crate::experiment::Experiment;
use crate::losses::{Component, GatingOptions, LossBreakdown, LossPlan, LossWeights, Objective, Strategy};
use crate::problems::Problem;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self { lr: 0.2, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(len: usize, config: AdamConfig) -> Self {
        Self { config, m: vec![0.0; len], v: vec![0.0; len], t: 0 }
    }

    /// One bias-corrected update of `params` in place.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) -> Result<()> {
        if params.len() != self.m.len() || grad.len() != self.m.len() {
            return Err(contract(format!(
                "optimizer holds {} moments, got {} params and {} gradient entries",
                self.m.len(),
                params.len(),
                grad.len()
            )));
        }
        if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
            return Err(contract(format!("gradient entry {i} is not finite")));
        }
        let AdamConfig { lr, beta1, beta2, eps } = self.config;
        self.t += 1;
        let c1 = 1.0 - beta1.powi(self.t as i32);
        let c2 = 1.0 - beta2.powi(self.t as i32);
        for i in 0..params.len() {
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * grad[i];
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
        Ok(())
    }
}

/// Functional form of [`AdamState::step`].
pub fn adam_step(mut state: AdamState, mut params: Vec<f64>, grad: &[f64]) -> Result<(Vec<f64>, AdamState)> {
    state.step(&mut params, grad)?;
    Ok((params, state))
}

/// θ uniform on `[0, 2π)` from one seeded stream, subdomain by subdomain; `a = 1`, `b = 0`.
pub fn init_params(qnn: &Qnn, num_subdomains: usize, seed: u64) -> PiecewiseModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = (0..num_subdomains)
        .map(|_| ModelParams {
            theta: (0..qnn.num_theta()).map(|_| rng.gen_range(0.0..TAU)).collect(),
            a: 1.0,
            b: 0.0,
        })
        .collect();
    PiecewiseModel { qnn: qnn.clone(), params }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainerConfig {
    pub epochs: usize,
    pub seed: u64,
    pub strategy: Strategy,
    pub weights: LossWeights,
    pub gating: GatingOptions,
    pub adam: AdamConfig,
}

impl TrainerConfig {
    pub fn new(strategy: Strategy, epochs: usize, seed: u64) -> Self {
        Self {
            epochs,
            seed,
            strategy,
            weights: LossWeights::default(),
            gating: GatingOptions::default(),
            adam: AdamConfig::default(),
        }
    }
}

/// State after `epoch` optimizer steps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainRecord {
    pub epoch: usize,
    pub loss: LossBreakdown,
    pub metric: f64,
}

/// Mean squared error against the analytic solution over the training points.
pub fn measure_of_success(problem: &Problem, dec: &Decomposition, trial: &impl TrialFunction) -> Result<f64> {
    let n = dec.points.len() as f64;
    let mut s = 0.0;
    for tp in &dec.points {
        let f = piecewise_eval(dec, trial, &tp.point, DerivativeRequest::value())?;
        let e = f - problem.analytic_solution(&tp.point);
        s += e * e / n;
    }
    Ok(s)
}

pub fn train(exp: &Experiment, cfg: &TrainerConfig) -> Result<(PiecewiseModel, Vec<TrainRecord>)> {
    train_with(exp, cfg, |_| {})
}

/// [`train`] with a callback after every record.
pub fn train_with(
    exp: &Experiment,
    cfg: &TrainerConfig,
    mut on_record: impl FnMut(&TrainRecord),
) -> Result<(PiecewiseModel, Vec<TrainRecord>)> {
    if cfg.epochs == 0 {
        return Err(Error::Config("epochs must be at least 1".into()));
    }
    cfg.weights.validate()?;
    let objective = Objective {
        plan: LossPlan::new(&exp.problem, &exp.decomposition, exp.family.clone())?,
        strategy: cfg.strategy,
        weights: cfg.weights,
        gating: cfg.gating,
    };
    let mut pm = init_params(&exp.qnn, exp.decomposition.len(), cfg.seed);
    let mut flat = pm.to_flat();
    let mut adam = AdamState::new(flat.len(), cfg.adam);
    let mut history = Vec::with_capacity(cfg.epochs + 1);

    for epoch in 0..=cfg.epochs {
        let last = epoch == cfg.epochs;
        let (loss, grad) = if last {
            (objective.evaluate(&pm)?, Vec::new())
        } else {
            objective.value_and_grad(&pm)?
        };
        check_loss(&loss, epoch)?;
        let metric = measure_of_success(&exp.problem, &exp.decomposition, &pm)?;
        if !metric.is_finite() {
            return Err(Error::NonFinite { quantity: "metric", epoch, component: "measure_of_success".into() });
        }
        let record = TrainRecord { epoch, loss, metric };
        on_record(&record);
        history.push(record);
        if last {
            break;
        }
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite { quantity: "gradient", epoch, component: blame_gradient(&objective, &pm) });
        }
        adam.step(&mut flat, &grad)?;
        pm.set_flat(&flat)?;
    }
    Ok((pm, history))
}

fn check_loss(loss: &LossBreakdown, epoch: usize) -> Result<()> {
    for c in Component::ALL {
        if !loss.get(c).is_finite() {
            return Err(Error::NonFinite { quantity: "loss", epoch, component: c.name().into() });
        }
    }
    if !loss.total.is_finite() {
        return Err(Error::NonFinite { quantity: "loss", epoch, component: "total".into() });
    }
    Ok(())
}

fn blame_gradient(objective: &Objective, pm: &PiecewiseModel) -> String {
    let bad: Vec<&str> = Component::ALL
        .into_iter()
        .filter(|&c| match objective.component_grad(pm, c) {
            Ok(g) => g.iter().any(|x| !x.is_finite()),
            Err(_) => true,
        })
        .map(Component::name)
        .collect();
    if bad.is_empty() {
        "total".into()
    } else {
        bad.join("+")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params() {
        let (p, _) = adam_step(AdamState::new(3, AdamConfig::default()), vec![1.0, 2.0, 3.0], &[0.0; 3]).unwrap();
        assert_eq!(p, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn first_step_is_learning_rate() {
        let (p, s) = adam_step(AdamState::new(1, AdamConfig::default()), vec![0.0], &[1.0]).unwrap();
        assert!((p[0] + 0.2 / (1.0 + 1e-8)).abs() < 1e-15);
        assert_eq!(s.t, 1);
    }

    #[test]
    fn constant_gradient_steps_approach_learning_rate() {
        let mut s = AdamState::new(1, AdamConfig::default());
        let mut p = vec![0.0];
        let mut prev = 0.0;
        for _ in 0..5000 {
            s.step(&mut p, &[0.3]).unwrap();
            let d = p[0] - prev;
            prev = p[0];
            assert!((d.abs() - 0.2).abs() < 1e-6);
        }
        assert!(s.v.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn non_finite_gradient_rejected() {
        let mut s = AdamState::new(2, AdamConfig::default());
        assert!(s.step(&mut [0.0, 0.0], &[f64::NAN, 0.0]).is_err());
        assert!(s.step(&mut [0.0], &[0.0]).is_err());
    }
}
