//! Evaluate every strategy's loss and its exact parameter gradient, and
//! spot-check one coordinate against a finite difference.

use weakform_qpinn::experiment::Experiment;
use weakform_qpinn::losses::{GatingOptions, LossPlan, LossWeights, Objective, Strategy};
use weakform_qpinn::problems::ProblemId;
use weakform_qpinn::training::init_params;

fn main() -> weakform_qpinn::Result<()> {
    let exp = Experiment::for_problem(ProblemId::StationaryBurgers, 0)?;
    let mut model = init_params(&exp.qnn, exp.decomposition.len(), 1);
    for strategy in Strategy::ALL {
        let objective = Objective {
            plan: LossPlan::new(&exp.problem, &exp.decomposition, exp.family.clone())?,
            strategy,
            weights: LossWeights::default(),
            gating: GatingOptions::default(),
        };
        let (loss, grad) = objective.value_and_grad(&model)?;
        let k = 7;
        let mut flat = model.to_flat();
        let h = 1e-5;
        flat[k] += h;
        model.set_flat(&flat)?;
        let up = objective.evaluate(&model)?.total;
        flat[k] -= 2.0 * h;
        model.set_flat(&flat)?;
        let down = objective.evaluate(&model)?.total;
        flat[k] += h;
        model.set_flat(&flat)?;
        println!(
            "{strategy:10} total {:.6e} (de {:.3e}, ibv {:.3e}, sbc {:.3e}, wf {:.3e})  ∂/∂p{k}: exact {:+.8e}, fd {:+.8e}",
            loss.total,
            loss.l_de,
            loss.l_ibv,
            loss.l_sbc,
            loss.l_wf,
            grad[k],
            (up - down) / (2.0 * h)
        );
    }
    Ok(())
}
