//! Subdomains, ownership, interfaces, and the piecewise model built on them.

use weakform_qpinn::decomposition::{piecewise_eval, summed_squared_jump, Decomposition};
use weakform_qpinn::diffqnn::DerivativeRequest;
use weakform_qpinn::experiment::Experiment;
use weakform_qpinn::problems::ProblemId;
use weakform_qpinn::training::init_params;

fn main() -> weakform_qpinn::Result<()> {
    for id in ProblemId::ALL {
        let d = Decomposition::for_problem(id)?;
        let owned: Vec<usize> = (0..d.len()).map(|s| d.points.iter().filter(|p| p.owner == s).count()).collect();
        println!("{id:18} {} subdomains, {} interfaces, points per owner {owned:?}", d.len(), d.interfaces.len());
    }

    let exp = Experiment::for_problem(ProblemId::DampedOscillator, 0)?;
    let d = &exp.decomposition;
    for x in [-0.5, -0.33, 0.0, 0.33, 1.0] {
        println!("x = {x:+.2} belongs to subdomain {}", d.locate(&[x])?);
    }
    let model = init_params(&exp.qnn, d.len(), 0);
    for x in [-0.33, 0.33] {
        let f = piecewise_eval(d, &model, &[x], DerivativeRequest::value())?;
        println!("untrained f({x:+.2}) = {f:+.6}");
    }
    println!("summed squared interface jump of the untrained model: {:.6}", summed_squared_jump(d, &model)?);
    Ok(())
}
