//! Train the four strategies on one problem and compare them.
//!
//! `cargo run --release --example train_strategies -- burgers 0 500`

use weakform_qpinn::decomposition::summed_squared_jump;
use weakform_qpinn::experiment::Experiment;
use weakform_qpinn::losses::Strategy;
use weakform_qpinn::problems::ProblemId;
use weakform_qpinn::training::{train, TrainerConfig};

fn main() -> weakform_qpinn::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let id: ProblemId = args.first().map_or("damped_oscillator", String::as_str).parse()?;
    let seed: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let default_epochs = if id == ProblemId::Laplace2D { 800 } else { 500 };
    let epochs: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(default_epochs);

    let exp = Experiment::for_problem(id, seed)?;
    println!("{id}: {} subdomains, {} training points, {} test functions, {epochs} epochs", exp.decomposition.len(), exp.decomposition.points.len(), exp.family.len());
    for strategy in Strategy::ALL {
        let (model, history) = train(&exp, &TrainerConfig::new(strategy, epochs, seed))?;
        let (first, last) = (history[0], history[history.len() - 1]);
        let best = history.iter().map(|r| r.metric).fold(f64::INFINITY, f64::min);
        println!(
            "{strategy:10} loss {:.3e} -> {:.3e}   metric {:.3e} -> {:.3e} (best {best:.3e})   interface jump² {:.3e}",
            first.loss.total,
            last.loss.total,
            first.metric,
            last.metric,
            summed_squared_jump(&exp.decomposition, &model)?
        );
    }
    Ok(())
}
