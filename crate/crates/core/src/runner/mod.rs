//! Experiment runner behind the `solve` binary: trains the selected
//! strategies and writes CSV histories, solutions and SVG figures.

mod config;
pub mod svg;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub use config::{Overrides, RunConfig, StrategySelection};

use crate::decomposition::{piecewise_eval, PiecewiseModel};
use crate::diffqnn::DerivativeRequest;
use crate::error::{Error, Result};
use crate::experiment::Experiment;
use crate::losses::{Component, Strategy};
use crate::training::{train_with, TrainRecord};

/// One trained strategy.
#[derive(Clone, Debug)]
pub struct StrategyRun {
    pub strategy: Strategy,
    pub history: Vec<TrainRecord>,
    pub model: PiecewiseModel,
}

impl StrategyRun {
    pub fn last(&self) -> &TrainRecord {
        self.history.last().expect("history holds at least the initial record")
    }
}

/// Training points with the truth and each strategy's owner-model value.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionTable {
    pub strategies: Vec<Strategy>,
    pub points: Vec<Vec<f64>>,
    pub truth: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl SolutionTable {
    pub fn new(exp: &Experiment, runs: &[StrategyRun]) -> Result<Self> {
        let points: Vec<Vec<f64>> = exp.decomposition.points.iter().map(|t| t.point.clone()).collect();
        let truth = points.iter().map(|p| exp.problem.analytic_solution(p)).collect();
        let values = runs
            .iter()
            .map(|r| {
                points
                    .iter()
                    .map(|p| piecewise_eval(&exp.decomposition, &r.model, p, DerivativeRequest::value()))
                    .collect()
            })
            .collect::<Result<_>>()?;
        Ok(Self { strategies: runs.iter().map(|r| r.strategy).collect(), points, truth, values })
    }
}

/// Trains every selected strategy; `progress` receives each record.
pub fn train_all(
    cfg: &RunConfig,
    exp: &Experiment,
    mut progress: impl FnMut(Strategy, &TrainRecord),
) -> Result<Vec<StrategyRun>> {
    cfg.strategy
        .strategies()
        .into_iter()
        .map(|strategy| {
            let (model, history) = train_with(exp, &cfg.trainer(strategy), |r| progress(strategy, r))?;
            Ok(StrategyRun { strategy, history, model })
        })
        .collect()
}

/// Wide history: `epoch`, then six columns per strategy.
pub fn history_csv(runs: &[StrategyRun]) -> String {
    let mut s = String::from("epoch");
    for r in runs {
        for c in Component::ALL {
            write!(s, ",{}_{}", r.strategy, c.name()).unwrap();
        }
        write!(s, ",{0}_total,{0}_metric", r.strategy).unwrap();
    }
    s.push('\n');
    let rows = runs.iter().map(|r| r.history.len()).max().unwrap_or(0);
    for i in 0..rows {
        write!(s, "{i}").unwrap();
        for r in runs {
            let h = &r.history[i];
            for c in Component::ALL {
                write!(s, ",{:.16e}", h.loss.get(c)).unwrap();
            }
            write!(s, ",{:.16e},{:.16e}", h.loss.total, h.metric).unwrap();
        }
        s.push('\n');
    }
    s
}

pub fn solution_csv(table: &SolutionTable) -> String {
    let dims = table.points.first().map_or(1, Vec::len);
    let mut s = String::from(if dims == 1 { "x" } else { "x,y" });
    s.push_str(",truth");
    for st in &table.strategies {
        write!(s, ",{st}").unwrap();
    }
    s.push('\n');
    for (k, p) in table.points.iter().enumerate() {
        let coords: Vec<String> = p.iter().map(|x| format!("{x:.16e}")).collect();
        write!(s, "{},{:.16e}", coords.join(","), table.truth[k]).unwrap();
        for v in &table.values {
            write!(s, ",{:.16e}", v[k]).unwrap();
        }
        s.push('\n');
    }
    s
}

/// Writes via a temporary sibling file and a rename, so `path` is never partial.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |source| Error::Io { path: path.display().to_string(), source };
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp-{}", std::process::id()));
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

/// Paths of everything [`write_artifacts`] produces.
pub fn artifact_paths(out: &Path, dims: usize) -> Vec<PathBuf> {
    let fig = out.join("figures");
    let mut v = vec![
        out.join("history.csv"),
        out.join("solution.csv"),
        out.join("config.snapshot"),
        fig.join("training.svg"),
    ];
    v.push(fig.join(if dims == 1 { "solution.svg" } else { "error.svg" }));
    v
}

pub fn write_artifacts(cfg: &RunConfig, exp: &Experiment, runs: &[StrategyRun]) -> Result<()> {
    let fig = cfg.out.join("figures");
    fs::create_dir_all(&fig).map_err(|source| Error::Io { path: fig.display().to_string(), source })?;
    let table = SolutionTable::new(exp, runs)?;
    let figure = match &exp.decomposition.global_grid {
        None => svg::solution_overlay(&table),
        Some(grid) => svg::error_heatmaps(grid, &table),
    };
    let paths = artifact_paths(&cfg.out, exp.problem.dims());
    let contents = [history_csv(runs), solution_csv(&table), cfg.snapshot(), svg::training_curves(runs), figure];
    for (p, c) in paths.iter().zip(&contents) {
        write_atomic(p, c)?;
    }
    Ok(())
}

/// Resolves, trains, writes artifacts, and returns the per-strategy runs.
pub fn run(cfg: &RunConfig, progress: impl FnMut(Strategy, &TrainRecord)) -> Result<Vec<StrategyRun>> {
    let exp = cfg.experiment()?;
    let runs = train_all(cfg, &exp, progress)?;
    write_artifacts(cfg, &exp, &runs)?;
    Ok(runs)
}

/// One line per strategy with its final loss and metric.
pub fn summary(runs: &[StrategyRun]) -> String {
    let mut s = String::new();
    for r in runs {
        let l = r.last();
        writeln!(s, "{:<10} loss {:.6e}  metric {:.6e}", r.strategy.name(), l.loss.total, l.metric).unwrap();
    }
    s
}
