//! `key = value` run configuration with per-problem defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::decomposition::{default_layout, GridSpec};
use crate::error::{Error, Result};
use crate::experiment::{Experiment, ModelSettings};
use crate::losses::{GatingOptions, LossWeights, Strategy};
use crate::problems::{Problem, ProblemId};
use crate::training::{AdamConfig, TrainerConfig};

const KEYS: &[&str] = &[
    "problem",
    "strategy",
    "seed",
    "family_seed",
    "epochs",
    "lr",
    "alpha",
    "beta",
    "gamma_res",
    "gamma_wf",
    "gamma_sbc",
    "weak_with_ibv",
    "both_with_sbc",
    "burgers_known_boundary",
    "qubits",
    "depth",
    "rescale",
    "uploads",
    "separator_depth",
    "splits_x",
    "splits_y",
    "points_per_subdomain",
    "grid_nx",
    "grid_ny",
    "out",
];

const ONLY_1D: &[&str] = &["points_per_subdomain", "burgers_known_boundary"];
const ONLY_2D: &[&str] = &["splits_y", "grid_nx", "grid_ny", "uploads", "separator_depth"];

/// Raw `key = value` pairs in the order they were given; later ones win.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides(Vec<(String, String)>);

impl Overrides {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.0.push((key.into(), value.into()));
    }

    /// Parses one `key=value` argument.
    pub fn push_assignment(&mut self, arg: &str) -> Result<()> {
        let (k, v) = arg
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("expected key=value, got '{arg}'")))?;
        self.set(k.trim(), v.trim());
        Ok(())
    }

    /// Parses config-file text: one `key = value` per line, `#` starts a comment.
    pub fn push_text(&mut self, text: &str) -> Result<()> {
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                self.push_assignment(line)?;
            }
        }
        Ok(())
    }

    fn resolved(&self) -> Result<BTreeMap<&str, &str>> {
        let mut map = BTreeMap::new();
        for (k, v) in &self.0 {
            let key = KEYS
                .iter()
                .find(|&&known| known == k)
                .ok_or_else(|| Error::Usage(format!("unknown config key '{k}'")))?;
            map.insert(*key, v.as_str());
        }
        Ok(map)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StrategySelection {
    One(Strategy),
    All,
}

impl StrategySelection {
    pub fn strategies(&self) -> Vec<Strategy> {
        match self {
            StrategySelection::One(s) => vec![*s],
            StrategySelection::All => Strategy::ALL.to_vec(),
        }
    }

    fn label(&self) -> &'static str {
        match self {
            StrategySelection::One(s) => s.name(),
            StrategySelection::All => "all",
        }
    }
}

/// Fully resolved run settings.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemId,
    pub strategy: StrategySelection,
    pub seed: u64,
    pub family_seed: u64,
    pub epochs: usize,
    pub lr: f64,
    pub weights: LossWeights,
    pub gating: GatingOptions,
    pub burgers_known_boundary: bool,
    pub model: ModelSettings,
    pub splits: Vec<Vec<f64>>,
    pub grid: GridSpec,
    pub out: PathBuf,
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Usage(format!("invalid value '{v}' for key '{key}'")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Per-problem defaults overlaid with `overrides`.
    pub fn resolve(overrides: &Overrides) -> Result<Self> {
        let map = overrides.resolved()?;
        let problem: ProblemId = map
            .get("problem")
            .ok_or_else(|| Error::Usage("missing required key 'problem'".into()))?
            .parse()?;
        for (k, _) in &map {
            let bad = if problem.dims() == 1 { ONLY_2D } else { ONLY_1D };
            if bad.contains(k) {
                return Err(Error::Usage(format!("key '{k}' does not apply to {problem}")));
            }
        }
        let get = |k: &str| map.get(k).copied();

        let strategy = match get("strategy").unwrap_or("all") {
            "all" => StrategySelection::All,
            s => StrategySelection::One(s.parse()?),
        };
        let seed = get("seed").map_or(Ok(0), |v| parse("seed", v))?;
        let family_seed = get("family_seed").map_or(Ok(seed), |v| parse("family_seed", v))?;
        let epochs = match get("epochs") {
            Some(v) => parse("epochs", v)?,
            None if problem == ProblemId::Laplace2D => 800,
            None => 500,
        };
        if epochs == 0 {
            return Err(Error::Usage("key 'epochs' must be at least 1".into()));
        }

        let mut weights = LossWeights::default();
        let mut gating = GatingOptions::default();
        let mut lr = AdamConfig::default().lr;
        let mut model = ModelSettings::for_problem(problem);
        let (mut splits, mut grid) = default_layout(problem);
        let mut burgers_known_boundary = false;
        for (k, v) in &map {
            let (k, v) = (*k, *v);
            match k {
                "lr" => lr = parse(k, v)?,
                "alpha" => weights.alpha = parse(k, v)?,
                "beta" => weights.beta = parse(k, v)?,
                "gamma_res" => weights.gamma_res = parse(k, v)?,
                "gamma_wf" => weights.gamma_wf = parse(k, v)?,
                "gamma_sbc" => weights.gamma_sbc = parse(k, v)?,
                "weak_with_ibv" => gating.weak_with_ibv = parse(k, v)?,
                "both_with_sbc" => gating.both_with_sbc = parse(k, v)?,
                "burgers_known_boundary" => burgers_known_boundary = parse(k, v)?,
                "qubits" => model.num_qubits = parse(k, v)?,
                "depth" => model.depth = parse(k, v)?,
                "rescale" => model.rescale = parse(k, v)?,
                "uploads" => model.uploads = parse(k, v)?,
                "separator_depth" => model.separator_depth = parse(k, v)?,
                "splits_x" => splits[0] = parse_list(k, v)?,
                "splits_y" => splits[1] = parse_list(k, v)?,
                "points_per_subdomain" => grid = GridSpec::PerSubdomain(parse(k, v)?),
                "grid_nx" | "grid_ny" => {
                    if let GridSpec::Global(ref mut n) = grid {
                        n[usize::from(k == "grid_ny")] = parse(k, v)?;
                    }
                }
                _ => {}
            }
        }
        weights.validate().map_err(|e| Error::Usage(e.to_string()))?;
        if !(lr.is_finite() && lr >= 0.0) {
            return Err(Error::Usage(format!("invalid value '{lr}' for key 'lr'")));
        }
        let out = PathBuf::from(get("out").unwrap_or("out"));

        Ok(Self {
            problem,
            strategy,
            seed,
            family_seed,
            epochs,
            lr,
            weights,
            gating,
            burgers_known_boundary,
            model,
            splits,
            grid,
            out,
        })
    }

    pub fn experiment(&self) -> Result<Experiment> {
        let mut problem = Problem::new(self.problem);
        problem.burgers_known_boundary = self.burgers_known_boundary;
        let family = problem.test_functions(self.family_seed);
        Experiment::custom(problem, &self.model, &self.splits, &self.grid, family)
            .map_err(|e| match e {
                Error::Config(m) => Error::Usage(m),
                other => other,
            })
    }

    pub fn trainer(&self, strategy: Strategy) -> TrainerConfig {
        TrainerConfig {
            epochs: self.epochs,
            seed: self.seed,
            strategy,
            weights: self.weights,
            gating: self.gating,
            adam: AdamConfig { lr: self.lr, ..AdamConfig::default() },
        }
    }

    /// The resolved configuration as config-file text; feeding it back resolves to `self`.
    pub fn snapshot(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
        let w = &self.weights;
        let m = &self.model;
        kv("problem", self.problem.name().into());
        kv("strategy", self.strategy.label().into());
        kv("seed", self.seed.to_string());
        kv("family_seed", self.family_seed.to_string());
        kv("epochs", self.epochs.to_string());
        kv("lr", format!("{}", self.lr));
        kv("alpha", format!("{}", w.alpha));
        kv("beta", format!("{}", w.beta));
        kv("gamma_res", format!("{}", w.gamma_res));
        kv("gamma_wf", format!("{}", w.gamma_wf));
        kv("gamma_sbc", format!("{}", w.gamma_sbc));
        kv("weak_with_ibv", self.gating.weak_with_ibv.to_string());
        kv("both_with_sbc", self.gating.both_with_sbc.to_string());
        kv("qubits", m.num_qubits.to_string());
        kv("depth", m.depth.to_string());
        kv("rescale", format!("{}", m.rescale));
        kv("splits_x", join(&self.splits[0]));
        match &self.grid {
            GridSpec::PerSubdomain(n) => {
                kv("burgers_known_boundary", self.burgers_known_boundary.to_string());
                kv("points_per_subdomain", n.to_string());
            }
            GridSpec::Global([nx, ny]) => {
                kv("uploads", m.uploads.to_string());
                kv("separator_depth", m.separator_depth.to_string());
                kv("splits_y", join(&self.splits[1]));
                kv("grid_nx", nx.to_string());
                kv("grid_ny", ny.to_string());
            }
        }
        kv("out", self.out.display().to_string());
        s
    }
}
