//! Default experiment setups for the four benchmark problems.

use crate::decomposition::{default_layout, Decomposition, GridSpec};
use crate::diffqnn::{compile, FeatureMapSpec, Qnn, QnnLayout};
use crate::error::{config, Result};
use crate::problems::{Problem, ProblemId, TestFunction};

/// Circuit size and shape knobs.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSettings {
    pub num_qubits: usize,
    /// Depth of the final ansatz.
    pub depth: usize,
    /// Feature-map input rescale `s`.
    pub rescale: f64,
    /// 2D only: how many times each coordinate is encoded.
    pub uploads: usize,
    /// 2D only: depth of the ansätze between encodings.
    pub separator_depth: usize,
}

impl ModelSettings {
    pub fn for_problem(id: ProblemId) -> Self {
        match id {
            ProblemId::DampedOscillator => Self { num_qubits: 5, depth: 4, rescale: 0.9, uploads: 1, separator_depth: 0 },
            ProblemId::StationaryBurgers => Self { num_qubits: 5, depth: 8, rescale: 0.9, uploads: 1, separator_depth: 0 },
            ProblemId::Linear2D => Self { num_qubits: 5, depth: 8, rescale: 1.0, uploads: 1, separator_depth: 1 },
            ProblemId::Laplace2D => Self { num_qubits: 4, depth: 6, rescale: 1.0, uploads: 2, separator_depth: 1 },
        }
    }

    /// Chebyshev single upload in 1D, interleaved Fourier uploads in 2D.
    pub fn layout(&self, id: ProblemId) -> QnnLayout {
        let n = self.num_qubits;
        match id.dims() {
            1 => QnnLayout::single_upload(n, FeatureMapSpec::chebyshev(n, 0, self.rescale), self.depth),
            _ => {
                let maps = [FeatureMapSpec::fourier(n, 0, self.rescale), FeatureMapSpec::fourier(n, 1, self.rescale)];
                QnnLayout::interleaved(n, &maps, self.uploads, self.separator_depth, self.depth)
            }
        }
    }
}

/// Everything fixed before training starts.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub problem: Problem,
    pub decomposition: Decomposition,
    pub qnn: Qnn,
    pub family: Vec<TestFunction>,
}

impl Experiment {
    pub fn new(problem: Problem, decomposition: Decomposition, layout: &QnnLayout, family: Vec<TestFunction>) -> Result<Self> {
        if layout.input_dims != problem.dims() || decomposition.dims() != problem.dims() {
            return Err(config(format!(
                "{} is {}D but the model takes {} inputs",
                problem.id,
                problem.dims(),
                layout.input_dims
            )));
        }
        Ok(Self { problem, decomposition, qnn: compile(layout)?, family })
    }

    /// Default setup; `family_seed` only affects randomly drawn test functions.
    pub fn for_problem(id: ProblemId, family_seed: u64) -> Result<Self> {
        let problem = Problem::new(id);
        let family = problem.test_functions(family_seed);
        Self::new(
            problem,
            Decomposition::for_problem(id)?,
            &ModelSettings::for_problem(id).layout(id),
            family,
        )
    }

    /// Setup with the given model, splits and grid.
    pub fn custom(
        problem: Problem,
        model: &ModelSettings,
        splits: &[Vec<f64>],
        grid: &GridSpec,
        family: Vec<TestFunction>,
    ) -> Result<Self> {
        let dec = Decomposition::build(&problem.id.domain(), splits, grid)?;
        let layout = model.layout(problem.id);
        Self::new(problem, dec, &layout, family)
    }

    pub fn default_splits(id: ProblemId) -> Vec<Vec<f64>> {
        default_layout(id).0
    }
}
