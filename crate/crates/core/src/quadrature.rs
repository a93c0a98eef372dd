//! Trapezium rules on training grids and seeded Monte-Carlo integration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{contract, Result};

/// Strictly increasing sample positions along one axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D {
    points: Vec<f64>,
}

impl Grid1D {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(contract(format!("grid needs at least 2 points, got {}", points.len())));
        }
        if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(contract("grid points must be finite and strictly increasing"));
        }
        Ok(Self { points })
    }

    /// `count` evenly spaced points on `[lo, hi]`, endpoints included.
    pub fn uniform(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(contract("uniform grid needs at least 2 points"));
        }
        let step = (hi - lo) / (count - 1) as f64;
        let mut pts: Vec<f64> = (0..count).map(|i| lo + step * i as f64).collect();
        pts[count - 1] = hi;
        Self::new(pts)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Trapezium weight of each point, so that `trapz = Σ w_i v_i`.
    pub fn weights(&self) -> Vec<f64> {
        let p = &self.points;
        let mut w = vec![0.0; p.len()];
        for i in 0..p.len() - 1 {
            let h = 0.5 * (p[i + 1] - p[i]);
            w[i] += h;
            w[i + 1] += h;
        }
        w
    }
}

/// Tensor-product grid; values are stored row-major as `v[i * ny + j]` for `(x_i, y_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2D {
    pub x: Grid1D,
    pub y: Grid1D,
}

impl Grid2D {
    pub fn new(x: Grid1D, y: Grid1D) -> Self {
        Self { x, y }
    }

    pub fn len(&self) -> usize {
        self.x.len() * self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.y.len() + j
    }

    pub fn point(&self, k: usize) -> [f64; 2] {
        let ny = self.y.len();
        [self.x.points()[k / ny], self.y.points()[k % ny]]
    }

    /// Product trapezium weights in storage order.
    pub fn weights(&self) -> Vec<f64> {
        let (wx, wy) = (self.x.weights(), self.y.weights());
        wx.iter().flat_map(|a| wy.iter().map(move |b| a * b)).collect()
    }
}

/// `Σ_j (x_{j+1} - x_j)/2 · (v_j + v_{j+1})`.
pub fn trapz_1d(values: &[f64], grid: &Grid1D) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(contract(format!(
            "{} values on a {}-point grid",
            values.len(),
            grid.len()
        )));
    }
    let p = grid.points();
    Ok((0..p.len() - 1)
        .map(|i| 0.5 * (p[i + 1] - p[i]) * (values[i] + values[i + 1]))
        .sum())
}

/// Integrates over `y` for each `x_i`, then over `x`.
pub fn trapz_2d(values: &[f64], grid: &Grid2D) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(contract(format!(
            "{} values on a {}x{} grid",
            values.len(),
            grid.x.len(),
            grid.y.len()
        )));
    }
    let ny = grid.y.len();
    let inner: Vec<f64> = values
        .chunks(ny)
        .map(|row| trapz_1d(row, &grid.y))
        .collect::<Result<_>>()?;
    trapz_1d(&inner, &grid.x)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    pub volume: f64,
}

/// `V/M · Σ f(x_j)` with `x_j` drawn by `sampler` from a stream seeded by `mc.seed`.
pub fn monte_carlo<F, S>(mut f: F, mc: &McConfig, mut sampler: S) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
    S: FnMut(&mut ChaCha8Rng) -> Vec<f64>,
{
    if mc.samples == 0 || !(mc.volume > 0.0) {
        return Err(contract("Monte-Carlo needs at least one sample and a positive volume"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
    let mut acc = 0.0;
    for _ in 0..mc.samples {
        let x = sampler(&mut rng);
        acc += f(&x);
    }
    Ok(mc.volume / mc.samples as f64 * acc)
}

/// Uniform sampler over an axis-aligned box.
pub fn uniform_box(bounds: Vec<(f64, f64)>) -> impl FnMut(&mut ChaCha8Rng) -> Vec<f64> {
    use rand::Rng;
    move |rng| bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect()
}
