//! Trapezium rules on 1D and tensor 2D grids, and seeded Monte Carlo.

use std::f64::consts::PI;

use weakform_qpinn::quadrature::{monte_carlo, trapz_1d, trapz_2d, uniform_box, Grid1D, Grid2D, McConfig};

fn main() -> weakform_qpinn::Result<()> {
    for n in [11, 31, 91, 301] {
        let g = Grid1D::uniform(0.0, 1.0, n)?;
        let v: Vec<f64> = g.points().iter().map(|x| (PI * x).sin()).collect();
        let i = trapz_1d(&v, &g)?;
        println!("∫ sin(πx) on {n:3} points = {i:.10}  (error {:.2e})", (i - 2.0 / PI).abs());
    }

    let g = Grid2D::new(Grid1D::uniform(0.0, 1.0, 21)?, Grid1D::uniform(0.0, 1.0, 21)?);
    let v: Vec<f64> = (0..g.len()).map(|k| {
        let [x, y] = g.point(k);
        x * y
    }).collect();
    println!("∫∫ xy on 21×21 = {:.15}", trapz_2d(&v, &g)?);

    let mc = McConfig { samples: 100_000, seed: 7, volume: 1.0 };
    let est = monte_carlo(|p| (PI * p[0]).sin() * (PI * p[1]).sin(), &mc, uniform_box(vec![(0.0, 1.0), (0.0, 1.0)]))?;
    println!("Monte Carlo ∫∫ sin(πx)sin(πy) = {est:.5}  (exact {:.5})", 4.0 / (PI * PI));
    Ok(())
}
