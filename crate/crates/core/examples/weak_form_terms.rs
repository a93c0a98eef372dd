//! Weak-form terms of each benchmark's exact solution shrink as the
//! integration grid is refined; a perturbed field keeps a finite residual.

use weakform_qpinn::problems::{Field2D, Problem, ProblemId, Segment, TestFunction, WeakField};
use weakform_qpinn::quadrature::{Grid1D, Grid2D};

fn sample(p: &Problem, n: usize, perturb: f64) -> weakform_qpinn::Result<WeakField> {
    let f = |x: &[f64]| p.analytic_solution(x) + perturb * x.iter().product::<f64>();
    let d = |x: &[f64], dim: usize| {
        let h = 1e-6;
        let (mut a, mut b) = (x.to_vec(), x.to_vec());
        a[dim] += h;
        b[dim] -= h;
        (f(&a) - f(&b)) / (2.0 * h)
    };
    Ok(if p.dims() == 1 {
        let cuts = [-1.0, -0.33, 0.33, 1.0];
        WeakField::OneD(
            cuts.windows(2)
                .map(|w| {
                    let grid = Grid1D::uniform(w[0], w[1], n)?;
                    let fv = grid.points().iter().map(|&x| f(&[x])).collect();
                    let df = grid.points().iter().map(|&x| d(&[x], 0)).collect();
                    Ok(Segment { grid, f: fv, df })
                })
                .collect::<weakform_qpinn::Result<_>>()?,
        )
    } else {
        let grid = Grid2D::new(Grid1D::uniform(0.0, 1.0, n)?, Grid1D::uniform(0.0, 1.0, n)?);
        let axis: Vec<f64> = grid.x.points().to_vec();
        WeakField::TwoD(Field2D {
            f: (0..grid.len()).map(|k| f(&grid.point(k))).collect(),
            fx_low: axis.iter().map(|&y| d(&[0.0, y], 0)).collect(),
            fx_high: axis.iter().map(|&y| d(&[1.0, y], 0)).collect(),
            fy_low: axis.iter().map(|&x| d(&[x, 0.0], 1)).collect(),
            fy_high: axis.iter().map(|&x| d(&[x, 1.0], 1)).collect(),
            grid,
        })
    })
}

fn largest_term(p: &Problem, family: &[TestFunction], field: &WeakField) -> weakform_qpinn::Result<f64> {
    let mut worst = 0.0f64;
    for v in family {
        worst = worst.max(p.weak_term(v, field)?.abs());
    }
    Ok(worst)
}

fn main() -> weakform_qpinn::Result<()> {
    for id in ProblemId::ALL {
        let p = Problem::new(id);
        let family = p.test_functions(0);
        print!("{id:18}");
        for n in [21, 81, 321] {
            let field = sample(&p, n, 0.0)?;
            let worst = largest_term(&p, &family, &field)?;
            print!("  n={n:3}: {worst:.2e}");
        }
        let field = sample(&p, 321, 0.5)?;
        let perturbed = largest_term(&p, &family, &field)?;
        println!("  | perturbed: {perturbed:.2e}");
    }
    Ok(())
}
