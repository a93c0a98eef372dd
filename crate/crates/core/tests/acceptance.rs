//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.
//!
//! Criteria 6 and 7 train every default experiment at three seeds and take
//! tens of minutes on one core.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weakform_qpinn::decomposition::{summed_squared_jump, Decomposition, GridSpec, PiecewiseModel, TrialFunction};
use weakform_qpinn::diffqnn::{compile, FeatureMapKind, FeatureMapSpec, ModelParams, QnnLayout};
use weakform_qpinn::experiment::{Experiment, ModelSettings};
use weakform_qpinn::losses::{GatingOptions, LossPlan, LossWeights, Objective, Strategy};
use weakform_qpinn::problems::{Field2D, Problem, ProblemId, Segment, WeakField};
use weakform_qpinn::qsim::{adjoint_gradient, run_circuit, shift_rule_gradient, Circuit, Gate, GateKind, Observable};
use weakform_qpinn::quadrature::{trapz_1d, trapz_2d, Grid1D, Grid2D};
use weakform_qpinn::training::{init_params, train, TrainerConfig};

/// Round-off of the h = 1e-6 central differences in the truth field: about
/// ε·max|f|/h per node, integrated over the domain.
const FD_ROUNDOFF: f64 = 1e-9;

/// Seed-0 final metrics from the first validated run: `problem,strategy,metric`,
/// four significant figures.
const PINNED_SEED0: &str = include_str!("data/seed0_metrics.csv");

/// Additional seeds at which the strategy orderings must also hold.
const EXTRA_SEEDS: [u64; 2] = [1, 2];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn hea_circuit(n: usize, depth: usize) -> Circuit {
    let mut gates = Vec::new();
    let mut slot = 0;
    for _ in 0..depth {
        for q in 0..n {
            for kind in [GateKind::Rx, GateKind::Ry, GateKind::Rx] {
                gates.push(Gate::rotation(kind, q, slot));
                slot += 1;
            }
        }
        for q in 0..n - 1 {
            gates.push(Gate::cnot(q, q + 1));
        }
    }
    Circuit::new(n, slot, gates).unwrap()
}

fn gradient_suite() -> Outcome {
    let start = Instant::now();
    let circuit = hea_circuit(3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let angles: Vec<f64> = (0..circuit.num_slots()).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    let obs = Observable::new(0.8, 0.3);
    let (_, adjoint) = adjoint_gradient(&circuit, &angles, &obs).unwrap();
    let (mut worst_abs, mut worst_rel) = (0.0f64, 0.0f64);
    for slot in 0..circuit.num_slots() {
        let shift = shift_rule_gradient(&circuit, &angles, &obs, slot).unwrap();
        let h = 1e-5;
        let eval = |d: f64| {
            let mut a = angles.clone();
            a[slot] += d;
            run_circuit(&circuit, &a).unwrap().expectation(&obs)
        };
        let fd = (eval(h) - eval(-h)) / (2.0 * h);
        worst_abs = worst_abs.max((adjoint[slot] - shift).abs());
        let denom = adjoint[slot].abs().max(1e-4);
        worst_rel = worst_rel.max((adjoint[slot] - fd).abs() / denom).max((shift - fd).abs() / denom);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_abs <= 1e-10 && worst_rel <= 1e-6 && secs < 1.0,
        format!("adjoint-vs-shift {worst_abs:.1e} (≤1e-10), vs finite differences {worst_rel:.1e} rel (≤1e-6), {secs:.3}s"),
    )
}

fn input_derivative_suite() -> Outcome {
    let mut worst = 0.0f64;
    let unit = ModelParams { theta: vec![], a: 1.0, b: 0.0 };
    for (kind, s) in [(FeatureMapKind::FourierTower, 0.7), (FeatureMapKind::ChebyshevTower, 0.9)] {
        let qnn = compile(&QnnLayout::single_upload(1, FeatureMapSpec::tower(kind, 1, 0, s), 0)).unwrap();
        for k in 0..50 {
            let x = -0.98 + 1.96 * k as f64 / 49.0;
            let expected = match kind {
                FeatureMapKind::FourierTower => [(s * x).cos(), -s * (s * x).sin(), -s * s * (s * x).cos()],
                FeatureMapKind::ChebyshevTower => [s * x, s, 0.0],
            };
            let jet = qnn.jet(&unit, &[x], 0, 2).unwrap();
            for i in 0..3 {
                worst = worst.max((jet[i] - expected[i]).abs());
            }
        }
    }
    outcome(worst <= 1e-8, format!("max deviation {worst:.1e} over 50 points per model (≤1e-8)"))
}

fn quadrature_suite() -> Outcome {
    let g = Grid1D::uniform(-0.7, 1.9, 37).unwrap();
    let lin: Vec<f64> = g.points().iter().map(|x| 3.0 * x - 2.0).collect();
    let exact = 1.5 * (1.9f64.powi(2) - 0.7f64.powi(2)) - 2.0 * 2.6;
    let e_lin = (trapz_1d(&lin, &g).unwrap() - exact).abs();
    let g91 = Grid1D::uniform(0.0, 1.0, 91).unwrap();
    let s: Vec<f64> = g91.points().iter().map(|x| (PI * x).sin()).collect();
    let e_sin = (trapz_1d(&s, &g91).unwrap() - 2.0 / PI).abs();
    let g2 = Grid2D::new(Grid1D::uniform(0.0, 2.0, 9).unwrap(), Grid1D::uniform(-1.0, 1.0, 13).unwrap());
    let bil: Vec<f64> = (0..g2.len())
        .map(|k| {
            let [x, y] = g2.point(k);
            1.0 + 2.0 * x - y + 3.0 * x * y
        })
        .collect();
    // ∫₀² ∫₋₁¹ (1 + 2x − y + 3xy) dy dx = 2·2 + 2·2·2 = 12
    let e_bil = (trapz_2d(&bil, &g2).unwrap() - 12.0).abs();
    outcome(
        e_lin <= 1e-14 && e_sin <= 1e-3 && e_bil <= 1e-14,
        format!("linear {e_lin:.1e} (≤1e-14), sin on 91 points {e_sin:.1e} (≤1e-3), bilinear {e_bil:.1e} (≤1e-14)"),
    )
}

/// The exact solution with finite-difference derivatives.
fn truth_field(p: &Problem, dec: &Decomposition) -> WeakField {
    let f = |x: &[f64]| p.analytic_solution(x);
    let d = |x: &[f64], dim: usize| {
        let h = 1e-6;
        let (mut a, mut b) = (x.to_vec(), x.to_vec());
        a[dim] += h;
        b[dim] -= h;
        (f(&a) - f(&b)) / (2.0 * h)
    };
    match &dec.global_grid {
        None => WeakField::OneD(
            dec.subdomains
                .iter()
                .map(|s| {
                    let grid = s.grid.clone().unwrap();
                    Segment {
                        f: grid.points().iter().map(|&x| f(&[x])).collect(),
                        df: grid.points().iter().map(|&x| d(&[x], 0)).collect(),
                        grid,
                    }
                })
                .collect(),
        ),
        Some(grid) => {
            let (xs, ys) = (grid.x.points(), grid.y.points());
            WeakField::TwoD(Field2D {
                f: (0..grid.len()).map(|k| f(&grid.point(k))).collect(),
                fx_low: ys.iter().map(|&y| d(&[0.0, y], 0)).collect(),
                fx_high: ys.iter().map(|&y| d(&[1.0, y], 0)).collect(),
                fy_low: xs.iter().map(|&x| d(&[x, 0.0], 1)).collect(),
                fy_high: xs.iter().map(|&x| d(&[x, 1.0], 1)).collect(),
                grid: grid.clone(),
            })
        }
    }
}

fn weak_residual_of_truth() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut pass = true;
    for id in ProblemId::ALL {
        let p = Problem::new(id);
        let dec = Decomposition::for_problem(id).unwrap();
        let splits = Experiment::default_splits(id);
        let finer = match dec.global_grid.as_ref() {
            None => GridSpec::PerSubdomain(10 * (dec.subdomains[0].grid.as_ref().unwrap().len() - 1) + 1),
            Some(g) => GridSpec::Global([10 * (g.x.len() - 1) + 1, 10 * (g.y.len() - 1) + 1]),
        };
        let fine = Decomposition::build(&id.domain(), &splits, &finer).unwrap();
        let (coarse_field, fine_field) = (truth_field(&p, &dec), truth_field(&p, &fine));
        let mut worst: f64 = 0.0;
        for v in p.test_functions(0) {
            let t = p.weak_term(&v, &coarse_field).unwrap();
            let estimate = (t - p.weak_term(&v, &fine_field).unwrap()).abs();
            worst = worst.max(t.abs() / (1.1 * estimate + FD_ROUNDOFF));
        }
        pass &= worst <= 1.0;
        notes.push(format!("{id} {worst:.3}"));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    outcome(pass, format!("max |term| / (1.1·refinement estimate + FD round-off): {} (≤1), {secs:.1}s", notes.join(", ")))
}

fn shrunken(id: ProblemId) -> Experiment {
    let problem = Problem::new(id);
    let family = problem.test_functions(0).into_iter().take(3).collect();
    let mut model = ModelSettings::for_problem(id);
    model.num_qubits = 2;
    model.depth = 1;
    let (splits, grid) = if id.dims() == 1 {
        (vec![vec![0.0]], GridSpec::PerSubdomain(4))
    } else {
        (vec![vec![0.5], vec![0.5]], GridSpec::Global([4, 2]))
    };
    Experiment::custom(problem, &model, &splits, &grid, family).unwrap()
}

fn loss_gradient_assembly() -> Outcome {
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for id in ProblemId::ALL {
        let e = shrunken(id);
        for strategy in Strategy::ALL {
            let obj = Objective {
                plan: LossPlan::new(&e.problem, &e.decomposition, e.family.clone()).unwrap(),
                strategy,
                weights: LossWeights::default(),
                gating: GatingOptions::default(),
            };
            let mut pm = init_params(&e.qnn, e.decomposition.len(), rng.gen());
            let (_, grad) = obj.value_and_grad(&pm).unwrap();
            let flat = pm.to_flat();
            let scale = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
            let h = 1e-4;
            for i in 0..flat.len() {
                let mut f = flat.clone();
                f[i] += h;
                pm.set_flat(&f).unwrap();
                let up = obj.evaluate(&pm).unwrap().total;
                f[i] -= 2.0 * h;
                pm.set_flat(&f).unwrap();
                let down = obj.evaluate(&pm).unwrap().total;
                let fd = (up - down) / (2.0 * h);
                worst = worst.max((fd - grad[i]).abs() / grad[i].abs().max(1e-3 * scale));
            }
            pm.set_flat(&flat).unwrap();
        }
    }
    outcome(worst <= 1e-4, format!("max relative deviation {worst:.1e} over 4 problems × 4 strategies (≤1e-4)"))
}

struct Trained {
    metric: f64,
    model: PiecewiseModel,
}

fn train_one(exp: &Experiment, strategy: Strategy, seed: u64) -> Trained {
    let epochs = if exp.problem.id == ProblemId::Laplace2D { 800 } else { 500 };
    let (model, history) = train(exp, &TrainerConfig::new(strategy, epochs, seed)).unwrap();
    Trained { metric: history.last().unwrap().metric, model }
}

fn jump(exp: &Experiment, m: &impl TrialFunction) -> f64 {
    summed_squared_jump(&exp.decomposition, m).unwrap()
}

fn pinned(id: ProblemId, strategy: Strategy) -> Option<f64> {
    PINNED_SEED0.lines().skip(1).find_map(|line| {
        let cols: Vec<&str> = line.split(',').collect();
        (cols.len() == 3 && cols[0] == id.to_string() && cols[1] == strategy.to_string()).then(|| cols[2].parse().unwrap())
    })
}

fn strategy_ordering() -> (Outcome, Outcome) {
    let mut pass = true;
    let mut notes = Vec::new();
    let mut drift = Vec::new();
    let mut over_budget = Vec::new();
    let mut continuity = outcome(false, "not run");
    for id in ProblemId::ALL {
        let start = Instant::now();
        for seed in std::iter::once(0).chain(EXTRA_SEEDS) {
            let exp = Experiment::for_problem(id, seed).unwrap();
            let coll = train_one(&exp, Strategy::Coll, seed);
            let weak = train_one(&exp, Strategy::Weak, seed);
            let both = train_one(&exp, Strategy::Both, seed);
            let mut ok = both.metric < coll.metric && both.metric < weak.metric;
            let wide = seed == 0 && matches!(id, ProblemId::StationaryBurgers | ProblemId::Laplace2D);
            if wide {
                ok &= coll.metric > 5.0 * both.metric;
            }
            pass &= ok;
            let line = format!(
                "    {id} seed {seed}: coll {:.3e} weak {:.3e} both {:.3e}{} {}",
                coll.metric,
                weak.metric,
                both.metric,
                if wide { format!(" coll/both {:.1}", coll.metric / both.metric) } else { String::new() },
                if ok { "ok" } else { "VIOLATED" }
            );
            println!("{line}");
            notes.push(line);
            if seed == 0 {
                for (strategy, run) in [(Strategy::Coll, &coll), (Strategy::Weak, &weak), (Strategy::Both, &both)] {
                    match pinned(id, strategy) {
                        Some(m) if ((run.metric - m) / m).abs() <= 1e-3 => {}
                        Some(m) => drift.push(format!("{id}/{strategy} {:.6e} vs pinned {m:.6e}", run.metric)),
                        None => drift.push(format!("{id}/{strategy} not pinned ({:.6e})", run.metric)),
                    }
                }
            }
            if id == ProblemId::DampedOscillator && seed == 0 {
                let (jb, jc) = (jump(&exp, &both.model), jump(&exp, &coll.model));
                continuity = outcome(
                    jb < 0.1 * jc,
                    format!("summed squared interface jump both {jb:.3e} vs coll {jc:.3e}, ratio {:.3} (<0.1)", jb / jc),
                );
            }
        }
        let secs = start.elapsed().as_secs_f64();
        let budget = if id.dims() == 1 { 600.0 } else { 2400.0 };
        println!("    {id}: {secs:.0}s for 3 seeds (budget {budget:.0}s)");
        if secs > budget {
            over_budget.push(format!("{id} {secs:.0}s"));
        }
    }
    for d in &drift {
        println!("    drift from pinned seed-0 metric: {d}");
    }
    let violated = notes.iter().filter(|n| n.ends_with("VIOLATED")).count();
    (
        outcome(
            pass && drift.is_empty() && over_budget.is_empty(),
            format!(
                "{} of {} (problem, seed) cases ordered as required; {} pinned seed-0 drifts; over budget: [{}]",
                notes.len() - violated,
                notes.len(),
                drift.len(),
                over_budget.join(", ")
            ),
        ),
        continuity,
    )
}

fn determinism() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let status = Command::new(env!("CARGO_BIN_EXE_solve"))
            .args(["--problem", "damped_oscillator", "--strategy", "all", "--seed", "0", "--out"])
            .arg(d.path())
            .output()
            .unwrap()
            .status;
        if !status.success() {
            return outcome(false, format!("solve exited with {status}"));
        }
    }
    let same = ["history.csv", "solution.csv"]
        .iter()
        .all(|f| std::fs::read(dirs[0].path().join(f)).unwrap() == std::fs::read(dirs[1].path().join(f)).unwrap());
    outcome(same, "two full `solve --problem damped_oscillator --strategy all --seed 0` runs compared byte for byte")
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Outcome)> = vec![
        ("1 gradient suite", gradient_suite()),
        ("2 input-derivative suite", input_derivative_suite()),
        ("3 quadrature suite", quadrature_suite()),
        ("4 weak residual of truth", weak_residual_of_truth()),
        ("5 loss-gradient assembly", loss_gradient_assembly()),
    ];
    for (name, o) in &results {
        println!("criterion {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let (ordering, continuity) = strategy_ordering();
    let tail = [
        ("6 strategy ordering", ordering),
        ("7 continuity bridging", continuity),
        ("8 determinism", determinism()),
    ];
    for (name, o) in &tail {
        println!("criterion {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    results.extend(tail);
    println!("\nsummary:");
    for (name, o) in &results {
        println!("  criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" });
    }
    if results.iter().all(|(_, o)| o.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
