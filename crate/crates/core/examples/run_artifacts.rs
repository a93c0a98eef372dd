//! Drive the experiment runner from code: resolve a config with overrides,
//! train, and write CSV and SVG artifacts to a directory.
//!
//! `cargo run --release --example run_artifacts -- /tmp/osc`

use weakform_qpinn::runner::{self, Overrides, RunConfig};

fn main() -> weakform_qpinn::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "run_artifacts_out".into());
    let mut o = Overrides::new();
    o.push_text("problem = damped_oscillator\nstrategy = all\nepochs = 100\n")?;
    o.set("out", out);
    let cfg = RunConfig::resolve(&o)?;
    print!("resolved configuration:\n{}", cfg.snapshot());
    let runs = runner::run(&cfg, |_, _| {})?;
    print!("{}", runner::summary(&runs));
    for p in runner::artifact_paths(&cfg.out, 1) {
        println!("wrote {}", p.display());
    }
    Ok(())
}
