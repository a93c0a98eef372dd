//! Input derivatives of a Chebyshev-encoded QNN: Taylor jets against
//! parameter-shift tables, plus the parameter gradient of `f''`.

use weakform_qpinn::diffqnn::{compile, DerivativeRequest, FeatureMapSpec, ModelParams, QnnLayout};

fn main() -> weakform_qpinn::Result<()> {
    let layout = QnnLayout::single_upload(4, FeatureMapSpec::chebyshev(4, 0, 0.9), 3);
    let qnn = compile(&layout)?;
    let params = ModelParams {
        theta: (0..qnn.num_theta()).map(|k| 0.37 * k as f64).collect(),
        a: 1.2,
        b: -0.1,
    };
    println!("{} trainable angles, {} circuit slots", qnn.num_theta(), qnn.circuit().num_slots());

    println!("   x        f              f' (jet)       f' (shift)     f'' (jet)      f'' (shift)");
    for k in 0..5 {
        let x = -0.8 + 0.4 * k as f64;
        let jet = qnn.jet(&params, &[x], 0, 2)?;
        let d1 = qnn.input_derivative(&params, &[x], DerivativeRequest { dim: 0, order: 1 })?;
        let d2 = qnn.input_derivative(&params, &[x], DerivativeRequest { dim: 0, order: 2 })?;
        println!("{x:+.2}  {:+.10}  {:+.10}  {d1:+.10}  {:+.10}  {d2:+.10}", jet[0], jet[1], jet[2]);
    }

    let (_, grads) = qnn.jet_vjp(&params, &[0.3], 0, 2, [0.0, 0.0, 1.0])?;
    let norm = grads.theta.iter().map(|g| g * g).sum::<f64>().sqrt();
    println!("∂f''(0.3)/∂θ has norm {norm:.6}; ∂/∂a = {:.6}, ∂/∂b = {:.1}", grads.a, grads.b);
    Ok(())
}
