use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weakform_qpinn::diffqnn::{
    compile, DerivativeRequest, FeatureMapKind, FeatureMapSpec, ModelParams, Qnn, QnnLayout,
};
use weakform_qpinn::qsim::adjoint_gradient;

fn random_params(q: &Qnn, rng: &mut ChaCha8Rng) -> ModelParams {
    ModelParams {
        theta: (0..q.num_theta()).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect(),
        a: rng.gen_range(0.5..1.5),
        b: rng.gen_range(-0.5..0.5),
    }
}

fn models() -> Vec<Qnn> {
    let cheb = QnnLayout::single_upload(3, FeatureMapSpec::chebyshev(3, 0, 0.9), 2);
    let four = QnnLayout::single_upload(3, FeatureMapSpec::fourier(3, 0, 1.0), 2);
    let maps = [FeatureMapSpec::fourier(3, 0, 1.0), FeatureMapSpec::fourier(3, 1, 0.7)];
    let twod = QnnLayout::interleaved(3, &maps, 2, 1, 1);
    [cheb, four, twod].iter().map(|l| compile(l).unwrap()).collect()
}

fn point(q: &Qnn, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..q.input_dims()).map(|_| rng.gen_range(-0.95..0.95)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn jets_agree_with_shift_tables(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for q in models() {
            let p = random_params(&q, &mut rng);
            let x = point(&q, &mut rng);
            for dim in 0..q.input_dims() {
                let jet = q.jet(&p, &x, dim, 2).unwrap();
                prop_assert!((jet[0] - q.value(&p, &x).unwrap()).abs() < 1e-12);
                for order in 1..=2 {
                    let req = DerivativeRequest { dim, order };
                    let shift = q.input_derivative(&p, &x, req).unwrap();
                    prop_assert!((jet[order] - shift).abs() < 1e-10, "order {}: {} vs {}", order, jet[order], shift);
                }
            }
        }
    }
}

#[test]
fn jet_vjp_agrees_with_shift_table_gradients() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for q in models() {
        let p = random_params(&q, &mut rng);
        let x = point(&q, &mut rng);
        for dim in 0..q.input_dims() {
            for order in 0..=2 {
                let mut w = [0.0; 3];
                w[order] = 1.0;
                let (_, g) = q.jet_vjp(&p, &x, dim, order, w).unwrap();
                let s = q.gradients(&p, &x, DerivativeRequest { dim, order }).unwrap();
                assert!((g.value - s.value).abs() < 1e-10);
                assert!((g.a - s.a).abs() < 1e-10);
                assert_eq!(g.b, s.b);
                for (x, y) in g.theta.iter().zip(&s.theta) {
                    assert!((x - y).abs() < 1e-10, "order {order}: {x} vs {y}");
                }
            }
        }
    }
}

#[test]
fn weighted_vjp_is_linear_in_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let q = &models()[0];
    let p = random_params(q, &mut rng);
    let w = [0.3, -1.2, 0.7];
    let (_, combined) = q.jet_vjp(&p, &[0.2], 0, 2, w).unwrap();
    let mut sum = vec![0.0; q.num_theta()];
    for k in 0..3 {
        let mut e = [0.0; 3];
        e[k] = w[k];
        let (_, g) = q.jet_vjp(&p, &[0.2], 0, 2, e).unwrap();
        for (s, gi) in sum.iter_mut().zip(&g.theta) {
            *s += gi;
        }
    }
    for (x, y) in combined.theta.iter().zip(&sum) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn input_derivatives_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let h = 1e-4;
    for q in models() {
        let p = random_params(&q, &mut rng);
        let x = point(&q, &mut rng);
        for dim in 0..q.input_dims() {
            let f = |t: f64| {
                let mut y = x.clone();
                y[dim] += t;
                q.value(&p, &y).unwrap()
            };
            let fd1 = (f(h) - f(-h)) / (2.0 * h);
            let fd2 = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
            let d1 = q.input_derivative(&p, &x, DerivativeRequest { dim, order: 1 }).unwrap();
            let d2 = q.input_derivative(&p, &x, DerivativeRequest { dim, order: 2 }).unwrap();
            assert!((d1 - fd1).abs() / d1.abs().max(1.0) < 1e-5, "{d1} vs {fd1}");
            assert!((d2 - fd2).abs() / d2.abs().max(1.0) < 1e-5, "{d2} vs {fd2}");
        }
    }
}

#[test]
fn theta_gradient_of_first_derivative_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let q = &models()[0];
    let p = random_params(q, &mut rng);
    let x = [0.35];
    let req = DerivativeRequest { dim: 0, order: 1 };
    let g = q.gradients(&p, &x, req).unwrap();
    let h = 1e-5;
    for k in 0..q.num_theta() {
        let mut pp = p.clone();
        pp.theta[k] += h;
        let mut pm = p.clone();
        pm.theta[k] -= h;
        let fd = (q.input_derivative(&pp, &x, req).unwrap() - q.input_derivative(&pm, &x, req).unwrap()) / (2.0 * h);
        let rel = (fd - g.theta[k]).abs() / g.theta[k].abs().max(1e-3);
        assert!(rel < 1e-5, "theta {k}: {fd} vs {}", g.theta[k]);
    }
    assert_eq!(g.b, 0.0);
    // da is the quantity at unit scale and zero shift
    let unit = ModelParams { a: 1.0, b: 0.0, ..p.clone() };
    assert!((g.a - q.input_derivative(&unit, &x, req).unwrap()).abs() < 1e-12);
}

#[test]
fn value_gradient_is_the_circuit_adjoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let q = &models()[1];
    let p = random_params(q, &mut rng);
    let g = q.gradients(&p, &[0.1], DerivativeRequest::value()).unwrap();
    let mut angles = p.theta.clone();
    angles.extend((1..=3).map(|m| m as f64 * 0.1));
    let (v, adj) =
        adjoint_gradient(q.circuit(), &angles, &weakform_qpinn::qsim::Observable::new(p.a, p.b)).unwrap();
    assert!((v - g.value).abs() < 1e-12);
    for k in 0..q.num_theta() {
        assert!((adj[k] - g.theta[k]).abs() < 1e-12);
    }
}

#[test]
fn double_shift_table_is_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for q in models() {
        let p = random_params(&q, &mut rng);
        let x = point(&q, &mut rng);
        let t = q.shift_table(&p, &x, 0).unwrap();
        for i in 0..t.slots.len() {
            for j in 0..t.slots.len() {
                assert!((t.second[i][j] - t.second[j][i]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn one_qubit_reference_models_on_fifty_points() {
    let s = 0.9;
    let p = ModelParams { theta: vec![], a: 1.0, b: 0.0 };
    let layout = |kind| compile(&QnnLayout::single_upload(1, FeatureMapSpec::tower(kind, 1, 0, s), 0)).unwrap();
    let four = layout(FeatureMapKind::FourierTower);
    let cheb = layout(FeatureMapKind::ChebyshevTower);
    for i in 0..50 {
        let x = -0.98 + 1.96 * i as f64 / 49.0;
        let d = |q: &Qnn, order| q.input_derivative(&p, &[x], DerivativeRequest { dim: 0, order }).unwrap();
        assert!((d(&four, 1) + s * (s * x).sin()).abs() < 1e-8);
        assert!((d(&four, 2) + s * s * (s * x).cos()).abs() < 1e-8);
        assert!((d(&cheb, 1) - s).abs() < 1e-8);
        assert!(d(&cheb, 2).abs() < 1e-8);
    }
}

#[test]
fn outputs_scale_affinely_with_readout() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let q = &models()[2];
    let p = random_params(q, &mut rng);
    let unit = ModelParams { a: 1.0, b: 0.0, ..p.clone() };
    let x = [0.3, -0.4];
    for dim in 0..2 {
        let j = q.jet(&p, &x, dim, 2).unwrap();
        let u = q.jet(&unit, &x, dim, 2).unwrap();
        assert!((j[0] - (p.a * u[0] + p.b)).abs() < 1e-12);
        assert!((j[1] - p.a * u[1]).abs() < 1e-12);
        assert!((j[2] - p.a * u[2]).abs() < 1e-12);
    }
}

#[test]
fn evaluation_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let q = &models()[2];
    let p = random_params(q, &mut rng);
    let a = q.jet_vjp(&p, &[0.1, 0.2], 1, 2, [1.0, 2.0, 3.0]).unwrap();
    let b = q.jet_vjp(&p, &[0.1, 0.2], 1, 2, [1.0, 2.0, 3.0]).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}
