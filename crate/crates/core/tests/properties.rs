use proptest::prelude::*;
use tcmcap::kernels::{kernel_value, relu_feasible, z_relu_general, z_relu_oracle};
use tcmcap::plrdt::{i_sph, IqModel};
use tcmcap::{Activation, NumericsConfig};

fn even_vec(max_half: usize) -> impl Strategy<Value = Vec<f64>> {
    (1..=max_half).prop_flat_map(|h| prop::collection::vec(-4.0f64..4.0, 2 * h))
}

fn norm2(g: &[f64]) -> f64 {
    g.iter().map(|x| x * x).sum()
}

proptest! {
    #[test]
    fn kernels_are_bounded_and_scale(g in even_vec(5), s in 0.1f64..5.0) {
        for a in Activation::ALL {
            let z = kernel_value(a, &g).unwrap();
            prop_assert!(z >= 0.0);
            prop_assert!(z <= norm2(&g) * (1.0 + 1e-12));
            let gs: Vec<f64> = g.iter().map(|x| s * x).collect();
            let zs = kernel_value(a, &gs).unwrap();
            prop_assert!((zs - s * s * z).abs() <= 1e-9 * (zs.abs() + 1e-12), "{} {} {}", a, zs, s * s * z);
        }
    }

    #[test]
    fn relu_solver_matches_oracle(g in even_vec(4)) {
        let cfg = NumericsConfig::default();
        let fast = z_relu_general(&g, &cfg).unwrap();
        let slow = z_relu_oracle(&g).unwrap();
        prop_assert!((fast.z - slow.z).abs() <= 1e-8 * slow.z + 1e-14);
        let q = fast.q_opt.unwrap();
        prop_assert!(relu_feasible(&q, 1e-9));
        let dist: f64 = g.iter().zip(&q).map(|(a, b)| (a - b).powi(2)).sum();
        prop_assert!((dist - fast.z).abs() <= 1e-9 * (1.0 + fast.z));
    }

    #[test]
    fn feasible_inputs_have_zero_distance(g in even_vec(5)) {
        if relu_feasible(&g, 0.0) {
            prop_assert_eq!(kernel_value(Activation::Relu, &g).unwrap(), 0.0);
        }
    }

    #[test]
    fn i_sph_is_finite_and_above_gamma(c3 in 1e-6f64..50.0) {
        let v = i_sph(c3).unwrap();
        prop_assert!(v.is_finite());
        prop_assert!(v >= tcmcap::plrdt::gamma_sph(c3));
    }
}

#[test]
fn iq_models_are_decreasing_probabilities() {
    let cfg = NumericsConfig {
        mc_samples: 200_000,
        ..NumericsConfig::default()
    };
    for (a, d) in [(Activation::Linear, 1), (Activation::Quadratic, 4), (Activation::Relu, 2), (Activation::Relu, 6)] {
        let m = IqModel::prepare(a, d, &cfg).unwrap();
        let mut prev = 1.0;
        for k in 0..60 {
            let t = 1e-6 * 1.5f64.powi(k);
            let v = m.eval(t);
            assert!(v.value() > 0.0 && v.value() <= 1.0, "{a} d={d} t={t}: {v:?}");
            assert!(v.ln() <= 0.0);
            assert!(v.value() <= prev + 1e-12, "{a} d={d} t={t}");
            prev = v.value();
        }
    }
}
