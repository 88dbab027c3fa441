// Partially lifted bounds: the saddle in `(c3, gamma)` and its zero
// crossing in `alpha`.

use tcmcap::plrdt::{i_sph, phi_bar_with, plrdt_capacity_with, IqModel};
use tcmcap::rdt::rdt_capacity;
use tcmcap::{Activation, NumericsConfig};

pub fn run_example() {
    let cfg = NumericsConfig {
        mc_samples: 1_000_000,
        ..NumericsConfig::default()
    };
    println!("I_sph(2) = {:.6}", i_sph(2.0).unwrap());

    let model = IqModel::prepare(Activation::Quadratic, 2, &cfg).unwrap();
    for alpha in [3.5, 4.0, 4.5] {
        let s = phi_bar_with(&model, alpha, &cfg).unwrap();
        println!(
            "quad d=2 alpha={alpha}: phi_bar = {:+.5} at c3 = {:.4}, gamma = {:.4}",
            s.phi_bar, s.c3_opt, s.gamma_opt
        );
    }

    for (activation, d) in [(Activation::Quadratic, 2), (Activation::Quadratic, 4), (Activation::Relu, 2), (Activation::Relu, 4)] {
        let model = IqModel::prepare(activation, d, &cfg).unwrap();
        let lifted = plrdt_capacity_with(&model, activation, d, &cfg).unwrap();
        let plain = rdt_capacity(activation, d, &cfg).unwrap();
        let s = lifted.diagnostics.as_ref().unwrap();
        println!(
            "{activation:>6} d={d}: plain {:.4}, lifted {:.4} ± {:.1e} (c3 = {:.4}, gamma = {:.4})",
            plain.alpha, lifted.alpha, lifted.error, s.c3_opt, s.gamma_opt
        );
    }
}

#[allow(dead_code)]
fn main() {
    run_example();
}
