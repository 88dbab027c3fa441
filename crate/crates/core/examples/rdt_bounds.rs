// Plain random-duality bounds `1 / E z` for every activation.

use tcmcap::rdt::{quad_capacity_closed_form, rdt_capacity};
use tcmcap::{Activation, NumericsConfig};

pub fn run_example() {
    let cfg = NumericsConfig {
        mc_samples: 1_000_000,
        ..NumericsConfig::default()
    };
    for (activation, d) in [
        (Activation::Linear, 1),
        (Activation::Linear, 4),
        (Activation::Quadratic, 2),
        (Activation::Quadratic, 4),
        (Activation::Relu, 2),
        (Activation::Relu, 4),
    ] {
        let b = rdt_capacity(activation, d, &cfg).unwrap();
        let route = if b.mc_samples.is_some() { "monte carlo" } else { "quadrature" };
        println!("{activation:>6} d={d}: alpha <= {:.5} ± {:.1e} ({route})", b.alpha, b.error);
    }
    for d in [2, 4, 16, 128] {
        println!("quad closed form d={d}: {:.6}", quad_capacity_closed_form(d).unwrap());
    }
}

#[allow(dead_code)]
fn main() {
    run_example();
}
