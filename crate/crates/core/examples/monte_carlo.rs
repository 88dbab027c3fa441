// Reproducible parallel Monte Carlo: chunked streams give bit-identical
// estimates for any worker count.

use tcmcap::kernels::z_sampler;
use tcmcap::montecarlo::{estimate_mean, fill_gaussian, MCConfig};
use tcmcap::{Activation, NumericsConfig};

pub fn run_example() {
    let mc = MCConfig {
        samples: 1_000_000,
        seed: 42,
        chunk_size: 1 << 16,
    };
    let relu2 = estimate_mean(
        |rng| {
            let mut x = [0.0];
            fill_gaussian(&mut x, rng);
            x[0].max(0.0).powi(2)
        },
        &mc,
    )
    .unwrap();
    println!("E max(N,0)^2 = {:.5} ± {:.5} (exact 0.5)", relu2.value, relu2.error);

    let sampler = z_sampler(Activation::Relu, 4).unwrap();
    let mut estimates = Vec::new();
    for threads in [1, 2, 4] {
        let cfg = NumericsConfig {
            threads: Some(threads),
            ..NumericsConfig::default()
        };
        let ez = cfg.install(|| estimate_mean(&sampler, &mc)).unwrap();
        println!("relu d=4: E z = {:.8} ± {:.2e} with {threads} worker(s)", ez.value, ez.error);
        estimates.push(ez);
    }
    assert!(estimates.windows(2).all(|w| w[0] == w[1]));
}

#[allow(dead_code)]
fn main() {
    run_example();
}
