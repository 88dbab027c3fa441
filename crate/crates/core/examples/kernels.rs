// Squared distances from Gaussian vectors to the activation-feasible sets.

use tcmcap::kernels::{z_linear, z_quad, z_relu_d2, z_relu_general, z_relu_oracle, OutputWeights};
use tcmcap::montecarlo::{chunk_stream, gaussian_vector};
use tcmcap::NumericsConfig;

pub fn run_example() {
    let cfg = NumericsConfig::default();

    let w = OutputWeights::committee(4).unwrap();
    let g = [0.3, 1.2, -0.4, -0.9];
    let lin = z_linear(&g, &w).unwrap();
    println!("linear  z = {:.6}  ({:?})", lin.z, lin.branch);
    let quad = z_quad(&g).unwrap();
    println!("quad    z = {:.6}  ({:?})", quad.z, quad.branch);

    for (g1, g2) in [(1.0, 2.0), (1.0, 0.0), (2.0, -3.0)] {
        let r = z_relu_d2(g1, g2);
        println!("relu d=2 g=({g1}, {g2}): z = {:.6} ({:?})", r.z, r.branch);
    }

    let mut rng = chunk_stream(7, 0);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let g = gaussian_vector(6, &mut rng);
        let fast = z_relu_general(&g, &cfg).unwrap();
        let slow = z_relu_oracle(&g).unwrap();
        assert!((fast.z - slow.z).abs() <= 1e-8 * slow.z + 1e-14);
        worst = worst.max((fast.z - slow.z).abs());
    }
    println!("relu d=6: staged solver vs face enumeration, worst gap {worst:.2e} over 200 draws");
}

#[allow(dead_code)]
fn main() {
    run_example();
}
