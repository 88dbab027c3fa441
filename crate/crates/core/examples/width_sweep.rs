// Bounds as a function of the hidden width, written as CSV.

use tcmcap::cli::{compute, BoundRecord, CSV_HEADER};
use tcmcap::{Activation, Method, NumericsConfig};

pub fn run_example() {
    let cfg = NumericsConfig::default();
    println!("{CSV_HEADER}");
    let mut last = f64::INFINITY;
    for method in [Method::Rdt, Method::Plrdt] {
        for d in (2..=16).step_by(2) {
            let b = compute(Activation::Quadratic, d, method, &cfg).unwrap();
            println!("{}", BoundRecord::new(&b, cfg.seed, None).rounded().csv_row());
            if method == Method::Rdt {
                assert!(b.alpha < last);
                last = b.alpha;
            }
        }
    }
}

#[allow(dead_code)]
fn main() {
    run_example();
}
