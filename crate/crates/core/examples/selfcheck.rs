// Property suites, including a deliberately broken ReLU kernel that the
// oracle comparison must reject.

use tcmcap::kernels::z_relu_general;
use tcmcap::selfcheck::{config, SelfCheck};
use tcmcap::NumericsConfig;

pub fn run_example() {
    let report = SelfCheck::new(config(true, 42), true).run();
    for r in &report.results {
        println!("{} {}", if r.passed { "ok  " } else { "FAIL" }, r.name);
    }
    assert!(report.passed());

    let broken = |g: &[f64]| z_relu_general(g, &NumericsConfig::default()).map(|r| r.z + 0.1);
    let report = SelfCheck::new(config(true, 42), true).with_relu_kernel(&broken).run();
    let failed: Vec<_> = report.failures().map(|r| r.name).collect();
    println!("with an offset kernel: {failed:?} fail");
    assert!(failed.contains(&"oracle-equivalence"));
}

#[allow(dead_code)]
fn main() {
    run_example();
}
