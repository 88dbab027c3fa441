// Recomputes the published capacity table and compares each cell with its
// reference value and tolerance.

use tcmcap::cli::{table1_cells, CellStatus};
use tcmcap::reference::{embedded, RefMethod, Width};
use tcmcap::{Activation, NumericsConfig};

pub fn run_example() {
    let cfg = NumericsConfig {
        mc_samples: 1_000_000,
        ..NumericsConfig::default()
    };
    for cell in table1_cells(&cfg).unwrap() {
        let computed = cell
            .computed
            .as_ref()
            .map(|b| format!("{:.4}", b.alpha))
            .unwrap_or_else(|| "-".into());
        let status = match cell.status {
            CellStatus::Pass => "pass",
            CellStatus::Fail => "FAIL",
            CellStatus::Skip(_) => "skip",
        };
        println!(
            "{status} {:>6} {:>5} d={}: {computed:>7} vs {} ± {}",
            cell.activation, cell.method, cell.d, cell.reference, cell.tolerance
        );
    }
    for a in [Activation::Quadratic, Activation::Relu] {
        if let Some(r) = embedded().lookup(a, Width::Infinite, RefMethod::ReplicaRs) {
            println!("replica symmetric limit for {a}: {}", r.value);
        }
    }
}

#[allow(dead_code)]
fn main() {
    run_example();
}
