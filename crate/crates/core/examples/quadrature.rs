// Adaptive Gauss-Kronrod integration on finite, semi-infinite and
// triangular domains.

use tcmcap::distributions::{chi_mean, std_normal_pdf, ChiDensity, ChiDof};
use tcmcap::quadrature::{integrate_1d, integrate_1d_with_breaks, integrate_2d_triangular};
use tcmcap::QuadratureConfig;

pub fn run_example() {
    let cfg = QuadratureConfig::default();

    let second = integrate_1d(|x| x * x * std_normal_pdf(x), f64::NEG_INFINITY, f64::INFINITY, &cfg).unwrap();
    println!("E N^2           = {:.12} (error {:.1e})", second.value, second.error);
    assert!((second.value - 1.0).abs() < 1e-9);

    let kink = integrate_1d_with_breaks(|x| x.abs() * std_normal_pdf(x), -8.0, 8.0, &[0.0], &cfg).unwrap();
    println!("E |N|           = {:.12} (exact {:.12})", kink.value, (2.0 / std::f64::consts::PI).sqrt());

    let k = ChiDof::new(2.0).unwrap();
    let dens = ChiDensity::new(k);
    let mean = integrate_1d(|a| a * dens.pdf(a), 0.0, f64::INFINITY, &cfg.for_chi(2.0)).unwrap();
    println!("chi(2) mean     = {:.12} (closed form {:.12})", mean.value, chi_mean(k));

    let gap = integrate_2d_triangular(
        |a1, a2| (a1 - a2).powi(2) * dens.pdf(a1) * dens.pdf(a2),
        &cfg.for_chi(2.0),
    )
    .unwrap();
    println!("E (a1-a2)_+^2   = {:.12} (closed form {:.12})", gap.value, 2.0 - std::f64::consts::FRAC_PI_2);
    assert!((gap.value - (2.0 - std::f64::consts::FRAC_PI_2)).abs() < 1e-8);
}

#[allow(dead_code)]
fn main() {
    run_example();
}
