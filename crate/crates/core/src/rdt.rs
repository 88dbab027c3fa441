//! Plain random-duality capacity bounds.
//!
//! The dual objective is `sqrt(alpha * E z) - 1`, positive exactly when
//! `alpha > 1 / E z`, so the capacity bound is `1 / E z`. Standard errors of
//! Monte Carlo estimates of `E z` are carried to the bound by the delta
//! method, `se(alpha) = se(E z) / (E z)^2`.

use serde::Serialize;

use crate::activation::{Activation, Method};
use crate::config::NumericsConfig;
use crate::distributions::{chi_mean, erf, erfc, std_normal_pdf, ChiDensity, ChiDof};
use crate::error::{domain, Result};
use crate::kernels::{expected_z, Estimator};
use crate::plrdt::SaddleDiagnostics;
use crate::quadrature::{
    integrate_1d, integrate_2d_triangular, EstimateWithError, QuadratureConfig,
};

/// An `n`-scaled capacity upper bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityBound {
    /// Bound on `lim m / n`.
    pub alpha: f64,
    pub method: Method,
    pub activation: Activation,
    pub d: usize,
    /// Absolute error estimate (one standard error for Monte Carlo routes).
    pub error: f64,
    /// `E z` that fed the bound, when one was computed.
    pub ez: Option<EstimateWithError>,
    /// Monte Carlo sample count, when sampling was used.
    pub mc_samples: Option<u64>,
    pub diagnostics: Option<SaddleDiagnostics>,
}

/// `E[max(a1 - a2, 0)^2]` for independent chi variables with `k` degrees of
/// freedom, as a double integral over the triangle `a2 <= a1`.
pub fn quad_second_moment(k: ChiDof, cfg: &QuadratureConfig) -> Result<EstimateWithError> {
    let dens = ChiDensity::new(k);
    let cfg = cfg.for_chi(k.get());
    integrate_2d_triangular(
        |a1, a2| {
            let diff = a1 - a2;
            diff * diff * dens.pdf(a1) * dens.pdf(a2)
        },
        &cfg,
    )
}

/// Closed form of the quadratic bound.
///
/// `a1 - a2` is symmetric about zero without an atom, so
/// `E max(a1 - a2, 0)^2 = E (a1 - a2)^2 / 2 = k - mean(k)^2` with `k = d/2`,
/// and the bound is `2 / (k - mean(k)^2)`.
pub fn quad_capacity_closed_form(d: usize) -> Result<f64> {
    let k = ChiDof::for_width(d)?;
    let mu = chi_mean(k);
    Ok(2.0 / (k.get() - mu * mu))
}

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Inner `g2` integrals of the two-neuron ReLU expectation at fixed `g1`:
/// `I1 = g1^2 P(g2 <= (1 - sqrt 2) g1)` (left unit switched off) and
/// `I2 = E[(g1 - g2)^2 / 2; (1 - sqrt 2) g1 <= g2 <= g1]` (balanced units).
pub fn relu_i1_i2(g1: f64) -> Result<(f64, f64)> {
    if !(g1 >= 0.0) {
        return domain(format!("relu inner integrals need g1 >= 0, got {g1}"));
    }
    let c = 1.0 - SQRT2;
    let i1 = g1 * g1 * erfc((SQRT2 - 1.0) * g1 / SQRT2) / 2.0;
    let i2 = 0.25
        * ((g1 * g1 + 1.0) * (erf(g1 / SQRT2) - erf(c * g1 / SQRT2))
            + (2.0 / std::f64::consts::PI).sqrt()
                * (g1 * (-0.5 * g1 * g1).exp()
                    - (1.0 + SQRT2) * g1 * (-0.5 * (c * g1).powi(2)).exp()));
    Ok((i1, i2))
}

/// `E z` for the two-neuron ReLU network: the outer `g1` integral of
/// `(I1 + I2) * phi(g1)` over `g1 >= 0`.
pub fn relu_d2_expected_z(cfg: &QuadratureConfig) -> Result<EstimateWithError> {
    integrate_1d(
        |g1| {
            let (i1, i2) = relu_i1_i2(g1).unwrap_or((0.0, 0.0));
            (i1 + i2) * std_normal_pdf(g1)
        },
        0.0,
        f64::INFINITY,
        cfg,
    )
}

/// Turns `E z` into the plain bound `1 / E z` with delta-method error.
pub(crate) fn invert(ez: EstimateWithError) -> (f64, f64) {
    let alpha = 1.0 / ez.value;
    (alpha, ez.error / (ez.value * ez.value))
}

/// Plain random-duality capacity bound.
///
/// * linear: exactly 2;
/// * quadratic: `2 / E max(a1 - a2, 0)^2` by triangular quadrature;
/// * ReLU, `d = 2`: reciprocal of the `(I1 + I2)` quadrature;
/// * ReLU, `d >= 4`: reciprocal of a Monte Carlo estimate of `E z`.
pub fn rdt_capacity(activation: Activation, d: usize, cfg: &NumericsConfig) -> Result<CapacityBound> {
    activation.validate_width(d)?;
    cfg.validate()?;
    let (ez, mc_samples) = match activation {
        Activation::Linear => (EstimateWithError::exact(0.5), None),
        Activation::Quadratic => (expected_z(activation, d, Estimator::Quadrature, cfg)?, None),
        Activation::Relu if d == 2 => (expected_z(activation, d, Estimator::Quadrature, cfg)?, None),
        Activation::Relu => (
            expected_z(activation, d, Estimator::MonteCarlo, cfg)?,
            Some(cfg.mc_samples),
        ),
    };
    let (alpha, error) = if activation == Activation::Linear {
        (2.0, 0.0)
    } else {
        invert(ez)
    };
    Ok(CapacityBound {
        alpha,
        method: Method::Rdt,
        activation,
        d,
        error,
        ez: Some(ez),
        mc_samples,
        diagnostics: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn closed_form_values() {
        assert!((quad_capacity_closed_form(4).unwrap() - 2.0 / (2.0 - PI / 2.0)).abs() < 1e-13);
        assert!((quad_capacity_closed_form(4).unwrap() - 4.65979).abs() < 1e-5);
        assert!((quad_capacity_closed_form(2).unwrap() - 2.0 / (1.0 - 2.0 / PI)).abs() < 1e-13);
        let c64 = quad_capacity_closed_form(64).unwrap();
        assert!(c64 > 4.0 && c64 < 4.1);
        assert!(c64 > quad_capacity_closed_form(128).unwrap());
        assert!(quad_capacity_closed_form(3).is_err());
    }

    #[test]
    fn relu_inner_integrals_at_zero() {
        let (i1, i2) = relu_i1_i2(0.0).unwrap();
        assert_eq!(i1, 0.0);
        assert!(i2.abs() < 1e-300);
        assert!(relu_i1_i2(-1.0).is_err());
    }

    #[test]
    fn linear_is_exactly_two() {
        for d in [1, 2, 3, 4, 8] {
            let b = rdt_capacity(Activation::Linear, d, &NumericsConfig::default()).unwrap();
            assert_eq!(b.alpha, 2.0);
            assert_eq!(b.error, 0.0);
        }
    }

    #[test]
    fn invalid_widths() {
        let cfg = NumericsConfig::default();
        assert!(rdt_capacity(Activation::Relu, 1, &cfg).is_err());
        assert!(rdt_capacity(Activation::Quadratic, 5, &cfg).is_err());
    }
}
