//! Partially lifted random-duality bounds.
//!
//! For `alpha > 0` the saddle objective is
//!
//! ```text
//! phi_bar(alpha) = max_{c3 > 0} min_{gamma > 0}
//!     c3/2 + gamma - (alpha / c3) ln I_Q(c3 / (4 gamma)) - I_sph(c3)
//! ```
//!
//! with `I_Q(t) = E exp(-t z(g))` and the closed-form spherical term
//! `I_sph`. The capacity bound is the zero crossing of `phi_bar` in `alpha`,
//! which is nondecreasing because `-ln I_Q >= 0`.
//!
//! `I_Q` is evaluated thousands of times per bound, so [`IqModel`] prepares a
//! representation once per `(activation, d)`: a closed form (linear), a
//! tabulated quadrature rule (quadratic, two-neuron ReLU) or one fixed Monte
//! Carlo sample reused for every evaluation (ReLU, `d >= 4`). The direct
//! route [`i_q`] integrates from scratch and serves as the reference.

use serde::Serialize;

use crate::activation::{Activation, Method};
use crate::config::NumericsConfig;
use crate::distributions::{std_normal_cdf, std_normal_pdf, ChiDensity, ChiDof};
use crate::error::{domain, Error, Result};
use crate::kernels::{z_relu_d2, z_sampler};
use crate::montecarlo::{collect_samples, estimate_mean, fill_gaussian};
use crate::optimize::{find_root_increasing, maximize_scan, minimize_from};
use crate::quadrature::{
    composite_rule, integrate_1d, integrate_1d_with_breaks, integrate_2d_triangular,
    EstimateWithError,
};
use crate::rdt::{relu_i1_i2, CapacityBound};

/// Search interval for `c3`.
pub const C3_MIN: f64 = 1e-4;
pub const C3_MAX: f64 = 50.0;
/// Log-spaced points of the initial `c3` scan.
pub const C3_SCAN: usize = 40;
/// Inner search floor `gamma >= GAMMA_MIN_RATIO * c3`.
pub const GAMMA_MIN_RATIO: f64 = 1e-9;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Saddle point found by [`phi_bar`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaddleDiagnostics {
    pub alpha: f64,
    /// Maximizing `c3`; `0` when the `c3 -> 0` limit is the supremum.
    pub c3_opt: f64,
    pub gamma_opt: f64,
    pub phi_bar: f64,
    pub iq_value: EstimateWithError,
    pub isph_value: f64,
    /// `(c3, min_gamma objective)` pairs of the initial scan.
    pub c3_trace: Vec<(f64, f64)>,
}

/// `gamma_sph = (c3 + sqrt(c3^2 + 4)) / 4`.
pub fn gamma_sph(c3: f64) -> f64 {
    (c3 + (c3 * c3 + 4.0).sqrt()) / 4.0
}

/// Spherical term `gamma_sph - ln(1 - c3 / (2 gamma_sph)) / (2 c3)`.
///
/// `1 - c3/(2 gamma_sph) = 4 / (s + c3)^2` with `s = sqrt(c3^2 + 4)`, which
/// is evaluated through `ln_1p` so small `c3` keeps full precision.
pub fn i_sph(c3: f64) -> Result<f64> {
    if !(c3 > 0.0 && c3.is_finite()) {
        return domain(format!("c3 must be positive, got {c3}"));
    }
    let s = (c3 * c3 + 4.0).sqrt();
    // (s + c3)/2 = 1 + (c3 + c3^2/(s + 2)) / 2
    let log_arg = -2.0 * (0.5 * (c3 + c3 * c3 / (s + 2.0))).ln_1p();
    Ok(gamma_sph(c3) - log_arg / (2.0 * c3))
}

/// Value of `I_Q` with `I_Q - 1` kept separately for precision at small `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IqValue {
    pub minus_one: f64,
    pub error: f64,
}

impl IqValue {
    pub fn value(&self) -> f64 {
        1.0 + self.minus_one
    }

    pub fn ln(&self) -> f64 {
        self.minus_one.ln_1p()
    }

    pub fn estimate(&self) -> EstimateWithError {
        EstimateWithError::new(self.value(), self.error)
    }
}

const TAYLOR_TERMS: usize = 14;
/// Bin half-widths of the moment levels; level `l` serves
/// `s * half_width <= 1/2` and only needs bins where `s z <= EXP_CUTOFF`.
const LEVEL_HALF_WIDTHS: [f64; 4] = [0.025, 2.5e-3, 2.5e-4, 2.5e-5];
const EXP_CUTOFF: f64 = 40.0;

#[derive(Debug, Clone)]
struct Bin {
    center: f64,
    /// `sum (z - center)^m / m!` for `m < TAYLOR_TERMS`.
    moments: [f64; TAYLOR_TERMS],
}

#[derive(Debug, Clone)]
struct Level {
    half_width: f64,
    bins: Vec<Bin>,
    /// Number of positive samples represented by `bins`.
    covered: usize,
}

impl Level {
    fn build(sorted: &[f64], half_width: f64) -> Level {
        let mut bins: Vec<Bin> = Vec::new();
        for &z in sorted {
            let center = ((z / (2.0 * half_width)).floor() + 0.5) * 2.0 * half_width;
            if bins.last().is_none_or(|b| b.center != center) {
                bins.push(Bin {
                    center,
                    moments: [0.0; TAYLOR_TERMS],
                });
            }
            let bin = bins.last_mut().expect("just pushed");
            let x = z - center;
            let mut term = 1.0;
            for (j, mj) in bin.moments.iter_mut().enumerate() {
                *mj += term;
                term *= x / (j + 1) as f64;
            }
        }
        Level {
            half_width,
            bins,
            covered: sorted.len(),
        }
    }

    fn serves(&self, s: f64) -> bool {
        s * self.half_width <= 0.5
    }

    /// `sum over covered z of expm1(-s z)`.
    fn sum_expm1(&self, s: f64) -> f64 {
        self.bins
            .iter()
            .map(|b| {
                let mut acc = 0.0;
                let mut p = 1.0;
                for mj in &b.moments {
                    acc += p * mj;
                    p *= -s;
                }
                (-s * b.center).exp() * acc - b.moments[0]
            })
            .sum()
    }
}

/// A fixed Monte Carlo sample of kernel values (common random numbers).
///
/// `sum exp(-s z)` is evaluated per bin as `exp(-s c) * sum_m (-s)^m M_m`
/// with scaled central moments `M_m`. Larger `s` use narrower bins, which
/// are only built where `exp(-s z)` is not negligible; beyond the finest
/// level the few relevant raw values are summed.
#[derive(Debug, Clone)]
pub struct SampledKernel {
    total: u64,
    positive: Vec<f64>,
    levels: Vec<Level>,
    mean_z: EstimateWithError,
}

impl SampledKernel {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return domain("sampled kernel needs at least one value");
        }
        let total = values.len() as u64;
        let mut m = crate::montecarlo::Moments::default();
        values.iter().for_each(|&z| m.push(z));
        values.retain(|&z| z > 0.0);
        values.sort_by(f64::total_cmp);
        let levels = LEVEL_HALF_WIDTHS
            .iter()
            .enumerate()
            .map(|(l, &hw)| {
                let n = if l == 0 {
                    values.len()
                } else {
                    // Served s exceed 0.5 / previous half-width.
                    let s_min = 0.5 / LEVEL_HALF_WIDTHS[l - 1];
                    values.partition_point(|&z| z * s_min <= EXP_CUTOFF)
                };
                Level::build(&values[..n], hw)
            })
            .collect();
        Ok(SampledKernel {
            total,
            positive: values,
            levels,
            mean_z: m.estimate(),
        })
    }

    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn mean_z(&self) -> EstimateWithError {
        self.mean_z
    }

    /// `sum over positive z of expm1(-s z)`.
    fn sum_expm1(&self, s: f64) -> f64 {
        let (partial, covered) = match self.levels.iter().find(|l| l.serves(s)) {
            Some(level) => (level.sum_expm1(s), level.covered),
            None => {
                let n = self.positive.partition_point(|&z| z * s <= EXP_CUTOFF);
                let sum = self.positive[..n].iter().map(|z| (-s * z).exp_m1()).sum();
                (sum, n)
            }
        };
        // Every sample beyond the covered range has exp(-s z) ~ 0.
        partial - (self.positive.len() - covered) as f64
    }

    fn eval(&self, t: f64) -> IqValue {
        let n = self.total as f64;
        let minus_one = self.sum_expm1(t) / n;
        let second_minus_one = self.sum_expm1(2.0 * t) / n;
        let mean = 1.0 + minus_one;
        let var = ((1.0 + second_minus_one) - mean * mean).max(0.0);
        IqValue {
            minus_one,
            error: (var / n).sqrt(),
        }
    }
}

/// Prepared representation of `t -> I_Q(t) = E exp(-t z)`.
#[derive(Debug, Clone)]
pub enum IqModel {
    /// `1/2 + (1/2)(1 + 2t)^(-1/2)`.
    Linear,
    /// Quadratic kernel: `z = D^2/2` with `D = a1 - a2 > 0`. Entries are
    /// `(D^2/2, weight * density of D)`; the complementary mass has `z = 0`.
    Quadratic {
        table: Vec<(f64, f64)>,
        mass_error: f64,
    },
    /// Two-neuron ReLU: outer `g1` rule with the inner `g2` integral in
    /// closed form.
    ReluD2 { table: Vec<ReluD2Node> },
    Sampled(SampledKernel),
}

impl IqModel {
    pub fn prepare(activation: Activation, d: usize, cfg: &NumericsConfig) -> Result<Self> {
        activation.validate_width(d)?;
        cfg.validate()?;
        match activation {
            Activation::Linear => Ok(IqModel::Linear),
            Activation::Quadratic => prepare_quadratic(d, cfg),
            Activation::Relu if d == 2 => {
                let r = cfg.quadrature().truncation_radius;
                let table = graded_rule(r, 40)
                    .into_iter()
                    .map(|(x, w)| ReluD2Node::new(x, w * std_normal_pdf(x)))
                    .collect();
                Ok(IqModel::ReluD2 { table })
            }
            Activation::Relu => {
                let sampler = z_sampler(activation, d)?;
                let mc = cfg.monte_carlo();
                let zs = cfg.install(|| collect_samples(sampler, &mc))?;
                Ok(IqModel::Sampled(SampledKernel::new(zs)?))
            }
        }
    }

    /// `I_Q(t)` for `t = c3 / (4 gamma) >= 0`.
    pub fn eval(&self, t: f64) -> IqValue {
        match self {
            IqModel::Linear => IqValue {
                minus_one: 0.5 * (-0.5 * (2.0 * t).ln_1p()).exp_m1(),
                error: 0.0,
            },
            IqModel::Quadratic { table, mass_error } => IqValue {
                minus_one: table.iter().map(|&(z, w)| w * (-t * z).exp_m1()).sum(),
                error: *mass_error,
            },
            IqModel::ReluD2 { table } => IqValue {
                minus_one: table.iter().map(|n| n.weight * n.deficit(t)).sum(),
                error: 0.0,
            },
            IqModel::Sampled(s) => s.eval(t),
        }
    }

    /// `E z`, the slope of `1 - I_Q` at `t = 0`.
    pub fn expected_z(&self) -> EstimateWithError {
        match self {
            IqModel::Linear => EstimateWithError::exact(0.5),
            IqModel::Quadratic { table, mass_error } => {
                EstimateWithError::new(table.iter().map(|&(z, w)| w * z).sum(), *mass_error)
            }
            IqModel::ReluD2 { table } => EstimateWithError::exact(
                table
                    .iter()
                    .map(|n| {
                        let (i1, i2) = relu_i1_i2(n.g1).unwrap_or((0.0, 0.0));
                        n.weight * (i1 + i2)
                    })
                    .sum(),
            ),
            IqModel::Sampled(s) => s.mean_z(),
        }
    }

    pub fn mc_samples(&self) -> Option<u64> {
        match self {
            IqModel::Sampled(s) => Some(s.len()),
            _ => None,
        }
    }
}

/// Composite rule on `[0, r]` with geometrically refined panels below 1,
/// where `exp(-t x^2)` concentrates for large `t`.
fn graded_rule(r: f64, panels: usize) -> Vec<(f64, f64)> {
    let mut nodes = composite_rule(0.0, 1e-4, 4);
    for e in -4..0 {
        nodes.extend(composite_rule(10f64.powi(e), 10f64.powi(e + 1), 10));
    }
    nodes.extend(composite_rule(1.0, r, panels));
    nodes
}

/// Tabulates the density of `D = a1 - a2` on `D > 0`,
/// `p(D) = int f(a) f(a + D) da`, against a composite Kronrod rule that is
/// graded toward `D = 0`.
fn prepare_quadratic(d: usize, cfg: &NumericsConfig) -> Result<IqModel> {
    let k = ChiDof::for_width(d)?;
    let dens = ChiDensity::new(k);
    let qcfg = cfg.quadrature().for_chi(k.get());
    let r = qcfg.truncation_radius;
    let nodes = graded_rule(r, 120);
    let mut table = Vec::with_capacity(nodes.len());
    for (delta, w) in nodes {
        let p = integrate_1d(|a| dens.pdf(a) * dens.pdf(a + delta), 0.0, r, &qcfg)?;
        table.push((0.5 * delta * delta, w * p.value));
    }
    let mass: f64 = table.iter().map(|&(_, w)| w).sum();
    Ok(IqModel::Quadratic {
        table,
        mass_error: (mass - 0.5).abs(),
    })
}

/// Outer node of the two-neuron ReLU table with its `t`-free factors.
#[derive(Debug, Clone, Copy)]
pub struct ReluD2Node {
    g1: f64,
    /// Rule weight times `phi(g1)`.
    weight: f64,
    /// `P(g2 <= c g1)` with `c = 1 - sqrt 2`.
    off_mass: f64,
    /// `P(c g1 < g2 <= g1)`.
    band_mass: f64,
}

impl ReluD2Node {
    fn new(g1: f64, weight: f64) -> Self {
        let c = 1.0 - SQRT2;
        let off_mass = std_normal_cdf(c * g1);
        ReluD2Node {
            g1,
            weight,
            off_mass,
            band_mass: std_normal_cdf(g1) - off_mass,
        }
    }

    /// Inner integral of `exp(-t z) - 1` over `g2` at this `g1 >= 0`:
    /// `expm1(-t g1^2) P(g2 <= c g1) + int_{c g1}^{g1} (exp(-t (g1-g2)^2/2) - 1) phi(g2) dg2`;
    /// the second integral is Gaussian in closed form.
    fn deficit(&self, t: f64) -> f64 {
        let (g1, c) = (self.g1, 1.0 - SQRT2);
        let s = 1.0 + t;
        let rs = s.sqrt();
        let off = (-t * g1 * g1).exp_m1() * self.off_mass;
        let band = std_normal_cdf(g1 / rs) - std_normal_cdf(g1 * (c * s - t) / rs);
        off + (-0.5 * t * g1 * g1 / s).exp() / rs * band - self.band_mass
    }
}

/// `I_Q = E exp(-c3 z / (4 gamma))` integrated from scratch (no prepared
/// table): closed form for linear, triangular chi quadrature for quadratic,
/// nested Gaussian quadrature over the piecewise kernel for two-neuron ReLU,
/// and plain Monte Carlo for wider ReLU networks.
pub fn i_q(
    activation: Activation,
    d: usize,
    c3: f64,
    gamma: f64,
    cfg: &NumericsConfig,
) -> Result<EstimateWithError> {
    if !(c3 > 0.0 && gamma > 0.0) {
        return domain(format!("c3 and gamma must be positive, got ({c3}, {gamma})"));
    }
    activation.validate_width(d)?;
    cfg.validate()?;
    let t = c3 / (4.0 * gamma);
    let qcfg = cfg.quadrature();
    match activation {
        Activation::Linear => Ok(EstimateWithError::exact(0.5 + 0.5 / (1.0 + 2.0 * t).sqrt())),
        Activation::Quadratic => {
            let k = ChiDof::for_width(d)?;
            let dens = ChiDensity::new(k);
            let part = integrate_2d_triangular(
                |a1, a2| {
                    let diff = a1 - a2;
                    (-0.5 * t * diff * diff).exp() * dens.pdf(a1) * dens.pdf(a2)
                },
                &qcfg.for_chi(k.get()),
            )?;
            // The a2 > a1 half has z = 0 and contributes its probability 1/2.
            Ok(EstimateWithError::new(0.5 + part.value, part.error))
        }
        Activation::Relu if d == 2 => {
            let c = 1.0 - SQRT2;
            let inner_fail = std::cell::RefCell::new(None);
            let worst = std::cell::Cell::new(0.0f64);
            let outer = integrate_1d(
                |g1| {
                    let inner = integrate_1d_with_breaks(
                        |g2| (-t * z_relu_d2(g1, g2).z).exp() * std_normal_pdf(g2),
                        f64::NEG_INFINITY,
                        f64::INFINITY,
                        &[c * g1, g1],
                        &qcfg,
                    );
                    match inner {
                        Ok(e) => {
                            worst.set(worst.get().max(e.error));
                            e.value * std_normal_pdf(g1)
                        }
                        Err(e) => {
                            inner_fail.borrow_mut().get_or_insert(e);
                            0.0
                        }
                    }
                },
                0.0,
                f64::INFINITY,
                &qcfg,
            )?;
            if let Some(e) = inner_fail.into_inner() {
                return Err(e);
            }
            // g1 <= 0 is feasible (z = 0) with probability 1/2.
            Ok(EstimateWithError::new(
                0.5 + outer.value,
                outer.error + worst.get() * qcfg.truncation_radius,
            ))
        }
        Activation::Relu => {
            let mc = cfg.monte_carlo();
            cfg.install(|| {
                estimate_mean(
                    move |rng| {
                        let mut g = [0.0f64; 64];
                        let g = &mut g[..d.min(64)];
                        fill_gaussian(g, rng);
                        (-t * crate::kernels::relu_z_value(g)).exp()
                    },
                    &mc,
                )
            })
        }
    }
}

/// The objective at fixed `(alpha, c3, gamma)`.
pub fn saddle_objective(model: &IqModel, alpha: f64, c3: f64, gamma: f64) -> Result<f64> {
    let iq = model.eval(c3 / (4.0 * gamma));
    Ok(0.5 * c3 + gamma - alpha / c3 * iq.ln() - i_sph(c3)?)
}

/// `min_gamma` of the objective at fixed `(alpha, c3)`; returns
/// `(gamma_opt, value)`.
pub fn inner_min(model: &IqModel, alpha: f64, c3: f64, cfg: &NumericsConfig) -> Result<(f64, f64)> {
    if !(alpha > 0.0) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    let isph = i_sph(c3)?;
    let lower = GAMMA_MIN_RATIO * c3;
    // The small-c3 optimum gamma = sqrt(alpha E z)/2 is a good start.
    let start = (0.5 * (alpha * model.expected_z().value).sqrt()).max(lower);
    let r = minimize_from(
        |gamma| {
            let iq = model.eval(c3 / (4.0 * gamma));
            0.5 * c3 + gamma - alpha / c3 * iq.ln() - isph
        },
        lower,
        start,
        cfg.optimizer_tol,
    )?;
    Ok((r.x, r.value))
}

/// Saddle value `phi_bar(alpha)` with a prepared `I_Q` model.
pub fn phi_bar_with(model: &IqModel, alpha: f64, cfg: &NumericsConfig) -> Result<SaddleDiagnostics> {
    let (best, trace) = maximize_scan(
        |c3| inner_min(model, alpha, c3, cfg).map(|(_, v)| v),
        C3_MIN,
        C3_MAX,
        C3_SCAN,
        cfg.optimizer_tol,
    )?;
    // The objective tends to sqrt(alpha E z) - 1 as c3 -> 0; when that edge
    // wins the lifting adds nothing and the plain bound is recovered.
    let ez = model.expected_z().value;
    let edge = (alpha * ez).sqrt() - 1.0;
    if edge >= best.value {
        return Ok(SaddleDiagnostics {
            alpha,
            c3_opt: 0.0,
            gamma_opt: 0.5 * (alpha * ez).sqrt(),
            phi_bar: edge,
            iq_value: EstimateWithError::exact(1.0),
            isph_value: 1.0,
            c3_trace: trace,
        });
    }
    let c3 = best.x;
    let (gamma, value) = inner_min(model, alpha, c3, cfg)?;
    let gs = gamma_sph(c3);
    if !(1.0 - c3 / (2.0 * gs) > 0.0) {
        return Err(Error::Accuracy {
            value: 1.0 - c3 / (2.0 * gs),
            error: 0.0,
            context: "spherical log argument must be positive".into(),
        });
    }
    Ok(SaddleDiagnostics {
        alpha,
        c3_opt: c3,
        gamma_opt: gamma,
        phi_bar: value,
        iq_value: model.eval(c3 / (4.0 * gamma)).estimate(),
        isph_value: i_sph(c3)?,
        c3_trace: trace,
    })
}

/// Saddle value `phi_bar(alpha)` for an activation and width.
pub fn phi_bar(
    alpha: f64,
    activation: Activation,
    d: usize,
    cfg: &NumericsConfig,
) -> Result<SaddleDiagnostics> {
    let model = IqModel::prepare(activation, d, cfg)?;
    cfg.install(|| phi_bar_with(&model, alpha, cfg))
}

/// Partially lifted capacity bound from a prepared model.
pub fn plrdt_capacity_with(
    model: &IqModel,
    activation: Activation,
    d: usize,
    cfg: &NumericsConfig,
) -> Result<CapacityBound> {
    let ez = model.expected_z();
    let plain = 1.0 / ez.value;
    let (lo, hi) = (1.0, plain + 1.0);
    let outcome = find_root_increasing(
        |alpha| phi_bar_with(model, alpha, cfg).map(|s| s.phi_bar),
        lo,
        hi,
        cfg.root_tol,
        cfg.optimizer_tol,
    )?;
    let (alpha, _) = outcome.map_err(|e| match e {
        Error::Bracket { trace, .. } => Error::Bracket {
            message: format!("phi_bar has no sign change on [{lo}, {hi}]"),
            trace,
        },
        other => other,
    })?;
    let diag = phi_bar_with(model, alpha, cfg)?;
    if diag.phi_bar.abs() > cfg.root_tol {
        return Err(Error::Accuracy {
            value: alpha,
            error: diag.phi_bar.abs(),
            context: "phi_bar at the accepted root exceeds root_tol".into(),
        });
    }
    // Away from the c3 -> 0 edge, phi_bar depends on alpha only through
    // alpha * ln I_Q, so a relative error in ln I_Q maps one-to-one onto
    // alpha; the leftover residual goes through the slope -ln I_Q / c3.
    let error = if diag.c3_opt == 0.0 {
        let slope = 0.5 * (ez.value / alpha).sqrt();
        ez.error / (ez.value * ez.value) + diag.phi_bar.abs() / slope
    } else {
        let iq = diag.iq_value;
        let ln_iq = iq.value.ln().abs().max(f64::MIN_POSITIVE);
        alpha * iq.error / (iq.value * ln_iq) + diag.phi_bar.abs() * diag.c3_opt / ln_iq
    };
    Ok(CapacityBound {
        alpha,
        method: Method::Plrdt,
        activation,
        d,
        error,
        ez: Some(ez),
        mc_samples: model.mc_samples(),
        diagnostics: Some(diag),
    })
}

/// Partially lifted capacity bound: the `alpha` where `phi_bar` crosses zero.
pub fn plrdt_capacity(activation: Activation, d: usize, cfg: &NumericsConfig) -> Result<CapacityBound> {
    let model = IqModel::prepare(activation, d, cfg)?;
    cfg.install(|| plrdt_capacity_with(&model, activation, d, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i_sph_naive(c3: f64) -> f64 {
        let gs = (c3 + (c3 * c3 + 4.0).sqrt()) / 4.0;
        gs - (1.0 - c3 / (2.0 * gs)).ln() / (2.0 * c3)
    }

    #[test]
    fn i_sph_values() {
        let v = i_sph(2.0).unwrap();
        assert!((gamma_sph(2.0) - 1.207_106_781).abs() < 1e-9);
        assert!((v - i_sph_naive(2.0)).abs() < 1e-13);
        assert!((v - 1.64777).abs() < 1e-4, "{v}");
        assert!((i_sph(1e-6).unwrap() - 1.0).abs() < 1e-5);
        for c3 in [1e-3, 0.1, 1.0, 7.0, 50.0] {
            assert!((i_sph(c3).unwrap() - i_sph_naive(c3)).abs() < 1e-10);
        }
        assert!(i_sph(0.0).is_err());
        assert!(i_sph(-1.0).is_err());
    }

    #[test]
    fn linear_iq() {
        let cfg = NumericsConfig::default();
        let v = i_q(Activation::Linear, 3, 4.0, 1.0, &cfg).unwrap();
        assert!((v.value - (0.5 + 0.5 / 3f64.sqrt())).abs() < 1e-15);
        assert!((v.value - 0.78868).abs() < 1e-5);
        let m = IqModel::Linear.eval(1.0);
        assert!((m.value() - v.value).abs() < 1e-15);
        assert!(i_q(Activation::Linear, 3, 0.0, 1.0, &cfg).is_err());
    }

    #[test]
    fn iq_tends_to_one() {
        let cfg = NumericsConfig::default();
        for (a, d) in [(Activation::Linear, 2), (Activation::Quadratic, 2), (Activation::Relu, 2)] {
            let v = i_q(a, d, 1e-9, 1.0, &cfg).unwrap();
            assert!((v.value - 1.0).abs() < 1e-8, "{a}: {}", v.value);
        }
    }

    #[test]
    fn sampled_series_matches_direct_sum() {
        let zs: Vec<f64> = (0..5000)
            .map(|i| if i % 3 == 0 { 0.0 } else { (i as f64 * 0.37).sin().abs() * 6.0 })
            .collect();
        let s = SampledKernel::new(zs.clone()).unwrap();
        for t in [1e-6, 0.01, 0.5, 5.0, 19.0, 40.0, 300.0] {
            let want: f64 = zs.iter().map(|z| (-t * z).exp()).sum::<f64>() / zs.len() as f64;
            let got = s.eval(t).value();
            assert!((got - want).abs() < 1e-13, "t={t}: {got} vs {want}");
        }
    }

    #[test]
    fn relu_d2_table_matches_direct() {
        let cfg = NumericsConfig::default();
        let model = IqModel::prepare(Activation::Relu, 2, &cfg).unwrap();
        for (c3, gamma) in [(1.0, 1.0), (3.0, 0.2), (0.01, 0.5)] {
            let direct = i_q(Activation::Relu, 2, c3, gamma, &cfg).unwrap();
            let tab = model.eval(c3 / (4.0 * gamma)).value();
            assert!((direct.value - tab).abs() < 1e-8, "{direct:?} vs {tab}");
        }
    }

    #[test]
    fn quadratic_table_matches_direct() {
        let cfg = NumericsConfig::default();
        let model = IqModel::prepare(Activation::Quadratic, 4, &cfg).unwrap();
        for (c3, gamma) in [(1.0, 1.0), (3.0, 0.15), (0.01, 0.5), (10.0, 0.02)] {
            let direct = i_q(Activation::Quadratic, 4, c3, gamma, &cfg).unwrap();
            let tab = model.eval(c3 / (4.0 * gamma)).value();
            assert!((direct.value - tab).abs() < 1e-8, "{direct:?} vs {tab}");
        }
    }
}
