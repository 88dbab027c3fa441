//! Deterministic adaptive quadrature on finite, semi-infinite and triangular
//! domains.
//!
//! Every panel is evaluated with the 10-point Gauss / 21-point Kronrod pair.
//! The panel with the largest error estimate is bisected until the global
//! estimate meets `max(abs_tol, rel_tol * |value|)`. Infinite limits are
//! replaced by a finite truncation radius, which is adequate because every
//! integrand in this crate is dominated by a Gaussian or chi tail.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Value together with its error claim.
///
/// For quadrature the error is an absolute error estimate; for Monte Carlo it
/// is one standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub value: f64,
    pub error: f64,
}

impl EstimateWithError {
    pub fn new(value: f64, error: f64) -> Self {
        debug_assert!(error >= 0.0);
        EstimateWithError { value, error }
    }

    pub fn exact(value: f64) -> Self {
        EstimateWithError { value, error: 0.0 }
    }

    /// True when `x` lies within `k` error bars of the value.
    pub fn contains(&self, x: f64, k: f64) -> bool {
        (self.value - x).abs() <= k * self.error
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Distance from the finite end at which an infinite limit is cut.
    pub truncation_radius: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let abs_tol = 1e-10;
        QuadratureConfig {
            rel_tol: 1e-8,
            abs_tol,
            max_subdivisions: 1_000_000,
            truncation_radius: default_radius(abs_tol),
        }
    }
}

/// `sqrt(2 ln(1/abs_tol)) + 10`: the Gaussian tail beyond this point is far
/// below `abs_tol`.
pub fn default_radius(abs_tol: f64) -> f64 {
    (2.0 * (1.0 / abs_tol).ln()).max(0.0).sqrt() + 10.0
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return domain("quadrature tolerances must be positive");
        }
        if self.max_subdivisions == 0 {
            return domain("max_subdivisions must be >= 1");
        }
        if !(self.truncation_radius > 0.0 && self.truncation_radius.is_finite()) {
            return domain("truncation_radius must be positive and finite");
        }
        Ok(())
    }

    /// Widens the truncation radius so that a chi density with `k` degrees of
    /// freedom (centred near `sqrt(k)`) keeps its tail beyond the cut.
    pub fn for_chi(mut self, k: f64) -> Self {
        let needed = k.sqrt() + default_radius(self.abs_tol);
        if needed > self.truncation_radius {
            self.truncation_radius = needed;
        }
        self
    }
}

// 21-point Kronrod abscissae (positive half, descending) and weights, with
// the embedded 10-point Gauss weights (odd Kronrod indices).
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_452_720,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    // Max-heap on error; ties broken by position so the order is total.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut res_abs = (fc * WGK[10]).abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel { a, b, value, error }
}

/// Nodes and weights of a composite 21-point Kronrod rule with `panels`
/// equal panels on `[a, b]`. Used to tabulate integrands that are evaluated
/// many times with a changing parameter.
pub fn composite_rule(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(panels * 21);
    let h = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + h * p as f64;
        let center = lo + 0.5 * h;
        let half = 0.5 * h;
        for j in 0..10 {
            out.push((center - half * XGK[j], WGK[j] * half));
            out.push((center + half * XGK[j], WGK[j] * half));
        }
        out.push((center, WGK[10] * half));
    }
    out
}

fn resolve_limits(lower: f64, upper: f64, cfg: &QuadratureConfig) -> Result<(f64, f64)> {
    if lower.is_nan() || upper.is_nan() {
        return domain("integration limits must not be NaN");
    }
    let r = cfg.truncation_radius;
    match (lower.is_finite(), upper.is_finite()) {
        (true, true) => Ok((lower, upper)),
        (true, false) if upper > 0.0 => Ok((lower, lower.max(0.0) + r)),
        (false, true) if lower < 0.0 => Ok((upper.min(0.0) - r, upper)),
        (false, false) if lower < 0.0 && upper > 0.0 => Ok((-r, r)),
        _ => domain("integration limits are inconsistent"),
    }
}

/// Integrates `f` over `[lower, upper]`; either limit may be infinite.
pub fn integrate_1d<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    upper: f64,
    cfg: &QuadratureConfig,
) -> Result<EstimateWithError> {
    integrate_1d_with_breaks(f, lower, upper, &[], cfg)
}

/// As [`integrate_1d`], with panel boundaries seeded at `breaks` (kinks or
/// discontinuities of the integrand). Breaks outside the domain are ignored.
pub fn integrate_1d_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    upper: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<EstimateWithError> {
    cfg.validate()?;
    let infinite = !lower.is_finite() || !upper.is_finite();
    let (a, b) = resolve_limits(lower, upper, cfg)?;
    if a == b {
        return Ok(EstimateWithError::exact(0.0));
    }
    let (a, b, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    let mut points: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > a && *x < b)
        .collect();
    // Truncated Gaussian domains start with a few panels so the bulk is
    // sampled before the first error estimate.
    if infinite {
        let n = 8;
        points.extend((1..n).map(|i| a + (b - a) * i as f64 / n as f64));
    }
    points.push(a);
    points.push(b);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        heap.push(gauss_kronrod(&f, w[0], w[1]));
    }
    let mut subdivisions = heap.len();
    let totals = |heap: &BinaryHeap<Panel>| {
        let mut panels: Vec<&Panel> = heap.iter().collect();
        panels.sort_by(|x, y| x.a.total_cmp(&y.a));
        panels
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };

    loop {
        let (value, error) = totals(&heap);
        if !value.is_finite() {
            return Err(Error::Accuracy {
                value,
                error,
                context: "integrand produced a non-finite value".into(),
            });
        }
        let target = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        if error <= target {
            return Ok(EstimateWithError::new(sign * value, error));
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(Error::Accuracy {
                value: sign * value,
                error,
                context: format!("{subdivisions} subdivisions exhausted"),
            });
        }
        let Some(worst) = heap.pop() else {
            unreachable!("heap always holds at least one panel")
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in floating point.
            return Err(Error::Accuracy {
                value: sign * value,
                error,
                context: format!("panel [{}, {}] reached machine resolution", worst.a, worst.b),
            });
        }
        heap.push(gauss_kronrod(&f, worst.a, mid));
        heap.push(gauss_kronrod(&f, mid, worst.b));
        subdivisions += 1;
    }
}

/// Integrates `f(a1, a2)` over the triangle `0 <= a2 <= a1 < inf` by nested
/// adaptive quadrature (outer `a1`, inner `a2`).
///
/// The reported error adds the outer error estimate and the worst inner
/// error times the outer domain length.
pub fn integrate_2d_triangular<F: Fn(f64, f64) -> f64>(
    f: F,
    cfg: &QuadratureConfig,
) -> Result<EstimateWithError> {
    cfg.validate()?;
    let radius = cfg.truncation_radius;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let worst_inner = RefCell::new(0.0f64);
    let outer = integrate_1d(
        |a1| {
            if a1 <= 0.0 {
                return 0.0;
            }
            match integrate_1d(|a2| f(a1, a2), 0.0, a1, cfg) {
                Ok(est) => {
                    let mut w = worst_inner.borrow_mut();
                    *w = w.max(est.error);
                    est.value
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        radius,
        cfg,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let error = outer.error + worst_inner.into_inner() * radius;
    Ok(EstimateWithError::new(outer.value, error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn kronrod_weights_sum_to_two() {
        let s: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        assert!((s - 2.0).abs() < 1e-14);
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((g - 2.0).abs() < 1e-14);
    }

    #[test]
    fn polynomials_are_exact() {
        let cfg = QuadratureConfig::default();
        for p in 0..=20 {
            let est = integrate_1d(|x| x.powi(p), 0.0, 1.0, &cfg).unwrap();
            assert!((est.value - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "degree {p}");
        }
    }

    #[test]
    fn basic_integrals() {
        let cfg = QuadratureConfig::default();
        let g = integrate_1d(|x| (-0.5 * x * x).exp(), 0.0, f64::INFINITY, &cfg).unwrap();
        assert!((g.value - (PI / 2.0).sqrt()).abs() < 1e-10);
        let one = integrate_1d(|_| 1.0, 0.0, 1.0, &cfg).unwrap();
        assert!((one.value - 1.0).abs() < 1e-15);
        let full = integrate_1d(|x| (-0.5 * x * x).exp(), f64::NEG_INFINITY, f64::INFINITY, &cfg)
            .unwrap();
        assert!((full.value - (2.0 * PI).sqrt()).abs() < 1e-9);
        let rev = integrate_1d(|x| x, 1.0, 0.0, &cfg).unwrap();
        assert!((rev.value + 0.5).abs() < 1e-15);
    }

    #[test]
    fn kinked_integrand_with_breaks() {
        let cfg = QuadratureConfig::default();
        let est = integrate_1d_with_breaks(|x: f64| x.abs(), -1.0, 2.0, &[0.0], &cfg).unwrap();
        assert!((est.value - 2.5).abs() < 1e-14);
        assert!(est.error <= 1e-10);
    }

    #[test]
    fn exhausted_budget_reports_accuracy_failure() {
        let cfg = QuadratureConfig {
            max_subdivisions: 3,
            rel_tol: 1e-14,
            abs_tol: 1e-16,
            ..QuadratureConfig::default()
        };
        let err = integrate_1d(|x: f64| x.sqrt().sin() / x.sqrt().max(1e-300), 0.0, 50.0, &cfg)
            .unwrap_err();
        match err {
            Error::Accuracy { value, error, .. } => {
                assert!(value.is_finite());
                assert!(error > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = QuadratureConfig {
            rel_tol: 0.0,
            ..QuadratureConfig::default()
        };
        assert!(integrate_1d(|x| x, 0.0, 1.0, &cfg).is_err());
    }

    #[test]
    fn composite_rule_integrates_gaussian() {
        let rule = composite_rule(0.0, 12.0, 40);
        let s: f64 = rule.iter().map(|(x, w)| w * (-0.5 * x * x).exp()).sum();
        assert!((s - (PI / 2.0).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn deterministic() {
        let cfg = QuadratureConfig::default();
        let f = |x: f64| (x * 3.0).cos() * (-x).exp();
        let a = integrate_1d(f, 0.0, f64::INFINITY, &cfg).unwrap();
        let b = integrate_1d(f, 0.0, f64::INFINITY, &cfg).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error.to_bits(), b.error.to_bits());
    }
}
