//! Per-sample minimal-distance kernels.
//!
//! For a Gaussian row `g` of length `d` and output weights `w`, the kernel is
//! `z(g) = min ||g - q||^2` over `q` with `f(q)^T w >= 0`, where `f` is the
//! hidden activation applied componentwise. Quadratic and ReLU networks use
//! `w = [-1, ..., -1, 1, ..., 1]` (`d/2` of each), so the constraint compares
//! the activated left half of `q` with the activated right half.

use serde::{Deserialize, Serialize};

use crate::activation::Activation;
use crate::config::NumericsConfig;
use crate::distributions::ChiDof;
use crate::error::{domain, Error, Result};
use crate::montecarlo::{estimate_mean, fill_gaussian, Stream};
use crate::quadrature::EstimateWithError;
use crate::rdt;

/// Output weights of the committee machine.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputWeights(Vec<f64>);

impl OutputWeights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() || w.iter().any(|x| !x.is_finite()) {
            return domain("output weights must be a non-empty finite vector");
        }
        if w.iter().all(|&x| x == 0.0) {
            return domain("output weights must not be all zero");
        }
        Ok(OutputWeights(w))
    }

    /// `[-1; d/2] ++ [1; d/2]`.
    pub fn committee(d: usize) -> Result<Self> {
        if d < 2 || d % 2 != 0 {
            return domain(format!("committee weights need an even width >= 2, got {d}"));
        }
        let h = d / 2;
        Ok(OutputWeights(
            std::iter::repeat_n(-1.0, h).chain(std::iter::repeat_n(1.0, h)).collect(),
        ))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Piece of the two-neuron ReLU closed form that produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReluD2Piece {
    /// `g1 <= 0` or `g2 >= g1`: `g` is feasible.
    Feasible,
    /// `g2 <= (1 - sqrt 2) g1`: left unit switched off, `z = g1^2`.
    SwitchOff,
    /// `(1 - sqrt 2) g1 <= g2 <= g1`: both units meet at the mean, `z = (g1 - g2)^2 / 2`.
    Balance,
}

/// Which analytic branch or solver stage produced a kernel value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Branch {
    /// Linear kernel; `active` when the halfspace constraint binds.
    Linear { active: bool },
    /// Quadratic kernel. `sqrt_b` is the common half-norm at the optimum when
    /// the constraint binds.
    Quadratic { sqrt_b: Option<f64> },
    ReluD2(ReluD2Piece),
    /// General-width ReLU. `k` right-half entries are positive at the
    /// optimum, `b` is their sum and `multiplier` the shared shift applied to
    /// both halves. `k == 0` with `b == 0` means every left unit is switched off.
    ReluStaged { k: usize, b: f64, multiplier: f64 },
    /// `g` already satisfies the ReLU constraint.
    ReluFeasible,
    /// Orthant-enumeration oracle; bit `i` of `orthant` set means `q_i >= 0`.
    Oracle { orthant: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelResult {
    pub z: f64,
    pub branch: Branch,
    pub q_opt: Option<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_even(d: usize) -> Result<()> {
    if d < 2 || d % 2 != 0 {
        domain(format!(
            "kernel requires an even width d >= 2 (d/2 weights of each sign); got d={d}"
        ))
    } else {
        Ok(())
    }
}

/// Linear kernel: `z = max(-g^T w / ||w||, 0)^2`.
pub fn z_linear(g: &[f64], w: &OutputWeights) -> Result<KernelResult> {
    let w = w.as_slice();
    if g.len() != w.len() {
        return domain(format!("g has length {} but w has length {}", g.len(), w.len()));
    }
    let w2 = dot(w, w);
    let gw = dot(g, w);
    let lambda = (-gw / w2).max(0.0);
    let q: Vec<f64> = g.iter().zip(w).map(|(gi, wi)| gi + lambda * wi).collect();
    let s = (-gw / w2.sqrt()).max(0.0);
    Ok(KernelResult {
        z: s * s,
        branch: Branch::Linear { active: lambda > 0.0 },
        q_opt: Some(q),
    })
}

/// Quadratic kernel from the two chi variables `a1 = ||g_left||`,
/// `a2 = ||g_right||`: `z = max(a1 - a2, 0)^2 / 2`.
pub fn z_quad_chi(a1: f64, a2: f64) -> Result<f64> {
    if !(a1 >= 0.0 && a2 >= 0.0) {
        return domain(format!("chi arguments must be nonnegative, got ({a1}, {a2})"));
    }
    let s = (a1 - a2).max(0.0);
    Ok(0.5 * s * s)
}

fn half_norms(g: &[f64]) -> (f64, f64) {
    let h = g.len() / 2;
    let n = |s: &[f64]| s.iter().map(|x| x * x).sum::<f64>().sqrt();
    (n(&g[..h]), n(&g[h..]))
}

/// Quadratic kernel under committee weights.
pub fn z_quad(g: &[f64]) -> Result<KernelResult> {
    check_even(g.len())?;
    let h = g.len() / 2;
    let (a1, a2) = half_norms(g);
    let z = z_quad_chi(a1, a2)?;
    if a1 <= a2 {
        return Ok(KernelResult {
            z,
            branch: Branch::Quadratic { sqrt_b: None },
            q_opt: Some(g.to_vec()),
        });
    }
    // Both halves are rescaled to the common norm sqrt(b) = (a1 + a2) / 2.
    let sqrt_b = 0.5 * (a1 + a2);
    let mut q = Vec::with_capacity(g.len());
    q.extend(g[..h].iter().map(|x| x * sqrt_b / a1));
    if a2 > 0.0 {
        q.extend(g[h..].iter().map(|x| x * sqrt_b / a2));
    } else {
        q.push(sqrt_b);
        q.extend(std::iter::repeat_n(0.0, h - 1));
    }
    Ok(KernelResult {
        z,
        branch: Branch::Quadratic { sqrt_b: Some(sqrt_b) },
        q_opt: Some(q),
    })
}

/// Two-neuron ReLU kernel in closed form.
pub fn z_relu_d2(g1: f64, g2: f64) -> KernelResult {
    let (z, piece, q) = if g1 <= 0.0 || g2 >= g1 {
        (0.0, ReluD2Piece::Feasible, [g1, g2])
    } else if g2 <= (1.0 - std::f64::consts::SQRT_2) * g1 {
        (g1 * g1, ReluD2Piece::SwitchOff, [0.0, g2])
    } else {
        let m = 0.5 * (g1 + g2);
        (0.5 * (g1 - g2) * (g1 - g2), ReluD2Piece::Balance, [m, m])
    };
    KernelResult {
        z,
        branch: Branch::ReluD2(piece),
        q_opt: Some(q.to_vec()),
    }
}

/// `sum_L max(q, 0) <= sum_R max(q, 0)` up to `tol`.
pub fn relu_feasible(q: &[f64], tol: f64) -> bool {
    let h = q.len() / 2;
    let left: f64 = q[..h].iter().map(|x| x.max(0.0)).sum();
    let right: f64 = q[h..].iter().map(|x| x.max(0.0)).sum();
    left <= right + tol
}

#[derive(Debug, Clone, Copy)]
struct StagedOptimum {
    z: f64,
    k: usize,
    multiplier: f64,
    b: f64,
}

/// Shift `lambda >= 0` balancing the left units shrunk by `lambda` against
/// the chosen right units raised by `lambda`:
/// `sum max(p - lambda, 0) = sum max(r + lambda, 0)`.
///
/// The balance function is piecewise linear and decreasing, so the root is
/// found exactly by scanning its breakpoints.
fn balance_shift(left: &[f64], right: &[f64]) -> f64 {
    let gap = |lam: f64| -> f64 {
        let l: f64 = left.iter().map(|p| (p - lam).max(0.0)).sum();
        let r: f64 = right.iter().map(|x| (x + lam).max(0.0)).sum();
        l - r
    };
    let top = left.iter().copied().fold(0.0, f64::max);
    let mut bps: Vec<f64> = left
        .iter()
        .copied()
        .chain(right.iter().map(|x| -x))
        .filter(|&x| x > 0.0 && x < top)
        .collect();
    bps.push(0.0);
    bps.push(top);
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    let mut lo = bps[0];
    let mut f_lo = gap(lo);
    if f_lo <= 0.0 {
        return lo;
    }
    for &hi in &bps[1..] {
        let f_hi = gap(hi);
        if f_hi <= 0.0 {
            return lo + f_lo * (hi - lo) / (f_lo - f_hi);
        }
        lo = hi;
        f_lo = f_hi;
    }
    top
}

/// Staged solution of the ReLU problem for an infeasible `g`.
///
/// Only the positive left entries `p` matter on the left (the others are
/// already switched off). On the right, the `k` largest entries are allowed
/// to be positive, `k` ranging from the number of nonnegative entries up to
/// `d/2`. For fixed `k` the problem is a projection onto a polyhedral cone
/// whose KKT conditions reduce to one shared shift `lambda`:
/// `q_left = max(p - lambda, 0)`, `q_right = max(r + lambda, 0)`.
fn relu_staged(left_pos: &[f64], right_sorted: &[f64]) -> StagedOptimum {
    let d3 = right_sorted.iter().take_while(|&&x| x >= 0.0).count();
    let mut best: Option<StagedOptimum> = None;
    for k in d3..=right_sorted.len() {
        let chosen = &right_sorted[..k];
        let lam = balance_shift(left_pos, chosen);
        let left_cost: f64 = left_pos.iter().map(|p| p.min(lam).powi(2)).sum();
        let right_cost: f64 = chosen
            .iter()
            .map(|&r| if r + lam >= 0.0 { lam * lam } else { r * r })
            .sum();
        let b: f64 = chosen.iter().map(|r| (r + lam).max(0.0)).sum();
        let cand = StagedOptimum {
            z: left_cost + right_cost,
            k,
            multiplier: lam,
            b,
        };
        // Ties keep the smallest k.
        if best.is_none_or(|bst| cand.z < bst.z) {
            best = Some(cand);
        }
    }
    best.expect("k range is never empty")
}

fn relu_split(g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let h = g.len() / 2;
    let left: Vec<f64> = g[..h].iter().copied().filter(|&x| x > 0.0).collect();
    let mut right = g[h..].to_vec();
    right.sort_by(|a, b| b.total_cmp(a));
    (left, right)
}

/// Value-only ReLU kernel for Monte Carlo loops.
pub fn relu_z_value(g: &[f64]) -> f64 {
    let h = g.len() / 2;
    let s_left: f64 = g[..h].iter().map(|x| x.max(0.0)).sum();
    let s_right: f64 = g[h..].iter().map(|x| x.max(0.0)).sum();
    if s_left <= s_right {
        return 0.0;
    }
    let (left, right) = relu_split(g);
    relu_staged(&left, &right).z
}

/// General-width ReLU kernel: the exact minimum of `||g - q||^2` subject to
/// `sum_{i <= d/2} max(q_i, 0) <= sum_{i > d/2} max(q_i, 0)`.
pub fn z_relu_general(g: &[f64], _cfg: &NumericsConfig) -> Result<KernelResult> {
    check_even(g.len())?;
    if g.iter().any(|x| !x.is_finite()) {
        return domain("kernel input must be finite");
    }
    if relu_feasible(g, 0.0) {
        return Ok(KernelResult {
            z: 0.0,
            branch: Branch::ReluFeasible,
            q_opt: Some(g.to_vec()),
        });
    }
    let h = g.len() / 2;
    let (left, right) = relu_split(g);
    let opt = relu_staged(&left, &right);
    let lam = opt.multiplier;

    let mut q = g.to_vec();
    for x in q[..h].iter_mut().filter(|x| **x > 0.0) {
        *x = (*x - lam).max(0.0);
    }
    // Raise the k largest right entries (stable order for equal values).
    let mut order: Vec<usize> = (h..g.len()).collect();
    order.sort_by(|&i, &j| g[j].total_cmp(&g[i]));
    for &i in &order[..opt.k] {
        q[i] = (g[i] + lam).max(0.0);
    }
    Ok(KernelResult {
        z: opt.z,
        branch: Branch::ReluStaged {
            k: opt.k,
            b: opt.b,
            multiplier: lam,
        },
        q_opt: Some(q),
    })
}

/// Largest width accepted by [`z_relu_oracle`].
pub const ORACLE_MAX_WIDTH: usize = 8;

/// Exact ReLU kernel by brute force, independent of [`z_relu_general`].
///
/// Within each sign orthant of `q` the activation is linear, so the
/// constraint becomes one halfspace `a^T q <= 0` and the subproblem is a
/// projection onto a polyhedron. Every face of that polyhedron is visited
/// (choice of coordinates pinned at zero, halfspace active or not); the
/// projection onto each face's affine hull is kept when it is feasible. The
/// minimum over feasible face projections equals the projection onto the
/// polyhedron, and the minimum over orthants is the global optimum.
pub fn z_relu_oracle(g: &[f64]) -> Result<KernelResult> {
    let d = g.len();
    check_even(d)?;
    if d > ORACLE_MAX_WIDTH {
        return Err(Error::Unsupported(format!(
            "orthant oracle enumerates ~4^d faces and refuses d={d} > {ORACLE_MAX_WIDTH}"
        )));
    }
    let h = d / 2;
    let tol = 1e-12 * (1.0 + g.iter().map(|x| x.abs()).fold(0.0, f64::max));
    let mut best_z = f64::INFINITY;
    let mut best_q = g.to_vec();
    let mut best_orthant = 0u32;
    let mut q = vec![0.0; d];
    let mut a = vec![0.0; d];

    for orthant in 0u32..(1 << d) {
        let positive = |i: usize| orthant & (1 << i) != 0;
        for (i, ai) in a.iter_mut().enumerate() {
            *ai = match (positive(i), i < h) {
                (true, true) => 1.0,
                (true, false) => -1.0,
                (false, _) => 0.0,
            };
        }
        for pinned in 0u32..(1 << d) {
            for active in [false, true] {
                let free = |i: usize| pinned & (1 << i) == 0;
                let mu = if active {
                    let (mut num, mut den) = (0.0, 0.0);
                    for i in (0..d).filter(|&i| free(i)) {
                        num += a[i] * g[i];
                        den += a[i] * a[i];
                    }
                    if den == 0.0 {
                        continue;
                    }
                    num / den
                } else {
                    0.0
                };
                for i in 0..d {
                    q[i] = if free(i) { g[i] - mu * a[i] } else { 0.0 };
                }
                let sign_ok = (0..d).all(|i| if positive(i) { q[i] >= -tol } else { q[i] <= tol });
                if !sign_ok || dot(&a, &q) > tol {
                    continue;
                }
                let z = sq_dist(g, &q);
                if z < best_z {
                    best_z = z;
                    best_q.copy_from_slice(&q);
                    best_orthant = orthant;
                }
            }
        }
    }
    Ok(KernelResult {
        z: best_z,
        branch: Branch::Oracle {
            orthant: best_orthant,
        },
        q_opt: Some(best_q),
    })
}

/// Kernel value for any activation under its canonical weights (committee
/// weights for even `d`, all-ones for odd linear widths).
pub fn kernel_value(activation: Activation, g: &[f64]) -> Result<f64> {
    match activation {
        Activation::Linear => {
            let s: f64 = g.iter().sum::<f64>() / (g.len() as f64).sqrt();
            let w_sign = if g.len() % 2 == 0 { committee_dot(g) } else { s };
            Ok((-w_sign).max(0.0).powi(2))
        }
        Activation::Quadratic => {
            check_even(g.len())?;
            let (a1, a2) = half_norms(g);
            z_quad_chi(a1, a2)
        }
        Activation::Relu => {
            check_even(g.len())?;
            Ok(relu_z_value(g))
        }
    }
}

fn committee_dot(g: &[f64]) -> f64 {
    let h = g.len() / 2;
    (g[h..].iter().sum::<f64>() - g[..h].iter().sum::<f64>()) / (g.len() as f64).sqrt()
}

/// How to evaluate `E z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    Quadrature,
    MonteCarlo,
}

/// Monte Carlo sampler of `z(g)` for a fresh standard Gaussian `g`.
pub fn z_sampler(activation: Activation, d: usize) -> Result<impl Fn(&mut Stream) -> f64 + Sync> {
    activation.validate_width(d)?;
    Ok(move |rng: &mut Stream| {
        let mut buf = [0.0f64; 64];
        let mut heap;
        let g: &mut [f64] = if d <= buf.len() {
            &mut buf[..d]
        } else {
            heap = vec![0.0; d];
            &mut heap
        };
        fill_gaussian(g, rng);
        kernel_value(activation, g).expect("width validated")
    })
}

/// `E z(g)` for standard Gaussian `g`.
///
/// Quadrature is available for linear (exactly 1/2), quadratic (chi double
/// integral) and two-neuron ReLU (closed-form inner integrals); Monte Carlo
/// works for every valid combination.
pub fn expected_z(
    activation: Activation,
    d: usize,
    estimator: Estimator,
    cfg: &NumericsConfig,
) -> Result<EstimateWithError> {
    activation.validate_width(d)?;
    cfg.validate()?;
    match (activation, estimator) {
        (Activation::Linear, Estimator::Quadrature) => Ok(EstimateWithError::exact(0.5)),
        (Activation::Quadratic, Estimator::Quadrature) => {
            let k = ChiDof::for_width(d)?;
            let m = rdt::quad_second_moment(k, &cfg.quadrature())?;
            Ok(EstimateWithError::new(0.5 * m.value, 0.5 * m.error))
        }
        (Activation::Relu, Estimator::Quadrature) if d == 2 => {
            rdt::relu_d2_expected_z(&cfg.quadrature())
        }
        (Activation::Relu, Estimator::Quadrature) => Err(Error::Unsupported(format!(
            "no quadrature route for relu with d={d}; use monte-carlo"
        ))),
        (_, Estimator::MonteCarlo) => {
            let sampler = z_sampler(activation, d)?;
            let mc = cfg.monte_carlo();
            cfg.install(|| estimate_mean(sampler, &mc))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::{chunk_stream, gaussian_vector};

    fn cfg() -> NumericsConfig {
        NumericsConfig::default()
    }

    #[test]
    fn linear_examples() {
        let w = OutputWeights::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(z_linear(&[1.0, 1.0], &w).unwrap().z, 0.0);
        assert!((z_linear(&[-1.0, -1.0], &w).unwrap().z - 2.0).abs() < 1e-15);
        assert_eq!(z_linear(&[1.0, -1.0], &w).unwrap().z, 0.0);
        assert!(OutputWeights::new(vec![0.0, 0.0]).is_err());
        assert!(z_linear(&[1.0], &w).is_err());
    }

    #[test]
    fn linear_minimizer_is_feasible() {
        let w = OutputWeights::new(vec![0.3, -2.0, 1.0]).unwrap();
        let g = [1.0, 2.0, -0.5];
        let r = z_linear(&g, &w).unwrap();
        let q = r.q_opt.unwrap();
        assert!(dot(&q, w.as_slice()) >= -1e-12);
        assert!((sq_dist(&g, &q) - r.z).abs() < 1e-12);
    }

    #[test]
    fn quad_examples() {
        assert_eq!(z_quad(&[0.6, 1.0]).unwrap().z, 0.0);
        assert!((z_quad(&[1.0, 0.0]).unwrap().z - 0.5).abs() < 1e-15);
        assert!((z_quad(&[3.0, 4.0, 0.0, 0.0]).unwrap().z - 12.5).abs() < 1e-13);
        assert!(z_quad(&[1.0, 2.0, 3.0]).is_err());
        assert_eq!(z_quad_chi(1.0, 2.0).unwrap(), 0.0);
        assert_eq!(z_quad_chi(2.0, 1.0).unwrap(), 0.5);
        assert!(z_quad_chi(-1.0, 0.0).is_err());
    }

    #[test]
    fn quad_chi_consistency_and_minimizer() {
        let mut rng = chunk_stream(77, 0);
        for _ in 0..100 {
            let g = gaussian_vector(4, &mut rng);
            let r = z_quad(&g).unwrap();
            let (a1, a2) = half_norms(&g);
            assert_eq!(r.z, z_quad_chi(a1, a2).unwrap());
            let q = r.q_opt.unwrap();
            let (l, rr) = half_norms(&q);
            assert!(l * l <= rr * rr + 1e-12);
            assert!((sq_dist(&g, &q) - r.z).abs() < 1e-9);
        }
    }

    #[test]
    fn relu_d2_examples() {
        assert_eq!(z_relu_d2(-1.0, 5.0).z, 0.0);
        assert!((z_relu_d2(1.0, -2.0).z - 1.0).abs() < 1e-15);
        assert!((z_relu_d2(1.0, 0.0).z - 0.5).abs() < 1e-15);
        assert_eq!(z_relu_d2(1.0, 0.0).branch, Branch::ReluD2(ReluD2Piece::Balance));
        assert_eq!(z_relu_d2(1.0, -2.0).branch, Branch::ReluD2(ReluD2Piece::SwitchOff));
    }

    #[test]
    fn relu_general_examples() {
        let r = z_relu_general(&[1.0, 0.0], &cfg()).unwrap();
        assert!((r.z - 0.5).abs() < 1e-15);
        assert_eq!(z_relu_general(&[-1.0; 4], &cfg()).unwrap().z, 0.0);
        let g = [1.0, 1.0, -1.0, -1.0];
        let a = z_relu_general(&g, &cfg()).unwrap().z;
        let b = z_relu_oracle(&g).unwrap().z;
        assert!((a - b).abs() <= 1e-8 * b.max(1.0), "{a} vs {b}");
        assert!(z_relu_general(&[1.0, 2.0, 3.0], &cfg()).is_err());
    }

    #[test]
    fn relu_general_reports_stage() {
        match z_relu_general(&[2.0, -0.1, 0.5, -3.0], &cfg()).unwrap().branch {
            Branch::ReluStaged { k, b, multiplier } => {
                assert!(k >= 1);
                assert!(b >= 0.0 && multiplier >= 0.0);
            }
            other => panic!("unexpected branch {other:?}"),
        }
    }

    #[test]
    fn oracle_examples() {
        assert!((z_relu_oracle(&[1.0, -2.0]).unwrap().z - 1.0).abs() < 1e-12);
        assert_eq!(z_relu_oracle(&[-0.3, -1.0, -2.0, -0.1]).unwrap().z, 0.0);
        assert!(matches!(
            z_relu_oracle(&[0.0; 10]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn oracle_matches_d2_closed_form() {
        let mut rng = chunk_stream(2024, 0);
        for _ in 0..1000 {
            let g = gaussian_vector(2, &mut rng);
            let a = z_relu_oracle(&g).unwrap().z;
            let b = z_relu_d2(g[0], g[1]).z;
            assert!((a - b).abs() <= 1e-10, "g={g:?}: {a} vs {b}");
        }
    }

    #[test]
    fn minimizers_satisfy_constraint() {
        let mut rng = chunk_stream(5, 1);
        for d in [2, 4, 6] {
            for _ in 0..200 {
                let g = gaussian_vector(d, &mut rng);
                for r in [z_relu_general(&g, &cfg()).unwrap(), z_relu_oracle(&g).unwrap()] {
                    let q = r.q_opt.unwrap();
                    assert!(relu_feasible(&q, 1e-9), "g={g:?} q={q:?}");
                    assert!((sq_dist(&g, &q) - r.z).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn kernel_value_matches_full_kernels() {
        let mut rng = chunk_stream(6, 0);
        for _ in 0..50 {
            let g = gaussian_vector(4, &mut rng);
            let w = OutputWeights::committee(4).unwrap();
            assert!(
                (kernel_value(Activation::Linear, &g).unwrap() - z_linear(&g, &w).unwrap().z).abs()
                    < 1e-12
            );
            assert_eq!(
                kernel_value(Activation::Quadratic, &g).unwrap(),
                z_quad(&g).unwrap().z
            );
            assert_eq!(
                kernel_value(Activation::Relu, &g).unwrap(),
                z_relu_general(&g, &cfg()).unwrap().z
            );
        }
        let g = [0.4, -1.2, 0.3];
        let w = OutputWeights::new(vec![1.0; 3]).unwrap();
        assert!(
            (kernel_value(Activation::Linear, &g).unwrap() - z_linear(&g, &w).unwrap().z).abs()
                < 1e-12
        );
    }

    #[test]
    fn expected_z_routes() {
        let c = NumericsConfig {
            mc_samples: 200_000,
            ..cfg()
        };
        let lin = expected_z(Activation::Linear, 3, Estimator::Quadrature, &c).unwrap();
        assert_eq!((lin.value, lin.error), (0.5, 0.0));
        let q = expected_z(Activation::Quadratic, 4, Estimator::Quadrature, &c).unwrap();
        assert!((q.value - (1.0 - std::f64::consts::FRAC_PI_4)).abs() < 1e-9, "{q:?}");
        assert!(matches!(
            expected_z(Activation::Relu, 4, Estimator::Quadrature, &c),
            Err(Error::Unsupported(_))
        ));
        assert!(expected_z(Activation::Relu, 3, Estimator::MonteCarlo, &c).is_err());
        let lin_mc = expected_z(Activation::Linear, 5, Estimator::MonteCarlo, &c).unwrap();
        assert!(lin_mc.contains(0.5, 4.0));
    }
}
