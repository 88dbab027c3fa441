//! Property suites run by the `selfcheck` command.
//!
//! Each property either passes or reports the offending inputs. The ReLU
//! kernel under test can be swapped out, which is how fault injection is
//! exercised.

use crate::activation::Activation;
use crate::config::NumericsConfig;
use crate::distributions::std_normal_pdf;
use crate::error::Result;
use crate::kernels::{kernel_value, z_relu_d2, z_relu_general, z_relu_oracle, Estimator};
use crate::montecarlo::{chunk_stream, gaussian_vector};
use crate::plrdt::{i_q, inner_min, phi_bar_with, plrdt_capacity, IqModel};
use crate::quadrature::integrate_1d_with_breaks;
use crate::rdt::{quad_capacity_closed_form, rdt_capacity, relu_i1_i2};

/// ReLU kernel under test.
pub type ReluKernel = dyn Fn(&[f64]) -> Result<f64> + Sync;

/// Monte Carlo budget of the `--quick` suite.
pub const QUICK_SAMPLES: u64 = 100_000;
/// Monte Carlo budget of the default suite.
pub const FULL_SAMPLES: u64 = 2_000_000;

pub struct SelfCheck<'a> {
    pub cfg: NumericsConfig,
    pub quick: bool,
    pub relu_kernel: Option<&'a ReluKernel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub results: Vec<PropertyResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyResult> {
        self.results.iter().filter(|r| !r.passed)
    }
}

type Outcome = std::result::Result<String, String>;

fn fail<T>(msg: impl Into<String>) -> std::result::Result<T, String> {
    Err(msg.into())
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

impl<'a> SelfCheck<'a> {
    pub fn new(cfg: NumericsConfig, quick: bool) -> Self {
        SelfCheck {
            cfg,
            quick,
            relu_kernel: None,
        }
    }

    pub fn with_relu_kernel(mut self, kernel: &'a ReluKernel) -> Self {
        self.relu_kernel = Some(kernel);
        self
    }

    fn relu(&self, g: &[f64]) -> Result<f64> {
        match self.relu_kernel {
            Some(k) => k(g),
            None => z_relu_general(g, &self.cfg).map(|r| r.z),
        }
    }

    fn kernel(&self, a: Activation, g: &[f64]) -> Result<f64> {
        match a {
            Activation::Relu => self.relu(g),
            _ => kernel_value(a, g),
        }
    }

    pub fn run(&self) -> Report {
        let props: Vec<(&'static str, fn(&Self) -> Outcome)> = vec![
            ("oracle-equivalence", Self::oracle_equivalence),
            ("kernel-invariants", Self::kernel_invariants),
            ("relu-inner-integrals", Self::relu_inner_integrals),
            ("quad-quadrature-vs-closed-form", Self::quad_vs_closed_form),
            ("quad-monotone-limit", Self::quad_monotone_limit),
            ("relu-mc-vs-quadrature", Self::relu_mc_vs_quadrature),
            ("relu-shape", Self::relu_shape),
            ("linear-exactness", Self::linear_exactness),
            ("linear-iq-identity", Self::linear_iq_identity),
            ("plrdt-c3-limit", Self::c3_limit),
            ("phi-bar-monotone", Self::phi_bar_monotone),
            ("plrdt-tightening", Self::tightening),
            ("quad-plrdt-monotone", Self::quad_plrdt_monotone),
        ];
        let results = props
            .into_iter()
            .map(|(name, check)| {
                let (passed, detail) = match check(self) {
                    Ok(d) => (true, d),
                    Err(d) => (false, d),
                };
                PropertyResult { name, passed, detail }
            })
            .collect();
        Report { results }
    }

    fn draws(&self) -> usize {
        if self.quick {
            200
        } else {
            1000
        }
    }

    fn oracle_equivalence(&self) -> Outcome {
        let n = self.draws();
        for d in [2usize, 4, 6] {
            let mut rng = chunk_stream(self.cfg.seed, d as u64);
            for i in 0..n {
                let g = gaussian_vector(d, &mut rng);
                let got = lift(self.relu(&g))?;
                let want = lift(z_relu_oracle(&g))?.z;
                if (got - want).abs() > 1e-8 * want.abs() + 1e-14 {
                    return fail(format!("d={d} draw {i} g={g:?}: kernel {got} vs oracle {want}"));
                }
                if d == 2 {
                    let closed = z_relu_d2(g[0], g[1]).z;
                    if (got - closed).abs() > 1e-10 * closed.abs().max(1.0) {
                        return fail(format!("d=2 draw {i} g={g:?}: kernel {got} vs closed form {closed}"));
                    }
                }
            }
        }
        Ok(format!("{n} draws each for d = 2, 4, 6"))
    }

    fn kernel_invariants(&self) -> Outcome {
        let n = self.draws();
        for (a, d) in [(Activation::Linear, 3), (Activation::Quadratic, 4), (Activation::Relu, 6)] {
            let mut rng = chunk_stream(self.cfg.seed ^ 0x5eed, d as u64);
            for i in 0..n {
                let g = gaussian_vector(d, &mut rng);
                let z = lift(self.kernel(a, &g))?;
                let norm2: f64 = g.iter().map(|x| x * x).sum();
                if !(z >= 0.0 && z <= norm2 * (1.0 + 1e-12)) {
                    return fail(format!("{a} d={d} draw {i} g={g:?}: z={z} outside [0, |g|^2={norm2}]"));
                }
                let scaled: Vec<f64> = g.iter().map(|x| 2.0 * x).collect();
                let z2 = lift(self.kernel(a, &scaled))?;
                if (z2 - 4.0 * z).abs() > 1e-10 * z2.abs().max(1e-12) {
                    return fail(format!("{a} d={d} draw {i} g={g:?}: z(2g)={z2} but 4 z(g)={}", 4.0 * z));
                }
            }
        }
        Ok("0 <= z <= |g|^2 and z(2g) = 4 z(g)".into())
    }

    fn relu_inner_integrals(&self) -> Outcome {
        let c = 1.0 - std::f64::consts::SQRT_2;
        let qcfg = self.cfg.quadrature();
        for g1 in [0.5, 1.0, 3.0] {
            let (i1, i2) = lift(relu_i1_i2(g1))?;
            let q1 = lift(integrate_1d_with_breaks(
                |g2| g1 * g1 * std_normal_pdf(g2),
                f64::NEG_INFINITY,
                c * g1,
                &[],
                &qcfg,
            ))?;
            let q2 = lift(integrate_1d_with_breaks(
                |g2| 0.5 * (g1 - g2).powi(2) * std_normal_pdf(g2),
                c * g1,
                g1,
                &[],
                &qcfg,
            ))?;
            if (i1 - q1.value).abs() > 1e-8 || (i2 - q2.value).abs() > 1e-8 {
                return fail(format!(
                    "g1={g1}: closed form ({i1}, {i2}) vs quadrature ({}, {})",
                    q1.value, q2.value
                ));
            }
        }
        Ok("closed forms match inner quadrature at g1 = 0.5, 1, 3".into())
    }

    fn quad_vs_closed_form(&self) -> Outcome {
        for d in [2usize, 4, 8, 16, 32] {
            let q = lift(rdt_capacity(Activation::Quadratic, d, &self.cfg))?.alpha;
            let c = lift(quad_capacity_closed_form(d))?;
            if (q - c).abs() > 1e-4 {
                return fail(format!("d={d}: quadrature {q} vs closed form {c}"));
            }
        }
        Ok("d = 2..32 within 1e-4".into())
    }

    fn quad_monotone_limit(&self) -> Outcome {
        let ds = [2usize, 4, 8, 16, 32, 64, 128];
        let vals: Vec<f64> = ds
            .iter()
            .map(|&d| quad_capacity_closed_form(d))
            .collect::<Result<_>>()
            .map_err(|e| e.to_string())?;
        for w in 0..ds.len() - 1 {
            if !(vals[w] > vals[w + 1]) {
                return fail(format!("not decreasing: d={} {} vs d={} {}", ds[w], vals[w], ds[w + 1], vals[w + 1]));
            }
        }
        let last = vals[ds.len() - 1];
        if !(last > 4.0 && last < 4.05) {
            return fail(format!("d=128 bound {last} outside (4, 4.05)"));
        }
        Ok(format!("decreasing to {last:.5} at d=128"))
    }

    fn relu_mc_vs_quadrature(&self) -> Outcome {
        let quad = lift(crate::kernels::expected_z(Activation::Relu, 2, Estimator::Quadrature, &self.cfg))?;
        let mc = lift(crate::kernels::expected_z(Activation::Relu, 2, Estimator::MonteCarlo, &self.cfg))?;
        let se = (quad.error.powi(2) + mc.error.powi(2)).sqrt();
        if (quad.value - mc.value).abs() > 3.0 * se {
            return fail(format!("E z quadrature {} vs Monte Carlo {} ± {}", quad.value, mc.value, mc.error));
        }
        Ok(format!("E z = {:.6} vs {:.6} ± {:.1e}", quad.value, mc.value, mc.error))
    }

    fn relu_shape(&self) -> Outcome {
        let mut prev: Option<(usize, f64, f64)> = None;
        let mut first = None;
        for d in [2usize, 4, 8] {
            let b = lift(rdt_capacity(Activation::Relu, d, &self.cfg))?;
            if b.alpha < 2.9 - 3.0 * b.error {
                return fail(format!("d={d}: bound {} ± {} below 2.9", b.alpha, b.error));
            }
            if let Some((pd, pa, pe)) = prev {
                if !(b.alpha < pa + 3.0 * (pe * pe + b.error * b.error).sqrt()) {
                    return fail(format!("d={pd} -> {d}: {pa} then {}", b.alpha));
                }
            }
            first.get_or_insert(b.alpha);
            prev = Some((d, b.alpha, b.error));
        }
        Ok(format!("decreasing from {:.4}, above 2.9", first.unwrap_or(0.0)))
    }

    fn linear_exactness(&self) -> Outcome {
        for d in [1usize, 2, 4, 8] {
            let r = lift(rdt_capacity(Activation::Linear, d, &self.cfg))?;
            if r.alpha != 2.0 || r.error != 0.0 {
                return fail(format!("d={d}: rdt {} ± {}", r.alpha, r.error));
            }
            let p = lift(plrdt_capacity(Activation::Linear, d, &self.cfg))?;
            if (p.alpha - 2.0).abs() > 0.01 {
                return fail(format!("d={d}: plrdt {}", p.alpha));
            }
        }
        Ok("rdt = 2 exactly, plrdt within 0.01".into())
    }

    fn linear_iq_identity(&self) -> Outcome {
        let v = lift(i_q(Activation::Linear, 2, 4.0, 1.0, &self.cfg))?.value;
        let want = 0.5 + 0.5 / 3f64.sqrt();
        if (v - want).abs() > 1e-12 {
            return fail(format!("I_Q(t=1) = {v}, expected {want}"));
        }
        Ok(format!("I_Q(t=1) = {v:.6}"))
    }

    fn c3_limit(&self) -> Outcome {
        for (a, d) in [(Activation::Linear, 1), (Activation::Quadratic, 2), (Activation::Relu, 2)] {
            let model = lift(IqModel::prepare(a, d, &self.cfg))?;
            let ez = model.expected_z().value;
            for alpha in [2.0, 4.0] {
                let (_, v) = lift(inner_min(&model, alpha, 1e-3, &self.cfg))?;
                let want = (alpha * ez).sqrt() - 1.0;
                if (v - want).abs() > 1e-2 {
                    return fail(format!("{a} d={d} alpha={alpha}: objective {v} vs limit {want}"));
                }
            }
        }
        Ok("min over gamma at c3 = 1e-3 matches sqrt(alpha E z) - 1".into())
    }

    fn phi_bar_monotone(&self) -> Outcome {
        let model = lift(IqModel::prepare(Activation::Quadratic, 2, &self.cfg))?;
        let mut prev = f64::NEG_INFINITY;
        for alpha in [3.0, 3.5, 4.0, 4.5, 5.0] {
            let v = lift(phi_bar_with(&model, alpha, &self.cfg))?.phi_bar;
            if v < prev - 1e-9 {
                return fail(format!("quad d=2: phi_bar({alpha}) = {v} < previous {prev}"));
            }
            prev = v;
        }
        Ok("quad d=2 on alpha = 3..5".into())
    }

    fn tightening(&self) -> Outcome {
        let mut cases = vec![
            (Activation::Linear, 2),
            (Activation::Quadratic, 2),
            (Activation::Quadratic, 4),
            (Activation::Relu, 2),
        ];
        if !self.quick {
            cases.push((Activation::Relu, 4));
        }
        for (a, d) in cases {
            let r = lift(rdt_capacity(a, d, &self.cfg))?;
            let p = lift(plrdt_capacity(a, d, &self.cfg))?;
            if p.alpha > r.alpha + 1e-6 + 3.0 * (r.error + p.error) {
                return fail(format!("{a} d={d}: plrdt {} > rdt {}", p.alpha, r.alpha));
            }
        }
        Ok("plrdt <= rdt".into())
    }

    fn quad_plrdt_monotone(&self) -> Outcome {
        let vals: Vec<f64> = [2usize, 4, 8]
            .iter()
            .map(|&d| plrdt_capacity(Activation::Quadratic, d, &self.cfg).map(|b| b.alpha))
            .collect::<Result<_>>()
            .map_err(|e| e.to_string())?;
        if !(vals[0] > vals[1] && vals[1] > vals[2]) {
            return fail(format!("quad plrdt d=2,4,8: {vals:?}"));
        }
        Ok(format!("{:.4} > {:.4} > {:.4}", vals[0], vals[1], vals[2]))
    }
}

/// Default configuration of the suite.
pub fn config(quick: bool, seed: u64) -> NumericsConfig {
    NumericsConfig {
        mc_samples: if quick { QUICK_SAMPLES } else { FULL_SAMPLES },
        seed,
        ..NumericsConfig::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn injected_fault_is_caught() {
        let faulty = |g: &[f64]| z_relu_general(g, &NumericsConfig::default()).map(|r| r.z + 0.1);
        let check = SelfCheck::new(config(true, 42), true).with_relu_kernel(&faulty);
        let r = check.oracle_equivalence();
        assert!(r.is_err());
        assert!(check.kernel_invariants().is_err());
        assert!(SelfCheck::new(config(true, 42), true).oracle_equivalence().is_ok());
    }
}
