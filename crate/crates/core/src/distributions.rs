//! Special functions and the chi distribution.
//!
//! The chi density with `k` degrees of freedom is
//! `f(a) = 2^{1-k/2} / Gamma(k/2) * a^{k-1} * exp(-a^2/2)` on `a >= 0`.
//! A TCM of hidden width `d` uses `k = d/2`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Result};

pub use statrs::function::erf::{erf, erfc};
use statrs::function::gamma::ln_gamma;

pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Degrees of freedom of a chi distribution.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ChiDof(f64);

impl ChiDof {
    pub fn new(dof: f64) -> Result<Self> {
        if dof > 0.0 && dof.is_finite() {
            Ok(ChiDof(dof))
        } else {
            domain(format!("chi degrees of freedom must be positive, got {dof}"))
        }
    }

    /// Degrees of freedom attached to each half of a width-`d` TCM.
    pub fn for_width(d: usize) -> Result<Self> {
        if d < 2 || d % 2 != 0 {
            return domain(format!("hidden width must be even and >= 2, got {d}"));
        }
        Ok(ChiDof((d / 2) as f64))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Natural log of the chi density. `-inf` where the density vanishes.
pub fn chi_ln_pdf(a: f64, k: ChiDof) -> Result<f64> {
    if !(a >= 0.0) {
        return domain(format!("chi density needs a >= 0, got {a}"));
    }
    let k = k.0;
    if a == 0.0 {
        return Ok(if k < 1.0 {
            f64::INFINITY
        } else if k == 1.0 {
            (2.0 / std::f64::consts::PI).sqrt().ln()
        } else {
            f64::NEG_INFINITY
        });
    }
    Ok((1.0 - 0.5 * k) * std::f64::consts::LN_2 - ln_gamma(0.5 * k) + (k - 1.0) * a.ln()
        - 0.5 * a * a)
}

/// Chi density with `k` degrees of freedom, evaluated in log space.
pub fn chi_pdf(a: f64, k: ChiDof) -> Result<f64> {
    chi_ln_pdf(a, k).map(f64::exp)
}

/// Chi density with its normalizing constant precomputed, for integrands
/// evaluated many times.
#[derive(Debug, Clone, Copy)]
pub struct ChiDensity {
    k: f64,
    log_norm: f64,
}

impl ChiDensity {
    pub fn new(k: ChiDof) -> Self {
        let k = k.0;
        ChiDensity {
            k,
            log_norm: (1.0 - 0.5 * k) * std::f64::consts::LN_2 - ln_gamma(0.5 * k),
        }
    }

    /// Density at `a`; zero for negative `a`.
    pub fn pdf(&self, a: f64) -> f64 {
        if a < 0.0 {
            0.0
        } else if a == 0.0 {
            chi_pdf(0.0, ChiDof(self.k)).unwrap_or(0.0)
        } else {
            (self.log_norm + (self.k - 1.0) * a.ln() - 0.5 * a * a).exp()
        }
    }
}

/// `E[a]` for `a ~ chi(k)`: `sqrt(2) Gamma((k+1)/2) / Gamma(k/2)`.
pub fn chi_mean(k: ChiDof) -> f64 {
    let k = k.0;
    std::f64::consts::SQRT_2 * (ln_gamma(0.5 * (k + 1.0)) - ln_gamma(0.5 * k)).exp()
}

/// Draws one chi variate as the norm of `k` standard normals.
pub fn chi_sample<R: Rng + ?Sized>(k: ChiDof, rng: &mut R) -> Result<f64> {
    let k = k.0;
    if k.fract() != 0.0 {
        return domain(format!("chi sampling needs integer degrees of freedom, got {k}"));
    }
    let n = k as usize;
    let s: f64 = (0..n)
        .map(|_| {
            let x: f64 = rng.sample(StandardNormal);
            x * x
        })
        .sum();
    Ok(s.sqrt())
}

pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF, `erfc(-x/sqrt 2)/2` so the lower tail keeps full
/// relative precision.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn k(v: f64) -> ChiDof {
        ChiDof::new(v).unwrap()
    }

    #[test]
    fn chi_pdf_values() {
        let expected = (2.0 / PI).sqrt() * (-0.5f64).exp();
        assert!((chi_pdf(1.0, k(1.0)).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 0.48394).abs() < 1e-5);
        assert_eq!(chi_pdf(0.0, k(2.0)).unwrap(), 0.0);
        assert!((chi_pdf(0.0, k(1.0)).unwrap() - (2.0 / PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn chi_pdf_domain() {
        assert!(chi_pdf(-1.0, k(2.0)).is_err());
        assert!(ChiDof::new(0.0).is_err());
        assert!(ChiDof::new(-3.0).is_err());
        assert!(ChiDof::for_width(3).is_err());
        assert_eq!(ChiDof::for_width(8).unwrap().get(), 4.0);
    }

    #[test]
    fn chi_pdf_large_dof_is_finite() {
        // Gamma(100) overflows nothing in log space.
        let v = chi_pdf(14.0, k(200.0)).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn density_matches_pdf() {
        for dof in [1.0, 2.0, 3.5, 64.0] {
            let dens = ChiDensity::new(k(dof));
            for a in [0.0, 0.3, 1.0, 2.5, 8.0] {
                let want = chi_pdf(a, k(dof)).unwrap();
                assert!((dens.pdf(a) - want).abs() <= 1e-14 * want.max(1e-300));
            }
        }
    }

    #[test]
    fn chi_mean_values() {
        assert!((chi_mean(k(1.0)) - (2.0 / PI).sqrt()).abs() < 1e-14);
        assert!((chi_mean(k(2.0)) - (PI / 2.0).sqrt()).abs() < 1e-14);
        let m = chi_mean(k(200.0));
        assert!(m > 199.5f64.sqrt() && m < 200f64.sqrt());
        for dof in [0.5, 1.0, 2.0, 3.0, 16.0, 64.0] {
            let m = chi_mean(k(dof));
            assert!(m * m < dof, "Jensen fails at k={dof}");
        }
    }

    #[test]
    fn erf_identities() {
        assert_eq!(erf(0.0), 0.0);
        assert_eq!(erfc(0.0), 1.0);
        assert!((std_normal_pdf(0.0) - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-16);
        let mut x = -6.0;
        while x <= 6.0 {
            assert!((erf(x) + erf(-x)).abs() <= 1e-14);
            assert!((erf(x) + erfc(x) - 1.0).abs() <= 1e-14);
            x += 0.01;
        }
    }

    #[test]
    fn normal_cdf_tail() {
        assert!((std_normal_cdf(0.0) - 0.5).abs() < 1e-16);
        // Phi(-10) ~ 7.6199e-24
        let v = std_normal_cdf(-10.0);
        assert!((v / 7.619_853_024_160_527e-24 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn chi_sampling_moments() {
        let n = 1_000_000;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let a = chi_sample(k(1.0), &mut rng).unwrap();
            s1 += a * a;
            s2 += a.powi(4);
        }
        let mean = s1 / n as f64;
        let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "mean a^2 = {mean}, se {se}");

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let a = chi_sample(k(2.0), &mut rng).unwrap();
            s1 += a;
            s2 += a * a;
        }
        let mean = s1 / n as f64;
        let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - chi_mean(k(2.0))).abs() < 3.0 * se);
    }

    #[test]
    fn chi_sampling_deterministic_and_integer_only() {
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            (0..16).map(|_| chi_sample(k(3.0), &mut rng).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(draw(), draw());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(chi_sample(k(1.5), &mut rng).is_err());
    }
}
