use crate::error::{Error, Result};
use crate::montecarlo::MCConfig;
use crate::quadrature::QuadratureConfig;

/// Numerical knobs shared by every bound computation.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericsConfig {
    /// Relative tolerance of the adaptive quadrature.
    pub quad_rel_tol: f64,
    /// Monte Carlo sample count.
    pub mc_samples: u64,
    pub seed: u64,
    /// Largest `|phi_bar|` accepted at a capacity root.
    pub root_tol: f64,
    /// Argument tolerance of the 1D optimizers.
    pub optimizer_tol: f64,
    /// Samples per Monte Carlo chunk (one random stream per chunk).
    pub chunk_size: u64,
    /// Worker cap. `None` uses the `TCMCAP_THREADS` environment variable or
    /// the rayon default. Results never depend on it.
    pub threads: Option<usize>,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            quad_rel_tol: 1e-8,
            mc_samples: 10_000_000,
            seed: 42,
            root_tol: 1e-3,
            optimizer_tol: 1e-6,
            chunk_size: 1 << 16,
            threads: None,
        }
    }
}

impl NumericsConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("quad_rel_tol", self.quad_rel_tol),
            ("root_tol", self.root_tol),
            ("optimizer_tol", self.optimizer_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.mc_samples == 0 {
            return Err(Error::Domain("mc_samples must be >= 1".into()));
        }
        if self.chunk_size == 0 {
            return Err(Error::Domain("chunk_size must be >= 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Domain("threads must be >= 1".into()));
        }
        Ok(())
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: self.quad_rel_tol,
            ..QuadratureConfig::default()
        }
    }

    pub fn monte_carlo(&self) -> MCConfig {
        MCConfig {
            samples: self.mc_samples,
            seed: self.seed,
            chunk_size: self.chunk_size,
        }
    }

    /// Effective worker count: explicit setting, then `TCMCAP_THREADS`.
    pub fn worker_count(&self) -> Option<usize> {
        self.threads.or_else(|| {
            std::env::var("TCMCAP_THREADS")
                .ok()
                .and_then(|v| v.trim().parse::<usize>().ok())
                .filter(|&n| n > 0)
        })
    }

    /// Runs `op` inside a rayon pool sized by [`Self::worker_count`].
    pub fn install<T: Send>(&self, op: impl FnOnce() -> T + Send) -> T {
        match self.worker_count() {
            Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(op),
                Err(_) => op(),
            },
            None => op(),
        }
    }
}
