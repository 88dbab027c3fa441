//! Memory-capacity upper bounds for one-hidden-layer treelike committee
//! machines (TCMs) with linear, quadratic and ReLU hidden activations.
//!
//! Two bounding routes are provided:
//!
//! * plain random duality ([`rdt`]): the bound is `1 / E z(g)`, where `z` is
//!   the squared distance from a standard Gaussian vector to the
//!   activation-feasible cone ([`kernels`]);
//! * partially lifted random duality ([`plrdt`]): the bound is the zero
//!   crossing in `alpha` of a `max_{c3} min_{gamma}` saddle objective built
//!   from the exponential moment `E exp(-c3 z / (4 gamma))`.
//!
//! Expectations are computed with deterministic adaptive quadrature
//! ([`quadrature`]) where a low-dimensional representation exists and with a
//! reproducible parallel Monte Carlo engine ([`montecarlo`]) otherwise.

pub mod activation;
pub mod cli;
pub mod config;
pub mod distributions;
pub mod error;
pub mod kernels;
pub mod montecarlo;
pub mod optimize;
pub mod plrdt;
pub mod quadrature;
pub mod rdt;
pub mod reference;
pub mod selfcheck;

pub use activation::{Activation, Method};
pub use config::NumericsConfig;
pub use error::{Error, Result};
pub use quadrature::{EstimateWithError, QuadratureConfig};
pub use rdt::CapacityBound;
