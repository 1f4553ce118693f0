//! Outage analysis and beamwidth optimization for positioning-assisted
//! beamforming links.
//!
//! A transmitter at the origin steers its main lobe toward an *estimated*
//! receiver position drawn from an anisotropic bivariate Gaussian around the
//! true position `(0, d)`. This crate classifies the outage regime of such a
//! link, evaluates closed-form upper and lower bounds on the outage
//! probability, and chooses the half-power beamwidth that minimizes outage
//! under a transmit-power budget. Two independent estimators of the exact
//! outage probability (conditional quadrature and seeded Monte Carlo) are
//! included so the closed forms can be checked against ground truth.
//!
//! The crate is `no_std` (with `alloc`) unless the `std` feature is enabled.
//! The `parallel` feature evaluates Monte Carlo blocks and optimizer grids
//! on a rayon pool without changing any result bit.
//!
//! ```
//! use beamout_core::{channel::{AntennaConfig, LinkConfig}, gauss2d::PositioningErrorModel, outage};
//!
//! let ant = AntennaConfig::new(0.1, 1e-4, 100.0).unwrap();
//! let link = LinkConfig::new(30.0, 0.05, 1e-7).unwrap();
//! let cov = PositioningErrorModel::new(1.0, 0.5, 0.0).unwrap().covariance();
//!
//! let est = outage::estimate(&ant, &link, &cov);
//! assert!(est.lower <= est.upper);
//! ```

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod channel;
pub mod error;
pub mod gauss2d;
pub mod optimizer;
pub mod oracle;
pub mod outage;
pub mod quad;

pub use error::{Error, Result};
pub use gauss2d::{Covariance2x2, HalfPlane, Point, PositioningErrorModel};
