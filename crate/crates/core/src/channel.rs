//! Deterministic link model: radiation pattern, Friis pathloss, received
//! power, pointing-error angle and the transmit-power budget.
//!
//! Powers are in watts and angles in radians throughout.

use core::f64::consts::{LN_10, PI};

use crate::error::{require_positive, Error, Result};
use crate::gauss2d::Point;

/// Exponent constant of the main-lobe pattern `10^(−1.2·θ²/θ_3dB²)`.
pub const PATTERN_DECAY: f64 = 1.2;

/// Largest `θ_3dB` for which the small-beamwidth budget approximation
/// `P_t ≈ P_max·θ_3dB·√π/√(1.2 ln 10)` is used. Its relative error there is
/// below 1e-10 (in fact `erf` saturates to 1 in double precision).
pub const SMALL_BEAM_LIMIT: f64 = 0.3;

/// Main-lobe width and side-lobe floor of the transmit antenna.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaConfig {
    /// Half of the 3-dB beamwidth (radians).
    pub theta_3db: f64,
    /// Side-lobe floor, `0 < a_m < 1`.
    pub a_m: f64,
    /// Boresight gain-power product (watts).
    pub p_max: f64,
}

impl AntennaConfig {
    pub fn new(theta_3db: f64, a_m: f64, p_max: f64) -> Result<Self> {
        require_positive("theta_3db", theta_3db)?;
        require_positive("p_max", p_max)?;
        if !(a_m > 0.0 && a_m < 1.0) {
            return Err(Error::InvalidParameter {
                name: "a_m",
                reason: "must lie in (0, 1)",
            });
        }
        Ok(Self {
            theta_3db,
            a_m,
            p_max,
        })
    }
}

/// Link distance, carrier wavelength and outage threshold.
///
/// The true receiver sits at `(0, d)`; the transmitter at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    pub d: f64,
    pub lambda: f64,
    /// Received-power threshold (watts).
    pub gamma_th: f64,
}

impl LinkConfig {
    pub fn new(d: f64, lambda: f64, gamma_th: f64) -> Result<Self> {
        require_positive("d", d)?;
        require_positive("lambda", lambda)?;
        require_positive("gamma_th", gamma_th)?;
        Ok(Self {
            d,
            lambda,
            gamma_th,
        })
    }

    pub fn receiver(&self) -> Point {
        Point::new(0.0, self.d)
    }

    pub fn with_distance(&self, d: f64) -> Result<Self> {
        Self::new(d, self.lambda, self.gamma_th)
    }
}

/// `max{10^(−1.2·θ²/θ_3dB²), a_m}`.
pub fn pattern_gain(theta: f64, ant: &AntennaConfig) -> f64 {
    main_lobe_gain(theta, ant.theta_3db).max(ant.a_m)
}

/// The main-lobe term alone, without the side-lobe floor.
pub fn main_lobe_gain(theta: f64, theta_3db: f64) -> f64 {
    let u = theta / theta_3db;
    libm::exp(-PATTERN_DECAY * LN_10 * u * u)
}

/// Free-space gain `λ²/(4πd)²`.
pub fn friis_gain(link: &LinkConfig) -> f64 {
    let r = 4.0 * PI * link.d;
    link.lambda * link.lambda / (r * r)
}

/// `P_max·G_θ·G_d`.
pub fn received_power(theta: f64, ant: &AntennaConfig, link: &LinkConfig) -> f64 {
    ant.p_max * pattern_gain(theta, ant) * friis_gain(link)
}

/// Signed deviation of the direction to `p_hat` from the true receiver
/// direction (the +y axis), in `(−π, π]`.
///
/// This is `atan2(x̂, ŷ)`: positive toward +x, zero when `p_hat` lies on
/// the positive y axis, `π` directly behind the transmitter.
pub fn pointing_angle(p_hat: Point) -> Result<f64> {
    if p_hat.x == 0.0 && p_hat.y == 0.0 {
        return Err(Error::UndefinedDirection);
    }
    Ok(deviation_from_boresight(p_hat))
}

#[inline]
pub(crate) fn deviation_from_boresight(p: Point) -> f64 {
    libm::atan2(p.x, p.y)
}

fn pattern_rate(theta_3db: f64) -> f64 {
    libm::sqrt(PATTERN_DECAY * LN_10) / theta_3db
}

/// Total radiated power `∫_{−π}^{π} P_max·10^(−1.2θ²/θ_3dB²) dθ`, side
/// lobes neglected:
/// `P_max·√π·erf(π·β)/β` with `β = √(1.2 ln 10)/θ_3dB`.
pub fn transmit_power_exact(ant: &AntennaConfig) -> f64 {
    ant.p_max * transmit_power_per_watt(ant.theta_3db)
}

/// `transmit_power_exact` for `P_max = 1`.
pub fn transmit_power_per_watt(theta_3db: f64) -> f64 {
    let beta = pattern_rate(theta_3db);
    libm::sqrt(PI) * libm::erf(PI * beta) / beta
}

/// Small-beamwidth approximation `P_t ≈ P_max·θ_3dB·√π/√(1.2 ln 10)`.
pub fn transmit_power_small_beam(ant: &AntennaConfig) -> f64 {
    ant.p_max * libm::sqrt(PI) / pattern_rate(ant.theta_3db)
}

/// Boresight power for a budget `p_t`, small-beamwidth approximation:
/// `P_max ≈ P_t·√(1.2 ln 10)/(θ_3dB·√π)`.
pub fn pmax_from_budget(p_t: f64, theta_3db: f64) -> f64 {
    p_t * pattern_rate(theta_3db) / libm::sqrt(PI)
}

/// Boresight power that radiates exactly `p_t` in total. `P_t` is linear in
/// `P_max`, so this is a single division by the per-watt integral.
pub fn pmax_from_budget_exact(p_t: f64, theta_3db: f64) -> f64 {
    p_t / transmit_power_per_watt(theta_3db)
}

/// The budget inversion used by the optimizer and the CLI: the
/// approximation inside [`SMALL_BEAM_LIMIT`], the exact inversion past it.
pub fn pmax_for_budget(p_t: f64, theta_3db: f64) -> f64 {
    if theta_3db <= SMALL_BEAM_LIMIT {
        pmax_from_budget(p_t, theta_3db)
    } else {
        pmax_from_budget_exact(p_t, theta_3db)
    }
}
