//! Beamwidth optimization under a fixed transmit-power budget.
//!
//! With `P_max ≈ P_t·√(1.2 ln 10)/(θ_3dB·√π)` the k-factor becomes a
//! function of `θ_3dB` alone, maximized by
//!
//! `θ* = C·e^(−1/2)`, `C = λ²·P_t·√(1.2 ln 10) / (√π·(4πd)²·γ_th)`,
//!
//! where `C` is the widest beam that still leaves `k > 0`. Because the
//! outage region shrinks monotonically as `k` grows, `θ*` also minimizes
//! the exact outage probability for every covariance.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, LN_10, PI};

use crate::channel::{
    friis_gain, pmax_for_budget, AntennaConfig, LinkConfig, PATTERN_DECAY, SMALL_BEAM_LIMIT,
};
use crate::error::{require_positive, Error, Result};
use crate::gauss2d::Covariance2x2;
use crate::oracle::exact_outage_for;
use crate::outage::{classify_main_lobe, OutageRegime};

/// A link whose transmitter has a total power budget instead of a fixed
/// boresight power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetedLink {
    pub p_t: f64,
    pub link: LinkConfig,
    pub a_m: f64,
}

impl BudgetedLink {
    pub fn new(p_t: f64, link: LinkConfig, a_m: f64) -> Result<Self> {
        require_positive("p_t", p_t)?;
        if !(a_m > 0.0 && a_m < 1.0) {
            return Err(Error::InvalidParameter {
                name: "a_m",
                reason: "must lie in (0, 1)",
            });
        }
        Ok(Self { p_t, link, a_m })
    }

    /// `C`, the largest beamwidth with a positive k-factor.
    pub fn beamwidth_ceiling(&self) -> f64 {
        friis_gain(&self.link) * self.p_t * libm::sqrt(PATTERN_DECAY * LN_10)
            / (libm::sqrt(PI) * self.link.gamma_th)
    }

    /// The antenna this budget yields at beamwidth `theta_3db`.
    pub fn antenna(&self, theta_3db: f64) -> Result<AntennaConfig> {
        AntennaConfig::new(theta_3db, self.a_m, pmax_for_budget(self.p_t, theta_3db))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Infeasibility {
    /// `θ*` exceeds the small-beamwidth limit of the budget approximation.
    BeyondSmallBeam,
    /// The angle under `tan` in `k*` reaches `π/2`.
    TanPole,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub theta_star: f64,
    pub k_star: f64,
    /// The angle whose tangent is `k*`.
    pub threshold_star: f64,
    pub feasible: bool,
    pub reason: Option<Infeasibility>,
}

/// `θ*` and `k* = tan(λ²·P_t·e^(−1/2) / (√(2π)·(4πd)²·γ_th))`.
///
/// Infeasible results are still reported; `k_star` is `NaN` past the pole.
pub fn optimal_beamwidth(b: &BudgetedLink) -> Optimum {
    let half = libm::exp(-0.5);
    let theta_star = b.beamwidth_ceiling() * half;
    let threshold_star =
        friis_gain(&b.link) * b.p_t * half / (libm::sqrt(2.0 * PI) * b.link.gamma_th);

    let reason = if threshold_star >= FRAC_PI_2 {
        Some(Infeasibility::TanPole)
    } else if theta_star > SMALL_BEAM_LIMIT {
        Some(Infeasibility::BeyondSmallBeam)
    } else {
        None
    };
    let k_star = if threshold_star < FRAC_PI_2 {
        libm::tan(threshold_star)
    } else {
        f64::NAN
    };
    Optimum {
        theta_star,
        k_star,
        threshold_star,
        feasible: reason.is_none(),
        reason,
    }
}

/// The budgeted k-factor objective `θ²·lg(C/θ)`, whose maximizer is `θ*`.
pub fn beamwidth_objective(theta_3db: f64, ceiling: f64) -> f64 {
    theta_3db * theta_3db * libm::log10(ceiling / theta_3db)
}

/// `n` equally spaced points strictly inside `(0, upper)`: `upper·i/(n+1)`.
pub fn beamwidth_grid(upper: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| upper * i as f64 / (n + 1) as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub theta_3db: f64,
    pub p_max: f64,
    pub regime: OutageRegime,
    pub p_out: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub points: Vec<GridPoint>,
    pub argmin: usize,
    pub theta_argmin: f64,
    pub theta_star: f64,
    /// `θ_argmin − θ*`.
    pub gap: f64,
    /// Largest spacing between neighbouring grid values.
    pub grid_step: f64,
}

impl VerifyReport {
    pub fn within_one_step(&self) -> bool {
        self.gap.abs() <= self.grid_step * (1.0 + 1e-9)
    }
}

/// Sweeps `grid`, evaluating the exact outage at each beamwidth with the
/// budget-implied `P_max`, and compares the grid argmin with `θ*`.
///
/// Like the budget itself, the regime at each point neglects the side-lobe
/// floor; otherwise very narrow beams (huge `P_max`) would be covered by
/// side lobes whose power the budget never paid for.
///
/// Ties go to the smallest index. The grid must be strictly increasing with
/// at least 100 points.
pub fn verify_optimum(
    b: &BudgetedLink,
    r: &Covariance2x2,
    grid: &[f64],
    tol: f64,
) -> Result<VerifyReport> {
    if grid.len() < 100 {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "needs at least 100 points",
        });
    }
    if grid[0] <= 0.0
        || grid
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(core::cmp::Ordering::Greater))
    {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "must be positive and strictly increasing",
        });
    }

    let eval = |theta: f64| -> Result<GridPoint> {
        let ant = b.antenna(theta)?;
        let regime = classify_main_lobe(&ant, &b.link);
        let p_out = exact_outage_for(regime, b.link.d, r, tol)?.p_out;
        Ok(GridPoint {
            theta_3db: theta,
            p_max: ant.p_max,
            regime,
            p_out,
        })
    };

    #[cfg(feature = "parallel")]
    let points: Vec<GridPoint> = {
        use rayon::prelude::*;
        grid.par_iter().map(|&t| eval(t)).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let points: Vec<GridPoint> = grid.iter().map(|&t| eval(t)).collect::<Result<_>>()?;

    let mut argmin = 0;
    for (i, p) in points.iter().enumerate() {
        if p.p_out < points[argmin].p_out {
            argmin = i;
        }
    }
    let theta_star = optimal_beamwidth(b).theta_star;
    let grid_step = grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    Ok(VerifyReport {
        argmin,
        theta_argmin: grid[argmin],
        theta_star,
        gap: grid[argmin] - theta_star,
        grid_step,
        points,
    })
}
