//! Outage regime classification, the k-factor, and closed-form outage
//! bounds.
//!
//! With the beam steered at the estimate `p̂ = (x̂, ŷ)`, the link is in
//! outage when `P_max·G_θ·G_d <= γ_th`. Between the two trivial regimes this
//! reduces to the estimate falling outside the wedge `|x̂| < k·ŷ`, whose
//! probability is sandwiched by three half-plane probabilities:
//!
//! * `I_R = Pr(x̂ >= k·ŷ)`, `I_L = Pr(x̂ <= −k·ŷ)`, `I_B = Pr(ŷ <= 0)`,
//! * `I_R + I_L − I_B <= P_out <= I_R + I_L`.

use core::f64::consts::{FRAC_PI_2, PI};

use crate::channel::{friis_gain, AntennaConfig, LinkConfig, PATTERN_DECAY};
use crate::error::{Error, Result};
use crate::gauss2d::{q_function, Covariance2x2, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutageRegime {
    /// The side-lobe floor alone clears the threshold, or the main lobe
    /// clears it at every angle. `P_out = 0`.
    AlwaysCovered,
    /// Even perfect pointing misses the threshold. `P_out = 1`.
    AlwaysOutage,
    /// Outage iff `|x̂| >= k·ŷ`.
    Probabilistic { k: f64 },
    /// The main-lobe threshold angle lies in `[π/2, π)`: outage iff the
    /// estimate falls in the rear wedge `ŷ <= −slope·|x̂|`.
    Wraparound { slope: f64 },
}

impl OutageRegime {
    pub fn name(&self) -> &'static str {
        match self {
            Self::AlwaysCovered => "always_covered",
            Self::AlwaysOutage => "always_outage",
            Self::Probabilistic { .. } => "probabilistic",
            Self::Wraparound { .. } => "wraparound",
        }
    }

    pub fn k(&self) -> Option<f64> {
        match *self {
            Self::Probabilistic { k } => Some(k),
            _ => None,
        }
    }

    /// The exact outage probability when it does not depend on the
    /// positioning error.
    pub fn deterministic_outage(&self) -> Option<f64> {
        match self {
            Self::AlwaysCovered => Some(0.0),
            Self::AlwaysOutage => Some(1.0),
            _ => None,
        }
    }
}

/// `P_max·G_d / γ_th`, the boresight power relative to the threshold.
pub fn boresight_margin(ant: &AntennaConfig, link: &LinkConfig) -> f64 {
    ant.p_max * friis_gain(link) / link.gamma_th
}

/// The pointing-error magnitude at which the main lobe drops to the
/// threshold: `√((θ_3dB²/1.2)·lg(P_max·G_d/γ_th))`. `None` when the
/// boresight power does not exceed the threshold.
pub fn threshold_angle(ant: &AntennaConfig, link: &LinkConfig) -> Option<f64> {
    let margin = boresight_margin(ant, link);
    if margin <= 1.0 {
        return None;
    }
    Some(threshold_from_margin(ant.theta_3db, margin))
}

pub(crate) fn threshold_from_margin(theta_3db: f64, margin: f64) -> f64 {
    libm::sqrt(theta_3db * theta_3db / PATTERN_DECAY * libm::log10(margin))
}

/// Classifies the link. Boundary equalities go to the side-lobe branch
/// (`P_max·a_m·G_d >= γ_th`) and then to the outage branch
/// (`P_max·G_d <= γ_th`).
pub fn classify(ant: &AntennaConfig, link: &LinkConfig) -> OutageRegime {
    let boresight = ant.p_max * friis_gain(link);
    if boresight * ant.a_m >= link.gamma_th {
        return OutageRegime::AlwaysCovered;
    }
    if boresight <= link.gamma_th {
        return OutageRegime::AlwaysOutage;
    }
    regime_from_threshold(threshold_from_margin(
        ant.theta_3db,
        boresight / link.gamma_th,
    ))
}

/// Classification with the side-lobe floor neglected, matching the
/// transmit-power budget model (which integrates the main lobe only).
pub fn classify_main_lobe(ant: &AntennaConfig, link: &LinkConfig) -> OutageRegime {
    match threshold_angle(ant, link) {
        None => OutageRegime::AlwaysOutage,
        Some(t) => regime_from_threshold(t),
    }
}

fn regime_from_threshold(t: f64) -> OutageRegime {
    if t >= PI {
        OutageRegime::AlwaysCovered
    } else if t >= FRAC_PI_2 {
        let (s, c) = libm::sincos(t);
        OutageRegime::Wraparound {
            slope: (-c / s).max(0.0),
        }
    } else {
        OutageRegime::Probabilistic { k: libm::tan(t) }
    }
}

/// `k = tan √((θ_3dB²/1.2)·lg(λ²P_max/((4πd)²γ_th)))`.
///
/// The side-lobe floor is ignored. Fails when the logarithm's argument is
/// at most 1 or when the angle under the tangent reaches `π/2`.
pub fn k_factor(ant: &AntennaConfig, link: &LinkConfig) -> Result<f64> {
    let t = threshold_angle(ant, link).ok_or(Error::WrongRegime)?;
    if t >= FRAC_PI_2 {
        return Err(Error::BeamWraparound { threshold: t });
    }
    Ok(libm::tan(t))
}

/// The three half-plane probabilities behind the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTerms {
    pub i_r: f64,
    pub i_l: f64,
    pub i_b: f64,
}

impl BoundTerms {
    pub fn new(k: f64, d: f64, r: &Covariance2x2) -> Self {
        let q_r = r.quad_form(Point::new(1.0, -k));
        let q_l = r.quad_form(Point::new(1.0, k));
        Self {
            i_r: q_function(k * d / libm::sqrt(q_r)),
            i_l: q_function(k * d / libm::sqrt(q_l)),
            i_b: q_function(d / libm::sqrt(r.r22())),
        }
    }

    pub fn upper(&self) -> f64 {
        (self.i_r + self.i_l).min(1.0)
    }

    pub fn lower(&self) -> f64 {
        (self.i_r + self.i_l - self.i_b).max(0.0)
    }

    pub fn tightness(&self) -> Tightness {
        let sum = self.i_r + self.i_l;
        if sum > 0.0 {
            Tightness {
                ratio: (self.i_b / sum).min(1.0),
                degenerate: false,
            }
        } else {
            Tightness {
                ratio: 0.0,
                degenerate: true,
            }
        }
    }
}

/// `I_B/(I_R + I_L)`. A vanishing ratio means the two bounds coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tightness {
    pub ratio: f64,
    /// `I_R + I_L` underflowed; the bounds agree to machine precision and
    /// `ratio` is reported as 0.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub regime: OutageRegime,
    pub lower: f64,
    pub upper: f64,
    /// Present for the probabilistic regime.
    pub terms: Option<BoundTerms>,
    pub tightness: Option<Tightness>,
}

impl OutageEstimate {
    fn exact(regime: OutageRegime, p: f64) -> Self {
        Self {
            regime,
            lower: p,
            upper: p,
            terms: None,
            tightness: None,
        }
    }
}

fn check_geometry(k: f64, d: f64) -> Result<()> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: "must be finite and > 0",
        });
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::InvalidParameter {
            name: "d",
            reason: "must be finite and > 0",
        });
    }
    Ok(())
}

/// Closed-form bounds for the probabilistic regime with receiver at `(0, d)`.
pub fn outage_bounds(k: f64, d: f64, r: &Covariance2x2) -> Result<OutageEstimate> {
    check_geometry(k, d)?;
    let terms = BoundTerms::new(k, d, r);
    Ok(OutageEstimate {
        regime: OutageRegime::Probabilistic { k },
        lower: terms.lower(),
        upper: terms.upper(),
        terms: Some(terms),
        tightness: Some(terms.tightness()),
    })
}

/// Bounds for the rear-wedge regime `ŷ <= −slope·|x̂|`, from the two
/// half-planes `ŷ ± slope·x̂ <= 0` whose intersection it is.
pub fn wraparound_bounds(slope: f64, d: f64, r: &Covariance2x2) -> Result<OutageEstimate> {
    if !(slope.is_finite() && slope >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "slope",
            reason: "must be finite and >= 0",
        });
    }
    let h = |a: f64| q_function(d / libm::sqrt(r.quad_form(Point::new(a, 1.0))));
    let (h1, h2) = (h(slope), h(-slope));
    Ok(OutageEstimate {
        regime: OutageRegime::Wraparound { slope },
        lower: (h1 + h2 - 1.0).max(0.0),
        upper: h1.min(h2),
        terms: None,
        tightness: None,
    })
}

/// Classifies the link and returns the matching bounds.
pub fn estimate(ant: &AntennaConfig, link: &LinkConfig, r: &Covariance2x2) -> OutageEstimate {
    let regime = classify(ant, link);
    match regime {
        OutageRegime::AlwaysCovered => OutageEstimate::exact(regime, 0.0),
        OutageRegime::AlwaysOutage => OutageEstimate::exact(regime, 1.0),
        // k > 0, slope >= 0 and d > 0 hold by construction
        OutageRegime::Probabilistic { k } => {
            outage_bounds(k, link.d, r).expect("validated geometry")
        }
        OutageRegime::Wraparound { slope } => {
            wraparound_bounds(slope, link.d, r).expect("validated geometry")
        }
    }
}

pub fn tightness_ratio(k: f64, d: f64, r: &Covariance2x2) -> Result<Tightness> {
    check_geometry(k, d)?;
    Ok(BoundTerms::new(k, d, r).tightness())
}

/// Denominators of the three `Q` arguments when each is written as
/// `Q(d/‖v·√R‖)`, computed from the rows of the spectral root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenominatorComparison {
    /// `‖(−1/k, 1)·√R‖`
    pub right: f64,
    /// `‖(1/k, 1)·√R‖`
    pub left: f64,
    /// `‖(0, 1)·√R‖`
    pub bottom: f64,
    /// Dot product of the two rows of `√R`; its sign decides which of
    /// `right`/`left` is guaranteed to exceed `bottom`.
    pub row_dot: f64,
}

impl DenominatorComparison {
    pub fn new(k: f64, r: &Covariance2x2) -> Self {
        let (row1, row2) = r.spectral_sqrt().rows();
        let combo = |c: f64| {
            let v = Point::new(c * row1.x + row2.x, c * row1.y + row2.y);
            libm::sqrt(v.dot(v))
        };
        Self {
            right: combo(-1.0 / k),
            left: combo(1.0 / k),
            bottom: libm::sqrt(row2.dot(row2)),
            row_dot: row1.dot(row2),
        }
    }

    /// The larger of the two side denominators; always exceeds `bottom`.
    pub fn dominant_side(&self) -> f64 {
        if self.row_dot < 0.0 {
            self.right
        } else {
            self.left
        }
    }
}
