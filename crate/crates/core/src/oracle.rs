//! Ground-truth estimators of the exact outage probability.
//!
//! [`outage_quadrature`] conditions on `ŷ` and integrates the Gaussian
//! conditional probability that `x̂` leaves the covered wedge.
//! [`outage_montecarlo`] samples estimated positions and runs every draw
//! through the physical pipeline (pointing angle, pattern gain, Friis loss,
//! threshold test); it never sees `k`, so agreement between the two also
//! checks the reduction of the power condition to `|x̂| >= k·ŷ`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{deviation_from_boresight, received_power, AntennaConfig, LinkConfig};
use crate::error::{Error, Result};
use crate::gauss2d::{normal_cdf, q_function, Covariance2x2, GaussianSampler};
use crate::outage::{classify, OutageRegime};
use crate::quad::{integrate, QuadOptions};

/// Half-width of the integration window, in standard deviations.
const TRUNCATION: f64 = 10.0;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Samples per Monte Carlo block. Block `b` always uses ChaCha stream `b`.
pub const MC_BLOCK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub p_out: f64,
    /// Binomial standard error; 0 for quadrature.
    pub std_err: f64,
    pub method: OracleMethod,
    /// Monte Carlo sample count; 0 for quadrature.
    pub samples: u64,
}

impl OracleResult {
    fn exact(p_out: f64) -> Self {
        Self {
            p_out,
            std_err: 0.0,
            method: OracleMethod::Quadrature,
            samples: 0,
        }
    }

    /// Standard error used for agreement checks. A Monte Carlo frequency of
    /// exactly 0 or 1 has a zero plug-in error, so it is floored at `1/N`.
    pub fn effective_std_err(&self) -> f64 {
        if self.samples > 0 {
            self.std_err.max(1.0 / self.samples as f64)
        } else {
            self.std_err
        }
    }

    /// `|p_out − reference| <= n_sigma·effective_std_err()`.
    pub fn agrees_with(&self, reference: f64, n_sigma: f64) -> bool {
        (self.p_out - reference).abs() <= n_sigma * self.effective_std_err()
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 1e-14 && tol < 1e-4 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "tol",
            reason: "must lie in (1e-14, 1e-4)",
        })
    }
}

fn gaussian_density(z: f64, sigma: f64) -> f64 {
    INV_SQRT_2PI * libm::exp(-0.5 * z * z) / sigma
}

fn quad_options(tol: f64) -> QuadOptions {
    QuadOptions {
        abs_tol: tol,
        max_intervals: 4000,
        initial_panels: 16,
    }
}

/// `Pr(|x̂| >= k·ŷ)` for `p̂ ~ N((0, d), R)`.
///
/// With `ŷ ~ N(d, r22)` and `x̂ | ŷ=y ~ N(r12/r22·(y − d), r11 − r12²/r22)`:
///
/// `P_out = Pr(ŷ <= 0) + ∫_0^∞ f_ŷ(y)·[Q((k·y − μ(y))/s) + Q((k·y + μ(y))/s)] dy`,
///
/// which is `1 −` the covered-wedge mass written without the cancellation
/// in `1 − ∫ …`. The `ŷ` range is cut to `d ± 10√r22`; the dropped
/// mass is below `2·Q(10) ≈ 1.5e-23`.
pub fn outage_quadrature(k: f64, d: f64, r: &Covariance2x2, tol: f64) -> Result<OracleResult> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: "must be finite and > 0",
        });
    }
    if !d.is_finite() {
        return Err(Error::InvalidParameter {
            name: "d",
            reason: "must be finite",
        });
    }
    check_tol(tol)?;

    let sigma_y = libm::sqrt(r.r22());
    let regress = r.r12() / r.r22();
    let s = libm::sqrt(r.det() / r.r22());
    let below = q_function(d / sigma_y);

    let lo = (d - TRUNCATION * sigma_y).max(0.0);
    let hi = d + TRUNCATION * sigma_y;
    if hi <= lo {
        return Ok(OracleResult::exact(below.min(1.0)));
    }
    let integrand = |y: f64| {
        let mu = regress * (y - d);
        let escape = q_function((k * y - mu) / s) + q_function((k * y + mu) / s);
        gaussian_density((y - d) / sigma_y, sigma_y) * escape
    };
    let res = integrate(integrand, lo, hi, &quad_options(tol))?;
    Ok(OracleResult::exact((below + res.value).clamp(0.0, 1.0)))
}

/// `Pr(ŷ <= −slope·|x̂|)` for the rear-wedge regime, conditioning on `x̂`.
pub fn wraparound_quadrature(
    slope: f64,
    d: f64,
    r: &Covariance2x2,
    tol: f64,
) -> Result<OracleResult> {
    if !(slope.is_finite() && slope >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "slope",
            reason: "must be finite and >= 0",
        });
    }
    check_tol(tol)?;
    let sigma_x = libm::sqrt(r.r11());
    let regress = r.r12() / r.r11();
    let s = libm::sqrt(r.det() / r.r11());
    let integrand = |x: f64| {
        let mu = d + regress * x;
        gaussian_density(x / sigma_x, sigma_x) * normal_cdf((-slope * x.abs() - mu) / s)
    };
    // the integrand has a kink at x = 0
    let half = quad_options(0.5 * tol);
    let left = integrate(integrand, -TRUNCATION * sigma_x, 0.0, &half)?;
    let right = integrate(integrand, 0.0, TRUNCATION * sigma_x, &half)?;
    Ok(OracleResult::exact(
        (left.value + right.value).clamp(0.0, 1.0),
    ))
}

/// Exact outage for any regime: deterministic regimes short-circuit, the
/// others go through the matching quadrature.
pub fn exact_outage(
    ant: &AntennaConfig,
    link: &LinkConfig,
    r: &Covariance2x2,
    tol: f64,
) -> Result<OracleResult> {
    exact_outage_for(classify(ant, link), link.d, r, tol)
}

pub fn exact_outage_for(
    regime: OutageRegime,
    d: f64,
    r: &Covariance2x2,
    tol: f64,
) -> Result<OracleResult> {
    match regime {
        OutageRegime::AlwaysCovered => Ok(OracleResult::exact(0.0)),
        OutageRegime::AlwaysOutage => Ok(OracleResult::exact(1.0)),
        OutageRegime::Probabilistic { k } => outage_quadrature(k, d, r, tol),
        OutageRegime::Wraparound { slope } => wraparound_quadrature(slope, d, r, tol),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_samples: u64,
    pub seed: u64,
    /// Number of contiguous block groups. Groups may run concurrently with
    /// the `parallel` feature; the estimate never depends on this value.
    pub n_streams: usize,
}

impl McConfig {
    pub fn new(n_samples: u64, seed: u64) -> Self {
        Self {
            n_samples,
            seed,
            n_streams: 1,
        }
    }

    pub fn with_streams(self, n_streams: usize) -> Self {
        Self { n_streams, ..self }
    }

    fn blocks(&self) -> u64 {
        self.n_samples.div_ceil(MC_BLOCK)
    }

    fn block_len(&self, block: u64) -> u64 {
        let start = block * MC_BLOCK;
        MC_BLOCK.min(self.n_samples - start)
    }
}

struct Pipeline<'a> {
    ant: &'a AntennaConfig,
    link: &'a LinkConfig,
    sampler: GaussianSampler,
}

impl Pipeline<'_> {
    fn count_block(&self, seed: u64, block: u64, len: u64) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(block);
        let mut outages = 0;
        for _ in 0..len {
            let p = self.sampler.sample(&mut rng);
            let theta = deviation_from_boresight(p);
            if received_power(theta, self.ant, self.link) <= self.link.gamma_th {
                outages += 1;
            }
        }
        outages
    }

    fn count_group(&self, mc: &McConfig, blocks: core::ops::Range<u64>) -> u64 {
        blocks
            .map(|b| self.count_block(mc.seed, b, mc.block_len(b)))
            .sum()
    }
}

/// Monte Carlo estimate of `Pr(P_r <= γ_th)` with `p̂ ~ N((0, d), R)`.
///
/// Samples are split into blocks of [`MC_BLOCK`]; block `b` draws from
/// ChaCha8 stream `b` of `mc.seed`. Outage counts are integers, so the
/// estimate is bit-identical for every `n_streams`.
pub fn outage_montecarlo(
    ant: &AntennaConfig,
    link: &LinkConfig,
    r: &Covariance2x2,
    mc: &McConfig,
) -> Result<OracleResult> {
    if mc.n_samples == 0 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            reason: "must be >= 1",
        });
    }
    let pipeline = Pipeline {
        ant,
        link,
        sampler: GaussianSampler::new(link.receiver(), r),
    };
    let blocks = mc.blocks();
    let groups = (mc.n_streams.max(1) as u64).min(blocks);
    let per_group = blocks.div_ceil(groups);
    let ranges =
        (0..groups).map(|g| (g * per_group).min(blocks)..((g + 1) * per_group).min(blocks));

    #[cfg(feature = "parallel")]
    let outages: u64 = {
        use rayon::prelude::*;
        let ranges: alloc::vec::Vec<_> = ranges.collect();
        ranges
            .into_par_iter()
            .map(|range| pipeline.count_group(mc, range))
            .sum()
    };
    #[cfg(not(feature = "parallel"))]
    let outages: u64 = ranges.map(|range| pipeline.count_group(mc, range)).sum();

    let n = mc.n_samples as f64;
    let p = outages as f64 / n;
    Ok(OracleResult {
        p_out: p,
        std_err: libm::sqrt(p * (1.0 - p) / n),
        method: OracleMethod::MonteCarlo,
        samples: mc.n_samples,
    })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::outage::outage_bounds;

    #[test]
    fn mean_at_origin_gives_three_quarters() {
        let r = Covariance2x2::isotropic(1.3).unwrap();
        let res = outage_quadrature(1.0, 0.0, &r, 1e-13).unwrap();
        assert!((res.p_out - 0.75).abs() < 1e-12, "{}", res.p_out);
        assert_eq!(res.std_err, 0.0);
        assert_eq!(res.method, OracleMethod::Quadrature);
    }

    #[test]
    fn narrow_wedge_limit() {
        let sigma = 1.0;
        let r = Covariance2x2::isotropic(sigma).unwrap();
        let res = outage_quadrature(1e3, 5.0 * sigma, &r, 1e-12).unwrap();
        let q5 = q_function(5.0);
        assert!(
            ((res.p_out - q5) / q5).abs() < 5e-3,
            "{} vs {}",
            res.p_out,
            q5
        );
    }

    #[test]
    fn within_bounds_simple() {
        let r = Covariance2x2::new(1.2, 0.4, 0.7).unwrap();
        for (k, d) in [(0.1, 30.0), (0.5, 2.0), (2.0, 0.8), (0.05, 100.0)] {
            let est = outage_bounds(k, d, &r).unwrap();
            let q = outage_quadrature(k, d, &r, 1e-13).unwrap().p_out;
            assert!(
                est.lower - 1e-12 <= q && q <= est.upper + 1e-12,
                "k={k} d={d}"
            );
        }
    }

    #[test]
    fn rejects_bad_tolerance() {
        let r = Covariance2x2::isotropic(1.0).unwrap();
        assert!(outage_quadrature(1.0, 1.0, &r, 1e-3).is_err());
        assert!(outage_quadrature(1.0, 1.0, &r, 1e-15).is_err());
        assert!(outage_quadrature(-1.0, 1.0, &r, 1e-10).is_err());
    }

    #[test]
    fn montecarlo_short_circuit_regimes() {
        let r = Covariance2x2::isotropic(1.0).unwrap();
        let ant = AntennaConfig::new(0.1, 1e-4, 100.0).unwrap();
        let mc = McConfig::new(10_000, 7);

        let far = LinkConfig::new(500.0, 0.05, 1e-7).unwrap();
        let res = outage_montecarlo(&ant, &far, &r, &mc).unwrap();
        assert_eq!((res.p_out, res.std_err), (1.0, 0.0));

        let near = LinkConfig::new(0.5, 0.05, 1e-7).unwrap();
        let res = outage_montecarlo(&ant, &near, &r, &mc).unwrap();
        assert_eq!(res.p_out, 0.0);
    }

    #[test]
    fn montecarlo_stream_independence() {
        let r = Covariance2x2::new(1.0, 0.3, 0.5).unwrap();
        let ant = AntennaConfig::new(0.1, 1e-4, 100.0).unwrap();
        let link = LinkConfig::new(20.0, 0.05, 1e-7).unwrap();
        let base = McConfig::new(3 * MC_BLOCK + 123, 42);
        let one = outage_montecarlo(&ant, &link, &r, &base).unwrap();
        for streams in [2, 3, 4, 16] {
            let other = outage_montecarlo(&ant, &link, &r, &base.with_streams(streams)).unwrap();
            assert_eq!(one.p_out.to_bits(), other.p_out.to_bits());
        }
        assert!(outage_montecarlo(&ant, &link, &r, &McConfig::new(0, 1)).is_err());
    }

    #[test]
    fn effective_std_err_floor() {
        let res = OracleResult {
            p_out: 0.0,
            std_err: 0.0,
            method: OracleMethod::MonteCarlo,
            samples: 1000,
        };
        assert_eq!(res.effective_std_err(), 1e-3);
        assert!(res.agrees_with(1e-6, 4.0));
        assert!(!res.agrees_with(0.01, 4.0));
    }
}
