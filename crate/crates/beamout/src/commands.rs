//! The `point`, `sweep` and `optimize` subcommands.

use std::io::Write;

use beamout_core::optimizer::{
    beamwidth_grid, optimal_beamwidth, verify_optimum, BudgetedLink, Infeasibility, Optimum,
    VerifyReport,
};
use beamout_core::oracle::{exact_outage_for, outage_montecarlo, McConfig, OracleResult};
use beamout_core::outage::{estimate, BoundTerms, OutageRegime, Tightness};
use rayon::prelude::*;

use crate::config::{ConfigError, Power, Scenario, ScenarioConfig};
use crate::error::CliError;

/// Grid size used by `optimize --verify`.
pub const VERIFY_POINTS: usize = 200;

/// Monte Carlo results further than this many standard errors from the
/// quadrature value are tallied as statistical violations.
pub const AGREEMENT_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointReport {
    pub regime: OutageRegime,
    pub theta_3db: f64,
    pub p_max: f64,
    pub terms: Option<BoundTerms>,
    pub lower: f64,
    pub upper: f64,
    /// Quadrature value, or the exact 0/1 of a deterministic regime.
    pub exact: f64,
    /// `None` for deterministic regimes or when sampling is disabled.
    pub mc: Option<OracleResult>,
    pub tightness: Option<Tightness>,
}

impl PointReport {
    pub fn within_bounds(&self, tol: f64) -> bool {
        self.lower - tol <= self.exact && self.exact <= self.upper + tol
    }

    pub fn mc_agrees(&self) -> Option<bool> {
        self.mc
            .map(|mc| mc.agrees_with(self.exact, AGREEMENT_SIGMAS))
    }
}

/// Bounds, quadrature and (when the outcome is random) Monte Carlo at one
/// resolved scenario.
pub fn evaluate(s: &Scenario, cfg: &ScenarioConfig, seed: u64) -> Result<PointReport, CliError> {
    let est = estimate(&s.antenna, &s.link, &s.covariance);
    let exact = exact_outage_for(est.regime, s.link.d, &s.covariance, cfg.quad_tol)?.p_out;
    let mc = if est.regime.deterministic_outage().is_some() || cfg.mc_samples == 0 {
        None
    } else {
        let mc = McConfig::new(cfg.mc_samples, seed).with_streams(rayon::current_num_threads());
        Some(outage_montecarlo(&s.antenna, &s.link, &s.covariance, &mc)?)
    };
    Ok(PointReport {
        regime: est.regime,
        theta_3db: s.antenna.theta_3db,
        p_max: s.antenna.p_max,
        terms: est.terms,
        lower: est.lower,
        upper: est.upper,
        exact,
        mc,
        tightness: est.tightness,
    })
}

pub fn cmd_point(cfg: &ScenarioConfig, out: &mut dyn Write) -> Result<PointReport, CliError> {
    if cfg.sweep.is_some() {
        return Err(ConfigError::Command("`point` takes no sweep_axis; use `sweep`").into());
    }
    let s = cfg.scenario_at(None)?;
    let r = evaluate(&s, cfg, cfg.mc_seed)?;

    writeln!(out, "regime: {}", r.regime.name())?;
    writeln!(out, "theta_3db: {}", r.theta_3db)?;
    writeln!(out, "p_max: {} W", r.p_max)?;
    if let Some(p) = r.regime.deterministic_outage() {
        writeln!(out, "p_out: {p} (deterministic; oracles skipped)")?;
        return Ok(r);
    }
    match r.regime {
        OutageRegime::Probabilistic { k } => writeln!(out, "k: {k}")?,
        OutageRegime::Wraparound { slope } => writeln!(out, "rear_wedge_slope: {slope}")?,
        _ => {}
    }
    if let Some(t) = r.terms {
        writeln!(out, "I_R: {}", t.i_r)?;
        writeln!(out, "I_L: {}", t.i_l)?;
        writeln!(out, "I_B: {}", t.i_b)?;
    }
    writeln!(out, "lower: {}", r.lower)?;
    writeln!(out, "upper: {}", r.upper)?;
    writeln!(out, "quadrature: {}", r.exact)?;
    if let Some(mc) = r.mc {
        writeln!(
            out,
            "monte_carlo: {} +/- {} ({} samples, seed {})",
            mc.p_out, mc.std_err, mc.samples, cfg.mc_seed
        )?;
    }
    if let Some(t) = r.tightness {
        let note = if t.degenerate {
            " (bounds coincide)"
        } else {
            ""
        };
        writeln!(out, "tightness_ratio: {}{note}", t.ratio)?;
    }
    Ok(r)
}

pub const SWEEP_COLUMNS: [&str; 8] = [
    "regime",
    "k",
    "lower",
    "upper",
    "quadrature",
    "mc",
    "mc_stderr",
    "tightness_ratio",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub report: PointReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub csv: Vec<u8>,
    pub rows: Vec<SweepRow>,
    /// Rows whose quadrature value falls outside `[lower, upper]` by more
    /// than the quadrature tolerance.
    pub bound_violations: usize,
    /// Rows whose Monte Carlo estimate misses the quadrature value by more
    /// than [`AGREEMENT_SIGMAS`] standard errors.
    pub statistical_violations: usize,
    /// Rows that carry a Monte Carlo estimate.
    pub sampled_rows: usize,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Evaluates every grid point (concurrently) and renders the CSV in axis
/// order. Point `i` samples with seed `mc_seed + i`.
pub fn cmd_sweep(cfg: &ScenarioConfig) -> Result<SweepOutput, CliError> {
    let sweep = cfg.sweep.ok_or(ConfigError::Command(
        "`sweep` needs sweep_axis, sweep_min, sweep_max and sweep_points",
    ))?;
    let grid = sweep.grid();
    let rows = grid
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            let s = cfg.scenario_at(Some(v))?;
            let report = evaluate(&s, cfg, cfg.mc_seed.wrapping_add(i as u64))?;
            Ok(SweepRow {
                axis_value: v,
                report,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![sweep.axis.key()];
    header.extend(SWEEP_COLUMNS);
    w.write_record(&header)?;
    for row in &rows {
        let r = &row.report;
        w.write_record([
            num(row.axis_value),
            r.regime.name().to_string(),
            opt(r.regime.k()),
            num(r.lower),
            num(r.upper),
            num(r.exact),
            opt(r.mc.map(|m| m.p_out)),
            opt(r.mc.map(|m| m.std_err)),
            opt(r.tightness.map(|t| t.ratio)),
        ])?;
    }
    let csv = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;

    Ok(SweepOutput {
        bound_violations: rows
            .iter()
            .filter(|r| !r.report.within_bounds(cfg.quad_tol))
            .count(),
        statistical_violations: rows
            .iter()
            .filter(|r| r.report.mc_agrees() == Some(false))
            .count(),
        sampled_rows: rows.iter().filter(|r| r.report.mc.is_some()).count(),
        csv,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeReport {
    pub optimum: Optimum,
    pub ceiling: f64,
    pub verify: Option<VerifyReport>,
}

pub fn cmd_optimize(
    cfg: &ScenarioConfig,
    verify: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<OptimizeReport, CliError> {
    if cfg.sweep.is_some() {
        return Err(ConfigError::Command("`optimize` takes no sweep_axis").into());
    }
    let p_t = match cfg.power {
        Power::Budget(w) => w,
        _ => return Err(ConfigError::Missing("p_t").into()),
    };
    if cfg.theta_3db.is_some() {
        writeln!(err, "warning: theta_3db is ignored by `optimize`")?;
    }
    let link = cfg.scenario_at(None)?.link;
    let budget = BudgetedLink::new(p_t, link, cfg.a_m)?;
    let optimum = optimal_beamwidth(&budget);
    let ceiling = budget.beamwidth_ceiling();

    writeln!(out, "p_t: {p_t} W")?;
    writeln!(out, "theta_star: {}", optimum.theta_star)?;
    writeln!(out, "k_star: {}", optimum.k_star)?;
    writeln!(out, "beamwidth_ceiling: {ceiling}")?;
    writeln!(out, "feasible: {}", optimum.feasible)?;
    match optimum.reason {
        Some(Infeasibility::BeyondSmallBeam) => writeln!(
            err,
            "warning: theta_star = {} exceeds the small-beamwidth limit 0.3; the closed form is outside its validity range",
            optimum.theta_star
        )?,
        Some(Infeasibility::TanPole) => writeln!(
            err,
            "warning: the optimal threshold angle {} reaches pi/2; k_star is undefined",
            optimum.threshold_star
        )?,
        None => {}
    }

    let verify = if verify {
        let grid = beamwidth_grid(ceiling, VERIFY_POINTS);
        let rep = verify_optimum(&budget, &cfg.covariance(), &grid, cfg.quad_tol)?;
        writeln!(out, "verify_argmin: {}", rep.theta_argmin)?;
        writeln!(out, "verify_p_out: {}", rep.points[rep.argmin].p_out)?;
        writeln!(out, "verify_gap: {}", rep.gap)?;
        writeln!(out, "verify_grid_step: {}", rep.grid_step)?;
        writeln!(out, "verify_within_one_step: {}", rep.within_one_step())?;
        Some(rep)
    } else {
        None
    };
    Ok(OptimizeReport {
        optimum,
        ceiling,
        verify,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "\
sigma1 = 1.0
sigma2 = 0.5
theta_3db = 0.1
a_m = 1e-4
lambda = 0.05
gamma_th = 1e-7
p_max = 100
mc_samples = 20000
mc_seed = 3
";

    fn cfg(extra: &str) -> ScenarioConfig {
        ScenarioConfig::parse(&format!("{BASE}{extra}")).unwrap()
    }

    #[test]
    fn point_is_consistent() {
        let mut out = Vec::new();
        let r = cmd_point(&cfg("d = 30\n"), &mut out).unwrap();
        assert!(matches!(r.regime, OutageRegime::Probabilistic { .. }));
        assert!(r.within_bounds(1e-12));
        assert_eq!(r.mc_agrees(), Some(true));
        let text = String::from_utf8(out).unwrap();
        for key in [
            "regime:",
            "k:",
            "I_R:",
            "I_L:",
            "I_B:",
            "lower:",
            "upper:",
            "quadrature:",
            "monte_carlo:",
            "tightness_ratio:",
        ] {
            assert!(text.contains(key), "missing {key} in\n{text}");
        }
    }

    #[test]
    fn deterministic_point_skips_oracles() {
        let mut out = Vec::new();
        let r = cmd_point(&cfg("d = 500\n"), &mut out).unwrap();
        assert_eq!(r.regime, OutageRegime::AlwaysOutage);
        assert!(r.mc.is_none());
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("p_out: 1"));
        assert!(!text.contains("monte_carlo"));
    }

    #[test]
    fn sweep_rows_are_ordered_and_formatted() {
        let c = cfg("sweep_axis = d\nsweep_min = 1\nsweep_max = 130\nsweep_points = 14\n");
        let s = cmd_sweep(&c).unwrap();
        let text = String::from_utf8(s.csv.clone()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "d,regime,k,lower,upper,quadrature,mc,mc_stderr,tightness_ratio"
        );
        assert_eq!(lines.len(), 15);
        assert!(lines[1].starts_with("1.0000000000000000e0,always_covered,,"));
        assert!(lines[14].starts_with("1.3000000000000000e2,always_outage,,"));
        assert!(s.rows.windows(2).all(|w| w[0].axis_value < w[1].axis_value));
        assert_eq!(s.bound_violations, 0);
        assert_eq!(s.statistical_violations, 0);
    }

    #[test]
    fn optimize_reports_and_warns() {
        let c = ScenarioConfig::parse(
            &BASE
                .replace("theta_3db = 0.1\n", "")
                .replace("p_max = 100", "p_t = 2\nd = 50"),
        )
        .unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let r = cmd_optimize(&c, false, &mut out, &mut err).unwrap();
        assert!(r.optimum.feasible);
        assert!(err.is_empty());

        let big = ScenarioConfig::parse(
            &BASE
                .replace("theta_3db = 0.1\n", "")
                .replace("p_max = 100", "p_t = 1000\nd = 50"),
        )
        .unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let r = cmd_optimize(&big, false, &mut out, &mut err).unwrap();
        assert!(!r.optimum.feasible);
        assert!(String::from_utf8(err).unwrap().starts_with("warning:"));
    }

    #[test]
    fn optimize_needs_a_budget() {
        let e =
            cmd_optimize(&cfg("d = 30\n"), false, &mut Vec::new(), &mut Vec::new()).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("p_t"));
    }
}
