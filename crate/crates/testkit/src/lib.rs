//! Reference integrators for the test suites.
//!
//! Nothing here depends on `beamout-core`: the quadrature rule is built
//! from Legendre polynomials at startup, and the Gaussian integrals
//! evaluate the raw bivariate density rather than any closed form.

use std::f64::consts::PI;
use std::sync::OnceLock;

const ORDER: usize = 16;

fn legendre_rule() -> &'static [(f64, f64); ORDER] {
    static RULE: OnceLock<[(f64, f64); ORDER]> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut rule = [(0.0, 0.0); ORDER];
        let n = ORDER as f64;
        for (i, slot) in rule.iter_mut().enumerate() {
            // Chebyshev initial guess, then Newton on P_n
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=ORDER {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-17 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        rule
    })
}

/// 16-point Gauss–Legendre on `[a, b]`.
pub fn gauss_legendre<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    legendre_rule()
        .iter()
        .map(|&(x, w)| w * f(c + h * x))
        .sum::<f64>()
        * h
}

fn recurse<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = gauss_legendre(f, a, m);
    let right = gauss_legendre(f, m, b);
    let both = left + right;
    // below a few ulps of the panel value, halving the tolerance only
    // chases round-off
    let floor = 8.0 * f64::EPSILON * both.abs();
    if depth == 0 || (both - whole).abs() <= tol.max(floor) {
        return both;
    }
    recurse(f, a, m, left, 0.5 * tol, depth - 1) + recurse(f, m, b, right, 0.5 * tol, depth - 1)
}

/// Recursive bisection with 16-point Gauss–Legendre panels, starting from
/// `panels` equal pieces, to absolute tolerance `tol`.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64, panels: usize) -> f64 {
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + w * i as f64;
            let hi = if i + 1 == panels { b } else { lo + w };
            let whole = gauss_legendre(&mut f, lo, hi);
            recurse(&mut f, lo, hi, whole, tol / panels as f64, 40)
        })
        .sum()
}

/// Bivariate normal density with covariance `[[r11, r12], [r12, r22]]`.
pub fn bivariate_density(x: f64, y: f64, mean: (f64, f64), cov: (f64, f64, f64)) -> f64 {
    let (r11, r12, r22) = cov;
    let det = r11 * r22 - r12 * r12;
    let (dx, dy) = (x - mean.0, y - mean.1);
    // (p − μ)ᵀ R⁻¹ (p − μ)
    let q = (r22 * dx * dx - 2.0 * r12 * dx * dy + r11 * dy * dy) / det;
    (-0.5 * q).exp() / (2.0 * PI * det.sqrt())
}

/// Mass of `{a1·x + a2·y >= b}` under `N(mean, cov)` by nested adaptive
/// quadrature of the density.
///
/// The inner variable is the one with the larger normal component; its
/// window is the boundary clipped to ±12 conditional standard deviations.
pub fn halfplane_mass(
    a: (f64, f64),
    b: f64,
    mean: (f64, f64),
    cov: (f64, f64, f64),
    tol: f64,
) -> f64 {
    let (r11, r12, r22) = cov;
    // swap axes so that `u` is the inner variable
    let swap = a.1.abs() > a.0.abs();
    let (au, av) = if swap { (a.1, a.0) } else { (a.0, a.1) };
    let (mu, mv) = if swap {
        (mean.1, mean.0)
    } else {
        (mean.0, mean.1)
    };
    let (ruu, rvv) = if swap { (r22, r11) } else { (r11, r22) };
    let sv = rvv.sqrt();
    let cond_sd = ((ruu * rvv - r12 * r12) / rvv).sqrt();
    let density = |u: f64, v: f64| {
        if swap {
            bivariate_density(v, u, mean, cov)
        } else {
            bivariate_density(u, v, mean, cov)
        }
    };

    let span = 12.0;
    let outer = |v: f64| {
        let cond_mean = mu + r12 / rvv * (v - mv);
        let (wlo, whi) = (cond_mean - span * cond_sd, cond_mean + span * cond_sd);
        let edge = (b - av * v) / au;
        let (lo, hi) = if au > 0.0 {
            (edge.max(wlo), whi)
        } else {
            (wlo, edge.min(whi))
        };
        if hi <= lo {
            return 0.0;
        }
        adaptive(|u| density(u, v), lo, hi, 1e-3 * tol, 4)
    };
    adaptive(outer, mv - span * sv, mv + span * sv, tol, 32)
}

/// `Q(x)` from the tail integral, `Q(x) = φ(x)·∫_0^∞ exp(−x·u − u²/2) du`
/// for `x >= 0` (reflected for negative `x`). Factoring out `φ(x)` keeps
/// the integrand O(1), so the relative error stays near round-off.
pub fn q_tail(x: f64) -> f64 {
    if x < 0.0 {
        return 1.0 - q_tail(-x);
    }
    let phi = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
    // exp(−u²/2) < 1e-300 past u = 38
    let upper = 38.0;
    let integral = adaptive(|u| (-x * u - 0.5 * u * u).exp(), 0.0, upper, 1e-17, 64);
    phi * integral
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials() {
        for deg in 0..32 {
            let v = gauss_legendre(&mut |x: f64| x.powi(deg), -1.0, 1.0);
            let want = if deg % 2 == 0 {
                2.0 / (deg as f64 + 1.0)
            } else {
                0.0
            };
            assert!((v - want).abs() < 1e-14, "deg {deg}");
        }
    }

    #[test]
    fn tail_matches_reference_values() {
        for (x, want) in [
            (0.0, 0.5),
            (1.0, 0.15865525393145705141),
            (3.0, 0.0013498980316300945267),
            (8.0, 6.2209605742717841235e-16),
            (-1.0, 0.84134474606854294859),
        ] {
            let got = q_tail(x);
            assert!(((got - want) / want).abs() < 1e-14, "Q({x}) = {got}");
        }
    }

    #[test]
    fn halfplane_mass_simple() {
        let m = halfplane_mass((0.0, -1.0), 0.0, (0.0, 3.0), (1.0, 0.0, 1.0), 1e-10);
        assert!((m - 0.0013498980316300945267).abs() < 1e-10);
        let m = halfplane_mass((1.0, 0.0), 0.0, (0.0, 3.0), (2.0, 0.7, 1.0), 1e-10);
        assert!((m - 0.5).abs() < 1e-10);
    }
}
