use std::f64::consts::PI;

use beamout_core::gauss2d::{halfplane_prob, GaussianSampler};
use beamout_core::{Covariance2x2, HalfPlane, Point, PositioningErrorModel};
use beamout_testkit::halfplane_mass;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model() -> impl Strategy<Value = PositioningErrorModel> {
    (0.05f64..5.0, 1.0f64..10.0, 0.0f64..PI)
        .prop_map(|(s2, ratio, phi)| PositioningErrorModel::new(s2 * ratio, s2, phi).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eigenvalues_recover_the_model(m in model()) {
        let (big, small) = m.covariance().eigenvalues();
        prop_assert!(rel(big, m.sigma1() * m.sigma1()) < 1e-12);
        prop_assert!(rel(small, m.sigma2() * m.sigma2()) < 1e-12);
    }

    #[test]
    fn root_squares_back(m in model()) {
        let r = m.covariance();
        let sq = r.spectral_sqrt().square();
        let want = [[r.r11(), r.r12()], [r.r12(), r.r22()]];
        let mut diff = 0.0;
        let mut norm = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                diff += (sq[i][j] - want[i][j]).powi(2);
                norm += want[i][j].powi(2);
            }
        }
        prop_assert!((diff / norm).sqrt() < 1e-12);
    }

    #[test]
    fn halfplane_scale_invariance_and_complement(
        m in model(),
        psi in 0.0f64..2.0 * PI,
        mx in -5.0f64..5.0,
        my in -5.0f64..5.0,
        z in -6.0f64..6.0,
        c in 1e-3f64..1e3,
    ) {
        let r = m.covariance();
        let mean = Point::new(mx, my);
        let a = Point::new(psi.cos(), psi.sin());
        let b = a.dot(mean) + z * r.quad_form(a).sqrt();
        let h = HalfPlane::new(a.x, a.y, b).unwrap();
        let p = halfplane_prob(&h, mean, &r);

        let scaled = HalfPlane::new(c * a.x, c * a.y, c * b).unwrap();
        prop_assert!((halfplane_prob(&scaled, mean, &r) - p).abs() <= 1e-12 * p.max(1e-300) + 1e-300);

        let total = p + halfplane_prob(&h.complement(), mean, &r);
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn halfplane_matches_density_cubature(
        m in model(),
        psi in 0.0f64..2.0 * PI,
        mx in -3.0f64..3.0,
        my in -3.0f64..3.0,
        z in -4.0f64..4.0,
    ) {
        let r = m.covariance();
        let mean = Point::new(mx, my);
        let a = Point::new(psi.cos(), psi.sin());
        let b = a.dot(mean) + z * r.quad_form(a).sqrt();
        let h = HalfPlane::new(a.x, a.y, b).unwrap();
        let got = halfplane_prob(&h, mean, &r);
        let want = halfplane_mass((a.x, a.y), b, (mx, my), (r.r11(), r.r12(), r.r22()), 1e-10);
        prop_assert!((got - want).abs() <= 1e-8, "{} vs {}", got, want);
    }
}

fn moments(r: &Covariance2x2, mean: Point, n: usize, seed: u64) -> ([f64; 2], [f64; 3]) {
    let sampler = GaussianSampler::new(mean, r);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sx, mut sy, mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..n {
        let p = sampler.sample(&mut rng);
        let (dx, dy) = (p.x - mean.x, p.y - mean.y);
        sx += dx;
        sy += dy;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let n = n as f64;
    ([sx / n, sy / n], [sxx / n, sxy / n, syy / n])
}

#[test]
fn sampler_moments() {
    let r = PositioningErrorModel::new(2.0, 0.5, PI / 3.0)
        .unwrap()
        .covariance();
    let mean = Point::new(1.0, 30.0);
    let n = 1_000_000;
    let (m, c) = moments(&r, mean, n, 7);
    let sn = (n as f64).sqrt();
    assert!(m[0].abs() <= 3.0 * r.r11().sqrt() / sn, "mean x {}", m[0]);
    assert!(m[1].abs() <= 3.0 * r.r22().sqrt() / sn, "mean y {}", m[1]);
    assert!(rel(c[0], r.r11()) < 0.01);
    assert!(rel(c[2], r.r22()) < 0.01);
    // the cross term is small relative to r12's scale; compare against √(r11·r22)
    assert!((c[1] - r.r12()).abs() < 0.01 * (r.r11() * r.r22()).sqrt());
}

#[test]
fn sampler_is_deterministic() {
    let r = Covariance2x2::new(1.0, 0.4, 0.5).unwrap();
    let a = moments(&r, Point::new(0.0, 5.0), 10_000, 99);
    let b = moments(&r, Point::new(0.0, 5.0), 10_000, 99);
    assert_eq!(a, b);
    let c = moments(&r, Point::new(0.0, 5.0), 10_000, 100);
    assert_ne!(a, c);
}
