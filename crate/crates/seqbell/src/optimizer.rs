//! Angle optimization: for each strength G, find (γ*, δ*) maximizing
//! min(I₁, I₂), and locate the double-violation window in G.
//!
//! Below the crossover G = 0.8 the γ = δ = π/4 settings are already max-min
//! optimal because I₁ is the bottleneck. Above it, I₁ and the δ-optimized I₂
//! pull in opposite directions as γ shrinks, so the optimum sits where they
//! equalize; that root is bracketed and bisected.

use std::f64::consts::FRAC_PI_4;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocol::{
    chsh_pair, i1_given_angle, i2_given_angles, original_closed_forms, ProtocolConfig, Scheme,
};

/// Below this strength the original settings are already max-min optimal.
pub const CROSSOVER_G: f64 = 0.8;

/// Result of maximizing min(I₁, I₂) at fixed G.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Optimum {
    pub g: f64,
    pub gamma_star: f64,
    pub delta_star: f64,
    pub i1: f64,
    pub i2: f64,
    /// The achieved max-min CHSH value.
    pub value: f64,
    pub scheme_used: Scheme,
}

/// δ maximizing I₂ at fixed (G, γ), from the analytic tangent form
/// tan δ* = [F + (1−F)sin²γ] / [F + (1−F)cos²γ].
pub fn optimal_delta(g: f64, gamma: f64) -> f64 {
    let f = (1.0 - g * g).sqrt();
    let a = f + (1.0 - f) * gamma.cos().powi(2);
    let b = f + (1.0 - f) * gamma.sin().powi(2);
    b.atan2(a)
}

/// δ maximizing I₂ at fixed (G, γ), by golden-section search over the
/// density-matrix evaluation of I₂. Verification route for
/// [`optimal_delta`]; the two must agree.
pub fn optimal_delta_numeric(g: f64, gamma: f64) -> f64 {
    golden_section_max(
        |delta| i2_given_angles(g, gamma, delta),
        0.0,
        FRAC_PI_4,
        1e-10,
    )
}

/// Maximize min(I₁, I₂) over the angle choices at strength `g`.
///
/// For G > 0.8 this solves the equalization condition I₁ = I₂ by bisection
/// in γ; the gap is strictly increasing there since I₁ grows with γ while
/// the δ-optimized I₂ falls.
pub fn optimize(g: f64) -> Result<Optimum> {
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::PrecisionOutOfRange(g));
    }
    if g <= CROSSOVER_G {
        let (i1, i2) = original_closed_forms(g);
        return Ok(Optimum {
            g,
            gamma_star: FRAC_PI_4,
            delta_star: FRAC_PI_4,
            i1,
            i2,
            // I₁ ≤ I₂ holds identically on this branch, so I₁ is the min
            value: i1,
            // at the crossover both branches coincide; report the optimal one
            scheme_used: if g < CROSSOVER_G {
                Scheme::Original
            } else {
                Scheme::Optimal
            },
        });
    }
    let gap =
        |gamma: f64| i1_given_angle(g, gamma) - i2_given_angles(g, gamma, optimal_delta(g, gamma));
    let gamma_star = bisect(gap, 0.0, FRAC_PI_4, 1e-12, 60)?;
    let delta_star = optimal_delta(g, gamma_star);
    let i1 = i1_given_angle(g, gamma_star);
    let i2 = i2_given_angles(g, gamma_star, delta_star);
    Ok(Optimum {
        g,
        gamma_star,
        delta_star,
        i1,
        i2,
        value: i1,
        scheme_used: Scheme::Optimal,
    })
}

/// Endpoints of {G : min CHSH > 2}, each located by bisection to 1e−9.
///
/// For the optimal scheme the upper endpoint is the open boundary G = 1,
/// where the max-min value reaches 2 exactly.
pub fn violation_region(scheme: Scheme) -> (f64, f64) {
    let excess = |g: f64| -> f64 {
        let value = match scheme {
            Scheme::Original => {
                chsh_pair(&ProtocolConfig::original(g).expect("g within bracket")).min_value()
            }
            Scheme::Optimal => optimize(g).expect("g within bracket").value,
        };
        value - 2.0
    };
    let lower = bisect(excess, 0.0, CROSSOVER_G, 1e-9, 80)
        .expect("violation onset brackets below the crossover");
    let upper = bisect(excess, CROSSOVER_G, 1.0, 1e-9, 80)
        .expect("violation offset brackets above the crossover");
    (lower, upper)
}

/// Sign-change bisection. A bracket endpoint whose value already sits within
/// 1e−12 of zero is accepted as the root, which covers the boundary cases
/// where the root lies exactly on an endpoint.
fn bisect<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<f64> {
    const ROOT_EPS: f64 = 1e-12;
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo.abs() <= ROOT_EPS {
        return Ok(lo);
    }
    if f_hi.abs() <= ROOT_EPS {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NonBracketing { lo, hi, f_lo, f_hi });
    }
    for _ in 0..max_iter {
        if hi - lo < xtol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section search for the maximum of a unimodal function on [a, b].
fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, xtol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > xtol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::SQRT_2;

    // Equalization optima computed beforehand by 200-step bisection on the
    // closed forms, independent of the density-matrix implementation path.
    const ORACLE: [(f64, f64, f64, f64); 5] = [
        (0.84, 0.424693030319, 0.592008239479, 2.222986686579),
        (0.88, 0.280615713439, 0.492700721344, 2.178585078837),
        (0.92, 0.172392872743, 0.395312203144, 2.128359933570),
        (0.96, 0.081710389974, 0.278720051950, 2.070303473145),
        (0.99, 0.020008205808, 0.140527395569, 2.019217292506),
    ];

    #[test]
    fn optimum_matches_precomputed_oracle() {
        for (g, gamma, delta, value) in ORACLE {
            let opt = optimize(g).unwrap();
            assert!((opt.gamma_star - gamma).abs() < 1e-8, "gamma* at G={g}");
            assert!((opt.delta_star - delta).abs() < 1e-8, "delta* at G={g}");
            assert!((opt.value - value).abs() < 1e-9, "value at G={g}");
            assert!((opt.i1 - opt.i2).abs() < 1e-7, "equalization at G={g}");
        }
    }

    #[test]
    fn crossover_anchor() {
        let opt = optimize(0.8).unwrap();
        assert!((opt.value - 8.0 * SQRT_2 / 5.0).abs() < 1e-12);
        assert_eq!(opt.gamma_star, FRAC_PI_4);
        assert_eq!(opt.delta_star, FRAC_PI_4);
        assert_eq!(opt.scheme_used, Scheme::Optimal);
        assert_eq!(optimize(0.6).unwrap().scheme_used, Scheme::Original);
    }

    #[test]
    fn below_crossover_value_is_exactly_the_weak_arm() {
        for g in [0.0, 0.25, 0.5, 0.71, 0.8] {
            let opt = optimize(g).unwrap();
            assert_eq!(opt.value, 2.0 * SQRT_2 * g);
        }
    }

    #[test]
    fn value_is_continuous_at_the_crossover() {
        let left = optimize(0.8 - 1e-9).unwrap().value;
        let right = optimize(0.8 + 1e-9).unwrap().value;
        assert!((left - right).abs() < 1e-6);
    }

    #[test]
    fn full_strength_boundary() {
        let opt = optimize(1.0).unwrap();
        assert!((opt.value - 2.0).abs() < 1e-9);
        assert!(opt.gamma_star.abs() < 1e-6);
    }

    #[test]
    fn optimal_curve_strictly_decreases_toward_two() {
        let mut last = f64::INFINITY;
        for k in 0..=40 {
            let g = 0.8 + 0.2 * k as f64 / 40.0;
            let value = optimize(g).unwrap().value;
            assert!(value < last, "not strictly decreasing at G={g}");
            assert!(value >= 2.0 - 1e-9);
            last = value;
        }
    }

    #[test]
    fn never_worse_than_the_original_scheme() {
        for k in 0..=200 {
            let g = k as f64 / 200.0;
            let (i1, i2) = original_closed_forms(g);
            assert!(
                optimize(g).unwrap().value >= i1.min(i2) - 1e-9,
                "regression at G={g}"
            );
        }
    }

    #[test]
    fn tangent_delta_agrees_with_golden_section_on_density_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..30 {
            let g = rng.random::<f64>();
            let gamma = rng.random_range(0.0..=FRAC_PI_4);
            let analytic = optimal_delta(g, gamma);
            let numeric = optimal_delta_numeric(g, gamma);
            assert!(
                (analytic - numeric).abs() < 1e-6,
                "delta routes disagree at G={g}, gamma={gamma}: {analytic} vs {numeric}"
            );
        }
    }

    #[test]
    fn tangent_delta_matches_fine_grid_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..100 {
            let g = rng.random::<f64>();
            let gamma = rng.random_range(0.0..=FRAC_PI_4);
            let f = (1.0 - g * g).sqrt();
            let a = f + (1.0 - f) * gamma.cos().powi(2);
            let b = f + (1.0 - f) * gamma.sin().powi(2);
            // oracle: grid scan of the I₂ objective at step 1e−5
            let steps = (FRAC_PI_4 / 1e-5) as usize;
            let mut best = (f64::NEG_INFINITY, 0.0);
            for k in 0..=steps {
                let delta = FRAC_PI_4 * k as f64 / steps as f64;
                let value = 2.0 * (a * delta.cos() + b * delta.sin());
                if value > best.0 {
                    best = (value, delta);
                }
            }
            assert!((optimal_delta(g, gamma) - best.1).abs() < 1e-4);
        }
    }

    #[test]
    fn delta_special_cases() {
        for g in [0.1, 0.5, 0.9] {
            assert!((optimal_delta(g, FRAC_PI_4) - FRAC_PI_4).abs() < 1e-15);
        }
        assert!(optimal_delta(1.0, 0.0).abs() < 1e-15);
    }

    #[test]
    fn violation_region_original_scheme() {
        let (lo, hi) = violation_region(Scheme::Original);
        assert!((lo - 1.0 / SQRT_2).abs() < 1e-8);
        assert!((hi - (2.0 * SQRT_2 - 2.0).sqrt()).abs() < 1e-8);
    }

    #[test]
    fn violation_region_optimal_scheme_extends_to_full_strength() {
        let (lo, hi) = violation_region(Scheme::Optimal);
        assert!((lo - 1.0 / SQRT_2).abs() < 1e-8);
        assert!((hi - 1.0).abs() < 1e-9);
        assert!(optimize(0.85).unwrap().value > 2.0);
        assert!(optimize(0.99).unwrap().value > 2.0);
    }

    #[test]
    fn rejects_out_of_range_strength() {
        assert!(optimize(-0.2).is_err());
        assert!(optimize(1.01).is_err());
    }

    #[test]
    fn bisect_reports_non_bracketing() {
        let result = bisect(|x| x * x + 1.0, 0.0, 1.0, 1e-9, 40);
        assert!(matches!(result, Err(Error::NonBracketing { .. })));
    }
}
