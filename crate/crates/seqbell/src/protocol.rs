//! The three-observer scenario and its two CHSH parameters.
//!
//! Alice measures X or Z on qubit 1. Bob1 weakly measures qubit 2 along one
//! of the angles ±γ, then hands it to Bob2, who measures projectively along
//! ±δ. I₁ combines Alice–Bob1 correlators; I₂ combines Alice–Bob2
//! correlators on the state left behind by Bob1's unconditional channel,
//! averaged equally over his two settings. Everything here is evaluated by
//! explicit density-matrix arithmetic; the closed forms of
//! [`original_closed_forms`] exist as an independent cross-check.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qmath::{correlator, embed, phi_plus, Mat4, Qubit, TwoQubitState};
use crate::weakmeas::{apply_unconditional, Outcome, WeakMeasurement};

/// Alice's two observables are fixed: X and Z.
pub const ALICE_ANGLES: [f64; 2] = [0.0, FRAC_PI_2];

/// Angle-choice strategy for the two Bobs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// γ = δ = π/4, maximizing I₁ alone.
    Original,
    /// (γ, δ) chosen to maximize min(I₁, I₂).
    Optimal,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Original => write!(f, "original"),
            Scheme::Optimal => write!(f, "optimal"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(Scheme::Original),
            "optimal" => Ok(Scheme::Optimal),
            other => Err(Error::UnknownScheme(other.to_string())),
        }
    }
}

/// A full protocol instance: Bob1's strength G and the half-angles γ (Bob1)
/// and δ (Bob2), both in [0, π/4].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolConfig {
    g: f64,
    gamma: f64,
    delta: f64,
    scheme: Scheme,
}

impl ProtocolConfig {
    /// The original scheme: γ and δ pinned to π/4.
    pub fn original(g: f64) -> Result<Self> {
        check_g(g)?;
        Ok(Self {
            g,
            gamma: FRAC_PI_4,
            delta: FRAC_PI_4,
            scheme: Scheme::Original,
        })
    }

    pub fn optimal(g: f64, gamma: f64, delta: f64) -> Result<Self> {
        check_g(g)?;
        check_half_angle("gamma", gamma)?;
        check_half_angle("delta", delta)?;
        Ok(Self {
            g,
            gamma,
            delta,
            scheme: Scheme::Optimal,
        })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Bob1's weak measurement for setting index 0 (+γ) or 1 (−γ).
    pub fn bob1_measurement(&self, setting: u8) -> WeakMeasurement {
        let angle = if setting == 0 {
            self.gamma
        } else {
            -self.gamma
        };
        WeakMeasurement::from_precision(self.g, angle).expect("validated on construction")
    }

    /// Bob2's observable angle for setting index 0 (+δ) or 1 (−δ).
    pub fn bob2_angle(&self, setting: u8) -> f64 {
        if setting == 0 {
            self.delta
        } else {
            -self.delta
        }
    }
}

fn check_g(g: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::PrecisionOutOfRange(g));
    }
    Ok(())
}

fn check_half_angle(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_4).contains(&value) {
        return Err(Error::AngleOutOfRange {
            name,
            value,
            min: 0.0,
            max: FRAC_PI_4,
        });
    }
    Ok(())
}

/// The two CHSH parameters of one protocol instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChshPair {
    pub i1: f64,
    pub i2: f64,
}

impl ChshPair {
    pub fn min_value(&self) -> f64 {
        self.i1.min(self.i2)
    }
}

/// Correlator between Alice's projective outcome and Bob1's weak outcome:
/// Σ_± (±1)·tr[(I⊗K±) ρ (I⊗K±)† · (A⊗I)].
fn weak_correlator(state: &TwoQubitState, alice_angle: f64, wm: &WeakMeasurement) -> f64 {
    let alice = embed(
        &crate::qmath::observable(alice_angle).matrix(),
        Qubit::Alice,
    );
    let pair = wm.kraus_pair();
    let mut value = 0.0;
    for outcome in Outcome::BOTH {
        let k = embed(pair.operator(outcome), Qubit::Bob);
        let branch = k * *state.rho() * k.adjoint();
        value += outcome.sign() * (branch * alice).trace().re;
    }
    value
}

fn bob1_pair(g: f64, gamma: f64) -> [WeakMeasurement; 2] {
    let make = |angle| WeakMeasurement::from_precision(g, angle).expect("G in [0, 1]");
    [make(gamma), make(-gamma)]
}

/// I₁ for strength `g` and Bob1 half-angle `gamma`, independent of δ.
pub fn i1_given_angle(g: f64, gamma: f64) -> f64 {
    let state = phi_plus();
    let [wm_plus, wm_minus] = bob1_pair(g, gamma);
    // sign pattern: minus only on the (Z, −γ) term
    weak_correlator(&state, ALICE_ANGLES[0], &wm_plus)
        + weak_correlator(&state, ALICE_ANGLES[1], &wm_plus)
        + weak_correlator(&state, ALICE_ANGLES[0], &wm_minus)
        - weak_correlator(&state, ALICE_ANGLES[1], &wm_minus)
}

/// I₂ for strength `g`, Bob1 half-angle `gamma`, Bob2 half-angle `delta`,
/// from the density-matrix path.
pub fn i2_given_angles(g: f64, gamma: f64, delta: f64) -> f64 {
    let state = phi_plus();
    let mut rho = Mat4::zero();
    for wm in bob1_pair(g, gamma) {
        rho = rho
            + apply_unconditional(&state, &wm, Qubit::Bob)
                .rho()
                .scale(0.5);
    }
    let after = TwoQubitState::new_unchecked(rho);
    correlator(&after, ALICE_ANGLES[0], delta)
        + correlator(&after, ALICE_ANGLES[1], delta)
        + correlator(&after, ALICE_ANGLES[0], -delta)
        - correlator(&after, ALICE_ANGLES[1], -delta)
}

/// Both CHSH parameters for a protocol instance.
pub fn chsh_pair(config: &ProtocolConfig) -> ChshPair {
    ChshPair {
        i1: i1_given_angle(config.g, config.gamma),
        i2: i2_given_angles(config.g, config.gamma, config.delta),
    }
}

/// Closed forms of the original scheme, (2√2·G, √2·(1 + √(1−G²))).
///
/// These are the analytic counterpart of [`chsh_pair`] at γ = δ = π/4 and
/// serve as its cross-check; the density-matrix path never calls them.
pub fn original_closed_forms(g: f64) -> (f64, f64) {
    debug_assert!((0.0..=1.0).contains(&g));
    let f = (1.0 - g * g).sqrt();
    (2.0 * SQRT_2 * g, SQRT_2 * (1.0 + f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Analytic benchmark for I₂, derived by hand from the channel algebra:
    /// 2cosδ[F + (1−F)cos²γ] + 2sinδ[F + (1−F)sin²γ].
    fn i2_benchmark(g: f64, gamma: f64, delta: f64) -> f64 {
        let f = (1.0 - g * g).sqrt();
        let a = f + (1.0 - f) * gamma.cos().powi(2);
        let b = f + (1.0 - f) * gamma.sin().powi(2);
        2.0 * delta.cos() * a + 2.0 * delta.sin() * b
    }

    #[test]
    fn strong_bob1_forces_monogamy() {
        let pair = chsh_pair(&ProtocolConfig::original(1.0).unwrap());
        assert!((pair.i1 - 2.0 * SQRT_2).abs() < 1e-12);
        assert!((pair.i2 - SQRT_2).abs() < 1e-12);
        assert!(pair.min_value() < 2.0);
    }

    #[test]
    fn vanishing_bob1_leaves_full_correlation_for_bob2() {
        let pair = chsh_pair(&ProtocolConfig::original(0.0).unwrap());
        assert!(pair.i1.abs() < 1e-12);
        assert!((pair.i2 - 2.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn crossover_point_balances_both_parameters() {
        // hand-solved: 2√2·G = √2(1 + √(1−G²)) gives G = 4/5 and value 8√2/5
        let pair = chsh_pair(&ProtocolConfig::original(0.8).unwrap());
        let expected = 8.0 * SQRT_2 / 5.0;
        assert!((pair.i1 - expected).abs() < 1e-12);
        assert!((pair.i2 - expected).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_match_density_path_on_grid() {
        for k in 0..=100 {
            let g = k as f64 / 100.0;
            let pair = chsh_pair(&ProtocolConfig::original(g).unwrap());
            let (i1, i2) = original_closed_forms(g);
            assert!((pair.i1 - i1).abs() < 1e-10, "i1 mismatch at G={g}");
            assert!((pair.i2 - i2).abs() < 1e-10, "i2 mismatch at G={g}");
        }
    }

    #[test]
    fn double_violation_window_edges() {
        let (i1, _) = original_closed_forms(1.0 / SQRT_2);
        assert!((i1 - 2.0).abs() < 1e-12);
        let g_upper = (2.0 * SQRT_2 - 2.0).sqrt();
        let (_, i2) = original_closed_forms(g_upper);
        assert!((i2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn double_violation_holds_strictly_inside_the_window() {
        for g in [0.72, 0.8, 0.85, 0.9] {
            let pair = chsh_pair(&ProtocolConfig::original(g).unwrap());
            assert!(
                pair.i1 > 2.0 && pair.i2 > 2.0,
                "no double violation at G={g}"
            );
        }
    }

    #[test]
    fn i2_density_path_matches_benchmark() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let g = rng.random::<f64>();
            let gamma = rng.random_range(0.0..=FRAC_PI_4);
            let delta = rng.random_range(0.0..=FRAC_PI_4);
            let via_density = i2_given_angles(g, gamma, delta);
            assert!(
                (via_density - i2_benchmark(g, gamma, delta)).abs() < 1e-10,
                "mismatch at G={g}, gamma={gamma}, delta={delta}"
            );
        }
    }

    #[test]
    fn i2_special_points() {
        let f = |g: f64| (1.0 - g * g).sqrt();
        for g in [0.0, 0.5, 0.9] {
            assert!(
                (i2_given_angles(g, FRAC_PI_4, FRAC_PI_4) - SQRT_2 * (1.0 + f(g))).abs() < 1e-12
            );
        }
        // Bob1 measuring X projectively preserves only the X correlation
        assert!((i2_given_angles(1.0, 0.0, 0.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn i1_ignores_delta() {
        let a = chsh_pair(&ProtocolConfig::optimal(0.9, 0.3, 0.1).unwrap()).i1;
        let b = chsh_pair(&ProtocolConfig::optimal(0.9, 0.3, 0.7).unwrap()).i1;
        assert_eq!(a, b);
    }

    #[test]
    fn chsh_respects_tsirelson_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..100 {
            let config = ProtocolConfig::optimal(
                rng.random::<f64>(),
                rng.random_range(0.0..=FRAC_PI_4),
                rng.random_range(0.0..=FRAC_PI_4),
            )
            .unwrap();
            let pair = chsh_pair(&config);
            assert!(pair.i1.abs() <= 2.0 * SQRT_2 + 1e-9);
            assert!(pair.i2.abs() <= 2.0 * SQRT_2 + 1e-9);
        }
    }

    #[test]
    fn i1_monotone_in_gamma_and_optimized_i2_antitone() {
        let g: f64 = 0.9;
        let f = (1.0 - g * g).sqrt();
        let mut last_i1 = f64::NEG_INFINITY;
        let mut last_i2 = f64::INFINITY;
        for k in 0..=40 {
            let gamma = FRAC_PI_4 * k as f64 / 40.0;
            let i1 = i1_given_angle(g, gamma);
            assert!(i1 >= last_i1 - 1e-12);
            last_i1 = i1;
            // δ chosen by the analytic argmax at this γ
            let a = f + (1.0 - f) * gamma.cos().powi(2);
            let b = f + (1.0 - f) * gamma.sin().powi(2);
            let i2 = i2_given_angles(g, gamma, b.atan2(a));
            assert!(i2 <= last_i2 + 1e-12);
            last_i2 = i2;
        }
    }

    #[test]
    fn config_validation() {
        assert!(ProtocolConfig::original(1.5).is_err());
        assert!(ProtocolConfig::original(-0.1).is_err());
        assert!(ProtocolConfig::optimal(0.5, FRAC_PI_2, 0.1).is_err());
        assert!(ProtocolConfig::optimal(0.5, 0.1, -0.2).is_err());
        let original = ProtocolConfig::original(0.5).unwrap();
        assert_eq!(original.gamma(), FRAC_PI_4);
        assert_eq!(original.delta(), FRAC_PI_4);
    }

    #[test]
    fn scheme_string_round_trip() {
        assert_eq!("original".parse::<Scheme>().unwrap(), Scheme::Original);
        assert_eq!("optimal".parse::<Scheme>().unwrap(), Scheme::Optimal);
        assert_eq!(Scheme::Optimal.to_string(), "optimal");
        assert!("projective".parse::<Scheme>().is_err());
    }
}
