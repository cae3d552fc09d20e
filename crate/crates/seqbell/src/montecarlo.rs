//! Finite-statistics simulation of the three-observer experiment.
//!
//! Per trial: the three settings are drawn uniformly, Bob1's outcome is
//! sampled from his Kraus pair on the shared state and the state collapses,
//! then Alice's and Bob2's joint projective outcome is sampled from the
//! post-measurement state. Counts accumulate in a table indexed by settings
//! and outcomes, from which the two CHSH parameters are estimated with
//! binomial standard errors.
//!
//! Trials run in fixed-size blocks, each on its own ChaCha8 stream derived
//! from the batch seed, so results are bit-reproducible and independent of
//! how blocks would be scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::protocol::{chsh_pair, ChshPair, ProtocolConfig, ALICE_ANGLES};
use crate::qmath::{embed, observable, phi_plus, Qubit};
use crate::weakmeas::{apply_conditional, Outcome};

/// RNG identity recorded in output metadata.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Trials per independently seeded RNG stream.
pub const BLOCK_SIZE: u64 = 1 << 16;

const CELLS: usize = 64;

/// Outcome counts of a batch of trials, indexed by
/// (alice_setting, bob1_setting, bob2_setting, a, b1, b2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialBatch {
    shots: u64,
    seed: u64,
    counts: [u64; CELLS],
}

fn cell(settings: [u8; 3], outcomes: [usize; 3]) -> usize {
    let mut idx = 0;
    for s in settings {
        debug_assert!(s < 2);
        idx = idx * 2 + s as usize;
    }
    for o in outcomes {
        debug_assert!(o < 2);
        idx = idx * 2 + o;
    }
    idx
}

impl TrialBatch {
    /// Rebuild a batch from a raw counts table (for example one parsed back
    /// from CSV). `shots` is the table total.
    pub fn from_counts(counts: [u64; CELLS], seed: u64) -> Self {
        let shots = counts.iter().sum();
        Self {
            shots,
            seed,
            counts,
        }
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counts(&self) -> &[u64; CELLS] {
        &self.counts
    }

    pub fn count(&self, settings: [u8; 3], outcomes: [Outcome; 3]) -> u64 {
        self.counts[cell(settings, outcomes.map(Outcome::index))]
    }

    /// Total trials recorded for one setting combination.
    pub fn setting_total(&self, settings: [u8; 3]) -> u64 {
        let base = cell(settings, [0, 0, 0]);
        self.counts[base..base + 8].iter().sum()
    }

    /// Full 64-row counts table as CSV, settings 0/1 and outcomes ±1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(COUNTS_CSV_HEADER);
        out.push('\n');
        for a_set in 0..2u8 {
            for b1_set in 0..2u8 {
                for b2_set in 0..2u8 {
                    for (a, a_label) in OUTCOME_LABELS.iter().enumerate() {
                        for (b1, b1_label) in OUTCOME_LABELS.iter().enumerate() {
                            for (b2, b2_label) in OUTCOME_LABELS.iter().enumerate() {
                                let n = self.counts[cell([a_set, b1_set, b2_set], [a, b1, b2])];
                                out.push_str(&format!(
                                    "{a_set},{b1_set},{b2_set},{a_label},{b1_label},{b2_label},{n}\n",
                                ));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

pub const COUNTS_CSV_HEADER: &str = "alice_setting,bob1_setting,bob2_setting,a,b1,b2,count";

const OUTCOME_LABELS: [&str; 2] = ["1", "-1"];

/// Parse a counts table written by [`TrialBatch::to_csv`].
pub fn counts_from_csv(text: &str) -> Result<[u64; CELLS]> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == COUNTS_CSV_HEADER => {}
        other => {
            return Err(Error::Csv(format!(
                "expected header '{COUNTS_CSV_HEADER}', got {other:?}"
            )))
        }
    }
    let mut counts = [0u64; CELLS];
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Csv(format!(
                "expected 7 fields, got {}: '{line}'",
                fields.len()
            )));
        }
        let setting = |s: &str| -> Result<u8> {
            match s {
                "0" => Ok(0),
                "1" => Ok(1),
                other => Err(Error::Csv(format!("bad setting '{other}'"))),
            }
        };
        let outcome = |s: &str| -> Result<usize> {
            match s {
                "1" | "+1" => Ok(0),
                "-1" => Ok(1),
                other => Err(Error::Csv(format!("bad outcome '{other}'"))),
            }
        };
        let settings = [
            setting(fields[0])?,
            setting(fields[1])?,
            setting(fields[2])?,
        ];
        let outcomes = [
            outcome(fields[3])?,
            outcome(fields[4])?,
            outcome(fields[5])?,
        ];
        let n: u64 = fields[6]
            .trim()
            .parse()
            .map_err(|e| Error::Csv(format!("bad count '{}': {e}", fields[6])))?;
        counts[cell(settings, outcomes)] += n;
    }
    Ok(counts)
}

/// CHSH estimates with one-standard-deviation errors.
#[derive(Clone, Copy, Debug)]
pub struct Estimate {
    pub i1_hat: f64,
    pub i2_hat: f64,
    pub i1_se: f64,
    pub i2_se: f64,
}

impl Estimate {
    /// How many standard errors each estimate sits above the classical
    /// bound of 2.
    pub fn sigma_above_classical(&self) -> (f64, f64) {
        (
            (self.i1_hat - 2.0) / self.i1_se,
            (self.i2_hat - 2.0) / self.i2_se,
        )
    }
}

/// Per-trial sampling distributions, precomputed once per config.
struct Tables {
    /// P(b1 = +1) for each Bob1 setting.
    p_plus: [f64; 2],
    /// Cumulative P(a, b2) per (b1_setting, b1_outcome, alice_setting,
    /// b2_setting), over outcome pairs ordered (+,+), (+,−), (−,+), (−,−).
    joint_cdf: [[[[[f64; 4]; 2]; 2]; 2]; 2],
}

impl Tables {
    fn build(config: &ProtocolConfig) -> Self {
        let state = phi_plus();
        let mut p_plus = [0.0; 2];
        let mut joint_cdf = [[[[[0.0; 4]; 2]; 2]; 2]; 2];
        for b1_set in 0..2u8 {
            let wm = config.bob1_measurement(b1_set);
            for outcome in Outcome::BOTH {
                let (post, p) = match apply_conditional(&state, &wm, Qubit::Bob, outcome) {
                    Ok(pair) => pair,
                    // branch never occurs; its joint table is never sampled
                    Err(_) => (state, 0.0),
                };
                if outcome == Outcome::Plus {
                    p_plus[b1_set as usize] = p;
                }
                for a_set in 0..2usize {
                    let alice = observable(ALICE_ANGLES[a_set]).projectors();
                    let alice = [alice.0, alice.1];
                    for b2_set in 0..2u8 {
                        let bob2 = observable(config.bob2_angle(b2_set)).projectors();
                        let bob2 = [bob2.0, bob2.1];
                        let mut cdf = [0.0; 4];
                        let mut acc = 0.0;
                        for (k, (a, b2)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate()
                        {
                            let joint =
                                embed(&alice[a], Qubit::Alice) * embed(&bob2[b2], Qubit::Bob);
                            let p = (*post.rho() * joint).trace().re.max(0.0);
                            acc += p;
                            cdf[k] = acc;
                        }
                        cdf[3] = 1.0;
                        joint_cdf[b1_set as usize][outcome.index()][a_set][b2_set as usize] = cdf;
                    }
                }
            }
        }
        Tables { p_plus, joint_cdf }
    }
}

/// Sample one block of trials on its own RNG stream. Blocks commute: counts
/// merge by addition, so any partitioning of blocks across workers yields
/// the same table.
fn run_block(tables: &Tables, seed: u64, block: u64, trials: u64, counts: &mut [u64; CELLS]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    for _ in 0..trials {
        let a_set: u8 = rng.random_range(0..2);
        let b1_set: u8 = rng.random_range(0..2);
        let b2_set: u8 = rng.random_range(0..2);
        let b1 = usize::from(rng.random::<f64>() >= tables.p_plus[b1_set as usize]);
        let cdf = &tables.joint_cdf[b1_set as usize][b1][a_set as usize][b2_set as usize];
        let u: f64 = rng.random();
        let pair = cdf.iter().position(|&edge| u < edge).unwrap_or(3);
        let (a, b2) = (pair / 2, pair % 2);
        counts[cell([a_set, b1_set, b2_set], [a, b1, b2])] += 1;
    }
}

/// Run `shots` trials of the configured protocol, reproducibly for a fixed
/// seed.
pub fn run_trials(config: &ProtocolConfig, shots: u64, seed: u64) -> TrialBatch {
    let tables = Tables::build(config);
    let mut counts = [0u64; CELLS];
    for block in 0..shots.div_ceil(BLOCK_SIZE) {
        let trials = (shots - block * BLOCK_SIZE).min(BLOCK_SIZE);
        run_block(&tables, seed, block, trials, &mut counts);
    }
    TrialBatch {
        shots,
        seed,
        counts,
    }
}

/// Estimate both CHSH parameters from a counts table.
///
/// Each correlator is (N₊₊ + N₋₋ − N₊₋ − N₋₊)/N over the trials with the
/// relevant pair of settings; standard errors propagate the per-correlator
/// binomial variance (1 − E²)/N in quadrature.
pub fn estimate_chsh(batch: &TrialBatch) -> Result<Estimate> {
    for a_set in 0..2u8 {
        for b1_set in 0..2u8 {
            for b2_set in 0..2u8 {
                if batch.setting_total([a_set, b1_set, b2_set]) == 0 {
                    return Err(Error::InsufficientData {
                        alice: a_set,
                        bob1: b1_set,
                        bob2: b2_set,
                    });
                }
            }
        }
    }

    let mut i1 = 0.0;
    let mut var1 = 0.0;
    let mut i2 = 0.0;
    let mut var2 = 0.0;
    for first in 0..2u8 {
        for second in 0..2u8 {
            // minus sign on the primed-primed term only
            let sign = if first == 1 && second == 1 { -1.0 } else { 1.0 };

            // Alice–Bob1, marginal over Bob2
            let (mut agree, mut total) = (0u64, 0u64);
            for b2_set in 0..2u8 {
                for a in 0..2 {
                    for b1 in 0..2 {
                        for b2 in 0..2 {
                            let n = batch.counts[cell([first, second, b2_set], [a, b1, b2])];
                            total += n;
                            if a == b1 {
                                agree += n;
                            }
                        }
                    }
                }
            }
            let e = (2.0 * agree as f64 - total as f64) / total as f64;
            i1 += sign * e;
            var1 += (1.0 - e * e) / total as f64;

            // Alice–Bob2, marginal over Bob1
            let (mut agree, mut total) = (0u64, 0u64);
            for b1_set in 0..2u8 {
                for a in 0..2 {
                    for b1 in 0..2 {
                        for b2 in 0..2 {
                            let n = batch.counts[cell([first, b1_set, second], [a, b1, b2])];
                            total += n;
                            if a == b2 {
                                agree += n;
                            }
                        }
                    }
                }
            }
            let e = (2.0 * agree as f64 - total as f64) / total as f64;
            i2 += sign * e;
            var2 += (1.0 - e * e) / total as f64;
        }
    }
    Ok(Estimate {
        i1_hat: i1,
        i2_hat: i2,
        i1_se: var1.sqrt(),
        i2_se: var2.sqrt(),
    })
}

/// The analytic values the estimator converges to for this config.
pub fn analytic_reference(config: &ProtocolConfig) -> ChshPair {
    chsh_pair(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::optimize;
    use std::f64::consts::SQRT_2;

    // χ² quantile for 7 degrees of freedom at tail probability 1e−6
    const CHI2_7DOF_TAIL_1E6: f64 = 40.5;

    fn optimal_config(g: f64) -> ProtocolConfig {
        let opt = optimize(g).unwrap();
        ProtocolConfig::optimal(g, opt.gamma_star, opt.delta_star).unwrap()
    }

    #[test]
    fn same_seed_reproduces_bit_for_bit() {
        let config = ProtocolConfig::original(0.8).unwrap();
        let a = run_trials(&config, 200_000, 99);
        let b = run_trials(&config, 200_000, 99);
        assert_eq!(a, b);
        let ea = estimate_chsh(&a).unwrap();
        let eb = estimate_chsh(&b).unwrap();
        assert_eq!(ea.i1_hat.to_bits(), eb.i1_hat.to_bits());
        assert_eq!(ea.i2_hat.to_bits(), eb.i2_hat.to_bits());
        // a different seed shifts the counts
        assert_ne!(run_trials(&config, 200_000, 100), a);
    }

    #[test]
    fn counts_are_independent_of_block_partitioning() {
        let config = ProtocolConfig::original(0.8).unwrap();
        let shots = 2 * BLOCK_SIZE + 12_345;
        let ordered = run_trials(&config, shots, 31);
        // merge the same blocks in reverse order
        let tables = Tables::build(&config);
        let mut counts = [0u64; CELLS];
        run_block(&tables, 31, 2, 12_345, &mut counts);
        run_block(&tables, 31, 1, BLOCK_SIZE, &mut counts);
        run_block(&tables, 31, 0, BLOCK_SIZE, &mut counts);
        assert_eq!(&counts, ordered.counts());
    }

    #[test]
    fn counts_total_matches_shots_and_settings_are_uniform() {
        let shots = 100_000;
        let batch = run_trials(&ProtocolConfig::original(0.8).unwrap(), shots, 7);
        assert_eq!(batch.counts().iter().sum::<u64>(), shots);
        let expected = shots as f64 / 8.0;
        let mut chi2 = 0.0;
        for a in 0..2u8 {
            for b1 in 0..2u8 {
                for b2 in 0..2u8 {
                    let n = batch.setting_total([a, b1, b2]) as f64;
                    chi2 += (n - expected).powi(2) / expected;
                }
            }
        }
        assert!(
            chi2 < CHI2_7DOF_TAIL_1E6,
            "setting draw not uniform: chi2 = {chi2}"
        );
    }

    #[test]
    fn zero_strength_gives_fair_coin_outcomes_for_bob1() {
        let batch = run_trials(&ProtocolConfig::original(0.0).unwrap(), 100_000, 21);
        let mut plus = 0u64;
        for a_set in 0..2u8 {
            for b1_set in 0..2u8 {
                for b2_set in 0..2u8 {
                    for a in 0..2 {
                        for b2 in 0..2 {
                            plus += batch.counts()[cell([a_set, b1_set, b2_set], [a, 0, b2])];
                        }
                    }
                }
            }
        }
        let frac = plus as f64 / batch.shots() as f64;
        assert!((frac - 0.5).abs() < 0.01, "Bob1 outcome fraction {frac}");
    }

    #[test]
    fn projective_bob1_leaves_sqrt2_for_bob2() {
        let batch = run_trials(&ProtocolConfig::original(1.0).unwrap(), 100_000, 5);
        let est = estimate_chsh(&batch).unwrap();
        assert!((est.i2_hat - SQRT_2).abs() < 3.0 * est.i2_se);
    }

    #[test]
    fn crossover_point_estimates_match_analytic_values() {
        let config = ProtocolConfig::original(0.8).unwrap();
        let batch = run_trials(&config, 1_000_000, 11);
        let est = estimate_chsh(&batch).unwrap();
        let reference = analytic_reference(&config);
        assert!((est.i1_hat - reference.i1).abs() < 3.0 * est.i1_se);
        assert!((est.i2_hat - reference.i2).abs() < 3.0 * est.i2_se);
        let (s1, s2) = est.sigma_above_classical();
        assert!(
            s1 > 10.0 && s2 > 10.0,
            "double violation not significant: {s1}, {s2}"
        );
    }

    #[test]
    fn strong_regime_with_optimized_angles_matches_theory() {
        let g = 0.96;
        let config = optimal_config(g);
        let batch = run_trials(&config, 1_000_000, 13);
        let est = estimate_chsh(&batch).unwrap();
        let theory = optimize(g).unwrap();
        assert!((est.i1_hat - theory.i1).abs() < 3.0 * est.i1_se);
        assert!((est.i2_hat - theory.i2).abs() < 3.0 * est.i2_se);
    }

    #[test]
    fn perfect_synthetic_counts_reach_the_classical_bound() {
        // all four correlators equal to 1 make each CHSH sum 1+1+1−1 = 2
        let mut counts = [0u64; CELLS];
        for a_set in 0..2u8 {
            for b1_set in 0..2u8 {
                for b2_set in 0..2u8 {
                    counts[cell([a_set, b1_set, b2_set], [0, 0, 0])] = 100;
                    counts[cell([a_set, b1_set, b2_set], [1, 1, 1])] = 100;
                }
            }
        }
        let est = estimate_chsh(&TrialBatch::from_counts(counts, 0)).unwrap();
        assert_eq!(est.i1_hat, 2.0);
        assert_eq!(est.i2_hat, 2.0);
        assert_eq!(est.i1_se, 0.0);
    }

    #[test]
    fn missing_setting_combination_is_reported() {
        let batch = run_trials(&ProtocolConfig::original(0.5).unwrap(), 50_000, 3);
        let mut counts = *batch.counts();
        let base = cell([1, 0, 1], [0, 0, 0]);
        for slot in counts[base..base + 8].iter_mut() {
            *slot = 0;
        }
        let err = estimate_chsh(&TrialBatch::from_counts(counts, 3)).unwrap_err();
        match err {
            Error::InsufficientData { alice, bob1, bob2 } => {
                assert_eq!((alice, bob1, bob2), (1, 0, 1));
            }
            other => panic!("wrong error: {other}"),
        }
    }

    #[test]
    fn standard_error_shrinks_like_inverse_sqrt_shots() {
        let config = ProtocolConfig::original(0.75).unwrap();
        let se = |shots| {
            estimate_chsh(&run_trials(&config, shots, 17))
                .unwrap()
                .i1_se
        };
        let (a, b, c) = (se(10_000), se(40_000), se(160_000));
        assert!((a / b - 2.0).abs() < 0.4, "10k→40k ratio {}", a / b);
        assert!((b / c - 2.0).abs() < 0.4, "40k→160k ratio {}", b / c);
    }

    #[test]
    fn estimator_is_consistent_across_seeds() {
        let config = ProtocolConfig::original(0.8).unwrap();
        let reference = analytic_reference(&config);
        let mut hits = 0;
        for seed in 0..100 {
            let est = estimate_chsh(&run_trials(&config, 10_000, seed)).unwrap();
            if (est.i1_hat - reference.i1).abs() < 5.0 * est.i1_se
                && (est.i2_hat - reference.i2).abs() < 5.0 * est.i2_se
            {
                hits += 1;
            }
        }
        assert!(hits >= 99, "only {hits}/100 seeds within 5 SE");
    }

    #[test]
    fn no_signaling_in_alice_marginals() {
        let batch = run_trials(&optimal_config(0.9), 100_000, 23);
        for a_set in 0..2u8 {
            let mut fractions = Vec::new();
            for b1_set in 0..2u8 {
                for b2_set in 0..2u8 {
                    let total = batch.setting_total([a_set, b1_set, b2_set]) as f64;
                    let mut plus = 0u64;
                    for b1 in 0..2 {
                        for b2 in 0..2 {
                            plus += batch.counts()[cell([a_set, b1_set, b2_set], [0, b1, b2])];
                        }
                    }
                    let p = plus as f64 / total;
                    let se = (p * (1.0 - p) / total).sqrt();
                    fractions.push((p, se));
                }
            }
            for (p, se) in &fractions[1..] {
                let (p0, se0) = fractions[0];
                let combined = (se * se + se0 * se0).sqrt();
                assert!(
                    (p - p0).abs() < 5.0 * combined,
                    "Alice marginal depends on Bob settings"
                );
            }
        }
    }

    #[test]
    fn csv_round_trip_preserves_counts() {
        let batch = run_trials(&ProtocolConfig::original(0.6).unwrap(), 30_000, 41);
        let parsed = counts_from_csv(&batch.to_csv()).unwrap();
        assert_eq!(&parsed, batch.counts());
        assert!(counts_from_csv("nonsense\n1,2,3\n").is_err());
    }
}
