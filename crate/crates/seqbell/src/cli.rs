//! Data-producing backends of the `seqbell` command-line interface.
//!
//! Each subcommand maps to one function here returning plain data, so the
//! binary stays a thin argument-parsing shell and everything is testable in
//! process. CSV carries 10 significant digits; JSON carries full doubles.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::montecarlo::{estimate_chsh, run_trials, TrialBatch, BLOCK_SIZE, RNG_ALGORITHM};
use crate::optimizer::{optimize, Optimum};
use crate::photonic::{
    induced_kraus, observable_angle, simulate_postselected, swap_check, weak_measurement_network,
    ElementDescriptor, SwapCheck,
};
use crate::protocol::{chsh_pair, ProtocolConfig, Scheme};
use crate::weakmeas::{Outcome, WeakMeasurement};

/// Operator-distance threshold for the circuit verification report.
pub const CIRCUIT_TOLERANCE: f64 = 1e-10;

pub const SWEEP_CSV_HEADER: &str = "G,gamma,delta,I1,I2,min";

/// One row of a strength sweep.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepRow {
    pub g: f64,
    pub gamma: f64,
    pub delta: f64,
    pub i1: f64,
    pub i2: f64,
    pub min_value: f64,
}

/// Evaluate the chosen scheme on an evenly spaced G grid including both
/// endpoints. Grid points are placed by exact interpolation, so round
/// fractions of the range land on exact values.
pub fn sweep_rows(g_min: f64, g_max: f64, steps: usize, scheme: Scheme) -> Result<Vec<SweepRow>> {
    if !(0.0..=1.0).contains(&g_min) || !(0.0..=1.0).contains(&g_max) || g_min >= g_max || steps < 2
    {
        return Err(Error::InvalidSweepRange {
            g_min,
            g_max,
            steps,
        });
    }
    let mut rows = Vec::with_capacity(steps);
    for k in 0..steps {
        let g = if k == 0 {
            g_min
        } else if k == steps - 1 {
            g_max
        } else {
            g_min + (g_max - g_min) * (k as f64 / (steps - 1) as f64)
        };
        rows.push(sweep_row(g, scheme)?);
    }
    Ok(rows)
}

fn sweep_row(g: f64, scheme: Scheme) -> Result<SweepRow> {
    let (config, gamma, delta) = match scheme {
        Scheme::Original => (
            ProtocolConfig::original(g)?,
            std::f64::consts::FRAC_PI_4,
            std::f64::consts::FRAC_PI_4,
        ),
        Scheme::Optimal => {
            let opt = optimize(g)?;
            (
                ProtocolConfig::optimal(g, opt.gamma_star, opt.delta_star)?,
                opt.gamma_star,
                opt.delta_star,
            )
        }
    };
    let pair = chsh_pair(&config);
    Ok(SweepRow {
        g,
        gamma,
        delta,
        i1: pair.i1,
        i2: pair.i2,
        min_value: pair.min_value(),
    })
}

/// Render sweep rows as CSV with 10 significant digits.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_sig(row.g, 10),
            fmt_sig(row.gamma, 10),
            fmt_sig(row.delta, 10),
            fmt_sig(row.i1, 10),
            fmt_sig(row.i2, 10),
            fmt_sig(row.min_value, 10),
        );
    }
    out
}

/// Parse a sweep CSV back into rows.
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == SWEEP_CSV_HEADER => {}
        other => {
            return Err(Error::Csv(format!(
                "expected header '{SWEEP_CSV_HEADER}', got {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Csv(format!(
                "expected 6 fields, got {}: '{line}'",
                fields.len()
            )));
        }
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|e| Error::Csv(format!("bad number '{s}': {e}")))
        };
        rows.push(SweepRow {
            g: num(fields[0])?,
            gamma: num(fields[1])?,
            delta: num(fields[2])?,
            i1: num(fields[3])?,
            i2: num(fields[4])?,
            min_value: num(fields[5])?,
        });
    }
    Ok(rows)
}

/// Report for the `optimize` subcommand.
pub fn optimize_report(g: f64) -> Result<Optimum> {
    optimize(g)
}

pub fn optimize_text(opt: &Optimum) -> String {
    format!(
        "G           = {}\n\
         scheme      = {}\n\
         gamma*      = {}\n\
         delta*      = {}\n\
         I1          = {}\n\
         I2          = {}\n\
         min(I1, I2) = {}\n",
        fmt_sig(opt.g, 10),
        opt.scheme_used,
        fmt_sig(opt.gamma_star, 10),
        fmt_sig(opt.delta_star, 10),
        fmt_sig(opt.i1, 10),
        fmt_sig(opt.i2, 10),
        fmt_sig(opt.value, 10),
    )
}

/// Metadata and estimates of one simulated experiment.
#[derive(Clone, Debug, Serialize)]
pub struct SimulationSummary {
    pub g: f64,
    pub scheme: Scheme,
    pub gamma: f64,
    pub delta: f64,
    pub shots: u64,
    pub seed: u64,
    pub rng: &'static str,
    pub block_size: u64,
    pub i1_hat: f64,
    pub i1_se: f64,
    pub i1_sigma_above_classical: f64,
    pub i2_hat: f64,
    pub i2_se: f64,
    pub i2_sigma_above_classical: f64,
    pub i1_analytic: f64,
    pub i2_analytic: f64,
}

/// Run the Monte Carlo experiment at the angles the chosen scheme picks for
/// this strength.
pub fn run_simulation(
    g: f64,
    shots: u64,
    seed: u64,
    scheme: Scheme,
) -> Result<(TrialBatch, SimulationSummary)> {
    let config = match scheme {
        Scheme::Original => ProtocolConfig::original(g)?,
        Scheme::Optimal => {
            let opt = optimize(g)?;
            ProtocolConfig::optimal(g, opt.gamma_star, opt.delta_star)?
        }
    };
    let batch = run_trials(&config, shots, seed);
    let estimate = estimate_chsh(&batch)?;
    let analytic = chsh_pair(&config);
    let (s1, s2) = estimate.sigma_above_classical();
    let summary = SimulationSummary {
        g,
        scheme,
        gamma: config.gamma(),
        delta: config.delta(),
        shots,
        seed,
        rng: RNG_ALGORITHM,
        block_size: BLOCK_SIZE,
        i1_hat: estimate.i1_hat,
        i1_se: estimate.i1_se,
        i1_sigma_above_classical: s1,
        i2_hat: estimate.i2_hat,
        i2_se: estimate.i2_se,
        i2_sigma_above_classical: s2,
        i1_analytic: analytic.i1,
        i2_analytic: analytic.i2,
    };
    Ok((batch, summary))
}

/// Verification report for the dual-rail circuit at one (θ, φ) setting.
#[derive(Clone, Debug, Serialize)]
pub struct CircuitReport {
    pub theta: f64,
    pub phi: f64,
    pub g: f64,
    pub swap: SwapCheck,
    /// Operator distance between the network-induced Kraus pair and the
    /// directly constructed one.
    pub kraus_distance: f64,
    /// Largest deviation of the simplified layout's post-selected branches
    /// from the same Kraus operators.
    pub postselect_distance: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub elements: Vec<ElementDescriptor>,
}

/// Run the photonic equivalence checks at one setting.
pub fn circuit_report(theta: f64, phi: f64) -> Result<CircuitReport> {
    let wm = WeakMeasurement::from_theta(theta, observable_angle(phi))?;
    let direct = wm.kraus_pair();
    let induced = induced_kraus(theta, phi);
    let kraus_distance = induced
        .k_plus
        .max_abs_diff(&direct.k_plus)
        .max(induced.k_minus.max_abs_diff(&direct.k_minus));

    // compare each post-selected branch against K·ψ for a spread of inputs
    let mut postselect_distance = 0.0f64;
    let probes: [[f64; 2]; 3] = [[1.0, 0.0], [0.0, 1.0], [0.8, 0.6]];
    for probe in probes {
        let input = [crate::qmath::re(probe[0]), crate::qmath::re(probe[1])];
        for outcome in Outcome::BOTH {
            let expected = direct.operator(outcome).mul_vec(&input);
            let expected_p: f64 = expected.iter().map(|a| a.norm_sqr()).sum();
            match simulate_postselected(theta, phi, outcome, &input) {
                Ok((post, p)) => {
                    postselect_distance = postselect_distance.max((p - expected_p).abs());
                    let scale = expected_p.sqrt();
                    for (got, want) in post.iter().zip(expected) {
                        postselect_distance = postselect_distance.max((got - want / scale).norm());
                    }
                }
                Err(Error::ZeroPostSelection) => {
                    postselect_distance = postselect_distance.max(expected_p);
                }
                Err(other) => return Err(other),
            }
        }
    }

    let swap = swap_check();
    let pass = swap.pass()
        && kraus_distance < CIRCUIT_TOLERANCE
        && postselect_distance < CIRCUIT_TOLERANCE;
    Ok(CircuitReport {
        theta,
        phi,
        g: wm.precision(),
        swap,
        kraus_distance,
        postselect_distance,
        tolerance: CIRCUIT_TOLERANCE,
        pass,
        elements: weak_measurement_network(theta, phi)
            .iter()
            .map(|e| e.descriptor())
            .collect(),
    })
}

pub fn circuit_text(report: &CircuitReport) -> String {
    format!(
        "theta                = {}\n\
         phi                  = {}\n\
         G                    = {}\n\
         swap table exact     = {}\n\
         kraus distance       = {:.3e}\n\
         postselect distance  = {:.3e}\n\
         tolerance            = {:.1e}\n\
         result               = {}\n",
        fmt_sig(report.theta, 10),
        fmt_sig(report.phi, 10),
        fmt_sig(report.g, 10),
        report.swap.table_exact,
        report.kraus_distance,
        report.postselect_distance,
        report.tolerance,
        if report.pass { "PASS" } else { "FAIL" },
    )
}

/// Format with the given number of significant digits, trimming trailing
/// zeros, falling back to scientific notation outside a readable range.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    if exponent < -4 || exponent >= sig as i32 {
        let mut s = format!("{:.*e}", sig - 1, x);
        if let Some(mantissa_end) = s.find('e') {
            let (mantissa, exp) = s.split_at(mantissa_end);
            let trimmed = mantissa.trim_end_matches('0').trim_end_matches('.');
            s = format!("{trimmed}{exp}");
        }
        s
    } else {
        let decimals = (sig as i32 - 1 - exponent).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn fmt_sig_round_trips_ten_digits() {
        for x in [
            0.0,
            0.8,
            1.0 / 3.0,
            2.262741699796952,
            123456.789,
            1e-7,
            -0.456,
            3.0e12,
            -2.0e-12,
        ] {
            let s = fmt_sig(x, 10);
            let parsed: f64 = s.parse().unwrap();
            let tolerance = 1e-9 * x.abs().max(1e-300);
            assert!((parsed - x).abs() <= tolerance, "{x} -> {s} -> {parsed}");
        }
        assert_eq!(fmt_sig(0.8, 10), "0.8");
        assert_eq!(fmt_sig(2.0, 10), "2");
        assert_eq!(fmt_sig(0.0, 10), "0");
    }

    #[test]
    fn sweep_hits_requested_grid_exactly() {
        let rows = sweep_rows(0.0, 1.0, 101, Scheme::Original).unwrap();
        assert_eq!(rows.len(), 101);
        assert_eq!(rows[0].g, 0.0);
        assert_eq!(rows[80].g, 0.8);
        assert_eq!(rows[100].g, 1.0);
        let crossover = &rows[80];
        assert!((crossover.i1 - 8.0 * SQRT_2 / 5.0).abs() < 1e-10);
        assert!((crossover.i2 - 8.0 * SQRT_2 / 5.0).abs() < 1e-10);
        let weakest = &rows[0];
        assert!(weakest.i1.abs() < 1e-12);
        assert!((weakest.i2 - 2.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn sweep_rejects_bad_ranges() {
        assert!(sweep_rows(0.5, 0.5, 10, Scheme::Original).is_err());
        assert!(sweep_rows(0.0, 1.2, 10, Scheme::Original).is_err());
        assert!(sweep_rows(0.0, 1.0, 1, Scheme::Original).is_err());
    }

    #[test]
    fn sweep_csv_round_trip_preserves_min_relation() {
        let rows = sweep_rows(0.0, 1.0, 21, Scheme::Optimal).unwrap();
        let parsed = parse_sweep_csv(&sweep_csv(&rows)).unwrap();
        assert_eq!(parsed.len(), rows.len());
        for (row, orig) in parsed.iter().zip(&rows) {
            assert!((row.g - orig.g).abs() < 1e-9);
            assert!((row.i1 - orig.i1).abs() < 1e-9);
            // the emitted min is the min of the emitted columns
            assert_eq!(row.min_value, row.i1.min(row.i2));
        }
    }

    #[test]
    fn optimize_report_text_contains_the_scheme() {
        let opt = optimize_report(0.6).unwrap();
        let text = optimize_text(&opt);
        assert!(text.contains("original"));
        assert!((opt.value - 2.0 * SQRT_2 * 0.6).abs() < 1e-12);
    }

    #[test]
    fn simulation_summary_is_reproducible() {
        let (batch_a, summary_a) = run_simulation(0.8, 50_000, 7, Scheme::Original).unwrap();
        let (batch_b, summary_b) = run_simulation(0.8, 50_000, 7, Scheme::Original).unwrap();
        assert_eq!(batch_a, batch_b);
        assert_eq!(
            serde_json::to_string(&summary_a).unwrap(),
            serde_json::to_string(&summary_b).unwrap()
        );
        assert_eq!(summary_a.rng, "chacha8");
    }

    #[test]
    fn circuit_report_passes_for_valid_settings() {
        let report = circuit_report(0.3, 0.5).unwrap();
        assert!(report.pass);
        assert!(report.kraus_distance < CIRCUIT_TOLERANCE);
        assert!(!report.elements.is_empty());
        // strength limits reported as precision factors
        assert!((circuit_report(0.0, 0.1).unwrap().g - 1.0).abs() < 1e-12);
        assert!(
            circuit_report(std::f64::consts::FRAC_PI_4, 0.1)
                .unwrap()
                .g
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn circuit_report_rejects_invalid_strength() {
        assert!(circuit_report(1.0, 0.0).is_err());
    }
}
