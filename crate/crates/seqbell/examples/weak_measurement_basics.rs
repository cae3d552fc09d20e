//! Build weak measurements across the strength range and check the defining
//! identities: the G/F trade-off, Kraus completeness, the outcome bias, and
//! the equivalence with the ancilla-dilation circuit.
//!
//! Run with: cargo run --release -p seqbell --example weak_measurement_basics

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use seqbell::qmath::{embed, phi_plus, Qubit};
use seqbell::weakmeas::{apply_conditional, dilation_kraus, Outcome, WeakMeasurement};

fn main() {
    println!("strength sweep of the optimal weak measurement (Z basis)\n");
    println!(
        "{:>8} {:>10} {:>10} {:>12} {:>14} {:>14}",
        "theta", "G", "F", "G^2+F^2", "completeness", "dilation"
    );

    for k in 0..=8 {
        let theta = FRAC_PI_4 * k as f64 / 8.0;
        let wm = WeakMeasurement::from_theta(theta, FRAC_PI_2).unwrap();
        let pair = wm.kraus_pair();
        let (g, f) = (wm.precision(), wm.quality());

        // the dilation circuit induces the same Kraus pair
        let induced = dilation_kraus(theta);
        let dilation_defect = induced
            .k_plus
            .max_abs_diff(&pair.k_plus)
            .max(induced.k_minus.max_abs_diff(&pair.k_minus));

        println!(
            "{theta:>8.4} {g:>10.6} {f:>10.6} {:>12.2e} {:>14.2e} {:>14.2e}",
            (g * g + f * f - 1.0).abs(),
            pair.completeness_defect(),
            dilation_defect,
        );
    }

    // outcome statistics on one half of an entangled pair: the bias follows
    // G times the local expectation, which vanishes for the reference state
    let state = phi_plus();
    let wm = WeakMeasurement::from_precision(0.8, FRAC_PI_4).unwrap();
    let (_, p_plus) = apply_conditional(&state, &wm, Qubit::Bob, Outcome::Plus).unwrap();
    let (_, p_minus) = apply_conditional(&state, &wm, Qubit::Bob, Outcome::Minus).unwrap();
    let expectation = (*state.rho() * embed(&wm.observable().matrix(), Qubit::Bob))
        .trace()
        .re;
    println!("\nG = 0.8 measurement on one half of the entangled pair:");
    println!("  p(+1) = {p_plus:.6}, p(-1) = {p_minus:.6}");
    println!(
        "  bias = {:.3e}, G*<observable> = {:.3e}",
        p_plus - p_minus,
        0.8 * expectation
    );
}
