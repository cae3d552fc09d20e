//! Simulate the nine-strength experiment with finite statistics: sample
//! trials at the optimizer's angle choices, estimate both CHSH parameters
//! with standard errors, and report how far each sits above the classical
//! bound.
//!
//! Run with: cargo run --release -p seqbell --example monte_carlo_experiment

use seqbell::montecarlo::{estimate_chsh, run_trials};
use seqbell::optimizer::optimize;
use seqbell::protocol::{chsh_pair, ProtocolConfig};

fn main() {
    let shots = 200_000;
    let seed = 2024;
    println!("simulated experiment, {shots} trials per strength (seed {seed})\n");
    println!(
        "{:>6} {:>22} {:>22} {:>10} {:>10}",
        "G", "I1 (est ± se)", "I2 (est ± se)", "I1 sigma", "I2 sigma"
    );

    for g in [0.0, 0.6, 0.75, 0.8, 0.84, 0.88, 0.92, 0.96, 1.0] {
        let opt = optimize(g).unwrap();
        let config = ProtocolConfig::optimal(g, opt.gamma_star, opt.delta_star).unwrap();
        let batch = run_trials(&config, shots, seed);
        let est = estimate_chsh(&batch).unwrap();
        let theory = chsh_pair(&config);
        let (s1, s2) = est.sigma_above_classical();
        println!(
            "{g:>6.2} {:>11.4} ± {:>7.4} {:>11.4} ± {:>7.4} {s1:>10.1} {s2:>10.1}   (theory {:.4}, {:.4})",
            est.i1_hat, est.i1_se, est.i2_hat, est.i2_se, theory.i1, theory.i2,
        );
    }

    println!("\npositive sigma columns certify violations; with optimized angles both");
    println!("stay above the bound together for every strength strictly inside (0.707, 1)");
}
