//! Locate the strength window where both observer pairs violate the
//! classical bound simultaneously, for the fixed-angle scheme and for the
//! max-min optimized one.
//!
//! Run with: cargo run --release -p seqbell --example violation_region

use seqbell::optimizer::{optimize, violation_region};
use seqbell::protocol::Scheme;

fn main() {
    let (orig_lo, orig_hi) = violation_region(Scheme::Original);
    let (opt_lo, opt_hi) = violation_region(Scheme::Optimal);

    println!("double-violation window {{G : min(I1, I2) > 2}}\n");
    println!("  original scheme: ({orig_lo:.6}, {orig_hi:.6})");
    println!("  optimal scheme:  ({opt_lo:.6}, {opt_hi:.6})  (upper endpoint open)\n");

    println!("optimized min-CHSH near full strength:");
    for g in [0.90, 0.92, 0.94, 0.96, 0.98, 0.99, 1.0] {
        let value = optimize(g).unwrap().value;
        let status = if value > 2.0 { "violates" } else { "classical" };
        println!("  G = {g:<5} min CHSH = {value:.6}  {status}");
    }
    println!("\nthe optimized angles keep the window open for every G short of 1,");
    println!("where the max-min value lands on the classical bound exactly");
}
