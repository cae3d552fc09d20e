//! Simulation of CHSH tests shared by three observers on one entangled pair.
//!
//! Alice holds qubit 1; Bob1 measures qubit 2 weakly with tunable strength
//! and passes it on to Bob2, who measures projectively. The crate computes
//! the two CHSH parameters of the Alice–Bob1 and Alice–Bob2 pairs from
//! explicit density-matrix evolution, optimizes the measurement angles so
//! that both exceed the classical bound over the widest possible strength
//! range, samples finite-statistics experiments, and verifies a dual-rail
//! linear-optics realization of the weak measurement.
//!
//! Start with the runnable programs in `examples/`, or use the `seqbell`
//! binary for CSV/JSON output.
//!
//! ```
//! use seqbell::optimizer::optimize;
//! use seqbell::protocol::{chsh_pair, ProtocolConfig};
//!
//! // fixed angles: strong measurements break the Alice–Bob2 violation
//! let fixed = chsh_pair(&ProtocolConfig::original(0.96)?);
//! assert!(fixed.i1 > 2.0 && fixed.i2 < 2.0);
//!
//! // optimized angles keep both parameters above the classical bound
//! let best = optimize(0.96)?;
//! assert!(best.value > 2.0 && (best.i1 - best.i2).abs() < 1e-7);
//! # Ok::<(), seqbell::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod montecarlo;
pub mod optimizer;
pub mod photonic;
pub mod protocol;
pub mod qmath;
pub mod weakmeas;

pub use error::{Error, Result};
pub use protocol::{ChshPair, ProtocolConfig, Scheme};
pub use qmath::{ObservableXZ, Qubit, TwoQubitState};
pub use weakmeas::{KrausPair, Outcome, WeakMeasurement};
