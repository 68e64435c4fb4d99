//! Learning a hidden partition through a same-cluster oracle that may lie a
//! bounded number of times.
//!
//! The crate covers the whole pipeline at desk scale: partitions and their
//! counts, the two-sign instances built from answers, the liar game between
//! a questioner and an adversarial responder (with an exact minimax solver
//! for tiny parameters), oracle sessions, the adaptive and non-adaptive
//! learners, closed-form query bounds, and a simulation harness.

pub mod bounds;
pub mod coloring;
pub mod error;
pub mod game;
pub mod harness;
pub mod instance;
pub mod learners;
pub mod oracle;
pub mod pair;
pub mod partition;

pub use error::{Error, Result};
pub use pair::{Pair, Sign};
pub use partition::{Limits, Partition, Uniqueness};
