//! Process vectors for quantum field correlators with indefinite causal order.
//!
//! Local Hilbert spaces are labeled registers ([`tensor`]). A process vector
//! over the six registers `x1, x2, ẋ, y1, y2, ẏ` ([`process`]) defines a
//! sesquilinear state whose contraction with field insertions reproduces
//! ordinary two-point functions when the causal order is definite, and
//! generalizes them to superpositions of orders. Finite field models live in
//! [`field`], independent reference correlators in [`oracle`], commutator
//! based causal indicators in [`causal`], and the interchangeable contraction
//! strategies in [`strategy`].

pub mod causal;
pub mod error;
pub mod field;
pub mod linalg;
pub mod network;
pub mod oracle;
pub mod process;
pub mod strategy;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::C64;

/// Engine version stamped into CLI outputs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
