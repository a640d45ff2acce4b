//! Teleportation of bosonic modes with particle-number-conserving resources.
//!
//! Two-mode states are stored in the fixed-total sector `|k> ⊗ |N-k>` and
//! indexed by `k`.

pub mod error;
pub mod fock;
pub mod linalg;
pub mod metrics;
pub mod multimode;
pub mod protocol;
pub mod resources;
pub mod sweep;
pub mod validation;

pub use error::{Error, Result};
pub use fock::{FockLabel, PureNumberState, ResourceState, TwoModeDensity, C64};
