//! The two-mode teleportation protocol.
//!
//! Alice holds mode 2 of `|ψ12>` (N particles) and mode 3 of the resource
//! `ρ34` (ν particles). She measures modes 2 and 3 in a number-conserving
//! basis labelled by `(l, λ)`, sends the record to Bob, and Bob applies a
//! correction to mode 4.

mod basis;
mod channel;
mod correction;
mod joint;

pub use basis::{build_measurement_basis, MeasurementBasis};
pub use channel::{
    apply_measurement, averaged_channel, run_protocol, weighted_post_state, MeasurementResult,
    OutcomeRecord, ProtocolRun, ZERO_PROBABILITY,
};
pub use correction::{ancilla_occupation, bob_correction, dilated_correction_check, DilationReport};
pub(crate) use correction::block_unitary;
pub use joint::{
    measurement_projector, correction_operator, oracle_full_protocol, oracle_outcome, JointState,
    LocalOperator, OperatorTerm, ReducedState,
};

use std::ops::RangeInclusive;

use crate::error::{domain, Result};

/// Alice's measurement record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutcomeLabel {
    pub l: i64,
    pub lambda: usize,
}

impl OutcomeLabel {
    pub fn new(l: i64, lambda: usize) -> Self {
        Self { l, lambda }
    }

    /// Fails unless `l ∈ [-N, ν]` and `λ < 𝒞_l`.
    pub fn validate(&self, n: usize, nu: usize) -> Result<()> {
        let c = cardinality(self.l, n, nu)?;
        if self.lambda >= c {
            return Err(domain(format!(
                "λ = {} out of range for l = {} (𝒞_l = {c})",
                self.lambda, self.l
            )));
        }
        Ok(())
    }
}

/// Range of `k` (particles in mode 1) that contribute to sector `l`.
pub fn window(l: i64, n: usize, nu: usize) -> Result<RangeInclusive<usize>> {
    let (ni, nui) = (n as i64, nu as i64);
    if l < -ni || l > nui {
        return Err(domain(format!("l = {l} outside [-{n}, {nu}]")));
    }
    let lo = (-l).max(0) as usize;
    let hi = ni.min(nui - l) as usize;
    Ok(lo..=hi)
}

/// `𝒞_l`, the number of Fock pairs in sector `l` and of phases `λ` it admits.
pub fn cardinality(l: i64, n: usize, nu: usize) -> Result<usize> {
    let w = window(l, n, nu)?;
    Ok(w.end() - w.start() + 1)
}

/// Every outcome in ascending `l`, then `λ`.
pub fn outcomes(n: usize, nu: usize) -> impl Iterator<Item = OutcomeLabel> {
    (-(n as i64)..=nu as i64).flat_map(move |l| {
        let c = cardinality(l, n, nu).expect("l in range");
        (0..c).map(move |lambda| OutcomeLabel::new(l, lambda))
    })
}

/// Index of the pair `(k2, k3)` in the flattened mode-2/mode-3 space.
pub(crate) fn pair_index(k2: usize, k3: usize, nu: usize) -> usize {
    k2 * (nu + 1) + k3
}
