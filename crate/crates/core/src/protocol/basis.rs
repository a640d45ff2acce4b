use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::{outcomes, pair_index, window, OutcomeLabel};
use crate::error::Result;
use crate::fock::C64;

/// Alice's complete orthonormal measurement basis on modes 2 and 3.
///
/// Vectors live in the `(N+1)(ν+1)`-dimensional span of `|k2> ⊗ |k3>`,
/// flattened as `k2 * (ν + 1) + k3`.
#[derive(Clone, Debug)]
pub struct MeasurementBasis {
    n_in: usize,
    n_res: usize,
    states: Vec<(OutcomeLabel, DVector<C64>)>,
}

impl MeasurementBasis {
    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_res(&self) -> usize {
        self.n_res
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[(OutcomeLabel, DVector<C64>)] {
        &self.states
    }

    pub fn get(&self, outcome: OutcomeLabel) -> Option<&DVector<C64>> {
        self.states.iter().find(|(o, _)| *o == outcome).map(|(_, v)| v)
    }

    /// Matrix of inner products `<φ_a|φ_b>`.
    pub fn gram(&self) -> DMatrix<C64> {
        let m = self.states.len();
        DMatrix::from_fn(m, m, |a, b| self.states[a].1.dotc(&self.states[b].1))
    }
}

/// Phase `exp(2πi λ k / 𝒞_l)` shared by the basis and Bob's correction.
pub(crate) fn sector_phase(lambda: usize, k: usize, card: usize) -> C64 {
    let angle = 2.0 * PI * ((lambda * k) % card) as f64 / card as f64;
    C64::from_polar(1.0, angle)
}

/// Amplitude of `|N-k>_2 |k+l>_3` in `|φ^{(l,λ)}>`.
pub(crate) fn basis_vector(n: usize, nu: usize, outcome: OutcomeLabel) -> Result<DVector<C64>> {
    let w = window(outcome.l, n, nu)?;
    let card = w.end() - w.start() + 1;
    let norm = 1.0 / (card as f64).sqrt();
    let mut v = DVector::zeros((n + 1) * (nu + 1));
    for k in w {
        let k3 = (k as i64 + outcome.l) as usize;
        v[pair_index(n - k, k3, nu)] = sector_phase(outcome.lambda, k, card) * norm;
    }
    Ok(v)
}

pub fn build_measurement_basis(n: usize, nu: usize) -> MeasurementBasis {
    let states = outcomes(n, nu)
        .map(|o| (o, basis_vector(n, nu, o).expect("outcome from enumeration")))
        .collect();
    MeasurementBasis { n_in: n, n_res: nu, states }
}
