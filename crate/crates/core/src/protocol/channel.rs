use nalgebra::DMatrix;

use super::{outcomes, window, OutcomeLabel};
use crate::error::{Error, Result};
use crate::fock::{PureNumberState, ResourceState, TwoModeDensity, C64};

/// Outcomes at or below this probability carry no conditional state.
pub const ZERO_PROBABILITY: f64 = 1e-15;

#[derive(Clone, Debug)]
pub struct MeasurementResult {
    pub outcome: OutcomeLabel,
    pub probability: f64,
    /// `ρ14^{(l,λ)}` after Bob's correction; `None` for zero-probability outcomes.
    pub state: Option<TwoModeDensity>,
}

/// `p_{(l,λ)} ρ14^{(l,λ)}` as an `(N+1) × (N+1)` matrix over mode-1 occupations.
///
/// Bob's phases cancel the measurement phases, so the result does not depend on `λ`.
pub fn weighted_post_state(
    initial: &PureNumberState,
    resource: &ResourceState,
    outcome: OutcomeLabel,
) -> Result<DMatrix<C64>> {
    let (n, nu) = (initial.n_particles(), resource.n_particles());
    outcome.validate(n, nu)?;
    let w = window(outcome.l, n, nu)?;
    let card = (w.end() - w.start() + 1) as f64;
    let c = initial.coeffs();
    let shift = |k: usize| (k as i64 + outcome.l) as usize;
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for k in w.clone() {
        for j in w.clone() {
            m[(k, j)] = resource.get(shift(k), shift(j)) * c[k] * c[j].conj() / card;
        }
    }
    Ok(m)
}

pub fn apply_measurement(
    initial: &PureNumberState,
    resource: &ResourceState,
    outcome: OutcomeLabel,
) -> Result<MeasurementResult> {
    let m = weighted_post_state(initial, resource, outcome)?;
    let probability: f64 = m.diagonal().iter().map(|z| z.re).sum();
    let state = (probability > ZERO_PROBABILITY)
        .then(|| TwoModeDensity::from_matrix_unchecked(m / C64::new(probability, 0.0), true));
    Ok(MeasurementResult { outcome, probability, state })
}

/// The outcome-averaged teleported state `T[|ψ><ψ|]`, summed directly over sectors.
pub fn averaged_channel(
    initial: &PureNumberState,
    resource: &ResourceState,
) -> Result<TwoModeDensity> {
    let (n, nu) = (initial.n_particles(), resource.n_particles());
    let c = initial.coeffs();
    let mut m = DMatrix::<C64>::zeros(n + 1, n + 1);
    for l in -(n as i64)..=nu as i64 {
        let w = window(l, n, nu)?;
        for k in w.clone() {
            for j in w.clone() {
                let (a, b) = ((k as i64 + l) as usize, (j as i64 + l) as usize);
                m[(k, j)] += c[k] * c[j].conj() * resource.get(a, b);
            }
        }
    }
    Ok(TwoModeDensity::from_matrix_unchecked(m, true))
}

#[derive(Clone, Debug)]
pub struct OutcomeRecord {
    pub outcome: OutcomeLabel,
    pub probability: f64,
    pub state: Option<TwoModeDensity>,
}

/// Every outcome of one protocol run together with the averaged output.
#[derive(Clone, Debug)]
pub struct ProtocolRun {
    pub n_in: usize,
    pub n_res: usize,
    pub outcomes: Vec<OutcomeRecord>,
    pub averaged: TwoModeDensity,
}

impl ProtocolRun {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    pub fn get(&self, outcome: OutcomeLabel) -> Option<&OutcomeRecord> {
        self.outcomes.iter().find(|o| o.outcome == outcome)
    }

    /// Largest elementwise deviation between two runs over the same outcomes.
    pub fn max_deviation(&self, other: &ProtocolRun) -> Result<f64> {
        if self.outcomes.len() != other.outcomes.len() {
            return Err(Error::Dimension { expected: self.outcomes.len(), got: other.outcomes.len() });
        }
        let mut worst = self.averaged.max_abs_diff(&other.averaged);
        for (a, b) in self.outcomes.iter().zip(&other.outcomes) {
            if a.outcome != b.outcome {
                return Err(crate::error::domain("outcome lists are ordered differently"));
            }
            worst = worst.max((a.probability - b.probability).abs());
            match (&a.state, &b.state) {
                (Some(x), Some(y)) => worst = worst.max(x.max_abs_diff(y)),
                (None, None) => {}
                _ => worst = worst.max(a.probability.max(b.probability)),
            }
        }
        Ok(worst)
    }
}

/// Runs the protocol through the closed-form per-outcome states.
///
/// The averaged state is the probability-weighted sum of the conditional states.
pub fn run_protocol(initial: &PureNumberState, resource: &ResourceState) -> Result<ProtocolRun> {
    let (n, nu) = (initial.n_particles(), resource.n_particles());
    let mut avg = DMatrix::<C64>::zeros(n + 1, n + 1);
    let mut records = Vec::with_capacity((n + 1) * (nu + 1));
    for outcome in outcomes(n, nu) {
        let weighted = weighted_post_state(initial, resource, outcome)?;
        avg += &weighted;
        let probability: f64 = weighted.diagonal().iter().map(|z| z.re).sum();
        let state = (probability > ZERO_PROBABILITY).then(|| {
            TwoModeDensity::from_matrix_unchecked(weighted / C64::new(probability, 0.0), true)
        });
        records.push(OutcomeRecord { outcome, probability, state });
    }
    Ok(ProtocolRun {
        n_in: n,
        n_res: nu,
        outcomes: records,
        averaged: TwoModeDensity::from_matrix_unchecked(avg, true),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::negativity;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn max_ent(nu: usize) -> ResourceState {
        let a = vec![C64::new(1.0 / ((nu + 1) as f64).sqrt(), 0.0); nu + 1];
        ResourceState::pure(&PureNumberState::new(a).unwrap())
    }

    fn sample_state(n: usize) -> PureNumberState {
        let v: Vec<C64> =
            (0..=n).map(|k| C64::new(1.0 + k as f64, 0.3 * k as f64 - 0.5)).collect();
        PureNumberState::normalized(v).unwrap()
    }

    #[test]
    fn max_ent_perfect_sectors() {
        for (n, nu) in [(1, 2), (2, 5), (3, 3)] {
            let psi = sample_state(n);
            let target = TwoModeDensity::pure(&psi);
            let res = max_ent(nu);
            for o in outcomes(n, nu) {
                let r = apply_measurement(&psi, &res, o).unwrap();
                let fid = r.state.as_ref().map(|s| s.expectation(&psi).unwrap()).unwrap_or(0.0);
                if 0 <= o.l && o.l <= nu as i64 - n as i64 {
                    assert!(r.state.unwrap().max_abs_diff(&target) < 1e-14);
                    assert!((fid - 1.0).abs() < 1e-12);
                } else {
                    assert!(fid < 1.0 - 1e-6, "l={} fid={fid}", o.l);
                }
            }
        }
    }

    #[test]
    fn separable_resource_gives_diagonal_states() {
        let res = ResourceState::diagonal(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let psi = sample_state(2);
        for o in outcomes(2, 3) {
            if let Some(s) = apply_measurement(&psi, &res, o).unwrap().state {
                assert_eq!(negativity(&s), 0.0);
            }
        }
        let t = averaged_channel(&psi, &res).unwrap();
        assert_eq!(negativity(&t), 0.0);
    }

    #[test]
    fn probabilities_sum_to_one_and_channel_matches() {
        let res = max_ent(3);
        let psi = sample_state(2);
        let run = run_protocol(&psi, &res).unwrap();
        assert!((run.total_probability() - 1.0).abs() < 1e-13);
        let direct = averaged_channel(&psi, &res).unwrap();
        assert!(run.averaged.max_abs_diff(&direct) < 1e-13);
        assert!((direct.trace() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn fock_input_gives_diagonal_output() {
        let psi = PureNumberState::fock(3, 1).unwrap();
        let res = max_ent(5);
        let t = averaged_channel(&psi, &res).unwrap();
        assert_eq!(negativity(&t), 0.0);
    }

    #[test]
    fn max_ent_average_decomposition() {
        // (ν−N+1)/(ν+1) |ψ><ψ| + 1/(ν+1) Σ_{l outside [0, ν−N]} Q_l |ψ><ψ| Q_l
        let (n, nu) = (2usize, 4usize);
        let psi = sample_state(n);
        let t = averaged_channel(&psi, &max_ent(nu)).unwrap();
        let rho = psi.density();
        let mut want = rho.clone() * C64::new((nu - n + 1) as f64 / (nu + 1) as f64, 0.0);
        let outside = (-(n as i64)..0).chain((nu - n + 1) as i64..=nu as i64);
        for l in outside {
            let w = window(l, n, nu).unwrap();
            let q = DMatrix::from_fn(n + 1, n + 1, |k, j| {
                if k == j && w.contains(&k) {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            want += (&q * &rho * &q) * C64::new(1.0 / (nu + 1) as f64, 0.0);
        }
        assert!(crate::fock::max_abs_diff(t.matrix(), &want) < 1e-14);
    }

    #[test]
    fn zero_probability_outcome_has_no_state() {
        let psi = PureNumberState::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let res = ResourceState::diagonal(&[1.0, 0.0]).unwrap();
        // sector l = 1 needs mode 3 occupied
        let r = apply_measurement(&psi, &res, OutcomeLabel::new(1, 0)).unwrap();
        assert_eq!(r.probability, 0.0);
        assert!(r.state.is_none());
    }

    #[test]
    fn invalid_outcome_is_rejected() {
        let psi = sample_state(1);
        assert!(apply_measurement(&psi, &max_ent(1), OutcomeLabel::new(2, 0)).is_err());
    }
}
