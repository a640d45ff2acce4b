//! Figures of merit: Haar moments and sampling, teleportation fidelity and
//! average final entanglement, in closed form and by Monte Carlo.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Error, Result};
use crate::fock::{negativity, PureNumberState, ResourceState, TwoModeDensity, C64};
use crate::protocol::{
    apply_measurement, averaged_channel, cardinality, outcomes, window, OutcomeLabel, ProtocolRun,
};

/// Maximum imaginary residue tolerated in Hermitian sums.
pub const IMAG_TOL: f64 = 1e-12;

/// Haar moment `∫dψ |c_k|^α` (`beta = None`) or `∫dψ |c_k|^α |c_j|^β`, `k ≠ j`,
/// for states of `N` particles (dimension `N + 1`).
pub fn haar_moment(alpha: f64, beta: Option<f64>, n: usize) -> Result<f64> {
    if alpha <= -2.0 || beta.is_some_and(|b| b <= -2.0) {
        return Err(domain("Haar moments require α, β > -2"));
    }
    if beta.is_some() && n == 0 {
        return Err(domain("pair moments need at least two coefficients"));
    }
    let nf = n as f64;
    let ln = match beta {
        None => ln_gamma(1.0 + alpha / 2.0) + ln_gamma(nf + 1.0) - ln_gamma(nf + 1.0 + alpha / 2.0),
        Some(b) => {
            ln_gamma(1.0 + alpha / 2.0) + ln_gamma(1.0 + b / 2.0) + ln_gamma(nf + 1.0)
                - ln_gamma(nf + 1.0 + (alpha + b) / 2.0)
        }
    };
    Ok(ln.exp())
}

/// Deterministic source of Haar-random pure states.
///
/// Sample `i` draws from its own ChaCha stream keyed by `(seed, i)`, so any
/// subset of samples can be produced in any order.
#[derive(Clone, Debug)]
pub struct HaarSampler {
    dim: usize,
    seed: u64,
    counter: u64,
}

impl HaarSampler {
    /// Sampler for states of `n_particles` particles.
    pub fn new(n_particles: usize, seed: u64) -> Self {
        Self { dim: n_particles + 1, seed, counter: 0 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Normalized vector of independent standard complex Gaussians.
    pub fn sample_at(&self, index: u64) -> PureNumberState {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        loop {
            let v: Vec<C64> = (0..self.dim)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    C64::new(re, im)
                })
                .collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.0 {
                return PureNumberState::from_unit_vector_unchecked(
                    v.into_iter().map(|z| z / norm).collect(),
                );
            }
        }
    }

    pub fn sample(&mut self) -> PureNumberState {
        let s = self.sample_at(self.counter);
        self.counter += 1;
        s
    }
}

pub fn sample_haar(sampler: &mut HaarSampler) -> PureNumberState {
    sampler.sample()
}

/// Sample mean with its standard error (sample standard deviation / √n).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// `NaN` for fewer than two samples.
    pub std_error: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        let mean = pairwise_sum(values) / n as f64;
        let std_error = if n < 2 {
            f64::NAN
        } else {
            let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
            (pairwise_sum(&dev) / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        };
        Self { mean, std_error, samples: n }
    }

    /// `|mean - value| ≤ k σ`, with a zero spread meaning exact agreement to 1e-12.
    pub fn within_sigmas(&self, value: f64, k: f64) -> bool {
        let gap = (self.mean - value).abs();
        gap <= k * self.std_error || gap <= 1e-12
    }
}

/// Tree reduction; the result depends only on the order of `values`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn monte_carlo<F>(n: usize, samples: usize, seed: u64, f: F) -> Result<Estimate>
where
    F: Fn(&PureNumberState) -> Result<f64> + Sync,
{
    if samples == 0 {
        return Err(domain("Monte Carlo needs at least one sample"));
    }
    let sampler = HaarSampler::new(n, seed);
    let values = (0..samples as u64)
        .into_par_iter()
        .map(|i| f(&sampler.sample_at(i)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Estimate::from_values(&values))
}

/// Multiplicity `max{0, N+1-|k-j|}` of `(ρ34)_{k,j}` in the sector sums.
fn multiplicity(k: usize, j: usize, n: usize) -> f64 {
    (n as f64 + 1.0 - k.abs_diff(j) as f64).max(0.0)
}

/// Haar-averaged teleportation fidelity.
pub fn fidelity_closed_form(resource: &ResourceState, n: usize) -> Result<f64> {
    let d = resource.n_particles() + 1;
    let mut s = C64::new(0.0, 0.0);
    for k in 0..d {
        for j in 0..d {
            if k != j && k.abs_diff(j) <= n {
                s += resource.get(k, j) * (multiplicity(k, j, n) / (2.0 * (n as f64 + 1.0)));
            }
        }
    }
    if s.im.abs() > IMAG_TOL {
        return Err(Error::ImaginaryResidue(s.im));
    }
    Ok(2.0 / (n as f64 + 2.0) * (1.0 + s.re))
}

/// `⟨ψ|T[|ψ><ψ|]|ψ⟩` averaged over Haar-random inputs.
pub fn fidelity_monte_carlo(
    resource: &ResourceState,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    monte_carlo(n, samples, seed, |psi| averaged_channel(psi, resource)?.expectation(psi))
}

/// Haar- and outcome-averaged negativity of the teleported state.
pub fn avg_final_entanglement(resource: &ResourceState, n: usize) -> f64 {
    let d = resource.n_particles() + 1;
    let mut s = 0.0;
    for k in 0..d {
        for j in 0..d {
            if k != j && k.abs_diff(j) <= n {
                s += multiplicity(k, j, n) / (n as f64 + 1.0) * resource.get(k, j).norm();
            }
        }
    }
    PI / 8.0 * s
}

/// `Σ_{(l,λ)} p 𝒩(ρ14^{(l,λ)})` averaged over Haar-random inputs.
pub fn avg_entanglement_monte_carlo(
    resource: &ResourceState,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    let nu = resource.n_particles();
    // p 𝒩 is the same for every λ of a sector, so one representative per l
    // is weighted by 𝒞_l
    monte_carlo(n, samples, seed, |psi| {
        let mut acc = 0.0;
        for l in -(n as i64)..=nu as i64 {
            let r = apply_measurement(psi, resource, OutcomeLabel::new(l, 0))?;
            if let Some(state) = &r.state {
                acc += cardinality(l, n, nu)? as f64 * r.probability * negativity(state);
            }
        }
        Ok(acc)
    })
}

/// Haar-averaged negativity of the input state itself.
pub fn haar_negativity_monte_carlo(n: usize, samples: usize, seed: u64) -> Result<Estimate> {
    monte_carlo(n, samples, seed, |psi| Ok(negativity(&TwoModeDensity::pure(psi))))
}

/// `8E/π ≥ (N+2) f − 2` for the closed-form `f` and `E`.
pub fn triangle_bound_check(resource: &ResourceState, n: usize) -> Result<bool> {
    let f = fidelity_closed_form(resource, n)?;
    let e = avg_final_entanglement(resource, n);
    Ok(8.0 * e / PI >= (n as f64 + 2.0) * f - 2.0 - 1e-12)
}

/// Haar-averaged probability of outcomes whose conditional channel is the
/// identity: full window and a constant shifted block `ρ_{k+l,j+l}`.
pub fn perfect_outcome_probability(resource: &ResourceState, n: usize) -> f64 {
    let nu = resource.n_particles();
    if nu < n {
        return 0.0;
    }
    let mut p = 0.0;
    for l in 0..=(nu - n) {
        let first = resource.get(l, l);
        let constant = (l..=l + n).all(|a| (l..=l + n).all(|b| (resource.get(a, b) - first).norm() <= 1e-12));
        if constant && first.re > crate::protocol::ZERO_PROBABILITY {
            p += first.re;
        }
    }
    p
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeStats {
    pub outcome: OutcomeLabel,
    pub probability: f64,
    /// `None` when the outcome never occurs.
    pub conditional_fidelity: Option<f64>,
    pub conditional_negativity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TeleportReport {
    pub n_in: usize,
    pub n_res: usize,
    pub fidelity: f64,
    pub avg_entanglement: f64,
    pub per_outcome: Vec<OutcomeStats>,
}

impl TeleportReport {
    pub fn total_probability(&self) -> f64 {
        self.per_outcome.iter().map(|o| o.probability).sum()
    }

    /// `Σ p · F_cond` reassembled from the per-outcome entries.
    pub fn reassembled_fidelity(&self) -> f64 {
        self.per_outcome
            .iter()
            .map(|o| o.probability * o.conditional_fidelity.unwrap_or(0.0))
            .sum()
    }

    pub fn reassembled_entanglement(&self) -> f64 {
        self.per_outcome
            .iter()
            .map(|o| o.probability * o.conditional_negativity.unwrap_or(0.0))
            .sum()
    }
}

/// Haar-averaged report for a resource: outcome probabilities, conditional
/// fidelities and negativities from the second and first-absolute moments.
pub fn teleport_report(resource: &ResourceState, n: usize) -> Result<TeleportReport> {
    let nu = resource.n_particles();
    let m_sq = haar_moment(2.0, None, n)?;
    let m_quartic = haar_moment(4.0, None, n)?;
    let m_pair = if n > 0 { haar_moment(2.0, Some(2.0), n)? } else { 0.0 };
    let m_abs = if n > 0 { haar_moment(1.0, Some(1.0), n)? } else { 0.0 };

    let mut per_outcome = Vec::with_capacity((n + 1) * (nu + 1));
    let (mut fidelity, mut entanglement) = (0.0, 0.0);
    for o in outcomes(n, nu) {
        let w = window(o.l, n, nu)?;
        let card = (w.end() - w.start() + 1) as f64;
        let shift = |k: usize| (k as i64 + o.l) as usize;
        let (mut diag, mut coh, mut coh_abs) = (0.0, C64::new(0.0, 0.0), 0.0);
        for k in w.clone() {
            for j in w.clone() {
                let r = resource.get(shift(k), shift(j));
                if k == j {
                    diag += r.re;
                } else {
                    coh += r;
                    coh_abs += r.norm();
                }
            }
        }
        if coh.im.abs() > IMAG_TOL {
            return Err(Error::ImaginaryResidue(coh.im));
        }
        let probability = diag * m_sq / card;
        let weighted_fid = (diag * m_quartic + coh.re * m_pair) / card;
        let weighted_neg = 0.5 * coh_abs * m_abs / card;
        fidelity += weighted_fid;
        entanglement += weighted_neg;
        let occurs = probability > crate::protocol::ZERO_PROBABILITY;
        per_outcome.push(OutcomeStats {
            outcome: o,
            probability,
            conditional_fidelity: occurs.then(|| weighted_fid / probability),
            conditional_negativity: occurs.then(|| weighted_neg / probability),
        });
    }
    Ok(TeleportReport {
        n_in: n,
        n_res: nu,
        fidelity,
        avg_entanglement: entanglement,
        per_outcome,
    })
}

/// Report for one fixed input state from a protocol run.
pub fn single_input_report(run: &ProtocolRun, initial: &PureNumberState) -> Result<TeleportReport> {
    let per_outcome = run
        .outcomes
        .iter()
        .map(|rec| {
            let fid = rec.state.as_ref().map(|s| s.expectation(initial)).transpose()?;
            Ok(OutcomeStats {
                outcome: rec.outcome,
                probability: rec.probability,
                conditional_fidelity: fid,
                conditional_negativity: rec.state.as_ref().map(negativity),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let avg_entanglement = per_outcome
        .iter()
        .map(|o| o.probability * o.conditional_negativity.unwrap_or(0.0))
        .sum();
    Ok(TeleportReport {
        n_in: run.n_in,
        n_res: run.n_res,
        fidelity: run.averaged.expectation(initial)?,
        avg_entanglement,
        per_outcome,
    })
}
