//! Brute-force joint-state simulation of the protocol.
//!
//! States of several modes are density matrices over an explicit list of
//! [`FockLabel`]s. Operators act on a subset of modes through their matrix
//! elements between local occupation patterns, and are applied as explicit
//! matrices `ρ -> O ρ O†`. Nothing here uses the closed-form sector sums.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;

use super::basis::{basis_vector, sector_phase};
use super::channel::{OutcomeRecord, ProtocolRun, ZERO_PROBABILITY};
use super::{outcomes, window, OutcomeLabel};
use crate::error::{domain, Error, Result};
use crate::fock::{partial_trace_23, FockLabel, PureNumberState, ResourceState, TwoModeDensity, C64};

/// One matrix element `amp |out><in|` of a local operator.
#[derive(Clone, Debug)]
pub struct OperatorTerm {
    pub out: Vec<usize>,
    pub inp: Vec<usize>,
    pub amp: C64,
}

/// An operator acting on the listed modes, identity elsewhere.
#[derive(Clone, Debug)]
pub struct LocalOperator {
    modes: Vec<usize>,
    terms: Vec<OperatorTerm>,
}

impl LocalOperator {
    pub fn new(modes: Vec<usize>, terms: Vec<OperatorTerm>) -> Result<Self> {
        for t in &terms {
            if t.out.len() != modes.len() || t.inp.len() != modes.len() {
                return Err(Error::Dimension { expected: modes.len(), got: t.out.len() });
            }
        }
        Ok(Self { modes, terms })
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn terms(&self) -> &[OperatorTerm] {
        &self.terms
    }

    /// True when every term maps between patterns of equal particle number.
    pub fn conserves_number(&self) -> bool {
        self.terms.iter().all(|t| t.out.iter().sum::<usize>() == t.inp.iter().sum::<usize>())
    }
}

/// Density matrix over an explicit basis of multi-mode Fock labels.
#[derive(Clone, Debug)]
pub struct JointState {
    n_in: usize,
    n_res: usize,
    labels: Vec<FockLabel>,
    matrix: DMatrix<C64>,
}

impl JointState {
    /// `|ψ12><ψ12| ⊗ ρ34` on the reachable support `{(k, N-k, s, ν-s)}`.
    pub fn product(initial: &PureNumberState, resource: &ResourceState) -> Self {
        let (n, nu) = (initial.n_particles(), resource.n_particles());
        let c = initial.coeffs();
        let mut labels = Vec::with_capacity((n + 1) * (nu + 1));
        for k in 0..=n {
            for s in 0..=nu {
                labels.push(FockLabel::new(vec![k, n - k, s, nu - s]));
            }
        }
        let d = labels.len();
        let matrix = DMatrix::from_fn(d, d, |a, b| {
            let (k, s) = (a / (nu + 1), a % (nu + 1));
            let (j, t) = (b / (nu + 1), b % (nu + 1));
            c[k] * c[j].conj() * resource.get(s, t)
        });
        Self { n_in: n, n_res: nu, labels, matrix }
    }

    pub fn from_parts(
        n_in: usize,
        n_res: usize,
        labels: Vec<FockLabel>,
        matrix: DMatrix<C64>,
    ) -> Result<Self> {
        if matrix.nrows() != labels.len() || matrix.ncols() != labels.len() {
            return Err(Error::Dimension { expected: labels.len(), got: matrix.nrows() });
        }
        Ok(Self { n_in, n_res, labels, matrix })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_res(&self) -> usize {
        self.n_res
    }

    pub fn labels(&self) -> &[FockLabel] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// `O ρ O†` for a local operator `O`; the new basis holds every image label.
    pub fn apply(&self, op: &LocalOperator) -> Result<JointState> {
        for &m in op.modes() {
            if self.labels.first().is_some_and(|l| m >= l.modes()) {
                return Err(domain(format!("operator acts on mode {m} outside the state")));
            }
        }
        let mut by_input: HashMap<&[usize], Vec<&OperatorTerm>> = HashMap::new();
        for t in op.terms() {
            by_input.entry(t.inp.as_slice()).or_default().push(t);
        }

        let mut images: BTreeMap<FockLabel, usize> = BTreeMap::new();
        let mut entries: Vec<(FockLabel, usize, C64)> = Vec::new();
        for (col, label) in self.labels.iter().enumerate() {
            let local: Vec<usize> = op.modes().iter().map(|&m| label.get(m)).collect();
            if let Some(terms) = by_input.get(local.as_slice()) {
                for t in terms {
                    let mut occ = label.occupations().to_vec();
                    for (&m, &o) in op.modes().iter().zip(&t.out) {
                        occ[m] = o;
                    }
                    let out = FockLabel::new(occ);
                    images.entry(out.clone()).or_insert(0);
                    entries.push((out, col, t.amp));
                }
            }
        }
        let new_labels: Vec<FockLabel> = images.keys().cloned().collect();
        for (i, v) in images.values_mut().enumerate() {
            *v = i;
        }
        let mut o = DMatrix::<C64>::zeros(new_labels.len(), self.dim());
        for (out, col, amp) in entries {
            o[(images[&out], col)] += amp;
        }
        let matrix = &o * &self.matrix * o.adjoint();
        Ok(JointState { n_in: self.n_in, n_res: self.n_res, labels: new_labels, matrix })
    }

    /// Traces out every mode not listed in `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<ReducedState> {
        let modes = self.labels.first().map_or(0, FockLabel::modes);
        if keep.iter().any(|&m| m >= modes) {
            return Err(domain("partial trace keeps a mode the state does not have"));
        }
        let traced: Vec<usize> = (0..modes).filter(|m| !keep.contains(m)).collect();
        let project = |l: &FockLabel, which: &[usize]| -> Vec<usize> {
            which.iter().map(|&m| l.get(m)).collect()
        };

        let mut kept: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for l in &self.labels {
            kept.entry(project(l, keep)).or_insert(0);
        }
        for (i, v) in kept.values_mut().enumerate() {
            *v = i;
        }
        let mut m = DMatrix::<C64>::zeros(kept.len(), kept.len());
        // group basis states by the occupation of the traced modes
        let mut groups: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
        for (i, l) in self.labels.iter().enumerate() {
            groups.entry(project(l, &traced)).or_default().push((i, kept[&project(l, keep)]));
        }
        for members in groups.values() {
            for &(a, ra) in members {
                for &(b, rb) in members {
                    m[(ra, rb)] += self.matrix[(a, b)];
                }
            }
        }
        let labels = kept.into_keys().map(FockLabel::new).collect();
        Ok(ReducedState { labels, matrix: m })
    }
}

/// Reduced density over the labels of the kept modes.
#[derive(Clone, Debug)]
pub struct ReducedState {
    pub labels: Vec<FockLabel>,
    pub matrix: DMatrix<C64>,
}

impl ReducedState {
    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// Reinterprets a two-mode reduced state with fixed total `T` as a
    /// [`TwoModeDensity`] indexed by the first mode's occupation.
    pub fn into_two_mode(self) -> Result<TwoModeDensity> {
        let mut total = None;
        for l in &self.labels {
            if l.modes() != 2 {
                return Err(domain("reduced state is not a two-mode state"));
            }
            match total {
                None => total = Some(l.total()),
                Some(t) if t != l.total() => {
                    return Err(domain("reduced state does not have a fixed particle number"))
                }
                _ => {}
            }
        }
        let t = total.ok_or_else(|| domain("empty reduced state"))?;
        let mut m = DMatrix::<C64>::zeros(t + 1, t + 1);
        for (a, la) in self.labels.iter().enumerate() {
            for (b, lb) in self.labels.iter().enumerate() {
                m[(la.get(0), lb.get(0))] = self.matrix[(a, b)];
            }
        }
        let trace: f64 = m.diagonal().iter().map(|z| z.re).sum();
        Ok(TwoModeDensity::from_matrix_unchecked(m, (trace - 1.0).abs() <= 1e-12))
    }
}

/// `P23^{(l,λ)}` as an operator on modes 2 and 3 (indices 1 and 2).
pub fn measurement_projector(n: usize, nu: usize, outcome: OutcomeLabel) -> Result<LocalOperator> {
    outcome.validate(n, nu)?;
    let v = basis_vector(n, nu, outcome)?;
    let support: Vec<(Vec<usize>, C64)> = (0..v.len())
        .filter(|&i| v[i].norm() > 0.0)
        .map(|i| (vec![i / (nu + 1), i % (nu + 1)], v[i]))
        .collect();
    let mut terms = Vec::with_capacity(support.len() * support.len());
    for (out, a) in &support {
        for (inp, b) in &support {
            terms.push(OperatorTerm { out: out.clone(), inp: inp.clone(), amp: a * b.conj() });
        }
    }
    LocalOperator::new(vec![1, 2], terms)
}

/// Bob's correction `V4^{(l,λ)}` as an operator on mode 4 (index 3).
pub fn correction_operator(n: usize, nu: usize, outcome: OutcomeLabel) -> Result<LocalOperator> {
    outcome.validate(n, nu)?;
    let w = window(outcome.l, n, nu)?;
    let card = w.end() - w.start() + 1;
    let terms = w
        .map(|k| OperatorTerm {
            out: vec![n - k],
            inp: vec![(nu as i64 - k as i64 - outcome.l) as usize],
            amp: sector_phase(outcome.lambda, k, card),
        })
        .collect();
    LocalOperator::new(vec![3], terms)
}

/// Projects, optionally corrects, and traces out modes 2 and 3 for one outcome.
///
/// Returns the unnormalized `p ρ14` as a state of modes 1 and 4.
pub fn oracle_outcome(
    joint: &JointState,
    outcome: OutcomeLabel,
    corrected: bool,
) -> Result<TwoModeDensity> {
    let (n, nu) = (joint.n_in(), joint.n_res());
    let p = measurement_projector(n, nu, outcome)?;
    if !p.conserves_number() {
        return Err(domain("measurement projector does not conserve particle number"));
    }
    let mut state = joint.apply(&p)?;
    if corrected {
        state = state.apply(&correction_operator(n, nu, outcome)?)?;
    }
    if state.dim() == 0 {
        return Err(domain("projection annihilated the support"));
    }
    partial_trace_23(&state)
}

/// The full protocol evaluated on explicit joint states.
pub fn oracle_full_protocol(
    initial: &PureNumberState,
    resource: &ResourceState,
) -> Result<ProtocolRun> {
    let (n, nu) = (initial.n_particles(), resource.n_particles());
    let joint = JointState::product(initial, resource);
    let mut avg = DMatrix::<C64>::zeros(n + 1, n + 1);
    let mut records = Vec::new();
    for outcome in outcomes(n, nu) {
        let weighted = oracle_outcome(&joint, outcome, true)?;
        if weighted.n_particles() != n {
            return Err(Error::Dimension { expected: n + 1, got: weighted.n_particles() + 1 });
        }
        let probability = weighted.trace();
        avg += weighted.matrix();
        let state = (probability > ZERO_PROBABILITY).then(|| {
            TwoModeDensity::from_matrix_unchecked(
                weighted.into_matrix() / C64::new(probability, 0.0),
                true,
            )
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

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn max_ent(nu: usize) -> ResourceState {
        let a = vec![c(1.0 / ((nu + 1) as f64).sqrt(), 0.0); nu + 1];
        ResourceState::pure(&PureNumberState::new(a).unwrap())
    }

    #[test]
    fn product_state_dimension_and_trace() {
        let psi = PureNumberState::normalized(vec![c(1.0, 0.0), c(0.0, 2.0), c(0.5, 0.5)]).unwrap();
        let res = ResourceState::diagonal(&[0.5, 0.25, 0.25, 0.0]).unwrap();
        let j = JointState::product(&psi, &res);
        assert_eq!(j.dim(), 3 * 4);
        assert!((j.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_projector_reduction_is_product_of_marginals() {
        let psi = PureNumberState::normalized(vec![c(1.0, 0.0), c(0.3, -0.4)]).unwrap();
        let res = ResourceState::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        let joint = JointState::product(&psi, &res);
        let id_terms = (0..=1)
            .flat_map(|a| (0..=2).map(move |b| (a, b)))
            .map(|(a, b)| OperatorTerm { out: vec![a, b], inp: vec![a, b], amp: c(1.0, 0.0) })
            .collect();
        let id = LocalOperator::new(vec![1, 2], id_terms).unwrap();
        let after = joint.apply(&id).unwrap();
        let red = after.partial_trace(&[0, 3]).unwrap();
        assert!((red.trace() - joint.trace()).abs() < 1e-14);
        // tr23 of |ψ><ψ| ⊗ ρ34 = diag(|c_k|²) ⊗ diag(ρ_ss) on (k, ν-s)
        for (i, li) in red.labels.iter().enumerate() {
            let (k, s) = (li.get(0), 2 - li.get(1));
            let want = psi.coeffs()[k].norm_sqr() * res.get(s, s).re;
            assert!((red.matrix[(i, i)].re - want).abs() < 1e-14);
        }
        // modes 1 and 4 do not have a fixed total here
        assert!(red.into_two_mode().is_err());
    }

    #[test]
    fn perfect_outcome_reproduces_input() {
        // N=1, ν=2, outcome (0, 0) with the maximally entangled resource
        let psi = PureNumberState::normalized(vec![c(0.6, 0.1), c(-0.2, 0.7)]).unwrap();
        let joint = JointState::product(&psi, &max_ent(2));
        let weighted = oracle_outcome(&joint, OutcomeLabel::new(0, 0), true).unwrap();
        let p = weighted.trace();
        // 1/(ν+1) split evenly over the 𝒞_0 = 2 phases
        assert!((p - 1.0 / 6.0).abs() < 1e-14);
        let target = TwoModeDensity::pure(&psi);
        let got = TwoModeDensity::from_matrix_unchecked(weighted.into_matrix() / c(p, 0.0), true);
        assert!(got.max_abs_diff(&target) < 1e-14);
    }

    #[test]
    fn negativity_independent_of_correction() {
        let psi = PureNumberState::normalized(vec![c(0.3, 0.1), c(0.5, -0.2), c(0.1, 0.6)]).unwrap();
        let joint = JointState::product(&psi, &max_ent(3));
        for o in outcomes(2, 3) {
            let with = oracle_outcome(&joint, o, true).unwrap();
            let without = oracle_outcome(&joint, o, false).unwrap();
            assert!((negativity(&with) - negativity(&without)).abs() < 1e-14);
        }
    }

    #[test]
    fn projector_conserves_number() {
        for o in outcomes(3, 4) {
            assert!(measurement_projector(3, 4, o).unwrap().conserves_number());
        }
        // the bare correction changes mode-4 occupation
        assert!(!correction_operator(1, 2, OutcomeLabel::new(0, 0)).unwrap().conserves_number());
    }

    #[test]
    fn oracle_probabilities_sum_to_one() {
        let psi = PureNumberState::normalized(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let run = oracle_full_protocol(&psi, &max_ent(1)).unwrap();
        assert!((run.total_probability() - 1.0).abs() < 1e-14);
    }
}
