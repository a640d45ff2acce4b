use nalgebra::DMatrix;

use super::basis::sector_phase;
use super::{window, OutcomeLabel};
use crate::error::{Error, Result};
use crate::fock::{max_abs_diff, C64};

/// Tolerance of the dilation identities.
const DILATION_TOL: f64 = 1e-10;

/// Bob's isometry `V4^{(l,λ)} = Σ_k e^{2πiλk/𝒞_l} |N-k><ν-k-l|`.
///
/// Returned as a square matrix over mode-4 occupations `0..=max(N, ν)`.
pub fn bob_correction(l: i64, lambda: usize, n: usize, nu: usize) -> Result<DMatrix<C64>> {
    OutcomeLabel::new(l, lambda).validate(n, nu)?;
    let w = window(l, n, nu)?;
    let card = w.end() - w.start() + 1;
    let d = n.max(nu) + 1;
    let mut v = DMatrix::zeros(d, d);
    for k in w {
        let from = (nu as i64 - k as i64 - l) as usize;
        v[(n - k, from)] = sector_phase(lambda, k, card);
    }
    Ok(v)
}

/// Occupation `κ_l` of the ancilla mode, the smallest value keeping
/// `κ_l + ν - N - l` nonnegative.
pub fn ancilla_occupation(l: i64, n: usize, nu: usize) -> usize {
    (l - (nu as i64 - n as i64)).max(0) as usize
}

#[derive(Clone, Debug)]
pub struct DilationReport {
    /// `max |(Ṽ†Ṽ - 1)_ij|`.
    pub unitarity_error: f64,
    /// `max |[Ṽ, N4 + N5]_ij|`.
    pub commutator_error: f64,
    /// `max |tr5(Ṽ ρ⊗|κ><κ| Ṽ†) - V ρ V†|`.
    pub reduction_error: f64,
    pub passed: bool,
}

/// Two-mode (mode 4, ancilla mode 5) truncated space used by the dilations.
pub(crate) struct PairSpace {
    pub d4: usize,
    pub d5: usize,
}

impl PairSpace {
    pub fn index(&self, k4: usize, k5: usize) -> usize {
        k4 * self.d5 + k5
    }

    pub fn dim(&self) -> usize {
        self.d4 * self.d5
    }

    pub fn number_operator(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            if i == j {
                C64::new((i / self.d5 + i % self.d5) as f64, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// `ρ ⊗ |a><a|` for a mode-4 density `ρ`.
    pub fn with_ancilla(&self, rho: &DMatrix<C64>, a: usize) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for i in 0..rho.nrows() {
            for j in 0..rho.ncols() {
                out[(self.index(i, a), self.index(j, a))] = rho[(i, j)];
            }
        }
        out
    }

    pub fn trace_ancilla(&self, big: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.d4, self.d4);
        for i in 0..self.d4 {
            for j in 0..self.d4 {
                out[(i, j)] = (0..self.d5).map(|a| big[(self.index(i, a), self.index(j, a))]).sum();
            }
        }
        out
    }
}

/// Builds a block unitary: identity except on the listed two-level swaps.
///
/// Each block `(a, b, phase)` contributes `phase |a><b| + conj(phase) |b><a|`,
/// or `phase |a><a|` when `a == b`.
pub(crate) fn block_unitary(dim: usize, blocks: &[(usize, usize, C64)]) -> Result<DMatrix<C64>> {
    let mut claimed = vec![false; dim];
    let mut u = DMatrix::<C64>::identity(dim, dim);
    for &(a, b, phase) in blocks {
        let support: &[usize] = if a == b { &[a] } else { &[a, b] };
        for &idx in support {
            if claimed[idx] {
                return Err(Error::SupportOverlap(format!("basis index {idx} claimed twice")));
            }
            claimed[idx] = true;
        }
        u[(a, a)] = C64::new(0.0, 0.0);
        u[(b, b)] = C64::new(0.0, 0.0);
        if a == b {
            u[(a, a)] = phase;
        } else {
            u[(a, b)] = phase;
            u[(b, a)] = phase.conj();
        }
    }
    Ok(u)
}

pub(crate) fn unitarity_error(u: &DMatrix<C64>) -> f64 {
    let id = DMatrix::<C64>::identity(u.nrows(), u.ncols());
    max_abs_diff(&(u.adjoint() * u), &id)
}

pub(crate) fn commutator_error(u: &DMatrix<C64>, number: &DMatrix<C64>) -> f64 {
    (u * number - number * u).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Checks the number-conserving two-mode dilation `Ṽ45` of Bob's correction.
///
/// `test_state` is a mode-4 density over occupations `0..=ν`; it must be
/// supported on the correction's input states `|ν-k-l>`.
pub fn dilated_correction_check(
    l: i64,
    lambda: usize,
    n: usize,
    nu: usize,
    test_state: &DMatrix<C64>,
) -> Result<DilationReport> {
    let v = bob_correction(l, lambda, n, nu)?;
    if test_state.nrows() != nu + 1 || test_state.ncols() != nu + 1 {
        return Err(Error::Dimension { expected: nu + 1, got: test_state.nrows() });
    }
    let w = window(l, n, nu)?;
    let card = w.end() - w.start() + 1;
    let inputs: Vec<usize> = w.clone().map(|k| (nu as i64 - k as i64 - l) as usize).collect();
    let outside: f64 = (0..=nu)
        .filter(|s| !inputs.contains(s))
        .map(|s| test_state[(s, s)].re.abs())
        .sum();
    if outside > 1e-12 {
        return Err(Error::OutsideSupport(outside));
    }

    let kappa = ancilla_occupation(l, n, nu);
    let shift = nu as i64 - n as i64 - l;
    let raised = (kappa as i64 + shift) as usize;
    let space = PairSpace { d4: n.max(nu) + 1, d5: kappa.max(raised) + 1 };

    let blocks: Vec<(usize, usize, C64)> = w
        .map(|k| {
            let phase = sector_phase(lambda, k, card);
            let from = space.index((nu as i64 - k as i64 - l) as usize, kappa);
            let to = space.index(n - k, raised);
            (to, from, phase)
        })
        .collect();
    let u = block_unitary(space.dim(), &blocks)?;

    let d4 = space.d4;
    let mut rho4 = DMatrix::<C64>::zeros(d4, d4);
    rho4.view_mut((0, 0), (nu + 1, nu + 1)).copy_from(test_state);
    let evolved = &u * space.with_ancilla(&rho4, kappa) * u.adjoint();
    let reduced = space.trace_ancilla(&evolved);
    let expected = &v * &rho4 * v.adjoint();

    let unitarity_error = unitarity_error(&u);
    let commutator_error = commutator_error(&u, &space.number_operator());
    let reduction_error = max_abs_diff(&reduced, &expected);
    let passed = unitarity_error < DILATION_TOL
        && commutator_error < DILATION_TOL
        && reduction_error < DILATION_TOL;
    Ok(DilationReport { unitarity_error, commutator_error, reduction_error, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn correction_is_identity_at_top_of_perfect_window() {
        for (n, nu) in [(1, 1), (2, 5), (3, 4)] {
            let l = nu as i64 - n as i64;
            let v = bob_correction(l, 0, n, nu).unwrap();
            for k in 0..=n {
                assert!((v[(n - k, n - k)] - c(1.0, 0.0)).norm() < 1e-15);
            }
            assert_eq!(v.iter().filter(|z| z.norm() > 0.0).count(), n + 1);
        }
    }

    #[test]
    fn correction_n1_nu2_expanded() {
        // |1><2| + |0><1|
        let v = bob_correction(0, 0, 1, 2).unwrap();
        assert!((v[(1, 2)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((v[(0, 1)] - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(v.iter().filter(|z| z.norm() > 0.0).count(), 2);
    }

    #[test]
    fn correction_is_partial_isometry() {
        for n in 0..=4 {
            for nu in 0..=4 {
                for o in super::super::outcomes(n, nu) {
                    let v = bob_correction(o.l, o.lambda, n, nu).unwrap();
                    let p = v.adjoint() * &v;
                    let w = window(o.l, n, nu).unwrap();
                    let support: Vec<usize> =
                        w.map(|k| (nu as i64 - k as i64 - o.l) as usize).collect();
                    for i in 0..p.nrows() {
                        for j in 0..p.ncols() {
                            let want = if i == j && support.contains(&i) { 1.0 } else { 0.0 };
                            assert!((p[(i, j)] - c(want, 0.0)).norm() < 1e-14);
                        }
                    }
                }
            }
        }
    }

    fn window_state(l: i64, n: usize, nu: usize, seed: u64) -> DMatrix<C64> {
        // deterministic pseudo-random pure state on the correction's input support
        let w = window(l, n, nu).unwrap();
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((x >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        let mut amp = vec![c(0.0, 0.0); nu + 1];
        for k in w {
            amp[(nu as i64 - k as i64 - l) as usize] = c(next(), next());
        }
        let norm: f64 = amp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        DMatrix::from_fn(nu + 1, nu + 1, |i, j| amp[i] * amp[j].conj() / (norm * norm))
    }

    #[test]
    fn dilation_diagonal_phase_case() {
        let (n, nu) = (2, 5);
        let l = 3;
        let rep = dilated_correction_check(l, 1, n, nu, &window_state(l, n, nu, 3)).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert_eq!(ancilla_occupation(l, n, nu), 0);
    }

    #[test]
    fn dilation_n1_nu2_l0_lambda1() {
        let rep = dilated_correction_check(0, 1, 1, 2, &window_state(0, 1, 2, 11)).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.commutator_error < 1e-14);
    }

    #[test]
    fn dilation_all_outcomes_small() {
        for n in 0..=4 {
            for nu in 0..=4 {
                for o in super::super::outcomes(n, nu) {
                    let rho = window_state(o.l, n, nu, (o.l + 10) as u64 * 31 + o.lambda as u64);
                    let rep = dilated_correction_check(o.l, o.lambda, n, nu, &rho).unwrap();
                    assert!(rep.passed, "n={n} nu={nu} {o:?} {rep:?}");
                }
            }
        }
    }

    #[test]
    fn dilation_rejects_state_outside_support() {
        // N=1, ν=2, l=0: inputs |2>, |1>; |0> lies outside
        let mut rho = DMatrix::zeros(3, 3);
        rho[(0, 0)] = c(1.0, 0.0);
        assert!(matches!(
            dilated_correction_check(0, 0, 1, 2, &rho),
            Err(Error::OutsideSupport(_))
        ));
    }

    #[test]
    fn overlapping_blocks_are_rejected() {
        let blocks = [(0, 1, c(1.0, 0.0)), (1, 2, c(1.0, 0.0))];
        assert!(matches!(block_unitary(3, &blocks), Err(Error::SupportOverlap(_))));
    }
}
