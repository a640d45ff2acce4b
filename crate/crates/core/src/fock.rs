//! Number-conserving Fock-space primitives.
//!
//! Every two-mode object in this crate lives in the fixed-particle-number
//! sector spanned by `|k> ⊗ |n - k>`, `k = 0..=n`, so a state is stored as an
//! `(n + 1)`-vector or an `(n + 1) × (n + 1)` matrix indexed by the occupation
//! `k` of the first mode.

use nalgebra::DMatrix;
use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Error, Result};
use crate::protocol::JointState;

pub type C64 = Complex64;

/// Normalization and trace tolerance for states built from analytic formulas.
pub const NORM_TOL: f64 = 1e-12;
/// Hermiticity tolerance, absolute, per matrix element.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue of a density matrix.
pub const PSD_TOL: f64 = -1e-10;

/// Occupation numbers of a set of modes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockLabel {
    occupations: Vec<usize>,
}

impl FockLabel {
    pub fn new(occupations: Vec<usize>) -> Self {
        Self { occupations }
    }

    pub fn occupations(&self) -> &[usize] {
        &self.occupations
    }

    pub fn total(&self) -> usize {
        self.occupations.iter().sum()
    }

    pub fn modes(&self) -> usize {
        self.occupations.len()
    }

    pub fn get(&self, mode: usize) -> usize {
        self.occupations[mode]
    }
}

impl From<Vec<usize>> for FockLabel {
    fn from(occupations: Vec<usize>) -> Self {
        Self::new(occupations)
    }
}

/// `sum_k c_k |k> ⊗ |N - k>`, a pure state of `N` particles in two modes.
#[derive(Clone, Debug, PartialEq)]
pub struct PureNumberState {
    n_particles: usize,
    coeffs: Vec<C64>,
}

impl PureNumberState {
    /// Fails unless the coefficients have unit norm within [`NORM_TOL`].
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(domain("a state needs at least one coefficient"));
        }
        let norm_sqr: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL || !norm_sqr.is_finite() {
            return Err(Error::NotNormalized { norm_sqr, tolerance: NORM_TOL });
        }
        Ok(Self { n_particles: coeffs.len() - 1, coeffs })
    }

    /// Rescales `coeffs` to unit norm.
    pub fn normalized(mut coeffs: Vec<C64>) -> Result<Self> {
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(domain("cannot normalize a zero or non-finite vector"));
        }
        coeffs.iter_mut().for_each(|c| *c /= norm);
        Self::new(coeffs)
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// The Fock state `|k> ⊗ |n - k>`.
    pub fn fock(n_particles: usize, k: usize) -> Result<Self> {
        if k > n_particles {
            return Err(domain(format!("occupation {k} exceeds {n_particles} particles")));
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); n_particles + 1];
        coeffs[k] = C64::new(1.0, 0.0);
        Self::new(coeffs)
    }

    pub(crate) fn from_unit_vector_unchecked(coeffs: Vec<C64>) -> Self {
        Self { n_particles: coeffs.len() - 1, coeffs }
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// `|<self|other>|`.
    pub fn overlap(&self, other: &PureNumberState) -> Result<f64> {
        if self.n_particles != other.n_particles {
            return Err(Error::Dimension {
                expected: self.n_particles + 1,
                got: other.n_particles + 1,
            });
        }
        let s: C64 = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum();
        Ok(s.norm())
    }

    pub fn density(&self) -> DMatrix<C64> {
        let d = self.coeffs.len();
        DMatrix::from_fn(d, d, |k, j| self.coeffs[k] * self.coeffs[j].conj())
    }
}

fn check_hermitian(m: &DMatrix<C64>) -> Result<()> {
    let (r, c) = m.shape();
    if r != c {
        return Err(Error::Dimension { expected: r, got: c });
    }
    for i in 0..r {
        for j in i..r {
            let deviation = (m[(i, j)] - m[(j, i)].conj()).norm();
            if deviation > HERMITIAN_TOL {
                return Err(Error::NotHermitian { row: i, col: j, deviation });
            }
        }
    }
    Ok(())
}

fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    m.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

fn real_trace(m: &DMatrix<C64>) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// Shared two-mode state of `ν` particles, `(ρ34)_{k,j}` in the Fock basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ResourceState {
    n_particles: usize,
    matrix: DMatrix<C64>,
}

impl ResourceState {
    /// Validates Hermiticity, unit trace and positivity; never repairs.
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        check_hermitian(&matrix)?;
        if matrix.nrows() == 0 {
            return Err(domain("empty resource matrix"));
        }
        let trace = real_trace(&matrix);
        if (trace - 1.0).abs() > NORM_TOL {
            return Err(Error::Trace { trace });
        }
        let min_eigenvalue = min_eigenvalue(&matrix);
        if min_eigenvalue < PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { n_particles: matrix.nrows() - 1, matrix })
    }

    pub fn pure(state: &PureNumberState) -> Self {
        Self { n_particles: state.n_particles(), matrix: state.density() }
    }

    /// Diagonal (separable) resource with the given populations.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        let d = weights.len();
        Self::new(DMatrix::from_fn(d, d, |k, j| {
            if k == j {
                C64::new(weights[k], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn get(&self, k: usize, j: usize) -> C64 {
        self.matrix[(k, j)]
    }
}

/// A two-mode density matrix with a fixed particle number.
///
/// Unnormalized instances carry a post-measurement weight in their trace.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeDensity {
    n_particles: usize,
    matrix: DMatrix<C64>,
    normalized: bool,
}

impl TwoModeDensity {
    pub fn new(matrix: DMatrix<C64>, normalized: bool) -> Result<Self> {
        check_hermitian(&matrix)?;
        if matrix.nrows() == 0 {
            return Err(domain("empty density matrix"));
        }
        let trace = real_trace(&matrix);
        let trace_ok = if normalized {
            (trace - 1.0).abs() <= NORM_TOL
        } else {
            trace > 0.0 && trace <= 1.0 + NORM_TOL
        };
        if !trace_ok {
            return Err(Error::Trace { trace });
        }
        let min_eigenvalue = min_eigenvalue(&matrix);
        if min_eigenvalue < PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { n_particles: matrix.nrows() - 1, matrix, normalized })
    }

    /// For matrices that are Hermitian and positive by construction.
    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<C64>, normalized: bool) -> Self {
        Self { n_particles: matrix.nrows() - 1, matrix, normalized }
    }

    pub fn pure(state: &PureNumberState) -> Self {
        Self::from_matrix_unchecked(state.density(), true)
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> f64 {
        real_trace(&self.matrix)
    }

    /// `<ψ|ρ|ψ>` for a pure state of the same particle number.
    pub fn expectation(&self, state: &PureNumberState) -> Result<f64> {
        let c = state.coeffs();
        if c.len() != self.matrix.nrows() {
            return Err(Error::Dimension { expected: self.matrix.nrows(), got: c.len() });
        }
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..c.len() {
            for j in 0..c.len() {
                acc += c[k].conj() * self.matrix[(k, j)] * c[j];
            }
        }
        Ok(acc.re)
    }

    /// Largest elementwise distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &TwoModeDensity) -> f64 {
        max_abs_diff(&self.matrix, &other.matrix)
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `ln C(n, k)` through the log-gamma function.
pub fn log_binomial(n: i64, k: i64) -> Result<f64> {
    if n < 0 || k < 0 || k > n {
        return Err(domain(format!("log_binomial requires 0 <= k <= n, got n = {n}, k = {k}")));
    }
    if k == 0 || k == n {
        return Ok(0.0);
    }
    let (n, k) = (n as f64, k as f64);
    Ok(ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0))
}

/// Negativity of a fixed-number two-mode state, `½ Σ_{k≠j} |ρ_kj|`.
pub fn negativity(state: &TwoModeDensity) -> f64 {
    off_diagonal_abs_sum(state.matrix()) / 2.0
}

pub(crate) fn off_diagonal_abs_sum(m: &DMatrix<C64>) -> f64 {
    let d = m.nrows();
    let mut s = 0.0;
    for k in 0..d {
        for j in 0..d {
            if k != j {
                s += m[(k, j)].norm();
            }
        }
    }
    s
}

/// Embeds `ρ` in the product basis `|k> ⊗ |N - k>` of `C^{N+1} ⊗ C^{N+1}`.
pub fn product_embedding(state: &TwoModeDensity) -> DMatrix<C64> {
    let d = state.n_particles() + 1;
    let n = state.n_particles();
    let mut big = DMatrix::zeros(d * d, d * d);
    for k in 0..d {
        for j in 0..d {
            big[(k * d + (n - k), j * d + (n - j))] = state.matrix()[(k, j)];
        }
    }
    big
}

/// Transposes the second tensor factor of a `d² × d²` matrix.
pub fn partial_transpose_second(big: &DMatrix<C64>, d: usize) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    // <a b| X |c e>  ->  <a e| X^{T_2} |c b>
                    out[(a * d + e, c * d + b)] = big[(a * d + b, c * d + e)];
                }
            }
        }
    }
    out
}

/// Negativity from its definition, `(tr|ρ^{T_2}| - tr ρ) / 2`.
pub fn negativity_via_partial_transpose(state: &TwoModeDensity) -> f64 {
    let d = state.n_particles() + 1;
    let pt = partial_transpose_second(&product_embedding(state), d);
    let abs_sum: f64 = pt.symmetric_eigenvalues().iter().map(|x| x.abs()).sum();
    (abs_sum - state.trace()) / 2.0
}

/// `tr_{23}` of a four-mode joint state, as a state of modes 1 and 4.
///
/// Fails when the reduced state does not have a fixed particle number.
pub fn partial_trace_23(joint: &JointState) -> Result<TwoModeDensity> {
    let reduced = joint.partial_trace(&[0, 3])?;
    reduced.into_two_mode()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn exact_binomial(n: u64, k: u64) -> BigUint {
        let mut acc = BigUint::from(1u32);
        for i in 0..k {
            acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
        }
        acc
    }

    #[test]
    fn log_binomial_small_values() {
        assert!((log_binomial(4, 2).unwrap() - 6f64.ln()).abs() < 1e-13);
        assert_eq!(log_binomial(17, 0).unwrap(), 0.0);
        assert_eq!(log_binomial(17, 17).unwrap(), 0.0);
    }

    #[test]
    fn log_binomial_domain() {
        assert!(log_binomial(3, 4).is_err());
        assert!(log_binomial(3, -1).is_err());
        assert!(log_binomial(-1, 0).is_err());
    }

    #[test]
    fn log_binomial_matches_big_integers() {
        for n in 0..=60u64 {
            for k in 0..=n {
                let exact: f64 = exact_binomial(n, k).to_string().parse().unwrap();
                let got = log_binomial(n as i64, k as i64).unwrap().exp();
                assert!((got - exact).abs() / exact < 1e-12, "n={n} k={k} got={got} exact={exact}");
            }
        }
        let exact: f64 = exact_binomial(300, 150).to_string().parse().unwrap();
        let got = log_binomial(300, 150).unwrap().exp();
        assert!((got - exact).abs() / exact < 1e-10, "got {got} expected {exact}");
    }

    #[test]
    fn pure_state_rejects_unnormalized() {
        assert!(PureNumberState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(PureNumberState::new(vec![]).is_err());
        let s = PureNumberState::normalized(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(s.n_particles(), 1);
    }

    #[test]
    fn resource_rejects_non_hermitian() {
        let mut m = DMatrix::from_element(2, 2, c(0.5, 0.0));
        m[(0, 1)] = c(0.5, 1e-6);
        match ResourceState::new(m) {
            Err(Error::NotHermitian { row: 0, col: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn resource_rejects_bad_trace_and_negative() {
        let m = DMatrix::from_element(2, 2, c(0.4, 0.0));
        assert!(matches!(ResourceState::new(m), Err(Error::Trace { .. })));
        let mut m = DMatrix::from_element(2, 2, c(0.5, 0.0));
        m[(0, 1)] = c(0.9, 0.0);
        m[(1, 0)] = c(0.9, 0.0);
        assert!(matches!(ResourceState::new(m), Err(Error::NotPositive { .. })));
    }

    fn max_ent_density(nu: usize) -> TwoModeDensity {
        let d = nu + 1;
        TwoModeDensity::new(DMatrix::from_element(d, d, c(1.0 / d as f64, 0.0)), true).unwrap()
    }

    #[test]
    fn negativity_of_diagonal_is_zero() {
        let rho = TwoModeDensity::new(
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.25, 0.0), c(0.75, 0.0)])),
            true,
        )
        .unwrap();
        assert_eq!(negativity(&rho), 0.0);
        assert!(negativity_via_partial_transpose(&rho).abs() < 1e-12);
    }

    #[test]
    fn negativity_of_maximally_entangled() {
        assert!((negativity(&max_ent_density(1)) - 0.5).abs() < 1e-15);
        for nu in 1..8 {
            let rho = max_ent_density(nu);
            assert!((negativity(&rho) - nu as f64 / 2.0).abs() < 1e-12);
            assert!((negativity_via_partial_transpose(&rho) - nu as f64 / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn explicit_four_by_four_partial_transpose() {
        // (|0,1> + |1,0>)/√2: the partially transposed matrix has eigenvalues ½, ½, ½, -½.
        let rho = max_ent_density(1);
        let pt = partial_transpose_second(&product_embedding(&rho), 2);
        let mut ev: Vec<f64> = pt.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (got, want) in ev.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn noon_negativity_is_one_half() {
        for nu in 1..7 {
            let mut coeffs = vec![c(0.0, 0.0); nu + 1];
            coeffs[0] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            coeffs[nu] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let rho = TwoModeDensity::pure(&PureNumberState::new(coeffs).unwrap());
            assert!((negativity_via_partial_transpose(&rho) - 0.5).abs() < 1e-10);
            assert!((negativity(&rho) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn expectation_of_pure_state_is_one() {
        let s = PureNumberState::normalized(vec![c(1.0, 0.5), c(-0.2, 0.3), c(0.7, 0.0)]).unwrap();
        let rho = TwoModeDensity::pure(&s);
        assert!((rho.expectation(&s).unwrap() - 1.0).abs() < 1e-14);
    }
}
