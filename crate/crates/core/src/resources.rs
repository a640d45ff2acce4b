//! Resource-state catalog and closed-form performance where one exists.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::fock::{log_binomial, max_abs_diff, PureNumberState, ResourceState, C64};
use crate::linalg::tridiagonal_eigen;
use crate::protocol::block_unitary;

#[derive(Clone, Debug, PartialEq)]
pub enum ResourceKind {
    /// Weights of `|k, ν-k>`, nonnegative and summing to one.
    Separable(Vec<f64>),
    MaxEnt,
    /// `Σ_k e^{iϑ(k)} |k, ν-k> / √(ν+1)`.
    MaxEntPhased(Vec<f64>),
    /// `(|ν,0> + |0,ν>)/√2`.
    Noon,
    Su2Coherent { xi: f64, theta: f64 },
    BoseHubbardExact { gamma: f64 },
    GaussianSingle { gamma: f64 },
    GaussianDouble { gamma: f64 },
}

impl ResourceKind {
    /// Ordering key used when sorting sweep output.
    pub fn rank(&self) -> u8 {
        match self {
            ResourceKind::Separable(_) => 0,
            ResourceKind::MaxEnt => 1,
            ResourceKind::MaxEntPhased(_) => 2,
            ResourceKind::Noon => 3,
            ResourceKind::Su2Coherent { .. } => 4,
            ResourceKind::BoseHubbardExact { .. } => 5,
            ResourceKind::GaussianSingle { .. } => 6,
            ResourceKind::GaussianDouble { .. } => 7,
        }
    }

    pub fn is_bose_hubbard(&self) -> bool {
        matches!(
            self,
            ResourceKind::BoseHubbardExact { .. }
                | ResourceKind::GaussianSingle { .. }
                | ResourceKind::GaussianDouble { .. }
        )
    }

    /// The interaction ratio of Bose-Hubbard kinds.
    pub fn gamma(&self) -> Option<f64> {
        match *self {
            ResourceKind::BoseHubbardExact { gamma }
            | ResourceKind::GaussianSingle { gamma }
            | ResourceKind::GaussianDouble { gamma } => Some(gamma),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResourceSpec {
    pub kind: ResourceKind,
    pub nu: usize,
}

impl ResourceSpec {
    pub fn new(kind: ResourceKind, nu: usize) -> Result<Self> {
        let spec = Self { kind, nu };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let nu = self.nu;
        match &self.kind {
            ResourceKind::Separable(w) => {
                if w.len() != nu + 1 {
                    return Err(Error::Dimension { expected: nu + 1, got: w.len() });
                }
                if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                    return Err(domain("separable weights must be finite and nonnegative"));
                }
                let total: f64 = w.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::Trace { trace: total });
                }
            }
            ResourceKind::MaxEnt => {}
            ResourceKind::MaxEntPhased(p) => {
                if p.len() != nu + 1 {
                    return Err(Error::Dimension { expected: nu + 1, got: p.len() });
                }
                if p.iter().any(|x| !x.is_finite()) {
                    return Err(domain("phases must be finite"));
                }
            }
            ResourceKind::Noon => {
                if nu == 0 {
                    return Err(domain("N00N resource needs ν ≥ 1"));
                }
            }
            ResourceKind::Su2Coherent { xi, theta } => {
                if !(0.0..=1.0).contains(xi) {
                    return Err(domain(format!("ξ = {xi} outside [0, 1]")));
                }
                if !(0.0..2.0 * PI).contains(theta) {
                    return Err(domain(format!("ϑ = {theta} outside [0, 2π)")));
                }
            }
            ResourceKind::BoseHubbardExact { gamma } => {
                if nu == 0 || !gamma.is_finite() {
                    return Err(domain("Bose-Hubbard ground state needs ν ≥ 1 and finite γ"));
                }
            }
            ResourceKind::GaussianSingle { gamma } => {
                if nu == 0 || !(*gamma > -1.0) || !gamma.is_finite() {
                    return Err(domain(format!("single Gaussian needs ν ≥ 1 and γ > -1, got γ = {gamma}")));
                }
            }
            ResourceKind::GaussianDouble { gamma } => {
                if nu == 0 || !(*gamma < -1.0) || !gamma.is_finite() {
                    return Err(domain(format!("double Gaussian needs ν ≥ 1 and γ < -1, got γ = {gamma}")));
                }
            }
        }
        Ok(())
    }

    /// Short text form, parseable by [`parse_resource`] for catalog kinds.
    pub fn descriptor(&self) -> String {
        self.kind.to_string()
    }
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResourceKind::Separable(w) => {
                let uniform = w.iter().all(|x| *x == w[0]);
                match w.iter().position(|x| *x == 1.0) {
                    _ if uniform => write!(f, "separable"),
                    Some(k) => write!(f, "separable:fock={k}"),
                    None => write!(f, "separable:custom"),
                }
            }
            ResourceKind::MaxEnt => write!(f, "maxent"),
            ResourceKind::MaxEntPhased(_) => write!(f, "maxent-phased"),
            ResourceKind::Noon => write!(f, "noon"),
            ResourceKind::Su2Coherent { xi, theta } => write!(f, "su2:xi={xi},theta={theta}"),
            ResourceKind::BoseHubbardExact { gamma } => write!(f, "bh:gamma={gamma}"),
            ResourceKind::GaussianSingle { gamma } => write!(f, "gauss1:gamma={gamma}"),
            ResourceKind::GaussianDouble { gamma } => write!(f, "gauss2:gamma={gamma}"),
        }
    }
}

fn parse_params(s: &str) -> Result<Vec<(&str, f64)>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (k, v) = p.split_once('=').ok_or_else(|| Error::Spec(format!("expected key=value, got `{p}`")))?;
            Ok((k.trim(), crate::sweep::parse_real(v)?))
        })
        .collect()
}

/// Parses descriptors such as `maxent`, `su2:xi=0.5,theta=0` or `bh:gamma=-0.5`
/// into a spec with `ν` resource particles.
///
/// `separable` is uniform over the sector, `separable:fock=k` a single Fock
/// state, and `maxent-phased:seed=s` draws uniform phases from the seed.
pub fn parse_resource(descriptor: &str, nu: usize) -> Result<ResourceSpec> {
    let (name, rest) = descriptor.trim().split_once(':').unwrap_or((descriptor.trim(), ""));
    let params = parse_params(rest)?;
    let get = |key: &str| -> Result<f64> {
        params
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::Spec(format!("`{name}` needs parameter `{key}`")))
    };
    let allowed: &[&str] = match name {
        "separable" => &["fock"],
        "maxent-phased" => &["seed"],
        "su2" => &["xi", "theta"],
        "bh" | "gauss1" | "gauss2" => &["gamma"],
        _ => &[],
    };
    if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(k)) {
        return Err(Error::Spec(format!("unknown parameter `{k}` for `{name}`")));
    }
    let kind = match name {
        "separable" => {
            let mut w = vec![1.0 / (nu + 1) as f64; nu + 1];
            if params.iter().any(|(k, _)| *k == "fock") {
                let k = get("fock")?;
                if k < 0.0 || k.fract() != 0.0 || k as usize > nu {
                    return Err(Error::Spec(format!("fock={k} outside 0..={nu}")));
                }
                w = vec![0.0; nu + 1];
                w[k as usize] = 1.0;
            }
            ResourceKind::Separable(w)
        }
        "maxent" => ResourceKind::MaxEnt,
        "maxent-phased" => ResourceKind::MaxEntPhased(random_phases(nu, get("seed")? as u64)),
        "noon" => ResourceKind::Noon,
        "su2" => ResourceKind::Su2Coherent { xi: get("xi")?, theta: get("theta")? },
        "bh" => ResourceKind::BoseHubbardExact { gamma: get("gamma")? },
        "gauss1" => ResourceKind::GaussianSingle { gamma: get("gamma")? },
        "gauss2" => ResourceKind::GaussianDouble { gamma: get("gamma")? },
        other => return Err(Error::Spec(format!("unknown resource kind `{other}`"))),
    };
    ResourceSpec::new(kind, nu)
}

/// `ν + 1` phases uniform in `[0, 2π)`.
pub fn random_phases(nu: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..=nu).map(|_| rng.random_range(0.0..2.0 * PI)).collect()
}

pub fn build_resource(spec: &ResourceSpec) -> Result<ResourceState> {
    spec.validate()?;
    let nu = spec.nu;
    let pure = |psi: PureNumberState| Ok(ResourceState::pure(&psi));
    match &spec.kind {
        ResourceKind::Separable(w) => ResourceState::diagonal(w),
        ResourceKind::MaxEnt => pure(max_ent_state(nu, &vec![0.0; nu + 1])?),
        ResourceKind::MaxEntPhased(p) => pure(max_ent_state(nu, p)?),
        ResourceKind::Noon => {
            let mut a = vec![C64::new(0.0, 0.0); nu + 1];
            a[0] = C64::new(1.0 / SQRT_2, 0.0);
            a[nu] = C64::new(1.0 / SQRT_2, 0.0);
            pure(PureNumberState::normalized(a)?)
        }
        ResourceKind::Su2Coherent { xi, theta } => pure(su2_coherent(nu, *xi, *theta)?),
        ResourceKind::BoseHubbardExact { gamma } => pure(bose_hubbard_ground_state(nu, *gamma, 1.0)?),
        ResourceKind::GaussianSingle { gamma } => pure(gaussian_single(nu, *gamma)?),
        ResourceKind::GaussianDouble { gamma } => pure(gaussian_double(nu, *gamma)?),
    }
}

fn max_ent_state(nu: usize, phases: &[f64]) -> Result<PureNumberState> {
    let a = 1.0 / ((nu + 1) as f64).sqrt();
    PureNumberState::normalized(phases.iter().map(|&t| C64::from_polar(a, t)).collect())
}

/// Amplitudes `√C(ν,k) ξ^{k/2} (1-ξ)^{(ν-k)/2} e^{iϑ(ν/2-k)}`, evaluated in log space.
pub fn su2_coherent(nu: usize, xi: f64, theta: f64) -> Result<PureNumberState> {
    if !(0.0..=1.0).contains(&xi) {
        return Err(domain(format!("ξ = {xi} outside [0, 1]")));
    }
    let coeffs = (0..=nu)
        .map(|k| {
            let (kf, rest) = (k as f64, (nu - k) as f64);
            // 0^0 = 1 at the endpoints
            let term = |p: f64, e: f64| if e == 0.0 { 0.0 } else { e * p.ln() };
            let ln_mag = 0.5 * (log_binomial(nu as i64, k as i64)? + term(xi, kf) + term(1.0 - xi, rest));
            Ok(C64::from_polar(ln_mag.exp(), theta * (nu as f64 / 2.0 - kf)))
        })
        .collect::<Result<Vec<_>>>()?;
    PureNumberState::normalized(coeffs)
}

/// Dense two-mode Bose-Hubbard Hamiltonian over `|k, ν-k>` with `U = γτ/ν`.
pub fn bose_hubbard_hamiltonian(nu: usize, gamma: f64, tau: f64) -> DMatrix<f64> {
    let (diag, off) = bose_hubbard_bands(nu, gamma, tau);
    DMatrix::from_fn(nu + 1, nu + 1, |i, j| match i.abs_diff(j) {
        0 => diag[i],
        1 => off[i.min(j)],
        _ => 0.0,
    })
}

fn bose_hubbard_bands(nu: usize, gamma: f64, tau: f64) -> (Vec<f64>, Vec<f64>) {
    let u = gamma * tau / nu as f64;
    let diag = (0..=nu)
        .map(|k| {
            let (a, b) = (k as f64, (nu - k) as f64);
            u * (a * (a - 1.0) + b * (b - 1.0))
        })
        .collect();
    let off = (0..nu).map(|k| -tau * (((k + 1) * (nu - k)) as f64).sqrt()).collect();
    (diag, off)
}

/// Ground state of the two-mode Bose-Hubbard Hamiltonian, signed so that
/// `g_{⌊ν/2⌋} > 0`.
///
/// The Hamiltonian commutes with `k ↔ ν-k` and the ground state is even, so
/// the solve runs in the even sector. This keeps the state well defined when
/// the lowest even and odd levels are nearly degenerate (deep double well).
pub fn bose_hubbard_ground_state(nu: usize, gamma: f64, tau: f64) -> Result<PureNumberState> {
    if nu == 0 {
        return Err(domain("Bose-Hubbard ground state needs ν ≥ 1"));
    }
    if !(tau > 0.0) || !gamma.is_finite() || !tau.is_finite() {
        return Err(domain("need τ > 0 and finite γ"));
    }
    let (d, e) = bose_hubbard_bands(nu, gamma, tau);
    let h = nu / 2;
    // even basis: (|k> + |ν-k>)/√2 for k < ν/2, plus |h> when ν is even
    let mut diag: Vec<f64> = d[..=h].to_vec();
    let mut off: Vec<f64> = e[..h].to_vec();
    if nu.is_multiple_of(2) {
        if h > 0 {
            off[h - 1] *= SQRT_2;
        }
    } else {
        diag[h] += e[h];
    }
    let eig = tridiagonal_eigen(&diag, &off)?;
    let (_, v) = eig.lowest();
    // all components share one sign; the sum survives when v[h] underflows
    let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let mut g = vec![0.0; nu + 1];
    for k in 0..=h {
        let paired = k != nu - k;
        let x = sign * v[k] / if paired { SQRT_2 } else { 1.0 };
        g[k] = x;
        g[nu - k] = x;
    }
    PureNumberState::normalized(g.into_iter().map(|x| C64::new(x, 0.0)).collect())
}

/// `σ² = ν / (4√(γ+1))`.
pub fn single_gaussian_variance(nu: usize, gamma: f64) -> f64 {
    nu as f64 / (4.0 * (gamma + 1.0).sqrt())
}

/// Centers `ν/2 ± (ν/2)√(1-1/γ²)` and `σ'² = ν/(4|γ|√(γ²-1))`.
pub fn double_gaussian_shape(nu: usize, gamma: f64) -> ((f64, f64), f64) {
    let half = nu as f64 / 2.0;
    let shift = half * (1.0 - 1.0 / (gamma * gamma)).sqrt();
    let var = nu as f64 / (4.0 * gamma.abs() * (gamma * gamma - 1.0).sqrt());
    ((half - shift, half + shift), var)
}

fn gaussian_profile(nu: usize, f: impl Fn(f64) -> f64) -> Result<PureNumberState> {
    PureNumberState::normalized((0..=nu).map(|k| C64::new(f(k as f64), 0.0)).collect())
}

pub fn gaussian_single(nu: usize, gamma: f64) -> Result<PureNumberState> {
    if !(gamma > -1.0) || nu == 0 {
        return Err(domain(format!("single Gaussian needs ν ≥ 1 and γ > -1, got γ = {gamma}")));
    }
    let var = single_gaussian_variance(nu, gamma);
    let mid = nu as f64 / 2.0;
    gaussian_profile(nu, |k| (-(k - mid).powi(2) / (4.0 * var)).exp())
}

pub fn gaussian_double(nu: usize, gamma: f64) -> Result<PureNumberState> {
    if !(gamma < -1.0) || nu == 0 {
        return Err(domain(format!("double Gaussian needs ν ≥ 1 and γ < -1, got γ = {gamma}")));
    }
    let ((lo, hi), var) = double_gaussian_shape(nu, gamma);
    gaussian_profile(nu, |k| {
        (-(k - lo).powi(2) / (4.0 * var)).exp() + (-(k - hi).powi(2) / (4.0 * var)).exp()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegimeLabel {
    Perturbative,
    SingleGaussian,
    DoubleGaussian,
    Critical,
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegimeLabel::Perturbative => "perturbative",
            RegimeLabel::SingleGaussian => "single-gaussian",
            RegimeLabel::DoubleGaussian => "double-gaussian",
            RegimeLabel::Critical => "critical",
        })
    }
}

/// Advisory regime of the ground state; `≪` boundaries use a factor of 10.
pub fn classify_regime(nu: usize, gamma: f64) -> RegimeLabel {
    let nuf = nu as f64;
    let width = nuf.powf(-2.0 / 3.0);
    if (gamma + 1.0).abs() <= width {
        RegimeLabel::Critical
    } else if gamma > -1.0 + width && gamma <= nuf * nuf / 10.0 {
        RegimeLabel::SingleGaussian
    } else if gamma < -1.0 - width && gamma >= -10.0 * nuf.sqrt() {
        RegimeLabel::DoubleGaussian
    } else {
        RegimeLabel::Perturbative
    }
}

#[derive(Clone, Debug)]
pub struct NoonReductionReport {
    pub unitarity_error: f64,
    pub commutator_error: f64,
    /// Reduction error on number-diagonal inputs over `{|0>, |ν>}`.
    pub reduction_error: f64,
    /// `‖(W₃⊗W₄)|ν00ν> - |n00n>‖∞`.
    pub state_map_error: f64,
    pub passed: bool,
}

/// `W = |0><0| + |n><ν|` on one mode.
pub fn noon_reduction_map(nu: usize, n: usize) -> Result<DMatrix<C64>> {
    if n == 0 || n > nu {
        return Err(domain(format!("need 1 ≤ n ≤ ν, got n = {n}, ν = {nu}")));
    }
    let mut w = DMatrix::zeros(nu + 1, nu + 1);
    w[(0, 0)] = C64::new(1.0, 0.0);
    w[(n, nu)] = C64::new(1.0, 0.0);
    Ok(w)
}

/// Number-conserving dilation of `W` with an ancilla mode starting empty:
/// `|ν,0> ↔ |n,ν-n>`, identity elsewhere. Indexed as `k3 * (ν+1) + k5`.
pub fn noon_reduction_dilation(nu: usize, n: usize) -> Result<DMatrix<C64>> {
    noon_reduction_map(nu, n)?;
    let d = nu + 1;
    let (from, to) = (nu * d, n * d + (nu - n));
    block_unitary(d * d, &[(to, from, C64::new(1.0, 0.0))])
}

/// Verifies the dilation of the local reduction `|ν00ν> → |n00n>`.
pub fn noon_reduction_dilation_check(nu: usize, n: usize) -> Result<NoonReductionReport> {
    let w = noon_reduction_map(nu, n)?;
    let u = noon_reduction_dilation(nu, n)?;
    let d = nu + 1;
    let id = DMatrix::<C64>::identity(d * d, d * d);
    let unitarity_error = max_abs_diff(&(u.adjoint() * &u), &id);
    let number = DMatrix::from_fn(d * d, d * d, |i, j| {
        if i == j { C64::new((i / d + i % d) as f64, 0.0) } else { C64::new(0.0, 0.0) }
    });
    let commutator_error = max_abs_diff(&(&u * &number), &(&number * &u));

    let mut reduction_error: f64 = 0.0;
    for p in [0.0, 0.25, 0.5, 1.0] {
        let mut rho = DMatrix::<C64>::zeros(d, d);
        rho[(0, 0)] = C64::new(1.0 - p, 0.0);
        rho[(nu, nu)] = C64::new(p, 0.0);
        let big = DMatrix::from_fn(d * d, d * d, |i, j| {
            if i % d == 0 && j % d == 0 { rho[(i / d, j / d)] } else { C64::new(0.0, 0.0) }
        });
        let evolved = &u * big * u.adjoint();
        let reduced = DMatrix::from_fn(d, d, |a, b| (0..d).map(|s| evolved[(a * d + s, b * d + s)]).sum());
        reduction_error = reduction_error.max(max_abs_diff(&reduced, &(&w * &rho * w.adjoint())));
    }

    // |k3, k4> flattened as k3 * (ν+1) + k4
    let pair = |a: usize, b: usize| a * d + b;
    let mut input = nalgebra::DVector::<C64>::zeros(d * d);
    input[pair(nu, 0)] += C64::new(1.0 / SQRT_2, 0.0);
    input[pair(0, nu)] += C64::new(1.0 / SQRT_2, 0.0);
    let ww = w.kronecker(&w);
    let mut target = nalgebra::DVector::<C64>::zeros(d * d);
    target[pair(n, 0)] += C64::new(1.0 / SQRT_2, 0.0);
    target[pair(0, n)] += C64::new(1.0 / SQRT_2, 0.0);
    let state_map_error = (ww * input - target).iter().map(|z| z.norm()).fold(0.0, f64::max);

    let tol = 1e-12;
    let passed = unitarity_error < tol
        && commutator_error < tol
        && reduction_error < tol
        && state_map_error < tol;
    Ok(NoonReductionReport { unitarity_error, commutator_error, reduction_error, state_map_error, passed })
}

/// Closed-form `(f, E)` for separable, maximally entangled (`ν ≥ N`) and N00N resources.
pub fn analytic_performance(spec: &ResourceSpec, n: usize) -> Option<(f64, f64)> {
    let (nf, nuf) = (n as f64, spec.nu as f64);
    let f_sep = 2.0 / (nf + 2.0);
    match spec.kind {
        ResourceKind::Separable(_) => Some((f_sep, 0.0)),
        ResourceKind::MaxEnt if spec.nu >= n => Some((
            1.0 - nf / (3.0 * (nuf + 1.0)),
            PI * nf * (3.0 * nuf - nf + 1.0) / (24.0 * (nuf + 1.0)),
        )),
        ResourceKind::Noon if spec.nu >= 1 && spec.nu <= n => {
            let x = (nf - nuf + 1.0) / (nf + 1.0);
            Some((f_sep * (1.0 + x / 2.0), PI * x / 8.0))
        }
        ResourceKind::Noon if spec.nu > n => Some((f_sep, 0.0)),
        _ => None,
    }
}

/// Probability `1 - (N/(ν+1))^r` that at least one of `r` runs is perfect.
pub fn repeated_teleportation_probability(n: usize, nu: usize, r: u32) -> Result<f64> {
    if nu < n {
        return Err(domain(format!("need ν ≥ N, got ν = {nu}, N = {n}")));
    }
    if r == 0 {
        return Err(domain("need at least one run"));
    }
    Ok(1.0 - (n as f64 / (nu as f64 + 1.0)).powi(r as i32))
}

/// `diag(e^{-iϑ(k)})`, indexed like the resource sector (mode-4 occupation `ν-k`).
pub fn phase_absorber(phases: &[f64]) -> DMatrix<C64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        phases.len(),
        phases.iter().map(|&t| C64::from_polar(1.0, -t)),
    ))
}

/// `U ρ U†` with `U = phase_absorber(phases)`.
pub fn absorb_phases(resource: &ResourceState, phases: &[f64]) -> Result<ResourceState> {
    let d = resource.n_particles() + 1;
    if phases.len() != d {
        return Err(Error::Dimension { expected: d, got: phases.len() });
    }
    let u = phase_absorber(phases);
    ResourceState::new(&u * resource.matrix() * u.adjoint())
}
