//! Teleporting the occupation of several modes at once.

use crate::error::{domain, Error, Result};
use crate::fock::{ResourceState, C64};
use crate::metrics::IMAG_TOL;
use crate::protocol::window;

/// Exact binomial coefficient; `None` on overflow.
fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Number of ways `k` bosons occupy `m` modes, `C(k+m-1, k)`.
pub fn block_dimension(k: usize, m: usize) -> Result<u64> {
    if m == 0 {
        return Err(domain("need at least one mode"));
    }
    binomial((k + m - 1) as u64, k as u64).ok_or_else(|| domain("block dimension overflows u64"))
}

/// Dimension `C(N+M-1, N)` of `N` bosons in `M` modes.
pub fn total_dimension(n: usize, modes: usize) -> Result<u64> {
    block_dimension(n, modes)
}

/// Haar-averaged fidelity when the first `m` modes are teleported with one
/// two-mode resource, the `N`-particle input living on `m + 1` modes.
pub fn fidelity_multimode(resource: &ResourceState, n: usize, m: usize) -> Result<f64> {
    let nu = resource.n_particles();
    let dk: Vec<f64> = (0..=n).map(|k| block_dimension(k, m).map(|d| d as f64)).collect::<Result<_>>()?;
    let dim = block_dimension(n, m + 1)? as f64;
    let mut acc = C64::new(0.0, 0.0);
    for l in -(n as i64)..=nu as i64 {
        let w = window(l, n, nu)?;
        let shift = |k: usize| (k as i64 + l) as usize;
        for k in w.clone() {
            acc += resource.get(shift(k), shift(k)) * dk[k];
            for j in w.clone() {
                acc += resource.get(shift(k), shift(j)) * (dk[k] * dk[j]);
            }
        }
    }
    if acc.im.abs() > IMAG_TOL * dim * dim {
        return Err(Error::ImaginaryResidue(acc.im));
    }
    Ok(acc.re / (dim * (dim + 1.0)))
}

/// `((ν-N+1)/(ν+1))^m`: every one of `m` independent single-mode runs is perfect.
pub fn product_resource_lower_bound(n: usize, nu: usize, m: usize) -> Result<f64> {
    if nu < n {
        return Err(domain(format!("need ν ≥ N, got ν = {nu}, N = {n}")));
    }
    if m == 0 {
        return Err(domain("need at least one mode"));
    }
    Ok(((nu - n + 1) as f64 / (nu + 1) as f64).powi(m as i32))
}
