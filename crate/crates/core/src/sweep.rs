//! Parameter sweeps over the resource catalog, written as CSV.
//!
//! Config files are flat `key = value` lines; `#` starts a comment.
//!
//! ```text
//! resource = su2:xi=0.5,theta=0
//! resource = bh:gamma=-3:1:41
//! N = 1,5,10
//! nu = 1..=100
//! m = 1
//! samples = 0
//! seed = 7
//! output = fig.csv
//! ```
//!
//! `resource` and the integer grids may repeat. Inside a resource template a
//! parameter value may be a list `a|b|c` or an inclusive grid `a:b:n`;
//! `a:b:n)` leaves out `b`. Reals accept a `pi` suffix (`2pi`).

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::{
    avg_entanglement_monte_carlo, avg_final_entanglement, fidelity_closed_form,
    fidelity_monte_carlo, perfect_outcome_probability, Estimate,
};
use crate::multimode::fidelity_multimode;
use crate::resources::{build_resource, classify_regime, parse_resource, RegimeLabel, ResourceKind};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    /// Resource templates, expanded by [`expand_template`].
    pub resources: Vec<String>,
    pub n_values: Vec<usize>,
    pub nu_values: Vec<usize>,
    pub m_values: Vec<usize>,
    /// Monte Carlo samples per row; 0 disables sampling.
    pub samples: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

fn config_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

impl SweepConfig {
    pub fn parse(text: &str, default_seed: u64) -> Result<Self> {
        let mut cfg = SweepConfig {
            resources: Vec::new(),
            n_values: Vec::new(),
            nu_values: Vec::new(),
            m_values: Vec::new(),
            samples: 0,
            seed: default_seed,
            output: None,
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| config_err(line, "expected `key = value`"))?;
            if value.is_empty() {
                return Err(config_err(line, format!("empty value for `{key}`")));
            }
            let ints = |v: &str| parse_int_list(v).map_err(|e| config_err(line, e.to_string()));
            match key {
                "resource" => {
                    expand_template(value).map_err(|e| config_err(line, e.to_string()))?;
                    cfg.resources.push(value.to_string());
                }
                "N" => cfg.n_values.extend(ints(value)?),
                "nu" => cfg.nu_values.extend(ints(value)?),
                "m" => cfg.m_values.extend(ints(value)?),
                "samples" => {
                    cfg.samples = value.parse().map_err(|_| config_err(line, format!("bad sample count `{value}`")))?
                }
                "seed" => cfg.seed = value.parse().map_err(|_| config_err(line, format!("bad seed `{value}`")))?,
                "output" => cfg.output = Some(PathBuf::from(value)),
                other => return Err(config_err(line, format!("unknown key `{other}`"))),
            }
        }
        if cfg.m_values.is_empty() {
            cfg.m_values.push(1);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let empty = |what: &str| Err(config_err(0, format!("no {what} given")));
        if self.resources.is_empty() {
            return empty("resource");
        }
        if self.n_values.is_empty() {
            return empty("N values");
        }
        if self.nu_values.is_empty() {
            return empty("nu values");
        }
        if self.m_values.is_empty() {
            return empty("m values");
        }
        if self.m_values.contains(&0) {
            return Err(config_err(0, "m must be at least 1"));
        }
        if self.samples == 1 {
            return Err(config_err(0, "samples must be 0 or at least 2"));
        }
        Ok(())
    }

    /// Writes the config back in the text format.
    pub fn to_text(&self) -> String {
        let list = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        for r in &self.resources {
            s.push_str(&format!("resource = {r}\n"));
        }
        s.push_str(&format!("N = {}\nnu = {}\nm = {}\n", list(&self.n_values), list(&self.nu_values), list(&self.m_values)));
        s.push_str(&format!("samples = {}\nseed = {}\n", self.samples, self.seed));
        if let Some(p) = &self.output {
            s.push_str(&format!("output = {}\n", p.display()));
        }
        s
    }
}

/// `1,5,10` and `1..=100` style lists, concatenated in order, duplicates dropped.
pub fn parse_int_list(s: &str) -> Result<Vec<usize>> {
    let bad = |p: &str| Error::Spec(format!("bad integer list item `{p}`"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        if let Some((a, b)) = part.split_once("..=") {
            let a: usize = a.trim().parse().map_err(|_| bad(part))?;
            let b: usize = b.trim().parse().map_err(|_| bad(part))?;
            if a > b {
                return Err(bad(part));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad(part))?);
        }
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|x| seen.insert(*x));
    Ok(out)
}

/// A real number, optionally with a `pi` factor (`pi`, `-pi`, `0.5pi`).
pub fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Spec(format!("bad number `{s}`"));
    match s.strip_suffix("pi") {
        Some("") => Ok(PI),
        Some("-") => Ok(-PI),
        Some(f) => Ok(f.parse::<f64>().map_err(|_| bad())? * PI),
        None => s.parse().map_err(|_| bad()),
    }
}

fn expand_value(v: &str) -> Result<Vec<f64>> {
    if v.contains('|') {
        return v.split('|').map(parse_real).collect();
    }
    let parts: Vec<&str> = v.split(':').collect();
    match parts.as_slice() {
        [x] => Ok(vec![parse_real(x)?]),
        [a, b, count] => {
            let (count, open) = match count.strip_suffix(')') {
                Some(c) => (c, true),
                None => (*count, false),
            };
            let (a, b) = (parse_real(a)?, parse_real(b)?);
            let count: usize = count.trim().parse().map_err(|_| Error::Spec(format!("bad grid size `{count}`")))?;
            if count == 0 {
                return Err(Error::Spec("grid needs at least one point".into()));
            }
            let steps = if open { count } else { count - 1 };
            Ok((0..count)
                .map(|i| if steps == 0 { a } else { a + (b - a) * i as f64 / steps as f64 })
                .collect())
        }
        _ => Err(Error::Spec(format!("bad parameter value `{v}`"))),
    }
}

/// Expands list and grid values of a resource template into concrete descriptors.
pub fn expand_template(template: &str) -> Result<Vec<String>> {
    let template = template.trim();
    let Some((name, rest)) = template.split_once(':') else {
        return Ok(vec![template.to_string()]);
    };
    let mut out = vec![String::new()];
    for param in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = param
            .split_once('=')
            .ok_or_else(|| Error::Spec(format!("expected key=value, got `{param}`")))?;
        let values = expand_value(value)?;
        out = out
            .iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let sep = if prefix.is_empty() { "" } else { "," };
                    format!("{prefix}{sep}{}={v}", key.trim())
                })
            })
            .collect();
    }
    Ok(out.into_iter().map(|p| format!("{name}:{p}")).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub resource: String,
    pub n: usize,
    pub nu: usize,
    pub m: usize,
    pub f_closed: f64,
    pub f_mc: Option<Estimate>,
    /// Only for `m = 1`.
    pub e_closed: Option<f64>,
    pub e_mc: Option<Estimate>,
    /// Perfect-outcome probability of one run, raised to the power `m`.
    pub p_perfect: f64,
    /// Bose-Hubbard kinds only.
    pub regime: Option<RegimeLabel>,
    kind_rank: u8,
    sort_params: Vec<f64>,
}

impl ResultRow {
    fn cmp_key(&self, other: &Self) -> Ordering {
        self.kind_rank
            .cmp(&other.kind_rank)
            .then_with(|| {
                self.sort_params
                    .iter()
                    .zip(&other.sort_params)
                    .map(|(a, b)| a.total_cmp(b))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
            .then_with(|| self.resource.cmp(&other.resource))
            .then_with(|| (self.n, self.nu, self.m).cmp(&(other.n, other.nu, other.m)))
    }
}

fn sort_params(kind: &ResourceKind) -> Vec<f64> {
    match kind {
        ResourceKind::Su2Coherent { xi, theta } => vec![*xi, *theta],
        k => k.gamma().into_iter().collect(),
    }
}

/// Stable per-row seed from the sweep seed and the row coordinates.
pub fn row_seed(seed: u64, resource: &str, n: usize, nu: usize, m: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let bytes = resource.bytes().chain([0]).chain(
        [n as u64, nu as u64, m as u64, seed].into_iter().flat_map(|x| x.to_le_bytes()),
    );
    for b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    // splitmix64 finalizer
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

/// Evaluates a single grid point.
pub fn evaluate_row(descriptor: &str, n: usize, nu: usize, m: usize, samples: usize, seed: u64) -> Result<ResultRow> {
    let at = |e: Error| Error::Spec(format!("{descriptor} at N={n}, nu={nu}, m={m}: {e}"));
    let spec = parse_resource(descriptor, nu).map_err(at)?;
    let resource = build_resource(&spec).map_err(at)?;
    let seed = row_seed(seed, descriptor, n, nu, m);
    let sampling = samples > 0 && m == 1;
    let (f_closed, e_closed) = if m == 1 {
        (fidelity_closed_form(&resource, n).map_err(at)?, Some(avg_final_entanglement(&resource, n)))
    } else {
        (fidelity_multimode(&resource, n, m).map_err(at)?, None)
    };
    let f_mc = sampling.then(|| fidelity_monte_carlo(&resource, n, samples, seed)).transpose().map_err(at)?;
    let e_mc = sampling
        .then(|| avg_entanglement_monte_carlo(&resource, n, samples, seed))
        .transpose()
        .map_err(at)?;
    Ok(ResultRow {
        resource: descriptor.to_string(),
        n,
        nu,
        m,
        f_closed,
        f_mc,
        e_closed,
        e_mc,
        p_perfect: perfect_outcome_probability(&resource, n).powi(m as i32),
        regime: spec.kind.gamma().map(|g| classify_regime(nu, g)),
        kind_rank: spec.kind.rank(),
        sort_params: sort_params(&spec.kind),
    })
}

/// One row per grid point, sorted by kind, kind parameters, `N`, `ν`, `m`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let mut descriptors = Vec::new();
    for t in &config.resources {
        descriptors.extend(expand_template(t)?);
    }
    let mut grid = Vec::new();
    for d in &descriptors {
        for &n in &config.n_values {
            for &nu in &config.nu_values {
                for &m in &config.m_values {
                    grid.push((d.as_str(), n, nu, m));
                }
            }
        }
    }
    let mut rows = grid
        .par_iter()
        .map(|&(d, n, nu, m)| evaluate_row(d, n, nu, m, config.samples, config.seed))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.cmp_key(b));
    rows.dedup_by(|a, b| a.cmp_key(b).is_eq());
    Ok(rows)
}

pub const CSV_HEADER: [&str; 12] = [
    "resource", "N", "nu", "m", "f_closed", "f_mc", "f_mc_stderr", "E_closed", "E_mc", "E_mc_stderr",
    "p_perfect", "regime",
];

/// 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.into());
    w.write_record(CSV_HEADER).map_err(io)?;
    let opt = |x: Option<f64>| x.map(format_real).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.resource.clone(),
            r.n.to_string(),
            r.nu.to_string(),
            r.m.to_string(),
            format_real(r.f_closed),
            opt(r.f_mc.map(|e| e.mean)),
            opt(r.f_mc.map(|e| e.std_error)),
            opt(r.e_closed),
            opt(r.e_mc.map(|e| e.mean)),
            opt(r.e_mc.map(|e| e.std_error)),
            format_real(r.p_perfect),
            r.regime.map(|g| g.to_string()).unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[ResultRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

pub const PRESETS: [&str; 8] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];

/// Built-in sweeps behind the published figures. Monte Carlo is off.
pub fn preset(name: &str, seed: u64) -> Result<SweepConfig> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let base = |resources: Vec<String>, n: Vec<usize>, nu: Vec<usize>, m: Vec<usize>| SweepConfig {
        resources,
        n_values: n,
        nu_values: nu,
        m_values: m,
        samples: 0,
        seed,
        output: None,
    };
    let gammas = |bh: &str, g1: &str, g2: &str| {
        vec![format!("bh:gamma={bh}"), format!("gauss1:gamma={g1}"), format!("gauss2:gamma={g2}")]
    };
    let cfg = match name {
        "fig1" => base(
            s(&["su2:xi=0.5,theta=0", "separable", "maxent"]),
            vec![1, 2, 3, 5, 10],
            (1..=100).collect(),
            vec![1],
        ),
        "fig2" => base(
            s(&["su2:xi=0.5,theta=0", "su2:xi=0.5,theta=pi", "separable", "maxent"]),
            vec![1, 5, 10],
            (1..=100).collect(),
            vec![1],
        ),
        "fig3" => base(s(&["su2:xi=0:1:21,theta=0:2pi:24)"]), vec![10], vec![100], vec![1]),
        "fig4" => base(
            s(&["bh:gamma=-0.5", "gauss1:gamma=-0.5", "separable", "maxent"]),
            vec![1, 6, 10],
            (1..=100).collect(),
            vec![1],
        ),
        "fig5" => base(
            s(&["bh:gamma=-0.5", "gauss1:gamma=-0.5", "separable", "maxent"]),
            (1..=10).collect(),
            vec![100],
            vec![1],
        ),
        "fig6" => base(gammas("-3:1:81", "-0.98:1:100", "-3:-1.02:100"), vec![1, 5, 10], vec![100], vec![1]),
        "fig7" => base(gammas("-1.2:-0.8:41", "-0.99:-0.8:20", "-1.2:-1.01:20"), vec![1, 5, 10], vec![100], vec![1]),
        "fig8" => base(s(&["maxent"]), vec![10], vec![10, 100, 1000], (1..=8).collect()),
        other => return Err(Error::Domain(format!("unknown preset `{other}`; expected one of {}", PRESETS.join(", ")))),
    };
    Ok(cfg)
}
