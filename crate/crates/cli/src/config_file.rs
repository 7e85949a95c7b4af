//! Sectioned TOML run files.
//!
//! ```toml
//! [grid]
//! n = 64            # required
//! dim = 1
//! length = 1.0
//! backend = "centered2"   # or "spectral"
//!
//! [physics]
//! mu = 1.0
//! e = 1.0
//! a_plus = 1.0
//! a_minus = 1.0
//! eps = 1.0
//! gamma = 2.0
//! k = 1.0
//! c1 = 1.0
//! c2 = 1.0
//! pressure_mode = "paper_raw"   # or "continuous"
//!
//! [regularization]
//! xi = 0.0
//! eta = 0.0
//! delta = 0.0
//! zeta = 0.0
//! s_order = 2
//!
//! [time]
//! t_final = 0.1     # required
//! dt = 1e-4         # fixed step; otherwise `cfl` (default 0.5) scales the stability limit
//! scheme = "rk4"    # or "imex"
//! enforce_neutrality = false
//! frozen_fluid = false
//!
//! [init]
//! rho = "1 + 0.1*sin(1)"
//! u = ["0.1*cos(1)"]       # one profile per axis; a bare string sets the first axis
//! c_plus = "1"
//! c_minus = "1"
//!
//! [output]
//! dir = "out"
//! cadence = 1       # 0 keeps only the endpoints
//! snapshot_every = 100
//! ```

use std::ops::Range;
use std::path::{Path, PathBuf};

use pnpcns_core::config::{InitialData, OutputSpec, Profile, RunConfig, Scheme, TimeStep};
use pnpcns_core::{Backend, Grid, PhysParams, PressureMode, RegParams};
use serde::{Deserialize, Deserializer};

use crate::CliError;

pub const DEFAULT_CFL: f64 = 0.5;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct File {
    grid: GridSection,
    #[serde(default)]
    physics: PhysicsSection,
    #[serde(default)]
    regularization: RegSection,
    time: TimeSection,
    #[serde(default)]
    init: InitSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    n: usize,
    #[serde(default = "one_usize")]
    dim: usize,
    #[serde(default = "one")]
    length: f64,
    #[serde(default, deserialize_with = "backend")]
    backend: Backend,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct PhysicsSection {
    mu: f64,
    e: f64,
    a_plus: f64,
    a_minus: f64,
    eps: f64,
    gamma: f64,
    k: f64,
    c1: f64,
    c2: f64,
    #[serde(deserialize_with = "pressure_mode")]
    pressure_mode: PressureMode,
}

impl Default for PhysicsSection {
    fn default() -> Self {
        let p = PhysParams::default();
        Self {
            mu: p.mu,
            e: p.e_charge,
            a_plus: p.a_plus,
            a_minus: p.a_minus,
            eps: p.eps,
            gamma: p.gamma,
            k: p.k_sing,
            c1: p.c1,
            c2: p.c2,
            pressure_mode: PressureMode::PaperRaw,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RegSection {
    xi: f64,
    eta: f64,
    delta: f64,
    zeta: f64,
    s_order: usize,
}

impl Default for RegSection {
    fn default() -> Self {
        let r = RegParams::default();
        Self { xi: r.xi, eta: r.eta, delta: r.delta, zeta: r.zeta, s_order: r.s_order }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TimeSection {
    t_final: f64,
    dt: Option<f64>,
    cfl: Option<f64>,
    #[serde(default, deserialize_with = "scheme")]
    scheme: Scheme,
    #[serde(default)]
    enforce_neutrality: bool,
    #[serde(default)]
    frozen_fluid: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct InitSection {
    #[serde(deserialize_with = "profile")]
    rho: Profile,
    #[serde(deserialize_with = "profiles")]
    u: Vec<Profile>,
    #[serde(deserialize_with = "profile")]
    c_plus: Profile,
    #[serde(deserialize_with = "profile")]
    c_minus: Profile,
}

impl Default for InitSection {
    fn default() -> Self {
        let d = InitialData::default();
        Self { rho: d.rho, u: d.u, c_plus: d.c_plus, c_minus: d.c_minus }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<PathBuf>,
    #[serde(default = "one_usize")]
    cadence: usize,
    snapshot_every: Option<usize>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: None, cadence: 1, snapshot_every: None }
    }
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

fn parsed<'de, D, V>(d: D, f: impl FnOnce(&str) -> Result<V, String>) -> Result<V, D::Error>
where
    D: Deserializer<'de>,
{
    let text = String::deserialize(d)?;
    f(&text).map_err(serde::de::Error::custom)
}

fn backend<'de, D: Deserializer<'de>>(d: D) -> Result<Backend, D::Error> {
    parsed(d, |s| match s {
        "centered2" => Ok(Backend::Centered2),
        "spectral" => Ok(Backend::Spectral),
        other => Err(format!("unknown backend {other:?} (centered2 | spectral)")),
    })
}

fn pressure_mode<'de, D: Deserializer<'de>>(d: D) -> Result<PressureMode, D::Error> {
    parsed(d, |s| match s {
        "paper_raw" => Ok(PressureMode::PaperRaw),
        "continuous" => Ok(PressureMode::Continuous),
        other => Err(format!("unknown pressure_mode {other:?} (paper_raw | continuous)")),
    })
}

fn scheme<'de, D: Deserializer<'de>>(d: D) -> Result<Scheme, D::Error> {
    parsed(d, |s| s.parse().map_err(|e: pnpcns_core::Error| e.to_string()))
}

fn profile<'de, D: Deserializer<'de>>(d: D) -> Result<Profile, D::Error> {
    parsed(d, |s| s.parse().map_err(|e: pnpcns_core::Error| e.to_string()))
}

fn profiles<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Profile>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(String),
        Many(Vec<String>),
    }
    let texts = match OneOrMany::deserialize(d)? {
        OneOrMany::One(s) => vec![s, "0".to_string()],
        OneOrMany::Many(v) => v,
    };
    texts
        .iter()
        .map(|s| s.parse().map_err(|e: pnpcns_core::Error| serde::de::Error::custom(e.to_string())))
        .collect()
}

/// 1-based line of a byte offset.
fn line_of(text: &str, span: Option<Range<usize>>) -> usize {
    span.map_or(1, |r| text[..r.start.min(text.len())].matches('\n').count() + 1)
}

fn field_of(message: &str) -> Option<String> {
    // toml names the offending key in backticks
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

/// Parses and validates run-file text.
pub fn parse_config_str(text: &str) -> Result<RunConfig<f64>, CliError> {
    let file: File = toml::from_str(text).map_err(|e| {
        let message = e.message().trim().to_string();
        CliError::Parse { file: None, line: line_of(text, e.span()), field: field_of(&message), message }
    })?;
    let grid = Grid::new(file.grid.dim, file.grid.n, file.grid.length).map_err(CliError::validation)?;
    let p = &file.physics;
    let phys = PhysParams {
        mu: p.mu,
        e_charge: p.e,
        a_plus: p.a_plus,
        a_minus: p.a_minus,
        eps: p.eps,
        gamma: p.gamma,
        k_sing: p.k,
        c1: p.c1,
        c2: p.c2,
    };
    let r = &file.regularization;
    let reg = RegParams { xi: r.xi, eta: r.eta, delta: r.delta, zeta: r.zeta, s_order: r.s_order };
    let t = &file.time;
    let time_step = match (t.dt, t.cfl) {
        (Some(_), Some(_)) => {
            return Err(CliError::Validation("[time] sets both dt and cfl; choose one".into()));
        }
        (Some(dt), None) => TimeStep::Fixed(dt),
        (None, c) => TimeStep::Cfl(c.unwrap_or(DEFAULT_CFL)),
    };
    let mut u = file.init.u;
    u.resize(2, Profile::constant(0.0));
    let config = RunConfig {
        grid,
        backend: file.grid.backend,
        phys,
        reg,
        pressure_mode: p.pressure_mode,
        init: InitialData { rho: file.init.rho, u, c_plus: file.init.c_plus, c_minus: file.init.c_minus },
        t_final: t.t_final,
        time_step,
        scheme: t.scheme,
        enforce_neutrality: t.enforce_neutrality,
        frozen_fluid: t.frozen_fluid,
        output: OutputSpec {
            dir: file.output.dir,
            cadence: file.output.cadence,
            snapshot_every: file.output.snapshot_every,
        },
    };
    config.validate().map_err(CliError::validation)?;
    Ok(config)
}

pub fn parse_config(path: &Path) -> Result<RunConfig<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config_str(&text).map_err(|e| e.in_file(path))
}

/// Every setting of `config` as `(key, value)`, in file order.
pub fn echo(config: &RunConfig<f64>) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = Vec::new();
    let mut put = |k: &str, v: String| out.push((k.to_string(), v));
    let g = &config.grid;
    put("grid.dim", g.dim().to_string());
    put("grid.n", g.n().to_string());
    put("grid.length", format!("{:e}", g.length()));
    put(
        "grid.backend",
        match config.backend {
            Backend::Centered2 => "centered2",
            Backend::Spectral => "spectral",
        }
        .into(),
    );
    let p = &config.phys;
    for (k, v) in [
        ("mu", p.mu),
        ("e", p.e_charge),
        ("a_plus", p.a_plus),
        ("a_minus", p.a_minus),
        ("eps", p.eps),
        ("gamma", p.gamma),
        ("k", p.k_sing),
        ("c1", p.c1),
        ("c2", p.c2),
    ] {
        put(&format!("physics.{k}"), format!("{v:e}"));
    }
    put(
        "physics.pressure_mode",
        match config.pressure_mode {
            PressureMode::PaperRaw => "paper_raw",
            PressureMode::Continuous => "continuous",
        }
        .into(),
    );
    let r = &config.reg;
    for (k, v) in [("xi", r.xi), ("eta", r.eta), ("delta", r.delta), ("zeta", r.zeta)] {
        put(&format!("regularization.{k}"), format!("{v:e}"));
    }
    put("regularization.s_order", r.s_order.to_string());
    put("time.t_final", format!("{:e}", config.t_final));
    match config.time_step {
        TimeStep::Fixed(dt) => put("time.dt", format!("{dt:e}")),
        TimeStep::Cfl(c) => put("time.cfl", format!("{c:e}")),
    }
    put("time.scheme", config.scheme.to_string());
    put("time.enforce_neutrality", config.enforce_neutrality.to_string());
    put("time.frozen_fluid", config.frozen_fluid.to_string());
    put("init.rho", config.init.rho.to_string());
    for (a, u) in config.init.u.iter().take(g.dim()).enumerate() {
        put(&format!("init.u{a}"), u.to_string());
    }
    put("init.c_plus", config.init.c_plus.to_string());
    put("init.c_minus", config.init.c_minus.to_string());
    let o = &config.output;
    put("output.dir", o.dir.as_ref().map_or("-".into(), |d| d.display().to_string()));
    put("output.cadence", o.cadence.to_string());
    put("output.snapshot_every", o.snapshot_every.map_or("-".into(), |n| n.to_string()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_numbers() {
        assert_eq!(line_of("a\nb\nc", Some(4..5)), 3);
        assert_eq!(line_of("abc", None), 1);
        assert_eq!(field_of("unknown field `foo`, expected one of"), Some("foo".into()));
    }
}
