//! Run configuration and analytic initial-data profiles.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::eos::PressureMode;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::ops::Backend;
use crate::params::{PhysParams, RegParams};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wave {
    Sin,
    Cos,
}

/// One additive term of a [`Profile`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Term {
    Const(f64),
    /// `amp * sin|cos(2 pi (k0 x + k1 y) / L)`
    Mode { amp: f64, wave: Wave, k: [i64; 2] },
}

/// Finite sum of constants and integer-wavenumber sine/cosine modes.
///
/// Text form: terms joined by `+`/`-`, each either a number or
/// `[A*]sin(k)` / `[A*]cos(k0,k1)`:
///
/// ```
/// use pnpcns_core::config::Profile;
/// let p: Profile = "1 + 0.2*cos(1) - sin(0,2)".parse().unwrap();
/// assert_eq!(p.terms().len(), 3);
/// ```
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Profile {
    terms: Vec<Term>,
}

impl Profile {
    pub fn constant(value: f64) -> Self {
        Self { terms: vec![Term::Const(value)] }
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Largest wavenumber index used on any axis.
    pub fn max_wavenumber(&self) -> i64 {
        self.terms
            .iter()
            .map(|t| match t {
                Term::Const(_) => 0,
                Term::Mode { k, .. } => k[0].abs().max(k[1].abs()),
            })
            .max()
            .unwrap_or(0)
    }

    pub fn uses_second_axis(&self) -> bool {
        self.terms.iter().any(|t| matches!(t, Term::Mode { k, .. } if k[1] != 0))
    }

    pub fn eval<T: Real>(&self, x: [T; 2], length: T) -> T {
        let base = T::lit(2.0) * T::PI() / length;
        self.terms.iter().fold(T::zero(), |acc, term| {
            acc + match *term {
                Term::Const(c) => T::lit(c),
                Term::Mode { amp, wave, k } => {
                    let phase = base * (T::lit(k[0] as f64) * x[0] + T::lit(k[1] as f64) * x[1]);
                    T::lit(amp)
                        * match wave {
                            Wave::Sin => phase.sin(),
                            Wave::Cos => phase.cos(),
                        }
                }
            }
        })
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, term) in self.terms.iter().enumerate() {
            let (value, body) = match *term {
                Term::Const(c) => (c, None),
                Term::Mode { amp, wave, k } => {
                    let name = if wave == Wave::Sin { "sin" } else { "cos" };
                    let args = if k[1] == 0 { format!("{}", k[0]) } else { format!("{},{}", k[0], k[1]) };
                    (amp, Some(format!("{name}({args})")))
                }
            };
            let sign = if value < 0.0 { "-" } else { "+" };
            match (i, sign) {
                (0, "+") => {}
                (0, _) => write!(f, "-")?,
                _ => write!(f, " {sign} ")?,
            }
            match body {
                None => write!(f, "{}", value.abs())?,
                Some(b) => write!(f, "{}*{b}", value.abs())?,
            }
        }
        Ok(())
    }
}

fn bad(expr: &str, reason: impl Into<String>) -> Error {
    Error::BadProfile { expr: expr.to_string(), reason: reason.into() }
}

fn parse_term(expr: &str, text: &str, sign: f64) -> Result<Term> {
    let text = text.trim();
    if text.is_empty() {
        return Err(bad(expr, "empty term"));
    }
    let (amp, call) = match text.find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E') {
        None => {
            let v: f64 = text.parse().map_err(|_| bad(expr, format!("not a number: {text}")))?;
            return Ok(Term::Const(sign * v));
        }
        Some(0) => (1.0, text),
        Some(_) => {
            let (a, rest) = text.split_once('*').ok_or_else(|| bad(expr, format!("expected A*mode in {text}")))?;
            let a: f64 = a.trim().parse().map_err(|_| bad(expr, format!("not a number: {a}")))?;
            (a, rest.trim())
        }
    };
    let (name, args) = call.split_once('(').ok_or_else(|| bad(expr, format!("expected mode call in {call}")))?;
    let args = args.strip_suffix(')').ok_or_else(|| bad(expr, "missing closing parenthesis"))?;
    let wave = match name.trim() {
        "sin" => Wave::Sin,
        "cos" => Wave::Cos,
        other => return Err(bad(expr, format!("unknown function {other}"))),
    };
    let ks: Vec<i64> = args
        .split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|_| bad(expr, format!("wavenumber must be an integer: {s}"))))
        .collect::<Result<_>>()?;
    let k = match ks.as_slice() {
        [a] => [*a, 0],
        [a, b] => [*a, *b],
        _ => return Err(bad(expr, "expected one or two wavenumbers")),
    };
    Ok(Term::Mode { amp: sign * amp, wave, k })
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(expr: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut sign = 1.0;
        let mut start = 0;
        let mut depth = 0usize;
        let bytes = expr.as_bytes();
        let mut prev_significant: Option<u8> = None;
        for (i, &b) in bytes.iter().enumerate() {
            match b {
                b'(' => depth += 1,
                b')' => depth = depth.checked_sub(1).ok_or_else(|| bad(expr, "unbalanced parenthesis"))?,
                b'+' | b'-' if depth == 0 => {
                    // exponent sign or unary sign of the first term
                    let exponent = matches!(prev_significant, Some(b'e' | b'E'))
                        && i >= 2
                        && bytes[i - 2].is_ascii_digit() | (bytes[i - 2] == b'.');
                    if exponent {
                        prev_significant = Some(b);
                        continue;
                    }
                    let chunk = &expr[start..i];
                    if chunk.trim().is_empty() {
                        if !terms.is_empty() || prev_significant.is_some() {
                            return Err(bad(expr, "dangling operator"));
                        }
                    } else {
                        terms.push(parse_term(expr, chunk, sign)?);
                    }
                    sign = if b == b'-' { -1.0 } else { 1.0 };
                    start = i + 1;
                }
                _ => {}
            }
            if !b.is_ascii_whitespace() {
                prev_significant = Some(b);
            }
        }
        if depth != 0 {
            return Err(bad(expr, "unbalanced parenthesis"));
        }
        terms.push(parse_term(expr, &expr[start..], sign)?);
        Ok(Self { terms })
    }
}

/// Initial data: `rho0`, `u0` (one profile per axis), `c+0`, `c-0`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub rho: Profile,
    pub u: Vec<Profile>,
    pub c_plus: Profile,
    pub c_minus: Profile,
}

impl Default for InitialData {
    fn default() -> Self {
        Self {
            rho: Profile::constant(1.0),
            u: vec![Profile::constant(0.0), Profile::constant(0.0)],
            c_plus: Profile::constant(1.0),
            c_minus: Profile::constant(1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    Rk4,
    Imex,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Scheme::Rk4),
            "imex" => Ok(Scheme::Imex),
            other => Err(Error::InvalidParameter(format!("unknown integrator {other:?} (rk4 | imex)"))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Rk4 => "rk4",
            Scheme::Imex => "imex",
        })
    }
}

/// Fixed step, or a fraction of the estimated stability limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep<T> {
    Fixed(T),
    Cfl(T),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    /// Diagnostics row every `cadence` steps; `0` keeps only the endpoints.
    pub cadence: usize,
    pub snapshot_every: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig<T: Real> {
    pub grid: Grid<T>,
    pub backend: Backend,
    pub phys: PhysParams<T>,
    pub reg: RegParams<T>,
    pub pressure_mode: PressureMode,
    pub init: InitialData,
    pub t_final: T,
    pub time_step: TimeStep<T>,
    pub scheme: Scheme,
    /// Subtract the mean charge before every potential solve.
    pub enforce_neutrality: bool,
    /// Hold density and velocity fixed; only ions and potential evolve.
    pub frozen_fluid: bool,
    pub output: OutputSpec,
}

impl<T: Real> RunConfig<T> {
    /// Defaults on `grid`: unit physics, no regularization, rk4.
    pub fn new(grid: Grid<T>, t_final: T, dt: T) -> Self {
        Self {
            grid,
            backend: Backend::Centered2,
            phys: PhysParams::default(),
            reg: RegParams::default(),
            pressure_mode: PressureMode::PaperRaw,
            init: InitialData::default(),
            t_final,
            time_step: TimeStep::Fixed(dt),
            scheme: Scheme::Rk4,
            enforce_neutrality: false,
            frozen_fluid: false,
            output: OutputSpec { cadence: 1, ..OutputSpec::default() },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.phys.validate()?;
        self.reg.validate()?;
        if !(self.t_final >= T::zero()) || !self.t_final.is_finite() {
            return Err(Error::InvalidParameter(format!("t_final must be nonnegative, got {}", self.t_final)));
        }
        match self.time_step {
            TimeStep::Fixed(dt) | TimeStep::Cfl(dt) if !(dt > T::zero()) || !dt.is_finite() => {
                return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
            }
            _ => {}
        }
        if self.output.snapshot_every == Some(0) {
            return Err(Error::InvalidParameter("snapshot interval must be at least 1".into()));
        }
        if self.init.u.len() < self.grid.dim() {
            return Err(Error::InvalidParameter(format!(
                "need {} velocity profiles, got {}",
                self.grid.dim(),
                self.init.u.len()
            )));
        }
        if self.grid.dim() == 1 {
            let all = [&self.init.rho, &self.init.c_plus, &self.init.c_minus];
            if all.iter().any(|p| p.uses_second_axis()) || self.init.u[0].uses_second_axis() {
                return Err(Error::InvalidParameter("second-axis wavenumber in a 1D run".into()));
            }
        }
        if self.reg.delta > T::zero() && self.backend != Backend::Spectral {
            return Err(Error::InvalidParameter("delta > 0 needs the spectral backend".into()));
        }
        Ok(())
    }
}
