//! `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, no nesting. A file that
//! contains a `[config]` header (such as a run manifest) is read from that
//! section only, so a manifest can be passed back as `--config`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use kondo_walk::evolve1w::Frame;
use kondo_walk::operators::{self, Family};
use kondo_walk::{ModelParams, ParticleStatistics};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Init {
    DeltaDelta,
    BoundDelta,
}

/// Which statistics a two-walker command runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StatsChoice {
    One(ParticleStatistics),
    All,
}

impl StatsChoice {
    pub fn list(self) -> Vec<ParticleStatistics> {
        match self {
            StatsChoice::One(s) => vec![s],
            StatsChoice::All => vec![
                ParticleStatistics::Fermion,
                ParticleStatistics::Boson,
                ParticleStatistics::Distinguishable,
            ],
        }
    }
}

pub fn stats_name(s: ParticleStatistics) -> &'static str {
    match s {
        ParticleStatistics::Fermion => "fermion",
        ParticleStatistics::Boson => "boson",
        ParticleStatistics::Distinguishable => "distinguishable",
    }
}

/// Everything a run needs. Optional fields are `None` when the key was not
/// given; defaults are applied by the accessors so that the echo only
/// repeats what the user wrote.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub phi: Option<f64>,
    pub epsilon: f64,
    pub m: Option<f64>,
    pub j_x: Option<f64>,
    pub j_y: Option<f64>,
    pub j_z: Option<f64>,
    pub lx: usize,
    pub band_margin: f64,
    pub support_eps: f64,
    pub family: Option<Family>,
    /// Coupling strength for `family`.
    pub j: Option<f64>,
    /// Couplings tabulated by `bound`; defaults to `[j]`.
    pub j_list: Option<Vec<f64>>,
    pub steps: usize,
    pub x0: i64,
    pub stats: StatsChoice,
    pub frame: Frame,
    pub init: Init,
    pub bound_index: usize,
    /// Largest dimension the negativity eigensolver may take.
    pub dim_cap: usize,
    /// Sampling interval of the negativity series.
    pub every: usize,
    /// Extra P(x₁,x₂) snapshots every this many steps (0 = first and last only).
    pub snapshot_every: usize,
    pub outdir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = ModelParams::default();
        RunConfig {
            phi: None,
            epsilon: p.epsilon,
            m: None,
            j_x: None,
            j_y: None,
            j_z: None,
            lx: p.lx,
            band_margin: p.band_margin,
            support_eps: p.support_eps,
            family: None,
            j: None,
            j_list: None,
            steps: 50,
            x0: 21,
            stats: StatsChoice::One(ParticleStatistics::Fermion),
            frame: Frame::Symmetric,
            init: Init::DeltaDelta,
            bound_index: 1,
            dim_cap: kondo_walk::entanglement::DEFAULT_DIM_CAP,
            every: 1,
            snapshot_every: 0,
            outdir: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "phi",
    "epsilon",
    "m",
    "j_x",
    "j_y",
    "j_z",
    "lx",
    "band_margin",
    "support_eps",
    "family",
    "j",
    "j_list",
    "steps",
    "x0",
    "stats",
    "frame",
    "init",
    "bound_index",
    "dim_cap",
    "every",
    "snapshot_every",
    "outdir",
];

/// Parse a real number; `pi`, `pi/10`, `2*pi` and `-pi/4` are accepted too.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let bad = || format!("expected a number, got `{s}`");
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, s),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (body, None),
    };
    let coef = match num.split_once('*') {
        Some((c, p)) if p.trim() == "pi" => c.trim().parse::<f64>().map_err(|_| bad())?,
        None if num == "pi" => 1.0,
        _ => return Err(bad()),
    };
    let den = match den {
        Some(d) => d.parse::<f64>().map_err(|_| bad())?,
        None => 1.0,
    };
    Ok(sign * coef * PI / den)
}

fn parse_uint(s: &str) -> Result<usize, String> {
    s.parse::<usize>().map_err(|_| format!("expected a nonnegative integer, got `{s}`"))
}

/// Full-precision text for a float that reparses to the same bits.
fn real(v: f64) -> String {
    format!("{v:?}")
}

impl RunConfig {
    /// Parse configuration text. `origin` names the source in error messages.
    pub fn parse(text: &str, origin: &str) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        cfg.merge(text, origin)?;
        Ok(cfg)
    }

    /// Apply the assignments in `text` on top of `self`.
    pub fn merge(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        let sectioned = text.lines().any(|l| strip_comment(l) == "[config]");
        let mut in_section = !sectioned;
        let mut seen: Vec<&str> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            let at = || format!("{origin}:{}", n + 1);
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !sectioned {
                    return Err(CliError::config(at(), format!("unexpected section header `{line}`")));
                }
                in_section = line == "[config]";
                continue;
            }
            if !in_section {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::config(at(), format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            let value = value.trim();
            let key = KEYS
                .iter()
                .copied()
                .find(|k| *k == key)
                .ok_or_else(|| CliError::config(at(), format!("unknown key `{key}`")))?;
            if seen.contains(&key) {
                return Err(CliError::config(at(), format!("duplicate key `{key}`")));
            }
            seen.push(key);
            self.set(key, value).map_err(|msg| CliError::config(at(), format!("{key}: {msg}")))?;
        }
        Ok(())
    }

    /// Apply a single `key=value` override.
    pub fn apply_override(&mut self, assignment: &str, origin: &str) -> Result<(), CliError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::config(origin.to_string(), format!("expected key=value, got `{assignment}`")))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::config(origin.to_string(), format!("unknown key `{key}`")));
        }
        self.set(key, value.trim()).map_err(|msg| CliError::config(origin.to_string(), format!("{key}: {msg}")))
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "phi" => self.phi = Some(parse_real(v)?),
            "epsilon" => self.epsilon = parse_real(v)?,
            "m" => self.m = Some(parse_real(v)?),
            "j_x" => self.j_x = Some(parse_real(v)?),
            "j_y" => self.j_y = Some(parse_real(v)?),
            "j_z" => self.j_z = Some(parse_real(v)?),
            "lx" => self.lx = parse_uint(v)?,
            "band_margin" => self.band_margin = parse_real(v)?,
            "support_eps" => self.support_eps = parse_real(v)?,
            "family" => {
                self.family = Some(match v {
                    "xx" => Family::XX,
                    "su2" => Family::SU2,
                    _ => return Err(format!("expected xx or su2, got `{v}`")),
                })
            }
            "j" => self.j = Some(parse_real(v)?),
            "j_list" => {
                let list = v.split(',').map(parse_real).collect::<Result<Vec<_>, _>>()?;
                if list.is_empty() {
                    return Err("empty list".into());
                }
                self.j_list = Some(list);
            }
            "steps" => self.steps = parse_uint(v)?,
            "x0" => self.x0 = v.parse().map_err(|_| format!("expected an integer, got `{v}`"))?,
            "stats" => {
                self.stats = match v {
                    "fermion" => StatsChoice::One(ParticleStatistics::Fermion),
                    "boson" => StatsChoice::One(ParticleStatistics::Boson),
                    "distinguishable" => StatsChoice::One(ParticleStatistics::Distinguishable),
                    "all" => StatsChoice::All,
                    _ => return Err(format!("expected fermion, boson, distinguishable or all, got `{v}`")),
                }
            }
            "frame" => {
                self.frame = match v {
                    "symmetric" => Frame::Symmetric,
                    "shifted" => Frame::Shifted,
                    _ => return Err(format!("expected symmetric or shifted, got `{v}`")),
                }
            }
            "init" => {
                self.init = match v {
                    "delta_delta" => Init::DeltaDelta,
                    "bound_delta" => Init::BoundDelta,
                    _ => return Err(format!("expected delta_delta or bound_delta, got `{v}`")),
                }
            }
            "bound_index" => {
                let b = parse_uint(v)?;
                if !(1..=4).contains(&b) {
                    return Err(format!("must be in 1..=4, got {b}"));
                }
                self.bound_index = b;
            }
            "dim_cap" => self.dim_cap = parse_uint(v)?,
            "every" => {
                let e = parse_uint(v)?;
                if e == 0 {
                    return Err("must be at least 1".into());
                }
                self.every = e;
            }
            "snapshot_every" => self.snapshot_every = parse_uint(v)?,
            "outdir" => {
                if v.is_empty() {
                    return Err("empty path".into());
                }
                self.outdir = Some(PathBuf::from(v));
            }
            _ => unreachable!("key list and setter disagree on `{key}`"),
        }
        Ok(())
    }

    /// Text that [`RunConfig::parse`] turns back into an equal config.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
        if let Some(v) = self.phi {
            put("phi", real(v));
        }
        put("epsilon", real(self.epsilon));
        if let Some(v) = self.m {
            put("m", real(v));
        }
        for (k, v) in [("j_x", self.j_x), ("j_y", self.j_y), ("j_z", self.j_z)] {
            if let Some(v) = v {
                put(k, real(v));
            }
        }
        put("lx", self.lx.to_string());
        put("band_margin", real(self.band_margin));
        put("support_eps", real(self.support_eps));
        if let Some(f) = self.family {
            put("family", match f {
                Family::XX => "xx",
                Family::SU2 => "su2",
            }
            .into());
        }
        if let Some(v) = self.j {
            put("j", real(v));
        }
        if let Some(list) = &self.j_list {
            put("j_list", list.iter().map(|v| real(*v)).collect::<Vec<_>>().join(", "));
        }
        put("steps", self.steps.to_string());
        put("x0", self.x0.to_string());
        put("stats", match self.stats {
            StatsChoice::One(s) => stats_name(s),
            StatsChoice::All => "all",
        }
        .into());
        put("frame", match self.frame {
            Frame::Symmetric => "symmetric",
            Frame::Shifted => "shifted",
        }
        .into());
        put("init", match self.init {
            Init::DeltaDelta => "delta_delta",
            Init::BoundDelta => "bound_delta",
        }
        .into());
        put("bound_index", self.bound_index.to_string());
        put("dim_cap", self.dim_cap.to_string());
        put("every", self.every.to_string());
        put("snapshot_every", self.snapshot_every.to_string());
        if let Some(o) = &self.outdir {
            put("outdir", o.display().to_string());
        }
        s
    }

    /// Couplings (j_x, j_y, j_z) after resolving `family` and `j`.
    pub fn couplings(&self) -> Result<(f64, f64, f64), CliError> {
        let explicit = self.j_x.is_some() || self.j_y.is_some() || self.j_z.is_some();
        match (self.family, self.j) {
            (Some(_), _) if explicit => Err(CliError::config(
                "config".into(),
                "give either family with j, or j_x/j_y/j_z, not both".into(),
            )),
            (Some(Family::XX), Some(j)) => Ok((j, j, 0.0)),
            (Some(Family::SU2), Some(j)) => Ok((j, j, j)),
            (Some(_), None) => Err(CliError::config("config".into(), "family requires j".into())),
            (None, Some(_)) => Err(CliError::config("config".into(), "j requires family".into())),
            (None, None) => Ok((self.j_x.unwrap_or(0.0), self.j_y.unwrap_or(0.0), self.j_z.unwrap_or(0.0))),
        }
    }

    /// Validated model parameters with couplings `(jx, jy, jz)`.
    pub fn params_with(&self, (jx, jy, jz): (f64, f64, f64)) -> Result<ModelParams, CliError> {
        let phi = match (self.phi, self.m) {
            (Some(phi), _) => phi,
            (None, Some(m)) => operators::phi_from_dirac(self.epsilon, m),
            (None, None) => ModelParams::default().phi,
        };
        let p = ModelParams {
            phi,
            epsilon: self.epsilon,
            m: self.m,
            j_x: jx,
            j_y: jy,
            j_z: jz,
            lx: self.lx,
            band_margin: self.band_margin,
            support_eps: self.support_eps,
        };
        p.validate().map_err(|e| CliError::config("config".into(), e.to_string()))?;
        Ok(p)
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        self.params_with(self.couplings()?)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}
