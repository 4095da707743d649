//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::RowDVector;

use crate::dmd::{ModelKind, ModelStructure};
use crate::error::{Error, Result};
use crate::linalg::TruncationPolicy;
use crate::signals::{sample_signal, InputSignal};
use crate::systems::{BurgersConfig, VdpConfig};
use crate::Scalar;

/// Which system produces the snapshot data.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemKind {
    /// Carleman-lifted Burgers' equation.
    Burgers,
    /// Coupled van der Pol oscillators.
    Vdp,
    /// Pre-recorded snapshot CSV.
    File(PathBuf),
}

/// Input specification as written in a config file.
///
/// ```text
/// cosdecay:AMP,FREQ,DECAY       AMP cos(FREQ t) exp(-DECAY t)
/// sincos:A1,F1,A2,F2            A1 sin(F1 t) + A2 cos(F2 t)
/// square:AMP,FREQ               AMP square(FREQ t)
/// decaying-square:AMP,FREQ,S    AMP square(FREQ t) / (S (t + 1))
/// zero
/// ```
#[derive(Debug, Clone, PartialEq)]
pub enum SignalSpec<T> {
    Stationary(InputSignal<T>),
    DecayingSquare { amp: T, freq: T, scale: T },
}

impl<T: Scalar> SignalSpec<T> {
    /// Samples at `t_k = k dt`, `k = 0..m`.
    pub fn sample(&self, dt: T, m: usize) -> RowDVector<T> {
        match self {
            SignalSpec::Stationary(sig) => sample_signal(sig, dt, m),
            SignalSpec::DecayingSquare { amp, freq, scale } => {
                sample_signal(&InputSignal::decaying_square(*amp, *freq, *scale, dt, m), dt, m)
            }
        }
    }
}

impl<T: Scalar> FromStr for SignalSpec<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let vals: Vec<T> = args
            .split(',')
            .filter(|a| !a.trim().is_empty())
            .map(|a| a.trim().parse::<f64>().map(T::lit))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Config(format!("input '{s}': {e}")))?;
        let want = |k: usize| {
            if vals.len() == k {
                Ok(())
            } else {
                Err(Error::Config(format!("input '{s}' needs {k} parameters, got {}", vals.len())))
            }
        };
        let spec = match kind.trim().to_ascii_lowercase().as_str() {
            "cosdecay" => {
                want(3)?;
                SignalSpec::Stationary(InputSignal::CosineDecay { amp: vals[0], freq: vals[1], decay: vals[2] })
            }
            "sincos" => {
                want(4)?;
                SignalSpec::Stationary(InputSignal::SinCosCombo { a1: vals[0], f1: vals[1], a2: vals[2], f2: vals[3] })
            }
            "square" => {
                want(2)?;
                SignalSpec::Stationary(InputSignal::SquareWave { amp: vals[0], freq: vals[1] })
            }
            "decaying-square" => {
                want(3)?;
                SignalSpec::DecayingSquare { amp: vals[0], freq: vals[1], scale: vals[2] }
            }
            "zero" => {
                want(0)?;
                SignalSpec::Stationary(InputSignal::ZeroInput)
            }
            other => return Err(Error::Config(format!("unknown input kind '{other}'"))),
        };
        Ok(spec)
    }
}

impl<T: Scalar> fmt::Display for SignalSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalSpec::Stationary(InputSignal::CosineDecay { amp, freq, decay }) => {
                write!(f, "cosdecay:{amp},{freq},{decay}")
            }
            SignalSpec::Stationary(InputSignal::SinCosCombo { a1, f1, a2, f2 }) => {
                write!(f, "sincos:{a1},{f1},{a2},{f2}")
            }
            SignalSpec::Stationary(InputSignal::SquareWave { amp, freq }) => write!(f, "square:{amp},{freq}"),
            SignalSpec::Stationary(InputSignal::ZeroInput) => write!(f, "zero"),
            SignalSpec::Stationary(InputSignal::Custom { samples, .. }) => write!(f, "custom[{}]", samples.len()),
            SignalSpec::DecayingSquare { amp, freq, scale } => write!(f, "decaying-square:{amp},{freq},{scale}"),
        }
    }
}

/// Everything needed to train and test one model.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig<T> {
    /// Prefix for every artifact file.
    pub name: String,
    pub system: SystemKind,
    pub structure: ModelStructure,
    pub dt: T,
    pub horizon: T,
    pub train_input: SignalSpec<T>,
    pub test_input: SignalSpec<T>,
    pub test_horizon: T,
    /// `None` cuts `Ω` at machine precision.
    pub tau_p: Option<TruncationPolicy<T>>,
    /// `None` keeps the numerical rank of `Xs`.
    pub reduce: Option<TruncationPolicy<T>>,
    pub n0: usize,
    pub nu: T,
    pub length: T,
    /// 1-based; `None` selects the midpoint.
    pub output_index: Option<usize>,
    pub vdp: VdpConfig<T>,
    /// Initial state of the reference system in its own coordinates; `None` is zero.
    pub initial_state: Option<Vec<T>>,
    pub output_dir: PathBuf,
    /// Also write the snapshot CSV and the unreduced model.
    pub save_fit_data: bool,
}

impl<T: Scalar> Default for ExperimentConfig<T> {
    fn default() -> Self {
        Self {
            name: "experiment".into(),
            system: SystemKind::Vdp,
            structure: ModelStructure::new(ModelKind::Linear),
            dt: T::lit(0.01),
            horizon: T::one(),
            train_input: SignalSpec::Stationary(InputSignal::ZeroInput),
            test_input: SignalSpec::Stationary(InputSignal::ZeroInput),
            test_horizon: T::one(),
            tau_p: None,
            reduce: None,
            n0: 10,
            nu: T::lit(0.01),
            length: T::one(),
            output_index: None,
            vdp: VdpConfig { mu: T::lit(0.5), a: T::lit(0.5), b: T::lit(0.2) },
            initial_state: None,
            output_dir: PathBuf::from("out"),
            save_fit_data: true,
        }
    }
}

fn parse_num<T: Scalar>(key: &str, v: &str) -> Result<T> {
    v.parse::<f64>()
        .map(T::lit)
        .map_err(|e| Error::Config(format!("{key}: '{v}': {e}")))
}

fn parse_policy<T: Scalar>(key: &str, v: &str) -> Result<Option<TruncationPolicy<T>>> {
    if v.eq_ignore_ascii_case("auto") {
        return Ok(None);
    }
    let p: TruncationPolicy<T> = v.parse().map_err(|e| Error::Config(format!("{key}: {e}")))?;
    p.validate().map_err(|e| Error::Config(format!("{key}: {e}")))?;
    Ok(Some(p))
}

impl<T: Scalar> ExperimentConfig<T> {
    /// Parses config text; later lines override earlier ones.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen_test_input = false;
        let mut seen_test_horizon = false;
        let mut required = vec!["system", "structure", "dt", "horizon", "train_input"];
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(Error::Parse {
                line: idx + 1,
                msg: format!("expected 'key = value', got '{line}'"),
            })?;
            let key = key.trim();
            required.retain(|k| *k != key);
            seen_test_input |= key == "test_input";
            seen_test_horizon |= key == "test_horizon";
            cfg.set(key, value.trim()).map_err(|e| match e {
                Error::Config(msg) => Error::Parse { line: idx + 1, msg },
                other => other,
            })?;
        }
        if let Some(k) = required.first() {
            return Err(Error::Config(format!("missing required key '{k}'")));
        }
        if !seen_test_input {
            cfg.test_input = cfg.train_input.clone();
        }
        if !seen_test_horizon {
            cfg.test_horizon = cfg.horizon;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Config(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse(&text)
    }

    /// Applies `key=value` overrides and re-validates.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override '{o}' is not key=value")))?;
            self.set(k.trim(), v.trim())?;
        }
        self.validate()
    }

    /// Sets one key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "name" => self.name = value.to_string(),
            "system" => {
                self.system = match value.to_ascii_lowercase().as_str() {
                    "burgers" => SystemKind::Burgers,
                    "vdp" | "van-der-pol" => SystemKind::Vdp,
                    _ => match value.strip_prefix("file:") {
                        Some(p) => SystemKind::File(PathBuf::from(p.trim())),
                        None => return Err(Error::Config(format!("unknown system '{value}'"))),
                    },
                }
            }
            "structure" => {
                let kind: ModelKind = value.parse().map_err(|e| Error::Config(format!("{e}")))?;
                self.structure = ModelStructure { kind, ..self.structure };
            }
            "quadratic_output" => {
                self.structure.include_quadratic_output =
                    value.parse().map_err(|e| Error::Config(format!("quadratic_output: {e}")))?
            }
            "dt" => self.dt = parse_num(key, value)?,
            "horizon" => self.horizon = parse_num(key, value)?,
            "test_horizon" => self.test_horizon = parse_num(key, value)?,
            "train_input" => self.train_input = value.parse()?,
            "test_input" => self.test_input = value.parse()?,
            "tau_p" => self.tau_p = parse_policy(key, value)?,
            "reduce" => self.reduce = parse_policy(key, value)?,
            "n0" => self.n0 = value.parse().map_err(|e| Error::Config(format!("n0: {e}")))?,
            "nu" => self.nu = parse_num(key, value)?,
            "length" => self.length = parse_num(key, value)?,
            "output_index" => {
                self.output_index = if value.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(value.parse().map_err(|e| Error::Config(format!("output_index: {e}")))?)
                }
            }
            "mu" => self.vdp.mu = parse_num(key, value)?,
            "a" => self.vdp.a = parse_num(key, value)?,
            "b" => self.vdp.b = parse_num(key, value)?,
            "initial_state" => {
                self.initial_state = if value.eq_ignore_ascii_case("zero") {
                    None
                } else {
                    Some(value.split(',').map(|v| parse_num(key, v.trim())).collect::<Result<_>>()?)
                }
            }
            "output_dir" => self.output_dir = PathBuf::from(value),
            "save_fit_data" => {
                self.save_fit_data = value.parse().map_err(|e| Error::Config(format!("save_fit_data: {e}")))?
            }
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero()) || !self.dt.finite() {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        self.steps(self.horizon)?;
        self.steps(self.test_horizon)?;
        if matches!(self.system, SystemKind::Burgers) {
            self.burgers().validate()?;
        }
        self.vdp.validate()?;
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::Config(format!("invalid experiment name '{}'", self.name)));
        }
        Ok(())
    }

    /// Snapshot count for a horizon; it must be an integer multiple of `dt`.
    pub fn steps(&self, horizon: T) -> Result<usize> {
        let ratio = (horizon / self.dt).as_f64();
        let m = ratio.round();
        if !(m >= 1.0) || (ratio - m).abs() > 1e-6 * m.max(1.0) {
            return Err(Error::Config(format!(
                "horizon {horizon} is not a positive integer multiple of dt = {}",
                self.dt
            )));
        }
        Ok(m as usize)
    }

    pub fn burgers(&self) -> BurgersConfig<T> {
        let mut b = BurgersConfig::new(self.n0, self.nu);
        b.length = self.length;
        if let Some(i) = self.output_index {
            b.output_index = i;
        }
        b
    }
}
