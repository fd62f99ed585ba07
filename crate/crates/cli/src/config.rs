//! Plain-text `key = value` run configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fraclps_core::grid::{BanachSpec, GridSpec};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Which semigroup `compute semigroup` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemigroupKind {
    Poisson,
    Heat,
    Subordinated,
}

impl SemigroupKind {
    pub fn name(&self) -> &'static str {
        match self {
            SemigroupKind::Poisson => "poisson",
            SemigroupKind::Heat => "heat",
            SemigroupKind::Subordinated => "subordinated",
        }
    }
}

/// Route for `compute fracderiv`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Spectral,
    Quadrature,
}

impl Route {
    pub fn name(&self) -> &'static str {
        match self {
            Route::Spectral => "spectral",
            Route::Quadrature => "quadrature",
        }
    }
}

/// Every setting of a run, with defaults for keys the file omits.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub n: usize,
    pub period: f64,
    pub m: usize,
    pub r: f64,
    pub alpha: Vec<f64>,
    pub t: f64,
    pub p: f64,
    pub q: f64,
    pub lambda: f64,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub count: Option<usize>,
    pub semigroup: SemigroupKind,
    pub route: Route,
    pub subordination_nodes: usize,
    pub subordination_tolerance: f64,
    pub sw_near: usize,
    pub sw_far: usize,
    pub sw_tolerance: f64,
    /// Replaces every tolerance in the verification table.
    pub tolerance: Option<f64>,
    pub seed: u64,
    pub m_list: Vec<usize>,
    pub trials: usize,
    pub base_freq: u64,
    pub grow_threshold: f64,
    pub flat_threshold: f64,
    pub hilbert_field: String,
    pub half_width: f64,
    pub half_points: usize,
    pub eps_floor: f64,
    pub per_octave: usize,
    pub osc_threshold: f64,
    pub resolutions: usize,
    pub out: PathBuf,
}

/// Names accepted by `hilbert_field`.
pub const HILBERT_FIELDS: [&str; 10] = [
    "gaussian",
    "gaussian_offset",
    "bump",
    "bump_pair",
    "indicator",
    "modulated",
    "odd_profile",
    "complex_wave",
    "l2_pair",
    "l4_triple",
];

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            n: 1024,
            period: std::f64::consts::TAU,
            m: 1,
            r: 2.0,
            alpha: vec![1.0],
            t: 1.0,
            p: 2.0,
            q: 2.0,
            lambda: 2.0,
            t_min: None,
            t_max: None,
            count: None,
            semigroup: SemigroupKind::Poisson,
            route: Route::Quadrature,
            subordination_nodes: 256,
            subordination_tolerance: 1e-8,
            sw_near: 128,
            sw_far: 128,
            sw_tolerance: 1e-6,
            tolerance: None,
            seed: 20240601,
            m_list: vec![1, 2, 4, 8, 16, 32, 64],
            trials: 16,
            base_freq: 1,
            grow_threshold: 1.5,
            flat_threshold: 1.2,
            hilbert_field: "gaussian".into(),
            half_width: 16.0,
            half_points: 1 << 13,
            eps_floor: 1.0,
            per_octave: 4,
            osc_threshold: 1e-3,
            resolutions: 4,
            out: PathBuf::from("out"),
        }
    }
}

/// Legal range of each key, quoted in error messages.
const KEYS: &[(&str, &str)] = &[
    ("dim", "1 or 2"),
    ("N", "a power of two in [8, 65536]"),
    ("L", "a positive finite number, or 2pi"),
    ("m", "an integer in [1, 1000]"),
    ("r", "a number in [1, inf] (inf allowed)"),
    ("alpha", "a comma-separated list of numbers in (0, 8]"),
    ("t", "a positive finite number"),
    ("p", "a number in (1, inf] (inf allowed)"),
    ("q", "a finite number in (1, 16]"),
    ("lambda", "a finite number in (1, 64]"),
    ("t_min", "a positive finite number below t_max, or auto"),
    ("t_max", "a positive finite number above t_min, or auto"),
    ("count", "an integer in [16, 100000], or auto"),
    ("semigroup", "poisson, heat or subordinated"),
    ("route", "spectral or quadrature"),
    ("subordination_nodes", "an integer in [8, 100000]"),
    ("subordination_tolerance", "a number in (0, 1)"),
    ("sw_near", "an integer in [4, 4096]"),
    ("sw_far", "an integer in [4, 4096]"),
    ("sw_tolerance", "a number in (0, 1)"),
    ("tolerance", "a nonnegative finite number, or none"),
    ("seed", "an unsigned 64-bit integer"),
    ("m_list", "a strictly increasing comma-separated list of integers in [1, 1000]"),
    ("trials", "an integer in [1, 100000]"),
    ("base_freq", "an integer in [1, 1024]"),
    ("grow_threshold", "a finite number >= 1"),
    ("flat_threshold", "a finite number >= 1 not above grow_threshold"),
    ("hilbert_field", "one of gaussian, gaussian_offset, bump, bump_pair, indicator, modulated, odd_profile, complex_wave, l2_pair, l4_triple"),
    ("half_width", "a number in [8, 1024]"),
    ("half_points", "a power of two in [64, 1048576]"),
    ("eps_floor", "a positive number in [2 h, 2 half_width]"),
    ("per_octave", "an integer in [1, 64]"),
    ("osc_threshold", "a nonnegative finite number"),
    ("resolutions", "an integer in [2, 8]"),
    ("out", "a nonempty path"),
];

fn range_of(key: &str) -> &'static str {
    KEYS.iter().find(|(k, _)| *k == key).map_or("", |(_, r)| r)
}

fn bad(key: &str, value: &str) -> CliError {
    CliError::config(format!("invalid value `{value}` for key `{key}`: expected {}", range_of(key)))
}

fn number(key: &str, v: &str) -> Result<f64, CliError> {
    match v.trim() {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        "2pi" | "tau" => Ok(std::f64::consts::TAU),
        s => s.parse::<f64>().ok().filter(|x| !x.is_nan()).ok_or_else(|| bad(key, v)),
    }
}

fn finite(key: &str, v: &str) -> Result<f64, CliError> {
    number(key, v).and_then(|x| if x.is_finite() { Ok(x) } else { Err(bad(key, v)) })
}

fn integer(key: &str, v: &str) -> Result<u64, CliError> {
    v.trim().parse::<u64>().map_err(|_| bad(key, v))
}

fn within<T: PartialOrd>(key: &str, v: &str, x: T, ok: impl Fn(&T) -> bool) -> Result<T, CliError> {
    if ok(&x) {
        Ok(x)
    } else {
        Err(bad(key, v))
    }
}

fn count_in(key: &str, v: &str, lo: u64, hi: u64) -> Result<usize, CliError> {
    let x = integer(key, v)?;
    within(key, v, x, |x| (lo..=hi).contains(x)).map(|x| x as usize)
}

fn auto<T>(v: &str, parse: impl FnOnce() -> Result<T, CliError>) -> Result<Option<T>, CliError> {
    if v.trim() == "auto" {
        Ok(None)
    } else {
        parse().map(Some)
    }
}

fn list<T>(v: &str, mut each: impl FnMut(&str) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    v.split(',').map(|s| each(s.trim())).collect()
}

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::config(format!("config line {}: expected `key = value`, found `{line}`", idx + 1)));
            };
            let (key, value) = (key.trim(), value.trim());
            if seen.iter().any(|k| k == key) {
                return Err(CliError::config(format!("config line {}: key `{key}` appears twice", idx + 1)));
            }
            cfg.set(key, value)?;
            seen.push(key.to_string());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets one key, checking its own range.
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        match key {
            "dim" => self.dim = count_in(key, v, 1, 2)?,
            "N" => self.n = within(key, v, count_in(key, v, 8, 65536)?, |n| n.is_power_of_two())?,
            "L" => self.period = within(key, v, finite(key, v)?, |x| *x > 0.0)?,
            "m" => self.m = count_in(key, v, 1, 1000)?,
            "r" => self.r = within(key, v, number(key, v)?, |x| *x >= 1.0)?,
            "alpha" => self.alpha = list(v, |s| within(key, v, finite(key, s)?, |x| *x > 0.0 && *x <= 8.0))?,
            "t" => self.t = within(key, v, finite(key, v)?, |x| *x > 0.0)?,
            "p" => self.p = within(key, v, number(key, v)?, |x| *x > 1.0)?,
            "q" => self.q = within(key, v, finite(key, v)?, |x| *x > 1.0 && *x <= 16.0)?,
            "lambda" => self.lambda = within(key, v, finite(key, v)?, |x| *x > 1.0 && *x <= 64.0)?,
            "t_min" => self.t_min = auto(v, || within(key, v, finite(key, v)?, |x| *x > 0.0))?,
            "t_max" => self.t_max = auto(v, || within(key, v, finite(key, v)?, |x| *x > 0.0))?,
            "count" => self.count = auto(v, || count_in(key, v, 16, 100_000))?,
            "semigroup" => {
                self.semigroup = match v {
                    "poisson" => SemigroupKind::Poisson,
                    "heat" => SemigroupKind::Heat,
                    "subordinated" => SemigroupKind::Subordinated,
                    _ => return Err(bad(key, v)),
                }
            }
            "route" => {
                self.route = match v {
                    "spectral" => Route::Spectral,
                    "quadrature" => Route::Quadrature,
                    _ => return Err(bad(key, v)),
                }
            }
            "subordination_nodes" => self.subordination_nodes = count_in(key, v, 8, 100_000)?,
            "subordination_tolerance" => self.subordination_tolerance = within(key, v, finite(key, v)?, |x| *x > 0.0 && *x < 1.0)?,
            "sw_near" => self.sw_near = count_in(key, v, 4, 4096)?,
            "sw_far" => self.sw_far = count_in(key, v, 4, 4096)?,
            "sw_tolerance" => self.sw_tolerance = within(key, v, finite(key, v)?, |x| *x > 0.0 && *x < 1.0)?,
            "tolerance" => {
                self.tolerance = if v == "none" { None } else { Some(within(key, v, finite(key, v)?, |x| *x >= 0.0)?) }
            }
            "seed" => self.seed = integer(key, v)?,
            "m_list" => self.m_list = list(v, |s| count_in(key, s, 1, 1000))?,
            "trials" => self.trials = count_in(key, v, 1, 100_000)?,
            "base_freq" => self.base_freq = count_in(key, v, 1, 1024)? as u64,
            "grow_threshold" => self.grow_threshold = within(key, v, finite(key, v)?, |x| *x >= 1.0)?,
            "flat_threshold" => self.flat_threshold = within(key, v, finite(key, v)?, |x| *x >= 1.0)?,
            "hilbert_field" => self.hilbert_field = within(key, v, v.to_string(), |s| HILBERT_FIELDS.contains(&s.as_str()))?,
            "half_width" => self.half_width = within(key, v, finite(key, v)?, |x| (8.0..=1024.0).contains(x))?,
            "half_points" => self.half_points = within(key, v, count_in(key, v, 64, 1 << 20)?, |n| n.is_power_of_two())?,
            "eps_floor" => self.eps_floor = within(key, v, finite(key, v)?, |x| *x > 0.0)?,
            "per_octave" => self.per_octave = count_in(key, v, 1, 64)?,
            "osc_threshold" => self.osc_threshold = within(key, v, finite(key, v)?, |x| *x >= 0.0)?,
            "resolutions" => self.resolutions = count_in(key, v, 2, 8)?,
            "out" => self.out = within(key, v, PathBuf::from(v), |_| !v.is_empty())?,
            _ => {
                let known: Vec<&str> = KEYS.iter().map(|(k, _)| *k).collect();
                return Err(CliError::config(format!("unknown config key `{key}`; known keys: {}", known.join(", "))));
            }
        }
        Ok(())
    }

    /// Cross-key constraints.
    pub fn validate(&self) -> Result<(), CliError> {
        if let (Some(a), Some(b)) = (self.t_min, self.t_max) {
            if a >= b {
                return Err(bad("t_min", &format!("{a}")));
            }
        }
        if self.t_min.is_some() != self.t_max.is_some() {
            let key = if self.t_min.is_some() { "t_max" } else { "t_min" };
            return Err(CliError::config(format!("key `{key}` must be set together with the other end of the time grid: expected {}", range_of(key))));
        }
        if self.m_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(bad("m_list", &self.join_m_list()));
        }
        if self.flat_threshold > self.grow_threshold {
            return Err(bad("flat_threshold", &format!("{}", self.flat_threshold)));
        }
        let h = self.half_width / self.half_points as f64;
        if self.eps_floor < 2.0 * h * (1.0 - 1e-12) || self.eps_floor > 2.0 * self.half_width {
            return Err(bad("eps_floor", &format!("{}", self.eps_floor)));
        }
        if self.half_points >> (self.resolutions - 1) < 8 {
            return Err(bad("resolutions", &format!("{}", self.resolutions)));
        }
        if self.dim == 2 && self.n > 1024 {
            return Err(bad("N", &format!("{} (at most 1024 in two dimensions)", self.n)));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<GridSpec<f64>, CliError> {
        GridSpec::new(self.dim, self.n, self.period).map_err(CliError::from)
    }

    pub fn banach(&self) -> Result<BanachSpec<f64>, CliError> {
        if self.m == 1 {
            Ok(BanachSpec::Scalar)
        } else {
            BanachSpec::sequence(self.m, self.r).map_err(CliError::from)
        }
    }

    fn join_m_list(&self) -> String {
        self.m_list.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")
    }

    /// Every effective numerical setting as `key=value` lines in a fixed order;
    /// the output directory is left out.
    pub fn canonical(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "auto".to_string(), fmt_f64);
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        put("dim", self.dim.to_string());
        put("N", self.n.to_string());
        put("L", fmt_f64(self.period));
        put("m", self.m.to_string());
        put("r", fmt_f64(self.r));
        put("alpha", self.alpha.iter().map(|&a| fmt_f64(a)).collect::<Vec<_>>().join(","));
        put("t", fmt_f64(self.t));
        put("p", fmt_f64(self.p));
        put("q", fmt_f64(self.q));
        put("lambda", fmt_f64(self.lambda));
        put("t_min", opt(self.t_min));
        put("t_max", opt(self.t_max));
        put("count", self.count.map_or_else(|| "auto".to_string(), |c| c.to_string()));
        put("semigroup", self.semigroup.name().into());
        put("route", self.route.name().into());
        put("subordination_nodes", self.subordination_nodes.to_string());
        put("subordination_tolerance", fmt_f64(self.subordination_tolerance));
        put("sw_near", self.sw_near.to_string());
        put("sw_far", self.sw_far.to_string());
        put("sw_tolerance", fmt_f64(self.sw_tolerance));
        put("tolerance", self.tolerance.map_or_else(|| "none".to_string(), fmt_f64));
        put("seed", self.seed.to_string());
        put("m_list", self.join_m_list());
        put("trials", self.trials.to_string());
        put("base_freq", self.base_freq.to_string());
        put("grow_threshold", fmt_f64(self.grow_threshold));
        put("flat_threshold", fmt_f64(self.flat_threshold));
        put("hilbert_field", self.hilbert_field.clone());
        put("half_width", fmt_f64(self.half_width));
        put("half_points", self.half_points.to_string());
        put("eps_floor", fmt_f64(self.eps_floor));
        put("per_octave", self.per_octave.to_string());
        put("osc_threshold", fmt_f64(self.osc_threshold));
        put("resolutions", self.resolutions.to_string());
        s
    }

    /// SHA-256 of [`canonical`](Self::canonical), hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Shortest round-trip form.
pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}
