//! `key = value` run configuration.
//!
//! Values from a file are applied first, then command-line overrides, then the
//! whole configuration is validated against the core constructors.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use cohgrav_core::curvature::Grid;
use cohgrav_core::quadrature::{QuadratureSpec, Rule};
use cohgrav_core::scales::{PhysicalScales, DEFAULT_REGIME_THRESHOLD};
use cohgrav_core::stress_energy::StateWeights;
use cohgrav_core::wavepacket::{Profile, ProfileKind, SitePair, DEFAULT_GAUSSIAN_CUTOFF};
use cohgrav_core::{Complex64, Vec3};
use sha2::{Digest, Sha256};

/// Every accepted key with its default and a one-line description, in the
/// order used by `print-config`.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("state.alpha", "0.5", "population of |01>"),
    ("state.beta", "0.5", "real part of the coherence"),
    ("state.beta_im", "0.0", "imaginary part of the coherence"),
    ("profile.kind", "box", "momentum profile: box | gaussian"),
    ("profile.k0", "0.0", "central wave number along z, units of sigma"),
    ("profile.gaussian_cutoff", "10.0", "Gaussian truncation, widths per axis"),
    ("pair.m_tilde", "100.0", "field mass in units of sigma (0 = massless)"),
    ("pair.l_tilde", "pi", "half-separation of the sites, units of 1/sigma"),
    ("grid.min", "-8.0", "lower grid extent on every axis"),
    ("grid.max", "8.0", "upper grid extent on every axis"),
    ("grid.n", "16", "points per axis"),
    ("quad.rel_tol", "1e-8", "relative quadrature tolerance"),
    ("quad.abs_tol", "1e-12", "absolute quadrature tolerance"),
    ("quad.max_subdiv", "2000", "subdivision budget per 1D integral"),
    ("quad.rule", "gk21", "Gauss-Kronrod rule: gk15 | gk21"),
    ("time.t", "0.0", "evaluation time for fields"),
    ("time.list", "0,10,20,30,40,50", "times for the decay curve"),
    ("point.x", "site", "decay probe: x,y,z or `site` for (0,0,L)"),
    ("scales.regime", "massive", "massive | massless"),
    ("scales.mass_kg", "1e-21", "particle mass, kg"),
    ("scales.sigma_per_m", "1e22", "momentum width, 1/m"),
    ("scales.omega0_hz", "1e14", "massless central angular frequency, 1/s"),
    ("scales.sigma_c_hz", "1e9", "massless frequency spread, 1/s"),
    ("scales.threshold", "10.0", "ratio treated as much larger than one"),
    ("run.threads", "0", "worker threads (0 = all cores); not part of the hash"),
    ("output.dir", "", "directory for CSV output (empty = none); not part of the hash"),
];

/// Keys that do not change any result and are left out of the config hash.
const UNHASHED: &[&str] = &["run.threads", "output.dir"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalesRegime {
    Massive,
    Massless,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub beta: f64,
    pub beta_im: f64,
    pub profile: ProfileKind,
    pub k0: f64,
    pub gaussian_cutoff: f64,
    pub m_tilde: f64,
    pub l_tilde: f64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_n: usize,
    pub quad: QuadratureSpec,
    pub t: f64,
    pub times: Vec<f64>,
    /// `None` probes the |10> site.
    pub point: Option<Vec3>,
    pub scales_regime: ScalesRegime,
    pub mass_kg: f64,
    pub sigma_per_m: f64,
    pub omega0_hz: f64,
    pub sigma_c_hz: f64,
    pub threshold: f64,
    pub threads: usize,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alpha: 0.5,
            beta: 0.5,
            beta_im: 0.0,
            profile: ProfileKind::Box,
            k0: 0.0,
            gaussian_cutoff: DEFAULT_GAUSSIAN_CUTOFF,
            m_tilde: 100.0,
            l_tilde: PI,
            grid_min: -8.0,
            grid_max: 8.0,
            grid_n: 16,
            quad: QuadratureSpec::default(),
            t: 0.0,
            times: vec![0.0, 10.0, 20.0, 30.0, 40.0, 50.0],
            point: None,
            scales_regime: ScalesRegime::Massive,
            mass_kg: 1e-21,
            sigma_per_m: 1e22,
            omega0_hz: 1e14,
            sigma_c_hz: 1e9,
            threshold: DEFAULT_REGIME_THRESHOLD,
            threads: 0,
            output_dir: None,
        }
    }
}

/// Where a value came from, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Default,
    Line(usize),
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Default => write!(f, "default"),
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Flag => write!(f, "command line"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{origin}: `{key}`: {message}")]
pub struct ConfigError {
    pub key: String,
    pub origin: Origin,
    pub message: String,
}

fn parse_f64(raw: &str) -> Result<f64, String> {
    let s = raw.trim();
    // `pi`, `2pi`, `2*pi`, `-0.5pi`
    if let Some(head) = s.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let factor = match head {
            "" => 1.0,
            "-" => -1.0,
            _ => head.parse::<f64>().map_err(|_| format!("expected a number, got `{raw}`"))?,
        };
        return Ok(factor * PI);
    }
    let v = s.parse::<f64>().map_err(|_| format!("expected a number, got `{raw}`"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a finite number, got `{raw}`"))
    }
}

fn parse_list(raw: &str) -> Result<Vec<f64>, String> {
    raw.split(',').filter(|s| !s.trim().is_empty()).map(parse_f64).collect()
}

fn parse_usize(raw: &str) -> Result<usize, String> {
    raw.trim().parse::<usize>().map_err(|_| format!("expected a non-negative integer, got `{raw}`"))
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<(), String> {
        let raw = raw.trim();
        match key {
            "state.alpha" => self.alpha = parse_f64(raw)?,
            "state.beta" => self.beta = parse_f64(raw)?,
            "state.beta_im" => self.beta_im = parse_f64(raw)?,
            "profile.kind" => {
                self.profile = match raw {
                    "box" => ProfileKind::Box,
                    "gaussian" => ProfileKind::Gaussian,
                    _ => return Err(format!("expected `box` or `gaussian`, got `{raw}`")),
                }
            }
            "profile.k0" => self.k0 = parse_f64(raw)?,
            "profile.gaussian_cutoff" => self.gaussian_cutoff = parse_f64(raw)?,
            "pair.m_tilde" => self.m_tilde = parse_f64(raw)?,
            "pair.l_tilde" => self.l_tilde = parse_f64(raw)?,
            "grid.min" => self.grid_min = parse_f64(raw)?,
            "grid.max" => self.grid_max = parse_f64(raw)?,
            "grid.n" => self.grid_n = parse_usize(raw)?,
            "quad.rel_tol" => self.quad.rel_tol = parse_f64(raw)?,
            "quad.abs_tol" => self.quad.abs_tol = parse_f64(raw)?,
            "quad.max_subdiv" => self.quad.max_subdivisions = parse_usize(raw)?,
            "quad.rule" => {
                self.quad.rule = match raw {
                    "gk15" => Rule::Gk15,
                    "gk21" => Rule::Gk21,
                    _ => return Err(format!("expected `gk15` or `gk21`, got `{raw}`")),
                }
            }
            "time.t" => self.t = parse_f64(raw)?,
            "time.list" => {
                let v = parse_list(raw)?;
                if v.is_empty() {
                    return Err("need at least one time".into());
                }
                self.times = v;
            }
            "point.x" => {
                self.point = if raw == "site" {
                    None
                } else {
                    let v = parse_list(raw)?;
                    if v.len() != 3 {
                        return Err(format!("expected three coordinates, got {}", v.len()));
                    }
                    Some([v[0], v[1], v[2]])
                }
            }
            "scales.regime" => {
                self.scales_regime = match raw {
                    "massive" => ScalesRegime::Massive,
                    "massless" => ScalesRegime::Massless,
                    _ => return Err(format!("expected `massive` or `massless`, got `{raw}`")),
                }
            }
            "scales.mass_kg" => self.mass_kg = parse_f64(raw)?,
            "scales.sigma_per_m" => self.sigma_per_m = parse_f64(raw)?,
            "scales.omega0_hz" => self.omega0_hz = parse_f64(raw)?,
            "scales.sigma_c_hz" => self.sigma_c_hz = parse_f64(raw)?,
            "scales.threshold" => self.threshold = parse_f64(raw)?,
            "run.threads" => self.threads = parse_usize(raw)?,
            "output.dir" => self.output_dir = if raw.is_empty() { None } else { Some(PathBuf::from(raw)) },
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Canonical textual value of a key.
    pub fn get(&self, key: &str) -> Option<String> {
        let kind = |k: ProfileKind| match k {
            ProfileKind::Box => "box",
            ProfileKind::Gaussian => "gaussian",
        };
        Some(match key {
            "state.alpha" => format!("{:?}", self.alpha),
            "state.beta" => format!("{:?}", self.beta),
            "state.beta_im" => format!("{:?}", self.beta_im),
            "profile.kind" => kind(self.profile).into(),
            "profile.k0" => format!("{:?}", self.k0),
            "profile.gaussian_cutoff" => format!("{:?}", self.gaussian_cutoff),
            "pair.m_tilde" => format!("{:?}", self.m_tilde),
            "pair.l_tilde" => format!("{:?}", self.l_tilde),
            "grid.min" => format!("{:?}", self.grid_min),
            "grid.max" => format!("{:?}", self.grid_max),
            "grid.n" => self.grid_n.to_string(),
            "quad.rel_tol" => format!("{:?}", self.quad.rel_tol),
            "quad.abs_tol" => format!("{:?}", self.quad.abs_tol),
            "quad.max_subdiv" => self.quad.max_subdivisions.to_string(),
            "quad.rule" => match self.quad.rule {
                Rule::Gk15 => "gk15".into(),
                Rule::Gk21 => "gk21".into(),
            },
            "time.t" => format!("{:?}", self.t),
            "time.list" => fmt_list(&self.times),
            "point.x" => self.point.map_or_else(|| "site".into(), |p| fmt_list(&p)),
            "scales.regime" => match self.scales_regime {
                ScalesRegime::Massive => "massive".into(),
                ScalesRegime::Massless => "massless".into(),
            },
            "scales.mass_kg" => format!("{:?}", self.mass_kg),
            "scales.sigma_per_m" => format!("{:?}", self.sigma_per_m),
            "scales.omega0_hz" => format!("{:?}", self.omega0_hz),
            "scales.sigma_c_hz" => format!("{:?}", self.sigma_c_hz),
            "scales.threshold" => format!("{:?}", self.threshold),
            "run.threads" => self.threads.to_string(),
            "output.dir" => self.output_dir.as_ref().map_or_else(String::new, |p| p.display().to_string()),
            _ => return None,
        })
    }

    /// The resolved configuration as `key = value` lines.
    pub fn to_text(&self) -> String {
        KEYS.iter().map(|(k, _, _)| format!("{k} = {}\n", self.get(k).unwrap_or_default())).collect()
    }

    /// SHA-256 of the resolved configuration, without the keys that cannot
    /// change results.
    pub fn hash(&self) -> String {
        let text: String = KEYS
            .iter()
            .filter(|(k, _, _)| !UNHASHED.contains(k))
            .map(|(k, _, _)| format!("{k} = {}\n", self.get(k).unwrap_or_default()))
            .collect();
        format!("{:x}", Sha256::digest(text.as_bytes()))
    }

    pub fn state(&self) -> cohgrav_core::Result<StateWeights> {
        StateWeights::new(self.alpha, Complex64::new(self.beta, self.beta_im))
    }

    pub fn profile(&self) -> cohgrav_core::Result<Profile> {
        Profile::new(self.profile, [0.0, 0.0, self.k0])?.with_gaussian_cutoff(self.gaussian_cutoff)
    }

    pub fn pair(&self) -> cohgrav_core::Result<SitePair> {
        SitePair::new(self.profile()?, self.l_tilde, self.m_tilde)
    }

    pub fn grid(&self) -> cohgrav_core::Result<Grid> {
        Grid::cube(self.grid_min, self.grid_max, self.grid_n)
    }

    pub fn physical_scales(&self) -> cohgrav_core::Result<PhysicalScales> {
        let s = match self.scales_regime {
            ScalesRegime::Massive => PhysicalScales::massive(self.mass_kg, self.sigma_per_m)?,
            ScalesRegime::Massless => PhysicalScales::massless_from_frequency(self.omega0_hz, self.sigma_c_hz)?,
        };
        s.with_regime_threshold(self.threshold)
    }

    /// Probe point of the decay curve.
    pub fn probe(&self) -> Vec3 {
        self.point.unwrap_or([0.0, 0.0, self.l_tilde])
    }
}

/// Accumulates values from a file and from flags, remembering where each
/// came from.
#[derive(Debug, Clone, Default)]
pub struct ConfigBuilder {
    config: RunConfig,
    origins: BTreeMap<&'static str, Origin>,
}

fn known_key(key: &str) -> Option<&'static str> {
    KEYS.iter().find(|(k, _, _)| *k == key).map(|(k, _, _)| *k)
}

impl ConfigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, line) in text.lines().enumerate() {
            let origin = Origin::Line(i + 1);
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError {
                    key: content.into(),
                    origin,
                    message: "expected `key = value`".into(),
                });
            };
            self.apply(key.trim(), value, origin)?;
        }
        Ok(())
    }

    pub fn apply_flag(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        self.apply(key, value, Origin::Flag)
    }

    fn apply(&mut self, key: &str, value: &str, origin: Origin) -> Result<(), ConfigError> {
        let err = |message: String| ConfigError { key: key.into(), origin: origin.clone(), message };
        let known = known_key(key).ok_or_else(|| err("unknown key".into()))?;
        self.config.set(known, value).map_err(err)?;
        self.origins.insert(known, origin);
        Ok(())
    }

    fn fail(&self, key: &'static str, e: impl fmt::Display) -> ConfigError {
        ConfigError {
            key: key.into(),
            origin: self.origins.get(key).cloned().unwrap_or(Origin::Default),
            message: e.to_string(),
        }
    }

    /// Checks every cross-field constraint and returns the configuration.
    pub fn build(self) -> Result<RunConfig, ConfigError> {
        let c = &self.config;
        if let Err(e) = c.state() {
            let key = if (0.0..=1.0).contains(&c.alpha) { "state.beta" } else { "state.alpha" };
            return Err(self.fail(key, e));
        }
        if let Err(e) = Profile::new(c.profile, [0.0, 0.0, c.k0]) {
            return Err(self.fail("profile.k0", e));
        }
        if let Err(e) = c.profile() {
            return Err(self.fail("profile.gaussian_cutoff", e));
        }
        if c.m_tilde < 0.0 {
            return Err(self.fail("pair.m_tilde", "mass must be non-negative"));
        }
        if let Err(e) = c.pair() {
            return Err(self.fail("pair.l_tilde", e));
        }
        if let Err(e) = c.grid() {
            let key = if c.grid_n < cohgrav_core::curvature::MIN_POINTS { "grid.n" } else { "grid.max" };
            return Err(self.fail(key, e));
        }
        if let Err(e) = c.quad.validate() {
            let key = match e {
                cohgrav_core::Error::InvalidParameter { name: "rel_tol", .. } => "quad.rel_tol",
                cohgrav_core::Error::InvalidParameter { name: "abs_tol", .. } => "quad.abs_tol",
                _ => "quad.max_subdiv",
            };
            return Err(self.fail(key, e));
        }
        let max_t = cohgrav_core::stress_energy::MAX_TIME;
        if c.t.abs() > max_t {
            return Err(self.fail("time.t", format!("|t| must be at most {max_t}")));
        }
        if c.times.iter().any(|t| t.abs() > max_t) {
            return Err(self.fail("time.list", format!("|t| must be at most {max_t}")));
        }
        if let Err(e) = c.physical_scales() {
            let key = match (c.scales_regime, &e) {
                (_, cohgrav_core::Error::InvalidParameter { name: "regime_threshold", .. }) => "scales.threshold",
                (ScalesRegime::Massive, cohgrav_core::Error::InvalidParameter { name: "mass", .. }) => "scales.mass_kg",
                (ScalesRegime::Massive, _) => "scales.sigma_per_m",
                (ScalesRegime::Massless, cohgrav_core::Error::InvalidParameter { name: "omega0", .. }) => {
                    "scales.omega0_hz"
                }
                (ScalesRegime::Massless, _) => "scales.sigma_c_hz",
            };
            return Err(self.fail(key, e));
        }
        Ok(self.config)
    }
}

/// Parses and validates a configuration file on top of the defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut b = ConfigBuilder::new();
    b.apply_text(text)?;
    b.build()
}
