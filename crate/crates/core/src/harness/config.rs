use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{Formulation, ModelParams, RunSettings, DEFAULT_ETA_FACTOR};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::monitors::{MonitorConfig, MAX_WINDOW_CADENCE};

use super::presets;

/// Prefix of environment variables overriding config keys:
/// `CHEMOTAXIS__SECTION__KEY=value`, with the value read as a TOML literal.
pub const ENV_PREFIX: &str = "CHEMOTAXIS__";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub extents: Vec<f64>,
    pub cells: Vec<usize>,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        if self.extents.len() != self.dim || self.cells.len() != self.dim {
            return Err(Error::Config(format!(
                "grid.extents and grid.cells need {} entries each, got {} and {}",
                self.dim,
                self.extents.len(),
                self.cells.len()
            )));
        }
        Grid::new(self.dim, &self.extents, &self.cells)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulationChoice {
    Uv,
    Uw,
    Both,
}

impl FormulationChoice {
    pub fn formulations(self) -> Vec<Formulation> {
        match self {
            FormulationChoice::Uv => vec![Formulation::Uv],
            FormulationChoice::Uw => vec![Formulation::Uw],
            FormulationChoice::Both => vec![Formulation::Uv, Formulation::Uw],
        }
    }
}

fn two() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub formulation: FormulationChoice,
    pub chi: f64,
    pub kappa: f64,
    pub mu: f64,
    #[serde(default = "two")]
    pub alpha: f64,
    /// Sensitivity floor; `1e-10 · inf v0` when unset.
    #[serde(default)]
    pub eta: Option<f64>,
}

/// Initial profile; `noise` multiplies by `1 + noise·ξ` with `ξ` uniform in `[−1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Profile {
    Constant {
        value: f64,
        #[serde(default)]
        noise: f64,
    },
    /// `base + amplitude · exp(−|x − center|²/(2 width²))`, centred in the box by default.
    Gaussian {
        base: f64,
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
        #[serde(default)]
        noise: f64,
    },
    /// `base + amplitude · Π cos(k_i π x_i / L_i)`.
    Cosine {
        base: f64,
        amplitude: f64,
        modes: Vec<u32>,
        #[serde(default)]
        noise: f64,
    },
}

impl Profile {
    fn noise(&self) -> f64 {
        match self {
            Profile::Constant { noise, .. } | Profile::Gaussian { noise, .. } | Profile::Cosine { noise, .. } => *noise,
        }
    }

    pub fn sample(&self, grid: &Grid, rng: &mut ChaCha8Rng) -> Result<Field> {
        let dim = grid.dim();
        let ext = grid.extents().to_vec();
        let base = match self {
            Profile::Constant { value, .. } => Field::constant(*grid, *value),
            Profile::Gaussian { base, amplitude, width, center, .. } => {
                if !(*width > 0.0) {
                    return Err(Error::Config(format!("gaussian width must be positive, got {width}")));
                }
                let c: Vec<f64> = match center {
                    Some(c) if c.len() == dim => c.clone(),
                    Some(c) => {
                        return Err(Error::Config(format!("gaussian center needs {dim} entries, got {}", c.len())))
                    }
                    None => ext.iter().map(|l| 0.5 * l).collect(),
                };
                Field::from_fn(*grid, |x| {
                    let r2: f64 = (0..dim).map(|a| (x[a] - c[a]).powi(2)).sum();
                    base + amplitude * (-r2 / (2.0 * width * width)).exp()
                })?
            }
            Profile::Cosine { base, amplitude, modes, .. } => {
                if modes.len() != dim {
                    return Err(Error::Config(format!("cosine modes need {dim} entries, got {}", modes.len())));
                }
                Field::from_fn(*grid, |x| {
                    let prod: f64 = (0..dim)
                        .map(|a| (modes[a] as f64 * std::f64::consts::PI * x[a] / ext[a]).cos())
                        .product();
                    base + amplitude * prod
                })?
            }
        };
        let noise = self.noise();
        if noise == 0.0 {
            return Ok(base);
        }
        if !(0.0..1.0).contains(&noise) {
            return Err(Error::Config(format!("noise must lie in [0, 1), got {noise}")));
        }
        let values = base.values().iter().map(|&x| x * (1.0 + noise * rng.gen_range(-1.0..=1.0))).collect();
        Field::new(*grid, values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub u: Profile,
    pub v: Profile,
}

fn default_cadence() -> f64 {
    0.05
}
fn default_safety() -> f64 {
    0.2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t_end: f64,
    #[serde(default = "default_cadence")]
    pub cadence: f64,
    #[serde(default = "default_safety")]
    pub safety: f64,
    /// Fixed step replacing the adaptive choice.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub max_steps: Option<usize>,
}

fn default_name() -> String {
    "run".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default = "default_name")]
    pub name: String,
    /// Write one CSV per snapshot and field.
    #[serde(default)]
    pub fields: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: None, name: default_name(), fields: false }
    }
}

fn default_levels() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSpec {
    #[serde(default = "default_levels")]
    pub levels: usize,
    /// Cells per axis at each level; must double from level to level.
    #[serde(default)]
    pub cells: Option<Vec<Vec<usize>>>,
}

impl Default for CompareSpec {
    fn default() -> Self {
        CompareSpec { levels: default_levels(), cells: None }
    }
}

fn default_verify_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    /// Barrier names to check; all when unset.
    #[serde(default)]
    pub barriers: Option<Vec<String>>,
    #[serde(default = "default_verify_tol")]
    pub tolerance: f64,
    #[serde(default)]
    pub slack_per_time: f64,
}

impl Default for VerifySpec {
    fn default() -> Self {
        VerifySpec { barriers: None, tolerance: default_verify_tol(), slack_per_time: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub seed: u64,
    pub grid: GridSpec,
    pub model: ModelSpec,
    pub initial: InitialSpec,
    pub time: TimeSpec,
    #[serde(default)]
    pub monitors: MonitorConfig,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub compare: CompareSpec,
    #[serde(default)]
    pub verify: VerifySpec,
}

impl RunConfig {
    /// Preset named in the table (if any), overlaid by the table itself.
    pub fn from_value(value: toml::Value) -> Result<Self> {
        let merged = resolve_preset(value)?;
        let cfg: RunConfig = merged.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_value(parse_table(text)?)
    }

    pub fn preset(name: &str) -> Result<Self> {
        Self::from_toml_str(&format!("preset = \"{name}\""))
    }

    /// Reads `path` (or only the preset), applies `CHEMOTAXIS__*` overrides from
    /// `env`, then validates.
    pub fn load(
        path: Option<&Path>,
        preset: Option<&str>,
        env: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self> {
        let mut value = match path {
            Some(p) => parse_table(&std::fs::read_to_string(p)?)?,
            None => toml::Value::Table(Default::default()),
        };
        if let Some(name) = preset {
            set_path(&mut value, &["preset".into()], toml::Value::String(name.into()))?;
        }
        apply_env_overrides(&mut value, env)?;
        Self::from_value(value)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.build()?;
        let t = &self.time;
        if !(t.t_end > 0.0 && t.t_end.is_finite()) {
            return Err(Error::Config(format!("time.t_end must be positive, got {}", t.t_end)));
        }
        if !(t.cadence > 0.0) {
            return Err(Error::Config("time.cadence must be positive".into()));
        }
        if self.monitors.enabled && self.monitors.window_monitors && t.cadence > MAX_WINDOW_CADENCE * (1.0 + 1e-9) {
            return Err(Error::Config(format!(
                "time.cadence must be at most {MAX_WINDOW_CADENCE} while window monitors are enabled, got {}",
                t.cadence
            )));
        }
        if !(t.safety > 0.0) {
            return Err(Error::Config(format!("time.safety must be positive, got {}", t.safety)));
        }
        if self.compare.levels < 2 {
            return Err(Error::Config("compare.levels must be at least 2".into()));
        }
        Ok(())
    }

    pub fn build_grid(&self) -> Result<Grid> {
        self.grid.build()
    }

    /// `(u0, v0)` with seed-driven noise; `u0 ≥ 0` and `v0 > 0` are enforced.
    pub fn initial_fields(&self, grid: &Grid) -> Result<(Field, Field)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let u = self.initial.u.sample(grid, &mut rng)?;
        let v = self.initial.v.sample(grid, &mut rng)?;
        if u.min() < 0.0 {
            return Err(Error::InvalidInitialData(format!("u0 must be nonnegative, min is {}", u.min())));
        }
        if !(v.min() > 0.0) {
            return Err(Error::InvalidInitialData(format!("v0 must be strictly positive, min is {}", v.min())));
        }
        Ok((u, v))
    }

    pub fn params(&self, inf_v0: f64) -> Result<ModelParams> {
        let m = &self.model;
        ModelParams {
            chi: m.chi,
            kappa: m.kappa,
            mu: m.mu,
            alpha: m.alpha,
            eta: m.eta.unwrap_or(DEFAULT_ETA_FACTOR * inf_v0),
        }
        .validated()
    }

    pub fn run_settings(&self) -> RunSettings {
        let d = RunSettings::default();
        RunSettings {
            t_end: self.time.t_end,
            snapshot_every: self.time.cadence,
            safety: self.time.safety,
            fixed_dt: self.time.dt,
            max_steps: self.time.max_steps.unwrap_or(d.max_steps),
            monitors: self.monitors.clone(),
        }
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(&serde_json::to_value(self).expect("config serializes"))
            .expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))[..16].to_string()
    }
}

fn parse_table(text: &str) -> Result<toml::Value> {
    let table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    Ok(toml::Value::Table(table))
}

fn resolve_preset(value: toml::Value) -> Result<toml::Value> {
    let name = match value.get("preset") {
        None => return Ok(value),
        Some(toml::Value::String(s)) => s.clone(),
        Some(other) => return Err(Error::Config(format!("preset must be a string, got {other}"))),
    };
    let text = presets::preset_toml(&name)
        .ok_or_else(|| Error::Config(format!("unknown preset '{name}'; known: {}", presets::PRESET_NAMES.join(", "))))?;
    let mut base = parse_table(text)?;
    merge(&mut base, value);
    Ok(base)
}

/// Recursive overlay: tables merge key by key, everything else is replaced.
pub fn merge(base: &mut toml::Value, overlay: toml::Value) {
    match (base, overlay) {
        (toml::Value::Table(b), toml::Value::Table(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_table() && v.is_table() && !is_profile(&v) => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

// A profile with a new kind replaces the old one instead of mixing fields.
fn is_profile(v: &toml::Value) -> bool {
    v.get("kind").is_some()
}

fn set_path(root: &mut toml::Value, path: &[String], value: toml::Value) -> Result<()> {
    let mut node = root;
    for (i, key) in path.iter().enumerate() {
        let table = node
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override path {} crosses a non-table", path.join("."))))?;
        if i + 1 == path.len() {
            table.insert(key.clone(), value);
            return Ok(());
        }
        node = table.entry(key.clone()).or_insert_with(|| toml::Value::Table(Default::default()));
    }
    Ok(())
}

fn parse_literal(text: &str) -> toml::Value {
    match toml::from_str::<toml::Table>(&format!("x = {text}")) {
        Ok(mut t) => t.remove("x").expect("key present"),
        Err(_) => toml::Value::String(text.to_string()),
    }
}

/// Applies `CHEMOTAXIS__A__B=value` as `a.b = value`. Keys are lowercased.
pub fn apply_env_overrides(
    value: &mut toml::Value,
    env: impl IntoIterator<Item = (String, String)>,
) -> Result<()> {
    let mut vars: Vec<(String, String)> = env.into_iter().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
    vars.sort();
    for (key, raw) in vars {
        let path: Vec<String> = key[ENV_PREFIX.len()..].split("__").map(|s| s.to_ascii_lowercase()).collect();
        if path.iter().any(String::is_empty) {
            return Err(Error::Config(format!("malformed override variable {key}")));
        }
        set_path(value, &path, parse_literal(&raw))?;
    }
    Ok(())
}

/// A base configuration and the axes of a cartesian parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub axes: SweepAxes,
}

fn default_cap() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxes {
    #[serde(default)]
    pub chi: Vec<f64>,
    #[serde(default)]
    pub mu: Vec<f64>,
    #[serde(default)]
    pub kappa: Vec<f64>,
    /// Largest number of runs accepted.
    #[serde(default = "default_cap")]
    pub cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub chi: f64,
    pub mu: f64,
    pub kappa: f64,
}

impl SweepConfig {
    /// A run config with an additional `[sweep]` table.
    pub fn load(
        path: Option<&Path>,
        preset: Option<&str>,
        env: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self> {
        let mut value = match path {
            Some(p) => parse_table(&std::fs::read_to_string(p)?)?,
            None => toml::Value::Table(Default::default()),
        };
        if let Some(name) = preset {
            set_path(&mut value, &["preset".into()], toml::Value::String(name.into()))?;
        }
        apply_env_overrides(&mut value, env)?;
        let sweep = value
            .as_table_mut()
            .and_then(|t| t.remove("sweep"))
            .ok_or_else(|| Error::Config("sweep config needs a [sweep] table".into()))?;
        let axes: SweepAxes = sweep.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let cfg = SweepConfig { base: RunConfig::from_value(value)?, axes };
        cfg.points()?;
        Ok(cfg)
    }

    /// Cartesian product of the axes; empty axes keep the base value.
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        let m = &self.base.model;
        let or = |v: &Vec<f64>, d: f64| if v.is_empty() { vec![d] } else { v.clone() };
        let (chis, mus, kappas) = (or(&self.axes.chi, m.chi), or(&self.axes.mu, m.mu), or(&self.axes.kappa, m.kappa));
        let size = chis.len() * mus.len() * kappas.len();
        if size > self.axes.cap {
            return Err(Error::Config(format!("sweep has {size} runs, above the cap of {}", self.axes.cap)));
        }
        let mut out = Vec::with_capacity(size);
        for &chi in &chis {
            for &mu in &mus {
                for &kappa in &kappas {
                    out.push(SweepPoint { chi, mu, kappa });
                }
            }
        }
        Ok(out)
    }

    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(&serde_json::to_value(self).expect("config serializes"))
            .expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))[..16].to_string()
    }
}
