//! Experiment configuration: preset defaults, config files, overrides.
//!
//! Configuration is a flat list of `key = value` pairs. Values come from
//! three layers, each overriding the previous: preset defaults, an optional
//! config file, and `--set key=value` command-line pairs. The resolved
//! configuration printed by `print-config` is itself a valid config file.

use std::fmt;
use std::path::{Path, PathBuf};

use lgmm::mesh::MeshMotionConfig;
use lgmm::scheme::SchemeConfig;

/// A malformed or inconsistent configuration. Commands report these with
/// exit code 2.
#[derive(Debug, Clone)]
pub struct ConfigError(String);

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        ConfigError(message.into())
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Which built-in problem a run starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Travelling smooth profile with a closed-form solution.
    Example1,
    /// Narrow bump compressed toward a stagnation point; no closed form.
    Example2,
    /// Placeholder for problems assembled through the library API; the
    /// command line cannot run it.
    Custom,
}

impl Preset {
    pub fn parse(name: &str) -> Result<Preset, ConfigError> {
        match name {
            "example1" => Ok(Preset::Example1),
            "example2" => Ok(Preset::Example2),
            "custom" => Ok(Preset::Custom),
            other => Err(ConfigError::new(format!(
                "unknown preset '{other}' (expected example1, example2, or custom)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Example1 => "example1",
            Preset::Example2 => "example2",
            Preset::Custom => "custom",
        }
    }
}

/// How the time step is derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtRule {
    /// `dt = dt_value`.
    Fixed,
    /// `dt = dt_value * h0` with `h0` the initial element length, so that
    /// dyadic mesh refinement halves the step as well.
    Proportional,
}

/// A fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub nu: f64,
    /// Mesh-motion regularization weight; `None` mirrors `nu`.
    pub nu_m: Option<f64>,
    pub n_elements: usize,
    pub dt_rule: DtRule,
    pub dt_value: f64,
    pub t_end: f64,
    pub order: u8,
    pub moving: bool,
    pub clamp_boundary: bool,
    pub quad_points: usize,
    pub split_at_kinks: bool,
    pub cg_tol: f64,
    pub sor_omega: f64,
    pub sor_tol: f64,
    /// Step stride for the mesh-trajectory file; `None` picks roughly 200
    /// frames over the run.
    pub mesh_stride: Option<usize>,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl ExperimentConfig {
    /// The standard configuration of a preset.
    pub fn preset_default(preset: Preset) -> Self {
        let base = ExperimentConfig {
            preset,
            nu: 0.01,
            nu_m: None,
            n_elements: 256,
            dt_rule: DtRule::Proportional,
            dt_value: 4.0,
            t_end: 0.5,
            order: 2,
            moving: true,
            clamp_boundary: false,
            quad_points: 5,
            split_at_kinks: false,
            cg_tol: 1e-12,
            sor_omega: 1.2,
            sor_tol: 1e-12,
            mesh_stride: None,
            output_dir: PathBuf::from("lgmm-out"),
            seed: 7,
        };
        match preset {
            Preset::Example1 | Preset::Custom => base,
            Preset::Example2 => ExperimentConfig {
                nu: 1e-5,
                dt_rule: DtRule::Fixed,
                dt_value: 1e-4,
                t_end: 2.0,
                clamp_boundary: true,
                ..base
            },
        }
    }

    /// The spatial interval of the built-in problems.
    pub fn domain(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }

    /// Initial element length.
    pub fn h0(&self) -> f64 {
        let (a, b) = self.domain();
        (b - a) / self.n_elements as f64
    }

    /// The resolved time step.
    pub fn dt(&self) -> f64 {
        match self.dt_rule {
            DtRule::Fixed => self.dt_value,
            DtRule::Proportional => self.dt_value * self.h0(),
        }
    }

    /// The resolved mesh-motion regularization weight.
    pub fn nu_m(&self) -> f64 {
        self.nu_m.unwrap_or(self.nu)
    }

    /// Applies one `key = value` pair.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "preset" => {
                return Err(ConfigError::new(
                    "preset cannot be changed by a later override; pass --preset or put it first",
                ))
            }
            "nu" => self.nu = parse_f64(key, value)?,
            "nu_m" => self.nu_m = Some(parse_f64(key, value)?),
            "n" => self.n_elements = parse_usize(key, value)?,
            "dt_rule" => {
                self.dt_rule = match value {
                    "fixed" => DtRule::Fixed,
                    "proportional" => DtRule::Proportional,
                    _ => {
                        return Err(bad_value(key, value, "fixed or proportional"));
                    }
                }
            }
            "dt_value" => self.dt_value = parse_f64(key, value)?,
            "t_end" => self.t_end = parse_f64(key, value)?,
            "order" => {
                self.order = value
                    .parse()
                    .map_err(|_| bad_value(key, value, "1 or 2"))?
            }
            "moving" => self.moving = parse_bool(key, value)?,
            "clamp_boundary" => self.clamp_boundary = parse_bool(key, value)?,
            "quad_points" => self.quad_points = parse_usize(key, value)?,
            "split_at_kinks" => self.split_at_kinks = parse_bool(key, value)?,
            "cg_tol" => self.cg_tol = parse_f64(key, value)?,
            "sor_omega" => self.sor_omega = parse_f64(key, value)?,
            "sor_tol" => self.sor_tol = parse_f64(key, value)?,
            "mesh_stride" => {
                self.mesh_stride = if value == "auto" {
                    None
                } else {
                    Some(parse_usize(key, value)?)
                }
            }
            "output_dir" => self.output_dir = PathBuf::from(value),
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| bad_value(key, value, "an unsigned integer"))?
            }
            other => {
                return Err(ConfigError::new(format!(
                    "unknown key '{other}' (known keys: preset, nu, nu_m, n, dt_rule, dt_value, \
                     t_end, order, moving, clamp_boundary, quad_points, split_at_kinks, cg_tol, \
                     sor_omega, sor_tol, mesh_stride, output_dir, seed)"
                )))
            }
        }
        Ok(())
    }

    /// Checks ranges after all layers are applied.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(ConfigError::new("nu must be positive and finite"));
        }
        if let Some(m) = self.nu_m {
            if !(m >= 0.0) || !m.is_finite() {
                return Err(ConfigError::new("nu_m must be non-negative and finite"));
            }
        }
        if self.n_elements == 0 {
            return Err(ConfigError::new("n must be at least 1"));
        }
        let dt = self.dt();
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(ConfigError::new("resolved dt must be positive and finite"));
        }
        if !(self.t_end >= 0.0) || !self.t_end.is_finite() {
            return Err(ConfigError::new("t_end must be non-negative and finite"));
        }
        if self.order != 1 && self.order != 2 {
            return Err(ConfigError::new("order must be 1 or 2"));
        }
        if self.quad_points < 1 || self.quad_points > 16 {
            return Err(ConfigError::new("quad_points must lie in 1..=16"));
        }
        if !(self.cg_tol > 0.0) {
            return Err(ConfigError::new("cg_tol must be positive"));
        }
        if !(self.sor_omega > 0.0 && self.sor_omega < 2.0) {
            return Err(ConfigError::new("sor_omega must lie in (0, 2)"));
        }
        if !(self.sor_tol > 0.0) {
            return Err(ConfigError::new("sor_tol must be positive"));
        }
        Ok(())
    }

    /// The scheme settings this configuration resolves to.
    pub fn scheme_config(&self) -> SchemeConfig {
        let mut scheme = SchemeConfig::new(self.nu, self.dt(), self.order);
        scheme.cg_tol = self.cg_tol;
        scheme.quad_points = self.quad_points;
        scheme.split_at_kinks = self.split_at_kinks;
        scheme
    }

    /// The mesh-motion settings this configuration resolves to.
    pub fn motion_config(&self) -> MeshMotionConfig {
        let mut motion = MeshMotionConfig::new(self.nu_m(), self.dt(), self.clamp_boundary);
        motion.sor_omega = self.sor_omega;
        motion.sor_tol = self.sor_tol;
        motion
    }

    /// Renders the configuration as a config file. Floats use exponent
    /// notation, which parses back exactly.
    pub fn to_display(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::new();
        let mut line = |text: String| {
            s.push_str(&text);
            s.push('\n');
        };
        line(format!("preset = {}", self.preset.name()));
        line(format!("nu = {:e}", self.nu));
        line(format!("nu_m = {:e}", self.nu_m()));
        line(format!("n = {}", self.n_elements));
        line(format!(
            "dt_rule = {}",
            match self.dt_rule {
                DtRule::Fixed => "fixed",
                DtRule::Proportional => "proportional",
            }
        ));
        line(format!("dt_value = {:e}", self.dt_value));
        line(format!("t_end = {:e}", self.t_end));
        line(format!("order = {}", self.order));
        line(format!("moving = {}", self.moving));
        line(format!("clamp_boundary = {}", self.clamp_boundary));
        line(format!("quad_points = {}", self.quad_points));
        line(format!("split_at_kinks = {}", self.split_at_kinks));
        line(format!("cg_tol = {:e}", self.cg_tol));
        line(format!("sor_omega = {:e}", self.sor_omega));
        line(format!("sor_tol = {:e}", self.sor_tol));
        line(match self.mesh_stride {
            None => "mesh_stride = auto".to_string(),
            Some(k) => format!("mesh_stride = {k}"),
        });
        line(format!("output_dir = {}", self.output_dir.display()));
        line(format!("seed = {}", self.seed));
        let mut comment = String::new();
        write!(comment, "# resolved dt = {:e}", self.dt()).unwrap();
        line(comment);
        s
    }
}

fn bad_value(key: &str, value: &str, want: &str) -> ConfigError {
    ConfigError::new(format!("invalid value '{value}' for {key} (expected {want})"))
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .parse()
        .map_err(|_| bad_value(key, value, "a number"))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, ConfigError> {
    value
        .parse()
        .map_err(|_| bad_value(key, value, "a non-negative integer"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(bad_value(key, value, "true or false")),
    }
}

/// Resolves a configuration from the three layers. The preset is taken from
/// the command-line flag if given, else from a `preset` key in the pairs
/// (file before `--set`, later pairs win), else `example1`.
pub fn resolve(
    preset_flag: Option<&str>,
    config_file: Option<&Path>,
    sets: &[String],
) -> Result<ExperimentConfig, ConfigError> {
    let mut pairs: Vec<(String, String, String)> = Vec::new();
    if let Some(path) = config_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
        for (index, raw) in text.lines().enumerate() {
            let lineno = index + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (k, v) = trimmed.split_once('=').ok_or_else(|| {
                ConfigError::new(format!(
                    "{}:{lineno}: expected 'key = value'",
                    path.display()
                ))
            })?;
            pairs.push((
                k.trim().to_string(),
                v.trim().to_string(),
                format!("{}:{lineno}", path.display()),
            ));
        }
    }
    for s in sets {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| ConfigError::new(format!("--set {s}: expected KEY=VALUE")))?;
        pairs.push((
            k.trim().to_string(),
            v.trim().to_string(),
            format!("--set {}", k.trim()),
        ));
    }

    let preset_name = match preset_flag {
        Some(p) => p.to_string(),
        None => pairs
            .iter()
            .rev()
            .find(|(k, _, _)| k == "preset")
            .map(|(_, v, _)| v.clone())
            .unwrap_or_else(|| "example1".to_string()),
    };
    let mut cfg = ExperimentConfig::preset_default(Preset::parse(&preset_name)?);
    for (k, v, origin) in &pairs {
        if k == "preset" {
            continue;
        }
        cfg.apply(k, v)
            .map_err(|e| ConfigError::new(format!("{origin}: {e}")))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

////////////////////////////////////////////////////////////////////////////////

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    #[test]
    fn preset_defaults_resolve_the_documented_steps() {
        let one = ExperimentConfig::preset_default(Preset::Example1);
        assert_eq!(one.dt(), 4.0 * 2.0 / 256.0);
        assert_eq!(one.nu_m(), 0.01);
        assert!(!one.clamp_boundary);

        let two = ExperimentConfig::preset_default(Preset::Example2);
        assert_eq!(two.dt(), 1e-4);
        assert_eq!(two.t_end, 2.0);
        assert!(two.clamp_boundary);
        assert_eq!(two.nu_m(), 1e-5);
    }

    #[test]
    fn overrides_win_over_file_which_wins_over_defaults() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# comment line").unwrap();
        writeln!(file, "preset = example2").unwrap();
        writeln!(file, "n = 1024").unwrap();
        writeln!(file, "nu = 2e-5").unwrap();
        file.flush().unwrap();

        let cfg = resolve(None, Some(file.path()), &["nu=3e-5".to_string()]).unwrap();
        assert_eq!(cfg.preset, Preset::Example2);
        assert_eq!(cfg.n_elements, 1024);
        assert_eq!(cfg.nu, 3e-5);
        // nu_m still mirrors the final nu.
        assert_eq!(cfg.nu_m(), 3e-5);

        // An explicit flag beats the file's preset.
        let cfg = resolve(Some("example1"), Some(file.path()), &[]).unwrap();
        assert_eq!(cfg.preset, Preset::Example1);
        assert_eq!(cfg.n_elements, 1024);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_reported() {
        let err = resolve(None, None, &["cfl=0.5".to_string()]).unwrap_err();
        assert!(err.to_string().contains("unknown key 'cfl'"));
        let err = resolve(None, None, &["moving=yes".to_string()]).unwrap_err();
        assert!(err.to_string().contains("expected true or false"));
        let err = resolve(None, None, &["order=3".to_string()]).unwrap_err();
        assert!(err.to_string().contains("order must be 1 or 2"));
        let err = resolve(Some("example3"), None, &[]).unwrap_err();
        assert!(err.to_string().contains("unknown preset"));
    }

    #[test]
    fn mesh_stride_accepts_auto_and_numbers() {
        let cfg = resolve(None, None, &["mesh_stride=50".to_string()]).unwrap();
        assert_eq!(cfg.mesh_stride, Some(50));
        let cfg = resolve(None, None, &["mesh_stride=auto".to_string()]).unwrap();
        assert_eq!(cfg.mesh_stride, None);
    }

    #[test]
    fn printed_configuration_round_trips() {
        let mut cfg = ExperimentConfig::preset_default(Preset::Example2);
        cfg.n_elements = 1024;
        cfg.split_at_kinks = true;
        cfg.mesh_stride = Some(17);
        cfg.validate().unwrap();

        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(cfg.to_display().as_bytes()).unwrap();
        file.flush().unwrap();
        let reread = resolve(None, Some(file.path()), &[]).unwrap();
        // nu_m is printed resolved, so it comes back pinned to the same value.
        assert_eq!(reread.nu_m(), cfg.nu_m());
        let mut pinned = cfg.clone();
        pinned.nu_m = Some(cfg.nu_m());
        assert_eq!(reread, pinned);
    }

    #[test]
    fn scheme_and_motion_configs_carry_the_solver_settings() {
        let mut cfg = ExperimentConfig::preset_default(Preset::Example1);
        cfg.cg_tol = 1e-10;
        cfg.sor_omega = 1.5;
        cfg.quad_points = 7;
        let scheme = cfg.scheme_config();
        assert_eq!(scheme.cg_tol, 1e-10);
        assert_eq!(scheme.quad_points, 7);
        assert_eq!(scheme.dt, cfg.dt());
        let motion = cfg.motion_config();
        assert_eq!(motion.sor_omega, 1.5);
        assert_eq!(motion.nu_m, 0.01);
    }
}
