use std::collections::HashMap;
use std::path::{Path, PathBuf};

use crate::dn::{DnBottom, SolverSettings};
use crate::dynamics::{Model, StepSize};
use crate::elliptic::Backend;
use crate::error::{Error, Result};
use crate::spectral::GridSpec;

/// Initial data of a run.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Rest,
    StandingWave { amplitude: f64, mode: usize },
    Shear { omega0: f64 },
    Stream { c: f64 },
    File(PathBuf),
}

/// Elliptic backend selection; `Both` evolves with the direct solver and
/// records the gap to the factored one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendChoice {
    Direct,
    Factored,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub n: usize,
    pub nz: usize,
    pub length: f64,
    pub initial: InitialCondition,
    pub t_final: f64,
    pub cfl_safety: f64,
    /// Fixed step; the CFL rule is used when absent.
    pub dt: Option<f64>,
    pub c0: f64,
    pub h0: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub curvature_p: f64,
    /// Regularity index of `E_s` and `E_symm`.
    pub s: f64,
    pub filter: bool,
    /// Write a snapshot every this many steps; 0 keeps only the final one.
    pub snapshot_every: usize,
    pub output_dir: PathBuf,
    pub dn_bottom: DnBottom,
    pub elliptic_backend: BackendChoice,
    pub zeta_residual: bool,
    /// Non-fatal remarks produced while validating.
    pub warnings: Vec<String>,
}

pub const CONFIG_KEYS: [&str; 25] = [
    "grid.d",
    "grid.N",
    "grid.Nz",
    "grid.L",
    "initial.kind",
    "initial.amplitude",
    "initial.mode",
    "initial.omega0",
    "initial.c",
    "initial.path",
    "T_final",
    "cfl_safety",
    "dt",
    "c0",
    "h0",
    "tolerance",
    "max_iterations",
    "curvature_p",
    "s",
    "filter",
    "snapshot_every",
    "output_dir",
    "dn_bottom",
    "elliptic_backend",
    "zeta_residual",
];

struct Entries {
    map: HashMap<String, (usize, String)>,
}

impl Entries {
    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.map.get(key)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some((line, v)) => v.parse().map_err(|_| Error::ConfigParse {
                line: *line,
                message: format!("cannot parse `{v}` for `{key}`"),
            }),
        }
    }

    fn text(&self, key: &str, default: &str) -> String {
        self.raw(key).map_or_else(|| default.to_string(), |(_, v)| v.clone())
    }
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(Error::ConfigParse { line, message: format!("`{key}` expects a boolean, got `{v}`") }),
    }
}

fn invalid(field: &str, message: impl Into<String>) -> Error {
    Error::Validation { field: field.to_string(), message: message.into() }
}

impl RunConfig {
    /// Parse `key = value` lines; `#` starts a comment, values may be quoted.
    pub fn parse_str(text: &str) -> Result<RunConfig> {
        let mut map = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::ConfigParse { line, message: format!("expected `key = value`, got `{content}`") })?;
            let key = key.trim();
            let value = value.trim().trim_matches('"').to_string();
            if !CONFIG_KEYS.contains(&key) {
                return Err(Error::UnknownField { name: key.to_string(), valid: CONFIG_KEYS.join(", ") });
            }
            if map.insert(key.to_string(), (line, value)).is_some() {
                return Err(Error::ConfigParse { line, message: format!("duplicate key `{key}`") });
            }
        }
        let e = Entries { map };

        let dim = e.parse("grid.d", 1usize)?;
        let initial = match e.text("initial.kind", "rest").as_str() {
            "rest" => InitialCondition::Rest,
            "standing_wave" => InitialCondition::StandingWave {
                amplitude: e.parse("initial.amplitude", 1e-4)?,
                mode: e.parse("initial.mode", 1usize)?,
            },
            "shear" => InitialCondition::Shear { omega0: e.parse("initial.omega0", 0.1)? },
            "stream" => InitialCondition::Stream { c: e.parse("initial.c", 0.5)? },
            "file" => InitialCondition::File(PathBuf::from(
                e.raw("initial.path").map(|(_, v)| v.clone()).ok_or_else(|| invalid("initial.path", "required for kind = file"))?,
            )),
            other => return Err(invalid("initial.kind", format!("unknown kind `{other}` (rest, standing_wave, shear, stream, file)"))),
        };
        let t_final = match e.raw("T_final") {
            Some(_) => e.parse("T_final", 0.0)?,
            None => return Err(invalid("T_final", "required")),
        };
        let dn_bottom = match e.text("dn_bottom", "neumann0").as_str() {
            "dirichlet0" => DnBottom::Dirichlet0,
            "neumann0" => DnBottom::Neumann0,
            other => return Err(invalid("dn_bottom", format!("`{other}` is not dirichlet0 or neumann0"))),
        };
        let elliptic_backend = match e.text("elliptic_backend", "direct").as_str() {
            "direct" => BackendChoice::Direct,
            "factored" => BackendChoice::Factored,
            "both" => BackendChoice::Both,
            other => return Err(invalid("elliptic_backend", format!("`{other}` is not direct, factored or both"))),
        };
        let flag = |key: &str, default: bool| -> Result<bool> {
            match e.raw(key) {
                Some((line, v)) => parse_bool(*line, key, v),
                None => Ok(default),
            }
        };
        let dt = match e.raw("dt") {
            Some(_) => Some(e.parse("dt", 0.0)?),
            None => None,
        };
        let mut config = RunConfig {
            dim,
            n: e.parse("grid.N", 64usize)?,
            nz: e.parse("grid.Nz", 33usize)?,
            length: e.parse("grid.L", 2.0 * std::f64::consts::PI)?,
            initial,
            t_final,
            cfl_safety: e.parse("cfl_safety", 0.5)?,
            dt,
            c0: e.parse("c0", 0.5)?,
            h0: e.parse("h0", 0.5)?,
            tolerance: e.parse("tolerance", 1e-12)?,
            max_iterations: e.parse("max_iterations", 200usize)?,
            curvature_p: e.parse("curvature_p", 5.0)?,
            s: e.parse("s", 2.5)?,
            filter: flag("filter", true)?,
            snapshot_every: e.parse("snapshot_every", 0usize)?,
            output_dir: PathBuf::from(e.text("output_dir", "output")),
            dn_bottom,
            elliptic_backend,
            zeta_residual: flag("zeta_residual", true)?,
            warnings: Vec::new(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn parse_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_str(&text)
    }

    fn validate(&mut self) -> Result<()> {
        self.grid()?;
        let positive = |name: &str, v: f64| if v > 0.0 && v.is_finite() { Ok(()) } else { Err(invalid(name, format!("must be positive, got {v}"))) };
        positive("T_final", self.t_final)?;
        positive("cfl_safety", self.cfl_safety)?;
        positive("c0", self.c0)?;
        positive("h0", self.h0)?;
        positive("tolerance", self.tolerance)?;
        if let Some(dt) = self.dt {
            positive("dt", dt)?;
        }
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations", "must be at least 1"));
        }
        if !(self.curvature_p >= 1.0) {
            return Err(invalid("curvature_p", format!("must be at least 1, got {}", self.curvature_p)));
        }
        if self.curvature_p <= 2.0 * self.dim as f64 {
            self.warnings.push(format!(
                "curvature_p = {} does not exceed 2d = {}; the continuation criterion needs p > 2d",
                self.curvature_p,
                2 * self.dim
            ));
        }
        if let InitialCondition::StandingWave { mode, .. } = self.initial {
            if mode == 0 || mode >= self.n / 2 {
                return Err(invalid("initial.mode", format!("must lie in 1..{}", self.n / 2)));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.dim, self.n, self.nz)?.with_length(self.length)
    }

    pub fn backend(&self) -> Backend {
        match self.elliptic_backend {
            BackendChoice::Factored => Backend::Factored,
            BackendChoice::Direct | BackendChoice::Both => Backend::Direct,
        }
    }

    pub fn model(&self) -> Model {
        Model {
            h0: self.h0,
            delta: None,
            settings: SolverSettings { backend: self.backend(), tolerance: self.tolerance, max_iterations: self.max_iterations },
            cfl_safety: self.cfl_safety,
            filter: self.filter,
        }
    }

    pub fn step_size(&self) -> StepSize {
        self.dt.map_or(StepSize::Cfl, StepSize::Fixed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let c = RunConfig::parse_str("T_final = 1\n").unwrap();
        assert_eq!(c.cfl_safety, 0.5);
        assert!(c.filter);
        assert_eq!(c.initial, InitialCondition::Rest);
        assert_eq!(c.dn_bottom, DnBottom::Neumann0);
        assert!(c.warnings.is_empty());
    }

    #[test]
    fn full_file() {
        let text = "# standing wave\ngrid.N = 128\ngrid.Nz = 17\ninitial.kind = standing_wave\ninitial.amplitude = 1e-4\ninitial.mode = 2\nT_final = 4.5\nfilter = off\nelliptic_backend = both\noutput_dir = \"out dir\"\n";
        let c = RunConfig::parse_str(text).unwrap();
        assert_eq!(c.n, 128);
        assert_eq!(c.initial, InitialCondition::StandingWave { amplitude: 1e-4, mode: 2 });
        assert!(!c.filter);
        assert_eq!(c.elliptic_backend, BackendChoice::Both);
        assert_eq!(c.output_dir, PathBuf::from("out dir"));
    }

    #[test]
    fn negative_final_time_names_field() {
        match RunConfig::parse_str("T_final = -1") {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "T_final"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_rejected() {
        match RunConfig::parse_str("T_final = 1\ngrid.M = 3") {
            Err(Error::UnknownField { name, valid }) => {
                assert_eq!(name, "grid.M");
                assert!(valid.contains("grid.N"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_curvature_exponent_warns() {
        let c = RunConfig::parse_str("T_final = 1\ncurvature_p = 1.5").unwrap();
        assert_eq!(c.warnings.len(), 1);
    }

    #[test]
    fn parse_errors_carry_line() {
        assert!(matches!(RunConfig::parse_str("T_final = 1\ngrid.N = many"), Err(Error::ConfigParse { line: 2, .. })));
        assert!(matches!(RunConfig::parse_str("T_final 1"), Err(Error::ConfigParse { line: 1, .. })));
        assert!(matches!(RunConfig::parse_str("T_final = 1\nT_final = 2"), Err(Error::ConfigParse { line: 2, .. })));
    }
}
