//! Experiment configuration files.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use torus_spread::dynamics::{Generator, LiftWord};
use torus_spread::geom::{Mat2Z, Vec2Q, Vec2R};

use crate::values::{from_vec2q, point, to_vec2q, vec2, Point, RationalPair, Real};

pub const DEFAULT_RESOLUTION: u32 = 200;
pub const MAX_RESOLUTION: u32 = 4000;
pub const DEFAULT_R: f64 = 2.0;
pub const DEFAULT_MEMBERS: u64 = 3;
pub const MAX_ITERATES: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Build,
    Verify,
    Rotate,
    Probe,
    Render,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Build => "build",
            Command::Verify => "verify",
            Command::Rotate => "rotate",
            Command::Probe => "probe",
            Command::Render => "render",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `a` given either as the integer `s` in `(2s+1)/(2ξ)` or as a value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ShiftSpec {
    Index(i64),
    Value(Real),
}

/// One generator of a lift word.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Translation(Point),
    /// Row-major `[a, b, c, d]` with determinant ±1.
    Linear([i64; 4]),
    Shear {
        eta: Real,
        xi: u32,
    },
}

impl GeneratorSpec {
    pub fn from_generator(g: &Generator) -> Self {
        match *g {
            Generator::Translation(t) => GeneratorSpec::Translation(point(t)),
            Generator::Linear(a) => GeneratorSpec::Linear(a.entries()),
            Generator::Shear { eta, xi } => GeneratorSpec::Shear { eta: Real(eta), xi },
        }
    }

    pub fn to_generator(&self) -> torus_spread::Result<Generator> {
        match self {
            GeneratorSpec::Translation(p) => Generator::translation(vec2(p)),
            GeneratorSpec::Linear([a, b, c, d]) => {
                Ok(Generator::Linear(Mat2Z::new(*a, *b, *c, *d)?))
            }
            GeneratorSpec::Shear { eta, xi } => Generator::shear(eta.0, *xi),
        }
    }
}

pub fn word_spec(w: &LiftWord) -> Vec<GeneratorSpec> {
    w.generators()
        .iter()
        .map(GeneratorSpec::from_generator)
        .collect()
}

/// The map studied by `rotate` and `probe`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    /// An explicit word, applied right to left.
    Word { generators: Vec<GeneratorSpec> },
    /// The spreading map `F` built from `generators` and `r`.
    Spreader,
    /// `F ∘ R_{(a,b)} ∘ F⁻¹`.
    ConjugatedTranslation,
    /// The members `h R_{θ_i} h⁻¹` of the family commuting with `R_{(1/q,0)}`.
    Family,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviationSpec {
    pub v: Point,
    pub rho: Point,
    pub steps: usize,
}

/// Parameters of the weak spreading probe; `U` is the disk of radius
/// `u_radius` around `u_center`, sampled on a square grid of spacing `u_spacing`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub eps: Real,
    pub radius: Real,
    pub steps: usize,
    pub u_center: Point,
    pub u_radius: Real,
    pub u_spacing: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Result record, relative to the output directory.
    #[serde(default = "default_record")]
    pub record: PathBuf,
    /// SVG rendering, relative to the output directory.
    #[serde(default)]
    pub svg: Option<PathBuf>,
    /// Whether stage clouds are written as cloud files.
    #[serde(default = "yes")]
    pub clouds: bool,
}

fn default_record() -> PathBuf {
    PathBuf::from("record.json")
}

fn yes() -> bool {
    true
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            record: default_record(),
            svg: None,
            clouds: true,
        }
    }
}

/// A parsed configuration file. Which fields are required depends on the command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<RationalPair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
    #[serde(default = "default_resolution")]
    pub resolution: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<ShiftSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_override: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpec>,
    /// Iterate counts for plain rotation-set estimates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterates: Option<Vec<usize>>,
    /// Iterate counts for the generalized estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsequence: Option<Vec<usize>>,
    /// Number of family members examined by `rotate` with a family map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deviation: Option<DeviationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rigidity_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeSpec>,
    /// Record read by `render`, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub outputs: Outputs,
}

fn default_resolution() -> u32 {
    DEFAULT_RESOLUTION
}

/// A configuration error naming the offending field.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("invalid config field `{field}`: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

fn bad(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.into(),
        reason: reason.into(),
    }
}

impl ExperimentConfig {
    pub fn empty(command: Command) -> Self {
        ExperimentConfig {
            command: Some(command),
            generators: None,
            r: None,
            ell: None,
            p: None,
            q: None,
            resolution: DEFAULT_RESOLUTION,
            basepoint: None,
            a: None,
            b: None,
            xi_override: None,
            seed: 0,
            map: None,
            iterates: None,
            subsequence: None,
            members: None,
            deviation: None,
            rigidity_steps: None,
            probe: None,
            input: None,
            outputs: Outputs::default(),
        }
    }

    /// Parses JSON, reporting unknown or malformed fields by name.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let field = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.contains("field"))
                .unwrap_or("config")
                .to_string();
            ConfigError { field, reason: msg }
        })
    }

    pub fn command(&self) -> Result<Command, ConfigError> {
        self.command.ok_or_else(|| bad("command", "missing"))
    }

    pub fn r(&self) -> f64 {
        self.r.map_or(DEFAULT_R, Real::get)
    }

    pub fn b(&self) -> f64 {
        self.b.map_or(0.0, Real::get)
    }

    pub fn generators(&self) -> Result<Vec<Vec2Q>, ConfigError> {
        match &self.generators {
            None => Err(bad("generators", "missing")),
            Some(g) if g.is_empty() => Err(bad("generators", "must not be empty")),
            Some(g) => {
                for (i, v) in g.iter().enumerate() {
                    if v[0].is_zero() && v[1].is_zero() {
                        return Err(bad("generators", format!("entry {i} is the zero vector")));
                    }
                }
                Ok(g.iter().map(to_vec2q).collect())
            }
        }
    }

    pub fn set_generators(&mut self, g: &[Vec2Q]) {
        self.generators = Some(g.iter().map(from_vec2q).collect());
    }

    pub fn basepoint(&self) -> Option<Vec2R> {
        self.basepoint.as_ref().map(vec2)
    }

    pub fn map_spec(&self) -> Result<&MapSpec, ConfigError> {
        self.map.as_ref().ok_or_else(|| bad("map", "missing"))
    }

    /// Checks every field the command reads; errors name the field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let command = self.command()?;
        if self.resolution < 2 || self.resolution > MAX_RESOLUTION {
            return Err(bad(
                "resolution",
                format!("must be in 2..={MAX_RESOLUTION}"),
            ));
        }
        if let Some(r) = self.r {
            if !(r.0 > 0.0 && r.0.is_finite()) {
                return Err(bad("r", "must be positive and finite"));
            }
        }
        if let Some(b) = self.b {
            if !b.0.is_finite() {
                return Err(bad("b", "must be finite"));
            }
        }
        if let Some(p) = &self.basepoint {
            let v = vec2(p);
            if !(0.0..=1.0).contains(&v.x) || !(0.0..=1.0).contains(&v.y) {
                return Err(bad("basepoint", "must lie in the unit square"));
            }
        }
        if let Some(ShiftSpec::Value(a)) = &self.a {
            if !a.0.is_finite() {
                return Err(bad("a", "must be finite"));
            }
        }
        if self.xi_override == Some(0) {
            return Err(bad("xi_override", "must be at least 1"));
        }
        match command {
            Command::Build | Command::Verify => {
                self.generators()?;
            }
            Command::Rotate | Command::Probe => self.validate_map(command)?,
            Command::Render => {
                if self.input.is_none() {
                    return Err(bad("input", "render needs the record to draw"));
                }
            }
        }
        if let Some(s) = &self.subsequence {
            check_increasing("subsequence", s)?;
        }
        if let Some(s) = &self.iterates {
            check_increasing("iterates", s)?;
        }
        Ok(())
    }

    fn validate_map(&self, command: Command) -> Result<(), ConfigError> {
        match self.map_spec()? {
            MapSpec::Word { generators } => {
                for g in generators {
                    g.to_generator().map_err(|e| bad("map", e.to_string()))?;
                }
            }
            MapSpec::Spreader | MapSpec::ConjugatedTranslation => {
                self.generators()?;
            }
            MapSpec::Family => {
                if command == Command::Probe {
                    return Err(bad("map", "probe takes a single map, not a family"));
                }
                self.generators()?;
                let q = self.q.ok_or_else(|| bad("q", "missing"))?;
                if q == 0 {
                    return Err(bad("q", "must be positive"));
                }
                if self.p.is_none() {
                    return Err(bad("p", "missing"));
                }
                let ell = self.ell.ok_or_else(|| bad("ell", "missing"))?;
                if !(ell.0 > 0.0 && ell.0.is_finite()) {
                    return Err(bad("ell", "must be positive and finite"));
                }
                if self.members == Some(0) {
                    return Err(bad("members", "must be at least 1"));
                }
            }
        }
        if command == Command::Probe {
            let p = self.probe.as_ref().ok_or_else(|| bad("probe", "missing"))?;
            for (name, x) in [
                ("probe.eps", p.eps),
                ("probe.radius", p.radius),
                ("probe.u_radius", p.u_radius),
                ("probe.u_spacing", p.u_spacing),
            ] {
                if !(x.0 > 0.0 && x.0.is_finite()) {
                    return Err(bad(name, "must be positive and finite"));
                }
            }
            if p.u_spacing.0 > p.u_radius.0 {
                return Err(bad("probe.u_spacing", "must not exceed probe.u_radius"));
            }
            if p.steps == 0 || p.steps > MAX_ITERATES {
                return Err(bad("probe.steps", format!("must be in 1..={MAX_ITERATES}")));
            }
        }
        if let Some(d) = &self.deviation {
            if d.steps == 0 || d.steps > MAX_ITERATES {
                return Err(bad(
                    "deviation.steps",
                    format!("must be in 1..={MAX_ITERATES}"),
                ));
            }
        }
        if let Some(n) = self.rigidity_steps {
            if n == 0 || n > MAX_ITERATES {
                return Err(bad(
                    "rigidity_steps",
                    format!("must be in 1..={MAX_ITERATES}"),
                ));
            }
        }
        Ok(())
    }
}

fn check_increasing(field: &str, s: &[usize]) -> Result<(), ConfigError> {
    if s.is_empty() {
        return Err(bad(field, "must not be empty"));
    }
    if s[0] == 0 || s.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad(field, "must be strictly increasing positive integers"));
    }
    if *s.last().unwrap() > MAX_ITERATES {
        return Err(bad(
            field,
            format!("iterate counts are capped at {MAX_ITERATES}"),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_are_named() {
        let e =
            ExperimentConfig::from_json(r#"{"command": "build", "genrators": []}"#).unwrap_err();
        assert_eq!(e.field, "genrators");
    }

    #[test]
    fn generators_accept_integers_and_fractions() {
        let c = ExperimentConfig::from_json(
            r#"{"command": "build", "generators": [[1, [1, 2]], [0, 1]]}"#,
        )
        .unwrap();
        c.validate().unwrap();
        let g = c.generators().unwrap();
        assert_eq!(g[0], Vec2Q::from_fractions(1, 1, 1, 2).unwrap());
    }

    #[test]
    fn word_maps_parse() {
        let c = ExperimentConfig::from_json(
            r#"{"command": "rotate", "map": {"kind": "word", "generators": [
                {"translation": ["0.5", 0.25]},
                {"linear": [1, 1, 0, 1]},
                {"shear": {"eta": 1, "xi": 2}}
            ]}, "iterates": [1, 2]}"#,
        )
        .unwrap();
        c.validate().unwrap();
    }

    #[test]
    fn family_needs_q() {
        let c = ExperimentConfig::from_json(
            r#"{"command": "rotate", "map": {"kind": "family"}, "generators": [[1, 0]], "p": 1, "ell": 2}"#,
        )
        .unwrap();
        assert_eq!(c.validate().unwrap_err().field, "q");
    }
}
