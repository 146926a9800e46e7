//! Experiment configuration.
//!
//! The on-disk format is TOML: flat keys, optionally grouped into dotted
//! sections (`motion.dt = 0.3` or a `[motion]` table). Any key can be
//! overridden with `section.key=value` strings, where the value is parsed as
//! a TOML value.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::controllers::{OlfatiSaberParams, ReynoldsParams};
use crate::error::{FlockError, Result};
use crate::mpc::{MpcModel, MpcParams, SolverSettings};
use crate::noise::NoiseSpec;
use crate::state::MotionLimits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    Reynolds,
    OlfatiSaber,
    LatticeCentralized,
    LatticeDistributed,
    DfCentralized,
    DfDistributed,
}

impl ModelTag {
    pub const ALL: [ModelTag; 6] = [
        ModelTag::Reynolds,
        ModelTag::OlfatiSaber,
        ModelTag::LatticeCentralized,
        ModelTag::LatticeDistributed,
        ModelTag::DfCentralized,
        ModelTag::DfDistributed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelTag::Reynolds => "reynolds",
            ModelTag::OlfatiSaber => "olfati_saber",
            ModelTag::LatticeCentralized => "lattice_centralized",
            ModelTag::LatticeDistributed => "lattice_distributed",
            ModelTag::DfCentralized => "df_centralized",
            ModelTag::DfDistributed => "df_distributed",
        }
    }

    pub fn mpc_model(self) -> Option<MpcModel> {
        match self {
            ModelTag::LatticeCentralized => Some(MpcModel::LatticeCentralized),
            ModelTag::LatticeDistributed => Some(MpcModel::LatticeDistributed),
            ModelTag::DfCentralized => Some(MpcModel::DfCentralized),
            ModelTag::DfDistributed => Some(MpcModel::DfDistributed),
            ModelTag::Reynolds | ModelTag::OlfatiSaber => None,
        }
    }

    /// Centralized models sense one shared noisy snapshot; all others sense
    /// an independent view per agent.
    pub fn senses_globally(self) -> bool {
        self.mpc_model().is_some_and(MpcModel::is_centralized)
    }

    /// Parses `all` or a comma-separated list of tags.
    pub fn parse_list(s: &str) -> Result<Vec<ModelTag>> {
        if s.trim() == "all" {
            return Ok(ModelTag::ALL.to_vec());
        }
        s.split(',').map(|t| t.trim().parse()).collect()
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelTag {
    type Err = FlockError;

    fn from_str(s: &str) -> Result<Self> {
        ModelTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| FlockError::Config(format!("unknown model '{s}'")))
    }
}

/// A controller choice together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Reynolds(ReynoldsParams),
    OlfatiSaber(OlfatiSaberParams),
    Mpc {
        model: MpcModel,
        params: MpcParams,
        solver: SolverSettings,
    },
}

impl ModelSpec {
    pub fn tag(&self) -> ModelTag {
        match self {
            ModelSpec::Reynolds(_) => ModelTag::Reynolds,
            ModelSpec::OlfatiSaber(_) => ModelTag::OlfatiSaber,
            ModelSpec::Mpc { model, .. } => match model {
                MpcModel::LatticeCentralized => ModelTag::LatticeCentralized,
                MpcModel::LatticeDistributed => ModelTag::LatticeDistributed,
                MpcModel::DfCentralized => ModelTag::DfCentralized,
                MpcModel::DfDistributed => ModelTag::DfDistributed,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::Reynolds(p) => p.validate(),
            ModelSpec::OlfatiSaber(p) => p.validate(),
            ModelSpec::Mpc { params, .. } => params.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct InitBoxes {
    pub position_min: Vec<f64>,
    pub position_max: Vec<f64>,
    pub velocity_min: Vec<f64>,
    pub velocity_max: Vec<f64>,
}

impl Default for InitBoxes {
    fn default() -> Self {
        InitBoxes {
            position_min: vec![-15.0, -15.0],
            position_max: vec![15.0, 15.0],
            velocity_min: vec![0.0, 0.0],
            velocity_max: vec![2.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct OlfatiSaberShape {
    pub epsilon: f64,
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub c_alignment: f64,
}

impl Default for OlfatiSaberShape {
    fn default() -> Self {
        let p = OlfatiSaberParams::default();
        OlfatiSaberShape {
            epsilon: p.epsilon,
            a: p.a,
            b: p.b,
            h: p.h,
            c_alignment: p.c_alignment,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct MpcSection {
    pub horizon: usize,
    pub lambda: f64,
    pub omega: f64,
}

impl Default for MpcSection {
    fn default() -> Self {
        let p = MpcParams::default();
        MpcSection {
            horizon: p.horizon,
            lambda: p.lambda,
            omega: p.omega,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct ParallelSection {
    /// Solve the per-agent problems of distributed models concurrently.
    pub agents: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelTag,
    pub n: usize,
    pub steps: usize,
    pub runs: usize,
    pub base_seed: u64,
    pub dim: usize,
    /// Interaction radius for neighborhoods and metrics.
    pub r: f64,
    /// Lattice scale.
    pub d: f64,
    pub output_dir: PathBuf,
    pub motion: MotionLimits,
    pub noise: NoiseSpec,
    pub init: InitBoxes,
    pub reynolds: ReynoldsParams,
    pub olfati_saber: OlfatiSaberShape,
    pub mpc: MpcSection,
    pub solver: SolverSettings,
    pub parallel: ParallelSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: ModelTag::DfDistributed,
            n: 30,
            steps: 100,
            runs: 1,
            base_seed: 0,
            dim: 2,
            r: 8.4,
            d: 7.0,
            output_dir: PathBuf::from("out"),
            motion: MotionLimits::default(),
            noise: NoiseSpec::NONE,
            init: InitBoxes::default(),
            reynolds: ReynoldsParams::default(),
            olfati_saber: OlfatiSaberShape::default(),
            mpc: MpcSection::default(),
            solver: SolverSettings::default(),
            parallel: ParallelSection::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_toml_with_overrides(text, &[])
    }

    /// Parses `text` and applies `section.key=value` overrides on top.
    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| FlockError::Config(e.to_string()))?;
        for ov in overrides {
            apply_override(&mut table, ov)?;
        }
        let cfg: ExperimentConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| FlockError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| FlockError::io(path, e))?;
        Self::from_toml_with_overrides(&text, overrides)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(FlockError::Config(m));
        if self.n == 0 {
            return fail("n must be >= 1".into());
        }
        if self.steps == 0 {
            return fail("steps must be >= 1".into());
        }
        if self.runs == 0 {
            return fail("runs must be >= 1".into());
        }
        if self.dim == 0 {
            return fail("dim must be >= 1".into());
        }
        if !(self.r > 0.0) || !(self.d > 0.0) {
            return fail(format!("r and d must be positive (r={}, d={})", self.r, self.d));
        }
        self.motion.validate()?;
        self.noise.validate()?;
        let b = &self.init;
        for (name, lo, hi) in [
            ("position", &b.position_min, &b.position_max),
            ("velocity", &b.velocity_min, &b.velocity_max),
        ] {
            if lo.len() != self.dim || hi.len() != self.dim {
                return fail(format!("init {name} box must have {} components", self.dim));
            }
            if lo.iter().zip(hi).any(|(l, h)| !(l <= h)) {
                return fail(format!("init {name} box has min > max"));
            }
        }
        for tag in ModelTag::ALL {
            self.model_spec(tag).validate()?;
        }
        Ok(())
    }

    pub fn mpc_params(&self) -> MpcParams {
        MpcParams {
            horizon: self.mpc.horizon,
            lambda: self.mpc.lambda,
            r: self.r,
            d: self.d,
            omega: self.mpc.omega,
        }
    }

    pub fn olfati_saber_params(&self) -> OlfatiSaberParams {
        let s = &self.olfati_saber;
        OlfatiSaberParams {
            r: self.r,
            d: self.d,
            epsilon: s.epsilon,
            a: s.a,
            b: s.b,
            h: s.h,
            c_alignment: s.c_alignment,
        }
    }

    pub fn model_spec(&self, tag: ModelTag) -> ModelSpec {
        match tag {
            ModelTag::Reynolds => ModelSpec::Reynolds(self.reynolds),
            ModelTag::OlfatiSaber => ModelSpec::OlfatiSaber(self.olfati_saber_params()),
            _ => ModelSpec::Mpc {
                model: tag.mpc_model().expect("mpc tag"),
                params: self.mpc_params(),
                solver: self.solver,
            },
        }
    }
}

fn apply_override(table: &mut toml::Table, ov: &str) -> Result<()> {
    let (key, raw) = ov
        .split_once('=')
        .ok_or_else(|| FlockError::Config(format!("override '{ov}' is not key=value")))?;
    let value = parse_value(raw.trim());
    let parts: Vec<&str> = key.trim().split('.').collect();
    let (last, sections) = parts.split_last().expect("split yields one part");
    let mut cur = table;
    for section in sections {
        let entry = cur
            .entry(section.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| FlockError::Config(format!("'{section}' is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

/// Interprets `raw` as a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
