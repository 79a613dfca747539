//! Run configuration: a flat TOML table of scalar keys, overridable by
//! `key=value` pairs from the command line.

use std::path::{Path, PathBuf};

use dirac_core::analysis::WeightSpec;
use dirac_core::angular::AngularIndex;
use dirac_core::evolution::{PicardOptions, TimeGrid};
use dirac_core::nonlinear::NonlinearityKind;
use dirac_core::profile::{partial_wave_state, Components, DataProfile};
use dirac_core::radial::{PotentialProfile, PotentialSpec, RadialGrid, RadialPair};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

pub const MIN_CELLS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub radius: f64,
    pub cells: usize,
    pub horizon: f64,
    pub steps: usize,
    pub two_j: u32,
    pub two_mj: i32,
    pub kappa: i32,
    /// `zero`, `gaussian` or `critical`.
    pub potential: String,
    pub v1: f64,
    pub v2: f64,
    pub potential_width: f64,
    /// Fraction of the admissibility bound used by the `critical` profile.
    pub fraction: f64,
    pub sigma: f64,
    pub delta: f64,
    /// `none`, `F1` or `F2`.
    pub nonlinearity: String,
    /// `gaussian`, `bump` or `wavepacket`.
    pub profile: String,
    pub amplitude: f64,
    pub width: f64,
    pub frequency: f64,
    /// `plus`, `minus` or `both`.
    pub components: String,
    /// `strang` or `picard`.
    pub solver: String,
    pub out_dir: PathBuf,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub amplitudes: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub refinements: usize,
    /// `oracle` (linear flow against the box solver) or `strang`
    /// (nonlinear flow against a fine reference).
    pub convergence: String,
    pub box_cells: usize,
    /// Defaults to `radius`.
    pub box_half_width: Option<f64>,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            radius: 40.0,
            cells: 1024,
            horizon: 2.0,
            steps: 200,
            two_j: 1,
            two_mj: 1,
            kappa: -1,
            potential: "zero".into(),
            v1: 0.0,
            v2: 0.0,
            potential_width: 1.0,
            fraction: 0.5,
            sigma: 2.0,
            delta: 0.5,
            nonlinearity: "none".into(),
            profile: "gaussian".into(),
            amplitude: 1.0,
            width: 1.0,
            frequency: 3.0,
            components: "plus".into(),
            solver: "strang".into(),
            out_dir: PathBuf::from("out"),
            picard_tol: 1e-12,
            picard_max_iters: 50,
            epsilon: 0.05,
            seed: 0,
            amplitudes: vec![0.25, 0.5, 1.0],
            lambdas: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            refinements: 2,
            convergence: "oracle".into(),
            box_cells: 64,
            box_half_width: None,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Solver {
    Strang,
    Picard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConvergenceMode {
    Oracle,
    Strang,
}

/// A validated configuration with every name resolved.
#[derive(Debug, Clone)]
pub struct Setup {
    pub idx: AngularIndex,
    pub grid: RadialGrid,
    pub tgrid: TimeGrid,
    pub potential: Option<PotentialSpec>,
    pub kind: Option<NonlinearityKind>,
    pub profile: DataProfile,
    pub components: Components,
    pub solver: Solver,
    pub weight: WeightSpec,
    pub picard: PicardOptions,
    pub convergence: ConvergenceMode,
}

impl Setup {
    pub fn data(&self) -> RadialPair {
        partial_wave_state(self.idx, self.grid, &self.profile, self.components)
    }

    pub fn data_on(&self, grid: RadialGrid, profile: &DataProfile) -> RadialPair {
        partial_wave_state(self.idx, grid, profile, self.components)
    }
}

fn config_err(e: impl std::fmt::Display) -> LabError {
    LabError::Config(e.to_string())
}

/// Parses the right-hand side of an override as a TOML value, falling back
/// to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> LabResult<Self> {
        Self::from_parts(text, &[])
    }

    /// Reads `path` (if given) and applies `overrides` of the form `key=value`.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> LabResult<Self> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| config_err(format!("cannot read {}: {e}", p.display())))?,
            None => String::new(),
        };
        Self::from_parts(&text, overrides)
    }

    fn from_parts(text: &str, overrides: &[String]) -> LabResult<Self> {
        let mut table: toml::Table = toml::from_str(text).map_err(config_err)?;
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| config_err(format!("override `{o}` is not of the form key=value")))?;
            table.insert(k.trim().to_string(), parse_value(v.trim()));
        }
        let cfg: RunConfig = toml::Value::Table(table).try_into().map_err(config_err)?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config serialises")
    }

    pub fn nonlinearity_kind(&self) -> LabResult<Option<NonlinearityKind>> {
        match self.nonlinearity.to_ascii_lowercase().as_str() {
            "none" | "linear" => Ok(None),
            other => other.parse().map(Some).map_err(config_err),
        }
    }

    pub fn potential_profile(&self) -> LabResult<PotentialProfile> {
        match self.potential.as_str() {
            "zero" | "none" => Ok(PotentialProfile::Zero),
            "gaussian" => {
                if !(self.potential_width > 0.0) {
                    return Err(config_err("potential_width must be positive"));
                }
                Ok(PotentialProfile::Gaussian { v1: self.v1, v2: self.v2, width: self.potential_width })
            }
            "critical" => Ok(PotentialProfile::Critical { fraction: self.fraction }),
            other => Err(config_err(format!("unknown potential `{other}`"))),
        }
    }

    /// Checks ranges and resolves names; no computation happens before this
    /// succeeds.
    pub fn setup(&self) -> LabResult<Setup> {
        if self.cells < MIN_CELLS {
            return Err(config_err(format!("cells must be at least {MIN_CELLS}, got {}", self.cells)));
        }
        if !(self.sigma > 1.0) {
            return Err(config_err(format!("sigma must exceed 1, got {}", self.sigma)));
        }
        if !(self.delta > 0.0) {
            return Err(config_err(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(config_err(format!("radius must be positive, got {}", self.radius)));
        }
        if !(self.horizon > 0.0) || self.steps == 0 {
            return Err(config_err("horizon must be positive and steps at least 1"));
        }
        if self.amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(config_err("amplitudes must be finite"));
        }
        if self.lambdas.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
            return Err(config_err("dilation factors must be positive"));
        }
        if !self.box_cells.is_power_of_two() || self.box_cells < 8 {
            return Err(config_err(format!("box_cells must be a power of two >= 8, got {}", self.box_cells)));
        }
        if self.threads == Some(0) {
            return Err(config_err("threads must be at least 1"));
        }
        let idx = AngularIndex::new(self.two_j, self.two_mj, self.kappa).map_err(config_err)?;
        let kind = self.nonlinearity_kind()?;
        if kind.is_some() && !idx.is_lowest() {
            return Err(config_err(format!(
                "unsupported index {idx}: nonlinear runs need j = 1/2 (two_j = 1)"
            )));
        }
        let grid = RadialGrid::new(self.radius, self.cells).map_err(config_err)?;
        let tgrid = TimeGrid::new(self.horizon, self.steps).map_err(config_err)?;
        let profile = self.potential_profile()?;
        let potential = match profile {
            PotentialProfile::Zero => None,
            p => Some(PotentialSpec::from_profile(grid, p, self.sigma, self.delta).map_err(config_err)?),
        };
        let data = DataProfile::from_name(&self.profile, self.amplitude, self.width, self.frequency).map_err(config_err)?;
        let components: Components = self.components.parse().map_err(config_err)?;
        let solver = match self.solver.as_str() {
            "strang" => Solver::Strang,
            "picard" => Solver::Picard,
            other => return Err(config_err(format!("unknown solver `{other}`"))),
        };
        if solver == Solver::Picard && kind.is_none() {
            return Err(config_err("the picard solver needs a nonlinearity"));
        }
        let convergence = match self.convergence.as_str() {
            "oracle" => ConvergenceMode::Oracle,
            "strang" => ConvergenceMode::Strang,
            other => return Err(config_err(format!("unknown convergence study `{other}`"))),
        };
        let weight = WeightSpec::new(self.sigma, self.epsilon).map_err(config_err)?;
        if !(self.picard_tol > 0.0) || self.picard_max_iters == 0 {
            return Err(config_err("picard_tol must be positive and picard_max_iters at least 1"));
        }
        Ok(Setup {
            idx,
            grid,
            tgrid,
            potential,
            kind,
            profile: data,
            components,
            solver,
            weight,
            picard: PicardOptions { max_iters: self.picard_max_iters, tol: self.picard_tol },
            convergence,
        })
    }

    pub fn box_half_width(&self) -> f64 {
        self.box_half_width.unwrap_or(self.radius)
    }
}
