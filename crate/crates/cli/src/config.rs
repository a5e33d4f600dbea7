use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use hyperlab::models::{from_name, FluxModel};
use hyperlab::schemes::{InitialData, PiecewiseConstantFn, SchemeConfig};
use hyperlab::State;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeId {
    Godunov,
    Glimm,
    FrontTracking,
    MethodOfLines,
    Viscous,
    LaxFriedrichs,
    NonlinearDiffusion,
    JinXin,
    BackwardEuler,
    Mollification,
}

impl SchemeId {
    pub fn as_str(self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ProfileName {
    /// `base + amplitude · exp(−((x − center)/width)²)`
    Gaussian,
    /// `offset + amplitude · sin(k x)`
    Sine,
    /// `−x` clipped to `[−1, 1]`
    Ramp,
    /// `½(left + right) − ½(left − right) tanh((x − center)/width)`
    Tanh,
}

/// Initial data as written in a config or data file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    Riemann {
        #[serde(default)]
        x0: f64,
        left: Vec<f64>,
        right: Vec<f64>,
    },
    Pc {
        breakpoints: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
    /// Scalar analytic profile; `resolution` is the cell size of its piecewise
    /// constant version (front tracking and verification).
    Profile {
        name: ProfileName,
        #[serde(default)]
        params: Vec<f64>,
        #[serde(default)]
        resolution: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Snapshot times written to CSV; initial and final levels when empty.
    pub times: Vec<f64>,
    pub format: OutFormat,
    pub path: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

/// A config file: every field may be supplied or overridden by flags.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub model: Option<String>,
    pub normalize: Option<f64>,
    pub scheme: Option<SchemeId>,
    pub data: Option<DataSpec>,
    pub scheme_config: Option<SchemeConfig>,
    pub output: Option<OutputSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: String,
    /// Speed bound `M` for the speed normalization `u_t + f̃(u)_x = 0`.
    #[serde(default)]
    pub normalize: Option<f64>,
    pub scheme: SchemeId,
    pub data: DataSpec,
    pub scheme_config: SchemeConfig,
    #[serde(default)]
    pub output: OutputSpec,
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{}: invalid config", path.display()))
}

/// Reads a config file, or the config echoed inside a run bundle.
pub fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("{}: not JSON", path.display()))?;
    let value = match value.get("config") {
        Some(echo) if value.get("solution").is_some() => echo.clone(),
        _ => value,
    };
    serde_json::from_value(value).with_context(|| format!("{}: invalid config", path.display()))
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| anyhow!("'{p}' is not a number")))
        .collect()
}

pub fn build_model(name: &str, normalize: Option<f64>) -> Result<FluxModel<f64>> {
    let m = from_name::<f64>(name).map_err(|e| anyhow!("model: {e}"))?;
    match normalize {
        Some(bound) => m.normalize_speeds(bound).map_err(|e| anyhow!("normalize: {e}")),
        None => Ok(m),
    }
}

pub fn state(v: &[f64], n: usize, field: &str) -> Result<State<f64>> {
    if v.len() != n {
        bail!("{field}: state has {} components, the model has {n}", v.len());
    }
    if v.iter().any(|x| !x.is_finite()) {
        bail!("{field}: state components must be finite");
    }
    Ok(State::from_slice(v))
}

fn param(p: &[f64], i: usize, default: f64) -> f64 {
    p.get(i).copied().unwrap_or(default)
}

impl DataSpec {
    fn profile_fn(name: ProfileName, p: &[f64]) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
        let p = p.to_vec();
        move |x: f64| match name {
            ProfileName::Gaussian => {
                let w = param(&p, 2, 1.0);
                param(&p, 3, 0.0) + param(&p, 0, 1.0) * (-((x - param(&p, 1, 0.0)) / w).powi(2)).exp()
            }
            ProfileName::Sine => param(&p, 2, 0.0) + param(&p, 0, 1.0) * (param(&p, 1, 1.0) * x).sin(),
            ProfileName::Ramp => (-x).clamp(-1.0, 1.0),
            ProfileName::Tanh => {
                let (l, r) = (param(&p, 0, 1.0), param(&p, 1, 0.0));
                0.5 * (l + r) - 0.5 * (l - r) * ((x - param(&p, 2, 0.0)) / param(&p, 3, 0.1)).tanh()
            }
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            DataSpec::Riemann { x0, left, right } => {
                if !x0.is_finite() {
                    bail!("data.riemann.x0 must be finite");
                }
                state(left, n, "data.riemann.left")?;
                state(right, n, "data.riemann.right")?;
            }
            DataSpec::Pc { breakpoints, values } => {
                for (i, v) in values.iter().enumerate() {
                    state(v, n, &format!("data.pc.values[{i}]"))?;
                }
                if values.len() != breakpoints.len() + 1 {
                    bail!("data.pc: {} values need {} breakpoints", values.len(), values.len().saturating_sub(1));
                }
                if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
                    bail!("data.pc.breakpoints must be strictly increasing");
                }
            }
            DataSpec::Profile { params, resolution, name } => {
                if n != 1 {
                    bail!("data.profile: analytic profiles are scalar, the model has {n} components");
                }
                if params.iter().any(|x| !x.is_finite()) {
                    bail!("data.profile.params must be finite");
                }
                if matches!(name, ProfileName::Gaussian | ProfileName::Tanh) && param(params, if *name == ProfileName::Gaussian { 2 } else { 3 }, 1.0) <= 0.0 {
                    bail!("data.profile.params: width must be positive");
                }
                if let Some(r) = resolution {
                    if !(*r > 0.0) {
                        bail!("data.profile.resolution must be positive");
                    }
                }
            }
        }
        Ok(())
    }

    /// Piecewise constant version on `domain`.
    pub fn to_pc(&self, domain: (f64, f64)) -> hyperlab::Result<PiecewiseConstantFn<f64>> {
        let pc = match self {
            DataSpec::Riemann { x0, left, right } => {
                PiecewiseConstantFn::riemann(*x0, State::from_slice(left), State::from_slice(right))
            }
            DataSpec::Pc { breakpoints, values } => {
                PiecewiseConstantFn::new(breakpoints.clone(), values.iter().map(|v| State::from_slice(v)).collect())?
            }
            DataSpec::Profile { .. } => {
                let dx = self.resolution();
                let n = ((domain.1 - domain.0) / dx).round().max(1.0) as usize;
                let dx = (domain.1 - domain.0) / n as f64;
                let cells = self.initial_data().cell_averages(domain.0, dx, n)?;
                PiecewiseConstantFn::from_cells(domain.0, dx, &cells)?.simplify()
            }
        };
        Ok(pc)
    }

    pub fn resolution(&self) -> f64 {
        match self {
            DataSpec::Profile { resolution, .. } => resolution.unwrap_or(0.01),
            _ => 0.0,
        }
    }

    pub fn initial_data(&self) -> InitialData<f64> {
        match self {
            DataSpec::Profile { name, params, .. } => {
                let f = Self::profile_fn(*name, params);
                InitialData::profile(move |x| State::scalar(f(x)))
            }
            _ => InitialData::Pc(self.to_pc((0.0, 1.0)).expect("validated data")),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<FluxModel<f64>> {
        let model = build_model(&self.model, self.normalize)?;
        self.data.validate(model.n)?;
        self.scheme_config.validate().map_err(|e| anyhow!("scheme_config: {e}"))?;
        if self.output.times.iter().any(|&t| !(0.0..=self.scheme_config.t_final).contains(&t)) {
            bail!("output.times must lie in [0, T]");
        }
        Ok(model)
    }
}

impl ConfigFile {
    pub fn finish(self) -> Result<ExperimentConfig> {
        let cfg = ExperimentConfig {
            model: self.model.ok_or_else(|| anyhow!("model: missing (use --model or the config file)"))?,
            normalize: self.normalize,
            scheme: self.scheme.unwrap_or(SchemeId::Godunov),
            data: self.data.ok_or_else(|| anyhow!("data: missing (use --data or the config file)"))?,
            scheme_config: self.scheme_config.unwrap_or_default(),
            output: self.output.unwrap_or_default(),
        };
        Ok(cfg)
    }
}
