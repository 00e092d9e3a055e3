//! Run configuration, read from TOML.
//!
//! A file has one `[run]` table plus the table for the chosen scenario kind. Unknown keys are
//! rejected so a typo never silently falls back to a default.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rsm_core::{AttackerKind, SelectorKind};
use serde::{Deserialize, Deserializer};

use crate::error::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    UavNavigation,
    WsnTracking,
    Synthetic,
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::UavNavigation => "uav_navigation",
            ScenarioKind::WsnTracking => "wsn_tracking",
            ScenarioKind::Synthetic => "synthetic",
        })
    }
}

/// Estimation objective for the linear-Gaussian scenarios.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimationObjective {
    /// Batch log-determinant (submodular).
    Logdet,
    /// Sum of filtered covariance traces (monotone only).
    Trace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticObjective {
    Coverage,
    Modular,
}

fn parse_list<'de, D, T>(de: D) -> Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr,
    T::Err: fmt::Display,
{
    Vec::<String>::deserialize(de)?
        .iter()
        .map(|s| s.parse().map_err(serde::de::Error::custom))
        .collect()
}

fn all_selectors() -> Vec<SelectorKind> {
    SelectorKind::ALL.to_vec()
}

fn worst_only() -> Vec<AttackerKind> {
    vec![AttackerKind::Worst]
}

fn default_trials() -> usize {
    1
}

fn default_curvature_samples() -> u64 {
    2000
}

fn default_node_budget() -> u64 {
    rsm_core::solver::DEFAULT_NODE_BUDGET
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub kind: ScenarioKind,
    pub horizon: usize,
    /// `α_t = alpha` for every step.
    pub alpha: usize,
    /// `β_t = beta` for every step.
    pub beta: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "all_selectors", deserialize_with = "parse_list")]
    pub selectors: Vec<SelectorKind>,
    #[serde(default = "worst_only", deserialize_with = "parse_list")]
    pub attackers: Vec<AttackerKind>,
    /// Fill the bound columns for RAM rows.
    #[serde(default)]
    pub bounds: bool,
    /// Samples for total curvature when the objective is not submodular.
    #[serde(default = "default_curvature_samples")]
    pub curvature_samples: u64,
    #[serde(default = "default_node_budget")]
    pub node_budget: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_dt() -> f64 {
    1.0
}

fn default_ground_sensors() -> usize {
    10
}

fn default_gps_noise() -> f64 {
    2.0
}

fn default_altimeter_std() -> f64 {
    0.5
}

fn default_ground_noise_min() -> f64 {
    0.5
}

fn default_ground_noise_max() -> f64 {
    2.0
}

fn logdet() -> EstimationObjective {
    EstimationObjective::Logdet
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UavParams {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_ground_sensors")]
    pub ground_sensors: usize,
    /// GPS covariance is `gps_noise * I_3`.
    #[serde(default = "default_gps_noise")]
    pub gps_noise: f64,
    #[serde(default = "default_altimeter_std")]
    pub altimeter_std: f64,
    #[serde(default = "default_ground_noise_min")]
    pub ground_noise_min: f64,
    #[serde(default = "default_ground_noise_max")]
    pub ground_noise_max: f64,
    #[serde(default = "logdet")]
    pub objective: EstimationObjective,
}

impl Default for UavParams {
    fn default() -> Self {
        Self {
            dt: default_dt(),
            ground_sensors: default_ground_sensors(),
            gps_noise: default_gps_noise(),
            altimeter_std: default_altimeter_std(),
            ground_noise_min: default_ground_noise_min(),
            ground_noise_max: default_ground_noise_max(),
            objective: logdet(),
        }
    }
}

fn default_wsn_sensors() -> usize {
    100
}

fn default_side() -> f64 {
    100.0
}

fn default_sigma0() -> f64 {
    0.5
}

fn default_gamma() -> f64 {
    0.01
}

fn trace() -> EstimationObjective {
    EstimationObjective::Trace
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WsnParams {
    #[serde(default = "default_wsn_sensors")]
    pub sensors: usize,
    /// Side of the cube the sensors are scattered in.
    #[serde(default = "default_side")]
    pub side: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Noise floor: `R = (sigma0^2 + gamma d^2) I_3`.
    #[serde(default = "default_sigma0")]
    pub sigma0: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "trace")]
    pub objective: EstimationObjective,
}

impl Default for WsnParams {
    fn default() -> Self {
        Self {
            sensors: default_wsn_sensors(),
            side: default_side(),
            dt: default_dt(),
            sigma0: default_sigma0(),
            gamma: default_gamma(),
            objective: trace(),
        }
    }
}

fn coverage() -> SyntheticObjective {
    SyntheticObjective::Coverage
}

fn default_step_size() -> usize {
    4
}

fn default_universe() -> usize {
    6
}

fn default_max_cover() -> usize {
    3
}

fn default_private_prob() -> f64 {
    0.5
}

fn default_max_weight() -> u32 {
    9
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticParams {
    #[serde(default = "coverage")]
    pub objective: SyntheticObjective,
    /// `|V_t|`.
    #[serde(default = "default_step_size")]
    pub step_size: usize,
    #[serde(default = "default_universe")]
    pub universe: usize,
    #[serde(default = "default_max_cover")]
    pub max_cover: usize,
    #[serde(default = "default_private_prob")]
    pub private_prob: f64,
    #[serde(default = "default_max_weight")]
    pub max_weight: u32,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        Self {
            objective: coverage(),
            step_size: default_step_size(),
            universe: default_universe(),
            max_cover: default_max_cover(),
            private_prob: default_private_prob(),
            max_weight: default_max_weight(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    #[serde(default)]
    pub uav_navigation: Option<UavParams>,
    #[serde(default)]
    pub wsn_tracking: Option<WsnParams>,
    #[serde(default)]
    pub synthetic: Option<SyntheticParams>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let config: RunConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn uav(&self) -> UavParams {
        self.uav_navigation.clone().unwrap_or_default()
    }

    pub fn wsn(&self) -> WsnParams {
        self.wsn_tracking.clone().unwrap_or_default()
    }

    pub fn synthetic(&self) -> SyntheticParams {
        self.synthetic.clone().unwrap_or_default()
    }

    /// `|V_t|` implied by the scenario parameters.
    pub fn step_size(&self) -> usize {
        match self.run.kind {
            ScenarioKind::UavNavigation => self.uav().ground_sensors + 2,
            ScenarioKind::WsnTracking => self.wsn().sensors,
            ScenarioKind::Synthetic => self.synthetic().step_size,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        let run = &self.run;
        let present = [
            (ScenarioKind::UavNavigation, self.uav_navigation.is_some()),
            (ScenarioKind::WsnTracking, self.wsn_tracking.is_some()),
            (ScenarioKind::Synthetic, self.synthetic.is_some()),
        ];
        if let Some((other, _)) = present.iter().find(|(k, p)| *p && *k != run.kind) {
            return bad(format!("table [{other}] given for a {} scenario", run.kind));
        }
        if run.horizon == 0 {
            return bad("horizon must be at least 1".into());
        }
        if run.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        let n = self.step_size();
        if !(run.beta <= run.alpha && run.alpha <= n) {
            return bad(format!(
                "need 0 <= beta ({}) <= alpha ({}) <= |V_t| ({n})",
                run.beta, run.alpha
            ));
        }
        if run.selectors.is_empty() || run.attackers.is_empty() {
            return bad("selectors and attackers must not be empty".into());
        }
        match run.kind {
            ScenarioKind::UavNavigation => {
                let p = self.uav();
                if !(p.dt > 0.0 && p.gps_noise > 0.0 && p.altimeter_std > 0.0) {
                    return bad("uav noise scales and dt must be positive".into());
                }
                if !(0.0 < p.ground_noise_min && p.ground_noise_min <= p.ground_noise_max) {
                    return bad("need 0 < ground_noise_min <= ground_noise_max".into());
                }
            }
            ScenarioKind::WsnTracking => {
                let p = self.wsn();
                if p.sensors == 0 || !(p.side > 0.0 && p.dt > 0.0 && p.sigma0 > 0.0) {
                    return bad("wsn needs sensors >= 1 and positive side, dt, sigma0".into());
                }
                if !(p.gamma >= 0.0) {
                    return bad("gamma must be non-negative".into());
                }
            }
            ScenarioKind::Synthetic => {
                let p = self.synthetic();
                if p.step_size == 0 || p.universe == 0 || p.max_cover == 0 || p.max_weight == 0 {
                    return bad("synthetic sizes and weights must be positive".into());
                }
                if !(0.0..=1.0).contains(&p.private_prob) {
                    return bad("private_prob must lie in [0, 1]".into());
                }
            }
        }
        Ok(())
    }
}
