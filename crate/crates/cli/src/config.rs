//! Run configuration: a TOML file overlaid with command-line flags.
//!
//! Frequencies are ω/2π in Hz in the file and in kHz on the command line;
//! times are microseconds. Detunings are given either absolutely or in
//! units of Δ_LEP2.

use std::path::{Path, PathBuf};

use kerrcat::experiments::{DeltaGrid, Experiment, SweepSpec, DEFAULT_WINDOW};
use kerrcat::lindblad::IntegratorControls;
use kerrcat::liouville::{lep_detuning, InitialState, SystemParams};
use kerrcat::observables::WignerGridSpec;
use kerrcat::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

const REFERENCE_DRIVE_HZ: f64 = 15.5e6;
const FALLBACK_DELTA_MAX_REL: f64 = 2.0;
const FALLBACK_DELTA_POINTS: usize = 201;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    /// Δ/2π in Hz. Exclusive with `detuning_rel`.
    pub delta_hz: Option<f64>,
    /// Δ in units of Δ_LEP2.
    pub detuning_rel: Option<f64>,
    pub kerr_hz: f64,
    /// P/2π in Hz. Exclusive with `alpha`; the reference drive if both are absent.
    pub drive_hz: Option<f64>,
    /// Cat amplitude; sets P = Kα².
    pub alpha: Option<f64>,
    pub kappa_hz: f64,
    pub kappa_phi_hz: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self {
            delta_hz: None,
            detuning_rel: None,
            kerr_hz: 6.7e6,
            drive_hz: None,
            alpha: None,
            kappa_hz: 10e3,
            kappa_phi_hz: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_step_us: Option<f64>,
    pub max_time_us: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        let c = IntegratorControls::default();
        Self { rtol: c.rtol, atol: c.atol, max_step_us: c.max_step.map(|s| s * 1e6), max_time_us: c.max_time * 1e6 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Explicit detunings in units of Δ_LEP2.
    pub detunings_rel: Option<Vec<f64>>,
    /// Explicit detunings Δ/2π in kHz.
    pub detunings_khz: Option<Vec<f64>>,
    /// Symmetric range ±delta_max_rel·Δ_LEP2 ...
    pub delta_max_rel: Option<f64>,
    /// ... with this many points.
    pub delta_points: Option<usize>,
    /// Cat amplitudes for the spectrum map; the base α when absent.
    pub alphas: Option<Vec<f64>>,
    /// Time samples over [0, window].
    pub samples: Option<usize>,
    /// Window in units of 1/(α²κ). Exclusive with `window_us`.
    pub window_alpha2_kappa: Option<f64>,
    pub window_us: Option<f64>,
    pub wigner_points: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum WignerState {
    Steady,
    CoherentPlus,
    CatPlus,
    CatMinus,
    YPlus,
    Evolved,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WignerConfig {
    pub state: WignerState,
    /// Evolution time for `state = "evolved"`, µs.
    pub time_us: Option<f64>,
    pub format: Format,
}

impl Default for WignerConfig {
    fn default() -> Self {
        Self { state: WignerState::Steady, time_us: None, format: Format::Csv }
    }
}

/// Everything a run needs. Serialized back as the resolved config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub params: ParamsConfig,
    pub dim: usize,
    pub integrator: IntegratorConfig,
    pub grids: GridConfig,
    pub wigner: WignerConfig,
    pub output_dir: PathBuf,
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ParamsConfig::default(),
            dim: kerrcat::fock::TruncatedSpace::DEFAULT_DIM,
            integrator: IntegratorConfig::default(),
            grids: GridConfig::default(),
            wigner: WignerConfig::default(),
            output_dir: PathBuf::from("out"),
            jobs: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| {
            Error::InvalidParams(vec![format!("{}: {}", path.display(), e.message().replace('\n', " "))])
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Problems with the physical parameters, in the units of the file.
    pub fn param_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let p = &self.params;
        let checks = [
            ("kerr_hz", Some(p.kerr_hz), true),
            ("drive_hz", p.drive_hz, true),
            ("kappa_hz", Some(p.kappa_hz), false),
            ("kappa_phi_hz", Some(p.kappa_phi_hz), false),
        ];
        for (name, value, strict) in checks {
            let Some(v) = value else { continue };
            if !v.is_finite() || v < 0.0 || (strict && v == 0.0) {
                let bound = if strict { "> 0" } else { ">= 0" };
                out.push(format!("params: {name} must be finite and {bound} (got {v})"));
            }
        }
        for (name, value) in [("delta_hz", p.delta_hz), ("detuning_rel", p.detuning_rel)] {
            if value.is_some_and(|v| !v.is_finite()) {
                out.push(format!("params: {name} must be finite"));
            }
        }
        if let Some(a) = p.alpha {
            if !(a > 0.0 && a.is_finite()) {
                out.push(format!("params: alpha must be > 0 (got {a})"));
            }
        }
        out
    }

    /// Every problem with the configuration, not only the first.
    pub fn violations(&self, experiment: Experiment) -> Vec<String> {
        let mut out = self.param_violations();
        let p = &self.params;
        if p.delta_hz.is_some() && p.detuning_rel.is_some() {
            out.push("params: give delta_hz or detuning_rel, not both".into());
        }
        if p.drive_hz.is_some() && p.alpha.is_some() {
            out.push("params: give drive_hz or alpha, not both".into());
        }
        if self.dim < 2 {
            out.push(format!("dim must be at least 2 (got {})", self.dim));
        }
        let g = &self.grids;
        let delta_forms = [g.detunings_rel.is_some(), g.detunings_khz.is_some(), g.delta_max_rel.is_some() || g.delta_points.is_some()];
        if delta_forms.iter().filter(|&&b| b).count() > 1 {
            out.push("grids: use one of detunings_rel, detunings_khz or delta_max_rel/delta_points".into());
        }
        if let Some(m) = g.delta_max_rel {
            if !(m > 0.0 && m.is_finite()) {
                out.push(format!("grids: delta_max_rel must be > 0 (got {m})"));
            }
        }
        if g.delta_points == Some(0) {
            out.push("grids: delta_points must be at least 1".into());
        }
        if g.samples.is_some_and(|s| s < 2) {
            out.push("grids: samples must be at least 2".into());
        }
        if g.window_alpha2_kappa.is_some() && g.window_us.is_some() {
            out.push("grids: give window_alpha2_kappa or window_us, not both".into());
        }
        for (name, w) in [("window_alpha2_kappa", g.window_alpha2_kappa), ("window_us", g.window_us)] {
            if let Some(w) = w {
                if !(w > 0.0 && w.is_finite()) {
                    out.push(format!("grids: {name} must be > 0 (got {w})"));
                }
            }
        }
        if experiment == Experiment::Wigner && self.wigner.state == WignerState::Evolved {
            match self.wigner.time_us {
                Some(t) if t >= 0.0 && t.is_finite() => {}
                Some(t) => out.push(format!("wigner: time_us must be >= 0 (got {t})")),
                None => out.push("wigner: state = evolved needs time_us".into()),
            }
        }
        if self.jobs == Some(0) {
            out.push("jobs must be at least 1".into());
        }
        let i = &self.integrator;
        if i.max_step_us.is_some_and(|s| !(s > 0.0)) {
            out.push("integrator: max_step_us must be > 0".into());
        }
        out
    }

    /// Base parameters in rad/s, with any relative detuning applied.
    pub fn system_params(&self) -> Result<SystemParams> {
        let p = &self.params;
        let drive = match (p.drive_hz, p.alpha) {
            (Some(d), _) => TAU * d,
            (None, Some(a)) => TAU * p.kerr_hz * a * a,
            (None, None) => TAU * REFERENCE_DRIVE_HZ,
        };
        let mut params = SystemParams {
            delta: TAU * p.delta_hz.unwrap_or(0.0),
            kerr: TAU * p.kerr_hz,
            drive,
            kappa: TAU * p.kappa_hz,
            kappa_phi: TAU * p.kappa_phi_hz,
        };
        params.validate()?;
        if let Some(rel) = p.detuning_rel {
            params.delta = rel * lep_detuning(&params)?;
        }
        Ok(params)
    }

    /// Fill unset grid fields with the experiment's defaults, in the same
    /// form the defaults are defined in, so the echo reproduces the run.
    pub fn resolve(mut self, experiment: Experiment) -> Self {
        if self.params.alpha.is_none() {
            self.params.drive_hz.get_or_insert(REFERENCE_DRIVE_HZ);
        }
        let g = &mut self.grids;
        if g.detunings_rel.is_none() && g.detunings_khz.is_none() && g.delta_max_rel.is_none() && g.delta_points.is_none() {
            match experiment.default_deltas() {
                Some(DeltaGrid::Relative(v)) => g.detunings_rel = Some(v),
                Some(DeltaGrid::Symmetric { max_rel, points }) => {
                    g.delta_max_rel = Some(max_rel);
                    g.delta_points = Some(points);
                }
                None => {}
            }
        }
        if g.delta_max_rel.is_some() || g.delta_points.is_some() {
            let (max_rel, points) = match experiment.default_deltas() {
                Some(DeltaGrid::Symmetric { max_rel, points }) => (max_rel, points),
                _ => (FALLBACK_DELTA_MAX_REL, FALLBACK_DELTA_POINTS),
            };
            g.delta_max_rel.get_or_insert(max_rel);
            g.delta_points.get_or_insert(points);
        }
        if let Some(samples) = experiment.default_samples() {
            g.samples.get_or_insert(samples);
            if g.window_us.is_none() {
                g.window_alpha2_kappa.get_or_insert(DEFAULT_WINDOW);
            }
        }
        if matches!(experiment, Experiment::Snapshots | Experiment::Wigner) {
            g.wigner_points.get_or_insert(WignerGridSpec::DEFAULT_POINTS);
        }
        self
    }

    pub fn controls(&self) -> IntegratorControls {
        let i = &self.integrator;
        IntegratorControls {
            rtol: i.rtol,
            atol: i.atol,
            max_step: i.max_step_us.map(|s| s * 1e-6),
            max_time: i.max_time_us * 1e-6,
            ..IntegratorControls::default()
        }
    }

    /// The sweep this (resolved) configuration describes.
    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let base = self.system_params()?;
        let mut spec = SweepSpec::new(base);
        spec.dim = self.dim;
        spec.controls = self.controls();
        spec.output_dir = self.output_dir.clone();
        let g = &self.grids;
        if let Some(v) = &g.detunings_rel {
            spec.deltas = spec.resolve_deltas(&DeltaGrid::Relative(v.clone()))?;
        } else if let Some(v) = &g.detunings_khz {
            spec.deltas = v.iter().map(|k| TAU * k * 1e3).collect();
        } else if let (Some(max_rel), Some(points)) = (g.delta_max_rel, g.delta_points) {
            spec.deltas = spec.resolve_deltas(&DeltaGrid::Symmetric { max_rel, points })?;
        }
        if let Some(a) = &g.alphas {
            spec.alphas = a.clone();
        }
        if let Some(samples) = g.samples {
            spec.times = match (g.window_us, g.window_alpha2_kappa) {
                (Some(us), _) => kerrcat::experiments::linspace(0.0, us * 1e-6, samples),
                (None, w) => spec.resolve_times(w.unwrap_or(DEFAULT_WINDOW), samples),
            };
        }
        if let Some(n) = g.wigner_points {
            spec.wigner_points = n;
        }
        Ok(spec)
    }

    pub fn initial_state(&self) -> Option<InitialState> {
        match self.wigner.state {
            WignerState::CoherentPlus => Some(InitialState::CoherentPlus),
            WignerState::CatPlus => Some(InitialState::CatPlus),
            WignerState::CatMinus => Some(InitialState::CatMinus),
            WignerState::YPlus => Some(InitialState::YPlus),
            WignerState::Steady | WignerState::Evolved => None,
        }
    }
}
