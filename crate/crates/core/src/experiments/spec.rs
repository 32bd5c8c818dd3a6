use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::TruncatedSpace;
use crate::lindblad::IntegratorControls;
use crate::liouville::{lep_detuning, SystemParams};
use crate::observables::WignerGridSpec;

/// Which dataset a spec is for; selects the default grids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Spectrum,
    Dynamics,
    PhaseDiff,
    Snapshots,
    FidelityMap,
    SteadyState,
    Wigner,
}

impl Experiment {
    pub fn default_deltas(self) -> Option<DeltaGrid> {
        match self {
            Experiment::Spectrum => Some(DeltaGrid::Symmetric { max_rel: 2.0, points: 201 }),
            Experiment::Dynamics => Some(DeltaGrid::Relative(vec![0.25, 0.5, 1.0, 2.0, 3.0])),
            Experiment::PhaseDiff => Some(DeltaGrid::Symmetric { max_rel: 2.0, points: 401 }),
            Experiment::Snapshots => Some(DeltaGrid::Relative(vec![0.5, 3.0])),
            Experiment::FidelityMap => Some(DeltaGrid::Symmetric { max_rel: 3.0, points: 25 }),
            Experiment::SteadyState | Experiment::Wigner => None,
        }
    }

    /// Samples over [0, [`DEFAULT_WINDOW`]/(α²κ)]. Snapshots use 401 so
    /// that six evenly spaced snapshots fall on grid points.
    pub fn default_samples(self) -> Option<usize> {
        match self {
            Experiment::Dynamics => Some(400),
            Experiment::Snapshots => Some(401),
            Experiment::FidelityMap => Some(50),
            _ => None,
        }
    }
}

/// Observation window in units of 1/(α²κ).
pub const DEFAULT_WINDOW: f64 = 4.0;

/// A detuning grid in units of Δ_LEP2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaGrid {
    /// Explicit values.
    Relative(Vec<f64>),
    /// `points` values evenly spread over [−max_rel, max_rel].
    Symmetric { max_rel: f64, points: usize },
}

impl DeltaGrid {
    pub fn relative_values(&self) -> Vec<f64> {
        match self {
            DeltaGrid::Relative(v) => v.clone(),
            DeltaGrid::Symmetric { max_rel, points } => linspace(-max_rel, *max_rel, *points),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grid {
    Delta,
    Alpha,
    Time,
}

/// Grids and settings for one sweep. Detunings in rad/s, times in s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: SystemParams,
    pub deltas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub times: Vec<f64>,
    pub dim: usize,
    pub controls: IntegratorControls,
    /// Points per quadrature for Wigner grids spanning ±(α + 4).
    pub wigner_points: usize,
    pub output_dir: PathBuf,
}

impl SweepSpec {
    /// Empty grids, dim 30, default integrator controls.
    pub fn new(base: SystemParams) -> Self {
        Self {
            base,
            deltas: Vec::new(),
            alphas: Vec::new(),
            times: Vec::new(),
            dim: TruncatedSpace::DEFAULT_DIM,
            controls: IntegratorControls::default(),
            wigner_points: WignerGridSpec::DEFAULT_POINTS,
            output_dir: PathBuf::from("out"),
        }
    }

    pub fn alpha(&self) -> f64 {
        self.base.alpha()
    }

    /// Δ_LEP2 of the base parameters, rad/s.
    pub fn lep(&self) -> Result<f64> {
        lep_detuning(&self.base)
    }

    /// 4/(α²κ), the default observation window.
    pub fn window(&self) -> f64 {
        4.0 / (self.alpha().powi(2) * self.base.kappa)
    }

    pub fn space(&self) -> Result<TruncatedSpace> {
        TruncatedSpace::new(self.dim)
    }

    pub fn wigner_spec(&self) -> WignerGridSpec {
        WignerGridSpec::square(self.alpha() + WignerGridSpec::DEFAULT_MARGIN, self.wigner_points)
    }

    /// Δ grid in units of Δ_LEP2 of the base parameters.
    pub fn resolve_deltas(&self, grid: &DeltaGrid) -> Result<Vec<f64>> {
        let lep = self.lep()?;
        Ok(grid.relative_values().into_iter().map(|r| r * lep).collect())
    }

    /// `samples` points over [0, window·/(α²κ)].
    pub fn resolve_times(&self, window: f64, samples: usize) -> Vec<f64> {
        linspace(0.0, window / (self.alpha().powi(2) * self.base.kappa), samples)
    }

    /// Fill every empty grid with the experiment's default.
    pub fn with_defaults(mut self, experiment: Experiment) -> Result<Self> {
        self.base.validate()?;
        if self.deltas.is_empty() {
            if let Some(grid) = experiment.default_deltas() {
                self.deltas = self.resolve_deltas(&grid)?;
            }
        }
        if self.times.is_empty() {
            if let Some(samples) = experiment.default_samples() {
                self.times = self.resolve_times(DEFAULT_WINDOW, samples);
            }
        }
        if self.alphas.is_empty() && experiment == Experiment::Spectrum {
            self.alphas = vec![self.alpha()];
        }
        Ok(self)
    }

    /// Every violated invariant. `needs` lists grids that must be non-empty.
    pub fn violations(&self, needs: &[Grid]) -> Vec<String> {
        let mut out: Vec<String> = self.base.violations();
        out.extend(self.controls.violations());
        if self.dim < 2 {
            out.push(format!("dim must be at least 2 (got {})", self.dim));
        }
        if self.wigner_points < 2 {
            out.push(format!("wigner_points must be at least 2 (got {})", self.wigner_points));
        }
        for (grid, name, values) in [
            (Grid::Delta, "deltas", &self.deltas),
            (Grid::Alpha, "alphas", &self.alphas),
            (Grid::Time, "times", &self.times),
        ] {
            if values.is_empty() {
                if needs.contains(&grid) {
                    out.push(format!("{name} grid is empty"));
                }
                continue;
            }
            if values.iter().any(|v| !v.is_finite()) {
                out.push(format!("{name} grid has non-finite entries"));
            } else if values.windows(2).any(|w| !(w[1] > w[0])) {
                out.push(format!("{name} grid is not strictly increasing"));
            }
        }
        if self.alphas.iter().any(|&a| !(a > 0.0)) {
            out.push("alphas must be > 0".into());
        }
        if self.times.first().is_some_and(|&t| t < 0.0) {
            out.push("times must start at or after 0".into());
        }
        out
    }

    pub fn validate(&self, needs: &[Grid]) -> Result<()> {
        let v = self.violations(needs);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSweep(v))
        }
    }
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Run `f` on a rayon pool capped at `jobs` threads (all cores if `None`).
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Error::InvalidParams(vec!["jobs must be at least 1".into()]));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::NumericFailure(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
