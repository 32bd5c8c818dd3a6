use rayon::prelude::*;

use crate::error::Result;
use crate::fock::{coherent_state, FockDensityMatrix, TruncatedSpace};
use crate::lindblad::{evolve, propagate_uniform, IntegratorControls};
use crate::liouville::{effective_evolve, initial_qubit_state, CatBasisParams, InitialState, SystemParams};
use crate::observables::{BlochVector, CatBasis};
use crate::C64;

use super::output::{fmt_num, provenance, Table};
use super::spec::{Grid, SweepSpec};
use super::{to_khz, to_us};

/// |⟨X⟩| level used for the convergence time.
pub const SETTLE_THRESHOLD: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Effective,
    Full,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Effective => "effective",
            Source::Full => "full",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicsRow {
    pub source: Source,
    pub delta: f64,
    pub delta_rel: f64,
    pub time: f64,
    pub bloch: BlochVector,
    /// Weight outside the cat subspace; zero for the effective model.
    pub leakage: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicsSummary {
    pub source: Source,
    pub delta: f64,
    pub delta_rel: f64,
    /// Sign changes of ⟨X⟩ over the window.
    pub crossings: usize,
    /// Time after which |⟨X⟩| stays below [`SETTLE_THRESHOLD`].
    pub settle_time: Option<f64>,
    /// At least two sign changes of ⟨X⟩.
    pub oscillating: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicsSweep {
    pub rows: Vec<DynamicsRow>,
    pub summaries: Vec<DynamicsSummary>,
}

/// Sign changes in a sequence, skipping exact zeros.
pub fn zero_crossings(values: &[f64]) -> usize {
    let mut last = 0.0_f64;
    let mut count = 0;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

/// First sample time after which |v| < `threshold` for the rest of the
/// series; `None` if the last sample is still above it.
pub fn settle_time(times: &[f64], values: &[f64], threshold: f64) -> Option<f64> {
    let last_above = values.iter().rposition(|v| v.abs() >= threshold);
    match last_above {
        None => times.first().copied(),
        Some(k) if k + 1 < times.len() => Some(times[k + 1]),
        Some(_) => None,
    }
}

fn uniform_step(times: &[f64]) -> Option<f64> {
    if times.first() != Some(&0.0) {
        return None;
    }
    if times.len() == 1 {
        return Some(1.0);
    }
    let dt = times[times.len() - 1] / (times.len() - 1) as f64;
    let uniform = times.iter().enumerate().all(|(k, &t)| (t - dt * k as f64).abs() <= 1e-9 * dt);
    uniform.then_some(dt)
}

/// Full master-equation states from |α⟩ at `times`.
///
/// Uniform grids starting at zero use the exact parity-block propagator;
/// anything else goes through the adaptive integrator.
pub fn full_trajectory(
    params: &SystemParams,
    space: TruncatedSpace,
    times: &[f64],
    controls: &IntegratorControls,
) -> Result<Vec<FockDensityMatrix>> {
    let psi = coherent_state(C64::new(params.alpha(), 0.0), space)?;
    let rho0 = FockDensityMatrix::from_pure(space, &psi)?;
    let samples = match uniform_step(times) {
        Some(dt) => propagate_uniform(&rho0, params, dt, times.len())?,
        None => evolve(&rho0, params, times, controls)?,
    };
    Ok(samples.into_iter().map(|s| s.state).collect())
}

fn summarize(source: Source, delta: f64, delta_rel: f64, times: &[f64], rows: &[DynamicsRow]) -> DynamicsSummary {
    let xs: Vec<f64> = rows.iter().map(|r| r.bloch.x).collect();
    let crossings = zero_crossings(&xs);
    DynamicsSummary {
        source,
        delta,
        delta_rel,
        crossings,
        settle_time: settle_time(times, &xs, SETTLE_THRESHOLD),
        oscillating: crossings >= 2,
    }
}

/// ⟨X⟩, ⟨Y⟩, ⟨Z⟩ and leakage from |α⟩ under both models, per Δ.
pub fn dynamics_sweep(spec: &SweepSpec) -> Result<DynamicsSweep> {
    spec.validate(&[Grid::Delta, Grid::Time])?;
    let space = spec.space()?;
    let lep = spec.lep()?;
    let cat = CatBasisParams::new(&spec.base);
    let basis = CatBasis::from_cat(&cat, space)?;
    let rho0 = initial_qubit_state(InitialState::CoherentPlus, &cat);
    let per_delta: Vec<(Vec<DynamicsRow>, Vec<DynamicsSummary>)> = spec
        .deltas
        .par_iter()
        .map(|&delta| {
            let params = spec.base.with_delta(delta);
            let rel = delta / lep;
            let eff: Vec<DynamicsRow> = effective_evolve(&rho0, &params, &spec.times)?
                .iter()
                .zip(&spec.times)
                .map(|(q, &time)| DynamicsRow {
                    source: Source::Effective,
                    delta,
                    delta_rel: rel,
                    time,
                    bloch: q.bloch(),
                    leakage: 0.0,
                })
                .collect();
            let full = full_trajectory(&params, space, &spec.times, &spec.controls)?
                .iter()
                .zip(&spec.times)
                .map(|(rho, &time)| {
                    let p = basis.project(rho)?;
                    Ok(DynamicsRow {
                        source: Source::Full,
                        delta,
                        delta_rel: rel,
                        time,
                        bloch: p.qubit.bloch(),
                        leakage: p.leakage,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let summaries = vec![
                summarize(Source::Effective, delta, rel, &spec.times, &eff),
                summarize(Source::Full, delta, rel, &spec.times, &full),
            ];
            Ok((eff.into_iter().chain(full).collect(), summaries))
        })
        .collect::<Result<_>>()?;
    let (rows, summaries): (Vec<_>, Vec<_>) = per_delta.into_iter().unzip();
    Ok(DynamicsSweep {
        rows: rows.into_iter().flatten().collect(),
        summaries: summaries.into_iter().flatten().collect(),
    })
}

impl DynamicsSweep {
    pub fn rows_for(&self, source: Source, delta: f64) -> Vec<&DynamicsRow> {
        self.rows.iter().filter(|r| r.source == source && r.delta == delta).collect()
    }

    pub fn summary(&self, source: Source, delta: f64) -> Option<&DynamicsSummary> {
        self.summaries.iter().find(|s| s.source == source && s.delta == delta)
    }

    pub fn tables(&self, spec: &SweepSpec) -> Vec<Table> {
        let mut t = Table::new(
            "dynamics",
            provenance("dynamics", &spec.base, Some(spec.dim)),
            &["source", "delta_khz", "delta_rel", "t_us", "x", "y", "z", "leakage"],
        );
        for r in &self.rows {
            t.push(vec![
                r.source.name().into(),
                fmt_num(to_khz(r.delta)),
                fmt_num(r.delta_rel),
                fmt_num(to_us(r.time)),
                fmt_num(r.bloch.x),
                fmt_num(r.bloch.y),
                fmt_num(r.bloch.z),
                fmt_num(r.leakage),
            ]);
        }
        let mut s = Table::new(
            "dynamics_summary",
            provenance("dynamics_summary", &spec.base, Some(spec.dim)),
            &["source", "delta_khz", "delta_rel", "x_crossings", "settle_time_us", "oscillating"],
        );
        for m in &self.summaries {
            s.push(vec![
                m.source.name().into(),
                fmt_num(to_khz(m.delta)),
                fmt_num(m.delta_rel),
                m.crossings.to_string(),
                fmt_num(m.settle_time.map(to_us).unwrap_or(f64::NAN)),
                m.oscillating.to_string(),
            ]);
        }
        vec![t, s]
    }
}
