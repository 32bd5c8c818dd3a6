use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fock::{coherent_state, FockDensityMatrix};
use crate::lindblad::steady_state;
use crate::liouville::{effective_evolve, initial_qubit_state, CatBasisParams, InitialState};
use crate::observables::{wigner, CatBasis, WignerGrid};
use crate::C64;

use super::dynamics::{full_trajectory, DynamicsRow, Source};
use super::output::{fmt_num, provenance, Table};
use super::spec::{Grid, SweepSpec};
use super::{to_khz, to_us};

/// Snapshots per detuning, evenly spaced over the time grid.
pub const SNAPSHOTS_PER_DELTA: usize = 6;
/// Expected bound on |⟨Z⟩| along a trajectory; exceeding it only warns.
pub const Z_BOUND: f64 = 0.02;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub delta: f64,
    pub delta_rel: f64,
    pub time: f64,
    pub grid: WignerGrid,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotBundle {
    /// Bloch trajectories from both models.
    pub trajectories: Vec<DynamicsRow>,
    pub snapshots: Vec<Snapshot>,
}

/// Indices of `count` samples evenly spread over `n` (both ends included).
fn snapshot_indices(n: usize, count: usize) -> Vec<usize> {
    if n <= count {
        return (0..n).collect();
    }
    (0..count).map(|k| ((k * (n - 1)) as f64 / (count - 1) as f64).round() as usize).collect()
}

/// Bloch trajectories and Wigner grids of the full state at
/// [`SNAPSHOTS_PER_DELTA`] evenly spaced times, per Δ.
pub fn bloch_wigner_snapshots(spec: &SweepSpec) -> Result<SnapshotBundle> {
    spec.validate(&[Grid::Delta, Grid::Time])?;
    let space = spec.space()?;
    let lep = spec.lep()?;
    let cat = CatBasisParams::new(&spec.base);
    let basis = CatBasis::from_cat(&cat, space)?;
    let rho0 = initial_qubit_state(InitialState::CoherentPlus, &cat);
    let grid_spec = spec.wigner_spec();
    let picks = snapshot_indices(spec.times.len(), SNAPSHOTS_PER_DELTA);
    let per_delta: Vec<(Vec<DynamicsRow>, Vec<Snapshot>)> = spec
        .deltas
        .iter()
        .map(|&delta| {
            let params = spec.base.with_delta(delta);
            let rel = delta / lep;
            let mut rows = Vec::with_capacity(2 * spec.times.len());
            for (q, &time) in effective_evolve(&rho0, &params, &spec.times)?.iter().zip(&spec.times) {
                rows.push(DynamicsRow {
                    source: Source::Effective,
                    delta,
                    delta_rel: rel,
                    time,
                    bloch: q.bloch(),
                    leakage: 0.0,
                });
            }
            let states = full_trajectory(&params, space, &spec.times, &spec.controls)?;
            for (rho, &time) in states.iter().zip(&spec.times) {
                let p = basis.project(rho)?;
                rows.push(DynamicsRow {
                    source: Source::Full,
                    delta,
                    delta_rel: rel,
                    time,
                    bloch: p.qubit.bloch(),
                    leakage: p.leakage,
                });
            }
            // grid rows are already parallel inside `wigner`
            let snapshots = picks
                .iter()
                .map(|&k| {
                    Ok(Snapshot { delta, delta_rel: rel, time: spec.times[k], grid: wigner(&states[k], &grid_spec)? })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((rows, snapshots))
        })
        .collect::<Result<_>>()?;
    let (rows, snaps): (Vec<_>, Vec<_>) = per_delta.into_iter().unzip();
    let bundle =
        SnapshotBundle { trajectories: rows.into_iter().flatten().collect(), snapshots: snaps.into_iter().flatten().collect() };
    for source in [Source::Effective, Source::Full] {
        let z = bundle.max_abs_z(source);
        if z >= Z_BOUND {
            warn!("{} trajectory reaches |<Z>| = {z:.4}, above {Z_BOUND}", source.name());
        }
    }
    Ok(bundle)
}

impl SnapshotBundle {
    pub fn max_abs_z(&self, source: Source) -> f64 {
        self.trajectories.iter().filter(|r| r.source == source).map(|r| r.bloch.z.abs()).fold(0.0, f64::max)
    }

    /// Trajectory and index tables plus one Wigner CSV per snapshot.
    pub fn outputs(&self, spec: &SweepSpec) -> Result<(Vec<Table>, Vec<(String, Vec<u8>)>)> {
        let mut traj = Table::new(
            "snapshots_trajectory",
            provenance("snapshots_trajectory", &spec.base, Some(spec.dim)),
            &["source", "delta_khz", "delta_rel", "t_us", "x", "y", "z", "leakage"],
        );
        for r in &self.trajectories {
            traj.push(vec![
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
        let mut index = Table::new(
            "snapshots_index",
            provenance("snapshots_index", &spec.base, Some(spec.dim)),
            &["file", "delta_khz", "delta_rel", "t_us", "w_min", "w_max", "normalization", "truncation_warning"],
        );
        let mut files = Vec::new();
        let deltas: Vec<f64> = {
            let mut d: Vec<f64> = self.snapshots.iter().map(|s| s.delta).collect();
            d.dedup();
            d
        };
        for s in &self.snapshots {
            let di = deltas.iter().position(|&d| d == s.delta).unwrap_or(0);
            let k = self.snapshots.iter().filter(|o| o.delta == s.delta && o.time < s.time).count();
            let name = format!("wigner_d{di}_s{k}.csv");
            let mut header = provenance("wigner_snapshot", &spec.base.with_delta(s.delta), Some(spec.dim));
            header.push(format!("t_us: {}", fmt_num(to_us(s.time))));
            let mut bytes = Vec::new();
            s.grid.write_csv(&mut bytes, &header)?;
            files.push((name.clone(), bytes));
            index.push(vec![
                name,
                fmt_num(to_khz(s.delta)),
                fmt_num(s.delta_rel),
                fmt_num(to_us(s.time)),
                fmt_num(s.grid.min()),
                fmt_num(s.grid.max()),
                fmt_num(s.grid.normalization()),
                s.grid.truncation_warning.to_string(),
            ]);
        }
        Ok((vec![traj, index], files))
    }
}

/// State whose Wigner function the `wigner` command evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum WignerTarget {
    /// Full-model steady state at the base parameters.
    Steady,
    /// A named cat-qubit state embedded in Fock space.
    Initial { state: InitialState },
    /// Full-model state at `time` seconds, starting from |α⟩.
    Evolved { time: f64 },
}

pub fn wigner_of(spec: &SweepSpec, target: WignerTarget) -> Result<(FockDensityMatrix, WignerGrid)> {
    spec.validate(&[])?;
    let space = spec.space()?;
    let cat = CatBasisParams::new(&spec.base);
    let rho = match target {
        WignerTarget::Steady => steady_state(&spec.base, space, &spec.controls)?.state,
        WignerTarget::Initial { state: InitialState::CoherentPlus } => {
            FockDensityMatrix::from_pure(space, &coherent_state(C64::new(cat.alpha, 0.0), space)?)?
        }
        WignerTarget::Initial { state } => CatBasis::from_cat(&cat, space)?.embed(&initial_qubit_state(state, &cat))?,
        WignerTarget::Evolved { time } => {
            let mut states = full_trajectory(&spec.base, space, &[0.0, time], &spec.controls)?;
            states.pop().expect("two samples")
        }
    };
    let grid = wigner(&rho, &spec.wigner_spec())?;
    Ok((rho, grid))
}
