use rayon::prelude::*;

use crate::error::Result;
use crate::liouville::{effective_evolve, initial_qubit_state, CatBasisParams, InitialState};
use crate::observables::{fock_fidelity, CatBasis};

use super::dynamics::full_trajectory;
use super::output::{fmt_num, provenance, Table};
use super::spec::{Grid, SweepSpec};
use super::{to_khz, to_us};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityRow {
    pub delta: f64,
    pub delta_rel: f64,
    pub time: f64,
    /// F(ρ_full, ρ_eff) in the full Fock space.
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelityMap {
    pub rows: Vec<FidelityRow>,
}

/// Uhlmann fidelity between the full state and the effective state
/// embedded through the cat vectors, over Δ × t, both from |α⟩.
pub fn fidelity_map(spec: &SweepSpec) -> Result<FidelityMap> {
    spec.validate(&[Grid::Delta, Grid::Time])?;
    let space = spec.space()?;
    let lep = spec.lep()?;
    let cat = CatBasisParams::new(&spec.base);
    let basis = CatBasis::from_cat(&cat, space)?;
    let rho0 = initial_qubit_state(InitialState::CoherentPlus, &cat);
    let per_delta: Vec<Vec<FidelityRow>> = spec
        .deltas
        .par_iter()
        .map(|&delta| {
            let params = spec.base.with_delta(delta);
            let eff = effective_evolve(&rho0, &params, &spec.times)?;
            let full = full_trajectory(&params, space, &spec.times, &spec.controls)?;
            eff.iter()
                .zip(&full)
                .zip(&spec.times)
                .map(|((q, rho), &time)| {
                    let embedded = basis.embed(q)?;
                    Ok(FidelityRow { delta, delta_rel: delta / lep, time, fidelity: fock_fidelity(rho, &embedded)? })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(FidelityMap { rows: per_delta.into_iter().flatten().collect() })
}

impl FidelityMap {
    pub fn min(&self) -> f64 {
        self.rows.iter().map(|r| r.fidelity).fold(f64::INFINITY, f64::min)
    }

    pub fn tables(&self, spec: &SweepSpec) -> Vec<Table> {
        let mut t = Table::new(
            "fidelity_map",
            provenance("fidelity_map", &spec.base, Some(spec.dim)),
            &["delta_khz", "delta_rel", "t_us", "fidelity"],
        );
        for r in &self.rows {
            t.push(vec![fmt_num(to_khz(r.delta)), fmt_num(r.delta_rel), fmt_num(to_us(r.time)), fmt_num(r.fidelity)]);
        }
        vec![t]
    }
}
