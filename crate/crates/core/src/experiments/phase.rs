use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::liouville::{numeric_spectrum, EffectiveLiouvillian};
use crate::observables::phase_difference;

use super::output::{fmt_num, provenance, Table};
use super::spec::{Grid, SweepSpec};
use super::to_khz;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseRow {
    pub delta: f64,
    pub delta_rel: f64,
    /// φ(ρ₃), or `None` where the coherence vanishes.
    pub phi3: Option<f64>,
    pub phi4: Option<f64>,
    pub at_ep: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSweep {
    pub rows: Vec<PhaseRow>,
}

/// φ of the coherence eigenmatrices of the numeric spectrum across Δ.
/// On the exceptional point both columns use the merged eigenmatrix.
pub fn phase_diff_sweep(spec: &SweepSpec) -> Result<PhaseSweep> {
    spec.validate(&[Grid::Delta])?;
    let lep = spec.lep()?;
    let rows = spec
        .deltas
        .par_iter()
        .map(|&delta| {
            let s = numeric_spectrum(&EffectiveLiouvillian::new(&spec.base.with_delta(delta)))?;
            let phi = |m| match phase_difference(m) {
                Ok(v) => Ok(Some(v)),
                Err(Error::UndefinedPhase(_)) => Ok(None),
                Err(e) => Err(e),
            };
            Ok(PhaseRow { delta, delta_rel: delta / lep, phi3: phi(&s.rho3)?, phi4: phi(&s.rho4)?, at_ep: s.at_ep })
        })
        .collect::<Result<_>>()?;
    Ok(PhaseSweep { rows })
}

impl PhaseSweep {
    pub fn tables(&self, spec: &SweepSpec) -> Vec<Table> {
        let mut t = Table::new(
            "phase_diff",
            provenance("phase_diff", &spec.base, None),
            &["delta_khz", "delta_rel", "phi_rho3", "phi_rho4", "status", "at_ep"],
        );
        for r in &self.rows {
            let status = if r.phi3.is_some() && r.phi4.is_some() { "ok" } else { "undefined" };
            t.push(vec![
                fmt_num(to_khz(r.delta)),
                fmt_num(r.delta_rel),
                fmt_num(r.phi3.unwrap_or(f64::NAN)),
                fmt_num(r.phi4.unwrap_or(f64::NAN)),
                status.into(),
                r.at_ep.to_string(),
            ]);
        }
        vec![t]
    }
}
