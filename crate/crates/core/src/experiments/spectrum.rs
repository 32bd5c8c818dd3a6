use rayon::prelude::*;

use crate::error::Result;
use crate::liouville::{
    is_at_ep, lep_curve, lep_detuning_for, numeric_spectrum, EffectiveLiouvillian, LiouvillianSpectrum,
};
use crate::C64;

use super::output::{fmt_num, provenance, Table};
use super::spec::{linspace, Grid, SweepSpec};
use super::to_khz;

/// Which side of the exceptional point a detuning lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DampingRegime {
    /// |Δ| < Δ_LEP2: all eigenvalues real.
    Overdamped,
    Exceptional,
    /// |Δ| > Δ_LEP2: one complex-conjugate pair.
    Underdamped,
}

impl DampingRegime {
    pub fn name(self) -> &'static str {
        match self {
            DampingRegime::Overdamped => "overdamped",
            DampingRegime::Exceptional => "ep",
            DampingRegime::Underdamped => "underdamped",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumRow {
    pub alpha: f64,
    pub delta: f64,
    pub delta_rel: f64,
    /// E₁..E₄ after continuity matching along the Δ grid, rad/s.
    pub eigenvalues: [C64; 4],
    pub regime: DampingRegime,
    pub delta_lep2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LepPoint {
    pub alpha: f64,
    pub delta_lep2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSweep {
    pub rows: Vec<SpectrumRow>,
    pub lep_curve: Vec<LepPoint>,
}

/// Numeric 4×4 spectrum over Δ × α, with branches followed by minimum
/// eigenvalue displacement from one Δ to the next.
///
/// The LEP curve uses the α grid when it has at least two points and
/// 81 points over α ∈ [0.5, 2.5] otherwise.
pub fn spectrum_sweep(spec: &SweepSpec) -> Result<SpectrumSweep> {
    spec.validate(&[Grid::Delta, Grid::Alpha])?;
    let kappa = spec.base.kappa;
    let per_alpha: Vec<Vec<SpectrumRow>> = spec
        .alphas
        .par_iter()
        .map(|&alpha| {
            let lep = lep_detuning_for(alpha, kappa)?;
            let base = spec.base.with_alpha(alpha);
            let mut prev: Option<LiouvillianSpectrum> = None;
            let mut rows = Vec::with_capacity(spec.deltas.len());
            for &delta in &spec.deltas {
                let params = base.with_delta(delta);
                let mut s = numeric_spectrum(&EffectiveLiouvillian::new(&params))?;
                if let Some(p) = &prev {
                    s = s.relabel_to(p);
                }
                let regime = if is_at_ep(&params) {
                    DampingRegime::Exceptional
                } else if delta.abs() < lep {
                    DampingRegime::Overdamped
                } else {
                    DampingRegime::Underdamped
                };
                rows.push(SpectrumRow {
                    alpha,
                    delta,
                    delta_rel: delta / lep,
                    eigenvalues: s.eigenvalues(),
                    regime,
                    delta_lep2: lep,
                });
                prev = Some(s);
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let curve_alphas = if spec.alphas.len() >= 2 { spec.alphas.clone() } else { linspace(0.5, 2.5, 81) };
    let lep_curve = lep_curve(&curve_alphas, kappa)?
        .into_iter()
        .map(|(alpha, delta_lep2)| LepPoint { alpha, delta_lep2 })
        .collect();
    Ok(SpectrumSweep { rows: per_alpha.into_iter().flatten().collect(), lep_curve })
}

impl SpectrumSweep {
    pub fn tables(&self, spec: &SweepSpec) -> Vec<Table> {
        let mut spectrum = Table::new(
            "spectrum",
            provenance("spectrum", &spec.base, None),
            &[
                "alpha", "delta_khz", "delta_rel", "re_e1_khz", "re_e2_khz", "re_e3_khz", "re_e4_khz", "im_e1_khz",
                "im_e2_khz", "im_e3_khz", "im_e4_khz", "regime", "delta_lep2_khz",
            ],
        );
        for r in &self.rows {
            let mut row = vec![fmt_num(r.alpha), fmt_num(to_khz(r.delta)), fmt_num(r.delta_rel)];
            row.extend(r.eigenvalues.iter().map(|e| fmt_num(to_khz(e.re))));
            row.extend(r.eigenvalues.iter().map(|e| fmt_num(to_khz(e.im))));
            row.push(r.regime.name().into());
            row.push(fmt_num(to_khz(r.delta_lep2)));
            spectrum.push(row);
        }
        let mut curve = Table::new("lep_curve", provenance("lep_curve", &spec.base, None), &["alpha", "delta_lep2_khz"]);
        for p in &self.lep_curve {
            curve.push(vec![fmt_num(p.alpha), fmt_num(to_khz(p.delta_lep2))]);
        }
        vec![spectrum, curve]
    }
}
