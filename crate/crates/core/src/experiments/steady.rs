use crate::error::Result;
use crate::lindblad::steady_state;
use crate::liouville::{closed_form_spectrum, CatBasisParams};
use crate::observables::{fock_fidelity, CatBasis, QubitDensityMatrix};

use super::output::{fmt_num, provenance, Table};
use super::spec::SweepSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct SteadyStateReport {
    /// max|L(ρ)|, rad/s.
    pub residual: f64,
    pub leakage: f64,
    /// ⟨C⁺|ρ|C⁺⟩, ⟨C⁻|ρ|C⁻⟩ after renormalization.
    pub weights: (f64, f64),
    /// |⟨C⁺|ρ|C⁻⟩| after renormalization.
    pub coherence: f64,
    /// Closed-form p^{∓2}/(p² + p^{−2}).
    pub closed_form_weights: (f64, f64),
    /// Fidelity with the closed-form mixture embedded in Fock space.
    pub fidelity: f64,
    pub populations: Vec<f64>,
}

/// Full-model steady state compared with the closed-form mixture.
pub fn steady_state_report(spec: &SweepSpec) -> Result<SteadyStateReport> {
    spec.validate(&[])?;
    let space = spec.space()?;
    let ss = steady_state(&spec.base, space, &spec.controls)?;
    let cat = CatBasisParams::new(&spec.base);
    let basis = CatBasis::from_cat(&cat, space)?;
    let p = basis.project(&ss.state)?;
    let closed = QubitDensityMatrix::new(closed_form_spectrum(&spec.base).rho_ss)?;
    let fidelity = fock_fidelity(&ss.state, &basis.embed(&closed)?)?;
    let m = p.qubit.matrix();
    let c = closed.matrix();
    Ok(SteadyStateReport {
        residual: ss.residual,
        leakage: p.leakage,
        weights: (m[(0, 0)].re, m[(1, 1)].re),
        coherence: m[(0, 1)].norm(),
        closed_form_weights: (c[(0, 0)].re, c[(1, 1)].re),
        fidelity,
        populations: (0..space.dim()).map(|n| ss.state.matrix()[(n, n)].re).collect(),
    })
}

impl SteadyStateReport {
    pub fn tables(&self, spec: &SweepSpec) -> Vec<Table> {
        let mut s = Table::new(
            "steady_state",
            provenance("steady_state", &spec.base, Some(spec.dim)),
            &[
                "residual_rad_per_s", "leakage", "weight_plus", "weight_minus", "coherence", "closed_weight_plus",
                "closed_weight_minus", "fidelity",
            ],
        );
        s.push(vec![
            fmt_num(self.residual),
            fmt_num(self.leakage),
            fmt_num(self.weights.0),
            fmt_num(self.weights.1),
            fmt_num(self.coherence),
            fmt_num(self.closed_form_weights.0),
            fmt_num(self.closed_form_weights.1),
            fmt_num(self.fidelity),
        ]);
        let mut pops = Table::new(
            "steady_state_fock",
            provenance("steady_state_fock", &spec.base, Some(spec.dim)),
            &["n", "population"],
        );
        for (n, p) in self.populations.iter().enumerate() {
            pops.push(vec![n.to_string(), fmt_num(*p)]);
        }
        vec![s, pops]
    }
}
