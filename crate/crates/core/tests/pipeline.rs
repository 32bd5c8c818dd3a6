use kerrcat::experiments::{
    phase_diff_sweep, spectrum_sweep, steady_state_report, wigner_of, write_bundle, DampingRegime, DeltaGrid,
    Experiment, SweepSpec, WignerTarget,
};
use kerrcat::fock::TruncatedSpace;
use kerrcat::lindblad::{steady_state, IntegratorControls};
use kerrcat::liouville::{InitialState, SystemParams};
use kerrcat::observables::{trace_distance, wigner, WignerGridSpec};

fn spec_for(experiment: Experiment) -> SweepSpec {
    SweepSpec::new(SystemParams::reference()).with_defaults(experiment).unwrap()
}

#[test]
fn spectrum_sweep_is_deterministic_and_classified() {
    let mut spec = spec_for(Experiment::Spectrum);
    spec.deltas = spec.resolve_deltas(&DeltaGrid::Symmetric { max_rel: 2.0, points: 41 }).unwrap();
    let a = spectrum_sweep(&spec).unwrap();
    let b = spectrum_sweep(&spec).unwrap();
    assert_eq!(a, b);
    for row in &a.rows {
        let expect = if row.delta_rel.abs() < 1.0 { DampingRegime::Overdamped } else { DampingRegime::Underdamped };
        if (row.delta_rel.abs() - 1.0).abs() > 1e-6 {
            assert_eq!(row.regime, expect, "at {}", row.delta_rel);
        }
    }
}

#[test]
fn bundle_bytes_do_not_depend_on_run() {
    let mut spec = spec_for(Experiment::PhaseDiff);
    spec.deltas = spec.resolve_deltas(&DeltaGrid::Symmetric { max_rel: 2.0, points: 17 }).unwrap();
    let dir = std::env::temp_dir().join(format!("kerrcat-pipeline-{}", std::process::id()));
    let first = write_bundle(&dir.join("a"), "phase-diff", serde_json::Value::Null, &phase_diff_sweep(&spec).unwrap().tables(&spec), vec![]).unwrap();
    let second = write_bundle(&dir.join("b"), "phase-diff", serde_json::Value::Null, &phase_diff_sweep(&spec).unwrap().tables(&spec), vec![]).unwrap();
    assert_eq!(first.files, second.files);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn steady_state_converges_with_truncation() {
    let params = SystemParams::reference();
    let controls = IntegratorControls::default();
    let big = TruncatedSpace::new(34).unwrap();
    let reference = steady_state(&params, big, &controls).unwrap().state;
    let distance = |dim: usize| {
        let rho = steady_state(&params, TruncatedSpace::new(dim).unwrap(), &controls).unwrap().state;
        trace_distance(&big.embed(rho.matrix()).unwrap(), reference.matrix()).unwrap()
    };
    let gaps: Vec<f64> = [18, 22, 26, 30].into_iter().map(distance).collect();
    assert!(gaps.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{gaps:?}");
    assert!(gaps[3] < 1e-8, "{gaps:?}");
}

#[test]
fn steady_state_report_matches_closed_form() {
    let report = steady_state_report(&spec_for(Experiment::SteadyState)).unwrap();
    assert!((report.weights.0 - report.closed_form_weights.0).abs() < 1e-4);
    assert!((report.weights.0 - 0.509784).abs() < 1e-5);
    assert!(report.fidelity > 0.999);
}

#[test]
fn wigner_normalization_improves_with_resolution() {
    let mut spec = spec_for(Experiment::Wigner);
    let target = WignerTarget::Initial { state: InitialState::YPlus };
    spec.wigner_points = 41;
    let (rho, coarse) = wigner_of(&spec, target).unwrap();
    let fine = wigner(&rho, &WignerGridSpec::square(spec.alpha() + 4.0, 161)).unwrap();
    assert!(fine.max_imag < 1e-10);
    assert!((fine.normalization() - 1.0).abs() < 1e-6);
    assert!((fine.normalization() - 1.0).abs() <= (coarse.normalization() - 1.0).abs() + 1e-12);
}

#[test]
fn steady_wigner_is_nonnegative() {
    let mut spec = spec_for(Experiment::Wigner);
    spec.wigner_points = 61;
    let (_, grid) = wigner_of(&spec, WignerTarget::Steady).unwrap();
    assert!(grid.min() > -1e-3);
    assert!(!grid.truncation_warning);
}
