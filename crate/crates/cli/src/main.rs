//! `kerrcat`: sweeps of the Kerr-cat qubit near its Liouvillian
//! exceptional point.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kerrcat::experiments::{
    bloch_wigner_snapshots, dynamics_sweep, fidelity_map, fmt_num, phase_diff_sweep, provenance, spectrum_sweep,
    steady_state_report, to_khz, to_us, wigner_of, with_jobs, write_bundle, Experiment, Grid, Source, SweepSpec, Table,
    WignerTarget,
};
use kerrcat::Error;
use log::info;

use config::{Format, RunConfig, WignerState};

const UNITS: &str = "Units: frequencies are ω/2π in kHz on the command line (Hz in config files), \
                     times are µs, detunings may also be given in units of Δ_LEP2.";

#[derive(Parser, Debug)]
#[command(name = "kerrcat", version, about = "Kerr-cat qubit exceptional-point simulator", after_help = UNITS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues of the effective Liouvillian over Δ (and α), plus the LEP curve.
    Spectrum(Opts),
    /// Print Δ_LEP2 for the configured parameters.
    Lep(Opts),
    /// ⟨X⟩, ⟨Y⟩, ⟨Z⟩ from |α⟩ under the effective and full models.
    Dynamics(Opts),
    /// Phase difference of the off-diagonal eigenmatrices over Δ.
    PhaseDiff(Opts),
    /// Bloch trajectories and Wigner snapshots at two detunings.
    Snapshots(Opts),
    /// Fidelity of the effective model against the full model over (Δ, t).
    FidelityMap(Opts),
    /// Wigner function of a single state.
    Wigner(Opts),
    /// Full-model steady state compared with the closed-form mixture.
    SteadyState(Opts),
}

impl Command {
    fn parts(&self) -> (Experiment, &Opts) {
        match self {
            Command::Spectrum(o) => (Experiment::Spectrum, o),
            Command::Lep(o) => (Experiment::SteadyState, o),
            Command::Dynamics(o) => (Experiment::Dynamics, o),
            Command::PhaseDiff(o) => (Experiment::PhaseDiff, o),
            Command::Snapshots(o) => (Experiment::Snapshots, o),
            Command::FidelityMap(o) => (Experiment::FidelityMap, o),
            Command::Wigner(o) => (Experiment::Wigner, o),
            Command::SteadyState(o) => (Experiment::SteadyState, o),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Lep(_) => "lep",
            Command::Dynamics(_) => "dynamics",
            Command::PhaseDiff(_) => "phase-diff",
            Command::Snapshots(_) => "snapshots",
            Command::FidelityMap(_) => "fidelity-map",
            Command::Wigner(_) => "wigner",
            Command::SteadyState(_) => "steady-state",
        }
    }

    /// Commands that evaluate a single detuning rather than a Δ grid.
    fn single_point(&self) -> bool {
        matches!(self, Command::Lep(_) | Command::Wigner(_) | Command::SteadyState(_))
    }
}

#[derive(Args, Debug, Clone)]
#[command(after_help = UNITS, allow_negative_numbers = true)]
struct Opts {
    /// TOML run configuration; flags override its values.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = "KERRCAT_OUT_DIR", value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Print the resolved configuration and grid sizes, then exit.
    #[arg(long)]
    dry_run: bool,

    /// Detunings Δ/2π in kHz (comma-separated).
    #[arg(long, value_delimiter = ',', conflicts_with = "detuning_rel")]
    delta_khz: Option<Vec<f64>>,
    /// Detunings in units of Δ_LEP2 (comma-separated).
    #[arg(long, value_delimiter = ',')]
    detuning_rel: Option<Vec<f64>>,
    /// Symmetric Δ grid half-width in units of Δ_LEP2.
    #[arg(long)]
    delta_max: Option<f64>,
    /// Number of points in the symmetric Δ grid.
    #[arg(long)]
    delta_points: Option<usize>,
    /// Kerr coefficient K/2π, kHz.
    #[arg(long)]
    kerr_khz: Option<f64>,
    /// Two-photon drive P/2π, kHz.
    #[arg(long, conflicts_with = "alpha")]
    drive_khz: Option<f64>,
    /// Cat amplitude α (sets P = Kα²).
    #[arg(long)]
    alpha: Option<f64>,
    /// Cat amplitudes for the spectrum map (comma-separated).
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Single-photon loss κ/2π, kHz.
    #[arg(long)]
    kappa_khz: Option<f64>,
    /// Pure dephasing κ_φ/2π, kHz.
    #[arg(long)]
    kappa_phi_khz: Option<f64>,
    /// Fock-space truncation.
    #[arg(long)]
    dim: Option<usize>,
    /// Integrator relative tolerance.
    #[arg(long)]
    rtol: Option<f64>,
    /// Integrator absolute tolerance.
    #[arg(long)]
    atol: Option<f64>,
    /// Time samples over the window.
    #[arg(long)]
    samples: Option<usize>,
    /// Window length in units of 1/(α²κ).
    #[arg(long, conflicts_with = "window_us")]
    window: Option<f64>,
    /// Window length, µs.
    #[arg(long)]
    window_us: Option<f64>,
    /// Wigner grid points per axis.
    #[arg(long)]
    wigner_points: Option<usize>,
    /// State for the `wigner` command.
    #[arg(long, value_enum)]
    state: Option<WignerState>,
    /// Evolution time for `--state evolved`, µs.
    #[arg(long)]
    time_us: Option<f64>,
    /// Output format for the `wigner` command.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

/// Failure reported as one JSON line on stderr.
struct Failure {
    kind: String,
    message: String,
    code: u8,
}

impl Failure {
    fn config(kind: &str, message: impl Into<String>) -> Self {
        Self { kind: kind.into(), message: message.into(), code: 2 }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParams(_) | Error::InvalidSweep(_) | Error::InvalidSpace { .. } => 2,
            _ => 1,
        };
        Self { kind: e.kind().into(), message: e.to_string(), code }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            return report(Failure::config("usage", first));
        }
    };
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(f),
    }
}

fn report(f: Failure) -> ExitCode {
    let line = serde_json::json!({ "error": f.kind, "message": f.message });
    eprintln!("{line}");
    ExitCode::from(f.code)
}

fn apply(cfg: &mut RunConfig, cmd: &Command) -> Result<(), Failure> {
    let (_, o) = cmd.parts();
    if let Some(out) = &o.out {
        cfg.output_dir = out.clone();
    }
    if o.jobs.is_some() {
        cfg.jobs = o.jobs;
    }
    let p = &mut cfg.params;
    if let Some(k) = o.kerr_khz {
        p.kerr_hz = k * 1e3;
    }
    if let Some(d) = o.drive_khz {
        p.drive_hz = Some(d * 1e3);
        p.alpha = None;
    }
    if let Some(a) = o.alpha {
        p.alpha = Some(a);
        p.drive_hz = None;
    }
    if let Some(k) = o.kappa_khz {
        p.kappa_hz = k * 1e3;
    }
    if let Some(k) = o.kappa_phi_khz {
        p.kappa_phi_hz = k * 1e3;
    }
    let g = &mut cfg.grids;
    if cmd.single_point() {
        let one = |v: &Vec<f64>, flag: &str| match v.as_slice() {
            [x] => Ok(*x),
            _ => Err(Failure::config("invalid-params", format!("{flag} takes a single value for this command"))),
        };
        if let Some(v) = &o.delta_khz {
            p.delta_hz = Some(one(v, "--delta-khz")? * 1e3);
            p.detuning_rel = None;
        }
        if let Some(v) = &o.detuning_rel {
            p.detuning_rel = Some(one(v, "--detuning-rel")?);
            p.delta_hz = None;
        }
    } else if o.delta_khz.is_some() || o.detuning_rel.is_some() || o.delta_max.is_some() || o.delta_points.is_some() {
        g.detunings_khz = o.delta_khz.clone();
        g.detunings_rel = o.detuning_rel.clone();
        g.delta_max_rel = o.delta_max;
        g.delta_points = o.delta_points;
    }
    if o.alphas.is_some() {
        g.alphas = o.alphas.clone();
    }
    if o.samples.is_some() {
        g.samples = o.samples;
    }
    if let Some(w) = o.window {
        g.window_alpha2_kappa = Some(w);
        g.window_us = None;
    }
    if let Some(w) = o.window_us {
        g.window_us = Some(w);
        g.window_alpha2_kappa = None;
    }
    if o.wigner_points.is_some() {
        g.wigner_points = o.wigner_points;
    }
    if let Some(d) = o.dim {
        cfg.dim = d;
    }
    if let Some(r) = o.rtol {
        cfg.integrator.rtol = r;
    }
    if let Some(a) = o.atol {
        cfg.integrator.atol = a;
    }
    if let Some(s) = o.state {
        cfg.wigner.state = s;
    }
    if o.time_us.is_some() {
        cfg.wigner.time_us = o.time_us;
    }
    if let Some(f) = o.format {
        cfg.wigner.format = f;
    }
    Ok(())
}

fn needs(cmd: &Command) -> &'static [Grid] {
    match cmd {
        Command::Spectrum(_) => &[Grid::Delta, Grid::Alpha],
        Command::PhaseDiff(_) => &[Grid::Delta],
        Command::Dynamics(_) | Command::Snapshots(_) | Command::FidelityMap(_) => &[Grid::Delta, Grid::Time],
        Command::Lep(_) | Command::Wigner(_) | Command::SteadyState(_) => &[],
    }
}

/// Load, override, check and resolve. Every violation is reported at once.
fn resolve(cmd: &Command) -> Result<(RunConfig, SweepSpec), Failure> {
    let (experiment, o) = cmd.parts();
    let mut cfg = match &o.config {
        Some(path) => RunConfig::load(path).map_err(|e| match e {
            Error::Io(io) => Failure::config("config-io", format!("{}: {io}", path.display())),
            other => Failure::config("config-parse", other.to_string()),
        })?,
        None => RunConfig::default(),
    };
    apply(&mut cfg, cmd)?;
    let mut problems = cfg.violations(experiment);
    let params_ok = cfg.param_violations().is_empty();
    let cfg = cfg.resolve(experiment);
    let mut spec = None;
    if params_ok {
        match cfg.sweep_spec().and_then(|s| s.with_defaults(experiment)) {
            Ok(s) => {
                problems.extend(s.violations(needs(cmd)));
                spec = Some(s);
            }
            Err(Error::InvalidParams(v)) | Err(Error::InvalidSweep(v)) => problems.extend(v),
            Err(e) => problems.push(e.to_string()),
        }
    }
    let mut seen = std::collections::HashSet::new();
    problems.retain(|p| seen.insert(p.clone()));
    if !problems.is_empty() {
        return Err(Failure::config("invalid-config", problems.join("; ")));
    }
    Ok((cfg, spec.expect("no problems")))
}

fn run(cmd: &Command) -> Result<(), Failure> {
    let (cfg, spec) = resolve(cmd)?;
    let toml_text = cfg.to_toml();
    if cmd.parts().1.dry_run {
        print_plan(cmd, &cfg, &spec, &toml_text);
        return Ok(());
    }
    info!("{} with {} Δ, {} α, {} t points", cmd.name(), spec.deltas.len(), spec.alphas.len(), spec.times.len());
    let (tables, mut extra) = with_jobs(cfg.jobs, || execute(cmd, &cfg, &spec))??;
    extra.push(("resolved_config.toml".into(), toml_text.into_bytes()));
    let config_json = serde_json::to_value(&cfg).map_err(Error::from)?;
    write_bundle(&cfg.output_dir, cmd.name(), config_json, &tables, extra)?;
    println!("wrote {}", cfg.output_dir.display());
    Ok(())
}

fn print_plan(cmd: &Command, cfg: &RunConfig, spec: &SweepSpec, toml_text: &str) {
    println!("# {} dry run: {} Δ, {} α, {} t points, dim {}", cmd.name(), spec.deltas.len(), spec.alphas.len(), spec.times.len(), spec.dim);
    println!("# output_dir = {}", cfg.output_dir.display());
    print!("{toml_text}");
}

type Outputs = (Vec<Table>, Vec<(String, Vec<u8>)>);

fn execute(cmd: &Command, cfg: &RunConfig, spec: &SweepSpec) -> Result<Outputs, Failure> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cmd {
        Command::Spectrum(_) => Ok((spectrum_sweep(spec)?.tables(spec), vec![])),
        Command::Lep(_) => {
            let lep = spec.lep()?;
            let ratio = lep / spec.base.kappa;
            writeln!(out, "Delta_LEP2/2pi = {:.3} kHz ({:.2} kappa), alpha = {:.6}", to_khz(lep), ratio, spec.alpha())
                .map_err(Error::from)?;
            let mut t = Table::new("lep", provenance("lep", &spec.base, None), &["alpha", "delta_lep2_khz", "delta_lep2_over_kappa"]);
            t.push(vec![fmt_num(spec.alpha()), fmt_num(to_khz(lep)), fmt_num(ratio)]);
            Ok((vec![t], vec![]))
        }
        Command::Dynamics(_) => {
            let sweep = dynamics_sweep(spec)?;
            for s in &sweep.summaries {
                let settle = s.settle_time.map_or("never".to_string(), |t| format!("{:.3} us", to_us(t)));
                writeln!(
                    out,
                    "{:<9} Delta/Delta_LEP2 = {:>6.3}  crossings = {:>2}  settle = {settle}  oscillating = {}",
                    s.source.name(),
                    s.delta_rel,
                    s.crossings,
                    s.oscillating
                )
                .map_err(Error::from)?;
            }
            debug_assert!(sweep.summaries.iter().any(|s| s.source == Source::Full));
            Ok((sweep.tables(spec), vec![]))
        }
        Command::PhaseDiff(_) => Ok((phase_diff_sweep(spec)?.tables(spec), vec![])),
        Command::Snapshots(_) => Ok(bloch_wigner_snapshots(spec)?.outputs(spec)?),
        Command::FidelityMap(_) => {
            let map = fidelity_map(spec)?;
            writeln!(out, "minimum fidelity {:.6}", map.min()).map_err(Error::from)?;
            Ok((map.tables(spec), vec![]))
        }
        Command::Wigner(_) => {
            let target = match cfg.wigner.state {
                WignerState::Steady => WignerTarget::Steady,
                WignerState::Evolved => WignerTarget::Evolved { time: cfg.wigner.time_us.unwrap_or(0.0) * 1e-6 },
                _ => WignerTarget::Initial { state: cfg.initial_state().expect("named state") },
            };
            let (_, grid) = wigner_of(spec, target)?;
            let mut header = provenance("wigner", &spec.base, Some(spec.dim));
            header.push(format!("state: {}", serde_json::to_string(&target).map_err(Error::from)?));
            let mut bytes = Vec::new();
            let name = match cfg.wigner.format {
                Format::Csv => {
                    grid.write_csv(&mut bytes, &header)?;
                    "wigner.csv"
                }
                Format::Json => {
                    grid.write_json(&mut bytes, &header)?;
                    "wigner.json"
                }
            };
            writeln!(out, "min W = {:.6}, normalization = {:.8}", grid.min(), grid.normalization()).map_err(Error::from)?;
            Ok((vec![], vec![(name.to_string(), bytes)]))
        }
        Command::SteadyState(_) => {
            let r = steady_state_report(spec)?;
            writeln!(
                out,
                "weights ({:.6}, {:.6}) closed form ({:.6}, {:.6}); fidelity {:.8}; coherence {:.1e}; leakage {:.1e}",
                r.weights.0, r.weights.1, r.closed_form_weights.0, r.closed_form_weights.1, r.fidelity, r.coherence, r.leakage
            )
            .map_err(Error::from)?;
            Ok((r.tables(spec), vec![]))
        }
    }
}
