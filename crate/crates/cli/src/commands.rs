use std::fs;
use std::path::Path;
use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use workmeter_core::collision::{effective_unitary, relative_hamiltonian, Discretization};
use workmeter_core::fluctuation::{jarzynski_average, partition_ratio, tpm_distribution};
use workmeter_core::models::oscillator::{oscillator_numeric_many, oscillator_work_analytic, NumericSettings};
use workmeter_core::models::{figure1_scan, log_grid, DrivingProtocol, OscillatorParams, QubitCoupling, ScanTarget};
use workmeter_core::optimize::{run_study, SampleResult, SpectrumSampling, StudyConfig};
use workmeter_core::protocol::{ConstantProtocol, ControlProtocol};
use workmeter_core::quantum::{expectation, random, thermal_state};
use workmeter_core::work::{measure_work, WorkMode};

use crate::config::{resolve_seed, write_csv, write_json, write_manifest};
use crate::{CliError, Common, Figure1Args, OscillatorArgs, OptimizeArgs, Sampling, SystemKind, TpmArgs, TraceMode, TraceProtocol, WorkTraceArgs};

/// Largest accepted |⟨e^{−βW}⟩ − Z_B/Z_A|.
const TPM_THRESHOLD: f64 = 1e-9;
/// Slack on ΔF ≤ ΔF̃ ≤ ⟨W⟩.
const BOUND_SLACK: f64 = 1e-9;

fn prepare(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))
}

#[derive(Serialize)]
struct TpmRow {
    sample: usize,
    jarzynski_average: f64,
    partition_ratio: f64,
    residual: f64,
}

#[derive(Serialize)]
struct TpmSummary {
    dim: usize,
    beta: f64,
    samples: usize,
    seed: u64,
    max_residual: f64,
    threshold: f64,
    passed: bool,
}

pub fn tpm(mut args: TpmArgs, common: &Common) -> Result<(), CliError> {
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    if args.dim < 2 {
        return Err(CliError::Usage(format!("--dim must be at least 2, got {}", args.dim)));
    }
    let seed = resolve_seed(args.seed)?;
    args.seed = Some(seed);
    let rows = (0..args.samples)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let h_a = random::hermitian(args.dim, &mut rng);
            let h_b = random::hermitian(args.dim, &mut rng);
            let u = random::unitary(args.dim, &mut rng);
            let dist = tpm_distribution(&h_a, &h_b, &u, args.beta)?;
            let je = jarzynski_average(&dist, args.beta);
            let ratio = partition_ratio(&h_a, &h_b, args.beta);
            Ok(TpmRow { sample: i, jarzynski_average: je, partition_ratio: ratio, residual: (je - ratio).abs() })
        })
        .collect::<Result<Vec<_>, workmeter_core::Error>>()?;
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let summary = TpmSummary {
        dim: args.dim,
        beta: args.beta,
        samples: args.samples,
        seed,
        max_residual,
        threshold: TPM_THRESHOLD,
        passed: max_residual <= TPM_THRESHOLD,
    };
    prepare(&common.out)?;
    write_csv(&common.out.join("tpm.csv"), &rows)?;
    write_json(&common.out.join("summary.json"), &summary)?;
    write_manifest(&common.out, "tpm", &args, seed, &["tpm.csv", "summary.json"])?;
    println!("tpm: {} samples, max residual {max_residual:e}", args.samples);
    if !summary.passed {
        return Err(CliError::Threshold(format!("max residual {max_residual:e} > {TPM_THRESHOLD:e}")));
    }
    Ok(())
}

pub fn figure1(args: Figure1Args, common: &Common) -> Result<(), CliError> {
    let target = match args.system {
        SystemKind::Qubit => ScanTarget::Qubit(QubitCoupling::from_variant(args.variant)?),
        SystemKind::Oscillator => {
            DrivingProtocol::new(args.protocol, 1.0)?;
            ScanTarget::Oscillator { kind: args.protocol, params: OscillatorParams { omega: args.omega, g: args.g } }
        }
    };
    let grid = log_grid(args.t_min, args.t_max, args.points)?;
    let rows = figure1_scan(target, &grid, args.steps, args.beta)?;
    prepare(&common.out)?;
    write_csv(&common.out.join("figure1.csv"), &rows)?;
    write_manifest(&common.out, "figure1", &args, 0, &["figure1.csv"])?;
    let last = rows.last().expect("grid has at least two points");
    println!("figure1: {} rows, final |ΔF̃ − ΔF| = {:.3e}", rows.len(), (last.delta_f_tilde - last.delta_f).abs());
    if let Some(r) = rows.iter().find(|r| r.delta_f > r.delta_f_tilde + BOUND_SLACK || r.delta_f_tilde > r.avg_work + BOUND_SLACK) {
        return Err(CliError::Threshold(format!("bound chain violated at T = {}", r.duration)));
    }
    Ok(())
}

fn study_config(args: &mut OptimizeArgs) -> Result<StudyConfig, CliError> {
    let mut c = StudyConfig::strategy(args.strategy)?;
    c.seed = resolve_seed(args.seed)?;
    macro_rules! take {
        ($($arg:ident => $($field:ident).+),* $(,)?) => {$(
            match args.$arg.clone() {
                Some(v) => c.$($field).+ = v,
                None => args.$arg = Some(c.$($field).+.clone()),
            }
        )*};
    }
    take!(
        dims => dims,
        samples => samples_per_dim,
        beta => beta,
        points => points,
        t_min => descent.t_min,
        t_max => descent.t_max,
        steps_search => steps_search,
        steps_final => steps_final,
        baseline_duration => baseline_duration,
        step => descent.step,
        min_step => descent.min_step,
        max_iters => descent.max_iters,
        tol => descent.rel_tol,
        fd_step => descent.fd_step,
        duration_grid => descent.duration_grid,
    );
    args.seed = Some(c.seed);
    match args.sampling {
        Some(Sampling::Bounded) => c.sampling = SpectrumSampling::Bounded,
        Some(Sampling::Rescaled) => c.sampling = SpectrumSampling::Rescaled,
        None => args.sampling = Some(Sampling::Rescaled),
    }
    if c.samples_per_dim == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    if c.descent.t_min >= c.descent.t_max {
        return Err(CliError::Usage(format!("need --t-min < --t-max, got {} and {}", c.descent.t_min, c.descent.t_max)));
    }
    Ok(c)
}

pub fn optimize(mut args: OptimizeArgs, common: &Common) -> Result<(), CliError> {
    let config = study_config(&mut args)?;
    prepare(&common.out)?;
    let partial_path = common.out.join("samples.partial.csv");
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", partial_path.display()));
    let partial = Mutex::new(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(&partial_path).map_err(io)?);
    let save = |r: &SampleResult| {
        let mut w = partial.lock().expect("partial writer");
        // best effort: the final table is written after the study completes
        let _ = w.serialize(r).and_then(|_| w.flush().map_err(csv::Error::from));
    };
    let result = run_study(&config, &save);
    drop(partial);
    let result = result?;
    write_csv(&common.out.join("samples.csv"), &result.samples)?;
    write_json(&common.out.join("aggregate.json"), &result.aggregates)?;
    fs::remove_file(&partial_path).map_err(|e| CliError::Io(format!("{}: {e}", partial_path.display())))?;
    write_manifest(&common.out, "optimize", &args, config.seed, &["samples.csv", "aggregate.json"])?;
    for a in &result.aggregates {
        println!(
            "d = {}: ⟨err_abs⟩ linear {:.4e}, optimized {:.4e} ({} samples)",
            a.dim, a.mean_err_abs_linear, a.mean_err_abs_opt, a.n_samples
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct TraceRow {
    t: f64,
    #[serde(rename = "dW")]
    dw: f64,
    #[serde(rename = "cumulative_W")]
    cumulative_w: f64,
}

#[derive(Serialize)]
struct TraceSummary {
    total_work: f64,
    /// `Tr{H(T) Uρ_0U†} − Tr{H(0) ρ_0}` with the Zeno-limit unitary at the same resolution.
    energy_difference: f64,
    /// The same with the system state the collisions actually leave behind.
    energy_difference_collisional: f64,
    shots: Option<u64>,
    std_error: Option<f64>,
}

pub fn work_trace(mut args: WorkTraceArgs, common: &Common) -> Result<(), CliError> {
    let coupling = QubitCoupling::from_variant(args.variant)?;
    let joint = coupling.joint();
    let linear = coupling.protocol(args.duration);
    let constant = ConstantProtocol { state: linear.state_at(0.0), duration: args.duration };
    let protocol: &dyn ControlProtocol = match args.protocol {
        TraceProtocol::Linear => &linear,
        TraceProtocol::Constant => &constant,
    };
    let mode = match args.mode {
        TraceMode::Expectation => {
            args.seed = None;
            WorkMode::Expectation
        }
        TraceMode::Sampled => {
            let seed = resolve_seed(args.seed)?;
            args.seed = Some(seed);
            WorkMode::Sampled { shots: args.shots, seed }
        }
    };
    let h_0 = relative_hamiltonian(&joint, &protocol.state_at(0.0))?;
    let h_t = relative_hamiltonian(&joint, &protocol.state_at(args.duration))?;
    let rho0 = thermal_state(&h_0, args.beta);
    let record = measure_work(&rho0, &joint, protocol, args.steps, mode)?;
    let grid = Discretization::new(args.duration, args.steps)?;
    let mut cumulative = 0.0;
    let rows: Vec<TraceRow> = record
        .increments
        .iter()
        .enumerate()
        .map(|(i, &dw)| {
            cumulative += dw;
            TraceRow { t: grid.time(i), dw, cumulative_w: cumulative }
        })
        .collect();
    let e0 = expectation(&h_0, &rho0)?;
    let summary = TraceSummary {
        total_work: record.total,
        energy_difference: expectation(&h_t, &rho0.evolved(&effective_unitary(&joint, protocol, args.steps)?))? - e0,
        energy_difference_collisional: expectation(&h_t, &record.final_state)? - e0,
        shots: record.shots.map(|s| s.shots),
        std_error: record.shots.map(|s| s.std_error),
    };
    prepare(&common.out)?;
    write_csv(&common.out.join("work_trace.csv"), &rows)?;
    write_json(&common.out.join("summary.json"), &summary)?;
    write_manifest(&common.out, "work-trace", &args, args.seed.unwrap_or(0), &["work_trace.csv", "summary.json"])?;
    println!("work-trace: W = {:.6}, energy difference {:.6}", summary.total_work, summary.energy_difference);
    Ok(())
}

#[derive(Serialize)]
struct OscillatorRow {
    protocol: u8,
    duration: f64,
    n0: usize,
    numeric: f64,
    analytic: f64,
    abs_diff: f64,
}

pub fn oscillator_check(args: OscillatorArgs, common: &Common) -> Result<(), CliError> {
    let params = OscillatorParams { omega: args.omega, g: args.g };
    let settings = NumericSettings { steps: args.steps, levels: args.levels, params };
    let mut rows = Vec::new();
    for &kind in &args.protocols {
        for &duration in &args.durations {
            let p = DrivingProtocol::new(kind, duration)?;
            let analytic = oscillator_work_analytic(&p, params)?;
            for (&n0, numeric) in args.n0.iter().zip(oscillator_numeric_many(&p, &args.n0, settings)?) {
                rows.push(OscillatorRow { protocol: kind, duration, n0, numeric, analytic, abs_diff: (numeric - analytic).abs() });
            }
        }
    }
    prepare(&common.out)?;
    write_csv(&common.out.join("oscillator_check.csv"), &rows)?;
    write_manifest(&common.out, "oscillator-check", &args, 0, &["oscillator_check.csv"])?;
    let worst = rows.iter().map(|r| r.abs_diff).fold(0.0, f64::max);
    println!("oscillator-check: {} rows, max |numeric − analytic| = {worst:.3e}", rows.len());
    if worst > args.tolerance {
        return Err(CliError::Threshold(format!("max deviation {worst:e} > {:e}", args.tolerance)));
    }
    Ok(())
}
