use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use qusa_core::analysis::{
    convergence_order, default_window, estimate_takeoff, frustrated_window, leak_scaling,
    ScalingFit,
};
use qusa_core::dynamics::{
    field_path_csv, frozen_generator, run_ensemble_with, run_kind, spectral_norm,
    zeno_convergence_study, EnsembleResult, RunKind, RunSetup,
};
use qusa_core::hamiltonian::FieldProcess;
use qusa_core::network::{classical_anneal, enumerate_solutions_with, AnnealParams, Model};
use qusa_core::par::Execution;
use qusa_core::statespace::initial_state;

use crate::config::{Command, ResolvedNetwork, RunConfig, WindowRule};
use crate::{CliError, Status};

fn write(out: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = out.join(name);
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(&path, contents)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    write(out, name, &text)
}

#[derive(Serialize)]
struct ScalingReport<'a> {
    exponent: f64,
    intercept: f64,
    stderr: f64,
    points: &'a [(f64, f64)],
    r_squared: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    confidence: Option<(f64, f64)>,
}

impl<'a> ScalingReport<'a> {
    fn new(fit: &'a ScalingFit, confidence: Option<(f64, f64)>) -> Self {
        ScalingReport {
            exponent: fit.exponent,
            intercept: fit.intercept,
            stderr: fit.stderr,
            points: &fit.points,
            r_squared: fit.r_squared,
            confidence,
        }
    }
}

/// Fills seeds that default to the run seed, so the manifest is explicit.
fn resolved(cfg: &RunConfig) -> RunConfig {
    let mut cfg = cfg.clone();
    cfg.zeno.field_seed.get_or_insert(cfg.seed);
    cfg.zeno.state_seed.get_or_insert(cfg.seed);
    cfg
}

pub fn execute(cfg: &RunConfig, out: &Path) -> Result<Status, CliError> {
    let cfg = resolved(cfg);
    let command = cfg.command.expect("command is set before execution");
    write_json(out, "manifest.json", &cfg)?;
    let net = cfg.network.resolve()?;
    eprintln!(
        "{}: {} triodes, {} wires, seed {}",
        command.name(),
        net.network.triode_count(),
        net.network.wires().len(),
        cfg.seed
    );
    match command {
        Command::Solve => solve(&cfg, &net, out),
        Command::AnnealClassical => anneal(&cfg, &net, out),
        Command::SimulateComparison => simulate(&cfg, &net, RunKind::Comparison, out),
        Command::SimulateProjected => simulate(&cfg, &net, RunKind::Projected, out),
        Command::SimulateSymmetrized => simulate(&cfg, &net, RunKind::Symmetrized, out),
        Command::Ensemble => ensemble(&cfg, &net, out),
        Command::ZenoSweep => zeno(&cfg, &net, out),
        Command::LeakSweep => leak(&cfg, &net, out),
    }
}

#[derive(Serialize)]
struct SolveReport {
    model: Model,
    count: usize,
    solutions: Vec<String>,
    /// Variable values per solution, for exact-cover input.
    #[serde(skip_serializing_if = "Option::is_none")]
    covers: Option<Vec<Vec<u8>>>,
}

fn solve(cfg: &RunConfig, net: &ResolvedNetwork, out: &Path) -> Result<Status, CliError> {
    let cap = cfg.cap.unwrap_or(cfg.model.default_cap());
    let sols = enumerate_solutions_with(&net.network, cfg.model, cap, Execution::default())?;
    let lines: Vec<String> = sols.iter().map(|s| s.label_string()).collect();
    let mut text = String::new();
    for l in &lines {
        let _ = writeln!(text, "{l}");
    }
    write(out, "solutions.txt", &text)?;
    let covers = net.cover.as_ref().map(|(_, reps)| {
        sols.iter()
            .map(|s| {
                reps.iter()
                    .map(|r| r.map_or(0, |r| s.labels()[r.triode].bit(r.axis)))
                    .collect()
            })
            .collect()
    });
    write_json(
        out,
        "solutions.json",
        &SolveReport {
            model: cfg.model,
            count: sols.len(),
            solutions: lines,
            covers,
        },
    )?;
    eprintln!("solve: {} solutions", sols.len());
    Ok(if sols.is_empty() {
        Status::Unsatisfiable
    } else {
        Status::Done
    })
}

#[derive(Serialize)]
struct AnnealReport {
    first_hit: Option<usize>,
    accepted: usize,
    final_energy: f64,
    final_assignment: String,
}

fn anneal(cfg: &RunConfig, net: &ResolvedNetwork, out: &Path) -> Result<Status, CliError> {
    let hp = &cfg.hamiltonian;
    let params = AnnealParams {
        g: hp.g,
        g_prime: hp.g_prime,
        trap_free: hp.trap_free,
    };
    let tr = classical_anneal(
        &net.network,
        cfg.model,
        &params,
        &cfg.anneal.schedule(),
        None,
        cfg.seed,
    )?;
    let mut csv = String::from("step,temperature,energy\n");
    for (i, e) in tr.energies.iter().enumerate() {
        let temp = i
            .checked_sub(1)
            .map(|j| tr.temperatures[j].to_string())
            .unwrap_or_default();
        let _ = writeln!(csv, "{i},{temp},{e}");
    }
    write(out, "anneal.csv", &csv)?;
    write_json(
        out,
        "anneal.json",
        &AnnealReport {
            first_hit: tr.first_hit,
            accepted: tr.accepted,
            final_energy: tr.energies.last().copied().unwrap_or(0.0),
            final_assignment: tr.final_assignment.label_string(),
        },
    )?;
    Ok(Status::Done)
}

fn setup<'a>(cfg: &'a RunConfig, net: &'a ResolvedNetwork) -> RunSetup<'a> {
    RunSetup::new(&net.network, &cfg.hamiltonian, &cfg.noise, &cfg.schedule)
}

fn simulate(
    cfg: &RunConfig,
    net: &ResolvedNetwork,
    kind: RunKind,
    out: &Path,
) -> Result<Status, CliError> {
    let tr = run_kind(setup(cfg, net), kind, cfg.seed)?;
    write(out, "trajectory.csv", &tr.to_csv())?;
    for (i, (t, state)) in tr.snapshots.iter().enumerate() {
        let text = format!("# t = {t}\n{}", state.dump());
        write(out, &format!("snapshots/snapshot_{i:03}.csv"), &text)?;
    }
    if cfg.dump_fields {
        let csv = field_path_csv(
            net.network.triode_count(),
            &cfg.noise,
            &cfg.schedule,
            cfg.seed,
        )?;
        write(out, "fields.csv", &csv)?;
    }
    if let Some(last) = tr.samples.last() {
        eprintln!(
            "{}: t = {}, p_S = {}, p_F = {}, p_V = {}",
            kind.as_str(),
            last.t,
            last.weights.s,
            last.weights.f,
            last.weights.v
        );
    }
    Ok(Status::Done)
}

fn ensemble(cfg: &RunConfig, net: &ResolvedNetwork, out: &Path) -> Result<Status, CliError> {
    let e = &cfg.ensemble;
    let trajectories =
        run_ensemble_with(setup(cfg, net), e.kind, e.n, cfg.seed, Execution::default())?;
    let result = EnsembleResult::from_trajectories(&trajectories)?;
    write(out, "ensemble.csv", &result.to_csv())?;
    if e.kind == RunKind::Projected {
        let window = match e.window.rule {
            WindowRule::Default => default_window(&result),
            WindowRule::Frustrated => frustrated_window(&result, e.window.level),
        };
        match window.and_then(|w| estimate_takeoff(&result, w)) {
            Ok(fit) => {
                write_json(out, "takeoff_fit.json", &fit)?;
                eprintln!(
                    "ensemble: k_fit {}, k_removed {}, r2 {}",
                    fit.k_fit, fit.k_removed, fit.r_squared
                );
            }
            Err(err) => eprintln!("ensemble: no take-off fit ({err})"),
        }
    }
    Ok(Status::Done)
}

fn zeno(cfg: &RunConfig, net: &ResolvedNetwork, out: &Path) -> Result<Status, CliError> {
    let z = &cfg.zeno;
    if z.interval_divisors.len() < 3 {
        return Err(CliError::Usage(
            "zeno-sweep needs at least 3 intervals".into(),
        ));
    }
    let t = net.network.triode_count();
    let field_seed = z.field_seed.unwrap_or(cfg.seed);
    let fields = FieldProcess::from_seed(t, cfg.noise, field_seed)?;
    let g = frozen_generator(&net.network, &cfg.hamiltonian, fields.sample())?;
    let total = z.total_time_times_norm / spectral_norm(&g)?;
    let dts: Vec<f64> = z
        .interval_divisors
        .iter()
        .map(|k| total / f64::from(*k))
        .collect();
    let psi = initial_state(&net.network, z.state_seed.unwrap_or(cfg.seed));
    let study = zeno_convergence_study(&g, &psi, &dts, total)?;
    let mut csv = String::from("interval,error\n");
    for p in &study {
        let _ = writeln!(csv, "{},{}", p.interval, p.error);
    }
    write(out, "zeno.csv", &csv)?;
    let fit = convergence_order(&study)?;
    write_json(out, "scaling.json", &ScalingReport::new(&fit, None))?;
    eprintln!("zeno-sweep: order {}", fit.exponent);
    Ok(Status::Done)
}

fn leak(cfg: &RunConfig, net: &ResolvedNetwork, out: &Path) -> Result<Status, CliError> {
    let l = &cfg.leak;
    if l.intervals.len() < 3 {
        return Err(CliError::Usage(
            "leak-sweep needs at least 3 intervals".into(),
        ));
    }
    let s = leak_scaling(
        setup(cfg, net),
        &l.intervals,
        l.n,
        cfg.seed,
        Execution::default(),
    )?;
    let mut csv = String::from("interval,mean_removed,se\n");
    for (p, e) in s.points.iter().zip(&s.ensembles) {
        let _ = writeln!(csv, "{},{},{}", p.interval, p.mean_removed, p.se);
        write(out, &format!("leak_dt_{}.csv", p.interval), &e.to_csv())?;
    }
    write(out, "leak_points.csv", &csv)?;
    match &s.fit {
        Some(fit) => {
            write_json(out, "scaling.json", &ScalingReport::new(fit, s.confidence))?;
            eprintln!("leak-sweep: exponent {}", fit.exponent);
        }
        None => eprintln!("leak-sweep: no removed norm, fit is degenerate"),
    }
    Ok(Status::Done)
}
