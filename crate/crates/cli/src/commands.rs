use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use rotor_krylov::analysis::report::{csv_f64, ser_c64_vec};
use rotor_krylov::analysis::{
    campbell_sweep, critical_speed_filter, modal_quantities, reference_eigenvalues, replay,
    run_method, sweep_jobs, write_replay_csv, CriticalSpeedResult, MethodRun, ModalQuantities,
    ModalSolver, ReplayRow, ReplayTables, Solver, SweepReport,
};
use rotor_krylov::krylov::{run_reduction, Diagnostics, ReductionSpec, Timing};
use rotor_krylov::qep::{critical_speed_pencil, exact_solve, modal_pencil, QuadraticPencil};
use rotor_krylov::rotor::{assemble, load_model_file, SystemMatrices};
use rotor_krylov::C64;

use crate::args::{default_methods, CampbellArgs, CompareArgs, Kind, SolveArgs};
use crate::error::{CliError, CliResult};
use crate::manifest::{create, write_json, RunManifest};

pub const THREADS_ENV: &str = "ROTOR_KRYLOV_THREADS";

fn prepare_out(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| {
        CliError::usage(format!(
            "cannot create output directory {}: {e}",
            dir.display()
        ))
    })
}

fn load_system(dir: &Path) -> CliResult<SystemMatrices> {
    SystemMatrices::read_dir(dir)
        .map_err(|e| CliError::usage(format!("cannot read matrices from {}: {e}", dir.display())))
}

fn build_pencil(
    sys: &SystemMatrices,
    kind: Kind,
    omega: Option<f64>,
    n: Option<f64>,
) -> CliResult<QuadraticPencil> {
    match (kind, omega, n) {
        (Kind::Modal, Some(o), None) => Ok(modal_pencil(sys, o)?),
        (Kind::Critical, None, Some(r)) => Ok(critical_speed_pencil(sys, r)?),
        (Kind::Modal, _, Some(_)) => Err(CliError::usage(
            "--n applies to --kind critical, use --omega",
        )),
        (Kind::Critical, Some(_), _) => {
            Err(CliError::usage("--omega applies to --kind modal, use --n"))
        }
        (Kind::Modal, None, None) => Err(CliError::usage("--kind modal requires --omega")),
        (Kind::Critical, None, None) => Err(CliError::usage("--kind critical requires --n")),
    }
}

fn check_k(k: usize) -> CliResult<()> {
    if k == 0 {
        return Err(CliError::usage("--k must be at least 1"));
    }
    Ok(())
}

/// Order for a reduction method; `exact` takes none.
fn reduced_order(solver: Solver, m: Option<usize>) -> CliResult<Option<usize>> {
    match (solver, m) {
        (_, Some(0)) => Err(CliError::usage("--m must be at least 1")),
        (Solver::Exact, _) => Ok(None),
        (Solver::Reduction(method), None) => Err(CliError::usage(format!(
            "--m is required for method {method}"
        ))),
        (Solver::Reduction(_), Some(m)) => Ok(Some(m)),
    }
}

fn thread_pool(deterministic: bool) -> CliResult<rayon::ThreadPool> {
    let threads = if deterministic {
        1
    } else {
        match std::env::var(THREADS_ENV) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&t| t > 0)
                .ok_or_else(|| {
                    CliError::usage(format!(
                        "{THREADS_ENV} must be a positive integer, got `{v}`"
                    ))
                })?,
            Err(_) => 0,
        }
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Numerical(format!("cannot start worker threads: {e}")))
}

pub fn model_build(config: &Path, out: &Path) -> CliResult<()> {
    let model = load_model_file(config)?;
    let sys = assemble(&model)?;
    prepare_out(out)?;
    let name = config.file_stem().and_then(|s| s.to_str());
    sys.write_dir(out, name)?;
    RunManifest::new("model build", vec![config.to_path_buf()], out, true).write()?;
    println!(
        "{}: {n}×{n} blocks written to {}",
        config.display(),
        out.display(),
        n = sys.dof()
    );
    Ok(())
}

#[derive(Serialize)]
struct SolveOutput {
    method: Solver,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    kind: &'static str,
    dof: usize,
    k: usize,
    #[serde(serialize_with = "ser_c64_vec")]
    eigenvalues: Vec<C64>,
    residuals: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    modal: Option<Vec<ModalQuantities>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    critical_speeds: Option<Vec<CriticalSpeedResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<Diagnostics>,
    elapsed_s: f64,
}

pub fn solve(args: &SolveArgs) -> CliResult<()> {
    check_k(args.k)?;
    let m = reduced_order(args.method, args.m)?;
    let p = &args.pencil;
    let sys = load_system(&args.matrices)?;
    let pencil = build_pencil(&sys, p.kind, p.omega, p.n)?;
    let out = &args.common.out;
    let deterministic = args.common.deterministic;

    let start = Instant::now();
    let (pairs, mut diagnostics) = match args.method {
        Solver::Exact => (exact_solve(&pencil)?, None),
        Solver::Reduction(method) => {
            let spec = ReductionSpec::new(method, m.expect("checked above"), pencil.dof());
            let r = run_reduction(&pencil, &spec)?;
            (r.pairs, Some(r.diagnostics))
        }
    };
    let mut elapsed = start.elapsed().as_secs_f64();
    if deterministic {
        elapsed = 0.0;
        if let Some(d) = diagnostics.as_mut() {
            d.timing = Timing::default();
        }
    }
    if pairs.len() < args.k {
        return Err(CliError::Numerical(format!(
            "{} produced {} eigenvalues, {} requested",
            args.method,
            pairs.len(),
            args.k
        )));
    }
    let pairs = &pairs[..args.k];
    let eigenvalues: Vec<C64> = pairs.iter().map(|e| e.s).collect();

    prepare_out(out)?;
    let mut csv = create(&out.join("eigenvalues.csv"))?;
    let (modal, critical) = match p.kind {
        Kind::Modal => {
            let q = eigenvalues
                .iter()
                .map(|&s| modal_quantities(s))
                .collect::<Result<Vec<_>, _>>()?;
            writeln!(csv, "index,re,im,w,w_d,xi")?;
            for (i, mq) in q.iter().enumerate() {
                let row = [mq.s.re, mq.s.im, mq.w, mq.w_d, mq.xi]
                    .map(csv_f64)
                    .join(",");
                writeln!(csv, "{},{row}", i + 1)?;
            }
            (Some(q), None)
        }
        Kind::Critical => {
            writeln!(csv, "index,re,im,accepted,speed")?;
            for (i, &s) in eigenvalues.iter().enumerate() {
                let r = critical_speed_filter(&[s])[0];
                let speed = r.speed.map(csv_f64).unwrap_or_default();
                writeln!(
                    csv,
                    "{},{},{},{},{speed}",
                    i + 1,
                    csv_f64(s.re),
                    csv_f64(s.im),
                    r.accepted
                )?;
            }
            let filtered = critical_speed_filter(&eigenvalues);
            let mut speeds = create(&out.join("critical_speeds.csv"))?;
            writeln!(speeds, "rank,speed,re,im")?;
            for (i, r) in filtered.iter().filter(|r| r.accepted).enumerate() {
                let speed = r.speed.expect("accepted roots carry a speed");
                writeln!(
                    speeds,
                    "{},{},{},{}",
                    i + 1,
                    csv_f64(speed),
                    csv_f64(r.omega.re),
                    csv_f64(r.omega.im)
                )?;
            }
            speeds.flush()?;
            (None, Some(filtered))
        }
    };
    csv.flush()?;

    let accepted = critical
        .as_ref()
        .map(|c| c.iter().filter(|r| r.accepted).count());
    let output = SolveOutput {
        method: args.method,
        m,
        kind: p.kind.name(),
        dof: pencil.dof(),
        k: args.k,
        eigenvalues,
        residuals: pairs.iter().map(|e| e.residual).collect(),
        modal,
        critical_speeds: critical,
        diagnostics,
        elapsed_s: elapsed,
    };
    write_json(&out.join("result.json"), &output)?;

    let mut manifest = RunManifest::new("solve", vec![args.matrices.clone()], out, deterministic);
    manifest.kind = Some(p.kind.name());
    manifest.omega = p.omega;
    manifest.n_ratio = p.n;
    manifest.methods = vec![args.method.to_string()];
    manifest.m = m;
    manifest.k = Some(args.k);
    manifest.write()?;

    match accepted {
        Some(a) => println!(
            "{}: {} eigenvalues, {a} accepted critical speeds → {}",
            args.method,
            args.k,
            out.display()
        ),
        None => println!(
            "{}: {} eigenvalues → {}",
            args.method,
            args.k,
            out.display()
        ),
    }
    Ok(())
}

pub fn compare(args: &CompareArgs) -> CliResult<()> {
    check_k(args.k)?;
    if let Some(tables) = &args.from_tables {
        return compare_tables(tables, args);
    }
    let matrices = args.matrices.as_ref().expect("required by the parser");
    let kind = args.kind.expect("required by the parser");
    let range = args.m_range.expect("required by the parser");
    let deterministic = args.common.deterministic;
    let out = &args.common.out;

    let mut solvers = if args.methods.is_empty() {
        default_methods()
    } else {
        args.methods.clone()
    };
    solvers.sort_by_key(|s| s.name());
    solvers.dedup();
    let m_values = range.values();

    let sys = load_system(matrices)?;
    let pencil = build_pencil(&sys, kind, args.omega, args.n)?;
    let exact = reference_eigenvalues(&pencil)?;
    if args.k > exact.len() {
        return Err(CliError::usage(format!(
            "--k {} exceeds the {} eigenvalues of the pencil",
            args.k,
            exact.len()
        )));
    }

    let jobs = sweep_jobs(&solvers, &m_values);
    let pool = thread_pool(deterministic)?;
    let mut runs: Vec<MethodRun> = pool.install(|| {
        jobs.par_iter()
            .map(|&(s, m)| run_method(&pencil, s, m, args.k, &exact))
            .collect()
    });
    if deterministic {
        runs.iter_mut().for_each(|r| r.elapsed = 0.0);
    }
    let report = SweepReport::assemble(&pencil, &solvers, &m_values, args.k, &exact, runs)?;

    prepare_out(out)?;
    let mut w = create(&out.join("errors.csv"))?;
    report.write_errors_csv(&mut w)?;
    w.flush()?;
    let mut w = create(&out.join("scores.csv"))?;
    report.write_scores_csv(&mut w)?;
    w.flush()?;
    write_json(&out.join("report.json"), &report)?;

    let mut manifest = RunManifest::new("compare", vec![matrices.clone()], out, deterministic);
    manifest.kind = Some(kind.name());
    manifest.omega = args.omega;
    manifest.n_ratio = args.n;
    manifest.methods = solvers.iter().map(|s| s.to_string()).collect();
    manifest.m_range = Some(range);
    manifest.k = Some(args.k);
    manifest.write()?;

    for s in &report.scores {
        println!("{:<8} score {:>6.1}", s.solver.name(), s.score);
    }
    let failed = report.runs.iter().filter(|r| r.failure.is_some()).count();
    if failed > 0 {
        return Err(CliError::Numerical(format!(
            "{failed} of {} runs failed; see {}",
            report.runs.len(),
            out.join("errors.csv").display()
        )));
    }
    Ok(())
}

fn compare_tables(tables: &PathBuf, args: &CompareArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(tables)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", tables.display())))?;
    let tables_doc = ReplayTables::from_json(&text)?;
    let mut rows: Vec<ReplayRow> = Vec::new();
    for scenario in &tables_doc.scenarios {
        rows.extend(replay(scenario)?);
    }
    let out = &args.common.out;
    prepare_out(out)?;
    let mut w = create(&out.join("replay.csv"))?;
    write_replay_csv(&rows, &mut w)?;
    w.flush()?;
    write_json(&out.join("replay.json"), &rows)?;

    let mut manifest = RunManifest::new(
        "compare",
        vec![tables.clone()],
        out,
        args.common.deterministic,
    );
    manifest.methods = tables_doc
        .scenarios
        .first()
        .map(|s| s.methods.iter().map(|c| c.method.clone()).collect())
        .unwrap_or_default();
    manifest.write()?;

    for r in &rows {
        println!(
            "{:<16} {:<8} {:>14.2} (reported {:.2})",
            r.scenario, r.method, r.error, r.reported_error
        );
    }
    Ok(())
}

pub fn campbell(args: &CampbellArgs) -> CliResult<()> {
    check_k(args.k)?;
    let m = reduced_order(args.method, args.m)?;
    let solver = match args.method {
        Solver::Exact => ModalSolver::Exact,
        Solver::Reduction(method) => ModalSolver::Reduced {
            method,
            m: m.expect("checked above"),
        },
    };
    if let Some(bad) = args.n_list.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(CliError::usage(format!(
            "--n-list entries must be positive, got {bad}"
        )));
    }
    let sys = load_system(&args.matrices)?;
    let grid = &args.omega_grid.0;
    let table = campbell_sweep(&sys, grid, &args.n_list, args.k, solver)?;

    let out = &args.common.out;
    prepare_out(out)?;
    let mut w = create(&out.join("frequencies.csv"))?;
    table.write_frequencies_csv(&mut w)?;
    w.flush()?;
    let mut w = create(&out.join("crossings.csv"))?;
    table.write_crossings_csv(&mut w)?;
    w.flush()?;

    let mut manifest = RunManifest::new(
        "campbell",
        vec![args.matrices.clone()],
        out,
        args.common.deterministic,
    );
    manifest.methods = vec![args.method.to_string()];
    manifest.m = m;
    manifest.k = Some(args.k);
    manifest.omega_grid = Some(grid.clone());
    manifest.n_list = Some(args.n_list.clone());
    manifest.write()?;

    println!(
        "{} spin speeds, {} crossings → {}",
        grid.len(),
        table.crossings.len(),
        out.display()
    );
    Ok(())
}
