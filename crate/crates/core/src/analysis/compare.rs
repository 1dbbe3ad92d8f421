use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::metrics::{error_metric, RankHistogram};
use super::report::{csv_f64, de_c64_vec, ser_c64_vec};
use crate::error::{Error, Result};
use crate::krylov::{run_reduction, Method, ReductionSpec};
use crate::linalg::C64;
use crate::qep::{exact_eigenvalues, PencilKind, QuadraticPencil};

/// A reduction method or the full-order reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Exact,
    #[serde(untagged)]
    Reduction(Method),
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Exact => "exact",
            Solver::Reduction(m) => m.name(),
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("exact") {
            Ok(Solver::Exact)
        } else {
            s.parse().map(Solver::Reduction)
        }
    }
}

/// Outcome of one solver at one order. Failures are recorded, not raised.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodRun {
    pub solver: Solver,
    pub m: usize,
    /// The first `k` canonically ordered eigenvalues.
    #[serde(serialize_with = "ser_c64_vec")]
    pub eigenvalues: Vec<C64>,
    pub error: Option<f64>,
    pub elapsed: f64,
    pub breakdown: bool,
    pub basis_dim: usize,
    pub failure: Option<String>,
}

impl MethodRun {
    /// The error, or NaN when the run failed.
    pub fn error_or_nan(&self) -> f64 {
        self.error.unwrap_or(f64::NAN)
    }

    fn status(&self) -> &str {
        match (&self.failure, self.breakdown) {
            (Some(_), _) => "failed",
            (None, true) => "breakdown",
            (None, false) => "ok",
        }
    }

    fn failed(solver: Solver, m: usize, elapsed: f64, msg: String) -> Self {
        Self {
            solver,
            m,
            eigenvalues: Vec::new(),
            error: None,
            elapsed,
            breakdown: false,
            basis_dim: 0,
            failure: Some(msg),
        }
    }
}

fn check_k(exact: &[C64], k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if exact.len() < k {
        return Err(Error::InvalidInput(format!(
            "k = {k} exceeds the {} reference eigenvalues",
            exact.len()
        )));
    }
    Ok(())
}

/// Reference eigenvalues in canonical order.
pub fn reference_eigenvalues(pencil: &QuadraticPencil) -> Result<Vec<C64>> {
    exact_eigenvalues(pencil)
}

/// Runs one solver and scores its first `k` eigenvalues against `exact`.
/// `exact` must already be canonically ordered.
pub fn run_method(
    pencil: &QuadraticPencil,
    solver: Solver,
    m: usize,
    k: usize,
    exact: &[C64],
) -> MethodRun {
    let t = Instant::now();
    let outcome = match solver {
        Solver::Exact => reference_eigenvalues(pencil).map(|v| (v, false, 2 * pencil.dof())),
        Solver::Reduction(method) => {
            let spec = ReductionSpec::new(method, m, pencil.dof());
            run_reduction(pencil, &spec).map(|r| {
                (
                    r.eigenvalues(),
                    r.diagnostics.breakdown,
                    r.diagnostics.basis_dim,
                )
            })
        }
    };
    let elapsed = t.elapsed().as_secs_f64();
    let (mut values, breakdown, basis_dim) = match outcome {
        Ok(v) => v,
        Err(e) => return MethodRun::failed(solver, m, elapsed, e.to_string()),
    };
    if values.len() < k {
        return MethodRun::failed(
            solver,
            m,
            elapsed,
            format!("only {} eigenvalues available, {k} requested", values.len()),
        );
    }
    values.truncate(k);
    let error = error_metric(&exact[..k], &values).ok();
    MethodRun {
        solver,
        m,
        eigenvalues: values,
        error,
        elapsed,
        breakdown,
        basis_dim,
        failure: None,
    }
}

fn write_runs_csv<W: Write>(runs: &[MethodRun], mut w: W) -> Result<()> {
    writeln!(w, "method,m,error,elapsed_s,breakdown,basis_dim,status")?;
    for r in runs {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.solver,
            r.m,
            csv_f64(r.error_or_nan()),
            csv_f64(r.elapsed),
            r.breakdown,
            r.basis_dim,
            r.status()
        )?;
    }
    Ok(())
}

/// Several solvers at one order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub kind: PencilKind,
    pub dof: usize,
    pub k: usize,
    #[serde(serialize_with = "ser_c64_vec")]
    pub exact: Vec<C64>,
    pub runs: Vec<MethodRun>,
}

impl ComparisonReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_runs_csv(&self.runs, w)
    }
}

pub fn compare_methods(
    pencil: &QuadraticPencil,
    solvers: &[Solver],
    m: usize,
    k: usize,
    exact: &[C64],
) -> Result<ComparisonReport> {
    check_k(exact, k)?;
    let runs = solvers
        .iter()
        .map(|&s| run_method(pencil, s, m, k, exact))
        .collect();
    Ok(ComparisonReport {
        kind: pencil.kind(),
        dof: pencil.dof(),
        k,
        exact: exact[..k].to_vec(),
        runs,
    })
}

/// `(solver, m)` jobs of a sweep, solver-major.
pub fn sweep_jobs(solvers: &[Solver], m_values: &[usize]) -> Vec<(Solver, usize)> {
    solvers
        .iter()
        .flat_map(|&s| m_values.iter().map(move |&m| (s, m)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodScore {
    pub solver: Solver,
    /// `rank_counts[r]`: rounds in which the solver ranked `r + 1`.
    pub rank_counts: Vec<usize>,
    pub score: f64,
}

/// Several solvers over a range of orders, with rank statistics per order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub kind: PencilKind,
    pub dof: usize,
    pub k: usize,
    pub m_values: Vec<usize>,
    #[serde(serialize_with = "ser_c64_vec")]
    pub exact: Vec<C64>,
    /// Solver-major, in the order of [`sweep_jobs`].
    pub runs: Vec<MethodRun>,
    pub scores: Vec<MethodScore>,
}

impl SweepReport {
    /// Builds the report from runs produced in [`sweep_jobs`] order, possibly
    /// computed concurrently.
    pub fn assemble(
        pencil: &QuadraticPencil,
        solvers: &[Solver],
        m_values: &[usize],
        k: usize,
        exact: &[C64],
        runs: Vec<MethodRun>,
    ) -> Result<Self> {
        check_k(exact, k)?;
        let jobs = sweep_jobs(solvers, m_values);
        if runs.len() != jobs.len() {
            return Err(Error::dim("SweepReport::assemble", jobs.len(), runs.len()));
        }
        if jobs
            .iter()
            .zip(&runs)
            .any(|(&(s, m), r)| r.solver != s || r.m != m)
        {
            return Err(Error::InvalidInput("runs are not in sweep order".into()));
        }
        let mut hist = RankHistogram::new(solvers.len());
        for j in 0..m_values.len() {
            let errors: Vec<f64> = (0..solvers.len())
                .map(|i| runs[i * m_values.len() + j].error_or_nan())
                .collect();
            hist.record(&errors)?;
        }
        let totals = hist.scores();
        let scores = solvers
            .iter()
            .enumerate()
            .map(|(i, &solver)| MethodScore {
                solver,
                rank_counts: hist.counts(i).to_vec(),
                score: totals[i],
            })
            .collect();
        Ok(Self {
            kind: pencil.kind(),
            dof: pencil.dof(),
            k,
            m_values: m_values.to_vec(),
            exact: exact[..k].to_vec(),
            runs,
            scores,
        })
    }

    pub fn write_errors_csv<W: Write>(&self, w: W) -> Result<()> {
        write_runs_csv(&self.runs, w)
    }

    pub fn write_scores_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let n = self.scores.first().map_or(0, |s| s.rank_counts.len());
        write!(w, "method")?;
        for r in 1..=n {
            write!(w, ",rank{r}")?;
        }
        writeln!(w, ",score")?;
        for s in &self.scores {
            write!(w, "{}", s.solver)?;
            for c in &s.rank_counts {
                write!(w, ",{c}")?;
            }
            writeln!(w, ",{}", csv_f64(s.score))?;
        }
        Ok(())
    }
}

pub fn compare_sweep(
    pencil: &QuadraticPencil,
    solvers: &[Solver],
    m_values: &[usize],
    k: usize,
    exact: &[C64],
) -> Result<SweepReport> {
    check_k(exact, k)?;
    let runs = sweep_jobs(solvers, m_values)
        .into_iter()
        .map(|(s, m)| run_method(pencil, s, m, k, exact))
        .collect();
    SweepReport::assemble(pencil, solvers, m_values, k, exact, runs)
}

/// Stored eigenvalue columns, compared position by position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayScenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(serialize_with = "ser_c64_vec", deserialize_with = "de_c64_vec")]
    pub exact: Vec<C64>,
    pub methods: Vec<ReplayColumn>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayColumn {
    pub method: String,
    #[serde(serialize_with = "ser_c64_vec", deserialize_with = "de_c64_vec")]
    pub eigenvalues: Vec<C64>,
    pub reported_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayTables {
    pub scenarios: Vec<ReplayScenario>,
}

impl ReplayTables {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplayRow {
    pub scenario: String,
    pub method: String,
    pub error: f64,
    pub reported_error: f64,
}

/// Recomputes the error of every column against the scenario's reference,
/// in the listed order with no re-sorting.
pub fn replay(scenario: &ReplayScenario) -> Result<Vec<ReplayRow>> {
    scenario
        .methods
        .iter()
        .map(|col| {
            let error = error_metric(&scenario.exact, &col.eigenvalues)?;
            Ok(ReplayRow {
                scenario: scenario.name.clone(),
                method: col.method.clone(),
                error,
                reported_error: col.reported_error,
            })
        })
        .collect()
}

pub fn write_replay_csv<W: Write>(rows: &[ReplayRow], mut w: W) -> Result<()> {
    writeln!(w, "scenario,method,error,reported_error")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.scenario,
            r.method,
            csv_f64(r.error),
            csv_f64(r.reported_error)
        )?;
    }
    Ok(())
}
