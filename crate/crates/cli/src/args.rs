use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rotor_krylov::analysis::Solver;
use rotor_krylov::krylov::Method;

#[derive(Parser, Debug)]
#[command(
    name = "rotor-krylov",
    version,
    about = "Krylov reduction of damped rotor QEPs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rotor model operations.
    #[command(subcommand)]
    Model(ModelCommand),
    /// Solve one pencil, full order or reduced.
    Solve(SolveArgs),
    /// Compare methods over a range of reduced orders, or replay stored tables.
    Compare(CompareArgs),
    /// Damped frequencies over a spin-speed grid and their crossings with nΩ.
    Campbell(CampbellArgs),
}

#[derive(Subcommand, Debug)]
pub enum ModelCommand {
    /// Assemble a rotor config and export its matrices.
    Build {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Modal,
    Critical,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Modal => "modal",
            Kind::Critical => "critical",
        }
    }
}

#[derive(Args, Debug)]
pub struct Common {
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Single-threaded run with timings written as zero, so identical
    /// inputs give byte-identical files.
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Args, Debug)]
pub struct PencilArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Spin speed Ω (rad/s) for the modal pencil.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Excitation ratio n for the critical-speed pencil.
    #[arg(long)]
    pub n: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Directory written by `model build`.
    pub matrices: PathBuf,
    #[command(flatten)]
    pub pencil: PencilArgs,
    /// `exact` or a reduction method.
    #[arg(long, value_parser = parse_solver)]
    pub method: Solver,
    /// Reduced order; required for reduction methods.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Directory written by `model build` (not used with --from-tables).
    #[arg(required_unless_present = "from_tables")]
    pub matrices: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "from_tables")]
    pub kind: Option<Kind>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub n: Option<f64>,
    /// Comma-separated solvers; defaults to the six comparison methods.
    #[arg(long, value_delimiter = ',', value_parser = parse_solver)]
    pub methods: Vec<Solver>,
    /// Inclusive range `start:end:step`, or a single order.
    #[arg(long, value_parser = parse_m_range, required_unless_present = "from_tables")]
    pub m_range: Option<MRange>,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Recompute errors of stored eigenvalue tables instead of solving.
    #[arg(long, conflicts_with_all = ["matrices", "kind", "m_range"])]
    pub from_tables: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct CampbellArgs {
    pub matrices: PathBuf,
    /// Spin-speed grid `start:end:step` (rad/s), or a single value.
    #[arg(long, value_parser = parse_grid)]
    pub omega_grid: Grid,
    /// Comma-separated excitation ratios.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub n_list: Vec<f64>,
    #[arg(long, default_value_t = 6)]
    pub k: usize,
    #[arg(long, value_parser = parse_solver, default_value = "exact")]
    pub method: Solver,
    #[arg(long)]
    pub m: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct MRange {
    pub start: usize,
    pub end: usize,
    pub step: usize,
}

impl MRange {
    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.end).step_by(self.step).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn parse_solver(s: &str) -> Result<Solver, String> {
    s.parse().map_err(|e: rotor_krylov::Error| e.to_string())
}

fn split_range(s: &str) -> Result<Vec<&str>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 | 3 => Ok(parts),
        _ => Err(format!(
            "expected `start:end:step` or a single value, got `{s}`"
        )),
    }
}

pub fn parse_m_range(s: &str) -> Result<MRange, String> {
    let parts = split_range(s)?;
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let r = match nums[..] {
        [m] => MRange {
            start: m,
            end: m,
            step: 1,
        },
        [start, end, step] => MRange { start, end, step },
        _ => unreachable!(),
    };
    if r.start == 0 {
        return Err("reduced order must be at least 1".into());
    }
    if r.step == 0 || r.end < r.start {
        return Err(format!("empty range `{s}`"));
    }
    Ok(r)
}

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts = split_range(s)?;
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if nums.iter().any(|x| !x.is_finite()) {
        return Err(format!("non-finite grid bound in `{s}`"));
    }
    match nums[..] {
        [x] => Ok(Grid(vec![x])),
        [start, end, step] => {
            if step <= 0.0 || end < start {
                return Err(format!("empty grid `{s}`"));
            }
            // tolerate an end point that is off by rounding
            let count = ((end - start) / step + 1e-9).floor() as usize + 1;
            Ok(Grid((0..count).map(|i| start + step * i as f64).collect()))
        }
        _ => unreachable!(),
    }
}

pub fn default_methods() -> Vec<Solver> {
    Method::COMPARISON
        .iter()
        .map(|&m| Solver::Reduction(m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_range_is_inclusive() {
        let r = parse_m_range("10:40:2").unwrap();
        assert_eq!(r.values().len(), 16);
        assert_eq!(r.values().last(), Some(&40));
        assert_eq!(parse_m_range("7").unwrap().values(), vec![7]);
    }

    #[test]
    fn bad_ranges_are_rejected() {
        assert!(parse_m_range("0:10:2").is_err());
        assert!(parse_m_range("10:5:1").is_err());
        assert!(parse_m_range("1:5:0").is_err());
        assert!(parse_m_range("1:5").is_err());
        assert!(parse_m_range("a:5:1").is_err());
    }

    #[test]
    fn grid_includes_the_end_point() {
        let g = parse_grid("0:1000:50").unwrap().0;
        assert_eq!(g.len(), 21);
        assert_eq!(g[20], 1000.0);
        assert_eq!(parse_grid("0:1:0.1").unwrap().0.len(), 11);
        assert_eq!(parse_grid("250").unwrap().0, vec![250.0]);
        assert!(parse_grid("0:10:-1").is_err());
    }
}
