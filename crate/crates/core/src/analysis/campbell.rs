use std::io::Write;

use serde::Serialize;

use super::report::csv_f64;
use crate::error::{Error, Result};
use crate::krylov::{run_reduction, Method, ReductionSpec};
use crate::linalg::C64;
use crate::qep::{exact_eigenvalues, modal_pencil};
use crate::rotor::SystemMatrices;

/// How each grid point's modal problem is solved.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModalSolver {
    Exact,
    Reduced { method: Method, m: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CampbellPoint {
    pub omega: f64,
    pub mode: usize,
    /// `NaN` when fewer than `k` positive frequencies were found.
    pub w_d: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    pub n_ratio: f64,
    pub mode: usize,
    /// Spin speed of the crossing (rad/s).
    pub omega: f64,
    /// `n·Ω` at the crossing.
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampbellTable {
    pub omegas: Vec<f64>,
    pub k: usize,
    /// `frequencies[g][i]`: `i`-th damped frequency at grid point `g`.
    pub frequencies: Vec<Vec<f64>>,
    pub crossings: Vec<Crossing>,
}

impl CampbellTable {
    pub fn points(&self) -> Vec<CampbellPoint> {
        let mut out = Vec::with_capacity(self.omegas.len() * self.k);
        for (g, &omega) in self.omegas.iter().enumerate() {
            for (i, &w_d) in self.frequencies[g].iter().enumerate() {
                out.push(CampbellPoint {
                    omega,
                    mode: i + 1,
                    w_d,
                });
            }
        }
        out
    }

    pub fn write_frequencies_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "omega,mode,w_d")?;
        for p in self.points() {
            writeln!(w, "{},{},{}", csv_f64(p.omega), p.mode, csv_f64(p.w_d))?;
        }
        Ok(())
    }

    pub fn write_crossings_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n_ratio,mode,omega,frequency")?;
        for c in &self.crossings {
            writeln!(
                w,
                "{},{},{},{}",
                csv_f64(c.n_ratio),
                c.mode,
                csv_f64(c.omega),
                csv_f64(c.frequency)
            )?;
        }
        Ok(())
    }
}

/// Roots with `Im s ≤ OSCILLATION_TOL·|s|` are numerically real (overdamped)
/// and carry no damped frequency.
pub const OSCILLATION_TOL: f64 = 1e-8;

/// Damped frequencies `Im s > 0` of the `k` oscillating modes of smallest
/// `|s|`, ascending; padded with `NaN` when fewer exist.
///
/// Selecting by `|s|` rather than by `Im s` keeps overdamped high-order modes,
/// whose gyroscopic coupling can leave them a small imaginary part, out of
/// the low end of the diagram.
pub fn damped_frequencies(eigenvalues: &[C64], k: usize) -> Vec<f64> {
    let mut modes: Vec<C64> = eigenvalues
        .iter()
        .copied()
        .filter(|z| z.im > OSCILLATION_TOL * z.norm())
        .collect();
    modes.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let mut f: Vec<f64> = modes.iter().take(k).map(|z| z.im).collect();
    f.sort_by(f64::total_cmp);
    f.resize(k, f64::NAN);
    f
}

fn modal_frequencies(
    sys: &SystemMatrices,
    omega: f64,
    k: usize,
    solver: ModalSolver,
) -> Result<Vec<f64>> {
    let pencil = modal_pencil(sys, omega)?;
    let values = match solver {
        ModalSolver::Exact => exact_eigenvalues(&pencil)?,
        ModalSolver::Reduced { method, m } => {
            let spec = ReductionSpec::new(method, m, pencil.dof());
            run_reduction(&pencil, &spec)?.eigenvalues()
        }
    };
    Ok(damped_frequencies(&values, k))
}

/// Crossings of each frequency curve with the lines `w = nΩ`, located by
/// linear interpolation between neighbouring grid points.
pub fn find_crossings(omegas: &[f64], frequencies: &[Vec<f64>], n_ratios: &[f64]) -> Vec<Crossing> {
    let mut out = Vec::new();
    let k = frequencies.first().map_or(0, Vec::len);
    for &n in n_ratios {
        for mode in 0..k {
            let f = |g: usize| frequencies[g][mode] - n * omegas[g];
            for g in 0..omegas.len() {
                let fa = f(g);
                if !fa.is_finite() {
                    continue;
                }
                if fa == 0.0 {
                    out.push(Crossing {
                        n_ratio: n,
                        mode: mode + 1,
                        omega: omegas[g],
                        frequency: n * omegas[g],
                    });
                    continue;
                }
                if g + 1 == omegas.len() {
                    continue;
                }
                let fb = f(g + 1);
                if fb.is_finite() && fb != 0.0 && (fa < 0.0) != (fb < 0.0) {
                    let (oa, ob) = (omegas[g], omegas[g + 1]);
                    let omega = oa + fa * (ob - oa) / (fa - fb);
                    out.push(Crossing {
                        n_ratio: n,
                        mode: mode + 1,
                        omega,
                        frequency: n * omega,
                    });
                }
            }
        }
    }
    out
}

/// Damped frequencies over a spin-speed grid plus their crossings with the
/// excitation lines `nΩ`.
pub fn campbell_sweep(
    sys: &SystemMatrices,
    omegas: &[f64],
    n_ratios: &[f64],
    k: usize,
    solver: ModalSolver,
) -> Result<CampbellTable> {
    if omegas.is_empty() {
        return Err(Error::InvalidInput("spin-speed grid is empty".into()));
    }
    if omegas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(
            "spin-speed grid must be strictly ascending".into(),
        ));
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let frequencies = omegas
        .iter()
        .map(|&o| modal_frequencies(sys, o, k, solver))
        .collect::<Result<Vec<_>>>()?;
    let crossings = find_crossings(omegas, &frequencies, n_ratios);
    Ok(CampbellTable {
        omegas: omegas.to_vec(),
        k,
        frequencies,
        crossings,
    })
}
