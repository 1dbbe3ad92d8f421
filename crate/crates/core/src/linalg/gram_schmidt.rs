//! Modified Gram–Schmidt with one optional reorthogonalization pass.
//!
//! A vector `w` is swept against every basis column once. If the sweep
//! removed so much that `‖w_after‖ < η·‖w_before‖`, the sweep is repeated
//! exactly once. A residual with `‖w‖ ≤ 1e−12·‖w_before‖` is treated as a
//! breakdown: the candidate direction already lies in the span.

use super::matrix::{axpy, dotc, norm2, CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Residual norms at or below this fraction of the incoming norm count as zero.
pub const BREAKDOWN_TOL: f64 = 1e-12;

/// Reorthogonalization threshold used throughout the experiments, `√2/2`.
pub const DEFAULT_ETA: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Outcome of orthogonalizing one vector against a basis.
#[derive(Clone, Debug)]
pub struct GsOutcome {
    /// The residual after one or two sweeps (not normalized).
    pub vector: Vec<C64>,
    /// Norm of `vector`.
    pub norm: f64,
    /// Norm of the input before any sweep.
    pub input_norm: f64,
    /// Accumulated projection coefficients `c` with `w_in = V c + vector`.
    pub coefficients: Vec<C64>,
    /// Whether the second sweep ran.
    pub reorthogonalized: bool,
    /// False when the residual is numerically zero.
    pub accepted: bool,
    /// First-sweep projections performed (one per basis column).
    pub projections: usize,
}

/// One modified Gram–Schmidt sweep over the first `ncols` columns of `basis`,
/// accumulating coefficients into `coeffs`.
fn mgs_sweep(w: &mut [C64], basis: &CMatrix, ncols: usize, coeffs: &mut [C64]) {
    for (i, c) in coeffs.iter_mut().enumerate().take(ncols) {
        let v = basis.col(i);
        let h = dotc(v, w);
        axpy(-h, v, w);
        *c += h;
    }
}

/// Orthogonalizes `w` against the first `ncols` columns of `basis`.
pub fn orthogonalize_prefix(
    w: &[C64],
    basis: &CMatrix,
    ncols: usize,
    eta: f64,
) -> Result<GsOutcome> {
    if ncols > 0 && w.len() != basis.rows() {
        return Err(Error::dim("orthogonalize_against", basis.rows(), w.len()));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "eta must lie in (0, 1], got {eta}"
        )));
    }
    let mut r = w.to_vec();
    let mut coefficients = vec![ZERO; ncols];
    let input_norm = norm2(&r);

    mgs_sweep(&mut r, basis, ncols, &mut coefficients);
    let mut norm = norm2(&r);
    let mut reorthogonalized = false;
    if ncols > 0 && norm < eta * input_norm {
        mgs_sweep(&mut r, basis, ncols, &mut coefficients);
        norm = norm2(&r);
        reorthogonalized = true;
    }
    let accepted = input_norm > 0.0 && norm.is_finite() && norm > BREAKDOWN_TOL * input_norm;

    Ok(GsOutcome {
        vector: r,
        norm,
        input_norm,
        coefficients,
        reorthogonalized,
        accepted,
        projections: ncols,
    })
}

/// Orthogonalizes `w` against every column of `basis`.
pub fn orthogonalize_against(w: &[C64], basis: &CMatrix, eta: f64) -> Result<GsOutcome> {
    orthogonalize_prefix(w, basis, basis.cols(), eta)
}

/// Orthonormal column set grown one vector at a time, with the counters the
/// reduction procedures report.
#[derive(Clone, Debug)]
pub struct OrthonormalBasis {
    columns: CMatrix,
    projections: usize,
    reorthogonalizations: usize,
    breakdown: bool,
}

impl OrthonormalBasis {
    pub fn empty(dim: usize) -> Self {
        Self {
            columns: CMatrix::zeros(dim, 0),
            projections: 0,
            reorthogonalizations: 0,
            breakdown: false,
        }
    }

    /// Starts a basis from `v / ‖v‖`.
    pub fn from_start(v: &[C64]) -> Result<Self> {
        let mut basis = Self::empty(v.len());
        let n = norm2(v);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidInput(
                "start vector has zero or non-finite norm".into(),
            ));
        }
        basis.push_unit(v.iter().map(|&z| z / n).collect::<Vec<_>>().as_slice())?;
        Ok(basis)
    }

    /// Wraps columns that are already orthonormal (e.g. identity columns).
    pub fn from_orthonormal_columns(columns: CMatrix) -> Self {
        Self {
            columns,
            projections: 0,
            reorthogonalizations: 0,
            breakdown: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.columns.rows()
    }

    pub fn len(&self) -> usize {
        self.columns.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.cols() == 0
    }

    pub fn columns(&self) -> &CMatrix {
        &self.columns
    }

    pub fn into_columns(self) -> CMatrix {
        self.columns
    }

    pub fn col(&self, j: usize) -> &[C64] {
        self.columns.col(j)
    }

    pub fn projection_count(&self) -> usize {
        self.projections
    }

    pub fn reorth_count(&self) -> usize {
        self.reorthogonalizations
    }

    pub fn breakdown(&self) -> bool {
        self.breakdown
    }

    pub fn mark_breakdown(&mut self) {
        self.breakdown = true;
    }

    pub fn add_projections(&mut self, n: usize) {
        self.projections += n;
    }

    pub fn add_reorthogonalizations(&mut self, n: usize) {
        self.reorthogonalizations += n;
    }

    /// Orthogonalizes `w` against the current columns and records counters.
    pub fn orthogonalize(&mut self, w: &[C64], eta: f64) -> Result<GsOutcome> {
        let out = orthogonalize_against(w, &self.columns, eta)?;
        self.projections += out.projections;
        if out.reorthogonalized {
            self.reorthogonalizations += 1;
        }
        Ok(out)
    }

    /// Appends `outcome.vector / outcome.norm`; the caller checked `accepted`.
    pub fn push_outcome(&mut self, outcome: &GsOutcome) -> Result<()> {
        let inv = 1.0 / outcome.norm;
        let unit: Vec<C64> = outcome.vector.iter().map(|&z| z * inv).collect();
        self.push_unit(&unit)
    }

    fn push_unit(&mut self, unit: &[C64]) -> Result<()> {
        self.columns.push_column(unit)
    }

    pub fn truncate(&mut self, cols: usize) {
        self.columns.truncate_cols(cols);
    }

    /// `max |VᴴV − I|`.
    pub fn orthonormality_error(&self) -> f64 {
        orthonormality_error(&self.columns)
    }
}

/// `max |VᴴV − I|` for any column set.
pub fn orthonormality_error(v: &CMatrix) -> f64 {
    let k = v.cols();
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let g = dotc(v.col(i), v.col(j));
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Relative residual of projecting `x` onto the span of orthonormal `v`:
/// `‖x − VVᴴx‖ / ‖x‖`, with two projection sweeps for accuracy.
pub fn span_residual(v: &CMatrix, x: &[C64]) -> f64 {
    let nx = norm2(x);
    if nx == 0.0 {
        return 0.0;
    }
    let mut r = x.to_vec();
    let mut scratch = vec![ZERO; v.cols()];
    mgs_sweep(&mut r, v, v.cols(), &mut scratch);
    mgs_sweep(&mut r, v, v.cols(), &mut scratch);
    norm2(&r) / nx
}

/// Upper bound on the sine of the largest principal angle between the spans of
/// two orthonormal column sets: the larger Frobenius norm of `(I − P₁)V₂` and
/// `(I − P₂)V₁`. Spans of different dimension compare as 1.
pub fn principal_angle_bound(v1: &CMatrix, v2: &CMatrix) -> f64 {
    if v1.cols() != v2.cols() {
        return 1.0;
    }
    let one_way = |a: &CMatrix, b: &CMatrix| -> f64 {
        let mut total = 0.0;
        for j in 0..b.cols() {
            let r = span_residual(a, b.col(j));
            total += r * r;
        }
        total.sqrt()
    };
    one_way(v1, v2).max(one_way(v2, v1))
}
