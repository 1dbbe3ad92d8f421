use std::time::Instant;

use serde::Serialize;

use super::bases::{
    arnoldi_basis_linearized, lqar_basis, qar_basis_with_shift, qar_power_estimate, soar_basis,
    tgsar1_basis, tgsar2_basis, toar_basis,
};
use super::spec::{Method, ReductionSpec};
use crate::analysis::{canonical_order, report::ser_c64_vec, SortMode};
use crate::error::{Error, Result};
use crate::linalg::{dense_eig, dense_eig_unbalanced, norm2, CMatrix, OrthonormalBasis, C64};
use crate::qep::{invert, EigenPair, QepOperators, QuadraticPencil};

/// Eigenvalues of the linearized reduced problem below this fraction of the
/// largest are treated as `s̃ = ∞` and dropped.
pub const SMALL_EIGENVALUE_TOL: f64 = 1e-12;

/// `(VᴴAV, VᴴBV)` from `2d` operator calls.
pub fn galerkin_reduce<O: QepOperators + ?Sized>(
    ops: &O,
    basis: &CMatrix,
) -> Result<(CMatrix, CMatrix)> {
    let d = basis.cols();
    if d == 0 {
        return Err(Error::InvalidInput(
            "cannot project onto an empty basis".into(),
        ));
    }
    if basis.rows() != ops.dim() {
        return Err(Error::dim("galerkin_reduce", ops.dim(), basis.rows()));
    }
    let n = basis.rows();
    let mut av = CMatrix::zeros(n, d);
    let mut bv = CMatrix::zeros(n, d);
    for j in 0..d {
        av.col_mut(j).copy_from_slice(&ops.apply_a(basis.col(j))?);
        bv.col_mut(j).copy_from_slice(&ops.apply_b(basis.col(j))?);
    }
    Ok((basis.adjoint_mul(&av)?, basis.adjoint_mul(&bv)?))
}

/// A Ritz pair in reduced coordinates: `ṽ ∝ V w` (or `z = U y` for the
/// linearized Arnoldi basis).
#[derive(Clone, Debug, PartialEq)]
pub struct RitzVector {
    pub lambda: C64,
    pub coords: Vec<C64>,
}

fn eigen_threshold(values: &[C64]) -> f64 {
    let max = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    SMALL_EIGENVALUE_TOL * max
}

/// Solves the reduced QEP through its linearization `[[0, I], [B_Q, A_Q]]`,
/// maps `λ ↦ s̃ = 1/λ` and lifts `ṽ = V w`.
pub fn solve_reduced(
    reduced_a: &CMatrix,
    reduced_b: &CMatrix,
    basis: &CMatrix,
    pencil: &QuadraticPencil,
) -> Result<Vec<EigenPair>> {
    Ok(
        solve_reduced_with_ritz(reduced_a, reduced_b, basis, pencil)?
            .into_iter()
            .map(|(p, _)| p)
            .collect(),
    )
}

fn solve_reduced_with_ritz(
    reduced_a: &CMatrix,
    reduced_b: &CMatrix,
    basis: &CMatrix,
    pencil: &QuadraticPencil,
) -> Result<Vec<(EigenPair, RitzVector)>> {
    let d = reduced_a.rows();
    if !reduced_a.is_square() || reduced_b.rows() != d || reduced_b.cols() != d {
        return Err(Error::dim(
            "solve_reduced",
            format!("two {d}x{d} matrices"),
            format!("{}x{}", reduced_b.rows(), reduced_b.cols()),
        ));
    }
    if basis.cols() != d {
        return Err(Error::dim("solve_reduced", d, basis.cols()));
    }
    let mut l = CMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        l[(i, d + i)] = C64::new(1.0, 0.0);
    }
    l.set_block(d, 0, reduced_b);
    l.set_block(d, d, reduced_a);
    let eig = dense_eig(&l, true)?;
    let vecs = eig.eigenvectors.expect("requested eigenvectors");
    let tol = eigen_threshold(&eig.eigenvalues);

    let mut out = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.norm() < tol || lambda.norm() == 0.0 {
            continue;
        }
        let z = vecs.col(k);
        // z = [w; λw]
        let w = if norm2(&z[d..]) > 0.0 {
            z[d..].to_vec()
        } else {
            z[..d].to_vec()
        };
        let v = basis.matvec(&w)?;
        let pair = EigenPair::new(pencil, lambda.inv(), v)?;
        out.push((pair, RitzVector { lambda, coords: w }));
    }
    if out.is_empty() {
        return Err(Error::EmptySpectrum(format!(
            "all {} eigenvalues of the {d}-dimensional reduced problem were negligible",
            2 * d
        )));
    }
    Ok(out)
}

fn solve_hessenberg(
    h: &CMatrix,
    basis: &CMatrix,
    pencil: &QuadraticPencil,
) -> Result<Vec<(EigenPair, RitzVector)>> {
    let n = pencil.dof();
    let eig = dense_eig_unbalanced(h, true)?;
    let vecs = eig.eigenvectors.expect("requested eigenvectors");
    let tol = eigen_threshold(&eig.eigenvalues);
    let mut out = Vec::new();
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.norm() < tol || lambda.norm() == 0.0 {
            continue;
        }
        let y = vecs.col(k).to_vec();
        let z = basis.matvec(&y)?;
        // z = [x; λx]
        let v = if norm2(&z[n..]) > 0.0 {
            z[n..].to_vec()
        } else {
            z[..n].to_vec()
        };
        let pair = EigenPair::new(pencil, lambda.inv(), v)?;
        out.push((pair, RitzVector { lambda, coords: y }));
    }
    if out.is_empty() {
        return Err(Error::EmptySpectrum(format!(
            "all eigenvalues of the {}x{} Hessenberg matrix were negligible",
            h.rows(),
            h.cols()
        )));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum ReducedOperators {
    /// `VᴴAV`, `VᴴBV`.
    Projected { a: CMatrix, b: CMatrix },
    /// `UᴴLU` for the linearized Arnoldi basis.
    Hessenberg(CMatrix),
}

/// Wall-clock seconds per phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Timing {
    pub lu: f64,
    pub basis: f64,
    pub projection: f64,
    pub solve: f64,
    pub total: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub projection_count: usize,
    pub reorth_count: usize,
    pub breakdown: bool,
    pub basis_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qar_shift: Option<f64>,
    pub timing: Timing,
}

#[derive(Clone, Debug)]
pub struct ReductionResult {
    pub method: Method,
    pub m: usize,
    pub basis: OrthonormalBasis,
    pub reduced: ReducedOperators,
    /// Canonically ordered approximate eigenpairs.
    pub pairs: Vec<EigenPair>,
    /// Reduced-coordinate vectors aligned with `pairs`.
    pub ritz: Vec<RitzVector>,
    pub diagnostics: Diagnostics,
}

/// JSON form of a [`ReductionResult`].
#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    pub method: Method,
    pub m: usize,
    #[serde(serialize_with = "ser_c64_vec")]
    pub eigenvalues: Vec<C64>,
    pub residuals: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl ReductionResult {
    pub fn eigenvalues(&self) -> Vec<C64> {
        self.pairs.iter().map(|p| p.s).collect()
    }

    pub fn report(&self) -> ReductionReport {
        ReductionReport {
            method: self.method,
            m: self.m,
            eigenvalues: self.eigenvalues(),
            residuals: self.pairs.iter().map(|p| p.residual).collect(),
            diagnostics: self.diagnostics,
        }
    }

    /// Scaled norm of the projected residual of every Ritz pair, which the
    /// Galerkin condition makes zero up to rounding:
    /// `‖Vᴴ(s̃Bṽ + Aṽ − ṽ/s̃)‖ / ((|s̃|‖B_Q‖ + ‖A_Q‖ + 1/|s̃|)‖ṽ‖)`, or
    /// `‖Uᴴ(Lz − λz)‖ / ((‖H‖ + |λ|)‖z‖)` for the linearized basis.
    pub fn galerkin_residuals<O: QepOperators + ?Sized>(&self, ops: &O) -> Result<Vec<f64>> {
        let v = self.basis.columns();
        let mut out = Vec::with_capacity(self.ritz.len());
        match &self.reduced {
            ReducedOperators::Projected { a, b } => {
                let (na, nb) = (a.norm_fro(), b.norm_fro());
                for r in &self.ritz {
                    let s = r.lambda.inv();
                    let vt = v.matvec(&r.coords)?;
                    let av = ops.apply_a(&vt)?;
                    let bv = ops.apply_b(&vt)?;
                    let res: Vec<C64> = (0..vt.len())
                        .map(|i| s * bv[i] + av[i] - vt[i] * r.lambda)
                        .collect();
                    let proj = v.adjoint_matvec(&res)?;
                    let scale = (s.norm() * nb + na + r.lambda.norm()) * norm2(&vt);
                    out.push(norm2(&proj) / scale);
                }
            }
            ReducedOperators::Hessenberg(h) => {
                let n = ops.dim();
                let nh = h.norm_fro();
                for r in &self.ritz {
                    let z = v.matvec(&r.coords)?;
                    let (top, bot) = z.split_at(n);
                    let mut lz = bot.to_vec();
                    let mut lower = ops.apply_b(top)?;
                    for (x, y) in lower.iter_mut().zip(ops.apply_a(bot)?) {
                        *x += y;
                    }
                    lz.extend(lower);
                    let res: Vec<C64> = lz.iter().zip(&z).map(|(a, b)| a - r.lambda * b).collect();
                    let proj = v.adjoint_matvec(&res)?;
                    out.push(norm2(&proj) / ((nh + r.lambda.norm()) * norm2(&z)));
                }
            }
        }
        Ok(out)
    }
}

/// Runs the basis, projection and reduced solve against already-inverted
/// operators. `timing.lu` is left at zero.
pub fn reduce_with<O: QepOperators + ?Sized>(
    ops: &O,
    pencil: &QuadraticPencil,
    spec: &ReductionSpec,
) -> Result<ReductionResult> {
    spec.validate(pencil.dof())?;
    if ops.dim() != pencil.dof() {
        return Err(Error::dim("reduce_with", pencil.dof(), ops.dim()));
    }
    let mut timing = Timing::default();
    let t = Instant::now();
    let mut qar_shift = None;
    let (basis, hessenberg) = match spec.method {
        Method::Arnoldi => {
            let lin = arnoldi_basis_linearized(ops, spec)?;
            (lin.basis, Some(lin.hessenberg))
        }
        Method::Soar => (soar_basis(ops, spec)?, None),
        Method::Toar => (toar_basis(ops, spec)?, None),
        Method::Lqar => (lqar_basis(ops, spec)?, None),
        Method::Qar => {
            let shift = qar_power_estimate(ops, spec)?;
            qar_shift = Some(shift);
            (qar_basis_with_shift(ops, spec, shift)?, None)
        }
        Method::Tgsar1 => (tgsar1_basis(ops, spec)?, None),
        Method::Tgsar2 => (tgsar2_basis(ops, spec)?, None),
    };
    timing.basis = t.elapsed().as_secs_f64();

    let (reduced, solved) = match hessenberg {
        Some(h) => {
            let t = Instant::now();
            let solved = solve_hessenberg(&h, basis.columns(), pencil)?;
            timing.solve = t.elapsed().as_secs_f64();
            (ReducedOperators::Hessenberg(h), solved)
        }
        None => {
            let t = Instant::now();
            let (a, b) = galerkin_reduce(ops, basis.columns())?;
            timing.projection = t.elapsed().as_secs_f64();
            let t = Instant::now();
            let solved = solve_reduced_with_ritz(&a, &b, basis.columns(), pencil)?;
            timing.solve = t.elapsed().as_secs_f64();
            (ReducedOperators::Projected { a, b }, solved)
        }
    };

    let values: Vec<C64> = solved.iter().map(|(p, _)| p.s).collect();
    let mode = if pencil.is_real() {
        SortMode::PairConjugates
    } else {
        SortMode::Plain
    };
    let order = canonical_order(&values, mode);
    let mut slots: Vec<Option<(EigenPair, RitzVector)>> = solved.into_iter().map(Some).collect();
    let (pairs, ritz): (Vec<_>, Vec<_>) = order
        .into_iter()
        .map(|i| slots[i].take().expect("permutation"))
        .unzip();

    timing.total = timing.basis + timing.projection + timing.solve;
    let diagnostics = Diagnostics {
        projection_count: basis.projection_count(),
        reorth_count: basis.reorth_count(),
        breakdown: basis.breakdown(),
        basis_dim: basis.len(),
        qar_shift,
        timing,
    };
    Ok(ReductionResult {
        method: spec.method,
        m: spec.m,
        basis,
        reduced,
        pairs,
        ritz,
        diagnostics,
    })
}

/// Factor `K`, build the basis, project and solve.
pub fn run_reduction(pencil: &QuadraticPencil, spec: &ReductionSpec) -> Result<ReductionResult> {
    spec.validate(pencil.dof())?;
    let t = Instant::now();
    let ops = invert(pencil)?;
    let lu = t.elapsed().as_secs_f64();
    let mut result = reduce_with(&ops, pencil, spec)?;
    result.diagnostics.timing.lu = lu;
    result.diagnostics.timing.total += lu;
    Ok(result)
}
