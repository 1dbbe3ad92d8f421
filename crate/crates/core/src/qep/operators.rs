use super::pencil::QuadraticPencil;
use crate::error::{Error, Result};
use crate::linalg::{lu_factor, CMatrix, LuFactors, C64};

/// Actions of the inverse-problem operators `A = −K⁻¹C` and `B = −K⁻¹M`,
/// for which `1/s` solves `(1/s)² u = B u + (1/s) A u`.
pub trait QepOperators {
    fn dim(&self) -> usize;
    fn apply_a(&self, x: &[C64]) -> Result<Vec<C64>>;
    fn apply_b(&self, x: &[C64]) -> Result<Vec<C64>>;
}

/// LU-backed `A`, `B` actions; `K` is factored once at construction.
#[derive(Clone, Debug)]
pub struct InverseOperators {
    k_lu: LuFactors,
    c: CMatrix,
    m: CMatrix,
}

impl InverseOperators {
    pub fn k_factors(&self) -> &LuFactors {
        &self.k_lu
    }

    /// Dense `(A, B)`; `O(n³)`, meant for checks and small problems.
    pub fn materialize(&self) -> Result<(CMatrix, CMatrix)> {
        let mut a = self.k_lu.solve_mat(&self.c)?;
        let mut b = self.k_lu.solve_mat(&self.m)?;
        for z in a.as_mut_slice().iter_mut().chain(b.as_mut_slice()) {
            *z = -*z;
        }
        Ok((a, b))
    }

    fn neg_solve(&self, mut y: Vec<C64>) -> Result<Vec<C64>> {
        self.k_lu.solve_in_place(&mut y)?;
        for z in &mut y {
            *z = -*z;
        }
        Ok(y)
    }
}

impl QepOperators for InverseOperators {
    fn dim(&self) -> usize {
        self.k_lu.dim()
    }

    fn apply_a(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.neg_solve(self.c.matvec(x)?)
    }

    fn apply_b(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.neg_solve(self.m.matvec(x)?)
    }
}

/// Explicit `A`, `B` matrices behind the same interface.
#[derive(Clone, Debug)]
pub struct DenseOperators {
    pub a: CMatrix,
    pub b: CMatrix,
}

impl DenseOperators {
    pub fn new(a: CMatrix, b: CMatrix) -> Result<Self> {
        if !a.is_square() || a.rows() != b.rows() || a.cols() != b.cols() {
            return Err(Error::dim(
                "DenseOperators::new",
                format!("two equal square matrices ({}x{})", a.rows(), a.cols()),
                format!("{}x{}", b.rows(), b.cols()),
            ));
        }
        Ok(Self { a, b })
    }
}

impl QepOperators for DenseOperators {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn apply_a(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.a.matvec(x)
    }

    fn apply_b(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.b.matvec(x)
    }
}

/// Factors `K` and wraps the inverse-operator actions.
pub fn invert(pencil: &QuadraticPencil) -> Result<InverseOperators> {
    let k_lu = lu_factor(pencil.k())?;
    if k_lu.is_singular() {
        return Err(Error::Singular(format!(
            "stiffness matrix K is singular (smallest pivot {:.3e}); an unsupported \
             (free-free) rotor has rigid-body modes, so supply a shifted pencil, e.g. \
             replace K by K + σC + σ²M and C by C + 2σM for a shift σ, then map s ↦ s + σ",
            k_lu.min_pivot()
        )));
    }
    Ok(InverseOperators {
        k_lu,
        c: pencil.c().clone(),
        m: pencil.m().clone(),
    })
}
