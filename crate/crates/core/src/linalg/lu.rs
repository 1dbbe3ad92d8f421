//! LU factorization with partial (row) pivoting.

use super::matrix::{axpy, CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Relative pivot magnitude below which the factorization is flagged singular.
pub const SINGULAR_PIVOT_TOL: f64 = 1e-14;

/// Packed `P·A = L·U` factors: unit-lower `L` below the diagonal, `U` on and
/// above it. `perm[i]` is the original row that ended up in row `i`.
#[derive(Clone, Debug)]
pub struct LuFactors {
    lu: CMatrix,
    perm: Vec<usize>,
    singular: bool,
    min_pivot: f64,
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn packed(&self) -> &CMatrix {
        &self.lu
    }

    /// Smallest pivot magnitude encountered.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn lower(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.lu[(i, j)],
            std::cmp::Ordering::Equal => C64::new(1.0, 0.0),
            std::cmp::Ordering::Less => ZERO,
        })
    }

    pub fn upper(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| if i <= j { self.lu[(i, j)] } else { ZERO })
    }

    /// Applies the row permutation to `a`, giving `P·A`.
    pub fn permute_rows(&self, a: &CMatrix) -> CMatrix {
        CMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(self.perm[i], j)])
    }

    /// Determinant of the factored matrix.
    pub fn determinant(&self) -> C64 {
        let n = self.dim();
        let mut det: C64 = (0..n).map(|i| self.lu[(i, i)]).product();
        // parity of the permutation
        let mut seen = vec![false; n];
        let mut transpositions = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.perm[k];
                len += 1;
            }
            transpositions += len - 1;
        }
        if transpositions % 2 == 1 {
            det = -det;
        }
        det
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [C64]) -> Result<()> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::dim("lu_solve", n, b.len()));
        }
        if self.singular {
            return Err(Error::Singular(format!(
                "LU factors of a {n}x{n} matrix have a pivot of magnitude {:.3e}",
                self.min_pivot
            )));
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        // forward substitution, unit lower
        for k in 0..n {
            let xk = x[k];
            if xk != ZERO {
                let col = &self.lu.col(k)[k + 1..];
                axpy(-xk, col, &mut x[k + 1..]);
            }
        }
        // back substitution
        for k in (0..n).rev() {
            let col = self.lu.col(k);
            x[k] /= col[k];
            let xk = x[k];
            if xk != ZERO {
                axpy(-xk, &col[..k], &mut x[..k]);
            }
        }
        b.copy_from_slice(&x);
        Ok(())
    }

    pub fn solve_vec(&self, b: &[C64]) -> Result<Vec<C64>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    pub fn solve_mat(&self, b: &CMatrix) -> Result<CMatrix> {
        if b.rows() != self.dim() {
            return Err(Error::dim("lu_solve", self.dim(), b.rows()));
        }
        let mut x = b.clone();
        for j in 0..x.cols() {
            self.solve_in_place(x.col_mut(j))?;
        }
        Ok(x)
    }
}

/// Factors a square matrix with partial pivoting.
pub fn lu_factor(a: &CMatrix) -> Result<LuFactors> {
    if !a.is_square() {
        return Err(Error::dim(
            "lu_factor",
            "square matrix",
            format!("{}x{}", a.rows(), a.cols()),
        ));
    }
    let n = a.rows();
    let tol = SINGULAR_PIVOT_TOL * a.norm_max();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut singular = n == 0;
    let mut min_pivot = f64::INFINITY;

    for k in 0..n {
        let (p, pmag) =
            {
                let col = &lu.col(k)[k..];
                let (off, mag) = col.iter().enumerate().map(|(i, z)| (i, z.norm())).fold(
                    (0, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
                (k + off, mag)
            };
        min_pivot = min_pivot.min(pmag);
        if pmag <= tol {
            singular = true;
        }
        if p != k {
            perm.swap(p, k);
            for j in 0..n {
                let c = lu.col_mut(j);
                c.swap(p, k);
            }
        }
        if pmag == 0.0 {
            continue;
        }
        let pivot = lu[(k, k)];
        let inv = 1.0 / pivot;
        for v in &mut lu.col_mut(k)[k + 1..] {
            *v *= inv;
        }
        for j in k + 1..n {
            let akj = lu[(k, j)];
            if akj == ZERO {
                continue;
            }
            let (ck, cj) = lu.two_cols_mut(k, j);
            axpy(-akj, &ck[k + 1..], &mut cj[k + 1..]);
        }
    }

    Ok(LuFactors {
        lu,
        perm,
        singular,
        min_pivot,
    })
}

/// Convenience: factor and solve a single right-hand side.
pub fn lu_solve(factors: &LuFactors, rhs: &[C64]) -> Result<Vec<C64>> {
    factors.solve_vec(rhs)
}
