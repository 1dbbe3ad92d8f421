//! Dense nonsymmetric eigensolver for complex matrices.
//!
//! Diagonal balancing, Householder reduction to upper Hessenberg form, then
//! single-shift complex QR (Wilkinson shifts, bulge chasing with Givens
//! rotations) to triangular Schur form. Eigenvectors come from back
//! substitution on the Schur factor followed by the accumulated similarity.

use super::matrix::{axpy, dotc, norm2, CMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Iteration budget per eigenvalue before giving up.
const ITERS_PER_EIGENVALUE: usize = 30;

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<C64>,
    /// Unit-norm right eigenvectors as columns, when requested.
    pub eigenvectors: Option<CMatrix>,
    /// Scaled backward error. With vectors this is
    /// `max ‖Hx − λx‖ / (‖H‖_F ‖x‖)`; without, it is the Frobenius norm of the
    /// subdiagonal entries dropped during deflation relative to `‖H‖_F`.
    pub backward_error: f64,
}

/// All eigenvalues (and optionally right eigenvectors) of a square matrix.
pub fn dense_eig(h: &CMatrix, want_vectors: bool) -> Result<EigenDecomposition> {
    eig_impl(h, want_vectors, true)
}

/// [`dense_eig`] without the balancing step. Preferable for matrices that are
/// already well scaled in norm, such as projections onto orthonormal bases:
/// with strongly graded balancing factors the back-transformed eigenvectors
/// can lose residual accuracy relative to `‖H‖`.
pub fn dense_eig_unbalanced(h: &CMatrix, want_vectors: bool) -> Result<EigenDecomposition> {
    eig_impl(h, want_vectors, false)
}

fn eig_impl(h: &CMatrix, want_vectors: bool, balanced: bool) -> Result<EigenDecomposition> {
    if !h.is_square() {
        return Err(Error::dim(
            "dense_eig",
            "square matrix",
            format!("{}x{}", h.rows(), h.cols()),
        ));
    }
    if !h.is_finite() {
        return Err(Error::InvalidInput(
            "dense_eig input has non-finite entries".into(),
        ));
    }
    let n = h.rows();
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: want_vectors.then(|| CMatrix::zeros(0, 0)),
            backward_error: 0.0,
        });
    }
    let h_norm = h.norm_fro();

    let mut t = h.clone();
    let scaling = if balanced {
        balance(&mut t)
    } else {
        vec![1.0; n]
    };
    let mut q = want_vectors.then(|| CMatrix::identity(n));
    hessenberg_reduce(&mut t, q.as_mut());
    let dropped = schur_qr(&mut t, q.as_mut())?;
    let eigenvalues: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();

    let (eigenvectors, backward_error) = match q {
        Some(q) => {
            let mut vecs = triangular_eigenvectors(&t, &q);
            for j in 0..n {
                let col = vecs.col_mut(j);
                for (x, d) in col.iter_mut().zip(&scaling) {
                    *x *= *d;
                }
                let nrm = norm2(col);
                if nrm > 0.0 {
                    for x in col.iter_mut() {
                        *x /= nrm;
                    }
                }
            }
            let err = max_scaled_residual(h, &eigenvalues, &vecs, h_norm);
            (Some(vecs), err)
        }
        None => {
            let err = if h_norm > 0.0 { dropped / h_norm } else { 0.0 };
            (None, err)
        }
    };

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
        backward_error,
    })
}

fn max_scaled_residual(h: &CMatrix, vals: &[C64], vecs: &CMatrix, h_norm: f64) -> f64 {
    if h_norm == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for (j, &lambda) in vals.iter().enumerate() {
        let x = vecs.col(j);
        let mut r = h.matvec(x).expect("square");
        axpy(-lambda, x, &mut r);
        let xn = norm2(x);
        if xn > 0.0 {
            worst = worst.max(norm2(&r) / (h_norm * xn));
        }
    }
    worst
}

/// Diagonal similarity `D⁻¹ H D` with power-of-two entries that equalizes
/// row and column norms. Returns the diagonal of `D`.
fn balance(h: &mut CMatrix) -> Vec<f64> {
    const RADIX: f64 = 2.0;
    let n = h.rows();
    let mut d = vec![1.0; n];
    let abs1 = |z: C64| z.re.abs() + z.im.abs();
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += abs1(h[(j, i)]);
                    r += abs1(h[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            // c now holds c·f², so (c + r)/f is the balanced row+column sum
            if (c + r) / f < 0.95 * s {
                converged = false;
                d[i] *= f;
                for j in 0..n {
                    h[(i, j)] /= f;
                }
                for v in h.col_mut(i) {
                    *v *= f;
                }
            }
        }
    }
    d
}

/// Householder reduction to upper Hessenberg form, `H ← Pᴴ H P`, with
/// `Q ← Q P` when a transform is being accumulated.
fn hessenberg_reduce(h: &mut CMatrix, mut q: Option<&mut CMatrix>) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    let mut p = vec![ZERO; n];
    for k in 0..n - 2 {
        let x = &h.col(k)[k + 1..];
        let xnorm = norm2(x);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        let mut u: Vec<C64> = x.to_vec();
        u[0] -= alpha;
        let unorm = norm2(&u);
        if unorm == 0.0 {
            continue;
        }
        for z in u.iter_mut() {
            *z /= unorm;
        }
        let m = u.len();

        // left: rows k+1.., columns k..
        for j in k..n {
            let col = &mut h.col_mut(j)[k + 1..];
            let s = dotc(&u, col) * 2.0;
            axpy(-s, &u, col);
        }
        // right: all rows, columns k+1..
        apply_reflector_right(h, &u, k + 1, &mut p);
        if let Some(q) = q.as_deref_mut() {
            apply_reflector_right(q, &u, k + 1, &mut p);
        }
        let col = h.col_mut(k);
        col[k + 1] = alpha;
        for v in &mut col[k + 2..k + 1 + m] {
            *v = ZERO;
        }
    }
}

/// `A[:, off..] ← A[:, off..] (I − 2uuᴴ)`.
fn apply_reflector_right(a: &mut CMatrix, u: &[C64], off: usize, p: &mut [C64]) {
    let rows = a.rows();
    let p = &mut p[..rows];
    p.iter_mut().for_each(|v| *v = ZERO);
    for (j, &uj) in u.iter().enumerate() {
        axpy(uj, a.col(off + j), p);
    }
    for (j, &uj) in u.iter().enumerate() {
        axpy(-2.0 * uj.conj(), p, a.col_mut(off + j));
    }
}

/// Complex Givens rotation `G = [c s; −s̄ c]` with `G [f; g] = [r; 0]`.
#[inline]
fn givens(f: C64, g: C64) -> (f64, C64) {
    let fa = f.norm();
    let ga = g.norm();
    if ga == 0.0 {
        return (1.0, ZERO);
    }
    if fa == 0.0 {
        return (0.0, g.conj() / ga);
    }
    let nrm = fa.hypot(ga);
    let c = fa / nrm;
    let s = (f / fa) * g.conj() / nrm;
    (c, s)
}

/// Reduces an upper Hessenberg matrix to upper triangular form in place.
/// Returns the Frobenius norm of the subdiagonal entries that were zeroed.
fn schur_qr(h: &mut CMatrix, mut q: Option<&mut CMatrix>) -> Result<f64> {
    let n = h.rows();
    let full = q.is_some();
    let eps = f64::EPSILON;
    let hnorm = h.norm_fro().max(f64::MIN_POSITIVE);
    let max_iter = ITERS_PER_EIGENVALUE * n.max(1);
    let mut total_iter = 0usize;
    let mut dropped_sq = 0.0;

    let mut hi = n - 1;
    let mut its = 0usize;
    loop {
        if hi == 0 {
            break;
        }
        // locate the start of the active unreduced block
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let mut scale = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if scale == 0.0 {
                scale = hnorm;
            }
            if sub <= eps * scale {
                dropped_sq += sub * sub;
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            its = 0;
            continue;
        }

        total_iter += 1;
        its += 1;
        if total_iter > max_iter {
            let partial = (hi + 1..n).map(|i| h[(i, i)]).collect();
            return Err(Error::Convergence {
                iterations: total_iter,
                size: n,
                partial,
            });
        }

        let mu = if its.is_multiple_of(10) {
            // exceptional shift
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        let col_end = if full { n } else { hi + 1 };
        let row_start = if full { 0 } else { l };
        for k in l..hi {
            let (f, g) = if k == l {
                (h[(l, l)] - mu, h[(l + 1, l)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(f, g);
            let jstart = if k == l { l } else { k - 1 };
            for j in jstart..col_end {
                let t1 = h[(k, j)];
                let t2 = h[(k + 1, j)];
                h[(k, j)] = t1 * c + s * t2;
                h[(k + 1, j)] = t2 * c - s.conj() * t1;
            }
            if k > l {
                h[(k + 1, k - 1)] = ZERO;
            }
            let iend = (k + 2).min(hi);
            {
                let (ck, ck1) = h.two_cols_mut(k, k + 1);
                rotate_cols(&mut ck[row_start..=iend], &mut ck1[row_start..=iend], c, s);
            }
            if let Some(q) = q.as_deref_mut() {
                let (ck, ck1) = q.two_cols_mut(k, k + 1);
                rotate_cols(ck, ck1, c, s);
            }
        }
    }
    Ok(dropped_sq.sqrt())
}

/// Columns `(x, y) ← (c x + s̄ y, −s x + c y)`, i.e. right multiplication by `Gᴴ`.
#[inline]
fn rotate_cols(x: &mut [C64], y: &mut [C64], c: f64, s: C64) {
    let sc = s.conj();
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let t1 = *a;
        let t2 = *b;
        *a = t1 * c + sc * t2;
        *b = t2 * c - s * t1;
    }
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Right eigenvectors `Q y` where `T y = λ y`, `T` upper triangular.
fn triangular_eigenvectors(t: &CMatrix, q: &CMatrix) -> CMatrix {
    let n = t.rows();
    let tnorm = t.norm_fro().max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * tnorm;
    let mut out = CMatrix::zeros(n, n);
    let mut y = vec![ZERO; n];
    for k in 0..n {
        let lambda = t[(k, k)];
        y[..=k].iter_mut().for_each(|v| *v = ZERO);
        y[k] = C64::new(1.0, 0.0);
        // r = −T[0..k, k]; then back substitution column by column
        let mut r: Vec<C64> = t.col(k)[..k].iter().map(|&z| -z).collect();
        for i in (0..k).rev() {
            let mut den = t[(i, i)] - lambda;
            if den.norm() < small {
                den = C64::new(small, 0.0);
            }
            let yi = r[i] / den;
            y[i] = yi;
            if yi != ZERO {
                axpy(-yi, &t.col(i)[..i], &mut r[..i]);
            }
            // keep the growth in check for nearly defective spectra
            let mag = yi.norm();
            if mag > 1e100 {
                let inv = 1.0 / mag;
                for v in y[i..=k].iter_mut() {
                    *v *= inv;
                }
                for v in r[..i].iter_mut() {
                    *v *= inv;
                }
            }
        }
        let col = out.col_mut(k);
        for (j, &yj) in y[..=k].iter().enumerate() {
            if yj != ZERO {
                axpy(yj, q.col(j), col);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        v
    }

    #[test]
    fn diagonal_matrix() {
        let h = CMatrix::diag(&[c(1.0, 2.0), c(3.0, 0.0)]);
        let d = dense_eig(&h, true).unwrap();
        let vals = sorted(d.eigenvalues);
        assert!((vals[0] - c(1.0, 2.0)).norm() < 1e-14);
        assert!((vals[1] - c(3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn companion_of_factored_quadratic() {
        // λ² − 3λ + 2
        let h = CMatrix::from_real_rows(&[vec![3.0, -2.0], vec![1.0, 0.0]]);
        let vals = sorted(dense_eig(&h, false).unwrap().eigenvalues);
        assert!((vals[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((vals[1] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rotation_block_has_imaginary_pair() {
        let h = CMatrix::from_real_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]);
        let d = dense_eig(&h, true).unwrap();
        let vals = sorted(d.eigenvalues);
        assert!((vals[0] - c(0.0, -1.0)).norm() < 1e-13);
        assert!((vals[1] - c(0.0, 1.0)).norm() < 1e-13);
        assert!(d.backward_error < 1e-14);
    }

    #[test]
    fn jordan_block_does_not_blow_up() {
        let h = CMatrix::from_real_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![0.0, 2.0, 1.0],
            vec![0.0, 0.0, 2.0],
        ]);
        let d = dense_eig(&h, true).unwrap();
        for v in &d.eigenvalues {
            assert!((v - c(2.0, 0.0)).norm() < 1e-4);
        }
        assert!(d.eigenvectors.unwrap().is_finite());
    }

    #[test]
    fn unbalanced_vectors_of_a_graded_hessenberg() {
        let n = 12;
        let h = CMatrix::from_fn(n, n, |i, j| {
            if i > j + 1 {
                ZERO
            } else if i == j + 1 {
                c(10f64.powi(-(j as i32) / 2), 0.0)
            } else {
                c(
                    ((3 * i + 7 * j) % 11) as f64 / 11.0 - 0.5,
                    ((5 * i + j) % 7) as f64 / 70.0,
                )
            }
        });
        let plain = dense_eig_unbalanced(&h, true).unwrap();
        assert!(plain.backward_error <= 1e-13, "{}", plain.backward_error);
        let balanced = dense_eig(&h, false).unwrap();
        let mut a = sorted(plain.eigenvalues);
        let b = sorted(balanced.eigenvalues);
        for (x, y) in a.iter_mut().zip(&b) {
            assert!((*x - y).norm() <= 1e-8 * h.norm_fro());
        }
    }

    #[test]
    fn non_square_is_rejected() {
        assert!(dense_eig(&CMatrix::zeros(2, 3), false).is_err());
    }
}
