use serde::Serialize;

use super::pencil::QuadraticPencil;
use crate::analysis::{canonical_order, SortMode};
use crate::error::{Error, Result};
use crate::linalg::{dense_eig, dotc, lu_factor, norm2, CMatrix, C64, ZERO};

/// Eigenvalue `s`, unit eigenvector `v` and the scaled residual of the pair
/// against the pencil it approximates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenPair {
    pub s: C64,
    #[serde(skip)]
    pub v: Vec<C64>,
    pub residual: f64,
}

impl EigenPair {
    /// Normalizes `v` and evaluates the residual against `pencil`.
    pub fn new(pencil: &QuadraticPencil, s: C64, v: Vec<C64>) -> Result<Self> {
        let v = normalize_phase(v);
        let residual = pencil.residual(s, &v)?;
        Ok(Self { s, v, residual })
    }
}

/// Unit 2-norm, with the first entry of largest magnitude made real-positive.
/// A zero vector is returned unchanged.
pub fn normalize_phase(mut v: Vec<C64>) -> Vec<C64> {
    let n = norm2(&v);
    if n == 0.0 || !n.is_finite() {
        return v;
    }
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in v.iter().enumerate() {
        let a = z.norm();
        if a > best_mag {
            best = i;
            best_mag = a;
        }
    }
    let phase = v[best].conj() / (best_mag * n);
    for z in &mut v {
        *z *= phase;
    }
    v[best] = C64::new(v[best].re, 0.0);
    v
}

/// Fan–Lin–Van Dooren scaling `s = γμ`, `(γ²δM, γδC, δK)`, which brings the
/// three coefficients to comparable norms before linearizing.
fn scaling(pencil: &QuadraticPencil) -> (f64, f64) {
    let (nm, nc, nk) = (
        pencil.m().norm_fro(),
        pencil.c().norm_fro(),
        pencil.k().norm_fro(),
    );
    if nm == 0.0 || nk == 0.0 {
        return (1.0, 1.0);
    }
    let gamma = (nk / nm).sqrt();
    let delta = 2.0 / (nk + nc * gamma);
    (gamma, delta)
}

/// Companion matrix `[[−M⁻¹C, −M⁻¹K], [I, 0]]` of the scaled pencil.
fn linearize(pencil: &QuadraticPencil, gamma: f64, delta: f64) -> Result<CMatrix> {
    let n = pencil.dof();
    let ms = pencil.m().scale_real(gamma * gamma * delta);
    let lu = lu_factor(&ms)?;
    if lu.is_singular() {
        return Err(Error::Singular(format!(
            "mass matrix M is singular (smallest pivot {:.3e}); the dense reference \
             solve needs a nonsingular leading coefficient",
            lu.min_pivot()
        )));
    }
    let mc = lu.solve_mat(&pencil.c().scale_real(gamma * delta))?;
    let mk = lu.solve_mat(&pencil.k().scale_real(delta))?;
    let mut l = CMatrix::zeros(2 * n, 2 * n);
    l.set_block(0, 0, &mc.scale_real(-1.0));
    l.set_block(0, n, &mk.scale_real(-1.0));
    for i in 0..n {
        l[(n + i, i)] = C64::new(1.0, 0.0);
    }
    Ok(l)
}

fn sort_mode(pencil: &QuadraticPencil) -> SortMode {
    if pencil.is_real() {
        SortMode::PairConjugates
    } else {
        SortMode::Plain
    }
}

/// Root of the scalar quadratic `vᴴ(s²M + sC + K)v` nearest `s`. The
/// companion solve resolves small eigenvalues only to `ε·‖L‖` absolute; its
/// eigenvector is usually good enough for this step to recover full relative
/// accuracy. Falls back to `s` if the root is not finite or moves far.
fn refine(pencil: &QuadraticPencil, s: C64, v: &[C64]) -> Result<C64> {
    let a = dotc(v, &pencil.m().matvec(v)?);
    let b = dotc(v, &pencil.c().matvec(v)?);
    let c = dotc(v, &pencil.k().matvec(v)?);
    let candidates = if a == ZERO {
        vec![-c / b]
    } else {
        let disc = (b * b - 4.0 * a * c).sqrt();
        // pick the stable form for each root
        let q = if (b.conj() * disc).re >= 0.0 {
            -(b + disc) / 2.0
        } else {
            -(b - disc) / 2.0
        };
        vec![q / a, c / q]
    };
    let best = candidates
        .into_iter()
        .filter(|z| z.re.is_finite() && z.im.is_finite())
        .min_by(|x, y| (x - s).norm().total_cmp(&(y - s).norm()));
    Ok(match best {
        Some(z) if (z - s).norm() <= 1e-6 * s.norm().max(f64::MIN_POSITIVE) => z,
        _ => s,
    })
}

/// All `2n` eigenpairs from a dense solve of the companion linearization,
/// each eigenvalue refined against its eigenvector, in canonical order.
pub fn exact_solve(pencil: &QuadraticPencil) -> Result<Vec<EigenPair>> {
    let n = pencil.dof();
    let (gamma, delta) = scaling(pencil);
    let l = linearize(pencil, gamma, delta)?;
    let eig = dense_eig(&l, true)?;
    let vecs = eig.eigenvectors.expect("requested eigenvectors");
    let mut pairs = Vec::with_capacity(2 * n);
    for (k, &mu) in eig.eigenvalues.iter().enumerate() {
        let z = vecs.col(k);
        // z = [μv; v]; take the better-conditioned block
        let v: Vec<C64> = if mu.norm() > 1.0 {
            z[..n].to_vec()
        } else {
            z[n..].to_vec()
        };
        let v = if v.iter().all(|&x| x == ZERO) {
            z[..n].to_vec()
        } else {
            v
        };
        let s = refine(pencil, mu * gamma, &v)?;
        pairs.push(EigenPair::new(pencil, s, v)?);
    }
    let values: Vec<C64> = pairs.iter().map(|p| p.s).collect();
    let order = canonical_order(&values, sort_mode(pencil));
    Ok(order.into_iter().map(|i| pairs[i].clone()).collect())
}

/// Eigenvalues only, in canonical order; skips eigenvector accumulation.
pub fn exact_eigenvalues(pencil: &QuadraticPencil) -> Result<Vec<C64>> {
    let (gamma, delta) = scaling(pencil);
    let l = linearize(pencil, gamma, delta)?;
    let eig = dense_eig(&l, false)?;
    let values: Vec<C64> = eig.eigenvalues.iter().map(|&mu| mu * gamma).collect();
    let order = canonical_order(&values, sort_mode(pencil));
    Ok(order.into_iter().map(|i| values[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(m: f64, c: f64, k: f64) -> QuadraticPencil {
        let one = |x: f64| CMatrix::from_real_rows(&[vec![x]]);
        QuadraticPencil::modal(one(m), one(c), one(k)).unwrap()
    }

    #[test]
    fn harmonic_oscillator() {
        let pairs = exact_solve(&scalar(1.0, 0.0, 4.0)).unwrap();
        assert_eq!(pairs.len(), 2);
        assert!((pairs[0].s - C64::new(0.0, -2.0)).norm() < 1e-12);
        assert!((pairs[1].s - C64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn damped_oscillator() {
        let pairs = exact_solve(&scalar(1.0, 2.0, 2.0)).unwrap();
        assert!((pairs[0].s - C64::new(-1.0, -1.0)).norm() < 1e-12);
        assert!((pairs[1].s - C64::new(-1.0, 1.0)).norm() < 1e-12);
        for p in &pairs {
            assert_eq!(p.v, vec![C64::new(1.0, 0.0)]);
            assert!(p.residual < 1e-14);
        }
    }

    #[test]
    fn singular_mass_is_rejected() {
        assert!(matches!(
            exact_solve(&scalar(0.0, 1.0, 1.0)),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn phase_normalization() {
        let v = normalize_phase(vec![C64::new(0.0, 1.0), C64::new(0.0, -2.0)]);
        assert!((norm2(&v) - 1.0).abs() < 1e-15);
        assert_eq!(v[1].im, 0.0);
        assert!(v[1].re > 0.0);
    }
}
