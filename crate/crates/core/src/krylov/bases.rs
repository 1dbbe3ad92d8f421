//! Orthonormal projection bases for the inverse QEP
//! `λ²u = Bu + λAu`, `λ = 1/s`.
//!
//! Every procedure orthogonalizes with modified Gram–Schmidt plus at most one
//! reorthogonalization pass (the η test), and stops at the first candidate
//! that is numerically in the current span, setting the breakdown flag.

use crate::error::{Error, Result};
use crate::linalg::{axpy, dotc, norm2, CMatrix, OrthonormalBasis, BREAKDOWN_TOL, C64, ZERO};
use crate::qep::QepOperators;

use super::spec::ReductionSpec;

fn unit(v: &[C64]) -> Result<Vec<C64>> {
    let n = norm2(v);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::InvalidInput(
            "start vector has zero or non-finite norm".into(),
        ));
    }
    Ok(v.iter().map(|&z| z / n).collect())
}

fn add_into(dst: &mut [C64], src: &[C64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

fn scale(v: &mut [C64], s: f64) {
    for z in v {
        *z *= s;
    }
}

/// Arnoldi on a single operator: `applications` operator calls, each result
/// orthogonalized and appended, so up to `applications + 1` columns.
pub fn arnoldi_chain(
    start: &[C64],
    applications: usize,
    eta: f64,
    mut op: impl FnMut(&[C64]) -> Result<Vec<C64>>,
) -> Result<OrthonormalBasis> {
    let mut basis = OrthonormalBasis::from_start(start)?;
    for j in 0..applications {
        let w = op(basis.col(j))?;
        let out = basis.orthogonalize(&w, eta)?;
        if !out.accepted {
            basis.mark_breakdown();
            break;
        }
        basis.push_outcome(&out)?;
    }
    Ok(basis)
}

/// Main columns `Q` and companion columns `P` of a second-order Arnoldi run;
/// `[Q; P]` spans the Krylov space of `[[A, B], [I, 0]]`.
#[derive(Clone, Debug)]
pub struct SecondOrderBasis {
    pub q: OrthonormalBasis,
    pub p: CMatrix,
}

/// Second-order Arnoldi from `(q₁, p₁)`: each step forms `r = A q_j + B p_j`,
/// `t = q_j`, orthogonalizes `r` against `Q` and applies the same
/// coefficients to `t` against `P`.
pub fn second_order_arnoldi<O: QepOperators + ?Sized>(
    ops: &O,
    q1: &[C64],
    p1: Option<&[C64]>,
    m: usize,
    eta: f64,
) -> Result<SecondOrderBasis> {
    let n = ops.dim();
    let mut q = OrthonormalBasis::from_start(q1)?;
    let mut p = CMatrix::zeros(n, 0);
    match p1 {
        Some(v) => p.push_column(&unit(v)?)?,
        None => p.push_column(&vec![ZERO; n])?,
    }
    for j in 0..m.saturating_sub(1) {
        let mut r = ops.apply_a(q.col(j))?;
        if p.col(j).iter().any(|&z| z != ZERO) {
            add_into(&mut r, &ops.apply_b(p.col(j))?);
        }
        let mut t = q.col(j).to_vec();
        let out = q.orthogonalize(&r, eta)?;
        for (i, &h) in out.coefficients.iter().enumerate() {
            axpy(-h, p.col(i), &mut t);
        }
        if !out.accepted {
            q.mark_breakdown();
            break;
        }
        scale(&mut t, 1.0 / out.norm);
        q.push_outcome(&out)?;
        p.push_column(&t)?;
    }
    Ok(SecondOrderBasis { q, p })
}

/// Basis of the span of `r₀, …, r_{m−1}` with `r_j = B r_{j−2} + A r_{j−1}`,
/// `r₋₁ = b₀/‖b₀‖`, `r₀ = b₁/‖b₁‖`.
///
/// Orthogonalizing `r_j` directly would break the recurrence, so each column
/// carries the matching combination of predecessors.
pub fn lqar_basis<O: QepOperators + ?Sized>(
    ops: &O,
    spec: &ReductionSpec,
) -> Result<OrthonormalBasis> {
    let q1 = unit(&spec.b1)?;
    Ok(second_order_arnoldi(ops, &q1, Some(&spec.b0), spec.m, spec.eta)?.q)
}

/// SOAR: the same recurrence started from `r₋₁ = 0`.
pub fn soar_basis<O: QepOperators + ?Sized>(
    ops: &O,
    spec: &ReductionSpec,
) -> Result<OrthonormalBasis> {
    let q1 = unit(&spec.b1)?;
    Ok(second_order_arnoldi(ops, &q1, None, spec.m, spec.eta)?.q)
}

/// Power estimate of the smallest `|s|`: iterate
/// `(u₀, u₁) ← (u₁, B u₀ + A u₁)` `m − 1` times and return `‖u₀‖ / ‖u₁‖`.
/// Both vectors are rescaled jointly each step, which leaves the ratio intact.
pub fn qar_power_estimate<O: QepOperators + ?Sized>(ops: &O, spec: &ReductionSpec) -> Result<f64> {
    let mut u0 = unit(&spec.b0)?;
    let mut u1 = unit(&spec.b1)?;
    for step in 1..spec.m {
        let mut next = ops.apply_b(&u0)?;
        add_into(&mut next, &ops.apply_a(&u1)?);
        u0 = std::mem::replace(&mut u1, next);
        let s = norm2(&u0).max(norm2(&u1));
        if s == 0.0 || !s.is_finite() {
            return Err(Error::Degenerate(format!(
                "power iteration collapsed to zero at step {step}"
            )));
        }
        scale(&mut u0, 1.0 / s);
        scale(&mut u1, 1.0 / s);
    }
    let n1 = norm2(&u1);
    if n1 == 0.0 {
        return Err(Error::Degenerate(
            "power iteration produced ‖u₁‖ = 0".into(),
        ));
    }
    Ok(norm2(&u0) / n1)
}

/// Arnoldi on `shift·B + A` from `b`, `m` columns.
pub fn qar_basis_with_shift<O: QepOperators + ?Sized>(
    ops: &O,
    spec: &ReductionSpec,
    shift: f64,
) -> Result<OrthonormalBasis> {
    let start = unit(&spec.b)?;
    arnoldi_chain(&start, spec.m.saturating_sub(1), spec.eta, |x| {
        let mut w = ops.apply_a(x)?;
        if shift != 0.0 {
            let bx = ops.apply_b(x)?;
            axpy(C64::new(shift, 0.0), &bx, &mut w);
        }
        Ok(w)
    })
}

/// QAR basis with the shift from [`qar_power_estimate`].
pub fn qar_basis<O: QepOperators + ?Sized>(
    ops: &O,
    spec: &ReductionSpec,
) -> Result<OrthonormalBasis> {
    let shift = qar_power_estimate(ops, spec)?;
    qar_basis_with_shift(ops, spec, shift)
}

/// `2m − 1` columns spanning `S_m(A; b) ∪ S_m(B; b)`, generated in the order
/// `b, Ab, Bb, A²b, B²b, …`.
///
/// Each column is split as `v = α + β` with `α` in the `A`-chain span and `β`
/// in the `B`-chain span, so the next power is taken of the right part only;
/// applying `A` to a full column would mix in products such as `ABb`. The loop
/// runs to column `2m − 1` and the last column is dropped, so the first-pass
/// projection count is `2m² − m`.
pub fn tgsar2_basis<O: QepOperators + ?Sized>(
    ops: &O,
    spec: &ReductionSpec,
) -> Result<OrthonormalBasis> {
    let n = ops.dim();
    let m = spec.m;
    let target = 2 * m - 1;
    let bh = unit(&spec.b)?;
    let mut basis = OrthonormalBasis::from_start(&bh)?;
    let mut alpha: Vec<Vec<C64>> = vec![bh.clone()];
    let mut beta: Vec<Vec<C64>> = vec![vec![ZERO; n]];

    for j in 1..2 * m {
        let a_step = j % 2 == 1;
        let w = if j == 1 {
            ops.apply_a(&bh)?
        } else if a_step {
            ops.apply_a(&alpha[j - 2])?
        } else if j == 2 {
            ops.apply_b(&bh)?
        } else {
            ops.apply_b(&beta[j - 2])?
        };
        let out = basis.orthogonalize(&w, spec.eta)?;
        if !out.accepted {
            if j < target {
                basis.mark_breakdown();
            }
            break;
        }
        let (mut a_new, mut b_new) = if a_step {
            (w, vec![ZERO; n])
        } else {
            (vec![ZERO; n], w)
        };
        for (i, &h) in out.coefficients.iter().enumerate() {
            axpy(-h, &alpha[i], &mut a_new);
            axpy(-h, &beta[i], &mut b_new);
        }
        scale(&mut a_new, 1.0 / out.norm);
        scale(&mut b_new, 1.0 / out.norm);
        basis.push_outcome(&out)?;
        alpha.push(a_new);
        beta.push(b_new);
    }
    if basis.len() > target {
        basis.truncate(target);
    }
    Ok(basis)
}

/// Same span as [`tgsar2_basis`], built as two separate Arnoldi chains on `A`
/// and `B` (each with `m` operator calls) whose bases are merged: the first
/// `m` columns of the `A` chain, then columns `2..m` of the `B` chain
/// re-orthogonalized against everything before them.
///
/// The count charges a trailing column at position `j` with `j` projections:
/// `j − 1` against earlier columns plus its own normalization, for a total of
/// `(5m² − m)/2`.
pub fn tgsar1_basis<O: QepOperators + ?Sized>(
    ops: &O,
    spec: &ReductionSpec,
) -> Result<OrthonormalBasis> {
    let m = spec.m;
    let bh = unit(&spec.b)?;
    let va = arnoldi_chain(&bh, m, spec.eta, |x| ops.apply_a(x))?;
    let vb = arnoldi_chain(&bh, m, spec.eta, |x| ops.apply_b(x))?;

    let keep_a = va.len().min(m);
    let mut merged = OrthonormalBasis::from_orthonormal_columns(va.columns().columns(0, keep_a));
    merged.add_projections(va.projection_count() + vb.projection_count());
    merged.add_reorthogonalizations(va.reorth_count() + vb.reorth_count());
    if va.len() < m || vb.len() < m {
        merged.mark_breakdown();
    }
    for k in 1..vb.len().min(m) {
        let out = merged.orthogonalize(vb.col(k), spec.eta)?;
        merged.add_projections(1);
        if !out.accepted {
            merged.mark_breakdown();
            break;
        }
        merged.push_outcome(&out)?;
    }
    Ok(merged)
}

/// Arnoldi basis `U` (`2n × d`) of the linearization `[[0, I], [B, A]]` with
/// its Hessenberg matrix `H = UᴴLU`.
#[derive(Clone, Debug)]
pub struct LinearizedArnoldi {
    pub basis: OrthonormalBasis,
    pub hessenberg: CMatrix,
}

fn apply_linearized<O: QepOperators + ?Sized>(ops: &O, z: &[C64]) -> Result<Vec<C64>> {
    let n = ops.dim();
    let (top, bot) = z.split_at(n);
    let mut w = Vec::with_capacity(2 * n);
    w.extend_from_slice(bot);
    let mut lower = ops.apply_b(top)?;
    add_into(&mut lower, &ops.apply_a(bot)?);
    w.extend(lower);
    Ok(w)
}

/// Arnoldi on the `2n` linearization from `[b₀; b₁]` normalized. Uses `m`
/// operator calls: `m − 1` to grow the basis and one more for the last
/// Hessenberg column.
pub fn arnoldi_basis_linearized<O: QepOperators + ?Sized>(
    ops: &O,
    spec: &ReductionSpec,
) -> Result<LinearizedArnoldi> {
    let m = spec.m;
    let mut start = spec.b0.clone();
    start.extend_from_slice(&spec.b1);
    let mut basis = OrthonormalBasis::from_start(&start)?;
    let mut h = CMatrix::zeros(m, m);
    let mut size = m;
    for j in 0..m {
        let w = apply_linearized(ops, basis.col(j))?;
        let out = basis.orthogonalize(&w, spec.eta)?;
        for (i, &c) in out.coefficients.iter().enumerate() {
            h[(i, j)] = c;
        }
        if j + 1 == m {
            break;
        }
        if !out.accepted {
            basis.mark_breakdown();
            size = j + 1;
            break;
        }
        h[(j + 1, j)] = C64::new(out.norm, 0.0);
        basis.push_outcome(&out)?;
    }
    let hessenberg = if size < m {
        h.submatrix(0, size, 0, size)
    } else {
        h
    };
    Ok(LinearizedArnoldi { basis, hessenberg })
}

/// Level-1 basis `Q` and level-2 coefficients `U = [U_top; U_bot]` of a
/// two-level orthogonal Arnoldi run; the linearized Arnoldi vectors are
/// `[Q U_top; Q U_bot]`.
#[derive(Clone, Debug)]
pub struct ToarBasis {
    pub q: OrthonormalBasis,
    pub u: CMatrix,
}

fn combine(q: &OrthonormalBasis, coeffs: &[C64]) -> Vec<C64> {
    let mut x = vec![ZERO; q.dim()];
    for (i, &c) in coeffs.iter().enumerate() {
        if c != ZERO {
            axpy(c, q.col(i), &mut x);
        }
    }
    x
}

fn pad(v: &mut Vec<C64>, len: usize) {
    v.resize(len, ZERO);
}

fn stacked_dot(at: &[C64], ab: &[C64], bt: &[C64], bb: &[C64]) -> C64 {
    dotc(at, bt) + dotc(ab, bb)
}

/// Two-level orthogonal Arnoldi from `[b₀/‖b₀‖; b₁/‖b₁‖]` (the LQAR starts);
/// `Q` starts at `b₁/‖b₁‖`.
pub fn toar_factorization<O: QepOperators + ?Sized>(
    ops: &O,
    spec: &ReductionSpec,
) -> Result<ToarBasis> {
    let m = spec.m;
    let eta = spec.eta;
    let mut q = OrthonormalBasis::from_start(&spec.b1)?;

    // start vector [b₀/‖b₀‖; b₁/‖b₁‖] in level-2 coordinates
    let out = q.orthogonalize(&unit(&spec.b0)?, eta)?;
    let mut top0 = out.coefficients.clone();
    let mut bot0 = vec![C64::new(1.0, 0.0)];
    if out.accepted {
        q.push_outcome(&out)?;
        top0.push(C64::new(out.norm, 0.0));
        bot0.push(ZERO);
    }
    let nrm = (norm2(&top0).powi(2) + norm2(&bot0).powi(2)).sqrt();
    scale(&mut top0, 1.0 / nrm);
    scale(&mut bot0, 1.0 / nrm);
    let mut tops = vec![top0];
    let mut bots = vec![bot0];

    for j in 0..m.saturating_sub(1) {
        let xt = combine(&q, &tops[j]);
        let xb = combine(&q, &bots[j]);
        let mut r = ops.apply_a(&xb)?;
        add_into(&mut r, &ops.apply_b(&xt)?);
        let out = q.orthogonalize(&r, eta)?;
        let mut vt = bots[j].clone();
        let mut vb = out.coefficients.clone();
        if out.accepted {
            q.push_outcome(&out)?;
            vb.push(C64::new(out.norm, 0.0));
        }
        let k = q.len();
        pad(&mut vt, k);
        pad(&mut vb, k);
        for (t, b) in tops.iter_mut().zip(bots.iter_mut()) {
            pad(t, k);
            pad(b, k);
        }

        let input = (norm2(&vt).powi(2) + norm2(&vb).powi(2)).sqrt();
        let sweep = |vt: &mut Vec<C64>, vb: &mut Vec<C64>| {
            for (ut, ub) in tops.iter().zip(&bots) {
                let h = stacked_dot(ut, ub, vt, vb);
                axpy(-h, ut, vt);
                axpy(-h, ub, vb);
            }
            (norm2(vt).powi(2) + norm2(vb).powi(2)).sqrt()
        };
        let mut norm = sweep(&mut vt, &mut vb);
        q.add_projections(tops.len());
        if norm < eta * input {
            norm = sweep(&mut vt, &mut vb);
            q.add_reorthogonalizations(1);
        }
        if !(input > 0.0 && norm > BREAKDOWN_TOL * input) {
            q.mark_breakdown();
            break;
        }
        scale(&mut vt, 1.0 / norm);
        scale(&mut vb, 1.0 / norm);
        tops.push(vt);
        bots.push(vb);
    }

    let k = q.len();
    let mut u = CMatrix::zeros(2 * k, tops.len());
    for (j, (t, b)) in tops.iter().zip(&bots).enumerate() {
        for i in 0..k {
            u[(i, j)] = t.get(i).copied().unwrap_or(ZERO);
            u[(k + i, j)] = b.get(i).copied().unwrap_or(ZERO);
        }
    }
    Ok(ToarBasis { q, u })
}

/// The level-1 basis of [`toar_factorization`]; `m + 1` columns when `b₀` and
/// `b₁` are independent, `m` when they are parallel.
pub fn toar_basis<O: QepOperators + ?Sized>(
    ops: &O,
    spec: &ReductionSpec,
) -> Result<OrthonormalBasis> {
    Ok(toar_factorization(ops, spec)?.q)
}
