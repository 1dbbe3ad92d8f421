#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotor_krylov::linalg::{norm2, CMatrix, C64};
use rotor_krylov::qep::{PencilKind, PencilMeta, QuadraticPencil};
use rotor_krylov::rotor::{assemble, load_model_file, SystemMatrices};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_real(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(rng.gen_range(-1.0..1.0), 0.0))
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Random matrix plus `n·I`, comfortably nonsingular.
pub fn well_conditioned(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let mut a = random_matrix(rng, n, n);
    for i in 0..n {
        a[(i, i)] += c(n as f64, 0.0);
    }
    a
}

/// `RᵀR/n + shift·I` for real `R`: symmetric positive definite.
pub fn spd(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> CMatrix {
    let r = random_real(rng, n, n);
    let mut a = r.transpose().matmul(&r).unwrap().scale_real(1.0 / n as f64);
    for i in 0..n {
        a[(i, i)] += c(shift, 0.0);
    }
    a
}

/// Real damped pencil whose natural frequencies grow roughly linearly with
/// the mode index, as for a supported beam.
pub fn seeded_real_pencil(seed: u64, n: usize) -> QuadraticPencil {
    let mut g = rng(seed);
    let m = spd(&mut g, n, 1.0);
    let mut k = spd(&mut g, n, 1.0);
    for i in 0..n {
        k[(i, i)] += c(4.0 * ((i + 1) * (i + 1)) as f64, 0.0);
    }
    let c_mat = random_real(&mut g, n, n).scale_real(0.3);
    QuadraticPencil::modal(m, c_mat, k).unwrap()
}

/// Complex pencil with one overdamped coordinate, so its smallest eigenvalue
/// is well separated from the rest.
pub fn seeded_complex_pencil(seed: u64, n: usize) -> QuadraticPencil {
    let mut g = rng(seed);
    let m = CMatrix::identity(n);
    let mut k = random_matrix(&mut g, n, n).scale_real(0.05);
    for i in 0..n {
        k[(i, i)] += c(
            if i == 0 { 1.0 } else { 20.0 + 5.0 * i as f64 },
            0.3 * i as f64,
        );
    }
    let mut cm = random_matrix(&mut g, n, n).scale_real(0.1);
    cm[(0, 0)] += c(10.0, 0.0);
    let meta = PencilMeta {
        kind: PencilKind::CriticalSpeed,
        omega: None,
        n_ratio: Some(1.0),
    };
    QuadraticPencil::new(m, cm, k, meta).unwrap()
}

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn rotor(name: &str) -> SystemMatrices {
    let path = workspace_root().join("rotors").join(format!("{name}.cfg"));
    assemble(&load_model_file(path).unwrap()).unwrap()
}

pub fn rel_diff(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Greedy nearest matching; returns the largest relative distance.
pub fn match_multisets(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for &x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, &y)| (j, rel_diff(x, y)))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// Orthonormal basis of the given vectors via two Gram–Schmidt passes,
/// written out independently of the library.
pub fn explicit_orthonormal(vectors: &[Vec<C64>]) -> CMatrix {
    let n = vectors[0].len();
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &cols {
                let h: C64 = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= h * qi;
                }
            }
        }
        let nw = norm2(&w);
        if nw > 1e-10 * norm2(v) {
            cols.push(w.iter().map(|z| z / nw).collect());
        }
    }
    CMatrix::from_columns(n, &cols).unwrap()
}

/// `p(x)` for coefficients in descending degree.
pub fn poly_eval(coeffs: &[C64], x: C64) -> C64 {
    coeffs.iter().fold(c(0.0, 0.0), |acc, &a| acc * x + a)
}

/// Durand–Kerner roots of a polynomial (descending coefficients), polished
/// by Newton steps.
pub fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let lead = coeffs[0];
    let p: Vec<C64> = coeffs.iter().map(|z| z / lead).collect();
    let deg = p.len() - 1;
    let radius = 1.0 + p[1..].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let seed = c(0.4, 0.9);
    let mut roots: Vec<C64> = (0..deg).map(|i| seed.powu(i as u32) * radius).collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..deg {
            let mut den = c(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            let step = poly_eval(&p, roots[i]) / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * radius {
            break;
        }
    }
    let dp: Vec<C64> = p[..deg]
        .iter()
        .enumerate()
        .map(|(i, &a)| a * (deg - i) as f64)
        .collect();
    for r in &mut roots {
        for _ in 0..3 {
            let d = poly_eval(&dp, *r);
            if d.norm() > 0.0 {
                *r -= poly_eval(&p, *r) / d;
            }
        }
    }
    roots
}

pub fn poly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![c(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn poly_sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    let n = a.len().max(b.len());
    let pad = |p: &[C64]| -> Vec<C64> {
        let mut v = vec![c(0.0, 0.0); n - p.len()];
        v.extend_from_slice(p);
        v
    };
    pad(a).iter().zip(pad(b)).map(|(x, y)| x - y).collect()
}

/// `det(s²M + sC + K)` by cofactor expansion over polynomial entries,
/// coefficients in descending degree.
pub fn determinant_polynomial(m: &CMatrix, cm: &CMatrix, k: &CMatrix) -> Vec<C64> {
    let n = m.rows();
    let entries: Vec<Vec<Vec<C64>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| vec![m[(i, j)], cm[(i, j)], k[(i, j)]])
                .collect()
        })
        .collect();
    let rows: Vec<usize> = (0..n).collect();
    let cols: Vec<usize> = (0..n).collect();
    poly_det(&entries, &rows, &cols)
}

fn poly_det(e: &[Vec<Vec<C64>>], rows: &[usize], cols: &[usize]) -> Vec<C64> {
    if rows.len() == 1 {
        return e[rows[0]][cols[0]].clone();
    }
    let mut total = vec![c(0.0, 0.0)];
    for (pos, &col) in cols.iter().enumerate() {
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != col).collect();
        let minor = poly_det(e, &rows[1..], &rest);
        let term = poly_mul(&e[rows[0]][col], &minor);
        total = if pos % 2 == 0 {
            poly_sub(&term, &poly_sub(&[c(0.0, 0.0)], &total))
        } else {
            poly_sub(&total, &term)
        };
    }
    total
}

/// Inverse by Gauss–Jordan elimination with partial pivoting.
pub fn gauss_jordan_inverse(a: &CMatrix) -> CMatrix {
    let n = a.rows();
    let mut w: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            let mut row = a.row(i);
            row.extend((0..n).map(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0)));
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&x, &y| w[x][col].norm().total_cmp(&w[y][col].norm()))
            .unwrap();
        w.swap(col, p);
        let piv = w[col][col];
        for v in w[col].iter_mut() {
            *v /= piv;
        }
        for r in 0..n {
            if r != col {
                let f = w[r][col];
                let pivot_row = w[col].clone();
                for (x, y) in w[r].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
    CMatrix::from_fn(n, n, |i, j| w[i][n + j])
}
