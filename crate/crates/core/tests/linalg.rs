mod common;

use common::*;
use proptest::prelude::*;
use rotor_krylov::linalg::{
    dense_eig, lu_factor, lu_solve, norm2, orthogonalize_against, CMatrix, OrthonormalBasis, C64,
    DEFAULT_ETA,
};
use rotor_krylov::Error;

#[test]
fn lu_of_identity_keeps_permutation() {
    let f = lu_factor(&CMatrix::identity(3)).unwrap();
    assert_eq!(f.permutation(), &[0, 1, 2]);
    assert!(!f.is_singular());
    assert_eq!(f.lower().matmul(&f.upper()).unwrap(), CMatrix::identity(3));
}

#[test]
fn lu_of_swap_pivots() {
    let a = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
    let f = lu_factor(&a).unwrap();
    assert_eq!(f.permutation(), &[1, 0]);
    assert!(!f.is_singular());
}

#[test]
fn lu_reconstructs_seeded_8x8() {
    let a = random_matrix(&mut rng(8), 8, 8);
    let f = lu_factor(&a).unwrap();
    let pa = f.permute_rows(&a);
    let lu = f.lower().matmul(&f.upper()).unwrap();
    assert!(pa.max_abs_diff(&lu) <= 1e-12 * a.norm_max());
}

#[test]
fn lu_flags_singular_and_rejects_rectangular() {
    let a = CMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
    let f = lu_factor(&a).unwrap();
    assert!(f.is_singular());
    assert!(matches!(
        lu_solve(&f, &[c(1.0, 0.0), c(0.0, 0.0)]),
        Err(Error::Singular(_))
    ));
    assert!(matches!(
        lu_factor(&CMatrix::zeros(2, 3)),
        Err(Error::Dimension { .. })
    ));
}

#[test]
fn solve_trivial_systems() {
    let b = vec![c(1.0, 2.0), c(-3.0, 0.5)];
    let f = lu_factor(&CMatrix::identity(2)).unwrap();
    assert_eq!(lu_solve(&f, &b).unwrap(), b);
    let d = CMatrix::diag(&[c(2.0, 0.0), c(4.0, 0.0)]);
    let x = lu_solve(&lu_factor(&d).unwrap(), &[c(2.0, 0.0), c(4.0, 0.0)]).unwrap();
    assert_eq!(x, vec![c(1.0, 0.0), c(1.0, 0.0)]);
}

#[test]
fn solve_matches_explicit_inverse_6x6() {
    let mut g = rng(6);
    let a = well_conditioned(&mut g, 6);
    let b = random_vector(&mut g, 6);
    let x = lu_solve(&lu_factor(&a).unwrap(), &b).unwrap();
    let oracle = gauss_jordan_inverse(&a).matvec(&b).unwrap();
    let err: f64 = x
        .iter()
        .zip(&oracle)
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max);
    assert!(err <= 1e-10 * norm2(&oracle));
}

#[test]
fn nearly_dependent_vector_triggers_second_pass() {
    let mut g = rng(11);
    let basis = explicit_orthonormal(&[random_vector(&mut g, 10), random_vector(&mut g, 10)]);
    let fresh = {
        let raw = random_vector(&mut g, 10);
        let q = explicit_orthonormal(&[basis.col(0).to_vec(), basis.col(1).to_vec(), raw]);
        q.col(2).to_vec()
    };
    let w: Vec<C64> = basis
        .col(0)
        .iter()
        .zip(&fresh)
        .map(|(a, f)| a + f * 1e-9)
        .collect();
    let out = orthogonalize_against(&w, &basis, DEFAULT_ETA).unwrap();
    assert!(out.reorthogonalized);
    assert!(out.accepted);

    // oracle: two explicit classical projection passes
    let mut r = w.clone();
    for _ in 0..2 {
        let coeffs: Vec<C64> = (0..2)
            .map(|j| basis.col(j).iter().zip(&r).map(|(a, b)| a.conj() * b).sum())
            .collect();
        for (j, h) in coeffs.iter().enumerate() {
            for (ri, qi) in r.iter_mut().zip(basis.col(j)) {
                *ri -= h * qi;
            }
        }
    }
    let scale = norm2(&r);
    let diff: f64 = out
        .vector
        .iter()
        .zip(&r)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(diff <= 1e-8 * scale);
    // and it points along the fresh direction
    let along: C64 = fresh
        .iter()
        .zip(&out.vector)
        .map(|(a, b)| a.conj() * b)
        .sum();
    assert!((along.norm() - out.norm).abs() <= 1e-8 * out.norm);
}

fn sorted(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

#[test]
fn eig_trivial_cases() {
    let d = CMatrix::diag(&[c(1.0, 2.0), c(3.0, 0.0)]);
    let e = sorted(dense_eig(&d, false).unwrap().eigenvalues);
    assert!((e[0] - c(1.0, 2.0)).norm() < 1e-14 && (e[1] - c(3.0, 0.0)).norm() < 1e-14);

    let comp = CMatrix::from_real_rows(&[vec![3.0, -2.0], vec![1.0, 0.0]]);
    let e = sorted(dense_eig(&comp, false).unwrap().eigenvalues);
    assert!((e[0] - c(1.0, 0.0)).norm() < 1e-12 && (e[1] - c(2.0, 0.0)).norm() < 1e-12);
}

#[test]
fn eig_of_companion_cubic_matches_root_finder() {
    // λ³ − (1+j)λ² + 2λ − 5
    let coeffs = [c(1.0, 0.0), c(-1.0, -1.0), c(2.0, 0.0), c(-5.0, 0.0)];
    let comp = CMatrix::from_rows(&[
        vec![-coeffs[1], -coeffs[2], -coeffs[3]],
        vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
    ]);
    let eig = dense_eig(&comp, true).unwrap();
    let roots = poly_roots(&coeffs);
    assert!(match_multisets(&eig.eigenvalues, &roots) <= 1e-8);
    let vecs = eig.eigenvectors.unwrap();
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        let x = vecs.col(k);
        let hx = comp.matvec(x).unwrap();
        let res: Vec<C64> = hx.iter().zip(x).map(|(a, b)| a - lam * b).collect();
        assert!(norm2(&res) <= 1e-8 * comp.norm_fro() * norm2(x));
    }
}

#[test]
fn basis_contract_on_random_vectors() {
    let mut g = rng(3);
    let mut basis = OrthonormalBasis::from_start(&random_vector(&mut g, 40)).unwrap();
    for _ in 1..30 {
        let out = basis
            .orthogonalize(&random_vector(&mut g, 40), DEFAULT_ETA)
            .unwrap();
        assert!(out.accepted);
        basis.push_outcome(&out).unwrap();
    }
    assert!(basis.orthonormality_error() <= 1e-10);
    for j in 0..basis.len() {
        assert!((norm2(basis.col(j)) - 1.0).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn orthonormal_up_to_100_columns(seed in any::<u64>(), cols in 1usize..=100, near in 0.0f64..1.0) {
        let mut g = rng(seed);
        let n = 120;
        let mut basis = OrthonormalBasis::from_start(&random_vector(&mut g, n)).unwrap();
        while basis.len() < cols {
            // mix in the previous column so some candidates trip the second pass
            let prev = basis.col(basis.len() - 1).to_vec();
            let w: Vec<C64> = random_vector(&mut g, n)
                .iter()
                .zip(&prev)
                .map(|(r, p)| r * (1.0 - near) * 1e-3 + p * near)
                .collect();
            let out = basis.orthogonalize(&w, DEFAULT_ETA).unwrap();
            prop_assume!(out.accepted);
            basis.push_outcome(&out).unwrap();
        }
        prop_assert!(basis.orthonormality_error() <= 1e-10);
    }

    #[test]
    fn lu_round_trip(seed in any::<u64>(), n in 1usize..=64) {
        let mut g = rng(seed);
        let a = well_conditioned(&mut g, n);
        let b = random_vector(&mut g, n);
        let x = lu_solve(&lu_factor(&a).unwrap(), &b).unwrap();
        let ax = a.matvec(&x).unwrap();
        let r: Vec<C64> = ax.iter().zip(&b).map(|(p, q)| p - q).collect();
        prop_assert!(norm2(&r) <= 1e-10 * norm2(&b));
    }

    #[test]
    fn eig_trace_and_determinant(seed in any::<u64>(), n in 1usize..=40) {
        let a = random_matrix(&mut rng(seed), n, n);
        let e = dense_eig(&a, false).unwrap().eigenvalues;
        let sum: C64 = e.iter().sum();
        let prod: C64 = e.iter().product();
        let tr = a.trace();
        let det = lu_factor(&a).unwrap().determinant();
        prop_assert!((sum - tr).norm() <= 1e-8 * tr.norm().max(a.norm_fro()));
        prop_assert!((prod - det).norm() <= 1e-6 * det.norm());
    }
}
