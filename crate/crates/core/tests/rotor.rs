mod common;

use common::*;
use rotor_krylov::linalg::{dense_eig, lu_factor, CMatrix};
use rotor_krylov::rotor::{assemble, compose_pencil, load_model, SystemMatrices, DOF_PER_NODE};
use rotor_krylov::Error;

const STEEL: &str = "density = 7800.0\nyoungs_modulus = 2.1e11";

fn doc(nodes: &str, segments: &str, extra: &str) -> String {
    format!("nodes = {nodes}\n\n[rayleigh]\nalpha = 10.0\nbeta = 1e-5\n\n{segments}\n{extra}")
}

fn segment(start: usize, end: usize, od: f64, density: f64) -> String {
    format!(
        "[[segment]]\nstart = {start}\nend = {end}\nouter_diameter = {od}\ndensity = {density}\nyoungs_modulus = 2.1e11\n"
    )
}

fn bearing(node: usize, kxx: f64, kyy: f64) -> String {
    format!("[[bearing]]\nnode = {node}\nstiffness = [[{kxx}, 0.0], [0.0, {kyy}]]\ndamping = [[100.0, 0.0], [0.0, 100.0]]\n")
}

#[test]
fn minimal_rotor_has_eight_dofs() {
    let text = format!(
        "nodes = [0.0, 0.5]\n[rayleigh]\nalpha = 0.0\nbeta = 0.0\n[[segment]]\nstart = 0\nend = 1\nouter_diameter = 0.05\n{STEEL}\n{}",
        bearing(0, 1e6, 1e6)
    );
    let model = load_model(&text).unwrap();
    assert_eq!(model.dof(), 8);
    assert_eq!(assemble(&model).unwrap().dof(), 8);
}

#[test]
fn dangling_bearing_is_rejected() {
    let text = doc(
        "[0.0, 0.5]",
        &segment(0, 1, 0.05, 7800.0),
        &bearing(99, 1e6, 1e6),
    );
    match load_model(&text) {
        Err(Error::Config { path, .. }) => assert!(path.contains("bearing[0].node"), "{path}"),
        other => panic!("expected config error, got {other:?}"),
    }
}

#[test]
fn shipped_rotors_have_expected_sizes() {
    for (name, dof) in [
        ("lp796", 796),
        ("fan440", 440),
        ("small236", 236),
        ("desk120", 120),
    ] {
        assert_eq!(rotor(name).dof(), dof, "{name}");
    }
}

fn assert_patterns(sys: &SystemMatrices) {
    assert!(sys.m0.is_symmetric());
    assert!(sys.k0.is_symmetric());
    assert!(sys.mr.is_symmetric());
    assert!(sys.kr.is_symmetric());
    assert!(sys.c1.is_skew_symmetric());
    for m in [
        &sys.m0, &sys.c1, &sys.k0, &sys.k1, &sys.mr, &sys.kr, &sys.cb,
    ] {
        assert!(m.is_real());
        assert_eq!(m.rows(), sys.dof());
    }
}

#[test]
fn symmetry_patterns_are_exact() {
    for name in ["desk120", "small236"] {
        assert_patterns(&rotor(name));
    }
}

#[test]
fn shaft_only_model_degenerates() {
    let text = doc("[0.0, 0.3, 0.6, 0.9]", &segment(0, 3, 0.04, 7800.0), "");
    let sys = assemble(&load_model(&text).unwrap()).unwrap();
    assert_eq!(sys.m0, sys.mr);
    assert_eq!(sys.k0, sys.kr);
    assert!(sys.k1.is_zero());
    assert!(sys.cb.is_zero());
    assert!(!sys.c1.is_zero());
    assert_patterns(&sys);
}

#[test]
fn massless_shaft_leaves_the_disk_element() {
    let disk = "[[disk]]\nnode = 1\nmass = 3.0\npolar_inertia = 0.02\ndiametral_inertia = 0.011\n";
    let text = doc("[0.0, 0.4, 0.8]", &segment(0, 2, 0.04, 0.0), disk);
    let sys = assemble(&load_model(&text).unwrap()).unwrap();
    let p = DOF_PER_NODE;
    let block = sys.m0.submatrix(p, 2 * p, p, 2 * p);
    let expected = CMatrix::from_real_rows(&[
        vec![3.0, 0.0, 0.0, 0.0],
        vec![0.0, 3.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.011, 0.0],
        vec![0.0, 0.0, 0.0, 0.011],
    ]);
    assert_eq!(block, expected);
    let g = sys.c1.submatrix(p, 2 * p, p, 2 * p);
    assert_eq!(g[(2, 3)], c(0.02, 0.0));
    assert_eq!(g[(3, 2)], c(-0.02, 0.0));
    assert_eq!(g.nnz(), 2);
    // everything off the disk node is empty
    assert_eq!(sys.m0.nnz(), 4);
}

#[test]
fn mirrored_rotor_is_invariant_under_reflection() {
    let nodes = "[0.0, 0.25, 0.5, 0.75, 1.0]";
    let extra = format!(
        "{}{}[[disk]]\nnode = 2\nmass = 5.0\npolar_inertia = 0.05\ndiametral_inertia = 0.03\n",
        bearing(0, 2e6, 3e6),
        bearing(4, 2e6, 3e6)
    );
    let sys =
        assemble(&load_model(&doc(nodes, &segment(0, 4, 0.05, 7800.0), &extra)).unwrap()).unwrap();
    let n = sys.dof();
    let nodes_count = n / DOF_PER_NODE;
    // node i ↔ node N−1−i; reflecting the axis flips the rotation signs
    let image = |d: usize| {
        let (node, local) = (d / DOF_PER_NODE, d % DOF_PER_NODE);
        let sign = if local >= 2 { -1.0 } else { 1.0 };
        ((nodes_count - 1 - node) * DOF_PER_NODE + local, sign)
    };
    for mat in [&sys.k0, &sys.m0] {
        let scale = mat.norm_max();
        for i in 0..n {
            for j in 0..n {
                let (pi, si) = image(i);
                let (pj, sj) = image(j);
                let d = (mat[(pi, pj)] * (si * sj) - mat[(i, j)]).norm();
                assert!(d <= 1e-12 * scale, "({i},{j}) differs by {d}");
            }
        }
    }
}

#[allow(clippy::needless_range_loop)]
/// Plain real Cholesky; `None` on a non-positive pivot.
fn cholesky(a: &CMatrix) -> Option<Vec<Vec<f64>>> {
    let n = a.rows();
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if d <= 0.0 {
            return None;
        }
        l[j][j] = d.sqrt();
        for i in j + 1..n {
            let mut s = a[(i, j)].re;
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / l[j][j];
        }
    }
    Some(l)
}

#[test]
fn supported_rotor_is_positive_definite() {
    let sys = rotor("desk120");
    assert!(cholesky(&sys.k0).is_some());
    let eig = dense_eig(&sys.m0, false).unwrap();
    assert!(eig.eigenvalues.iter().all(|z| z.re > 0.0));
}

#[test]
fn free_shaft_has_rigid_body_modes() {
    let text = doc(
        "[0.0, 0.2, 0.4, 0.6, 0.8, 1.0]",
        &segment(0, 5, 0.05, 7800.0),
        "",
    );
    let sys = assemble(&load_model(&text).unwrap()).unwrap();
    let f = lu_factor(&sys.k0).unwrap();
    assert!(f.is_singular());
    let u = f.upper();
    let biggest = (0..sys.dof()).map(|i| u[(i, i)].norm()).fold(0.0, f64::max);
    let tiny = (0..sys.dof())
        .filter(|&i| u[(i, i)].norm() <= 1e-9 * biggest)
        .count();
    assert!(tiny >= 4, "only {tiny} singular pivots");
}

#[test]
fn composed_pencil_follows_speed() {
    let sys = rotor("desk120");
    let (m0, c0, k0) = compose_pencil(&sys, 0.0).unwrap();
    assert_eq!(c0, sys.c0());
    assert_eq!(k0, sys.k0);
    assert_eq!(m0, sys.m0);

    let (m, cm, k) = compose_pencil(&sys, 500.0).unwrap();
    assert!(m.is_symmetric() && k.is_symmetric());
    assert!(!cm.is_symmetric());

    let (_, c2, _) = compose_pencil(&sys, 1000.0).unwrap();
    let d1 = cm.try_sub(&c0).unwrap();
    let d2 = c2.try_sub(&c0).unwrap();
    assert!(d2.max_abs_diff(&d1.scale_real(2.0)) <= 1e-12 * d2.norm_max());
    assert!(compose_pencil(&sys, -1.0).is_err());
}

#[test]
fn export_round_trip() {
    let sys = rotor("desk120");
    let dir = std::env::temp_dir().join(format!("rotor-export-{}", std::process::id()));
    sys.write_dir(&dir, Some("desk120")).unwrap();
    let back = SystemMatrices::read_dir(&dir).unwrap();
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(back.k0, sys.k0);
    assert_eq!(back.c1, sys.c1);
    assert_eq!(back.rayleigh, sys.rayleigh);
}
