//! Finite-element assembly of the lateral rotor model.
//!
//! Each node carries four DOFs in the order `[u_x, u_y, φ_x, φ_y]`, where
//! `u_x, u_y` are lateral translations and `φ_x = du_x/dz`, `φ_y = du_y/dz`
//! the slopes of the deflection curve in the two bending planes. Shaft
//! elements are Euler–Bernoulli beams with consistent mass, rotary inertia and
//! gyroscopic matrices; disks are rigid; bearings act on translations only.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::{Rayleigh, RotorModel, ShaftSegment};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::mtx::{read_matrix_file, write_matrix_file, MtxFormat};

pub const DOF_PER_NODE: usize = 4;

/// Speed-independent blocks of `M ẍ + (C₀ + ΩC₁) ẋ + (K₀ + ΩK₁) x = 0`,
/// with `C₀ = αM_r + βK_r + C_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemMatrices {
    pub m0: CMatrix,
    pub c1: CMatrix,
    pub k0: CMatrix,
    pub k1: CMatrix,
    pub mr: CMatrix,
    pub kr: CMatrix,
    pub cb: CMatrix,
    pub rayleigh: Rayleigh,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SystemMeta {
    dof: usize,
    alpha: f64,
    beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

const BLOCK_FILES: [&str; 7] = ["M0", "C1", "K0", "K1", "Mr", "Kr", "Cb"];

impl SystemMatrices {
    pub fn dof(&self) -> usize {
        self.m0.rows()
    }

    /// `αM_r + βK_r + C_b`.
    pub fn c0(&self) -> CMatrix {
        let mut c = self.cb.clone();
        c.add_scaled(C64::new(self.rayleigh.alpha, 0.0), &self.mr)
            .expect("blocks share a dimension");
        c.add_scaled(C64::new(self.rayleigh.beta, 0.0), &self.kr)
            .expect("blocks share a dimension");
        c
    }

    fn blocks(&self) -> [&CMatrix; 7] {
        [
            &self.m0, &self.c1, &self.k0, &self.k1, &self.mr, &self.kr, &self.cb,
        ]
    }

    /// Writes `M0.mtx … Cb.mtx` and `system.json` into `dir`.
    pub fn write_dir(&self, dir: impl AsRef<Path>, name: Option<&str>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        for (file, block) in BLOCK_FILES.iter().zip(self.blocks()) {
            write_matrix_file(
                dir.join(format!("{file}.mtx")),
                block,
                MtxFormat::Coordinate,
            )?;
        }
        let meta = SystemMeta {
            dof: self.dof(),
            alpha: self.rayleigh.alpha,
            beta: self.rayleigh.beta,
            name: name.map(str::to_string),
        };
        std::fs::write(
            dir.join("system.json"),
            serde_json::to_string_pretty(&meta)? + "\n",
        )?;
        Ok(())
    }

    /// Reads a directory written by [`SystemMatrices::write_dir`].
    pub fn read_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let meta: SystemMeta =
            serde_json::from_str(&std::fs::read_to_string(dir.join("system.json"))?)?;
        let mut blocks = Vec::with_capacity(7);
        for file in BLOCK_FILES {
            let m = read_matrix_file(dir.join(format!("{file}.mtx")))?;
            if m.rows() != meta.dof || m.cols() != meta.dof {
                return Err(Error::dim(
                    "SystemMatrices::read_dir",
                    format!("{0}x{0}", meta.dof),
                    format!("{}x{} in {file}.mtx", m.rows(), m.cols()),
                ));
            }
            blocks.push(m);
        }
        let mut it = blocks.into_iter();
        let mut next = || it.next().expect("seven blocks");
        Ok(Self {
            m0: next(),
            c1: next(),
            k0: next(),
            k1: next(),
            mr: next(),
            kr: next(),
            cb: next(),
            rayleigh: Rayleigh {
                alpha: meta.alpha,
                beta: meta.beta,
            },
        })
    }
}

/// 4×4 plane-element matrices acting on `(u_a, φ_a, u_b, φ_b)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamElement {
    pub translational_mass: [[f64; 4]; 4],
    pub rotary_inertia: [[f64; 4]; 4],
    pub stiffness: [[f64; 4]; 4],
    /// Gyroscopic coupling of the x-plane rows to the y-plane columns.
    pub gyroscopic: [[f64; 4]; 4],
}

impl BeamElement {
    pub fn new(length: f64, seg: &ShaftSegment) -> Self {
        let l = length;
        let (d_o, d_i) = (seg.outer_diameter, seg.inner_diameter);
        let area = PI * (d_o * d_o - d_i * d_i) / 4.0;
        let inertia = PI * (d_o.powi(4) - d_i.powi(4)) / 64.0;
        let rho = seg.density;
        let l2 = l * l;

        let mt = rho * area * l / 420.0;
        let translational_mass = scaled(
            mt,
            [
                [156.0, 22.0 * l, 54.0, -13.0 * l],
                [22.0 * l, 4.0 * l2, 13.0 * l, -3.0 * l2],
                [54.0, 13.0 * l, 156.0, -22.0 * l],
                [-13.0 * l, -3.0 * l2, -22.0 * l, 4.0 * l2],
            ],
        );
        let pattern = [
            [36.0, 3.0 * l, -36.0, 3.0 * l],
            [3.0 * l, 4.0 * l2, -3.0 * l, -l2],
            [-36.0, -3.0 * l, 36.0, -3.0 * l],
            [3.0 * l, -l2, -3.0 * l, 4.0 * l2],
        ];
        let rotary_inertia = scaled(rho * inertia / (30.0 * l), pattern);
        // polar area moment is 2I for a circular section
        let gyroscopic = scaled(2.0 * rho * inertia / (30.0 * l), pattern);
        let stiffness = scaled(
            seg.youngs_modulus * inertia / (l2 * l),
            [
                [12.0, 6.0 * l, -12.0, 6.0 * l],
                [6.0 * l, 4.0 * l2, -6.0 * l, 2.0 * l2],
                [-12.0, -6.0 * l, 12.0, -6.0 * l],
                [6.0 * l, 2.0 * l2, -6.0 * l, 4.0 * l2],
            ],
        );
        Self {
            translational_mass,
            rotary_inertia,
            stiffness,
            gyroscopic,
        }
    }
}

fn scaled(s: f64, mut m: [[f64; 4]; 4]) -> [[f64; 4]; 4] {
    for row in &mut m {
        for v in row {
            *v *= s;
        }
    }
    m
}

/// Global indices of the x-plane `(u_x, φ_x)` and y-plane `(u_y, φ_y)` DOFs of
/// an element between nodes `a` and `b`.
fn plane_dofs(a: usize, b: usize) -> ([usize; 4], [usize; 4]) {
    let (pa, pb) = (DOF_PER_NODE * a, DOF_PER_NODE * b);
    ([pa, pa + 2, pb, pb + 2], [pa + 1, pa + 3, pb + 1, pb + 3])
}

fn scatter(
    target: &mut CMatrix,
    rows: &[usize; 4],
    cols: &[usize; 4],
    block: &[[f64; 4]; 4],
    sign: f64,
) {
    for (r, &gi) in rows.iter().enumerate() {
        for (c, &gj) in cols.iter().enumerate() {
            target[(gi, gj)] += C64::new(sign * block[r][c], 0.0);
        }
    }
}

fn add2(target: &mut CMatrix, node: usize, block: &[[f64; 2]; 2]) {
    let p = DOF_PER_NODE * node;
    for r in 0..2 {
        for c in 0..2 {
            target[(p + r, p + c)] += C64::new(block[r][c], 0.0);
        }
    }
}

/// Assembles all system blocks. The model is re-validated first.
pub fn assemble(model: &RotorModel) -> Result<SystemMatrices> {
    model.validate()?;
    let n = model.dof();
    let mut mr = CMatrix::zeros(n, n);
    let mut kr = CMatrix::zeros(n, n);
    let mut c1 = CMatrix::zeros(n, n);

    for seg in &model.segments {
        for a in seg.start..seg.end {
            let b = a + 1;
            let el = BeamElement::new(model.nodes[b] - model.nodes[a], seg);
            let (x, y) = plane_dofs(a, b);
            for plane in [&x, &y] {
                scatter(&mut mr, plane, plane, &el.translational_mass, 1.0);
                scatter(&mut mr, plane, plane, &el.rotary_inertia, 1.0);
                scatter(&mut kr, plane, plane, &el.stiffness, 1.0);
            }
            scatter(&mut c1, &x, &y, &el.gyroscopic, 1.0);
            scatter(&mut c1, &y, &x, &el.gyroscopic, -1.0);
        }
    }

    let mut m0 = mr.clone();
    for d in &model.disks {
        let p = DOF_PER_NODE * d.node;
        m0[(p, p)] += C64::new(d.mass, 0.0);
        m0[(p + 1, p + 1)] += C64::new(d.mass, 0.0);
        m0[(p + 2, p + 2)] += C64::new(d.diametral_inertia, 0.0);
        m0[(p + 3, p + 3)] += C64::new(d.diametral_inertia, 0.0);
        c1[(p + 2, p + 3)] += C64::new(d.polar_inertia, 0.0);
        c1[(p + 3, p + 2)] -= C64::new(d.polar_inertia, 0.0);
    }

    let mut k0 = kr.clone();
    let mut k1 = CMatrix::zeros(n, n);
    let mut cb = CMatrix::zeros(n, n);
    for b in &model.bearings {
        add2(&mut k0, b.node, &b.stiffness);
        add2(&mut cb, b.node, &b.damping);
        add2(&mut k1, b.node, &b.cross_coupling);
    }

    Ok(SystemMatrices {
        m0,
        c1,
        k0,
        k1,
        mr,
        kr,
        cb,
        rayleigh: model.rayleigh,
    })
}

/// `(M, C, K)` at spin speed `omega` (rad/s):
/// `M = M₀`, `C = αM_r + βK_r + C_b + ΩC₁`, `K = K₀ + ΩK₁`.
pub fn compose_pencil(sys: &SystemMatrices, omega: f64) -> Result<(CMatrix, CMatrix, CMatrix)> {
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "spin speed must be finite and non-negative, got {omega}"
        )));
    }
    let mut c = sys.c0();
    let mut k = sys.k0.clone();
    if omega != 0.0 {
        c.add_scaled(C64::new(omega, 0.0), &sys.c1)?;
        k.add_scaled(C64::new(omega, 0.0), &sys.k1)?;
    }
    Ok((sys.m0.clone(), c, k))
}
