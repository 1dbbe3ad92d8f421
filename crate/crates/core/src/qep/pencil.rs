use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::mtx::{read_matrix_file, write_matrix_file, MtxFormat};
use crate::rotor::{compose_pencil, SystemMatrices};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PencilKind {
    /// Free vibration at a fixed spin speed; real blocks.
    Modal,
    /// Eigenvalue is the spin speed itself; complex blocks.
    CriticalSpeed,
}

impl std::fmt::Display for PencilKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PencilKind::Modal => "modal",
            PencilKind::CriticalSpeed => "critical-speed",
        })
    }
}

/// Kind plus the operating point the pencil was built for.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PencilMeta {
    pub kind: PencilKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_ratio: Option<f64>,
}

/// `(s²M + sC + K) v = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticPencil {
    m: CMatrix,
    c: CMatrix,
    k: CMatrix,
    meta: PencilMeta,
}

impl QuadraticPencil {
    pub fn new(m: CMatrix, c: CMatrix, k: CMatrix, meta: PencilMeta) -> Result<Self> {
        let n = m.rows();
        for (name, b) in [("M", &m), ("C", &c), ("K", &k)] {
            if b.rows() != n || b.cols() != n {
                return Err(Error::dim(
                    "QuadraticPencil::new",
                    format!("{n}x{n} ({name})"),
                    format!("{}x{}", b.rows(), b.cols()),
                ));
            }
            if !b.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "{name} has non-finite entries"
                )));
            }
        }
        if n == 0 {
            return Err(Error::InvalidInput("pencil has zero dimension".into()));
        }
        if meta.kind == PencilKind::Modal && !(m.is_real() && c.is_real() && k.is_real()) {
            return Err(Error::InvalidInput(
                "modal pencils must have real blocks".into(),
            ));
        }
        Ok(Self { m, c, k, meta })
    }

    /// Convenience for hand-built modal pencils.
    pub fn modal(m: CMatrix, c: CMatrix, k: CMatrix) -> Result<Self> {
        let meta = PencilMeta {
            kind: PencilKind::Modal,
            omega: None,
            n_ratio: None,
        };
        Self::new(m, c, k, meta)
    }

    pub fn dof(&self) -> usize {
        self.m.rows()
    }

    pub fn m(&self) -> &CMatrix {
        &self.m
    }

    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    pub fn k(&self) -> &CMatrix {
        &self.k
    }

    pub fn kind(&self) -> PencilKind {
        self.meta.kind
    }

    pub fn meta(&self) -> PencilMeta {
        self.meta
    }

    pub fn is_real(&self) -> bool {
        self.m.is_real() && self.c.is_real() && self.k.is_real()
    }

    /// `(s²M + sC + K) v`.
    pub fn apply(&self, s: C64, v: &[C64]) -> Result<Vec<C64>> {
        let mv = self.m.matvec(v)?;
        let cv = self.c.matvec(v)?;
        let kv = self.k.matvec(v)?;
        let s2 = s * s;
        Ok((0..v.len())
            .map(|i| s2 * mv[i] + s * cv[i] + kv[i])
            .collect())
    }

    /// Backward-error style residual of an approximate eigenpair:
    /// `‖(s²M + sC + K)v‖ / ((|s|²‖M‖_F + |s|‖C‖_F + ‖K‖_F)‖v‖)`.
    pub fn residual(&self, s: C64, v: &[C64]) -> Result<f64> {
        let r = self.apply(s, v)?;
        let a = s.norm();
        let scale = (a * a * self.m.norm_fro() + a * self.c.norm_fro() + self.k.norm_fro())
            * crate::linalg::norm2(v);
        if scale == 0.0 {
            return Ok(if crate::linalg::norm2(&r) == 0.0 {
                0.0
            } else {
                f64::INFINITY
            });
        }
        Ok(crate::linalg::norm2(&r) / scale)
    }

    /// Writes `M.mtx`, `C.mtx`, `K.mtx` and `pencil.json` into `dir`.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        write_matrix_file(dir.join("M.mtx"), &self.m, MtxFormat::Coordinate)?;
        write_matrix_file(dir.join("C.mtx"), &self.c, MtxFormat::Coordinate)?;
        write_matrix_file(dir.join("K.mtx"), &self.k, MtxFormat::Coordinate)?;
        std::fs::write(
            dir.join("pencil.json"),
            serde_json::to_string_pretty(&self.meta)? + "\n",
        )?;
        Ok(())
    }

    pub fn read_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let meta: PencilMeta =
            serde_json::from_str(&std::fs::read_to_string(dir.join("pencil.json"))?)?;
        Self::new(
            read_matrix_file(dir.join("M.mtx"))?,
            read_matrix_file(dir.join("C.mtx"))?,
            read_matrix_file(dir.join("K.mtx"))?,
            meta,
        )
    }
}

/// Modal pencil at spin speed `omega` (rad/s).
pub fn modal_pencil(sys: &SystemMatrices, omega: f64) -> Result<QuadraticPencil> {
    let (m, c, k) = compose_pencil(sys, omega)?;
    QuadraticPencil::new(
        m,
        c,
        k,
        PencilMeta {
            kind: PencilKind::Modal,
            omega: Some(omega),
            n_ratio: None,
        },
    )
}

/// Critical-speed pencil for excitation ratio `n`: substituting
/// `s = jnΩ` into the spin-dependent equation gives a QEP in `Ω` with
/// `M̂ = −n²M₀ + jnC₁`, `Ĉ = jnC₀ + K₁`, `K̂ = K₀`.
pub fn critical_speed_pencil(sys: &SystemMatrices, n_ratio: f64) -> Result<QuadraticPencil> {
    if !(n_ratio.is_finite() && n_ratio > 0.0) {
        return Err(Error::InvalidInput(format!(
            "excitation ratio must be positive, got {n_ratio}"
        )));
    }
    let jn = C64::new(0.0, n_ratio);
    let mut m = sys.m0.scale_real(-n_ratio * n_ratio);
    m.add_scaled(jn, &sys.c1)?;
    let mut c = sys.c0().scale(jn);
    c.add_scaled(C64::new(1.0, 0.0), &sys.k1)?;
    QuadraticPencil::new(
        m,
        c,
        sys.k0.clone(),
        PencilMeta {
            kind: PencilKind::CriticalSpeed,
            omega: None,
            n_ratio: Some(n_ratio),
        },
    )
}
