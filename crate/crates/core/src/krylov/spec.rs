use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm2, ones, C64, DEFAULT_ETA};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Arnoldi on the `2n` linearization; the reduced problem is the Hessenberg matrix.
    Arnoldi,
    /// Second-order Arnoldi with `r₋₁ = 0`.
    Soar,
    /// Two-level orthogonal Arnoldi.
    Toar,
    /// Linear-recurrence QEP Arnoldi.
    Lqar,
    /// Arnoldi on `s̃B + A` with `s̃` from a power estimate.
    Qar,
    /// Two independent Arnoldi chains merged and re-orthogonalized.
    Tgsar1,
    /// Interleaved `A`/`B` chains.
    Tgsar2,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Arnoldi,
        Method::Soar,
        Method::Toar,
        Method::Lqar,
        Method::Qar,
        Method::Tgsar1,
        Method::Tgsar2,
    ];

    /// The six methods of a standard comparison (`tgsar2` stands for TGSAR).
    pub const COMPARISON: [Method; 6] = [
        Method::Arnoldi,
        Method::Soar,
        Method::Toar,
        Method::Lqar,
        Method::Qar,
        Method::Tgsar2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Arnoldi => "arnoldi",
            Method::Soar => "soar",
            Method::Toar => "toar",
            Method::Lqar => "lqar",
            Method::Qar => "qar",
            Method::Tgsar1 => "tgsar1",
            Method::Tgsar2 => "tgsar2",
        }
    }

    /// Largest meaningful `m` for a pencil of size `dof`.
    pub fn max_order(self, dof: usize) -> usize {
        match self {
            Method::Arnoldi => 2 * dof,
            _ => dof,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "arnoldi" => Ok(Method::Arnoldi),
            "soar" => Ok(Method::Soar),
            "toar" => Ok(Method::Toar),
            "lqar" => Ok(Method::Lqar),
            "qar" => Ok(Method::Qar),
            "tgsar1" => Ok(Method::Tgsar1),
            "tgsar" | "tgsar2" => Ok(Method::Tgsar2),
            other => Err(Error::InvalidInput(format!(
                "unknown method `{other}` (expected arnoldi, soar, toar, lqar, qar, tgsar1, tgsar2)"
            ))),
        }
    }
}

/// Method, order and start vectors of one reduction run.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionSpec {
    pub method: Method,
    pub m: usize,
    pub eta: f64,
    pub b: Vec<C64>,
    pub b0: Vec<C64>,
    pub b1: Vec<C64>,
}

impl ReductionSpec {
    /// All start vectors set to ones and `η = √2/2`.
    pub fn new(method: Method, m: usize, dof: usize) -> Self {
        Self {
            method,
            m,
            eta: DEFAULT_ETA,
            b: ones(dof),
            b0: ones(dof),
            b1: ones(dof),
        }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_starts(mut self, b: Vec<C64>, b0: Vec<C64>, b1: Vec<C64>) -> Self {
        self.b = b;
        self.b0 = b0;
        self.b1 = b1;
        self
    }

    pub fn validate(&self, dof: usize) -> Result<()> {
        let max = self.method.max_order(dof);
        if self.m < 1 || self.m > max {
            return Err(Error::InvalidInput(format!(
                "m = {} is outside 1..={max} for {} on a {dof}-DOF pencil",
                self.m, self.method
            )));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "eta must lie in (0, 1], got {}",
                self.eta
            )));
        }
        for (name, v) in [("b", &self.b), ("b0", &self.b0), ("b1", &self.b1)] {
            if v.len() != dof {
                return Err(Error::dim(
                    "ReductionSpec",
                    dof,
                    format!("{} ({name})", v.len()),
                ));
            }
            let n = norm2(v);
            if n == 0.0 || !n.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "start vector {name} must have finite nonzero norm"
                )));
            }
        }
        Ok(())
    }
}
