use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::C64;

/// `s = −ξw + j·w_d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModalQuantities {
    #[serde(serialize_with = "super::report::ser_c64")]
    pub s: C64,
    /// Undamped natural frequency `|s|` (rad/s).
    pub w: f64,
    /// Damped natural frequency `Im s` (rad/s), sign kept.
    pub w_d: f64,
    /// Damping ratio `−Re s / |s|`.
    pub xi: f64,
}

pub fn modal_quantities(s: C64) -> Result<ModalQuantities> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::InvalidInput(format!("eigenvalue {s} is not finite")));
    }
    let w = s.norm();
    if w == 0.0 {
        return Err(Error::InvalidInput(
            "damping ratio is undefined for a zero eigenvalue".into(),
        ));
    }
    Ok(ModalQuantities {
        s,
        w,
        w_d: s.im,
        xi: -s.re / w,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalSpeedResult {
    #[serde(serialize_with = "super::report::ser_c64")]
    pub omega: C64,
    pub accepted: bool,
    /// `Re Ω` (rad/s) when accepted.
    pub speed: Option<f64>,
}

/// A root `Ω` of the critical-speed pencil is a physical critical speed iff
/// `|Im Ω| < |Re Ω|` (strict; the boundary is rejected).
pub fn critical_speed_filter(omegas: &[C64]) -> Vec<CriticalSpeedResult> {
    let mut accepted = Vec::new();
    let mut rejected = Vec::new();
    for &omega in omegas {
        if omega.im.abs() < omega.re.abs() {
            accepted.push(CriticalSpeedResult {
                omega,
                accepted: true,
                speed: Some(omega.re),
            });
        } else {
            rejected.push(CriticalSpeedResult {
                omega,
                accepted: false,
                speed: None,
            });
        }
    }
    accepted.sort_by(|a, b| {
        let (x, y) = (a.omega.re, b.omega.re);
        x.abs().total_cmp(&y.abs()).then(x.total_cmp(&y))
    });
    accepted.extend(rejected);
    accepted
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let q = modal_quantities(C64::new(-1.0, 2.0)).unwrap();
        assert!((q.w - 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(q.w_d, 2.0);
        assert!((q.xi - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        let u = modal_quantities(C64::new(0.0, 3.0)).unwrap();
        assert_eq!((u.w, u.w_d, u.xi), (3.0, 3.0, 0.0));
        assert!(modal_quantities(C64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn filter_rule() {
        let r = critical_speed_filter(&[
            C64::new(3.0, 100.0),
            C64::new(325.21, 3.13),
            C64::new(5.0, 5.0),
        ]);
        assert!(r[0].accepted);
        assert_eq!(r[0].speed, Some(325.21));
        assert!(!r[1].accepted && !r[2].accepted);
    }
}
