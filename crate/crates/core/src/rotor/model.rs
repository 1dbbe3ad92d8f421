//! Declarative rotor description and its validation.
//!
//! Config documents are TOML. All quantities are SI:
//!
//! ```toml
//! name = "two-bearing demo"
//! nodes = [0.0, 0.25, 0.5]            # axial positions (m), strictly increasing
//! # or: node_grid = { start = 0.0, end = 0.5, count = 3 }
//!
//! [rayleigh]
//! alpha = 10.0                         # 1/s, multiplies the shaft mass
//! beta = 1e-5                          # s, multiplies the shaft stiffness
//!
//! [[segment]]                          # one beam element per consecutive node pair
//! start = 0                            # node index (0-based)
//! end = 2
//! outer_diameter = 0.05                # m
//! inner_diameter = 0.0                 # m
//! density = 7810.0                     # kg/m³
//! youngs_modulus = 2.11e11             # Pa
//!
//! [[disk]]
//! node = 1
//! mass = 5.0                           # kg
//! polar_inertia = 0.02                 # kg·m²
//! diametral_inertia = 0.01             # kg·m²
//!
//! [[bearing]]
//! node = 0
//! stiffness = [[1e7, 0.0], [0.0, 1e7]]         # N/m, symmetric
//! damping = [[100.0, 0.0], [0.0, 100.0]]       # N·s/m
//! cross_coupling = [[0.0, 10.0], [-10.0, 0.0]] # N·s/m, scaled by Ω
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Mat2 = [[f64; 2]; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShaftSegment {
    pub start: usize,
    pub end: usize,
    pub outer_diameter: f64,
    #[serde(default)]
    pub inner_diameter: f64,
    pub density: f64,
    pub youngs_modulus: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub node: usize,
    pub mass: f64,
    pub polar_inertia: f64,
    pub diametral_inertia: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bearing {
    pub node: usize,
    pub stiffness: Mat2,
    #[serde(default)]
    pub damping: Mat2,
    /// Speed-proportional stiffness, enters `K = K₀ + Ω K₁`.
    #[serde(default)]
    pub cross_coupling: Mat2,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Rayleigh {
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeGrid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RotorDocument {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    nodes: Option<Vec<f64>>,
    #[serde(default)]
    node_grid: Option<NodeGrid>,
    #[serde(default)]
    rayleigh: Rayleigh,
    #[serde(default, rename = "segment")]
    segments: Vec<ShaftSegment>,
    #[serde(default, rename = "disk")]
    disks: Vec<Disk>,
    #[serde(default, rename = "bearing")]
    bearings: Vec<Bearing>,
}

/// A validated rotor. Node `i` carries DOFs `4i..4i+4`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotorModel {
    pub name: Option<String>,
    pub nodes: Vec<f64>,
    pub segments: Vec<ShaftSegment>,
    pub disks: Vec<Disk>,
    pub bearings: Vec<Bearing>,
    pub rayleigh: Rayleigh,
}

impl RotorModel {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn dof(&self) -> usize {
        4 * self.nodes.len()
    }

    /// Checks every structural and physical invariant, naming the offending
    /// field on failure.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        if n < 2 {
            return Err(Error::config("nodes", "a rotor needs at least two nodes"));
        }
        for (i, z) in self.nodes.iter().enumerate() {
            if !z.is_finite() {
                return Err(Error::config(
                    format!("nodes[{i}]"),
                    "position is not finite",
                ));
            }
            if i > 0 && *z <= self.nodes[i - 1] {
                return Err(Error::config(
                    format!("nodes[{i}]"),
                    format!(
                        "positions must be strictly increasing ({} follows {})",
                        z,
                        self.nodes[i - 1]
                    ),
                ));
            }
        }
        let node_ref = |path: String, node: usize| -> Result<()> {
            if node >= n {
                return Err(Error::config(
                    path,
                    format!(
                        "references node {node}, but the model has nodes 0..={}",
                        n - 1
                    ),
                ));
            }
            Ok(())
        };
        let nonneg = |path: String, v: f64| -> Result<()> {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(
                    path,
                    format!("must be finite and non-negative, got {v}"),
                ));
            }
            Ok(())
        };

        if self.segments.is_empty() {
            return Err(Error::config(
                "segment",
                "at least one shaft segment is required",
            ));
        }
        for (k, s) in self.segments.iter().enumerate() {
            let p = |f: &str| format!("segment[{k}].{f}");
            node_ref(p("start"), s.start)?;
            node_ref(p("end"), s.end)?;
            if s.end <= s.start {
                return Err(Error::config(p("end"), "must be greater than start"));
            }
            nonneg(p("outer_diameter"), s.outer_diameter)?;
            nonneg(p("inner_diameter"), s.inner_diameter)?;
            nonneg(p("density"), s.density)?;
            nonneg(p("youngs_modulus"), s.youngs_modulus)?;
            if s.outer_diameter <= s.inner_diameter {
                return Err(Error::config(
                    p("outer_diameter"),
                    "must exceed inner_diameter",
                ));
            }
        }
        for (k, d) in self.disks.iter().enumerate() {
            let p = |f: &str| format!("disk[{k}].{f}");
            node_ref(p("node"), d.node)?;
            nonneg(p("mass"), d.mass)?;
            nonneg(p("polar_inertia"), d.polar_inertia)?;
            nonneg(p("diametral_inertia"), d.diametral_inertia)?;
        }
        for (k, b) in self.bearings.iter().enumerate() {
            let p = |f: &str| format!("bearing[{k}].{f}");
            node_ref(p("node"), b.node)?;
            for (name, m) in [
                ("stiffness", &b.stiffness),
                ("damping", &b.damping),
                ("cross_coupling", &b.cross_coupling),
            ] {
                if m.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::config(p(name), "entries must be finite"));
                }
            }
            if b.stiffness[0][1] != b.stiffness[1][0] {
                return Err(Error::config(
                    p("stiffness"),
                    "direct stiffness must be symmetric; put skew terms in cross_coupling",
                ));
            }
            nonneg(p("stiffness[0][0]"), b.stiffness[0][0])?;
            nonneg(p("stiffness[1][1]"), b.stiffness[1][1])?;
            nonneg(p("damping[0][0]"), b.damping[0][0])?;
            nonneg(p("damping[1][1]"), b.damping[1][1])?;
        }
        nonneg("rayleigh.alpha".into(), self.rayleigh.alpha)?;
        nonneg("rayleigh.beta".into(), self.rayleigh.beta)?;
        Ok(())
    }
}

/// Parses and validates a rotor config document.
pub fn load_model(text: &str) -> Result<RotorModel> {
    let doc: RotorDocument =
        toml::from_str(text).map_err(|e| Error::config(toml_error_path(text, &e), e.message()))?;
    let nodes = match (doc.nodes, doc.node_grid) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                "nodes",
                "give either `nodes` or `node_grid`, not both",
            ))
        }
        (Some(nodes), None) => nodes,
        (None, Some(g)) => {
            if g.count < 2 {
                return Err(Error::config("node_grid.count", "must be at least 2"));
            }
            if !(g.end > g.start) {
                return Err(Error::config(
                    "node_grid.end",
                    "must exceed node_grid.start",
                ));
            }
            let h = (g.end - g.start) / (g.count - 1) as f64;
            (0..g.count).map(|i| g.start + h * i as f64).collect()
        }
        (None, None) => {
            return Err(Error::config(
                "nodes",
                "missing field `nodes` (or `node_grid`)",
            ))
        }
    };
    let model = RotorModel {
        name: doc.name,
        nodes,
        segments: doc.segments,
        disks: doc.disks,
        bearings: doc.bearings,
        rayleigh: doc.rayleigh,
    };
    model.validate()?;
    Ok(model)
}

pub fn load_model_file(path: impl AsRef<Path>) -> Result<RotorModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    load_model(&text)
}

/// Dotted key path (`segment[1].density`) and line of a parse error, read
/// off the error span and the table headers above it.
fn toml_error_path(text: &str, e: &toml::de::Error) -> String {
    let Some(span) = e.span() else {
        return "<document>".to_string();
    };
    let start = span.start.min(text.len());
    let line_no = text[..start].matches('\n').count() + 1;
    let line_start = text[..start].rfind('\n').map_or(0, |i| i + 1);
    let line_end = text[start..].find('\n').map_or(text.len(), |i| start + i);
    let line = &text[line_start..line_end];

    let mut table: Option<String> = None;
    let mut arrays: Vec<(&str, usize)> = Vec::new();
    for l in text[..line_end].lines() {
        let t = l.trim();
        if let Some(name) = t.strip_prefix("[[").and_then(|r| r.strip_suffix("]]")) {
            let name = name.trim();
            let index = match arrays.iter_mut().find(|(n, _)| *n == name) {
                Some((_, count)) => {
                    *count += 1;
                    *count - 1
                }
                None => {
                    arrays.push((name, 1));
                    0
                }
            };
            table = Some(format!("{name}[{index}]"));
        } else if let Some(name) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            table = Some(name.trim().to_string());
        }
    }
    let key = line
        .split_once('=')
        .map(|(k, _)| k.trim())
        .filter(|k| !k.is_empty() && !k.starts_with('[') && !k.starts_with('#'));
    let path = match (table, key) {
        (Some(t), Some(k)) => format!("{t}.{k}"),
        (None, Some(k)) => k.to_string(),
        (Some(t), None) => t,
        (None, None) => "<document>".to_string(),
    };
    format!("{path} (line {line_no})")
}
