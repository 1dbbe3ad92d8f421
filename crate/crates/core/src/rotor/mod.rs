//! Rotor description, validation and finite-element assembly.

mod assembly;
mod model;

pub use assembly::{assemble, compose_pencil, BeamElement, SystemMatrices, DOF_PER_NODE};
pub use model::{
    load_model, load_model_file, Bearing, Disk, Mat2, NodeGrid, Rayleigh, RotorModel, ShaftSegment,
};
