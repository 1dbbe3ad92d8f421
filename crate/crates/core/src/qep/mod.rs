//! Quadratic pencils, their inverse operators and the dense reference solve.

mod exact;
mod operators;
mod pencil;

pub use exact::{exact_eigenvalues, exact_solve, normalize_phase, EigenPair};
pub use operators::{invert, DenseOperators, InverseOperators, QepOperators};
pub use pencil::{critical_speed_pencil, modal_pencil, PencilKind, PencilMeta, QuadraticPencil};
