//! Reconstruction of convex tetrahedra in dS³ and AdS³ from four closing
//! SO⁺(1,2) or SL(2,ℝ) face holonomies, and the converse forward map.

pub mod error;
pub mod forward;
pub mod lorentz;
pub mod reconstruct;
pub mod sample;
pub mod scalar;
pub mod sectors;
pub mod sl2r;
pub mod so12;

pub use error::{Error, Result};
pub use lorentz::{AmbientVector, GramData, Inertia, Sigma, TangentVector};
pub use reconstruct::{reconstruct, spin_reconstruct, Config, ReconstructionReport, Tetrahedron};
pub use scalar::{Quadratic, Rational, Scalar, Tolerances};
pub use sl2r::SpinHolonomy;
pub use so12::{HolonomyClass, NormalData, VectorHolonomy};
