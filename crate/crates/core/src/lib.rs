//! Numerical toolkit for weighted Alexandrov–Fenchel and Minkowski type
//! inequalities in the space forms `M^n(K)`, `K ∈ {-1, 0, 1}`.
//!
//! The crate is organised bottom-up:
//!
//! * [`spaceform`]: warp functions, geodesic balls and the weight catalog;
//! * [`symfun`]: elementary symmetric functions and Newton tensors;
//! * [`curve2d`] and [`axisym`]: discrete radial curves and hypersurfaces
//!   of revolution with their curvature integrals;
//! * [`flowlab`]: the inverse-curvature-type flows and monotone monitors;
//! * [`inequalities`]: left/right-hand sides and verdicts;
//! * [`spectral`]: the `-Δf = λ H_k f` eigenproblem and its upper bound.

pub mod axisym;
pub mod corpus;
pub mod curve2d;
pub mod error;
pub mod flowlab;
pub mod fourier;
pub mod inequalities;
pub mod par;
pub mod quad;
pub mod shape;
pub mod spaceform;
pub mod spectral;
pub mod symfun;

pub use error::{Error, Result};
pub use spaceform::{SpaceForm, Weight};
