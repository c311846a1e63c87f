//! Riemannian accelerated gradient descent with small-dimensional
//! relaxation (RAGDsDR), its restarted variant, baselines, benchmark
//! problems and a trajectory certifier.

#[cfg(test)]
#[macro_use]
mod test_util;

pub mod certify;
pub mod clock;
pub mod curvature;
pub mod experiment;
pub mod error;
pub mod instance;
pub mod io;
pub mod linalg;
pub mod manifold;
pub mod optim;
pub mod problems;
pub mod rng;
pub mod search;

pub use curvature::{CurvatureBounds, CurvatureConstants};
pub use error::{Error, Result};
pub use linalg::{EigDecomp, SymMatrix};
pub use manifold::{Manifold, Point, Tangent};
pub use problems::Problem;
