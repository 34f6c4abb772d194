//! Homological integration on simplicial complexes in ℝⁿ, n ≤ 3.

pub mod body;
pub mod chain;
pub mod complex;
pub mod current;
pub mod error;
pub mod exterior;
pub mod flat;
pub mod forms;
pub mod geometry;
pub mod io;
pub mod lipschitz;
pub mod lp;
pub mod mechanics;
pub mod meshes;
pub mod poly;
pub mod random;
pub mod sharp;

pub use body::{Body, Surface};
pub use chain::Chain;
pub use current::Current;
pub use complex::{build_complex, Complex, Refinement, ValidationReport};
pub use error::{Error, Result};
pub use exterior::MultiVector;
pub use geometry::HalfSpace;
pub use lipschitz::PAMap;
pub use mechanics::{CauchyFlux, Configuration, VirtualVelocity};
pub use sharp::SharpField;
