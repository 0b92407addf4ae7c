pub mod choquet;
pub mod error;
pub mod experiments;
pub mod freeflow;
pub mod grid;
pub mod nonlinear;
pub mod norms;
pub mod projections;
pub mod reduction;

pub use error::{Error, Result};
pub use grid::{RadialField, RadialGrid, SpaceTimeField, StatePair};
