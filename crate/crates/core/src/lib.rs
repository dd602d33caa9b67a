//! Fifth-order WENO finite-difference solver for the 2D compressible Euler
//! equations with WENO-JS, WENO-Z and deep-smoothness (WENO-DS) weights.
//!
//! ```no_run
//! use wenods::{builtin_ic, GasModel, SchemeConfig, Solver};
//!
//! let spec = builtin_ic("config3")?;
//! let solver = Solver::new(SchemeConfig::default(), GasModel::new(spec.gamma)?, None)?;
//! let run = solver.solve(&spec, 100, 100)?;
//! println!("{} steps", run.steps);
//! # Ok::<(), wenods::Error>(())
//! ```

pub mod cnn;
pub mod error;
pub mod euler;
pub mod fileio;
pub mod grid;
pub mod metrics;
pub mod riemann;
pub mod solver;
pub mod weno;

pub use cnn::{load_weights, ArchSpec, ArchTag, CnnModel};
pub use error::{Error, Result};
pub use euler::{Axis, ConservedState, GasModel, PrimitiveState};
pub use grid::{Boundary, FieldGrid, StateField};
pub use riemann::{builtin_ic, verify_relations, RiemannSpec};
pub use solver::{make_reference, restrict, SchemeConfig, Snapshot, SnapshotPolicy, Solver};
pub use weno::Scheme;
