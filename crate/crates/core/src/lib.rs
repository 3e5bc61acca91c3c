//! Lattice triangles under square jumps: the exact quadruple model, the jump
//! group and its normal forms, point-level simulation, complete enumeration
//! of achievable areas and the quadratic-residue audit.

pub mod algebra;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod lattice;
pub mod obstruction;
pub mod orbit;

pub use algebra::{normalize, Axis, Generator, Mat4, NormalForm, Omega, Sign, Word};
pub use error::{Error, Result};
pub use geometry::{cross_validate, simulate, JumpChoice, Rotation, Trace};
pub use lattice::{Point, PointTriple, Quadruple, SideSquares, SublatticeIndex};
pub use orbit::{
    components, reduce, search, Component, ComponentLabel, ReachSet, SearchOptions, SearchReport,
};
