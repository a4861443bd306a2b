//! Exact toric-polytope surgery for Hamiltonian circle actions: cutting,
//! compactifying and blowing up labeled polytopes, Duistermaat-Heckman
//! profiles, wall-crossing checks, and numerical checks of the linear local
//! model near a fixed point.

pub mod corpus;
pub mod dh;
pub mod error;
pub mod lattice;
pub mod localmodel;
pub mod ops;
pub mod poly;
pub mod polytope;
pub mod toric;

pub use error::{Error, ErrorClass, Result};
pub use lattice::{Int, IntVector, Rational};
pub use polytope::{Facet, LabeledPolytope, Vertex};
