//! Finite-scale tile and wall constructions for random groups in the Gromov
//! density model.
//!
//! The crate works on finite polygonal 2-complexes ("patches") whose 2-cells
//! are relator polygons. On top of the exact combinatorial metrics in
//! [`complex`] it builds tile collections ([`tiles`]), balanced tile-walls
//! ([`walls`]), global walls and their decompositions ([`tracer`]), and a set
//! of brute-force referees ([`oracles`]) that check every metric inequality
//! instance by instance.
//!
//! All metric quantities are exact integers. Distances between edge
//! midpoints are measured in half-edge units, so `ℓ/4` edges is `ℓ/2` units.

pub mod complex;
pub mod error;
pub mod oracles;
pub mod pipeline;
pub mod rational;
pub mod sampler;
pub mod seed;
pub mod tiles;
pub mod tracer;
pub mod walls;
pub mod word;

pub use complex::{CellId, EdgeId, PatchComplex, Point, SubComplex, VertexId};
pub use error::{Error, Result};
pub use rational::Q;
