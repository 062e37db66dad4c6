//! Color refinement and the graph classes it characterizes.
//!
//! * [`refinement`]: stable partitions, CR-equivalence, discreteness.
//! * [`cellgraph`] and [`amenability`]: the cell graph of the stable
//!   partition and the quasilinear amenability recognizer.
//! * [`tinhofer`]: individualization-refinement isomorphism testing and
//!   canonical forms.
//! * [`fractional`]: exact rational LP over the fractional isomorphism
//!   polytope, compactness probing and Birkhoff decomposition.
//! * [`oracles`]: brute-force automorphisms, isomorphism and class membership.
//! * [`mcvp`]: monotone circuits and their reduction to colored graphs.

pub mod amenability;
pub mod budget;
pub mod cellgraph;
pub mod error;
pub mod fractional;
pub mod generators;
pub mod graph;
pub mod io;
pub mod mcvp;
pub mod oracles;
pub mod refinement;
pub mod sweep;
pub mod tinhofer;

pub use budget::Budget;
pub use error::{Error, Result};
pub use graph::{ColoredGraph, GraphBuilder, Subgraph, VertexSet};
pub use refinement::{Partition, RefinementTrace};
