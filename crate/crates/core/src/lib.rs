//! LIST-3-COLOURING on graphs of diameter at most three.
//!
//! [`branch::solve`] runs the branch-and-reduce search. [`oracle`] is an
//! independent brute-force check, [`gen`] builds seeded test corpora and
//! [`lab`] samples the random witness sets behind the last branching rule.

pub mod bounds;
pub mod branch;
pub mod error;
pub mod gen;
pub mod graph;
pub mod instance;
pub mod io;
pub mod lab;
pub mod oracle;
pub mod par;
pub mod reduce;
pub mod report;
pub mod scaling;
pub mod twosat;

pub use branch::{solve, Answer, BranchConfig, DiameterPolicy, SearchStats};
pub use error::{Error, Result};
pub use graph::{Diameter, Graph, Vertex};
pub use instance::{Colour, ColourSet, Coloring, Instance, Level};
