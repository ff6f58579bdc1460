//! Tropical circuits for pathwidth dynamic programs, with the combinatorial
//! machinery (permutation classes, compatibility matrices, rectangle
//! decompositions) used to check lower-bound arguments at small scale.

pub mod acceptance;
pub mod circuit;
pub mod compat;
pub mod dp;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod perm;
pub mod poly;
pub mod rect;

pub use circuit::{Circuit, CircuitBuilder, CircuitDoc, Gate, GateId, ValidationReport, DEFAULT_CAP};
pub use compat::{build_matrix, CompatMatrix, CoverResult, Rectangle, Variant};
pub use dp::{compile_dst_pw, compile_floyd_warshall, compile_held_karp, compile_is, compile_tsp_pw, CompileStats};
pub use error::{Error, Result};
pub use graph::{GraphInstance, PathDecomposition};
pub use oracle::OracleResult;
pub use perm::{ClassSpec, CycleType, Permutation};
pub use poly::{Flavor, Monomial, Polynomial, Valuation, VariableId};
pub use rect::{PolyRectangle, SetRectangle};
