//! Shared fixtures for the circuit benchmarks.

use tropwidth::graph::{gen_dtsp_graph, gen_is_graph};
use tropwidth::{GraphInstance, PathDecomposition, Result};

/// Named graph/decomposition pairs used by the compile benchmarks.
pub fn is_fixtures() -> Result<Vec<(String, GraphInstance, PathDecomposition)>> {
    (2..=4)
        .map(|k| {
            let gk = gen_is_graph(k)?;
            Ok((format!("G_{k}"), gk.graph, gk.decomposition))
        })
        .collect()
}

pub fn dtsp_fixtures() -> Result<Vec<(String, GraphInstance, PathDecomposition)>> {
    [(4, 1), (6, 1), (3, 2), (4, 2)]
        .into_iter()
        .map(|(n, k)| {
            let (g, d) = gen_dtsp_graph(n, k)?;
            Ok((format!("G_({n},{k})"), g, d))
        })
        .collect()
}

/// Deterministic weights in universe order; the benchmarks only need
/// something that is not all zero.
pub fn weights(len: usize) -> Vec<i64> {
    (0..len as i64).map(|i| (i * 37 + 11) % 101 - 50).collect()
}
