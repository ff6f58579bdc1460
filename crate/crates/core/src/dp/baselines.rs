use crate::circuit::{Circuit, CircuitBuilder, GateId};
use crate::error::{Error, Result};
use crate::graph::complete_digraph;
use crate::poly::Flavor;

pub const MAX_HELD_KARP: usize = 14;
pub const MAX_FLOYD: usize = 30;

/// Subset DP over tours of the complete digraph K_N anchored at vertex 0.
/// D(S, v) is the cheapest path from 0 through all of S ending in v.
pub fn compile_held_karp(n: usize) -> Result<Circuit> {
    if !(3..=MAX_HELD_KARP).contains(&n) {
        return Err(Error::ScaleExceeded(format!("Held-Karp needs 3 <= N <= {MAX_HELD_KARP}, got {n}")));
    }
    let g = complete_digraph(n)?;
    let mut b = CircuitBuilder::new(Flavor::MinPlus);
    let m = n - 1;
    let x = |b: &mut CircuitBuilder, u: usize, v: usize| b.input(g.edge_var(u, v));
    // Subset bit i stands for vertex i + 1.
    let mut table: Vec<Vec<GateId>> = vec![vec![GateId::MAX; m]; 1 << m];
    for set in 1usize..1 << m {
        for v in (0..m).filter(|&v| set >> v & 1 == 1) {
            let rest = set & !(1 << v);
            table[set][v] = if rest == 0 {
                x(&mut b, 0, v + 1)
            } else {
                let mut best = None;
                for u in (0..m).filter(|&u| rest >> u & 1 == 1) {
                    let arc = x(&mut b, u + 1, v + 1);
                    let step = b.sum(table[rest][u], arc);
                    best = Some(match best {
                        None => step,
                        Some(prev) => b.ext(prev, step),
                    });
                }
                best.expect("nonempty rest")
            };
        }
    }
    let full = (1 << m) - 1;
    let closing: Vec<GateId> = (0..m)
        .map(|v| {
            let arc = x(&mut b, v + 1, 0);
            b.sum(table[full][v], arc)
        })
        .collect();
    let out = b.ext_all(closing).expect("n >= 3");
    b.finish_with_universe(out, g.edge_vars())
}

/// Shared min-plus gates d^(m)(i, j) over K_N with output d^(N)(source, target).
/// Vertices are 0-based.
pub fn compile_floyd_warshall(n: usize, source: usize, target: usize) -> Result<Circuit> {
    if !(2..=MAX_FLOYD).contains(&n) {
        return Err(Error::ScaleExceeded(format!("Floyd-Warshall needs 2 <= N <= {MAX_FLOYD}, got {n}")));
    }
    if source >= n || target >= n || source == target {
        return Err(Error::InvalidParams(format!("bad endpoints {source}, {target} for N = {n}")));
    }
    let g = complete_digraph(n)?;
    let (circuit, table) = floyd_warshall_table(n, &g)?;
    circuit.with_output(table[source][target])
}

/// Builds the whole table; entry `[i][j]` is the final gate for the pair.
/// Diagonal entries are unused and hold `GateId::MAX`.
pub fn floyd_warshall_table(n: usize, g: &crate::graph::GraphInstance) -> Result<(Circuit, Vec<Vec<GateId>>)> {
    let mut b = CircuitBuilder::new(Flavor::MinPlus);
    let mut d = vec![vec![GateId::MAX; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        for j in (0..n).filter(|&j| j != i) {
            row[j] = b.input(g.edge_var(i, j));
        }
    }
    for k in 0..n {
        let prev = d.clone();
        for i in (0..n).filter(|&i| i != k) {
            for j in (0..n).filter(|&j| j != k && j != i) {
                let via = b.sum(prev[i][k], prev[k][j]);
                d[i][j] = b.ext(prev[i][j], via);
            }
        }
    }
    let out = d[0][1];
    Ok((b.finish_with_universe(out, g.edge_vars())?, d))
}
