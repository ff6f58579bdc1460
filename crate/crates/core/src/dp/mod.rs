//! Compilers from dynamic programs to explicit tropical circuits.
//!
//! The pathwidth compilers sweep a path decomposition as a sequence of
//! vertex introductions and forgets. Each event maps the current table of
//! partial-solution states (one gate per state) to the next table; states
//! reached twice are merged with an extremum gate and infeasible states are
//! never materialized.

mod baselines;
mod dst;
mod is;
mod tsp;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitBuilder, GateId};
use crate::error::{Error, Result};
use crate::graph::{verify_path_decomposition, GraphInstance, PathDecomposition};

pub use baselines::{compile_floyd_warshall, compile_held_karp, floyd_warshall_table, MAX_FLOYD, MAX_HELD_KARP};
pub use dst::{compile_dst_pw, compile_dst_pw_with_stats, MAX_DST_WIDTH};
pub use is::{compile_is, compile_is_with_stats, MAX_IS_WIDTH};
pub use tsp::{compile_tsp_pw, compile_tsp_pw_with_stats, MAX_TSP_WIDTH};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Event {
    Introduce(usize),
    Forget(usize),
}

/// Verifies `d` and turns it into introduce/forget events, forgetting before
/// introducing at each bag boundary and breaking ties by vertex index.
pub fn sweep_events(g: &GraphInstance, d: &PathDecomposition) -> Result<(usize, Vec<Event>)> {
    let width = verify_path_decomposition(g, d).map_err(|v| {
        Error::DecompositionInvalid(v.iter().map(|x| x.detail.as_str()).collect::<Vec<_>>().join("; "))
    })?;
    let mut events = Vec::new();
    let mut prev: Vec<usize> = Vec::new();
    for bag in d.bags.iter().chain(std::iter::once(&Vec::new())) {
        events.extend(prev.iter().filter(|v| !bag.contains(v)).map(|&v| Event::Forget(v)));
        events.extend(bag.iter().filter(|v| !prev.contains(v)).map(|&v| Event::Introduce(v)));
        prev = bag.clone();
    }
    Ok((width, events))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileStats {
    pub gates: usize,
    pub bags: usize,
    pub width: usize,
    pub events: usize,
    pub max_states: usize,
    pub states_per_event: Vec<usize>,
}

/// Inserts a state, merging with an extremum gate when already present.
pub(crate) fn merge<S: Ord>(b: &mut CircuitBuilder, table: &mut BTreeMap<S, GateId>, s: S, g: GateId) {
    match table.get_mut(&s) {
        Some(existing) => *existing = b.ext(*existing, g),
        None => {
            table.insert(s, g);
        }
    }
}

pub(crate) fn check_width(width: usize, max: usize) -> Result<()> {
    if width > max {
        Err(Error::WidthExceeded { width, max })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::circuit::Circuit;
    use crate::graph::{complete_digraph, gen_dst_graph, gen_dtsp_graph, gen_is_graph, gen_tsp_graph};
    use crate::oracle::{
        brute_dst, brute_is, brute_shortest_path, brute_tsp, dst_polynomial, is_polynomial, tsp_polynomial,
    };
    use crate::poly::{Monomial, Polynomial, Valuation};

    fn path3() -> (GraphInstance, PathDecomposition) {
        let mut g = GraphInstance::new(false, vec!["a".into(), "b".into(), "c".into()]).unwrap();
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        (g, PathDecomposition::new(vec![vec![0, 1], vec![1, 2]]))
    }

    fn poly(ms: &[&[&str]]) -> Polynomial {
        ms.iter().map(|m| Monomial::product_of(m.iter().copied())).collect()
    }

    fn random_trials(c: &Circuit, trials: usize, lo: i64, hi: i64, seed: u64, oracle: impl Fn(&Valuation) -> i64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let v = Valuation::random(c.universe().iter().cloned(), lo, hi, &mut rng);
            assert_eq!(c.evaluate(&v).unwrap(), oracle(&v));
        }
    }

    #[test]
    fn is_path_example() {
        let (g, d) = path3();
        let c = compile_is(&g, &d).unwrap();
        let want = poly(&[&[], &["a"], &["b"], &["c"], &["a", "c"]]);
        assert_eq!(c.extract_polynomial(1000).unwrap(), want);
        let v: Valuation = [("a", 3), ("b", -1), ("c", 2)].into_iter().collect();
        assert_eq!(c.evaluate(&v).unwrap(), 5);

        let single = GraphInstance::new(false, vec!["v".into()]).unwrap();
        let c = compile_is(&single, &PathDecomposition::new(vec![vec![0]])).unwrap();
        assert_eq!(c.extract_polynomial(10).unwrap(), poly(&[&[], &["v"]]));
    }

    #[test]
    fn is_matches_oracle_on_gk() {
        let gk = gen_is_graph(2).unwrap();
        let c = compile_is(&gk.graph, &gk.decomposition).unwrap();
        assert!(c.validate().is_valid());
        assert!(c.calculates(&is_polynomial(&gk.graph).unwrap(), 1 << 20).unwrap());
        random_trials(&c, 100, -10, 10, 1, |v| brute_is(&gk.graph, v).unwrap().optimum);
    }

    #[test]
    fn bad_decomposition_rejected() {
        let (g, _) = path3();
        let d = PathDecomposition::new(vec![vec![0, 1], vec![2]]);
        assert!(matches!(compile_is(&g, &d), Err(Error::DecompositionInvalid(_))));
    }

    #[test]
    fn tsp_small_cases() {
        let mut tri = GraphInstance::new(true, vec!["a".into(), "b".into(), "c".into()]).unwrap();
        for (u, v) in [(0, 1), (1, 2), (2, 0)] {
            tri.add_edge(u, v).unwrap();
        }
        let c = compile_tsp_pw(&tri, &PathDecomposition::new(vec![vec![0, 1, 2]]), true).unwrap();
        let ones: Valuation = c.universe().iter().map(|x| (x.clone(), 1)).collect();
        assert_eq!(c.evaluate(&ones).unwrap(), 3);

        let (g, d) = gen_dtsp_graph(3, 1).unwrap();
        let p = compile_tsp_pw(&g, &d, true).unwrap().extract_polynomial(100).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p.iter().all(|m| m.degree() == 3));

        let (path, d) = path3();
        assert!(matches!(compile_tsp_pw(&path, &d, false), Err(Error::NoHamiltonianCycle)));
    }

    #[test]
    fn dtsp_matches_oracle() {
        let (g, d) = gen_dtsp_graph(3, 2).unwrap();
        let c = compile_tsp_pw(&g, &d, true).unwrap();
        assert!(c.validate().is_valid());
        assert!(c.calculates(&tsp_polynomial(&g).unwrap(), 1 << 20).unwrap());
        random_trials(&c, 100, 0, 20, 2, |v| brute_tsp(&g, v).unwrap().optimum);
    }

    #[test]
    fn undirected_tsp_matches_oracle() {
        let (g, d) = gen_tsp_graph(2, 2).unwrap();
        let c = compile_tsp_pw(&g, &d, false).unwrap();
        assert!(c.calculates(&tsp_polynomial(&g).unwrap(), 1 << 20).unwrap());
        random_trials(&c, 50, 0, 20, 3, |v| brute_tsp(&g, v).unwrap().optimum);

        let k5 = {
            let mut g = GraphInstance::new(false, (0..5).map(|i| format!("u{i}")).collect()).unwrap();
            for u in 0..5 {
                for v in u + 1..5 {
                    g.add_edge(u, v).unwrap();
                }
            }
            g
        };
        let d = PathDecomposition::new(vec![(0..5).collect()]);
        let p = compile_tsp_pw(&k5, &d, false).unwrap().extract_polynomial(1000).unwrap();
        assert_eq!(p.len(), 12);
    }

    #[test]
    fn dst_small_cases() {
        let mut two = GraphInstance::new(true, vec!["u".into(), "v".into()]).unwrap();
        two.add_edge(0, 1).unwrap();
        two.add_edge(1, 0).unwrap();
        let c = compile_dst_pw(&two, &PathDecomposition::new(vec![vec![0, 1]])).unwrap();
        let v: Valuation = [("x(u,v)", 4), ("x(v,u)", 7)].into_iter().collect();
        assert_eq!(c.evaluate(&v).unwrap(), 4);

        let mut p3 = GraphInstance::new(true, vec!["a".into(), "b".into(), "c".into()]).unwrap();
        for (u, v) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
            p3.add_edge(u, v).unwrap();
        }
        let d = PathDecomposition::new(vec![vec![0, 1], vec![1, 2]]);
        let p = compile_dst_pw(&p3, &d).unwrap().extract_polynomial(100).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p, dst_polynomial(&p3).unwrap());

        let mut split = GraphInstance::new(true, vec!["a".into(), "b".into(), "c".into()]).unwrap();
        split.add_edge(0, 1).unwrap();
        let d = PathDecomposition::new(vec![vec![0, 1], vec![2]]);
        assert!(matches!(compile_dst_pw(&split, &d), Err(Error::NotConnected)));
    }

    #[test]
    fn dst_matches_oracle() {
        let (g, d) = gen_dst_graph(2, 1).unwrap();
        let c = compile_dst_pw(&g, &d).unwrap();
        assert!(c.validate().is_valid());
        assert!(c.calculates(&dst_polynomial(&g).unwrap(), 1 << 20).unwrap());
        random_trials(&c, 100, 0, 20, 4, |v| brute_dst(&g, v).unwrap().optimum);
    }

    #[test]
    fn held_karp() {
        let c = compile_held_karp(3).unwrap();
        let ones: Valuation = c.universe().iter().map(|x| (x.clone(), 1)).collect();
        assert_eq!(c.evaluate(&ones).unwrap(), 3);
        assert_eq!(compile_held_karp(4).unwrap().extract_polynomial(100).unwrap().len(), 6);
        let g = complete_digraph(6).unwrap();
        let c = compile_held_karp(6).unwrap();
        random_trials(&c, 50, 0, 30, 5, |v| brute_tsp(&g, v).unwrap().optimum);
        assert!(matches!(compile_held_karp(15), Err(Error::ScaleExceeded(_))));
        assert!(matches!(compile_held_karp(2), Err(Error::ScaleExceeded(_))));
    }

    #[test]
    fn floyd_warshall() {
        let c = compile_floyd_warshall(2, 0, 1).unwrap();
        assert_eq!(c.extract_polynomial(10).unwrap(), poly(&[&["x(v[1],v[2])"]]));

        let c = compile_floyd_warshall(3, 0, 2).unwrap();
        let mut v: Valuation = c.universe().iter().map(|x| (x.clone(), 100)).collect();
        v.set("x(v[1],v[2])", 1);
        v.set("x(v[2],v[3])", 1);
        v.set("x(v[1],v[3])", 5);
        assert_eq!(c.evaluate(&v).unwrap(), 2);

        let g = complete_digraph(8).unwrap();
        let c = compile_floyd_warshall(8, 2, 5).unwrap();
        random_trials(&c, 100, 0, 50, 6, |v| brute_shortest_path(&g, v, 2, 5).unwrap());
        assert!(compile_floyd_warshall(31, 0, 1).is_err());
        assert!(compile_floyd_warshall(4, 1, 1).is_err());
    }

    #[test]
    fn width_guard() {
        let (g, d) = gen_dst_graph(2, 2).unwrap();
        assert!(compile_dst_pw(&g, &d).is_ok());
        let (g, d) = gen_dtsp_graph(2, 3).unwrap();
        assert!(matches!(compile_tsp_pw(&g, &d, true), Ok(_) | Err(Error::WidthExceeded { .. })));
        let (g, d) = gen_dst_graph(2, 3).unwrap();
        assert!(matches!(compile_dst_pw(&g, &d), Err(Error::WidthExceeded { width: 11, max: 7 })));
    }
}
