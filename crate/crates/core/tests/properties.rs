use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tropwidth::acceptance::{random_banded_graph, random_digraph_with_tour, random_rooted_digraph};
use tropwidth::graph::{complete_digraph, decomposition_from_order, gen_dtsp_graph, verify_path_decomposition};
use tropwidth::oracle::{brute_dst, brute_is, brute_shortest_path, brute_tsp, tsp_polynomial};
use tropwidth::perm::{compose, conjugate, ClassSpec, Permutation};
use tropwidth::rect::{above_below_violations, check_decomposition, decompose_balanced};
use tropwidth::{
    compile_dst_pw, compile_floyd_warshall, compile_held_karp, compile_is, compile_tsp_pw, Circuit, GraphInstance,
    Valuation, VariableId,
};

fn natural(g: &GraphInstance) -> tropwidth::PathDecomposition {
    decomposition_from_order(g, &(0..g.vertex_count()).collect::<Vec<_>>()).unwrap()
}

fn valuation(c: &Circuit, lo: i64, hi: i64, seed: u64) -> Valuation {
    Valuation::random(c.universe().iter().cloned(), lo, hi, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n as u8).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Permutation::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn is_circuit_matches_brute_force(n in 1usize..12, bw in 1usize..4, p in 0.2f64..0.9, seed: u64) {
        let g = random_banded_graph(n, bw, p, &mut ChaCha8Rng::seed_from_u64(seed));
        let d = natural(&g);
        prop_assert!(verify_path_decomposition(&g, &d).is_ok());
        let c = compile_is(&g, &d).unwrap();
        let v = valuation(&c, -10, 10, seed ^ 1);
        prop_assert_eq!(c.evaluate(&v).unwrap(), brute_is(&g, &v).unwrap().optimum);
    }

    #[test]
    fn dtsp_circuit_matches_brute_force(n in 3usize..8, p in 0.1f64..0.6, seed: u64) {
        let g = random_digraph_with_tour(n, p, &mut ChaCha8Rng::seed_from_u64(seed));
        let c = match compile_tsp_pw(&g, &natural(&g), true) {
            Ok(c) => c,
            Err(e) => { prop_assert!(e.is_scale()); return Ok(()); }
        };
        let v = valuation(&c, 0, 30, seed ^ 2);
        prop_assert_eq!(c.evaluate(&v).unwrap(), brute_tsp(&g, &v).unwrap().optimum);
    }

    #[test]
    fn dst_circuit_matches_brute_force(n in 2usize..7, p in 0.1f64..0.5, seed: u64) {
        let g = random_rooted_digraph(n, p, &mut ChaCha8Rng::seed_from_u64(seed));
        let c = match compile_dst_pw(&g, &natural(&g)) {
            Ok(c) => c,
            Err(e) => { prop_assert!(e.is_scale()); return Ok(()); }
        };
        let v = valuation(&c, 0, 30, seed ^ 3);
        prop_assert_eq!(c.evaluate(&v).unwrap(), brute_dst(&g, &v).unwrap().optimum);
    }

    #[test]
    fn held_karp_matches_brute_force(n in 3usize..8, seed: u64) {
        let g = complete_digraph(n).unwrap();
        let c = compile_held_karp(n).unwrap();
        let v = valuation(&c, 0, 50, seed);
        prop_assert_eq!(c.evaluate(&v).unwrap(), brute_tsp(&g, &v).unwrap().optimum);
    }

    #[test]
    fn floyd_warshall_matches_brute_force(n in 2usize..7, s in 0usize..7, t in 0usize..7, seed: u64) {
        let (s, t) = (s % n, t % n);
        prop_assume!(s != t);
        let g = complete_digraph(n).unwrap();
        let c = compile_floyd_warshall(n, s, t).unwrap();
        let v = valuation(&c, 0, 50, seed);
        prop_assert_eq!(c.evaluate(&v).unwrap(), brute_shortest_path(&g, &v, s, t).unwrap());
    }

    #[test]
    fn inverse_cancels(p in perm(7)) {
        prop_assert!(compose(&p, &p.inverse()).unwrap().is_identity());
        prop_assert!(compose(&p.inverse(), &p).unwrap().is_identity());
    }

    #[test]
    fn composition_is_associative(a in perm(6), b in perm(6), c in perm(6)) {
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn conjugation_preserves_cycle_type(rho in perm(8), pi in perm(8)) {
        let c = conjugate(&rho, &pi).unwrap();
        prop_assert_eq!(c.cycle_type(), rho.cycle_type());
        prop_assert_eq!(ClassSpec::SingleCycle.contains(&c), rho.is_single_cycle());
    }

    #[test]
    fn cycles_partition_the_domain(p in perm(9)) {
        let mut seen: Vec<usize> = p.cycles().concat();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..9).collect::<Vec<_>>());
    }

    #[test]
    fn balanced_decomposition_of_random_designation(mask in 2u64..(1 << 12), n in 3usize..5) {
        let (g, d) = gen_dtsp_graph(n, 1).unwrap();
        let c = compile_tsp_pw(&g, &d, true).unwrap();
        let f = tsp_polynomial(&g).unwrap();
        let support: Vec<VariableId> = f.support().into_iter().collect();
        let x: Vec<VariableId> = support.iter().enumerate().filter(|(i, _)| mask >> (i % 12) & 1 == 1).map(|(_, v)| v.clone()).collect();
        prop_assume!(x.len() >= 2);
        let rects = decompose_balanced(&c, &x, 1 << 20).unwrap();
        let report = check_decomposition(&c, &f, &x, &rects);
        prop_assert!(report.ok(), "{:?}", report);
    }
}

#[test]
fn above_times_below_stays_inside() {
    for n in 3..=5 {
        let c = compile_held_karp(n).unwrap();
        let f = tsp_polynomial(&complete_digraph(n).unwrap()).unwrap();
        assert!(above_below_violations(&c, &f, 1 << 20).unwrap().is_empty(), "N={n}");
    }
    let (g, d) = gen_dtsp_graph(3, 2).unwrap();
    let c = compile_tsp_pw(&g, &d, true).unwrap();
    let f = tsp_polynomial(&g).unwrap();
    assert!(above_below_violations(&c, &f, 1 << 20).unwrap().is_empty());
}
