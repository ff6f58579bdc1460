//! The acceptance suite: thirteen end-to-end checks over oracles, counting
//! identities, covers, decompositions and certificates. Each returns a
//! pass/fail report; time limits count toward the verdict.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::circuit::{Circuit, DEFAULT_CAP};
use crate::compat::{build_matrix, check_size_bound, mu, randomized_cover_from_rectangle, Variant};
use crate::dp::{compile_dst_pw, compile_held_karp, compile_is, compile_tsp_pw};
use crate::error::{Error, Result};
use crate::graph::{
    canonical_directed, canonical_undirected, complete_digraph, count_formulas, decomposition_from_order,
    directed_to_undirected, gen_dst_graph, gen_dtsp_graph, gen_is_graph, gen_tsp_graph,
    is_hamiltonian_cycle, sample_nice_cycle, sample_nice_cycle_seeded, tsp_vertex, undirected_to_directed,
    verify_path_decomposition, CountFamily, GraphInstance, PathDecomposition,
};
use crate::oracle::{
    brute_dst, brute_is, brute_tsp, enumerate_ham_cycles, enumerate_nice_cycles, is_polynomial, matrix_tree_count,
};
use crate::perm::{
    compose, conjugate, double_factorial, enumerate_all, enumerate_class, factorial, for_each_of_type, ClassSpec,
    CycleType, Permutation,
};
use crate::poly::{Valuation, VariableId};
use crate::rect::{
    check_decomposition, check_rectangle_bound_dtsp, decompose_balanced, dst_designated, dst_layers,
    dtsp_designated, exhaustive_thin_check, monochromatic_layers, sampled_thin_check, LayerClass,
};

pub const CRITERIA: [(u8, &str); 13] = [
    (1, "oracle equivalence, independent set"),
    (2, "semantics of compiled independent-set circuits"),
    (3, "oracle equivalence, travelling salesman"),
    (4, "oracle equivalence, spanning out-trees"),
    (5, "counting identities"),
    (6, "symmetric group identities"),
    (7, "cover numbers and rectangle bounds"),
    (8, "randomized rectangle cover"),
    (9, "balanced rectangle decomposition"),
    (10, "thin rectangles in G_k"),
    (11, "rectangle bounds at tiny scale"),
    (12, "nice-cycle sampler uniformity"),
    (13, "decomposition certificates and cycle bijection"),
];

/// Weight standing in for a missing arc when a graph is embedded in K_N.
pub const BIG: i64 = 1_000_000_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {}: {} ({:.2}s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )
    }
}

/// Runs one criterion; errors become failures carrying the message.
pub fn run(id: u8) -> CriterionReport {
    let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown criterion", |c| c.1);
    let start = Instant::now();
    let outcome = match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        11 => criterion_11(),
        12 => criterion_12(),
        13 => criterion_13(),
        _ => Err(Error::InvalidParams(format!("no criterion {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionReport { id, name: name.to_string(), passed, detail, seconds }
}

pub fn run_all() -> Vec<CriterionReport> {
    CRITERIA.iter().map(|&(id, _)| run(id)).collect()
}

type Outcome = Result<(bool, String)>;

fn within(start: Instant, limit: Duration) -> bool {
    start.elapsed() < limit
}

// ---------------------------------------------------------------------------
// Random instances.

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Edges only between vertices at most `bw` apart, so the natural order
/// has vertex separation (and width) at most `bw`.
pub fn random_banded_graph<R: Rng + ?Sized>(n: usize, bw: usize, p: f64, rng: &mut R) -> GraphInstance {
    let mut g = GraphInstance::new(false, names(n)).expect("distinct names");
    for u in 0..n {
        for v in u + 1..(u + bw + 1).min(n) {
            if rng.random_bool(p) {
                g.add_edge(u, v).expect("fresh edge");
            }
        }
    }
    g
}

/// A digraph containing a random Hamiltonian cycle plus random arcs.
pub fn random_digraph_with_tour<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> GraphInstance {
    let mut g = GraphInstance::new(true, names(n)).expect("distinct names");
    let mut tour: Vec<usize> = (0..n).collect();
    tour.shuffle(rng);
    for i in 0..n {
        g.add_edge(tour[i], tour[(i + 1) % n]).expect("tour arc");
    }
    add_random_arcs(&mut g, p, rng);
    g
}

/// A digraph containing a random spanning out-tree plus random arcs.
pub fn random_rooted_digraph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> GraphInstance {
    let mut g = GraphInstance::new(true, names(n)).expect("distinct names");
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for i in 1..n {
        let parent = order[rng.random_range(0..i)];
        g.add_edge(parent, order[i]).expect("tree arc");
    }
    add_random_arcs(&mut g, p, rng);
    g
}

fn add_random_arcs<R: Rng + ?Sized>(g: &mut GraphInstance, p: f64, rng: &mut R) {
    let n = g.vertex_count();
    for u in 0..n {
        for v in (0..n).filter(|&v| v != u) {
            if !g.has_edge(u, v) && rng.random_bool(p) {
                g.add_edge(u, v).expect("fresh arc");
            }
        }
    }
}

fn natural(g: &GraphInstance) -> Result<PathDecomposition> {
    decomposition_from_order(g, &(0..g.vertex_count()).collect::<Vec<_>>())
}

fn random_valuation<R: Rng + ?Sized>(c: &Circuit, lo: i64, hi: i64, rng: &mut R) -> Valuation {
    Valuation::random(c.universe().iter().cloned(), lo, hi, rng)
}

/// Weights for the Held–Karp circuit on K_N that mirror `v` on the arcs of
/// `g` and put [`BIG`] on every other arc.
fn embed_in_complete(g: &GraphInstance, v: &Valuation) -> Result<Valuation> {
    let n = g.vertex_count();
    let k = complete_digraph(n)?;
    let mut out = Valuation::new();
    for a in 0..n {
        for b in (0..n).filter(|&b| b != a) {
            let w = if g.has_edge(a, b) { v.get(&g.edge_var(a, b))? } else { BIG };
            out.set(k.edge_var(a, b), w);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0;
    let mut max_width = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..=14);
        let g = random_banded_graph(n, 4, 0.5, &mut rng);
        let d = natural(&g)?;
        max_width = max_width.max(d.width());
        let c = compile_is(&g, &d)?;
        let v = Valuation::random(g.vertex_vars(), -50, 50, &mut rng);
        if c.evaluate(&v)? != brute_is(&g, &v)?.optimum {
            mismatches += 1;
        }
    }
    let fast = within(start, Duration::from_secs(10));
    Ok((
        mismatches == 0 && max_width <= 4 && fast,
        format!("200 instances, {mismatches} mismatches, max width {max_width}, under 10s: {fast}"),
    ))
}

/// Small named graphs plus seeded random banded graphs, all with at most
/// ten vertices, each with a path decomposition.
pub fn is_corpus() -> Result<Vec<(String, GraphInstance, PathDecomposition)>> {
    let mut out = Vec::new();
    let mut push = |name: String, g: GraphInstance| -> Result<()> {
        let d = natural(&g)?;
        out.push((name, g, d));
        Ok(())
    };
    push("single".into(), GraphInstance::new(false, names(1))?)?;
    push("empty-2".into(), GraphInstance::new(false, names(2))?)?;
    for n in 2..=10 {
        let mut p = GraphInstance::new(false, names(n))?;
        for i in 1..n {
            p.add_edge(i - 1, i)?;
        }
        push(format!("path-{n}"), p.clone())?;
        if n >= 3 {
            p.add_edge(0, n - 1)?;
            push(format!("cycle-{n}"), p)?;
        }
    }
    for n in 2..=6 {
        let mut k = GraphInstance::new(false, names(n))?;
        for u in 0..n {
            for v in u + 1..n {
                k.add_edge(u, v)?;
            }
        }
        push(format!("complete-{n}"), k)?;
    }
    let mut star = GraphInstance::new(false, names(8))?;
    for v in 1..8 {
        star.add_edge(0, v)?;
    }
    push("star-8".into(), star)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..40 {
        let n = rng.random_range(1..=10);
        let p = rng.random_range(0.2..0.8);
        push(format!("banded-{i}"), random_banded_graph(n, 4, p, &mut rng))?;
    }
    Ok(out)
}

fn criterion_2() -> Outcome {
    let corpus = is_corpus()?;
    let mut failed = Vec::new();
    for (name, g, d) in &corpus {
        let c = compile_is(g, d)?;
        if !c.calculates(&is_polynomial(g)?, DEFAULT_CAP)? {
            failed.push(name.clone());
        }
    }
    Ok((failed.is_empty(), format!("{} graphs, failures: {:?}", corpus.len(), failed)))
}

fn tsp_trials(g: &GraphInstance, d: &PathDecomposition, trials: usize, rng: &mut ChaCha8Rng) -> Result<usize> {
    let pw = compile_tsp_pw(g, d, true)?;
    let hk = compile_held_karp(g.vertex_count())?;
    let mut bad = 0;
    for _ in 0..trials {
        let v = random_valuation(&pw, 0, 50, rng);
        let want = brute_tsp(g, &v)?.optimum;
        if pw.evaluate(&v)? != want || hk.evaluate(&embed_in_complete(g, &v)?)? != want {
            bad += 1;
        }
    }
    Ok(bad)
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = 0;
    for (n, k) in [(3, 1), (4, 1), (3, 2), (4, 2)] {
        let (g, d) = gen_dtsp_graph(n, k)?;
        bad += tsp_trials(&g, &d, 100, &mut rng)?;
    }
    for _ in 0..50 {
        let n = rng.random_range(3..=8);
        let g = random_digraph_with_tour(n, 0.3, &mut rng);
        let d = natural(&g)?;
        bad += tsp_trials(&g, &d, 100, &mut rng)?;
    }
    let fast = within(start, Duration::from_secs(60));
    Ok((bad == 0 && fast, format!("4 families + 50 digraphs x 100 valuations, {bad} mismatches, under 60s: {fast}")))
}

fn dst_trials(g: &GraphInstance, d: &PathDecomposition, trials: usize, rng: &mut ChaCha8Rng) -> Result<(usize, bool)> {
    let c = compile_dst_pw(g, d)?;
    let mut bad = 0;
    let mut count_ok = true;
    for _ in 0..trials {
        let v = random_valuation(&c, 0, 50, rng);
        let want = brute_dst(g, &v)?;
        if c.evaluate(&v)? != want.optimum {
            bad += 1;
        }
        if g.vertex_count() <= 7 {
            count_ok &= want.count as i128 == matrix_tree_count(g);
        }
    }
    Ok((bad, count_ok))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = 0;
    let mut counts_ok = true;
    for (n, k, trials) in [(2, 1, 100), (3, 1, 100), (2, 2, 10)] {
        let (g, d) = gen_dst_graph(n, k)?;
        let (b, ok) = dst_trials(&g, &d, trials, &mut rng)?;
        bad += b;
        counts_ok &= ok;
    }
    for _ in 0..50 {
        let n = rng.random_range(2..=7);
        let g = random_rooted_digraph(n, 0.3, &mut rng);
        let d = natural(&g)?;
        let (b, ok) = dst_trials(&g, &d, 100, &mut rng)?;
        bad += b;
        counts_ok &= ok;
    }
    Ok((
        bad == 0 && counts_ok,
        format!("H_(2,1), H_(3,1), H_(2,2) + 50 digraphs, {bad} mismatches, matrix-tree counts agree: {counts_ok}"),
    ))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for (n, k, want) in [(3, 2, 4u128), (4, 2, 8), (3, 3, 72)] {
        let (g, _) = gen_dtsp_graph(n, k)?;
        let got = enumerate_ham_cycles(&g)?.len() as u128;
        ok &= got == want && count_formulas(CountFamily::DtspCycles, n, k)? == want;
        parts.push(format!("G_({n},{k})={got}"));
    }
    for (n, k, want) in [(2, 1, 4u128), (3, 1, 8), (3, 2, 6912)] {
        let got = enumerate_nice_cycles(n, k)?.len() as u128;
        ok &= got == want && count_formulas(CountFamily::DstNiceCycles, n, k)? == want;
        parts.push(format!("H_({n},{k})={got}"));
    }
    let fast = within(start, Duration::from_secs(300));
    Ok((ok && fast, parts.join(", ")))
}

fn partitions(n: usize, max: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    // Class sizes.
    for k in 1..=5 {
        let sizes = [
            (enumerate_class(k, &ClassSpec::SingleCycle)?.len() as u128, factorial(k - 1)),
            (enumerate_class(2 * k, &ClassSpec::AllTwoCycles)?.len() as u128, double_factorial(2 * k - 1)),
            (enumerate_class(2 * k, &ClassSpec::TwoKCycles)?.len() as u128, factorial(2 * k - 1) / k as u128),
        ];
        if sizes.iter().any(|(got, want)| got != want) {
            failures.push(format!("class sizes at k={k}: {sizes:?}"));
        }
    }
    // Conjugation orbits are whole classes; conjugator counts are constant.
    for n in 1..=5 {
        let all = enumerate_all(n)?;
        for sizes in partitions(n, n) {
            let t = CycleType::new(sizes);
            let mut class = Vec::new();
            for_each_of_type(&t, |imgs| class.push(Permutation::new(imgs.to_vec()).expect("valid images")));
            let class_set: BTreeSet<Permutation> = class.iter().cloned().collect();
            let orbit: BTreeSet<Permutation> =
                all.iter().map(|pi| conjugate(&class[0], pi)).collect::<Result<_>>()?;
            if orbit != class_set {
                failures.push(format!("orbit of type {t} is not its class"));
            }
            let want = factorial(n) / class.len() as u128;
            for r1 in &class {
                let mut counts: HashMap<&Permutation, u128> = HashMap::new();
                for pi in &all {
                    let img = conjugate(r1, pi)?;
                    *counts.entry(class.iter().find(|c| **c == img).expect("same class")).or_default() += 1;
                }
                if counts.len() != class.len() || counts.values().any(|&c| c != want) {
                    failures.push(format!("conjugator counts vary for type {t}"));
                    break;
                }
            }
        }
    }
    // Completions.
    for k in 2..=4 {
        let want = double_factorial(2 * k - 2);
        let invs = enumerate_class(2 * k, &ClassSpec::AllTwoCycles)?;
        for r1 in &invs {
            let got = invs
                .iter()
                .filter(|r2| compose(r2, r1).is_ok_and(|p| ClassSpec::TwoKCycles.contains(&p)))
                .count() as u128;
            if got != want {
                failures.push(format!("completions of {r1} at k={k}: {got} != {want}"));
                break;
            }
        }
    }
    Ok((failures.is_empty(), if failures.is_empty() { "all four identities hold for k <= 5".into() } else { failures.join("; ") }))
}

/// Exact cover numbers of the bipartite matrices for k = 1..=4.
pub fn exact_cover_numbers(budget: Duration) -> Result<Vec<(usize, usize, bool)>> {
    (1..=4)
        .map(|k| {
            let r = build_matrix(Variant::Bipartite(k))?.min_cover(budget)?;
            Ok((k, r.len(), r.optimal))
        })
        .collect()
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let covers = exact_cover_numbers(Duration::from_secs(60))?;
    let ck: BTreeMap<usize, usize> = covers.iter().map(|&(k, c, _)| (k, c)).collect();
    let mut ok = ck[&1] == 1 && ck[&2] == 2 && covers.iter().all(|c| c.2);
    let mut parts = vec![format!("C = {:?}", covers.iter().map(|c| c.1).collect::<Vec<_>>())];
    for k in 2..=4 {
        let rep = check_size_bound(&build_matrix(Variant::Bipartite(k))?, ck[&k])?;
        ok &= rep.holds;
        parts.push(format!("bip({k}) {} <= {:.2}", rep.max_rectangle, rep.bound));
    }
    for k in 2..=3 {
        let rep = check_size_bound(&build_matrix(Variant::Clique(k))?, ck[&k])?;
        ok &= rep.holds;
        parts.push(format!("clique({k}) {} <= {:.2}", rep.max_rectangle, rep.bound));
    }
    let fast = within(start, Duration::from_secs(300));
    Ok((ok && fast, parts.join(", ")))
}

fn random_single_cycle<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<Permutation> {
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    let mut img = vec![0u8; k];
    for i in 0..k {
        img[order[i]] = order[(i + 1) % k] as u8;
    }
    Permutation::new(img)
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut violations = 0;
    for k in 1..=6 {
        for _ in 0..10_000 {
            let r1 = Permutation::random(k, &mut rng);
            let c = random_single_cycle(k, &mut rng)?;
            let r2 = compose(&c, &r1.inverse())?;
            let (a, b) = (Permutation::random(k, &mut rng), Permutation::random(k, &mut rng));
            let (s1, s2) = mu(&a, &b, &r1, &r2)?;
            if !compose(&s2, &s1)?.is_single_cycle() {
                violations += 1;
            }
        }
    }
    let mut parts = vec![format!("{violations} violations in 60000 tuples")];
    let mut ok = violations == 0;
    for k in [3, 4] {
        let m = build_matrix(Variant::Bipartite(k))?;
        let r = m.max_rectangle()?;
        let mut found = None;
        for seed in 0..10 {
            let cover = randomized_cover_from_rectangle(&m, &r, seed)?;
            if cover.covers && m.is_cover(&cover.rectangles)? {
                found = Some((seed, cover.ell));
                break;
            }
        }
        ok &= found.is_some();
        parts.push(match found {
            Some((seed, ell)) => format!("k={k} covered by {ell} images (seed {seed})"),
            None => format!("k={k} not covered in 10 seeds"),
        });
    }
    Ok((ok, parts.join(", ")))
}

/// Homogeneous compiled circuits with a designated variable set of size at
/// least two, for the decomposition check.
pub fn decomposition_corpus() -> Result<Vec<(String, Circuit, Vec<VariableId>)>> {
    let mut out = Vec::new();
    for n in [3, 4, 5] {
        let g = complete_digraph(n)?;
        let x = (0..n).map(|i| g.edge_var(i, (i + 1) % n)).collect();
        out.push((format!("held-karp-{n}"), compile_held_karp(n)?, x));
    }
    for (n, k) in [(3, 1), (4, 1), (3, 2), (4, 2)] {
        let (g, d) = gen_dtsp_graph(n, k)?;
        out.push((format!("dtsp-G_({n},{k})"), compile_tsp_pw(&g, &d, true)?, dtsp_designated(&g, n, k)));
    }
    for (n, k) in [(2, 1), (3, 1), (2, 2)] {
        let (g, d) = gen_tsp_graph(n, k)?;
        let x = (0..n).map(|c| g.edge_var(tsp_vertex(k, c, 0, 1), tsp_vertex(k, (c + 1) % n, 0, -1))).collect();
        out.push((format!("tsp-Gbar_({n},{k})"), compile_tsp_pw(&g, &d, false)?, x));
    }
    for (n, k) in [(3, 1), (4, 1)] {
        let (g, d) = gen_dst_graph(n, k)?;
        out.push((format!("dst-H_({n},{k})"), compile_dst_pw(&g, &d)?, dst_designated(&g, n, k)));
    }
    // The whole support as the designated set.
    let (g, d) = gen_dtsp_graph(3, 2)?;
    out.push(("dtsp-G_(3,2)-all".into(), compile_tsp_pw(&g, &d, true)?, g.edge_vars()));
    let (g, d) = gen_dst_graph(3, 1)?;
    out.push(("dst-H_(3,1)-all".into(), compile_dst_pw(&g, &d)?, g.edge_vars()));
    Ok(out)
}

fn criterion_9() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, c, x) in decomposition_corpus()? {
        let f = c.extract_polynomial(DEFAULT_CAP)?;
        match decompose_balanced(&c, &x, DEFAULT_CAP) {
            Ok(rs) => {
                let rep = check_decomposition(&c, &f, &x, &rs);
                ok &= rep.ok();
                parts.push(format!("{name}: {}/{} rects{}", rep.rectangles, rep.gates, if rep.ok() { "" } else { " FAILED" }));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    Ok((ok, parts.join(", ")))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let ex = exhaustive_thin_check(2)?;
    let sampled = sampled_thin_check(2, 100_000, 10)?;
    let fast = within(start, Duration::from_secs(120));
    Ok((
        ex.violations == 0 && sampled.violations == 0 && fast,
        format!(
            "exhaustive: {} rectangles, {} violations; sampled: {} rectangles, {} violations; under 120s: {fast}",
            ex.rectangles, ex.violations, sampled.rectangles, sampled.violations
        ),
    ))
}

fn criterion_11() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (n, k) in [(4, 2), (4, 3)] {
        let cover = build_matrix(Variant::Bipartite(k))?.min_cover(Duration::from_secs(60))?;
        ok &= cover.optimal;
        let (g, d) = gen_dtsp_graph(n, k)?;
        let c = compile_tsp_pw(&g, &d, true)?;
        let rs = decompose_balanced(&c, &dtsp_designated(&g, n, k), DEFAULT_CAP)?;
        let mut largest = 0;
        let mut bound = 0.0;
        for r in &rs {
            let rep = check_rectangle_bound_dtsp(r, n, k, cover.len())?;
            ok &= rep.ok();
            largest = largest.max(rep.product_size);
            bound = rep.bound;
        }
        parts.push(format!("G_({n},{k}): {} rects, largest {largest} <= {bound:.2}", rs.len()));
    }
    let (g, d) = gen_dst_graph(3, 1)?;
    let c = compile_dst_pw(&g, &d)?;
    let rs = decompose_balanced(&c, &dst_designated(&g, 3, 1), DEFAULT_CAP)?;
    let layers = dst_layers(&g, 3, 1);
    let mut mixed = 0;
    for r in &rs {
        for l in monochromatic_layers(r, &layers) {
            if l.class == LayerClass::Mixed {
                mixed += 1;
                ok &= l.absent.is_some();
            }
        }
    }
    parts.push(format!("H_(3,1): {} rects, {mixed} mixed layers", rs.len()));
    Ok((ok, parts.join(", ")))
}

fn criterion_12() -> Outcome {
    let expected: BTreeSet<Vec<usize>> = enumerate_nice_cycles(2, 1)?.iter().map(|c| canonical_directed(c)).collect();
    let histogram = |seed: u64| -> Result<BTreeMap<Vec<usize>, u64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut h = BTreeMap::new();
        for _ in 0..40_000 {
            *h.entry(canonical_directed(&sample_nice_cycle(2, 1, &mut rng)?)).or_insert(0) += 1;
        }
        Ok(h)
    };
    let h = histogram(12)?;
    let deterministic = h == histogram(12)? && sample_nice_cycle_seeded(2, 1, 5)? == sample_nice_cycle_seeded(2, 1, 5)?;
    let support_ok = h.keys().cloned().collect::<BTreeSet<_>>() == expected;
    let e = 40_000.0 / expected.len() as f64;
    let missing = expected.len().saturating_sub(h.len()) as f64 * e;
    let stat: f64 = h.values().map(|&o| (o as f64 - e).powi(2) / e).sum::<f64>() + missing;
    let df = (expected.len() - 1) as f64;
    let p = 1.0 - ChiSquared::new(df).map_err(|e| Error::InvalidParams(e.to_string()))?.cdf(stat);
    Ok((
        support_ok && deterministic && p > 0.001,
        format!("counts {:?}, chi-square {stat:.3}, p = {p:.4}, deterministic: {deterministic}", h.values().collect::<Vec<_>>()),
    ))
}

fn criterion_13() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut check = |label: String, g: &GraphInstance, d: &PathDecomposition, max: usize| {
        checked += 1;
        match verify_path_decomposition(g, d) {
            Ok(w) if w <= max => {}
            Ok(w) => failures.push(format!("{label}: width {w} > {max}")),
            Err(v) => failures.push(format!("{label}: {} violations", v.len())),
        }
    };
    for k in 2..=4 {
        let gk = gen_is_graph(k)?;
        check(format!("G_{k}"), &gk.graph, &gk.decomposition, k + 1);
    }
    for n in 2..=6 {
        for k in 1..=3 {
            let (g, d) = gen_dtsp_graph(n, k)?;
            check(format!("G_({n},{k})"), &g, &d, 3 * k);
            let (g, d) = gen_tsp_graph(n, k)?;
            check(format!("Gbar_({n},{k})"), &g, &d, 3 * k);
            let (g, d) = gen_dst_graph(n, k)?;
            check(format!("H_({n},{k})"), &g, &d, 4 * k);
        }
    }
    for (n, k) in [(3, 1), (3, 2)] {
        let (dg, _) = gen_dtsp_graph(n, k)?;
        let (ug, _) = gen_tsp_graph(n, k)?;
        let directed: BTreeSet<Vec<usize>> = enumerate_ham_cycles(&dg)?.iter().map(|c| canonical_directed(c)).collect();
        let undirected: BTreeSet<Vec<usize>> =
            enumerate_ham_cycles(&ug)?.iter().map(|c| canonical_undirected(c)).collect();
        let image: BTreeSet<Vec<usize>> = directed.iter().map(|c| directed_to_undirected(k, c)).collect();
        let round_trip = directed
            .iter()
            .all(|c| undirected_to_directed(k, &directed_to_undirected(k, c)).is_ok_and(|b| canonical_directed(&b) == *c));
        let valid = image.iter().all(|c| is_hamiltonian_cycle(&ug, c));
        if image != undirected || image.len() != directed.len() || !round_trip || !valid {
            failures.push(format!(
                "bijection at ({n},{k}): {} directed, {} undirected, {} images",
                directed.len(),
                undirected.len(),
                image.len()
            ));
        }
    }
    Ok((
        failures.is_empty(),
        if failures.is_empty() { format!("{checked} decompositions verified, bijection holds at (3,1) and (3,2)") } else { failures.join("; ") },
    ))
}
