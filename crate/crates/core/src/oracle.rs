//! Brute-force ground truth by exhaustive enumeration. Nothing here shares
//! traversal code with the compilers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{canonical_directed, canonical_undirected, dst_layer_of, gen_dst_graph, GraphInstance};
use crate::poly::{Monomial, Polynomial, Valuation};

pub const MAX_IS_VERTICES: usize = 24;
pub const MAX_HAM_VERTICES: usize = 24;
pub const MAX_ARBORESCENCE_VERTICES: usize = 9;
pub const MAX_NICE_VERTICES: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub optimum: i64,
    /// Vertex set, cycle or parent array achieving the optimum.
    pub witness: Vec<usize>,
    pub count: u64,
}

fn vertex_weights(g: &GraphInstance, v: &Valuation) -> Result<Vec<i64>> {
    (0..g.vertex_count()).map(|u| v.get(&g.vertex_var(u))).collect()
}

/// Weight of edge `(u, v)` looked up through the graph's variable naming.
fn edge_weight(g: &GraphInstance, val: &Valuation, u: usize, v: usize) -> Result<i64> {
    val.get(&g.edge_var(u, v))
}

/// Every independent set, as sorted vertex lists in lexicographic order.
pub fn enumerate_is(g: &GraphInstance) -> Result<Vec<Vec<usize>>> {
    let n = g.vertex_count();
    if n > MAX_IS_VERTICES {
        return Err(Error::ScaleExceeded(format!("independent-set enumeration needs ≤ {MAX_IS_VERTICES} vertices")));
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let independent = (0..n).all(|v| mask & (1 << v) == 0 || adj[v] & mask == 0);
        if independent {
            out.push((0..n).filter(|&v| mask & (1 << v) != 0).collect::<Vec<_>>());
        }
    }
    out.sort();
    Ok(out)
}

pub fn brute_is(g: &GraphInstance, v: &Valuation) -> Result<OracleResult> {
    let w = vertex_weights(g, v)?;
    let sets = enumerate_is(g)?;
    let mut best: Option<(i64, &Vec<usize>)> = None;
    for s in &sets {
        let total = s.iter().try_fold(0i64, |acc, &u| acc.checked_add(w[u])).ok_or(Error::Overflow("is weight"))?;
        if best.is_none_or(|(b, _)| total > b) {
            best = Some((total, s));
        }
    }
    let (optimum, witness) = best.expect("the empty set is independent");
    Ok(OracleResult { optimum, witness: witness.clone(), count: sets.len() as u64 })
}

pub fn is_polynomial(g: &GraphInstance) -> Result<Polynomial> {
    Ok(enumerate_is(g)?
        .into_iter()
        .map(|s| Monomial::product_of(s.into_iter().map(|u| g.vertex_var(u))))
        .collect())
}

/// Hamiltonian cycles by backtracking from vertex 0, canonically oriented
/// (undirected cycles once each) and sorted.
pub fn enumerate_ham_cycles(g: &GraphInstance) -> Result<Vec<Vec<usize>>> {
    let n = g.vertex_count();
    if n > MAX_HAM_VERTICES {
        return Err(Error::ScaleExceeded(format!("Hamiltonian enumeration needs ≤ {MAX_HAM_VERTICES} vertices")));
    }
    let mut out = Vec::new();
    if n < 2 || (!g.is_directed() && n < 3) {
        return Ok(out);
    }
    let mut succ: Vec<Vec<usize>> = (0..n).map(|v| g.out_neighbors(v).to_vec()).collect();
    for s in &mut succ {
        s.sort_unstable();
    }
    let mut path = vec![0usize];
    let mut used = vec![false; n];
    used[0] = true;
    ham_dfs(g, &succ, &mut path, &mut used, &mut out);
    if !g.is_directed() {
        out.retain(|c| c[1] < c[n - 1]);
    }
    for c in &mut out {
        *c = if g.is_directed() { canonical_directed(c) } else { canonical_undirected(c) };
    }
    out.sort();
    Ok(out)
}

fn ham_dfs(
    g: &GraphInstance,
    succ: &[Vec<usize>],
    path: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<Vec<usize>>,
) {
    let n = used.len();
    let last = *path.last().unwrap();
    if path.len() == n {
        if g.has_edge(last, 0) {
            out.push(path.clone());
        }
        return;
    }
    for &v in &succ[last] {
        if !used[v] {
            used[v] = true;
            path.push(v);
            ham_dfs(g, succ, path, used, out);
            path.pop();
            used[v] = false;
        }
    }
}

pub fn cycle_weight(g: &GraphInstance, v: &Valuation, cycle: &[usize]) -> Result<i64> {
    let n = cycle.len();
    (0..n).try_fold(0i64, |acc, i| {
        let w = edge_weight(g, v, cycle[i], cycle[(i + 1) % n])?;
        acc.checked_add(w).ok_or(Error::Overflow("cycle weight"))
    })
}

pub fn brute_tsp(g: &GraphInstance, v: &Valuation) -> Result<OracleResult> {
    let cycles = enumerate_ham_cycles(g)?;
    let mut best: Option<(i64, &Vec<usize>)> = None;
    for c in &cycles {
        let w = cycle_weight(g, v, c)?;
        if best.is_none_or(|(b, _)| w < b) {
            best = Some((w, c));
        }
    }
    let (optimum, witness) = best.ok_or(Error::NoHamiltonianCycle)?;
    Ok(OracleResult { optimum, witness: witness.clone(), count: cycles.len() as u64 })
}

/// Monomials of the (directed or undirected) TSP polynomial.
pub fn tsp_polynomial(g: &GraphInstance) -> Result<Polynomial> {
    Ok(enumerate_ham_cycles(g)?
        .into_iter()
        .map(|c| {
            let n = c.len();
            Monomial::product_of((0..n).map(|i| g.edge_var(c[i], c[(i + 1) % n])))
        })
        .collect())
}

/// Calls `f` with the parent array of every spanning out-tree; the root is
/// its own parent. Roots are tried in index order and parents in
/// increasing order.
pub fn for_each_arborescence(g: &GraphInstance, mut f: impl FnMut(&[usize])) -> Result<()> {
    let n = g.vertex_count();
    if n > MAX_ARBORESCENCE_VERTICES {
        return Err(Error::ScaleExceeded(format!(
            "arborescence enumeration needs ≤ {MAX_ARBORESCENCE_VERTICES} vertices"
        )));
    }
    let mut preds: Vec<Vec<usize>> = (0..n).map(|v| g.in_neighbors(v).to_vec()).collect();
    for p in &mut preds {
        p.sort_unstable();
    }
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        parent.iter_mut().for_each(|p| *p = usize::MAX);
        parent[root] = root;
        arb_dfs(&preds, root, 0, &mut parent, &mut f);
    }
    Ok(())
}

fn arb_dfs(preds: &[Vec<usize>], root: usize, v: usize, parent: &mut [usize], f: &mut impl FnMut(&[usize])) {
    let n = parent.len();
    if v == n {
        f(parent);
        return;
    }
    if v == root {
        arb_dfs(preds, root, v + 1, parent, f);
        return;
    }
    for &p in &preds[v] {
        // Reject p if its assigned ancestor chain runs back into v.
        let mut x = p;
        let mut cyclic = false;
        while parent[x] != usize::MAX && x != root {
            x = parent[x];
            if x == v {
                cyclic = true;
                break;
            }
        }
        if cyclic || x == v {
            continue;
        }
        parent[v] = p;
        arb_dfs(preds, root, v + 1, parent, f);
        parent[v] = usize::MAX;
    }
}

pub fn enumerate_arborescences(g: &GraphInstance) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for_each_arborescence(g, |p| out.push(p.to_vec()))?;
    Ok(out)
}

pub fn brute_dst(g: &GraphInstance, v: &Valuation) -> Result<OracleResult> {
    let n = g.vertex_count();
    let mut weight = vec![vec![0i64; n]; n];
    for &(a, b) in g.edges() {
        weight[a][b] = edge_weight(g, v, a, b)?;
        if !g.is_directed() {
            weight[b][a] = weight[a][b];
        }
    }
    let mut best: Option<(i64, Vec<usize>)> = None;
    let mut count = 0u64;
    for_each_arborescence(g, |p| {
        count += 1;
        let w: i64 = (0..n).filter(|&u| p[u] != u).map(|u| weight[p[u]][u]).sum();
        if best.as_ref().is_none_or(|(b, _)| w < *b) {
            best = Some((w, p.to_vec()));
        }
    })?;
    let (optimum, witness) = best.ok_or(Error::NotConnected)?;
    Ok(OracleResult { optimum, witness, count })
}

pub fn dst_polynomial(g: &GraphInstance) -> Result<Polynomial> {
    let mut p = Polynomial::new();
    let n = g.vertex_count();
    for_each_arborescence(g, |par| {
        p.insert(Monomial::product_of((0..n).filter(|&u| par[u] != u).map(|u| g.edge_var(par[u], u))));
    })?;
    Ok(p)
}

/// Fraction-free (Bareiss) determinant over exact integers.
pub fn bareiss_determinant(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| m[i][k] != 0) else {
                return 0;
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Spanning out-trees summed over all roots, by the directed matrix-tree
/// theorem on the in-degree Laplacian.
pub fn matrix_tree_count(g: &GraphInstance) -> i128 {
    let n = g.vertex_count();
    let mut lap = vec![vec![0i128; n]; n];
    let arcs: Vec<(usize, usize)> = if g.is_directed() {
        g.edges().to_vec()
    } else {
        g.edges().iter().flat_map(|&(u, v)| [(u, v), (v, u)]).collect()
    };
    for (u, v) in arcs {
        lap[v][v] += 1;
        lap[u][v] -= 1;
    }
    (0..n)
        .map(|root| {
            let minor: Vec<Vec<i128>> = (0..n)
                .filter(|&i| i != root)
                .map(|i| (0..n).filter(|&j| j != root).map(|j| lap[i][j]).collect())
                .collect();
            bareiss_determinant(minor)
        })
        .sum()
}

/// Nice directed Hamiltonian cycles of `H_{n,k}` by backtracking that lets
/// each vertex use at most one edge from each of its two layers.
pub fn enumerate_nice_cycles(n: usize, k: usize) -> Result<Vec<Vec<usize>>> {
    let (g, _) = gen_dst_graph(n, k)?;
    let total = g.vertex_count();
    if total > MAX_NICE_VERTICES {
        return Err(Error::ScaleExceeded(format!("nice-cycle enumeration needs 2nk ≤ {MAX_NICE_VERTICES}")));
    }
    let rows = 2 * k;
    // A vertex of column c (0-based) touches layers c and c + 1.
    let slot = |v: usize, layer: usize| -> usize { layer - v / rows };
    let mut succ: Vec<Vec<usize>> = (0..total).map(|v| g.out_neighbors(v).to_vec()).collect();
    for s in &mut succ {
        s.sort_unstable();
    }
    let mut state = NiceSearch {
        n,
        k,
        succ,
        used_layer: vec![[false; 2]; total],
        on_path: vec![false; total],
        path: vec![0],
        out: Vec::new(),
    };
    state.on_path[0] = true;
    state.dfs(&slot);
    let mut out = state.out;
    for c in &mut out {
        *c = canonical_directed(c);
    }
    out.sort();
    Ok(out)
}

struct NiceSearch {
    n: usize,
    k: usize,
    succ: Vec<Vec<usize>>,
    used_layer: Vec<[bool; 2]>,
    on_path: Vec<bool>,
    path: Vec<usize>,
    out: Vec<Vec<usize>>,
}

impl NiceSearch {
    fn try_edge(&mut self, u: usize, v: usize, slot: &impl Fn(usize, usize) -> usize) -> Option<(usize, usize)> {
        let layer = dst_layer_of(self.n, self.k, u, v)?;
        let (su, sv) = (slot(u, layer), slot(v, layer));
        if self.used_layer[u][su] || self.used_layer[v][sv] {
            return None;
        }
        self.used_layer[u][su] = true;
        self.used_layer[v][sv] = true;
        Some((su, sv))
    }

    fn dfs(&mut self, slot: &impl Fn(usize, usize) -> usize) {
        let total = self.on_path.len();
        let last = *self.path.last().unwrap();
        if self.path.len() == total {
            if self.succ[last].contains(&0) {
                if let Some((su, sv)) = self.try_edge(last, 0, slot) {
                    self.out.push(self.path.clone());
                    self.used_layer[last][su] = false;
                    self.used_layer[0][sv] = false;
                }
            }
            return;
        }
        for i in 0..self.succ[last].len() {
            let v = self.succ[last][i];
            if self.on_path[v] {
                continue;
            }
            let Some((su, sv)) = self.try_edge(last, v, slot) else { continue };
            self.on_path[v] = true;
            self.path.push(v);
            self.dfs(slot);
            self.path.pop();
            self.on_path[v] = false;
            self.used_layer[last][su] = false;
            self.used_layer[v][sv] = false;
        }
    }
}

/// Shortest simple `s → t` path weight by exhaustive search.
pub fn brute_shortest_path(g: &GraphInstance, v: &Valuation, s: usize, t: usize) -> Result<i64> {
    let n = g.vertex_count();
    let mut w = vec![vec![None; n]; n];
    for &(a, b) in g.edges() {
        w[a][b] = Some(edge_weight(g, v, a, b)?);
        if !g.is_directed() {
            w[b][a] = w[a][b];
        }
    }
    let mut best: Option<i64> = None;
    let mut used = vec![false; n];
    used[s] = true;
    fn go(w: &[Vec<Option<i64>>], u: usize, t: usize, acc: i64, used: &mut [bool], best: &mut Option<i64>) {
        if u == t {
            if best.is_none_or(|b| acc < b) {
                *best = Some(acc);
            }
            return;
        }
        for x in 0..used.len() {
            if let (false, Some(c)) = (used[x], w[u][x]) {
                used[x] = true;
                go(w, x, t, acc + c, used, best);
                used[x] = false;
            }
        }
    }
    go(&w, s, t, 0, &mut used, &mut best);
    best.ok_or(Error::NotConnected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_digraph, gen_dtsp_graph};

    fn path3() -> GraphInstance {
        let mut g = GraphInstance::new(false, vec!["a".into(), "b".into(), "c".into()]).unwrap();
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        g
    }

    fn unit(vars: Vec<crate::poly::VariableId>) -> Valuation {
        vars.into_iter().map(|x| (x, 1)).collect()
    }

    #[test]
    fn is_examples() {
        let g = path3();
        let v: Valuation = [("a", 3), ("b", -1), ("c", 2)].into_iter().map(|(x, w)| (crate::poly::VariableId::from(x), w)).collect();
        let r = brute_is(&g, &v).unwrap();
        assert_eq!((r.optimum, r.count, r.witness.clone()), (5, 5, vec![0, 2]));
        let e = GraphInstance::new(false, vec!["p".into(), "q".into()]).unwrap();
        let v: Valuation = [("p", -1), ("q", -2)].into_iter().map(|(x, w)| (crate::poly::VariableId::from(x), w)).collect();
        assert_eq!(brute_is(&e, &v).unwrap().optimum, 0);
        let mut t = GraphInstance::new(false, vec!["a".into(), "b".into(), "c".into()]).unwrap();
        t.add_edge(0, 1).unwrap();
        t.add_edge(1, 2).unwrap();
        t.add_edge(0, 2).unwrap();
        let r = brute_is(&t, &unit(t.vertex_vars())).unwrap();
        assert_eq!((r.optimum, r.count), (1, 4));
    }

    #[test]
    fn tsp_examples() {
        let k4 = complete_digraph(4).unwrap();
        let r = brute_tsp(&k4, &unit(k4.edge_vars())).unwrap();
        assert_eq!((r.optimum, r.count), (4, 6));
        let mut u4 = GraphInstance::new(false, (0..4).map(|i| i.to_string()).collect()).unwrap();
        for a in 0..4 {
            for b in a + 1..4 {
                u4.add_edge(a, b).unwrap();
            }
        }
        assert_eq!(enumerate_ham_cycles(&u4).unwrap().len(), 3);
        let (g, _) = gen_dtsp_graph(3, 2).unwrap();
        assert_eq!(enumerate_ham_cycles(&g).unwrap().len(), 4);
        assert!(matches!(brute_tsp(&path3(), &unit(path3().edge_vars())), Err(Error::NoHamiltonianCycle)));
    }

    #[test]
    fn dst_examples() {
        let mut g = GraphInstance::new(true, vec!["u".into(), "v".into()]).unwrap();
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 0).unwrap();
        let mut val = Valuation::new();
        val.set(g.edge_var(0, 1), 4);
        val.set(g.edge_var(1, 0), 7);
        let r = brute_dst(&g, &val).unwrap();
        assert_eq!((r.optimum, r.count), (4, 2));

        let mut tri = GraphInstance::new(true, vec!["a".into(), "b".into(), "c".into()]).unwrap();
        for (a, b) in [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)] {
            tri.add_edge(a, b).unwrap();
        }
        let r = brute_dst(&tri, &unit(tri.edge_vars())).unwrap();
        assert_eq!((r.optimum, r.count), (2, 9));
        assert_eq!(matrix_tree_count(&tri), 9);

        let (h, _) = gen_dst_graph(2, 1).unwrap();
        assert_eq!(brute_dst(&h, &unit(h.edge_vars())).unwrap().optimum, 3);
        assert_eq!(matrix_tree_count(&h) as u64, brute_dst(&h, &unit(h.edge_vars())).unwrap().count);

        let mut split = GraphInstance::new(true, vec!["a".into(), "b".into()]).unwrap();
        assert!(matches!(brute_dst(&split, &Valuation::new()), Err(Error::NotConnected)));
        split.add_edge(0, 1).unwrap();
        assert_eq!(enumerate_arborescences(&split).unwrap(), vec![vec![0, 0]]);
    }

    #[test]
    fn determinant() {
        assert_eq!(bareiss_determinant(vec![vec![2, 1], vec![1, 3]]), 5);
        assert_eq!(bareiss_determinant(vec![vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(bareiss_determinant(vec![vec![1, 2], vec![2, 4]]), 0);
        let k = complete_digraph(5).unwrap();
        assert_eq!(matrix_tree_count(&k), 5i128.pow(4));
    }

    #[test]
    fn nice_cycle_counts() {
        assert_eq!(enumerate_nice_cycles(2, 1).unwrap().len(), 4);
        assert_eq!(enumerate_nice_cycles(3, 1).unwrap().len(), 8);
        for c in enumerate_nice_cycles(3, 1).unwrap() {
            crate::graph::nice_cycle_content(3, 1, &c).unwrap();
        }
    }

    #[test]
    fn shortest_path() {
        let g = complete_digraph(3).unwrap();
        let mut v: Valuation = g.edge_vars().into_iter().map(|x| (x, 10)).collect();
        v.set(g.edge_var(0, 1), 1);
        v.set(g.edge_var(1, 2), 1);
        v.set(g.edge_var(0, 2), 5);
        assert_eq!(brute_shortest_path(&g, &v, 0, 2).unwrap(), 2);
    }
}
