//! Graph families with path-decomposition certificates.
//!
//! Vertices are stored by index; labels are structured strings such as
//! `v[c][r]`, `w[a][b][na][nb]` or `v[c][r][-1]`. Families:
//!
//! * `G_k`: literal chains `v[i][j]` plus one vertex per 2-CNF clause.
//! * `G_{n,k}`: directed, columns `1..=n` of `k` rows, all edges from a
//!   column to the cyclically next one.
//! * `Ḡ_{n,k}`: the undirected split of `G_{n,k}` with sublayers `-1, 0, 1`.
//! * `H_{n,k}`: directed, columns of `2k` rows, both directions between
//!   adjacent columns and cliques inside the first and last column.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{compose, factorial, product, ClassSpec, Permutation};
use crate::poly::VariableId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Layer {
    pub column: usize,
    pub row: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sublayer: Option<i8>,
}

#[derive(Clone, Debug)]
pub struct GraphInstance {
    directed: bool,
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    edge_set: HashSet<(usize, usize)>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    layers: Vec<Option<Layer>>,
}

impl GraphInstance {
    pub fn new(directed: bool, names: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidParams(format!("duplicate vertex {name}")));
            }
        }
        let n = names.len();
        Ok(GraphInstance {
            directed,
            names,
            index,
            edges: Vec::new(),
            edge_set: HashSet::new(),
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            layers: vec![None; n],
        })
    }

    /// Adds an edge; undirected edges are stored with the smaller index first.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.names.len();
        if u >= n || v >= n {
            return Err(Error::IndexOutOfRange { index: u.max(v), dim: n });
        }
        if u == v {
            return Err(Error::InvalidParams(format!("self-loop at {}", self.names[u])));
        }
        let key = if self.directed { (u, v) } else { (u.min(v), u.max(v)) };
        if !self.edge_set.insert(key) {
            return Err(Error::InvalidParams(format!(
                "duplicate edge {} {}",
                self.names[u], self.names[v]
            )));
        }
        self.edges.push(key);
        self.out_adj[u].push(v);
        self.in_adj[v].push(u);
        if !self.directed {
            self.out_adj[v].push(u);
            self.in_adj[u].push(v);
        }
        Ok(())
    }

    pub fn set_layer(&mut self, v: usize, layer: Layer) {
        self.layers[v] = Some(layer);
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn layer(&self, v: usize) -> Option<Layer> {
        self.layers[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if self.directed {
            self.edge_set.contains(&(u, v))
        } else {
            self.edge_set.contains(&(u.min(v), u.max(v)))
        }
    }

    /// Out-neighbours (all neighbours when undirected).
    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    /// Neighbours ignoring direction, sorted and deduplicated.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.out_adj[v].iter().chain(&self.in_adj[v]).copied().collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn vertex_var(&self, v: usize) -> VariableId {
        VariableId::new(self.names[v].clone())
    }

    /// Variable of the edge `(u, v)`; for undirected graphs the endpoints are
    /// ordered by index.
    pub fn edge_var(&self, u: usize, v: usize) -> VariableId {
        let (a, b) = if self.directed { (u, v) } else { (u.min(v), u.max(v)) };
        VariableId::new(format!("x({},{})", self.names[a], self.names[b]))
    }

    pub fn vertex_vars(&self) -> Vec<VariableId> {
        (0..self.vertex_count()).map(|v| self.vertex_var(v)).collect()
    }

    pub fn edge_vars(&self) -> Vec<VariableId> {
        self.edges.iter().map(|&(u, v)| self.edge_var(u, v)).collect()
    }

    /// Weakly connected (strongly not required).
    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in self.out_adj[v].iter().chain(&self.in_adj[v]) {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn to_doc(&self) -> GraphDoc {
        GraphDoc {
            directed: self.directed,
            vertices: self.names.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(u, v)| [self.names[u].clone(), self.names[v].clone()])
                .collect(),
            layers: self
                .layers
                .iter()
                .enumerate()
                .filter_map(|(v, l)| l.map(|l| (self.names[v].clone(), l)))
                .collect(),
        }
    }

    pub fn from_doc(doc: &GraphDoc) -> Result<Self> {
        let mut g = GraphInstance::new(doc.directed, doc.vertices.clone())?;
        for [u, v] in &doc.edges {
            let (Some(a), Some(b)) = (g.index_of(u), g.index_of(v)) else {
                return Err(Error::InvalidParams(format!("edge {u} {v} names an unknown vertex")));
            };
            g.add_edge(a, b)?;
        }
        for (name, layer) in &doc.layers {
            let v = g
                .index_of(name)
                .ok_or_else(|| Error::InvalidParams(format!("layer for unknown vertex {name}")))?;
            g.set_layer(v, *layer);
        }
        Ok(g)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_doc())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        GraphInstance::from_doc(&serde_json::from_str(s)?)
    }

    pub fn to_dot(&self) -> String {
        let (kind, arrow) = if self.directed { ("digraph", "->") } else { ("graph", "--") };
        let mut s = format!("{kind} G {{\n");
        for name in &self.names {
            let _ = writeln!(s, "  \"{name}\";");
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(s, "  \"{}\" {arrow} \"{}\";", self.names[u], self.names[v]);
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub directed: bool,
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
    #[serde(default)]
    pub layers: BTreeMap<String, Layer>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathDecomposition {
    pub bags: Vec<Vec<usize>>,
}

impl PathDecomposition {
    pub fn new(mut bags: Vec<Vec<usize>>) -> Self {
        for b in &mut bags {
            b.sort_unstable();
            b.dedup();
        }
        PathDecomposition { bags }
    }

    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(1).saturating_sub(1)
    }

    pub fn to_doc(&self, g: &GraphInstance) -> DecompositionDoc {
        DecompositionDoc {
            bags: self
                .bags
                .iter()
                .map(|b| b.iter().map(|&v| g.name(v).to_string()).collect())
                .collect(),
        }
    }

    pub fn from_doc(g: &GraphInstance, doc: &DecompositionDoc) -> Result<Self> {
        let bags = doc
            .bags
            .iter()
            .map(|b| {
                b.iter()
                    .map(|name| {
                        g.index_of(name)
                            .ok_or_else(|| Error::InvalidParams(format!("bag names unknown vertex {name}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PathDecomposition::new(bags))
    }

    /// Vertices ordered by the first bag containing them, ties by index.
    pub fn first_bag_order(&self, n: usize) -> Vec<usize> {
        let mut first = vec![usize::MAX; n];
        for (i, b) in self.bags.iter().enumerate() {
            for &v in b {
                if v < n && first[v] == usize::MAX {
                    first[v] = i;
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (first[v], v));
        order
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionDoc {
    pub bags: Vec<Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    EdgeUncovered,
    IntervalBroken,
    VertexUncovered,
    UnknownVertex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub detail: String,
}

/// Returns the width, or every violated condition.
pub fn verify_path_decomposition(
    g: &GraphInstance,
    d: &PathDecomposition,
) -> std::result::Result<usize, Vec<Violation>> {
    let n = g.vertex_count();
    let mut violations = Vec::new();
    let mut first = vec![usize::MAX; n];
    let mut last = vec![0usize; n];
    let mut count = vec![0usize; n];
    for (i, bag) in d.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                violations.push(Violation {
                    code: ViolationCode::UnknownVertex,
                    detail: format!("bag {i} holds vertex index {v}"),
                });
                continue;
            }
            first[v] = first[v].min(i);
            last[v] = i;
            count[v] += 1;
        }
    }
    for v in 0..n {
        if count[v] == 0 {
            violations.push(Violation {
                code: ViolationCode::VertexUncovered,
                detail: format!("{} is in no bag", g.name(v)),
            });
        } else if last[v] - first[v] + 1 != count[v] {
            violations.push(Violation {
                code: ViolationCode::IntervalBroken,
                detail: format!("bags holding {} are not contiguous", g.name(v)),
            });
        }
    }
    let bag_sets: Vec<HashSet<usize>> = d.bags.iter().map(|b| b.iter().copied().collect()).collect();
    for &(u, v) in g.edges() {
        if !bag_sets.iter().any(|b| b.contains(&u) && b.contains(&v)) {
            violations.push(Violation {
                code: ViolationCode::EdgeUncovered,
                detail: format!("edge {} {} is in no bag", g.name(u), g.name(v)),
            });
        }
    }
    if violations.is_empty() {
        Ok(d.width())
    } else {
        Err(violations)
    }
}

/// The vertex-separation decomposition of a linear order: bag `i` holds
/// `order[i]` and every earlier vertex with a neighbour at or after `i`.
pub fn decomposition_from_order(g: &GraphInstance, order: &[usize]) -> Result<PathDecomposition> {
    let n = g.vertex_count();
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return Err(Error::InvalidParams("order must be a permutation of the vertices".into()));
        }
        pos[v] = i;
    }
    if order.len() != n {
        return Err(Error::InvalidParams("order must be a permutation of the vertices".into()));
    }
    let last_nb: Vec<usize> = (0..n)
        .map(|v| g.neighbors(v).iter().map(|&u| pos[u]).max().unwrap_or(0).max(pos[v]))
        .collect();
    let bags = (0..n)
        .map(|i| order[..=i].iter().copied().filter(|&v| pos[v] == i || last_nb[v] >= i).collect())
        .collect();
    Ok(PathDecomposition::new(bags))
}

/// One 2-CNF clause `(a, b, na, nb)` with 1-based variables `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub a: usize,
    pub b: usize,
    pub na: u8,
    pub nb: u8,
}

pub fn clauses(k: usize) -> Vec<Clause> {
    let mut out = Vec::new();
    for a in 1..=k {
        for b in a + 1..=k {
            for na in 0..2 {
                for nb in 0..2 {
                    out.push(Clause { a, b, na, nb });
                }
            }
        }
    }
    out
}

/// Layout of `G_k`: literal `v[i][j]` (1-based `i`, 0-based `j`) and clause
/// vertices in clause order.
#[derive(Clone, Debug)]
pub struct IsGraph {
    pub k: usize,
    pub q: usize,
    pub clauses: Vec<Clause>,
    pub graph: GraphInstance,
    pub decomposition: PathDecomposition,
}

impl IsGraph {
    pub fn literal(&self, i: usize, j: usize) -> usize {
        (i - 1) * 2 * self.q + j
    }

    /// Vertex of clause `j` (1-based).
    pub fn clause_vertex(&self, j: usize) -> usize {
        self.k * 2 * self.q + (j - 1)
    }
}

pub fn gen_is_graph(k: usize) -> Result<IsGraph> {
    if k < 2 {
        return Err(Error::InvalidK(k));
    }
    if k > 6 {
        return Err(Error::ScaleExceeded(format!("G_k needs k ≤ 6, got {k}")));
    }
    let cl = clauses(k);
    let q = cl.len();
    let mut names = Vec::with_capacity(2 * q * k + q);
    for i in 1..=k {
        for j in 0..2 * q {
            names.push(format!("v[{i}][{j}]"));
        }
    }
    for c in &cl {
        names.push(format!("w[{}][{}][{}][{}]", c.a, c.b, c.na, c.nb));
    }
    let mut g = GraphInstance::new(false, names)?;
    let lit = |i: usize, j: usize| (i - 1) * 2 * q + j;
    for i in 1..=k {
        for j in 1..2 * q {
            g.add_edge(lit(i, j - 1), lit(i, j))?;
        }
        for j in 0..2 * q {
            g.set_layer(lit(i, j), Layer { column: j, row: i, sublayer: None });
        }
    }
    for (idx, c) in cl.iter().enumerate() {
        let w = k * 2 * q + idx;
        g.add_edge(w, lit(c.a, 2 * idx + c.na as usize))?;
        g.add_edge(w, lit(c.b, 2 * idx + c.nb as usize))?;
    }
    // Clause j sits between literal columns 2(j-1) and 2(j-1)+1.
    let mut order = Vec::with_capacity(g.vertex_count());
    for (idx, _) in cl.iter().enumerate() {
        order.extend((1..=k).map(|i| lit(i, 2 * idx)));
        order.push(k * 2 * q + idx);
        order.extend((1..=k).map(|i| lit(i, 2 * idx + 1)));
    }
    let decomposition = decomposition_from_order(&g, &order)?;
    Ok(IsGraph { k, q, clauses: cl, graph: g, decomposition })
}

/// Literal vertices of matching parity plus every clause the assignment
/// fails, sorted.
pub fn canonical_solution(gk: &IsGraph, assignment: &[u8]) -> Result<Vec<usize>> {
    if assignment.len() != gk.k || assignment.iter().any(|&b| b > 1) {
        return Err(Error::InvalidParams(format!("assignment must be {} bits", gk.k)));
    }
    let mut out = Vec::new();
    for i in 1..=gk.k {
        for j in 0..gk.q {
            out.push(gk.literal(i, 2 * j + assignment[i - 1] as usize));
        }
    }
    for (idx, c) in gk.clauses.iter().enumerate() {
        if assignment[c.a - 1] != c.na && assignment[c.b - 1] != c.nb {
            out.push(gk.clause_vertex(idx + 1));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// All `2^k` assignments in binary counting order, variable 1 most
/// significant.
pub fn all_assignments(k: usize) -> Vec<Vec<u8>> {
    (0..1usize << k)
        .map(|m| (0..k).map(|i| ((m >> (k - 1 - i)) & 1) as u8).collect())
        .collect()
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n < 2 || k < 1 {
        return Err(Error::InvalidParams(format!("need n ≥ 2 and k ≥ 1, got n={n} k={k}")));
    }
    if n * k > 400 {
        return Err(Error::ScaleExceeded(format!("n·k = {} too large", n * k)));
    }
    Ok(())
}

/// Index of `v[c][r]` in `G_{n,k}` (0-based column and row).
pub fn dtsp_vertex(k: usize, c: usize, r: usize) -> usize {
    c * k + r
}

/// Index of `v[c][r][i]` in `Ḡ_{n,k}` (0-based column and row).
pub fn tsp_vertex(k: usize, c: usize, r: usize, i: i8) -> usize {
    (c * k + r) * 3 + (i + 1) as usize
}

/// Index of `v[c][r]` in `H_{n,k}` (0-based column and row `< 2k`).
pub fn dst_vertex(k: usize, c: usize, r: usize) -> usize {
    c * 2 * k + r
}

/// `G_{n,k}` with a width `≤ 3k` decomposition.
pub fn gen_dtsp_graph(n: usize, k: usize) -> Result<(GraphInstance, PathDecomposition)> {
    check_nk(n, k)?;
    let names = (1..=n)
        .flat_map(|c| (1..=k).map(move |r| format!("v[{c}][{r}]")))
        .collect();
    let mut g = GraphInstance::new(true, names)?;
    for c in 0..n {
        for r1 in 0..k {
            g.set_layer(dtsp_vertex(k, c, r1), Layer { column: c + 1, row: r1 + 1, sublayer: None });
            for r2 in 0..k {
                g.add_edge(dtsp_vertex(k, c, r1), dtsp_vertex(k, (c + 1) % n, r2))?;
            }
        }
    }
    let order: Vec<usize> = (0..n * k).collect();
    let d = decomposition_from_order(&g, &order)?;
    Ok((g, d))
}

/// `Ḡ_{n,k}` with a width `≤ 3k` decomposition.
pub fn gen_tsp_graph(n: usize, k: usize) -> Result<(GraphInstance, PathDecomposition)> {
    check_nk(n, k)?;
    let mut names = Vec::with_capacity(3 * n * k);
    for c in 1..=n {
        for r in 1..=k {
            for i in [-1, 0, 1] {
                names.push(format!("v[{c}][{r}][{i}]"));
            }
        }
    }
    let mut g = GraphInstance::new(false, names)?;
    for c in 0..n {
        for r in 0..k {
            for i in [-1i8, 0, 1] {
                g.set_layer(tsp_vertex(k, c, r, i), Layer { column: c + 1, row: r + 1, sublayer: Some(i) });
            }
            g.add_edge(tsp_vertex(k, c, r, -1), tsp_vertex(k, c, r, 0))?;
            g.add_edge(tsp_vertex(k, c, r, 0), tsp_vertex(k, c, r, 1))?;
        }
    }
    for c in 0..n {
        for r1 in 0..k {
            for r2 in 0..k {
                g.add_edge(tsp_vertex(k, c, r1, 1), tsp_vertex(k, (c + 1) % n, r2, -1))?;
            }
        }
    }
    let order: Vec<usize> = (0..3 * n * k).collect();
    let d = decomposition_from_order(&g, &order)?;
    Ok((g, d))
}

/// `H_{n,k}` with a width `≤ 4k` decomposition.
pub fn gen_dst_graph(n: usize, k: usize) -> Result<(GraphInstance, PathDecomposition)> {
    check_nk(n, k)?;
    let rows = 2 * k;
    let names = (1..=n)
        .flat_map(|c| (1..=rows).map(move |r| format!("v[{c}][{r}]")))
        .collect();
    let mut g = GraphInstance::new(true, names)?;
    for c in 0..n {
        for r in 0..rows {
            g.set_layer(dst_vertex(k, c, r), Layer { column: c + 1, row: r + 1, sublayer: None });
        }
    }
    for c in 0..n {
        if c == 0 || c == n - 1 {
            for r1 in 0..rows {
                for r2 in 0..rows {
                    if r1 != r2 {
                        g.add_edge(dst_vertex(k, c, r1), dst_vertex(k, c, r2))?;
                    }
                }
            }
        }
        if c + 1 < n {
            for r1 in 0..rows {
                for r2 in 0..rows {
                    g.add_edge(dst_vertex(k, c, r1), dst_vertex(k, c + 1, r2))?;
                    g.add_edge(dst_vertex(k, c + 1, r2), dst_vertex(k, c, r1))?;
                }
            }
        }
    }
    let order: Vec<usize> = (0..n * rows).collect();
    let d = decomposition_from_order(&g, &order)?;
    Ok((g, d))
}

/// Complete digraph on `v[1]..v[n]`.
pub fn complete_digraph(n: usize) -> Result<GraphInstance> {
    let mut g = GraphInstance::new(true, (1..=n).map(|i| format!("v[{i}]")).collect())?;
    for u in 0..n {
        for v in 0..n {
            if u != v {
                g.add_edge(u, v)?;
            }
        }
    }
    Ok(g)
}

/// Rotates a directed cycle to start at its least vertex.
pub fn canonical_directed(cycle: &[usize]) -> Vec<usize> {
    let Some(start) = cycle.iter().enumerate().min_by_key(|&(_, v)| v).map(|(i, _)| i) else {
        return Vec::new();
    };
    cycle[start..].iter().chain(&cycle[..start]).copied().collect()
}

/// Least vertex first, then the direction whose second vertex is smaller.
pub fn canonical_undirected(cycle: &[usize]) -> Vec<usize> {
    let mut c = canonical_directed(cycle);
    if c.len() > 2 && c[1] > c[c.len() - 1] {
        c[1..].reverse();
    }
    c
}

/// Checks that `cycle` visits every vertex once along edges of `g`.
pub fn is_hamiltonian_cycle(g: &GraphInstance, cycle: &[usize]) -> bool {
    let n = g.vertex_count();
    if cycle.len() != n || n < 2 {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in cycle {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    (0..n).all(|i| g.has_edge(cycle[i], cycle[(i + 1) % n]))
}

/// The permutations `ρ_1..ρ_n` of a directed Hamiltonian cycle of `G_{n,k}`.
pub fn cycle_to_sequence(n: usize, k: usize, cycle: &[usize]) -> Result<Vec<Permutation>> {
    let (g, _) = gen_dtsp_graph(n, k)?;
    if !is_hamiltonian_cycle(&g, cycle) {
        return Err(Error::NotHamiltonian("not a Hamiltonian cycle of G_{n,k}".into()));
    }
    let mut images = vec![vec![0u8; k]; n];
    for i in 0..cycle.len() {
        let (u, v) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        images[u / k][u % k] = (v % k) as u8;
    }
    let seq = images.into_iter().map(Permutation::new).collect::<Result<Vec<_>>>()?;
    if !sequence_product(&seq)?.is_single_cycle() {
        return Err(Error::ProductNotSingleCycle);
    }
    Ok(seq)
}

/// `ρ_n ⋯ ρ_1`, the return map of column 1.
pub fn sequence_product(seq: &[Permutation]) -> Result<Permutation> {
    let k = seq.first().map_or(0, Permutation::len);
    let factors: Vec<&Permutation> = seq.iter().rev().collect();
    product(k, &factors)
}

/// The canonical directed cycle represented by `ρ_1..ρ_n`.
pub fn sequence_to_cycle(n: usize, k: usize, seq: &[Permutation]) -> Result<Vec<usize>> {
    check_nk(n, k)?;
    if seq.len() != n || seq.iter().any(|p| p.len() != k) {
        return Err(Error::InvalidParams(format!("need {n} permutations of {k} points")));
    }
    if !sequence_product(seq)?.is_single_cycle() {
        return Err(Error::ProductNotSingleCycle);
    }
    let mut cycle = Vec::with_capacity(n * k);
    let (mut c, mut r) = (0, 0);
    for _ in 0..n * k {
        cycle.push(dtsp_vertex(k, c, r));
        r = seq[c].apply(r);
        c = (c + 1) % n;
    }
    Ok(canonical_directed(&cycle))
}

/// Splits each vertex of a directed cycle of `G_{n,k}` into its three
/// sublayer copies in `Ḡ_{n,k}`.
pub fn directed_to_undirected(k: usize, cycle: &[usize]) -> Vec<usize> {
    let out: Vec<usize> = cycle
        .iter()
        .flat_map(|&v| {
            let (c, r) = (v / k, v % k);
            [-1i8, 0, 1].map(|i| tsp_vertex(k, c, r, i))
        })
        .collect();
    canonical_undirected(&out)
}

/// Inverse of [`directed_to_undirected`].
pub fn undirected_to_directed(k: usize, cycle: &[usize]) -> Result<Vec<usize>> {
    let len = cycle.len();
    if !len.is_multiple_of(3) || len == 0 {
        return Err(Error::NotHamiltonian("length is not a multiple of 3".into()));
    }
    // Orient so that each middle copy is entered from its -1 copy.
    let pos_mid = cycle.iter().position(|&v| v % 3 == 1).unwrap_or(0);
    let before = cycle[(pos_mid + len - 1) % len];
    let forward = before.is_multiple_of(3);
    let oriented: Vec<usize> = if forward {
        cycle.to_vec()
    } else {
        cycle.iter().rev().copied().collect()
    };
    let mut out = Vec::with_capacity(len / 3);
    for (i, &v) in oriented.iter().enumerate() {
        if v % 3 == 1 {
            let prev = oriented[(i + len - 1) % len];
            let next = oriented[(i + 1) % len];
            if prev != v - 1 || next != v + 1 {
                return Err(Error::NotHamiltonian("sublayer chain broken".into()));
            }
            let base = v / 3;
            out.push((base / k) * k + base % k);
        }
    }
    Ok(canonical_directed(&out))
}

/// Endpoints of an edge set layer `E_i` of `H_{n,k}`: `i = 0` is inside
/// column 1, `i = n` inside column `n`, otherwise between `i` and `i + 1`.
pub fn dst_layer_of(n: usize, k: usize, u: usize, v: usize) -> Option<usize> {
    let (cu, cv) = (u / (2 * k), v / (2 * k));
    if cu == cv {
        if cu == 0 {
            Some(0)
        } else if cu == n - 1 {
            Some(n)
        } else {
            None
        }
    } else if cu.abs_diff(cv) == 1 {
        Some(cu.min(cv) + 1)
    } else {
        None
    }
}

/// Content `ρ_0..ρ_n` of a nice Hamiltonian cycle of `H_{n,k}`.
pub fn nice_cycle_content(n: usize, k: usize, cycle: &[usize]) -> Result<Vec<Permutation>> {
    let (g, _) = gen_dst_graph(n, k)?;
    if !is_hamiltonian_cycle(&g, cycle) {
        return Err(Error::NotHamiltonian("not a Hamiltonian cycle of H_{n,k}".into()));
    }
    let rows = 2 * k;
    let mut images: Vec<Vec<Option<u8>>> = vec![vec![None; rows]; n + 1];
    let mut assign = |layer: usize, s: usize, t: usize| -> Result<()> {
        if images[layer][s].is_some_and(|x| x as usize != t) {
            return Err(Error::NotNice(format!("layer {layer} is not a perfect matching")));
        }
        images[layer][s] = Some(t as u8);
        Ok(())
    };
    for i in 0..cycle.len() {
        let (u, v) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        let layer = dst_layer_of(n, k, u, v).expect("edge of H_{n,k}");
        let (cu, ru, cv, rv) = (u / rows, u % rows, v / rows, v % rows);
        if layer == 0 || layer == n {
            assign(layer, ru, rv)?;
            assign(layer, rv, ru)?;
        } else if cu < cv {
            assign(layer, ru, rv)?;
        } else {
            assign(layer, rv, ru)?;
        }
    }
    let seq = images
        .into_iter()
        .enumerate()
        .map(|(layer, im)| {
            let full: Option<Vec<u8>> = im.into_iter().collect();
            let full = full.ok_or_else(|| Error::NotNice(format!("layer {layer} leaves a vertex unmatched")))?;
            Permutation::new(full).map_err(|_| Error::NotNice(format!("layer {layer} is not a perfect matching")))
        })
        .collect::<Result<Vec<_>>>()?;
    for layer in [0, n] {
        if !ClassSpec::AllTwoCycles.contains(&seq[layer]) {
            return Err(Error::NotNice(format!("layer {layer} is not a perfect matching")));
        }
    }
    for i in 1..=n {
        if !eq1_holds(&seq, i)? {
            return Err(Error::NotNice(format!("cut condition fails at position {i}")));
        }
    }
    Ok(seq)
}

/// `(L ρ_0 L⁻¹)(R⁻¹ ρ_n R)` has two `k`-cycles, with `L = ρ_{i−1}⋯ρ_1`
/// and `R = ρ_{n−1}⋯ρ_i`.
pub fn eq1_holds(seq: &[Permutation], i: usize) -> Result<bool> {
    let n = seq.len() - 1;
    if i == 0 || i > n {
        return Err(Error::InvalidParams(format!("cut position {i} outside 1..={n}")));
    }
    let m = seq[0].len();
    let left: Vec<&Permutation> = seq[1..i].iter().rev().collect();
    let right: Vec<&Permutation> = seq[i..n].iter().rev().collect();
    let l = product(m, &left)?;
    let r = product(m, &right)?;
    let a = product(m, &[&l, &seq[0], &l.inverse()])?;
    let b = product(m, &[&r.inverse(), &seq[n], &r])?;
    Ok(ClassSpec::TwoKCycles.contains(&compose(&a, &b)?))
}

/// Uniform random perfect matching of `0..2k` as an involution.
pub fn random_matching<R: Rng + ?Sized>(two_k: usize, rng: &mut R) -> Permutation {
    let mut pts: Vec<usize> = (0..two_k).collect();
    pts.shuffle(rng);
    let mut img = vec![0u8; two_k];
    for pair in pts.chunks(2) {
        img[pair[0]] = pair[1] as u8;
        img[pair[1]] = pair[0] as u8;
    }
    Permutation::new(img).expect("involution")
}

/// Draws a nice directed Hamiltonian cycle of `H_{n,k}`: random matching
/// and orientations in column 1, a random permutation per middle layer with
/// propagated directions, and a random closing among the `(k−1)!` choices.
pub fn sample_nice_cycle<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Vec<usize>> {
    check_nk(n, k)?;
    if 2 * k > u8::MAX as usize {
        return Err(Error::ScaleExceeded("too many rows".into()));
    }
    let rows = 2 * k;
    let total = n * rows;
    let mut succ = vec![usize::MAX; total];
    // tail[r]: the vertex of the current column has its outgoing edge.
    let mut tail = vec![false; rows];
    let rho0 = random_matching(rows, rng);
    for s in 0..rows {
        let t = rho0.apply(s);
        if s < t {
            let (a, b) = if rng.random_bool(0.5) { (s, t) } else { (t, s) };
            succ[dst_vertex(k, 0, a)] = dst_vertex(k, 0, b);
            tail[a] = true;
            tail[b] = false;
        }
    }
    for c in 0..n - 1 {
        let rho = Permutation::random(rows, rng);
        let mut next_tail = vec![false; rows];
        for (s, &is_tail) in tail.iter().enumerate() {
            let t = rho.apply(s);
            let (here, there) = (dst_vertex(k, c, s), dst_vertex(k, c + 1, t));
            if is_tail {
                succ[there] = here;
                next_tail[t] = true;
            } else {
                succ[here] = there;
            }
        }
        tail = next_tail;
    }
    // Paths run from a tail of the last column to a head of the last column.
    let last = n - 1;
    let tails: Vec<usize> = (0..rows).filter(|&r| tail[r]).collect();
    let end_of: HashMap<usize, usize> = tails
        .iter()
        .map(|&t| {
            let mut v = dst_vertex(k, last, t);
            while succ[v] != usize::MAX {
                v = succ[v];
            }
            (t, v)
        })
        .collect();
    // A uniform cyclic order of the paths fixes one of the (k−1)! closings.
    let mut order = tails.clone();
    order[1..].shuffle(rng);
    for j in 0..k {
        succ[end_of[&order[j]]] = dst_vertex(k, last, order[(j + 1) % k]);
    }
    let mut cycle = Vec::with_capacity(total);
    let mut v = 0;
    for _ in 0..total {
        cycle.push(v);
        v = succ[v];
    }
    if v != 0 {
        return Err(Error::NotHamiltonian("sampler produced a broken cycle".into()));
    }
    Ok(cycle)
}

/// Seeded wrapper around [`sample_nice_cycle`].
pub fn sample_nice_cycle_seeded(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_nice_cycle(n, k, &mut rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountFamily {
    DtspCycles,
    DstSequences,
    DstNiceCycles,
}

pub fn count_formulas(family: CountFamily, n: usize, k: usize) -> Result<u128> {
    if n < 2 || k < 1 {
        return Err(Error::InvalidParams(format!("need n ≥ 2 and k ≥ 1, got n={n} k={k}")));
    }
    let pow = |base: u128, e: usize| -> Result<u128> {
        (0..e).try_fold(1u128, |acc, _| acc.checked_mul(base).ok_or(Error::Overflow("count")))
    };
    let fact = |m: usize| -> Result<u128> {
        if m > 34 {
            Err(Error::Overflow("factorial"))
        } else {
            Ok(factorial(m))
        }
    };
    let over = || Error::Overflow("count");
    match family {
        CountFamily::DtspCycles => fact(k - 1)?.checked_mul(pow(fact(k)?, n - 1)?).ok_or_else(over),
        CountFamily::DstSequences => pow(fact(2 * k)?, n - 1)?.checked_mul(fact(2 * k - 1)?).ok_or_else(over),
        CountFamily::DstNiceCycles => count_formulas(CountFamily::DstSequences, n, k)?
            .checked_mul(2)
            .ok_or_else(over),
    }
}

/// Number of completions of a partially fixed `ρ_1..ρ_n` whose product is a
/// single `k`-cycle, by enumeration.
pub fn count_sequence_completions(n: usize, k: usize, fixed: &[Option<Permutation>]) -> Result<u128> {
    if fixed.len() != n {
        return Err(Error::InvalidParams(format!("need {n} slots")));
    }
    let all = crate::perm::enumerate_all(k)?;
    let free: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
    let combos = (all.len() as u128).checked_pow(free.len() as u32).ok_or(Error::Overflow("completions"))?;
    if combos > 50_000_000 {
        return Err(Error::ScaleExceeded("too many completions to enumerate".into()));
    }
    let mut choice = vec![0usize; free.len()];
    let mut seq: Vec<Permutation> =
        fixed.iter().map(|p| p.clone().unwrap_or_else(|| Permutation::identity(k))).collect();
    let mut count = 0u128;
    loop {
        for (slot, &i) in free.iter().enumerate() {
            seq[i] = all[choice[slot]].clone();
        }
        if sequence_product(&seq)?.is_single_cycle() {
            count += 1;
        }
        let mut j = 0;
        loop {
            if j == choice.len() {
                return Ok(count);
            }
            choice[j] += 1;
            if choice[j] < all.len() {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn is_graph_shape() {
        let g2 = gen_is_graph(2).unwrap();
        assert_eq!(g2.graph.vertex_count(), 20);
        assert_eq!(g2.graph.edge_count(), 22);
        assert!(verify_path_decomposition(&g2.graph, &g2.decomposition).unwrap() <= 3);
        let g3 = gen_is_graph(3).unwrap();
        assert_eq!((g3.q, g3.graph.vertex_count()), (12, 84));
        assert!(verify_path_decomposition(&g3.graph, &g3.decomposition).unwrap() <= 4);
        assert!(matches!(gen_is_graph(1), Err(Error::InvalidK(1))));
    }

    #[test]
    fn canonical_solutions_k2() {
        let g = gen_is_graph(2).unwrap();
        let sol = canonical_solution(&g, &[0, 0]).unwrap();
        assert_eq!(sol.len(), 9);
        let w = sol.iter().find(|&&v| v >= 16).copied().unwrap();
        assert_eq!(g.graph.name(w), "w[1][2][1][1]");
        let mut distinct = HashSet::new();
        for a in all_assignments(2) {
            let s = canonical_solution(&g, &a).unwrap();
            for (i, &u) in s.iter().enumerate() {
                for &v in &s[i + 1..] {
                    assert!(!g.graph.has_edge(u, v));
                }
            }
            distinct.insert(s);
        }
        assert_eq!(distinct.len(), 4);
    }

    #[test]
    fn family_shapes() {
        let (g, d) = gen_dtsp_graph(3, 2).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (6, 12));
        assert!(verify_path_decomposition(&g, &d).unwrap() <= 6);
        let (g, d) = gen_tsp_graph(3, 2).unwrap();
        assert_eq!(g.vertex_count(), 18);
        assert!(verify_path_decomposition(&g, &d).unwrap() <= 6);
        let (g, d) = gen_dst_graph(2, 1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 12));
        assert!(g.has_edge(0, 1) && g.has_edge(3, 2));
        assert!(verify_path_decomposition(&g, &d).unwrap() <= 4);
        let (g, d) = gen_dst_graph(3, 2).unwrap();
        assert!(verify_path_decomposition(&g, &d).unwrap() <= 8);
        assert!(gen_dtsp_graph(1, 2).is_err());
    }

    #[test]
    fn verifier_diagnostics() {
        let mut g = GraphInstance::new(false, vec!["a".into(), "b".into(), "c".into()]).unwrap();
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        assert_eq!(verify_path_decomposition(&g, &PathDecomposition::new(vec![vec![0, 1, 2]])), Ok(2));
        assert_eq!(verify_path_decomposition(&g, &PathDecomposition::new(vec![vec![0, 1], vec![1, 2]])), Ok(1));
        let err = verify_path_decomposition(&g, &PathDecomposition::new(vec![vec![0, 1], vec![2], vec![1]]))
            .unwrap_err();
        let codes: Vec<_> = err.iter().map(|v| v.code).collect();
        assert!(codes.contains(&ViolationCode::IntervalBroken));
        assert!(codes.contains(&ViolationCode::EdgeUncovered));
    }

    #[test]
    fn graph_json_round_trip() {
        let (g, d) = gen_tsp_graph(2, 1).unwrap();
        let json = g.to_json().unwrap();
        let back = GraphInstance::from_json(&json).unwrap();
        assert_eq!(back.to_doc(), g.to_doc());
        assert!(json.contains("\"sublayer\":-1"));
        let dd = d.to_doc(&g);
        assert_eq!(PathDecomposition::from_doc(&back, &dd).unwrap(), d);
        assert!(g.to_dot().starts_with("graph G {"));
        let mut bad = GraphInstance::new(true, vec!["a".into(), "b".into()]).unwrap();
        assert!(bad.add_edge(0, 0).is_err());
        bad.add_edge(0, 1).unwrap();
        assert!(bad.add_edge(0, 1).is_err());
    }

    #[test]
    fn sequences_round_trip() {
        let seq = cycle_to_sequence(3, 1, &[0, 1, 2]).unwrap();
        assert!(seq.iter().all(Permutation::is_identity));
        assert_eq!(sequence_to_cycle(3, 1, &seq).unwrap(), vec![0, 1, 2]);
        let id = Permutation::identity(2);
        let sw = Permutation::from_cycles(2, &[&[1, 2]]).unwrap();
        assert!(matches!(
            sequence_to_cycle(3, 2, &[id.clone(), id.clone(), id.clone()]),
            Err(Error::ProductNotSingleCycle)
        ));
        let c = sequence_to_cycle(3, 2, &[sw.clone(), id.clone(), id.clone()]).unwrap();
        assert_eq!(cycle_to_sequence(3, 2, &c).unwrap(), vec![sw, id.clone(), id]);
        assert!(matches!(cycle_to_sequence(3, 2, &[0, 2, 4]), Err(Error::NotHamiltonian(_))));
    }

    #[test]
    fn directed_undirected_maps() {
        let c = sequence_to_cycle(3, 1, &vec![Permutation::identity(1); 3]).unwrap();
        let u = directed_to_undirected(1, &c);
        let (g, _) = gen_tsp_graph(3, 1).unwrap();
        assert!(is_hamiltonian_cycle(&g, &u));
        assert_eq!(undirected_to_directed(1, &u).unwrap(), c);
    }

    #[test]
    fn nice_content_small() {
        let (g, _) = gen_dst_graph(2, 1).unwrap();
        // v11 -> v12 -> v22 -> v21 -> v11
        let cyc = vec![0, 1, 3, 2];
        assert!(is_hamiltonian_cycle(&g, &cyc));
        let seq = nice_cycle_content(2, 1, &cyc).unwrap();
        let sw = Permutation::from_cycles(2, &[&[1, 2]]).unwrap();
        assert_eq!(seq[0], sw);
        assert_eq!(seq[2], sw);
        assert_eq!(seq[1], Permutation::identity(2));
    }

    #[test]
    fn not_nice_detected() {
        let (g, _) = gen_dst_graph(3, 2).unwrap();
        // Column 1 walked as a path uses three in-column edges.
        let c1: Vec<usize> = (0..4).collect();
        let cyc: Vec<usize> = c1.iter().chain(&[4, 8, 5, 9, 10, 6, 11, 7]).copied().collect();
        assert!(is_hamiltonian_cycle(&g, &cyc));
        assert!(matches!(nice_cycle_content(3, 2, &cyc), Err(Error::NotNice(_))));
    }

    #[test]
    fn sampler_outputs_nice_cycles() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let c = sample_nice_cycle(3, 2, &mut rng).unwrap();
            nice_cycle_content(3, 2, &c).unwrap();
        }
        assert_eq!(sample_nice_cycle_seeded(4, 3, 9).unwrap(), sample_nice_cycle_seeded(4, 3, 9).unwrap());
    }

    #[test]
    fn formulas() {
        assert_eq!(count_formulas(CountFamily::DtspCycles, 3, 2).unwrap(), 4);
        assert_eq!(count_formulas(CountFamily::DtspCycles, 3, 3).unwrap(), 72);
        assert_eq!(count_formulas(CountFamily::DstNiceCycles, 3, 2).unwrap(), 6912);
        assert_eq!(count_formulas(CountFamily::DstNiceCycles, 2, 1).unwrap(), 4);
        assert!(matches!(count_formulas(CountFamily::DstSequences, 40, 20), Err(Error::Overflow(_))));
    }

    #[test]
    fn completions_small() {
        let sw = Permutation::from_cycles(2, &[&[1, 2]]).unwrap();
        let fixed = vec![Some(sw), None, None, None];
        assert_eq!(count_sequence_completions(4, 2, &fixed).unwrap(), 4);
    }
}
