//! Rectangle machinery for circuit lower bounds: balanced decompositions of
//! circuits, above/below polynomials, thin set-rectangles in G_k,
//! monochromatic layers and the DTSP rectangle-size bound.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{div_monomials, mul_monomials, to_monomial, Circuit, Gate, GateId, IndexMonomial, IndexPoly};
use crate::error::{Error, Result};
use crate::graph::{all_assignments, canonical_solution, dst_layer_of, dtsp_vertex, gen_dtsp_graph, gen_is_graph, GraphInstance, IsGraph};
use crate::poly::{Monomial, Polynomial, VariableId};

/// A pair of polynomials whose product lies inside a target polynomial.
/// `gate` names the circuit gate the pair was read off, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRectangle {
    pub gate: Option<GateId>,
    pub g: Polynomial,
    pub h: Polynomial,
}

impl PolyRectangle {
    pub fn new(g: Polynomial, h: Polynomial) -> Self {
        PolyRectangle { gate: None, g, h }
    }

    /// Distinct monomials of g·h.
    pub fn product(&self) -> Polynomial {
        self.g.mul(&self.h)
    }

    pub fn is_rectangle_in(&self, f: &Polynomial) -> bool {
        self.g.iter().all(|a| self.h.iter().all(|b| f.contains(&a.mul(b))))
    }

    /// Whether both sides touch at most two thirds of `x`.
    pub fn is_balanced(&self, x: &[VariableId]) -> bool {
        let (a, b) = balance_counts(&self.g, &self.h, x);
        3 * a <= 2 * x.len() && 3 * b <= 2 * x.len()
    }
}

fn balance_counts(g: &Polynomial, h: &Polynomial, x: &[VariableId]) -> (usize, usize) {
    let (sg, sh) = (g.support(), h.support());
    (x.iter().filter(|v| sg.contains(*v)).count(), x.iter().filter(|v| sh.contains(*v)).count())
}

/// Splits the polynomial of a homogeneous circuit into at most `size(c)`
/// rectangles, each touching at most two thirds of `x` on either side.
///
/// Every monomial is followed down one parse tree, always into the Sum
/// child whose polynomial touches more of `x`, until the gate's polynomial
/// touches at most two thirds of `x`. The gate then contributes the
/// rectangle (contexts collected there) · (its polynomial).
pub fn decompose_balanced(c: &Circuit, x: &[VariableId], cap: usize) -> Result<Vec<PolyRectangle>> {
    let polys = c.extract_gates(cap)?;
    let universe = polys.universe().to_vec();
    let f = polys.indexed(c.output()).expect("output is live");
    if f.windows(2).any(|w| w[0].len() != w[1].len()) {
        return Err(Error::NotHomogeneous);
    }
    let mut in_x = vec![false; universe.len()];
    let support: BTreeSet<u32> = f.iter().flat_map(|m| m.iter().copied()).collect();
    for v in x {
        match universe.binary_search(v) {
            Ok(i) if support.contains(&(i as u32)) => in_x[i] = true,
            _ => return Err(Error::InvalidParams(format!("{v} is not in the support of the polynomial"))),
        }
    }
    let limit = 2 * x.len();
    let touches = |p: &IndexPoly| -> usize {
        p.iter().flat_map(|m| m.iter()).filter(|&&i| in_x[i as usize]).collect::<BTreeSet<_>>().len()
    };
    let mut sx: HashMap<GateId, usize> = HashMap::new();
    let mut sx_of = |g: GateId| *sx.entry(g).or_insert_with(|| touches(polys.indexed(g).unwrap()));

    let mut contexts: BTreeMap<GateId, BTreeSet<IndexMonomial>> = BTreeMap::new();
    for m in f {
        let (mut w, mut mw, mut ctx): (GateId, IndexMonomial, IndexMonomial) = (c.output(), m.clone(), Box::default());
        while 3 * sx_of(w) > limit {
            match *c.gate(w) {
                Gate::Input(_) | Gate::Const0 => break,
                Gate::Ext(l, r) => {
                    let has = |g: GateId| polys.indexed(g).unwrap().binary_search(&mw).is_ok();
                    w = if has(l.min(r)) { l.min(r) } else { l.max(r) };
                }
                Gate::Sum(l, r) => {
                    let (pl, pr) = (polys.indexed(l).unwrap(), polys.indexed(r).unwrap());
                    let (ml, mr) = pl
                        .iter()
                        .find_map(|a| {
                            let b = div_monomials(&mw, a)?;
                            pr.binary_search(&b).is_ok().then(|| (a.clone(), b))
                        })
                        .expect("monomial has a parse tree");
                    let (sl, sr) = (sx_of(l), sx_of(r));
                    let go_left = sl > sr || (sl == sr && l <= r);
                    let (next, here, other) = if go_left { (l, ml, mr) } else { (r, mr, ml) };
                    ctx = mul_monomials(&ctx, &other);
                    w = next;
                    mw = here;
                }
            }
        }
        contexts.entry(w).or_default().insert(ctx);
    }
    let mut out = Vec::with_capacity(contexts.len());
    for (w, ctxs) in contexts {
        let g: Polynomial = ctxs.iter().map(|m| to_monomial(m, &universe)).collect();
        let h = polys.polynomial(w);
        let rect = PolyRectangle { gate: Some(w), g, h };
        if !rect.is_balanced(x) {
            let (a, b) = balance_counts(&rect.g, &rect.h, x);
            return Err(Error::NotBalanced(format!(
                "gate {w}: sides touch {a} and {b} of {} designated variables",
                x.len()
            )));
        }
        out.push(rect);
    }
    Ok(out)
}

/// Summary of the checks a balanced decomposition must pass.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub rectangles: usize,
    pub gates: usize,
    pub all_balanced: bool,
    pub all_inside: bool,
    pub union_matches: bool,
    pub max_side_touch: usize,
    pub designated: usize,
}

impl DecompositionReport {
    pub fn ok(&self) -> bool {
        self.rectangles <= self.gates && self.all_balanced && self.all_inside && self.union_matches
    }
}

/// Re-checks a decomposition by expanding every product against `f`.
pub fn check_decomposition(
    c: &Circuit,
    f: &Polynomial,
    x: &[VariableId],
    rects: &[PolyRectangle],
) -> DecompositionReport {
    let mut union = Polynomial::new();
    let mut all_inside = true;
    let mut max_side_touch = 0;
    for r in rects {
        let p = r.product();
        all_inside &= p.iter().all(|m| f.contains(m));
        let (a, b) = balance_counts(&r.g, &r.h, x);
        max_side_touch = max_side_touch.max(a).max(b);
        union = union.add(&p);
    }
    DecompositionReport {
        rectangles: rects.len(),
        gates: c.size(),
        all_balanced: rects.iter().all(|r| r.is_balanced(x)),
        all_inside,
        union_matches: union == *f,
        max_side_touch,
        designated: x.len(),
    }
}

/// B_w: the polynomial computed at gate `w`.
pub fn below(c: &Circuit, w: GateId, cap: usize) -> Result<Polynomial> {
    c.with_output(w)?.extract_polynomial(cap)
}

/// A_w: every multilinear m with m·B_w ⊆ f, found among the quotients of
/// monomials of f by monomials of B_w.
pub fn above(c: &Circuit, w: GateId, f: &Polynomial, cap: usize) -> Result<Polynomial> {
    if !f.is_multilinear() {
        return Err(Error::NotMultilinear);
    }
    let b = below(c, w, cap)?;
    let mut candidates = BTreeSet::new();
    for m in f.iter() {
        for bm in b.iter() {
            if let Some(q) = m.div(bm) {
                candidates.insert(q);
            }
        }
    }
    Ok(candidates
        .into_iter()
        .filter(|q| q.is_multilinear() && b.iter().all(|bm| f.contains(&q.mul(bm))))
        .collect())
}

/// Gates (reaching the output) where A_w·B_w ⊄ f; empty when the circuit
/// calculates f.
pub fn above_below_violations(c: &Circuit, f: &Polynomial, cap: usize) -> Result<Vec<GateId>> {
    let live = c.reachable();
    let mut bad = Vec::new();
    for w in (0..c.size()).filter(|&w| live[w]) {
        let a = above(c, w, f, cap)?;
        let b = below(c, w, cap)?;
        if !a.mul(&b).iter().all(|m| f.contains(m)) {
            bad.push(w);
        }
    }
    Ok(bad)
}

// ---------------------------------------------------------------------------
// Set rectangles in G_k.

/// Families of vertex sets of G_k (vertex indices).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetRectangle {
    pub side_a: Vec<Vec<usize>>,
    pub side_b: Vec<Vec<usize>>,
}

/// Largest k whose G_k fits in 128-bit vertex masks.
pub const MAX_THIN_K: usize = 3;

/// Bitmask view of G_k with its canonical solutions.
pub struct ThinChecker {
    pub gk: IsGraph,
    adj: Vec<u128>,
    canonical: HashSet<u128>,
    canonical_list: Vec<u128>,
    order: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usefulness {
    pub useful_a: Vec<usize>,
    pub useful_b: Vec<usize>,
}

impl Usefulness {
    pub fn is_thin(&self) -> bool {
        self.useful_a.len().min(self.useful_b.len()) <= 1
    }
}

fn mask_of(vs: &[usize]) -> u128 {
    vs.iter().fold(0, |m, &v| m | 1u128 << v)
}

fn members(mut m: u128) -> Vec<usize> {
    let mut out = Vec::new();
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

impl ThinChecker {
    pub fn new(k: usize) -> Result<Self> {
        if k > MAX_THIN_K {
            return Err(Error::ScaleExceeded(format!("thinness checks support k <= {MAX_THIN_K}")));
        }
        let gk = gen_is_graph(k)?;
        let n = gk.graph.vertex_count();
        let adj = (0..n).map(|v| mask_of(&gk.graph.neighbors(v))).collect();
        let canonical_list: Vec<u128> = all_assignments(k)
            .iter()
            .map(|a| canonical_solution(&gk, a).map(|s| mask_of(&s)))
            .collect::<Result<_>>()?;
        let order = gk.decomposition.first_bag_order(n);
        Ok(ThinChecker { canonical: canonical_list.iter().copied().collect(), canonical_list, adj, order, gk })
    }

    pub fn canonical_masks(&self) -> &[u128] {
        &self.canonical_list
    }

    fn independent(&self, s: u128) -> bool {
        members(s).into_iter().all(|v| self.adj[v] & s == 0)
    }

    fn nbhd(&self, s: u128) -> u128 {
        members(s).into_iter().fold(0, |m, v| m | self.adj[v])
    }

    /// Disjoint and non-adjacent.
    fn compatible(&self, a: u128, b: u128) -> bool {
        a & b == 0 && self.nbhd(a) & b == 0
    }

    pub fn is_rectangle(&self, a: &[u128], b: &[u128]) -> bool {
        a.iter().chain(b).all(|&s| self.independent(s)) && a.iter().all(|&x| b.iter().all(|&y| self.compatible(x, y)))
    }

    pub fn contains_canonical(&self, a: &[u128], b: &[u128]) -> bool {
        a.iter().any(|&x| b.iter().any(|&y| self.canonical.contains(&(x | y))))
    }

    pub fn usefulness(&self, a: &[u128], b: &[u128]) -> Result<Usefulness> {
        if !self.is_rectangle(a, b) {
            return Err(Error::NotARectangle("sides are not disjoint, non-adjacent independent sets".into()));
        }
        let useful = |xs: &[u128], ys: &[u128]| {
            (0..xs.len()).filter(|&i| ys.iter().any(|&y| self.canonical.contains(&(xs[i] | y)))).collect()
        };
        Ok(Usefulness { useful_a: useful(a, b), useful_b: useful(b, a) })
    }

    /// Thinness of a rectangle known to contain a canonical solution.
    pub fn check(&self, a: &[u128], b: &[u128]) -> Result<bool> {
        let u = self.usefulness(a, b)?;
        if u.useful_a.is_empty() {
            return Err(Error::PreconditionUnmet("rectangle contains no canonical solution".into()));
        }
        Ok(u.is_thin())
    }

    /// Mask of the first `t` vertices in decomposition order.
    pub fn prefix_mask(&self, t: usize) -> u128 {
        mask_of(&self.order[..t])
    }

    pub fn vertex_count(&self) -> usize {
        self.order.len()
    }
}

fn to_masks(sets: &[Vec<usize>], n: usize) -> Result<Vec<u128>> {
    sets.iter()
        .map(|s| match s.iter().find(|&&v| v >= n) {
            Some(&v) => Err(Error::IndexOutOfRange { index: v, dim: n }),
            None => Ok(mask_of(s)),
        })
        .collect()
}

/// Vertex sets, one list per rectangle side.
pub type SidePair = (Vec<Vec<usize>>, Vec<Vec<usize>>);

/// Members of each side that complete to a canonical solution with some
/// member of the other side.
pub fn useful_sets(r: &SetRectangle, k: usize) -> Result<SidePair> {
    let tc = ThinChecker::new(k)?;
    let n = tc.vertex_count();
    let (a, b) = (to_masks(&r.side_a, n)?, to_masks(&r.side_b, n)?);
    let u = tc.usefulness(&a, &b)?;
    let pick = |sides: &[Vec<usize>], idx: &[usize]| idx.iter().map(|&i| sides[i].clone()).collect();
    Ok((pick(&r.side_a, &u.useful_a), pick(&r.side_b, &u.useful_b)))
}

/// True iff one side has at most one useful set.
pub fn check_thin(r: &SetRectangle, k: usize) -> Result<bool> {
    let tc = ThinChecker::new(k)?;
    let n = tc.vertex_count();
    tc.check(&to_masks(&r.side_a, n)?, &to_masks(&r.side_b, n)?)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThinReport {
    pub k: usize,
    pub rectangles: u64,
    pub skipped: u64,
    pub violations: u64,
    pub first_violation: Option<SetRectangle>,
}

impl ThinReport {
    fn record(&mut self, tc: &ThinChecker, a: &[u128], b: &[u128]) {
        self.rectangles += 1;
        if !tc.check(a, b).expect("checked rectangle with a canonical solution") {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(SetRectangle {
                    side_a: a.iter().map(|&m| members(m)).collect(),
                    side_b: b.iter().map(|&m| members(m)).collect(),
                });
            }
        }
    }
}

fn small_subsets(xs: &[u128], max: usize) -> Vec<Vec<u128>> {
    let mut out: Vec<Vec<u128>> = xs.iter().map(|&x| vec![x]).collect();
    if max >= 2 {
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                out.push(vec![xs[i], xs[j]]);
            }
        }
    }
    out
}

/// Every rectangle whose sides are sets of at most two prefix (resp.
/// suffix) restrictions of canonical solutions, over all cut positions.
/// Pairs that are not rectangles or hold no canonical solution are skipped.
pub fn exhaustive_thin_check(k: usize) -> Result<ThinReport> {
    let tc = ThinChecker::new(k)?;
    let mut rep = ThinReport { k, ..Default::default() };
    for t in 0..=tc.vertex_count() {
        let p = tc.prefix_mask(t);
        let dedup = |mask: u128| -> Vec<u128> {
            tc.canonical_masks().iter().map(|&c| c & mask).collect::<BTreeSet<_>>().into_iter().collect()
        };
        let (pre, suf) = (dedup(p), dedup(!p));
        for a in small_subsets(&pre, 2) {
            for b in small_subsets(&suf, 2) {
                if tc.is_rectangle(&a, &b) && tc.contains_canonical(&a, &b) {
                    rep.record(&tc, &a, &b);
                } else {
                    rep.skipped += 1;
                }
            }
        }
    }
    Ok(rep)
}

/// Random rectangles around a split canonical solution: both sides start
/// from its prefix/suffix at a random cut and grow by mutated restrictions
/// of canonical solutions (10% vertex flips, repaired to independence) that
/// stay compatible with the other side.
pub fn sampled_thin_check(k: usize, samples: u64, seed: u64) -> Result<ThinReport> {
    let tc = ThinChecker::new(k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = tc.vertex_count();
    let mut rep = ThinReport { k, ..Default::default() };
    let canon = tc.canonical_masks();
    for _ in 0..samples {
        let t = rng.random_range(1..n);
        let region = [tc.prefix_mask(t), !tc.prefix_mask(t) & ((1u128 << n) - 1)];
        let base = canon[rng.random_range(0..canon.len())];
        let mut sides = [vec![base & region[0]], vec![base & region[1]]];
        let extra = rng.random_range(1..=6);
        for _ in 0..extra {
            let side = rng.random_range(0..2);
            let mut cand = canon[rng.random_range(0..canon.len())] & region[side];
            for v in members(region[side]) {
                if rng.random_bool(0.1) {
                    cand ^= 1 << v;
                }
            }
            let mut vs = members(cand);
            vs.shuffle(&mut rng);
            for v in vs {
                if cand & tc.adj[v] != 0 {
                    cand &= !(1u128 << v);
                }
            }
            if sides[side].contains(&cand) {
                continue;
            }
            if sides[1 - side].iter().all(|&o| tc.compatible(cand, o)) {
                sides[side].push(cand);
            } else {
                rep.skipped += 1;
            }
        }
        rep.record(&tc, &sides[0], &sides[1]);
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// Layers.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LayerClass {
    MonoG,
    MonoH,
    Mixed,
    /// Neither side uses the layer.
    Untouched,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerReport {
    pub layer: usize,
    pub class: LayerClass,
    pub g_vars: usize,
    pub h_vars: usize,
    /// A layer variable used by neither side, if one exists.
    pub absent: Option<VariableId>,
}

pub fn monochromatic_layers(r: &PolyRectangle, layers: &[Vec<VariableId>]) -> Vec<LayerReport> {
    let (sg, sh) = (r.g.support(), r.h.support());
    layers
        .iter()
        .enumerate()
        .map(|(i, layer)| {
            let g_vars = layer.iter().filter(|v| sg.contains(*v)).count();
            let h_vars = layer.iter().filter(|v| sh.contains(*v)).count();
            let class = match (g_vars > 0, h_vars > 0) {
                (true, true) => LayerClass::Mixed,
                (true, false) => LayerClass::MonoG,
                (false, true) => LayerClass::MonoH,
                (false, false) => LayerClass::Untouched,
            };
            let absent = layer.iter().find(|v| !sg.contains(*v) && !sh.contains(*v)).cloned();
            LayerReport { layer: i, class, g_vars, h_vars, absent }
        })
        .collect()
}

/// Edge variables of G_{n,k} grouped by the column of their tail.
pub fn dtsp_layers(g: &GraphInstance, n: usize, k: usize) -> Vec<Vec<VariableId>> {
    let mut layers = vec![Vec::new(); n];
    for &(u, v) in g.edges() {
        layers[u / k].push(g.edge_var(u, v));
    }
    layers
}

/// Edge variables of H_{n,k} between consecutive columns, for the n−1
/// inter-column layers in order.
pub fn dst_layers(g: &GraphInstance, n: usize, k: usize) -> Vec<Vec<VariableId>> {
    let mut layers = vec![Vec::new(); n - 1];
    for &(u, v) in g.edges() {
        if let Some(l) = dst_layer_of(n, k, u, v).filter(|&l| (1..n).contains(&l)) {
            layers[l - 1].push(g.edge_var(u, v));
        }
    }
    layers
}

/// One designated edge per layer of G_{n,k}: first row to first row.
pub fn dtsp_designated(g: &GraphInstance, n: usize, k: usize) -> Vec<VariableId> {
    (0..n).map(|c| g.edge_var(dtsp_vertex(k, c, 0), dtsp_vertex(k, (c + 1) % n, 0))).collect()
}

/// One designated edge per inter-column layer of H_{n,k}.
pub fn dst_designated(g: &GraphInstance, n: usize, k: usize) -> Vec<VariableId> {
    (0..n - 1).map(|c| g.edge_var(crate::graph::dst_vertex(k, c, 0), crate::graph::dst_vertex(k, c + 1, 0))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixedLayerCount {
    pub layer: usize,
    pub g_heads: usize,
    pub h_heads: usize,
    pub matchings: usize,
    pub limit: u128,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DtspBoundReport {
    pub n: usize,
    pub k: usize,
    pub ck: usize,
    pub product_size: usize,
    pub bound: f64,
    pub holds: bool,
    pub mixed_layers: Vec<MixedLayerCount>,
}

impl DtspBoundReport {
    pub fn ok(&self) -> bool {
        self.holds && self.mixed_layers.iter().all(|m| m.ok)
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Bound on a balanced rectangle of DTSP on G_{n,k}:
/// (k−1)!·(k!)^(n−1)·(2k ln k)/C_k.
pub fn dtsp_rect_bound(n: usize, k: usize, ck: usize) -> f64 {
    let kf = k as f64;
    factorial(k - 1) as f64 * (factorial(k) as f64).powi(n as i32 - 1) * 2.0 * kf * kf.ln() / ck as f64
}

/// Whether the arcs form one directed cycle through every vertex.
fn is_directed_tour(nv: usize, arcs: &[(usize, usize)]) -> bool {
    if arcs.len() != nv {
        return false;
    }
    let mut succ = vec![usize::MAX; nv];
    let mut indeg = vec![0; nv];
    for &(u, v) in arcs {
        if succ[u] != usize::MAX {
            return false;
        }
        succ[u] = v;
        indeg[v] += 1;
    }
    if indeg.iter().any(|&d| d != 1) {
        return false;
    }
    let (mut v, mut steps) = (0, 0);
    loop {
        v = succ[v];
        steps += 1;
        if v == 0 {
            return steps == nv;
        }
    }
}

/// Checks the size bound on one rectangle of DTSP on G_{n,k}, together
/// with the head-group matching counts on its mixed layers.
pub fn check_rectangle_bound_dtsp(r: &PolyRectangle, n: usize, k: usize, ck: usize) -> Result<DtspBoundReport> {
    let (g, _) = gen_dtsp_graph(n, k)?;
    let x = dtsp_designated(&g, n, k);
    if !r.is_balanced(&x) {
        return Err(Error::NotBalanced("rectangle touches more than two thirds of the designated edges".into()));
    }
    let arc_of: HashMap<VariableId, (usize, usize)> = g.edges().iter().map(|&(u, v)| (g.edge_var(u, v), (u, v))).collect();
    let arcs = |m: &Monomial| -> Option<Vec<(usize, usize)>> { m.support().map(|x| arc_of.get(x).copied()).collect() };
    let product = r.product();
    for m in product.iter() {
        match arcs(m) {
            Some(a) if m.is_multilinear() && is_directed_tour(g.vertex_count(), &a) => {}
            _ => return Err(Error::NotARectangle(format!("{m} is not a Hamiltonian cycle"))),
        }
    }
    let layers = dtsp_layers(&g, n, k);
    let mut mixed_layers = Vec::new();
    for rep in monochromatic_layers(r, &layers) {
        if rep.class != LayerClass::Mixed {
            continue;
        }
        let heads = |p: &Polynomial| -> BTreeSet<usize> {
            let s = p.support();
            layers[rep.layer].iter().filter(|v| s.contains(*v)).map(|v| arc_of[v].1).collect()
        };
        let (gh, hh) = (heads(&r.g), heads(&r.h));
        let matchings: BTreeSet<Vec<(usize, usize)>> = product
            .iter()
            .map(|m| arcs(m).unwrap().into_iter().filter(|&(u, _)| u / k == rep.layer).collect())
            .collect();
        let limit = factorial(gh.len()) * factorial(hh.len());
        let ok = (matchings.len() as u128) <= limit && limit <= factorial(k - 1);
        mixed_layers.push(MixedLayerCount { layer: rep.layer, g_heads: gh.len(), h_heads: hh.len(), matchings: matchings.len(), limit, ok });
    }
    let bound = dtsp_rect_bound(n, k, ck);
    Ok(DtspBoundReport { n, k, ck, product_size: product.len(), bound, holds: product.len() as f64 <= bound, mixed_layers })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{CircuitBuilder, DEFAULT_CAP};
    use crate::dp::{compile_dst_pw, compile_held_karp, compile_tsp_pw};
    use crate::graph::{complete_digraph, gen_dst_graph};
    use crate::poly::Flavor;

    fn mono(vs: &[&str]) -> Monomial {
        Monomial::product_of(vs.iter().copied())
    }

    fn poly(ms: &[&[&str]]) -> Polynomial {
        ms.iter().map(|m| mono(m)).collect()
    }

    fn vars(vs: &[&str]) -> Vec<VariableId> {
        vs.iter().map(|&v| VariableId::new(v)).collect()
    }

    #[test]
    fn single_product() {
        let mut b = CircuitBuilder::new(Flavor::MaxPlus);
        let (x, y) = (b.input("x"), b.input("y"));
        let s = b.sum(x, y);
        let c = b.finish(s);
        let rs = decompose_balanced(&c, &vars(&["x", "y"]), DEFAULT_CAP).unwrap();
        assert_eq!(rs.len(), 1);
        let r = &rs[0];
        let sides = [r.g.clone(), r.h.clone()];
        assert!(sides.contains(&poly(&[&["x"]])) && sides.contains(&poly(&[&["y"]])));
    }

    #[test]
    fn two_products() {
        let mut b = CircuitBuilder::new(Flavor::MaxPlus);
        let (x, y, z) = (b.input("x"), b.input("y"), b.input("z"));
        let e = b.ext(y, z);
        let s = b.sum(x, e);
        let c = b.finish(s);
        let f = poly(&[&["x", "y"], &["x", "z"]]);
        let x3 = vars(&["x", "y", "z"]);
        let rs = decompose_balanced(&c, &x3, DEFAULT_CAP).unwrap();
        assert!(rs.len() <= 3);
        assert!(check_decomposition(&c, &f, &x3, &rs).ok());
    }

    #[test]
    fn non_homogeneous_rejected() {
        let mut b = CircuitBuilder::new(Flavor::MaxPlus);
        let (x, y) = (b.input("x"), b.input("y"));
        let s = b.sum(x, y);
        let e = b.ext(s, x);
        let c = b.finish(e);
        assert!(matches!(decompose_balanced(&c, &vars(&["x"]), DEFAULT_CAP), Err(Error::NotHomogeneous)));
    }

    #[test]
    fn held_karp_and_dtsp_decompose() {
        let c = compile_held_karp(4).unwrap();
        let g = complete_digraph(4).unwrap();
        let x: Vec<VariableId> = (0..4).map(|i| g.edge_var(i, (i + 1) % 4)).collect();
        let f = c.extract_polynomial(DEFAULT_CAP).unwrap();
        let rs = decompose_balanced(&c, &x, DEFAULT_CAP).unwrap();
        assert!(check_decomposition(&c, &f, &x, &rs).ok());

        let (g, d) = gen_dtsp_graph(3, 2).unwrap();
        let c = compile_tsp_pw(&g, &d, true).unwrap();
        let x = dtsp_designated(&g, 3, 2);
        let f = c.extract_polynomial(DEFAULT_CAP).unwrap();
        let rs = decompose_balanced(&c, &x, DEFAULT_CAP).unwrap();
        assert!(check_decomposition(&c, &f, &x, &rs).ok());
    }

    #[test]
    fn above_below_examples() {
        let mut b = CircuitBuilder::new(Flavor::MaxPlus);
        let (x, y, z) = (b.input("x"), b.input("y"), b.input("z"));
        let e = b.ext(y, z);
        let s = b.sum(x, e);
        let c = b.finish(s);
        let f = poly(&[&["x", "y"], &["x", "z"]]);
        assert_eq!(above(&c, s, &f, DEFAULT_CAP).unwrap(), poly(&[&[]]));
        assert_eq!(below(&c, s, DEFAULT_CAP).unwrap(), f);
        assert_eq!(below(&c, x, DEFAULT_CAP).unwrap(), poly(&[&["x"]]));
        assert_eq!(above(&c, y, &f, DEFAULT_CAP).unwrap(), poly(&[&["x"]]));
        assert!(above_below_violations(&c, &f, DEFAULT_CAP).unwrap().is_empty());
    }

    #[test]
    fn thin_examples() {
        let tc = ThinChecker::new(2).unwrap();
        let i0 = members(tc.canonical_masks()[0]);
        let r = SetRectangle { side_a: vec![i0.clone()], side_b: vec![vec![]] };
        let (ua, ub) = useful_sets(&r, 2).unwrap();
        assert_eq!((ua, ub), (vec![i0.clone()], vec![vec![]]));
        assert!(check_thin(&r, 2).unwrap());

        let none = SetRectangle { side_a: vec![vec![]], side_b: vec![vec![]] };
        let (ua, ub) = useful_sets(&none, 2).unwrap();
        assert!(ua.is_empty() && ub.is_empty());
        assert!(matches!(check_thin(&none, 2), Err(Error::PreconditionUnmet(_))));

        let p = tc.prefix_mask(9);
        let c0 = tc.canonical_masks()[0];
        let split = SetRectangle { side_a: vec![members(c0 & p)], side_b: vec![members(c0 & !p)] };
        let (ua, ub) = useful_sets(&split, 2).unwrap();
        assert_eq!((ua.len(), ub.len()), (1, 1));

        let bad = SetRectangle { side_a: vec![vec![0]], side_b: vec![vec![1]] };
        assert!(matches!(check_thin(&bad, 2), Err(Error::NotARectangle(_))));
    }

    #[test]
    fn two_prefixes_one_suffix() {
        let tc = ThinChecker::new(2).unwrap();
        let canon = tc.canonical_masks().to_vec();
        let mut found = 0;
        for t in 0..=tc.vertex_count() {
            let p = tc.prefix_mask(t);
            for i in 0..canon.len() {
                for j in 0..canon.len() {
                    let a = [canon[i] & p, canon[j] & p];
                    let b = [canon[i] & !p];
                    if a[0] == a[1] || !tc.is_rectangle(&a, &b) {
                        continue;
                    }
                    let u = tc.usefulness(&a, &b).unwrap();
                    assert!(u.is_thin());
                    assert_eq!(u.useful_b.len(), 1);
                    found += 1;
                }
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn exhaustive_and_sampled_thin() {
        let rep = exhaustive_thin_check(2).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.rectangles > 0);
        let sampled = sampled_thin_check(2, 2000, 7).unwrap();
        assert_eq!(sampled.violations, 0);
        assert_eq!(sampled.rectangles, 2000);
        assert_eq!(sampled_thin_check(3, 200, 1).unwrap().violations, 0);
    }

    #[test]
    fn layers() {
        let r = PolyRectangle::new(poly(&[&["x"]]), poly(&[&["y"]]));
        let rep = monochromatic_layers(&r, &[vars(&["x", "a"]), vars(&["y"])]);
        assert_eq!(rep[0].class, LayerClass::MonoG);
        assert_eq!(rep[0].absent, Some(VariableId::new("a")));
        assert_eq!(rep[1].class, LayerClass::MonoH);
        let mixed = monochromatic_layers(&r, &[vars(&["x", "y"])]);
        assert_eq!(mixed[0].class, LayerClass::Mixed);
    }

    #[test]
    fn dst_mixed_layers_have_absent_edge() {
        let (g, d) = gen_dst_graph(3, 1).unwrap();
        let c = compile_dst_pw(&g, &d).unwrap();
        let x = dst_designated(&g, 3, 1);
        let rs = decompose_balanced(&c, &x, DEFAULT_CAP).unwrap();
        let layers = dst_layers(&g, 3, 1);
        for r in &rs {
            for l in monochromatic_layers(r, &layers) {
                if l.class == LayerClass::Mixed {
                    assert!(l.absent.is_some());
                }
            }
        }
    }

    #[test]
    fn dtsp_bound() {
        let (g, d) = gen_dtsp_graph(4, 2).unwrap();
        let c = compile_tsp_pw(&g, &d, true).unwrap();
        let rs = decompose_balanced(&c, &dtsp_designated(&g, 4, 2), DEFAULT_CAP).unwrap();
        for r in &rs {
            assert!(check_rectangle_bound_dtsp(r, 4, 2, 2).unwrap().ok());
        }
        let x = dtsp_designated(&g, 4, 2);
        let f = c.extract_polynomial(DEFAULT_CAP).unwrap();
        let whole = PolyRectangle::new(f, poly(&[&[]]));
        assert!(!whole.is_balanced(&x));
        assert!(matches!(check_rectangle_bound_dtsp(&whole, 4, 2, 2), Err(Error::NotBalanced(_))));
    }
}
