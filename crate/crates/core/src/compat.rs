//! Matching compatibility matrices and their rectangle covers.
//!
//! `Bipartite(k)` is indexed by `S_k`, with a one at `(ρ1, ρ2)` when `ρ2 ρ1`
//! is a single `k`-cycle. `Clique(k)` is indexed by the fixed-point-free
//! involutions of `[2k]`, with a one when `ρ2 ρ1` splits into two `k`-cycles.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{compose, enumerate_all, enumerate_class, factorial, ClassSpec, Permutation};

/// Largest dimension for exact rectangle and cover search.
pub const EXACT_DIM: usize = 120;
/// Largest dimension for greedy covering.
pub const GREEDY_DIM: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "variant", content = "k", rename_all = "snake_case")]
pub enum Variant {
    Bipartite(usize),
    Clique(usize),
}

impl Variant {
    pub fn k(self) -> usize {
        match self {
            Variant::Bipartite(k) | Variant::Clique(k) => k,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CompatMatrix {
    variant: Variant,
    indices: Vec<Permutation>,
    lookup: HashMap<Permutation, usize>,
    rows: Vec<FixedBitSet>,
    cols: Vec<FixedBitSet>,
}

pub fn build_matrix(variant: Variant) -> Result<CompatMatrix> {
    let (indices, target) = match variant {
        Variant::Bipartite(k) => {
            if k == 0 {
                return Err(Error::InvalidK(k));
            }
            if k > 5 {
                return Err(Error::ScaleExceeded(format!("bipartite order {k} exceeds 5")));
            }
            (enumerate_all(k)?, ClassSpec::SingleCycle)
        }
        Variant::Clique(k) => {
            if k == 0 {
                return Err(Error::InvalidK(k));
            }
            if k > 5 {
                return Err(Error::ScaleExceeded(format!("clique order {k} exceeds 5")));
            }
            (enumerate_class(2 * k, &ClassSpec::AllTwoCycles)?, ClassSpec::TwoKCycles)
        }
    };
    let dim = indices.len();
    let mut rows = vec![FixedBitSet::with_capacity(dim); dim];
    let mut cols = vec![FixedBitSet::with_capacity(dim); dim];
    for (i, r1) in indices.iter().enumerate() {
        for (j, r2) in indices.iter().enumerate() {
            if target.contains(&compose(r2, r1)?) {
                rows[i].insert(j);
                cols[j].insert(i);
            }
        }
    }
    let lookup = indices.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    Ok(CompatMatrix { variant, indices, lookup, rows, cols })
}

impl CompatMatrix {
    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[Permutation] {
        &self.indices
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.lookup.get(p).copied()
    }

    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    pub fn row(&self, i: usize) -> &FixedBitSet {
        &self.rows[i]
    }

    pub fn col(&self, j: usize) -> &FixedBitSet {
        &self.cols[j]
    }

    pub fn ones(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    /// Every 1-entry as `(row, col)`, row-major.
    pub fn one_entries(&self) -> Vec<(usize, usize)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.ones().map(move |j| (i, j)))
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.dim()).map(|i| (0..self.dim()).map(|j| self.entry(i, j) as u8).collect()).collect()
    }

    pub fn is_rectangle(&self, r: &Rectangle) -> Result<bool> {
        let dim = self.dim();
        if let Some(&index) = r.rows.iter().chain(&r.cols).find(|&&x| x >= dim) {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        Ok(r.rows.iter().all(|&i| r.cols.iter().all(|&j| self.entry(i, j))))
    }

    /// True iff every rectangle is all-ones and every 1-entry is covered.
    pub fn is_cover(&self, cover: &[Rectangle]) -> Result<bool> {
        let mut covered = vec![FixedBitSet::with_capacity(self.dim()); self.dim()];
        for r in cover {
            if !self.is_rectangle(r)? {
                return Ok(false);
            }
            for &i in &r.rows {
                for &j in &r.cols {
                    covered[i].insert(j);
                }
            }
        }
        Ok(self.rows.iter().zip(&covered).all(|(ones, cov)| ones.is_subset(cov)))
    }

    /// Common columns of a row set (all columns when empty).
    fn common_cols(&self, rows: &FixedBitSet) -> FixedBitSet {
        let mut c = FixedBitSet::with_capacity(self.dim());
        c.insert_range(..);
        for i in rows.ones() {
            c.intersect_with(&self.rows[i]);
        }
        c
    }

    fn common_rows(&self, cols: &FixedBitSet) -> FixedBitSet {
        let mut r = FixedBitSet::with_capacity(self.dim());
        r.insert_range(..);
        for j in cols.ones() {
            r.intersect_with(&self.cols[j]);
        }
        r
    }

    /// All inclusion-maximal rectangles with nonempty sides, ordered by
    /// column set then row set.
    pub fn maximal_rectangles(&self) -> Result<Vec<Rectangle>> {
        if self.dim() > EXACT_DIM {
            return Err(Error::ScaleExceeded(format!(
                "exact search needs dimension ≤ {EXACT_DIM}, got {}",
                self.dim()
            )));
        }
        let n = self.dim();
        let mut all_rows = FixedBitSet::with_capacity(n);
        all_rows.insert_range(..);
        let top_cols = self.common_cols(&all_rows);
        let mut out = Vec::new();
        self.close_by_one(all_rows, top_cols, 0, &mut out);
        out.sort();
        Ok(out)
    }

    fn close_by_one(&self, rows: FixedBitSet, cols: FixedBitSet, start: usize, out: &mut Vec<Rectangle>) {
        if rows.count_ones(..) > 0 && cols.count_ones(..) > 0 {
            out.push(Rectangle { rows: rows.ones().collect(), cols: cols.ones().collect() });
        }
        for j in start..self.dim() {
            if cols.contains(j) {
                continue;
            }
            let mut next_rows = rows.clone();
            next_rows.intersect_with(&self.cols[j]);
            if next_rows.is_clear() {
                continue;
            }
            let next_cols = self.common_cols(&next_rows);
            // Canonicity: the closure may not add columns before j.
            let canonical = (0..j).all(|x| next_cols.contains(x) == cols.contains(x));
            if canonical {
                self.close_by_one(next_rows, next_cols, j + 1, out);
            }
        }
    }

    /// A largest rectangle; among those, the one with the least row set.
    pub fn max_rectangle(&self) -> Result<Rectangle> {
        let all = self.maximal_rectangles()?;
        all.into_iter()
            .min_by(|a, b| b.size().cmp(&a.size()).then_with(|| a.rows.cmp(&b.rows)))
            .ok_or_else(|| Error::NotARectangle("matrix has no 1-entries".into()))
    }

    /// Exact minimum cover by branch and bound over maximal rectangles.
    pub fn min_cover(&self, budget: Duration) -> Result<CoverResult> {
        let rects = self.maximal_rectangles()?;
        let entries = self.one_entries();
        let entry_index: HashMap<(usize, usize), usize> =
            entries.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let sets: Vec<FixedBitSet> = rects
            .iter()
            .map(|r| {
                let mut s = FixedBitSet::with_capacity(entries.len());
                for &i in &r.rows {
                    for &j in &r.cols {
                        s.insert(entry_index[&(i, j)]);
                    }
                }
                s
            })
            .collect();
        let mut containing: Vec<Vec<usize>> = vec![Vec::new(); entries.len()];
        for (s, set) in sets.iter().enumerate() {
            for e in set.ones() {
                containing[e].push(s);
            }
        }
        // Greedy rectangles are closed, hence maximal: seed the incumbent.
        let greedy = self.greedy_cover()?;
        let set_of: HashMap<&Rectangle, usize> = rects.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let incumbent: Option<Vec<usize>> = greedy.iter().map(|r| set_of.get(r).copied()).collect();
        let mut search = CoverSearch {
            sets: &sets,
            containing: &containing,
            best_len: incumbent.as_ref().map_or(usize::MAX, Vec::len),
            best: incumbent,
            deadline: Instant::now() + budget,
            timed_out: false,
            nodes: 0,
        };
        let mut uncovered = FixedBitSet::with_capacity(entries.len());
        uncovered.insert_range(..);
        let forbidden = FixedBitSet::with_capacity(sets.len());
        let mut chosen = Vec::new();
        search.run(&uncovered, &forbidden, &mut chosen);
        let optimal = !search.timed_out;
        let rectangles = match search.best {
            Some(ids) => ids.into_iter().map(|s| rects[s].clone()).collect(),
            None => greedy,
        };
        Ok(CoverResult { rectangles, optimal, nodes: search.nodes })
    }

    /// Deterministic greedy cover: seed at the row with most uncovered ones,
    /// add rows while that increases the uncovered area, then close up to a
    /// maximal rectangle.
    pub fn greedy_cover(&self) -> Result<Vec<Rectangle>> {
        let n = self.dim();
        if n > GREEDY_DIM {
            return Err(Error::ScaleExceeded(format!("greedy cover needs dimension ≤ {GREEDY_DIM}")));
        }
        let mut uncovered: Vec<FixedBitSet> = self.rows.clone();
        let mut out = Vec::new();
        loop {
            let seed = (0..n)
                .map(|i| (uncovered[i].count_ones(..), i))
                .filter(|&(c, _)| c > 0)
                .min_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            let Some((_, seed)) = seed else { break };
            let mut rows = FixedBitSet::with_capacity(n);
            rows.insert(seed);
            let mut cols = self.rows[seed].clone();
            let gain_of = |rows: &FixedBitSet, cols: &FixedBitSet, unc: &[FixedBitSet]| -> usize {
                rows.ones().map(|i| unc[i].intersection(cols).count()).sum()
            };
            let mut current = gain_of(&rows, &cols, &uncovered);
            loop {
                let mut best: Option<(usize, usize)> = None;
                for i in 0..n {
                    if rows.contains(i) {
                        continue;
                    }
                    let mut c = cols.clone();
                    c.intersect_with(&self.rows[i]);
                    if c.is_clear() {
                        continue;
                    }
                    let mut r = rows.clone();
                    r.insert(i);
                    let g = gain_of(&r, &c, &uncovered);
                    if g > current && best.is_none_or(|(bg, _)| g > bg) {
                        best = Some((g, i));
                    }
                }
                let Some((g, i)) = best else { break };
                rows.insert(i);
                cols.intersect_with(&self.rows[i]);
                current = g;
            }
            let rows = self.common_rows(&cols);
            let cols = self.common_cols(&rows);
            for i in rows.ones() {
                uncovered[i].difference_with(&cols);
            }
            out.push(Rectangle { rows: rows.ones().collect(), cols: cols.ones().collect() });
        }
        Ok(out)
    }
}

struct CoverSearch<'a> {
    sets: &'a [FixedBitSet],
    containing: &'a [Vec<usize>],
    best: Option<Vec<usize>>,
    best_len: usize,
    deadline: Instant,
    timed_out: bool,
    nodes: u64,
}

impl CoverSearch<'_> {
    fn run(&mut self, uncovered: &FixedBitSet, forbidden: &FixedBitSet, chosen: &mut Vec<usize>) {
        if self.timed_out {
            return;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(4096) && Instant::now() > self.deadline {
            self.timed_out = true;
            return;
        }
        if uncovered.is_clear() {
            if chosen.len() < self.best_len {
                self.best_len = chosen.len();
                self.best = Some(chosen.clone());
            }
            return;
        }
        if chosen.len() + self.lower_bound(uncovered, forbidden) >= self.best_len {
            return;
        }
        // Branch on the uncovered entry with the fewest allowed rectangles.
        let mut pick: Option<(usize, usize)> = None;
        for e in uncovered.ones() {
            let c = self.containing[e].iter().filter(|&&s| !forbidden.contains(s)).count();
            if c == 0 {
                return;
            }
            if pick.is_none_or(|(pc, _)| c < pc) {
                pick = Some((c, e));
            }
        }
        let (_, e) = pick.unwrap();
        let mut options: Vec<(usize, usize)> = self.containing[e]
            .iter()
            .filter(|&&s| !forbidden.contains(s))
            .map(|&s| (self.sets[s].intersection(uncovered).count(), s))
            .collect();
        options.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut forbidden = forbidden.clone();
        for (_, s) in options {
            let mut rest = uncovered.clone();
            rest.difference_with(&self.sets[s]);
            chosen.push(s);
            self.run(&rest, &forbidden, chosen);
            chosen.pop();
            forbidden.insert(s);
            if self.timed_out {
                return;
            }
        }
    }

    /// Larger of two bounds: entries no two of which share an allowed
    /// rectangle each need their own, and the uncovered area divided by the
    /// largest allowed rectangle.
    fn lower_bound(&self, uncovered: &FixedBitSet, forbidden: &FixedBitSet) -> usize {
        let widest = (0..self.sets.len())
            .filter(|&s| !forbidden.contains(s))
            .map(|s| self.sets[s].intersection(uncovered).count())
            .max()
            .unwrap_or(0);
        if widest == 0 {
            return usize::MAX / 2;
        }
        let area = uncovered.count_ones(..).div_ceil(widest);
        let mut order: Vec<(usize, usize)> = uncovered
            .ones()
            .map(|e| (self.containing[e].iter().filter(|&&s| !forbidden.contains(s)).count(), e))
            .collect();
        order.sort_unstable();
        let mut blocked = FixedBitSet::with_capacity(uncovered.len());
        let mut count = 0;
        for (_, e) in order {
            if blocked.contains(e) {
                continue;
            }
            count += 1;
            for &s in &self.containing[e] {
                if !forbidden.contains(s) {
                    blocked.union_with(&self.sets[s]);
                }
            }
        }
        count.max(area)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rectangle {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Rectangle {
    pub fn new(mut rows: Vec<usize>, mut cols: Vec<usize>) -> Self {
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        Rectangle { rows, cols }
    }

    pub fn size(&self) -> usize {
        self.rows.len() * self.cols.len()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverResult {
    pub rectangles: Vec<Rectangle>,
    pub optimal: bool,
    pub nodes: u64,
}

impl CoverResult {
    pub fn len(&self) -> usize {
        self.rectangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rectangles.is_empty()
    }
}

/// `μ_{α,β}(ρ1, ρ2) = (α ρ1 β, β⁻¹ ρ2 α⁻¹)`.
pub fn mu(
    alpha: &Permutation,
    beta: &Permutation,
    rho1: &Permutation,
    rho2: &Permutation,
) -> Result<(Permutation, Permutation)> {
    let a = compose(alpha, &compose(rho1, beta)?)?;
    let b = compose(&beta.inverse(), &compose(rho2, &alpha.inverse())?)?;
    Ok((a, b))
}

/// Number of rectangle images used by the randomized construction.
pub fn randomized_cover_length(k: usize, rect_size: usize) -> usize {
    let kf = k as f64;
    let ratio = (factorial(k) * factorial(k - 1)) as f64 / rect_size as f64;
    ((ratio * 2.0 * kf * kf.ln()).ceil() as usize).max(1)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RandomizedCover {
    pub seed: u64,
    pub ell: usize,
    pub rectangles: Vec<Rectangle>,
    pub uncovered: usize,
    pub covers: bool,
}

/// Random conjugate images of one rectangle of `Bipartite(k)`.
pub fn randomized_cover_from_rectangle(
    m: &CompatMatrix,
    r: &Rectangle,
    seed: u64,
) -> Result<RandomizedCover> {
    let Variant::Bipartite(k) = m.variant else {
        return Err(Error::InvalidParams("randomized cover needs a bipartite matrix".into()));
    };
    if k < 2 {
        return Err(Error::InvalidK(k));
    }
    if r.size() == 0 || !m.is_rectangle(r)? {
        return Err(Error::NotARectangle("input is not a nonempty all-ones submatrix".into()));
    }
    let ell = randomized_cover_length(k, r.size());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut covered = vec![FixedBitSet::with_capacity(m.dim()); m.dim()];
    let mut rectangles = Vec::with_capacity(ell);
    let beta_id = Permutation::identity(k);
    for _ in 0..ell {
        let alpha = Permutation::random(k, &mut rng);
        let beta = Permutation::random(k, &mut rng);
        let rows = r
            .rows
            .iter()
            .map(|&i| {
                let (img, _) = mu(&alpha, &beta, &m.indices[i], &beta_id)?;
                Ok(m.lookup[&img])
            })
            .collect::<Result<Vec<_>>>()?;
        let cols = r
            .cols
            .iter()
            .map(|&j| {
                let (_, img) = mu(&alpha, &beta, &beta_id, &m.indices[j])?;
                Ok(m.lookup[&img])
            })
            .collect::<Result<Vec<_>>>()?;
        let image = Rectangle::new(rows, cols);
        if !m.is_rectangle(&image)? {
            return Err(Error::NotARectangle("conjugate image lost the all-ones property".into()));
        }
        for &i in &image.rows {
            for &j in &image.cols {
                covered[i].insert(j);
            }
        }
        rectangles.push(image);
    }
    let uncovered = m
        .rows
        .iter()
        .zip(&covered)
        .map(|(ones, cov)| ones.difference(cov).count())
        .sum();
    Ok(RandomizedCover { seed, ell, rectangles, uncovered, covers: uncovered == 0 })
}

/// Whether every element of `c` is sent outside `c`.
pub fn in_sc(rho: &Permutation, c: &[usize]) -> bool {
    let mut in_c = vec![false; rho.len()];
    for &x in c {
        in_c[x] = true;
    }
    ClassSpec::AllTwoCycles.contains(rho) && c.iter().all(|&x| !in_c[rho.apply(x)])
}

/// Maps a rectangle of `Clique(k)` whose permutations all separate `c`
/// (0-based, `|c| = k`) to a rectangle of `Bipartite(k)`.
pub fn embed_clique_rectangle(
    clique: &CompatMatrix,
    bip: &CompatMatrix,
    r: &Rectangle,
    c: &[usize],
) -> Result<Rectangle> {
    let (Variant::Clique(k), Variant::Bipartite(k2)) = (clique.variant, bip.variant) else {
        return Err(Error::InvalidParams("expected a clique and a bipartite matrix".into()));
    };
    if k != k2 {
        return Err(Error::InvalidK(k2));
    }
    let mut cs: Vec<usize> = c.to_vec();
    cs.sort_unstable();
    cs.dedup();
    if cs.len() != k || cs.iter().any(|&x| x >= 2 * k) {
        return Err(Error::InvalidParams(format!("C must be a {k}-subset of the {}-point domain", 2 * k)));
    }
    let ds: Vec<usize> = (0..2 * k).filter(|x| !cs.contains(x)).collect();
    let mut pos = vec![0usize; 2 * k];
    for (i, &x) in cs.iter().enumerate() {
        pos[x] = i;
    }
    for (i, &x) in ds.iter().enumerate() {
        pos[x] = i;
    }
    let dim = clique.dim();
    if let Some(&index) = r.rows.iter().chain(&r.cols).find(|&&x| x >= dim) {
        return Err(Error::IndexOutOfRange { index, dim });
    }
    // d⁻¹ ρ c on rows, c⁻¹ ρ d on columns.
    let map = |rho: &Permutation, from: &[usize]| -> Result<usize> {
        if !in_sc(rho, &cs) {
            return Err(Error::NotInSc);
        }
        let img: Vec<u8> = from.iter().map(|&x| pos[rho.apply(x)] as u8).collect();
        Ok(bip.lookup[&Permutation::new(img)?])
    };
    let rows = r.rows.iter().map(|&i| map(&clique.indices[i], &cs)).collect::<Result<Vec<_>>>()?;
    let cols = r.cols.iter().map(|&j| map(&clique.indices[j], &ds)).collect::<Result<Vec<_>>>()?;
    Ok(Rectangle::new(rows, cols))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// `k!(k−1)! / C_k · 2k ln k`.
pub fn bipartite_bound(k: usize, ck: usize) -> f64 {
    let kf = k as f64;
    (factorial(k) * factorial(k - 1)) as f64 / ck as f64 * 2.0 * kf * kf.ln()
}

/// `(2k−1)! / C_k · 2k ln k`.
pub fn clique_bound(k: usize, ck: usize) -> f64 {
    let kf = k as f64;
    factorial(2 * k - 1) as f64 / ck as f64 * 2.0 * kf * kf.ln()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SizeBoundReport {
    pub variant: Variant,
    pub ck: usize,
    pub max_rectangle: usize,
    pub bound: f64,
    pub holds: bool,
    /// Clique only: the summed bound with `k ln k` in place of `2k ln k`.
    pub tight_bound: Option<f64>,
    /// Clique only: largest bipartite image over all separating sets `C`.
    pub largest_embedded_piece: Option<usize>,
    /// Clique only: every embedded piece is a bipartite rectangle within the
    /// bipartite bound.
    pub pieces_ok: Option<bool>,
}

/// Checks the largest rectangle of `m` against the size bound for the exact
/// cover number `ck` of `Bipartite(k)`.
pub fn check_size_bound(m: &CompatMatrix, ck: usize) -> Result<SizeBoundReport> {
    let k = m.variant.k();
    let best = m.max_rectangle()?;
    match m.variant {
        Variant::Bipartite(_) => {
            let bound = bipartite_bound(k, ck);
            Ok(SizeBoundReport {
                variant: m.variant,
                ck,
                max_rectangle: best.size(),
                bound,
                holds: best.size() as f64 <= bound,
                tight_bound: None,
                largest_embedded_piece: None,
                pieces_ok: None,
            })
        }
        Variant::Clique(_) => {
            let bip = build_matrix(Variant::Bipartite(k))?;
            let bip_bound = bipartite_bound(k, ck);
            let mut largest = 0;
            let mut pieces_ok = true;
            let mut total = 0;
            for c in k_subsets(2 * k, k) {
                let piece = Rectangle {
                    rows: best.rows.iter().copied().filter(|&i| in_sc(&m.indices[i], &c)).collect(),
                    cols: best.cols.iter().copied().filter(|&j| in_sc(&m.indices[j], &c)).collect(),
                };
                let image = embed_clique_rectangle(m, &bip, &piece, &c)?;
                pieces_ok &= image.size() == piece.size()
                    && bip.is_rectangle(&image)?
                    && image.size() as f64 <= bip_bound;
                largest = largest.max(image.size());
                total += piece.size();
            }
            // Each entry is counted once per separating labelling, i.e. twice.
            pieces_ok &= total == 2 * best.size();
            let bound = clique_bound(k, ck);
            Ok(SizeBoundReport {
                variant: m.variant,
                ck,
                max_rectangle: best.size(),
                bound,
                holds: best.size() as f64 <= bound && pieces_ok,
                tight_bound: Some(bound / 2.0),
                largest_embedded_piece: Some(largest),
                pieces_ok: Some(pieces_ok),
            })
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverTableRow {
    pub k: usize,
    pub dimension: usize,
    pub ones: usize,
    pub ck: usize,
    pub optimal: bool,
    pub max_rectangle: usize,
    pub bound: f64,
}

pub fn cover_table(ks: &[usize], budget: Duration) -> Result<Vec<CoverTableRow>> {
    ks.iter()
        .map(|&k| {
            let m = build_matrix(Variant::Bipartite(k))?;
            let cover = m.min_cover(budget)?;
            let max_rectangle = m.max_rectangle()?.size();
            Ok(CoverTableRow {
                k,
                dimension: m.dim(),
                ones: m.ones(),
                ck: cover.len(),
                optimal: cover.optimal,
                max_rectangle,
                bound: bipartite_bound(k, cover.len()),
            })
        })
        .collect()
}

pub fn cover_table_csv(rows: &[CoverTableRow]) -> String {
    let mut s = String::from("k,dimension,ones,C_k,max_rect,bound\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{},{:.4}", r.k, r.dimension, r.ones, r.ck, r.max_rectangle, r.bound);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(n: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(n, cycles).unwrap()
    }

    #[test]
    fn small_matrices() {
        let b2 = build_matrix(Variant::Bipartite(2)).unwrap();
        assert_eq!(b2.to_dense(), vec![vec![0, 1], vec![1, 0]]);
        let c2 = build_matrix(Variant::Clique(2)).unwrap();
        assert_eq!(c2.to_dense(), vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
        let b3 = build_matrix(Variant::Bipartite(3)).unwrap();
        assert_eq!(b3.dim(), 6);
        assert!((0..6).all(|i| b3.row(i).count_ones(..) == 2));
        assert_eq!(b3.ones(), 12);
        assert!(matches!(build_matrix(Variant::Bipartite(6)), Err(Error::ScaleExceeded(_))));
    }

    #[test]
    fn row_sums() {
        for k in 1..=4 {
            let m = build_matrix(Variant::Bipartite(k)).unwrap();
            let want = factorial(k - 1) as usize;
            assert!((0..m.dim()).all(|i| m.row(i).count_ones(..) == want));
        }
        for k in 2..=4 {
            let m = build_matrix(Variant::Clique(k)).unwrap();
            let want = crate::perm::double_factorial(2 * k - 2) as usize;
            assert!((0..m.dim()).all(|i| m.row(i).count_ones(..) == want));
        }
    }

    #[test]
    fn rectangle_checks() {
        let b3 = build_matrix(Variant::Bipartite(3)).unwrap();
        assert!(b3.is_rectangle(&Rectangle::default()).unwrap());
        let id = b3.index_of(&Permutation::identity(3)).unwrap();
        let c = b3.index_of(&perm(3, &[&[1, 2, 3]])).unwrap();
        assert!(b3.is_rectangle(&Rectangle::new(vec![id, c], vec![c])).unwrap());
        assert!(!b3.is_rectangle(&Rectangle::new(vec![id], vec![id])).unwrap());
        assert!(matches!(
            b3.is_rectangle(&Rectangle::new(vec![9], vec![0])),
            Err(Error::IndexOutOfRange { index: 9, dim: 6 })
        ));
    }

    #[test]
    fn max_rectangles() {
        let b2 = build_matrix(Variant::Bipartite(2)).unwrap();
        assert_eq!(b2.max_rectangle().unwrap().size(), 1);
        let c2 = build_matrix(Variant::Clique(2)).unwrap();
        let r = c2.max_rectangle().unwrap();
        assert_eq!(r.size(), 2);
        assert_eq!(r.rows, vec![0]);
    }

    #[test]
    fn maximal_rectangles_are_maximal() {
        let m = build_matrix(Variant::Bipartite(3)).unwrap();
        for r in m.maximal_rectangles().unwrap() {
            assert!(m.is_rectangle(&r).unwrap());
            for i in (0..m.dim()).filter(|i| !r.rows.contains(i)) {
                assert!(!r.cols.iter().all(|&j| m.entry(i, j)));
            }
            for j in (0..m.dim()).filter(|j| !r.cols.contains(j)) {
                assert!(!r.rows.iter().all(|&i| m.entry(i, j)));
            }
        }
    }

    #[test]
    fn exact_covers() {
        let day = Duration::from_secs(60);
        let c1 = build_matrix(Variant::Bipartite(1)).unwrap().min_cover(day).unwrap();
        assert_eq!((c1.len(), c1.optimal), (1, true));
        let m2 = build_matrix(Variant::Bipartite(2)).unwrap();
        let c2 = m2.min_cover(day).unwrap();
        assert_eq!((c2.len(), c2.optimal), (2, true));
        assert!(m2.is_cover(&c2.rectangles).unwrap());
        let k2 = build_matrix(Variant::Clique(2)).unwrap();
        let cc = k2.min_cover(day).unwrap();
        assert!(k2.is_cover(&cc.rectangles).unwrap());
        assert_eq!(cc.len(), 3);
    }

    #[test]
    fn exact_cover_is_deterministic() {
        let m = build_matrix(Variant::Bipartite(3)).unwrap();
        let a = m.min_cover(Duration::from_secs(60)).unwrap();
        let b = m.min_cover(Duration::from_secs(60)).unwrap();
        assert!(a.optimal);
        assert_eq!(a.rectangles, b.rectangles);
        assert!(m.is_cover(&a.rectangles).unwrap());
    }

    #[test]
    fn greedy_covers_are_valid() {
        for v in [Variant::Bipartite(2), Variant::Bipartite(3), Variant::Bipartite(4), Variant::Clique(3)] {
            let m = build_matrix(v).unwrap();
            let g = m.greedy_cover().unwrap();
            assert!(m.is_cover(&g).unwrap());
        }
        let b2 = build_matrix(Variant::Bipartite(2)).unwrap();
        assert_eq!(b2.greedy_cover().unwrap().len(), 2);
    }

    #[test]
    fn mu_identity_and_preservation() {
        let m = build_matrix(Variant::Bipartite(3)).unwrap();
        let id = Permutation::identity(3);
        for (i, j) in m.one_entries() {
            let (a, b) = mu(&id, &id, &m.indices()[i], &m.indices()[j]).unwrap();
            assert_eq!((a, b), (m.indices()[i].clone(), m.indices()[j].clone()));
        }
        let alpha = perm(3, &[&[1, 2]]);
        let beta = perm(3, &[&[1, 3, 2]]);
        for i in 0..6 {
            for j in 0..6 {
                let (a, b) = mu(&alpha, &beta, &m.indices()[i], &m.indices()[j]).unwrap();
                let (a, b) = (m.index_of(&a).unwrap(), m.index_of(&b).unwrap());
                assert_eq!(m.entry(i, j), m.entry(a, b));
            }
        }
    }

    #[test]
    fn randomized_cover_runs() {
        let m = build_matrix(Variant::Bipartite(3)).unwrap();
        let r = m.max_rectangle().unwrap();
        let found = (0..10).any(|seed| randomized_cover_from_rectangle(&m, &r, seed).unwrap().covers);
        assert!(found);
        let a = randomized_cover_from_rectangle(&m, &r, 7).unwrap();
        let b = randomized_cover_from_rectangle(&m, &r, 7).unwrap();
        assert_eq!(a.rectangles, b.rectangles);
        let bad = Rectangle::new(vec![0], vec![0]);
        assert!(matches!(randomized_cover_from_rectangle(&m, &bad, 1), Err(Error::NotARectangle(_))));
    }

    #[test]
    fn clique_embedding_example() {
        let clique = build_matrix(Variant::Clique(2)).unwrap();
        let bip = build_matrix(Variant::Bipartite(2)).unwrap();
        let r1 = clique.index_of(&perm(4, &[&[1, 3], &[2, 4]])).unwrap();
        let r2 = clique.index_of(&perm(4, &[&[1, 4], &[2, 3]])).unwrap();
        assert!(clique.entry(r1, r2));
        let img = embed_clique_rectangle(&clique, &bip, &Rectangle::new(vec![r1], vec![r2]), &[0, 1]).unwrap();
        assert_eq!(img.size(), 1);
        assert_eq!(bip.indices()[img.rows[0]], Permutation::identity(2));
        assert_eq!(bip.indices()[img.cols[0]], perm(2, &[&[1, 2]]));
        assert!(bip.entry(img.rows[0], img.cols[0]));

        let r0 = clique.index_of(&perm(4, &[&[1, 2], &[3, 4]])).unwrap();
        let bad = Rectangle::new(vec![r0], vec![r2]);
        assert!(matches!(embed_clique_rectangle(&clique, &bip, &bad, &[0, 1]), Err(Error::NotInSc)));
    }

    #[test]
    fn each_clique_entry_has_two_labellings() {
        for k in 2..=3 {
            let m = build_matrix(Variant::Clique(k)).unwrap();
            let subsets = k_subsets(2 * k, k);
            for (i, j) in m.one_entries() {
                let n = subsets
                    .iter()
                    .filter(|c| in_sc(&m.indices()[i], c) && in_sc(&m.indices()[j], c))
                    .count();
                assert_eq!(n, 2);
            }
        }
    }

    #[test]
    fn size_bounds_small() {
        let b2 = build_matrix(Variant::Bipartite(2)).unwrap();
        let rep = check_size_bound(&b2, 2).unwrap();
        assert!(rep.holds && rep.max_rectangle == 1);
        let c2 = build_matrix(Variant::Clique(2)).unwrap();
        let rep = check_size_bound(&c2, 2).unwrap();
        assert!(rep.holds, "{rep:?}");
    }

    #[test]
    fn csv_header() {
        let rows = cover_table(&[1, 2], Duration::from_secs(10)).unwrap();
        let csv = cover_table_csv(&rows);
        assert!(csv.starts_with("k,dimension,ones,C_k,max_rect,bound\n1,1,1,1,1,"));
        assert!(csv.contains("\n2,2,2,2,1,"));
    }

    #[test]
    fn subsets() {
        assert_eq!(k_subsets(4, 2).len(), 6);
        assert_eq!(k_subsets(4, 2)[0], vec![0, 1]);
    }
}
