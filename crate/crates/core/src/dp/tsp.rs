use std::collections::BTreeMap;

use crate::circuit::{Circuit, CircuitBuilder, GateId};
use crate::dp::{check_width, merge, sweep_events, CompileStats, Event};
use crate::error::{Error, Result};
use crate::graph::{GraphInstance, PathDecomposition};
use crate::poly::Flavor;

pub const MAX_TSP_WIDTH: usize = 8;

const NONE: u32 = u32::MAX;
const IN: u8 = 1;
const OUT: u8 = 2;

/// Partial solution: a set of vertex-disjoint paths covering every vertex
/// seen so far, or a single closed cycle. Entries follow the sorted list of
/// present vertices. `partner` links the two endpoints of each open path
/// (an untouched vertex is its own partner); interior vertices hold NONE.
/// In the undirected case `flags` stores the degree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct State {
    flags: Vec<u8>,
    partner: Vec<u32>,
    closed: bool,
}

struct Sweep<'a> {
    g: &'a GraphInstance,
    directed: bool,
    present: Vec<usize>,
}

impl Sweep<'_> {
    fn pos(&self, v: usize) -> usize {
        self.present.binary_search(&v).expect("present vertex")
    }

    fn full(&self, f: u8) -> bool {
        if self.directed {
            f == IN | OUT
        } else {
            f == 2
        }
    }

    /// Applies the edge u→v (or {u,v}); None if it is not allowed.
    fn take(&self, s: &State, u: usize, v: usize, may_close: bool) -> Option<State> {
        if s.closed {
            return None;
        }
        let (pu, pv) = (self.pos(u), self.pos(v));
        let (fu, fv) = (s.flags[pu], s.flags[pv]);
        if self.directed {
            if fu & OUT != 0 || fv & IN != 0 {
                return None;
            }
        } else if fu >= 2 || fv >= 2 {
            return None;
        }
        let mut t = s.clone();
        if self.directed {
            t.flags[pu] |= OUT;
            t.flags[pv] |= IN;
        } else {
            t.flags[pu] += 1;
            t.flags[pv] += 1;
        }
        if s.partner[pu] == v as u32 {
            // Closing the only remaining path into the tour.
            let others_full = (0..t.flags.len())
                .filter(|&i| i != pu && i != pv)
                .all(|i| self.full(t.flags[i]));
            if !may_close || !others_full {
                return None;
            }
            t.partner.iter_mut().for_each(|p| *p = NONE);
            t.closed = true;
            return Some(t);
        }
        let (a, b) = (s.partner[pu], s.partner[pv]);
        for p in [pu, pv] {
            if self.full(t.flags[p]) {
                t.partner[p] = NONE;
            }
        }
        let (pa, pb) = (self.pos(a as usize), self.pos(b as usize));
        t.partner[pa] = b;
        t.partner[pb] = a;
        Some(t)
    }
}

/// Min-plus circuit for the (directed) travelling salesman polynomial of `g`.
pub fn compile_tsp_pw(g: &GraphInstance, d: &PathDecomposition, directed: bool) -> Result<Circuit> {
    Ok(compile_tsp_pw_with_stats(g, d, directed)?.0)
}

pub fn compile_tsp_pw_with_stats(
    g: &GraphInstance,
    d: &PathDecomposition,
    directed: bool,
) -> Result<(Circuit, CompileStats)> {
    if directed != g.is_directed() {
        return Err(Error::InvalidParams(format!(
            "graph is {}directed but a {}directed tour was requested",
            if g.is_directed() { "" } else { "un" },
            if directed { "" } else { "un" }
        )));
    }
    if g.vertex_count() < 3 {
        return Err(Error::InvalidParams("need at least 3 vertices".into()));
    }
    let (width, events) = sweep_events(g, d)?;
    check_width(width, MAX_TSP_WIDTH)?;
    let n = g.vertex_count();
    let mut b = CircuitBuilder::new(Flavor::MinPlus);
    let mut sw = Sweep { g, directed, present: Vec::new() };
    let mut table: BTreeMap<State, GateId> = BTreeMap::new();
    table.insert(State { flags: vec![], partner: vec![], closed: false }, b.const0());
    let mut stats = CompileStats { bags: d.bags.len(), width, events: events.len(), ..Default::default() };
    let mut introduced = 0;
    for ev in &events {
        match *ev {
            Event::Introduce(v) => {
                introduced += 1;
                let at = sw.present.partition_point(|&u| u < v);
                sw.present.insert(at, v);
                table = table
                    .into_iter()
                    .map(|(mut s, gate)| {
                        s.flags.insert(at, 0);
                        s.partner.insert(at, v as u32);
                        (s, gate)
                    })
                    .collect();
                let may_close = introduced == n;
                let arcs: Vec<(usize, usize)> = sw
                    .present
                    .iter()
                    .filter(|&&u| u != v)
                    .flat_map(|&u| {
                        let mut a = Vec::new();
                        if directed {
                            if sw.g.has_edge(u, v) {
                                a.push((u, v));
                            }
                            if sw.g.has_edge(v, u) {
                                a.push((v, u));
                            }
                        } else if sw.g.has_edge(u, v) {
                            a.push((u, v));
                        }
                        a
                    })
                    .collect();
                for (x, y) in arcs {
                    let var = b.input(g.edge_var(x, y));
                    let mut next = BTreeMap::new();
                    for (s, gate) in table {
                        if let Some(t) = sw.take(&s, x, y, may_close) {
                            let taken = b.sum(gate, var);
                            merge(&mut b, &mut next, t, taken);
                        }
                        merge(&mut b, &mut next, s, gate);
                    }
                    table = next;
                }
            }
            Event::Forget(v) => {
                let at = sw.pos(v);
                let mut next = BTreeMap::new();
                for (mut s, gate) in table {
                    if !sw.full(s.flags[at]) {
                        continue;
                    }
                    s.flags.remove(at);
                    s.partner.remove(at);
                    merge(&mut b, &mut next, s, gate);
                }
                sw.present.remove(at);
                table = next;
            }
        }
        stats.states_per_event.push(table.len());
    }
    stats.max_states = stats.states_per_event.iter().copied().max().unwrap_or(1);
    let out = table
        .get(&State { flags: vec![], partner: vec![], closed: true })
        .copied()
        .ok_or(Error::NoHamiltonianCycle)?;
    stats.gates = b.len();
    let circuit = b.finish_with_universe(out, g.edge_vars())?;
    Ok((circuit, stats))
}
