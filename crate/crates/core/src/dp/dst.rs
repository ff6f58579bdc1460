use std::collections::BTreeMap;

use crate::circuit::{Circuit, CircuitBuilder, GateId};
use crate::dp::{check_width, merge, sweep_events, CompileStats, Event};
use crate::error::{Error, Result};
use crate::graph::{GraphInstance, PathDecomposition};
use crate::poly::Flavor;

pub const MAX_DST_WIDTH: usize = 7;

/// Partial solution: a forest of out-trees covering every vertex seen so
/// far. `comp` labels the present vertices by tree (normalized to first
/// occurrence order), `parent` marks vertices that already have an incoming
/// arc, and `root_seen` records that a parentless vertex was forgotten.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct State {
    comp: Vec<u8>,
    parent: Vec<bool>,
    root_seen: bool,
}

impl State {
    fn normalize(&mut self) {
        let mut map = [u8::MAX; 64];
        let mut next = 0;
        for c in self.comp.iter_mut() {
            if map[*c as usize] == u8::MAX {
                map[*c as usize] = next;
                next += 1;
            }
            *c = map[*c as usize];
        }
    }
}

/// Min-plus circuit for the spanning out-tree polynomial of a directed graph.
pub fn compile_dst_pw(g: &GraphInstance, d: &PathDecomposition) -> Result<Circuit> {
    Ok(compile_dst_pw_with_stats(g, d)?.0)
}

pub fn compile_dst_pw_with_stats(g: &GraphInstance, d: &PathDecomposition) -> Result<(Circuit, CompileStats)> {
    if !g.is_directed() {
        return Err(Error::InvalidParams("out-trees need a directed graph".into()));
    }
    let (width, events) = sweep_events(g, d)?;
    check_width(width, MAX_DST_WIDTH)?;
    let n = g.vertex_count();
    let mut b = CircuitBuilder::new(Flavor::MinPlus);
    let mut present: Vec<usize> = Vec::new();
    let mut table: BTreeMap<State, GateId> = BTreeMap::new();
    table.insert(State { comp: vec![], parent: vec![], root_seen: false }, b.const0());
    let mut stats = CompileStats { bags: d.bags.len(), width, events: events.len(), ..Default::default() };
    let mut introduced = 0;
    for ev in &events {
        match *ev {
            Event::Introduce(v) => {
                introduced += 1;
                let at = present.partition_point(|&u| u < v);
                present.insert(at, v);
                let fresh = present.len() as u8;
                table = table
                    .into_iter()
                    .map(|(mut s, gate)| {
                        s.comp.insert(at, fresh);
                        s.parent.insert(at, false);
                        s.normalize();
                        (s, gate)
                    })
                    .collect();
                let mut arcs = Vec::new();
                for &u in present.iter().filter(|&&u| u != v) {
                    if g.has_edge(u, v) {
                        arcs.push((u, v));
                    }
                    if g.has_edge(v, u) {
                        arcs.push((v, u));
                    }
                }
                for (x, y) in arcs {
                    let (px, py) = (present.binary_search(&x).unwrap(), present.binary_search(&y).unwrap());
                    let var = b.input(g.edge_var(x, y));
                    let mut next = BTreeMap::new();
                    for (s, gate) in table {
                        if !s.parent[py] && s.comp[px] != s.comp[py] {
                            let mut t = s.clone();
                            let (keep, gone) = (s.comp[px], s.comp[py]);
                            t.comp.iter_mut().filter(|c| **c == gone).for_each(|c| *c = keep);
                            t.parent[py] = true;
                            t.normalize();
                            let taken = b.sum(gate, var);
                            merge(&mut b, &mut next, t, taken);
                        }
                        merge(&mut b, &mut next, s, gate);
                    }
                    table = next;
                }
            }
            Event::Forget(v) => {
                let at = present.binary_search(&v).unwrap();
                let last_call = introduced == n && present.len() == 1;
                let mut next = BTreeMap::new();
                for (mut s, gate) in table {
                    let alone = s.comp.iter().filter(|&&c| c == s.comp[at]).count() == 1;
                    if alone && !last_call {
                        continue;
                    }
                    if !s.parent[at] {
                        if s.root_seen {
                            continue;
                        }
                        s.root_seen = true;
                    }
                    s.comp.remove(at);
                    s.parent.remove(at);
                    s.normalize();
                    merge(&mut b, &mut next, s, gate);
                }
                present.remove(at);
                table = next;
            }
        }
        stats.states_per_event.push(table.len());
    }
    stats.max_states = stats.states_per_event.iter().copied().max().unwrap_or(1);
    let out = table
        .get(&State { comp: vec![], parent: vec![], root_seen: true })
        .copied()
        .ok_or(Error::NotConnected)?;
    stats.gates = b.len();
    let circuit = b.finish_with_universe(out, g.edge_vars())?;
    Ok((circuit, stats))
}
