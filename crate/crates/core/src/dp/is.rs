use std::collections::BTreeMap;

use crate::circuit::{Circuit, CircuitBuilder};
use crate::dp::{check_width, merge, sweep_events, CompileStats, Event};
use crate::error::Result;
use crate::graph::{GraphInstance, PathDecomposition};
use crate::poly::Flavor;

pub const MAX_IS_WIDTH: usize = 20;

/// Max-plus circuit for the independent-set polynomial; the state is the
/// chosen subset of the bag.
pub fn compile_is(g: &GraphInstance, d: &PathDecomposition) -> Result<Circuit> {
    Ok(compile_is_with_stats(g, d)?.0)
}

pub fn compile_is_with_stats(g: &GraphInstance, d: &PathDecomposition) -> Result<(Circuit, CompileStats)> {
    let (width, events) = sweep_events(g, d)?;
    check_width(width, MAX_IS_WIDTH)?;
    let mut b = CircuitBuilder::new(Flavor::MaxPlus);
    let mut table: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    table.insert(Vec::new(), b.const0());
    let mut stats = CompileStats { bags: d.bags.len(), width, events: events.len(), ..Default::default() };
    for ev in &events {
        let mut next = BTreeMap::new();
        match *ev {
            Event::Introduce(v) => {
                let x = b.input(g.vertex_var(v));
                for (s, gate) in table {
                    let free = s.iter().all(|&u| !g.has_edge(u, v) && !g.has_edge(v, u));
                    if free {
                        let mut t = s.clone();
                        t.push(v);
                        t.sort_unstable();
                        let taken = b.sum(gate, x);
                        merge(&mut b, &mut next, t, taken);
                    }
                    merge(&mut b, &mut next, s, gate);
                }
            }
            Event::Forget(v) => {
                for (mut s, gate) in table {
                    s.retain(|&u| u != v);
                    merge(&mut b, &mut next, s, gate);
                }
            }
        }
        table = next;
        stats.states_per_event.push(table.len());
    }
    stats.max_states = stats.states_per_event.iter().copied().max().unwrap_or(1);
    let out = table[&Vec::new()];
    stats.gates = b.len();
    let circuit = b.finish_with_universe(out, g.vertex_vars())?;
    Ok((circuit, stats))
}
