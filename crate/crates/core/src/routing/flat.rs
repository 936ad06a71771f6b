use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{relay, Address, AddressedSpace, ForwardingTable, Pattern, Scheme};
use crate::error::{Error, Result};
use crate::id::AgentId;
use crate::spacetime::{Agent, SemanticSpacetime};

/// Tables grow as N(N-1), so flat spaces get a tighter cap than the others.
pub const FLAT_BOUND: usize = 1024;

/// `n` agents on a ring, each keeping a table of every other name.
///
/// Next hops come from shortest paths on the ring, lowest id on ties.
pub fn build_flat(st: &SemanticSpacetime, name: &str, n: usize) -> Result<(SemanticSpacetime, AddressedSpace)> {
    if n == 0 {
        return Err(Error::InvalidParameter(String::from(
            "flat space needs at least one agent",
        )));
    }
    if n > FLAT_BOUND {
        return Err(Error::SizeBound {
            size: n,
            bound: FLAT_BOUND,
        });
    }
    let width = format!("{}", n - 1).len();
    let ids: Vec<AgentId> = (0..n)
        .map(|i| AgentId::new(format!("{}{:0w$}", name, i, w = width)))
        .collect();

    let mut next = st.clone();
    for id in &ids {
        next.add_agent(Agent::new(id.clone()))?;
    }
    let mut ring: BTreeMap<AgentId, BTreeSet<AgentId>> = ids.iter().map(|a| (a.clone(), BTreeSet::new())).collect();
    let links = if n == 2 {
        1
    } else if n > 2 {
        n
    } else {
        0
    };
    for i in 0..links {
        let (a, b) = (&ids[i], &ids[(i + 1) % n]);
        relay(&mut next, a, b)?;
        relay(&mut next, b, a)?;
        ring.get_mut(a).expect("node").insert(b.clone());
        ring.get_mut(b).expect("node").insert(a.clone());
    }

    let mut tables: BTreeMap<AgentId, ForwardingTable> = ids
        .iter()
        .map(|id| (id.clone(), ForwardingTable::new(id.clone())))
        .collect();
    for dest in &ids {
        let dist = SemanticSpacetime::bfs(&ring, &[(dest.clone(), 0)], |_| true);
        for src in ids.iter().filter(|s| *s != dest) {
            // Neighbours iterate in id order, so `min_by_key` keeps the lowest id.
            let hop = ring[src]
                .iter()
                .filter(|x| dist.contains_key(*x))
                .min_by_key(|x| dist[*x]);
            if let Some(hop) = hop {
                tables.get_mut(src).expect("table").entries.push((
                    Pattern::Exact(Address::Semantic(String::from(dest.as_str()))),
                    hop.clone(),
                ));
            }
        }
    }
    let addresses = ids
        .iter()
        .map(|id| (id.clone(), Address::Semantic(String::from(id.as_str()))))
        .collect();
    Ok((
        next,
        AddressedSpace {
            name: String::from(name),
            scheme: Scheme::Flat,
            addresses,
            tables,
            dims: Vec::new(),
            mirrored: false,
        },
    ))
}
