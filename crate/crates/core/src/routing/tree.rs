use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{relay, Address, AddressedSpace, ForwardingTable, Pattern, Scheme, SIZE_BOUND};
use crate::error::{Error, Result};
use crate::id::AgentId;
use crate::spacetime::{Agent, SemanticSpacetime};

/// `pre` names `dest` or one of its ancestors. Segments are dot-separated.
pub(crate) fn path_prefix(pre: &str, dest: &str) -> bool {
    dest == pre || (dest.len() > pre.len() && dest.starts_with(pre) && dest.as_bytes()[pre.len()] == b'.')
}

/// Complete `b`-ary tree of depth `d`: `b^d` leaves.
pub fn build_tree(
    st: &SemanticSpacetime,
    name: &str,
    b: usize,
    d: usize,
) -> Result<(SemanticSpacetime, AddressedSpace)> {
    if d == 0 {
        return Err(Error::InvalidParameter(String::from("tree depth must be at least 1")));
    }
    if b < 2 {
        return Err(Error::InvalidParameter(String::from(
            "tree branching must be at least 2",
        )));
    }
    let mut n: usize = 1;
    let mut level: usize = 1;
    for _ in 0..d {
        level = level.saturating_mul(b);
        n = n.saturating_add(level);
        // Growth is at least geometric, so this stops within 13 levels.
        if n > SIZE_BOUND {
            return Err(Error::SizeBound {
                size: n,
                bound: SIZE_BOUND,
            });
        }
    }
    build_tree_n(st, name, b, n)
}

/// Heap-shaped `b`-ary tree of `n` agents: node `k` parents `b*k+1 ..= b*k+b`.
pub fn build_tree_n(
    st: &SemanticSpacetime,
    name: &str,
    b: usize,
    n: usize,
) -> Result<(SemanticSpacetime, AddressedSpace)> {
    if b < 2 {
        return Err(Error::InvalidParameter(String::from(
            "tree branching must be at least 2",
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter(String::from("tree needs at least one agent")));
    }
    if n > SIZE_BOUND {
        return Err(Error::SizeBound {
            size: n,
            bound: SIZE_BOUND,
        });
    }
    let mut paths: Vec<String> = Vec::with_capacity(n);
    let mut ids: Vec<AgentId> = Vec::with_capacity(n);
    for k in 0..n {
        let path = if k == 0 {
            String::new()
        } else {
            let parent = &paths[(k - 1) / b];
            let seg = (k - 1) % b;
            if parent.is_empty() {
                format!("{}", seg)
            } else {
                format!("{}.{}", parent, seg)
            }
        };
        ids.push(if path.is_empty() {
            AgentId::new(name)
        } else {
            AgentId::new(format!("{}.{}", name, path))
        });
        paths.push(path);
    }

    let mut next = st.clone();
    for id in &ids {
        next.add_agent(Agent::new(id.clone()))?;
    }
    let mut tables: BTreeMap<AgentId, ForwardingTable> = ids
        .iter()
        .map(|id| (id.clone(), ForwardingTable::new(id.clone())))
        .collect();
    for k in 1..n {
        let parent = &ids[(k - 1) / b];
        let child = &ids[k];
        // Down: dispatch towards the subtree, guarded by the child's address.
        relay(&mut next, parent, child)?;
        // Up: the default route for everything outside the subtree.
        relay(&mut next, child, parent)?;
        tables
            .get_mut(parent)
            .expect("parent table")
            .entries
            .push((Pattern::Prefix(paths[k].clone()), child.clone()));
        tables.get_mut(child).expect("child table").default_route = Some(parent.clone());
    }
    let addresses = ids
        .iter()
        .cloned()
        .zip(paths.into_iter().map(Address::Semantic))
        .collect();
    Ok((
        next,
        AddressedSpace {
            name: String::from(name),
            scheme: Scheme::Hierarchical,
            addresses,
            tables,
            dims: Vec::new(),
            mirrored: false,
        },
    ))
}
