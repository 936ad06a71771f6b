//! Delivery of promises made to a super-agent boundary.
//!
//! A promise addressed to a group reaches its members over the adjacency
//! substrate: blindly by flooding, directly when the group's directory is
//! known, or through a designated gateway that relays to matching members.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::body::{Body, Sign};
use crate::error::{Error, Result};
use crate::id::AgentId;
use crate::promise::{Promise, Target};
use crate::scaling::Directory;
use crate::spacetime::SemanticSpacetime;

/// Type of the promise a transparent super-agent makes about its directory.
pub const DIRECTORY_TYPE: &str = "directory";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DeliveryMode {
    Flood,
    Direct,
    Gateway,
}

impl fmt::Display for DeliveryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeliveryMode::Flood => "flood",
            DeliveryMode::Direct => "direct",
            DeliveryMode::Gateway => "gateway",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryOutcome {
    pub mode: DeliveryMode,
    pub reached: BTreeSet<AgentId>,
    /// Always a subset of `reached`.
    pub accepted: BTreeSet<AgentId>,
    pub hops: BTreeMap<AgentId, usize>,
}

impl DeliveryOutcome {
    pub const CSV_HEADER: &'static str = "mode,reached_count,accepted_count,max_hops";

    pub fn max_hops(&self) -> usize {
        self.hops.values().copied().max().unwrap_or(0)
    }

    pub fn csv_row(&self) -> String {
        alloc::format!(
            "{},{},{},{}",
            self.mode,
            self.reached.len(),
            self.accepted.len(),
            self.max_hops()
        )
    }
}

fn members<'a>(st: &'a SemanticSpacetime, sa: &AgentId) -> Result<&'a BTreeSet<AgentId>> {
    st.group(sa).ok_or_else(|| Error::UnknownSuperAgent(sa.clone()))
}

/// A use-promise by `agent` that accepts `body` from `from` or from the group.
fn accepts(st: &SemanticSpacetime, agent: &AgentId, body: &Body, from: &AgentId, sa: &AgentId) -> bool {
    st.promises_by(agent).any(|(_, u)| {
        u.body.sign == Sign::Minus
            && body.type_tag.is_subset(&u.body.type_tag)
            && (u.promisees.is_wildcard() || u.promisees.contains(from) || u.promisees.contains(sa))
    })
}

/// Interior distances from the agents adjacent to the promiser (entry points at 1).
fn flood_reach(st: &SemanticSpacetime, promise: &Promise, sa: &AgentId) -> Result<BTreeMap<AgentId, usize>> {
    let inside = members(st, sa)?;
    let sub = st.substrate();
    let entries: Vec<(AgentId, usize)> = sub
        .get(&promise.promiser)
        .into_iter()
        .flatten()
        .filter(|a| inside.contains(*a))
        .map(|a| (a.clone(), 1))
        .collect();
    if entries.is_empty() {
        return Err(Error::NoChannel {
            from: promise.promiser.clone(),
            target: sa.clone(),
        });
    }
    Ok(SemanticSpacetime::bfs(&sub, &entries, |a| inside.contains(a)))
}

fn outcome(
    st: &SemanticSpacetime,
    mode: DeliveryMode,
    promise: &Promise,
    sa: &AgentId,
    hops: BTreeMap<AgentId, usize>,
) -> DeliveryOutcome {
    let reached: BTreeSet<AgentId> = hops.keys().cloned().collect();
    let accepted = reached
        .iter()
        .filter(|a| accepts(st, a, &promise.body, &promise.promiser, sa))
        .cloned()
        .collect();
    DeliveryOutcome {
        mode,
        reached,
        accepted,
        hops,
    }
}

/// Delivers to every member reachable over the substrate from the boundary.
pub fn flood(st: &SemanticSpacetime, promise: &Promise, sa: &AgentId) -> Result<DeliveryOutcome> {
    let hops = flood_reach(st, promise, sa)?;
    Ok(outcome(st, DeliveryMode::Flood, promise, sa, hops))
}

/// Delivers only to the members the directory lists for the promise's type,
/// or relays through the group's gateway when no directory is available.
pub fn dispatch(
    st: &SemanticSpacetime,
    promise: &Promise,
    sa: &AgentId,
    directory: Option<&Directory>,
) -> Result<DeliveryOutcome> {
    let inside = members(st, sa)?;
    if let Some(dir) = directory.or_else(|| st.published_directory(sa)) {
        let reach = flood_reach(st, promise, sa)?;
        let listed: BTreeSet<AgentId> = promise.body.type_tag.names().flat_map(|t| dir.members_for(t)).collect();
        let hops = listed
            .into_iter()
            .filter(|a| inside.contains(a) && reach.contains_key(a))
            .map(|a| (a, 1))
            .collect();
        return Ok(outcome(st, DeliveryMode::Direct, promise, sa, hops));
    }
    let gw = st.gateway(sa).ok_or_else(|| Error::Opaque(sa.clone()))?;
    let reach = flood_reach(st, promise, sa)?;
    if !reach.contains_key(gw) {
        return Err(Error::NoChannel {
            from: promise.promiser.clone(),
            target: sa.clone(),
        });
    }
    let sub = st.substrate();
    let from_gw = SemanticSpacetime::bfs(&sub, &[(gw.clone(), 0)], |a| inside.contains(a));
    let hops = from_gw
        .into_iter()
        .filter(|(a, _)| a != gw && accepts(st, a, &promise.body, &promise.promiser, sa))
        .map(|(a, d)| (a, d + 1))
        .collect();
    Ok(outcome(st, DeliveryMode::Gateway, promise, sa, hops))
}

/// The promise's scope with every transparent super-agent opened up to its members.
pub fn effective_scope(st: &SemanticSpacetime, promise: &Promise) -> BTreeSet<AgentId> {
    let mut scope = match &promise.scope {
        Target::Wildcard => st.materialize(&promise.scope, Some(&promise.promiser)),
        Target::Agents(s) => s.clone(),
    };
    let groups: Vec<AgentId> = scope.iter().filter(|a| st.is_group(a)).cloned().collect();
    for g in groups {
        if let Some(dir) = st.published_directory(&g) {
            scope.extend(dir.members.iter().cloned());
        }
    }
    scope
}

/// Publishes the directory: adds `sa --(+directory)--> *` once and lets
/// delivery and scope see through the boundary.
pub fn make_transparent(st: &SemanticSpacetime, sa: &AgentId, dir: &Directory) -> Result<SemanticSpacetime> {
    if !st.is_group(sa) && !st.is_coarse_agent(sa) {
        return Err(Error::UnknownSuperAgent(sa.clone()));
    }
    let mut next = st.clone();
    let already = st.promises_by(sa).any(|(_, p)| {
        p.promisees.is_wildcard() && p.body.sign == Sign::Plus && p.body.type_tag.contains(DIRECTORY_TYPE)
    });
    if !already {
        next.add_promise(Promise::new(sa.clone(), Target::Wildcard, Body::offer(DIRECTORY_TYPE)))?;
    }
    next.insert_published(sa.clone(), dir.clone());
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaling::{coarse_grain, define_scale};

    /// `X` touches the boundary at `A`; inside, `A - B - C` is a line.
    fn line(acceptor: &str) -> SemanticSpacetime {
        let mut st = SemanticSpacetime::with_agents(["A", "B", "C", "X"]).unwrap();
        for (a, b) in [("X", "A"), ("A", "B"), ("B", "C")] {
            st.add_promise(Promise::to(a, b, Body::offer("adj"))).unwrap();
        }
        st.declare_group("S", ["A", "B", "C"]).unwrap();
        st.add_promise(Promise::to(acceptor, "X", Body::use_of("job"))).unwrap();
        st
    }

    fn job() -> Promise {
        Promise::to("X", "S", Body::offer("job"))
    }

    #[test]
    fn flood_reaches_everyone() {
        let st = line("B");
        let out = flood(&st, &job(), &"S".into()).unwrap();
        assert_eq!(out.reached.len(), 3);
        assert_eq!(out.accepted.iter().map(AgentId::as_str).collect::<Vec<_>>(), ["B"]);
        assert_eq!(out.hops[&AgentId::from("C")], 3);
        assert_eq!(out.csv_row(), "flood,3,1,3");
    }

    #[test]
    fn surface_only_flood() {
        let mut st = SemanticSpacetime::with_agents(["A", "B", "X"]).unwrap();
        st.add_promise(Promise::to("X", "A", Body::offer("adj"))).unwrap();
        st.add_promise(Promise::to("A", "B", Body::offer("tie"))).unwrap();
        st.declare_group("S", ["A", "B"]).unwrap();
        let out = flood(&st, &job(), &"S".into()).unwrap();
        assert_eq!(out.reached.len(), 1);
    }

    #[test]
    fn no_channel() {
        let mut st = SemanticSpacetime::with_agents(["A", "X"]).unwrap();
        st.declare_group("S", ["A"]).unwrap();
        assert!(matches!(flood(&st, &job(), &"S".into()), Err(Error::NoChannel { .. })));
    }

    #[test]
    fn opaque_without_directory_or_gateway() {
        let st = line("C");
        assert_eq!(dispatch(&st, &job(), &"S".into(), None), Err(Error::Opaque("S".into())));
    }

    #[test]
    fn gateway_relays() {
        let mut st = line("C");
        st.set_gateway(&"S".into(), &"B".into()).unwrap();
        let out = dispatch(&st, &job(), &"S".into(), None).unwrap();
        assert_eq!(out.mode, DeliveryMode::Gateway);
        assert_eq!(out.reached.iter().map(AgentId::as_str).collect::<Vec<_>>(), ["C"]);
        assert_eq!(out.hops[&AgentId::from("C")], 2);
    }

    #[test]
    fn transparent_dispatch_is_direct() {
        let st = line("C");
        let st = define_scale(&st, "M", &["S".into(), "X".into()]).unwrap();
        let (_, dirs) = coarse_grain(&st, "M").unwrap();
        let open = make_transparent(&st, &"S".into(), &dirs[0]).unwrap();
        let out = dispatch(&open, &job(), &"S".into(), None).unwrap();
        assert_eq!(out.mode, DeliveryMode::Direct);
        assert_eq!(out.reached.iter().map(AgentId::as_str).collect::<Vec<_>>(), ["C"]);
        assert_eq!(out.accepted, flood(&open, &job(), &"S".into()).unwrap().accepted);
        assert_eq!(out.max_hops(), 1);

        let twice = make_transparent(&open, &"S".into(), &dirs[0]).unwrap();
        assert_eq!(twice, open);
    }

    #[test]
    fn scope_opens_only_when_published() {
        let st = line("C");
        let p = job();
        assert_eq!(effective_scope(&st, &p), [AgentId::from("S")].into_iter().collect());
        let plain = Promise::to("A", "B", Body::offer("x"));
        assert_eq!(effective_scope(&st, &plain).len(), 1);
        let st = define_scale(&st, "M", &["S".into(), "X".into()]).unwrap();
        let (_, dirs) = coarse_grain(&st, "M").unwrap();
        let open = make_transparent(&st, &"S".into(), &dirs[0]).unwrap();
        assert_eq!(effective_scope(&open, &p).len(), 4);
    }
}
