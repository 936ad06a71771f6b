//! Agency scales and super-agents.
//!
//! A scale partitions (part of) the agent set into groups. Groups with more
//! than one member are super-agents: their interior promises vanish under
//! coarse-graining and their exterior promises appear to leave the surface.

mod coarse;
mod equivalence;
mod gauss;

pub use coarse::{bundles, coarse_grain, resolve, CoarseKey, DirEntry, Directory, Grain};
pub use equivalence::{spacetime_equivalent, spacetime_equivalent_bounded, DEFAULT_EQUIVALENCE_BOUND};
pub use gauss::{gauss_check, GaussReport};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::id::{AgentId, PromiseId};
use crate::spacetime::SemanticSpacetime;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scale {
    pub name: String,
    /// Group id to members. A singleton group is keyed by its only member.
    pub groups: BTreeMap<AgentId, BTreeSet<AgentId>>,
}

impl Scale {
    /// Ids of the groups with more than one member or a name of their own.
    pub fn super_agents(&self) -> impl Iterator<Item = &AgentId> {
        self.groups
            .iter()
            .filter(|(id, m)| !(m.len() == 1 && m.contains(*id)))
            .map(|(id, _)| id)
    }

    pub fn grain(&self) -> Grain {
        Grain::from_groups(self.super_agents().map(|id| (id.clone(), self.groups[id].clone())))
    }
}

/// Registers a scale over groups already present in `st`: each entry is either
/// a declared group id or a plain agent (a singleton).
pub fn define_scale(st: &SemanticSpacetime, name: &str, groups: &[AgentId]) -> Result<SemanticSpacetime> {
    let mut out: BTreeMap<AgentId, BTreeSet<AgentId>> = BTreeMap::new();
    let mut owner: BTreeMap<AgentId, AgentId> = BTreeMap::new();
    for id in groups {
        let members = if let Some(m) = st.group(id) {
            m.clone()
        } else if st.agent(id).is_some() {
            core::iter::once(id.clone()).collect()
        } else {
            return Err(Error::UnknownAgent(id.clone()));
        };
        for m in &members {
            if owner.insert(m.clone(), id.clone()).is_some() {
                return Err(Error::OverlappingGroups(m.clone()));
            }
        }
        if out.insert(id.clone(), members).is_some() {
            return Err(Error::OverlappingGroups(id.clone()));
        }
    }
    let graph = st.promise_graph();
    for (id, members) in &out {
        if members.len() < 2 {
            continue;
        }
        let first = members
            .iter()
            .next()
            .cloned()
            .into_iter()
            .map(|a| (a, 0))
            .collect::<Vec<_>>();
        let reach = SemanticSpacetime::bfs(&graph, &first, |a| members.contains(a));
        if reach.len() != members.len() {
            return Err(Error::DisconnectedGroup(id.clone()));
        }
    }
    let mut next = st.clone();
    next.insert_scale(Scale {
        name: name.into(),
        groups: out,
    });
    Ok(next)
}

/// Declares each `(id, members)` group and then registers the scale over them.
pub fn define_scale_with_groups(
    st: &SemanticSpacetime,
    name: &str,
    groups: &[(AgentId, BTreeSet<AgentId>)],
) -> Result<SemanticSpacetime> {
    let mut next = st.clone();
    let mut seen = BTreeSet::new();
    for (id, members) in groups {
        for m in members {
            if !seen.insert(m.clone()) {
                return Err(Error::OverlappingGroups(m.clone()));
            }
        }
        let singleton = members.len() == 1 && members.contains(id);
        if !singleton && next.group(id) != Some(members) {
            next.declare_group(id.clone(), members.iter().cloned())?;
        }
    }
    let ids: Vec<AgentId> = groups.iter().map(|(id, _)| id.clone()).collect();
    define_scale(&next, name, &ids)
}

/// A group together with its interior/exterior promise split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperAgent {
    pub id: AgentId,
    pub interior: BTreeSet<AgentId>,
    pub interior_promises: BTreeSet<PromiseId>,
    pub exterior_promises: BTreeSet<PromiseId>,
    /// Promises made by the collective id itself.
    pub irreducible_promises: BTreeSet<PromiseId>,
}

impl SuperAgent {
    pub fn of(st: &SemanticSpacetime, id: &AgentId) -> Result<SuperAgent> {
        let interior = st
            .group(id)
            .ok_or_else(|| Error::UnknownSuperAgent(id.clone()))?
            .clone();
        let inside = |a: &AgentId| a == id || interior.contains(a);
        let mut sa = SuperAgent {
            id: id.clone(),
            interior: interior.clone(),
            interior_promises: BTreeSet::new(),
            exterior_promises: BTreeSet::new(),
            irreducible_promises: BTreeSet::new(),
        };
        for (pid, p) in st.promises() {
            if p.promiser == *id {
                sa.irreducible_promises.insert(pid);
            }
            let targets = st.promisees_of(p);
            let from_in = inside(&p.promiser);
            let to_in = targets.iter().filter(|a| inside(a)).count();
            let to_out = p.promisees.is_wildcard() || to_in < targets.len();
            if from_in && !to_out {
                sa.interior_promises.insert(pid);
            } else if (from_in && to_out) || (!from_in && to_in > 0) {
                sa.exterior_promises.insert(pid);
            }
        }
        Ok(sa)
    }
}

/// Materializes every super-agent of a registered scale.
pub fn super_agents(st: &SemanticSpacetime, scale: &str) -> Result<Vec<SuperAgent>> {
    let sc = st.scale(scale).ok_or_else(|| Error::UnknownScale(scale.into()))?;
    sc.super_agents().map(|id| SuperAgent::of(st, id)).collect()
}

/// Interior agents holding an exterior promise or an exterior substrate edge.
pub fn surface(sa: &SuperAgent, st: &SemanticSpacetime) -> BTreeSet<AgentId> {
    let mut out = BTreeSet::new();
    for pid in &sa.exterior_promises {
        let Some(p) = st.promise(*pid) else { continue };
        if sa.interior.contains(&p.promiser) {
            out.insert(p.promiser.clone());
        }
        for a in st.promisees_of(p) {
            if sa.interior.contains(&a) {
                out.insert(a);
            }
        }
    }
    let sub = st.substrate();
    for a in &sa.interior {
        if sub.get(a).is_some_and(|ns| ns.iter().any(|n| !sa.interior.contains(n))) {
            out.insert(a.clone());
        }
    }
    out
}

/// Collective promises whose symbols are not covered by what the members
/// already promise, with the same sign and compatible types, to the same
/// exterior agents.
pub fn irreducible_promises(sa: &SuperAgent, st: &SemanticSpacetime) -> BTreeSet<PromiseId> {
    sa.irreducible_promises
        .iter()
        .copied()
        .filter(|pid| {
            let Some(c) = st.promise(*pid) else { return false };
            let outside = |p: &crate::Promise| -> BTreeSet<AgentId> {
                st.promisees_of(p)
                    .into_iter()
                    .filter(|a| !sa.interior.contains(a) && *a != sa.id)
                    .collect()
            };
            let want = outside(c);
            let mut covered: BTreeSet<&str> = BTreeSet::new();
            for (_, p) in st.promises() {
                if sa.interior.contains(&p.promiser)
                    && p.body.sign == c.body.sign
                    && p.body.type_tag.is_subset(&c.body.type_tag)
                    && want.is_subset(&outside(p))
                {
                    covered.extend(p.body.symbols.keys().map(String::as_str));
                }
            }
            !c.body.symbol_set().is_subset(&covered)
        })
        .collect()
}

/// True when no single member promises the collective body (sign, type and symbols).
pub fn absent_from_members(sa: &SuperAgent, st: &SemanticSpacetime, pid: PromiseId) -> bool {
    let Some(c) = st.promise(pid) else { return true };
    !st.promises().any(|(_, p)| {
        sa.interior.contains(&p.promiser)
            && p.body.sign == c.body.sign
            && p.body.type_tag == c.body.type_tag
            && p.body.symbols == c.body.symbols
    })
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::body::Body;
    use crate::promise::Promise;

    #[test]
    fn overlapping_and_disconnected_groups() {
        let st = hybrid();
        assert!(matches!(
            define_scale(&st, "Bad", &["S".into(), "A1".into()]),
            Err(Error::OverlappingGroups(_))
        ));
        let mut loose = SemanticSpacetime::with_agents(["A", "B", "C"]).unwrap();
        loose.add_promise(Promise::to("A", "B", Body::offer("x"))).unwrap();
        loose.declare_group("G", ["A", "C"]).unwrap();
        assert_eq!(
            define_scale(&loose, "L", &["G".into()]),
            Err(Error::DisconnectedGroup("G".into()))
        );
    }

    #[test]
    fn singleton_scale_has_no_super_agents() {
        let st = hybrid();
        let names: Vec<AgentId> = st.agent_ids().cloned().collect();
        let st = define_scale(&st, "Atomic", &names).unwrap();
        assert_eq!(st.scale("Atomic").unwrap().super_agents().count(), 0);
    }

    #[test]
    fn molecular_super_agent() {
        let st = molecular(false);
        let sas = super_agents(&st, "Molecular").unwrap();
        assert_eq!(sas.len(), 1);
        assert_eq!(sas[0].interior.len(), 3);
        assert_eq!(sas[0].interior_promises.len(), 2);
    }

    #[test]
    fn surface_of_s() {
        let st = hybrid();
        let s = SuperAgent::of(&st, &"S".into()).unwrap();
        assert_eq!(surface(&s, &st), ids(&["A1", "A2", "A4"]));
        assert_eq!(s.exterior_promises.len(), 4);

        let mut closed = SemanticSpacetime::with_agents(["A", "B", "C"]).unwrap();
        closed.add_promise(Promise::to("A", "B", Body::offer("x"))).unwrap();
        closed.declare_group("G", ["A", "B"]).unwrap();
        let g = SuperAgent::of(&closed, &"G".into()).unwrap();
        assert!(surface(&g, &closed).is_empty());
        closed.add_promise(Promise::to("B", "C", Body::offer("y"))).unwrap();
        let g = SuperAgent::of(&closed, &"G".into()).unwrap();
        assert_eq!(surface(&g, &closed), ids(&["B"]));
    }

    #[test]
    fn water_is_irreducible() {
        let st = molecular(false);
        let m = SuperAgent::of(&st, &"M".into()).unwrap();
        let irr = irreducible_promises(&m, &st);
        assert_eq!(irr.len(), 1);
        let pid = *irr.iter().next().unwrap();
        assert!(absent_from_members(&m, &st, pid));

        let control = molecular(true);
        let m = SuperAgent::of(&control, &"M".into()).unwrap();
        assert!(irreducible_promises(&m, &control).is_empty());
    }

    #[test]
    fn copied_member_promise_is_reducible() {
        let mut st = SemanticSpacetime::with_agents(["A", "B", "X"]).unwrap();
        st.add_promise(Promise::to("A", "X", Body::offer("t"))).unwrap();
        st.add_promise(Promise::to("A", "B", Body::offer("adj"))).unwrap();
        st.declare_group("G", ["A", "B"]).unwrap();
        let pid = st.add_promise(Promise::to("G", "X", Body::offer("t"))).unwrap();
        let g = SuperAgent::of(&st, &"G".into()).unwrap();
        assert!(irreducible_promises(&g, &st).is_empty());
        assert!(!absent_from_members(&g, &st, pid));
    }
}
