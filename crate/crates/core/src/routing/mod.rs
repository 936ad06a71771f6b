//! Addressing schemes and forwarding.
//!
//! Each builder adds agents and forwarding promises to a spacetime and
//! returns the per-agent forwarding tables that those promises encode.
//! Routing then follows the tables hop by hop.

mod clos;
mod flat;
mod lattice;
mod tree;

pub use clos::{build_clos, clos_route, ClosFabric, ADVERTISE_TYPE, DOWN_CONDITION, DOWN_TYPE, UP_CONDITION, UP_TYPE};
pub use flat::{build_flat, FLAT_BOUND};
pub use lattice::{build_lattice, LatticeOptions, DEFAULT_LATTICE_BOUND};
pub use tree::{build_tree, build_tree_n};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::body::{Body, Sign};
use crate::error::{Error, Result};
use crate::id::AgentId;
use crate::promise::Promise;
use crate::spacetime::SemanticSpacetime;

/// Promise type of a forwarding (dispatch) offer.
pub const DISPATCH_TYPE: &str = "dispatch";
/// Promise type of the receiver's guarded acceptance.
pub const MESSAGE_TYPE: &str = "message";
/// Condition on acceptance: the message carries the receiver's address.
pub const ADDRESSED_TO_ME: &str = "addressed-to-me";

/// Largest number of agents any builder will create.
pub const SIZE_BOUND: usize = 4096;

/// `from` dispatches to `to`; `to` accepts only what is addressed to it.
pub(crate) fn relay(st: &mut SemanticSpacetime, from: &AgentId, to: &AgentId) -> Result<()> {
    st.add_promise(Promise::to(
        from.clone(),
        to.clone(),
        Body::offer(DISPATCH_TYPE).with_refs([to.clone()]),
    ))?;
    st.add_promise(Promise::to(
        to.clone(),
        from.clone(),
        Body::use_of(MESSAGE_TYPE).with_condition(Sign::Plus, ADDRESSED_TO_ME),
    ))?;
    Ok(())
}

fn has_relay(st: &SemanticSpacetime, from: &AgentId, to: &AgentId) -> bool {
    let offer = st
        .promises_by(from)
        .any(|(_, p)| p.body.sign == Sign::Plus && p.body.type_tag.contains(DISPATCH_TYPE) && p.promisees.contains(to));
    let guard = st.promises_by(to).any(|(_, p)| {
        p.body.sign == Sign::Minus
            && p.body.type_tag.contains(MESSAGE_TYPE)
            && p.promisees.contains(from)
            && p.body
                .condition
                .as_ref()
                .is_some_and(|c| c.type_tag.contains(ADDRESSED_TO_ME))
    });
    offer && guard
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Address {
    /// A name with no order; locating it needs a directory.
    Semantic(String),
    /// A tuple of integers; order alone says which way to go.
    Metric(Vec<i64>),
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Address::Semantic(s) => f.write_str(s),
            Address::Metric(v) => {
                f.write_str("(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}", x)?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pattern {
    Exact(Address),
    /// Path prefix of hierarchical addresses.
    Prefix(String),
    /// Step along `axis` in direction `positive`.
    Axis {
        axis: usize,
        positive: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForwardingTable {
    pub owner: AgentId,
    pub entries: Vec<(Pattern, AgentId)>,
    pub default_route: Option<AgentId>,
}

impl ForwardingTable {
    pub fn new(owner: AgentId) -> Self {
        ForwardingTable {
            owner,
            entries: Vec::new(),
            default_route: None,
        }
    }

    /// Entries plus the default route, if any.
    pub fn size(&self) -> usize {
        self.entries.len() + usize::from(self.default_route.is_some())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scheme {
    Flat,
    Hierarchical,
    Lattice,
    Clos,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Flat => "flat",
            Scheme::Hierarchical => "hierarchical",
            Scheme::Lattice => "lattice",
            Scheme::Clos => "clos",
        })
    }
}

/// Agents of one addressing scheme, their addresses and forwarding tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AddressedSpace {
    pub name: String,
    pub scheme: Scheme,
    pub addresses: BTreeMap<AgentId, Address>,
    pub tables: BTreeMap<AgentId, ForwardingTable>,
    /// Extents for lattices; empty otherwise.
    pub dims: Vec<usize>,
    /// Lattices only: axes are resolved from the highest down.
    pub mirrored: bool,
}

impl AddressedSpace {
    pub fn agent_at(&self, addr: &Address) -> Option<&AgentId> {
        self.addresses.iter().find(|(_, a)| *a == addr).map(|(id, _)| id)
    }

    pub fn contains(&self, id: &AgentId) -> bool {
        self.addresses.contains_key(id)
    }

    /// The receiver's guard: only the addressee takes the message in.
    pub fn accepts_message(&self, agent: &AgentId, dest: &Address) -> bool {
        self.addresses.get(agent) == Some(dest)
    }

    fn next_hop(&self, at: &AgentId, dest: &Address) -> Option<AgentId> {
        let table = self.tables.get(at)?;
        let here = self.addresses.get(at)?;
        match (self.scheme, dest, here) {
            (Scheme::Lattice, Address::Metric(d), Address::Metric(h)) => lattice::next_hop(table, h, d, self.mirrored),
            (Scheme::Hierarchical, Address::Semantic(d), _) => table
                .entries
                .iter()
                .find(|(p, _)| matches!(p, Pattern::Prefix(pre) if tree::path_prefix(pre, d)))
                .map(|(_, n)| n.clone())
                .or_else(|| table.default_route.clone()),
            _ => table
                .entries
                .iter()
                .find(|(p, _)| *p == Pattern::Exact(dest.clone()))
                .map(|(_, n)| n.clone())
                .or_else(|| table.default_route.clone()),
        }
    }
}

/// Hops from `source` to the agent holding `dest`, excluding the source itself.
pub fn route(space: &AddressedSpace, source: &AgentId, dest: &Address) -> Result<Vec<AgentId>> {
    if !space.contains(source) {
        return Err(Error::UnknownAgent(source.clone()));
    }
    let target = space
        .agent_at(dest)
        .ok_or_else(|| Error::UnknownAddress(alloc::format!("{}", dest)))?
        .clone();
    let mut path = Vec::new();
    let mut at = source.clone();
    let mut seen = BTreeSet::new();
    while at != target {
        if !seen.insert(at.clone()) {
            return Err(Error::NoRoute(at));
        }
        let next = space.next_hop(&at, dest).ok_or_else(|| Error::NoRoute(at.clone()))?;
        path.push(next.clone());
        at = next;
    }
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableCost {
    pub scheme: Scheme,
    pub agents: usize,
    pub total_entries: usize,
    pub max_per_agent: usize,
}

impl TableCost {
    pub const CSV_HEADER: &'static str = "scheme,N,total_entries,max_per_agent";

    pub fn from_tables<'a>(scheme: Scheme, agents: usize, tables: impl Iterator<Item = &'a ForwardingTable>) -> Self {
        let mut total = 0;
        let mut max = 0;
        for t in tables {
            total += t.size();
            max = max.max(t.size());
        }
        TableCost {
            scheme,
            agents,
            total_entries: total,
            max_per_agent: max,
        }
    }

    pub fn csv_row(&self) -> String {
        alloc::format!(
            "{},{},{},{}",
            self.scheme,
            self.agents,
            self.total_entries,
            self.max_per_agent
        )
    }
}

/// Counts forwarding-table entries exactly.
pub fn table_cost(space: &AddressedSpace) -> TableCost {
    TableCost::from_tables(space.scheme, space.addresses.len(), space.tables.values())
}

/// The five conditions for a uniform coordinate covering, each checked on
/// a built space. They are a working hypothesis, not a theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoveringReport {
    /// One address per agent, no address shared.
    pub fixed_locations: bool,
    /// Each forwarding step moves to an address one unit along its path or axis.
    pub ordered: bool,
    /// Every table entry is backed by a dispatch promise and an acceptance guard.
    pub relay_promises: bool,
    /// Every agent forwards towards every other address.
    pub long_range_order: bool,
    /// All addresses share one form, so every relay reads the same language.
    pub overlapping_language: bool,
}

impl CoveringReport {
    pub fn holds(&self) -> bool {
        self.fixed_locations
            && self.ordered
            && self.relay_promises
            && self.long_range_order
            && self.overlapping_language
    }
}

fn one_step(space: &AddressedSpace, from: &Address, to: &Address) -> bool {
    match (space.scheme, from, to) {
        (Scheme::Lattice, Address::Metric(a), Address::Metric(b)) => {
            a.len() == b.len() && a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<i64>() == 1
        }
        (Scheme::Hierarchical, Address::Semantic(a), Address::Semantic(b)) => {
            let child_of = |c: &str, p: &str| {
                (p.is_empty() && !c.is_empty() && !c.contains('.'))
                    || (tree::path_prefix(p, c) && c.len() > p.len() && !c[p.len() + 1..].contains('.'))
            };
            child_of(a, b) || child_of(b, a)
        }
        _ => false,
    }
}

pub fn covering_conditions(st: &SemanticSpacetime, space: &AddressedSpace) -> CoveringReport {
    let distinct: BTreeSet<&Address> = space.addresses.values().collect();
    let fixed_locations = distinct.len() == space.addresses.len();
    let steps = || {
        space.tables.values().flat_map(|t| {
            t.entries
                .iter()
                .map(|(_, n)| n)
                .chain(t.default_route.iter())
                .map(move |n| (&t.owner, n))
        })
    };
    let ordered = steps().all(|(a, b)| match (space.addresses.get(a), space.addresses.get(b)) {
        (Some(x), Some(y)) => one_step(space, x, y),
        _ => false,
    });
    let relay_promises = steps().all(|(a, b)| has_relay(st, a, b));
    let long_range_order = space.addresses.keys().all(|a| {
        space
            .addresses
            .iter()
            .filter(|(b, _)| *b != a)
            .all(|(_, dest)| space.next_hop(a, dest).is_some())
    });
    let overlapping_language = {
        let mut forms = space.addresses.values().map(|a| match a {
            Address::Semantic(_) => None,
            Address::Metric(v) => Some(v.len()),
        });
        match forms.next() {
            None => true,
            Some(first) => forms.all(|f| f == first),
        }
    };
    CoveringReport {
        fixed_locations,
        ordered,
        relay_promises,
        long_range_order,
        overlapping_language,
    }
}
