use alloc::collections::BTreeSet;
use core::fmt;

use crate::body::{write_joined, Body};
use crate::id::AgentId;

/// Promisee or scope set. `*` is kept symbolic and materialized against the
/// agents of a snapshot only when queried.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Wildcard,
    Agents(BTreeSet<AgentId>),
}

impl Target {
    pub fn one(a: impl Into<AgentId>) -> Self {
        let mut s = BTreeSet::new();
        s.insert(a.into());
        Target::Agents(s)
    }

    pub fn of<I, A>(agents: I) -> Self
    where
        I: IntoIterator<Item = A>,
        A: Into<AgentId>,
    {
        Target::Agents(agents.into_iter().map(Into::into).collect())
    }

    pub fn is_wildcard(&self) -> bool {
        matches!(self, Target::Wildcard)
    }

    pub fn contains(&self, a: &AgentId) -> bool {
        match self {
            Target::Wildcard => true,
            Target::Agents(s) => s.contains(a),
        }
    }

    /// Explicit members; empty for the wildcard.
    pub fn explicit(&self) -> impl Iterator<Item = &AgentId> {
        let set = match self {
            Target::Wildcard => None,
            Target::Agents(s) => Some(s),
        };
        set.into_iter().flatten()
    }

    pub fn is_subset(&self, other: &Target) -> bool {
        match (self, other) {
            (_, Target::Wildcard) => true,
            (Target::Wildcard, Target::Agents(_)) => false,
            (Target::Agents(a), Target::Agents(b)) => a.is_subset(b),
        }
    }

    pub fn union(&self, other: &Target) -> Target {
        match (self, other) {
            (Target::Agents(a), Target::Agents(b)) => Target::Agents(a.union(b).cloned().collect()),
            _ => Target::Wildcard,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Wildcard => f.write_str("*"),
            Target::Agents(s) => write_joined(f, s.iter()),
        }
    }
}

/// `promiser --body--> promisees`, known to the agents in `scope`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Promise {
    pub promiser: AgentId,
    pub promisees: Target,
    pub body: Body,
    /// Always a superset of `promisees`.
    pub scope: Target,
}

impl Promise {
    pub fn new(promiser: impl Into<AgentId>, promisees: Target, body: Body) -> Self {
        Promise {
            promiser: promiser.into(),
            scope: promisees.clone(),
            promisees,
            body,
        }
    }

    pub fn to(promiser: impl Into<AgentId>, promisee: impl Into<AgentId>, body: Body) -> Self {
        Promise::new(promiser, Target::one(promisee), body)
    }

    /// Adds informees to the scope; the promisees always stay in it.
    pub fn with_scope(mut self, extra: Target) -> Self {
        self.scope = self.promisees.union(&extra);
        self
    }
}

impl fmt::Display for Promise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} : {}", self.promiser, self.promisees, self.body)?;
        if self.scope != self.promisees {
            write!(f, " scope({})", self.scope)?;
        }
        Ok(())
    }
}
