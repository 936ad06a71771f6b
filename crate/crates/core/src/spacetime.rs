//! The agent/promise doublet and the operations that act on it directly.
//!
//! Every transforming operation takes `&self` and returns a new snapshot.
//! The `&mut self` methods are builders used while a snapshot is assembled.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::body::{Body, Sign};
use crate::error::{Error, Result};
use crate::id::{AgentId, PromiseId};
use crate::promise::{Promise, Target};
use crate::scaling::{Directory, Scale};

/// Type tag of the promises that form the adjacency substrate unless a scenario overrides it.
pub const DEFAULT_ADJACENCY_TYPE: &str = "adj";

/// Type tag used for emission of resident sub-agents.
pub const EMIT_TYPE: &str = "emit";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent {
    pub id: AgentId,
    /// The agent's scalar name-promise. Defaults to the id token.
    pub name: String,
    pub residents: BTreeSet<AgentId>,
}

impl Agent {
    pub fn new(id: impl Into<AgentId>) -> Self {
        let id = id.into();
        Agent {
            name: id.as_str().to_string(),
            id,
            residents: BTreeSet::new(),
        }
    }
}

/// A label registered by [`SemanticSpacetime::relabel_by_scalar`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alias {
    pub label: String,
    pub agent: AgentId,
    pub scope: Target,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticSpacetime {
    agents: BTreeMap<AgentId, Agent>,
    promises: BTreeMap<PromiseId, Promise>,
    next_promise: u32,
    groups: BTreeMap<AgentId, BTreeSet<AgentId>>,
    aliases: Vec<Alias>,
    adjacency_type: String,
    gateways: BTreeMap<AgentId, AgentId>,
    published: BTreeMap<AgentId, Directory>,
    scales: BTreeMap<String, Scale>,
    /// Agents that stand for a coarse-grained group.
    coarse: BTreeSet<AgentId>,
}

impl Default for SemanticSpacetime {
    fn default() -> Self {
        Self::new()
    }
}

impl SemanticSpacetime {
    pub fn new() -> Self {
        SemanticSpacetime {
            agents: BTreeMap::new(),
            promises: BTreeMap::new(),
            next_promise: 0,
            groups: BTreeMap::new(),
            aliases: Vec::new(),
            adjacency_type: DEFAULT_ADJACENCY_TYPE.to_string(),
            gateways: BTreeMap::new(),
            published: BTreeMap::new(),
            scales: BTreeMap::new(),
            coarse: BTreeSet::new(),
        }
    }

    /// Convenience constructor for tests and generators.
    pub fn with_agents<I, A>(ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = A>,
        A: Into<AgentId>,
    {
        let mut st = Self::new();
        for id in ids {
            st.add_agent(Agent::new(id))?;
        }
        Ok(st)
    }

    // ---- builders ----------------------------------------------------------

    pub fn add_agent(&mut self, agent: Agent) -> Result<()> {
        if self.contains_id(&agent.id) {
            return Err(Error::DuplicateAgent(agent.id));
        }
        if agent.residents.contains(&agent.id) {
            return Err(Error::SelfResidency(agent.id));
        }
        self.agents.insert(agent.id.clone(), agent);
        Ok(())
    }

    /// Declares a named group of agents (a super-agent boundary).
    pub fn declare_group<I, A>(&mut self, id: impl Into<AgentId>, members: I) -> Result<()>
    where
        I: IntoIterator<Item = A>,
        A: Into<AgentId>,
    {
        let id = id.into();
        if self.contains_id(&id) {
            return Err(Error::GroupIdClash(id));
        }
        let members: BTreeSet<AgentId> = members.into_iter().map(Into::into).collect();
        if members.is_empty() {
            return Err(Error::EmptyGroup(id));
        }
        for m in &members {
            if !self.agents.contains_key(m) {
                return Err(Error::UnknownAgent(m.clone()));
            }
        }
        self.groups.insert(id, members);
        Ok(())
    }

    pub fn add_promise(&mut self, promise: Promise) -> Result<PromiseId> {
        self.check_promise(&promise)?;
        let id = PromiseId(self.next_promise);
        self.next_promise += 1;
        self.promises.insert(id, promise);
        Ok(id)
    }

    pub fn remove_promise(&mut self, id: PromiseId) -> Option<Promise> {
        self.promises.remove(&id)
    }

    pub fn add_resident(&mut self, parent: &AgentId, child: &AgentId) -> Result<()> {
        if parent == child {
            return Err(Error::SelfResidency(parent.clone()));
        }
        if !self.agents.contains_key(child) {
            return Err(Error::UnknownAgent(child.clone()));
        }
        if let Some(host) = self.host_of(child) {
            return Err(Error::AlreadyResident {
                child: child.clone(),
                host,
            });
        }
        self.agents
            .get_mut(parent)
            .ok_or_else(|| Error::UnknownAgent(parent.clone()))?
            .residents
            .insert(child.clone());
        Ok(())
    }

    pub fn set_adjacency_type(&mut self, type_name: impl Into<String>) {
        self.adjacency_type = type_name.into();
    }

    pub fn set_gateway(&mut self, group: &AgentId, gateway: &AgentId) -> Result<()> {
        let members = self
            .groups
            .get(group)
            .ok_or_else(|| Error::UnknownSuperAgent(group.clone()))?;
        if !members.contains(gateway) {
            return Err(Error::InvalidParameter(alloc::format!(
                "gateway `{}` is not inside `{}`",
                gateway,
                group
            )));
        }
        self.gateways.insert(group.clone(), gateway.clone());
        Ok(())
    }

    pub fn set_agent_name(&mut self, id: &AgentId, name: impl Into<String>) -> Result<()> {
        self.agents
            .get_mut(id)
            .ok_or_else(|| Error::UnknownAgent(id.clone()))?
            .name = name.into();
        Ok(())
    }

    pub(crate) fn insert_scale(&mut self, scale: Scale) {
        self.scales.insert(scale.name.clone(), scale);
    }

    pub(crate) fn mark_coarse(&mut self, id: AgentId) {
        self.coarse.insert(id);
    }

    pub(crate) fn insert_alias(&mut self, alias: Alias) {
        self.aliases.push(alias);
    }

    pub(crate) fn insert_published(&mut self, owner: AgentId, dir: Directory) {
        self.published.insert(owner, dir);
    }

    // ---- queries -----------------------------------------------------------

    pub fn agents(&self) -> impl Iterator<Item = &Agent> {
        self.agents.values()
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = &AgentId> {
        self.agents.keys()
    }

    pub fn agent(&self, id: &AgentId) -> Option<&Agent> {
        self.agents.get(id)
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn promises(&self) -> impl Iterator<Item = (PromiseId, &Promise)> {
        self.promises.iter().map(|(k, v)| (*k, v))
    }

    pub fn promise(&self, id: PromiseId) -> Option<&Promise> {
        self.promises.get(&id)
    }

    pub fn promise_count(&self) -> usize {
        self.promises.len()
    }

    pub fn groups(&self) -> impl Iterator<Item = (&AgentId, &BTreeSet<AgentId>)> {
        self.groups.iter()
    }

    pub fn group(&self, id: &AgentId) -> Option<&BTreeSet<AgentId>> {
        self.groups.get(id)
    }

    pub fn is_group(&self, id: &AgentId) -> bool {
        self.groups.contains_key(id)
    }

    /// True for agents and declared groups.
    pub fn contains_id(&self, id: &AgentId) -> bool {
        self.agents.contains_key(id) || self.groups.contains_key(id)
    }

    pub fn aliases(&self) -> &[Alias] {
        &self.aliases
    }

    pub fn adjacency_type(&self) -> &str {
        &self.adjacency_type
    }

    pub fn gateway(&self, group: &AgentId) -> Option<&AgentId> {
        self.gateways.get(group)
    }

    pub fn published_directory(&self, group: &AgentId) -> Option<&Directory> {
        self.published.get(group)
    }

    pub fn scale(&self, name: &str) -> Option<&Scale> {
        self.scales.get(name)
    }

    /// True for an agent produced by coarse-graining a group.
    pub fn is_coarse_agent(&self, id: &AgentId) -> bool {
        self.coarse.contains(id)
    }

    pub fn gateways(&self) -> impl Iterator<Item = (&AgentId, &AgentId)> {
        self.gateways.iter()
    }

    pub fn scales(&self) -> impl Iterator<Item = &Scale> {
        self.scales.values()
    }

    /// The agent that currently holds `child` as a resident.
    pub fn host_of(&self, child: &AgentId) -> Option<AgentId> {
        self.agents
            .values()
            .find(|a| a.residents.contains(child))
            .map(|a| a.id.clone())
    }

    /// Expands a target against the current agents. `*` means every agent
    /// except `exclude` (the promiser).
    pub fn materialize(&self, target: &Target, exclude: Option<&AgentId>) -> BTreeSet<AgentId> {
        match target {
            Target::Wildcard => self.agents.keys().filter(|a| Some(*a) != exclude).cloned().collect(),
            Target::Agents(s) => s.clone(),
        }
    }

    pub fn promisees_of(&self, p: &Promise) -> BTreeSet<AgentId> {
        self.materialize(&p.promisees, Some(&p.promiser))
    }

    pub fn scope_of(&self, p: &Promise) -> BTreeSet<AgentId> {
        self.materialize(&p.scope, Some(&p.promiser))
    }

    /// Undirected adjacency substrate: agents linked by a promise of the adjacency type.
    pub fn substrate(&self) -> BTreeMap<AgentId, BTreeSet<AgentId>> {
        let mut g: BTreeMap<AgentId, BTreeSet<AgentId>> =
            self.agents.keys().map(|a| (a.clone(), BTreeSet::new())).collect();
        for p in self.promises.values() {
            if !p.body.type_tag.contains(&self.adjacency_type) || p.body.is_empty() {
                continue;
            }
            if !self.agents.contains_key(&p.promiser) {
                continue;
            }
            for q in self.promisees_of(p) {
                if !self.agents.contains_key(&q) {
                    continue;
                }
                g.entry(p.promiser.clone()).or_default().insert(q.clone());
                g.entry(q).or_default().insert(p.promiser.clone());
            }
        }
        g
    }

    /// Undirected graph of every non-empty promise (any type) between agents.
    pub fn promise_graph(&self) -> BTreeMap<AgentId, BTreeSet<AgentId>> {
        let mut g: BTreeMap<AgentId, BTreeSet<AgentId>> =
            self.agents.keys().map(|a| (a.clone(), BTreeSet::new())).collect();
        for p in self.promises.values() {
            if p.body.is_empty() || !self.agents.contains_key(&p.promiser) {
                continue;
            }
            for q in self.promisees_of(p) {
                if self.agents.contains_key(&q) {
                    g.entry(p.promiser.clone()).or_default().insert(q.clone());
                    g.entry(q).or_default().insert(p.promiser.clone());
                }
            }
        }
        g
    }

    fn check_promise(&self, p: &Promise) -> Result<()> {
        if !self.contains_id(&p.promiser) {
            return Err(Error::UnknownAgent(p.promiser.clone()));
        }
        if p.promisees.contains(&p.promiser) && !p.promisees.is_wildcard() {
            return Err(Error::SelfPromise(p.promiser.clone()));
        }
        if !p.promisees.is_subset(&p.scope) {
            return Err(Error::ScopeMissingPromisee(p.promiser.clone()));
        }
        if p.body.agent_refs.contains(&p.promiser) {
            return Err(Error::SelfReference(p.promiser.clone()));
        }
        if p.body.valency == crate::body::Valency::Bounded(0) {
            return Err(Error::ZeroValency);
        }
        for a in p
            .promisees
            .explicit()
            .chain(p.scope.explicit())
            .chain(p.body.agent_refs.iter())
        {
            if !self.contains_id(a) {
                return Err(Error::UnknownAgent(a.clone()));
            }
        }
        Ok(())
    }

    /// Re-checks every structural invariant of the snapshot.
    pub fn validate(&self) -> Result<()> {
        for p in self.promises.values() {
            self.check_promise(p)?;
        }
        let mut seen: BTreeMap<&AgentId, &AgentId> = BTreeMap::new();
        for a in self.agents.values() {
            if a.residents.contains(&a.id) {
                return Err(Error::SelfResidency(a.id.clone()));
            }
            for r in &a.residents {
                if !self.agents.contains_key(r) {
                    return Err(Error::UnknownAgent(r.clone()));
                }
                if let Some(h) = seen.insert(r, &a.id) {
                    return Err(Error::AlreadyResident {
                        child: r.clone(),
                        host: h.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    // ---- operations --------------------------------------------------------

    /// Returns a snapshot with one more promise.
    pub fn with_promise(&self, promise: Promise) -> Result<Self> {
        let mut next = self.clone();
        next.add_promise(promise)?;
        Ok(next)
    }

    /// Directed 0/1 matrix over the agents (sorted by id); `(i,j)` is set iff
    /// some promise with a non-empty body runs from `i` to `j`.
    pub fn promise_adjacency_matrix(&self) -> AdjacencyMatrix {
        let agents: Vec<AgentId> = self.agents.keys().cloned().collect();
        let index: BTreeMap<&AgentId, usize> = agents.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let n = agents.len();
        let mut cells = alloc::vec![alloc::vec![false; n]; n];
        for p in self.promises.values() {
            if p.body.is_empty() {
                continue;
            }
            let Some(&i) = index.get(&p.promiser) else {
                continue;
            };
            for q in self.promisees_of(p) {
                if let Some(&j) = index.get(&q) {
                    if i != j {
                        cells[i][j] = true;
                    }
                }
            }
        }
        AdjacencyMatrix { agents, cells }
    }

    /// Buckets every promise by [`promise_rank`].
    pub fn rank_decomposition(&self) -> BTreeMap<usize, Vec<PromiseId>> {
        let mut out: BTreeMap<usize, Vec<PromiseId>> = BTreeMap::new();
        for (id, p) in &self.promises {
            out.entry(promise_rank(&p.body)).or_default().push(*id);
        }
        out
    }

    /// Adds `agent --(+label)--> *` and registers `label` as a name for the
    /// agent, visible to `alias_scope` (everyone when `None`).
    pub fn relabel_by_scalar(
        &self,
        agent: &AgentId,
        label: &str,
        alias_scope: Option<BTreeSet<AgentId>>,
    ) -> Result<Self> {
        if !self.agents.contains_key(agent) {
            return Err(Error::UnknownAgent(agent.clone()));
        }
        let scope = match alias_scope {
            Some(s) => Target::Agents(s),
            None => Target::Wildcard,
        };
        let wanted = self.materialize(&scope, None);
        for a in self.aliases.iter().filter(|a| a.label == label) {
            let held = self.materialize(&a.scope, None);
            if !held.is_disjoint(&wanted) {
                return Err(Error::DuplicateAlias {
                    label: label.to_string(),
                    holder: a.agent.clone(),
                });
            }
        }
        let mut next = self.clone();
        let promise = Promise::new(agent.clone(), Target::Wildcard, Body::offer(label));
        let promise = match &scope {
            Target::Wildcard => promise,
            extra => promise.with_scope(extra.clone()),
        };
        next.add_promise(promise)?;
        next.aliases.push(Alias {
            label: label.to_string(),
            agent: agent.clone(),
            scope,
        });
        Ok(next)
    }

    /// Looks a label up from the point of view of `observer`.
    pub fn resolve_alias(&self, label: &str, observer: &AgentId) -> Option<&AgentId> {
        self.aliases
            .iter()
            .find(|a| a.label == label && a.scope.contains(observer))
            .map(|a| &a.agent)
    }

    /// `parent` releases its resident `child` and promises it to `recipient`.
    pub fn emit(&self, parent: &AgentId, child: &AgentId, recipient: &AgentId) -> Result<Self> {
        let p = self
            .agents
            .get(parent)
            .ok_or_else(|| Error::UnknownAgent(parent.clone()))?;
        if !p.residents.contains(child) {
            return Err(Error::AutonomyViolation {
                parent: parent.clone(),
                child: child.clone(),
            });
        }
        let mut next = self.clone();
        if let Some(a) = next.agents.get_mut(parent) {
            a.residents.remove(child);
        }
        let body = Body::offer(EMIT_TYPE)
            .with_symbols([child.as_str()])
            .with_refs([child.clone()]);
        next.add_promise(Promise::to(parent.clone(), recipient.clone(), body))?;
        Ok(next)
    }

    /// `recipient` takes in the free agent `child`. When `sender` has a pending
    /// emit promise for the child, the matching use-promise is recorded.
    pub fn absorb(&self, recipient: &AgentId, child: &AgentId, sender: &AgentId) -> Result<Self> {
        if recipient == child {
            return Err(Error::SelfResidency(child.clone()));
        }
        if !self.agents.contains_key(recipient) {
            return Err(Error::UnknownAgent(recipient.clone()));
        }
        if !self.agents.contains_key(child) {
            return Err(Error::UnknownAgent(child.clone()));
        }
        if let Some(host) = self.host_of(child) {
            return Err(Error::AlreadyResident {
                child: child.clone(),
                host,
            });
        }
        let offered = self.promises.values().any(|p| {
            p.promiser == *sender
                && p.promisees.contains(recipient)
                && p.body.sign == Sign::Plus
                && p.body.type_tag.contains(EMIT_TYPE)
                && p.body.agent_refs.contains(child)
        });
        let mut next = self.clone();
        next.add_resident(recipient, child)?;
        if offered && sender != recipient {
            let body = Body::use_of(EMIT_TYPE)
                .with_symbols([child.as_str()])
                .with_refs([child.clone()]);
            next.add_promise(Promise::to(recipient.clone(), sender.clone(), body))?;
        }
        Ok(next)
    }

    /// Promises whose promiser is `agent`.
    pub fn promises_by<'a>(&'a self, agent: &'a AgentId) -> impl Iterator<Item = (PromiseId, &'a Promise)> + 'a {
        self.promises().filter(move |(_, p)| p.promiser == *agent)
    }

    /// Breadth-first distances over an undirected graph restricted to `allowed`.
    pub(crate) fn bfs(
        graph: &BTreeMap<AgentId, BTreeSet<AgentId>>,
        starts: &[(AgentId, usize)],
        allowed: impl Fn(&AgentId) -> bool,
    ) -> BTreeMap<AgentId, usize> {
        let mut dist = BTreeMap::new();
        let mut queue = VecDeque::new();
        for (s, d) in starts {
            if allowed(s) && !dist.contains_key(s) {
                dist.insert(s.clone(), *d);
                queue.push_back(s.clone());
            }
        }
        while let Some(a) = queue.pop_front() {
            let d = dist[&a];
            if let Some(ns) = graph.get(&a) {
                for n in ns {
                    if allowed(n) && !dist.contains_key(n) {
                        dist.insert(n.clone(), d + 1);
                        queue.push_back(n.clone());
                    }
                }
            }
        }
        dist
    }
}

/// Number of distinct agents a body refers to. Use-promises are at least
/// vectors: they implicitly refer to the remote offer they accept.
pub fn promise_rank(body: &Body) -> usize {
    let n = body.agent_refs.len();
    match body.sign {
        Sign::Minus => n.max(1),
        Sign::Plus => n,
    }
}

/// True iff every agent named in the body is in the promise's scope.
pub fn complete_information(p: &Promise) -> bool {
    p.body.agent_refs.iter().all(|a| p.scope.contains(a))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    pub agents: Vec<AgentId>,
    pub cells: Vec<Vec<bool>>,
}

impl AdjacencyMatrix {
    pub fn get(&self, from: &AgentId, to: &AgentId) -> bool {
        let i = self.agents.iter().position(|a| a == from);
        let j = self.agents.iter().position(|a| a == to);
        match (i, j) {
            (Some(i), Some(j)) => self.cells[i][j],
            _ => false,
        }
    }

    pub fn count(&self) -> usize {
        self.cells.iter().flatten().filter(|c| **c).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(names: &[&str]) -> BTreeSet<AgentId> {
        names.iter().map(|n| AgentId::from(*n)).collect()
    }

    /// The seven promises of the two-super-agent worked example.
    fn worked_example() -> SemanticSpacetime {
        let mut st = SemanticSpacetime::with_agents(["A1", "A2", "A3", "A4", "A5", "A6", "A7"]).unwrap();
        for (from, to, body) in [
            ("A1", "A5", Body::offer("b1")),
            ("A2", "A5", Body::offer("b1")),
            ("A4", "A5", Body::offer("b2")),
            ("A4", "A6", Body::use_of("b3")),
            ("A3", "A2", Body::offer("b4")),
            ("A2", "A4", Body::offer("b5")),
            ("A6", "A7", Body::offer("b6")),
        ] {
            st.add_promise(Promise::to(from, to, body)).unwrap();
        }
        st
    }

    #[test]
    fn rank_examples() {
        assert_eq!(promise_rank(&Body::offer("brush-teeth")), 0);
        assert_eq!(promise_rank(&Body::offer("relay").with_refs(["X", "Y"])), 2);
        assert_eq!(promise_rank(&Body::use_of("b").with_refs(["S"])), 1);
        assert_eq!(promise_rank(&Body::use_of("b")), 1);
    }

    #[test]
    fn adjacency_matrix_counts() {
        let empty = SemanticSpacetime::with_agents(["A1", "A2"]).unwrap();
        assert_eq!(empty.promise_adjacency_matrix().count(), 0);

        let one = empty.with_promise(Promise::to("A1", "A2", Body::offer("x"))).unwrap();
        let m = one.promise_adjacency_matrix();
        assert_eq!(m.count(), 1);
        assert!(m.get(&"A1".into(), &"A2".into()));
        assert!(!m.get(&"A2".into(), &"A1".into()));

        // seven distinct promiser/promisee pairs
        assert_eq!(worked_example().promise_adjacency_matrix().count(), 7);
    }

    #[test]
    fn empty_body_makes_no_link() {
        let st = SemanticSpacetime::with_agents(["A1", "A2"])
            .unwrap()
            .with_promise(Promise::to(
                "A1",
                "A2",
                Body::offer("x").with_symbols(Vec::<String>::new()),
            ))
            .unwrap();
        assert_eq!(st.promise_adjacency_matrix().count(), 0);
    }

    #[test]
    fn rank_decomposition_buckets() {
        let mut st = SemanticSpacetime::with_agents(["A", "B", "S"]).unwrap();
        st.add_promise(Promise::to("A", "B", Body::offer("x"))).unwrap();
        st.add_promise(Promise::to("A", "B", Body::offer("y"))).unwrap();
        let d = st.rank_decomposition();
        assert_eq!(d.len(), 1);
        assert_eq!(d[&0].len(), 2);

        let mut st = SemanticSpacetime::with_agents(["A", "B", "S"]).unwrap();
        st.add_promise(Promise::to("A", "B", Body::offer("x"))).unwrap();
        st.add_promise(Promise::to("B", "S", Body::use_of("y").with_refs(["S"])))
            .unwrap();
        let d = st.rank_decomposition();
        assert_eq!(d[&0].len(), 1);
        assert_eq!(d[&1].len(), 1);
    }

    #[test]
    fn complete_information_examples() {
        let scalar = Promise::to("A", "B", Body::offer("x"));
        assert!(complete_information(&scalar));
        let follow = Promise::to("A", "B", Body::offer("follow").with_refs(["X"]));
        assert!(!complete_information(&follow));
        let relay = Promise::new("A", Target::of(["X", "Y"]), Body::offer("relay").with_refs(["X", "Y"]));
        assert!(complete_information(&relay));
        assert!(complete_information(&follow.clone().with_scope(Target::one("X"))));
    }

    #[test]
    fn self_promises_and_self_references_are_rejected() {
        let mut st = SemanticSpacetime::with_agents(["A", "B"]).unwrap();
        assert_eq!(
            st.add_promise(Promise::to("A", "A", Body::offer("x"))),
            Err(Error::SelfPromise("A".into()))
        );
        assert_eq!(
            st.add_promise(Promise::to("A", "B", Body::offer("x").with_refs(["A"]))),
            Err(Error::SelfReference("A".into()))
        );
        assert_eq!(
            st.add_promise(Promise::to("A", "Z", Body::offer("x"))),
            Err(Error::UnknownAgent("Z".into()))
        );
        assert_eq!(
            st.add_promise(Promise::to("A", "B", Body::offer("x").with_valency(0))),
            Err(Error::ZeroValency)
        );
    }

    #[test]
    fn relabel_aliases() {
        let st = SemanticSpacetime::with_agents(["A0", "B", "C"]).unwrap();
        let st = st.relabel_by_scalar(&"A0".into(), "bla", None).unwrap();
        assert_eq!(st.resolve_alias("bla", &"B".into()), Some(&AgentId::from("A0")));
        assert_eq!(st.agent(&"A0".into()).unwrap().id, AgentId::from("A0"));
        assert!(matches!(
            st.relabel_by_scalar(&"A0".into(), "bla", None),
            Err(Error::DuplicateAlias { .. })
        ));

        let st = SemanticSpacetime::with_agents(["A", "B", "X", "Y"]).unwrap();
        let st = st.relabel_by_scalar(&"A".into(), "hub", Some(ids(&["X"]))).unwrap();
        let st = st.relabel_by_scalar(&"B".into(), "hub", Some(ids(&["Y"]))).unwrap();
        assert_eq!(st.resolve_alias("hub", &"X".into()), Some(&AgentId::from("A")));
        assert_eq!(st.resolve_alias("hub", &"Y".into()), Some(&AgentId::from("B")));
        assert!(st
            .relabel_by_scalar(&"B".into(), "hub", Some(ids(&["X", "Y"])))
            .is_err());
    }

    #[test]
    fn emit_and_absorb() {
        let mut st = SemanticSpacetime::with_agents(["device", "packet", "network"]).unwrap();
        st.add_resident(&"device".into(), &"packet".into()).unwrap();
        st.add_promise(Promise::to("packet", "network", Body::offer("payload")))
            .unwrap();
        let own_before: Vec<Promise> = st.promises_by(&"packet".into()).map(|(_, p)| p.clone()).collect();

        let emitted = st.emit(&"device".into(), &"packet".into(), &"network".into()).unwrap();
        assert!(!emitted
            .agent(&"device".into())
            .unwrap()
            .residents
            .contains(&"packet".into()));
        assert_eq!(
            emitted.emit(&"device".into(), &"packet".into(), &"network".into()),
            Err(Error::AutonomyViolation {
                parent: "device".into(),
                child: "packet".into()
            })
        );

        let absorbed = emitted
            .absorb(&"network".into(), &"packet".into(), &"device".into())
            .unwrap();
        assert!(absorbed
            .agent(&"network".into())
            .unwrap()
            .residents
            .contains(&"packet".into()));
        let own_after: Vec<Promise> = absorbed.promises_by(&"packet".into()).map(|(_, p)| p.clone()).collect();
        assert_eq!(own_before, own_after);
        assert!(matches!(
            absorbed.absorb(&"network".into(), &"packet".into(), &"device".into()),
            Err(Error::AlreadyResident { .. })
        ));
        absorbed.validate().unwrap();
    }
}
