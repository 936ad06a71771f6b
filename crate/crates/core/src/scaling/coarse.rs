use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::body::{Body, Sign, TypeTag};
use crate::error::{Error, Result};
use crate::id::AgentId;
use crate::language::{superagent_language, Alphabet};
use crate::promise::{Promise, Target};
use crate::spacetime::{Agent, SemanticSpacetime};

/// The coarse-graining map G: member agent to the id of its group.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Grain {
    owner: BTreeMap<AgentId, AgentId>,
    groups: BTreeMap<AgentId, BTreeSet<AgentId>>,
}

/// Promises sharing a key collapse into one coarse promise when the promiser is a group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CoarseKey {
    pub promiser: AgentId,
    pub promisees: Target,
    pub sign: Sign,
}

impl CoarseKey {
    fn of(p: &Promise) -> CoarseKey {
        CoarseKey {
            promiser: p.promiser.clone(),
            promisees: p.promisees.clone(),
            sign: p.body.sign,
        }
    }
}

impl Grain {
    pub fn from_groups<I>(groups: I) -> Grain
    where
        I: IntoIterator<Item = (AgentId, BTreeSet<AgentId>)>,
    {
        let mut g = Grain::default();
        for (id, members) in groups {
            for m in &members {
                g.owner.insert(m.clone(), id.clone());
            }
            g.groups.insert(id, members);
        }
        g
    }

    pub fn g(&self, a: &AgentId) -> AgentId {
        self.owner.get(a).unwrap_or(a).clone()
    }

    pub fn is_owner(&self, a: &AgentId) -> bool {
        self.groups.contains_key(a)
    }

    fn moved(&self, a: &AgentId) -> bool {
        self.owner.contains_key(a) || self.groups.contains_key(a)
    }

    fn map_set<'a>(&self, it: impl Iterator<Item = &'a AgentId>, own: &AgentId) -> BTreeSet<AgentId> {
        it.map(|a| self.g(a)).filter(|a| a != own).collect()
    }

    fn map_target(&self, t: &Target, own: &AgentId) -> Target {
        match t {
            Target::Wildcard => Target::Wildcard,
            Target::Agents(s) => Target::Agents(self.map_set(s.iter(), own)),
        }
    }

    /// True when G changes the promise at all.
    pub fn touches(&self, p: &Promise) -> bool {
        self.moved(&p.promiser)
            || p.promisees.explicit().any(|a| self.moved(a))
            || p.scope.explicit().any(|a| self.moved(a))
            || p.body.agent_refs.iter().any(|a| self.moved(a))
    }

    fn mentions_owner(&self, p: &Promise) -> bool {
        self.is_owner(&p.promiser)
            || p.promisees.explicit().any(|a| self.is_owner(a))
            || p.scope.explicit().any(|a| self.is_owner(a))
            || p.body.agent_refs.iter().any(|a| self.is_owner(a))
    }

    /// Coarse key of a touched fine promise; `None` when it stays inside one group.
    pub fn key(&self, p: &Promise) -> Option<CoarseKey> {
        let own = self.g(&p.promiser);
        let promisees = self.map_target(&p.promisees, &own);
        if self.is_owner(&own) && promisees == Target::Agents(BTreeSet::new()) {
            return None;
        }
        Some(CoarseKey {
            promiser: own,
            promisees,
            sign: p.body.sign,
        })
    }

    /// The fine promise as seen at the coarse scale, before any merging.
    pub fn coarse_promise(&self, p: &Promise) -> Promise {
        let own = self.g(&p.promiser);
        let promisees = self.map_target(&p.promisees, &own);
        let scope = self.map_target(&p.scope, &own).union(&promisees);
        let mut body = p.body.clone();
        body.agent_refs = self.map_set(p.body.agent_refs.iter(), &own);
        Promise {
            promiser: own,
            promisees,
            body,
            scope,
        }
    }

    fn directory_owner(&self, p: &Promise) -> Option<AgentId> {
        let own = self.g(&p.promiser);
        if self.is_owner(&own) {
            return Some(own);
        }
        let c = self.coarse_promise(p);
        let found = c
            .promisees
            .explicit()
            .chain(c.scope.explicit())
            .chain(c.body.agent_refs.iter())
            .find(|a| self.is_owner(a))
            .cloned();
        found
    }
}

/// One fine-grained promise hidden by coarse-graining, with its language.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DirEntry {
    pub type_tag: TypeTag,
    pub fine: Promise,
    pub language: BTreeSet<String>,
}

impl DirEntry {
    pub fn new(fine: Promise) -> DirEntry {
        DirEntry {
            type_tag: fine.body.type_tag.clone(),
            language: fine.body.symbols.keys().cloned().collect(),
            fine,
        }
    }
}

/// What a super-agent's boundary hides: the member set and every fine
/// promise that was removed or merged away.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Directory {
    pub owner: AgentId,
    pub scale: String,
    pub members: BTreeSet<AgentId>,
    pub entries: Vec<DirEntry>,
}

impl Directory {
    pub fn new(owner: AgentId, scale: &str, members: BTreeSet<AgentId>) -> Directory {
        Directory {
            owner,
            scale: scale.to_string(),
            members,
            entries: Vec::new(),
        }
    }

    /// Entries whose type includes `type_name`.
    pub fn entries_for<'a>(&'a self, type_name: &'a str) -> impl Iterator<Item = &'a DirEntry> + 'a {
        self.entries.iter().filter(move |e| e.type_tag.contains(type_name))
    }

    pub fn types(&self) -> BTreeSet<&str> {
        self.entries.iter().flat_map(|e| e.type_tag.names()).collect()
    }

    /// Members that make or receive a promise of `type_name`.
    pub fn members_for(&self, type_name: &str) -> BTreeSet<AgentId> {
        let mut out = BTreeSet::new();
        for e in self.entries_for(type_name) {
            if self.members.contains(&e.fine.promiser) {
                out.insert(e.fine.promiser.clone());
            }
            out.extend(
                e.fine
                    .promisees
                    .explicit()
                    .filter(|a| self.members.contains(*a))
                    .cloned(),
            );
        }
        out
    }

    /// Union of the member languages recorded in the entries.
    pub fn language(&self) -> Alphabet {
        let subs: Vec<Alphabet> = self
            .entries
            .iter()
            .filter_map(|e| Alphabet::new(e.language.iter().cloned()).ok())
            .collect();
        superagent_language(&subs)
    }
}

/// Applies a registered scale. Returns the coarse snapshot and one directory
/// per super-agent of the scale.
pub fn coarse_grain(st: &SemanticSpacetime, scale: &str) -> Result<(SemanticSpacetime, Vec<Directory>)> {
    let sc = st.scale(scale).ok_or_else(|| Error::UnknownScale(scale.into()))?;
    let grain = sc.grain();
    let mut dirs: BTreeMap<AgentId, Directory> = grain
        .groups
        .iter()
        .map(|(id, m)| (id.clone(), Directory::new(id.clone(), scale, m.clone())))
        .collect();

    let mut coarse = SemanticSpacetime::new();
    coarse.set_adjacency_type(st.adjacency_type());
    for a in st.agents() {
        if grain.owner.contains_key(&a.id) {
            continue;
        }
        let mut kept = a.clone();
        kept.residents.retain(|r| !grain.owner.contains_key(r));
        coarse.add_agent(kept)?;
    }
    for id in grain.groups.keys() {
        coarse.add_agent(Agent::new(id.clone()))?;
        coarse.mark_coarse(id.clone());
    }
    for (id, members) in st.groups() {
        if grain.is_owner(id) {
            continue;
        }
        let mapped: BTreeSet<AgentId> = members.iter().map(|a| grain.g(a)).collect();
        coarse.declare_group(id.clone(), mapped)?;
        if let Some(gw) = st.gateway(id) {
            if coarse.agent(gw).is_some() {
                coarse.set_gateway(id, gw)?;
            }
        }
    }
    for alias in st.aliases() {
        if !grain.moved(&alias.agent) {
            coarse.insert_alias(alias.clone());
        }
    }

    let mut out: Vec<Promise> = Vec::new();
    let mut merged: BTreeMap<CoarseKey, usize> = BTreeMap::new();
    for (_, p) in st.promises() {
        if !grain.touches(p) {
            out.push(p.clone());
            continue;
        }
        let owner = match grain.key(p) {
            None => Some(grain.g(&p.promiser)),
            Some(_) => grain.directory_owner(p),
        };
        if let Some(d) = owner.and_then(|o| dirs.get_mut(&o)) {
            d.entries.push(DirEntry::new(p.clone()));
        }
        let Some(key) = grain.key(p) else { continue };
        let c = grain.coarse_promise(p);
        if !grain.is_owner(&key.promiser) {
            out.push(c);
            continue;
        }
        match merged.get(&key) {
            Some(&i) => {
                let prev = &mut out[i];
                prev.body = prev.body.merge_max(&c.body);
                prev.scope = prev.scope.union(&c.scope);
            }
            None => {
                merged.insert(key, out.len());
                out.push(c);
            }
        }
    }
    for p in out {
        coarse.add_promise(p)?;
    }
    Ok((coarse, dirs.into_values().collect()))
}

/// Re-expands coarse promises through their directories.
///
/// Promises that do not involve a super-agent pass through. Each group of
/// coarse promises sharing a key is replaced by the directory entries with
/// that key; interior entries are restored as they were.
pub fn resolve(coarse: &SemanticSpacetime, dirs: &[Directory]) -> Result<SemanticSpacetime> {
    let grain = Grain::from_groups(dirs.iter().map(|d| (d.owner.clone(), d.members.clone())));

    let mut missing: BTreeSet<String> = BTreeSet::new();
    let mut unresolved: Vec<String> = Vec::new();
    for a in coarse.agent_ids() {
        if coarse.is_coarse_agent(a) && !grain.is_owner(a) {
            for (_, p) in coarse.promises() {
                if p.promiser == *a || p.promisees.contains(a) && !p.promisees.is_wildcard() {
                    missing.extend(p.body.type_tag.names().map(String::from));
                    unresolved.push(p.to_string());
                }
            }
        }
    }

    let mut by_key: BTreeMap<CoarseKey, Vec<&DirEntry>> = BTreeMap::new();
    let mut interior: Vec<&DirEntry> = Vec::new();
    for d in dirs {
        for e in &d.entries {
            match grain.key(&e.fine) {
                Some(k) => by_key.entry(k).or_default().push(e),
                None => interior.push(e),
            }
        }
    }

    let mut passthrough: Vec<Promise> = Vec::new();
    let mut touched: BTreeMap<CoarseKey, Vec<&Promise>> = BTreeMap::new();
    let mut order: Vec<CoarseKey> = Vec::new();
    for (_, p) in coarse.promises() {
        if grain.mentions_owner(p) {
            let k = CoarseKey::of(p);
            if !touched.contains_key(&k) {
                order.push(k.clone());
            }
            touched.entry(k).or_default().push(p);
        } else {
            passthrough.push(p.clone());
        }
    }
    for k in &order {
        let entries = by_key.get(k).map(Vec::as_slice).unwrap_or(&[]);
        for p in &touched[k] {
            let lost: Vec<&str> = p
                .body
                .type_tag
                .names()
                .filter(|t| !entries.iter().any(|e| e.type_tag.contains(t)))
                .collect();
            if !lost.is_empty() {
                missing.extend(lost.into_iter().map(String::from));
                unresolved.push(p.to_string());
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::Unresolvable {
            types: missing.into_iter().collect::<Vec<_>>().join(","),
            promises: unresolved.join("; "),
        });
    }

    let mut fine = SemanticSpacetime::new();
    fine.set_adjacency_type(coarse.adjacency_type());
    for a in coarse.agents() {
        if !grain.is_owner(&a.id) {
            fine.add_agent(a.clone())?;
            if coarse.is_coarse_agent(&a.id) {
                fine.mark_coarse(a.id.clone());
            }
        }
    }
    for d in dirs {
        for m in &d.members {
            if fine.agent(m).is_none() {
                fine.add_agent(Agent::new(m.clone()))?;
            }
        }
    }
    for d in dirs {
        fine.declare_group(d.owner.clone(), d.members.iter().cloned())?;
    }
    for (id, members) in coarse.groups() {
        let expanded: BTreeSet<AgentId> = members
            .iter()
            .flat_map(|m| match grain.groups.get(m) {
                Some(inner) => inner.iter().cloned().collect::<Vec<_>>(),
                None => alloc::vec![m.clone()],
            })
            .collect();
        fine.declare_group(id.clone(), expanded)?;
        if let Some(gw) = coarse.gateway(id) {
            fine.set_gateway(id, gw)?;
        }
    }
    for alias in coarse.aliases() {
        fine.insert_alias(alias.clone());
    }
    for p in passthrough {
        fine.add_promise(p)?;
    }
    for k in &order {
        for e in by_key.get(k).into_iter().flatten() {
            fine.add_promise(e.fine.clone())?;
        }
    }
    for e in interior {
        fine.add_promise(e.fine.clone())?;
    }
    Ok(fine)
}

/// Groups promises by (promiser, promisees): a bundle carries every signed
/// body one agent promises to one target.
pub fn bundles(st: &SemanticSpacetime) -> BTreeMap<(AgentId, Target), Vec<Body>> {
    let mut out: BTreeMap<(AgentId, Target), Vec<Body>> = BTreeMap::new();
    for (_, p) in st.promises() {
        out.entry((p.promiser.clone(), p.promisees.clone()))
            .or_default()
            .push(p.body.clone());
    }
    for v in out.values_mut() {
        v.sort();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::define_scale;
    use super::super::fixtures::*;
    use super::*;
    use alloc::format;

    fn multiset(st: &SemanticSpacetime) -> Vec<Promise> {
        let mut v: Vec<Promise> = st.promises().map(|(_, p)| p.clone()).collect();
        v.sort();
        v
    }

    fn rendered(st: &SemanticSpacetime, from: &str) -> Vec<String> {
        let mut v: Vec<String> = st
            .promises()
            .filter(|(_, p)| p.promiser.as_str() == from)
            .map(|(_, p)| format!("{}", p))
            .collect();
        v.sort();
        v
    }

    #[test]
    fn hybrid_scale_collapse() {
        let st = hybrid();
        let (coarse, dirs) = coarse_grain(&st, "Hybrid").unwrap();
        assert_eq!(rendered(&coarse, "S"), ["S -> A5 : +(b1∪b2)", "S -> A6 : -b3"]);
        assert_eq!(rendered(&coarse, "A6"), ["A6 -> A7 : +b6"]);
        assert_eq!(dirs.len(), 1);
        assert_eq!(dirs[0].entries.len(), 7);
        assert_eq!(dirs[0].entries_for("b1").count(), 2);
        assert!(coarse.promise_count() <= st.promise_count());
    }

    #[test]
    fn super_scale_is_one_bundle() {
        let st = hybrid();
        let (coarse, dirs) = coarse_grain(&st, "Super").unwrap();
        assert_eq!(coarse.promise_count(), 2);
        let b = bundles(&coarse);
        assert_eq!(b.len(), 1);
        let ((from, to), bodies) = b.into_iter().next().unwrap();
        assert_eq!(from.as_str(), "S");
        assert_eq!(to, Target::one("R"));
        let shorts: Vec<String> = bodies.iter().map(|b| format!("{}", b)).collect();
        assert_eq!(shorts, ["+(b1∪b2)", "-b3"]);
        assert_eq!(dirs.len(), 2);
    }

    #[test]
    fn round_trip_restores_every_promise() {
        let st = hybrid();
        for scale in ["Hybrid", "Super"] {
            let (coarse, dirs) = coarse_grain(&st, scale).unwrap();
            let back = resolve(&coarse, &dirs).unwrap();
            assert_eq!(multiset(&back), multiset(&st), "{}", scale);
            back.validate().unwrap();
        }
    }

    #[test]
    fn merged_body_is_union_of_entries() {
        let st = hybrid();
        let (coarse, dirs) = coarse_grain(&st, "Hybrid").unwrap();
        let grain = st.scale("Hybrid").unwrap().grain();
        for (_, p) in coarse.promises().filter(|(_, p)| p.promiser.as_str() == "S") {
            let parts: Vec<&DirEntry> = dirs[0]
                .entries
                .iter()
                .filter(|e| grain.key(&e.fine) == Some(CoarseKey::of(p)))
                .collect();
            assert!(!parts.is_empty());
            let union = parts[1..]
                .iter()
                .fold(parts[0].fine.body.clone(), |acc, e| acc.merge_max(&e.fine.body));
            assert_eq!(union, p.body);
        }
    }

    #[test]
    fn withheld_type_is_named() {
        let st = hybrid();
        let (coarse, mut dirs) = coarse_grain(&st, "Hybrid").unwrap();
        dirs[0].entries.retain(|e| !e.type_tag.contains("b3"));
        match resolve(&coarse, &dirs) {
            Err(Error::Unresolvable { types, .. }) => assert_eq!(types, "b3"),
            other => panic!("{:?}", other),
        }
        assert!(matches!(resolve(&coarse, &[]), Err(Error::Unresolvable { .. })));
    }

    #[test]
    fn identity_scale_changes_nothing() {
        let st = hybrid();
        let names: Vec<AgentId> = st.agent_ids().cloned().collect();
        let st = define_scale(&st, "Atomic", &names).unwrap();
        let (coarse, dirs) = coarse_grain(&st, "Atomic").unwrap();
        assert!(dirs.is_empty());
        assert_eq!(multiset(&coarse), multiset(&st));
        assert_eq!(multiset(&resolve(&coarse, &[]).unwrap()), multiset(&st));
    }

    #[test]
    fn promisee_rule_keeps_count() {
        let mut st = SemanticSpacetime::with_agents(["A", "B", "X"]).unwrap();
        st.add_promise(Promise::to("A", "B", Body::offer("adj"))).unwrap();
        st.add_promise(Promise::to("X", "A", Body::offer("t"))).unwrap();
        st.add_promise(Promise::to("X", "B", Body::offer("t"))).unwrap();
        st.add_promise(Promise::to("X", "B", Body::use_of("u").with_refs(["A"])))
            .unwrap();
        st.declare_group("G", ["A", "B"]).unwrap();
        let st = define_scale(&st, "M", &["G".into(), "X".into()]).unwrap();
        let (coarse, dirs) = coarse_grain(&st, "M").unwrap();
        assert_eq!(rendered(&coarse, "X").len(), 3);
        assert!(rendered(&coarse, "X").contains(&"X -> G : -u refs(G)".into()));
        assert_eq!(multiset(&resolve(&coarse, &dirs).unwrap()), multiset(&st));
    }

    #[test]
    fn sub_languages_are_recorded() {
        let st = hybrid();
        let (_, dirs) = coarse_grain(&st, "Hybrid").unwrap();
        assert_eq!(dirs[0].language().symbols(), ["adj", "b1", "b2", "b3", "b4", "b5"]);
    }
}
