use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::body::Body;
use crate::error::{Error, Result};
use crate::id::AgentId;
use crate::promise::{Promise, Target};
use crate::spacetime::SemanticSpacetime;

pub const DEFAULT_EQUIVALENCE_BOUND: usize = 12;

/// Some relabelling of agents maps one promise multiset exactly onto the other.
pub fn spacetime_equivalent(a: &SemanticSpacetime, b: &SemanticSpacetime) -> Result<bool> {
    spacetime_equivalent_bounded(a, b, DEFAULT_EQUIVALENCE_BOUND)
}

pub fn spacetime_equivalent_bounded(a: &SemanticSpacetime, b: &SemanticSpacetime, bound: usize) -> Result<bool> {
    let n = a.agent_count().max(b.agent_count());
    if n > bound {
        return Err(Error::SizeBound { size: n, bound });
    }
    if a.agent_count() != b.agent_count() || a.promise_count() != b.promise_count() {
        return Ok(false);
    }
    let sig_a = signatures(a);
    let sig_b = signatures(b);
    let mut ms_a: Vec<&Vec<Vec<u8>>> = sig_a.values().collect();
    let mut ms_b: Vec<&Vec<Vec<u8>>> = sig_b.values().collect();
    ms_a.sort();
    ms_b.sort();
    if ms_a != ms_b {
        return Ok(false);
    }

    let order: Vec<AgentId> = a.agent_ids().cloned().collect();
    let pos: BTreeMap<&AgentId, usize> = order.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let promises_a: Vec<Promise> = a.promises().map(|(_, p)| p.clone()).collect();
    let count_a = counts(promises_a.iter().cloned());
    let count_b = counts(b.promises().map(|(_, p)| p.clone()));
    // Each promise is checked at the depth where its last agent gets assigned.
    let mut due: Vec<Vec<usize>> = alloc::vec![Vec::new(); order.len()];
    let mut free = Vec::new();
    for (i, p) in promises_a.iter().enumerate() {
        let last = agents_of(p).filter_map(|x| pos.get(x)).max();
        match last {
            Some(&d) => due[d].push(i),
            None => free.push(i),
        }
    }
    let map = BTreeMap::new();
    for &i in &free {
        if !check(&promises_a[i], &map, &count_a, &count_b) {
            return Ok(false);
        }
    }
    let candidates: Vec<Vec<AgentId>> = order
        .iter()
        .map(|x| b.agent_ids().filter(|y| sig_b[*y] == sig_a[x]).cloned().collect())
        .collect();
    let mut search = Search {
        order: &order,
        candidates: &candidates,
        due: &due,
        promises: &promises_a,
        count_a: &count_a,
        count_b: &count_b,
        map,
        used: BTreeSet::new(),
    };
    Ok(search.run(0))
}

struct Search<'a> {
    order: &'a [AgentId],
    candidates: &'a [Vec<AgentId>],
    due: &'a [Vec<usize>],
    promises: &'a [Promise],
    count_a: &'a BTreeMap<Promise, usize>,
    count_b: &'a BTreeMap<Promise, usize>,
    map: BTreeMap<AgentId, AgentId>,
    used: BTreeSet<AgentId>,
}

impl Search<'_> {
    fn run(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let x = &self.order[depth];
        for y in &self.candidates[depth] {
            if self.used.contains(y) {
                continue;
            }
            self.map.insert(x.clone(), y.clone());
            self.used.insert(y.clone());
            let ok = self.due[depth]
                .iter()
                .all(|&i| check(&self.promises[i], &self.map, self.count_a, self.count_b));
            if ok && self.run(depth + 1) {
                return true;
            }
            self.used.remove(y);
            self.map.remove(x);
        }
        false
    }
}

fn agents_of(p: &Promise) -> impl Iterator<Item = &AgentId> {
    core::iter::once(&p.promiser)
        .chain(p.promisees.explicit())
        .chain(p.scope.explicit())
        .chain(p.body.agent_refs.iter())
}

fn check(
    p: &Promise,
    map: &BTreeMap<AgentId, AgentId>,
    count_a: &BTreeMap<Promise, usize>,
    count_b: &BTreeMap<Promise, usize>,
) -> bool {
    let q = relabel(p, map);
    count_b.get(&q).copied().unwrap_or(0) == count_a[p]
}

fn counts(it: impl Iterator<Item = Promise>) -> BTreeMap<Promise, usize> {
    let mut m = BTreeMap::new();
    for p in it {
        *m.entry(p).or_insert(0) += 1;
    }
    m
}

fn relabel(p: &Promise, map: &BTreeMap<AgentId, AgentId>) -> Promise {
    let f = |a: &AgentId| map.get(a).unwrap_or(a).clone();
    let t = |t: &Target| match t {
        Target::Wildcard => Target::Wildcard,
        Target::Agents(s) => Target::Agents(s.iter().map(f).collect()),
    };
    Promise {
        promiser: f(&p.promiser),
        promisees: t(&p.promisees),
        body: p.body.map_refs(f),
        scope: t(&p.scope),
    }
}

/// Label-free fingerprint of an agent: sorted outgoing and incoming bodies.
fn signatures(st: &SemanticSpacetime) -> BTreeMap<AgentId, Vec<Vec<u8>>> {
    let mut sig: BTreeMap<AgentId, Vec<Vec<u8>>> = st.agent_ids().map(|a| (a.clone(), Vec::new())).collect();
    let strip = |b: &Body| {
        let mut v = alloc::format!("{}{}", b.sign, b.type_tag).into_bytes();
        v.extend(
            alloc::format!(
                "/{:?}/{:?}/{:?}/{}",
                b.symbols,
                b.valency,
                b.condition,
                b.agent_refs.len()
            )
            .into_bytes(),
        );
        v
    };
    for (_, p) in st.promises() {
        let mut out = strip(&p.body);
        out.insert(0, b'>');
        if let Some(s) = sig.get_mut(&p.promiser) {
            s.push(out);
        }
        for q in p.promisees.explicit() {
            let mut inc = strip(&p.body);
            inc.insert(0, b'<');
            if let Some(s) = sig.get_mut(q) {
                s.push(inc);
            }
        }
    }
    for v in sig.values_mut() {
        v.sort();
    }
    sig
}
