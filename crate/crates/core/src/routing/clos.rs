use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Address, ForwardingTable, Pattern, Scheme, TableCost, SIZE_BOUND};
use crate::body::{Body, Sign};
use crate::error::{Error, Result};
use crate::id::AgentId;
use crate::promise::Promise;
use crate::spacetime::{Agent, SemanticSpacetime};

pub const UP_TYPE: &str = "R-up";
pub const DOWN_TYPE: &str = "R-down";
pub const UP_CONDITION: &str = "C-up";
pub const DOWN_CONDITION: &str = "C-down";
pub const ADVERTISE_TYPE: &str = "f-up";

/// Tiered fabric in which each agent is a tenant of two hosts above and a
/// host to up to `v` tenants below. Tier 0 holds the leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosFabric {
    pub name: String,
    pub down_valency: u32,
    pub tiers: Vec<Vec<AgentId>>,
    /// Live upward bindings, sorted.
    pub up: BTreeMap<AgentId, Vec<AgentId>>,
    pub down: BTreeMap<AgentId, Vec<AgentId>>,
    /// Leaves each agent advertises to its hosts: everything reachable below it.
    pub advertised: BTreeMap<AgentId, BTreeSet<AgentId>>,
    tier_of: BTreeMap<AgentId, usize>,
}

const UNREACHABLE: usize = usize::MAX;

impl ClosFabric {
    pub fn tier_count(&self) -> usize {
        self.tiers.len()
    }

    pub fn tier(&self, id: &AgentId) -> Option<usize> {
        self.tier_of.get(id).copied()
    }

    pub fn leaves(&self) -> &[AgentId] {
        &self.tiers[0]
    }

    pub fn agent_count(&self) -> usize {
        self.tier_of.len()
    }

    /// Every live (tenant, host) binding.
    pub fn uplinks(&self) -> Vec<(AgentId, AgentId)> {
        self.up
            .iter()
            .flat_map(|(t, hs)| hs.iter().map(move |h| (t.clone(), h.clone())))
            .collect()
    }

    fn propagate(&mut self) {
        self.advertised.clear();
        for (k, tier) in self.tiers.iter().enumerate() {
            for a in tier {
                let set = if k == 0 {
                    core::iter::once(a.clone()).collect()
                } else {
                    self.down[a]
                        .iter()
                        .flat_map(|c| self.advertised[c].iter().cloned())
                        .collect()
                };
                self.advertised.insert(a.clone(), set);
            }
        }
    }

    /// Fabric with one binding withdrawn in both directions and
    /// advertisements recomputed.
    pub fn without_uplink(&self, tenant: &AgentId, host: &AgentId) -> Result<ClosFabric> {
        let ups = self.up.get(tenant).ok_or_else(|| Error::UnknownAgent(tenant.clone()))?;
        if !ups.contains(host) {
            return Err(Error::InvalidParameter(format!("{} is not a host of {}", host, tenant)));
        }
        let mut next = self.clone();
        next.up.get_mut(tenant).expect("tenant").retain(|h| h != host);
        next.down.get_mut(host).expect("host").retain(|t| t != tenant);
        next.propagate();
        Ok(next)
    }

    /// Tenancy and advertisement promises for every live binding.
    pub fn promises(&self) -> Vec<Promise> {
        let v = self.down_valency;
        let mut out = Vec::new();
        for (t, h) in self.uplinks() {
            out.push(Promise::to(
                t.clone(),
                h.clone(),
                Body::offer(UP_TYPE)
                    .with_valency(2)
                    .with_condition(Sign::Plus, DOWN_CONDITION),
            ));
            out.push(Promise::to(h.clone(), t.clone(), Body::use_of(UP_TYPE)));
            out.push(Promise::to(
                h.clone(),
                t.clone(),
                Body::offer(DOWN_TYPE)
                    .with_valency(v)
                    .with_condition(Sign::Plus, UP_CONDITION),
            ));
            out.push(Promise::to(t.clone(), h.clone(), Body::use_of(DOWN_TYPE)));
            let known = self.advertised[&t].iter().map(|a| String::from(a.as_str()));
            out.push(Promise::to(
                t.clone(),
                h.clone(),
                Body::offer(ADVERTISE_TYPE).with_symbols(known),
            ));
        }
        out
    }

    /// Exact-match entry per leaf below (lowest advertising tenant) plus a default up.
    pub fn tables(&self) -> BTreeMap<AgentId, ForwardingTable> {
        let mut out = BTreeMap::new();
        for tier in &self.tiers {
            for a in tier {
                let mut t = ForwardingTable::new(a.clone());
                for leaf in &self.advertised[a] {
                    if leaf == a {
                        continue;
                    }
                    if let Some(c) = self.down[a].iter().find(|c| self.advertised[*c].contains(leaf)) {
                        t.entries.push((
                            Pattern::Exact(Address::Semantic(String::from(leaf.as_str()))),
                            c.clone(),
                        ));
                    }
                }
                t.default_route = self.up[a].first().cloned();
                out.insert(a.clone(), t);
            }
        }
        out
    }

    pub fn table_cost(&self) -> TableCost {
        let tables = self.tables();
        TableCost::from_tables(Scheme::Clos, self.agent_count(), tables.values())
    }

    /// Hops from `at` to `dst`: down the advertising chain, or up and over.
    fn costs(&self, dst: &AgentId) -> BTreeMap<AgentId, usize> {
        let mut cost = BTreeMap::new();
        for (k, tier) in self.tiers.iter().enumerate().rev() {
            for a in tier {
                let c = if self.advertised[a].contains(dst) {
                    k
                } else {
                    self.up[a]
                        .iter()
                        .map(|u| cost[u])
                        .filter(|&c| c != UNREACHABLE)
                        .min()
                        .map_or(UNREACHABLE, |c| c + 1)
                };
                cost.insert(a.clone(), c);
            }
        }
        cost
    }
}

fn clos_id(name: &str, tier: usize, i: usize, width: usize) -> AgentId {
    AgentId::new(format!("{}.T{}.{:0w$}", name, tier, i, w = width))
}

/// `t` tiers; the top holds two agents and each pod of two hosts carries
/// `v` dual-homed tenants. An odd host left over hosts nobody.
pub fn build_clos(st: &SemanticSpacetime, name: &str, t: usize, v: u32) -> Result<(SemanticSpacetime, ClosFabric)> {
    if t < 2 || v < 2 {
        return Err(Error::InvalidParameter(String::from(
            "clos needs tiers >= 2 and v >= 2",
        )));
    }
    // Every tier holds at least two agents.
    if t.saturating_mul(2) > SIZE_BOUND {
        return Err(Error::SizeBound {
            size: t.saturating_mul(2),
            bound: SIZE_BOUND,
        });
    }
    let mut counts = alloc::vec![0usize; t];
    counts[t - 1] = 2;
    let mut total: usize = 2;
    for k in (0..t - 1).rev() {
        counts[k] = (counts[k + 1] / 2).checked_mul(v as usize).ok_or(Error::SizeBound {
            size: usize::MAX,
            bound: SIZE_BOUND,
        })?;
        total = total.saturating_add(counts[k]);
        if total > SIZE_BOUND {
            return Err(Error::SizeBound {
                size: total,
                bound: SIZE_BOUND,
            });
        }
    }
    let width = format!("{}", counts.iter().max().copied().unwrap_or(1) - 1)
        .len()
        .max(3);
    let tiers: Vec<Vec<AgentId>> = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| (0..c).map(|i| clos_id(name, k, i, width)).collect())
        .collect();

    let mut up: BTreeMap<AgentId, Vec<AgentId>> = BTreeMap::new();
    let mut down: BTreeMap<AgentId, Vec<AgentId>> = BTreeMap::new();
    let mut tier_of = BTreeMap::new();
    for (k, tier) in tiers.iter().enumerate() {
        for a in tier {
            up.insert(a.clone(), Vec::new());
            down.insert(a.clone(), Vec::new());
            tier_of.insert(a.clone(), k);
        }
    }
    for k in 0..t - 1 {
        for (i, a) in tiers[k].iter().enumerate() {
            let pod = i / v as usize;
            for h in [&tiers[k + 1][2 * pod], &tiers[k + 1][2 * pod + 1]] {
                up.get_mut(a).expect("tenant").push(h.clone());
                down.get_mut(h).expect("host").push(a.clone());
            }
        }
    }
    let mut fabric = ClosFabric {
        name: String::from(name),
        down_valency: v,
        tiers,
        up,
        down,
        advertised: BTreeMap::new(),
        tier_of,
    };
    fabric.propagate();

    let mut next = st.clone();
    for tier in &fabric.tiers {
        for a in tier {
            next.add_agent(Agent::new(a.clone()))?;
        }
    }
    for p in fabric.promises() {
        next.add_promise(p)?;
    }
    Ok((next, fabric))
}

/// Valley-free path between leaves: up until some agent advertises `dst`
/// below it, then down. Equal-cost uplinks go to the lowest id.
pub fn clos_route(fabric: &ClosFabric, src: &AgentId, dst: &AgentId) -> Result<Vec<AgentId>> {
    if fabric.tier(src) != Some(0) {
        return Err(Error::UnknownAgent(src.clone()));
    }
    if fabric.tier(dst) != Some(0) {
        return Err(Error::UnknownAddress(String::from(dst.as_str())));
    }
    let cost = fabric.costs(dst);
    let mut path = Vec::new();
    let mut at = src.clone();
    while &at != dst {
        let next = if fabric.advertised[&at].contains(dst) {
            fabric.down[&at]
                .iter()
                .find(|c| fabric.advertised[*c].contains(dst))
                .cloned()
        } else {
            fabric.up[&at]
                .iter()
                .filter(|u| cost[*u] != UNREACHABLE)
                .min_by_key(|u| cost[*u])
                .cloned()
        };
        at = next.ok_or_else(|| Error::NoRoute(at.clone()))?;
        path.push(at.clone());
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fabric(t: usize, v: u32) -> ClosFabric {
        build_clos(&SemanticSpacetime::new(), "C", t, v).unwrap().1
    }

    #[test]
    fn tier_sizes() {
        let f = fabric(3, 4);
        let sizes: Vec<usize> = f.tiers.iter().map(Vec::len).collect();
        assert_eq!(sizes, [8, 4, 2]);
        for (k, tier) in f.tiers.iter().enumerate() {
            for a in tier {
                if k + 1 < f.tier_count() {
                    assert_eq!(f.up[a].len(), 2);
                }
                assert!(f.down[a].len() <= 4);
            }
        }
        assert_eq!(f.leaves()[0].as_str(), "C.T0.000");
    }

    #[test]
    fn two_tier_dual_homing() {
        let (st, f) = build_clos(&SemanticSpacetime::new(), "C", 2, 2).unwrap();
        assert_eq!(f.uplinks().len(), 4);
        assert_eq!(st.promise_count(), 4 * 5);
        st.validate().unwrap();
    }

    #[test]
    fn siblings_two_hops() {
        let f = fabric(3, 4);
        let p = clos_route(&f, &"C.T0.000".into(), &"C.T0.001".into()).unwrap();
        let names: Vec<&str> = p.iter().map(AgentId::as_str).collect();
        assert_eq!(names, ["C.T1.000", "C.T0.001"]);
        assert!(clos_route(&f, &"C.T0.000".into(), &"C.T0.000".into())
            .unwrap()
            .is_empty());
        let far = clos_route(&f, &"C.T0.000".into(), &"C.T0.007".into()).unwrap();
        assert_eq!(far.len(), 4);
    }

    #[test]
    fn withdrawn_uplink_reroutes() {
        let f = fabric(3, 4);
        let cut = f.without_uplink(&"C.T0.000".into(), &"C.T1.000".into()).unwrap();
        assert!(!cut.advertised[&"C.T1.000".into()].contains(&AgentId::from("C.T0.000")));
        let p = clos_route(&cut, &"C.T0.001".into(), &"C.T0.000".into()).unwrap();
        let names: Vec<&str> = p.iter().map(AgentId::as_str).collect();
        assert_eq!(names, ["C.T1.001", "C.T0.000"]);
        let twice = cut.without_uplink(&"C.T0.000".into(), &"C.T1.001".into()).unwrap();
        assert_eq!(
            clos_route(&twice, &"C.T0.001".into(), &"C.T0.000".into()),
            Err(Error::NoRoute("C.T0.001".into()))
        );
    }

    #[test]
    fn odd_valency_leaves_a_host_idle() {
        let f = fabric(3, 3);
        let sizes: Vec<usize> = f.tiers.iter().map(Vec::len).collect();
        assert_eq!(sizes, [3, 3, 2]);
        assert!(f.down[&AgentId::from("C.T1.002")].is_empty());
    }
}
