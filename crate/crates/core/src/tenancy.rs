//! Occupancy, the five-promise tenancy template, multi-tenancy and namespaces.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::body::{Body, Condition, Sign, TypeTag, Valency};
use crate::error::{Error, Result};
use crate::id::{AgentId, PromiseId};
use crate::promise::{Promise, Target};
use crate::spacetime::SemanticSpacetime;

/// What to do when a resource has no free slot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Policy {
    /// Reject the new occupant.
    #[default]
    Strict,
    /// Accept it and let the queue grow.
    Lenient,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Strict => "strict",
            Policy::Lenient => "lenient",
        })
    }
}

fn offer_of<'a>(st: &'a SemanticSpacetime, host: &'a AgentId, resource: &str) -> Option<(PromiseId, &'a Promise)> {
    st.promises_by(host).find(|(_, p)| {
        p.body.sign == Sign::Plus
            && p.body.type_tag.contains(resource)
            && matches!(p.body.valency, Valency::Bounded(_))
            && p.body.condition.as_ref().is_none_or(|c| c.sign == Sign::Plus)
    })
}

/// Slots of `resource` the host offers and the slots its occupants use.
pub fn occupancy(st: &SemanticSpacetime, host: &AgentId, resource: &str) -> (u64, u64) {
    let n = offer_of(st, host, resource)
        .and_then(|(_, p)| p.body.valency.slots())
        .unwrap_or(0) as u64;
    let m = st
        .promises()
        .filter(|(_, p)| {
            p.body.sign == Sign::Minus
                && p.body.type_tag.contains(resource)
                && !p.promisees.is_wildcard()
                && p.promisees.contains(host)
        })
        .map(|(_, p)| p.body.valency.slots().unwrap_or(0) as u64)
        .sum();
    (n, m)
}

fn admit(st: &SemanticSpacetime, host: &AgentId, resource: &str, policy: Policy) -> Result<()> {
    if offer_of(st, host, resource).is_none() {
        return Err(Error::NoSuchResource {
            host: host.clone(),
            resource: resource.into(),
        });
    }
    let (n, m) = occupancy(st, host, resource);
    if m >= n && policy == Policy::Strict {
        return Err(Error::SlotExhausted {
            host: host.clone(),
            resource: resource.into(),
        });
    }
    Ok(())
}

/// `occupier --(-R#1)--> host`, consuming one slot of the host's bounded offer.
pub fn bind_occupancy(
    st: &SemanticSpacetime,
    host: &AgentId,
    occupier: &AgentId,
    resource: &str,
    policy: Policy,
) -> Result<SemanticSpacetime> {
    admit(st, host, resource, policy)?;
    st.with_promise(Promise::to(occupier.clone(), host.clone(), Body::use_of(resource)))
}

/// The five promises binding one tenant to one host.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TenancyBinding {
    pub host: AgentId,
    pub tenant: AgentId,
    /// `+R#n | C`, promised to everyone.
    pub resource: Body,
    /// `+C`, promised by the tenant.
    pub condition: Body,
    /// `+f | -R`, promised by the host.
    pub service: Body,
    /// Host offer, host `-C`, tenant `+C`, tenant `-R#1`, host `+f`.
    pub promise_ids: [PromiseId; 5],
    pub share: u64,
}

impl TenancyBinding {
    pub fn resource_type(&self) -> String {
        self.resource.type_tag.to_string()
    }

    fn condition_type(&self) -> &TypeTag {
        &self.condition.type_tag
    }

    /// Re-derives the template from `st`; lists whatever is missing or inconsistent.
    pub fn check(&self, st: &SemanticSpacetime) -> Result<()> {
        let c = self.condition_type();
        let r = &self.resource.type_tag;
        let mut missing = Vec::new();
        let h = &self.host;
        let t = &self.tenant;
        let has = |pid: PromiseId, ok: &dyn Fn(&Promise) -> bool| st.promise(pid).is_some_and(ok);
        if !has(self.promise_ids[0], &|p| {
            p.promiser == *h
                && p.promisees.is_wildcard()
                && p.body.sign == Sign::Plus
                && p.body.type_tag == *r
                && p.body
                    .condition
                    .as_ref()
                    .is_some_and(|k| k.sign == Sign::Plus && c.is_subset(&k.type_tag))
        }) {
            missing.push("host +R|C offer");
        }
        if !has(self.promise_ids[1], &|p| {
            p.promiser == *h && p.promisees.contains(t) && p.body.sign == Sign::Minus && p.body.type_tag == *c
        }) {
            missing.push("host -C");
        }
        if !has(self.promise_ids[2], &|p| {
            p.promiser == *t && p.promisees.contains(h) && p.body.sign == Sign::Plus && p.body.type_tag == *c
        }) {
            missing.push("tenant +C");
        }
        if !has(self.promise_ids[3], &|p| {
            p.promiser == *t
                && p.promisees.contains(h)
                && p.body.sign == Sign::Minus
                && p.body.type_tag == *r
                && p.body.valency == Valency::Bounded(1)
        }) {
            missing.push("tenant -R#1");
        }
        if !has(self.promise_ids[4], &|p| {
            p.promiser == *h
                && p.promisees.contains(t)
                && p.body.sign == Sign::Plus
                && p.body.condition == Some(Condition::new(Sign::Minus, r.clone()))
        }) {
            missing.push("host +f|-R");
        }
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::IncompleteTenancy(missing.join(", ")))
        }
    }

    /// Looks for the five template promises between `host` and `tenant` in `st`.
    pub fn detect(
        st: &SemanticSpacetime,
        host: &AgentId,
        tenant: &AgentId,
        resource: &str,
        condition: &str,
    ) -> Result<TenancyBinding> {
        let find = |from: &AgentId, to: Option<&AgentId>, ok: &dyn Fn(&Body) -> bool| {
            st.promises_by(from)
                .find(|(_, p)| match to {
                    Some(t) => !p.promisees.is_wildcard() && p.promisees.contains(t) && ok(&p.body),
                    None => p.promisees.is_wildcard() && ok(&p.body),
                })
                .map(|(id, p)| (id, p.body.clone()))
        };
        let parts = [
            (
                "host +R|C offer",
                find(host, None, &|b| {
                    b.sign == Sign::Plus
                        && b.type_tag.contains(resource)
                        && b.condition.as_ref().is_some_and(|c| c.type_tag.contains(condition))
                }),
            ),
            (
                "host -C",
                find(host, Some(tenant), &|b| {
                    b.sign == Sign::Minus && b.type_tag.contains(condition)
                }),
            ),
            (
                "tenant +C",
                find(tenant, Some(host), &|b| {
                    b.sign == Sign::Plus && b.type_tag.contains(condition)
                }),
            ),
            (
                "tenant -R#1",
                find(tenant, Some(host), &|b| {
                    b.sign == Sign::Minus && b.type_tag.contains(resource)
                }),
            ),
            (
                "host +f|-R",
                find(host, Some(tenant), &|b| {
                    b.sign == Sign::Plus
                        && b.condition
                            .as_ref()
                            .is_some_and(|c| c.sign == Sign::Minus && c.type_tag.contains(resource))
                }),
            ),
        ];
        let missing: Vec<&str> = parts.iter().filter(|(_, f)| f.is_none()).map(|(n, _)| *n).collect();
        if !missing.is_empty() {
            return Err(Error::IncompleteTenancy(missing.join(", ")));
        }
        let got: Vec<(PromiseId, Body)> = parts.into_iter().filter_map(|(_, f)| f).collect();
        let binding = TenancyBinding {
            host: host.clone(),
            tenant: tenant.clone(),
            resource: got[0].1.clone(),
            condition: got[2].1.clone(),
            service: got[4].1.clone(),
            promise_ids: [got[0].0, got[1].0, got[2].0, got[3].0, got[4].0],
            share: 0,
        };
        binding.check(st)?;
        Ok(binding)
    }

    pub const CSV_HEADER: &'static str = "host,tenant,resource,n,m,net,policy";

    pub fn csv_row(&self, st: &SemanticSpacetime, policy: Policy) -> String {
        let r = self.resource_type();
        let (n, m) = occupancy(st, &self.host, &r);
        alloc::format!(
            "{},{},{},{},{},{},{}",
            self.host,
            self.tenant,
            r,
            n,
            m,
            n as i64 - m as i64,
            policy
        )
    }
}

/// Installs the tenancy template. `resource` is the host's bounded `+R#n`
/// body; an existing host offer of that type to `*` is reused.
pub fn bind_tenancy(
    st: &SemanticSpacetime,
    host: &AgentId,
    tenant: &AgentId,
    resource: &Body,
    condition: &str,
    service: &Body,
    policy: Policy,
) -> Result<(SemanticSpacetime, TenancyBinding)> {
    if host == tenant {
        return Err(Error::HostIsTenant(host.clone()));
    }
    if resource.sign != Sign::Plus || resource.valency.slots().is_none() {
        return Err(Error::InvalidParameter(alloc::format!(
            "tenancy resource must be a bounded offer, got `{}`",
            resource
        )));
    }
    let r_name = resource.type_tag.to_string();
    let mut next = st.clone();
    let offer_id = match offer_of(st, host, &r_name).filter(|(_, p)| p.promisees.is_wildcard()) {
        Some((id, p)) => {
            let has_c = p
                .body
                .condition
                .as_ref()
                .is_some_and(|c| c.type_tag.contains(condition));
            if has_c {
                id
            } else {
                // Widen the offer's condition to cover this tenant's contract.
                let mut widened = p.clone();
                let tag = match &p.body.condition {
                    Some(c) => c.type_tag.union(&TypeTag::new(condition)),
                    None => TypeTag::new(condition),
                };
                widened.body.condition = Some(Condition::new(Sign::Plus, tag));
                next.remove_promise(id);
                next.add_promise(widened)?
            }
        }
        None => {
            let mut body = resource.clone();
            body.condition = Some(Condition::new(Sign::Plus, TypeTag::new(condition)));
            next.add_promise(Promise::new(host.clone(), Target::Wildcard, body))?
        }
    };
    admit(&next, host, &r_name, policy)?;
    let mut service = service.clone();
    service.sign = Sign::Plus;
    service.condition = Some(Condition::new(Sign::Minus, resource.type_tag.clone()));
    let ids = [
        offer_id,
        next.add_promise(Promise::to(host.clone(), tenant.clone(), Body::use_of(condition)))?,
        next.add_promise(Promise::to(tenant.clone(), host.clone(), Body::offer(condition)))?,
        next.add_promise(Promise::to(
            tenant.clone(),
            host.clone(),
            Body {
                sign: Sign::Minus,
                valency: Valency::Bounded(1),
                condition: None,
                agent_refs: BTreeSet::new(),
                ..resource.clone()
            },
        ))?,
        next.add_promise(Promise::to(host.clone(), tenant.clone(), service.clone()))?,
    ];
    let mut resource = next
        .promise(offer_id)
        .map(|p| p.body.clone())
        .unwrap_or_else(|| resource.clone());
    resource.agent_refs.clear();
    let binding = TenancyBinding {
        host: host.clone(),
        tenant: tenant.clone(),
        resource,
        condition: Body::offer(condition),
        service,
        promise_ids: ids,
        share: 0,
    };
    Ok((next, binding))
}

/// Tenancy points from the tenant to the host, towards the resource.
pub fn tenancy_direction(binding: &TenancyBinding) -> (AgentId, AgentId) {
    (binding.tenant.clone(), binding.host.clone())
}

/// Strongly connected groups (of two or more agents) in a set of orientation edges.
pub fn orientation_cycles(edges: &[(AgentId, AgentId)]) -> Vec<BTreeSet<AgentId>> {
    let mut succ: BTreeMap<&AgentId, BTreeSet<&AgentId>> = BTreeMap::new();
    for (a, b) in edges {
        succ.entry(a).or_default().insert(b);
        succ.entry(b).or_default();
    }
    let reach = |from: &AgentId| -> BTreeSet<&AgentId> {
        let mut seen = BTreeSet::new();
        let mut stack = alloc::vec![from];
        while let Some(x) = stack.pop() {
            for y in &succ[x] {
                if seen.insert(*y) {
                    stack.push(y);
                }
            }
        }
        seen
    };
    let reach_of: BTreeMap<&AgentId, BTreeSet<&AgentId>> = succ.keys().map(|a| (*a, reach(a))).collect();
    let mut out: Vec<BTreeSet<AgentId>> = Vec::new();
    let mut done = BTreeSet::new();
    for a in succ.keys() {
        if done.contains(*a) || !reach_of[a].contains(a) {
            continue;
        }
        let comp: BTreeSet<AgentId> = reach_of[a]
            .iter()
            .filter(|b| reach_of[**b].contains(a))
            .map(|b| (*b).clone())
            .collect();
        for c in &comp {
            done.insert(c.clone());
        }
        out.push(comp);
    }
    out
}

/// One-way binding without condition or service: `host +R -> tenant`, `tenant -R -> host`.
pub fn bind_asymmetric(
    st: &SemanticSpacetime,
    host: &AgentId,
    tenant: &AgentId,
    resource: &str,
) -> Result<SemanticSpacetime> {
    let mut next = st.with_promise(Promise::to(host.clone(), tenant.clone(), Body::offer(resource)))?;
    next.add_promise(Promise::to(tenant.clone(), host.clone(), Body::use_of(resource)))?;
    Ok(next)
}

/// Mutual tenancy with no condition and no service, which is plain adjacency of type R.
pub fn symmetrize_to_adjacency(
    st: &SemanticSpacetime,
    a: &AgentId,
    b: &AgentId,
    resource: &str,
) -> Result<SemanticSpacetime> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let next = bind_asymmetric(st, lo, hi, resource)?;
    bind_asymmetric(&next, hi, lo, resource)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TenantSpec {
    pub id: AgentId,
    /// Type of the tenant's `+C` promise.
    pub condition: String,
    /// Integer share of the host's capacity.
    pub share: u64,
}

/// Binds every tenant to `host` for one shared resource `+R#n`.
///
/// Tenants are bound in id order. Under the strict policy at most `n` are
/// admitted, and declared shares may not exceed `capacity`. Tenants must not
/// already promise anything to each other.
pub fn bind_multitenancy(
    st: &SemanticSpacetime,
    host: &AgentId,
    tenants: &[TenantSpec],
    resource: &Body,
    service: &Body,
    capacity: u64,
    policy: Policy,
) -> Result<(SemanticSpacetime, Vec<TenancyBinding>)> {
    if tenants.len() < 2 {
        return Err(Error::TooFewTenants);
    }
    let mut sorted: Vec<&TenantSpec> = tenants.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    let ids: BTreeSet<&AgentId> = sorted.iter().map(|t| &t.id).collect();
    for (_, p) in st.promises() {
        if ids.contains(&p.promiser) {
            if let Some(other) = p.promisees.explicit().find(|q| ids.contains(q) && **q != p.promiser) {
                let other = other.clone();
                let (x, y) = if p.promiser < other {
                    (p.promiser.clone(), other)
                } else {
                    (other, p.promiser.clone())
                };
                return Err(Error::TenantsNotIsolated(x, y));
            }
        }
    }
    let n = resource.valency.slots().ok_or_else(|| {
        Error::InvalidParameter(alloc::format!("tenancy resource must be bounded, got `{}`", resource))
    })?;
    let r_name = resource.type_tag.to_string();
    let (_, used) = occupancy(st, host, &r_name);
    let free = (n as u64).saturating_sub(used) as usize;
    if policy == Policy::Strict && sorted.len() > free {
        return Err(Error::TenantOverflow {
            valency: n,
            overflow: sorted[free..].iter().map(|t| t.id.clone()).collect(),
        });
    }
    let requested: u64 = sorted.iter().map(|t| t.share).sum();
    if requested > capacity {
        return Err(Error::FairSharing { requested, capacity });
    }
    let mut next = st.clone();
    let mut out = Vec::new();
    for t in sorted {
        let (after, mut b) = bind_tenancy(&next, host, &t.id, resource, &t.condition, service, policy)?;
        b.share = t.share;
        next = after;
        out.push(b);
    }
    // The offer may have been widened after earlier bindings were made.
    if let Some((offer, p)) = offer_of(&next, host, &r_name) {
        let body = p.body.clone();
        for b in &mut out {
            b.promise_ids[0] = offer;
            b.resource = body.clone();
        }
    }
    Ok((next, out))
}

/// True when no promise of any type is addressed from one listed agent to
/// another. Offers to `*` name nobody in particular and do not count.
pub fn tenants_isolated(st: &SemanticSpacetime, tenants: &BTreeSet<AgentId>) -> bool {
    st.promises().all(|(_, p)| {
        !tenants.contains(&p.promiser) || p.promisees.explicit().all(|q| !tenants.contains(q) || *q == p.promiser)
    })
}

/// How interior names are made unique outside the boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NameTransform {
    /// `boundary/name`.
    Prefix,
    Table(BTreeMap<String, String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Namespace {
    pub boundary: AgentId,
    pub interior_names: BTreeSet<String>,
    /// Interior name to exterior name; injective.
    pub exterior: BTreeMap<String, String>,
}

impl Namespace {
    pub fn from_names<I>(boundary: &AgentId, names: I, transform: &NameTransform) -> Result<Namespace>
    where
        I: IntoIterator<Item = String>,
    {
        let mut interior = BTreeSet::new();
        for n in names {
            if !interior.insert(n.clone()) {
                return Err(Error::DuplicateName(n));
            }
        }
        let mut exterior = BTreeMap::new();
        for n in &interior {
            let e = apply(boundary, n, transform)?;
            exterior.insert(n.clone(), e);
        }
        check_injective(&exterior)?;
        Ok(Namespace {
            boundary: boundary.clone(),
            interior_names: interior,
            exterior,
        })
    }

    pub fn exterior_name(&self, interior: &str) -> Option<&str> {
        self.exterior.get(interior).map(String::as_str)
    }

    /// Places this namespace inside `outer`, transforming the exterior names again.
    pub fn nest(&self, outer: &AgentId, transform: &NameTransform) -> Result<Namespace> {
        let mut exterior = BTreeMap::new();
        for (i, e) in &self.exterior {
            exterior.insert(i.clone(), apply(outer, e, transform)?);
        }
        check_injective(&exterior)?;
        Ok(Namespace {
            boundary: outer.clone(),
            interior_names: self.interior_names.clone(),
            exterior,
        })
    }
}

fn apply(boundary: &AgentId, name: &str, transform: &NameTransform) -> Result<String> {
    match transform {
        NameTransform::Prefix => Ok(alloc::format!("{}/{}", boundary, name)),
        NameTransform::Table(t) => t
            .get(name)
            .cloned()
            .ok_or_else(|| Error::MissingTranslation(name.to_string())),
    }
}

fn check_injective(map: &BTreeMap<String, String>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for v in map.values() {
        if !seen.insert(v) {
            return Err(Error::NonInjective(v.clone()));
        }
    }
    Ok(())
}

/// Namespace over the names of a group's members.
pub fn make_namespace(st: &SemanticSpacetime, boundary: &AgentId, transform: &NameTransform) -> Result<Namespace> {
    let members = st
        .group(boundary)
        .ok_or_else(|| Error::UnknownSuperAgent(boundary.clone()))?;
    let names = members.iter().filter_map(|m| st.agent(m)).map(|a| a.name.clone());
    Namespace::from_names(boundary, names, transform)
}
