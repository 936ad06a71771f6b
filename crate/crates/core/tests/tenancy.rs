use std::collections::BTreeSet;

use proptest::prelude::*;
use semspace_core::tenancy::{bind_multitenancy, occupancy, tenants_isolated, Policy, TenantSpec};
use semspace_core::valency::valence;
use semspace_core::{AgentId, Body, Error, Promise, SemanticSpacetime};

fn tenants(k: usize) -> Vec<TenantSpec> {
    (0..k)
        .map(|i| TenantSpec {
            id: AgentId::new(format!("T{:02}", i)),
            condition: "contract".into(),
            share: 1,
        })
        .collect()
}

fn host_with(k: usize) -> SemanticSpacetime {
    let mut st = SemanticSpacetime::with_agents(["H"]).unwrap();
    for t in tenants(k) {
        st.add_agent(semspace_core::Agent::new(t.id)).unwrap();
    }
    st
}

proptest! {
    #[test]
    fn admitted_tenants_stay_apart(slots in 2u32..10, k in 2usize..10) {
        let st = host_with(k);
        let r = Body::offer("space").with_valency(slots);
        let f = Body::offer("power");
        let res = bind_multitenancy(&st, &"H".into(), &tenants(k), &r, &f, 100, Policy::Strict);
        if k as u32 <= slots {
            let (after, bindings) = res.unwrap();
            prop_assert_eq!(bindings.len(), k);
            let ids: BTreeSet<AgentId> = tenants(k).into_iter().map(|t| t.id).collect();
            prop_assert!(tenants_isolated(&after, &ids));
            // Oracle: scan every promise for a tenant-to-tenant edge.
            let crossing = after.promises().filter(|(_, p)| {
                ids.contains(&p.promiser) && p.promisees.explicit().any(|q| ids.contains(q) && *q != p.promiser)
            }).count();
            prop_assert_eq!(crossing, 0);
            prop_assert_eq!(occupancy(&after, &"H".into(), "space"), (slots as u64, k as u64));
            for b in &bindings {
                prop_assert!(b.check(&after).is_ok());
            }
        } else {
            let expected: Vec<AgentId> = tenants(k).into_iter().skip(slots as usize).map(|t| t.id).collect();
            prop_assert_eq!(res.unwrap_err(), Error::TenantOverflow { valency: slots, overflow: expected });
        }
    }

    #[test]
    fn net_is_offered_minus_consumed(offers in prop::collection::vec(1u32..6, 0..4), uses in 0usize..12) {
        let mut st = SemanticSpacetime::with_agents(["P", "Q"]).unwrap();
        for n in &offers {
            st.add_promise(Promise::to("P", "Q", Body::offer("b").with_valency(*n))).unwrap();
        }
        for _ in 0..uses {
            st.add_promise(Promise::to("Q", "P", Body::use_of("b"))).unwrap();
        }
        let all: BTreeSet<AgentId> = st.agent_ids().cloned().collect();
        let r = valence(&st, "b", &all);
        let offered: u64 = offers.iter().map(|&n| n as u64).sum();
        prop_assert_eq!(r.offered, offered);
        prop_assert_eq!(r.consumed, uses as u64);
        prop_assert_eq!(r.net, offered as i64 - uses as i64);
    }
}
