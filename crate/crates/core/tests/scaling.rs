use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use semspace_core::scaling::{
    coarse_grain, define_scale, gauss_check, resolve, spacetime_equivalent, super_agents, SuperAgent,
};
use semspace_core::{AgentId, Body, Promise, SemanticSpacetime, Sign};

/// Agents, promises as (from, to, type, sign), and a group label per agent.
#[derive(Debug, Clone)]
struct Shape {
    n: usize,
    promises: Vec<(usize, usize, usize, bool)>,
    groups: Vec<usize>,
}

fn shape() -> impl Strategy<Value = Shape> {
    (2usize..=12).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec((0..n, 0..n, 0usize..4, any::<bool>()), 0..3 * n),
            prop::collection::vec(0usize..4, n),
        )
            .prop_map(|(n, promises, groups)| Shape { n, promises, groups })
    })
}

fn name(i: usize) -> AgentId {
    AgentId::new(format!("A{:02}", i))
}

/// Builds the spacetime; groups are chained with `adj` so each is connected.
fn build(s: &Shape) -> SemanticSpacetime {
    let mut st = SemanticSpacetime::with_agents((0..s.n).map(name)).unwrap();
    for &(a, b, t, plus) in &s.promises {
        if a == b {
            continue;
        }
        let ty = format!("t{}", t);
        let body = if plus { Body::offer(&ty) } else { Body::use_of(&ty) };
        st.add_promise(Promise::to(name(a), name(b), body)).unwrap();
    }
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, g) in s.groups.iter().enumerate() {
        members.entry(*g).or_default().push(i);
    }
    let mut scale = Vec::new();
    for (g, m) in &members {
        if m.len() < 2 {
            scale.push(name(m[0]));
            continue;
        }
        for w in m.windows(2) {
            st.add_promise(Promise::to(name(w[0]), name(w[1]), Body::offer("adj")))
                .unwrap();
        }
        let id = AgentId::new(format!("G{}", g));
        st.declare_group(id.clone(), m.iter().map(|&i| name(i))).unwrap();
        scale.push(id);
    }
    define_scale(&st, "M", &scale).unwrap()
}

fn multiset(st: &SemanticSpacetime) -> BTreeMap<Promise, usize> {
    let mut m = BTreeMap::new();
    for (_, p) in st.promises() {
        *m.entry(p.clone()).or_insert(0) += 1;
    }
    m
}

/// Bodies of every (promise, promisee) pair leaving the group, counted directly.
fn crossing_pairs(st: &SemanticSpacetime, sa: &SuperAgent) -> BTreeMap<Body, i64> {
    let mut out = BTreeMap::new();
    for (_, p) in st.promises() {
        if !sa.interior.contains(&p.promiser) {
            continue;
        }
        for q in p.promisees.explicit() {
            if !sa.interior.contains(q) && *q != sa.id {
                *out.entry(p.body.clone()).or_insert(0) += 1;
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn resolve_undoes_coarse_grain(s in shape()) {
        let st = build(&s);
        let (coarse, dirs) = coarse_grain(&st, "M").unwrap();
        prop_assert!(coarse.promise_count() <= st.promise_count());
        let back = resolve(&coarse, &dirs).unwrap();
        prop_assert_eq!(multiset(&back), multiset(&st));
    }

    #[test]
    fn flux_equals_crossing_pairs(s in shape()) {
        let st = build(&s);
        for sa in super_agents(&st, "M").unwrap() {
            let r = gauss_check(&sa, &st);
            prop_assert!(r.holds);
            prop_assert_eq!(&r.exterior, &crossing_pairs(&st, &sa));
        }
    }

    #[test]
    fn coarse_promises_never_point_inward(s in shape()) {
        let st = build(&s);
        let (coarse, _) = coarse_grain(&st, "M").unwrap();
        for (_, p) in coarse.promises() {
            prop_assert!(!p.promisees.contains(&p.promiser));
        }
    }

    #[test]
    fn relabelling_is_equivalent(s in shape(), rot in 0usize..12) {
        prop_assume!(s.n <= 8);
        let mut plain = s.clone();
        plain.groups = (0..s.n).collect();
        let st = build(&plain);
        let shift = |a: &AgentId| {
            let i: usize = a.as_str()[1..].parse().unwrap();
            name((i + rot) % s.n)
        };
        let mut moved = SemanticSpacetime::with_agents((0..s.n).map(name)).unwrap();
        for (_, p) in st.promises() {
            let to = shift(p.promisees.explicit().next().unwrap());
            moved.add_promise(Promise::to(shift(&p.promiser), to, p.body.map_refs(shift))).unwrap();
        }
        prop_assert_eq!(spacetime_equivalent(&st, &moved), Ok(true));
    }
}

#[test]
fn sign_flip_breaks_equivalence() {
    let mut a = SemanticSpacetime::with_agents(["X", "Y"]).unwrap();
    let mut b = a.clone();
    a.add_promise(Promise::to("X", "Y", Body::new(Sign::Plus, "t")))
        .unwrap();
    b.add_promise(Promise::to("X", "Y", Body::new(Sign::Minus, "t")))
        .unwrap();
    assert_eq!(spacetime_equivalent(&a, &b), Ok(false));
}

#[test]
fn singleton_scale_is_identity() {
    let s = Shape {
        n: 4,
        promises: vec![(0, 1, 0, true), (1, 2, 1, false), (2, 3, 2, true)],
        groups: vec![0, 1, 2, 3],
    };
    let st = build(&s);
    let (coarse, dirs) = coarse_grain(&st, "M").unwrap();
    assert!(dirs.is_empty());
    let before: BTreeSet<_> = multiset(&st).into_keys().collect();
    let after: BTreeSet<_> = multiset(&coarse).into_keys().collect();
    assert_eq!(before, after);
}
