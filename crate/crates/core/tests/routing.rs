use std::collections::{BTreeMap, BTreeSet, VecDeque};

use proptest::prelude::*;
use semspace_core::routing::{
    build_clos, build_flat, build_lattice, build_tree_n, clos_route, covering_conditions, route, table_cost, Address,
    AddressedSpace, LatticeOptions,
};
use semspace_core::{AgentId, Error, SemanticSpacetime};

fn l1(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn coords(space: &AddressedSpace, id: &AgentId) -> Vec<i64> {
    match &space.addresses[id] {
        Address::Metric(v) => v.clone(),
        other => panic!("not metric: {}", other),
    }
}

/// Shortest hop counts from `src` over the forwarding neighbours.
fn bfs(space: &AddressedSpace, src: &AgentId) -> BTreeMap<AgentId, usize> {
    let mut dist = BTreeMap::from([(src.clone(), 0)]);
    let mut queue = VecDeque::from([src.clone()]);
    while let Some(a) = queue.pop_front() {
        let d = dist[&a];
        for (_, n) in &space.tables[&a].entries {
            if !dist.contains_key(n) {
                dist.insert(n.clone(), d + 1);
                queue.push_back(n.clone());
            }
        }
    }
    dist
}

fn lattice_dims() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=5, 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lattice_routes_are_shortest(dims in lattice_dims(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let (_, l) = build_lattice(&SemanticSpacetime::new(), "L", &dims, &LatticeOptions::default()).unwrap();
        let ids: Vec<&AgentId> = l.addresses.keys().collect();
        let (src, dst) = (ids[a.index(ids.len())].clone(), ids[b.index(ids.len())].clone());
        let dest = coords(&l, &dst);
        let path = route(&l, &src, &Address::Metric(dest.clone())).unwrap();
        prop_assert_eq!(path.len() as i64, l1(&coords(&l, &src), &dest));
        prop_assert_eq!(path.len(), bfs(&l, &src)[&dst]);
        let mut last = l1(&coords(&l, &src), &dest);
        for hop in &path {
            let d = l1(&coords(&l, hop), &dest);
            prop_assert!(d < last);
            last = d;
        }
        prop_assert!(table_cost(&l).max_per_agent <= 2 * dims.len());
    }

    #[test]
    fn mirrored_lattice_retraces(dims in lattice_dims(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let st = SemanticSpacetime::new();
        let (_, l) = build_lattice(&st, "L", &dims, &LatticeOptions::default()).unwrap();
        let opts = LatticeOptions { mirrored: true, ..LatticeOptions::default() };
        let (_, m) = build_lattice(&st, "L", &dims, &opts).unwrap();
        let ids: Vec<&AgentId> = l.addresses.keys().collect();
        let (src, dst) = (ids[a.index(ids.len())].clone(), ids[b.index(ids.len())].clone());
        let mut there = vec![src.clone()];
        there.extend(route(&l, &src, &l.addresses[&dst]).unwrap());
        let mut back = vec![dst.clone()];
        back.extend(route(&m, &dst, &m.addresses[&src]).unwrap());
        back.reverse();
        prop_assert_eq!(there, back);
    }

    #[test]
    fn tree_routes_meet_at_common_ancestor(b in 2usize..=4, n in 1usize..=40, x in any::<prop::sample::Index>(), y in any::<prop::sample::Index>()) {
        let (_, t) = build_tree_n(&SemanticSpacetime::new(), "T", b, n).unwrap();
        // Heap index of each agent, from the order of construction.
        let parent = |k: usize| (k - 1) / b;
        let depth = |mut k: usize| { let mut d = 0; while k > 0 { k = parent(k); d += 1; } d };
        let lca = |mut i: usize, mut j: usize| {
            while i != j { if i > j { i = parent(i) } else { j = parent(j) } }
            i
        };
        let index_of: BTreeMap<&Address, usize> = {
            let mut paths: Vec<String> = vec![String::new()];
            for k in 1..n {
                let p = &paths[parent(k)];
                let seg = (k - 1) % b;
                paths.push(if p.is_empty() { seg.to_string() } else { format!("{}.{}", p, seg) });
            }
            t.addresses.values().map(|a| {
                let Address::Semantic(s) = a else { unreachable!() };
                (a, paths.iter().position(|p| p == s).unwrap())
            }).collect()
        };
        let ids: Vec<&AgentId> = t.addresses.keys().collect();
        let (src, dst) = (ids[x.index(n)], ids[y.index(n)]);
        let (i, j) = (index_of[&t.addresses[src]], index_of[&t.addresses[dst]]);
        let path = route(&t, src, &t.addresses[dst]).unwrap();
        prop_assert_eq!(path.len(), depth(i) + depth(j) - 2 * depth(lca(i, j)));
        prop_assert_eq!(table_cost(&t).total_entries, 2 * (n - 1));
    }

    #[test]
    fn flat_route_goes_the_short_way(n in 1usize..=24, x in any::<prop::sample::Index>(), y in any::<prop::sample::Index>()) {
        let (_, f) = build_flat(&SemanticSpacetime::new(), "F", n).unwrap();
        prop_assert_eq!(table_cost(&f).total_entries, n * (n - 1));
        let ids: Vec<&AgentId> = f.addresses.keys().collect();
        let (i, j) = (x.index(n), y.index(n));
        let path = route(&f, ids[i], &f.addresses[ids[j]]).unwrap();
        let gap = i.abs_diff(j);
        prop_assert_eq!(path.len(), gap.min(n - gap));
    }
}

#[test]
fn only_the_addressee_accepts() {
    let st = SemanticSpacetime::new();
    let (_, l) = build_lattice(&st, "L", &[4, 3], &LatticeOptions::default()).unwrap();
    let (_, t) = build_tree_n(&st, "T", 3, 20).unwrap();
    let (_, f) = build_flat(&st, "F", 9).unwrap();
    for space in [&l, &t, &f] {
        for src in space.addresses.keys() {
            for (dst, addr) in &space.addresses {
                let path = route(space, src, addr).unwrap();
                let accepted: Vec<&AgentId> = std::iter::once(src)
                    .chain(path.iter())
                    .filter(|a| space.accepts_message(a, addr))
                    .collect();
                assert_eq!(accepted, [dst]);
            }
        }
    }
}

#[test]
fn covering_holds_for_ordered_spaces() {
    let (s, l) = build_lattice(&SemanticSpacetime::new(), "L", &[3, 3, 2], &LatticeOptions::default()).unwrap();
    assert!(covering_conditions(&s, &l).holds());
    let (s, f) = build_flat(&SemanticSpacetime::new(), "F", 6).unwrap();
    assert!(!covering_conditions(&s, &f).holds());
}

#[test]
fn clos_survives_any_single_cut() {
    for (t, v) in [(2, 2), (3, 2), (3, 4), (4, 2), (3, 3)] {
        let (_, fabric) = build_clos(&SemanticSpacetime::new(), "C", t, v).unwrap();
        let mut cases = vec![fabric.clone()];
        for (tenant, host) in fabric.uplinks() {
            cases.push(fabric.without_uplink(&tenant, &host).unwrap());
        }
        for f in &cases {
            for a in f.leaves() {
                for b in f.leaves() {
                    let path = clos_route(f, a, b).unwrap();
                    let mut at = a;
                    for hop in &path {
                        let linked = f.up[at].contains(hop) || f.down[at].contains(hop);
                        assert!(linked, "{} -> {} is not a live binding", at, hop);
                        at = hop;
                    }
                    assert_eq!(at, b);
                    // Valley-free: tiers rise, then fall.
                    let tiers: Vec<usize> = std::iter::once(a).chain(&path).map(|x| f.tier(x).unwrap()).collect();
                    let peak = tiers.iter().position(|x| x == tiers.iter().max().unwrap()).unwrap();
                    assert!(tiers[..=peak].windows(2).all(|w| w[1] == w[0] + 1));
                    assert!(tiers[peak..].windows(2).all(|w| w[1] + 1 == w[0]));
                }
            }
        }
    }
}

#[test]
fn clos_bindings_match_the_pattern() {
    let (st, f) = build_clos(&SemanticSpacetime::new(), "C", 3, 4).unwrap();
    st.validate().unwrap();
    let top: BTreeSet<&AgentId> = f.tiers[2].iter().collect();
    for (a, ups) in &f.up {
        assert_eq!(ups.len(), if top.contains(a) { 0 } else { 2 });
    }
    assert!(f.down.values().all(|d| d.len() <= 4));
    assert!(matches!(
        clos_route(&f, &"C.T1.000".into(), &"C.T0.000".into()),
        Err(Error::UnknownAgent(_))
    ));
}
