use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{relay, Address, AddressedSpace, ForwardingTable, Pattern, Scheme, SIZE_BOUND};
use crate::error::{Error, Result};
use crate::id::AgentId;
use crate::spacetime::{Agent, SemanticSpacetime};

pub const DEFAULT_LATTICE_BOUND: usize = SIZE_BOUND;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeOptions {
    /// Only `+` direction forwarding: the semi-lattice.
    pub unidirectional: bool,
    pub bound: usize,
    /// Occupied points; every point of the box when `None`.
    pub occupied: Option<Vec<Vec<i64>>>,
    /// Resolve the highest differing axis first instead of the lowest.
    pub mirrored: bool,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        LatticeOptions {
            unidirectional: false,
            bound: DEFAULT_LATTICE_BOUND,
            occupied: None,
            mirrored: false,
        }
    }
}

fn lattice_id(name: &str, p: &[i64]) -> AgentId {
    let coords: Vec<String> = p.iter().map(|x| format!("{}", x)).collect();
    AgentId::new(format!("{}{}", name, coords.join(",")))
}

fn all_points(dims: &[usize]) -> Vec<Vec<i64>> {
    let mut out = alloc::vec![Vec::new()];
    for &e in dims {
        let mut grown = Vec::with_capacity(out.len() * e);
        for p in &out {
            for x in 0..e as i64 {
                let mut q = p.clone();
                q.push(x);
                grown.push(q);
            }
        }
        out = grown;
    }
    out
}

/// Agents named `<name><x0>,<x1>,...` at each occupied tuple, with
/// forwarding along every axis between occupied neighbours.
pub fn build_lattice(
    st: &SemanticSpacetime,
    name: &str,
    dims: &[usize],
    opts: &LatticeOptions,
) -> Result<(SemanticSpacetime, AddressedSpace)> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidParameter(String::from(
            "lattice extents must be positive",
        )));
    }
    let size = dims
        .iter()
        .try_fold(1usize, |acc, &e| acc.checked_mul(e))
        .unwrap_or(usize::MAX);
    let points: BTreeSet<Vec<i64>> = match &opts.occupied {
        None => {
            if size > opts.bound {
                return Err(Error::SizeBound {
                    size,
                    bound: opts.bound,
                });
            }
            all_points(dims).into_iter().collect()
        }
        Some(pts) => {
            if pts.len() > opts.bound {
                return Err(Error::SizeBound {
                    size: pts.len(),
                    bound: opts.bound,
                });
            }
            for p in pts {
                let inside = p.len() == dims.len() && p.iter().zip(dims).all(|(&x, &e)| x >= 0 && (x as usize) < e);
                if !inside {
                    return Err(Error::InvalidParameter(format!("point {:?} outside the lattice", p)));
                }
            }
            pts.iter().cloned().collect()
        }
    };

    let mut next = st.clone();
    let mut addresses = BTreeMap::new();
    let mut tables = BTreeMap::new();
    for p in &points {
        let id = lattice_id(name, p);
        next.add_agent(Agent::new(id.clone()))?;
        addresses.insert(id.clone(), Address::Metric(p.clone()));
        tables.insert(id.clone(), ForwardingTable::new(id));
    }
    for p in &points {
        let here = lattice_id(name, p);
        for axis in 0..dims.len() {
            let mut q = p.clone();
            q[axis] += 1;
            if !points.contains(&q) {
                continue;
            }
            let there = lattice_id(name, &q);
            relay(&mut next, &here, &there)?;
            tables
                .get_mut(&here)
                .expect("table")
                .entries
                .push((Pattern::Axis { axis, positive: true }, there.clone()));
            if !opts.unidirectional {
                relay(&mut next, &there, &here)?;
                tables
                    .get_mut(&there)
                    .expect("table")
                    .entries
                    .push((Pattern::Axis { axis, positive: false }, here.clone()));
            }
        }
    }
    for t in tables.values_mut() {
        t.entries.sort();
    }
    Ok((
        next,
        AddressedSpace {
            name: String::from(name),
            scheme: Scheme::Lattice,
            addresses,
            tables,
            dims: dims.to_vec(),
            mirrored: opts.mirrored,
        },
    ))
}

/// Local comparison rule: step along the first axis (lowest, or highest
/// when mirrored) on which the tuple differs and a neighbour exists in the
/// closing direction.
pub(crate) fn next_hop(table: &ForwardingTable, here: &[i64], dest: &[i64], mirrored: bool) -> Option<AgentId> {
    let step = |axis: usize| {
        let (h, d) = (here[axis], dest[axis]);
        if h == d {
            return None;
        }
        let want = Pattern::Axis { axis, positive: d > h };
        table.entries.iter().find(|(p, _)| *p == want).map(|(_, n)| n.clone())
    };
    let n = here.len().min(dest.len());
    if mirrored {
        (0..n).rev().find_map(step)
    } else {
        (0..n).find_map(step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::routing::{route, table_cost};

    fn l1(a: &[i64], b: &[i64]) -> i64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
    }

    #[test]
    fn two_by_two() {
        let (st, l) = build_lattice(&SemanticSpacetime::new(), "L", &[2, 2], &LatticeOptions::default()).unwrap();
        assert_eq!(l.addresses.len(), 4);
        assert!(l.tables.values().all(|t| t.entries.len() == 2));
        assert_eq!(st.promise_count(), 4 * 2 * 2);
    }

    #[test]
    fn single_point() {
        let (st, l) = build_lattice(&SemanticSpacetime::new(), "L", &[1], &LatticeOptions::default()).unwrap();
        assert_eq!(l.addresses.len(), 1);
        assert_eq!(st.promise_count(), 0);
    }

    #[test]
    fn route_shortens_l1() {
        let (_, l) = build_lattice(&SemanticSpacetime::new(), "L", &[3, 3], &LatticeOptions::default()).unwrap();
        let dest = alloc::vec![2, 1];
        let path = route(&l, &"L0,0".into(), &Address::Metric(dest.clone())).unwrap();
        assert_eq!(path.len(), 3);
        assert_eq!(path[0].as_str(), "L1,0");
        let mut last = 3;
        for hop in &path {
            let Address::Metric(p) = &l.addresses[hop] else {
                panic!()
            };
            let d = l1(p, &dest);
            assert!(d < last);
            last = d;
        }
        assert!(table_cost(&l).max_per_agent <= 4);
    }

    #[test]
    fn mirrored_retraces_in_reverse() {
        let st = SemanticSpacetime::new();
        let (_, l) = build_lattice(&st, "L", &[3, 3], &LatticeOptions::default()).unwrap();
        let m_opts = LatticeOptions {
            mirrored: true,
            ..LatticeOptions::default()
        };
        let (_, m) = build_lattice(&st, "L", &[3, 3], &m_opts).unwrap();
        let mut there = alloc::vec![AgentId::from("L0,0")];
        there.extend(route(&l, &"L0,0".into(), &Address::Metric(alloc::vec![2, 1])).unwrap());
        let mut back = alloc::vec![AgentId::from("L2,1")];
        back.extend(route(&m, &"L2,1".into(), &Address::Metric(alloc::vec![0, 0])).unwrap());
        back.reverse();
        assert_eq!(there, back);
    }

    #[test]
    fn semi_lattice_is_one_way() {
        let opts = LatticeOptions {
            unidirectional: true,
            ..LatticeOptions::default()
        };
        let (_, l) = build_lattice(&SemanticSpacetime::new(), "L", &[3, 3], &opts).unwrap();
        assert!(route(&l, &"L0,0".into(), &Address::Metric(alloc::vec![2, 2])).is_ok());
        assert_eq!(
            route(&l, &"L2,2".into(), &Address::Metric(alloc::vec![0, 0])),
            Err(Error::NoRoute("L2,2".into()))
        );
    }

    #[test]
    fn sparse_points() {
        let occupied = alloc::vec![
            alloc::vec![1, 0, 0],
            alloc::vec![0, 1, 0],
            alloc::vec![1, 1, 0],
            alloc::vec![1, 1, 1],
        ];
        let opts = LatticeOptions {
            occupied: Some(occupied),
            ..LatticeOptions::default()
        };
        let (_, l) = build_lattice(&SemanticSpacetime::new(), "P", &[2, 2, 2], &opts).unwrap();
        assert_eq!(l.addresses.len(), 4);
        let path = route(&l, &"P1,0,0".into(), &Address::Metric(alloc::vec![0, 1, 0])).unwrap();
        assert_eq!(path.len(), 2);
        assert!(matches!(
            route(&l, &"P1,0,0".into(), &Address::Metric(alloc::vec![0, 0, 0])),
            Err(Error::UnknownAddress(_))
        ));
        let bad = LatticeOptions {
            occupied: Some(alloc::vec![alloc::vec![2, 0, 0]]),
            ..LatticeOptions::default()
        };
        assert!(build_lattice(&SemanticSpacetime::new(), "P", &[2, 2, 2], &bad).is_err());
    }

    #[test]
    fn oversize() {
        let opts = LatticeOptions {
            bound: 10,
            ..LatticeOptions::default()
        };
        assert_eq!(
            build_lattice(&SemanticSpacetime::new(), "L", &[4, 4], &opts).unwrap_err(),
            Error::SizeBound { size: 16, bound: 10 }
        );
    }
}
