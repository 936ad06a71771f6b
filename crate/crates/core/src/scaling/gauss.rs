use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::body::{render_short_list, Body};
use crate::spacetime::SemanticSpacetime;

use super::SuperAgent;

/// Body multisets on both sides of the flux identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussReport {
    pub holds: bool,
    /// Sum over every (promise, promisee) pair leaving an interior agent, with
    /// interior-to-interior pairs cancelling.
    pub divergence: BTreeMap<Body, i64>,
    /// Bodies of the pairs that cross from an interior agent to the outside.
    pub exterior: BTreeMap<Body, i64>,
}

impl GaussReport {
    /// Exterior flux as `{+b1,+b1,-b3}`.
    pub fn flux(&self) -> String {
        let expanded: Vec<&Body> = self
            .exterior
            .iter()
            .flat_map(|(b, n)| core::iter::repeat_n(b, (*n).max(0) as usize))
            .collect();
        render_short_list(expanded)
    }
}

fn bump(m: &mut BTreeMap<Body, i64>, b: &Body, by: i64) {
    let e = m.entry(b.clone()).or_insert(0);
    *e += by;
    if *e == 0 {
        m.remove(b);
    }
}

pub fn gauss_check(sa: &SuperAgent, st: &SemanticSpacetime) -> GaussReport {
    let inside = |a: &crate::AgentId| *a == sa.id || sa.interior.contains(a);
    let mut divergence = BTreeMap::new();
    let mut exterior = BTreeMap::new();
    for (_, p) in st.promises() {
        if !sa.interior.contains(&p.promiser) {
            continue;
        }
        for q in st.promisees_of(p) {
            bump(&mut divergence, &p.body, 1);
            if inside(&q) {
                bump(&mut divergence, &p.body, -1);
            } else {
                bump(&mut exterior, &p.body, 1);
            }
        }
    }
    GaussReport {
        holds: divergence == exterior,
        divergence,
        exterior,
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use crate::promise::Promise;

    #[test]
    fn flux_of_s() {
        let st = hybrid();
        let s = SuperAgent::of(&st, &"S".into()).unwrap();
        let r = gauss_check(&s, &st);
        assert!(r.holds);
        assert_eq!(r.flux(), "{+b1,+b1,+b2,-b3}");
    }

    #[test]
    fn closed_surface_has_no_flux() {
        let mut st = SemanticSpacetime::with_agents(["A", "B"]).unwrap();
        st.add_promise(Promise::to("A", "B", Body::offer("x"))).unwrap();
        st.declare_group("G", ["A", "B"]).unwrap();
        let g = SuperAgent::of(&st, &"G".into()).unwrap();
        let r = gauss_check(&g, &st);
        assert!(r.holds);
        assert_eq!(r.flux(), "{}");
    }
}
