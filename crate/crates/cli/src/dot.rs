//! Graphviz export. Every collection is walked in sorted order so the output
//! is byte-stable for a given world.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use semspace_core::{AgentId, Target};

use crate::scenario::World;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

pub fn to_dot(world: &World) -> String {
    let st = &world.st;
    let mut out = String::from("digraph semspace {\n  rankdir=LR;\n  node [shape=ellipse];\n");
    let mut clustered = BTreeSet::new();
    for (gid, members) in st.groups() {
        let _ = writeln!(out, "  subgraph {} {{", quote(&format!("cluster_{}", gid)));
        let _ = writeln!(out, "    label={};", quote(gid.as_str()));
        for m in members {
            if clustered.insert(m.clone()) {
                let _ = writeln!(out, "    {};", quote(m.as_str()));
            }
        }
        out.push_str("  }\n");
    }
    for a in st.agents() {
        if clustered.contains(&a.id) {
            continue;
        }
        if a.name == a.id.as_str() {
            let _ = writeln!(out, "  {};", quote(a.id.as_str()));
        } else {
            let _ = writeln!(out, "  {} [label={}];", quote(a.id.as_str()), quote(&a.name));
        }
    }
    let group_ids: BTreeSet<&AgentId> = st.groups().map(|(g, _)| g).collect();
    for g in &group_ids {
        let _ = writeln!(out, "  {} [shape=box];", quote(g.as_str()));
    }
    let mut edges = BTreeSet::new();
    for (_, p) in st.promises() {
        let targets: Vec<String> = match &p.promisees {
            Target::Wildcard => vec!["*".to_string()],
            t => t.explicit().map(|a| a.to_string()).collect(),
        };
        for t in targets {
            edges.insert((p.promiser.to_string(), t, p.body.to_string()));
        }
    }
    if edges.iter().any(|(_, t, _)| t == "*") {
        out.push_str("  \"*\" [shape=point];\n");
    }
    for (from, to, label) in &edges {
        let _ = writeln!(out, "  {} -> {} [label={}];", quote(from), quote(to), quote(label));
    }
    for fabric in world.fabrics.values() {
        for tier in &fabric.tiers {
            let names: Vec<String> = tier.iter().map(|a| quote(a.as_str())).collect();
            let _ = writeln!(out, "  {{ rank=same; {}; }}", names.join("; "));
        }
    }
    out.push_str("}\n");
    out
}
