//! Seeded random scenarios for property runs.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED_VAR: &str = "SEMSPACE_SEED";
pub const DEFAULT_SEED: u64 = 0x5e5a_5ca1e;
pub const MAX_AGENTS: usize = 64;
pub const TYPES: [&str; 4] = ["t0", "t1", "t2", "t3"];

/// `SEMSPACE_SEED` when set and numeric, else the default.
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_VAR)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// Agents `A00..`, random typed promises, and a random partition into groups
/// registered as scale `M`. Members of a group are chained with `adj`
/// promises so every group is connected.
pub fn random_scenario(seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=MAX_AGENTS);
    let name = |i: usize| format!("A{:02}", i);
    let mut out = format!("# random scenario, seed {}\n", seed);
    let names: Vec<String> = (0..n).map(name).collect();
    let _ = writeln!(out, "agent {}", names.join(" "));
    for _ in 0..rng.random_range(0..=2 * n) {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a == b {
            continue;
        }
        let ty = TYPES[rng.random_range(0..TYPES.len())];
        let sign = if rng.random_bool(0.5) { '+' } else { '-' };
        let symbols = if rng.random_bool(0.25) {
            format!("{{{}x,{}y}}", ty, ty)
        } else {
            String::new()
        };
        let valency = if sign == '+' && rng.random_bool(0.3) {
            format!(" #{}", rng.random_range(1..=8))
        } else {
            String::new()
        };
        let _ = writeln!(
            out,
            "promise {} -> {} : {}{}{}{}",
            name(a),
            name(b),
            sign,
            ty,
            symbols,
            valency
        );
    }
    let groups = rng.random_range(1..=(n / 4).max(1));
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); groups];
    for i in 0..n {
        members[rng.random_range(0..groups)].push(i);
    }
    let mut scale = Vec::new();
    for (g, m) in members.iter().enumerate() {
        match m.len() {
            0 => {}
            1 => scale.push(name(m[0])),
            _ => {
                for w in m.windows(2) {
                    let _ = writeln!(out, "promise {} -> {} : +adj", name(w[0]), name(w[1]));
                }
                let list: Vec<String> = m.iter().map(|&i| name(i)).collect();
                let _ = writeln!(out, "superagent G{} {{ {} }}", g, list.join(" "));
                scale.push(format!("G{}", g));
            }
        }
    }
    let _ = writeln!(out, "scale M {{ {} }}", scale.join(" "));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;

    #[test]
    fn same_seed_same_text() {
        assert_eq!(random_scenario(7), random_scenario(7));
        assert_ne!(random_scenario(7), random_scenario(8));
    }

    #[test]
    fn generated_text_parses() {
        for seed in 0..20 {
            let w = parse_scenario(&random_scenario(seed)).unwrap().world;
            assert!(w.st.agent_count() <= MAX_AGENTS);
            assert!(w.st.scale("M").is_some());
        }
    }
}
