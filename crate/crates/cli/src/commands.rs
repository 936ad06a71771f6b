//! Command-line surface. Every command writes its report to a caller-supplied
//! writer so tests can run commands in-process.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use semspace_core::dispatch::{dispatch, flood, DeliveryOutcome};
use semspace_core::language::is_invertible;
use semspace_core::routing::{clos_route, covering_conditions, route, table_cost, Address, AddressedSpace, TableCost};
use semspace_core::scaling::{
    absent_from_members, coarse_grain, gauss_check, irreducible_promises, resolve, super_agents, Directory, SuperAgent,
};
use semspace_core::tenancy::{orientation_cycles, tenancy_direction, tenants_isolated};
use semspace_core::valency::valence;
use semspace_core::{AgentId, Body, Promise, SemanticSpacetime, Target};

use crate::codec::{decode_directories, encode_directories};
use crate::dot::to_dot;
use crate::gen::{random_scenario, seed_from_env};
use crate::scenario::{parse_scenario, World};
use crate::scenarios::{bundled, BUNDLED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "semspace",
    version,
    about = "Promise graphs: scaling, tenancy and routing from scenario files"
)]
pub struct Cli {
    /// Scenario file, or the name of a bundled scenario (see `list`).
    #[arg(short, long, global = true)]
    pub scenario: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Flood,
    Dispatch,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Promise counts by tensor rank.
    Rank,
    /// Offered and consumed slots of one type.
    Valence {
        #[arg(long = "type")]
        type_tag: String,
        /// Restrict to these agents (comma separated); all agents by default.
        #[arg(long, value_delimiter = ',')]
        agents: Vec<String>,
    },
    /// Coarse-grain to a registered scale and print the coarse promises.
    Coarsegrain {
        #[arg(long)]
        scale: String,
        #[arg(long)]
        emit_directory: Option<PathBuf>,
    },
    /// Coarse-grain again and resolve through a saved directory file.
    Resolve {
        #[arg(long)]
        directory: PathBuf,
    },
    /// Check that interior divergence equals the exterior flux.
    Gauss {
        #[arg(long = "super")]
        super_agent: String,
    },
    /// Deliver a promise from an outside agent into a super-agent.
    Deliver {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long = "type", default_value = "msg")]
        type_tag: String,
    },
    /// Forward a message through an addressing scheme.
    Route {
        /// Name of a lattice, tree, flat space or Clos fabric in the scenario.
        #[arg(long)]
        scheme: String,
        /// Agent id, or an address such as `(0,0)`.
        #[arg(long, required_unless_present = "all_pairs")]
        from: Option<String>,
        #[arg(long, required_unless_present = "all_pairs")]
        to: Option<String>,
        /// Route between every ordered pair and print one CSV row each.
        #[arg(long, conflicts_with_all = ["from", "to"])]
        all_pairs: bool,
    },
    /// Forwarding-table cost of a space, or of every space of a scheme kind.
    Tablecost {
        #[arg(long)]
        scheme: String,
    },
    /// Write the promise graph as Graphviz DOT (`-` for standard output).
    ExportDot { file: PathBuf },
    /// Run every invariant that applies to the scenario.
    Check,
    /// Print a random scenario.
    Random {
        /// Defaults to SEMSPACE_SEED, then a fixed seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List bundled scenarios.
    List,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Parse(String),
    Violation(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Parse(_) => EXIT_PARSE,
            Failure::Violation(_) => EXIT_VIOLATION,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Parse(m) | Failure::Violation(m) => m,
        }
    }
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

/// Scenario text from a file path or a bundled name. A path wins when both exist.
pub fn scenario_text(arg: &str) -> Result<String, Failure> {
    match std::fs::read_to_string(arg) {
        Ok(t) => Ok(t),
        Err(e) => bundled(arg)
            .map(str::to_string)
            .ok_or_else(|| usage(format!("cannot read scenario `{}`: {}", arg, e))),
    }
}

pub fn load_world(arg: &str) -> Result<World, Failure> {
    let text = scenario_text(arg)?;
    parse_scenario(&text)
        .map(|s| s.world)
        .map_err(|e| Failure::Parse(format!("{}: {}", arg, e)))
}

/// Runs one parsed command line; the exit code follows the `EXIT_*` constants.
pub fn run(cli: &Cli, out: &mut dyn Write) -> i32 {
    match execute(cli, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Outcome {
    match &cli.command {
        Command::List => {
            for (name, text) in BUNDLED {
                let first = text.lines().next().unwrap_or("").trim_start_matches('#').trim();
                emit(out, format_args!("{}\t{}", name, first))?;
            }
            return Ok(());
        }
        Command::Random { seed } => {
            let text = random_scenario(seed.unwrap_or_else(seed_from_env));
            return out.write_all(text.as_bytes()).map_err(usage);
        }
        _ => {}
    }
    let arg = cli
        .scenario
        .as_deref()
        .ok_or_else(|| usage("this command needs --scenario"))?;
    let world = load_world(arg)?;
    match &cli.command {
        Command::Rank => rank(&world, out),
        Command::Valence { type_tag, agents } => valence_cmd(&world, type_tag, agents, out),
        Command::Coarsegrain { scale, emit_directory } => coarsegrain(&world, scale, emit_directory.as_ref(), out),
        Command::Resolve { directory } => resolve_cmd(&world, directory, out),
        Command::Gauss { super_agent } => gauss(&world, super_agent, out),
        Command::Deliver {
            mode,
            from,
            to,
            type_tag,
        } => deliver(&world, *mode, from, to, type_tag, out),
        Command::Route {
            scheme,
            from,
            to,
            all_pairs,
        } => {
            if *all_pairs {
                route_all(&world, scheme, out)
            } else {
                let (from, to) = (from.as_deref().unwrap_or(""), to.as_deref().unwrap_or(""));
                route_one(&world, scheme, from, to, out)
            }
        }
        Command::Tablecost { scheme } => tablecost(&world, scheme, out),
        Command::ExportDot { file } => {
            let dot = to_dot(&world);
            if file.as_os_str() == "-" {
                out.write_all(dot.as_bytes()).map_err(usage)
            } else {
                std::fs::write(file, dot).map_err(usage)
            }
        }
        Command::Check => check(&world, out),
        Command::List | Command::Random { .. } => unreachable!("handled above"),
    }
}

fn emit(out: &mut dyn Write, args: std::fmt::Arguments<'_>) -> Outcome {
    writeln!(out, "{}", args).map_err(usage)
}

fn rank(world: &World, out: &mut dyn Write) -> Outcome {
    emit(out, format_args!("rank,promises"))?;
    for (r, ids) in world.st.rank_decomposition() {
        emit(out, format_args!("{},{}", r, ids.len()))?;
    }
    Ok(())
}

fn valence_cmd(world: &World, type_tag: &str, agents: &[String], out: &mut dyn Write) -> Outcome {
    let set: BTreeSet<AgentId> = if agents.is_empty() {
        world.st.agent_ids().cloned().collect()
    } else {
        let mut s = BTreeSet::new();
        for a in agents {
            let id = AgentId::new(a.as_str());
            if !world.st.contains_id(&id) {
                return Err(usage(format!("unknown agent `{}`", a)));
            }
            s.insert(id);
        }
        s
    };
    let r = valence(&world.st, type_tag, &set);
    emit(
        out,
        format_args!("{}", semspace_core::valency::ValenceReport::CSV_HEADER),
    )?;
    emit(out, format_args!("{}", r.csv_row()))
}

fn sorted_lines(st: &SemanticSpacetime) -> Vec<String> {
    let mut v: Vec<String> = st.promises().map(|(_, p)| p.to_string()).collect();
    v.sort();
    v
}

fn coarsegrain(world: &World, scale: &str, emit_dir: Option<&PathBuf>, out: &mut dyn Write) -> Outcome {
    let (coarse, dirs) = coarse_grain(&world.st, scale).map_err(usage)?;
    for line in sorted_lines(&coarse) {
        emit(out, format_args!("{}", line))?;
    }
    if let Some(path) = emit_dir {
        std::fs::write(path, encode_directories(&dirs)).map_err(usage)?;
    }
    Ok(())
}

fn multiset(st: &SemanticSpacetime) -> BTreeMap<Promise, usize> {
    let mut m = BTreeMap::new();
    for (_, p) in st.promises() {
        *m.entry(p.clone()).or_insert(0) += 1;
    }
    m
}

fn resolve_cmd(world: &World, path: &PathBuf, out: &mut dyn Write) -> Outcome {
    let text = std::fs::read_to_string(path).map_err(usage)?;
    let dirs = decode_directories(&text).map_err(|e| Failure::Parse(format!("{}: {}", path.display(), e)))?;
    let scales: BTreeSet<&str> = dirs.iter().map(|d| d.scale.as_str()).collect();
    let [scale] = scales.into_iter().collect::<Vec<_>>()[..] else {
        return Err(usage("directory file must hold exactly one scale"));
    };
    let (coarse, _) = coarse_grain(&world.st, scale).map_err(usage)?;
    let back = resolve(&coarse, &dirs).map_err(|e| Failure::Violation(e.to_string()))?;
    for line in sorted_lines(&back) {
        emit(out, format_args!("{}", line))?;
    }
    if multiset(&back) != multiset(&world.st) {
        return Err(Failure::Violation("resolved promises differ from the scenario".into()));
    }
    Ok(())
}

fn super_agent(world: &World, id: &str) -> Result<SuperAgent, Failure> {
    SuperAgent::of(&world.st, &AgentId::new(id)).map_err(usage)
}

fn gauss(world: &World, id: &str, out: &mut dyn Write) -> Outcome {
    let sa = super_agent(world, id)?;
    let r = gauss_check(&sa, &world.st);
    if r.holds {
        emit(out, format_args!("OK flux={}", r.flux()))
    } else {
        let div: Vec<Body> = r.divergence.keys().cloned().collect();
        Err(Failure::Violation(format!(
            "divergence {} differs from flux {}",
            semspace_core::body::render_short_list(&div),
            r.flux()
        )))
    }
}

/// A directory for `sa` from any scale that contains it as a super-agent.
fn directory_for(st: &SemanticSpacetime, sa: &AgentId) -> Option<Directory> {
    if let Some(d) = st.published_directory(sa) {
        return Some(d.clone());
    }
    st.scales()
        .filter(|s| s.super_agents().any(|g| g == sa))
        .find_map(|s| coarse_grain(st, &s.name).ok())
        .and_then(|(_, dirs)| dirs.into_iter().find(|d| d.owner == *sa))
}

pub fn deliver_outcome(
    world: &World,
    mode: Mode,
    from: &str,
    to: &str,
    type_tag: &str,
) -> Result<DeliveryOutcome, Failure> {
    let (from, to) = (AgentId::new(from), AgentId::new(to));
    if !world.st.contains_id(&from) {
        return Err(usage(format!("unknown agent `{}`", from)));
    }
    let p = Promise::new(from, Target::one(to.clone()), Body::offer(type_tag));
    match mode {
        Mode::Flood => flood(&world.st, &p, &to),
        Mode::Dispatch => dispatch(&world.st, &p, &to, directory_for(&world.st, &to).as_ref()),
    }
    .map_err(usage)
}

fn deliver(world: &World, mode: Mode, from: &str, to: &str, type_tag: &str, out: &mut dyn Write) -> Outcome {
    let o = deliver_outcome(world, mode, from, to, type_tag)?;
    let list = |s: &BTreeSet<AgentId>| s.iter().map(AgentId::as_str).collect::<Vec<_>>().join(",");
    emit(out, format_args!("{}", DeliveryOutcome::CSV_HEADER))?;
    emit(out, format_args!("{}", o.csv_row()))?;
    emit(out, format_args!("reached={}", list(&o.reached)))?;
    emit(out, format_args!("accepted={}", list(&o.accepted)))
}

/// `(1,2)` is a metric address; any other text is an agent id or, failing
/// that, a semantic address.
fn parse_address(text: &str) -> Result<Address, Failure> {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        inner
            .split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map(Address::Metric)
            .map_err(|_| usage(format!("bad address `{}`", text)))
    } else {
        Ok(Address::Semantic(t.to_string()))
    }
}

fn endpoint(space: &AddressedSpace, text: &str) -> Result<(AgentId, Address), Failure> {
    let id = AgentId::new(text);
    if let Some(a) = space.addresses.get(&id) {
        return Ok((id, a.clone()));
    }
    let addr = parse_address(text)?;
    let id = space
        .agent_at(&addr)
        .ok_or_else(|| usage(format!("no agent at `{}` in `{}`", text, space.name)))?;
    Ok((id.clone(), addr))
}

fn path_line(from: &AgentId, path: &[AgentId]) -> String {
    std::iter::once(from)
        .chain(path)
        .map(AgentId::as_str)
        .collect::<Vec<_>>()
        .join(" -> ")
}

fn route_one(world: &World, scheme: &str, from: &str, to: &str, out: &mut dyn Write) -> Outcome {
    let path = if let Some(space) = world.spaces.get(scheme) {
        let (src, _) = endpoint(space, from)?;
        let (_, dest) = endpoint(space, to)?;
        let path = route(space, &src, &dest).map_err(|e| Failure::Violation(e.to_string()))?;
        emit(out, format_args!("{}", path_line(&src, &path)))?;
        path
    } else if let Some(fabric) = world.fabrics.get(scheme) {
        let src = AgentId::new(from);
        let path = clos_route(fabric, &src, &AgentId::new(to)).map_err(|e| Failure::Violation(e.to_string()))?;
        emit(out, format_args!("{}", path_line(&src, &path)))?;
        path
    } else {
        return Err(usage(format!("no addressing scheme named `{}`", scheme)));
    };
    emit(out, format_args!("hops={}", path.len()))
}

fn route_all(world: &World, scheme: &str, out: &mut dyn Write) -> Outcome {
    emit(out, format_args!("from,to,hops"))?;
    let mut failures = 0;
    let mut row = |out: &mut dyn Write, a: &AgentId, b: &AgentId, r: semspace_core::Result<Vec<AgentId>>| -> Outcome {
        match r {
            Ok(p) => emit(out, format_args!("{},{},{}", a, b, p.len())),
            Err(_) => {
                failures += 1;
                emit(out, format_args!("{},{},", a, b))
            }
        }
    };
    if let Some(space) = world.spaces.get(scheme) {
        for a in space.addresses.keys() {
            for (b, addr) in &space.addresses {
                row(out, a, b, route(space, a, addr))?;
            }
        }
    } else if let Some(fabric) = world.fabrics.get(scheme) {
        for a in fabric.leaves() {
            for b in fabric.leaves() {
                row(out, a, b, clos_route(fabric, a, b))?;
            }
        }
    } else {
        return Err(usage(format!("no addressing scheme named `{}`", scheme)));
    }
    if failures > 0 {
        return Err(Failure::Violation(format!("{} pairs unreachable", failures)));
    }
    Ok(())
}

/// Costs for a named space or fabric, or for every one of a scheme kind.
pub fn costs(world: &World, scheme: &str) -> Vec<TableCost> {
    if let Some(s) = world.spaces.get(scheme) {
        return vec![table_cost(s)];
    }
    if let Some(f) = world.fabrics.get(scheme) {
        return vec![f.table_cost()];
    }
    let mut v: Vec<TableCost> = world
        .spaces
        .values()
        .filter(|s| s.scheme.to_string() == scheme)
        .map(table_cost)
        .collect();
    if scheme == "clos" {
        v.extend(world.fabrics.values().map(|f| f.table_cost()));
    }
    v
}

fn tablecost(world: &World, scheme: &str, out: &mut dyn Write) -> Outcome {
    let rows = costs(world, scheme);
    if rows.is_empty() {
        return Err(usage(format!("no addressing scheme named `{}`", scheme)));
    }
    emit(out, format_args!("{}", TableCost::CSV_HEADER))?;
    for r in rows {
        emit(out, format_args!("{}", r.csv_row()))?;
    }
    Ok(())
}

/// Every invariant that applies to the world, as `(name, result)` pairs in a
/// fixed order. `Ok` carries an optional detail for the report.
pub fn checks(world: &World) -> Vec<(String, Result<String, String>)> {
    let st = &world.st;
    let mut out: Vec<(String, Result<String, String>)> = Vec::new();
    out.push((
        "validate".into(),
        st.validate().map(|_| String::new()).map_err(|e| e.to_string()),
    ));

    for scale in st.scales() {
        let name = &scale.name;
        let trip = coarse_grain(st, name).and_then(|(coarse, dirs)| {
            let back = resolve(&coarse, &dirs)?;
            Ok((coarse.promise_count(), multiset(&back) == multiset(st)))
        });
        out.push((
            format!("round-trip {}", name),
            match trip {
                Ok((n, true)) => Ok(format!("{} coarse promises", n)),
                Ok((_, false)) => Err("resolved promises differ".into()),
                Err(e) => Err(e.to_string()),
            },
        ));
        match super_agents(st, name) {
            Ok(sas) => {
                for sa in sas {
                    let r = gauss_check(&sa, st);
                    let res = if r.holds {
                        Ok(format!("flux={}", r.flux()))
                    } else {
                        Err(format!("flux={}", r.flux()))
                    };
                    out.push((format!("gauss {}@{}", sa.id, name), res));
                }
            }
            Err(e) => out.push((format!("gauss @{}", name), Err(e.to_string()))),
        }
    }

    for (sa_id, tag, want) in &world.expectations {
        let res = SuperAgent::of(st, sa_id).map_err(|e| e.to_string()).and_then(|sa| {
            let pid = sa
                .irreducible_promises
                .iter()
                .copied()
                .find(|pid| st.promise(*pid).is_some_and(|p| p.body.type_tag == *tag))
                .ok_or_else(|| format!("{} makes no collective `{}` promise", sa_id, tag))?;
            let irreducible = irreducible_promises(&sa, st).contains(&pid) && absent_from_members(&sa, st, pid);
            let word = |b: bool| if b { "irreducible" } else { "reducible" };
            if irreducible == *want {
                Ok(word(irreducible).to_string())
            } else {
                Err(format!("expected {}, found {}", word(*want), word(irreducible)))
            }
        });
        out.push((format!("collective {} {}", sa_id, tag), res));
    }

    for (b, policy) in &world.bindings {
        out.push((
            format!("tenancy {} in {}", b.tenant, b.host),
            b.check(st).map(|_| policy.to_string()).map_err(|e| e.to_string()),
        ));
    }
    if !world.bindings.is_empty() {
        let mut per_host: BTreeMap<&AgentId, BTreeSet<AgentId>> = BTreeMap::new();
        for (b, _) in &world.bindings {
            per_host.entry(&b.host).or_default().insert(b.tenant.clone());
        }
        for (host, tenants) in per_host.into_iter().filter(|(_, t)| t.len() > 1) {
            let res = if tenants_isolated(st, &tenants) {
                Ok(String::new())
            } else {
                Err("tenants promise to each other".into())
            };
            out.push((format!("isolation {}", host), res));
        }
        let edges: Vec<(AgentId, AgentId)> = world.bindings.iter().map(|(b, _)| tenancy_direction(b)).collect();
        let cycles = orientation_cycles(&edges);
        out.push(("orientation".into(), Ok(format!("{} cycles", cycles.len()))));
    }

    for (name, m) in &world.matrices {
        let way = if is_invertible(m) { "both ways" } else { "one way" };
        out.push((
            format!("matrix {}", name),
            Ok(format!("rank {}, translates {}", m.rank(), way)),
        ));
    }

    for ns in &world.namespaces {
        out.push((
            format!("namespace {}", ns.boundary),
            Ok(format!("{} names", ns.exterior.len())),
        ));
    }

    for (name, space) in &world.spaces {
        let mut failures = 0;
        for a in space.addresses.keys() {
            for (b, addr) in &space.addresses {
                let ok = route(space, a, addr).is_ok_and(|p| p.last().unwrap_or(a) == b);
                failures += usize::from(!ok);
            }
        }
        let cover = covering_conditions(st, space);
        let res = if failures == 0 {
            Ok(format!(
                "{}; covering {}",
                table_cost(space).csv_row(),
                if cover.holds() { "holds" } else { "fails" }
            ))
        } else {
            Err(format!("{} pairs unreachable", failures))
        };
        out.push((format!("routes {}", name), res));
    }

    for (name, fabric) in &world.fabrics {
        let mut cases = vec![("intact".to_string(), fabric.clone())];
        for (t, h) in fabric.uplinks() {
            match fabric.without_uplink(&t, &h) {
                Ok(f) => cases.push((format!("without {}->{}", t, h), f)),
                Err(e) => cases.push((e.to_string(), fabric.clone())),
            }
        }
        let broken: Vec<&String> = cases
            .iter()
            .filter(|(_, f)| {
                f.leaves()
                    .iter()
                    .any(|a| f.leaves().iter().any(|b| clos_route(f, a, b).is_err()))
            })
            .map(|(n, _)| n)
            .collect();
        let res = match broken.first() {
            None => Ok(format!("all leaf pairs over {} cut cases", cases.len())),
            Some(n) => Err(format!("unreachable {}", n)),
        };
        out.push((format!("reachability {}", name), res));
    }
    out
}

fn check(world: &World, out: &mut dyn Write) -> Outcome {
    let mut failed = 0;
    for (name, res) in checks(world) {
        match res {
            Ok(detail) if detail.is_empty() => emit(out, format_args!("ok {}", name))?,
            Ok(detail) => emit(out, format_args!("ok {}: {}", name, detail))?,
            Err(e) => {
                failed += 1;
                emit(out, format_args!("FAIL {}: {}", name, e))?;
            }
        }
    }
    if failed > 0 {
        return Err(Failure::Violation(format!("{} checks failed", failed)));
    }
    Ok(())
}
