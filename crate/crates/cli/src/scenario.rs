//! Scenario files: one declaration per line, `#` starts a comment.
//!
//! Each line is parsed and applied in order, so a line may only refer to
//! names introduced above it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use semspace_core::language::{Alphabet, TranslationMatrix};
use semspace_core::routing::{
    build_clos, build_flat, build_lattice, build_tree, build_tree_n, AddressedSpace, ClosFabric, LatticeOptions,
};
use semspace_core::scaling::define_scale;
use semspace_core::tenancy::{
    bind_multitenancy, bind_occupancy, bind_tenancy, make_namespace, NameTransform, Namespace, Policy, TenancyBinding,
    TenantSpec,
};
use semspace_core::{Agent, AgentId, Body, Promise, SemanticSpacetime, Sign, TypeTag};

use crate::syntax::{Cursor, Parsed, SyntaxError, Tok};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ScenarioError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeSize {
    Depth(usize),
    Agents(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Agents(Vec<String>),
    Name {
        agent: String,
        name: String,
    },
    Alphabet {
        name: String,
        symbols: Vec<String>,
    },
    Matrix {
        name: String,
        from: String,
        to: String,
        rows: Vec<Vec<i64>>,
    },
    Promise(Promise),
    SuperAgent {
        name: String,
        members: Vec<String>,
    },
    Scale {
        name: String,
        groups: Vec<String>,
    },
    Gateway {
        group: String,
        agent: String,
    },
    Adjacency(String),
    Resident {
        parent: String,
        child: String,
    },
    Alias {
        agent: String,
        label: String,
        scope: Option<Vec<String>>,
    },
    Policy(Policy),
    Occupy {
        occupier: String,
        host: String,
        resource: String,
    },
    Tenancy {
        host: String,
        tenant: String,
        resource: Body,
        condition: String,
        service: Body,
    },
    Multitenancy {
        host: String,
        tenants: Vec<String>,
        resource: Body,
        condition: String,
        service: Body,
        capacity: Option<u64>,
    },
    Namespace {
        boundary: String,
        transform: NameTransform,
    },
    Lattice {
        name: String,
        dims: Vec<usize>,
        options: LatticeOptions,
    },
    Tree {
        name: String,
        b: usize,
        size: TreeSize,
    },
    Flat {
        name: String,
        n: usize,
    },
    Clos {
        name: String,
        tiers: usize,
        v: u32,
    },
    /// Expected classification of the collective promise `<super> <type>`.
    Expect {
        super_agent: String,
        type_tag: TypeTag,
        irreducible: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Located {
    pub line: usize,
    pub statement: Statement,
}

/// Everything a scenario builds.
#[derive(Debug, Clone, Default)]
pub struct World {
    pub st: SemanticSpacetime,
    pub alphabets: BTreeMap<String, Alphabet>,
    pub matrices: BTreeMap<String, TranslationMatrix>,
    pub spaces: BTreeMap<String, AddressedSpace>,
    pub fabrics: BTreeMap<String, ClosFabric>,
    pub bindings: Vec<(TenancyBinding, Policy)>,
    pub namespaces: Vec<Namespace>,
    pub expectations: Vec<(AgentId, TypeTag, bool)>,
    pub policy: Policy,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub statements: Vec<Located>,
    pub world: World,
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut world = World::default();
    let mut statements = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = strip_comment(raw);
        if content.trim().is_empty() {
            continue;
        }
        let at = |e: SyntaxError| ScenarioError {
            line,
            column: e.column,
            message: e.message,
        };
        let mut c = Cursor::new(content);
        let statement = parse_line(&mut c, &world).map_err(at)?;
        apply(&mut world, &statement).map_err(|message| ScenarioError {
            line,
            column: 1,
            message,
        })?;
        statements.push(Located { line, statement });
    }
    Ok(Scenario { statements, world })
}

/// `#` after a body word followed by a digit or `*` is a valency, not a comment.
fn is_comment(line: &str, pos: usize) -> bool {
    let before = line[..pos].trim_end();
    let after = line[pos + 1..].chars().next();
    before.is_empty() || !matches!(after, Some(c) if c.is_ascii_digit() || c == '*')
}

fn strip_comment(raw: &str) -> &str {
    let mut search = 0;
    while let Some(off) = raw[search..].find('#') {
        let pos = search + off;
        if is_comment(raw, pos) {
            return &raw[..pos];
        }
        search = pos + 1;
    }
    raw
}

fn known_agent(world: &World, t: &Tok) -> Parsed<()> {
    if world.st.contains_id(&AgentId::new(t.text.as_str())) {
        Ok(())
    } else {
        Err(SyntaxError {
            column: t.column,
            message: format!("undefined agent `{}`", t.text),
        })
    }
}

fn undefined<T>(t: &Tok, kind: &str) -> Parsed<T> {
    Err(SyntaxError {
        column: t.column,
        message: format!("undefined {} `{}`", kind, t.text),
    })
}

fn count(c: &mut Cursor, key: &str) -> Parsed<usize> {
    let v = c.keyed_uint(key)?;
    usize::try_from(v).map_err(|_| SyntaxError {
        column: c.column(),
        message: format!("{} out of range", key),
    })
}

/// `R=<body>` style argument; the sign defaults to `+`.
fn keyed_body(c: &mut Cursor, world: &World, key: &str) -> Parsed<Body> {
    c.expect(&format!("{}=", key))?;
    let (body, refs) = c.body(Some(Sign::Plus))?;
    for r in &refs {
        known_agent(world, r)?;
    }
    Ok(body)
}

fn parse_line(c: &mut Cursor, world: &World) -> Parsed<Statement> {
    let kw = c.word("statement keyword")?;
    let st = match kw.text.as_str() {
        "agent" => {
            let mut names = Vec::new();
            while !c.at_end() {
                let t = c.word("agent name")?;
                if world.st.contains_id(&AgentId::new(t.text.as_str())) || names.contains(&t.text) {
                    return Err(SyntaxError {
                        column: t.column,
                        message: format!("`{}` is already declared", t.text),
                    });
                }
                names.push(t.text);
            }
            if names.is_empty() {
                return c.error("expected agent name");
            }
            Statement::Agents(names)
        }
        "name" => {
            let agent = c.word("agent")?;
            known_agent(world, &agent)?;
            Statement::Name {
                agent: agent.text,
                name: c.quoted()?,
            }
        }
        "alphabet" => {
            let name = c.word("alphabet name")?.text;
            let symbols = c.braced_words("symbol")?.into_iter().map(|t| t.text).collect();
            Statement::Alphabet { name, symbols }
        }
        "matrix" => {
            let name = c.word("matrix name")?.text;
            c.expect("from")?;
            let from = c.word("alphabet")?;
            if !world.alphabets.contains_key(&from.text) {
                return undefined(&from, "alphabet");
            }
            c.expect("to")?;
            let to = c.word("alphabet")?;
            if !world.alphabets.contains_key(&to.text) {
                return undefined(&to, "alphabet");
            }
            c.expect("rows")?;
            c.expect("[")?;
            let mut rows = Vec::new();
            while !c.eat("]") {
                if !rows.is_empty() {
                    c.expect(",")?;
                }
                c.expect("[")?;
                let mut row = Vec::new();
                while !c.eat("]") {
                    if !row.is_empty() {
                        c.expect(",")?;
                    }
                    row.push(c.int("matrix entry")?);
                }
                rows.push(row);
            }
            Statement::Matrix {
                name,
                from: from.text,
                to: to.text,
                rows,
            }
        }
        "promise" => {
            let (p, toks) = c.promise()?;
            for t in &toks {
                known_agent(world, t)?;
            }
            Statement::Promise(p)
        }
        "superagent" => {
            let name = c.word("super-agent name")?;
            if world.st.contains_id(&AgentId::new(name.text.as_str())) {
                return Err(SyntaxError {
                    column: name.column,
                    message: format!("`{}` is already declared", name.text),
                });
            }
            let members = c.braced_words("member")?;
            for m in &members {
                known_agent(world, m)?;
            }
            Statement::SuperAgent {
                name: name.text,
                members: members.into_iter().map(|t| t.text).collect(),
            }
        }
        "scale" => {
            let name = c.word("scale name")?.text;
            let groups = c.braced_words("group")?;
            for g in &groups {
                known_agent(world, g)?;
            }
            Statement::Scale {
                name,
                groups: groups.into_iter().map(|t| t.text).collect(),
            }
        }
        "gateway" => {
            let group = c.word("super-agent")?;
            if !world.st.is_group(&AgentId::new(group.text.as_str())) {
                return undefined(&group, "super-agent");
            }
            let agent = c.word("agent")?;
            known_agent(world, &agent)?;
            Statement::Gateway {
                group: group.text,
                agent: agent.text,
            }
        }
        "adjacency" => Statement::Adjacency(c.word("promise type")?.text),
        "resident" => {
            let child = c.word("agent")?;
            known_agent(world, &child)?;
            c.expect("in")?;
            let parent = c.word("agent")?;
            known_agent(world, &parent)?;
            Statement::Resident {
                parent: parent.text,
                child: child.text,
            }
        }
        "alias" => {
            let agent = c.word("agent")?;
            known_agent(world, &agent)?;
            let label = c.word("label")?.text;
            let scope = if c.eat_keyword("scope") {
                let toks = c.word_list("agent")?;
                for t in &toks {
                    known_agent(world, t)?;
                }
                Some(toks.into_iter().map(|t| t.text).collect())
            } else {
                None
            };
            Statement::Alias {
                agent: agent.text,
                label,
                scope,
            }
        }
        "policy" => {
            if c.eat_keyword("strict") {
                Statement::Policy(Policy::Strict)
            } else if c.eat_keyword("lenient") {
                Statement::Policy(Policy::Lenient)
            } else {
                return c.error("expected `strict` or `lenient`");
            }
        }
        "occupy" => {
            let occupier = c.word("occupier")?;
            known_agent(world, &occupier)?;
            let host = c.word("host")?;
            known_agent(world, &host)?;
            c.expect("R=")?;
            Statement::Occupy {
                occupier: occupier.text,
                host: host.text,
                resource: c.word("resource type")?.text,
            }
        }
        "tenancy" => {
            let host = c.word("host")?;
            known_agent(world, &host)?;
            let tenant = c.word("tenant")?;
            known_agent(world, &tenant)?;
            let resource = keyed_body(c, world, "R")?;
            c.expect("C=")?;
            let condition = c.word("condition type")?.text;
            let service = keyed_body(c, world, "f")?;
            Statement::Tenancy {
                host: host.text,
                tenant: tenant.text,
                resource,
                condition,
                service,
            }
        }
        "multitenancy" => {
            let host = c.word("host")?;
            known_agent(world, &host)?;
            let tenants = c.braced_words("tenant")?;
            for t in &tenants {
                known_agent(world, t)?;
            }
            let resource = keyed_body(c, world, "R")?;
            c.expect("C=")?;
            let condition = c.word("condition type")?.text;
            let service = keyed_body(c, world, "f")?;
            let capacity = if c.peek().is_some() {
                Some(c.keyed_uint("capacity")?)
            } else {
                None
            };
            Statement::Multitenancy {
                host: host.text,
                tenants: tenants.into_iter().map(|t| t.text).collect(),
                resource,
                condition,
                service,
                capacity,
            }
        }
        "namespace" => {
            let boundary = c.word("super-agent")?;
            if !world.st.is_group(&AgentId::new(boundary.text.as_str())) {
                return undefined(&boundary, "super-agent");
            }
            let transform = if c.eat_keyword("prefix") {
                NameTransform::Prefix
            } else if c.eat_keyword("table") {
                c.expect("(")?;
                let mut table = BTreeMap::new();
                while !c.eat(")") {
                    if !table.is_empty() {
                        c.expect(",")?;
                    }
                    let from = if c.peek() == Some('"') {
                        c.quoted()?
                    } else {
                        c.word("name")?.text
                    };
                    c.expect("=")?;
                    let to = if c.peek() == Some('"') {
                        c.quoted()?
                    } else {
                        c.word("name")?.text
                    };
                    table.insert(from, to);
                }
                NameTransform::Table(table)
            } else {
                return c.error("expected `prefix` or `table(...)`");
            };
            Statement::Namespace {
                boundary: boundary.text,
                transform,
            }
        }
        "lattice" => {
            let name = c.word("lattice name")?.text;
            c.expect("dims")?;
            let column = c.column();
            let dims = c
                .int_list("extent")?
                .into_iter()
                .map(|e| usize::try_from(e).ok().filter(|e| *e > 0))
                .collect::<Option<Vec<usize>>>()
                .ok_or(SyntaxError {
                    column,
                    message: "extents must be positive".into(),
                })?;
            let mut options = LatticeOptions::default();
            while !c.at_end() {
                if c.eat_keyword("unidirectional") {
                    options.unidirectional = true;
                } else if c.eat_keyword("mirrored") {
                    options.mirrored = true;
                } else if c.eat_keyword("points") {
                    c.expect("(")?;
                    let mut pts = Vec::new();
                    while !c.eat(")") {
                        if !pts.is_empty() {
                            c.expect(",")?;
                        }
                        pts.push(c.int_list("coordinate")?);
                    }
                    options.occupied = Some(pts);
                } else if c.eat_keyword("bound") {
                    c.expect("=")?;
                    options.bound = c.uint("bound")? as usize;
                } else {
                    return c.error("expected `unidirectional`, `mirrored`, `points(...)` or `bound=`");
                }
            }
            Statement::Lattice { name, dims, options }
        }
        "tree" => {
            let name = c.word("tree name")?.text;
            let b = count(c, "b")?;
            let size = if c.peek() == Some('n') {
                TreeSize::Agents(count(c, "n")?)
            } else {
                TreeSize::Depth(count(c, "d")?)
            };
            Statement::Tree { name, b, size }
        }
        "flat" => {
            let name = c.word("space name")?.text;
            Statement::Flat {
                name,
                n: count(c, "n")?,
            }
        }
        "clos" => {
            let name = c.word("fabric name")?.text;
            let tiers = count(c, "tiers")?;
            let column = c.column();
            let v = u32::try_from(c.keyed_uint("v")?).map_err(|_| SyntaxError {
                column,
                message: "v out of range".into(),
            })?;
            Statement::Clos { name, tiers, v }
        }
        "irreducible" | "reducible" => {
            let sa = c.word("super-agent")?;
            if !world.st.is_group(&AgentId::new(sa.text.as_str())) {
                return undefined(&sa, "super-agent");
            }
            Statement::Expect {
                super_agent: sa.text,
                type_tag: c.type_tag()?,
                irreducible: kw.text == "irreducible",
            }
        }
        other => {
            return Err(SyntaxError {
                column: kw.column,
                message: format!("unknown statement `{}`", other),
            })
        }
    };
    c.finish()?;
    Ok(st)
}

fn ids(names: &[String]) -> Vec<AgentId> {
    names.iter().map(|n| AgentId::new(n.as_str())).collect()
}

fn space_name_free(world: &World, name: &str) -> Result<(), String> {
    if world.spaces.contains_key(name) || world.fabrics.contains_key(name) {
        Err(format!("addressing scheme `{}` is already declared", name))
    } else {
        Ok(())
    }
}

/// Executes one statement against the world.
fn apply(world: &mut World, s: &Statement) -> Result<(), String> {
    let err = |e: semspace_core::Error| e.to_string();
    match s {
        Statement::Agents(names) => {
            for n in names {
                world.st.add_agent(Agent::new(n.as_str())).map_err(err)?;
            }
        }
        Statement::Name { agent, name } => world
            .st
            .set_agent_name(&agent.as_str().into(), name.as_str())
            .map_err(err)?,
        Statement::Alphabet { name, symbols } => {
            let a = Alphabet::new(symbols.iter().cloned()).map_err(err)?;
            world.alphabets.insert(name.clone(), a);
        }
        Statement::Matrix { name, from, to, rows } => {
            let m = TranslationMatrix::new(world.alphabets[from].clone(), world.alphabets[to].clone(), rows.clone())
                .map_err(err)?;
            world.matrices.insert(name.clone(), m);
        }
        Statement::Promise(p) => {
            world.st.add_promise(p.clone()).map_err(err)?;
        }
        Statement::SuperAgent { name, members } => {
            world.st.declare_group(name.as_str(), ids(members)).map_err(err)?;
        }
        Statement::Scale { name, groups } => {
            world.st = define_scale(&world.st, name, &ids(groups)).map_err(err)?;
        }
        Statement::Gateway { group, agent } => {
            world
                .st
                .set_gateway(&group.as_str().into(), &agent.as_str().into())
                .map_err(err)?;
        }
        Statement::Adjacency(t) => world.st.set_adjacency_type(t.as_str()),
        Statement::Resident { parent, child } => {
            world
                .st
                .add_resident(&parent.as_str().into(), &child.as_str().into())
                .map_err(err)?;
        }
        Statement::Alias { agent, label, scope } => {
            let scope = scope.as_ref().map(|s| ids(s).into_iter().collect::<BTreeSet<_>>());
            world.st = world
                .st
                .relabel_by_scalar(&agent.as_str().into(), label, scope)
                .map_err(err)?;
        }
        Statement::Policy(p) => world.policy = *p,
        Statement::Occupy {
            occupier,
            host,
            resource,
        } => {
            world.st = bind_occupancy(
                &world.st,
                &host.as_str().into(),
                &occupier.as_str().into(),
                resource,
                world.policy,
            )
            .map_err(err)?;
        }
        Statement::Tenancy {
            host,
            tenant,
            resource,
            condition,
            service,
        } => {
            let (st, b) = bind_tenancy(
                &world.st,
                &host.as_str().into(),
                &tenant.as_str().into(),
                resource,
                condition,
                service,
                world.policy,
            )
            .map_err(err)?;
            world.st = st;
            world.bindings.push((b, world.policy));
        }
        Statement::Multitenancy {
            host,
            tenants,
            resource,
            condition,
            service,
            capacity,
        } => {
            let specs: Vec<TenantSpec> = tenants
                .iter()
                .map(|t| TenantSpec {
                    id: t.as_str().into(),
                    condition: condition.clone(),
                    share: 1,
                })
                .collect();
            let cap = capacity.unwrap_or(specs.len() as u64);
            let (st, bs) = bind_multitenancy(
                &world.st,
                &host.as_str().into(),
                &specs,
                resource,
                service,
                cap,
                world.policy,
            )
            .map_err(err)?;
            world.st = st;
            world.bindings.extend(bs.into_iter().map(|b| (b, world.policy)));
        }
        Statement::Namespace { boundary, transform } => {
            let ns = make_namespace(&world.st, &boundary.as_str().into(), transform).map_err(err)?;
            world.namespaces.push(ns);
        }
        Statement::Lattice { name, dims, options } => {
            space_name_free(world, name)?;
            let (st, space) = build_lattice(&world.st, name, dims, options).map_err(err)?;
            world.st = st;
            world.spaces.insert(name.clone(), space);
        }
        Statement::Tree { name, b, size } => {
            space_name_free(world, name)?;
            let (st, space) = match size {
                TreeSize::Depth(d) => build_tree(&world.st, name, *b, *d),
                TreeSize::Agents(n) => build_tree_n(&world.st, name, *b, *n),
            }
            .map_err(err)?;
            world.st = st;
            world.spaces.insert(name.clone(), space);
        }
        Statement::Flat { name, n } => {
            space_name_free(world, name)?;
            let (st, space) = build_flat(&world.st, name, *n).map_err(err)?;
            world.st = st;
            world.spaces.insert(name.clone(), space);
        }
        Statement::Clos { name, tiers, v } => {
            space_name_free(world, name)?;
            let (st, fabric) = build_clos(&world.st, name, *tiers, *v).map_err(err)?;
            world.st = st;
            world.fabrics.insert(name.clone(), fabric);
        }
        Statement::Expect {
            super_agent,
            type_tag,
            irreducible,
        } => {
            world
                .expectations
                .push((super_agent.as_str().into(), type_tag.clone(), *irreducible));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_promise() {
        let s = parse_scenario("agent A1 A5\npromise A1 -> A5 : +b1{x} #1\n").unwrap();
        assert_eq!(s.world.st.promise_count(), 1);
        assert_eq!(s.statements.len(), 2);
    }

    #[test]
    fn group_of_four() {
        let s = parse_scenario("agent A1 A2 A3 A4\nsuperagent S { A1 A2 A3 A4 }").unwrap();
        assert_eq!(s.world.st.group(&"S".into()).unwrap().len(), 4);
    }

    #[test]
    fn undeclared_agent_is_named() {
        let err = parse_scenario("agent A\n# note\npromise A -> B : +x").unwrap_err();
        assert_eq!((err.line, err.column), (3, 14));
        assert!(err.message.contains("`B`"), "{}", err.message);
    }

    #[test]
    fn comments_and_valency() {
        let s = parse_scenario("agent A B # two agents\npromise A -> B : +x #3 # three slots").unwrap();
        let (_, p) = s.world.st.promises().next().unwrap();
        assert_eq!(p.body.valency.slots(), Some(3));
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_scenario("agent A B\npromise A -> B +x").unwrap_err();
        assert_eq!((err.line, err.column), (2, 16));
    }

    #[test]
    fn builders_register_schemes() {
        let s = parse_scenario("lattice L dims(3,3)\ntree T b=2 d=2\nflat F n=4\nclos C tiers=2 v=2").unwrap();
        assert_eq!(s.world.spaces.len(), 3);
        assert_eq!(s.world.fabrics.len(), 1);
        assert!(parse_scenario("flat F n=2\nflat F n=3").is_err());
    }
}
