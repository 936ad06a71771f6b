//! Promise bodies: signed, typed collections of alphabet symbols.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::id::AgentId;

/// `+` offers, `-` accepts or uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Promise type τ.
///
/// Fine-grained bodies carry exactly one type name. Coarse-graining merges
/// bodies of different types into one maximal promise, so a tag is a
/// non-empty set of names; `(b1∪b2)` renders such a composite.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeTag(BTreeSet<String>);

impl TypeTag {
    pub fn new(name: impl Into<String>) -> Self {
        let mut set = BTreeSet::new();
        set.insert(name.into());
        TypeTag(set)
    }

    /// Builds a composite tag. Returns `None` for an empty iterator.
    pub fn from_names<I, S>(names: I) -> Option<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        if set.is_empty() {
            None
        } else {
            Some(TypeTag(set))
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn is_composite(&self) -> bool {
        self.0.len() > 1
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains(name)
    }

    pub fn is_subset(&self, other: &TypeTag) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &TypeTag) -> TypeTag {
        TypeTag(self.0.union(&other.0).cloned().collect())
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return f.write_str(self.0.iter().next().map(String::as_str).unwrap_or(""));
        }
        f.write_str("(")?;
        for (i, name) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("∪")?;
            }
            f.write_str(name)?;
        }
        f.write_str(")")
    }
}

/// Number of exclusive slots a promise can serve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valency {
    Bounded(u32),
    Unbounded,
}

impl Valency {
    pub fn slots(self) -> Option<u32> {
        match self {
            Valency::Bounded(n) => Some(n),
            Valency::Unbounded => None,
        }
    }

    /// Pools slot counts; any unbounded side makes the sum unbounded.
    pub fn pooled(self, other: Valency) -> Valency {
        match (self, other) {
            (Valency::Bounded(a), Valency::Bounded(b)) => Valency::Bounded(a.saturating_add(b)),
            _ => Valency::Unbounded,
        }
    }

    /// Default for a body of the given sign: offers are unbounded, uses take one slot.
    pub fn default_for(sign: Sign) -> Valency {
        match sign {
            Sign::Plus => Valency::Unbounded,
            Sign::Minus => Valency::Bounded(1),
        }
    }
}

/// Reference from a conditional body to the (sign, type) of the promise it depends on.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Condition {
    pub sign: Sign,
    pub type_tag: TypeTag,
}

impl Condition {
    pub fn new(sign: Sign, type_tag: TypeTag) -> Self {
        Condition { sign, type_tag }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Plus => write!(f, "{}", self.type_tag),
            Sign::Minus => write!(f, "-{}", self.type_tag),
        }
    }
}

/// The content of a promise.
///
/// Bodies compare by every field, so two bodies are equal only when sign,
/// type, symbol multiset, valency, condition and referenced agents all agree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Body {
    pub sign: Sign,
    pub type_tag: TypeTag,
    /// Alphabet symbols with their (non-negative) coefficients.
    pub symbols: BTreeMap<String, u32>,
    pub valency: Valency,
    pub condition: Option<Condition>,
    /// Agents named inside the body; their count is the tensor rank.
    pub agent_refs: BTreeSet<AgentId>,
}

impl Body {
    /// A body whose single symbol is its own type name, with the sign's default valency.
    pub fn new(sign: Sign, type_name: &str) -> Self {
        let mut symbols = BTreeMap::new();
        symbols.insert(type_name.to_string(), 1);
        Body {
            sign,
            type_tag: TypeTag::new(type_name),
            symbols,
            valency: Valency::default_for(sign),
            condition: None,
            agent_refs: BTreeSet::new(),
        }
    }

    pub fn offer(type_name: &str) -> Self {
        Body::new(Sign::Plus, type_name)
    }

    pub fn use_of(type_name: &str) -> Self {
        Body::new(Sign::Minus, type_name)
    }

    pub fn with_symbols<I, S>(mut self, symbols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.symbols = symbols.into_iter().map(|s| (s.into(), 1)).collect();
        self
    }

    pub fn with_coefficients(mut self, symbols: BTreeMap<String, u32>) -> Self {
        self.symbols = symbols;
        self
    }

    pub fn with_valency(mut self, n: u32) -> Self {
        self.valency = Valency::Bounded(n);
        self
    }

    pub fn unbounded(mut self) -> Self {
        self.valency = Valency::Unbounded;
        self
    }

    pub fn with_condition(mut self, sign: Sign, type_name: &str) -> Self {
        self.condition = Some(Condition::new(sign, TypeTag::new(type_name)));
        self
    }

    pub fn with_refs<I, A>(mut self, refs: I) -> Self
    where
        I: IntoIterator<Item = A>,
        A: Into<AgentId>,
    {
        self.agent_refs = refs.into_iter().map(Into::into).collect();
        self
    }

    /// An empty body carries no symbols; it creates no link in the adjacency matrix.
    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol_set(&self) -> BTreeSet<&str> {
        self.symbols.keys().map(String::as_str).collect()
    }

    /// True when the symbols are exactly the type names with unit coefficients.
    pub fn has_default_symbols(&self) -> bool {
        self.symbols.len() == self.type_tag.0.len()
            && self.symbols.iter().all(|(s, c)| *c == 1 && self.type_tag.contains(s))
    }

    /// Sign and type only, e.g. `+b1` or `-(b1∪b2)`.
    pub fn short(&self) -> String {
        alloc::format!("{}{}", self.sign, self.type_tag)
    }

    /// Max-merge used by coarse-graining: union of symbols with per-symbol
    /// maximum coefficient, union of types, pooled valency. Conditions survive
    /// only when they agree.
    pub fn merge_max(&self, other: &Body) -> Body {
        let mut symbols = self.symbols.clone();
        for (s, c) in &other.symbols {
            let e = symbols.entry(s.clone()).or_insert(0);
            *e = (*e).max(*c);
        }
        Body {
            sign: self.sign,
            type_tag: self.type_tag.union(&other.type_tag),
            symbols,
            valency: self.valency.pooled(other.valency),
            condition: if self.condition == other.condition {
                self.condition.clone()
            } else {
                None
            },
            agent_refs: self.agent_refs.union(&other.agent_refs).cloned().collect(),
        }
    }

    /// Renames the agents referenced in the body.
    pub fn map_refs(&self, f: impl Fn(&AgentId) -> AgentId) -> Body {
        let mut b = self.clone();
        b.agent_refs = self.agent_refs.iter().map(f).collect();
        b
    }
}

/// Canonical text form, shared by scenario files and directory dumps:
/// `+b{x,y*2} #3 | -C refs(A,B)`.
impl fmt::Display for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.sign, self.type_tag)?;
        if !self.has_default_symbols() {
            f.write_str("{")?;
            for (i, (s, c)) in self.symbols.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                if *c == 1 {
                    f.write_str(s)?;
                } else {
                    write!(f, "{}*{}", s, c)?;
                }
            }
            f.write_str("}")?;
        }
        if self.valency != Valency::default_for(self.sign) {
            match self.valency {
                Valency::Bounded(n) => write!(f, " #{}", n)?,
                Valency::Unbounded => f.write_str(" #*")?,
            }
        }
        if let Some(c) = &self.condition {
            write!(f, " | {}", c)?;
        }
        if !self.agent_refs.is_empty() {
            f.write_str(" refs(")?;
            write_joined(f, self.agent_refs.iter())?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

pub(crate) fn write_joined<'a, I>(f: &mut fmt::Formatter<'_>, items: I) -> fmt::Result
where
    I: Iterator<Item = &'a AgentId>,
{
    for (i, a) in items.enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        f.write_str(a.as_str())?;
    }
    Ok(())
}

/// Sorted, comma-separated rendering of a body list, e.g. `{+b1,+b1,-b3}`.
pub fn render_short_list<'a, I: IntoIterator<Item = &'a Body>>(bodies: I) -> String {
    let mut items: Vec<String> = bodies.into_iter().map(Body::short).collect();
    items.sort();
    let mut out = String::from("{");
    out.push_str(&items.join(","));
    out.push('}');
    out
}
