//! Slot accounting for finite-valency promises.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use core::fmt;

use crate::body::{Sign, Valency};
use crate::error::{Error, Result};
use crate::id::AgentId;
use crate::promise::Promise;
use crate::spacetime::SemanticSpacetime;

/// Exact non-negative fraction in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    /// `None` when `den` is zero.
    pub fn new(num: u64, den: u64) -> Option<Ratio> {
        if den == 0 {
            return None;
        }
        let g = gcd(num, den);
        Some(Ratio {
            num: num / g,
            den: den / g,
        })
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValenceReport {
    pub type_tag: String,
    pub offered: u64,
    pub consumed: u64,
    pub net: i64,
    /// consumed/offered; undefined when nothing is offered.
    pub utilization: Option<Ratio>,
    pub queue_length: u64,
}

impl ValenceReport {
    pub fn from_counts(type_tag: &str, offered: u64, consumed: u64) -> Self {
        let net = offered as i64 - consumed as i64;
        ValenceReport {
            type_tag: type_tag.to_string(),
            offered,
            consumed,
            net,
            utilization: Ratio::new(consumed, offered),
            queue_length: consumed.saturating_sub(offered),
        }
    }

    pub const CSV_HEADER: &'static str = "type_tag,offered,consumed,net,utilization_num,utilization_den,queue_length";

    /// One CSV row; undefined utilization leaves both fields empty.
    pub fn csv_row(&self) -> String {
        let (n, d) = match self.utilization {
            Some(r) => (r.num.to_string(), r.den.to_string()),
            None => (String::new(), String::new()),
        };
        alloc::format!(
            "{},{},{},{},{},{},{}",
            self.type_tag,
            self.offered,
            self.consumed,
            self.net,
            n,
            d,
            self.queue_length
        )
    }
}

/// Bounded `+` slots and `-` slots of `type_tag`, over promises made by agents in `agents`.
/// Unbounded offers do not contribute to `offered`.
pub fn valence(st: &SemanticSpacetime, type_tag: &str, agents: &BTreeSet<AgentId>) -> ValenceReport {
    let mut offered = 0u64;
    let mut consumed = 0u64;
    for (_, p) in st.promises() {
        if !agents.contains(&p.promiser) || !p.body.type_tag.contains(type_tag) {
            continue;
        }
        let slots = match p.body.valency {
            Valency::Bounded(n) => n as u64,
            Valency::Unbounded => continue,
        };
        match p.body.sign {
            Sign::Plus => offered += slots,
            Sign::Minus => consumed += slots,
        }
    }
    ValenceReport::from_counts(type_tag, offered, consumed)
}

/// A bounded offer made to more promisees than it has slots.
pub fn is_overcommitted(st: &SemanticSpacetime, p: &Promise) -> bool {
    match p.body.valency {
        Valency::Bounded(n) => st.promisees_of(p).len() > n as usize,
        Valency::Unbounded => false,
    }
}

/// True once the uses consume at least as many slots as the offer provides.
pub fn is_saturated(offer: &Promise, uses: &[Promise]) -> Result<bool> {
    let mut m = 0u64;
    for u in uses {
        if u.body.type_tag != offer.body.type_tag {
            return Err(Error::TypeMismatch {
                expected: offer.body.type_tag.to_string(),
                found: u.body.type_tag.to_string(),
            });
        }
        if u.body.sign != Sign::Minus || !u.promisees.contains(&offer.promiser) || u.promisees.is_wildcard() {
            return Err(Error::NotAUse(u.promiser.clone()));
        }
        m += u.body.valency.slots().unwrap_or(0) as u64;
    }
    Ok(match offer.body.valency {
        Valency::Bounded(n) => m >= n as u64,
        Valency::Unbounded => false,
    })
}
