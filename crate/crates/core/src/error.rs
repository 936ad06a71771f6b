use alloc::string::String;
use alloc::vec::Vec;

use crate::id::AgentId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

fn list(items: &[AgentId]) -> String {
    let v: Vec<&str> = items.iter().map(AgentId::as_str).collect();
    v.join(",")
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unknown agent `{0}`")]
    UnknownAgent(AgentId),
    #[error("agent `{0}` declared twice")]
    DuplicateAgent(AgentId),
    #[error("agent `{0}` cannot promise to itself")]
    SelfPromise(AgentId),
    #[error("agent `{0}` names itself in its own promise body")]
    SelfReference(AgentId),
    #[error("promise from `{0}` has promisees outside its scope")]
    ScopeMissingPromisee(AgentId),
    #[error("valency must be at least 1")]
    ZeroValency,
    #[error("label `{label}` is already an alias in an overlapping scope (held by `{holder}`)")]
    DuplicateAlias { label: String, holder: AgentId },
    #[error("autonomy violation: `{child}` is not resident in `{parent}`")]
    AutonomyViolation { parent: AgentId, child: AgentId },
    #[error("`{child}` is already resident in `{host}`")]
    AlreadyResident { child: AgentId, host: AgentId },
    #[error("agent `{0}` cannot be resident in itself")]
    SelfResidency(AgentId),

    #[error("use-promise of type `{found}` does not match offer type `{expected}`")]
    TypeMismatch { expected: String, found: String },
    #[error("use-promise from `{0}` is not a `-` promise directed at the offerer")]
    NotAUse(AgentId),

    #[error("symbol `{0}` is not in the source alphabet")]
    UnknownSymbol(String),
    #[error("symbol `{0}` cannot be translated")]
    UntranslatableSymbol(String),
    #[error("translation produced a negative coefficient for `{0}`")]
    NegativeCoefficient(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bodies use symbols outside the shared alphabet: `{0}`")]
    AlphabetMismatch(String),
    #[error("duplicate symbol `{0}` in alphabet")]
    DuplicateSymbol(String),

    #[error("agent `{0}` appears in more than one group")]
    OverlappingGroups(AgentId),
    #[error("group `{0}` is not connected")]
    DisconnectedGroup(AgentId),
    #[error("group `{0}` has no members")]
    EmptyGroup(AgentId),
    #[error("super-agent id `{0}` clashes with an existing agent")]
    GroupIdClash(AgentId),
    #[error("unknown scale `{0}`")]
    UnknownScale(String),
    #[error("unknown super-agent `{0}`")]
    UnknownSuperAgent(AgentId),
    #[error("no directory entries for type(s) {types}; unresolvable: {promises}")]
    Unresolvable { types: String, promises: String },
    #[error("spacetime of {size} agents exceeds the bound {bound}")]
    SizeBound { size: usize, bound: usize },

    #[error("no adjacency channel from `{from}` into `{target}`")]
    NoChannel { from: AgentId, target: AgentId },
    #[error("`{0}` is opaque: no directory and no gateway, scope stops at the boundary")]
    Opaque(AgentId),
    #[error("`{0}` has no directory to publish")]
    NoDirectory(AgentId),

    #[error("`{host}` offers no bounded resource of type `{resource}`")]
    NoSuchResource { host: AgentId, resource: String },
    #[error("`{host}` has no free `{resource}` slot")]
    SlotExhausted { host: AgentId, resource: String },
    #[error("incomplete tenancy template, missing: {0}")]
    IncompleteTenancy(String),
    #[error("host and tenant must differ (`{0}`)")]
    HostIsTenant(AgentId),
    #[error("too many tenants for valency {valency}; overflow: {}", list(.overflow))]
    TenantOverflow { valency: u32, overflow: Vec<AgentId> },
    #[error("fair-sharing violation: shares sum to {requested} but capacity is {capacity}")]
    FairSharing { requested: u64, capacity: u64 },
    #[error("multi-tenancy needs at least two tenants")]
    TooFewTenants,
    #[error("tenants `{0}` and `{1}` already have promises between them")]
    TenantsNotIsolated(AgentId, AgentId),
    #[error("duplicate interior name `{0}`")]
    DuplicateName(String),
    #[error("name transform is not injective: `{0}` has several sources")]
    NonInjective(String),
    #[error("name `{0}` has no entry in the translation table")]
    MissingTranslation(String),

    #[error("no route: `{0}` has no entry towards the destination")]
    NoRoute(AgentId),
    #[error("unknown or disallowed address `{0}`")]
    UnknownAddress(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
