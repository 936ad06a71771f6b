//! Promise graphs over autonomous agents.
//!
//! A [`SemanticSpacetime`] is a set of agents together with the promises they
//! make to one another. On top of that the crate provides valence
//! accounting, body-language translation, agency scales with
//! coarse-graining directories, delivery across super-agent boundaries,
//! tenancy templates, and addressing schemes (trees, lattices, flat tables
//! and Clos fabrics).
//!
//! The crate is `no_std` and only needs `alloc`. Parsing, file formats and
//! the command line live in the companion `semspace` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod body;
pub mod dispatch;
mod error;
mod id;
pub mod language;
pub mod promise;
pub mod routing;
pub mod scaling;
pub mod spacetime;
pub mod tenancy;
pub mod valency;

pub use body::{Body, Condition, Sign, TypeTag, Valency};
pub use error::{Error, Result};
pub use id::{AgentId, PromiseId};
pub use promise::{Promise, Target};
pub use spacetime::{Agent, SemanticSpacetime};
