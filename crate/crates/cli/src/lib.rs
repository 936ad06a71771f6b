//! Scenario files, directory dumps, DOT export and the `semspace` command line
//! on top of [`semspace_core`].

pub mod codec;
pub mod commands;
pub mod dot;
pub mod gen;
pub mod scenario;
pub mod scenarios;
pub mod syntax;
