//! Workspace language, loader and command runner behind the `veq` binary.

pub mod dsl;
pub mod workspace;
pub mod run;
pub mod corpus;
