//! The pieces behind the `ngpd` binary: the on-disk document format, the
//! generated corpus, command dispatch, and the acceptance suite. Split out
//! as a library so integration tests can drive everything in-process.

pub mod commands;
pub mod corpus;
pub mod document;
pub mod suite;
