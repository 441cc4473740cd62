//! A small language for q-series identities, a batch verifier with an
//! on-disk cache, and the acceptance suite behind `heckmort selftest`.

pub mod ast;
pub mod cache;
pub mod eval;
pub mod parser;
pub mod selftest;
pub mod verify;
