//! Lifts Dalvik `.dex` bytecode into a typed, stack-less three-address IR.
//!
//! The pipeline has four stages: parse the container ([`dex`]), decode the
//! register-machine instruction stream ([`isa`]), map instructions onto IR
//! statements with branch fixups ([`lift`]), then infer local types and
//! resolve ambiguous constants ([`typing`]) before cleanup ([`passes`]).
//! [`analyses`] renders per-method control-flow graphs and the application
//! call graph as DOT. [`interp`] holds the two differential reference
//! interpreters used by the test suites.

pub mod analyses;
pub mod dex;
pub mod fixtures;
pub mod interp;
pub mod ir;
pub mod isa;
pub mod lift;
pub mod passes;
pub mod typing;

mod driver;

pub use driver::{process_dex, MethodFailure, MethodOutcome, ProcessOptions, ProcessReport};
