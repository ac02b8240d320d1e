//! Cons-free functional programs with immutable functions.
//!
//! The crate parses and type-checks programs in a small first-order-ish
//! functional language with nondeterministic `choose`, classifies them
//! (cons-freeness, data order, order-n immutability), evaluates them,
//! rewrites them, computes their result sets by saturation over finite
//! semantic universes, and compiles nondeterministic Turing machines into
//! such programs.

pub mod analysis;
pub mod cli;
pub mod saturate;
pub mod interp;
pub mod syntax;
pub mod tmcompile;
pub mod transform;
pub mod turing;
pub mod value;

pub use syntax::{parse_input_bits, parse_program, pretty_print, Clause, Expr, Pattern, Program, Type};
pub use value::{Data, Value};
