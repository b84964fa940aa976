//! Decision engine for uniform recurrence of morphic sequences.
//!
//! A morphic sequence is presented by a substitution `phi` prolongable over a
//! start letter together with a morphism `psi`; the generated infinite word is
//! `psi(phi^inf(a1))`. The engine decides whether that word is uniformly
//! recurrent: whether every finite factor reoccurs within a bounded window.
//!
//! The pipeline:
//!
//! 1. normalize the presentation to a non-erasing substitution plus coding
//!    ([`words::normalize`]);
//! 2. classify letters as bounded/growing and decide finiteness of the set of
//!    bounded factors via a labeled pair graph ([`bounded`]); an unbounded
//!    power reduces the question to a pure periodicity test;
//! 3. recode over a triple alphabet so every letter grows ([`contraction`]);
//! 4. compute exact growth orders `(d, theta)` with isolated Perron roots and
//!    certified geometric bounds ([`growth`]);
//! 5. extract the primitive core word `H` and test it for periodicity
//!    ([`primitive`]);
//! 6. decide whether every working word is a factor of `H` by evolving Rauzy
//!    schemes of `H` and tracking minimal covering paths ([`rauzy`],
//!    [`decider`]).
//!
//! The [`oracle`] module provides an independent empirical check used by the
//! test suite and the `corpus` subcommand.

pub mod bounded;
pub mod contraction;
pub mod corpus;
pub mod decider;
pub mod error;
pub mod graphs;
pub mod growth;
pub mod oracle;
pub mod pipeline;
pub mod primitive;
pub mod rauzy;
pub mod words;

pub use error::Error;
pub use pipeline::Verdict;
pub use words::{Alphabet, Letter, Morphism, MorphicSystem, Word};
