//! Mealy automata and the groups they generate.

pub mod automaton;
pub mod constructions;
pub mod crossing;
pub mod distortion;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod group;
pub mod properties;
pub mod quotient;
pub mod rewriting;
pub mod word;

pub use automaton::MealyAutomaton;
pub use error::{Error, Result};
