//! Synthesis of controllers for non-nested signal temporal logic
//! specifications via time-partitioned automata.

pub mod abstraction;
pub mod bench;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod formula;
pub mod ltlf;
pub mod planner;
pub mod poly;
pub mod product;
pub mod separation;
pub mod solution;
pub mod time;
pub mod timed;
pub mod trajectory;

pub use error::{Error, ParseError, Result};
pub use formula::{LabelSignal, PredicateFn, PredicateSet, SpecFile, StlFormula, Symbol};
pub use poly::Polynomial;
pub use time::TimeInterval;
