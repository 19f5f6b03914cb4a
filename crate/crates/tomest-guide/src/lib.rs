//! Runs every code block of the book under `cargo test --doc`.
//!
//! mdbook cannot execute snippets against crate dependencies, so each
//! chapter is included as the documentation of an empty module here and
//! rustdoc does the work. One module per chapter keeps test failures
//! attributable to the right file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/measurements.md")]
pub mod measurements {}

#[doc = include_str!("../../../book/src/states.md")]
pub mod states {}

#[doc = include_str!("../../../book/src/estimators.md")]
pub mod estimators {}

#[doc = include_str!("../../../book/src/quantum.md")]
pub mod quantum {}

#[doc = include_str!("../../../book/src/risk.md")]
pub mod risk {}

#[doc = include_str!("../../../book/src/search.md")]
pub mod search {}

#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
