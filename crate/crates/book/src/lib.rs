//! Compiles the guide under `book/` so that `cargo test` runs every snippet.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/ordinal-patterns.md")]
pub mod ordinal_patterns {}

#[doc = include_str!("../../../book/src/ties.md")]
pub mod ties {}

#[doc = include_str!("../../../book/src/alphabets.md")]
pub mod alphabets {}

#[doc = include_str!("../../../book/src/entropy.md")]
pub mod entropy {}

#[doc = include_str!("../../../book/src/sweep.md")]
pub mod sweep {}

#[doc = include_str!("../../../book/src/comparison.md")]
pub mod comparison {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
