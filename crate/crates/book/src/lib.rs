//! Chapters of the guide in `book/`, included as documentation so that
//! `cargo test` compiles and runs every listing.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/metrics.md")]
pub mod metrics {}
#[doc = include_str!("../../../book/src/directed-set.md")]
pub mod directed_set {}
#[doc = include_str!("../../../book/src/operators.md")]
pub mod operators {}
#[doc = include_str!("../../../book/src/schur.md")]
pub mod schur {}
#[doc = include_str!("../../../book/src/coarse.md")]
pub mod coarse {}
#[doc = include_str!("../../../book/src/blocks.md")]
pub mod blocks {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
