//! The handbook, one module per chapter. Each module's documentation is
//! the same Markdown file the rendered book is built from (`book/src`),
//! so every example in the book compiles and runs under `cargo test`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/events-and-windows.md")]
pub mod events_and_windows {}

#[doc = include_str!("../../../book/src/rasters.md")]
pub mod rasters {}

#[doc = include_str!("../../../book/src/repair-strategies.md")]
pub mod repair_strategies {}

#[doc = include_str!("../../../book/src/validity-sweeps.md")]
pub mod validity_sweeps {}

#[doc = include_str!("../../../book/src/synthetic-badges.md")]
pub mod synthetic_badges {}

#[doc = include_str!("../../../book/src/networks-and-statistics.md")]
pub mod networks_and_statistics {}

#[doc = include_str!("../../../book/src/file-formats.md")]
pub mod file_formats {}

#[doc = include_str!("../../../book/src/command-line.md")]
pub mod command_line {}
