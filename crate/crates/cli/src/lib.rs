//! Report model and renderers behind the `liemag` binary.

pub mod render;
pub mod report;
