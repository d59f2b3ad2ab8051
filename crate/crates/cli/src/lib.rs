pub mod commands;
pub mod problem;
pub mod render;

pub use commands::{run, Cli};
