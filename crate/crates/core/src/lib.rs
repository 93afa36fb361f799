pub mod amalgam;
pub mod classify;
pub mod error;
pub mod graphs;
pub mod groups;
pub mod spec;
pub mod tree;
pub mod truth;
pub mod words;

pub use error::{Error, Result};
