//! File formats, command line and HTTP service around `grec-core`.

pub mod cli;
pub mod corpus;
pub mod io;
pub mod server;
pub mod service;
