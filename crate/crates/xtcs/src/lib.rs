pub mod lattice;
pub mod matrix;
pub mod poly;
pub mod snf;
pub mod catalog;
pub mod config;
pub mod invariants;
pub mod search;
pub mod fixtures;
pub mod cli;
