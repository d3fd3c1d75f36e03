//! Command-line front end for the Podles sphere engine.

pub mod config;
pub mod expr;
pub mod run;
