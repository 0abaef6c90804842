pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod nogo;
pub mod observables;
pub mod optics;
pub mod sector;
pub mod simplex;
