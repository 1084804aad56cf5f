pub mod error;
pub mod exact;
pub mod geometry;
pub mod graph;
pub mod harness;
pub mod mcmc;
pub mod output;
pub mod rational;
pub mod variational;
pub mod verify;
