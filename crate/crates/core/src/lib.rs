pub mod cli;
pub mod content;
pub mod decision;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod logio;
pub mod rng;
pub mod stats;
