//! Simulation and analysis laboratory for budgeted online reading.
//!
//! Articles arrive in uniformly random order. Each shows an upper estimate
//! of its information rate on arrival; the true step-wise rates are revealed
//! only while reading, and a shared time budget limits how much can be read.
//! This crate provides the exact-arithmetic instance model, offline oracles,
//! the online reading strategies, a Monte Carlo harness, and the numeric
//! machinery behind the threshold strategy's competitive-ratio guarantee.

pub mod bound;
pub mod generators;
pub mod harness;
pub mod model;
pub mod oracles;
pub mod rat;
pub mod readers;
pub mod refcheck;
pub mod rng;

pub use model::{accuracy, cut_instance, validate_instance, Article, InformationProfile, Instance};
pub use rat::Rat;
