//! Deterministic simulator of a simplified proof-of-stake consensus layer
//! used to compare block-proposer election mechanisms (public schedule,
//! single secret leader election via shuffled trackers, and homomorphic
//! sortition over encrypted tickets) under denial-of-service and
//! censorship adversaries.

pub mod adversary;
pub mod block;
pub mod config;
pub mod digest;
pub mod fhe;
pub mod group;
pub mod randao;
pub mod report;
pub mod rng;
pub mod runner;
pub mod sortition;
pub mod state;
pub mod statusquo;
pub mod validator;
pub mod view;
pub mod whisk;
