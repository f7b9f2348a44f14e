//! Property-based test generation for cyber-physical programs and runtime
//! guardrails compiled from the generated tests.

pub mod analyzer;
pub mod bundle;
pub mod corpus;
pub mod evalkit;
pub mod fixtures;
pub mod guardrail;
pub mod llmclient;
pub mod orchestrator;
pub mod promptkit;

/// Trace scalar used by the shipped simulators.
pub type Real = f64;
pub type Tcs = corpus::TcsSim<Real>;
pub type Pcs = corpus::PcsSim<Real>;
