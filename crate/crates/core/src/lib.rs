//! Algorithmic-probability measures for branching observers.
//!
//! * [`statevec`]: complex state vectors and branch decomposition.
//! * [`codec`]: truncated-DFT transform codec with self-delimiting streams.
//! * [`entropy`]: compressor-based entropy, Solomonoff probability.
//! * [`measures`]: flat, copy-count, Born and algorithmic continuer measures.
//! * [`scenarios`]: replicator, quantum and codec experiments and reports.

pub mod codec;
pub mod entropy;
pub mod measures;
pub mod scenarios;
pub mod statevec;

pub use num_complex::Complex64;
