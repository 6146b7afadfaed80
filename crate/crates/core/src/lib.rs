//! Satellite mission planning as a quadratic unconstrained binary problem.
//!
//! The crate covers the whole desk-scale pipeline: instances and their JSON
//! format ([`instance`]), synthetic instance reduction ([`reductor`]), an
//! exact branch-and-bound reference ([`classical`]), the penalty QUBO and its
//! Ising form ([`qubo`]), a simulated-annealing sampler ([`anneal`]), an exact
//! statevector QAOA engine ([`qaoa`]), approximation-ratio metrics
//! ([`evaluation`]) and the experiment runner ([`pipeline`]).

pub mod anneal;
pub mod classical;
pub mod evaluation;
pub mod instance;
pub mod optim;
pub mod pipeline;
pub mod qaoa;
pub mod qubo;
pub mod reductor;
pub mod samples;
pub mod seed;

pub use classical::{check_feasible, objective, solve_exact, ExactResult, FeasibilityReport};
pub use instance::{parse_instance, serialize_instance, Assignment, Instance, Request, RequestKind, VarRef};
pub use qubo::{decode, embed_assignment, encode, qubo_energy, to_ising, IsingModel, Qubo};

// The guide's snippets run as doc-tests, one module per chapter.
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/instances.md")]
mod book_instances {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/classical.md")]
mod book_classical {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/qubo-encoding.md")]
mod book_qubo_encoding {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/ising.md")]
mod book_ising {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/annealing.md")]
mod book_annealing {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/qaoa.md")]
mod book_qaoa {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/evaluation.md")]
mod book_evaluation {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/pipeline.md")]
mod book_pipeline {}
