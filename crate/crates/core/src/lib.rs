//! Spectral flow of the Dirichlet Laplacian on `[0, 1]` under delta
//! potentials of strength `sigma` placed at the nodes `k/n`.
//!
//! Three independent solvers are provided:
//!
//! * [`analytic`]: the closed-form implicit eigenvalue equation and the
//!   explicit eigenfunctions built from it.
//! * [`cheb`]: Chebyshev collocation on the path quantum graph, one block
//!   per edge, with the vertex conditions imposed as constraint rows.
//! * [`transfer`]: transfer-matrix shooting with a zero-count bracket, which
//!   also handles piecewise-constant background potentials.

pub mod analytic;
pub mod cheb;
mod error;
mod json;
mod problem;
pub mod roots;
pub mod transfer;

pub use cheb::graph::{ChebGrid, DiffMetrics, DiscreteSystem};
pub use error::{FlowError, Result};
pub use problem::{
    least_squares_scale, AmplitudeMatrix, AnalyticEigenpair, CollocationEigenpair, FlowProblem,
    PiecewisePotential,
};
pub use transfer::NodalFlow;
