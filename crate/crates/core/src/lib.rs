//! Restarted accelerated proximal gradient methods for composite problems
//! `min f(x) + ψ(x)` with an online estimate of the quadratic-growth
//! constant, plus primal–dual gap certificates for Lasso and sparse
//! logistic regression.

pub mod bench;
pub mod certificates;
pub mod data_io;
pub mod error;
pub mod linalg;
pub mod matrix;
pub mod problem;
pub mod restart;
pub mod schemes;
pub mod theta;
pub mod trace;

pub use certificates::{DualGap, GapReport, LassoGap, LogisticGap};
pub use data_io::{load_libsvm, synth_strongly_convex, Dataset, SyntheticQuadratic};
pub use error::{Error, Result};
pub use matrix::{CsrMatrix, DesignMatrix};
pub use problem::{CompositeProblem, Regularizer, SmoothOracle};
pub use restart::{ada_res, eps_prime_mode, fixed_restart, k_of_mu, AdaResConfig, AdaResOutput};
pub use schemes::{apg, fista, prox_grad, run_baseline, t_map, RunStatus, SchemeKind, StopRule};
pub use theta::{theta_next, theta_sequence, ThetaState};
pub use trace::{emit_csv, parse_csv, RunTrace, TraceRecord};
