//! Solvers for one-dimensional Urysohn integral equations x - K(x) = f on
//! [0,1] by the discrete modified projection method.
//!
//! The integral operator is discretized by a composite Gauss-Legendre rule
//! (Nyström approximation) and combined with an interpolatory projection onto
//! piecewise polynomials collocated at Gauss points. Three solution families
//! come out of one solve:
//!
//! * the modified projection solution, converging at order 3r,
//! * its iterated refinement, converging at order 4r,
//! * a Richardson extrapolation of two iterated solutions, order 4r + 2,
//!
//! where r is the number of collocation points per subinterval, provided the
//! quadrature mesh is fine enough that its own error stays subordinate.
//!
//! The [`experiment`] module runs whole mesh sequences and reports sup-norm
//! errors and empirical orders; the `urysohn` binary exposes it on the
//! command line.

pub mod experiment;
pub mod linalg;
pub mod operator;
pub mod problems;
pub mod projection;
pub mod quadrature;
pub mod solver;

pub use experiment::{
    estimate_order, preset, run_experiment, sup_error, ConvergenceReport, ExperimentConfig,
    ExperimentError, MRule, OutputFormat, ProblemSpec, ReportRow, PRESETS,
};
pub use operator::{
    natural_extension, nystrom_apply, nystrom_jacobian, GridFunction, OperatorError,
    UrysohnProblem,
};
pub use projection::{
    interpolation_matrix, project, CollocationGrid, PiecewisePolynomial, ProjectionError,
};
pub use quadrature::{CompositeQuadrature, QuadratureError, QuadratureRule};
pub use solver::{
    iterate, richardson, solve_modified_projection, solve_nystrom, InitialGuess, NewtonReport,
    NewtonSettings, NystromSolution, SolutionBundle, SolveError,
};
