//! Discrete approximations of the Sierpinski gasket and of the gasket with
//! its bottom edge removed, together with the two computational workhorses
//! everything else is checked against: the spectral-decimation primitives
//! (the quadratic map, its inverse branches, eigenfunction extension, and
//! scaled decimation limits) and a dense symmetric eigensolver used as
//! brute-force ground truth.

pub mod decimation;
pub mod eigensolve;
pub mod graph;

pub use decimation::{
    exact_resolver, extend_eigenfunction, f_map, f_rat, limit_scaled, phi, phi_limit,
    phi_minus_enclosure, phi_plus_enclosure, Branch, BranchSequence, DecimationError,
};
pub use eigensolve::{
    dirichlet_matrix, eigensolve, neumann_matrix, EigenCluster, LaplacianMatrix, OracleSpectrum,
    SolverError, MERGE_TOL,
};
pub use graph::{
    build_gamma, build_gamma_capped, build_omega, build_omega_capped, cell_corners, Coord,
    GraphApprox, GraphError, GraphKind, DEFAULT_MAX_LEVEL,
};
