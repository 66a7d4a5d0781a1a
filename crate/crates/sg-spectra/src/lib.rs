//! Classified Laplacian spectra on the gasket-with-slit graphs.
//!
//! The crate splits into layers: `families` builds the exact determinant
//! polynomials of the skeleton systems and `isolation` turns them into
//! certified root tables; `signs` verifies the sign and interlacing facts
//! the classification depends on; `assemble` combines localized, primitive
//! and miniaturized eigenvalues into complete spectra with multiplicities
//! and checks them against dense eigensolves; `counting` builds eigenvalue
//! counting functions and the asymptotic experiments on top of them.

pub mod assemble;
pub mod counting;
pub mod families;
pub mod isolation;
pub mod signs;

pub use assemble::{
    assemble, compare_with_oracle, expected_ledger, interior_count, limit_spectrum,
    localized_birth_multiplicity, localized_graph_eigenvalues, miniaturized_graph_eigenvalues,
    primitive_family, primitive_graph_eigenvalues, reconstruct_eigenfunction, skeleton_solve,
    vertex_count, AssembleError, Bc, EigenType, EigenvalueRecord, LimitSpectrum, Provenance,
    Reconstruction, SkeletonSolution, SpectrumLevel, SpectrumTable, Symmetry, TypeLedger,
    DISJOINTNESS_TOL, ORACLE_CLUSTER_TOL, RECONSTRUCTION_TOL, SKELETON_TOL,
};
pub use counting::{
    decimated_threshold_count, defect_experiment, defect_exponent, gamma_dirichlet_spectrum,
    gamma_dirichlet_total, gamma_limit_spectrum, gap_cluster_report, graph_counting_function,
    growth_exponent, growth_ratio_series, rho, threshold_limit_constant, AlternationPair,
    AlternationSummary, CountingError, CountingFunction, CountingSplit, DefectReport, DefectRow,
    GapClusterReport, RatioGap, ThresholdCount, ThresholdGap, WindowSup, CLUSTER_EPSILONS,
    RATIO_GAP_THRESHOLD,
};
pub use families::{
    build_l, build_l_tilde, build_p, build_p_skew_n, build_p_tilde, build_pn, build_q,
    build_q_skew_n, build_q_tilde, build_qn, EntryPolys, Family, FamilyError, FamilyTables,
    PolyFamily, DEFAULT_MAX_POLY_LEVEL,
};
pub use isolation::{weak_brackets, IsolatedRoot, RootTable, WeakBracket};
pub use signs::{verify_sign_theorems, SignCheck, SignReport};
