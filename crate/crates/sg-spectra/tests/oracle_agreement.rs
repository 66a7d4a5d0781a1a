//! Assembled spectra against the dense eigensolver, level by level. The
//! assembly never looks at a matrix — localized values come from the
//! inverse decimation branches, primitive values from certified polynomial
//! roots, miniaturized values from coarser skew roots — so agreement with
//! brute-force eigensolving checks the whole classification at once.

use sg_core::{build_gamma, build_omega, dirichlet_matrix, eigensolve, neumann_matrix};
use sg_spectra::{
    assemble, compare_with_oracle, gamma_dirichlet_spectrum, Bc, EigenType, FamilyTables,
    ORACLE_CLUSTER_TOL,
};

#[test]
fn dirichlet_tables_match_the_dense_solver() {
    let mut tables = FamilyTables::new(5);
    for m in 2..=5 {
        let table = assemble(&mut tables, m, Bc::Dirichlet).unwrap();
        let graph = build_omega(m).unwrap();
        let oracle = eigensolve(&dirichlet_matrix(&graph), false).unwrap();
        let clusters = compare_with_oracle(&table, &oracle, ORACLE_CLUSTER_TOL).unwrap();
        assert!(clusters > 0, "level {m} produced an empty comparison");
    }
}

#[test]
fn neumann_tables_match_the_dense_solver() {
    let mut tables = FamilyTables::new(5);
    for m in 1..=5 {
        let table = assemble(&mut tables, m, Bc::Neumann).unwrap();
        let graph = build_omega(m).unwrap();
        let oracle = eigensolve(&neumann_matrix(&graph), false).unwrap();
        compare_with_oracle(&table, &oracle, ORACLE_CLUSTER_TOL).unwrap();
    }
}

#[test]
fn full_gasket_tables_match_the_dense_solver() {
    for m in 1..=5 {
        let table = gamma_dirichlet_spectrum(m).unwrap();
        let graph = build_gamma(m).unwrap();
        let oracle = eigensolve(&dirichlet_matrix(&graph), false).unwrap();
        compare_with_oracle(&table, &oracle, ORACLE_CLUSTER_TOL).unwrap();
    }
}

#[test]
fn the_level_five_near_tie_is_one_oracle_cluster_of_four() {
    // around 5.423778 the level-5 table holds a symmetric root, a skew root
    // about 1e-6 above it, and two miniature copies of the latter: the
    // dense solver merges all four into one cluster, the table keeps them
    // apart because their classifications differ
    let mut tables = FamilyTables::new(5);
    let table = assemble(&mut tables, 5, Bc::Dirichlet).unwrap();
    let trio: Vec<_> = table
        .records
        .iter()
        .filter(|r| (r.value - 5.423778).abs() < 5e-5)
        .collect();
    let mult: u64 = trio.iter().map(|r| r.multiplicity).sum();
    assert_eq!(mult, 4);
    assert_eq!(
        trio.iter().filter(|r| r.etype == EigenType::PrimitiveSym).count(),
        1
    );
    assert_eq!(
        trio.iter().filter(|r| r.etype == EigenType::PrimitiveSkew).count(),
        1
    );
    let mini: u64 = trio
        .iter()
        .filter(|r| matches!(r.etype, EigenType::Miniaturized { .. }))
        .map(|r| r.multiplicity)
        .sum();
    assert_eq!(mini, 2);

    let oracle =
        eigensolve(&dirichlet_matrix(&build_omega(5).unwrap()), false).unwrap();
    assert_eq!(oracle.multiplicity_of(5.423778, 1e-4), 4);
}
