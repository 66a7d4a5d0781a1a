//! Assembly of complete graph spectra from the structural ingredients.
//!
//! Every eigenvalue of the slit-domain graph at level m falls into exactly
//! one of four classes: localized values (5 and 6 together with their
//! inverse-map continuations, carrying high multiplicity), symmetric and
//! skew primitive values (simple roots of the reduced determinant
//! families), and miniaturized values (copies of skew primitive roots born
//! at a coarser level, repeated once per contraction that maps the smaller
//! domain into the larger one). This module builds all four lists, merges
//! them into a sorted table whose per-class totals are checked against
//! closed-form counts, solves the tridiagonal skeleton systems that sit
//! behind the determinant families, rebuilds full eigenfunctions from
//! skeleton data, and enumerates the renormalized limit spectrum.

use std::fmt;

use exact_poly::RootInterval;
use sg_core::{
    cell_corners, f_map, phi, phi_limit, Branch, BranchSequence, Coord, GraphApprox, GraphKind,
    OracleSpectrum,
};
use thiserror::Error;

use crate::families::{Family, FamilyError, FamilyTables};
use crate::isolation::RootTable;

/// Residual bound accepted by [`skeleton_solve`], relative to the largest
/// chain entry.
pub const SKELETON_TOL: f64 = 1e-8;

/// Residual bound for [`reconstruct_eigenfunction`], relative to the
/// sup-norm of the reconstructed vertex values.
pub const RECONSTRUCTION_TOL: f64 = 1e-7;

/// Two records of the same class closer than this are a structural error
/// in the Dirichlet table (distinct classes may legitimately collide, and
/// do so routinely under Neumann conditions).
pub const DISJOINTNESS_TOL: f64 = 1e-9;

/// Cluster width used when comparing an assembled table against the dense
/// eigensolver; matches the solver's own merge tolerance.
pub const ORACLE_CLUSTER_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum AssembleError {
    #[error("family layer: {0}")]
    Family(#[from] FamilyError),
    #[error("level {level} has no {bc} spectrum (first admissible level is {min})")]
    LevelTooSmall { level: u32, bc: Bc, min: u32 },
    #[error(
        "{lambda} is not an eigenvalue of the {m}-level {symmetry} {bc} skeleton \
         (residual {residual:.3e})"
    )]
    NotAnEigenvalue { lambda: f64, m: u32, symmetry: Symmetry, bc: Bc, residual: f64 },
    #[error("skeleton chain degenerates at level {i}: r({lambda_i}) = {r:.3e} is too close to 0")]
    DegenerateChain { i: u32, lambda_i: f64, r: f64 },
    #[error("record is {found}, but eigenfunction reconstruction needs a primitive record")]
    NotPrimitive { found: String },
    #[error("record level {record} does not match graph level {graph}")]
    LevelMismatch { record: u32, graph: u32 },
    #[error("eigenfunction reconstruction needs the slit-domain graph, got {0:?}")]
    WrongGraphKind(GraphKind),
    #[error("reconstruction residual {residual:.3e} exceeds {tol:.3e} at vertex {vertex}")]
    ReconstructionResidual { vertex: usize, residual: f64, tol: f64 },
    #[error("class tally mismatch at level {level} ({bc}): {class} counted {found}, closed form gives {expected}")]
    LedgerMismatch { level: u32, bc: Bc, class: &'static str, found: u64, expected: u64 },
    #[error(
        "records {a:.12} and {b:.12} of class {class} at level {level} are closer than {tol:e}"
    )]
    DisjointnessViolation { a: f64, b: f64, class: String, level: u32, tol: f64 },
    #[error("spectrum disagrees with the dense solver: {what}")]
    OracleMismatch { what: String },
    #[error("vertex {0:?} was never assigned during reconstruction")]
    UnassignedVertex(Coord),
}

/// Boundary condition selector for the slit domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bc {
    Dirichlet,
    Neumann,
}

impl Bc {
    /// Smallest level with a nonempty spectrum: the Dirichlet level-1 graph
    /// has no interior vertices at all.
    pub fn min_level(self) -> u32 {
        match self {
            Bc::Dirichlet => 2,
            Bc::Neumann => 1,
        }
    }
}

impl fmt::Display for Bc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bc::Dirichlet => write!(f, "dirichlet"),
            Bc::Neumann => write!(f, "neumann"),
        }
    }
}

/// Reflection class of an eigenfunction under x ↦ 1-x.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symmetry {
    Symmetric,
    Skew,
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symmetry::Symmetric => write!(f, "symmetric"),
            Symmetry::Skew => write!(f, "skew"),
        }
    }
}

/// Which graph (or limit) a record belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumLevel {
    Graph(u32),
    Limit,
}

impl fmt::Display for SpectrumLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumLevel::Graph(m) => write!(f, "{m}"),
            SpectrumLevel::Limit => write!(f, "limit"),
        }
    }
}

/// Structural class of an eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub enum EigenType {
    /// Born as the exact value `series` (2, 5 or 6 depending on the graph
    /// family) at level `birth` and carried down by the inverse branches.
    Localized { series: u32, birth: u32 },
    /// Simple root of the symmetric reduced determinant family.
    PrimitiveSym,
    /// Simple root of the skew reduced determinant family.
    PrimitiveSkew,
    /// Copy of a skew primitive value from `contractions` levels earlier,
    /// repeated on each of the 2^contractions congruent subdomains.
    Miniaturized { contractions: u32, source_value: f64 },
}

impl EigenType {
    /// Short class name used for sorting ties and for serialization.
    pub fn class(&self) -> &'static str {
        match self {
            EigenType::Localized { .. } => "localized",
            EigenType::PrimitiveSym => "primitive_sym",
            EigenType::PrimitiveSkew => "primitive_skew",
            EigenType::Miniaturized { .. } => "miniaturized",
        }
    }

    fn rank(&self) -> u8 {
        match self {
            EigenType::Localized { .. } => 0,
            EigenType::PrimitiveSym => 1,
            EigenType::PrimitiveSkew => 2,
            EigenType::Miniaturized { .. } => 3,
        }
    }
}

/// Where a record's value came from.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    /// Exact branch word from a localized birth value, or a weak
    /// (bracket-guided) word for limit-spectrum sequences.
    Branch(BranchSequence),
    /// Certified isolating bracket of a determinant-family root.
    Bracket { family: Family, level: u32, index: usize, gap: String },
    /// Scaled or copied skew primitive value.
    Contraction { k: u32, source: String },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Branch(seq) => write!(f, "{seq}"),
            Provenance::Bracket { family, level, index, gap } => {
                write!(f, "{family}_{level}[{index}] in {gap}")
            }
            Provenance::Contraction { k, source } => write!(f, "copy^{k} of {source}"),
        }
    }
}

/// One eigenvalue with its multiplicity, class and derivation trail.
#[derive(Clone, Debug)]
pub struct EigenvalueRecord {
    pub level: SpectrumLevel,
    pub value: f64,
    /// Certified enclosure when the value is a polynomial root.
    pub interval: Option<RootInterval>,
    pub multiplicity: u64,
    pub etype: EigenType,
    pub provenance: Provenance,
    /// Resolution error estimate for weakly-continued limit values; exact
    /// records carry `None`.
    pub error_bar: Option<f64>,
}

impl EigenvalueRecord {
    /// Birth level for localized records, source level for miniaturized
    /// ones; `None` for primitives.
    pub fn birth(&self) -> Option<u32> {
        match &self.etype {
            EigenType::Localized { birth, .. } => Some(*birth),
            EigenType::Miniaturized { contractions, .. } => match self.level {
                SpectrumLevel::Graph(m) => Some(m - contractions),
                SpectrumLevel::Limit => None,
            },
            _ => None,
        }
    }
}

/// Per-class multiplicity totals of an assembled table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TypeLedger {
    pub localized: u64,
    pub primitive_sym: u64,
    pub primitive_skew: u64,
    pub miniaturized: u64,
    pub total: u64,
}

impl TypeLedger {
    pub fn tally(records: &[EigenvalueRecord]) -> Self {
        let mut ledger =
            TypeLedger { localized: 0, primitive_sym: 0, primitive_skew: 0, miniaturized: 0, total: 0 };
        for r in records {
            match r.etype {
                EigenType::Localized { .. } => ledger.localized += r.multiplicity,
                EigenType::PrimitiveSym => ledger.primitive_sym += r.multiplicity,
                EigenType::PrimitiveSkew => ledger.primitive_skew += r.multiplicity,
                EigenType::Miniaturized { .. } => ledger.miniaturized += r.multiplicity,
            }
            ledger.total += r.multiplicity;
        }
        ledger
    }
}

/// Complete spectrum of one graph level under one boundary condition.
#[derive(Clone, Debug)]
pub struct SpectrumTable {
    pub level: u32,
    pub bc: Bc,
    /// Sorted by value; equal values are ordered localized < symmetric
    /// primitive < skew primitive < miniaturized.
    pub records: Vec<EigenvalueRecord>,
    pub ledger: TypeLedger,
}

// ---------------------------------------------------------------------------
// closed-form counts
// ---------------------------------------------------------------------------

pub(crate) fn pow3(m: u32) -> u64 {
    3u64.pow(m)
}

pub(crate) fn pow2(m: u32) -> u64 {
    2u64.pow(m)
}

/// Interior vertex count of the slit-domain graph (the Dirichlet dimension).
pub fn interior_count(m: u32) -> u64 {
    (pow3(m + 1) - 1) / 2 - pow2(m + 1)
}

/// Total vertex count of the slit-domain graph (the Neumann dimension).
pub fn vertex_count(m: u32) -> u64 {
    (pow3(m + 1) + 1) / 2 - pow2(m)
}

/// Multiplicity of a newborn localized value; 0 when the value has not yet
/// been born at the requested level.
pub fn localized_birth_multiplicity(bc: Bc, series: u32, m: u32) -> u64 {
    let signed = match (bc, series) {
        (_, 5) => (pow3(m - 1) as i64 + 1) / 2 - pow2(m - 1) as i64,
        (Bc::Dirichlet, 6) => (pow3(m) as i64 - 1) / 2 - pow2(m) as i64,
        (Bc::Neumann, 6) => (pow3(m) as i64 + 1) / 2 - pow2(m) as i64,
        _ => panic!("series {series} is not a localized birth value of the slit domain"),
    };
    signed.max(0) as u64
}

/// Closed-form per-class totals for a level-m table.
pub fn expected_ledger(bc: Bc, m: u32) -> TypeLedger {
    match bc {
        Bc::Dirichlet => {
            let localized = ((pow3(m + 1) - 1) / 2) as i64
                - (m as i64 - 2) * pow2(m) as i64
                - 13 * pow2(m - 2) as i64;
            let miniaturized = (m as i64 - 3) * pow2(m) as i64 + 4;
            TypeLedger {
                localized: localized.max(0) as u64,
                primitive_sym: pow2(m) + pow2(m - 2) - 2,
                primitive_skew: pow2(m) - 2,
                miniaturized: miniaturized.max(0) as u64,
                total: interior_count(m),
            }
        }
        Bc::Neumann => {
            let localized = ((pow3(m + 1) - 1) / 2) as i64
                - pow2(m + 1) as i64
                - (m as i64 - 1) * pow2(m) as i64;
            let miniaturized = (m as i64 - 2) * pow2(m) as i64 + 2;
            TypeLedger {
                localized: localized.max(0) as u64,
                primitive_sym: pow2(m),
                primitive_skew: pow2(m) - 1,
                miniaturized: miniaturized.max(0) as u64,
                total: vertex_count(m),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// the four class builders
// ---------------------------------------------------------------------------

/// All localized eigenvalues of the level-m graph: newborn 5s and 6s at
/// every level up to m, carried down by φ_±, with 6 continuing only through
/// the plus branch (its minus image is the forbidden value 2).
pub fn localized_graph_eigenvalues(m: u32, bc: Bc) -> Result<Vec<EigenvalueRecord>, AssembleError> {
    if m < bc.min_level() {
        return Err(AssembleError::LevelTooSmall { level: m, bc, min: bc.min_level() });
    }
    let seeds: Vec<(u32, Box<dyn Fn(u32) -> u64>)> = vec![
        (5, Box::new(move |m0| localized_birth_multiplicity(bc, 5, m0))),
        (6, Box::new(move |m0| localized_birth_multiplicity(bc, 6, m0))),
    ];
    let records = localized_records_from_seeds(m, &seeds);
    let tally: u64 = records.iter().map(|r| r.multiplicity).sum();
    let expected = expected_ledger(bc, m).localized;
    if tally != expected {
        return Err(AssembleError::LedgerMismatch {
            level: m,
            bc,
            class: "localized",
            found: tally,
            expected,
        });
    }
    Ok(records)
}

/// Generic localized recursion: shared between the slit domain and the full
/// gasket, which differ only in their seed values and birth multiplicities.
pub(crate) fn localized_records_from_seeds(
    m: u32,
    seeds: &[(u32, Box<dyn Fn(u32) -> u64>)],
) -> Vec<EigenvalueRecord> {
    let mut current: Vec<EigenvalueRecord> = Vec::new();
    for level in 1..=m {
        let mut next: Vec<EigenvalueRecord> = Vec::new();
        // continuations of the previous level through the inverse branches
        for rec in &current {
            let EigenType::Localized { series, birth } = rec.etype else { unreachable!() };
            let Provenance::Branch(seq) = &rec.provenance else { unreachable!() };
            let branches: &[Branch] = if rec.value == 6.0 {
                &[Branch::Plus] // φ_-(6) = 2 is forbidden
            } else {
                &[Branch::Minus, Branch::Plus]
            };
            for &b in branches {
                let child = phi(b, rec.value).expect("localized values stay below 25/4");
                let mut word = seq.branches.clone();
                word.push(b);
                next.push(EigenvalueRecord {
                    level: SpectrumLevel::Graph(level),
                    value: child,
                    interval: None,
                    multiplicity: rec.multiplicity,
                    etype: EigenType::Localized { series, birth },
                    provenance: Provenance::Branch(BranchSequence::new(birth, series as f64, word, false)),
                    error_bar: None,
                });
            }
        }
        // newborn values at this level
        for (series, mult_fn) in seeds {
            let mult = mult_fn(level);
            if mult == 0 {
                continue;
            }
            next.push(EigenvalueRecord {
                level: SpectrumLevel::Graph(level),
                value: *series as f64,
                interval: None,
                multiplicity: mult,
                etype: EigenType::Localized { series: *series, birth: level },
                provenance: Provenance::Branch(BranchSequence::new(level, *series as f64, Vec::new(), false)),
                error_bar: None,
            });
        }
        current = merge_equal_values(next);
    }
    current.sort_by(|a, b| a.value.total_cmp(&b.value));
    current
}

/// Records carrying the same value (up to an exact-arithmetic hairline) are
/// one eigenspace: add their multiplicities. Distinct branch words from the
/// same seed never collide, so in practice this is a no-op kept as a guard.
fn merge_equal_values(mut records: Vec<EigenvalueRecord>) -> Vec<EigenvalueRecord> {
    records.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut out: Vec<EigenvalueRecord> = Vec::new();
    for rec in records {
        match out.last_mut() {
            Some(last)
                if (last.value - rec.value).abs() < 1e-12 && last.etype == rec.etype =>
            {
                last.multiplicity += rec.multiplicity;
            }
            _ => out.push(rec),
        }
    }
    out
}

/// Which determinant family carries the primitive eigenvalues of a class.
pub fn primitive_family(bc: Bc, symmetry: Symmetry) -> Family {
    match (bc, symmetry) {
        (Bc::Dirichlet, Symmetry::Symmetric) => Family::P,
        (Bc::Dirichlet, Symmetry::Skew) => Family::PTilde,
        (Bc::Neumann, Symmetry::Symmetric) => Family::PN,
        (Bc::Neumann, Symmetry::Skew) => Family::PSkewN,
    }
}

/// Primitive eigenvalues of one symmetry class: the certified roots of the
/// matching reduced family, each simple.
pub fn primitive_graph_eigenvalues(
    tables: &mut FamilyTables,
    m: u32,
    bc: Bc,
    symmetry: Symmetry,
) -> Result<Vec<EigenvalueRecord>, AssembleError> {
    if m < bc.min_level() {
        return Err(AssembleError::LevelTooSmall { level: m, bc, min: bc.min_level() });
    }
    let family = primitive_family(bc, symmetry);
    let table = tables.root_table_cloned(family, m)?;
    let etype = match symmetry {
        Symmetry::Symmetric => EigenType::PrimitiveSym,
        Symmetry::Skew => EigenType::PrimitiveSkew,
    };
    Ok(table
        .roots
        .iter()
        .enumerate()
        .map(|(i, root)| EigenvalueRecord {
            level: SpectrumLevel::Graph(m),
            value: root.value,
            interval: Some(root.interval.clone()),
            multiplicity: 1,
            etype: etype.clone(),
            provenance: Provenance::Bracket {
                family,
                level: m,
                index: i + 1,
                gap: root.bracket.clone(),
            },
            error_bar: None,
        })
        .collect())
}

/// Miniaturized eigenvalues: every skew primitive root born at a coarser
/// level m' < m reappears unchanged in value, once per congruent copy of
/// the coarser domain inside the finer one, i.e. with multiplicity 2^(m-m').
pub fn miniaturized_graph_eigenvalues(
    tables: &mut FamilyTables,
    m: u32,
    bc: Bc,
) -> Result<Vec<EigenvalueRecord>, AssembleError> {
    if m < bc.min_level() {
        return Err(AssembleError::LevelTooSmall { level: m, bc, min: bc.min_level() });
    }
    let family = primitive_family(bc, Symmetry::Skew);
    let mut records = Vec::new();
    for source_level in family.min_level()..m {
        let table = tables.root_table_cloned(family, source_level)?;
        let contractions = m - source_level;
        for (i, root) in table.roots.iter().enumerate() {
            records.push(EigenvalueRecord {
                level: SpectrumLevel::Graph(m),
                value: root.value,
                interval: Some(root.interval.clone()),
                multiplicity: pow2(contractions),
                etype: EigenType::Miniaturized { contractions, source_value: root.value },
                provenance: Provenance::Contraction {
                    k: contractions,
                    source: format!("{family}_{source_level}[{}]", i + 1),
                },
                error_bar: None,
            });
        }
    }
    records.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(records)
}

/// Builds the complete level-m spectrum and verifies its per-class totals
/// against the closed-form counts; any mismatch is a structural error, not
/// a tolerance issue.
pub fn assemble(
    tables: &mut FamilyTables,
    m: u32,
    bc: Bc,
) -> Result<SpectrumTable, AssembleError> {
    let mut records = localized_graph_eigenvalues(m, bc)?;
    records.extend(primitive_graph_eigenvalues(tables, m, bc, Symmetry::Symmetric)?);
    records.extend(primitive_graph_eigenvalues(tables, m, bc, Symmetry::Skew)?);
    records.extend(miniaturized_graph_eigenvalues(tables, m, bc)?);
    records.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.etype.rank().cmp(&b.etype.rank())));

    let ledger = TypeLedger::tally(&records);
    let expected = expected_ledger(bc, m);
    for (class, found, want) in [
        ("localized", ledger.localized, expected.localized),
        ("primitive_sym", ledger.primitive_sym, expected.primitive_sym),
        ("primitive_skew", ledger.primitive_skew, expected.primitive_skew),
        ("miniaturized", ledger.miniaturized, expected.miniaturized),
        ("total", ledger.total, expected.total),
    ] {
        if found != want {
            return Err(AssembleError::LedgerMismatch { level: m, bc, class, found, expected: want });
        }
    }

    // Under Dirichlet conditions the four classes have pairwise distinct
    // values; near-coincidences are real (distinct polynomial roots can sit
    // ~1e-7 apart at level 5) but never closer than the structural floor.
    if bc == Bc::Dirichlet {
        for pair in records.windows(2) {
            if (pair[1].value - pair[0].value).abs() < DISJOINTNESS_TOL
                && pair[0].provenance != pair[1].provenance
                && pair[0].etype.class() == pair[1].etype.class()
            {
                return Err(AssembleError::DisjointnessViolation {
                    a: pair[0].value,
                    b: pair[1].value,
                    class: pair[0].etype.class().to_string(),
                    level: m,
                    tol: DISJOINTNESS_TOL,
                });
            }
        }
    }

    Ok(SpectrumTable { level: m, bc, records, ledger })
}

// ---------------------------------------------------------------------------
// skeleton systems
// ---------------------------------------------------------------------------

/// Solution of the left-edge skeleton chain for one candidate eigenvalue:
/// the values b_0..b_m at the chain vertices, plus the defect of the one
/// equation not consumed by forward elimination.
#[derive(Clone, Debug)]
pub struct SkeletonSolution {
    pub lambda: f64,
    pub m: u32,
    pub symmetry: Symmetry,
    pub bc: Bc,
    /// Chain values b_0..b_m; b_1 = 1 except for the symmetric Neumann
    /// chain, which is normalized by b_0 = 1 instead.
    pub b: Vec<f64>,
    /// Endpoint equation defect relative to the largest chain entry.
    pub residual: f64,
}

/// Solves the skeleton chain for λ by forward substitution and rejects λ
/// unless the left-over endpoint equation closes to [`SKELETON_TOL`].
///
/// The chain couples b_{i-1}, b_i, b_{i+1} through the entry polynomials
/// evaluated at λ_{i+1}, where λ_i = f^(m-i)(λ) is the decimated eigenvalue
/// governing the i-th refinement stage. Dirichlet chains start from b_0 = 0
/// and must return to b_m = 0; Neumann chains start from the apex relation
/// (4-λ_1)b_0 = 4b_1 and must close the bottom relation (2-λ_m)b_m = 2b_{m-1}.
/// Skew chains replace the first interior row by the folded coefficients
/// carrying the sign flip across the symmetry axis.
pub fn skeleton_solve(
    lambda: f64,
    m: u32,
    symmetry: Symmetry,
    bc: Bc,
) -> Result<SkeletonSolution, AssembleError> {
    assert!(m >= 1, "skeleton chains need at least one refinement level");
    // decimated eigenvalues: lam[i] = λ_i = f^(m-i)(λ), 1-based in i
    let mut lam = vec![0.0; m as usize + 1];
    lam[m as usize] = lambda;
    for i in (1..m as usize).rev() {
        lam[i] = f_map(lam[i + 1]);
    }

    let s = |x: f64| -x * x * x + 11.0 * x * x - 35.0 * x + 26.0;
    let r = |x: f64| -2.0 * x * x + 14.0 * x - 20.0;
    let l = |x: f64| x - 6.0;
    let s_tilde = |x: f64| x * x - 9.0 * x + 19.0;
    let r_tilde = |x: f64| 2.0 * x - 10.0;

    let n = m as usize;
    let mut b = vec![0.0; n + 1];
    let start: usize; // first chain row solved by the generic recurrence
    match (bc, symmetry) {
        (Bc::Dirichlet, Symmetry::Symmetric) => {
            b[0] = 0.0;
            b[1] = 1.0;
            start = 1;
        }
        (Bc::Dirichlet, Symmetry::Skew) | (Bc::Neumann, Symmetry::Skew) => {
            b[0] = 0.0;
            b[1] = 1.0;
            if n >= 2 {
                let rt = r_tilde(lam[2]);
                if rt.abs() < 1e-12 {
                    return Err(AssembleError::DegenerateChain { i: 2, lambda_i: lam[2], r: rt });
                }
                b[2] = -s_tilde(lam[2]) / rt;
            }
            start = 2;
        }
        (Bc::Neumann, Symmetry::Symmetric) => {
            b[0] = 1.0;
            if n >= 1 {
                b[1] = (4.0 - lam[1]) / 4.0;
            }
            start = 1;
        }
    }
    for i in start..n {
        let x = lam[i + 1];
        let ri = r(x);
        if ri.abs() < 1e-12 {
            return Err(AssembleError::DegenerateChain { i: i as u32 + 1, lambda_i: x, r: ri });
        }
        b[i + 1] = -(l(x) * b[i - 1] + s(x) * b[i]) / ri;
    }

    let scale = b.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let residual = match (bc, symmetry) {
        (Bc::Dirichlet, _) => b[n].abs() / scale,
        (Bc::Neumann, Symmetry::Skew) if n == 1 => ((6.0 - lambda) * b[1]).abs() / scale,
        (Bc::Neumann, _) => ((2.0 - lambda) * b[n] - 2.0 * b[n - 1]).abs() / scale,
    };
    if residual > SKELETON_TOL {
        return Err(AssembleError::NotAnEigenvalue { lambda, m, symmetry, bc, residual });
    }
    Ok(SkeletonSolution { lambda, m, symmetry, bc, b, residual })
}

// ---------------------------------------------------------------------------
// eigenfunction reconstruction
// ---------------------------------------------------------------------------

/// A vertex-value vector rebuilt from skeleton data, with its verified
/// eigenvalue-equation defect.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub lambda: f64,
    pub symmetry: Symmetry,
    pub bc: Bc,
    /// One value per graph vertex, in graph order.
    pub values: Vec<f64>,
    /// Largest eigenvalue-equation defect, relative to the sup norm.
    pub residual: f64,
}

/// Rebuilds the full eigenfunction of a primitive record from its skeleton
/// chain.
///
/// The slit domain decomposes into the cells that touch the deleted bottom
/// line (words over {1,2}) plus, hanging off each of them, one full gasket
/// cell (the word extended by 0) that contains no slit. The chain values
/// b_k propagate to every bottom-touching cell of depth k — unchanged on
/// the left half, multiplied by the symmetry sign on the right half — and
/// each full cell is then filled top-down by the three-corner interpolation
/// with the decimated eigenvalue of its stage. The result is checked
/// against the eigenvalue equation at every vertex.
pub fn reconstruct_eigenfunction(
    rec: &EigenvalueRecord,
    bc: Bc,
    g: &GraphApprox,
) -> Result<Reconstruction, AssembleError> {
    let symmetry = match rec.etype {
        EigenType::PrimitiveSym => Symmetry::Symmetric,
        EigenType::PrimitiveSkew => Symmetry::Skew,
        ref other => return Err(AssembleError::NotPrimitive { found: other.class().to_string() }),
    };
    if g.kind != GraphKind::Omega {
        return Err(AssembleError::WrongGraphKind(g.kind));
    }
    let SpectrumLevel::Graph(m) = rec.level else {
        return Err(AssembleError::NotPrimitive { found: "limit".into() });
    };
    if m != g.level {
        return Err(AssembleError::LevelMismatch { record: m, graph: g.level });
    }

    let lambda = rec.value;
    let sol = skeleton_solve(lambda, m, symmetry, bc)?;
    let sign = match symmetry {
        Symmetry::Symmetric => 1.0,
        Symmetry::Skew => -1.0,
    };
    let mut lam = vec![0.0; m as usize + 1];
    lam[m as usize] = lambda;
    for i in (1..m as usize).rev() {
        lam[i] = f_map(lam[i + 1]);
    }

    let mut values = vec![0.0f64; g.n()];
    let mut assigned = vec![false; g.n()];
    let set = |coord: &Coord, v: f64, values: &mut Vec<f64>, assigned: &mut Vec<bool>| {
        if let Some(i) = g.index_of(coord) {
            values[i] = v;
            assigned[i] = true;
        }
    };

    // chain values on every bottom-touching cell's top corner
    let dirichlet = bc == Bc::Dirichlet;
    for k in 0..=m {
        for id in 0..pow2(k) {
            let word: Vec<u8> = (0..k).map(|j| 1 + ((id >> (k - 1 - j)) & 1) as u8).collect();
            let top = cell_corners(&word)[0];
            let mut v = if dirichlet && (k == m || k == 0) {
                0.0 // boundary values are exactly zero, not the solver's defect
            } else {
                sol.b[k as usize]
            };
            if k > 0 && word[0] == 2 {
                v *= sign;
            }
            set(&top, v, &mut values, &mut assigned);
        }
    }

    // fill each slit-free cell top-down from its three corners
    let denom_ok = |x: f64| (2.0 - x) * (5.0 - x);
    for k in 0..m {
        for id in 0..pow2(k) {
            let mut word: Vec<u8> = (0..k).map(|j| 1 + ((id >> (k - 1 - j)) & 1) as u8).collect();
            word.push(0);
            let corners = cell_corners(&word);
            let corner_values: Vec<f64> = corners
                .iter()
                .map(|c| {
                    let i = g.index_of(c).expect("full-cell corners stay above the slit");
                    values[i]
                })
                .collect();
            let mut stack = vec![(word, [corner_values[0], corner_values[1], corner_values[2]])];
            while let Some((w, vals)) = stack.pop() {
                if w.len() as u32 == m {
                    continue;
                }
                let x = lam[w.len() + 1];
                let denom = denom_ok(x);
                let corners = cell_corners(&w);
                let mut mids = [0.0; 3];
                for i in 0..3 {
                    let y = Coord::midpoint(corners[(i + 1) % 3], corners[(i + 2) % 3]);
                    mids[i] =
                        ((4.0 - x) * (vals[(i + 1) % 3] + vals[(i + 2) % 3]) + 2.0 * vals[i]) / denom;
                    set(&y, mids[i], &mut values, &mut assigned);
                }
                // subcell i keeps the original corner i; its other two
                // corners are the midpoints flanking that corner
                for i in 0..3usize {
                    let mut sub = w.clone();
                    sub.push(i as u8);
                    let mut sub_vals = [0.0; 3];
                    sub_vals[i] = vals[i];
                    sub_vals[(i + 1) % 3] = mids[(i + 2) % 3];
                    sub_vals[(i + 2) % 3] = mids[(i + 1) % 3];
                    stack.push((sub, sub_vals));
                }
            }
        }
    }

    for (i, c) in g.vertices.iter().enumerate() {
        if !assigned[i] {
            return Err(AssembleError::UnassignedVertex(*c));
        }
    }

    // verify the eigenvalue equation everywhere: plain 4-neighbor rows at
    // interior vertices, weight-1/2 rows (doubled neighbors) at free
    // boundary vertices; Dirichlet boundary values are pinned to zero.
    let scale = values.iter().fold(f64::MIN_POSITIVE, |acc, v| acc.max(v.abs()));
    let tol = RECONSTRUCTION_TOL * scale;
    let mut worst = 0.0f64;
    for i in 0..g.n() {
        let nbr_sum: f64 = g.neighbors(i).iter().map(|&j| values[j]).sum();
        let defect = if g.is_boundary(i) {
            match bc {
                Bc::Dirichlet => values[i].abs(),
                Bc::Neumann => ((4.0 - lambda) * values[i] - 2.0 * nbr_sum).abs(),
            }
        } else {
            ((4.0 - lambda) * values[i] - nbr_sum).abs()
        };
        if defect > worst {
            worst = defect;
        }
        if defect > tol {
            return Err(AssembleError::ReconstructionResidual { vertex: i, residual: defect, tol });
        }
    }

    Ok(Reconstruction { lambda, symmetry, bc, values, residual: worst / scale })
}

// ---------------------------------------------------------------------------
// oracle comparison
// ---------------------------------------------------------------------------

/// Checks an assembled table against a dense-solver spectrum: both sides
/// are clustered by chaining values closer than `tol`, then matched cluster
/// by cluster in value and total multiplicity. Returns the number of
/// clusters compared.
pub fn compare_with_oracle(
    table: &SpectrumTable,
    oracle: &OracleSpectrum,
    tol: f64,
) -> Result<usize, AssembleError> {
    let mine = cluster_values(
        table.records.iter().map(|r| (r.value, r.multiplicity)),
        tol,
    );
    let theirs = cluster_values(
        oracle.clusters.iter().map(|c| (c.value, c.multiplicity as u64)),
        tol,
    );
    if mine.len() != theirs.len() {
        return Err(AssembleError::OracleMismatch {
            what: format!(
                "level {} ({}): {} assembled clusters vs {} dense clusters",
                table.level,
                table.bc,
                mine.len(),
                theirs.len()
            ),
        });
    }
    for (i, (a, b)) in mine.iter().zip(&theirs).enumerate() {
        if (a.0 - b.0).abs() > tol {
            return Err(AssembleError::OracleMismatch {
                what: format!(
                    "cluster {i}: assembled value {:.12} vs dense value {:.12}",
                    a.0, b.0
                ),
            });
        }
        if a.1 != b.1 {
            return Err(AssembleError::OracleMismatch {
                what: format!(
                    "cluster {i} at {:.9}: assembled multiplicity {} vs dense {}",
                    a.0, a.1, b.1
                ),
            });
        }
    }
    Ok(mine.len())
}

/// Chain-rule clustering: consecutive values closer than `tol` fall into
/// one cluster, whose representative is the multiplicity-weighted mean.
fn cluster_values(
    values: impl Iterator<Item = (f64, u64)>,
    tol: f64,
) -> Vec<(f64, u64)> {
    let mut sorted: Vec<(f64, u64)> = values.collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, u64, f64)> = Vec::new(); // (last value, mult, weighted sum)
    for (v, mult) in sorted {
        match out.last_mut() {
            Some(c) if (v - c.0).abs() <= tol => {
                c.0 = v;
                c.1 += mult;
                c.2 += v * mult as f64;
            }
            _ => out.push((v, mult, v * mult as f64)),
        }
    }
    out.into_iter().map(|(_, mult, sum)| (sum / mult as f64, mult)).collect()
}

// ---------------------------------------------------------------------------
// limit spectrum
// ---------------------------------------------------------------------------

/// The renormalized limit spectrum below a cutoff.
#[derive(Clone, Debug)]
pub struct LimitSpectrum {
    pub bc: Bc,
    pub cutoff: f64,
    pub level_cap: u32,
    /// Below this value the enumeration is complete: every limit value is
    /// either exactly decimated or a weak sequence resolved within the cap.
    pub certified_below: f64,
    /// Set when the cutoff exceeds the certified range, i.e. records near
    /// the top of the list may be missing neighbors.
    pub truncated: bool,
    pub records: Vec<EigenvalueRecord>,
    pub ledger: TypeLedger,
}

/// Scaled limit of an exactly-decimated value that has fixed (taken its
/// last plus step) at `level` with value `lambda`.
pub(crate) fn scaled_limit(level: u32, lambda: f64) -> f64 {
    5f64.powi(level as i32) * phi_limit(lambda)
}

/// Enumerates the limit spectrum up to `cutoff`.
///
/// Localized sequences decimate exactly, so their limits come straight from
/// the renormalized limit function at the fixation level. Primitive
/// sequences move by bracket-guided root continuation instead; their tails
/// are resolved by following the root index down to `level_cap` and the
/// difference between the last two resolutions is kept as an error bar.
/// Miniaturized limits are the skew primitive limits scaled by powers of 5,
/// with multiplicity doubling per contraction. The certified range grows
/// like 5^cap, so the default cap covers any practical cutoff; beyond it
/// the table is flagged truncated rather than silently incomplete.
pub fn limit_spectrum(
    tables: &mut FamilyTables,
    bc: Bc,
    cutoff: f64,
    level_cap: u32,
) -> Result<LimitSpectrum, AssembleError> {
    let certified_below = 5f64.powi(level_cap as i32) * phi_limit(3.0);
    let mut records: Vec<EigenvalueRecord> = Vec::new();

    // -- localized limits: exact decimation from each birth
    for series in [5u32, 6u32] {
        let mut m0 = bc.min_level();
        loop {
            let mult = localized_birth_multiplicity(bc, series, m0);
            if scaled_limit(m0, 5.0) > cutoff {
                break;
            }
            if mult > 0 {
                localized_limit_walk(series, m0, mult, cutoff, level_cap, &mut records);
            }
            m0 += 1;
        }
    }

    // -- primitive limits: weak sequences from every newborn root
    for symmetry in [Symmetry::Symmetric, Symmetry::Skew] {
        primitive_limit_walks(tables, bc, symmetry, cutoff, level_cap, &mut records)?;
    }

    // -- miniaturized limits: scaled skew limits, doubling per contraction
    let skew_limits: Vec<EigenvalueRecord> = records
        .iter()
        .filter(|r| r.etype == EigenType::PrimitiveSkew)
        .cloned()
        .collect();
    let min_skew = skew_limits.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
    let mut k = 1u32;
    while min_skew * 5f64.powi(k as i32) <= cutoff {
        for src in &skew_limits {
            let value = src.value * 5f64.powi(k as i32);
            if value > cutoff {
                continue;
            }
            records.push(EigenvalueRecord {
                level: SpectrumLevel::Limit,
                value,
                interval: None,
                multiplicity: pow2(k),
                etype: EigenType::Miniaturized { contractions: k, source_value: src.value },
                provenance: Provenance::Contraction {
                    k,
                    source: src.provenance.to_string(),
                },
                error_bar: src.error_bar.map(|e| e * 5f64.powi(k as i32)),
            });
        }
        k += 1;
    }

    records.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.etype.rank().cmp(&b.etype.rank())));
    let ledger = TypeLedger::tally(&records);
    Ok(LimitSpectrum {
        bc,
        cutoff,
        level_cap,
        certified_below,
        truncated: cutoff > certified_below,
        records,
        ledger,
    })
}

/// Depth-first walk over exact branch words from one localized birth.
/// A word that is empty or ends in a plus step fixes the sequence; longer
/// words pass through later plus steps and give larger limits.
pub(crate) fn localized_limit_walk(
    series: u32,
    m0: u32,
    mult: u64,
    cutoff: f64,
    level_cap: u32,
    records: &mut Vec<EigenvalueRecord>,
) {
    let mut stack: Vec<(f64, Vec<Branch>)> = vec![(series as f64, Vec::new())];
    while let Some((lambda, word)) = stack.pop() {
        let level = m0 + word.len() as u32;
        if word.is_empty() || word.last() == Some(&Branch::Plus) {
            let value = scaled_limit(level, lambda);
            if value <= cutoff {
                records.push(EigenvalueRecord {
                    level: SpectrumLevel::Limit,
                    value,
                    interval: None,
                    multiplicity: mult,
                    etype: EigenType::Localized { series, birth: m0 },
                    provenance: Provenance::Branch(BranchSequence::new(
                        m0,
                        series as f64,
                        word.clone(),
                        false,
                    )),
                    error_bar: None,
                });
            }
        }
        // any deeper fixation happens at level+1 or later with value above
        // 5^(level+1)·Φ(3); stop expanding once that clears the cutoff
        if level + 1 > level_cap || scaled_limit(level + 1, 3.0) > cutoff {
            continue;
        }
        let branches: &[Branch] =
            if lambda == 6.0 { &[Branch::Plus] } else { &[Branch::Minus, Branch::Plus] };
        for &b in branches {
            let child = phi(b, lambda).expect("localized values stay below 25/4");
            let mut w = word.clone();
            w.push(b);
            stack.push((child, w));
        }
    }
}

/// Newborn roots of a primitive family at one level: the indices (1-based)
/// that do not continue any root of the previous level.
fn newborn_indices(family: Family, m: u32) -> Vec<usize> {
    let n = family.degree(m) as usize;
    match family {
        Family::P | Family::PTilde => {
            if m == family.min_level() {
                (1..=n).collect()
            } else {
                let parents = family.degree(m - 1) as usize;
                vec![parents + 1, n] // middle newborn and top newborn
            }
        }
        // the symmetric Neumann family is seeded by 0 and 6; afterwards
        // only a fresh 6 appears at the top of each level
        Family::PN => {
            if m == 1 {
                vec![1, 2]
            } else {
                vec![n]
            }
        }
        Family::PSkewN => {
            if m == 1 {
                vec![1]
            } else {
                vec![n]
            }
        }
        _ => panic!("{family} has no root table"),
    }
}

/// 1-based index of the plus-branch continuation at the next level for a
/// root currently at `index`; minus-branch continuations keep their index.
/// `None` marks values with no plus continuation (the exact 0).
fn plus_child_index(family: Family, next_level: u32, index: usize, value: f64) -> Option<usize> {
    let n_next = family.degree(next_level) as usize;
    match family {
        Family::P | Family::PTilde => Some(n_next - index),
        Family::PN => {
            if value == 0.0 {
                None
            } else {
                Some(n_next + 1 - index)
            }
        }
        Family::PSkewN => Some(n_next - index),
        _ => panic!("{family} has no root table"),
    }
}

/// Depth-first walk over weak branch words from every newborn root of one
/// primitive family, resolving each fixed tail down to the level cap.
fn primitive_limit_walks(
    tables: &mut FamilyTables,
    bc: Bc,
    symmetry: Symmetry,
    cutoff: f64,
    level_cap: u32,
    records: &mut Vec<EigenvalueRecord>,
) -> Result<(), AssembleError> {
    let family = primitive_family(bc, symmetry);
    let etype = match symmetry {
        Symmetry::Symmetric => EigenType::PrimitiveSym,
        Symmetry::Skew => EigenType::PrimitiveSkew,
    };
    // root tables at the two deepest levels resolve every fixed tail
    let cap_table = tables.root_table_cloned(family, level_cap)?;
    let prev_table = tables.root_table_cloned(family, level_cap - 1)?;

    let mut m0 = family.min_level();
    // the smallest possible newborn fixation value is 5^m0·Φ(2)
    while 5f64.powi(m0 as i32) * phi_limit(2.0) <= cutoff && m0 <= level_cap {
        let birth_table = tables.root_table_cloned(family, m0)?;
        for idx in newborn_indices(family, m0) {
            let birth_value = birth_table.roots[idx - 1].value;
            if birth_value == 0.0 {
                // the constant eigenfunction: an exact fixed point of the
                // weak continuation, so its limit is exactly 0
                records.push(EigenvalueRecord {
                    level: SpectrumLevel::Limit,
                    value: 0.0,
                    interval: None,
                    multiplicity: 1,
                    etype: etype.clone(),
                    provenance: Provenance::Branch(BranchSequence::new(m0, 0.0, Vec::new(), true)),
                    error_bar: Some(0.0),
                });
                continue;
            }
            // walk: states are (level, 1-based index, word)
            let mut stack: Vec<(u32, usize, Vec<Branch>)> = vec![(m0, idx, Vec::new())];
            while let Some((level, index, word)) = stack.pop() {
                if word.is_empty() || word.last() == Some(&Branch::Plus) {
                    // resolve the all-minus tail: the index is preserved
                    let resolved = cap_table.roots[index - 1].value;
                    let value = scaled_limit(level_cap, resolved);
                    // sequences alive at cap-1 compare two resolutions;
                    // ones born at the cap itself have no cruder view
                    let error = (level < level_cap).then(|| {
                        let previous = prev_table.roots[index - 1].value;
                        (value - scaled_limit(level_cap - 1, previous)).abs()
                    });
                    if value <= cutoff {
                        records.push(EigenvalueRecord {
                            level: SpectrumLevel::Limit,
                            value,
                            interval: None,
                            multiplicity: 1,
                            etype: etype.clone(),
                            provenance: Provenance::Branch(BranchSequence::new(
                                m0,
                                birth_value,
                                word.clone(),
                                true,
                            )),
                            error_bar: error,
                        });
                    }
                }
                if level + 1 > level_cap || scaled_limit(level + 1, 3.0) > cutoff {
                    continue;
                }
                let current_value = tables.root_table_cloned(family, level)?.roots[index - 1].value;
                let mut minus_word = word.clone();
                minus_word.push(Branch::Minus);
                stack.push((level + 1, index, minus_word));
                if let Some(plus_idx) = plus_child_index(family, level + 1, index, current_value) {
                    let mut plus_word = word;
                    plus_word.push(Branch::Plus);
                    stack.push((level + 1, plus_idx, plus_word));
                }
            }
        }
        m0 += 1;
    }
    Ok(())
}

/// Convenience accessor: the certified root tables this module draws from.
pub fn primitive_root_table(
    tables: &mut FamilyTables,
    bc: Bc,
    symmetry: Symmetry,
    m: u32,
) -> Result<RootTable, AssembleError> {
    Ok(tables.root_table_cloned(primitive_family(bc, symmetry), m)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sg_core::{build_omega, dirichlet_matrix, eigensolve, neumann_matrix};

    fn tables() -> FamilyTables {
        FamilyTables::new(6)
    }

    #[test]
    fn localized_tables_match_known_small_levels() {
        // level 3, Dirichlet: one 5 and five 6s
        let recs = localized_graph_eigenvalues(3, Bc::Dirichlet).unwrap();
        let summary: Vec<(f64, u64)> = recs.iter().map(|r| (r.value, r.multiplicity)).collect();
        assert_eq!(summary, vec![(5.0, 1), (6.0, 5)]);

        // level 2 Dirichlet is empty
        assert!(localized_graph_eigenvalues(2, Bc::Dirichlet).unwrap().is_empty());

        // level 4, Dirichlet: continuations of the level-3 values plus newborns
        let recs = localized_graph_eigenvalues(4, Bc::Dirichlet).unwrap();
        let summary: Vec<(f64, u64)> = recs.iter().map(|r| (r.value, r.multiplicity)).collect();
        assert_eq!(summary.len(), 5);
        assert!((summary[0].0 - 1.381966).abs() < 1e-6 && summary[0].1 == 1);
        assert_eq!(summary[1], (3.0, 5));
        assert!((summary[2].0 - 3.618034).abs() < 1e-6 && summary[2].1 == 1);
        assert_eq!(summary[3], (5.0, 6));
        assert_eq!(summary[4], (6.0, 24));
        let total: u64 = recs.iter().map(|r| r.multiplicity).sum();
        assert_eq!(total, 37);

        // level 2, Neumann: just one 6
        let recs = localized_graph_eigenvalues(2, Bc::Neumann).unwrap();
        let summary: Vec<(f64, u64)> = recs.iter().map(|r| (r.value, r.multiplicity)).collect();
        assert_eq!(summary, vec![(6.0, 1)]);
    }

    #[test]
    fn six_continues_only_through_the_plus_branch() {
        let recs = localized_graph_eigenvalues(4, Bc::Dirichlet).unwrap();
        // φ_-(6) = 2 must never appear
        assert!(recs.iter().all(|r| (r.value - 2.0).abs() > 0.5));
        // the value 3 = φ_+(6) carries the full birth multiplicity
        let three = recs.iter().find(|r| r.value == 3.0).unwrap();
        assert_eq!(three.multiplicity, 5);
        assert_eq!(three.etype, EigenType::Localized { series: 6, birth: 3 });
    }

    #[test]
    fn miniaturized_records_copy_skew_values_with_doubled_multiplicity() {
        let mut t = tables();
        let recs = miniaturized_graph_eigenvalues(&mut t, 3, Bc::Dirichlet).unwrap();
        let summary: Vec<(f64, u64)> = recs.iter().map(|r| (r.value, r.multiplicity)).collect();
        assert_eq!(summary.len(), 2);
        assert!((summary[0].0 - 3.381966).abs() < 1e-6 && summary[0].1 == 2);
        assert!((summary[1].0 - 5.618034).abs() < 1e-6 && summary[1].1 == 2);

        // level 4: copies from levels 2 and 3 with multiplicities 4 and 2
        let recs = miniaturized_graph_eigenvalues(&mut t, 4, Bc::Dirichlet).unwrap();
        let total: u64 = recs.iter().map(|r| r.multiplicity).sum();
        assert_eq!(total, 20);
        assert!(recs
            .iter()
            .all(|r| matches!(r.etype, EigenType::Miniaturized { contractions: 1 | 2, .. })));
    }

    #[test]
    fn assembled_ledgers_match_closed_forms() {
        let mut t = tables();
        for m in 2..=5 {
            let table = assemble(&mut t, m, Bc::Dirichlet).unwrap();
            assert_eq!(table.ledger.total, interior_count(m));
        }
        for m in 1..=5 {
            let table = assemble(&mut t, m, Bc::Neumann).unwrap();
            assert_eq!(table.ledger.total, vertex_count(m));
        }
        // spot-check the published level-4 Dirichlet and level-5 Neumann rows
        let d4 = assemble(&mut t, 4, Bc::Dirichlet).unwrap().ledger;
        assert_eq!((d4.localized, d4.primitive_sym, d4.primitive_skew, d4.miniaturized), (37, 18, 14, 20));
        let n5 = assemble(&mut t, 5, Bc::Neumann).unwrap().ledger;
        assert_eq!((n5.localized, n5.primitive_sym, n5.primitive_skew, n5.miniaturized), (172, 32, 31, 98));
    }

    #[test]
    fn neumann_level_one_is_zero_six_six() {
        let mut t = tables();
        let table = assemble(&mut t, 1, Bc::Neumann).unwrap();
        let dims: Vec<(f64, u64, &str)> =
            table.records.iter().map(|r| (r.value, r.multiplicity, r.etype.class())).collect();
        assert_eq!(dims.len(), 3);
        assert_eq!(dims[0], (0.0, 1, "primitive_sym"));
        assert_eq!(dims[1], (6.0, 1, "primitive_sym"));
        assert_eq!(dims[2], (6.0, 1, "primitive_skew"));
        assert_eq!(table.ledger.total, 3);
    }

    #[test]
    fn assembled_spectra_agree_with_the_dense_solver() {
        let mut t = tables();
        for (m, bc) in [(2, Bc::Dirichlet), (3, Bc::Dirichlet), (2, Bc::Neumann), (3, Bc::Neumann)] {
            let table = assemble(&mut t, m, bc).unwrap();
            let g = build_omega(m).unwrap();
            let matrix = match bc {
                Bc::Dirichlet => dirichlet_matrix(&g),
                Bc::Neumann => neumann_matrix(&g),
            };
            let oracle = eigensolve(&matrix, false).unwrap();
            let clusters = compare_with_oracle(&table, &oracle, ORACLE_CLUSTER_TOL).unwrap();
            assert!(clusters > 0);
        }
    }

    #[test]
    fn skeleton_solutions_close_their_endpoint_equations() {
        let mut t = tables();
        // symmetric Dirichlet chain at level 2: the published (0, 1, 0) shape
        let root = t.root_table_cloned(Family::P, 2).unwrap().roots[0].value;
        let sol = skeleton_solve(root, 2, Symmetry::Symmetric, Bc::Dirichlet).unwrap();
        assert_eq!(sol.b.len(), 3);
        assert_eq!(sol.b[0], 0.0);
        assert_eq!(sol.b[1], 1.0);
        assert!(sol.b[2].abs() < 1e-10);

        // every certified root closes its chain, for every class
        for (family, symmetry, bc, min) in [
            (Family::P, Symmetry::Symmetric, Bc::Dirichlet, 2),
            (Family::PTilde, Symmetry::Skew, Bc::Dirichlet, 2),
            (Family::PN, Symmetry::Symmetric, Bc::Neumann, 1),
            (Family::PSkewN, Symmetry::Skew, Bc::Neumann, 1),
        ] {
            for m in min..=5u32 {
                for root in t.root_table_cloned(family, m).unwrap().roots {
                    let sol = skeleton_solve(root.value, m, symmetry, bc).unwrap();
                    assert!(
                        sol.residual < SKELETON_TOL,
                        "{family}_{m} root {} has residual {}",
                        root.value,
                        sol.residual
                    );
                    if m >= 2 {
                        assert!(
                            sol.b[m as usize - 1].abs() > 1e-6,
                            "{family}_{m}: b_{} unexpectedly small",
                            m - 1
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn skeleton_solve_rejects_non_eigenvalues() {
        let err = skeleton_solve(1.0, 3, Symmetry::Symmetric, Bc::Dirichlet).unwrap_err();
        assert!(matches!(err, AssembleError::NotAnEigenvalue { .. }));
    }

    #[test]
    fn reconstructions_satisfy_the_eigenvalue_equation() {
        let mut t = tables();
        for (bc, symmetry, min) in [
            (Bc::Dirichlet, Symmetry::Symmetric, 2),
            (Bc::Dirichlet, Symmetry::Skew, 2),
            (Bc::Neumann, Symmetry::Symmetric, 1),
            (Bc::Neumann, Symmetry::Skew, 1),
        ] {
            for m in min..=4u32 {
                let g = build_omega(m).unwrap();
                let recs = primitive_graph_eigenvalues(&mut t, m, bc, symmetry).unwrap();
                for rec in &recs {
                    let rebuilt = reconstruct_eigenfunction(rec, bc, &g).unwrap();
                    assert!(
                        rebuilt.residual < RECONSTRUCTION_TOL,
                        "{bc} {symmetry} level {m} value {}: residual {}",
                        rec.value,
                        rebuilt.residual
                    );
                    // boundary values: exact zeros under Dirichlet conditions
                    if bc == Bc::Dirichlet {
                        for &i in &g.boundary {
                            assert_eq!(rebuilt.values[i], 0.0);
                        }
                    }
                    // exact reflection structure
                    let perm = g.reflection_permutation();
                    let sign = if symmetry == Symmetry::Symmetric { 1.0 } else { -1.0 };
                    for i in 0..g.n() {
                        assert_eq!(rebuilt.values[perm[i]], sign * rebuilt.values[i]);
                    }
                }
            }
        }
    }

    #[test]
    fn reconstruction_rejects_non_primitive_records() {
        let recs = localized_graph_eigenvalues(3, Bc::Dirichlet).unwrap();
        let g = build_omega(3).unwrap();
        let err = reconstruct_eigenfunction(&recs[0], Bc::Dirichlet, &g).unwrap_err();
        assert!(matches!(err, AssembleError::NotPrimitive { .. }));
    }

    #[test]
    fn limit_spectrum_finds_the_lowest_dirichlet_value() {
        let mut t = tables();
        let spec = limit_spectrum(&mut t, Bc::Dirichlet, 100.0, 6).unwrap();
        assert!(!spec.records.is_empty());
        let lowest = &spec.records[0];
        // the bottom of the limit spectrum: the weak continuation of the
        // first symmetric root, scaled; successive resolutions give
        // 39.92, 35.16, 33.52, 33.00, ... converging near 32.8
        assert!(
            (lowest.value - 32.8).abs() < 0.5,
            "lowest limit value {} should sit near 32.8",
            lowest.value
        );
        assert_eq!(lowest.etype, EigenType::PrimitiveSym);
        assert!(lowest.error_bar.unwrap() < 0.5);
        // sanity: values are sorted and multiplicities positive
        for pair in spec.records.windows(2) {
            assert!(pair[0].value <= pair[1].value);
        }
    }

    #[test]
    fn neumann_limit_contains_zero_exactly() {
        let mut t = tables();
        let spec = limit_spectrum(&mut t, Bc::Neumann, 50.0, 5).unwrap();
        assert_eq!(spec.records[0].value, 0.0);
        assert_eq!(spec.records[0].multiplicity, 1);
    }

    #[test]
    fn limit_spectrum_flags_truncation_beyond_the_certified_range() {
        let mut t = tables();
        let spec = limit_spectrum(&mut t, Bc::Dirichlet, 1e9, 5).unwrap();
        assert!(spec.truncated);
        let spec = limit_spectrum(&mut t, Bc::Dirichlet, 100.0, 5).unwrap();
        assert!(!spec.truncated);
    }
}
