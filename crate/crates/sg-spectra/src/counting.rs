//! Eigenvalue counting functions and growth experiments.
//!
//! The renormalized limit spectra of the full gasket and of the slit domain
//! both grow like x^(log3/log5), but their difference is conjectured to grow
//! only like x^(log2/log5)·log x — the slit removes a boundary layer whose
//! eigenvalue count is governed by the shorter side length. This module
//! turns spectra into monotone step functions, measures that defect over
//! dyadic windows, counts eigenvalues below the decimated thresholds
//! φ_-^(m-k)(5) with certified interval arithmetic, and reports the gap and
//! cluster structure that distinguishes the slit domain from the full
//! gasket (whose spectrum has no clusters near 5).

use exact_poly::{rat_int, rat_to_f64, Rational, RootInterval};
use sg_core::{phi, phi_limit, phi_minus_enclosure, phi_plus_enclosure, Branch, DecimationError, GraphKind};
use thiserror::Error;

use crate::assemble::{
    self, assemble, interior_count, limit_spectrum, localized_records_from_seeds, AssembleError,
    Bc, EigenType, EigenvalueRecord, LimitSpectrum, Provenance, SpectrumTable, TypeLedger,
};
use crate::families::{Family, FamilyError, FamilyTables};
use crate::isolation::dyadic;

/// A jump in the sorted spectrum counts as a gap when the ratio of the
/// values on either side exceeds this.
pub const RATIO_GAP_THRESHOLD: f64 = 1.2;

/// Window half-widths used when counting distinct eigenvalues just below 5.
pub const CLUSTER_EPSILONS: [f64; 3] = [0.5, 0.1, 0.05];

/// Enclosure widths (in bits) tried when ordering an eigenvalue against a
/// decimated threshold; every comparison in range resolves at the first.
const THRESHOLD_BITS: [u32; 3] = [90, 180, 360];

#[derive(Debug, Error)]
pub enum CountingError {
    #[error(transparent)]
    Assemble(#[from] AssembleError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Decimation(#[from] DecimationError),
    #[error("counting functions need a positive range, got x_max = {0}")]
    NonPositiveRange(f64),
    #[error("threshold count needs 1 <= k < m, got m = {m}, k = {k}")]
    BadThresholdPair { m: u32, k: u32 },
    #[error("could not order {what} against the threshold at {bits} bits")]
    Unresolved { what: String, bits: u32 },
}

/// Exponent of the leading eigenvalue growth: log 3 / log 5, the spectral
/// dimension over two.
pub fn growth_exponent() -> f64 {
    3f64.ln() / 5f64.ln()
}

/// Exponent conjectured for the defect between the two domains:
/// log 2 / log 5.
pub fn defect_exponent() -> f64 {
    2f64.ln() / 5f64.ln()
}

/// The constant c with ρ^Ω(c·5^k) = 3^k - 2^k: the renormalized limit of
/// the decimated thresholds, c = lim (3/2)·5^n·φ_-^(n)(5).
pub fn threshold_limit_constant() -> f64 {
    phi_limit(5.0)
}

/// A monotone step function counting eigenvalues (with multiplicity) up to
/// each argument. Breakpoints are strictly increasing in x with strictly
/// increasing cumulative counts; the function is 0 below the first
/// breakpoint, and in particular at 0.
#[derive(Clone, Debug)]
pub struct CountingFunction {
    /// (x, number of eigenvalues ≤ x), sorted by x.
    pub breakpoints: Vec<(f64, u64)>,
    /// Counts are complete below this; queries beyond it undercount.
    pub certified_below: f64,
}

impl CountingFunction {
    /// Builds the step function from records with value at most `x_max`.
    pub fn from_records<'a, I>(records: I, x_max: f64, certified_below: f64) -> Self
    where
        I: IntoIterator<Item = &'a EigenvalueRecord>,
    {
        let mut jumps: Vec<(f64, u64)> = records
            .into_iter()
            .filter(|r| r.value <= x_max)
            .map(|r| (r.value, r.multiplicity))
            .collect();
        jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut breakpoints: Vec<(f64, u64)> = Vec::with_capacity(jumps.len());
        let mut running = 0u64;
        for (x, mult) in jumps {
            running += mult;
            match breakpoints.last_mut() {
                Some(last) if last.0 == x => last.1 = running,
                _ => breakpoints.push((x, running)),
            }
        }
        CountingFunction { breakpoints, certified_below }
    }

    /// Number of eigenvalues ≤ x.
    pub fn count_at(&self, x: f64) -> u64 {
        let idx = self.breakpoints.partition_point(|&(bx, _)| bx <= x);
        if idx == 0 {
            0
        } else {
            self.breakpoints[idx - 1].1
        }
    }

    /// Position of the first jump, if any.
    pub fn first_breakpoint(&self) -> Option<f64> {
        self.breakpoints.first().map(|&(x, _)| x)
    }

    /// Total count at the last breakpoint.
    pub fn total(&self) -> u64 {
        self.breakpoints.last().map_or(0, |&(_, c)| c)
    }
}

/// Dirichlet spectrum of the full gasket graph at level m. Everything here
/// is localized: the initial values 2 (level 1 only), 5, and 6 spawn
/// inverse-map continuations exactly as on the slit domain, only the birth
/// multiplicities differ. Total count is (3^(m+1) + 3)/2 - 3.
pub fn gamma_dirichlet_spectrum(m: u32) -> Result<SpectrumTable, CountingError> {
    if m < 1 {
        return Err(AssembleError::LevelTooSmall { level: m, bc: Bc::Dirichlet, min: 1 }.into());
    }
    let records = localized_records_from_seeds(m, &gamma_seeds());
    let tally: u64 = records.iter().map(|r| r.multiplicity).sum();
    let expected = gamma_dirichlet_total(m);
    if tally != expected {
        return Err(AssembleError::LedgerMismatch {
            level: m,
            bc: Bc::Dirichlet,
            class: "localized",
            found: tally,
            expected,
        }
        .into());
    }
    let ledger = TypeLedger::tally(&records);
    Ok(SpectrumTable { level: m, bc: Bc::Dirichlet, records, ledger })
}

/// Closed-form size of the level-m full-gasket Dirichlet spectrum.
pub fn gamma_dirichlet_total(m: u32) -> u64 {
    (assemble::pow3(m + 1) + 3) / 2 - 3
}

/// Birth series of the full gasket: a single 2 at level 1, then
/// (3^(m-1) + 3)/2 fives every level and (3^m - 3)/2 sixes from level 2 on.
fn gamma_seeds() -> Vec<(u32, Box<dyn Fn(u32) -> u64>)> {
    vec![
        (2, Box::new(|m0| u64::from(m0 == 1))),
        (5, Box::new(|m0| (assemble::pow3(m0 - 1) + 3) / 2)),
        (6, Box::new(|m0| if m0 >= 2 { (assemble::pow3(m0) - 3) / 2 } else { 0 })),
    ]
}

/// Renormalized limit spectrum of the full gasket up to `cutoff`. All
/// series decimate exactly, so unlike the slit domain there are no weak
/// sequences, no error bars, and no truncation: the enumeration is complete
/// below any cutoff.
pub fn gamma_limit_spectrum(cutoff: f64) -> LimitSpectrum {
    // deepest level at which a fixation can still land at or below cutoff
    let mut cap = 0u32;
    while cap < 60 && assemble::scaled_limit(cap + 1, 3.0) <= cutoff {
        cap += 1;
    }
    let mut records: Vec<EigenvalueRecord> = Vec::new();
    for (series, mult_fn) in gamma_seeds() {
        let mut m0 = 1u32;
        while assemble::scaled_limit(m0, series as f64) <= cutoff {
            let mult = mult_fn(m0);
            if mult > 0 {
                assemble::localized_limit_walk(series, m0, mult, cutoff, cap, &mut records);
            }
            m0 += 1;
        }
    }
    records.sort_by(|a, b| a.value.total_cmp(&b.value));
    let ledger = TypeLedger::tally(&records);
    LimitSpectrum {
        bc: Bc::Dirichlet,
        cutoff,
        level_cap: cap,
        certified_below: cutoff,
        truncated: false,
        records,
        ledger,
    }
}

/// An eigenvalue counting function split by class, for one domain.
#[derive(Clone, Debug)]
pub struct CountingSplit {
    pub domain: GraphKind,
    pub x_max: f64,
    pub total: CountingFunction,
    /// Per-class counting functions; they sum to `total` at every
    /// breakpoint. Full-gasket classes are the birth series, slit-domain
    /// classes are localized / primitive_sym / primitive_skew /
    /// miniaturized.
    pub parts: Vec<(String, CountingFunction)>,
    pub truncated: bool,
}

/// Counting function of the Dirichlet limit spectrum on either domain, up
/// to `x_max`. The slit domain resolves weak sequences down to `level_cap`;
/// the full gasket ignores the cap because its enumeration is exact.
pub fn rho(
    tables: &mut FamilyTables,
    domain: GraphKind,
    x_max: f64,
    level_cap: u32,
) -> Result<CountingSplit, CountingError> {
    if !(x_max > 0.0) {
        return Err(CountingError::NonPositiveRange(x_max));
    }
    let spectrum = match domain {
        GraphKind::Gamma => gamma_limit_spectrum(x_max),
        GraphKind::Omega => limit_spectrum(tables, Bc::Dirichlet, x_max, level_cap)?,
    };
    let total =
        CountingFunction::from_records(spectrum.records.iter(), x_max, spectrum.certified_below);
    let labels: Vec<String> = match domain {
        GraphKind::Gamma => vec!["series_2".into(), "series_5".into(), "series_6".into()],
        GraphKind::Omega => vec![
            "localized".into(),
            "primitive_sym".into(),
            "primitive_skew".into(),
            "miniaturized".into(),
        ],
    };
    let parts = labels
        .into_iter()
        .map(|label| {
            let part = CountingFunction::from_records(
                spectrum.records.iter().filter(|r| class_label(domain, r) == label),
                x_max,
                spectrum.certified_below,
            );
            (label, part)
        })
        .collect();
    Ok(CountingSplit { domain, x_max, total, parts, truncated: spectrum.truncated })
}

fn class_label(domain: GraphKind, rec: &EigenvalueRecord) -> String {
    match (domain, &rec.etype) {
        (GraphKind::Gamma, EigenType::Localized { series, .. }) => format!("series_{series}"),
        (GraphKind::Gamma, other) => {
            unreachable!("full gasket spectrum holds only localized records, found {}", other.class())
        }
        (GraphKind::Omega, etype) => etype.class().to_string(),
    }
}

/// One evaluation point of the two counting functions side by side.
#[derive(Clone, Copy, Debug)]
pub struct DefectRow {
    pub x: f64,
    /// Full-gasket count ρ^0(x).
    pub gamma: u64,
    /// Slit-domain count ρ^Ω(x).
    pub omega: u64,
    /// ρ^0(x) - ρ^Ω(x); the conjecture says this never goes negative.
    pub defect: i64,
    /// defect / (x^(log2/log5) · log x), the quantity conjectured bounded.
    pub normalized: f64,
}

/// Supremum of the normalized defect over one dyadic window (lo, hi].
#[derive(Clone, Copy, Debug)]
pub struct WindowSup {
    pub lo: f64,
    pub hi: f64,
    pub sup: f64,
    pub samples: usize,
}

/// Outcome of the defect experiment between the two domains.
#[derive(Clone, Debug)]
pub struct DefectReport {
    pub x_max: f64,
    pub level_cap: u32,
    /// Both counting functions sampled at every breakpoint of either.
    pub rows: Vec<DefectRow>,
    /// The defect never dips below zero.
    pub nonnegative: bool,
    pub sup_normalized: f64,
    /// Dyadic windows in increasing x with the normalized sup in each.
    pub window_sups: Vec<WindowSup>,
    /// True when no window raises the running sup by more than a factor
    /// of 2: the normalized defect does not blow up. (Adjacent-window
    /// ratios are too noisy to gate on: a sparse window where the defect
    /// is a small integer can dip to half the band and recover, which is
    /// sampling noise, not growth.)
    pub window_growth_bounded: bool,
    /// Below the first slit-domain eigenvalue the defect is the whole
    /// full-gasket count.
    pub below_first_omega_matches: bool,
    pub truncated: bool,
}

/// Compares the two limit counting functions up to `x_max`: tabulates the
/// defect at every breakpoint, normalizes by x^(log2/log5)·log x, and takes
/// sups over dyadic windows to expose any growth the normalization missed.
pub fn defect_experiment(
    tables: &mut FamilyTables,
    x_max: f64,
    level_cap: u32,
) -> Result<DefectReport, CountingError> {
    let gamma = rho(tables, GraphKind::Gamma, x_max, level_cap)?;
    let omega = rho(tables, GraphKind::Omega, x_max, level_cap)?;

    let mut xs: Vec<f64> = gamma
        .total
        .breakpoints
        .iter()
        .chain(omega.total.breakpoints.iter())
        .map(|&(x, _)| x)
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let exponent = defect_exponent();
    let rows: Vec<DefectRow> = xs
        .iter()
        .map(|&x| {
            let g = gamma.total.count_at(x);
            let o = omega.total.count_at(x);
            let defect = g as i64 - o as i64;
            let scale = x.powf(exponent) * x.ln();
            let normalized = if scale > 0.0 { defect as f64 / scale } else { 0.0 };
            DefectRow { x, gamma: g, omega: o, defect, normalized }
        })
        .collect();

    let nonnegative = rows.iter().all(|r| r.defect >= 0);
    let sup_normalized = rows.iter().map(|r| r.normalized).fold(0.0, f64::max);

    // dyadic windows (x_max/2^(i+1), x_max/2^i], cut off below the first jump
    let first_x = rows.first().map_or(x_max, |r| r.x);
    let mut windows: Vec<WindowSup> = Vec::new();
    let mut hi = x_max;
    while hi > first_x {
        let lo = hi / 2.0;
        let in_window: Vec<&DefectRow> =
            rows.iter().filter(|r| r.x > lo && r.x <= hi).collect();
        windows.push(WindowSup {
            lo,
            hi,
            sup: in_window.iter().map(|r| r.normalized).fold(0.0, f64::max),
            samples: in_window.len(),
        });
        hi = lo;
    }
    windows.reverse();
    let mut running_sup = 0.0f64;
    let mut window_growth_bounded = true;
    for w in windows.iter().filter(|w| w.samples > 0) {
        if running_sup > 0.0 && w.sup > 2.0 * running_sup {
            window_growth_bounded = false;
        }
        running_sup = running_sup.max(w.sup);
    }

    let first_omega = omega.total.first_breakpoint().unwrap_or(f64::INFINITY);
    let below_first_omega_matches = rows
        .iter()
        .filter(|r| r.x < first_omega)
        .all(|r| r.defect == r.gamma as i64);

    Ok(DefectReport {
        x_max,
        level_cap,
        rows,
        nonnegative,
        sup_normalized,
        window_sups: windows,
        window_growth_bounded,
        below_first_omega_matches,
        truncated: omega.truncated,
    })
}

/// Count of slit-domain Dirichlet eigenvalues at level m up to the
/// decimated threshold φ_-^(m-k)(5), against the prediction 3^k - 2^k.
#[derive(Clone, Debug)]
pub struct ThresholdCount {
    pub m: u32,
    pub k: u32,
    pub threshold: f64,
    pub observed: u64,
    pub predicted: u64,
    pub agrees: bool,
}

/// Counts level-m Dirichlet eigenvalues ≤ φ_-^(m-k)(5) with multiplicity.
///
/// The threshold is irrational, so float comparison could flip the count of
/// an eigenvalue sitting exactly on it. Instead every record is ordered
/// against a shrinking rational enclosure of the threshold: the unique
/// record that is exactly the threshold — the localized value born at k and
/// continued by minus branches only — is recognized structurally and
/// counted inclusively, and everything else is certified strictly above or
/// below by interval arithmetic.
pub fn decimated_threshold_count(
    tables: &mut FamilyTables,
    m: u32,
    k: u32,
) -> Result<ThresholdCount, CountingError> {
    if k < 1 || k >= m {
        return Err(CountingError::BadThresholdPair { m, k });
    }
    let table = assemble(tables, m, Bc::Dirichlet)?;

    let mut observed = 0u64;
    let mut undecided: Vec<&EigenvalueRecord> = Vec::new();
    for rec in &table.records {
        if is_threshold_record(rec, m, k) {
            observed += rec.multiplicity;
        } else {
            undecided.push(rec);
        }
    }
    for &bits in &THRESHOLD_BITS {
        if undecided.is_empty() {
            break;
        }
        let width = dyadic(bits);
        let mut thr_lo = rat_int(5);
        let mut thr_hi = rat_int(5);
        for _ in 0..(m - k) {
            (thr_lo, thr_hi) = phi_minus_enclosure(&thr_lo, &thr_hi, &width)?;
        }
        let mut still: Vec<&EigenvalueRecord> = Vec::new();
        for rec in undecided {
            match record_versus_interval(tables, rec, m, &thr_lo, &thr_hi, &width)? {
                Some(false) => observed += rec.multiplicity, // strictly below
                Some(true) => {}                             // strictly above
                None => still.push(rec),
            }
        }
        undecided = still;
    }
    if let Some(rec) = undecided.first() {
        return Err(CountingError::Unresolved {
            what: format!("{} at {}", rec.provenance, rec.value),
            bits: *THRESHOLD_BITS.last().expect("non-empty width ladder"),
        });
    }

    let mut threshold = 5.0;
    for _ in 0..(m - k) {
        threshold = phi(Branch::Minus, threshold).expect("φ_- is defined at 5 and below");
    }
    let predicted = assemble::pow3(k) - assemble::pow2(k);
    Ok(ThresholdCount { m, k, threshold, observed, predicted, agrees: observed == predicted })
}

/// The one record equal to φ_-^(m-k)(5): the 5-series value born at level k
/// whose continuation word is all minus branches.
fn is_threshold_record(rec: &EigenvalueRecord, m: u32, k: u32) -> bool {
    let EigenType::Localized { series: 5, birth } = rec.etype else {
        return false;
    };
    if birth != k {
        return false;
    }
    let Provenance::Branch(seq) = &rec.provenance else {
        return false;
    };
    seq.branches.len() as u32 == m - k && seq.branches.iter().all(|&b| b == Branch::Minus)
}

/// Orders one record against a rational threshold enclosure. Returns
/// `Some(false)` when the record is certified strictly below the enclosure,
/// `Some(true)` when strictly above, `None` when its own enclosure still
/// overlaps and the caller should retry narrower.
fn record_versus_interval(
    tables: &mut FamilyTables,
    rec: &EigenvalueRecord,
    m: u32,
    thr_lo: &Rational,
    thr_hi: &Rational,
    width: &Rational,
) -> Result<Option<bool>, CountingError> {
    let (lo, hi) = match &rec.etype {
        EigenType::Localized { series, .. } => {
            let Provenance::Branch(seq) = &rec.provenance else {
                unreachable!("localized records carry their branch word")
            };
            let mut lo = rat_int(i64::from(*series));
            let mut hi = lo.clone();
            for b in &seq.branches {
                (lo, hi) = match b {
                    Branch::Minus => phi_minus_enclosure(&lo, &hi, width)?,
                    Branch::Plus => phi_plus_enclosure(&lo, &hi, width)?,
                };
            }
            (lo, hi)
        }
        EigenType::PrimitiveSym | EigenType::PrimitiveSkew | EigenType::Miniaturized { .. } => {
            let (family, level) = match (&rec.etype, &rec.provenance) {
                (_, Provenance::Bracket { family, level, .. }) => (*family, *level),
                (EigenType::Miniaturized { contractions, .. }, _) => {
                    (Family::PTilde, m - contractions)
                }
                _ => unreachable!("primitive records carry bracket provenance"),
            };
            let mut interval: RootInterval = rec
                .interval
                .clone()
                .expect("root-backed records carry their isolation interval");
            if !(interval.hi() < thr_lo || interval.lo() > thr_hi) {
                let poly = tables.poly(family, level)?.clone();
                interval.refine_to(&poly, width);
            }
            (interval.lo().clone(), interval.hi().clone())
        }
    };
    if &hi < thr_lo {
        Ok(Some(false))
    } else if &lo > thr_hi {
        Ok(Some(true))
    } else {
        Ok(None)
    }
}

/// A jump between consecutive distinct eigenvalues large enough to count
/// as a multiplicative gap.
#[derive(Clone, Copy, Debug)]
pub struct RatioGap {
    pub below: f64,
    pub above: f64,
    pub ratio: f64,
}

/// One pair of adjacent distinct localized values of different series,
/// with the primitive values strictly between them.
#[derive(Clone, Copy, Debug)]
pub struct AlternationPair {
    pub lo: f64,
    pub hi: f64,
    pub lo_series: u32,
    pub hi_series: u32,
    pub sym_between: usize,
    pub skew_between: usize,
    /// The pair (φ_-(5), 3), whose gap is empty instead of alternating.
    pub exception: bool,
    pub ok: bool,
}

/// Whether each 5-to-6-type localized gap holds exactly one symmetric and
/// one skew primitive value.
#[derive(Clone, Debug)]
pub struct AlternationSummary {
    pub pairs: Vec<AlternationPair>,
    pub holds: bool,
}

/// Gap behaviour around one decimated threshold φ_-^(m-k)(5).
#[derive(Clone, Copy, Debug)]
pub struct ThresholdGap {
    pub k: u32,
    pub threshold: f64,
    pub below: Option<f64>,
    pub above: Option<f64>,
    pub ratio: Option<f64>,
    pub present: bool,
}

/// Gap and cluster structure of one level-m Dirichlet table.
#[derive(Clone, Debug)]
pub struct GapClusterReport {
    pub level: u32,
    pub distinct_values: usize,
    pub large_ratio_gaps: Vec<RatioGap>,
    /// (ε, distinct values in the open window (5-ε, 5)).
    pub cluster_counts: Vec<(f64, usize)>,
    pub alternation: AlternationSummary,
    pub threshold_gaps: Vec<ThresholdGap>,
    /// No eigenvalue of any class lands strictly between φ_-(5) and 3.
    pub exception_window_empty: bool,
}

/// Analyzes the level-m Dirichlet spectrum: ratio gaps, cluster counts
/// below 5, primitive alternation between localized values, and the gaps
/// above the decimated thresholds.
pub fn gap_cluster_report(
    tables: &mut FamilyTables,
    m: u32,
) -> Result<GapClusterReport, CountingError> {
    let table = assemble(tables, m, Bc::Dirichlet)?;
    let phi5_minus = phi(Branch::Minus, 5.0).expect("φ_- is defined at 5");

    let mut distinct: Vec<f64> = Vec::new();
    for rec in &table.records {
        match distinct.last() {
            Some(&last) if (last - rec.value).abs() < 1e-9 => {}
            _ => distinct.push(rec.value),
        }
    }

    let large_ratio_gaps: Vec<RatioGap> = distinct
        .windows(2)
        .filter(|pair| pair[0] > 0.0 && pair[1] / pair[0] > RATIO_GAP_THRESHOLD)
        .map(|pair| RatioGap { below: pair[0], above: pair[1], ratio: pair[1] / pair[0] })
        .collect();

    let cluster_counts: Vec<(f64, usize)> = CLUSTER_EPSILONS
        .iter()
        .map(|&eps| {
            let n = distinct.iter().filter(|&&v| v > 5.0 - eps && v < 5.0).count();
            (eps, n)
        })
        .collect();

    // localized skyline: distinct localized values with their series
    let mut localized: Vec<(f64, u32)> = Vec::new();
    for rec in &table.records {
        if let EigenType::Localized { series, .. } = rec.etype {
            match localized.last() {
                Some(&(last, _)) if (last - rec.value).abs() < 1e-9 => {}
                _ => localized.push((rec.value, series)),
            }
        }
    }
    let mut pairs: Vec<AlternationPair> = Vec::new();
    for window in localized.windows(2) {
        let ((lo, lo_series), (hi, hi_series)) = (window[0], window[1]);
        if lo_series == hi_series {
            continue; // the claim is about 5-to-6-type transitions only
        }
        let count_between = |etype: &EigenType| {
            table
                .records
                .iter()
                .filter(|r| r.value > lo && r.value < hi && r.etype == *etype)
                .count()
        };
        let sym_between = count_between(&EigenType::PrimitiveSym);
        let skew_between = count_between(&EigenType::PrimitiveSkew);
        let exception = (lo - phi5_minus).abs() < 1e-9 && (hi - 3.0).abs() < 1e-9;
        let ok = if exception {
            table.records.iter().all(|r| r.value <= lo || r.value >= hi)
        } else {
            sym_between == 1 && skew_between == 1
        };
        pairs.push(AlternationPair {
            lo,
            hi,
            lo_series,
            hi_series,
            sym_between,
            skew_between,
            exception,
            ok,
        });
    }
    let holds = pairs.iter().all(|p| p.ok);

    let threshold_gaps: Vec<ThresholdGap> = (1..m)
        .map(|k| {
            let mut threshold = 5.0;
            for _ in 0..(m - k) {
                threshold = phi(Branch::Minus, threshold).expect("φ_- is defined at 5 and below");
            }
            let below = distinct.iter().rev().find(|&&v| v <= threshold + 1e-9).copied();
            let above = distinct.iter().find(|&&v| v > threshold + 1e-9).copied();
            let ratio = below.zip(above).map(|(b, a)| a / b);
            ThresholdGap {
                k,
                threshold,
                below,
                above,
                ratio,
                present: ratio.is_some_and(|r| r > RATIO_GAP_THRESHOLD),
            }
        })
        .collect();

    let exception_window_empty = table
        .records
        .iter()
        .all(|r| r.value <= phi5_minus + 1e-9 || r.value >= 3.0 - 1e-9);

    Ok(GapClusterReport {
        level: m,
        distinct_values: distinct.len(),
        large_ratio_gaps,
        cluster_counts,
        alternation: AlternationSummary { pairs, holds },
        threshold_gaps,
        exception_window_empty,
    })
}

/// Weyl-ratio samples (log x, ρ(x)/x^(log3/log5)) at every breakpoint,
/// ready for plotting; a bounded, non-vanishing band confirms the leading
/// growth exponent.
pub fn growth_ratio_series(cf: &CountingFunction) -> Vec<(f64, f64)> {
    let exponent = growth_exponent();
    cf.breakpoints
        .iter()
        .map(|&(x, count)| (x.ln(), count as f64 / x.powf(exponent)))
        .collect()
}

/// Counting function of an assembled graph table: counts with multiplicity
/// and certifies the whole range, since graph spectra are finite and exact.
pub fn graph_counting_function(table: &SpectrumTable) -> CountingFunction {
    CountingFunction::from_records(table.records.iter(), f64::INFINITY, f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assemble::compare_with_oracle;
    use sg_core::{build_gamma, dirichlet_matrix, eigensolve};

    fn tables() -> FamilyTables {
        FamilyTables::new(6)
    }

    #[test]
    fn full_gasket_tables_start_with_the_known_small_levels() {
        let d1 = gamma_dirichlet_spectrum(1).unwrap();
        let summary: Vec<(f64, u64)> =
            d1.records.iter().map(|r| (r.value, r.multiplicity)).collect();
        assert_eq!(summary, vec![(2.0, 1), (5.0, 2)]);

        let d2 = gamma_dirichlet_spectrum(2).unwrap();
        assert_eq!(d2.ledger.total, 12);
        let five = d2.records.iter().find(|r| r.value == 5.0).unwrap();
        let six = d2.records.iter().find(|r| r.value == 6.0).unwrap();
        assert_eq!((five.multiplicity, six.multiplicity), (3, 3));
        // continued pair φ_±(2) with the level-1 multiplicity
        let phi_minus_2 = phi(Branch::Minus, 2.0).unwrap();
        assert!(d2.records.iter().any(|r| (r.value - phi_minus_2).abs() < 1e-12
            && r.multiplicity == 1));

        assert_eq!(gamma_dirichlet_spectrum(3).unwrap().ledger.total, 39);
        for m in 1..=6 {
            assert_eq!(
                gamma_dirichlet_spectrum(m).unwrap().ledger.total,
                gamma_dirichlet_total(m)
            );
        }
    }

    #[test]
    fn full_gasket_tables_match_the_dense_solver() {
        for m in 1..=3 {
            let table = gamma_dirichlet_spectrum(m).unwrap();
            let graph = build_gamma(m).unwrap();
            let oracle = eigensolve(&dirichlet_matrix(&graph), false).unwrap();
            compare_with_oracle(&table, &oracle, 1e-7).unwrap();
        }
    }

    #[test]
    fn counting_functions_step_where_they_should() {
        let table = gamma_dirichlet_spectrum(2).unwrap();
        let cf = graph_counting_function(&table);
        assert_eq!(cf.count_at(0.0), 0);
        assert_eq!(cf.count_at(-1.0), 0);
        assert_eq!(cf.count_at(6.0), 12);
        assert_eq!(cf.count_at(100.0), 12);
        assert_eq!(cf.count_at(5.0) - cf.count_at(4.999), 3);
        // cumulative counts never decrease
        assert!(cf.breakpoints.windows(2).all(|w| w[0].1 < w[1].1 && w[0].0 < w[1].0));
    }

    #[test]
    fn graph_counting_at_six_gives_the_interior_size() {
        let mut tables = tables();
        for m in 2..=4 {
            let table = assemble(&mut tables, m, Bc::Dirichlet).unwrap();
            let cf = graph_counting_function(&table);
            assert_eq!(cf.count_at(6.0), interior_count(m));
        }
    }

    #[test]
    fn limit_counting_functions_see_the_first_eigenvalues() {
        let mut tables = tables();
        let omega = rho(&mut tables, GraphKind::Omega, 300.0, 6).unwrap();
        assert_eq!(omega.total.count_at(32.0), 0);
        assert!(omega.total.count_at(34.0) >= 1);
        assert!(!omega.truncated);

        let gamma = rho(&mut tables, GraphKind::Gamma, 300.0, 6).unwrap();
        // the classical first Dirichlet eigenvalue 5·Φ(2) ≈ 16.816
        assert_eq!(gamma.total.count_at(16.0), 0);
        assert_eq!(gamma.total.count_at(17.0), 1);
        assert!((gamma.total.first_breakpoint().unwrap() - 16.815998889348).abs() < 1e-6);

        // the parts split the totals exactly at every breakpoint
        for split in [&gamma, &omega] {
            for &(x, count) in &split.total.breakpoints {
                let part_sum: u64 = split.parts.iter().map(|(_, p)| p.count_at(x)).sum();
                assert_eq!(part_sum, count);
            }
        }
    }

    #[test]
    fn rho_rejects_an_empty_range() {
        let mut tables = tables();
        assert!(matches!(
            rho(&mut tables, GraphKind::Omega, 0.0, 6),
            Err(CountingError::NonPositiveRange(_))
        ));
    }

    #[test]
    fn symmetric_primitive_counts_track_the_family_degree() {
        let mut tables = tables();
        let c = threshold_limit_constant();
        let omega = rho(&mut tables, GraphKind::Omega, c * 25.0 + 1.0, 6).unwrap();
        let sym = omega.parts.iter().find(|(l, _)| l == "primitive_sym").unwrap();
        let ratio = sym.1.count_at(c * 25.0) as f64 / Family::P.degree(2) as f64;
        assert!((0.5..=2.0).contains(&ratio), "ratio {ratio} outside [1/2, 2]");
    }

    #[test]
    fn defect_stays_nonnegative_and_bounded() {
        let mut tables = tables();
        let report = defect_experiment(&mut tables, 2000.0, 6).unwrap();
        assert!(report.nonnegative);
        assert!(report.below_first_omega_matches);
        assert!(report.window_growth_bounded);
        assert!(report.sup_normalized > 0.0);
        // the defect is the whole gasket count until the slit spectrum starts
        let first = report.rows.first().unwrap();
        assert_eq!(first.defect, first.gamma as i64);
    }

    #[test]
    fn threshold_counts_match_the_prediction() {
        let mut tables = tables();
        for (m, k) in [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3), (5, 3)] {
            let result = decimated_threshold_count(&mut tables, m, k).unwrap();
            assert_eq!(result.predicted, assemble::pow3(k) - assemble::pow2(k));
            assert!(
                result.agrees,
                "m={m} k={k}: observed {} != predicted {}",
                result.observed, result.predicted
            );
        }
    }

    #[test]
    fn threshold_count_rejects_bad_pairs() {
        let mut tables = tables();
        assert!(matches!(
            decimated_threshold_count(&mut tables, 3, 3),
            Err(CountingError::BadThresholdPair { .. })
        ));
        assert!(matches!(
            decimated_threshold_count(&mut tables, 3, 0),
            Err(CountingError::BadThresholdPair { .. })
        ));
    }

    #[test]
    fn threshold_records_are_counted_inclusively() {
        // at m=4, k=3 the threshold φ_-(5) is itself an eigenvalue; the
        // prediction only works if it is counted
        let mut tables = tables();
        let result = decimated_threshold_count(&mut tables, 4, 3).unwrap();
        assert!(result.agrees);
        let table = assemble(&mut tables, 4, Bc::Dirichlet).unwrap();
        let at_threshold: u64 = table
            .records
            .iter()
            .filter(|r| is_threshold_record(r, 4, 3))
            .map(|r| r.multiplicity)
            .sum();
        assert_eq!(at_threshold, 1);
    }

    #[test]
    fn gap_report_sees_the_alternation_and_the_empty_window() {
        let mut tables = tables();
        let report = gap_cluster_report(&mut tables, 4).unwrap();
        assert!(report.alternation.holds);
        assert!(report.exception_window_empty);
        assert!(report.threshold_gaps.iter().all(|g| g.present));
        // the exception pair is recognized and genuinely empty
        let exception: Vec<_> =
            report.alternation.pairs.iter().filter(|p| p.exception).collect();
        assert_eq!(exception.len(), 1);
        assert_eq!(
            (exception[0].sym_between, exception[0].skew_between),
            (0, 0)
        );
        // eight distinct values crowd into (4.5, 5)
        assert_eq!(report.cluster_counts[0], (0.5, 8));
    }

    #[test]
    fn clusters_below_five_refine_with_the_level() {
        let mut tables = tables();
        let m4 = gap_cluster_report(&mut tables, 4).unwrap();
        let m5 = gap_cluster_report(&mut tables, 5).unwrap();
        for (a, b) in m4.cluster_counts.iter().zip(&m5.cluster_counts) {
            assert_eq!(a.0, b.0);
            assert!(b.1 > a.1, "ε={}: {} should exceed {}", a.0, b.1, a.1);
        }
    }

    #[test]
    fn growth_ratio_stays_in_a_positive_band() {
        let mut tables = tables();
        let gamma = rho(&mut tables, GraphKind::Gamma, 50_000.0, 6).unwrap();
        let series = growth_ratio_series(&gamma.total);
        let min = series.iter().map(|&(_, g)| g).fold(f64::INFINITY, f64::min);
        let max = series.iter().map(|&(_, g)| g).fold(0.0, f64::max);
        assert!(min > 0.0);
        assert!(max / min < 40.0, "band [{min}, {max}] too wide");
    }
}
