//! Certified root isolation for the reduced determinant families.
//!
//! The families obey a bracket induction: the inverse decimation branches
//! φ₋, φ₊ map the level-`m` roots to a list of separators that — together
//! with the fixed points 0, 2, 3, 5, 6 — split `(0, 6)` into gaps holding
//! exactly one level-`(m+1)` root each (one designated gap on the Neumann
//! side holds none). Exhibiting a sign change of the target polynomial in
//! every expected gap certifies the whole root list at once: a polynomial of
//! degree `d` cannot have more than `d` real roots, so `d` disjoint
//! sign-change brackets pin down every root with nothing left over.
//!
//! All brackets are rational and all sign evaluations exact; floating point
//! only appears in the reported `value` field after each interval has been
//! refined below 2⁻⁵⁵.

use exact_poly::{rat_int, Poly, Rational, RootInterval, SturmChain};
use sg_core::{phi_minus_enclosure, phi_plus_enclosure};

use crate::families::{Family, FamilyError, FamilyTables};

/// Separator enclosure widths tried in order; almost everything succeeds at
/// the first width, deep levels with tightly clustered roots escalate.
const SEPARATOR_BITS: &[u32] = &[40, 80, 160, 320, 640];

/// Final width every certified interval is refined to.
const FINAL_BITS: u32 = 55;

/// Bisection budget when a single root must be placed relative to a point
/// (e.g. certifying that the newborn middle root lies above 2).
const PLACEMENT_BUDGET: usize = 300;

/// One certified root: a rational interval with a sign change (or an exact
/// rational root), a float readout of its midpoint, and the name of the
/// separator gap that produced it.
#[derive(Clone, Debug)]
pub struct IsolatedRoot {
    pub interval: RootInterval,
    pub value: f64,
    pub bracket: String,
}

/// Certified roots of one reduced family member, ascending.
///
/// `isolation_poly` is the polynomial whose sign changes certify the
/// non-exact entries — the reduced polynomial itself for the Dirichlet
/// families and `l`, the interior factor (forced roots at 0 and/or 6 divided
/// out) for the Neumann families. Exact entries carry point intervals and
/// never need it.
#[derive(Clone, Debug)]
pub struct RootTable {
    pub family: Family,
    pub level: u32,
    pub isolation_poly: Poly,
    pub roots: Vec<IsolatedRoot>,
}

impl RootTable {
    pub fn values(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.value).collect()
    }

    /// Roots other than the exact rational ones pinned at 0 and 6.
    pub fn interior(&self) -> Vec<&IsolatedRoot> {
        self.roots
            .iter()
            .filter(|r| {
                !(r.interval.is_exact()
                    && (r.interval.lo() == &rat_int(0) || r.interval.lo() == &rat_int(6)))
            })
            .collect()
    }
}

/// A reporting-friendly gap from the bracket induction: the level-`(m+1)`
/// family has exactly `expected_roots` roots strictly between `lo` and `hi`.
#[derive(Clone, Debug)]
pub struct WeakBracket {
    pub lo: f64,
    pub hi: f64,
    pub expected_roots: usize,
    pub label: String,
}

/// 2^(-bits) as an exact rational.
pub(crate) fn dyadic(bits: u32) -> Rational {
    let mut w = rat_int(1);
    let mut base = exact_poly::rat(1, 2);
    let mut e = bits;
    while e > 0 {
        if e & 1 == 1 {
            w = &w * &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    w
}

fn point(v: i64, name: &str) -> (Rational, Rational, String) {
    (rat_int(v), rat_int(v), name.to_string())
}

/// Sign-change search over the gaps between consecutive separators.
/// Returns `None` when the attempt is inconclusive at this width (separators
/// overlap, a gap is missing its flip, or the designated empty gap flips);
/// the caller then retries with tighter enclosures.
fn try_gaps(
    target: &Poly,
    seps: &[(Rational, Rational, String)],
    empty_gap: Option<usize>,
    expected: usize,
) -> Option<Vec<(RootInterval, String)>> {
    for w in seps.windows(2) {
        if w[0].1 >= w[1].0 {
            return None;
        }
    }
    let mut found = Vec::with_capacity(expected);
    for g in 0..seps.len() - 1 {
        let u = seps[g].1.clone();
        let v = seps[g + 1].0.clone();
        match RootInterval::from_bracket(target, u, v) {
            Ok(iv) => {
                if Some(g) == empty_gap {
                    return None;
                }
                found.push((iv, format!("({},{})", seps[g].2, seps[g + 1].2)));
            }
            Err(_) => {
                if Some(g) != empty_gap {
                    return None;
                }
            }
        }
    }
    (found.len() == expected).then_some(found)
}

fn finish(
    family: Family,
    level: u32,
    isolation_poly: Poly,
    raw: Vec<(RootInterval, String)>,
) -> RootTable {
    let width = dyadic(FINAL_BITS);
    let roots = raw
        .into_iter()
        .map(|(mut iv, bracket)| {
            iv.refine_to(&isolation_poly, &width);
            IsolatedRoot {
                value: iv.mid_f64(),
                interval: iv,
                bracket,
            }
        })
        .collect();
    RootTable {
        family,
        level,
        isolation_poly,
        roots,
    }
}

impl FamilyTables {
    /// Certified root table of a reduced family, memoized. Root counts match
    /// the family degree exactly or the call fails.
    pub fn root_table(&mut self, family: Family, m: u32) -> Result<&RootTable, FamilyError> {
        if !family.has_roots() {
            return Err(FamilyError::NotIsolatable { family });
        }
        // build bottom-up so each level's separators come from a certified
        // predecessor
        for lvl in family.min_level()..=m {
            if self.roots.contains_key(&(family, lvl)) {
                continue;
            }
            let table = self.isolate_level(family, lvl)?;
            self.roots.insert((family, lvl), table);
        }
        Ok(&self.roots[&(family, m)])
    }

    pub fn root_table_cloned(&mut self, family: Family, m: u32) -> Result<RootTable, FamilyError> {
        Ok(self.root_table(family, m)?.clone())
    }

    fn isolate_level(&mut self, family: Family, m: u32) -> Result<RootTable, FamilyError> {
        match family {
            Family::P | Family::PTilde => {
                if m == 2 {
                    self.sturm_base(family, m)
                } else {
                    self.dirichlet_isolation(family, m)
                }
            }
            Family::PN | Family::PSkewN => {
                if m == 1 {
                    self.neumann_base(family, m)
                } else {
                    self.neumann_isolation(family, m)
                }
            }
            Family::L => self.interlace_isolation(m),
            _ => Err(FamilyError::NotIsolatable { family }),
        }
    }

    /// Level-2 Dirichlet polynomials are a cubic and a quadratic; a Sturm
    /// chain isolates them directly and seeds the bracket induction.
    fn sturm_base(&mut self, family: Family, m: u32) -> Result<RootTable, FamilyError> {
        let p = self.family(family, m)?.poly;
        let chain = SturmChain::new(&p)?;
        let ivs = chain.isolate(&rat_int(0), &rat_int(6))?;
        let expected = family.degree(m);
        if ivs.len() != expected {
            return Err(FamilyError::RootCountMismatch {
                family,
                level: m,
                expected,
                found: ivs.len(),
            });
        }
        let raw = ivs.into_iter().map(|iv| (iv, "sturm".to_string())).collect();
        Ok(finish(family, m, p, raw))
    }

    /// Level-1 Neumann roots are exactly {0, 6} (symmetric) and {6} (skew);
    /// the interior factor is a constant.
    fn neumann_base(&mut self, family: Family, m: u32) -> Result<RootTable, FamilyError> {
        let p = self.family(family, m)?.poly;
        let interior = deflate(family, &p)?;
        let values: &[i64] = match family {
            Family::PN => &[0, 6],
            Family::PSkewN => &[6],
            _ => unreachable!("only Neumann families have a level-1 base"),
        };
        let roots = values
            .iter()
            .map(|&v| IsolatedRoot {
                interval: RootInterval::exact(rat_int(v)),
                value: v as f64,
                bracket: "exact".to_string(),
            })
            .collect();
        Ok(RootTable {
            family,
            level: m,
            isolation_poly: interior,
            roots,
        })
    }

    /// Bracket induction for the Dirichlet families: separators are 0, the
    /// φ₋ images of all level-(m−1) roots ascending, their φ₊ images
    /// descending, then 5 and 6. Every gap holds exactly one root.
    fn dirichlet_isolation(&mut self, family: Family, m: u32) -> Result<RootTable, FamilyError> {
        let parent = self.root_table_cloned(family, m - 1)?;
        let target = self.family(family, m)?.poly;
        let expected = family.degree(m);
        for &bits in SEPARATOR_BITS {
            let width = dyadic(bits);
            let mut ivs: Vec<RootInterval> =
                parent.roots.iter().map(|r| r.interval.clone()).collect();
            for iv in &mut ivs {
                iv.refine_to(&parent.isolation_poly, &width);
            }
            let mut seps = Vec::with_capacity(2 * ivs.len() + 3);
            seps.push(point(0, "0"));
            for (k, iv) in ivs.iter().enumerate() {
                let (lo, hi) = phi_minus_enclosure(iv.lo(), iv.hi(), &width)?;
                seps.push((lo, hi, format!("-{}", k + 1)));
            }
            for (k, iv) in ivs.iter().enumerate().rev() {
                let (lo, hi) = phi_plus_enclosure(iv.lo(), iv.hi(), &width)?;
                seps.push((lo, hi, format!("+{}", k + 1)));
            }
            seps.push(point(5, "5"));
            seps.push(point(6, "6"));
            if let Some(raw) = try_gaps(&target, &seps, None, expected) {
                return Ok(finish(family, m, target, raw));
            }
        }
        Err(FamilyError::RootCountMismatch {
            family,
            level: m,
            expected,
            found: 0,
        })
    }

    /// Bracket induction for the Neumann families. The forced roots at 0
    /// and/or 6 are divided out first; the interior factor gets separators
    /// 0, φ₋ images of the interior parents, 2, 3, their φ₊ images, 5 —
    /// and the (2, 3) gap is certified to hold nothing.
    fn neumann_isolation(&mut self, family: Family, m: u32) -> Result<RootTable, FamilyError> {
        let parent = self.root_table_cloned(family, m - 1)?;
        let full = self.family(family, m)?.poly;
        let target = deflate(family, &full)?;
        let expected = target.degree().unwrap_or(0);
        for &bits in SEPARATOR_BITS {
            let width = dyadic(bits);
            let mut ivs: Vec<RootInterval> = parent
                .interior()
                .iter()
                .map(|r| r.interval.clone())
                .collect();
            for iv in &mut ivs {
                iv.refine_to(&parent.isolation_poly, &width);
            }
            let t = ivs.len();
            let mut seps = Vec::with_capacity(2 * t + 4);
            seps.push(point(0, "0"));
            for (k, iv) in ivs.iter().enumerate() {
                let (lo, hi) = phi_minus_enclosure(iv.lo(), iv.hi(), &width)?;
                seps.push((lo, hi, format!("-{}", k + 1)));
            }
            seps.push(point(2, "2"));
            seps.push(point(3, "3"));
            for (k, iv) in ivs.iter().enumerate().rev() {
                let (lo, hi) = phi_plus_enclosure(iv.lo(), iv.hi(), &width)?;
                seps.push((lo, hi, format!("+{}", k + 1)));
            }
            seps.push(point(5, "5"));
            if let Some(mut raw) = try_gaps(&target, &seps, Some(t + 1), expected) {
                let mut all = Vec::with_capacity(expected + 2);
                if family == Family::PN {
                    all.push((RootInterval::exact(rat_int(0)), "exact".to_string()));
                }
                all.append(&mut raw);
                all.push((RootInterval::exact(rat_int(6)), "exact".to_string()));
                return Ok(finish(family, m, target, all));
            }
        }
        Err(FamilyError::RootCountMismatch {
            family,
            level: m,
            expected,
            found: 0,
        })
    }

    /// The ℓ family interlaces the symmetric Neumann roots of the same
    /// level strictly: one root between each consecutive pair. The parent
    /// enclosures themselves act as separators.
    fn interlace_isolation(&mut self, m: u32) -> Result<RootTable, FamilyError> {
        let pn = self.root_table_cloned(Family::PN, m)?;
        let target = self.family(Family::L, m)?.poly;
        let expected = Family::L.degree(m);
        for &bits in SEPARATOR_BITS {
            let width = dyadic(bits);
            let mut seps: Vec<(Rational, Rational, String)> = Vec::with_capacity(pn.roots.len());
            for (k, r) in pn.roots.iter().enumerate() {
                let mut iv = r.interval.clone();
                iv.refine_to(&pn.isolation_poly, &width);
                seps.push((iv.lo().clone(), iv.hi().clone(), format!("lam{}", k + 1)));
            }
            if let Some(raw) = try_gaps(&target, &seps, None, expected) {
                return Ok(finish(Family::L, m, target, raw));
            }
        }
        Err(FamilyError::RootCountMismatch {
            family: Family::L,
            level: m,
            expected,
            found: 0,
        })
    }

    /// Independent Sturm-chain check of a certified table: same number of
    /// distinct roots over (−1, 7) and matching positions within 1e−9.
    /// Feasible at the levels where chain degrees stay small.
    pub fn verify_against_sturm(&mut self, family: Family, m: u32) -> Result<(), FamilyError> {
        let table = self.root_table_cloned(family, m)?;
        let p = self.family(family, m)?.poly;
        let chain = SturmChain::new(&p)?;
        let mut ivs = chain.isolate(&rat_int(-1), &rat_int(7))?;
        if ivs.len() != table.roots.len() {
            return Err(FamilyError::RootCountMismatch {
                family,
                level: m,
                expected: table.roots.len(),
                found: ivs.len(),
            });
        }
        let width = dyadic(FINAL_BITS);
        for (iv, known) in ivs.iter_mut().zip(&table.roots) {
            iv.refine_to(chain.squarefree(), &width);
            if (iv.mid_f64() - known.value).abs() > 1e-9 {
                return Err(FamilyError::StructureViolation {
                    what: format!(
                        "sturm root {} of {family} level {m} disagrees with bracket root {}",
                        iv.mid_f64(),
                        known.value
                    ),
                });
            }
        }
        Ok(())
    }
}

/// Divide the forced rational roots out of a Neumann family polynomial:
/// x(x−6) for the symmetric family, (x−6) for the skew one. Other families
/// pass through unchanged.
fn deflate(family: Family, poly: &Poly) -> Result<Poly, FamilyError> {
    let p = match family {
        Family::PN => poly.divide_exact(&Poly::from_integers(&[0, -6, 1]))?,
        Family::PSkewN => poly.divide_exact(&Poly::from_integers(&[-6, 1]))?,
        _ => poly.clone(),
    };
    Ok(p)
}

/// The bracket induction as a statement about the next level: gaps between
/// the φ images of the `prev` roots, each labeled with how many level-
/// `(prev.level + 1)` roots it must contain. Every expectation is certified
/// against the next level's root table before the brackets are returned,
/// and the newborn middle gap of the Dirichlet families is additionally
/// certified to sit above 2.
pub fn weak_brackets(
    tables: &mut FamilyTables,
    prev: &RootTable,
) -> Result<Vec<WeakBracket>, FamilyError> {
    let family = prev.family;
    let next_level = prev.level + 1;
    let next = tables.root_table_cloned(family, next_level)?;
    let dirichlet = match family {
        Family::P | Family::PTilde => true,
        Family::PN | Family::PSkewN => false,
        Family::L => return Err(FamilyError::NotIsolatable { family }),
        _ => return Err(FamilyError::NotIsolatable { family }),
    };

    for &bits in SEPARATOR_BITS {
        let width = dyadic(bits);
        let mut ivs: Vec<RootInterval> = if dirichlet {
            prev.roots.iter().map(|r| r.interval.clone()).collect()
        } else {
            prev.interior().iter().map(|r| r.interval.clone()).collect()
        };
        for iv in &mut ivs {
            iv.refine_to(&prev.isolation_poly, &width);
        }
        let t = ivs.len();
        let mut seps: Vec<(Rational, Rational, String)> = Vec::new();
        seps.push(point(0, "0"));
        for (k, iv) in ivs.iter().enumerate() {
            let (lo, hi) = phi_minus_enclosure(iv.lo(), iv.hi(), &width)?;
            seps.push((lo, hi, format!("-{}", k + 1)));
        }
        if !dirichlet {
            seps.push(point(2, "2"));
            seps.push(point(3, "3"));
        }
        for (k, iv) in ivs.iter().enumerate().rev() {
            let (lo, hi) = phi_plus_enclosure(iv.lo(), iv.hi(), &width)?;
            seps.push((lo, hi, format!("+{}", k + 1)));
        }
        seps.push(point(5, "5"));
        if dirichlet {
            seps.push(point(6, "6"));
        }
        if seps.windows(2).any(|w| w[0].1 >= w[1].0) {
            continue;
        }

        // which roots of the next level each gap certifiably contains
        let interior_next: Vec<&IsolatedRoot> = if dirichlet {
            next.roots.iter().collect()
        } else {
            next.interior()
        };
        let empty_gap = (!dirichlet).then_some(t + 1);
        let newborn_gap = dirichlet.then_some(t);
        let mut out = Vec::with_capacity(seps.len() - 1);
        let mut placed = 0usize;
        let mut conclusive = true;
        for g in 0..seps.len() - 1 {
            let u = &seps[g].1;
            let v = &seps[g + 1].0;
            let inside = interior_next
                .iter()
                .filter(|r| u < r.interval.lo() && r.interval.hi() < v)
                .count();
            let straddle = interior_next
                .iter()
                .any(|r| !(u < r.interval.lo() && r.interval.hi() < v)
                    && !(r.interval.hi() < u || v < r.interval.lo()));
            if straddle {
                conclusive = false;
                break;
            }
            let expected = if Some(g) == empty_gap { 0 } else { 1 };
            if inside != expected {
                conclusive = false;
                break;
            }
            placed += inside;
            let mut label = format!("({},{})", seps[g].2, seps[g + 1].2);
            let mut lo = rat_to_approx(u);
            if Some(g) == newborn_gap {
                label.push_str(" newborn");
                certify_above_two(&next, u, v)?;
                if lo < 2.0 {
                    lo = 2.0;
                }
            }
            if dirichlet && g == seps.len() - 2 {
                label.push_str(" newborn");
            }
            out.push(WeakBracket {
                lo,
                hi: rat_to_approx(v),
                expected_roots: expected,
                label,
            });
        }
        if conclusive && placed == interior_next.len() {
            return Ok(out);
        }
    }
    Err(FamilyError::StructureViolation {
        what: format!(
            "bracket occupancy for {family} level {next_level} could not be certified"
        ),
    })
}

fn rat_to_approx(x: &Rational) -> f64 {
    exact_poly::rat_to_f64(x)
}

/// Certify that the single root in the newborn middle gap lies strictly
/// above 2 (refining its enclosure as needed).
fn certify_above_two(next: &RootTable, u: &Rational, v: &Rational) -> Result<(), FamilyError> {
    let two = rat_int(2);
    let root = next
        .roots
        .iter()
        .find(|r| u < r.interval.lo() && r.interval.hi() < v)
        .ok_or_else(|| FamilyError::StructureViolation {
            what: "newborn middle gap lost its root during certification".to_string(),
        })?;
    let mut iv = root.interval.clone();
    for _ in 0..PLACEMENT_BUDGET {
        if iv.lo() > &two {
            return Ok(());
        }
        if iv.hi() < &two {
            return Err(FamilyError::StructureViolation {
                what: format!(
                    "newborn middle root {} of {} level {} sits below 2",
                    iv.mid_f64(),
                    next.family,
                    next.level
                ),
            });
        }
        let w = iv.width() / rat_int(2);
        iv.refine_to(&next.isolation_poly, &w);
    }
    Err(FamilyError::SignUndecided {
        label: format!(
            "newborn middle root of {} level {} relative to 2",
            next.family, next.level
        ),
    })
}
