//! Exact determinant polynomial families of the skeleton systems.
//!
//! A symmetric or skew-symmetric eigenfunction on the slit-gasket graph is
//! pinned down by its values `b_0..b_m` along the left-edge skeleton chain.
//! Those values satisfy a three-term recurrence whose coefficients are the
//! fixed polynomials in [`EntryPolys`] evaluated at the decimated eigenvalues
//! `f^(i)(λ)`, plus a border row for each boundary condition. Every
//! (symmetry, boundary) class therefore has a square linear system whose
//! determinant — expanded exactly over the rationals — vanishes precisely at
//! the primitive eigenvalues of that class.
//!
//! [`FamilyTables`] builds the determinant chains by first-row or last-row
//! cofactor expansion, divides out the forced factors coming from the
//! decimation singularities, and asserts the closed-form degree of every
//! polynomial it produces. Root isolation and the sign/interlacing checks
//! live in the sibling `isolation` and `signs` modules.

use std::collections::BTreeMap;
use std::fmt;

use exact_poly::{rat_int, Poly, PolyError};
use sg_core::DecimationError;
use thiserror::Error;

use crate::isolation::RootTable;

/// Highest level at which the determinant families are built by default.
/// The reduced symmetric family reaches degree 638 here; chains stay
/// comfortably sub-minute on ordinary hardware.
pub const DEFAULT_MAX_POLY_LEVEL: u32 = 9;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("family {family} starts at level {min}, got {level}")]
    LevelTooSmall { family: Family, level: u32, min: u32 },
    #[error("level {level} exceeds the configured polynomial cap {max}")]
    LevelTooLarge { level: u32, max: u32 },
    #[error("{family} at level {level} has degree {found}, expected {expected}")]
    DegreeMismatch {
        family: Family,
        level: u32,
        expected: usize,
        found: usize,
    },
    #[error(
        "{family} at level {level}: certified {found} roots, expected {expected}; \
         the bracket structure failed at the tightest separator width"
    )]
    RootCountMismatch {
        family: Family,
        level: u32,
        expected: usize,
        found: usize,
    },
    #[error("roots of {family} are not isolated (only reduced families carry root tables)")]
    NotIsolatable { family: Family },
    #[error("the border-row and reduced-chain constructions of p_neumann disagree at level {level}")]
    ConstructionMismatch { level: u32 },
    #[error("could not certify the sign of {label} within the refinement budget")]
    SignUndecided { label: String },
    #[error("certified structure violated: {what}")]
    StructureViolation { what: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Decimation(#[from] DecimationError),
}

/// The determinant families and their reduced (divided-out) forms.
///
/// `Q`/`P` are the symmetric Dirichlet determinant and its reduced form,
/// `QTilde`/`PTilde` the skew Dirichlet pair, `QN`/`PN` the symmetric
/// Neumann pair, `LTilde`/`L` the top-block determinant of the Neumann
/// system (the chain without its last border row) and its reduced form,
/// and `QSkewN`/`PSkewN` the skew Neumann pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Q,
    P,
    QTilde,
    PTilde,
    QN,
    PN,
    LTilde,
    L,
    QSkewN,
    PSkewN,
}

impl Family {
    /// First level at which the family is defined.
    pub fn min_level(self) -> u32 {
        match self {
            Family::Q | Family::P | Family::QTilde | Family::PTilde => 2,
            _ => 1,
        }
    }

    /// Closed-form degree at level `m`; every constructed polynomial is
    /// checked against this.
    pub fn degree(self, m: u32) -> usize {
        let p2 = |e: u32| 2usize.pow(e);
        match self {
            Family::Q => 3 * (p2(m - 1) - 1),
            Family::P => p2(m) + p2(m - 2) - 2,
            Family::QTilde => 5 * p2(m - 2) - 3,
            Family::PTilde => p2(m) - 2,
            Family::QN => p2(m + 1) - 2,
            Family::PN => p2(m),
            Family::LTilde => p2(m + 1) - 3,
            Family::L => p2(m) - 1,
            Family::QSkewN => {
                if m == 1 {
                    1
                } else {
                    5 * p2(m - 2) - 2
                }
            }
            Family::PSkewN => p2(m) - 1,
        }
    }

    /// Families whose roots are isolated: the reduced forms plus `L`.
    pub fn has_roots(self) -> bool {
        matches!(
            self,
            Family::P | Family::PTilde | Family::PN | Family::PSkewN | Family::L
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Q => "q",
            Family::P => "p",
            Family::QTilde => "q_tilde",
            Family::PTilde => "p_tilde",
            Family::QN => "q_neumann",
            Family::PN => "p_neumann",
            Family::LTilde => "l_tilde",
            Family::L => "l",
            Family::QSkewN => "q_skew_neumann",
            Family::PSkewN => "p_skew_neumann",
        })
    }
}

/// The fixed coefficient polynomials of the skeleton recurrence.
///
/// `s`, `r`, `l` fill the interior rows (diagonal, superdiagonal,
/// subdiagonal); `s_tilde`, `r_tilde` replace the first row in the
/// skew-symmetric classes, where the half-cell at the top vertex collapses.
#[derive(Clone, Debug)]
pub struct EntryPolys {
    /// (2−x)(4−x)(5−x) − (14−3x) = −x³ + 11x² − 35x + 26
    pub s: Poly,
    /// −2(2−x)(5−x) = −2x² + 14x − 20
    pub r: Poly,
    /// x − 6
    pub l: Poly,
    /// (4−x)(5−x) − 1 = x² − 9x + 19
    pub s_tilde: Poly,
    /// −2(5−x) = 2x − 10
    pub r_tilde: Poly,
}

impl EntryPolys {
    /// Builds the five entries from their factored forms and asserts the
    /// expanded coefficient lists, so a typo in either form cannot survive.
    pub fn new() -> Self {
        let x = Poly::x();
        let lin = |a: i64| &Poly::constant(rat_int(a)) - &x; // a − x
        let s = &(&(&lin(2) * &lin(4)) * &lin(5)) - &(&Poly::constant(rat_int(14)) - &x.scale(&rat_int(3)));
        let r = (&lin(2) * &lin(5)).scale(&rat_int(-2));
        let l = &x - &Poly::constant(rat_int(6));
        let s_tilde = &(&lin(4) * &lin(5)) - &Poly::one();
        let r_tilde = lin(5).scale(&rat_int(-2));
        assert_eq!(s, Poly::from_integers(&[26, -35, 11, -1]));
        assert_eq!(r, Poly::from_integers(&[-20, 14, -2]));
        assert_eq!(l, Poly::from_integers(&[-6, 1]));
        assert_eq!(s_tilde, Poly::from_integers(&[19, -9, 1]));
        assert_eq!(r_tilde, Poly::from_integers(&[-10, 2]));
        EntryPolys {
            s,
            r,
            l,
            s_tilde,
            r_tilde,
        }
    }
}

impl Default for EntryPolys {
    fn default() -> Self {
        EntryPolys::new()
    }
}

/// One member of a determinant family.
#[derive(Clone, Debug)]
pub struct PolyFamily {
    pub family: Family,
    pub level: u32,
    pub poly: Poly,
}

/// Memoized builder for all families, their root tables, and the shared
/// `f`-iterate and divisor chains.
pub struct FamilyTables {
    pub entry: EntryPolys,
    max_level: u32,
    /// f_iter[i] = f^(i), with f^(0) = x and f(x) = x(5−x).
    f_iter: Vec<Poly>,
    /// div_dirichlet[m] = Π_{i=0}^{m−3} (f^(i) − 2); trivial through m = 2.
    div_dirichlet: Vec<Poly>,
    /// div_neumann[m] = Π_{i=0}^{m−2} (f^(i) − 2)(f^(i) − 5); trivial at m = 1.
    div_neumann: Vec<Poly>,
    /// a_chain[k] = determinant of the k×k bottom block ending in the
    /// Neumann border row (−2, 2−x); a_chain[0] = 1 by convention.
    a_chain: Vec<Poly>,
    polys: BTreeMap<(Family, u32), Poly>,
    pub(crate) roots: BTreeMap<(Family, u32), RootTable>,
}

impl FamilyTables {
    pub fn new(max_level: u32) -> Self {
        FamilyTables {
            entry: EntryPolys::new(),
            max_level,
            f_iter: vec![Poly::x()],
            div_dirichlet: Vec::new(),
            div_neumann: Vec::new(),
            a_chain: Vec::new(),
            polys: BTreeMap::new(),
            roots: BTreeMap::new(),
        }
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    fn check_range(&self, family: Family, m: u32) -> Result<(), FamilyError> {
        let min = family.min_level();
        if m < min {
            return Err(FamilyError::LevelTooSmall {
                family,
                level: m,
                min,
            });
        }
        if m > self.max_level {
            return Err(FamilyError::LevelTooLarge {
                level: m,
                max: self.max_level,
            });
        }
        Ok(())
    }

    /// The iterate f^(i), memoized.
    pub fn f_pow(&mut self, i: u32) -> &Poly {
        while self.f_iter.len() <= i as usize {
            let f = Poly::from_integers(&[0, 5, -1]);
            let next = f.compose(self.f_iter.last().unwrap());
            self.f_iter.push(next);
        }
        &self.f_iter[i as usize]
    }

    fn div_dirichlet(&mut self, m: u32) -> Poly {
        while self.div_dirichlet.len() <= m as usize {
            let k = self.div_dirichlet.len();
            let next = if k <= 2 {
                Poly::one()
            } else {
                let factor = &self.f_pow(k as u32 - 3).clone() - &Poly::constant(rat_int(2));
                &self.div_dirichlet[k - 1] * &factor
            };
            self.div_dirichlet.push(next);
        }
        self.div_dirichlet[m as usize].clone()
    }

    fn div_neumann(&mut self, m: u32) -> Poly {
        while self.div_neumann.len() <= m as usize {
            let k = self.div_neumann.len();
            let next = if k <= 1 {
                Poly::one()
            } else {
                let fi = self.f_pow(k as u32 - 2).clone();
                let two = &fi - &Poly::constant(rat_int(2));
                let five = &fi - &Poly::constant(rat_int(5));
                &self.div_neumann[k - 1] * &(&two * &five)
            };
            self.div_neumann.push(next);
        }
        self.div_neumann[m as usize].clone()
    }

    /// Bottom-block determinants of the Neumann chain: standard rows whose
    /// arguments decimate down to x, closed by the border row (−2, 2−x).
    fn a_block(&mut self, k: u32) -> Poly {
        while self.a_chain.len() <= k as usize {
            let n = self.a_chain.len();
            let next = match n {
                0 => Poly::one(),
                1 => Poly::from_integers(&[2, -1]),
                2 => {
                    // det [[s(x), r(x)], [−2, 2−x]]
                    let two_minus = Poly::from_integers(&[2, -1]);
                    &(&self.entry.s * &two_minus) + &self.entry.r.scale(&rat_int(2))
                }
                _ => {
                    let arg = self.f_pow(n as u32 - 2).clone();
                    let sub = self.f_pow(n as u32 - 3).clone();
                    let s_f = self.entry.s.compose(&arg);
                    let r_f = self.entry.r.compose(&arg);
                    let l_f = self.entry.l.compose(&sub);
                    &(&s_f * &self.a_chain[n - 1]) - &(&(&r_f * &l_f) * &self.a_chain[n - 2])
                }
            };
            self.a_chain.push(next);
        }
        self.a_chain[k as usize].clone()
    }

    fn poly_cloned(&mut self, family: Family, m: u32) -> Result<Poly, FamilyError> {
        Ok(self.poly(family, m)?.clone())
    }

    /// The family polynomial at level `m`, built (and degree-checked)
    /// together with everything below it.
    pub fn poly(&mut self, family: Family, m: u32) -> Result<&Poly, FamilyError> {
        self.check_range(family, m)?;
        for lvl in family.min_level()..=m {
            if self.polys.contains_key(&(family, lvl)) {
                continue;
            }
            let p = self.compute_poly(family, lvl)?;
            let expected = family.degree(lvl);
            let found = p.degree().unwrap_or(0);
            if found != expected {
                return Err(FamilyError::DegreeMismatch {
                    family,
                    level: lvl,
                    expected,
                    found,
                });
            }
            self.polys.insert((family, lvl), p);
        }
        Ok(&self.polys[&(family, m)])
    }

    pub fn family(&mut self, family: Family, m: u32) -> Result<PolyFamily, FamilyError> {
        Ok(PolyFamily {
            family,
            level: m,
            poly: self.poly_cloned(family, m)?,
        })
    }

    fn compute_poly(&mut self, family: Family, m: u32) -> Result<Poly, FamilyError> {
        let poly = match family {
            // Symmetric Dirichlet determinant: first-row cofactor expansion
            // q_m = s(f^(m−2))·q_{m−1} − r(f^(m−2))·l(f^(m−3))·q_{m−2},
            // seeded by the 1×1 and 2×2 determinants.
            Family::Q => match m {
                2 => self.entry.s.clone(),
                3 => {
                    let f1 = self.f_pow(1).clone();
                    let s_f = self.entry.s.compose(&f1);
                    let r_f = self.entry.r.compose(&f1);
                    &(&s_f * &self.entry.s) - &(&r_f * &self.entry.l)
                }
                _ => {
                    let arg = self.f_pow(m - 2).clone();
                    let sub = self.f_pow(m - 3).clone();
                    let s_f = self.entry.s.compose(&arg);
                    let r_f = self.entry.r.compose(&arg);
                    let l_f = self.entry.l.compose(&sub);
                    let q1 = self.poly_cloned(Family::Q, m - 1)?;
                    let q2 = self.poly_cloned(Family::Q, m - 2)?;
                    &(&s_f * &q1) - &(&(&r_f * &l_f) * &q2)
                }
            },
            // Skew Dirichlet determinant: same expansion, but the first row
            // carries the half-cell entries (s̃, r̃); the minors are the
            // untouched symmetric blocks, hence plain q's.
            Family::QTilde => match m {
                2 => self.entry.s_tilde.clone(),
                3 => {
                    let f1 = self.f_pow(1).clone();
                    let st_f = self.entry.s_tilde.compose(&f1);
                    let rt_f = self.entry.r_tilde.compose(&f1);
                    &(&st_f * &self.entry.s) - &(&rt_f * &self.entry.l)
                }
                _ => {
                    let arg = self.f_pow(m - 2).clone();
                    let sub = self.f_pow(m - 3).clone();
                    let st_f = self.entry.s_tilde.compose(&arg);
                    let rt_f = self.entry.r_tilde.compose(&arg);
                    let l_f = self.entry.l.compose(&sub);
                    let q1 = self.poly_cloned(Family::Q, m - 1)?;
                    let q2 = self.poly_cloned(Family::Q, m - 2)?;
                    &(&st_f * &q1) - &(&(&rt_f * &l_f) * &q2)
                }
            },
            Family::P => {
                let q = self.poly_cloned(Family::Q, m)?;
                let d = self.div_dirichlet(m);
                q.divide_exact(&d)?
            }
            Family::PTilde => {
                let q = self.poly_cloned(Family::QTilde, m)?;
                let d = self.div_dirichlet(m);
                q.divide_exact(&d)?
            }
            // Top block of the symmetric Neumann system (no bottom border
            // row): last-row expansion pushes a composition with f into the
            // recursive terms instead of into the coefficients.
            Family::LTilde => match m {
                1 => Poly::from_integers(&[4, -1]),
                2 => {
                    // det [[4−f, −4], [l(x), s(x)]]
                    let four_minus_f = Poly::from_integers(&[4, -5, 1]);
                    &(&four_minus_f * &self.entry.s) + &self.entry.l.scale(&rat_int(4))
                }
                _ => {
                    let f1 = self.f_pow(1).clone();
                    let f2 = self.f_pow(2).clone();
                    let prev = self.poly_cloned(Family::LTilde, m - 1)?.compose(&f1);
                    let prev2 = self.poly_cloned(Family::LTilde, m - 2)?.compose(&f2);
                    let r_f = self.entry.r.compose(&f1);
                    &(&self.entry.s * &prev) - &(&(&r_f * &self.entry.l) * &prev2)
                }
            },
            Family::L => {
                let lt = self.poly_cloned(Family::LTilde, m)?;
                let d = self.div_neumann(m);
                lt.divide_exact(&d)?
            }
            // Full symmetric Neumann determinant, expanded along the bottom
            // border row: (2−x)·l̃_m + 2·r(x)·l̃_{m−1}(f(x)).
            Family::QN => match m {
                1 => Poly::from_integers(&[0, -6, 1]),
                _ => {
                    let f1 = self.f_pow(1).clone();
                    let lt = self.poly_cloned(Family::LTilde, m)?;
                    let lt_prev = self.poly_cloned(Family::LTilde, m - 1)?.compose(&f1);
                    let two_minus = Poly::from_integers(&[2, -1]);
                    &(&two_minus * &lt) + &(&self.entry.r.scale(&rat_int(2)) * &lt_prev)
                }
            },
            Family::PN => {
                let qn = self.poly_cloned(Family::QN, m)?;
                let d = self.div_neumann(m);
                let pn = qn.divide_exact(&d)?;
                if m >= 2 {
                    // Independent reduced-chain construction: the divided
                    // determinant must equal (2−x)·l_m − 4·l_{m−1}(f(x)).
                    let f1 = self.f_pow(1).clone();
                    let l_m = self.poly_cloned(Family::L, m)?;
                    let l_prev = self.poly_cloned(Family::L, m - 1)?.compose(&f1);
                    let two_minus = Poly::from_integers(&[2, -1]);
                    let alt = &(&two_minus * &l_m) - &l_prev.scale(&rat_int(4));
                    if alt != pn {
                        return Err(FamilyError::ConstructionMismatch { level: m });
                    }
                }
                pn
            }
            // Skew Neumann determinant: skew first row over the bottom-block
            // minors of the a-chain.
            Family::QSkewN => match m {
                1 => Poly::from_integers(&[6, -1]),
                2 => {
                    let two_minus = Poly::from_integers(&[2, -1]);
                    &(&two_minus * &self.entry.s_tilde) + &self.entry.r_tilde.scale(&rat_int(2))
                }
                _ => {
                    let arg = self.f_pow(m - 2).clone();
                    let sub = self.f_pow(m - 3).clone();
                    let st_f = self.entry.s_tilde.compose(&arg);
                    let rt_f = self.entry.r_tilde.compose(&arg);
                    let l_f = self.entry.l.compose(&sub);
                    let a1 = self.a_block(m - 1);
                    let a2 = self.a_block(m - 2);
                    &(&st_f * &a1) - &(&(&rt_f * &l_f) * &a2)
                }
            },
            Family::PSkewN => {
                let q = self.poly_cloned(Family::QSkewN, m)?;
                let d = self.div_dirichlet(m);
                q.divide_exact(&d)?
            }
        };
        Ok(poly)
    }
}

/// Symmetric Dirichlet determinant q at level `m`.
pub fn build_q(m: u32) -> Result<PolyFamily, FamilyError> {
    standalone(Family::Q, m)
}

/// Reduced symmetric Dirichlet polynomial p at level `m`.
pub fn build_p(m: u32) -> Result<PolyFamily, FamilyError> {
    standalone(Family::P, m)
}

/// Skew Dirichlet determinant q̃ at level `m`.
pub fn build_q_tilde(m: u32) -> Result<PolyFamily, FamilyError> {
    standalone(Family::QTilde, m)
}

/// Reduced skew Dirichlet polynomial p̃ at level `m`.
pub fn build_p_tilde(m: u32) -> Result<PolyFamily, FamilyError> {
    standalone(Family::PTilde, m)
}

/// Reduced Neumann top-block polynomial l at level `m`.
pub fn build_l(m: u32) -> Result<PolyFamily, FamilyError> {
    standalone(Family::L, m)
}

/// Neumann top-block determinant l̃ at level `m`.
pub fn build_l_tilde(m: u32) -> Result<PolyFamily, FamilyError> {
    standalone(Family::LTilde, m)
}

/// Symmetric Neumann determinant q^N at level `m`.
pub fn build_qn(m: u32) -> Result<PolyFamily, FamilyError> {
    standalone(Family::QN, m)
}

/// Reduced symmetric Neumann polynomial p^N at level `m` (cross-checked
/// against the reduced-chain identity during construction).
pub fn build_pn(m: u32) -> Result<PolyFamily, FamilyError> {
    standalone(Family::PN, m)
}

/// Skew Neumann determinant at level `m`.
pub fn build_q_skew_n(m: u32) -> Result<PolyFamily, FamilyError> {
    standalone(Family::QSkewN, m)
}

/// Reduced skew Neumann polynomial at level `m`.
pub fn build_p_skew_n(m: u32) -> Result<PolyFamily, FamilyError> {
    standalone(Family::PSkewN, m)
}

fn standalone(family: Family, m: u32) -> Result<PolyFamily, FamilyError> {
    let mut tables = FamilyTables::new(m.max(DEFAULT_MAX_POLY_LEVEL));
    tables.family(family, m)
}
