use std::fmt;
use std::str::FromStr;

use exact_poly::{rat_int, PolyError, Rational};
use num_traits::Zero;
use thiserror::Error;

use crate::graph::{build_gamma_capped, build_omega_capped, cell_corners, Coord, GraphApprox, GraphKind};

/// Eigenvalues at which the extension formula degenerates: 2 and 5 make the
/// denominator (2-λ)(5-λ) vanish, and 6 is excluded because its extension
/// never produces an eigenfunction on the larger graph.
pub const FORBIDDEN: [f64; 3] = [2.0, 5.0, 6.0];

#[derive(Debug, Error)]
pub enum DecimationError {
    #[error("{x} is outside the domain of the inverse branches (needs x <= 25/4)")]
    Domain { x: f64 },
    #[error("eigenvalue {lambda} is within {tol} of a forbidden value (2, 5 or 6)")]
    Forbidden { lambda: f64, tol: f64 },
    #[error("value vector has length {got}, the coarse graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("graph of level {level} ({kind}) has no coarser predecessor to extend from")]
    NoPredecessor { level: u32, kind: GraphKind },
    #[error("extension violates the eigenvalue equation at vertex {vertex}: residual {residual:.3e}")]
    Residual { vertex: usize, residual: f64 },
    #[error("scaled limit did not settle after {levels} levels (last iterates {previous} -> {last})")]
    NonConvergence { levels: u32, previous: f64, last: f64 },
    #[error("cannot parse branch sequence: {0}")]
    Parse(String),
    #[error("rational enclosure failed: {0}")]
    Enclosure(#[from] PolyError),
}

/// One-level eigenvalue map: λ_m = f(λ_{m+1}) with f(x) = x(5-x).
pub fn f_map(x: f64) -> f64 {
    x * (5.0 - x)
}

/// Exact-rational version of [`f_map`].
pub fn f_rat(x: &Rational) -> Rational {
    x * (rat_int(5) - x)
}

/// The two real inverse branches of f: φ_-(x) ∈ [0, 5/2], φ_+(x) ∈ [5/2, 5].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Minus,
    Plus,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Minus => write!(f, "-"),
            Branch::Plus => write!(f, "+"),
        }
    }
}

/// φ_±(x) = (5 ± √(25-4x)) / 2, the solutions of f(λ) = x. The minus
/// branch is evaluated in the rationalized form 2x/(5 + √(25-4x)): the
/// textbook form cancels catastrophically as x → 0, which matters because
/// scaled limits multiply the absolute error by 5 per level.
pub fn phi(branch: Branch, x: f64) -> Result<f64, DecimationError> {
    let disc = 25.0 - 4.0 * x;
    if disc < 0.0 {
        return Err(DecimationError::Domain { x });
    }
    let root = disc.sqrt();
    Ok(match branch {
        Branch::Minus => 2.0 * x / (5.0 + root),
        Branch::Plus => (5.0 + root) / 2.0,
    })
}

fn sqrt_pair(
    lo_disc: &Rational,
    hi_disc: &Rational,
    width: &Rational,
) -> Result<((Rational, Rational), (Rational, Rational)), DecimationError> {
    if lo_disc < &Rational::zero() {
        return Err(DecimationError::Domain {
            x: 25.0 / 4.0, // only reachable when the input exceeds 25/4
        });
    }
    let lo = exact_poly::sqrt_enclosure(lo_disc, width)?;
    let hi = exact_poly::sqrt_enclosure(hi_disc, width)?;
    Ok((lo, hi))
}

/// Rational interval arithmetic for φ_-: given lo ≤ x ≤ hi, returns exact
/// rationals (a, b) with a ≤ φ_-(x) ≤ b, the sqrt enclosures being at most
/// `width` wide. φ_- is increasing, so the image endpoints come from the
/// interval endpoints.
pub fn phi_minus_enclosure(
    lo: &Rational,
    hi: &Rational,
    width: &Rational,
) -> Result<(Rational, Rational), DecimationError> {
    let disc_at_hi = rat_int(25) - rat_int(4) * hi;
    let disc_at_lo = rat_int(25) - rat_int(4) * lo;
    let (s_hi_x, s_lo_x) = sqrt_pair(&disc_at_hi, &disc_at_lo, width)?;
    let half = exact_poly::rat(1, 2);
    // at x = lo the discriminant is largest: subtract its upper sqrt bound
    let a = (rat_int(5) - s_lo_x.1) * &half;
    let b = (rat_int(5) - s_hi_x.0) * &half;
    Ok((a, b))
}

/// Rational interval arithmetic for φ_+ (decreasing): a ≤ φ_+(x) ≤ b for
/// all lo ≤ x ≤ hi.
pub fn phi_plus_enclosure(
    lo: &Rational,
    hi: &Rational,
    width: &Rational,
) -> Result<(Rational, Rational), DecimationError> {
    let disc_at_hi = rat_int(25) - rat_int(4) * hi;
    let disc_at_lo = rat_int(25) - rat_int(4) * lo;
    let (s_hi_x, s_lo_x) = sqrt_pair(&disc_at_hi, &disc_at_lo, width)?;
    let half = exact_poly::rat(1, 2);
    let a = (rat_int(5) + s_hi_x.0) * &half;
    let b = (rat_int(5) + s_lo_x.1) * &half;
    Ok((a, b))
}

/// A graph eigenvalue history: born at level `m0` with value `start`, then
/// followed through the inverse branches in `word`, continuing with φ_-
/// forever afterwards (only finitely many φ_+ steps can give a finite
/// limit). `weak` records that the branch steps are bracket-guided root
/// lookups rather than the exact inverse map, which is how primitive
/// eigenvalues of the slit domain move between levels.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchSequence {
    pub m0: u32,
    pub start: f64,
    pub branches: Vec<Branch>,
    pub weak: bool,
}

impl BranchSequence {
    pub fn new(m0: u32, start: f64, branches: Vec<Branch>, weak: bool) -> Self {
        BranchSequence { m0, start, branches, weak }
    }

    /// Level after which every step is φ_-; the scaled limit is
    /// 5^m1 · Φ(λ_m1) for the value λ_m1 reached here.
    pub fn fixation_level(&self) -> u32 {
        match self.branches.iter().rposition(|b| *b == Branch::Plus) {
            Some(i) => self.m0 + i as u32 + 1,
            None => self.m0,
        }
    }
}

impl fmt::Display for BranchSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m0={};start={};word=[", self.m0, self.start)?;
        for b in &self.branches {
            write!(f, "{b}")?;
        }
        write!(f, "];weak={}", self.weak)
    }
}

impl FromStr for BranchSequence {
    type Err = DecimationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: &str| DecimationError::Parse(format!("{msg} in {s:?}"));
        let mut m0 = None;
        let mut start = None;
        let mut branches = None;
        let mut weak = None;
        for part in s.split(';') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| bad("expected key=value"))?;
            match key {
                "m0" => m0 = Some(value.parse::<u32>().map_err(|_| bad("bad m0"))?),
                "start" => start = Some(value.parse::<f64>().map_err(|_| bad("bad start"))?),
                "word" => {
                    let inner = value
                        .strip_prefix('[')
                        .and_then(|v| v.strip_suffix(']'))
                        .ok_or_else(|| bad("word needs [ ]"))?;
                    let mut w = Vec::new();
                    for c in inner.chars() {
                        match c {
                            '-' => w.push(Branch::Minus),
                            '+' => w.push(Branch::Plus),
                            _ => return Err(bad("word may only contain - and +")),
                        }
                    }
                    branches = Some(w);
                }
                "weak" => weak = Some(value.parse::<bool>().map_err(|_| bad("bad weak"))?),
                _ => return Err(bad("unknown key")),
            }
        }
        Ok(BranchSequence {
            m0: m0.ok_or_else(|| bad("missing m0"))?,
            start: start.ok_or_else(|| bad("missing start"))?,
            branches: branches.ok_or_else(|| bad("missing word"))?,
            weak: weak.ok_or_else(|| bad("missing weak"))?,
        })
    }
}

/// Extends vertex values from the next-coarser graph to `g_next` by the
/// closed-form interpolation: in each coarse cell with corner values
/// u(x_0), u(x_1), u(x_2), the new vertex y_i opposite corner x_i gets
///
///   u(y_i) = ((4-λ)(u(x_{i+1}) + u(x_{i+2})) + 2 u(x_i)) / ((2-λ)(5-λ)).
///
/// On the slit domain, deleted bottom-line corners are read as 0 and
/// bottom-line midpoints are skipped. The λ-eigenvalue equation is verified
/// at every new interior vertex; old vertices keep their values, so
/// restriction to the coarse graph is the identity by construction.
pub fn extend_eigenfunction(
    g_next: &GraphApprox,
    u: &[f64],
    lambda_next: f64,
) -> Result<Vec<f64>, DecimationError> {
    const FORBIDDEN_TOL: f64 = 1e-9;
    for v in FORBIDDEN {
        if (lambda_next - v).abs() < FORBIDDEN_TOL {
            return Err(DecimationError::Forbidden { lambda: lambda_next, tol: FORBIDDEN_TOL });
        }
    }
    let coarse_level = match (g_next.kind, g_next.level) {
        (GraphKind::Gamma, 0) | (GraphKind::Omega, 0 | 1) => {
            return Err(DecimationError::NoPredecessor { level: g_next.level, kind: g_next.kind })
        }
        (_, m) => m - 1,
    };
    let coarse = match g_next.kind {
        GraphKind::Gamma => build_gamma_capped(coarse_level, coarse_level),
        GraphKind::Omega => build_omega_capped(coarse_level, coarse_level),
    }
    .expect("coarse level is below the fine level, so it is always buildable");
    if u.len() != coarse.n() {
        return Err(DecimationError::LengthMismatch { expected: coarse.n(), got: u.len() });
    }

    // coarse value lookup with Dirichlet zeros on the deleted bottom line
    let coarse_value = |c: &Coord| -> f64 {
        match coarse.index_of(c) {
            Some(i) => u[i],
            None => 0.0,
        }
    };

    let lam = lambda_next;
    let denom = (2.0 - lam) * (5.0 - lam);
    let mut out = vec![0.0f64; g_next.n()];
    let mut assigned = vec![false; g_next.n()];
    for (i, c) in g_next.vertices.iter().enumerate() {
        if let Some(j) = coarse.index_of(c) {
            out[i] = u[j];
            assigned[i] = true;
        }
    }

    let mut word = vec![0u8; coarse_level as usize];
    loop {
        let corners = cell_corners(&word);
        let vals = [
            coarse_value(&corners[0]),
            coarse_value(&corners[1]),
            coarse_value(&corners[2]),
        ];
        for i in 0..3 {
            let y = Coord::midpoint(corners[(i + 1) % 3], corners[(i + 2) % 3]);
            let Some(fine_idx) = g_next.index_of(&y) else {
                continue; // bottom-line midpoint, absent from the slit domain
            };
            out[fine_idx] =
                ((4.0 - lam) * (vals[(i + 1) % 3] + vals[(i + 2) % 3]) + 2.0 * vals[i]) / denom;
            assigned[fine_idx] = true;
        }
        let mut advanced = false;
        for pos in (0..word.len()).rev() {
            if word[pos] < 2 {
                word[pos] += 1;
                word[pos + 1..].fill(0);
                advanced = true;
                break;
            }
        }
        if !advanced {
            break;
        }
    }
    debug_assert!(assigned.iter().all(|&a| a), "every fine vertex is a coarse vertex or a midpoint");

    // the extension must satisfy the eigenvalue equation at each new
    // interior vertex; old vertices are governed by the coarse equation
    let scale = u.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-10 * scale;
    for (i, c) in g_next.vertices.iter().enumerate() {
        if g_next.is_boundary(i) || coarse.index_of(c).is_some() {
            continue;
        }
        let nbr_sum: f64 = g_next.neighbors(i).iter().map(|&j| out[j]).sum();
        let residual = ((4.0 - lam) * out[i] - nbr_sum).abs();
        if residual > tol {
            return Err(DecimationError::Residual { vertex: i, residual });
        }
    }
    Ok(out)
}

/// The default resolver for [`limit_scaled`]: exact inverse-branch steps.
pub fn exact_resolver(_next_level: u32, lambda: f64, branch: Branch) -> Result<f64, DecimationError> {
    phi(branch, lambda)
}

/// Follows a branch sequence downward and returns the scaled limit
/// (3/2)·lim 5^m λ_m. The resolver maps (next level, current λ, branch) to
/// λ at the next level; [`exact_resolver`] uses φ_±, while callers tracking
/// bracket-guided families substitute their own lookup for the explicit
/// word and fall back to φ_- afterwards. Convergence is declared once the
/// implicit all-minus tail moves the scaled value by less than `tol`
/// relatively; increments shrink by roughly 1/5 per level, so this is also
/// an error estimate.
pub fn limit_scaled<R>(
    seq: &BranchSequence,
    mut resolver: R,
    tol: f64,
    max_levels: u32,
) -> Result<f64, DecimationError>
where
    R: FnMut(u32, f64, Branch) -> Result<f64, DecimationError>,
{
    let mut lam = seq.start;
    let mut level = seq.m0;
    let mut pow = 1.5 * 5.0f64.powi(seq.m0 as i32);
    let mut scaled = pow * lam;
    for &b in &seq.branches {
        lam = resolver(level + 1, lam, b)?;
        level += 1;
        pow *= 5.0;
        scaled = pow * lam;
    }
    let explicit_end = level;
    loop {
        let prev = scaled;
        lam = resolver(level + 1, lam, Branch::Minus)?;
        level += 1;
        pow *= 5.0;
        scaled = pow * lam;
        if (scaled - prev).abs() <= tol * scaled.abs().max(1.0) {
            return Ok(scaled);
        }
        if level - explicit_end >= max_levels {
            return Err(DecimationError::NonConvergence {
                levels: max_levels,
                previous: prev,
                last: scaled,
            });
        }
    }
}

/// Φ(z) = (3/2)·lim 5^k φ_-^{(k)}(z): the scaled all-minus limit, strictly
/// increasing on [0, 25/4] with Φ(0) = 0 and Φ(z) = 5 Φ(φ_-(z)).
pub fn phi_limit(z: f64) -> f64 {
    let mut lam = z;
    let mut pow = 1.5;
    let mut scaled = pow * lam;
    for _ in 0..200 {
        let prev = scaled;
        lam = 2.0 * lam / (5.0 + (25.0 - 4.0 * lam).sqrt());
        pow *= 5.0;
        scaled = pow * lam;
        if (scaled - prev).abs() <= 1e-14 * scaled.abs().max(1.0) {
            break;
        }
    }
    scaled
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_gamma, build_omega};

    #[test]
    fn f_map_anchor_values() {
        assert_eq!(f_map(2.0), 6.0);
        assert_eq!(f_map(5.0), 0.0);
        assert_eq!(f_map(6.0), -6.0);
        assert_eq!(f_rat(&rat_int(6)), rat_int(-6));
        let x = exact_poly::rat(5, 2);
        assert_eq!(f_rat(&x), exact_poly::rat(25, 4));
    }

    #[test]
    fn phi_branch_values() {
        assert_eq!(phi(Branch::Minus, 0.0).unwrap(), 0.0);
        assert!((phi(Branch::Plus, 6.0).unwrap() - 3.0).abs() < 1e-14);
        assert!((phi(Branch::Minus, 6.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((phi(Branch::Minus, 5.0).unwrap() - 1.381_966_011_250_105).abs() < 1e-12);
        assert!(matches!(phi(Branch::Minus, 6.3), Err(DecimationError::Domain { .. })));
    }

    #[test]
    fn phi_inverts_f_and_respects_ranges() {
        for i in 0..=1000 {
            let x = 6.0 * i as f64 / 1000.0;
            let lo = phi(Branch::Minus, x).unwrap();
            let hi = phi(Branch::Plus, x).unwrap();
            assert!((f_map(lo) - x).abs() <= 1e-13 * x.max(1.0), "minus branch at {x}");
            assert!((f_map(hi) - x).abs() <= 1e-13 * x.max(1.0), "plus branch at {x}");
            assert!(lo <= 2.0 + 1e-14 && hi >= 3.0 - 1e-14);
        }
    }

    #[test]
    fn rational_enclosures_bracket_the_float_values() {
        let w = exact_poly::rat(1, 1 << 20);
        let lo = exact_poly::rat(3, 2);
        let hi = exact_poly::rat(8, 5);
        let (a, b) = phi_minus_enclosure(&lo, &hi, &w).unwrap();
        let fa = phi(Branch::Minus, 1.5).unwrap();
        let fb = phi(Branch::Minus, 1.6).unwrap();
        assert!(exact_poly::rat_to_f64(&a) <= fa && fb <= exact_poly::rat_to_f64(&b));
        let (c, d) = phi_plus_enclosure(&lo, &hi, &w).unwrap();
        let fc = phi(Branch::Plus, 1.6).unwrap();
        let fd = phi(Branch::Plus, 1.5).unwrap();
        assert!(exact_poly::rat_to_f64(&c) <= fc && fd <= exact_poly::rat_to_f64(&d));
        // enclosure width = image width (~0.023 here) plus sqrt slack
        assert!(&b - &a < exact_poly::rat(3, 100));
        // a degenerate input interval isolates the sqrt slack itself
        let (ta, tb) = phi_minus_enclosure(&lo, &lo, &w).unwrap();
        assert!(&tb - &ta <= w);
    }

    #[test]
    fn enclosure_rejects_out_of_domain_input() {
        let w = exact_poly::rat(1, 1024);
        let r = phi_minus_enclosure(&rat_int(7), &rat_int(8), &w);
        assert!(matches!(r, Err(DecimationError::Domain { .. })));
    }

    #[test]
    fn branch_sequence_round_trip() {
        let seq = BranchSequence::new(
            3,
            5.618033988749895,
            vec![Branch::Minus, Branch::Plus, Branch::Minus],
            true,
        );
        let text = seq.to_string();
        assert_eq!(text, "m0=3;start=5.618033988749895;word=[-+-];weak=true");
        assert_eq!(text.parse::<BranchSequence>().unwrap(), seq);
        assert_eq!(seq.fixation_level(), 5);
        let no_plus: BranchSequence = "m0=2;start=6;word=[];weak=false".parse().unwrap();
        assert_eq!(no_plus.fixation_level(), 2);
        assert!("m0=2;start=6;word=[*];weak=false".parse::<BranchSequence>().is_err());
        assert!("m0=2;start=6;weak=false".parse::<BranchSequence>().is_err());
    }

    #[test]
    fn constants_extend_to_constants() {
        let fine = build_gamma(2).unwrap();
        let u = vec![3.25; build_gamma(1).unwrap().n()];
        let v = extend_eigenfunction(&fine, &u, 0.0).unwrap();
        assert!(v.iter().all(|&x| (x - 3.25).abs() < 1e-12));
    }

    #[test]
    fn gamma_dirichlet_ground_state_extends() {
        // the λ=2 Dirichlet eigenfunction on Γ_1: zero corners, equal midpoints
        let coarse = build_gamma(1).unwrap();
        let fine = build_gamma(2).unwrap();
        let mut u = vec![0.0; coarse.n()];
        for &i in &coarse.interior {
            u[i] = 1.0;
        }
        let lam2 = phi(Branch::Minus, 2.0).unwrap();
        let v = extend_eigenfunction(&fine, &u, lam2).unwrap();
        // restriction is the identity
        for (i, c) in coarse.vertices.iter().enumerate() {
            let fi = fine.index_of(c).unwrap();
            assert_eq!(v[fi], u[i]);
        }
        // the full eigenvalue equation now holds at every fine interior vertex
        for &i in &fine.interior {
            let nbr: f64 = fine.neighbors(i).iter().map(|&j| v[j]).sum();
            assert!(((4.0 - lam2) * v[i] - nbr).abs() < 1e-12);
        }
    }

    #[test]
    fn forbidden_values_are_rejected() {
        let fine = build_omega(2).unwrap();
        let u = vec![0.0; build_omega(1).unwrap().n()];
        for bad in [2.0, 5.0, 6.0, 5.0 + 4e-10] {
            assert!(matches!(
                extend_eigenfunction(&fine, &u, bad),
                Err(DecimationError::Forbidden { .. })
            ));
        }
    }

    #[test]
    fn extension_checks_vector_length() {
        let fine = build_gamma(2).unwrap();
        assert!(matches!(
            extend_eigenfunction(&fine, &[1.0; 4], 1.0),
            Err(DecimationError::LengthMismatch { expected: 6, got: 4 })
        ));
    }

    #[test]
    fn scaled_limit_of_zero_is_zero() {
        let seq = BranchSequence::new(1, 0.0, vec![], false);
        assert_eq!(limit_scaled(&seq, exact_resolver, 1e-12, 100).unwrap(), 0.0);
    }

    #[test]
    fn scaled_limit_matches_phi_limit() {
        // all-minus from z: limit_scaled and Φ agree
        for z in [2.0, 3.0, 5.0, 6.0] {
            let seq = BranchSequence::new(0, z, vec![], false);
            let lim = limit_scaled(&seq, exact_resolver, 1e-13, 300).unwrap();
            let direct = phi_limit(z);
            assert!((lim - direct).abs() < 1e-9 * direct, "z={z}: {lim} vs {direct}");
        }
    }

    #[test]
    fn phi_limit_functional_equation() {
        assert_eq!(phi_limit(0.0), 0.0);
        assert!(phi_limit(3.0) < phi_limit(5.0));
        for i in 1..=60 {
            let z = 6.0 * i as f64 / 60.0;
            let lhs = phi_limit(z);
            let rhs = 5.0 * phi_limit(phi(Branch::Minus, z).unwrap());
            assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0), "z={z}");
        }
    }

    #[test]
    fn geometric_increment_decay() {
        // successive scaled increments along an all-minus tail shrink by ~1/5
        let mut lam = 2.0f64;
        let mut pow = 1.5 * 5.0;
        let mut scaled = pow * phi(Branch::Minus, lam).unwrap();
        lam = phi(Branch::Minus, lam).unwrap();
        let mut increments = Vec::new();
        for _ in 0..12 {
            let prev = scaled;
            lam = phi(Branch::Minus, lam).unwrap();
            pow *= 5.0;
            scaled = pow * lam;
            increments.push(scaled - prev);
        }
        for w in increments.windows(2).skip(4) {
            let ratio = w[1] / w[0];
            assert!((ratio - 0.2).abs() < 0.05, "ratio {ratio}");
        }
    }
}
