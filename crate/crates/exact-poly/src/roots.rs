use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::PolyError;
use crate::poly::{Poly, Rational};

/// Closed rational interval certified to contain exactly one real root of the
/// polynomial it was produced from.
///
/// Either the interval is a single exact rational root (`lo == hi`), or the
/// polynomial has strictly opposite signs at the two endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct RootInterval {
    lo: Rational,
    hi: Rational,
    sign_lo: i8,
    sign_hi: i8,
}

impl RootInterval {
    /// An exactly known rational root.
    pub fn exact(x: Rational) -> Self {
        RootInterval {
            lo: x.clone(),
            hi: x,
            sign_lo: 0,
            sign_hi: 0,
        }
    }

    /// Build from a sign-change bracket, evaluating `p` at both endpoints.
    pub fn from_bracket(p: &Poly, lo: Rational, hi: Rational) -> Result<Self, PolyError> {
        if lo > hi {
            return Err(PolyError::EmptyInterval);
        }
        let sign_lo = p.sign_at(&lo);
        if sign_lo == 0 {
            return Ok(RootInterval::exact(lo));
        }
        let sign_hi = p.sign_at(&hi);
        if sign_hi == 0 {
            return Ok(RootInterval::exact(hi));
        }
        if sign_lo == sign_hi {
            return Err(PolyError::EmptyInterval);
        }
        Ok(RootInterval {
            lo,
            hi,
            sign_lo,
            sign_hi,
        })
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2))
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64().unwrap_or(f64::NAN)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// True when the two intervals cannot share a point.
    pub fn disjoint_from(&self, other: &RootInterval) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }

    pub fn entirely_below(&self, other: &RootInterval) -> bool {
        self.hi < other.lo
    }

    /// Bisect until the width is at most `width`. `p` must be the polynomial
    /// the interval was built from (or one with the same sign behavior on it).
    pub fn refine_to(&mut self, p: &Poly, width: &Rational) {
        while !self.is_exact() && &self.width() > width {
            let mid = self.mid();
            match p.sign_at(&mid) {
                0 => {
                    *self = RootInterval::exact(mid);
                    return;
                }
                s if s == self.sign_lo => self.lo = mid,
                _ => self.hi = mid,
            }
        }
    }
}

/// Sturm chain of the squarefree part of a polynomial, with integer
/// coefficients throughout so sign evaluations stay exact and cheap.
pub struct SturmChain {
    squarefree: Poly,
    chain: Vec<Vec<BigInt>>,
}

impl SturmChain {
    pub fn new(p: &Poly) -> Result<Self, PolyError> {
        if p.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let g = p.gcd(&p.derivative());
        let squarefree = match g.degree() {
            Some(0) | None => p.clone(),
            _ => p.divide_exact(&g)?,
        };
        let p0 = squarefree.clone().into_primitive_int();
        let p1 = squarefree.derivative().into_primitive_int();
        let mut chain = vec![p0];
        if !p1.is_empty() {
            chain.push(p1);
        }
        while chain.last().unwrap().len() > 1 {
            let n = chain.len();
            let mut rem = prem_signed(&chain[n - 2], &chain[n - 1]);
            if rem.is_empty() {
                break; // should not happen for squarefree input
            }
            for c in rem.iter_mut() {
                *c = -&*c;
            }
            chain.push(rem);
        }
        Ok(SturmChain { squarefree, chain })
    }

    /// The squarefree polynomial the chain was built from (same distinct
    /// roots as the original input).
    pub fn squarefree(&self) -> &Poly {
        &self.squarefree
    }

    /// Number of sign changes in the chain at `x`, zeros skipped.
    pub fn sign_variations_at(&self, x: &Rational) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for q in &self.chain {
            let s = sign_int_at(q, x);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Number of distinct real roots in the open interval `(lo, hi)`.
    /// Endpoints must not be roots.
    pub fn count_roots_in(&self, lo: &Rational, hi: &Rational) -> Result<usize, PolyError> {
        if lo >= hi {
            return Err(PolyError::EmptyInterval);
        }
        if self.squarefree.sign_at(lo) == 0 || self.squarefree.sign_at(hi) == 0 {
            return Err(PolyError::EndpointIsRoot);
        }
        Ok(self.sign_variations_at(lo) - self.sign_variations_at(hi))
    }

    /// Isolate every distinct real root in `(lo, hi)` into intervals
    /// containing one root each, returned in increasing order. Rational roots
    /// hit by a bisection point come back as exact point intervals. Adjacent
    /// intervals may share a (non-root) endpoint; refine before relying on
    /// strict disjointness.
    pub fn isolate(&self, lo: &Rational, hi: &Rational) -> Result<Vec<RootInterval>, PolyError> {
        let total = self.count_roots_in(lo, hi)?;
        let mut out = Vec::with_capacity(total);
        let two = Rational::from_integer(BigInt::from(2));
        let mut stack = vec![(lo.clone(), hi.clone(), total)];
        while let Some((a, b, count)) = stack.pop() {
            match count {
                0 => {}
                // one simple root strictly inside, non-root endpoints: the
                // squarefree polynomial must change sign across it
                1 => out.push(RootInterval::from_bracket(&self.squarefree, a, b)?),
                _ => {
                    let mid = (&a + &b) / &two;
                    if self.squarefree.sign_at(&mid) == 0 {
                        // bisection landed on a root: record it exactly and
                        // carve out a punctured neighborhood around it
                        let mut delta = (&b - &a) / Rational::from_integer(BigInt::from(4));
                        let (l, r) = loop {
                            let l = &mid - &delta;
                            let r = &mid + &delta;
                            if self.squarefree.sign_at(&l) != 0
                                && self.squarefree.sign_at(&r) != 0
                                && self.sign_variations_at(&l) - self.sign_variations_at(&r) == 1
                            {
                                break (l, r);
                            }
                            delta /= &two;
                        };
                        let left = self.sign_variations_at(&a) - self.sign_variations_at(&l);
                        let right = self.sign_variations_at(&r) - self.sign_variations_at(&b);
                        out.push(RootInterval::exact(mid));
                        stack.push((r, b, right));
                        stack.push((a, l, left));
                    } else {
                        let left = self.sign_variations_at(&a) - self.sign_variations_at(&mid);
                        stack.push((mid.clone(), b, count - left));
                        stack.push((a, mid, left));
                    }
                }
            }
        }
        out.sort_by(|x, y| x.lo().cmp(y.lo()));
        Ok(out)
    }
}

/// True when `p` has no repeated complex roots, i.e. gcd(p, p') is constant.
pub fn is_squarefree(p: &Poly) -> bool {
    if p.is_zero() {
        return false;
    }
    matches!(p.gcd(&p.derivative()).degree(), Some(0))
}

/// Exact range enclosure of `p` over `[lo, hi]` by interval Horner. The
/// returned rational bounds are outward-exact: `p(x)` lies inside them for
/// every `x` in the input interval.
pub fn eval_interval(p: &Poly, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
    assert!(lo <= hi, "eval_interval needs lo <= hi");
    let mut acc_lo = Rational::zero();
    let mut acc_hi = Rational::zero();
    for c in p.coeffs().iter().rev() {
        let candidates = [
            &acc_lo * lo,
            &acc_lo * hi,
            &acc_hi * lo,
            &acc_hi * hi,
        ];
        let mut new_lo = candidates[0].clone();
        let mut new_hi = candidates[0].clone();
        for v in &candidates[1..] {
            if v < &new_lo {
                new_lo = v.clone();
            }
            if v > &new_hi {
                new_hi = v.clone();
            }
        }
        acc_lo = new_lo + c;
        acc_hi = new_hi + c;
    }
    (acc_lo, acc_hi)
}

/// Rational enclosure `[lo, hi]` of `sqrt(x)` with `hi - lo <= max_width`,
/// `lo^2 <= x <= hi^2`, both bounds nonnegative.
pub fn sqrt_enclosure(x: &Rational, max_width: &Rational) -> Result<(Rational, Rational), PolyError> {
    if x.is_negative() {
        return Err(PolyError::NegativeSqrt);
    }
    if max_width <= &Rational::zero() {
        return Err(PolyError::ToleranceNotPositive);
    }
    if x.is_zero() {
        return Ok((Rational::zero(), Rational::zero()));
    }
    let n = x.numer().clone();
    let d = x.denom().clone();
    // sqrt(n/d) = sqrt(n*d)/d; scale by 4^s so the floor-sqrt grid is finer
    // than max_width: width is 1/(d * 2^s).
    let need = (max_width.denom() / (&d * max_width.numer())) + BigInt::one();
    let s = need.bits();
    let v = (&n * &d) << (2 * s as usize);
    let r = v.sqrt();
    let denom = Rational::from_integer(&d << (s as usize));
    let lo = Rational::from_integer(r.clone()) / denom.clone();
    let hi = Rational::from_integer(r + BigInt::one()) / denom;
    Ok((lo, hi))
}

/// Round an interval outward onto the dyadic grid `2^-bits`, bounding the
/// size of the rationals carried through long interval iterations.
pub fn round_out(lo: &Rational, hi: &Rational, bits: u32) -> (Rational, Rational) {
    let scale = BigInt::one() << bits as usize;
    let lo_floor = (lo.numer() * &scale).div_floor(lo.denom());
    let hi_ceil = (hi.numer() * &scale).div_ceil(hi.denom());
    (
        Rational::new(lo_floor, scale.clone()),
        Rational::new(hi_ceil, scale),
    )
}

fn sign_int_at(coeffs: &[BigInt], x: &Rational) -> i8 {
    // sign of sum c_i * a^i * b^(d-i) for x = a/b with b > 0
    let a = x.numer();
    let b = x.denom();
    let mut acc = BigInt::zero();
    let mut bpow = BigInt::one();
    // Horner from the top degree down; multiply by b as we descend so every
    // term carries b^(d-i).
    for c in coeffs.iter().rev() {
        acc = acc * a + c * &bpow;
        bpow *= b;
    }
    // the loop applies one extra b-power uniformly; sign is unaffected
    match acc.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

/// Sign-faithful pseudo-remainder of integer polynomials with the content
/// stripped: a positive multiple of the rational remainder of `a / b`.
fn prem_signed(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lead_abs = b.last().unwrap().abs();
    let lead_neg = b.last().unwrap().is_negative();
    let mut rem: Vec<BigInt> = a.to_vec();
    while rem.len() > db {
        let k = rem.len() - 1 - db;
        let top = rem.last().unwrap().clone();
        let factor = if lead_neg { -top } else { top };
        for c in rem.iter_mut() {
            *c = &*c * &lead_abs;
        }
        for i in 0..=db {
            let t = &b[i] * &factor;
            rem[k + i] -= t;
        }
        while rem.last().is_some_and(|c| c.is_zero()) {
            rem.pop();
        }
    }
    let mut content = BigInt::zero();
    for c in &rem {
        content = num_integer::gcd(content, c.clone());
    }
    if !content.is_zero() && !content.is_one() {
        for c in rem.iter_mut() {
            *c = &*c / &content;
        }
    }
    rem
}
