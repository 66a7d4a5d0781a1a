use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::PolyError;

pub type Rational = BigRational;

/// Rational from an integer numerator and denominator. Panics on zero denominator.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Nearest float64 to an exact rational (NaN only if the value overflows).
pub fn rat_to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Dense univariate polynomial with exact rational coefficients.
///
/// Coefficients are stored in ascending degree order and the representation is
/// canonical: the leading coefficient is nonzero, and the zero polynomial is
/// the empty vector. Equality is therefore structural.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly::new(vec![Rational::zero(), Rational::one()])
    }

    /// Polynomial with the given integer coefficients, ascending by degree.
    pub fn from_integers(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Exact evaluation by Horner's rule.
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Floating-point evaluation. Coefficients are converted individually, so
    /// this is only meaningful while they fit comfortably in f64 range.
    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    /// Sign of `p(x)`: -1, 0 or +1, computed exactly.
    ///
    /// Denominators are cleared up front and the Horner pass runs over plain
    /// integers: sign p(a/b) = sign Σ (L·cᵢ)·aⁱ·b^(d−i) for any positive L.
    /// Skipping per-step rational normalization is what keeps bisection usable
    /// once the query points carry hundreds of bits.
    pub fn sign_at(&self, x: &Rational) -> i8 {
        if self.coeffs.is_empty() {
            return 0;
        }
        let mut lcm_den = BigInt::one();
        for c in &self.coeffs {
            lcm_den = num_integer::lcm(lcm_den, c.denom().clone());
        }
        let a = x.numer();
        let b = x.denom();
        let mut acc = BigInt::zero();
        let mut pow_b = BigInt::one();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            let ci = c.numer() * (&lcm_den / c.denom());
            acc = acc * a + ci * &pow_b;
            if i > 0 {
                pow_b *= b;
            }
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    /// Composition `self(inner(x))` by Horner's rule on polynomials.
    pub fn compose(&self, inner: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Poly::constant(c.clone());
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * rat_int(i as i64 + 1))
                .collect(),
        )
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly), PolyError> {
        if divisor.is_zero() {
            return Err(PolyError::ZeroDivisor);
        }
        let dd = divisor.degree().unwrap();
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() / &lead;
            for i in 0..dd {
                let t = &divisor.coeffs[i] * &factor;
                rem[k + i] -= t;
            }
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
            quot[k] = factor;
        }
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Division that must leave no remainder.
    pub fn divide_exact(&self, divisor: &Poly) -> Result<Poly, PolyError> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(PolyError::NotExact {
                remainder_degree: r.degree().unwrap(),
            })
        }
    }

    /// Monic greatest common divisor (1 for coprime inputs).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone().into_primitive_int();
        let mut b = other.clone().into_primitive_int();
        if a.is_empty() {
            return Poly::from_int_vec(&b).into_monic();
        }
        while !b.is_empty() {
            let r = prem_primitive(&a, &b);
            a = b;
            b = r;
        }
        Poly::from_int_vec(&a).into_monic()
    }

    fn into_monic(self) -> Poly {
        match self.leading() {
            None => self,
            Some(l) => {
                let inv = Rational::one() / l;
                self.scale(&inv)
            }
        }
    }

    /// Integer coefficient vector after clearing denominators and dividing by
    /// the content; preserves the sign of every coefficient.
    pub(crate) fn into_primitive_int(self) -> Vec<BigInt> {
        if self.coeffs.is_empty() {
            return Vec::new();
        }
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = num_integer::lcm(den, c.denom().clone());
        }
        let mut ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let mut content = BigInt::zero();
        for c in &ints {
            content = num_integer::gcd(content, c.clone());
        }
        if !content.is_zero() && !content.is_one() {
            for c in &mut ints {
                *c = &*c / &content;
            }
        }
        ints
    }

    pub(crate) fn from_int_vec(ints: &[BigInt]) -> Poly {
        Poly::new(
            ints.iter()
                .map(|c| Rational::from_integer(c.clone()))
                .collect(),
        )
    }

    /// Text dump: a header line followed by one `degree numerator/denominator`
    /// line per coefficient, ascending.
    pub fn dump(&self, name: &str) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let deg = self
            .degree()
            .map_or("-1".to_string(), |d| d.to_string());
        writeln!(out, "# poly={} degree={}", name, deg).unwrap();
        for (i, c) in self.coeffs.iter().enumerate() {
            writeln!(out, "{} {}/{}", i, c.numer(), c.denom()).unwrap();
        }
        out
    }
}

/// Pseudo-remainder of primitive integer polynomials, sign-faithful and
/// content-stripped: scales `a` by a *positive* power of `|lead(b)|` before
/// dividing so the remainder keeps the sign the rational remainder would have.
fn prem_primitive(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lead = b.last().unwrap().abs();
    let mut rem: Vec<BigInt> = a.to_vec();
    while rem.len() > db {
        let k = rem.len() - 1 - db;
        let top = rem.last().unwrap().clone();
        // rem := |lb| * rem - sign-adjusted top * b * x^k
        let factor = if b.last().unwrap().is_negative() {
            -&top
        } else {
            top
        };
        for c in rem.iter_mut() {
            *c = &*c * &lead;
        }
        for i in 0..=db {
            let t = &b[i] * &factor;
            rem[k + i] -= t;
        }
        while rem.last().is_some_and(|c| c.is_zero()) {
            rem.pop();
        }
    }
    // strip content (positive), keeping signs
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

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + rhs.coeff(i));
        }
        Poly::new(out)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - rhs.coeff(i));
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "{}*x", c)?,
                _ => write!(f, "{}*x^{}", c, i)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_trims_leading_zeros() {
        let p = Poly::new(vec![rat_int(1), rat_int(0), rat_int(0)]);
        assert_eq!(p.degree(), Some(0));
        assert!(Poly::from_integers(&[0, 0]).is_zero());
        assert_eq!(Poly::zero().degree(), None);
    }

    #[test]
    fn division_reports_nonzero_remainder() {
        let p = Poly::from_integers(&[1, 0, 1]); // x^2 + 1
        let d = Poly::from_integers(&[-1, 1]); // x - 1
        let err = p.divide_exact(&d).unwrap_err();
        assert_eq!(err, PolyError::NotExact { remainder_degree: 0 });
        let (q, r) = p.div_rem(&d).unwrap();
        assert_eq!(q, Poly::from_integers(&[1, 1]));
        assert_eq!(r, Poly::from_integers(&[2]));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let p = Poly::x();
        assert_eq!(p.div_rem(&Poly::zero()).unwrap_err(), PolyError::ZeroDivisor);
    }

    #[test]
    fn compose_matches_nested_evaluation() {
        // Oracle: evaluate the composition numerically at a few points.
        let f = Poly::from_integers(&[0, 5, -1]); // x(5 - x)
        let g = Poly::from_integers(&[26, -35, 11, -1]);
        let comp = g.compose(&f);
        for k in -3..=9 {
            let x = rat(k, 2);
            assert_eq!(comp.eval(&x), g.eval(&f.eval(&x)));
        }
    }

    #[test]
    fn gcd_of_shared_factor() {
        let a = Poly::from_integers(&[-2, 1]); // x - 2
        let b = Poly::from_integers(&[-3, 1]);
        let p = &a * &b;
        let q = &a * &Poly::from_integers(&[7, 1]);
        assert_eq!(p.gcd(&q), a); // monic, so exactly x - 2
        assert_eq!(p.gcd(&Poly::from_integers(&[1, 0, 1])), Poly::one());
    }

    #[test]
    fn derivative_basics() {
        let p = Poly::from_integers(&[5, 3, 0, 2]); // 2x^3 + 3x + 5
        assert_eq!(p.derivative(), Poly::from_integers(&[3, 0, 6]));
        assert_eq!(Poly::constant(rat_int(4)).derivative(), Poly::zero());
    }

    #[test]
    fn dump_format_is_one_line_per_coefficient() {
        let p = Poly::new(vec![rat(1, 2), rat_int(-3)]);
        let dump = p.dump("demo");
        assert_eq!(dump, "# poly=demo degree=1\n0 1/2\n1 -3/1\n");
    }
}
