//! Exact scalars and the small amount of real-number machinery needed on top
//! of them (certified root enclosures for non-rational norm values).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"`, `"-p"` or `"p/q"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = |reason: &str| Error::MalformedRational {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let t = text.trim();
    if t.is_empty() {
        return Err(bad("empty"));
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad("numerator is not an integer"))?;
    let den: BigInt = den.parse().map_err(|_| bad("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn pow_u32(q: &Rational, e: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= q;
    }
    acc
}

fn exact_integer_root(n: &BigInt, k: u32) -> Option<BigInt> {
    let r = n.nth_root(k);
    if num_traits::pow::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

/// Exact `k`-th root of a non-negative rational, when it is rational.
pub fn exact_root(q: &Rational, k: u32) -> Option<Rational> {
    debug_assert!(!q.is_negative());
    if k == 1 {
        return Some(q.clone());
    }
    let n = exact_integer_root(q.numer(), k)?;
    let d = exact_integer_root(q.denom(), k)?;
    Some(Rational::new(n, d))
}

/// Closed rational interval `[lo, hi]` enclosing a real number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
}

impl Enclosure {
    pub fn point(q: Rational) -> Self {
        Enclosure { lo: q.clone(), hi: q }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    /// Product of two enclosures of non-negative numbers.
    pub fn mul_nonneg(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo * &other.lo,
            hi: &self.hi * &other.hi,
        }
    }
}

/// Enclosure of `q^(1/k)` for `q >= 0` with width at most `2^-bits`.
/// Exact roots come back as point enclosures.
pub fn root_enclosure(q: &Rational, k: u32, bits: u32) -> Enclosure {
    assert!(!q.is_negative(), "root of a negative rational");
    if let Some(r) = exact_root(q, k) {
        return Enclosure::point(r);
    }
    let scale = BigInt::one() << (bits as usize);
    let scaled = q * Rational::from_integer(num_traits::pow::pow(scale.clone(), k as usize));
    let n = scaled.floor().to_integer();
    let m = n.nth_root(k);
    Enclosure {
        lo: Rational::new(m.clone(), scale.clone()),
        hi: Rational::new(m + 1, scale),
    }
}

/// Enclosure of `x^(num/den)` for every `x` in a non-negative enclosure.
pub fn pow_enclosure(x: &Enclosure, num: u32, den: u32, bits: u32) -> Enclosure {
    let lo = root_enclosure(&pow_u32(&x.lo, num), den, bits).lo;
    let hi = root_enclosure(&pow_u32(&x.hi, num), den, bits).hi;
    Enclosure { lo, hi }
}

/// `10^-30`, the widest enclosure a norm evaluation may report.
pub fn max_enclosure_width() -> Rational {
    Rational::new(BigInt::one(), num_traits::pow::pow(BigInt::from(10), 30))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/4").unwrap(), frac(3, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational(" 3 / -9 ").unwrap(), frac(-1, 3));
        assert_eq!(format_rational(&frac(-2, 4)), "-1/2");
        assert_eq!(format_rational(&int(5)), "5");
        assert_eq!(format_rational(&int(0)), "0");
    }

    #[test]
    fn parse_rejects_zero_denominator() {
        let err = parse_rational("1/0").unwrap_err();
        assert!(matches!(err, Error::MalformedRational { .. }));
        assert!(parse_rational("").is_err());
        assert!(parse_rational("a/2").is_err());
        assert!(parse_rational("1.5").is_err());
    }

    #[test]
    fn exact_roots() {
        assert_eq!(exact_root(&frac(9, 4), 2), Some(frac(3, 2)));
        assert_eq!(exact_root(&frac(2, 1), 2), None);
        assert_eq!(exact_root(&frac(8, 27), 3), Some(frac(2, 3)));
    }

    #[test]
    fn root_enclosure_brackets_sqrt2() {
        let e = root_enclosure(&int(2), 2, 120);
        assert!(&e.lo * &e.lo < int(2));
        assert!(&e.hi * &e.hi > int(2));
        assert!(e.width() <= max_enclosure_width());
    }

    #[test]
    fn pow_enclosure_brackets() {
        // 2^(3/2) = 2.828...
        let e = pow_enclosure(&Enclosure::point(int(2)), 3, 2, 100);
        assert!(pow_u32(&e.lo, 2) < int(8));
        assert!(pow_u32(&e.hi, 2) > int(8));
    }
}
