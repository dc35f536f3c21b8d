//! Weighted p-norms, their duals, and exact-or-certified norm values.

use std::cmp::Ordering;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{AtomicSpace, Exponent, Vector};
use crate::rational::{
    format_rational, int, max_enclosure_width, pow_enclosure, pow_u32, root_enclosure, Enclosure, Rational,
};

/// A non-negative real number known either exactly, exactly through its
/// square, or through a certified rational enclosure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactOrBounded {
    Exact(Rational),
    /// The value is the square root of the stored rational.
    Square(Rational),
    Bounded(Enclosure),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Primal,
    Dual,
}

impl ExactOrBounded {
    pub fn enclosure(&self, bits: u32) -> Enclosure {
        match self {
            ExactOrBounded::Exact(q) => Enclosure::point(q.clone()),
            ExactOrBounded::Square(s) => root_enclosure(s, 2, bits),
            ExactOrBounded::Bounded(e) => e.clone(),
        }
    }

    /// The exact square of the value, when known.
    pub fn exact_square(&self) -> Option<Rational> {
        match self {
            ExactOrBounded::Exact(q) => Some(q * q),
            ExactOrBounded::Square(s) => Some(s.clone()),
            ExactOrBounded::Bounded(e) if e.is_point() => Some(&e.lo * &e.lo),
            ExactOrBounded::Bounded(_) => None,
        }
    }

    /// Collapses a square with a rational root, or a point enclosure, to
    /// `Exact`.
    pub fn simplify(self) -> Self {
        match self {
            ExactOrBounded::Square(s) => match crate::rational::exact_root(&s, 2) {
                Some(r) => ExactOrBounded::Exact(r),
                None => ExactOrBounded::Square(s),
            },
            ExactOrBounded::Bounded(e) if e.is_point() => ExactOrBounded::Exact(e.lo),
            other => other,
        }
    }

    pub fn cmp_rational(&self, q: &Rational) -> Result<Ordering> {
        match self {
            ExactOrBounded::Exact(x) => Ok(x.cmp(q)),
            ExactOrBounded::Square(s) => {
                if q.is_negative() {
                    Ok(Ordering::Greater)
                } else {
                    Ok(s.cmp(&(q * q)))
                }
            }
            ExactOrBounded::Bounded(e) => {
                if &e.hi < q {
                    Ok(Ordering::Less)
                } else if &e.lo > q {
                    Ok(Ordering::Greater)
                } else if e.is_point() {
                    Ok(Ordering::Equal)
                } else {
                    Err(Error::Indeterminate(format!(
                        "value in [{}, {}] cannot be compared with {}",
                        format_rational(&e.lo),
                        format_rational(&e.hi),
                        format_rational(q)
                    )))
                }
            }
        }
    }

    pub fn compare(&self, other: &ExactOrBounded) -> Result<Ordering> {
        if let (Some(a), Some(b)) = (self.exact_square(), other.exact_square()) {
            return Ok(a.cmp(&b));
        }
        let (a, b) = (self.enclosure(128), other.enclosure(128));
        if a.hi < b.lo {
            Ok(Ordering::Less)
        } else if a.lo > b.hi {
            Ok(Ordering::Greater)
        } else {
            Err(Error::Indeterminate("overlapping enclosures".into()))
        }
    }

    pub fn is_one(&self) -> Result<bool> {
        Ok(self.cmp_rational(&int(1))? == Ordering::Equal)
    }

    pub fn mul(&self, other: &ExactOrBounded) -> ExactOrBounded {
        use ExactOrBounded::*;
        match (self, other) {
            (Exact(a), Exact(b)) => Exact(a * b),
            (Square(a), Square(b)) => Square(a * b),
            (Exact(a), Square(s)) | (Square(s), Exact(a)) => Square(a * a * s),
            _ => Bounded(self.enclosure(128).mul_nonneg(&other.enclosure(128))),
        }
    }

    /// Larger of two values; errors when the order cannot be certified.
    pub fn max(self, other: ExactOrBounded) -> Result<ExactOrBounded> {
        match self.compare(&other) {
            Ok(Ordering::Less) => Ok(other),
            Ok(_) => Ok(self),
            Err(_) => {
                let (a, b) = (self.enclosure(128), other.enclosure(128));
                Ok(ExactOrBounded::Bounded(Enclosure {
                    lo: a.lo.max(b.lo),
                    hi: a.hi.max(b.hi),
                }))
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ExactOrBounded::Exact(q) => format_rational(q),
            ExactOrBounded::Square(s) => format!("sqrt({})", format_rational(s)),
            ExactOrBounded::Bounded(e) => {
                format!("[{}, {}]", format_rational(&e.lo), format_rational(&e.hi))
            }
        }
    }
}

/// `p = a/b` in lowest terms.
fn ratio_parts(p: &Rational) -> (u32, u32) {
    let a = p.numer().to_u32().expect("exponent numerator fits u32");
    let b = p.denom().to_u32().expect("exponent denominator fits u32");
    (a, b)
}

/// `(sum_i r_i^(1/k))^(m/l)` with certified width at most `10^-30`.
fn root_sum_power(terms: &[Rational], k: u32, m: u32, l: u32) -> Result<ExactOrBounded> {
    let g = m.gcd(&l);
    let (m, l) = (m / g, l / g);
    let limit = max_enclosure_width();
    let mut bits = 128;
    loop {
        let mut sum = Enclosure::point(Rational::zero());
        for r in terms.iter().filter(|r| !r.is_zero()) {
            sum = sum.add(&root_enclosure(r, k, bits));
        }
        let value = pow_enclosure(&sum, m, l, bits);
        if value.is_point() {
            return Ok(ExactOrBounded::Exact(value.lo));
        }
        if value.width() <= limit {
            return Ok(ExactOrBounded::Bounded(value));
        }
        if bits >= 4096 {
            return Err(Error::Indeterminate("norm enclosure did not converge".into()));
        }
        bits *= 2;
    }
}

/// Norm of `v` in the space (`Primal`) or of `v` viewed as a functional
/// `x -> sum v_i x_i` (`Dual`).
pub fn norm_value(space: &AtomicSpace, v: &Vector, side: Side) -> Result<ExactOrBounded> {
    space.check_dim(v)?;
    let w = space.weights();
    let exact = match (space.exponent(), side) {
        (Exponent::One, Side::Primal) => Some(ExactOrBounded::Exact(v.iter().zip(w).map(|(x, w)| x.abs() * w).sum())),
        (Exponent::Infinity, Side::Primal) => Some(ExactOrBounded::Exact(
            v.iter()
                .zip(w)
                .map(|(x, w)| x.abs() * w)
                .max()
                .unwrap_or_else(Rational::zero),
        )),
        // dual of the weighted 1-norm is the sup norm with reciprocal weights
        (Exponent::One, Side::Dual) => Some(ExactOrBounded::Exact(
            v.iter()
                .zip(w)
                .map(|(x, w)| x.abs() / w)
                .max()
                .unwrap_or_else(Rational::zero),
        )),
        (Exponent::Infinity, Side::Dual) => {
            Some(ExactOrBounded::Exact(v.iter().zip(w).map(|(x, w)| x.abs() / w).sum()))
        }
        (Exponent::Two, Side::Primal) => Some(ExactOrBounded::Square(v.iter().zip(w).map(|(x, w)| x * x * w).sum())),
        (Exponent::Two, Side::Dual) => Some(ExactOrBounded::Square(v.iter().zip(w).map(|(x, w)| x * x / w).sum())),
        _ => None,
    };
    if let Some(value) = exact {
        return Ok(value);
    }
    let Exponent::General(p) = space.exponent() else {
        unreachable!()
    };
    let (a, b) = ratio_parts(p);
    match side {
        // (sum (w_i^b |x_i|^a)^(1/b))^(b/a)
        Side::Primal => {
            let terms: Vec<Rational> = v
                .iter()
                .zip(w)
                .map(|(x, w)| pow_u32(w, b) * pow_u32(&x.abs(), a))
                .collect();
            root_sum_power(&terms, b, b, a)
        }
        // q = a/(a-b), dual weights w_i^(1-q):
        // (sum (|y_i|^a / w_i^b)^(1/(a-b)))^((a-b)/a)
        Side::Dual => {
            let terms: Vec<Rational> = v
                .iter()
                .zip(w)
                .map(|(y, w)| pow_u32(&y.abs(), a) / pow_u32(w, b))
                .collect();
            root_sum_power(&terms, a - b, a - b, a)
        }
    }
}

/// Strict monotonicity of the norm: `||x + y|| > ||x||` for all `x, y > 0`.
/// Fails exactly for the sup norm on two or more atoms; the witness is a
/// pair of positive vectors with `||x + y|| = ||x||`.
pub fn is_strictly_monotone(space: &AtomicSpace) -> (bool, Option<(Vector, Vector)>) {
    if space.exponent().is_finite() || space.dim() == 1 {
        return (true, None);
    }
    let n = space.dim();
    let w = space.weights();
    let x = Vector::basis(n, 0).scale(&w[0].recip());
    let y = Vector::basis(n, 1).scale(&w[1].recip());
    (false, Some((x, y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use proptest::prelude::*;

    fn unit(n: usize, p: Exponent) -> AtomicSpace {
        AtomicSpace::unweighted(n, p)
    }

    #[test]
    fn spec_norm_examples() {
        let v = Vector::from_ints(&[3, 4]);
        let n2 = norm_value(&unit(2, Exponent::Two), &v, Side::Primal).unwrap();
        assert_eq!(n2, ExactOrBounded::Square(int(25)));
        assert!(n2.cmp_rational(&int(5)).unwrap().is_eq());

        let psi = Vector(vec![int(1), frac(1, 2)]);
        let d = norm_value(&unit(2, Exponent::One), &psi, Side::Dual).unwrap();
        assert_eq!(d, ExactOrBounded::Exact(int(1)));

        let v = Vector::from_ints(&[2, -3]);
        let ni = norm_value(&unit(2, Exponent::Infinity), &v, Side::Primal).unwrap();
        assert_eq!(ni, ExactOrBounded::Exact(int(3)));
    }

    #[test]
    fn weighted_duals() {
        let s = AtomicSpace::new(Exponent::Two, vec![int(1), int(4)]).unwrap();
        let v = Vector::from_ints(&[1, 2]);
        assert_eq!(
            norm_value(&s, &v, Side::Primal).unwrap(),
            ExactOrBounded::Square(int(17))
        );
        assert_eq!(norm_value(&s, &v, Side::Dual).unwrap(), ExactOrBounded::Square(int(2)));
        let s = AtomicSpace::new(Exponent::Infinity, vec![int(2), int(1)]).unwrap();
        assert_eq!(
            norm_value(&s, &v, Side::Dual).unwrap(),
            ExactOrBounded::Exact(frac(5, 2))
        );
    }

    #[test]
    fn general_exponent_enclosures() {
        // p = 3, x = (1, 1): 2^(1/3)
        let s = unit(2, Exponent::General(int(3)));
        let v = Vector::from_ints(&[1, 1]);
        let ExactOrBounded::Bounded(e) = norm_value(&s, &v, Side::Primal).unwrap() else {
            panic!("expected an enclosure")
        };
        assert!(pow_u32(&e.lo, 3) < int(2) && pow_u32(&e.hi, 3) > int(2));
        assert!(e.width() <= max_enclosure_width());
        // exact when the root is rational: p = 3, (2) -> 2
        let s1 = unit(1, Exponent::General(int(3)));
        assert_eq!(
            norm_value(&s1, &Vector::from_ints(&[2]), Side::Primal).unwrap(),
            ExactOrBounded::Exact(int(2))
        );
        // dual of p = 3 is q = 3/2: (1, 1) -> 2^(2/3)
        let ExactOrBounded::Bounded(d) = norm_value(&s, &v, Side::Dual).unwrap() else {
            panic!("expected an enclosure")
        };
        assert!(pow_u32(&d.lo, 3) < int(4) && pow_u32(&d.hi, 3) > int(4));
        // comparisons refuse to guess inside the enclosure
        let mid = (&e.lo + &e.hi) / int(2);
        assert!(matches!(
            ExactOrBounded::Bounded(e.clone()).cmp_rational(&mid),
            Err(Error::Indeterminate(_))
        ));
    }

    #[test]
    fn strict_monotonicity() {
        assert!(is_strictly_monotone(&unit(2, Exponent::One)).0);
        let s = AtomicSpace::new(Exponent::Two, vec![int(1), int(3)]).unwrap();
        assert!(is_strictly_monotone(&s).0);
        let (ok, wit) = is_strictly_monotone(&unit(2, Exponent::Infinity));
        assert!(!ok);
        let (x, y) = wit.unwrap();
        assert_eq!(x, Vector::from_ints(&[1, 0]));
        assert_eq!(y, Vector::from_ints(&[0, 1]));
        let sp = unit(2, Exponent::Infinity);
        assert_eq!(
            norm_value(&sp, &x.add(&y), Side::Primal).unwrap(),
            norm_value(&sp, &x, Side::Primal).unwrap()
        );
        // one atom: sup norm is strictly monotone
        assert!(is_strictly_monotone(&unit(1, Exponent::Infinity)).0);
    }

    fn rat() -> impl Strategy<Value = Rational> {
        (-9i64..=9, 1i64..=9).prop_map(|(n, d)| frac(n, d))
    }

    fn pos_rat() -> impl Strategy<Value = Rational> {
        (1i64..=9, 1i64..=9).prop_map(|(n, d)| frac(n, d))
    }

    fn exponent() -> impl Strategy<Value = Exponent> {
        prop_oneof![Just(Exponent::One), Just(Exponent::Two), Just(Exponent::Infinity)]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn homogeneous_and_lattice_norm(
            p in exponent(),
            xs in proptest::collection::vec(rat(), 4),
            ws in proptest::collection::vec(pos_rat(), 4),
            c in rat(),
        ) {
            let s = AtomicSpace::new(p, ws).unwrap();
            let v = Vector(xs);
            for side in [Side::Primal, Side::Dual] {
                let n = norm_value(&s, &v, side).unwrap();
                prop_assert_eq!(&n, &norm_value(&s, &v.abs(), side).unwrap());
                let scaled = norm_value(&s, &v.scale(&c), side).unwrap();
                let expected = n.mul(&ExactOrBounded::Exact(c.abs()));
                prop_assert!(scaled.compare(&expected).unwrap().is_eq());
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn strictly_monotone_on_positive_pairs(
            two in any::<bool>(),
            xs in proptest::collection::vec(pos_rat(), 3),
            ys in proptest::collection::vec(pos_rat(), 3),
            mask in 1u8..8,
        ) {
            let p = if two { Exponent::Two } else { Exponent::One };
            let s = AtomicSpace::unweighted(3, p);
            let x = Vector(xs);
            // y > 0 need not share the support of x
            let y = Vector(ys.iter().enumerate()
                .map(|(i, v)| if mask >> i & 1 == 1 { v.clone() } else { Rational::zero() })
                .collect());
            let lhs = norm_value(&s, &x.add(&y), Side::Primal).unwrap();
            let rhs = norm_value(&s, &x, Side::Primal).unwrap();
            prop_assert!(lhs.compare(&rhs).unwrap().is_gt());
        }
    }
}
