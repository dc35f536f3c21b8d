use std::fmt;

use num_traits::Zero;

use crate::rational::{format_rational, int, Rational};

use super::poly::PiecewisePoly;

/// A finite union of closed subintervals of `[0, 1]`, compared modulo null
/// sets: sorted, nondegenerate, and with touching intervals merged.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct IntervalRegion {
    intervals: Vec<(Rational, Rational)>,
}

impl IntervalRegion {
    pub fn new(mut intervals: Vec<(Rational, Rational)>) -> Self {
        intervals.retain(|(a, b)| a < b);
        intervals.sort();
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match out.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => out.push((a, b)),
            }
        }
        IntervalRegion { intervals: out }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        Self::new(vec![(int(0), int(1))])
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn is_null(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> Rational {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::new(self.intervals.iter().chain(&other.intervals).cloned().collect())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for (a, b) in &self.intervals {
            for (c, d) in &other.intervals {
                let lo = a.max(c);
                let hi = b.min(d);
                if lo < hi {
                    out.push((lo.clone(), hi.clone()));
                }
            }
        }
        Self::new(out)
    }

    /// `[0, 1]` minus the region.
    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        let mut cursor = int(0);
        for (a, b) in &self.intervals {
            if cursor < *a {
                out.push((cursor.clone(), a.clone()));
            }
            cursor = b.clone();
        }
        if cursor < int(1) {
            out.push((cursor, int(1)));
        }
        Self::new(out)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersection(&other.complement())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_null()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_null()
    }

    pub fn contains_interval(&self, a: &Rational, b: &Rational) -> bool {
        self.intervals.iter().any(|(c, d)| c <= a && b <= d)
    }

    /// Endpoints including 0 and 1.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut out = vec![int(0), int(1)];
        for (a, b) in &self.intervals {
            out.push(a.clone());
            out.push(b.clone());
        }
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Display for IntervalRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str("∅");
        }
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|(a, b)| format!("[{},{}]", format_rational(a), format_rational(b)))
            .collect();
        f.write_str(&parts.join(" ∪ "))
    }
}

/// Union of the closures of the pieces where `f` is not the zero polynomial.
pub fn pp_support(f: &PiecewisePoly) -> IntervalRegion {
    IntervalRegion::new(
        f.pieces()
            .iter()
            .filter(|p| p.coeffs.iter().any(|c| !c.is_zero()))
            .map(|p| (p.from.clone(), p.to.clone()))
            .collect(),
    )
}

pub fn pp_disjoint(f: &PiecewisePoly, g: &PiecewisePoly) -> bool {
    pp_support(f).is_disjoint(&pp_support(g))
}

/// `f ◁ g`: the support of `f` lies in that of `g` up to a null set.
pub fn pp_band_contains(g: &PiecewisePoly, f: &PiecewisePoly) -> bool {
    pp_support(f).is_subset(&pp_support(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::poly::{integrate, tests::arb_pp};
    use crate::rational::frac;
    use proptest::prelude::*;

    fn half() -> Rational {
        frac(1, 2)
    }

    fn phi2() -> PiecewisePoly {
        PiecewisePoly::poly_on(&int(0), &half(), vec![int(0), int(1)]).unwrap()
    }

    #[test]
    fn support_examples() {
        assert_eq!(pp_support(&phi2()), IntervalRegion::new(vec![(int(0), half())]));
        assert_eq!(pp_support(&PiecewisePoly::constant(int(1))), IntervalRegion::full());
        assert!(pp_support(&PiecewisePoly::zero()).is_null());
    }

    #[test]
    fn disjoint_examples() {
        let right = PiecewisePoly::indicator(&half(), &int(1)).unwrap();
        assert!(pp_disjoint(&phi2(), &right));
        assert!(!pp_disjoint(&phi2(), &PiecewisePoly::constant(int(1))));
        assert!(pp_disjoint(&PiecewisePoly::zero(), &right));
    }

    #[test]
    fn band_examples() {
        let chi = PiecewisePoly::indicator(&int(0), &half()).unwrap();
        assert!(pp_band_contains(&chi, &phi2()));
        assert!(!pp_band_contains(&phi2(), &PiecewisePoly::constant(int(1))));
        assert!(pp_band_contains(&PiecewisePoly::zero(), &PiecewisePoly::zero()));
    }

    #[test]
    fn region_algebra() {
        let a = IntervalRegion::new(vec![(int(0), half()), (half(), frac(3, 4))]);
        assert_eq!(a, IntervalRegion::new(vec![(int(0), frac(3, 4))]));
        assert_eq!(a.complement(), IntervalRegion::new(vec![(frac(3, 4), int(1))]));
        assert_eq!(a.complement().complement(), a);
        assert_eq!(a.to_string(), "[0,3/4]");
        assert_eq!(IntervalRegion::empty().to_string(), "∅");
        assert!(IntervalRegion::new(vec![(int(0), half())]).is_disjoint(&IntervalRegion::new(vec![(half(), int(1))])));
        assert_eq!(a.measure(), frac(3, 4));
    }

    proptest! {
        #[test]
        fn disjoint_functions_integrate_to_zero(w in arb_pp(), f in arb_pp()) {
            if pp_disjoint(&w, &f) {
                prop_assert_eq!(integrate(&w, &f), int(0));
            }
        }

        #[test]
        fn support_of_sum_is_in_union(f in arb_pp(), g in arb_pp()) {
            let s = pp_support(&f.add(&g).unwrap());
            prop_assert!(s.is_subset(&pp_support(&f).union(&pp_support(&g))));
        }
    }
}
