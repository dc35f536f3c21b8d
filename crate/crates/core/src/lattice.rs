//! The finite purely atomic lattice: vectors over `n` atoms, their supports,
//! and the disjointness / band relations between them.
//!
//! Atoms are 1-indexed wherever they are shown to a user (`SupportSet`'s
//! `Display`, `from_atoms`, file formats). Internally coordinates are plain
//! 0-based slice indices.

use std::fmt;
use std::ops::{Deref, DerefMut};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// Hard ceiling imposed by the bitset representation.
pub const MAX_ATOMS: usize = 64;

/// A subset of `{1, ..., n}` stored as a bitmask (bit `i` is atom `i + 1`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SupportSet(u64);

impl SupportSet {
    pub const EMPTY: SupportSet = SupportSet(0);

    pub fn from_bits(bits: u64) -> Self {
        SupportSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// All of `{1, ..., n}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            SupportSet(u64::MAX)
        } else {
            SupportSet((1u64 << n) - 1)
        }
    }

    /// Builds a set from 1-based atom labels.
    pub fn from_atoms(atoms: &[usize]) -> Self {
        SupportSet(atoms.iter().fold(0, |acc, &a| {
            assert!((1..=MAX_ATOMS).contains(&a), "atom {a} out of range");
            acc | 1 << (a - 1)
        }))
    }

    pub fn singleton_index(i: usize) -> Self {
        SupportSet(1 << i)
    }

    pub fn contains_index(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert_index(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Self) -> Self {
        SupportSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        SupportSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        SupportSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// 0-based indices in ascending order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..64).filter(move |i| bits >> i & 1 == 1)
    }

    /// 1-based atom labels in ascending order.
    pub fn atoms(self) -> Vec<usize> {
        self.indices().map(|i| i + 1).collect()
    }

    /// Smallest 0-based index, if any.
    pub fn first_index(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms: Vec<String> = self.atoms().iter().map(usize::to_string).collect();
        write!(f, "{{{}}}", atoms.join(","))
    }
}

impl fmt::Debug for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Exponent of a weighted p-norm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exponent {
    One,
    Two,
    Infinity,
    /// Rational `p > 1`, `p != 2`.
    General(Rational),
}

impl Exponent {
    pub fn from_rational(p: Rational) -> Result<Self> {
        if p < int(1) {
            return Err(Error::InvalidNorm(format!("exponent {p} is below 1")));
        }
        Ok(if p == int(1) {
            Exponent::One
        } else if p == int(2) {
            Exponent::Two
        } else {
            Exponent::General(p)
        })
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Exponent::Infinity)
    }

    /// Conjugate exponent `q` with `1/p + 1/q = 1`.
    pub fn conjugate(&self) -> Exponent {
        match self {
            Exponent::One => Exponent::Infinity,
            Exponent::Infinity => Exponent::One,
            Exponent::Two => Exponent::Two,
            Exponent::General(p) => {
                let q = p / (p - int(1));
                Exponent::from_rational(q).expect("conjugate of p > 1 is > 1")
            }
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::One => write!(f, "1"),
            Exponent::Two => write!(f, "2"),
            Exponent::Infinity => write!(f, "inf"),
            Exponent::General(p) => write!(f, "{}", crate::rational::format_rational(p)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormSpec {
    pub p: Exponent,
    pub weights: Vec<Rational>,
}

/// `n` atoms with a weighted p-norm `(sum w_i |x_i|^p)^(1/p)`, or
/// `max w_i |x_i|` for `p = inf`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomicSpace {
    n: usize,
    norm: NormSpec,
}

impl AtomicSpace {
    pub fn new(p: Exponent, weights: Vec<Rational>) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::InvalidNorm("a space needs at least one atom".into()));
        }
        if n > MAX_ATOMS {
            return Err(Error::Budget(format!("{n} atoms exceeds the limit of {MAX_ATOMS}")));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_positive()) {
            return Err(Error::InvalidNorm(format!("weight of atom {} is not positive", i + 1)));
        }
        Ok(AtomicSpace {
            n,
            norm: NormSpec { p, weights },
        })
    }

    pub fn unweighted(n: usize, p: Exponent) -> Self {
        AtomicSpace::new(p, vec![int(1); n]).expect("unit weights are valid")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn norm(&self) -> &NormSpec {
        &self.norm
    }

    pub fn exponent(&self) -> &Exponent {
        &self.norm.p
    }

    pub fn weights(&self) -> &[Rational] {
        &self.norm.weights
    }

    pub fn check_dim(&self, v: &Vector) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        Ok(())
    }
}

/// Coordinates of a lattice element with respect to the atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vector(pub Vec<Rational>);

impl Vector {
    pub fn zeros(n: usize) -> Self {
        Vector(vec![Rational::zero(); n])
    }

    /// The atom `e_{i+1}` (0-based index `i`).
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Vector::zeros(n);
        v.0[i] = int(1);
        v
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        Vector(xs.iter().map(|&x| int(x)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn abs(&self) -> Vector {
        Vector(self.0.iter().map(Signed::abs).collect())
    }

    pub fn scale(&self, c: &Rational) -> Vector {
        Vector(self.0.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &Rational, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + c * b).collect())
    }

    /// Rescales so that the first nonzero coordinate is 1; returns the factor
    /// that was divided out (`None` for the zero vector).
    pub fn normalize_leading(&mut self) -> Option<Rational> {
        let lead = self.0.iter().find(|x| !x.is_zero())?.clone();
        for x in self.0.iter_mut() {
            *x /= &lead;
        }
        Some(lead)
    }
}

impl Deref for Vector {
    type Target = [Rational];
    fn deref(&self) -> &[Rational] {
        &self.0
    }
}

impl DerefMut for Vector {
    fn deref_mut(&mut self) -> &mut [Rational] {
        &mut self.0
    }
}

fn same_len(f: &Vector, g: &Vector) -> Result<()> {
    if f.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: f.len(),
            found: g.len(),
        });
    }
    Ok(())
}

/// Indices of the nonzero coordinates.
pub fn support(v: &[Rational]) -> SupportSet {
    let mut s = SupportSet::EMPTY;
    for (i, x) in v.iter().enumerate() {
        if !x.is_zero() {
            s.insert_index(i);
        }
    }
    s
}

/// `f ⊥ g`: the supports do not meet.
pub fn is_disjoint(f: &Vector, g: &Vector) -> Result<bool> {
    same_len(f, g)?;
    Ok(support(f).is_disjoint(support(g)))
}

/// `f` lies in the band generated by `g`; for atomic lattices this is
/// support inclusion.
pub fn band_contains(g: &Vector, f: &Vector) -> Result<bool> {
    same_len(f, g)?;
    Ok(support(f).is_subset(support(g)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use proptest::prelude::*;

    #[test]
    fn support_examples() {
        assert_eq!(
            support(&Vector::from_ints(&[0, 3, 0, -2])),
            SupportSet::from_atoms(&[2, 4])
        );
        assert_eq!(support(&Vector::from_ints(&[0, 0, 0])), SupportSet::EMPTY);
        let v = Vector(vec![frac(1, 3), int(0), int(5)]);
        assert_eq!(support(&v), SupportSet::from_atoms(&[1, 3]));
        assert_eq!(support(&v).to_string(), "{1,3}");
    }

    #[test]
    fn disjoint_examples() {
        let v = Vector::from_ints;
        assert!(is_disjoint(&v(&[1, 0]), &v(&[0, 2])).unwrap());
        assert!(!is_disjoint(&v(&[1, 1]), &v(&[0, 2])).unwrap());
        assert!(is_disjoint(&v(&[0, 0]), &v(&[5, 7])).unwrap());
        assert!(matches!(
            is_disjoint(&v(&[1]), &v(&[0, 2])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn band_examples() {
        let v = Vector::from_ints;
        assert!(band_contains(&v(&[1, 0, 2]), &v(&[0, 0, 5])).unwrap());
        assert!(!band_contains(&v(&[1, 0, 2]), &v(&[1, 1, 0])).unwrap());
        assert!(band_contains(&v(&[0, 0, 0]), &v(&[0, 0, 0])).unwrap());
        assert!(band_contains(&v(&[1]), &v(&[0, 2])).is_err());
    }

    #[test]
    fn space_validation() {
        assert!(AtomicSpace::new(Exponent::One, vec![]).is_err());
        assert!(AtomicSpace::new(Exponent::One, vec![int(1), int(0)]).is_err());
        assert!(Exponent::from_rational(frac(1, 2)).is_err());
        assert_eq!(Exponent::from_rational(int(2)).unwrap(), Exponent::Two);
        assert_eq!(
            Exponent::from_rational(frac(3, 2)).unwrap().conjugate(),
            Exponent::General(int(3))
        );
    }

    fn small_vec(n: usize) -> impl Strategy<Value = Vector> {
        proptest::collection::vec(-2i64..=2, n).prop_map(|xs| Vector::from_ints(&xs))
    }

    proptest! {
        #[test]
        fn support_of_sum_within_union(f in small_vec(6), g in small_vec(6)) {
            let s = support(&f.add(&g));
            prop_assert!(s.is_subset(support(&f).union(support(&g))));
        }

        #[test]
        fn disjointness_laws(f in small_vec(5), g in small_vec(5), h in small_vec(5)) {
            prop_assert_eq!(is_disjoint(&f, &g).unwrap(), is_disjoint(&g, &f).unwrap());
            prop_assert_eq!(is_disjoint(&f, &f).unwrap(), f.is_zero());
            prop_assert!(band_contains(&f, &f).unwrap());
            if band_contains(&g, &f).unwrap() && band_contains(&h, &g).unwrap() {
                prop_assert!(band_contains(&h, &f).unwrap());
            }
            if is_disjoint(&f, &g).unwrap() && band_contains(&g, &h).unwrap() {
                prop_assert!(is_disjoint(&f, &h).unwrap());
            }
        }
    }
}
