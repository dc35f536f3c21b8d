use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, Rational};

pub const MAX_DEGREE: usize = 16;
pub const MAX_PIECES: usize = 64;

/// Polynomial helpers on ascending coefficient lists.
pub(crate) mod coeffs {
    use super::*;

    pub fn trim(mut c: Vec<Rational>) -> Vec<Rational> {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        c
    }

    pub fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
                x + b.get(i).cloned().unwrap_or_else(Rational::zero)
            })
            .collect();
        trim(out)
    }

    pub fn scale(a: &[Rational], s: &Rational) -> Vec<Rational> {
        trim(a.iter().map(|x| x * s).collect())
    }

    pub fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(out)
    }

    /// `∫_lo^hi p(t) dt`.
    pub fn integral(a: &[Rational], lo: &Rational, hi: &Rational) -> Rational {
        let mut total = Rational::zero();
        let (mut plo, mut phi) = (lo.clone(), hi.clone());
        for (k, c) in a.iter().enumerate() {
            total += c * (&phi - &plo) / int(k as i64 + 1);
            plo *= lo;
            phi *= hi;
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub from: Rational,
    pub to: Rational,
    /// Ascending coefficients in the global variable `t`.
    pub coeffs: Vec<Rational>,
}

/// A piecewise polynomial on `[0, 1]` in canonical form: contiguous
/// nondegenerate pieces, trimmed coefficients, no two neighbours equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewisePoly {
    pieces: Vec<Piece>,
}

impl PiecewisePoly {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        let Some(first) = pieces.first() else {
            return Err(Error::InvalidPiecewise("no pieces".into()));
        };
        if !first.from.is_zero() {
            return Err(Error::InvalidPiecewise(format!(
                "first piece starts at {} instead of 0",
                format_rational(&first.from)
            )));
        }
        let last = pieces.last().expect("nonempty");
        if !last.to.is_one() {
            return Err(Error::InvalidPiecewise(format!(
                "last piece ends at {} instead of 1",
                format_rational(&last.to)
            )));
        }
        for (i, p) in pieces.iter().enumerate() {
            if p.from >= p.to {
                return Err(Error::InvalidPiecewise(format!("piece {} is empty or reversed", i + 1)));
            }
            if i > 0 && pieces[i - 1].to != p.from {
                return Err(Error::InvalidPiecewise(format!(
                    "gap or overlap between pieces {} and {} at {}",
                    i,
                    i + 1,
                    format_rational(&p.from)
                )));
            }
        }
        if pieces.len() > MAX_PIECES {
            return Err(Error::Budget(format!(
                "{} pieces exceed the limit of {MAX_PIECES}",
                pieces.len()
            )));
        }
        let out = Self::canonical(pieces);
        out.check_degree()?;
        Ok(out)
    }

    fn canonical(pieces: Vec<Piece>) -> Self {
        let mut merged: Vec<Piece> = Vec::with_capacity(pieces.len());
        for mut p in pieces {
            p.coeffs = coeffs::trim(p.coeffs);
            match merged.last_mut() {
                Some(prev) if prev.coeffs == p.coeffs => prev.to = p.to,
                _ => merged.push(p),
            }
        }
        PiecewisePoly { pieces: merged }
    }

    fn check_degree(&self) -> Result<()> {
        match self.degree() {
            Some(d) if d > MAX_DEGREE => Err(Error::Budget(format!("degree {d} exceeds the limit of {MAX_DEGREE}"))),
            _ => Ok(()),
        }
    }

    pub fn zero() -> Self {
        Self::constant(Rational::zero())
    }

    pub fn constant(c: Rational) -> Self {
        Self::canonical(vec![Piece {
            from: int(0),
            to: int(1),
            coeffs: vec![c],
        }])
    }

    /// `coeffs` on `[a, b]`, zero elsewhere.
    pub fn poly_on(a: &Rational, b: &Rational, coeffs: Vec<Rational>) -> Result<Self> {
        if !(Rational::zero() <= *a && a < b && *b <= int(1)) {
            return Err(Error::InvalidPiecewise(format!(
                "[{}, {}] is not a nondegenerate subinterval of [0, 1]",
                format_rational(a),
                format_rational(b)
            )));
        }
        let mut pieces = Vec::new();
        if !a.is_zero() {
            pieces.push(Piece {
                from: int(0),
                to: a.clone(),
                coeffs: vec![],
            });
        }
        pieces.push(Piece {
            from: a.clone(),
            to: b.clone(),
            coeffs,
        });
        if !b.is_one() {
            pieces.push(Piece {
                from: b.clone(),
                to: int(1),
                coeffs: vec![],
            });
        }
        Self::new(pieces)
    }

    pub fn indicator(a: &Rational, b: &Rational) -> Result<Self> {
        Self::poly_on(a, b, vec![int(1)])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.coeffs.is_empty())
    }

    /// Highest degree over nonzero pieces, `None` for the zero function.
    pub fn degree(&self) -> Option<usize> {
        self.pieces.iter().filter_map(|p| p.coeffs.len().checked_sub(1)).max()
    }

    /// Interior breakpoints together with 0 and 1.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.pieces.iter().map(|p| p.from.clone()).collect();
        out.push(int(1));
        out
    }

    /// The polynomial on a subinterval `[a, b]` that lies inside one piece.
    pub fn poly_at(&self, a: &Rational, b: &Rational) -> &[Rational] {
        let p = self
            .pieces
            .iter()
            .find(|p| p.from <= *a && *b <= p.to)
            .expect("interval lies within a single piece");
        &p.coeffs
    }

    /// Combines two functions piecewise on the common refinement.
    fn zip_with(&self, other: &Self, op: impl Fn(&[Rational], &[Rational]) -> Vec<Rational>) -> Result<Self> {
        let breaks = refine(&[self, other]);
        let pieces: Vec<Piece> = breaks
            .windows(2)
            .map(|w| Piece {
                from: w[0].clone(),
                to: w[1].clone(),
                coeffs: op(self.poly_at(&w[0], &w[1]), other.poly_at(&w[0], &w[1])),
            })
            .collect();
        let out = Self::canonical(pieces);
        if out.pieces.len() > MAX_PIECES {
            return Err(Error::Budget(format!(
                "{} pieces exceed the limit of {MAX_PIECES}",
                out.pieces.len()
            )));
        }
        out.check_degree()?;
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, coeffs::add)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, coeffs::mul)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::canonical(
            self.pieces
                .iter()
                .map(|p| Piece {
                    from: p.from.clone(),
                    to: p.to.clone(),
                    coeffs: coeffs::scale(&p.coeffs, s),
                })
                .collect(),
        )
    }

    /// Divides by the leading coefficient of the first nonzero piece.
    pub fn normalized(&self) -> Self {
        match self.pieces.iter().find_map(|p| p.coeffs.last()) {
            Some(lead) => self.scale(&lead.recip()),
            None => self.clone(),
        }
    }
}

impl fmt::Display for PiecewisePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for p in self.pieces.iter().filter(|p| !p.coeffs.is_empty()) {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let terms: Vec<String> = p
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| match k {
                    0 => format_rational(c),
                    1 => format!("{}*t", format_rational(c)),
                    _ => format!("{}*t^{k}", format_rational(c)),
                })
                .collect();
            write!(
                f,
                "({})*chi[{},{}]",
                terms.join(" + "),
                format_rational(&p.from),
                format_rational(&p.to)
            )?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Sorted union of the breakpoints of several functions.
pub fn refine(fs: &[&PiecewisePoly]) -> Vec<Rational> {
    let mut all: Vec<Rational> = fs.iter().flat_map(|f| f.breakpoints()).collect();
    all.sort();
    all.dedup();
    all
}

/// Exact `∫₀¹ w f dt`.
pub fn integrate(w: &PiecewisePoly, f: &PiecewisePoly) -> Rational {
    integrate_on(w, f, &int(0), &int(1))
}

/// Exact `∫_a^b w f dt` for `0 <= a <= b <= 1`.
pub fn integrate_on(w: &PiecewisePoly, f: &PiecewisePoly, a: &Rational, b: &Rational) -> Rational {
    refine(&[w, f])
        .windows(2)
        .filter_map(|iv| {
            let lo = (&iv[0]).max(a);
            let hi = (&iv[1]).min(b);
            (lo < hi).then(|| {
                coeffs::integral(
                    &coeffs::mul(w.poly_at(&iv[0], &iv[1]), f.poly_at(&iv[0], &iv[1])),
                    lo,
                    hi,
                )
            })
        })
        .sum()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rational::frac;
    use proptest::prelude::*;

    fn half() -> Rational {
        frac(1, 2)
    }

    fn phi2() -> PiecewisePoly {
        PiecewisePoly::poly_on(&int(0), &half(), vec![int(0), int(1)]).unwrap()
    }

    #[test]
    fn integrate_examples() {
        let chi = PiecewisePoly::indicator(&int(0), &half()).unwrap();
        let t = PiecewisePoly::new(vec![Piece {
            from: int(0),
            to: int(1),
            coeffs: vec![int(0), int(1)],
        }])
        .unwrap();
        assert_eq!(integrate(&chi, &t), frac(1, 8));
        let shifted = PiecewisePoly::constant(frac(-1, 4)).add(&t).unwrap();
        assert_eq!(integrate(&phi2(), &shifted), frac(1, 96));
        assert_eq!(
            integrate(&PiecewisePoly::constant(int(1)), &PiecewisePoly::zero()),
            int(0)
        );
    }

    #[test]
    fn construction_errors() {
        let gap = PiecewisePoly::new(vec![
            Piece {
                from: int(0),
                to: frac(1, 3),
                coeffs: vec![int(1)],
            },
            Piece {
                from: half(),
                to: int(1),
                coeffs: vec![int(1)],
            },
        ]);
        assert!(matches!(gap, Err(Error::InvalidPiecewise(_))));
        let late = PiecewisePoly::new(vec![Piece {
            from: frac(1, 4),
            to: int(1),
            coeffs: vec![],
        }]);
        assert!(matches!(late, Err(Error::InvalidPiecewise(_))));
        let high = PiecewisePoly::new(vec![Piece {
            from: int(0),
            to: int(1),
            coeffs: vec![int(1); 18],
        }]);
        assert!(matches!(high, Err(Error::Budget(_))));
    }

    #[test]
    fn canonical_merging() {
        let split = PiecewisePoly::new(vec![
            Piece {
                from: int(0),
                to: half(),
                coeffs: vec![int(2), int(0)],
            },
            Piece {
                from: half(),
                to: int(1),
                coeffs: vec![int(2)],
            },
        ])
        .unwrap();
        assert_eq!(split, PiecewisePoly::constant(int(2)));
        assert_eq!(split.pieces().len(), 1);
    }

    #[test]
    fn normalization_and_display() {
        let g = PiecewisePoly::poly_on(&int(0), &half(), vec![int(-24), int(96)]).unwrap();
        let n = g.normalized();
        assert_eq!(n.pieces()[0].coeffs, vec![frac(-1, 4), int(1)]);
        assert_eq!(n.to_string(), "(-1/4 + 1*t)*chi[0,1/2]");
        assert_eq!(PiecewisePoly::zero().to_string(), "0");
    }

    pub(crate) fn arb_pp() -> impl Strategy<Value = PiecewisePoly> {
        (1usize..=6)
            .prop_flat_map(|m| {
                (
                    proptest::collection::btree_set(1i64..24, m - 1),
                    proptest::collection::vec(proptest::collection::vec(-4i64..=4, 0..=4), m),
                )
            })
            .prop_map(|(cuts, cs)| {
                let mut pts = vec![int(0)];
                pts.extend(cuts.into_iter().map(|c| frac(c, 24)));
                pts.push(int(1));
                let pieces = pts
                    .windows(2)
                    .zip(cs)
                    .map(|(w, c)| Piece {
                        from: w[0].clone(),
                        to: w[1].clone(),
                        coeffs: c.into_iter().map(int).collect(),
                    })
                    .collect();
                PiecewisePoly::new(pieces).unwrap()
            })
    }

    proptest! {
        #[test]
        fn canonicalization_is_idempotent(f in arb_pp()) {
            let again = PiecewisePoly::new(f.pieces().to_vec()).unwrap();
            prop_assert_eq!(&again, &f);
        }

        #[test]
        fn integrate_is_bilinear(w in arb_pp(), f in arb_pp(), g in arb_pp(), a in -3i64..=3) {
            let a = int(a);
            let lhs = integrate(&w, &f.scale(&a).add(&g).unwrap());
            prop_assert_eq!(lhs, &a * integrate(&w, &f) + integrate(&w, &g));
            let lhs = integrate(&w.scale(&a).add(&g).unwrap(), &f);
            prop_assert_eq!(lhs, &a * integrate(&w, &f) + integrate(&g, &f));
        }

        #[test]
        fn product_integrates_like_the_pairing(w in arb_pp(), f in arb_pp()) {
            let prod = w.mul(&f).unwrap();
            prop_assert_eq!(integrate(&prod, &PiecewisePoly::constant(int(1))), integrate(&w, &f));
        }
    }
}
