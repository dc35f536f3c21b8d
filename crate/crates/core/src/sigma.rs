//! The family `Σ_T` of supports achieved by elements of the range of `T`.
//!
//! `v = T x` vanishes at atom `k` iff `row_k · x = 0`, so the zero set of a
//! generic range element constrained to vanish on `Z` is the closure of `Z`
//! in the matroid of rows of `T`. Achievable supports are therefore exactly
//! the complements (inside `S_T`) of the flats of that matroid. Flats are
//! enumerated breadth first by rank; each flat carries the rows reduced
//! modulo its span, so extending a flat by one row only needs parallelism
//! tests between residuals.

use std::collections::{BTreeMap, HashSet};

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{support, SupportSet, Vector};
use crate::linalg::{self, Matrix};
use crate::operator::Operator;
use crate::rational::{int, Rational};
use crate::witness::{Law, Witness, WitnessKind};

/// Largest atom count `enumerate_sigma` accepts.
pub const SIGMA_ATOM_BUDGET: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaTable {
    /// Ascending bitmask order; always starts with `∅`.
    pub supports: Vec<SupportSet>,
    /// Union of all members.
    pub s_t: SupportSet,
}

impl SigmaTable {
    pub fn contains(&self, s: SupportSet) -> bool {
        self.supports.binary_search(&s).is_ok()
    }

    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }
}

/// Rows outside a flat, reduced modulo the span of the flat's rows.
type Residuals = Vec<(usize, Vec<Rational>)>;

fn extend_flat(flat: u64, residuals: &Residuals) -> Vec<(u64, Residuals)> {
    let mut children = Vec::new();
    let mut seen = HashSet::new();
    for (e, re) in residuals {
        let p = re
            .iter()
            .position(|x| !x.is_zero())
            .expect("row outside a flat is nonzero mod its span");
        let mut child = flat | 1 << e;
        let mut projected = Vec::with_capacity(residuals.len());
        for (k, rk) in residuals {
            if k == e {
                continue;
            }
            let c = &rk[p] / &re[p];
            let reduced: Vec<Rational> = if c.is_zero() {
                rk.clone()
            } else {
                rk.iter().zip(re).map(|(a, b)| a - &c * b).collect()
            };
            if reduced.iter().all(Zero::is_zero) {
                child |= 1 << k;
            } else {
                projected.push((*k, reduced));
            }
        }
        if seen.insert(child) {
            children.push((child, projected));
        }
    }
    children
}

/// All achievable supports of range elements of `T`.
pub fn enumerate_sigma(t: &Operator) -> Result<SigmaTable> {
    let n = t.dim();
    if n > SIGMA_ATOM_BUDGET {
        return Err(Error::Budget(format!(
            "support enumeration is limited to {SIGMA_ATOM_BUDGET} atoms, got {n}"
        )));
    }
    let s_t = (0..n).fold(SupportSet::EMPTY, |acc, i| acc.union(t.column_support(i)));
    let root: Residuals = s_t.indices().map(|k| (k, t.row(k).to_vec())).collect();

    let mut flats = vec![0u64];
    let mut level: BTreeMap<u64, Residuals> = BTreeMap::new();
    level.insert(0, root);
    while !level.is_empty() {
        let expanded: Vec<Vec<(u64, Residuals)>> =
            level.par_iter().map(|(flat, res)| extend_flat(*flat, res)).collect();
        let mut next = BTreeMap::new();
        for (child, res) in expanded.into_iter().flatten() {
            next.entry(child).or_insert(res);
        }
        flats.extend(next.keys().copied());
        level = next;
    }

    let mut supports: Vec<SupportSet> = flats
        .into_iter()
        .map(|f| s_t.difference(SupportSet::from_bits(f)))
        .collect();
    supports.sort_unstable();
    supports.dedup();
    Ok(SigmaTable { supports, s_t })
}

/// Preimage coordinates `x` with `(T x)_k = 0` for every `k ∉ s`: a basis
/// of that subspace together with the images of the basis vectors.
fn constrained_basis(t: &Operator, s: SupportSet) -> (Matrix, Vec<Vector>) {
    let n = t.dim();
    let constraints: Matrix = (0..n)
        .filter(|&k| !s.contains_index(k))
        .map(|k| t.row(k).to_vec())
        .collect();
    let basis = linalg::nullspace(&constraints, n);
    let images = basis
        .iter()
        .map(|b| t.apply(&Vector(b.clone())).expect("dimensions agree"))
        .collect();
    (basis, images)
}

/// Direct feasibility test: `s` is achievable iff every atom of `s` is
/// nonzero on some range element vanishing off `s`.
pub fn is_achievable(t: &Operator, s: SupportSet) -> bool {
    if !s.is_subset(SupportSet::full(t.dim())) {
        return false;
    }
    let (_, images) = constrained_basis(t, s);
    let reach = images.iter().fold(SupportSet::EMPTY, |acc, v| acc.union(support(v)));
    reach == s
}

/// `g + α h` for the first `α` in `1, 2, ..., n+1` that cancels nothing;
/// at most `n` values of `α` can cause a cancellation.
fn combine_without_cancellation(g: &Vector, tg: &Vector, h: &Vector, th: &Vector) -> (Vector, Vector) {
    let target = support(tg).union(support(th));
    for a in 1..=(tg.len() as i64 + 1) {
        let alpha = int(a);
        let candidate = tg.add_scaled(&alpha, th);
        if support(&candidate) == target {
            return (g.add_scaled(&alpha, h), candidate);
        }
    }
    unreachable!("more than n cancelling coefficients")
}

/// Some `g` with `supp(T g) = s`.
pub fn realize_support(t: &Operator, s: SupportSet) -> Result<Vector> {
    let n = t.dim();
    let (basis, images) = constrained_basis(t, s);
    let mut g = Vector::zeros(n);
    let mut tg = Vector::zeros(n);
    for i in s.indices() {
        if !tg[i].is_zero() {
            continue;
        }
        let j = images
            .iter()
            .position(|v| i < v.len() && !v[i].is_zero())
            .ok_or(Error::NotAchievable(s))?;
        let (ng, ntg) = combine_without_cancellation(&g, &tg, &Vector(basis[j].clone()), &images[j]);
        g = ng;
        tg = ntg;
    }
    if support(&tg) != s {
        return Err(Error::NotAchievable(s));
    }
    Ok(g)
}

/// Nonempty members of `Σ_T` that are minimal under inclusion, ordered by
/// smallest atom.
pub fn minimal_supports(sigma: &SigmaTable) -> Vec<SupportSet> {
    let nonempty: Vec<SupportSet> = sigma.supports.iter().copied().filter(|s| !s.is_empty()).collect();
    let mut minimal: Vec<SupportSet> = nonempty
        .iter()
        .copied()
        .filter(|s| !nonempty.iter().any(|o| o != s && o.is_subset(*s)))
        .collect();
    minimal.sort_by_key(|s| (s.first_index(), s.bits()));
    minimal
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureReport {
    pub union: bool,
    pub intersection: bool,
    pub complement: bool,
    /// First violation found (union, then intersection, then complement).
    pub witness: Option<Witness>,
}

/// Checks `Σ_T` for closure under pairwise union, pairwise intersection and
/// relative complement.
pub fn verify_sigma_closures(t: &Operator, sigma: &SigmaTable) -> Result<ClosureReport> {
    let mut first: [Option<(SupportSet, SupportSet, SupportSet)>; 3] = [None, None, None];
    for &a in &sigma.supports {
        for &b in &sigma.supports {
            let u = a.union(b);
            if first[0].is_none() && !sigma.contains(u) {
                first[0] = Some((a, b, u));
            }
            let i = a.intersection(b);
            if first[1].is_none() && !sigma.contains(i) {
                first[1] = Some((a, b, i));
            }
            if a.is_subset(b) {
                let d = b.difference(a);
                if first[2].is_none() && !sigma.contains(d) {
                    first[2] = Some((a, b, d));
                }
            }
        }
    }
    let laws = [Law::Union, Law::Intersection, Law::Complement];
    let witness = match laws.iter().zip(&first).find_map(|(l, f)| f.map(|x| (*l, x))) {
        None => None,
        Some((law, (a, b, missing))) => Some(Witness {
            kind: WitnessKind::Closure { law, missing },
            f: realize_support(t, a)?,
            g: realize_support(t, b)?,
            note: format!("{law} of {a} and {b} gives {missing}, which is not achievable"),
        }),
    };
    Ok(ClosureReport {
        union: first[0].is_none(),
        intersection: first[1].is_none(),
        complement: first[2].is_none(),
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{AtomicSpace, Exponent};
    use crate::rational::frac;

    fn op(rows: Vec<Vec<Rational>>) -> Operator {
        let n = rows.len();
        Operator::new(AtomicSpace::unweighted(n, Exponent::One), rows).unwrap()
    }

    fn m() -> Operator {
        let h = || frac(1, 2);
        let z = || int(0);
        op(vec![vec![h(), h(), z()], vec![h(), h(), z()], vec![z(), z(), int(1)]])
    }

    fn sets(v: &[&[usize]]) -> Vec<SupportSet> {
        v.iter().map(|a| SupportSet::from_atoms(a)).collect()
    }

    #[test]
    fn sigma_examples() {
        let s = enumerate_sigma(&m()).unwrap();
        assert_eq!(s.supports, sets(&[&[], &[1, 2], &[3], &[1, 2, 3]]));
        assert_eq!(s.s_t, SupportSet::from_atoms(&[1, 2, 3]));

        let zero = Operator::zero(AtomicSpace::unweighted(3, Exponent::One));
        let s = enumerate_sigma(&zero).unwrap();
        assert_eq!(s.supports, vec![SupportSet::EMPTY]);
        assert_eq!(s.s_t, SupportSet::EMPTY);

        let id = Operator::identity(AtomicSpace::unweighted(2, Exponent::One));
        assert_eq!(
            enumerate_sigma(&id).unwrap().supports,
            sets(&[&[], &[1], &[2], &[1, 2]])
        );
    }

    #[test]
    fn budget_is_enforced() {
        let big = Operator::zero(AtomicSpace::unweighted(21, Exponent::One));
        assert!(matches!(enumerate_sigma(&big), Err(Error::Budget(_))));
    }

    #[test]
    fn realize_examples() {
        let m = m();
        let g = realize_support(&m, SupportSet::from_atoms(&[1, 2, 3])).unwrap();
        assert_eq!(g, Vector::from_ints(&[1, 0, 1]));
        assert_eq!(m.apply(&g).unwrap(), Vector(vec![frac(1, 2), frac(1, 2), int(1)]));
        assert_eq!(
            realize_support(&m, SupportSet::from_atoms(&[3])).unwrap(),
            Vector::from_ints(&[0, 0, 1])
        );
        assert_eq!(
            realize_support(&m, SupportSet::from_atoms(&[1])),
            Err(Error::NotAchievable(SupportSet::from_atoms(&[1])))
        );
        assert!(realize_support(&m, SupportSet::EMPTY).unwrap().is_zero());
    }

    #[test]
    fn minimal_examples() {
        assert_eq!(
            minimal_supports(&enumerate_sigma(&m()).unwrap()),
            sets(&[&[1, 2], &[3]])
        );
        let zero = SigmaTable {
            supports: vec![SupportSet::EMPTY],
            s_t: SupportSet::EMPTY,
        };
        assert!(minimal_supports(&zero).is_empty());
        let id = Operator::identity(AtomicSpace::unweighted(2, Exponent::One));
        assert_eq!(minimal_supports(&enumerate_sigma(&id).unwrap()), sets(&[&[1], &[2]]));
    }

    #[test]
    fn closure_examples() {
        let m = m();
        let r = verify_sigma_closures(&m, &enumerate_sigma(&m).unwrap()).unwrap();
        assert!(r.union && r.intersection && r.complement && r.witness.is_none());

        let q = op(vec![vec![int(1), frac(1, 2)], vec![int(0), int(0)]]);
        let sq = enumerate_sigma(&q).unwrap();
        assert_eq!(sq.supports, sets(&[&[], &[1]]));
        assert!(verify_sigma_closures(&q, &sq).unwrap().union);
    }

    #[test]
    fn closure_violation_witness_replays() {
        // range spanned by (1,1,0) and (0,1,1): supports {1,2},{2,3},{1,3},{1,2,3}
        let t = op(vec![
            vec![int(1), int(0), int(0)],
            vec![int(1), int(1), int(0)],
            vec![int(0), int(1), int(0)],
        ]);
        let s = enumerate_sigma(&t).unwrap();
        assert_eq!(s.supports, sets(&[&[], &[1, 2], &[1, 3], &[2, 3], &[1, 2, 3]]));
        let r = verify_sigma_closures(&t, &s).unwrap();
        assert!(r.union && !r.intersection && !r.complement);
        let w = r.witness.unwrap();
        assert!(matches!(
            w.kind,
            WitnessKind::Closure {
                law: Law::Intersection,
                ..
            }
        ));
        assert!(w.replays(&t).unwrap());
    }

    #[test]
    fn flats_agree_with_direct_feasibility() {
        let t = op(vec![
            vec![int(1), int(2), int(0), int(1)],
            vec![int(2), int(4), int(0), int(2)],
            vec![int(0), int(1), int(1), int(0)],
            vec![int(1), int(3), int(1), int(1)],
        ]);
        let s = enumerate_sigma(&t).unwrap();
        for bits in 0..16u64 {
            let cand = SupportSet::from_bits(bits);
            assert_eq!(s.contains(cand), is_achievable(&t, cand), "{cand}");
        }
    }
}
