//! Reference deciders that share no code path with the reductions in
//! `predicates`, used to cross-check them.
//!
//! The symbolic oracle evaluates each defining implication on the support
//! patterns `(supp v, supp Tv)` of a generic element of every stratum
//! `{v : supp v ⊆ G, (Tv)_k = 0 for k ∈ Z}`. A generic element of a
//! subspace has the union of the supports of any basis, so a pattern is a
//! union over a nullspace basis. Every violating pair can be replaced by
//! generic elements of its strata without losing the violation, which makes
//! the check exact. The cost is exponential in `n`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::generate::rng;
use crate::lattice::{support, SupportSet, Vector};
use crate::linalg::{self, Matrix};
use crate::operator::Operator;
use crate::rational::int;

pub const SYMBOLIC_ORACLE_MAX_ATOMS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleVerdicts {
    pub band_preserving: bool,
    pub disjointness_preserving: bool,
    pub beta: bool,
    pub sbp: bool,
    pub scp: bool,
}

/// `(supp v, supp Tv)` for a generic element of every stratum.
pub fn support_patterns(t: &Operator) -> Result<BTreeSet<(SupportSet, SupportSet)>> {
    let n = t.dim();
    if n > SYMBOLIC_ORACLE_MAX_ATOMS {
        return Err(Error::Budget(format!(
            "symbolic oracle is limited to {SYMBOLIC_ORACLE_MAX_ATOMS} atoms, got {n}"
        )));
    }
    if let Some(rows) = integer_rows(t) {
        if let Some(out) = integer_patterns(t, &rows) {
            return Ok(out);
        }
    }
    Ok(rational_patterns(t))
}

/// Every stratum as `(G, Z)` with `Z` ranging over the submasks of the rows
/// reachable from `G`, including the empty one.
fn strata(t: &Operator) -> Vec<(Vec<usize>, SupportSet, SupportSet)> {
    let n = t.dim();
    let cols: Vec<SupportSet> = (0..n).map(|i| t.column_support(i)).collect();
    let mut out = Vec::new();
    for gbits in 1u64..1 << n {
        let gidx: Vec<usize> = SupportSet::from_bits(gbits).indices().collect();
        let reach = gidx.iter().fold(SupportSet::EMPTY, |acc, &i| acc.union(cols[i]));
        let mut z = reach.bits();
        loop {
            out.push((gidx.clone(), reach, SupportSet::from_bits(z)));
            if z == 0 {
                break;
            }
            z = (z - 1) & reach.bits();
        }
    }
    out
}

fn rational_patterns(t: &Operator) -> BTreeSet<(SupportSet, SupportSet)> {
    let mut out = BTreeSet::new();
    out.insert((SupportSet::EMPTY, SupportSet::EMPTY));
    for (gidx, reach, z) in strata(t) {
        let rows: Matrix = z
            .indices()
            .map(|k| gidx.iter().map(|&i| t.entry(k, i).clone()).collect())
            .collect();
        let mut s = SupportSet::EMPTY;
        let mut ts = SupportSet::EMPTY;
        for b in linalg::nullspace(&rows, gidx.len()) {
            for (c, &i) in b.iter().zip(&gidx) {
                if !c.is_zero() {
                    s.insert_index(i);
                }
            }
            for k in reach.indices() {
                let v: crate::rational::Rational = gidx.iter().zip(&b).map(|(&i, c)| t.entry(k, i) * c).sum();
                if !v.is_zero() {
                    ts.insert_index(k);
                }
            }
        }
        out.insert((s, ts));
    }
    out
}

/// Same patterns through row-space membership: a coordinate functional
/// vanishes on the nullspace of `A` iff it lies in the row space of `A`.
/// `None` on overflow.
fn integer_patterns(t: &Operator, rows: &[Vec<i128>]) -> Option<BTreeSet<(SupportSet, SupportSet)>> {
    let mut out = BTreeSet::new();
    out.insert((SupportSet::EMPTY, SupportSet::EMPTY));
    for (gidx, reach, z) in strata(t) {
        let restrict = |k: usize| -> Vec<i128> { gidx.iter().map(|&i| rows[k][i]).collect() };
        let echelon = IntEchelon::new(z.indices().map(restrict).collect())?;
        let mut s = SupportSet::EMPTY;
        for (c, &i) in gidx.iter().enumerate() {
            let mut e = vec![0; gidx.len()];
            e[c] = 1;
            if !echelon.spans(e)? {
                s.insert_index(i);
            }
        }
        let mut ts = SupportSet::EMPTY;
        for k in reach.indices() {
            if !echelon.spans(restrict(k))? {
                ts.insert_index(k);
            }
        }
        out.insert((s, ts));
    }
    Some(out)
}

fn gcd_normalize(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, &x| num_integer::gcd(g, x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
}

/// `p * v - q * w`, or `None` on overflow.
fn combine(v: &[i128], p: i128, w: &[i128], q: i128) -> Option<Vec<i128>> {
    v.iter()
        .zip(w)
        .map(|(&a, &b)| a.checked_mul(p)?.checked_sub(b.checked_mul(q)?))
        .collect()
}

/// Fraction-free row echelon form over the integers.
struct IntEchelon {
    rows: Vec<(usize, Vec<i128>)>,
}

impl IntEchelon {
    fn new(input: Vec<Vec<i128>>) -> Option<Self> {
        let mut e = IntEchelon { rows: Vec::new() };
        for r in input {
            if let Some((c, v)) = e.reduce(r)? {
                e.rows.push((c, v));
            }
        }
        Some(e)
    }

    /// The residual of `v` against the stored rows with its first nonzero
    /// column, or `None` inside `Some` when `v` is in the span.
    #[allow(clippy::type_complexity)]
    fn reduce(&self, mut v: Vec<i128>) -> Option<Option<(usize, Vec<i128>)>> {
        for (c, row) in &self.rows {
            if v[*c] != 0 {
                v = combine(&v, row[*c], row, v[*c])?;
                gcd_normalize(&mut v);
            }
        }
        Some(v.iter().position(|&x| x != 0).map(|c| (c, v)))
    }

    fn spans(&self, v: Vec<i128>) -> Option<bool> {
        Some(self.reduce(v)?.is_none())
    }
}

/// Achievable range supports according to the stratum patterns.
pub fn oracle_sigma(t: &Operator) -> Result<BTreeSet<SupportSet>> {
    Ok(support_patterns(t)?.into_iter().map(|(_, ts)| ts).collect())
}

/// All five conditions, decided from the stratum patterns.
pub fn symbolic_oracle(t: &Operator) -> Result<OracleVerdicts> {
    let pats: Vec<(SupportSet, SupportSet)> = support_patterns(t)?.into_iter().collect();
    let mut v = OracleVerdicts {
        band_preserving: true,
        disjointness_preserving: true,
        beta: true,
        sbp: true,
        scp: true,
    };
    for &(f, tf) in &pats {
        for &(g, tg) in &pats {
            if f.is_disjoint(g) && !tf.is_disjoint(g) {
                v.band_preserving = false;
            }
            if f.is_disjoint(g) && !tf.is_disjoint(tg) {
                v.disjointness_preserving = false;
            }
            if f.is_subset(g) && !tf.is_subset(tg) {
                v.beta = false;
            }
            if f.is_disjoint(tg) && !tf.is_disjoint(tg) {
                v.sbp = false;
            }
            if f.is_subset(tg) && !tf.is_subset(tg) {
                v.scp = false;
            }
        }
    }
    Ok(v)
}

/// A sampled counterexample to one of the implications.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledViolation {
    pub f: Vector,
    pub g: Vector,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SampleReport {
    pub pairs: usize,
    pub sbp: Option<SampledViolation>,
    pub scp: Option<SampledViolation>,
}

/// Rows of `t` scaled to integers; supports of images are unchanged.
fn integer_rows(t: &Operator) -> Option<Vec<Vec<i128>>> {
    t.entries()
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
            row.iter()
                .map(|x| (x.numer() * (&l / x.denom())).to_i128())
                .collect::<Option<Vec<i128>>>()
        })
        .collect()
}

fn image_support(rows: &Option<Vec<Vec<i128>>>, t: &Operator, v: &[i64]) -> SupportSet {
    if let Some(rows) = rows {
        let mut s = SupportSet::EMPTY;
        let mut exact = true;
        for (k, row) in rows.iter().enumerate() {
            let mut acc: i128 = 0;
            for (a, &x) in row.iter().zip(v) {
                match a.checked_mul(i128::from(x)).and_then(|p| acc.checked_add(p)) {
                    Some(next) => acc = next,
                    None => {
                        exact = false;
                        break;
                    }
                }
            }
            if !exact {
                break;
            }
            if acc != 0 {
                s.insert_index(k);
            }
        }
        if exact {
            return s;
        }
    }
    let w = Vector(v.iter().map(|&x| int(x)).collect());
    support(&t.apply(&w).expect("dimensions agree"))
}

fn random_vector(rng: &mut impl Rng, n: usize, within: SupportSet) -> Vec<i64> {
    (0..n)
        .map(|i| {
            if within.contains_index(i) && rng.gen_bool(0.6) {
                let x = rng.gen_range(1..=9);
                if rng.gen_bool(0.5) {
                    -x
                } else {
                    x
                }
            } else {
                0
            }
        })
        .collect()
}

/// Samples `pairs` random integer pairs `(f, g)` and records the first
/// sampled violation of each implication. Half of the `f` are drawn inside
/// or outside `supp Tg` so that the hypotheses are met often.
pub fn sampling_oracle(t: &Operator, seed: u64, pairs: usize) -> SampleReport {
    let n = t.dim();
    let rows = integer_rows(t);
    let mut rng = rng(seed);
    let full = SupportSet::full(n);
    let mut report = SampleReport {
        pairs,
        ..Default::default()
    };
    for _ in 0..pairs {
        let g = random_vector(&mut rng, n, full);
        let tg = image_support(&rows, t, &g);
        let region = match rng.gen_range(0..3) {
            0 => full,
            1 => full.difference(tg),
            _ => tg,
        };
        let f = random_vector(&mut rng, n, region);
        let sf = support(&f.iter().map(|&x| int(x)).collect::<Vec<_>>());
        let tf = image_support(&rows, t, &f);
        let pair = || SampledViolation {
            f: Vector(f.iter().map(|&x| int(x)).collect()),
            g: Vector(g.iter().map(|&x| int(x)).collect()),
        };
        if report.sbp.is_none() && sf.is_disjoint(tg) && !tf.is_disjoint(tg) {
            report.sbp = Some(pair());
        }
        if report.scp.is_none() && sf.is_subset(tg) && !tf.is_subset(tg) {
            report.scp = Some(pair());
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{AtomicSpace, Exponent};
    use crate::predicates::{is_beta, is_sbp, is_scp};
    use crate::rational::{frac, Rational};
    use crate::sigma::enumerate_sigma;

    fn op(rows: Vec<Vec<Rational>>) -> Operator {
        let n = rows.len();
        Operator::new(AtomicSpace::unweighted(n, Exponent::One), rows).unwrap()
    }

    fn m() -> Operator {
        let h = || frac(1, 2);
        op(vec![
            vec![h(), h(), int(0)],
            vec![h(), h(), int(0)],
            vec![int(0), int(0), int(1)],
        ])
    }

    fn q() -> Operator {
        op(vec![vec![int(1), frac(1, 2)], vec![int(0), int(0)]])
    }

    #[test]
    fn oracle_on_examples() {
        let v = symbolic_oracle(&m()).unwrap();
        assert!(!v.band_preserving && !v.disjointness_preserving && !v.beta && v.sbp && v.scp);
        let v = symbolic_oracle(&q()).unwrap();
        assert!(!v.sbp && v.scp);
        let z = symbolic_oracle(&Operator::zero(AtomicSpace::unweighted(3, Exponent::One))).unwrap();
        assert!(z.band_preserving && z.disjointness_preserving && z.beta && z.sbp && z.scp);
    }

    #[test]
    fn oracle_sigma_matches_enumeration() {
        for t in [m(), q()] {
            let expected: BTreeSet<SupportSet> = enumerate_sigma(&t).unwrap().supports.into_iter().collect();
            assert_eq!(oracle_sigma(&t).unwrap(), expected);
        }
    }

    #[test]
    fn oracle_budget() {
        let big = Operator::zero(AtomicSpace::unweighted(7, Exponent::One));
        assert!(matches!(symbolic_oracle(&big), Err(Error::Budget(_))));
    }

    #[test]
    fn sampling_finds_q_violation_and_respects_m() {
        let r = sampling_oracle(&q(), 1, 2000);
        let w = r.sbp.unwrap();
        assert!(support(&w.f).is_disjoint(support(&q().apply(&w.g).unwrap())));
        assert!(r.scp.is_none());
        let r = sampling_oracle(&m(), 1, 2000);
        assert!(r.sbp.is_none() && r.scp.is_none());
    }

    #[test]
    fn integer_and_rational_paths_agree() {
        for seed in 0..60 {
            let t = crate::generate::gen_random_operator(seed, 4, 0.45);
            let rows = integer_rows(&t).unwrap();
            assert_eq!(
                integer_patterns(&t, &rows).unwrap(),
                rational_patterns(&t),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn brute_force_agrees_on_small_random_operators() {
        for seed in 0..40 {
            let t = crate::generate::gen_random_operator(seed, 3, 0.4);
            let v = symbolic_oracle(&t).unwrap();
            assert_eq!(v.sbp, is_sbp(&t).unwrap().holds, "seed {seed}");
            assert_eq!(v.scp, is_scp(&t).unwrap().holds, "seed {seed}");
            assert_eq!(v.beta, is_beta(&t).holds, "seed {seed}");
        }
    }
}
