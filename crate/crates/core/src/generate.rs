//! Seeded generators for forms, operators and partitions. Entries are small
//! rationals `p/q` with `p ∈ [-9, 9]`, `q ∈ [1, 9]`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{AtomicSpace, Exponent, SupportSet, Vector};
use crate::linalg;
use crate::operator::Operator;
use crate::rational::{frac, Rational};
use crate::wce::{make_wce, WceForm};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for item `index` of a named family.
pub fn derive_seed(seed: u64, family: &str, index: u64) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for b in family.bytes().chain(index.to_le_bytes()) {
        h = (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3);
        h ^= h >> 29;
    }
    h
}

pub fn small_rational(rng: &mut impl Rng) -> Rational {
    frac(rng.gen_range(-9..=9), rng.gen_range(1..=9))
}

pub fn nonzero_rational(rng: &mut impl Rng) -> Rational {
    let p = loop {
        let p = rng.gen_range(-9..=9);
        if p != 0 {
            break p;
        }
    };
    frac(p, rng.gen_range(1..=9))
}

/// A partition of all `n` atoms into blocks of sequential random sizes
/// (at most 4), after shuffling the atoms.
pub fn random_partition(rng: &mut impl Rng, n: usize) -> Vec<SupportSet> {
    let mut atoms: Vec<usize> = (0..n).collect();
    atoms.shuffle(rng);
    let mut blocks = Vec::new();
    let mut rest = &atoms[..];
    while !rest.is_empty() {
        let size = rng.gen_range(1..=rest.len().min(4));
        let mut b = SupportSet::EMPTY;
        for &i in &rest[..size] {
            b.insert_index(i);
        }
        blocks.push(b);
        rest = &rest[size..];
    }
    blocks
}

/// A valid form on `space`. Some blocks may be dropped so that not every
/// atom is covered, but at least one block always remains.
pub fn gen_random_wce_in(seed: u64, space: AtomicSpace) -> WceForm {
    let mut rng = rng(seed);
    let n = space.dim();
    let mut blocks = random_partition(&mut rng, n);
    if blocks.len() > 1 {
        let keep: Vec<bool> = blocks.iter().map(|_| rng.gen_range(0..5) != 0).collect();
        if keep.iter().any(|&k| k) {
            blocks = blocks
                .into_iter()
                .zip(keep)
                .filter(|(_, k)| *k)
                .map(|(b, _)| b)
                .collect();
        }
    }
    let mut u = Vec::with_capacity(blocks.len());
    let mut psi = Vec::with_capacity(blocks.len());
    for &a in &blocks {
        let mut uj = Vector::zeros(n);
        for i in a.indices() {
            uj[i] = nonzero_rational(&mut rng);
        }
        let pj = loop {
            let mut pj = Vector::zeros(n);
            for i in a.indices() {
                if rng.gen_range(0..3) != 0 {
                    pj[i] = small_rational(&mut rng);
                }
            }
            if !pj.is_zero() {
                break pj;
            }
        };
        u.push(uj);
        psi.push(pj);
    }
    make_wce(space, blocks, u, psi).expect("generated data satisfies the form invariants")
}

/// A form on the unweighted `ℓ_1` space with `n` atoms.
pub fn gen_random_wce(seed: u64, n: usize) -> WceForm {
    gen_random_wce_in(seed, AtomicSpace::unweighted(n, Exponent::One))
}

/// Each entry is nonzero with probability `density`.
pub fn gen_random_operator_in(seed: u64, space: AtomicSpace, density: f64) -> Operator {
    let mut rng = rng(seed);
    let n = space.dim();
    let mut m = linalg::zeros(n, n);
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                *x = nonzero_rational(&mut rng);
            }
        }
    }
    Operator::new(space, m).expect("square")
}

pub fn gen_random_operator(seed: u64, n: usize, density: f64) -> Operator {
    gen_random_operator_in(seed, AtomicSpace::unweighted(n, Exponent::One), density)
}

/// The form's matrix with one extra nonzero entry at a position `(k, i)`
/// not inside any `A_j × A_j`; `None` if the blocks leave no such position.
pub fn perturb_off_block(form: &WceForm, seed: u64) -> Option<Operator> {
    let n = form.space().dim();
    let positions: Vec<(usize, usize)> = (0..n)
        .flat_map(|k| (0..n).map(move |i| (k, i)))
        .filter(|&(k, i)| !form.blocks().iter().any(|a| a.contains_index(k) && a.contains_index(i)))
        .collect();
    let mut rng = rng(seed);
    let &(k, i) = positions.choose(&mut rng)?;
    let t = form.to_operator();
    let mut m = t.entries().clone();
    m[k][i] = nonzero_rational(&mut rng);
    Some(Operator::new(form.space().clone(), m).expect("square"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicates::is_sbp;

    #[test]
    fn wce_generator_contract() {
        let f = gen_random_wce(42, 6);
        assert!(is_sbp(&f.to_operator()).unwrap().holds);
        assert_eq!(f, gen_random_wce(42, 6));
        let one = gen_random_wce(7, 1);
        assert_eq!(one.blocks(), &[SupportSet::from_atoms(&[1])]);
    }

    #[test]
    fn operator_generator_contract() {
        assert!(gen_random_operator(3, 5, 0.0).is_zero());
        let dense = gen_random_operator(3, 5, 1.0);
        assert!(dense.entries().iter().flatten().all(|x| *x != frac(0, 1)));
        assert_eq!(dense, gen_random_operator(3, 5, 1.0));
        assert_ne!(dense, gen_random_operator(4, 5, 1.0));
    }

    #[test]
    fn partitions_cover_all_atoms() {
        let mut r = rng(5);
        for n in 1..12 {
            let p = random_partition(&mut r, n);
            let all = p.iter().fold(SupportSet::EMPTY, |acc, &b| acc.union(b));
            assert_eq!(all, SupportSet::full(n));
            assert_eq!(p.iter().map(|b| b.len()).sum::<usize>(), n);
        }
    }

    #[test]
    fn perturbation_lands_off_block() {
        let f = gen_random_wce(11, 5);
        if let Some(t) = perturb_off_block(&f, 1) {
            assert_ne!(t, f.to_operator());
        }
        let single =
            crate::wce::averaging_form(AtomicSpace::unweighted(2, Exponent::One), &[SupportSet::full(2)]).unwrap();
        assert!(perturb_off_block(&single, 0).is_none());
    }
}
