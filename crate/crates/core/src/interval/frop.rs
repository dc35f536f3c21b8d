//! Finite-rank integral operators `T f = Σ_k (∫₀¹ w_k f dt) φ_k` with
//! piecewise-polynomial kernels and images.
//!
//! Every decision is made on the common refinement of all breakpoints. The
//! coefficient vectors `(∫ w_k f)_k` reachable from functions supported in a
//! region `R` form the row space of the kernels' coefficient blocks on the
//! pieces of `R`, and are already reached by the test functions `t^d χ_P`
//! with `d` up to the largest kernel degree.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rational::{frac, int, Rational};
use crate::witness::WitnessKind;

use super::poly::{integrate, integrate_on, refine, PiecewisePoly, MAX_PIECES};
use super::region::{pp_band_contains, pp_disjoint, pp_support, IntervalRegion};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub kernel: PiecewisePoly,
    pub image: PiecewisePoly,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FiniteRankOp {
    terms: Vec<Term>,
}

impl FiniteRankOp {
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        let t = FiniteRankOp { terms };
        let pieces = t.grid(&[]).len();
        if pieces > MAX_PIECES {
            return Err(Error::Budget(format!(
                "common refinement has {pieces} pieces, above the limit of {MAX_PIECES}"
            )));
        }
        Ok(t)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    /// Subintervals of the common refinement of all data and `extra` points.
    fn grid(&self, extra: &[Rational]) -> Vec<(Rational, Rational)> {
        let fs: Vec<&PiecewisePoly> = self.terms.iter().flat_map(|t| [&t.kernel, &t.image]).collect();
        let mut pts = refine(&fs);
        pts.extend(extra.iter().cloned());
        pts.sort();
        pts.dedup();
        pts.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect()
    }

    fn kernel_degree(&self) -> usize {
        self.terms.iter().filter_map(|t| t.kernel.degree()).max().unwrap_or(0)
    }

    /// `(∫ w_k f)_k`.
    pub fn coefficients(&self, f: &PiecewisePoly) -> Vec<Rational> {
        self.terms.iter().map(|t| integrate(&t.kernel, f)).collect()
    }

    /// `Σ_k c_k φ_k`.
    pub fn combination(&self, c: &[Rational]) -> Result<PiecewisePoly> {
        let mut out = PiecewisePoly::zero();
        for (t, ck) in self.terms.iter().zip(c) {
            if !ck.is_zero() {
                out = out.add(&t.image.scale(ck))?;
            }
        }
        Ok(out)
    }

    /// The Gram matrix `G[k][l] = ∫ w_k φ_l`.
    pub fn gram(&self) -> Matrix {
        self.terms
            .iter()
            .map(|a| self.terms.iter().map(|b| integrate(&a.kernel, &b.image)).collect())
            .collect()
    }

    /// `T² = T` exactly: on every reachable coefficient vector `c`,
    /// `Σ (G c)_k φ_k = Σ c_k φ_k`.
    pub fn is_projection(&self) -> Result<bool> {
        let g = self.gram();
        for c in frop_image_subspace(self, &IntervalRegion::full()).basis {
            let gc: Vec<Rational> = g.iter().map(|row| linalg::dot(row, &c)).collect();
            if self.combination(&gc)? != self.combination(&c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn frop_apply(t: &FiniteRankOp, f: &PiecewisePoly) -> Result<PiecewisePoly> {
    t.combination(&t.coefficients(f))
}

/// A subspace of coefficient space `ℚ^rank`, given by a reduced basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientSubspace {
    pub ambient: usize,
    pub basis: Matrix,
}

impl CoefficientSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, c: &[Rational]) -> bool {
        let mut m = self.basis.clone();
        m.push(c.to_vec());
        linalg::rank(&m, self.ambient) == self.dim()
    }
}

/// Coefficient vectors `(∫ w_k f)_k` over all `f` supported in `r`: the
/// orthogonal complement of `{c : Σ c_k w_k = 0 a.e. on r}`.
pub fn frop_image_subspace(t: &FiniteRankOp, r: &IntervalRegion) -> CoefficientSubspace {
    let rank = t.rank();
    let mut rows: Matrix = Vec::new();
    for (a, b) in t.grid(&r.breakpoints()) {
        if !r.contains_interval(&a, &b) {
            continue;
        }
        let polys: Vec<&[Rational]> = t.terms.iter().map(|x| x.kernel.poly_at(&a, &b)).collect();
        let deg = polys.iter().map(|p| p.len()).max().unwrap_or(0);
        for d in 0..deg {
            rows.push(
                polys
                    .iter()
                    .map(|p| p.get(d).cloned().unwrap_or_else(Rational::zero))
                    .collect(),
            );
        }
    }
    CoefficientSubspace {
        ambient: rank,
        basis: linalg::row_space(&rows, rank),
    }
}

/// `t^d χ_[a,b]`.
fn test_function(a: &Rational, b: &Rational, d: usize) -> PiecewisePoly {
    let mut c = vec![Rational::zero(); d + 1];
    c[d] = int(1);
    PiecewisePoly::poly_on(a, b, c).expect("grid pieces are nondegenerate")
}

fn test_functions(t: &FiniteRankOp, r: &IntervalRegion) -> Vec<PiecewisePoly> {
    let deg = t.kernel_degree();
    t.grid(&r.breakpoints())
        .into_iter()
        .filter(|(a, b)| r.contains_interval(a, b))
        .flat_map(|(a, b)| (0..=deg).map(move |d| test_function(&a, &b, d)))
        .collect()
}

/// Some `f` supported in `r` with `(∫ w_k f)_k = c`, built from test
/// functions; `None` if `c` is not reachable from `r`.
fn realize_coefficients(t: &FiniteRankOp, r: &IntervalRegion, c: &[Rational]) -> Result<Option<PiecewisePoly>> {
    let deg = t.kernel_degree();
    let mut cols = Vec::new();
    for (a, b) in t.grid(&r.breakpoints()) {
        if r.contains_interval(&a, &b) {
            for d in 0..=deg {
                cols.push((a.clone(), b.clone(), d));
            }
        }
    }
    let mom: Matrix = t
        .terms
        .iter()
        .map(|x| {
            cols.iter()
                .map(|(a, b, d)| integrate_on(&x.kernel, &test_function(a, b, *d), a, b))
                .collect()
        })
        .collect();
    let Some(x) = linalg::solve(&mom, cols.len(), c) else {
        return Ok(None);
    };
    let mut f = PiecewisePoly::zero();
    for ((a, b, d), xi) in cols.iter().zip(&x) {
        if !xi.is_zero() {
            f = f.add(&test_function(a, b, *d).scale(xi))?;
        }
    }
    Ok(Some(f))
}

/// The range-support structure on the refinement of the images: each piece
/// `j` maps reachable coefficients `y` (in a basis of the full image
/// subspace) to the polynomial coefficients of the range element there.
struct RangeModel {
    pieces: Vec<(Rational, Rational)>,
    blocks: Vec<Matrix>,
    image_basis: Matrix,
}

impl RangeModel {
    fn new(t: &FiniteRankOp) -> Result<Self> {
        let image = frop_image_subspace(t, &IntervalRegion::full());
        let pieces = t.grid(&[]);
        if pieces.len() > 64 {
            return Err(Error::Budget(format!("{} refinement pieces", pieces.len())));
        }
        let blocks = pieces
            .iter()
            .map(|(a, b)| {
                let polys: Vec<&[Rational]> = t.terms.iter().map(|x| x.image.poly_at(a, b)).collect();
                let deg = polys.iter().map(|p| p.len()).max().unwrap_or(0);
                (0..deg)
                    .map(|e| {
                        image
                            .basis
                            .iter()
                            .map(|bv| {
                                polys
                                    .iter()
                                    .zip(bv)
                                    .map(|(p, ck)| p.get(e).map_or_else(Rational::zero, |x| x * ck))
                                    .sum()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(RangeModel {
            pieces,
            blocks,
            image_basis: image.basis,
        })
    }

    fn dim(&self) -> usize {
        self.image_basis.len()
    }

    fn stacked(&self, zero: u64) -> Matrix {
        (0..self.pieces.len())
            .filter(|j| zero >> j & 1 == 1)
            .flat_map(|j| self.blocks[j].iter().cloned())
            .collect()
    }

    fn vanishes(&self, j: usize, v: &[Rational]) -> bool {
        self.blocks[j].iter().all(|row| linalg::dot(row, v).is_zero())
    }

    /// Pieces where everything in `space` vanishes.
    fn closure(&self, space: &Matrix) -> u64 {
        (0..self.pieces.len())
            .filter(|&j| space.iter().all(|v| self.vanishes(j, v)))
            .fold(0, |m, j| m | 1 << j)
    }

    /// Closed zero sets mapped to the subspace of `y` vanishing on them.
    fn flats(&self) -> BTreeMap<u64, Matrix> {
        let d = self.dim();
        let start_space = linalg::identity(d);
        let start = self.closure(&start_space);
        let mut seen = BTreeMap::new();
        seen.insert(start, start_space);
        let mut queue = VecDeque::from([start]);
        while let Some(z) = queue.pop_front() {
            for j in (0..self.pieces.len()).filter(|j| z >> j & 1 == 0) {
                let space = linalg::nullspace(&self.stacked(z | 1 << j), d);
                let next = self.closure(&space);
                if let std::collections::btree_map::Entry::Vacant(e) = seen.entry(next) {
                    e.insert(space);
                    queue.push_back(next);
                }
            }
        }
        seen
    }

    fn region(&self, mask: u64) -> IntervalRegion {
        IntervalRegion::new(
            (0..self.pieces.len())
                .filter(|j| mask >> j & 1 == 1)
                .map(|j| self.pieces[j].clone())
                .collect(),
        )
    }

    /// A `y` in `space` nonzero on every piece outside the zero set `z`.
    fn generic(&self, space: &Matrix, z: u64) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.dim()];
        for j in (0..self.pieces.len()).filter(|j| z >> j & 1 == 0) {
            if !self.vanishes(j, &y) {
                continue;
            }
            let v = space
                .iter()
                .find(|v| !self.vanishes(j, v))
                .expect("pieces outside a closed set are reachable");
            let live: Vec<usize> = (0..self.pieces.len()).filter(|&k| !self.vanishes(k, &y)).collect();
            y = (1..=self.pieces.len() as i64 + 1)
                .map(|a| y.iter().zip(v).map(|(p, q)| p + int(a) * q).collect::<Vec<_>>())
                .find(|cand| live.iter().chain([&j]).all(|&k| !self.vanishes(k, cand)))
                .expect("at most one cancelling value per piece");
        }
        y
    }

    fn coefficients_of(&self, y: &[Rational], rank: usize) -> Vec<Rational> {
        let mut c = vec![Rational::zero(); rank];
        for (yi, b) in y.iter().zip(&self.image_basis) {
            for (ck, bk) in c.iter_mut().zip(b) {
                *ck += yi * bk;
            }
        }
        c
    }
}

/// An achievable range support with a function realizing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeSupport {
    pub region: IntervalRegion,
    /// `g` with `supp(T g) = region`, scaled to be monic on its first
    /// nonzero piece.
    pub realizer: PiecewisePoly,
}

/// All supports of range elements, in ascending order of their piece masks
/// on the common refinement (so `∅` first).
pub fn frop_range_supports_detailed(t: &FiniteRankOp) -> Result<Vec<RangeSupport>> {
    let model = RangeModel::new(t)?;
    let all = if model.pieces.len() == 64 {
        u64::MAX
    } else {
        (1u64 << model.pieces.len()) - 1
    };
    let mut by_support: BTreeMap<u64, Matrix> = BTreeMap::new();
    for (z, space) in model.flats() {
        by_support.insert(all & !z, space);
    }
    let mut out = Vec::with_capacity(by_support.len());
    for (mask, space) in by_support {
        let y = model.generic(&space, all & !mask);
        let c = model.coefficients_of(&y, t.rank());
        let realizer = if mask == 0 {
            PiecewisePoly::zero()
        } else {
            realize_coefficients(t, &IntervalRegion::full(), &c)?
                .ok_or_else(|| Error::Internal("reachable coefficients without a realizer".into()))?
                .normalized()
        };
        out.push(RangeSupport {
            region: model.region(mask),
            realizer,
        });
    }
    Ok(out)
}

pub fn frop_range_supports(t: &FiniteRankOp) -> Result<Vec<IntervalRegion>> {
    Ok(frop_range_supports_detailed(t)?.into_iter().map(|s| s.region).collect())
}

/// A pair of functions refuting one of the defining implications.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalWitness {
    pub kind: WitnessKind,
    pub f: PiecewisePoly,
    pub g: PiecewisePoly,
    pub note: String,
}

impl IntervalWitness {
    pub fn replays(&self, t: &FiniteRankOp) -> Result<bool> {
        let tf = frop_apply(t, &self.f)?;
        let tg = frop_apply(t, &self.g)?;
        Ok(match self.kind {
            WitnessKind::Sbp => pp_disjoint(&self.f, &tg) && !pp_disjoint(&tf, &tg),
            WitnessKind::Scp => pp_band_contains(&tg, &self.f) && !pp_band_contains(&tg, &tf),
            _ => false,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalVerdict {
    pub holds: bool,
    pub witness: Option<IntervalWitness>,
}

fn check(t: &FiniteRankOp, kind: WitnessKind) -> Result<IntervalVerdict> {
    let supports = frop_range_supports_detailed(t)?;
    for s in supports.iter().filter(|s| !s.region.is_null()) {
        let sbp = matches!(kind, WitnessKind::Sbp);
        let domain = if sbp { s.region.complement() } else { s.region.clone() };
        let bad = |img: &IntervalRegion| {
            if sbp {
                !img.is_disjoint(&s.region)
            } else {
                !img.is_subset(&s.region)
            }
        };
        let sub = frop_image_subspace(t, &domain);
        let mut violated = false;
        for c in &sub.basis {
            if bad(&pp_support(&t.combination(c)?)) {
                violated = true;
                break;
            }
        }
        if !violated {
            continue;
        }
        for f in test_functions(t, &domain) {
            let tf = frop_apply(t, &f)?;
            if bad(&pp_support(&tf)) {
                let note = match kind {
                    WitnessKind::Sbp => format!("f lives off {} but T f = {} meets it", s.region, tf),
                    _ => format!("f lives in {} but T f = {} leaves it", s.region, tf),
                };
                return Ok(IntervalVerdict {
                    holds: false,
                    witness: Some(IntervalWitness {
                        kind,
                        f,
                        g: s.realizer.clone(),
                        note,
                    }),
                });
            }
        }
        return Err(Error::Internal(
            "violation found without a test-function witness".into(),
        ));
    }
    Ok(IntervalVerdict {
        holds: true,
        witness: None,
    })
}

/// `f ⊥ Tg ⟹ Tf ⊥ Tg` for all piecewise-polynomial `f, g`.
pub fn frop_is_sbp(t: &FiniteRankOp) -> Result<IntervalVerdict> {
    check(t, WitnessKind::Sbp)
}

/// `f ◁ Tg ⟹ Tf ◁ Tg` for all piecewise-polynomial `f, g`.
pub fn frop_is_scp(t: &FiniteRankOp) -> Result<IntervalVerdict> {
    check(t, WitnessKind::Scp)
}

/// Closure of a family of regions under pairwise union, pairwise
/// intersection and relative complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionClosures {
    pub union: bool,
    pub intersection: bool,
    pub complement: bool,
}

pub fn region_closures(family: &[IntervalRegion]) -> RegionClosures {
    let set: BTreeSet<&IntervalRegion> = family.iter().collect();
    let mut out = RegionClosures {
        union: true,
        intersection: true,
        complement: true,
    };
    for a in family {
        for b in family {
            out.union &= set.contains(&a.union(b));
            out.intersection &= set.contains(&a.intersection(b));
            if a.is_subset(b) {
                out.complement &= set.contains(&b.difference(a));
            }
        }
    }
    out
}

fn half() -> Rational {
    frac(1, 2)
}

/// Kernels `2χ_[0,1/2]` and `tχ_[0,1/2]`, images `1` and `tχ_[0,1/2]`.
pub fn half_interval_example() -> FiniteRankOp {
    let t_half = PiecewisePoly::poly_on(&int(0), &half(), vec![int(0), int(1)]).expect("valid");
    FiniteRankOp::new(vec![
        Term {
            kernel: PiecewisePoly::poly_on(&int(0), &half(), vec![int(2)]).expect("valid"),
            image: PiecewisePoly::constant(int(1)),
        },
        Term {
            kernel: t_half.clone(),
            image: t_half,
        },
    ])
    .expect("small")
}

/// The projection onto `span{1, t}` with kernels `4 - 6t` and `-6 + 12t`,
/// biorthogonal to the images.
pub fn linear_projection_example() -> FiniteRankOp {
    let poly = |c: Vec<Rational>| PiecewisePoly::poly_on(&int(0), &int(1), c).expect("valid");
    FiniteRankOp::new(vec![
        Term {
            kernel: poly(vec![int(4), int(-6)]),
            image: poly(vec![int(1)]),
        },
        Term {
            kernel: poly(vec![int(-6), int(12)]),
            image: poly(vec![int(0), int(1)]),
        },
    ])
    .expect("small")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::poly::tests::arb_pp;
    use proptest::prelude::*;

    fn region(iv: &[(Rational, Rational)]) -> IntervalRegion {
        IntervalRegion::new(iv.to_vec())
    }

    #[test]
    fn apply_examples() {
        let t = half_interval_example();
        let chi = PiecewisePoly::indicator(&int(0), &half()).unwrap();
        assert_eq!(t.coefficients(&chi), vec![int(1), frac(1, 8)]);
        let expected = PiecewisePoly::constant(int(1))
            .add(&t.terms()[1].image.scale(&frac(1, 8)))
            .unwrap();
        assert_eq!(frop_apply(&t, &chi).unwrap(), expected);
        let right = PiecewisePoly::poly_on(&half(), &int(1), vec![int(3), int(-1), int(5)]).unwrap();
        assert!(frop_apply(&t, &right).unwrap().is_zero());
        assert!(frop_apply(&FiniteRankOp::zero(), &chi).unwrap().is_zero());
    }

    #[test]
    fn range_supports_examples() {
        let halves = frop_range_supports(&half_interval_example()).unwrap();
        assert_eq!(
            halves,
            vec![
                IntervalRegion::empty(),
                region(&[(int(0), half())]),
                IntervalRegion::full()
            ]
        );
        assert!(!halves.contains(&region(&[(half(), int(1))])));
        let linear = frop_range_supports(&linear_projection_example()).unwrap();
        assert_eq!(linear, vec![IntervalRegion::empty(), IntervalRegion::full()]);
        assert_eq!(
            frop_range_supports(&FiniteRankOp::zero()).unwrap(),
            vec![IntervalRegion::empty()]
        );
    }

    #[test]
    fn realizers_hit_their_supports() {
        for t in [half_interval_example(), linear_projection_example()] {
            for s in frop_range_supports_detailed(&t).unwrap() {
                assert_eq!(pp_support(&frop_apply(&t, &s.realizer).unwrap()), s.region);
            }
        }
        let halves = frop_range_supports_detailed(&half_interval_example()).unwrap();
        let g = &halves[1].realizer;
        assert_eq!(
            g,
            &PiecewisePoly::poly_on(&int(0), &half(), vec![frac(-1, 4), int(1)]).unwrap()
        );
        assert_eq!(half_interval_example().coefficients(g), vec![int(0), frac(1, 96)]);
    }

    #[test]
    fn image_subspace_examples() {
        let t = half_interval_example();
        assert_eq!(frop_image_subspace(&t, &region(&[(half(), int(1))])).dim(), 0);
        assert_eq!(frop_image_subspace(&t, &region(&[(int(0), frac(1, 4))])).dim(), 2);
        assert_eq!(
            frop_image_subspace(&linear_projection_example(), &IntervalRegion::empty()).dim(),
            0
        );
    }

    #[test]
    fn sbp_examples() {
        assert!(frop_is_sbp(&half_interval_example()).unwrap().holds);
        assert!(frop_is_sbp(&linear_projection_example()).unwrap().holds);
        let t = FiniteRankOp::new(vec![Term {
            kernel: PiecewisePoly::indicator(&half(), &int(1)).unwrap(),
            image: PiecewisePoly::indicator(&int(0), &half()).unwrap(),
        }])
        .unwrap();
        let v = frop_is_sbp(&t).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.f, PiecewisePoly::indicator(&half(), &int(1)).unwrap());
        assert!(!frop_apply(&t, &w.g).unwrap().is_zero());
        assert!(w.replays(&t).unwrap());
    }

    #[test]
    fn scp_examples() {
        let t = half_interval_example();
        let v = frop_is_scp(&t).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.f, PiecewisePoly::indicator(&int(0), &half()).unwrap());
        assert_eq!(
            w.g,
            PiecewisePoly::poly_on(&int(0), &half(), vec![frac(-1, 4), int(1)]).unwrap()
        );
        assert_eq!(t.coefficients(&w.g), vec![int(0), frac(1, 96)]);
        assert!(w.replays(&t).unwrap());
        assert!(frop_is_scp(&linear_projection_example()).unwrap().holds);
        assert!(frop_is_scp(&FiniteRankOp::zero()).unwrap().holds);
    }

    #[test]
    fn linear_projection_is_a_biorthogonal_projection() {
        let t = linear_projection_example();
        assert_eq!(t.gram(), linalg::identity(2));
        assert!(t.is_projection().unwrap());
        assert!(!half_interval_example().is_projection().unwrap());
    }

    #[test]
    fn half_interval_range_supports_miss_a_relative_complement() {
        let c = region_closures(&frop_range_supports(&half_interval_example()).unwrap());
        assert!(c.union && c.intersection && !c.complement);
    }

    fn arb_frop() -> impl Strategy<Value = FiniteRankOp> {
        proptest::collection::vec((arb_pp(), arb_pp()), 0..=2).prop_map(|ts| {
            FiniteRankOp::new(ts.into_iter().map(|(kernel, image)| Term { kernel, image }).collect()).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn range_stays_inside_the_images(t in arb_frop(), f in arb_pp()) {
            let images = t.terms().iter().fold(IntervalRegion::empty(), |r, x| r.union(&pp_support(&x.image)));
            prop_assert!(pp_support(&frop_apply(&t, &f).unwrap()).is_subset(&images));
        }

        #[test]
        fn verdicts_survive_sampling(t in arb_frop(), f in arb_pp(), g in arb_pp()) {
            let tf = frop_apply(&t, &f).unwrap();
            let tg = frop_apply(&t, &g).unwrap();
            let sbp = frop_is_sbp(&t).unwrap();
            if pp_disjoint(&f, &tg) && !pp_disjoint(&tf, &tg) {
                prop_assert!(!sbp.holds);
            }
            if let Some(w) = sbp.witness {
                prop_assert!(w.replays(&t).unwrap());
            }
            let scp = frop_is_scp(&t).unwrap();
            if pp_band_contains(&tg, &f) && !pp_band_contains(&tg, &tf) {
                prop_assert!(!scp.holds);
            }
            if let Some(w) = scp.witness {
                prop_assert!(w.replays(&t).unwrap());
            }
        }
    }
}
