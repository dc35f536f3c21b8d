//! Decision procedures for the disjointness-type conditions on matrix
//! operators. Each reduces a quantifier over all pairs `(f, g)` to a finite
//! check over atoms and the achievable-support family.

use num_traits::Zero;

use crate::error::Result;
use crate::lattice::Vector;
use crate::operator::Operator;
use crate::sigma::{enumerate_sigma, realize_support, SigmaTable};
use crate::witness::{Witness, WitnessKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    fn holds() -> Self {
        Verdict {
            holds: true,
            witness: None,
        }
    }

    fn fails(witness: Witness) -> Self {
        Verdict {
            holds: false,
            witness: Some(witness),
        }
    }
}

/// Band preserving (`f ⊥ g ⟹ Tf ⊥ g`): on atoms, exactly the diagonal
/// matrices.
pub fn is_band_preserving(t: &Operator) -> Verdict {
    let n = t.dim();
    for i in 0..n {
        for k in (0..n).filter(|&k| k != i) {
            if !t.entry(k, i).is_zero() {
                return Verdict::fails(Witness {
                    kind: WitnessKind::BandPreserving,
                    f: Vector::basis(n, i),
                    g: Vector::basis(n, k),
                    note: format!("entry ({}, {}) is off the diagonal", k + 1, i + 1),
                });
            }
        }
    }
    Verdict::holds()
}

/// Disjointness preserving (`f ⊥ g ⟹ Tf ⊥ Tg`): columns have pairwise
/// disjoint supports.
pub fn is_disjointness_preserving(t: &Operator) -> Verdict {
    let n = t.dim();
    let cols: Vec<_> = (0..n).map(|i| t.column_support(i)).collect();
    for i in 0..n {
        for j in i + 1..n {
            if !cols[i].is_disjoint(cols[j]) {
                return Verdict::fails(Witness {
                    kind: WitnessKind::DisjointnessPreserving,
                    f: Vector::basis(n, i),
                    g: Vector::basis(n, j),
                    note: format!(
                        "columns {} and {} share atoms {}",
                        i + 1,
                        j + 1,
                        cols[i].intersection(cols[j])
                    ),
                });
            }
        }
    }
    Verdict::holds()
}

/// Condition β (`f ◁ g ⟹ Tf ◁ Tg`).
///
/// A violation needs some `g` supported on `G` and a row `k` reached from
/// `G` with `(Tg)_k = 0`. The kernel of row `k` restricted to `G` escapes
/// every coordinate hyperplane exactly when the restricted row has two or
/// more nonzeros, so β holds iff every row has at most one nonzero entry.
pub fn is_beta(t: &Operator) -> Verdict {
    let n = t.dim();
    for k in 0..n {
        let row = t.row_support(k);
        if row.len() < 2 {
            continue;
        }
        let mut idx = row.indices();
        let (i, j) = (idx.next().unwrap(), idx.next().unwrap());
        let mut g = Vector::basis(n, i)
            .scale(t.entry(k, j))
            .add_scaled(&-t.entry(k, i).clone(), &Vector::basis(n, j));
        g.normalize_leading();
        return Verdict::fails(Witness {
            kind: WitnessKind::Beta,
            f: Vector::basis(n, i),
            g,
            note: format!("row {} cancels on atoms {} and {}", k + 1, i + 1, j + 1),
        });
    }
    Verdict::holds()
}

/// Semi band preserving against a precomputed `Σ_T`: for every achievable
/// `S` and atom `i ∉ S`, `supp(T e_i)` misses `S`.
pub fn is_sbp_with(t: &Operator, sigma: &SigmaTable) -> Result<Verdict> {
    let n = t.dim();
    let cols: Vec<_> = (0..n).map(|i| t.column_support(i)).collect();
    for &s in &sigma.supports {
        for i in (0..n).filter(|&i| !s.contains_index(i)) {
            if !cols[i].is_disjoint(s) {
                return Ok(Verdict::fails(Witness {
                    kind: WitnessKind::Sbp,
                    f: Vector::basis(n, i),
                    g: realize_support(t, s)?,
                    note: format!("atom {} lies outside {s} but T e_{} meets it", i + 1, i + 1),
                }));
            }
        }
    }
    Ok(Verdict::holds())
}

pub fn is_sbp(t: &Operator) -> Result<Verdict> {
    is_sbp_with(t, &enumerate_sigma(t)?)
}

/// Semi containment preserving against a precomputed `Σ_T`: for every
/// achievable `S` and atom `i ∈ S`, `supp(T e_i) ⊆ S`.
pub fn is_scp_with(t: &Operator, sigma: &SigmaTable) -> Result<Verdict> {
    let n = t.dim();
    let cols: Vec<_> = (0..n).map(|i| t.column_support(i)).collect();
    for &s in &sigma.supports {
        for i in s.indices() {
            if !cols[i].is_subset(s) {
                return Ok(Verdict::fails(Witness {
                    kind: WitnessKind::Scp,
                    f: Vector::basis(n, i),
                    g: realize_support(t, s)?,
                    note: format!("atom {} lies in {s} but T e_{} leaves it", i + 1, i + 1),
                }));
            }
        }
    }
    Ok(Verdict::holds())
}

pub fn is_scp(t: &Operator) -> Result<Verdict> {
    is_scp_with(t, &enumerate_sigma(t)?)
}
