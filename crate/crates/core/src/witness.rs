use std::fmt;

use crate::error::Result;
use crate::lattice::{support, SupportSet, Vector};
use crate::operator::Operator;
use crate::sigma::is_achievable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    Union,
    Intersection,
    Complement,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Law::Union => "union",
            Law::Intersection => "intersection",
            Law::Complement => "complement",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessKind {
    /// `f ⊥ Tg` but not `Tf ⊥ Tg`.
    Sbp,
    /// `f ◁ Tg` but not `Tf ◁ Tg`.
    Scp,
    /// `f ⊥ g` but not `Tf ⊥ g`.
    BandPreserving,
    /// `f ⊥ g` but not `Tf ⊥ Tg`.
    DisjointnessPreserving,
    /// `f ◁ g` but not `Tf ◁ Tg`.
    Beta,
    /// `supp Tf` and `supp Tg` are achievable but `missing` is not.
    Closure { law: Law, missing: SupportSet },
}

impl WitnessKind {
    pub fn label(&self) -> &'static str {
        match self {
            WitnessKind::Sbp => "sbp-violation",
            WitnessKind::Scp => "scp-violation",
            WitnessKind::BandPreserving => "bp-violation",
            WitnessKind::DisjointnessPreserving => "dp-violation",
            WitnessKind::Beta => "beta-violation",
            WitnessKind::Closure { .. } => "closure-violation",
        }
    }
}

/// A concrete pair `(f, g)` refuting one of the defining implications.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub kind: WitnessKind,
    pub f: Vector,
    pub g: Vector,
    pub note: String,
}

impl Witness {
    /// Re-evaluates the defining implication on `(f, g)` and reports whether
    /// the violation is reproduced.
    pub fn replays(&self, t: &Operator) -> Result<bool> {
        let f = support(&t.apply(&self.f)?);
        let g = support(&t.apply(&self.g)?);
        let (sf, sg) = (support(&self.f), support(&self.g));
        Ok(match &self.kind {
            WitnessKind::Sbp => sf.is_disjoint(g) && !f.is_disjoint(g),
            WitnessKind::Scp => sf.is_subset(g) && !f.is_subset(g),
            WitnessKind::BandPreserving => sf.is_disjoint(sg) && !f.is_disjoint(sg),
            WitnessKind::DisjointnessPreserving => sf.is_disjoint(sg) && !f.is_disjoint(g),
            WitnessKind::Beta => sf.is_subset(sg) && !f.is_subset(g),
            WitnessKind::Closure { law, missing } => {
                let derived = match law {
                    Law::Union => f.union(g),
                    Law::Intersection => f.intersection(g),
                    Law::Complement if f.is_subset(g) => g.difference(f),
                    Law::Complement => return Ok(false),
                };
                derived == *missing && !is_achievable(t, *missing)
            }
        })
    }
}
