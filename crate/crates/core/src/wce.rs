//! Weighted conditional expectation operators `T f = Σ_j ⟨ψ_j, f⟩ u_j` with
//! pairwise disjoint blocks `A_j = supp u_j` and `supp ψ_j ⊆ A_j`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{support, AtomicSpace, SupportSet, Vector};
use crate::linalg;
use crate::norm::{norm_value, ExactOrBounded, Side};
use crate::operator::Operator;
use crate::predicates::is_sbp_with;
use crate::rational::{int, Rational};
use crate::sigma::{enumerate_sigma, minimal_supports, realize_support};
use crate::witness::Witness;

/// A validated weighted conditional expectation in canonical form: blocks
/// ordered by smallest atom, each `u_j` scaled so its first nonzero
/// coordinate is 1. Two forms of the same operator compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WceForm {
    space: AtomicSpace,
    blocks: Vec<SupportSet>,
    u: Vec<Vector>,
    psi: Vec<Vector>,
}

impl WceForm {
    pub fn space(&self) -> &AtomicSpace {
        &self.space
    }

    pub fn blocks(&self) -> &[SupportSet] {
        &self.blocks
    }

    pub fn u(&self) -> &[Vector] {
        &self.u
    }

    pub fn psi(&self) -> &[Vector] {
        &self.psi
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The matrix with `T e_i = Σ_j ψ_j[i] u_j`.
    pub fn to_operator(&self) -> Operator {
        let n = self.space.dim();
        let mut entries = linalg::zeros(n, n);
        for (u, psi) in self.u.iter().zip(&self.psi) {
            for k in support(u).indices() {
                for i in support(psi).indices() {
                    entries[k][i] += &u[k] * &psi[i];
                }
            }
        }
        Operator::new(self.space.clone(), entries).expect("square by construction")
    }

    /// `⟨ψ_j, u_j⟩ = 1` for every block, which for this shape is the same
    /// as the matrix being idempotent.
    pub fn pairings_are_one(&self) -> bool {
        self.u
            .iter()
            .zip(&self.psi)
            .all(|(u, psi)| linalg::dot(u, psi) == int(1))
    }
}

pub fn make_wce(space: AtomicSpace, blocks: Vec<SupportSet>, u: Vec<Vector>, psi: Vec<Vector>) -> Result<WceForm> {
    let n = space.dim();
    if u.len() != blocks.len() || psi.len() != blocks.len() {
        return Err(Error::DimensionMismatch {
            expected: blocks.len(),
            found: if u.len() != blocks.len() { u.len() } else { psi.len() },
        });
    }
    let all = SupportSet::full(n);
    let mut covered = SupportSet::EMPTY;
    for (j, &a) in blocks.iter().enumerate() {
        if a.is_empty() || !a.is_subset(all) {
            return Err(Error::InvalidBlock { block: j + 1 });
        }
        if let Some(i) = covered.intersection(a).first_index() {
            return Err(Error::OverlappingBlocks(i + 1));
        }
        covered = covered.union(a);
    }
    let mut parts = Vec::with_capacity(blocks.len());
    for (j, ((a, mut uj), mut pj)) in blocks.into_iter().zip(u).zip(psi).enumerate() {
        let block = j + 1;
        space.check_dim(&uj)?;
        space.check_dim(&pj)?;
        let su = support(&uj);
        if su.is_empty() {
            return Err(Error::ZeroVector { block });
        }
        if !su.is_subset(a) {
            return Err(Error::VectorEscapesBlock { block });
        }
        if !support(&pj).is_subset(a) {
            return Err(Error::FunctionalEscapesBlock { block });
        }
        if su != a {
            return Err(Error::VectorDoesNotFillBlock { block });
        }
        if pj.is_zero() {
            return Err(Error::ZeroFunctional { block });
        }
        let lead = uj.normalize_leading().expect("nonzero");
        pj = pj.scale(&lead);
        parts.push((a, uj, pj));
    }
    parts.sort_by_key(|(a, _, _)| a.first_index());
    let mut form = WceForm {
        space,
        blocks: Vec::new(),
        u: Vec::new(),
        psi: Vec::new(),
    };
    for (a, uj, pj) in parts {
        form.blocks.push(a);
        form.u.push(uj);
        form.psi.push(pj);
    }
    Ok(form)
}

fn check_partition(n: usize, partition: &[SupportSet]) -> Result<()> {
    let all = SupportSet::full(n);
    let mut covered = SupportSet::EMPTY;
    for (j, &a) in partition.iter().enumerate() {
        if a.is_empty() || !a.is_subset(all) {
            return Err(Error::InvalidBlock { block: j + 1 });
        }
        if let Some(i) = covered.intersection(a).first_index() {
            return Err(Error::OverlappingBlocks(i + 1));
        }
        covered = covered.union(a);
    }
    Ok(())
}

/// The averaging form: `u_j = χ_{A_j}`, `ψ_j = χ_{A_j} / card(A_j)`.
pub fn averaging_form(space: AtomicSpace, partition: &[SupportSet]) -> Result<WceForm> {
    let n = space.dim();
    check_partition(n, partition)?;
    let mut u = Vec::new();
    let mut psi = Vec::new();
    for &a in partition {
        let mut uj = Vector::zeros(n);
        for i in a.indices() {
            uj[i] = int(1);
        }
        let inv = Rational::new(1.into(), (a.len() as i64).into());
        psi.push(uj.scale(&inv));
        u.push(uj);
    }
    make_wce(space, partition.to_vec(), u, psi)
}

/// Matrix of the conditional expectation onto the σ-algebra generated by
/// `partition`; atoms outside every block map to 0.
pub fn make_averaging(space: AtomicSpace, partition: &[SupportSet]) -> Result<Operator> {
    Ok(averaging_form(space, partition)?.to_operator())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decomposition {
    Form(WceForm),
    NotSbp(Witness),
}

/// Writes a semi band preserving operator in weighted conditional
/// expectation form, or returns the witness that it is not semi band
/// preserving.
pub fn decompose_wce(t: &Operator) -> Result<Decomposition> {
    decompose_impl(t, false)
}

/// Fault-injection entry point for the self-test: flips the sign of the
/// first recovered functional before the reassembly check.
#[doc(hidden)]
pub fn decompose_wce_tampered(t: &Operator) -> Result<Decomposition> {
    decompose_impl(t, true)
}

fn decompose_impl(t: &Operator, tamper: bool) -> Result<Decomposition> {
    let sigma = enumerate_sigma(t)?;
    let verdict = is_sbp_with(t, &sigma)?;
    if let Some(w) = verdict.witness {
        return Ok(Decomposition::NotSbp(w));
    }
    let n = t.dim();
    let blocks = minimal_supports(&sigma);
    let mut u = Vec::with_capacity(blocks.len());
    let mut psi = Vec::with_capacity(blocks.len());
    for (j, &a) in blocks.iter().enumerate() {
        let g = realize_support(t, a)?;
        let mut uj = t.apply(&g)?;
        uj.normalize_leading();
        let pivot = a.first_index().expect("minimal supports are nonempty");
        let mut pj = Vector((0..n).map(|i| t.entry(pivot, i) / &uj[pivot]).collect());
        if tamper && j == 0 {
            pj = pj.scale(&int(-1));
        }
        u.push(uj);
        psi.push(pj);
    }
    let form = make_wce(t.space().clone(), blocks, u, psi)
        .map_err(|e| Error::Internal(format!("recovered form is invalid: {e}")))?;
    if form.to_operator().entries() != t.entries() {
        return Err(Error::Internal("reassembled matrix differs from the operator".into()));
    }
    Ok(Decomposition::Form(form))
}

/// `max_j ‖ψ_j‖_* ‖u_j‖`, the exact norm for disjoint blocks.
pub fn wce_operator_norm(form: &WceForm) -> Result<ExactOrBounded> {
    let mut best = ExactOrBounded::Exact(Rational::zero());
    for (u, psi) in form.u.iter().zip(&form.psi) {
        let term = norm_value(&form.space, psi, Side::Dual)?.mul(&norm_value(&form.space, u, Side::Primal)?);
        best = best.max(term)?;
    }
    Ok(best.simplify())
}
