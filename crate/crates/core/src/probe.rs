//! Search for norm-one projections with the semi containment property that
//! nevertheless fail to be weighted conditional expectations.
//!
//! A finding is data: every candidate that passes the four hypotheses and
//! fails the decomposition is recorded together with the evidence for each
//! fact, and can be re-verified from scratch.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generate::{derive_seed, rng, small_rational};
use crate::lattice::{AtomicSpace, Exponent, Vector};
use crate::linalg::{self, Matrix};
use crate::norm::is_strictly_monotone;
use crate::operator::Operator;
use crate::opnorm::operator_norm;
use crate::predicates::is_scp;
use crate::rational::{format_rational, frac, int, Rational};
use crate::wce::{decompose_wce, Decomposition};

pub const FAMILY_RANK_ONE: &str = "rank-one-grid";
pub const FAMILY_RANDOM_PROJECTION: &str = "random-projection";
pub const FAMILY_ORTHOGONAL_PROJECTION: &str = "orthogonal-projection";

pub const FACT_PROJECTION: &str = "projection";
pub const FACT_NORM_ONE: &str = "norm_one";
pub const FACT_SCP: &str = "scp";
pub const FACT_STRICTLY_MONOTONE: &str = "strictly_monotone";
pub const FACT_WCE: &str = "wce_decomposable";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeFact {
    pub holds: bool,
    pub evidence: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeFinding {
    pub family: String,
    pub candidate: usize,
    pub space: AtomicSpace,
    pub operator: Operator,
    pub facts: BTreeMap<String, ProbeFact>,
}

impl ProbeFinding {
    /// Recomputes every fact from the operator alone and compares verdicts
    /// and evidence with the recorded ones.
    pub fn reverify(&self) -> Result<bool> {
        let t = self.operator.with_space(self.space.clone())?;
        Ok(evaluate(&t)?.is_some_and(|facts| facts == self.facts))
    }
}

/// Evaluates the five facts; `None` when the candidate fails one of the
/// hypotheses or decomposes, so it is not a finding.
fn evaluate(t: &Operator) -> Result<Option<BTreeMap<String, ProbeFact>>> {
    let mut facts = BTreeMap::new();
    let fact = |holds: bool, evidence: String| ProbeFact { holds, evidence };

    if !t.is_projection() {
        return Ok(None);
    }
    facts.insert(FACT_PROJECTION.into(), fact(true, "T*T = T entrywise".into()));

    let norm = match operator_norm(t.space(), t) {
        Ok(v) => v,
        Err(Error::Indeterminate(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    match norm.is_one() {
        Ok(true) => {}
        Ok(false) | Err(Error::Indeterminate(_)) => return Ok(None),
        Err(e) => return Err(e),
    }
    facts.insert(
        FACT_NORM_ONE.into(),
        fact(true, format!("operator norm = {}", norm.describe())),
    );

    let (mono, _) = is_strictly_monotone(t.space());
    if !mono {
        return Ok(None);
    }
    facts.insert(
        FACT_STRICTLY_MONOTONE.into(),
        fact(true, format!("p = {} < inf", t.space().exponent())),
    );

    if !is_scp(t)?.holds {
        return Ok(None);
    }
    let sigma = crate::sigma::enumerate_sigma(t)?;
    let listed: Vec<String> = sigma.supports.iter().map(|s| s.to_string()).collect();
    facts.insert(
        FACT_SCP.into(),
        fact(
            true,
            format!("columns stay inside every member of {{{}}}", listed.join(", ")),
        ),
    );

    match decompose_wce(t)? {
        Decomposition::Form(_) => Ok(None),
        Decomposition::NotSbp(w) => {
            facts.insert(
                FACT_WCE.into(),
                fact(
                    false,
                    format!(
                        "not semi band preserving: f = {}, g = {}; {}",
                        show(&w.f),
                        show(&w.g),
                        w.note
                    ),
                ),
            );
            Ok(Some(facts))
        }
    }
}

fn show(v: &Vector) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

fn grid() -> Vec<Rational> {
    vec![int(-1), frac(-1, 2), int(0), frac(1, 2), int(1)]
}

fn grid_vectors(n: usize) -> Vec<Vector> {
    let g = grid();
    let mut out = vec![Vector::zeros(0)];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                g.iter().map(move |x| {
                    let mut w = v.0.clone();
                    w.push(x.clone());
                    Vector(w)
                })
            })
            .collect();
    }
    out
}

/// `u ψ^T` over the grid, with `u` leading 1 and `⟨ψ, u⟩ = 1`.
fn rank_one_candidates(space: &AtomicSpace, budget: usize) -> Vec<Operator> {
    let n = space.dim();
    let vs = grid_vectors(n);
    let us: Vec<&Vector> = vs
        .iter()
        .filter(|u| u.iter().find(|x| **x != int(0)) == Some(&int(1)))
        .collect();
    let mut out = Vec::new();
    'outer: for u in us {
        for psi in &vs {
            if linalg::dot(u, psi) != int(1) {
                continue;
            }
            let m: Matrix = (0..n).map(|k| (0..n).map(|i| &u[k] * &psi[i]).collect()).collect();
            out.push(Operator::new(space.clone(), m).expect("square"));
            if out.len() == budget {
                break 'outer;
            }
        }
    }
    out
}

fn random_matrix(r: &mut impl rand::Rng, rows: usize, cols: usize) -> Matrix {
    (0..rows)
        .map(|_| (0..cols).map(|_| small_rational(r)).collect())
        .collect()
}

fn inverse(m: &Matrix) -> Option<Matrix> {
    let k = m.len();
    if linalg::rank(m, k) < k {
        return None;
    }
    let id = linalg::identity(k);
    let cols: Vec<Vec<Rational>> = (0..k).map(|j| linalg::solve(m, k, &id[j])).collect::<Option<_>>()?;
    Some(linalg::transpose(&cols, k))
}

/// `U (Ψ₀ U)⁻¹ Ψ₀` for random `U` (n×k) and `Ψ₀` (k×n); when `orthogonal`,
/// `Ψ₀ = Uᵀ W` so the projection is self-adjoint for the weighted inner
/// product.
fn projection_candidates(space: &AtomicSpace, seed: u64, budget: usize, orthogonal: bool) -> Vec<Operator> {
    let n = space.dim();
    if n < 2 {
        return Vec::new();
    }
    let family = if orthogonal {
        FAMILY_ORTHOGONAL_PROJECTION
    } else {
        FAMILY_RANDOM_PROJECTION
    };
    (0..budget as u64)
        .filter_map(|i| {
            let mut r = rng(derive_seed(seed, family, (n as u64) << 32 | i));
            let k = 1 + (i as usize) % (n - 1);
            let u = random_matrix(&mut r, n, k);
            let psi0 = if orthogonal {
                let w = space.weights();
                (0..k).map(|a| (0..n).map(|j| &u[j][a] * &w[j]).collect()).collect()
            } else {
                random_matrix(&mut r, k, n)
            };
            let inv = inverse(&linalg::matmul(&psi0, &u))?;
            let p = linalg::matmul(&linalg::matmul(&u, &inv), &psi0);
            Operator::new(space.clone(), p).ok()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyCount {
    pub family: String,
    pub dim: usize,
    pub examined: usize,
    pub findings: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeReport {
    pub p: Exponent,
    pub dims: RangeInclusive<usize>,
    pub budget: usize,
    pub seed: u64,
    pub counts: Vec<FamilyCount>,
    pub findings: Vec<ProbeFinding>,
}

pub fn probe_families(p: &Exponent) -> Vec<&'static str> {
    let mut out = vec![FAMILY_RANK_ONE, FAMILY_RANDOM_PROJECTION];
    if *p == Exponent::Two {
        out.push(FAMILY_ORTHOGONAL_PROJECTION);
    }
    out
}

/// Runs the probe over the given families (all of them when `families` is
/// `None`) on the unweighted spaces with `dims` atoms.
pub fn probe_projection_families(
    p: Exponent,
    dims: RangeInclusive<usize>,
    budget: usize,
    seed: u64,
    families: Option<&[&str]>,
) -> Result<ProbeReport> {
    if *dims.start() == 0 || dims.start() > dims.end() {
        return Err(Error::Parse(format!(
            "invalid dimension range {}..{}",
            dims.start(),
            dims.end()
        )));
    }
    if !is_strictly_monotone(&AtomicSpace::unweighted(2, p.clone())).0 {
        return Err(Error::Hypothesis(
            "space not strictly monotone; probe requires strict monotonicity".into(),
        ));
    }
    let mut counts = Vec::new();
    let mut findings = Vec::new();
    for n in dims.clone() {
        let space = AtomicSpace::unweighted(n, p.clone());
        for family in probe_families(&p) {
            if families.is_some_and(|f| !f.contains(&family)) {
                continue;
            }
            let candidates = match family {
                FAMILY_RANK_ONE => rank_one_candidates(&space, budget),
                FAMILY_RANDOM_PROJECTION => projection_candidates(&space, seed, budget, false),
                _ => projection_candidates(&space, seed, budget, true),
            };
            let evaluated: Vec<Option<BTreeMap<String, ProbeFact>>> =
                candidates.par_iter().map(evaluate).collect::<Result<_>>()?;
            let mut found = 0;
            for (i, (t, facts)) in candidates.iter().zip(evaluated).enumerate() {
                if let Some(facts) = facts {
                    found += 1;
                    findings.push(ProbeFinding {
                        family: family.to_string(),
                        candidate: i,
                        space: space.clone(),
                        operator: t.clone(),
                        facts,
                    });
                }
            }
            counts.push(FamilyCount {
                family: family.to_string(),
                dim: n,
                examined: candidates.len(),
                findings: found,
            });
        }
    }
    Ok(ProbeReport {
        p,
        dims,
        budget,
        seed,
        counts,
        findings,
    })
}

pub fn probe_projections(p: Exponent, dims: RangeInclusive<usize>, budget: usize, seed: u64) -> Result<ProbeReport> {
    probe_projection_families(p, dims, budget, seed, None)
}
