//! Report documents produced by the command-line tools.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{
    frop_is_sbp, frop_is_scp, frop_range_supports, pp_support, region_closures, FiniteRankOp, IntervalVerdict,
};
use crate::io::{
    frop_dto, operator_dto, operator_from_dto, piecewise_dto, region_dto, witness_dto, FiniteRankDto, OperatorDto,
    PiecewiseDto, RegionDto, WitnessDto, Q, SCHEMA_VERSION,
};
use crate::lattice::SupportSet;
use crate::norm::ExactOrBounded;
use crate::operator::Operator;
use crate::opnorm::operator_norm;
use crate::predicates::{is_band_preserving, is_beta, is_disjointness_preserving, is_sbp_with, is_scp_with, Verdict};
use crate::probe::{ProbeFact, ProbeFinding, ProbeReport};
use crate::sigma::{enumerate_sigma, minimal_supports, verify_sigma_closures};
use crate::wce::{decompose_wce, Decomposition};

pub const CLASS_WCE: &str = "weighted conditional expectation operator";
pub const CLASS_SCP_ONLY: &str = "semi containment preserving, not semi band preserving";
pub const CLASS_NEITHER: &str = "neither semi band preserving nor semi containment preserving";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictDto {
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDto>,
}

impl From<&Verdict> for VerdictDto {
    fn from(v: &Verdict) -> Self {
        VerdictDto {
            holds: v.holds,
            witness: v.witness.as_ref().map(witness_dto),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicatesDto {
    pub band_preserving: VerdictDto,
    pub disjointness_preserving: VerdictDto,
    pub beta: VerdictDto,
    pub sbp: VerdictDto,
    pub scp: VerdictDto,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaDto {
    pub supports: Vec<Vec<usize>>,
    pub s_t: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosuresDto {
    pub union: bool,
    pub intersection: bool,
    pub complement: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDto>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormValueDto {
    Exact {
        value: Q,
    },
    /// The norm is the square root of `square`.
    Sqrt {
        square: Q,
    },
    Interval {
        lo: Q,
        hi: Q,
    },
    Unavailable {
        reason: String,
    },
}

impl From<&ExactOrBounded> for NormValueDto {
    fn from(v: &ExactOrBounded) -> Self {
        match v {
            ExactOrBounded::Exact(q) => NormValueDto::Exact { value: Q::of(q) },
            ExactOrBounded::Square(s) => NormValueDto::Sqrt { square: Q::of(s) },
            ExactOrBounded::Bounded(e) => NormValueDto::Interval {
                lo: Q::of(&e.lo),
                hi: Q::of(&e.hi),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormDto {
    pub blocks: Vec<Vec<usize>>,
    pub u: Vec<Vec<Q>>,
    pub psi: Vec<Vec<Q>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WceDto {
    Form(FormDto),
    NotSbp(WitnessDto),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub input: OperatorDto,
    pub classification: String,
    pub predicates: PredicatesDto,
    pub sigma: SigmaDto,
    pub minimal_supports: Vec<Vec<usize>>,
    pub closures: ClosuresDto,
    pub projection: bool,
    pub operator_norm: NormValueDto,
    pub wce: WceDto,
}

fn atoms(s: &[SupportSet]) -> Vec<Vec<usize>> {
    s.iter().map(|a| a.atoms()).collect()
}

fn row(v: &[crate::rational::Rational]) -> Vec<Q> {
    v.iter().map(Q::of).collect()
}

/// Runs every matrix analysis on `t`.
pub fn analyze_operator(t: &Operator, max_atoms: usize) -> Result<AnalysisReport> {
    let n = t.dim();
    if n > max_atoms {
        return Err(Error::Budget(format!("{n} atoms exceeds max-atoms {max_atoms}")));
    }
    let sigma = enumerate_sigma(t)?;
    let sbp = is_sbp_with(t, &sigma)?;
    let scp = is_scp_with(t, &sigma)?;
    let closures = verify_sigma_closures(t, &sigma)?;
    let norm = match operator_norm(t.space(), t) {
        Ok(v) => NormValueDto::from(&v),
        Err(Error::Indeterminate(reason)) => NormValueDto::Unavailable { reason },
        Err(e) => return Err(e),
    };
    let wce = match decompose_wce(t)? {
        Decomposition::Form(f) => WceDto::Form(FormDto {
            blocks: atoms(f.blocks()),
            u: f.u().iter().map(|v| row(v)).collect(),
            psi: f.psi().iter().map(|v| row(v)).collect(),
        }),
        Decomposition::NotSbp(w) => WceDto::NotSbp(witness_dto(&w)),
    };
    if matches!(wce, WceDto::Form(_)) != sbp.holds {
        return Err(Error::Internal("decomposition disagrees with the SBP verdict".into()));
    }
    let classification = if sbp.holds {
        CLASS_WCE
    } else if scp.holds {
        CLASS_SCP_ONLY
    } else {
        CLASS_NEITHER
    };
    Ok(AnalysisReport {
        schema: SCHEMA_VERSION,
        input: operator_dto(t),
        classification: classification.to_string(),
        predicates: PredicatesDto {
            band_preserving: (&is_band_preserving(t)).into(),
            disjointness_preserving: (&is_disjointness_preserving(t)).into(),
            beta: (&is_beta(t)).into(),
            sbp: (&sbp).into(),
            scp: (&scp).into(),
        },
        sigma: SigmaDto {
            supports: atoms(&sigma.supports),
            s_t: sigma.s_t.atoms(),
        },
        minimal_supports: atoms(&minimal_supports(&sigma)),
        closures: ClosuresDto {
            union: closures.union,
            intersection: closures.intersection,
            complement: closures.complement,
            witness: closures.witness.as_ref().map(witness_dto),
        },
        projection: t.is_projection(),
        operator_norm: norm,
        wce,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalWitnessDto {
    pub kind: String,
    pub f: PiecewiseDto,
    pub g: PiecewiseDto,
    /// `(∫ w_k f)_k` and `(∫ w_k g)_k`.
    pub f_coefficients: Vec<Q>,
    pub g_coefficients: Vec<Q>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalVerdictDto {
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<IntervalWitnessDto>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermSupportsDto {
    pub kernel: RegionDto,
    pub image: RegionDto,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionClosuresDto {
    pub union: bool,
    pub intersection: bool,
    pub complement: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalReport {
    pub schema: u32,
    pub input: FiniteRankDto,
    pub term_supports: Vec<TermSupportsDto>,
    pub range_supports: Vec<RegionDto>,
    pub range_closures: RegionClosuresDto,
    pub projection: bool,
    pub sbp: IntervalVerdictDto,
    pub scp: IntervalVerdictDto,
}

fn interval_verdict(t: &FiniteRankOp, v: &IntervalVerdict) -> Result<IntervalVerdictDto> {
    let witness = match &v.witness {
        None => None,
        Some(w) => {
            if !w.replays(t)? {
                return Err(Error::Internal("interval witness does not replay".into()));
            }
            Some(IntervalWitnessDto {
                kind: w.kind.label().to_string(),
                f: piecewise_dto(&w.f),
                g: piecewise_dto(&w.g),
                f_coefficients: row(&t.coefficients(&w.f)),
                g_coefficients: row(&t.coefficients(&w.g)),
                note: w.note.clone(),
            })
        }
    };
    Ok(IntervalVerdictDto {
        holds: v.holds,
        witness,
    })
}

pub fn analyze_interval(t: &FiniteRankOp) -> Result<IntervalReport> {
    let supports = frop_range_supports(t)?;
    let c = region_closures(&supports);
    Ok(IntervalReport {
        schema: SCHEMA_VERSION,
        input: frop_dto(t),
        term_supports: t
            .terms()
            .iter()
            .map(|x| TermSupportsDto {
                kernel: region_dto(&pp_support(&x.kernel)),
                image: region_dto(&pp_support(&x.image)),
            })
            .collect(),
        range_supports: supports.iter().map(region_dto).collect(),
        range_closures: RegionClosuresDto {
            union: c.union,
            intersection: c.intersection,
            complement: c.complement,
        },
        projection: t.is_projection()?,
        sbp: interval_verdict(t, &frop_is_sbp(t)?)?,
        scp: interval_verdict(t, &frop_is_scp(t)?)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactDto {
    pub holds: bool,
    pub evidence: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FindingDto {
    pub family: String,
    pub dim: usize,
    pub candidate: usize,
    pub operator: OperatorDto,
    pub facts: BTreeMap<String, FactDto>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountDto {
    pub family: String,
    pub dim: usize,
    pub examined: usize,
    pub findings: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReportDto {
    pub schema: u32,
    pub p: String,
    pub dims: [usize; 2],
    pub budget: usize,
    pub seed: u64,
    pub counts: Vec<CountDto>,
    pub findings: Vec<FindingDto>,
}

pub fn probe_report_dto(r: &ProbeReport) -> ProbeReportDto {
    ProbeReportDto {
        schema: SCHEMA_VERSION,
        p: r.p.to_string(),
        dims: [*r.dims.start(), *r.dims.end()],
        budget: r.budget,
        seed: r.seed,
        counts: r
            .counts
            .iter()
            .map(|c| CountDto {
                family: c.family.clone(),
                dim: c.dim,
                examined: c.examined,
                findings: c.findings,
            })
            .collect(),
        findings: r
            .findings
            .iter()
            .map(|f| FindingDto {
                family: f.family.clone(),
                dim: f.space.dim(),
                candidate: f.candidate,
                operator: operator_dto(&f.operator),
                facts: f
                    .facts
                    .iter()
                    .map(|(k, v)| {
                        (
                            k.clone(),
                            FactDto {
                                holds: v.holds,
                                evidence: v.evidence.clone(),
                            },
                        )
                    })
                    .collect(),
            })
            .collect(),
    }
}

/// Rebuilds a finding from its serialized form, for re-verification.
pub fn finding_from_dto(dto: &FindingDto) -> Result<ProbeFinding> {
    let operator = operator_from_dto(&dto.operator)?;
    Ok(ProbeFinding {
        family: dto.family.clone(),
        candidate: dto.candidate,
        space: operator.space().clone(),
        operator,
        facts: dto
            .facts
            .iter()
            .map(|(k, v)| {
                (
                    k.clone(),
                    ProbeFact {
                        holds: v.holds,
                        evidence: v.evidence.clone(),
                    },
                )
            })
            .collect(),
    })
}
