//! The self-test campaign: nine suites, each reduced to one pass/fail line.
//! Everything is derived from the seed, so the rendered summary is
//! byte-identical across runs and thread counts.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

use crate::cli::{cmd_analyze_text, cmd_interval_text, cmd_probe_text, Config};
use crate::error::{Error, Result};
use crate::generate::{derive_seed, gen_random_operator, gen_random_wce, perturb_off_block, random_partition, rng};
use crate::interval::{half_interval_example, linear_projection_example, IntervalRegion};
use crate::io::{operator_dto, Q};
use crate::lattice::{AtomicSpace, Exponent, SupportSet, Vector};
use crate::operator::Operator;
use crate::opnorm::operator_norm;
use crate::oracle::{sampling_oracle, symbolic_oracle};
use crate::predicates::{is_sbp, is_sbp_with, is_scp, is_scp_with};
use crate::probe::{probe_projection_families, FAMILY_RANK_ONE};
use crate::rational::{frac, int, Rational};
use crate::report::{
    analyze_interval, analyze_operator, finding_from_dto, probe_report_dto, NormValueDto, ProbeReportDto, WceDto,
};
use crate::sigma::{enumerate_sigma, verify_sigma_closures};
use crate::wce::{decompose_wce, decompose_wce_tampered, make_averaging, Decomposition, WceForm};
use crate::witness::WitnessKind;

pub const ROUND_TRIP_FORMS: usize = 200;
pub const PERTURBED_FORMS: usize = 200;
pub const RANDOM_OPERATORS: usize = 500;
pub const SIGMA_OPERATORS: usize = 300;
pub const SAMPLED_OPERATORS: usize = 50;
pub const SAMPLED_PAIRS: usize = 10_000;
pub const AVERAGING_PARTITIONS: usize = 100;
pub const PROBE_BUDGET: usize = 200;
/// Random members drawn from the part of the four-atom family that is not
/// enumerated exhaustively.
pub const FAMILY_SAMPLES_N4: usize = 1000;

#[derive(Debug, Clone, Copy, Default)]
pub struct CampaignOptions {
    pub seed: u64,
    /// Runs the round-trip suite against the sign-flipped decomposition.
    pub tamper: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampaignReport {
    pub seed: u64,
    pub results: Vec<CriterionResult>,
}

impl CampaignReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.results.iter().filter(|r| !r.passed).map(|r| r.name).collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let verdict = if r.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "criterion {} {}: {verdict} ({})", r.id, r.name, r.detail);
        }
        let passed = self.results.iter().filter(|r| r.passed).count();
        let _ = writeln!(
            out,
            "selftest seed {}: {passed}/{} criteria passed",
            self.seed,
            self.results.len()
        );
        out
    }
}

/// Collects pass/fail per instance and keeps the first failure message.
#[derive(Default)]
struct Tally {
    checked: usize,
    failures: usize,
    first: Option<String>,
}

impl Tally {
    fn record(&mut self, outcome: std::result::Result<(), String>) {
        self.checked += 1;
        if let Err(msg) = outcome {
            self.failures += 1;
            self.first.get_or_insert(msg);
        }
    }

    fn finish(self, id: u8, name: &'static str, summary: String) -> CriterionResult {
        let detail = match &self.first {
            None => summary,
            Some(m) => format!("{summary}; {} failures, first: {m}", self.failures),
        };
        CriterionResult {
            id,
            name,
            passed: self.failures == 0,
            detail,
        }
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err_text(e: Error) -> String {
    e.to_string()
}

/// Same operator and same blocks, with each `u_j ⊗ ψ_j` equal. This holds
/// exactly when the two forms differ by per-block rescaling and ordering.
pub fn equivalent_forms(a: &WceForm, b: &WceForm) -> bool {
    if a.space() != b.space() || a.len() != b.len() {
        return false;
    }
    a.blocks().iter().enumerate().all(|(j, blk)| {
        let Some(k) = b.blocks().iter().position(|x| x == blk) else {
            return false;
        };
        let outer =
            |u: &Vector, p: &Vector| -> Vec<Rational> { u.iter().flat_map(|x| p.iter().map(move |y| x * y)).collect() };
        outer(&a.u()[j], &a.psi()[j]) == outer(&b.u()[k], &b.psi()[k])
    })
}

fn round_trip_forms(seed: u64) -> Vec<WceForm> {
    (0..ROUND_TRIP_FORMS as u64)
        .map(|i| {
            let s = derive_seed(seed, "round-trip", i);
            let n = rng(s).gen_range(2..=12);
            gen_random_wce(s, n)
        })
        .collect()
}

fn criterion_round_trip(forms: &[WceForm], tamper: bool) -> CriterionResult {
    let outcomes: Vec<_> = forms
        .par_iter()
        .enumerate()
        .map(|(i, form)| -> std::result::Result<(), String> {
            let t = form.to_operator();
            check(is_sbp(&t).map_err(err_text)?.holds, || format!("form {i}: not SBP"))?;
            check(is_scp(&t).map_err(err_text)?.holds, || format!("form {i}: not SCP"))?;
            let d = if tamper {
                decompose_wce_tampered(&t)
            } else {
                decompose_wce(&t)
            };
            match d.map_err(|e| format!("form {i}: decomposition failed: {e}"))? {
                Decomposition::Form(g) => {
                    check(equivalent_forms(&g, form), || {
                        format!("form {i}: recovered form differs")
                    })?;
                    check(g.to_operator() == t, || format!("form {i}: reassembly differs"))
                }
                Decomposition::NotSbp(_) => Err(format!("form {i}: decomposition reported not SBP")),
            }
        })
        .collect();
    let mut tally = Tally::default();
    outcomes.into_iter().for_each(|o| tally.record(o));
    let summary = format!("{} forms, n in [2,12]", tally.checked);
    tally.finish(1, "wce-round-trip", summary)
}

fn criterion_negative(seed: u64) -> CriterionResult {
    let mut perturbed = Vec::with_capacity(PERTURBED_FORMS);
    let mut attempt = 0u64;
    while perturbed.len() < PERTURBED_FORMS {
        let s = derive_seed(seed, "perturb", attempt);
        let n = rng(s).gen_range(2..=12);
        let form = gen_random_wce(s, n);
        if let Some(t) = perturb_off_block(&form, s ^ 1) {
            perturbed.push(t);
        }
        attempt += 1;
    }
    let outcomes: Vec<_> = perturbed
        .par_iter()
        .enumerate()
        .map(|(i, t)| -> std::result::Result<bool, String> {
            let v = is_sbp(t).map_err(err_text)?;
            match decompose_wce(t).map_err(|e| format!("matrix {i}: {e}"))? {
                Decomposition::NotSbp(w) => {
                    check(!v.holds, || format!("matrix {i}: witness for an SBP operator"))?;
                    check(matches!(w.kind, WitnessKind::Sbp), || {
                        format!("matrix {i}: wrong witness kind")
                    })?;
                    check(w.replays(t).map_err(err_text)?, || {
                        format!("matrix {i}: witness does not replay")
                    })?;
                    Ok(false)
                }
                Decomposition::Form(g) => {
                    check(v.holds, || format!("matrix {i}: form for a non-SBP operator"))?;
                    check(g.to_operator() == *t, || format!("matrix {i}: reassembly differs"))?;
                    Ok(true)
                }
            }
        })
        .collect();
    let mut tally = Tally::default();
    let mut still_sbp = 0;
    for o in outcomes {
        if let Ok(true) = o {
            still_sbp += 1;
        }
        tally.record(o.map(|_| ()));
    }
    let summary = format!(
        "{} perturbed forms, {} replayed witnesses, {still_sbp} remained SBP",
        tally.checked,
        tally.checked - still_sbp - tally.failures
    );
    tally.finish(2, "sbp-negative", summary)
}

fn random_operator(seed: u64, family: &str, i: u64, max_n: usize) -> Operator {
    let s = derive_seed(seed, family, i);
    let mut r = rng(s);
    let n = r.gen_range(1..=max_n);
    let density = [0.1, 0.2, 0.35, 0.5][r.gen_range(0..4)];
    gen_random_operator(s, n, density)
}

fn criterion_sbp_implies_scp(seed: u64, forms: &[WceForm]) -> CriterionResult {
    let ops: Vec<Operator> = (0..RANDOM_OPERATORS as u64)
        .map(|i| random_operator(seed, "sbp-scp", i, 8))
        .chain(forms.iter().map(WceForm::to_operator))
        .collect();
    let outcomes: Vec<_> = ops
        .par_iter()
        .enumerate()
        .map(|(i, t)| -> std::result::Result<bool, String> {
            let sigma = enumerate_sigma(t).map_err(err_text)?;
            let sbp = is_sbp_with(t, &sigma).map_err(err_text)?.holds;
            let scp = is_scp_with(t, &sigma).map_err(err_text)?.holds;
            check(!sbp || scp, || format!("operator {i}: SBP without SCP"))?;
            Ok(sbp)
        })
        .collect();
    let mut tally = Tally::default();
    let mut sbp = 0;
    for o in outcomes {
        sbp += usize::from(o == Ok(true));
        tally.record(o.map(|_| ()));
    }
    let summary = format!("{} operators, {sbp} SBP, all of them SCP", tally.checked);
    tally.finish(3, "sbp-implies-scp", summary)
}

fn criterion_sigma_laws(seed: u64) -> CriterionResult {
    // alternate plain random operators with forms so that the SBP-only laws
    // are exercised on many instances
    let ops: Vec<Operator> = (0..SIGMA_OPERATORS as u64)
        .map(|i| {
            if i % 2 == 0 {
                random_operator(seed, "sigma", i, 8)
            } else {
                let s = derive_seed(seed, "sigma-form", i);
                gen_random_wce(s, rng(s).gen_range(1..=8)).to_operator()
            }
        })
        .collect();
    let outcomes: Vec<_> = ops
        .par_iter()
        .enumerate()
        .map(|(i, t)| -> std::result::Result<bool, String> {
            let sigma = enumerate_sigma(t).map_err(err_text)?;
            check(sigma.contains(SupportSet::EMPTY), || {
                format!("operator {i}: empty set missing")
            })?;
            let union = sigma.supports.iter().fold(SupportSet::EMPTY, |a, &s| a.union(s));
            check(union == sigma.s_t, || format!("operator {i}: S_T is not the union"))?;
            let c = verify_sigma_closures(t, &sigma).map_err(err_text)?;
            check(c.union, || format!("operator {i}: union closure fails"))?;
            let sbp = is_sbp_with(t, &sigma).map_err(err_text)?.holds;
            if sbp {
                check(c.intersection, || format!("operator {i}: intersection closure fails"))?;
                check(c.complement, || format!("operator {i}: complement closure fails"))?;
                for a in SupportSet::full(t.dim()).difference(sigma.s_t).indices() {
                    check(t.column_support(a).is_empty(), || {
                        format!("operator {i}: atom {} outside S_T is not mapped to 0", a + 1)
                    })?;
                }
            }
            Ok(sbp)
        })
        .collect();
    let mut tally = Tally::default();
    let mut sbp = 0;
    for o in outcomes {
        sbp += usize::from(o == Ok(true));
        tally.record(o.map(|_| ()));
    }
    let summary = format!("{} operators, {sbp} SBP", tally.checked);
    tally.finish(4, "sigma-laws", summary)
}

/// Column patterns with entries in `{-1, 0, 1/2, 1}` and at most three
/// nonzeros, as codes `0..4` per row.
fn family_columns(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for code in 0..4usize.pow(n as u32) {
        let col: Vec<u8> = (0..n).map(|k| ((code >> (2 * k)) & 3) as u8).collect();
        if col.iter().filter(|&&c| c != 0).count() <= 3 {
            out.push(col);
        }
    }
    out
}

fn family_value(c: u8) -> Rational {
    match c {
        0 => int(0),
        1 => int(-1),
        2 => frac(1, 2),
        _ => int(1),
    }
}

fn negated(c: u8) -> u8 {
    // -1 <-> 1; 1/2 maps outside the family and gets its own code
    match c {
        1 => 3,
        3 => 1,
        2 => 4,
        x => x,
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Smallest encoding over simultaneous row/column permutations and global
/// sign; every predicate is invariant under both.
fn canonical_key(cols: &[&Vec<u8>], perms: &[Vec<usize>]) -> Vec<u8> {
    let n = cols.len();
    let mut best: Option<Vec<u8>> = None;
    for p in perms {
        for neg in [false, true] {
            let mut key = Vec::with_capacity(n * n);
            for i in 0..n {
                for k in 0..n {
                    let c = cols[p[i]][p[k]];
                    key.push(if neg { negated(c) } else { c });
                }
            }
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
    }
    best.expect("at least one permutation")
}

fn family_operator(cols: &[&Vec<u8>]) -> Operator {
    let n = cols.len();
    let rows = (0..n)
        .map(|k| (0..n).map(|i| family_value(cols[i][k])).collect())
        .collect();
    Operator::new(AtomicSpace::unweighted(n, Exponent::One), rows).expect("square")
}

/// The exhaustive part of the family: every member for `n ≤ 3`, and for
/// `n = 4` the members with at most four nonzeros in total. One
/// representative per symmetry class.
pub fn exhaustive_family() -> Vec<Operator> {
    let mut out = Vec::new();
    for n in 1..=4usize {
        let cols = family_columns(n);
        let perms = permutations(n);
        let limit = if n == 4 { 4 } else { usize::MAX };
        let mut seen = HashSet::new();
        let mut chosen = Vec::with_capacity(n);
        extend_family(&cols, n, limit, &perms, &mut chosen, &mut seen, &mut out);
    }
    out
}

/// Depth-first over column tuples, pruning once the nonzero count exceeds
/// `budget`.
fn extend_family<'a>(
    cols: &'a [Vec<u8>],
    n: usize,
    budget: usize,
    perms: &[Vec<usize>],
    chosen: &mut Vec<&'a Vec<u8>>,
    seen: &mut HashSet<Vec<u8>>,
    out: &mut Vec<Operator>,
) {
    if chosen.len() == n {
        if seen.insert(canonical_key(chosen, perms)) {
            out.push(family_operator(chosen));
        }
        return;
    }
    for c in cols {
        let nnz = c.iter().filter(|&&x| x != 0).count();
        if nnz <= budget {
            chosen.push(c);
            extend_family(cols, n, budget - nnz, perms, chosen, seen, out);
            chosen.pop();
        }
    }
}

/// Random four-atom members of the family outside the enumerated stratum.
pub fn sampled_family(seed: u64, count: usize) -> Vec<Operator> {
    let cols = family_columns(4);
    let mut r = rng(derive_seed(seed, "family-n4", 0));
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let chosen: Vec<&Vec<u8>> = (0..4).map(|_| &cols[r.gen_range(0..cols.len())]).collect();
        let nnz: usize = chosen.iter().map(|c| c.iter().filter(|&&x| x != 0).count()).sum();
        if nnz > 4 {
            out.push(family_operator(&chosen));
        }
    }
    out
}

fn criterion_oracle(seed: u64) -> CriterionResult {
    let mut family = exhaustive_family();
    let enumerated = family.len();
    family.extend(sampled_family(seed, FAMILY_SAMPLES_N4));
    let outcomes: Vec<_> = family
        .par_iter()
        .enumerate()
        .map(|(i, t)| -> std::result::Result<(), String> {
            let o = symbolic_oracle(t).map_err(err_text)?;
            let sigma = enumerate_sigma(t).map_err(err_text)?;
            let sbp = is_sbp_with(t, &sigma).map_err(err_text)?.holds;
            let scp = is_scp_with(t, &sigma).map_err(err_text)?.holds;
            check(o.sbp == sbp && o.scp == scp, || {
                format!(
                    "family member {i} {:?}: oracle ({}, {}) vs ({sbp}, {scp})",
                    operator_dto(t).matrix,
                    o.sbp,
                    o.scp
                )
            })
        })
        .collect();
    let sampled: Vec<Operator> = (0..SAMPLED_OPERATORS as u64)
        .map(|i| {
            let s = derive_seed(seed, "sampling", i);
            let n = rng(s).gen_range(2..=12);
            if i % 2 == 0 {
                gen_random_wce(s, n).to_operator()
            } else {
                gen_random_operator(s, n, 0.15)
            }
        })
        .collect();
    let sample_outcomes: Vec<_> = sampled
        .par_iter()
        .enumerate()
        .map(|(i, t)| -> std::result::Result<(), String> {
            let sbp = is_sbp(t).map_err(err_text)?.holds;
            let scp = is_scp(t).map_err(err_text)?.holds;
            let r = sampling_oracle(t, derive_seed(seed, "pairs", i as u64), SAMPLED_PAIRS);
            check(!(sbp && r.sbp.is_some()), || {
                format!("sampled operator {i}: SBP contradicted by a sample")
            })?;
            check(!(scp && r.scp.is_some()), || {
                format!("sampled operator {i}: SCP contradicted by a sample")
            })
        })
        .collect();
    let mut tally = Tally::default();
    outcomes
        .into_iter()
        .chain(sample_outcomes)
        .for_each(|o| tally.record(o));
    let summary = format!(
        "{enumerated} family classes enumerated (n <= 3 complete, n = 4 with at most 4 nonzeros), \
         {FAMILY_SAMPLES_N4} further n = 4 members sampled, {SAMPLED_OPERATORS} operators x {SAMPLED_PAIRS} pairs"
    );
    tally.finish(5, "oracle-agreement", summary)
}

fn q_operator() -> Operator {
    Operator::new(
        AtomicSpace::unweighted(2, Exponent::One),
        vec![vec![int(1), frac(1, 2)], vec![int(0), int(0)]],
    )
    .expect("square")
}

fn region(parts: &[(Rational, Rational)]) -> IntervalRegion {
    IntervalRegion::new(parts.to_vec())
}

fn criterion_examples() -> CriterionResult {
    let mut tally = Tally::default();
    let qs = |v: &[Rational]| v.iter().map(Q::of).collect::<Vec<_>>();
    tally.record((|| {
        let r = analyze_interval(&half_interval_example()).map_err(err_text)?;
        check(r.sbp.holds, || "half-interval example: SBP should hold".into())?;
        check(!r.scp.holds, || "half-interval example: SCP should fail".into())?;
        let w = r
            .scp
            .witness
            .as_ref()
            .ok_or("half-interval example: SCP witness missing")?;
        // the realizer of the range element carries the integrals (0, 1/96)
        check(w.g_coefficients == qs(&[int(0), frac(1, 96)]), || {
            format!("half-interval example: witness integrals {:?}", w.g_coefficients)
        })?;
        let half = crate::io::region_dto(&region(&[(frac(1, 2), int(1))]));
        check(!r.range_supports.contains(&half), || {
            "half-interval example: [1/2,1] is a range support".into()
        })
    })());
    tally.record((|| {
        let q = q_operator();
        let r = analyze_operator(&q, 16).map_err(err_text)?;
        check(r.predicates.scp.holds, || "Q: SCP should hold".into())?;
        check(!r.predicates.sbp.holds, || "Q: SBP should fail".into())?;
        let w = r.predicates.sbp.witness.as_ref().ok_or("Q: SBP witness missing")?;
        let e = |i| qs(&Vector::basis(2, i));
        check(w.f == e(1) && w.g == e(0), || {
            format!("Q: witness ({:?}, {:?})", w.f, w.g)
        })?;
        check(matches!(&r.wce, WceDto::NotSbp(x) if x == w), || {
            "Q: decomposition witness differs".into()
        })?;
        check(r.projection, || "Q: not a projection".into())?;
        check(r.operator_norm == NormValueDto::Exact { value: Q::of(&int(1)) }, || {
            format!("Q: norm {:?}", r.operator_norm)
        })
    })());
    tally.record((|| {
        let r = analyze_interval(&linear_projection_example()).map_err(err_text)?;
        check(r.sbp.holds && r.scp.holds, || {
            "linear projection example: SBP and SCP should hold".into()
        })?;
        let expected = vec![
            crate::io::region_dto(&IntervalRegion::empty()),
            crate::io::region_dto(&IntervalRegion::full()),
        ];
        check(r.range_supports == expected, || {
            format!("linear projection example: range supports {:?}", r.range_supports)
        })
    })());
    tally.finish(
        6,
        "worked-examples",
        "half-interval, Q, linear projection; [1/2,1] not a range support".into(),
    )
}

fn criterion_averaging(seed: u64) -> CriterionResult {
    let partitions: Vec<(usize, Vec<SupportSet>)> = (0..AVERAGING_PARTITIONS as u64)
        .map(|i| {
            let mut r = rng(derive_seed(seed, "averaging", i));
            let n = r.gen_range(1..=10);
            (n, random_partition(&mut r, n))
        })
        .collect();
    let outcomes: Vec<_> = partitions
        .par_iter()
        .enumerate()
        .map(|(i, (n, part))| -> std::result::Result<(), String> {
            for p in [Exponent::One, Exponent::Two, Exponent::Infinity] {
                let t = make_averaging(AtomicSpace::unweighted(*n, p.clone()), part).map_err(err_text)?;
                check(t.is_projection(), || format!("partition {i}: not a projection"))?;
                check(is_sbp(&t).map_err(err_text)?.holds, || {
                    format!("partition {i}: not SBP")
                })?;
                check(is_scp(&t).map_err(err_text)?.holds, || {
                    format!("partition {i}: not SCP")
                })?;
                let norm = operator_norm(t.space(), &t).map_err(err_text)?;
                check(norm.is_one().map_err(err_text)?, || {
                    format!("partition {i}: norm {} for p = {p}", norm.describe())
                })?;
            }
            Ok(())
        })
        .collect();
    let mut tally = Tally::default();
    outcomes.into_iter().for_each(|o| tally.record(o));
    let summary = format!("{} partitions on l1, l2, linf", tally.checked);
    tally.finish(7, "averaging", summary)
}

fn criterion_probe(seed: u64) -> CriterionResult {
    let mut tally = Tally::default();
    let mut p1 = 0;
    tally.record((|| {
        let cfg = Config {
            budget: PROBE_BUDGET,
            seed,
            ..Config::default()
        };
        let text = cmd_probe_text("1", 2..=3, &cfg).map_err(err_text)?;
        let dto: ProbeReportDto = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        p1 = dto.findings.len();
        for (k, f) in dto.findings.iter().enumerate() {
            let finding = finding_from_dto(f).map_err(err_text)?;
            check(finding.reverify().map_err(err_text)?, || {
                format!("p=1 finding {k} does not re-verify")
            })?;
        }
        Ok(())
    })());
    let mut p2 = 0;
    tally.record((|| {
        let r = probe_projection_families(Exponent::Two, 2..=3, PROBE_BUDGET, seed, Some(&[FAMILY_RANK_ONE]))
            .map_err(err_text)?;
        let dto = probe_report_dto(&r);
        p2 = dto.counts.iter().map(|c| c.examined).sum();
        check(dto.findings.is_empty(), || {
            format!("p=2 rank-one family has {} findings", dto.findings.len())
        })
    })());
    tally.finish(
        8,
        "probe",
        format!("p=1 dims 2..3: {p1} findings re-verified; p=2 rank-one: {p2} candidates, no findings"),
    )
}

fn determinism_fixtures(seed: u64) -> Vec<String> {
    let mut ops = vec![q_operator()];
    ops.push(
        make_averaging(
            AtomicSpace::unweighted(3, Exponent::Two),
            &[SupportSet::from_atoms(&[1, 2]), SupportSet::from_atoms(&[3])],
        )
        .expect("valid partition"),
    );
    ops.push(gen_random_wce(derive_seed(seed, "determinism", 0), 8).to_operator());
    ops.push(gen_random_operator(derive_seed(seed, "determinism", 1), 6, 0.3));
    ops.iter()
        .map(|t| serde_json::to_string(&operator_dto(t)).expect("serializable"))
        .collect()
}

/// One pass over every command the determinism suite compares.
fn command_outputs(seed: u64) -> Result<Vec<String>> {
    let cfg = Config {
        budget: 100,
        seed,
        ..Config::default()
    };
    let mut out = Vec::new();
    for input in determinism_fixtures(seed) {
        out.push(cmd_analyze_text(&input, &cfg)?);
    }
    for ex in [half_interval_example(), linear_projection_example()] {
        out.push(cmd_interval_text(
            &serde_json::to_string(&crate::io::frop_dto(&ex)).expect("serializable"),
            &cfg,
        )?);
    }
    out.push(cmd_probe_text("1", 2..=3, &cfg)?);
    out.push(cmd_probe_text("2", 2..=2, &cfg)?);
    Ok(out)
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn criterion_determinism(seed: u64) -> CriterionResult {
    let mut tally = Tally::default();
    let mut count = 0;
    tally.record((|| {
        let first = command_outputs(seed).map_err(err_text)?;
        let second = command_outputs(seed).map_err(err_text)?;
        let single = with_threads(1, || command_outputs(seed))
            .map_err(err_text)?
            .map_err(err_text)?;
        let many = with_threads(4, || command_outputs(seed))
            .map_err(err_text)?
            .map_err(err_text)?;
        count = first.len();
        check(first == second, || "outputs differ between two runs".into())?;
        check(single == many && single == first, || {
            "outputs differ between 1 and 4 threads".into()
        })
    })());
    tally.finish(
        9,
        "determinism",
        format!("{count} command outputs across 2 runs and 1 vs 4 threads"),
    )
}

pub fn run_campaign(opts: CampaignOptions) -> CampaignReport {
    let seed = opts.seed;
    let forms = round_trip_forms(seed);
    let results = vec![
        criterion_round_trip(&forms, opts.tamper),
        criterion_negative(seed),
        criterion_sbp_implies_scp(seed, &forms),
        criterion_sigma_laws(seed),
        criterion_oracle(seed),
        criterion_examples(),
        criterion_averaging(seed),
        criterion_probe(seed),
        criterion_determinism(seed),
    ];
    CampaignReport { seed, results }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_sizes() {
        assert_eq!(family_columns(1).len(), 4);
        assert_eq!(family_columns(4).len(), 175);
        let fam = exhaustive_family();
        // every two-atom member reappears up to symmetry
        let two: Vec<_> = fam.iter().filter(|t| t.dim() == 2).collect();
        assert!(two.len() < 16 * 16 && two.len() > 16);
    }

    #[test]
    fn canonical_key_identifies_relabelings() {
        let a = vec![0u8, 3];
        let b = vec![0u8, 0];
        let perms = permutations(2);
        // column 1 = 0, column 2 = e_2 ; relabeled: column 1 = e_1, column 2 = 0
        let c = vec![3u8, 0];
        assert_eq!(canonical_key(&[&a, &b], &perms), canonical_key(&[&b, &c], &perms));
        let neg = vec![0u8, 1];
        assert_eq!(canonical_key(&[&a, &b], &perms), canonical_key(&[&neg, &b], &perms));
    }

    #[test]
    fn equivalence_ignores_scaling() {
        let f = gen_random_wce(3, 5);
        assert!(equivalent_forms(&f, &f));
        let g = gen_random_wce(4, 5);
        assert_eq!(equivalent_forms(&f, &g), f.to_operator() == g.to_operator());
    }

    #[test]
    fn examples_pass() {
        let r = criterion_examples();
        assert!(r.passed, "{}", r.detail);
    }

    #[test]
    fn tampering_is_caught() {
        let forms = round_trip_forms(1)[..10].to_vec();
        assert!(criterion_round_trip(&forms, false).passed);
        let r = criterion_round_trip(&forms, true);
        assert!(!r.passed);
        assert_eq!(r.name, "wce-round-trip");
    }
}
