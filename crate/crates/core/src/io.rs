//! JSON formats. Rationals travel as strings (`"p"` or `"p/q"`); integer
//! JSON numbers are accepted on input. Atoms are 1-indexed.

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::interval::{FiniteRankOp, IntervalRegion, Piece, PiecewisePoly, Term};
use crate::lattice::{AtomicSpace, Exponent, Vector};
use crate::operator::Operator;
use crate::rational::{format_rational, int, parse_rational, Rational};
use crate::witness::{Witness, WitnessKind};

pub const SCHEMA_VERSION: u32 = 1;

/// An exact rational in text form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Q(pub String);

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Text(s) => Q(s),
            Raw::Int(i) => Q(i.to_string()),
        })
    }
}

impl Q {
    pub fn of(q: &Rational) -> Self {
        Q(format_rational(q))
    }

    pub fn parse(&self) -> Result<Rational> {
        parse_rational(&self.0)
    }
}

fn qs(v: &[Rational]) -> Vec<Q> {
    v.iter().map(Q::of).collect()
}

fn parse_all(v: &[Q], what: &str) -> Result<Vec<Rational>> {
    v.iter()
        .enumerate()
        .map(|(i, q)| {
            q.parse()
                .map_err(|e| Error::Parse(format!("{what}, entry {}: {e}", i + 1)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormDto {
    pub p: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Q>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormDto>,
    pub matrix: Vec<Vec<Q>>,
}

pub fn parse_exponent(text: &str) -> Result<Exponent> {
    match text.trim() {
        "inf" | "infinity" | "Infinity" | "∞" => Ok(Exponent::Infinity),
        t => Exponent::from_rational(parse_rational(t).map_err(|e| Error::InvalidNorm(e.to_string()))?),
    }
}

pub fn norm_dto(space: &AtomicSpace) -> NormDto {
    NormDto {
        p: space.exponent().to_string(),
        weights: Some(qs(space.weights())),
    }
}

pub fn space_from_dto(norm: Option<&NormDto>, n: usize) -> Result<AtomicSpace> {
    let Some(norm) = norm else {
        return AtomicSpace::new(Exponent::One, vec![int(1); n]);
    };
    let p = parse_exponent(&norm.p)?;
    let weights = match &norm.weights {
        None => vec![int(1); n],
        Some(w) => {
            if w.len() != n {
                return Err(Error::InvalidNorm(format!("{} weights given for {n} atoms", w.len())));
            }
            parse_all(w, "norm weights")?
        }
    };
    AtomicSpace::new(p, weights)
}

pub fn operator_dto(t: &Operator) -> OperatorDto {
    OperatorDto {
        norm: Some(norm_dto(t.space())),
        matrix: t.entries().iter().map(|r| qs(r)).collect(),
    }
}

pub fn operator_from_dto(dto: &OperatorDto) -> Result<Operator> {
    let n = dto.matrix.len();
    if n == 0 {
        return Err(Error::Parse("matrix has no rows".into()));
    }
    let mut rows = Vec::with_capacity(n);
    for (r, row) in dto.matrix.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Parse(format!(
                "dimension mismatch: matrix row {} has {} entries, expected {n}",
                r + 1,
                row.len()
            )));
        }
        let mut parsed = Vec::with_capacity(n);
        for (c, q) in row.iter().enumerate() {
            parsed.push(
                q.parse()
                    .map_err(|e| Error::Parse(format!("matrix row {}, column {}: {e}", r + 1, c + 1)))?,
            );
        }
        rows.push(parsed);
    }
    let space = space_from_dto(dto.norm.as_ref(), n)?;
    Operator::new(space, rows)
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(format!("invalid JSON: {e}"))
}

pub fn parse_operator_json(text: &str) -> Result<Operator> {
    operator_from_dto(&serde_json::from_str(text).map_err(json_error)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceDto {
    pub from: Q,
    pub to: Q,
    pub coeffs: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiecewiseDto {
    pub pieces: Vec<PieceDto>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDto {
    pub kernel: PiecewiseDto,
    pub image: PiecewiseDto,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteRankDto {
    pub terms: Vec<TermDto>,
}

pub fn piecewise_dto(f: &PiecewisePoly) -> PiecewiseDto {
    PiecewiseDto {
        pieces: f
            .pieces()
            .iter()
            .map(|p| PieceDto {
                from: Q::of(&p.from),
                to: Q::of(&p.to),
                coeffs: qs(&p.coeffs),
            })
            .collect(),
    }
}

pub fn piecewise_from_dto(dto: &PiecewiseDto, what: &str) -> Result<PiecewisePoly> {
    let mut pieces = Vec::with_capacity(dto.pieces.len());
    for (i, p) in dto.pieces.iter().enumerate() {
        let at = |field: &str| format!("{what}, piece {}, {field}", i + 1);
        pieces.push(Piece {
            from: p
                .from
                .parse()
                .map_err(|e| Error::Parse(format!("{}: {e}", at("from"))))?,
            to: p.to.parse().map_err(|e| Error::Parse(format!("{}: {e}", at("to"))))?,
            coeffs: parse_all(&p.coeffs, &at("coeffs"))?,
        });
    }
    PiecewisePoly::new(pieces).map_err(|e| match e {
        Error::InvalidPiecewise(m) => Error::InvalidPiecewise(format!("{what}: {m}")),
        other => other,
    })
}

pub fn frop_dto(t: &FiniteRankOp) -> FiniteRankDto {
    FiniteRankDto {
        terms: t
            .terms()
            .iter()
            .map(|x| TermDto {
                kernel: piecewise_dto(&x.kernel),
                image: piecewise_dto(&x.image),
            })
            .collect(),
    }
}

pub fn frop_from_dto(dto: &FiniteRankDto) -> Result<FiniteRankOp> {
    let terms = dto
        .terms
        .iter()
        .enumerate()
        .map(|(k, x)| {
            Ok(Term {
                kernel: piecewise_from_dto(&x.kernel, &format!("term {} kernel", k + 1))?,
                image: piecewise_from_dto(&x.image, &format!("term {} image", k + 1))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteRankOp::new(terms)
}

pub fn parse_frop_json(text: &str) -> Result<FiniteRankOp> {
    frop_from_dto(&serde_json::from_str(text).map_err(json_error)?)
}

pub type RegionDto = Vec<[Q; 2]>;

pub fn region_dto(r: &IntervalRegion) -> RegionDto {
    r.intervals().iter().map(|(a, b)| [Q::of(a), Q::of(b)]).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDto {
    pub kind: String,
    pub f: Vec<Q>,
    pub g: Vec<Q>,
    pub note: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub missing: Option<Vec<usize>>,
}

pub fn witness_dto(w: &Witness) -> WitnessDto {
    let (law, missing) = match &w.kind {
        WitnessKind::Closure { law, missing } => (Some(law.to_string()), Some(missing.atoms())),
        _ => (None, None),
    };
    WitnessDto {
        kind: w.kind.label().to_string(),
        f: qs(&w.f),
        g: qs(&w.g),
        note: w.note.clone(),
        law,
        missing,
    }
}

pub fn vector_from_qs(v: &[Q], what: &str) -> Result<Vector> {
    Ok(Vector(parse_all(v, what)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::half_interval_example;
    use crate::rational::frac;

    #[test]
    fn operator_round_trip() {
        let text = r#"{"norm":{"p":"1"},"matrix":[["1","1/2"],[0,"0"]]}"#;
        let t = parse_operator_json(text).unwrap();
        assert_eq!(t.entry(0, 1), &frac(1, 2));
        let dto = operator_dto(&t);
        let again = operator_from_dto(&serde_json::from_str(&serde_json::to_string(&dto).unwrap()).unwrap()).unwrap();
        assert_eq!(again, t);
    }

    #[test]
    fn diagnostics_name_the_entry() {
        let err = parse_operator_json(r#"{"matrix":[["1","2"],["3","1/0"]]}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 2, column 2"), "{msg}");
        assert!(msg.contains("zero denominator"), "{msg}");
        let err = parse_operator_json(r#"{"matrix":[["1","2"],["3"]]}"#).unwrap_err();
        assert!(err.to_string().contains("row 2 has 1 entries"));
        assert!(matches!(parse_operator_json("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn norm_specs() {
        let t =
            parse_operator_json(r#"{"norm":{"p":"inf","weights":["1","2"]},"matrix":[["1","0"],["0","1"]]}"#).unwrap();
        assert_eq!(t.space().exponent(), &Exponent::Infinity);
        let t = parse_operator_json(r#"{"norm":{"p":"3/2"},"matrix":[["1"]]}"#).unwrap();
        assert_eq!(t.space().exponent(), &Exponent::General(frac(3, 2)));
        assert!(matches!(
            parse_operator_json(r#"{"norm":{"p":"1/2"},"matrix":[["1"]]}"#),
            Err(Error::InvalidNorm(_))
        ));
        assert!(matches!(
            parse_operator_json(r#"{"norm":{"p":"2","weights":["1"]},"matrix":[["1","0"],["0","1"]]}"#),
            Err(Error::InvalidNorm(_))
        ));
    }

    #[test]
    fn frop_round_trip_and_gap() {
        let t = half_interval_example();
        let text = serde_json::to_string(&frop_dto(&t)).unwrap();
        assert_eq!(parse_frop_json(&text).unwrap(), t);
        let gap = r#"{"terms":[{"kernel":{"pieces":[{"from":"0","to":"1/3","coeffs":["1"]},{"from":"1/2","to":"1","coeffs":["1"]}]},"image":{"pieces":[{"from":"0","to":"1","coeffs":["1"]}]}}]}"#;
        let err = parse_frop_json(gap).unwrap_err();
        assert!(matches!(err, Error::InvalidPiecewise(_)));
        assert!(err.to_string().contains("term 1 kernel"));
    }
}
