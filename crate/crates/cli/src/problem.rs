//! Problem files: `key: value` lines with nested blocks by indentation
//! (a YAML subset). Every file starts with `kind:`.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use dml_core::arith::rational::{parse_rational, Rational};
use dml_core::heights::{BinaryLinearForm, FormTriple, ProjectivePoint};
use dml_core::index::MultihomogPolynomial;
use dml_core::places::Place;
use dml_core::subspace::{ExponentEntry, ExponentSystem};
use dml_core::{Field, FieldElement};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use yaml_rust2::parser::{MarkedEventReceiver, Parser};
use yaml_rust2::scanner::Marker;
use yaml_rust2::Event;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}, field `{}`: {}", self.field, self.message),
            None => write!(f, "field `{}`: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for ParseError {}

fn err(field: &str, message: impl Into<String>) -> ParseError {
    ParseError { line: None, field: field.into(), message: message.into() }
}

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum ProblemFile {
    Height(HeightProblem),
    Index(IndexProblem),
    Roth(RothProblem),
    Subspace(SubspaceProblem),
    Bounds(BoundsProblem),
    Recurrence(RecurrenceProblem),
}

impl ProblemFile {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemFile::Height(_) => "height",
            ProblemFile::Index(_) => "index",
            ProblemFile::Roth(_) => "roth",
            ProblemFile::Subspace(_) => "subspace",
            ProblemFile::Bounds(_) => "bounds",
            ProblemFile::Recurrence(_) => "recurrence",
        }
    }
}

#[derive(Debug, Clone)]
pub struct HeightProblem {
    pub point: ProjectivePoint,
}

#[derive(Debug, Clone)]
pub struct IndexProblem {
    pub polynomial: MultihomogPolynomial,
    pub points: Vec<ProjectivePoint>,
}

#[derive(Debug, Clone)]
pub struct RothProblem {
    pub theta: Rational,
    pub polynomial: MultihomogPolynomial,
    pub forms: Vec<BinaryLinearForm>,
}

#[derive(Debug, Clone)]
pub struct SubspaceProblem {
    pub system: ExponentSystem,
    pub q: Rational,
    pub delta: Rational,
    pub strict_printed_form: bool,
    pub points: Vec<[FieldElement; 2]>,
    pub scan: Option<i64>,
}

#[derive(Debug, Clone)]
pub struct BoundsProblem {
    pub deltas: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub enum RecurrenceProblem {
    Unit { a: FieldElement, b: FieldElement, alpha: FieldElement, beta: FieldElement, m: u64 },
    Binary { nu1: FieldElement, nu0: FieldElement, u0: FieldElement, u1: FieldElement, c: Option<FieldElement>, range: Option<(i64, i64)> },
    Ternary { mu: [FieldElement; 3], v: [FieldElement; 3], range: Option<(i64, i64)> },
}

// ---------------------------------------------------------------------------
// raw records

#[derive(Deserialize)]
struct Header {
    kind: String,
}

/// A rational written as `p/q` or a bare integer.
#[derive(Debug, Clone)]
struct Rat(Rational);

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = Scalar::deserialize(d)?;
        parse_rational(&s.0).map(Rat).map_err(serde::de::Error::custom)
    }
}

/// Any YAML scalar, kept as text.
struct Scalar(String);

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            S(String),
            I(i64),
        }
        Ok(Scalar(match Raw::deserialize(d)? {
            Raw::S(s) => s,
            Raw::I(i) => i.to_string(),
        }))
    }
}

/// A field element: a rational scalar, or `{a, b, d}` for `a + b sqrt(d)`.
#[derive(Debug, Clone)]
struct Elem(FieldElement);

impl<'de> Deserialize<'de> for Elem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Quad {
            a: Rat,
            b: Rat,
            d: i64,
        }
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Q(Quad),
            R(Scalar),
        }
        match Raw::deserialize(d).map_err(|_| {
            serde::de::Error::custom("expected a rational `p/q` or a mapping {a, b, d}")
        })? {
            Raw::R(s) => parse_rational(&s.0)
                .map(|r| Elem(FieldElement::rational(r)))
                .map_err(serde::de::Error::custom),
            Raw::Q(q) => Field::quadratic(q.d)
                .and_then(|f| FieldElement::new(q.a.0, q.b.0, f))
                .map(Elem)
                .map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHeight {
    #[allow(dead_code)]
    kind: String,
    point: Vec<Elem>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    /// One `[i, j]` pair per block: `x_h1^i x_h2^j`.
    exponents: Vec<[u32; 2]>,
    coefficient: Elem,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIndex {
    #[allow(dead_code)]
    kind: String,
    r: Vec<u32>,
    terms: Vec<RawTerm>,
    points: Option<Vec<Vec<Elem>>>,
    forms: Option<Vec<[Elem; 2]>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRoth {
    #[allow(dead_code)]
    kind: String,
    theta: Rat,
    r: Vec<u32>,
    terms: Vec<RawTerm>,
    forms: Vec<[Elem; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    place: String,
    forms: [String; 2],
    e: [Rat; 2],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSubspace {
    #[allow(dead_code)]
    kind: String,
    d: Option<i64>,
    q: Rat,
    delta: Rat,
    #[serde(default)]
    strict_printed_form: bool,
    places: Vec<RawEntry>,
    #[serde(default)]
    points: Vec<[Elem; 2]>,
    scan: Option<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBounds {
    #[allow(dead_code)]
    kind: String,
    #[serde(default)]
    deltas: Vec<Rat>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecurrence {
    #[allow(dead_code)]
    kind: String,
    a: Option<Elem>,
    b: Option<Elem>,
    alpha: Option<Elem>,
    beta: Option<Elem>,
    #[serde(rename = "M")]
    m: Option<u64>,
    nu1: Option<Elem>,
    nu0: Option<Elem>,
    u0: Option<Elem>,
    u1: Option<Elem>,
    c: Option<Elem>,
    mu: Option<[Elem; 3]>,
    v: Option<[Elem; 3]>,
    range: Option<Scalar>,
}

// ---------------------------------------------------------------------------

/// Source line of every node, keyed by its path as `serde_path_to_error`
/// prints it (`places[1].e[0]`). Keys map to the line of the key itself.
#[derive(Default)]
struct Locator {
    stack: Vec<(String, Frame)>,
    lines: HashMap<String, usize>,
}

enum Frame {
    Map(Option<String>),
    Seq(usize),
}

impl Locator {
    fn scan(text: &str) -> HashMap<String, usize> {
        let mut loc = Locator::default();
        // syntax errors are reported by the deserializer itself
        let _ = Parser::new_from_str(text).load(&mut loc, false);
        loc.lines
    }

    fn child(&self) -> Option<String> {
        let (path, frame) = self.stack.last()?;
        let sep = if path.is_empty() { "" } else { "." };
        Some(match frame {
            Frame::Map(Some(k)) => format!("{path}{sep}{k}"),
            Frame::Map(None) => return None,
            Frame::Seq(i) => format!("{path}[{i}]"),
        })
    }

    fn advance(&mut self) {
        match self.stack.last_mut() {
            Some((_, Frame::Map(k))) => *k = None,
            Some((_, Frame::Seq(i))) => *i += 1,
            None => {}
        }
    }
}

impl MarkedEventReceiver for Locator {
    fn on_event(&mut self, ev: Event, mark: Marker) {
        let line = mark.line();
        match ev {
            Event::Scalar(v, ..) => match self.stack.last_mut() {
                Some((path, Frame::Map(k @ None))) => {
                    let sep = if path.is_empty() { "" } else { "." };
                    self.lines.entry(format!("{path}{sep}{v}")).or_insert(line);
                    *k = Some(v);
                }
                _ => {
                    if let Some(c) = self.child() {
                        self.lines.entry(c).or_insert(line);
                    }
                    self.advance();
                }
            },
            Event::Alias(_) => self.advance(),
            Event::SequenceStart(..) | Event::MappingStart(..) => {
                let path = self.child().unwrap_or_default();
                self.lines.entry(path.clone()).or_insert(line);
                let frame = if matches!(ev, Event::SequenceStart(..)) { Frame::Seq(0) } else { Frame::Map(None) };
                self.stack.push((path, frame));
            }
            Event::SequenceEnd | Event::MappingEnd => {
                self.stack.pop();
                self.advance();
            }
            _ => {}
        }
    }
}

fn read<T: DeserializeOwned>(text: &str) -> Result<T, ParseError> {
    let de = serde_yaml::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let mut field = e.path().to_string();
        let inner = e.into_inner();
        let mut message = inner.to_string();
        if let Some(i) = message.find(" at line ") {
            message.truncate(i);
        }
        if let Some(rest) = message.strip_prefix(&format!("{field}: ")) {
            message = rest.to_string();
        }
        let lines = Locator::scan(text);
        let line = lines.get(&field).copied().or_else(|| inner.location().map(|l| l.line()));
        if let Some(name) = message.strip_prefix("missing field `").and_then(|m| m.split('`').next()) {
            field = if field == "." { name.to_string() } else { format!("{field}.{name}") };
        }
        ParseError { line, field, message }
    })
}

pub fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("range `{s}` is not of the form lo:hi"))?;
    let lo: i64 = a.trim().parse().map_err(|_| format!("bad lower end `{a}`"))?;
    let hi: i64 = b.trim().parse().map_err(|_| format!("bad upper end `{b}`"))?;
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn polynomial(r: Vec<u32>, terms: Vec<RawTerm>) -> Result<MultihomogPolynomial, ParseError> {
    let terms = terms
        .into_iter()
        .map(|t| (t.exponents.into_iter().map(|[i, j]| (i, j)).collect(), t.coefficient.0))
        .collect();
    MultihomogPolynomial::new(r, terms).map_err(|e| err("terms", e.to_string()))
}

fn point(field: &str, coords: Vec<Elem>) -> Result<ProjectivePoint, ParseError> {
    ProjectivePoint::new(coords.into_iter().map(|e| e.0).collect()).map_err(|e| err(field, e.to_string()))
}

fn form(field: &str, [c1, c2]: [Elem; 2]) -> Result<BinaryLinearForm, ParseError> {
    BinaryLinearForm::new(c1.0, c2.0).map_err(|e| err(field, e.to_string()))
}

fn form_triple(field: &str, s: &str) -> Result<FormTriple, ParseError> {
    match s {
        "L1" | "x1" => Ok(FormTriple::L1),
        "L2" | "x2" => Ok(FormTriple::L2),
        "L3" | "x1+x2" => Ok(FormTriple::L3),
        _ => Err(err(field, format!("unknown form `{s}`; expected L1, L2 or L3"))),
    }
}

/// Place labels as printed in reports: `inf`, `real(+sqrtd)`,
/// `real(-sqrtd)`, `complex`, `p=5`, `P0|5`, `P|3`.
pub fn parse_place(field: Field, s: &str) -> Result<Place, String> {
    let s = s.trim();
    let label = |p: &Place| p.to_string();
    let short = |p: &Place| label(p).split(' ').next().unwrap_or_default().to_string();
    for p in Place::infinite(field) {
        if label(&p) == s {
            return Ok(p);
        }
    }
    let digits = s
        .rsplit(['=', '|'])
        .next()
        .and_then(|t| t.split(' ').next())
        .and_then(|t| t.parse::<u64>().ok())
        .ok_or_else(|| format!("unrecognised place `{s}`"))?;
    let places = Place::above(field, &digits.into()).map_err(|e| e.to_string())?;
    places
        .into_iter()
        .find(|p| label(p) == s || short(p) == s)
        .ok_or_else(|| format!("no place `{s}` of {field}"))
}

fn need<T>(field: &str, v: Option<T>) -> Result<T, ParseError> {
    v.ok_or_else(|| err(field, "missing field"))
}

fn recurrence(raw: RawRecurrence) -> Result<RecurrenceProblem, ParseError> {
    let range = match raw.range {
        Some(s) => Some(parse_range(&s.0).map_err(|m| err("range", m))?),
        None => None,
    };
    let unit = raw.alpha.is_some() || raw.beta.is_some() || raw.a.is_some() || raw.b.is_some();
    let binary = raw.nu1.is_some() || raw.nu0.is_some() || raw.u0.is_some() || raw.u1.is_some();
    let ternary = raw.mu.is_some() || raw.v.is_some();
    match (unit, binary, ternary) {
        (true, false, false) => {
            if raw.c.is_some() || range.is_some() {
                return Err(err("c", "`c` and `range` apply to recurrences, not to the unit equation"));
            }
            Ok(RecurrenceProblem::Unit {
                a: need("a", raw.a)?.0,
                b: need("b", raw.b)?.0,
                alpha: need("alpha", raw.alpha)?.0,
                beta: need("beta", raw.beta)?.0,
                m: need("M", raw.m)?,
            })
        }
        (false, true, false) => Ok(RecurrenceProblem::Binary {
            nu1: need("nu1", raw.nu1)?.0,
            nu0: need("nu0", raw.nu0)?.0,
            u0: need("u0", raw.u0)?.0,
            u1: need("u1", raw.u1)?.0,
            c: raw.c.map(|e| e.0),
            range,
        }),
        (false, false, true) => {
            if raw.c.is_some() {
                return Err(err("c", "ternary recurrences count zeros; `c` is not accepted"));
            }
            Ok(RecurrenceProblem::Ternary {
                mu: need("mu", raw.mu)?.map(|e| e.0),
                v: need("v", raw.v)?.map(|e| e.0),
                range,
            })
        }
        (false, false, false) => Err(err("kind", "recurrence file declares no equation")),
        _ => Err(err("kind", "recurrence file mixes unit-equation, binary and ternary fields")),
    }
}

pub fn parse_problem_str(text: &str) -> Result<ProblemFile, ParseError> {
    let header: Header = read(text)?;
    match header.kind.as_str() {
        "height" => {
            let raw: RawHeight = read(text)?;
            Ok(ProblemFile::Height(HeightProblem { point: point("point", raw.point)? }))
        }
        "index" => {
            let raw: RawIndex = read(text)?;
            let polynomial = polynomial(raw.r, raw.terms)?;
            let points = match (raw.points, raw.forms) {
                (Some(ps), None) => ps.into_iter().map(|p| point("points", p)).collect::<Result<_, _>>()?,
                (None, Some(fs)) => fs
                    .into_iter()
                    .map(|f| form("forms", f).map(|l| dml_core::index::vanishing_point(&l)))
                    .collect::<Result<_, _>>()?,
                _ => return Err(err("points", "give exactly one of `points` or `forms`")),
            };
            Ok(ProblemFile::Index(IndexProblem { polynomial, points }))
        }
        "roth" => {
            let raw: RawRoth = read(text)?;
            Ok(ProblemFile::Roth(RothProblem {
                theta: raw.theta.0,
                polynomial: polynomial(raw.r, raw.terms)?,
                forms: raw.forms.into_iter().map(|f| form("forms", f)).collect::<Result<_, _>>()?,
            }))
        }
        "subspace" => {
            let raw: RawSubspace = read(text)?;
            let field = match raw.d {
                Some(d) => Field::quadratic(d).map_err(|e| err("d", e.to_string()))?,
                None => Field::Rationals,
            };
            let mut entries = Vec::with_capacity(raw.places.len());
            for (i, e) in raw.places.into_iter().enumerate() {
                let at = format!("places[{i}]");
                let place = parse_place(field, &e.place).map_err(|m| err(&format!("{at}.place"), m))?;
                let forms = [
                    form_triple(&format!("{at}.forms[0]"), &e.forms[0])?,
                    form_triple(&format!("{at}.forms[1]"), &e.forms[1])?,
                ];
                let [e1, e2] = e.e;
                entries.push(ExponentEntry { place, forms, e: [e1.0, e2.0] });
            }
            let system = ExponentSystem::new(field, entries).map_err(|e| err("places", e.to_string()))?;
            Ok(ProblemFile::Subspace(SubspaceProblem {
                system,
                q: raw.q.0,
                delta: raw.delta.0,
                strict_printed_form: raw.strict_printed_form,
                points: raw.points.into_iter().map(|[a, b]| [a.0, b.0]).collect(),
                scan: raw.scan,
            }))
        }
        "bounds" => {
            let raw: RawBounds = read(text)?;
            Ok(ProblemFile::Bounds(BoundsProblem { deltas: raw.deltas.into_iter().map(|r| r.0).collect() }))
        }
        "recurrence" => Ok(ProblemFile::Recurrence(recurrence(read(text)?)?)),
        other => Err(ParseError {
            line: Some(text.lines().position(|l| l.trim_start().starts_with("kind")).map_or(1, |i| i + 1)),
            field: "kind".into(),
            message: format!(
                "unknown kind `{other}`; expected one of height, index, roth, subspace, bounds, recurrence"
            ),
        }),
    }
}

pub fn parse_problem_file(path: &Path) -> Result<ProblemFile, ParseError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| err("<file>", format!("cannot read {}: {e}", path.display())))?;
    parse_problem_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dml_core::arith::rational::int;

    #[test]
    fn height_file() {
        let p = parse_problem_str("kind: height\npoint: [\"3\", \"4\"]\n").unwrap();
        let ProblemFile::Height(h) = p else { panic!() };
        assert_eq!(h.point, ProjectivePoint::from_ints(&[3, 4]).unwrap());
        // bare integers are accepted too
        assert!(parse_problem_str("kind: height\npoint: [3, 4]\n").is_ok());
    }

    #[test]
    fn unit_equation_file() {
        let text = "kind: recurrence\na: \"1\"\nb: \"-1\"\nalpha: \"2\"\nbeta: \"3\"\nM: 100\n";
        let ProblemFile::Recurrence(RecurrenceProblem::Unit { alpha, m, .. }) = parse_problem_str(text).unwrap()
        else {
            panic!()
        };
        assert_eq!(alpha, FieldElement::from_int(2));
        assert_eq!(m, 100);
    }

    #[test]
    fn zero_denominator_names_line_and_field() {
        let e = parse_problem_str("kind: height\npoint:\n  - \"1\"\n  - \"3/0\"\n").unwrap_err();
        assert_eq!(e.line, Some(4));
        assert_eq!(e.field, "point[1]");
        let e = parse_problem_str("kind: recurrence\nnu1: 1\nnu0:\n  a: 1\n  b: 1\n  d: 4\nu0: 0\nu1: 1\n").unwrap_err();
        assert_eq!((e.line, e.field.as_str()), (Some(3), "nu0"));
        let e = parse_problem_str("kind: height\npoint: [\"1\", \"3/0\"]\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(e.message.contains("zero denominator"), "{e}");
    }

    #[test]
    fn unknown_keys_and_kinds_rejected() {
        let e = parse_problem_str("kind: height\npoint: [1, 2]\ncolour: red\n").unwrap_err();
        assert!(e.message.contains("unknown field"), "{e}");
        assert_eq!(e.line, Some(3));
        let e = parse_problem_str("kind: volume\n").unwrap_err();
        assert_eq!(e.field, "kind");
        let e = parse_problem_str("point: [1, 2]\n").unwrap_err();
        assert!(e.message.contains("kind"), "{e}");
    }

    #[test]
    fn missing_field_reported() {
        let e = parse_problem_str("kind: recurrence\nnu1: 1\nnu0: 1\nu0: 0\n").unwrap_err();
        assert_eq!(e.field, "u1");
        let e = parse_problem_str("kind: height\n").unwrap_err();
        assert_eq!(e.field, "point");
    }

    #[test]
    fn quadratic_elements_and_places() {
        let text = "kind: subspace\nd: -1\nq: 100\ndelta: 1/10\nplaces:\n  - place: complex\n    forms: [L1, L2]\n    e: [1/2, -1/2]\n  - place: P0|5\n    forms: [L1, L3]\n    e: [0, 0]\npoints:\n  - [{a: 1, b: 1, d: -1}, 0]\n";
        let ProblemFile::Subspace(s) = parse_problem_str(text).unwrap() else { panic!() };
        assert_eq!(s.system.entries().len(), 2);
        assert_eq!(s.points[0][0].b(), &int(1));
        assert_eq!(parse_place(Field::Rationals, "p=7").unwrap().to_string(), "p=7");
        assert!(parse_place(Field::Rationals, "q=7").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-10:10").unwrap(), (-10, 10));
        assert!(parse_range("3:1").is_err());
        assert!(parse_range("3").is_err());
    }
}
