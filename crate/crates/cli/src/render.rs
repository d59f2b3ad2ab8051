//! Report records and their two renderings. The JSON record is built
//! first; the table is drawn from it, so both show the same values.

use std::fmt::Write as _;

use dml_core::arith::rational::{format_rational, parse_rational};
use dml_core::{CertifiedInterval, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA: &str = "dml-report/1";

/// Significant digits of a rendered midpoint.
const DIGITS: u32 = 12;
/// Exact rationals longer than this are shown as decimals.
const EXACT_WIDTH: usize = 32;

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

fn scale10(x: &Rational, e: i64) -> Rational {
    let p = Rational::from_integer(pow10(e.unsigned_abs() as u32));
    if e >= 0 {
        x * p
    } else {
        x / p
    }
}

/// `x` rounded to `sig` significant digits (away from zero when `up`),
/// as text together with the exact value of that text.
pub fn decimal(x: &Rational, sig: u32, up: bool) -> (String, Rational) {
    if x.is_zero() {
        return ("0".into(), Rational::zero());
    }
    let a = x.abs();
    let mut e = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    while scale10(&a, -e) >= Rational::from_integer(BigInt::from(10)) {
        e += 1;
    }
    while scale10(&a, -e) < Rational::one() {
        e -= 1;
    }
    let shift = sig as i64 - 1 - e;
    let scaled = scale10(&a, shift);
    let mut n = if up { scaled.ceil().to_integer() } else { scaled.round().to_integer() };
    let mut shift = shift;
    if n >= pow10(sig) {
        n /= 10;
        shift -= 1;
        e += 1;
    }
    let value = scale10(&Rational::from_integer(n.clone()), -shift);
    let value = if x.is_negative() { -value } else { value };
    let digits = n.to_string();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let body = if (-4..=11).contains(&e) {
        if e >= 0 {
            let int_len = e as usize + 1;
            if digits.len() <= int_len {
                format!("{digits}{}", "0".repeat(int_len - digits.len()))
            } else {
                format!("{}.{}", &digits[..int_len], &digits[int_len..])
            }
        } else {
            format!("0.{}{digits}", "0".repeat((-e - 1) as usize))
        }
    } else if digits.len() == 1 {
        format!("{digits}e{e}")
    } else {
        format!("{}.{}e{e}", &digits[..1], &digits[1..])
    };
    let sign = if x.is_negative() { "-" } else { "" };
    (format!("{sign}{body}"), value)
}

/// `mid ± r` with `r` an upper bound for the distance from the printed
/// midpoint to either endpoint; exact short values print as `p/q`.
pub fn approx(iv: &CertifiedInterval) -> String {
    if let Some(x) = iv.exact() {
        let s = format_rational(x);
        if s.len() <= EXACT_WIDTH {
            return s;
        }
    }
    let (mid, value) = decimal(&iv.midpoint(), DIGITS, false);
    let r = (iv.hi() - &value).max(&value - iv.lo());
    if r.is_zero() {
        return mid;
    }
    format!("{mid} ± {}", decimal(&r, 2, true).0)
}

fn as_interval(m: &Map<String, Value>) -> Option<CertifiedInterval> {
    if m.len() != 2 {
        return None;
    }
    let lo = parse_rational(m.get("lo")?.as_str()?).ok()?;
    let hi = parse_rational(m.get("hi")?.as_str()?).ok()?;
    CertifiedInterval::new(lo, hi).ok()
}

/// Adds an `approx` rendering next to every `{lo, hi}` interval.
pub fn annotate(v: &mut Value) {
    match v {
        Value::Object(m) => {
            if let Some(iv) = as_interval(m) {
                m.insert("approx".into(), Value::String(approx(&iv)));
                return;
            }
            m.values_mut().for_each(annotate);
        }
        Value::Array(xs) => xs.iter_mut().for_each(annotate),
        _ => {}
    }
}

/// Serializes a core value and annotates its intervals.
pub fn to_record<T: Serialize>(x: &T) -> Value {
    let mut v = serde_json::to_value(x).expect("report values serialize");
    annotate(&mut v);
    v
}

fn is_interval(m: &Map<String, Value>) -> bool {
    m.len() == 3 && m.contains_key("lo") && m.contains_key("hi") && m.contains_key("approx")
}

/// One-line rendering of a value, used in table cells.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(xs) => format!("[{}]", xs.iter().map(cell).collect::<Vec<_>>().join(", ")),
        Value::Object(m) if is_interval(m) => cell(&m["approx"]),
        Value::Object(m) => {
            format!("{{{}}}", m.iter().map(|(k, v)| format!("{k}: {}", cell(v))).collect::<Vec<_>>().join(", "))
        }
    }
}

/// Every leaf as the table shows it, in document order.
pub fn leaves(v: &Value) -> Vec<String> {
    let mut out = Vec::new();
    fn walk(v: &Value, out: &mut Vec<String>) {
        match v {
            Value::Object(m) if is_interval(m) => out.push(cell(v)),
            Value::Object(m) => m.values().for_each(|x| walk(x, out)),
            Value::Array(xs) => xs.iter().for_each(|x| walk(x, out)),
            _ => out.push(cell(v)),
        }
    }
    walk(v, &mut out);
    out
}

fn rows_table(out: &mut String, rows: &[(String, String)]) {
    let w = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    for (k, v) in rows {
        let pad = w - k.chars().count();
        let _ = writeln!(out, "  {k}{}  {v}", " ".repeat(pad));
    }
}

fn column_table(out: &mut String, items: &[Value]) {
    let mut cols: Vec<String> = Vec::new();
    for it in items {
        if let Value::Object(m) = it {
            for k in m.keys() {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
    }
    let grid: Vec<Vec<String>> = items
        .iter()
        .map(|it| cols.iter().map(|c| it.get(c).map(cell).unwrap_or_else(|| "-".into())).collect())
        .collect();
    let widths: Vec<usize> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| grid.iter().map(|r| r[i].chars().count()).chain([c.chars().count()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        let mut s = String::from(" ");
        for (c, w) in cells.iter().zip(&widths) {
            let _ = write!(s, " {c}{}", " ".repeat(w - c.chars().count()));
        }
        s.trim_end().to_string()
    };
    let _ = writeln!(out, "{}", line(&cols));
    let _ = writeln!(out, "{}", line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
    for r in &grid {
        let _ = writeln!(out, "{}", line(r));
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) if !is_interval(m) && !m.is_empty() => {
            for (k, x) in m {
                flatten(&format!("{prefix}.{k}"), x, rows);
            }
        }
        _ => rows.push((prefix.to_string(), cell(v))),
    }
}

fn has_records(v: &Value) -> bool {
    match v {
        Value::Array(xs) => !xs.is_empty() && xs.iter().all(Value::is_object),
        Value::Object(m) if !is_interval(m) => m.values().any(has_records),
        _ => false,
    }
}

fn join(prefix: &str, k: &str) -> String {
    if prefix.is_empty() {
        k.to_string()
    } else {
        format!("{prefix}.{k}")
    }
}

fn section(out: &mut String, title: &str, v: &Value) {
    let mut rows = Vec::new();
    let mut subsections: Vec<(String, &Value)> = Vec::new();
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if has_records(x) {
                    subsections.push((join(title, k), x));
                } else {
                    flatten(k, x, &mut rows);
                }
            }
        }
        _ => rows.push((title.to_string(), cell(v))),
    }
    if !title.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "{title}");
    }
    rows_table(out, &rows);
    for (k, x) in subsections {
        match x {
            Value::Array(xs) if xs.iter().any(has_records) => {
                for (i, y) in xs.iter().enumerate() {
                    section(out, &format!("{k}[{i}]"), y);
                }
            }
            Value::Array(xs) => {
                let _ = writeln!(out);
                let _ = writeln!(out, "{k}");
                column_table(out, xs);
            }
            _ => section(out, &k, x),
        }
    }
}

/// Aligned text rendering of a record.
pub fn table(record: &Value) -> String {
    let mut out = String::new();
    let body = match record {
        Value::Object(m) => {
            let mut m = m.clone();
            m.shift_remove("schema");
            Value::Object(m)
        }
        v => v.clone(),
    };
    section(&mut out, "", &body);
    out
}

pub fn json(record: &Value) -> String {
    let mut s = serde_json::to_string_pretty(record).expect("records serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use dml_core::arith::rational::{int, rat};
    use serde_json::json;

    #[test]
    fn decimals() {
        assert_eq!(decimal(&rat(1, 3), 4, false).0, "0.3333");
        assert_eq!(decimal(&rat(-2, 3), 3, false).0, "-0.667");
        assert_eq!(decimal(&int(123456), 3, true).0, "124000");
        assert_eq!(decimal(&int(999), 2, true).0, "1000");
        assert_eq!(decimal(&rat(1, 1_000_000), 2, false).0, "1e-6");
        let big = int(38310080007165768493036i128);
        assert_eq!(decimal(&big, 5, false).0, "3.831e22");
        let (s, v) = decimal(&rat(22, 7), 6, false);
        assert_eq!(s, "3.14286");
        assert_eq!(v, rat(314286, 100000));
    }

    #[test]
    fn approx_radius_covers_the_interval() {
        let iv = CertifiedInterval::new(rat(314159, 100000), rat(314160, 100000)).unwrap();
        let s = approx(&iv);
        let (mid, r) = s.split_once(" ± ").unwrap();
        let mid = parse_rational(mid.replace('.', "").trim_start_matches('0')).unwrap()
            / int(100_000_000_000i64);
        let r: f64 = r.parse().unwrap();
        assert!((0.000005..0.0001).contains(&r), "{s}");
        assert!((&mid - iv.lo()) <= rat(1, 100000));
        assert_eq!(approx(&CertifiedInterval::point(rat(7, 2))), "7/2");
    }

    #[test]
    fn tables_show_every_leaf() {
        let mut rec = json!({
            "schema": SCHEMA,
            "command": "demo",
            "value": {"lo": "1/3", "hi": "1/2"},
            "checks": [{"name": "(a)", "verdict": "HOLDS"}, {"name": "(b)", "verdict": "FAILS"}],
            "nested": {"k": [1, 2]},
        });
        annotate(&mut rec);
        let t = table(&rec);
        for leaf in leaves(&rec) {
            if leaf != SCHEMA {
                assert!(t.contains(&leaf), "{leaf} missing from\n{t}");
            }
        }
        assert!(t.contains("nested.k"));
        assert!(!t.contains(SCHEMA));
    }
}
