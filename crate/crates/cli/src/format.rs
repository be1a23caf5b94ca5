//! Problem JSON, matrix parameters, polynomial JSON and CSV output.
//!
//! A polynomial field is either a text polynomial (`"x0^2/2 - 3 * x1"`, with
//! `t` naming the time variable of `K`) or a list of
//! `{"coeff": "p/q", "exps": [e0, ...]}` terms.

use std::fmt;
use std::io::Write;
use std::path::Path;

use fullerlab_core::polyalg::{parse_poly_with_names, parse_rational, rational_from_f64, Poly, PolyVec, Rational};
use fullerlab_core::problems::MatrixParam;
use fullerlab_core::simulate::{SwitchEvent, Trajectory};
use fullerlab_core::system::AffineSystem;
use serde_json::Value;

/// An input error tied to the field that caused it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        FieldError { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for FieldError {}

fn rational_value(v: &Value, field: &str) -> Result<Rational, FieldError> {
    match v {
        Value::String(s) => parse_rational(s.trim()).map_err(|e| FieldError::new(field, e.to_string())),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(i.into()))
            } else {
                n.as_f64().and_then(rational_from_f64).ok_or_else(|| FieldError::new(field, format!("{n} is not a finite number")))
            }
        }
        other => Err(FieldError::new(field, format!("expected a rational (number or \"p/q\"), got {other}"))),
    }
}

/// Reads a polynomial in `nvars` variables; `aliases` are extra names for the
/// variables besides `x<i>`.
pub fn poly_from_value(v: &Value, nvars: usize, aliases: &[&str], field: &str) -> Result<Poly, FieldError> {
    match v {
        Value::String(s) => parse_poly_with_names(s, nvars, aliases).map_err(|e| FieldError::new(field, e.to_string())),
        Value::Number(_) => Ok(Poly::constant(nvars, rational_value(v, field)?)),
        Value::Array(terms) => {
            let mut out = Vec::with_capacity(terms.len());
            for (j, term) in terms.iter().enumerate() {
                let tf = format!("{field}[{j}]");
                let obj = term.as_object().ok_or_else(|| FieldError::new(&tf, "expected {\"coeff\", \"exps\"}"))?;
                let coeff = obj.get("coeff").ok_or_else(|| FieldError::new(format!("{tf}.coeff"), "missing"))?;
                let coeff = rational_value(coeff, &format!("{tf}.coeff"))?;
                let exps = obj.get("exps").and_then(Value::as_array).ok_or_else(|| FieldError::new(format!("{tf}.exps"), "expected an array of exponents"))?;
                if exps.len() != nvars {
                    return Err(FieldError::new(format!("{tf}.exps"), format!("expected {nvars} exponents, got {}", exps.len())));
                }
                let exps = exps
                    .iter()
                    .map(|e| e.as_u64().and_then(|e| u32::try_from(e).ok()).ok_or_else(|| FieldError::new(format!("{tf}.exps"), "exponents must be non-negative integers")))
                    .collect::<Result<Vec<u32>, _>>()?;
                out.push((exps, coeff));
            }
            Poly::from_terms(nvars, out).map_err(|e| FieldError::new(field, e.to_string()))
        }
        other => Err(FieldError::new(field, format!("expected a polynomial string or term list, got {other}"))),
    }
}

/// JSON term-list form of a polynomial.
pub fn poly_to_value(p: &Poly) -> Value {
    Value::Array(
        p.terms()
            .map(|(exps, c)| serde_json::json!({ "coeff": c.to_string(), "exps": exps }))
            .collect(),
    )
}

fn array<'a>(v: &'a Value, field: &str, len: usize) -> Result<&'a Vec<Value>, FieldError> {
    let a = v.as_array().ok_or_else(|| FieldError::new(field, "expected an array"))?;
    if a.len() != len {
        return Err(FieldError::new(field, format!("expected {len} entries, got {}", a.len())));
    }
    Ok(a)
}

fn dim(obj: &serde_json::Map<String, Value>, key: &str) -> Result<usize, FieldError> {
    let v = obj.get(key).ok_or_else(|| FieldError::new(key, "missing"))?;
    v.as_u64().and_then(|x| usize::try_from(x).ok()).ok_or_else(|| FieldError::new(key, "expected a non-negative integer"))
}

/// Parses `{"n", "m", "f", "g", "f0", "g0", "K"}`.
pub fn problem_from_json(text: &str) -> Result<AffineSystem, FieldError> {
    let root: Value = serde_json::from_str(text).map_err(|e| FieldError::new("<root>", e.to_string()))?;
    let obj = root.as_object().ok_or_else(|| FieldError::new("<root>", "expected an object"))?;
    let n = dim(obj, "n")?;
    let m = dim(obj, "m")?;
    if n == 0 {
        return Err(FieldError::new("n", "state dimension must be at least 1"));
    }
    let get = |key: &str| obj.get(key).ok_or_else(|| FieldError::new(key, "missing"));
    let vec_of = |v: &Value, field: &str| -> Result<PolyVec, FieldError> {
        let entries = array(v, field, n)?
            .iter()
            .enumerate()
            .map(|(i, e)| poly_from_value(e, n, &[], &format!("{field}[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        PolyVec::with_nvars(n, entries).map_err(|e| FieldError::new(field, e.to_string()))
    };
    let f = vec_of(get("f")?, "f")?;
    let g = array(get("g")?, "g", m)?
        .iter()
        .enumerate()
        .map(|(i, gi)| vec_of(gi, &format!("g[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let f0 = poly_from_value(get("f0")?, n, &[], "f0")?;
    let g0 = array(get("g0")?, "g0", m)?
        .iter()
        .enumerate()
        .map(|(i, e)| poly_from_value(e, n, &[], &format!("g0[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let k = poly_from_value(get("K")?, 1, &["t"], "K")?;
    let sys = AffineSystem::new(f, g, f0, g0, k).map_err(|e| FieldError::new("<system>", e.to_string()))?;
    sys.check_bound_positive(0.0, 1.0, 2).map_err(|e| FieldError::new("K", e.to_string()))?;
    Ok(sys)
}

/// A matrix parameter: `I` (size `default_n`), `I<n>`, an inline JSON array of
/// rows, or the path of a file holding one.
pub fn parse_matrix(text: &str, default_n: usize, field: &str) -> Result<MatrixParam, FieldError> {
    let s = text.trim();
    if s == "I" {
        return Ok(MatrixParam::identity(default_n));
    }
    if let Some(rest) = s.strip_prefix('I') {
        if let Ok(n) = rest.parse::<usize>() {
            return Ok(MatrixParam::identity(n));
        }
    }
    let text = if s.starts_with('[') {
        s.to_string()
    } else {
        std::fs::read_to_string(s).map_err(|e| FieldError::new(field, format!("cannot read {s}: {e}")))?
    };
    let v: Value = serde_json::from_str(&text).map_err(|e| FieldError::new(field, e.to_string()))?;
    let rows = v.as_array().ok_or_else(|| FieldError::new(field, "expected an array of rows"))?;
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let rf = format!("{field}[{i}]");
            r.as_array()
                .ok_or_else(|| FieldError::new(&rf, "expected a row array"))?
                .iter()
                .enumerate()
                .map(|(j, x)| rational_value(x, &format!("{rf}[{j}]")))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    MatrixParam::new(rows).map_err(|e| FieldError::new(field, e.to_string()))
}

/// Comma-separated floats.
pub fn parse_floats(s: &str, field: &str) -> Result<Vec<f64>, FieldError> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| FieldError::new(field, format!("{x:?}: {e}"))))
        .collect()
}

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `t, z0.., p0.., u0..`; `p` columns are omitted for feedback runs.
pub fn write_trajectory_csv(path: &Path, traj: &Trajectory, dim: usize, inputs: usize) -> anyhow::Result<()> {
    let with_p = traj.samples.iter().any(|s| !s.p.is_empty());
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["t".to_string()];
    header.extend((0..dim).map(|i| format!("z{i}")));
    if with_p {
        header.extend((0..dim).map(|i| format!("p{i}")));
    }
    header.extend((0..inputs).map(|i| format!("u{i}")));
    w.write_record(&header)?;
    for s in &traj.samples {
        let mut row = vec![fmt_f64(s.t)];
        row.extend(s.z.iter().map(|v| fmt_f64(*v)));
        row.extend(s.p.iter().map(|v| fmt_f64(*v)));
        row.extend(s.u.iter().map(|v| fmt_f64(*v)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_events_csv(path: &Path, events: &[SwitchEvent]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "input", "direction", "slope"])?;
    for e in events {
        w.write_record([fmt_f64(e.t), e.input_index.to_string(), e.direction.to_string(), fmt_f64(e.phi_slope)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads an events CSV written by [`write_events_csv`].
pub fn read_events_csv(path: &Path) -> anyhow::Result<Vec<SwitchEvent>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |i: usize, name: &str| -> Result<&str, FieldError> {
            rec.get(i).ok_or_else(|| FieldError::new(format!("events row {row}.{name}"), "missing"))
        };
        let bad = |name: &str, e: String| FieldError::new(format!("events row {row}.{name}"), e);
        out.push(SwitchEvent {
            t: field(0, "t")?.trim().parse().map_err(|e: std::num::ParseFloatError| bad("t", e.to_string()))?,
            input_index: field(1, "input")?.trim().parse().map_err(|e: std::num::ParseIntError| bad("input", e.to_string()))?,
            direction: field(2, "direction")?.trim().parse().map_err(|e: std::num::ParseIntError| bad("direction", e.to_string()))?,
            phi_slope: field(3, "slope")?.trim().parse().map_err(|e: std::num::ParseFloatError| bad("slope", e.to_string()))?,
        });
    }
    Ok(out)
}

/// Pretty JSON followed by a newline.
pub fn write_json(path: &Path, v: &impl serde::Serialize) -> anyhow::Result<()> {
    let mut f = std::fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, v)?;
    f.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use fullerlab_core::polyalg::rat;

    const CLASSIC: &str = r#"{"n": 2, "m": 1, "f": ["x1", "0"], "g": [["0", "1"]],
        "f0": [{"coeff": "1/2", "exps": [2, 0]}], "g0": ["0"], "K": "1"}"#;

    #[test]
    fn classic_problem_round_trips_through_json() {
        let sys = problem_from_json(CLASSIC).unwrap();
        assert_eq!(sys, fullerlab_core::problems::fuller_classic());
    }

    #[test]
    fn mismatched_dimension_names_field() {
        let bad = CLASSIC.replace(r#"["0", "1"]"#, r#"["0", "1", "0"]"#);
        let e = problem_from_json(&bad).unwrap_err();
        assert_eq!(e.field, "g[0]");
        assert!(e.message.contains("expected 2 entries, got 3"));
    }

    #[test]
    fn missing_key_and_bad_exponents() {
        let e = problem_from_json(&CLASSIC.replace(r#""K": "1""#, r#""L": "1""#)).unwrap_err();
        assert_eq!(e.field, "K");
        let e = problem_from_json(&CLASSIC.replace("[2, 0]", "[2]")).unwrap_err();
        assert_eq!(e.field, "f0[0].exps");
    }

    #[test]
    fn bound_uses_t() {
        let sys = problem_from_json(&CLASSIC.replace(r#""K": "1""#, r#""K": "1 + t^2""#)).unwrap();
        assert_eq!(sys.bound().to_string(), "x0^2 + 1");
        let e = problem_from_json(&CLASSIC.replace(r#""K": "1""#, r#""K": "t""#)).unwrap_err();
        assert_eq!(e.field, "K");
    }

    #[test]
    fn matrix_forms() {
        assert_eq!(parse_matrix("I", 3, "M").unwrap(), MatrixParam::identity(3));
        assert_eq!(parse_matrix("I2", 5, "M").unwrap(), MatrixParam::identity(2));
        let m = parse_matrix(r#"[[2, "1/2"], [0.5, 1]]"#, 2, "M").unwrap();
        assert_eq!(m, MatrixParam::new(vec![vec![rat(2, 1), rat(1, 2)], vec![rat(1, 2), rat(1, 1)]]).unwrap());
        assert_eq!(parse_matrix("[[1, 2], [3]]", 2, "M1").unwrap_err().field, "M1");
    }

    #[test]
    fn poly_json_round_trip() {
        let p = parse_poly_with_names("-3/4 * x0^2 * x1 + 5", 2, &[]).unwrap();
        assert_eq!(poly_from_value(&poly_to_value(&p), 2, &[], "p").unwrap(), p);
    }

    #[test]
    fn seventeen_significant_digits() {
        let s = fmt_f64(0.1);
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
    }
}
