//! Text formats: model and solution-spec files (TOML), CSV dumps.
//!
//! Numbers are written with 17 significant digits in scientific notation so
//! dumps are byte-reproducible and round-trip exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::ModelError;
use crate::model::DlvModel;
use crate::value::{parse_value, Rational, Value};

/// `x` with 17 significant digits, locale-independent.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // Normalize −0.
        return "0.0000000000000000e0".to_string();
    }
    format!("{:.16e}", x)
}

fn value_to_toml(v: Value) -> toml::Value {
    match v {
        Value::Exact(r) if *r.denom() == 1 && i64::try_from(*r.numer()).is_ok() => {
            toml::Value::Integer(*r.numer() as i64)
        }
        Value::Exact(r) => match (i64::try_from(*r.numer()), i64::try_from(*r.denom())) {
            (Ok(n), Ok(d)) => toml::Value::Array(vec![toml::Value::Integer(n), toml::Value::Integer(d)]),
            _ => toml::Value::Float(v.to_f64()),
        },
        Value::Float(x) => toml::Value::Float(x),
    }
}

/// Accepts integers, floats, `[num, den]` pairs and strings such as `"5/2"`.
pub fn value_from_toml(v: &toml::Value) -> Option<Value> {
    match v {
        toml::Value::Integer(n) => Some(Value::int(*n)),
        toml::Value::Float(x) => x.is_finite().then_some(Value::Float(*x)),
        toml::Value::String(s) => parse_value(s),
        toml::Value::Array(a) if a.len() == 2 => match (&a[0], &a[1]) {
            (toml::Value::Integer(n), toml::Value::Integer(d)) if *d != 0 => {
                Some(Value::Exact(Rational::new(*n as i128, *d as i128)))
            }
            _ => None,
        },
        _ => None,
    }
}

fn fmt_err(msg: impl Into<String>) -> ModelError {
    ModelError::Format(msg.into())
}

/// Serialize a model as TOML (`m`, `lambda`, `a`, `b`, optional `name`).
pub fn model_to_toml(model: &DlvModel) -> String {
    let mut t = toml::map::Map::new();
    if let Some(n) = model.name() {
        t.insert("name".into(), toml::Value::String(n.to_string()));
    }
    t.insert("m".into(), toml::Value::Integer(model.m() as i64));
    t.insert("lambda".into(), toml::Value::Array(model.lambda().iter().map(|v| value_to_toml(*v)).collect()));
    t.insert("a".into(), toml::Value::Array(model.a().iter().map(|v| value_to_toml(*v)).collect()));
    t.insert(
        "b".into(),
        toml::Value::Array(
            model.b().iter().map(|r| toml::Value::Array(r.iter().map(|v| value_to_toml(*v)).collect())).collect(),
        ),
    );
    toml::to_string(&toml::Value::Table(t)).expect("model serializes")
}

fn value_list(t: &toml::Table, key: &str) -> Result<Vec<Value>, ModelError> {
    let arr = t.get(key).and_then(|v| v.as_array()).ok_or_else(|| fmt_err(format!("missing array `{key}`")))?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| value_from_toml(v).ok_or_else(|| fmt_err(format!("`{key}[{i}]` is not a number"))))
        .collect()
}

pub fn model_from_toml(text: &str) -> Result<DlvModel, ModelError> {
    let t: toml::Table = text.parse().map_err(|e: toml::de::Error| fmt_err(e.to_string()))?;
    let lambda = value_list(&t, "lambda")?;
    let a = value_list(&t, "a")?;
    let rows = t.get("b").and_then(|v| v.as_array()).ok_or_else(|| fmt_err("missing array `b`"))?;
    let mut b = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| fmt_err(format!("`b[{i}]` is not an array")))?;
        let parsed: Option<Vec<Value>> = row.iter().map(value_from_toml).collect();
        b.push(parsed.ok_or_else(|| fmt_err(format!("`b[{i}]` has a non-number")))?);
    }
    if let Some(m) = t.get("m") {
        let m = m.as_integer().ok_or_else(|| fmt_err("`m` is not an integer"))?;
        if m as usize != lambda.len() {
            return Err(ModelError::Dimension { what: "lambda", expected: m as usize, got: lambda.len() });
        }
    }
    let mut model = DlvModel::new(lambda, a, b)?;
    if let Some(n) = t.get("name").and_then(|v| v.as_str()) {
        model = model.with_name(n);
    }
    Ok(model)
}

/// Solution spec file: `id = "..."` plus a `[params]` table.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionSpec {
    pub id: String,
    pub params: BTreeMap<String, Value>,
}

pub fn solution_spec_from_toml(text: &str) -> Result<SolutionSpec, ModelError> {
    let t: toml::Table = text.parse().map_err(|e: toml::de::Error| fmt_err(e.to_string()))?;
    let id = t.get("id").and_then(|v| v.as_str()).ok_or_else(|| fmt_err("missing string `id`"))?.to_string();
    let mut params = BTreeMap::new();
    if let Some(p) = t.get("params") {
        let p = p.as_table().ok_or_else(|| fmt_err("`params` must be a table"))?;
        for (k, v) in p {
            let val = value_from_toml(v).ok_or_else(|| fmt_err(format!("parameter `{k}` is not a number")))?;
            params.insert(k.clone(), val);
        }
    }
    Ok(SolutionSpec { id, params })
}

pub fn solution_spec_to_toml(spec: &SolutionSpec) -> String {
    let mut t = toml::map::Map::new();
    t.insert("id".into(), toml::Value::String(spec.id.clone()));
    let p: toml::map::Map<String, toml::Value> =
        spec.params.iter().map(|(k, v)| (k.clone(), value_to_toml(*v))).collect();
    t.insert("params".into(), toml::Value::Table(p));
    toml::to_string(&toml::Value::Table(t)).expect("spec serializes")
}

/// CSV with header `t,x,u1,...,um`; one row per (t, x) sample.
pub fn csv_field(rows: &[(f64, f64, Vec<f64>)], m: usize) -> String {
    let mut s = String::from("t,x");
    for i in 1..=m {
        let _ = write!(s, ",u{i}");
    }
    s.push('\n');
    for (t, x, u) in rows {
        let _ = write!(s, "{},{}", fmt_f64(*t), fmt_f64(*x));
        for v in u {
            let _ = write!(s, ",{}", fmt_f64(*v));
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_round_trip_is_exact() {
        let m = DlvModel::two_component(
            [Value::ratio(5, 2), Value::int(1)],
            [Value::int(3), Value::float(0.1)],
            (Value::ratio(-1, 3), Value::int(0)),
            (Value::int(2), Value::ratio(-7, 9)),
        )
        .unwrap()
        .with_name("demo");
        let text = model_to_toml(&m);
        let back = model_from_toml(&text).unwrap();
        assert_eq!(back.name(), Some("demo"));
        assert_eq!(back.lambda(), m.lambda());
        assert_eq!(back.b(), m.b());
        assert!(back.lambda()[0].is_exact());
        assert_eq!(back.a()[1].to_f64(), 0.1);
    }

    #[test]
    fn rejects_inconsistent_files() {
        assert!(model_from_toml("m = 3\nlambda=[1,1]\na=[0,0]\nb=[[0,0],[0,0]]").is_err());
        assert!(model_from_toml("lambda=[1,-1]\na=[0,0]\nb=[[0,0],[0,0]]").is_err());
        assert!(model_from_toml("lambda=[1,1]\na=[0,\"x\"]\nb=[[0,0],[0,0]]").is_err());
    }

    #[test]
    fn spec_round_trip() {
        let text = "id = \"CH12_TW\"\n[params]\na = 25\ne = \"2\"\n";
        let s = solution_spec_from_toml(text).unwrap();
        assert_eq!(s.params["e"], Value::int(2));
        assert_eq!(solution_spec_from_toml(&solution_spec_to_toml(&s)).unwrap(), s);
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-0.0), fmt_f64(0.0));
        assert_eq!(fmt_f64(12.5).parse::<f64>().unwrap(), 12.5);
    }
}
