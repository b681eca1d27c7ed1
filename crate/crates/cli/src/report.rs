//! Reports: deterministic JSON documents, or flat CSV tables.

use serde_json::{json, Map, Value};

use radflux::measure::SphereMeasure;
use radflux::sphere::Direction;

pub const TOOL: &str = "radflux";

#[derive(Debug, Clone)]
pub struct Report {
    pub command: Vec<String>,
    pub inputs_sha256: String,
    pub results: Map<String, Value>,
    /// Present for verifiers only.
    pub pass: Option<bool>,
}

impl Report {
    /// Keys are emitted in sorted order and floats in shortest round-trip
    /// form, so equal inputs give byte-identical text.
    pub fn to_json(&self) -> String {
        let mut doc = Map::new();
        doc.insert("tool".into(), json!(TOOL));
        doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        doc.insert("command".into(), json!(self.command));
        doc.insert("inputs_sha256".into(), json!(self.inputs_sha256));
        doc.insert("results".into(), Value::Object(self.results.clone()));
        if let Some(p) = self.pass {
            doc.insert("pass".into(), json!(p));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("report serializes");
        s.push('\n');
        s
    }

    /// A `sweep` array of flat records becomes one row per record; anything
    /// else becomes `key,value` rows with dotted paths.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(Value::Array(rows)) = self.results.get("sweep") {
            if let Some(Value::Object(first)) = rows.first() {
                let keys: Vec<&String> = first.keys().collect();
                out.push_str(&keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(","));
                out.push('\n');
                for row in rows {
                    let cells: Vec<String> = keys.iter().map(|k| scalar_text(&row[k.as_str()])).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                return out;
            }
        }
        out.push_str("key,value\n");
        let mut rows = Vec::new();
        flatten("", &Value::Object(self.results.clone()), &mut rows);
        if let Some(p) = self.pass {
            rows.push(("pass".into(), p.to_string()));
        }
        for (k, v) in rows {
            out.push_str(&k);
            out.push(',');
            out.push_str(&v);
            out.push('\n');
        }
        out
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&join(k), x, rows);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&join(&i.to_string()), x, rows);
            }
        }
        other => rows.push((prefix.to_string(), scalar_text(other))),
    }
}

pub fn vec3(v: &nalgebra::Vector3<f64>) -> Value {
    json!([v[0], v[1], v[2]])
}

pub fn direction(d: &Direction) -> Value {
    vec3(d.as_vector())
}

/// Atoms listed in support order, the density reduced to its mass.
pub fn measure_summary(mu: &SphereMeasure) -> Value {
    let atoms: Vec<Value> = mu
        .atoms()
        .iter()
        .map(|a| json!({ "direction": direction(&a.direction), "weight": a.weight }))
        .collect();
    let density_mass = radflux::numeric::pairwise_sum(
        &mu.density()
            .iter()
            .zip(mu.quadrature().weights())
            .map(|(r, w)| r * w)
            .collect::<Vec<_>>(),
    );
    json!({
        "atoms": atoms,
        "density_mass": density_mass,
        "total_variation": radflux::measure::norm(mu),
    })
}
