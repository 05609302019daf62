//! JSON tree files.
//!
//! ```json
//! {
//!   "horizon": 1,
//!   "asset_dim": 1,
//!   "nodes": [{"id": 0, "time": 0, "parent": null}, ...],
//!   "P": {"1": "1/2", "2": "1/2"},
//!   "processes": {"S": {"0": ["1/1"], "1": ["2/1"], "2": ["1/2"]}},
//!   "strategies": {"H": {"0": ["1/1"]}}
//! }
//! ```
//!
//! Measure entries must be canonical `"p/q"` strings. Process and strategy
//! entries must be strings but may be written leniently (`"0.5"`, `"2/4"`).
//! Writing always produces canonical text, so parse-then-write is the
//! identity on canonical files.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::filtered_space::{AdaptedProcess, EventTree, ProbMeasure, Strategy};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct TreeFile {
    pub tree: EventTree,
    pub measure: ProbMeasure,
    pub processes: BTreeMap<String, AdaptedProcess>,
    pub strategies: BTreeMap<String, Strategy>,
}

impl TreeFile {
    pub fn new(tree: EventTree, measure: ProbMeasure) -> Self {
        TreeFile {
            tree,
            measure,
            processes: BTreeMap::new(),
            strategies: BTreeMap::new(),
        }
    }

    pub fn with_process(mut self, name: &str, x: AdaptedProcess) -> Self {
        self.processes.insert(name.to_string(), x);
        self
    }

    pub fn process(&self, name: &str) -> Result<&AdaptedProcess> {
        self.processes
            .get(name)
            .ok_or_else(|| Error::schema(format!("processes.{name}"), "no such process"))
    }

    pub fn strategy(&self, name: &str) -> Result<&Strategy> {
        self.strategies
            .get(name)
            .ok_or_else(|| Error::schema(format!("strategies.{name}"), "no such strategy"))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let root: Value = serde_json::from_str(text).map_err(|e| Error::schema("$", e.to_string()))?;
        let obj = root.as_object().ok_or_else(|| Error::schema("$", "expected an object"))?;
        let horizon = get_usize(obj, "horizon")?;
        let asset_dim = get_usize(obj, "asset_dim")?;

        let nodes = obj
            .get("nodes")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::schema("nodes", "expected an array"))?;
        let mut parents = Vec::with_capacity(nodes.len());
        let mut times = Vec::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            let field = format!("nodes[{i}]");
            let n = n.as_object().ok_or_else(|| Error::schema(&field, "expected an object"))?;
            let id = get_usize(n, "id").map_err(|_| Error::schema(format!("{field}.id"), "expected an integer"))?;
            if id != i {
                return Err(Error::schema(format!("{field}.id"), format!("expected {i} (breadth-first order)")));
            }
            let time =
                get_usize(n, "time").map_err(|_| Error::schema(format!("{field}.time"), "expected an integer"))?;
            let parent = match n.get("parent") {
                None | Some(Value::Null) => None,
                Some(v) => Some(
                    v.as_u64()
                        .ok_or_else(|| Error::schema(format!("{field}.parent"), "expected an integer or null"))?
                        as usize,
                ),
            };
            parents.push(parent);
            times.push(time);
        }
        let tree = EventTree::from_parents(horizon, asset_dim, &parents).map_err(|e| Error::schema("nodes", e.to_string()))?;
        for (i, t) in times.iter().enumerate() {
            if tree.time(i) != *t {
                return Err(Error::schema(
                    format!("nodes[{i}].time"),
                    format!("expected {} from the parent chain", tree.time(i)),
                ));
            }
        }

        let pm = obj
            .get("P")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::schema("P", "expected an object of leaf masses"))?;
        let mut mass = vec![None; tree.num_leaves()];
        for (k, v) in pm {
            let field = format!("P.{k}");
            let id = parse_node_key(k, &field)?;
            if id >= tree.num_nodes() || !tree.is_leaf(id) {
                return Err(Error::schema(field, "not a leaf"));
            }
            let s = v.as_str().ok_or_else(|| Error::schema(&field, "expected a \"p/q\" string"))?;
            let r = rational::parse_canonical(s).map_err(|e| Error::schema(&field, e.to_string()))?;
            mass[tree.leaf_index(id)] = Some(r);
        }
        let mass: Vec<Rational> = mass
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.ok_or_else(|| Error::schema(format!("P.{}", tree.leaf_node(i)), "missing leaf mass")))
            .collect::<Result<_>>()?;
        let measure = ProbMeasure::new(&tree, mass).map_err(|e| Error::schema("P", e.to_string()))?;

        let mut processes = BTreeMap::new();
        if let Some(v) = obj.get("processes") {
            let m = v.as_object().ok_or_else(|| Error::schema("processes", "expected an object"))?;
            for (name, table) in m {
                let field = format!("processes.{name}");
                let (dim, values) = parse_table(table, &field, tree.num_nodes(), |_| true)?;
                processes.insert(name.clone(), AdaptedProcess::new(&tree, dim, values)?);
            }
        }
        let mut strategies = BTreeMap::new();
        if let Some(v) = obj.get("strategies") {
            let m = v.as_object().ok_or_else(|| Error::schema("strategies", "expected an object"))?;
            for (name, table) in m {
                let field = format!("strategies.{name}");
                let internal = tree.internal_nodes().len();
                let (dim, values) = parse_table(table, &field, internal, |id| id < internal)?;
                strategies.insert(name.clone(), Strategy::new(&tree, dim, values)?);
            }
        }
        Ok(TreeFile {
            tree,
            measure,
            processes,
            strategies,
        })
    }

    pub fn to_value(&self) -> Value {
        let t = &self.tree;
        let nodes: Vec<Value> = (0..t.num_nodes())
            .map(|v| json!({"id": v, "time": t.time(v), "parent": t.parent(v)}))
            .collect();
        let mut pm = Map::new();
        for (i, l) in t.leaves().enumerate() {
            pm.insert(l.to_string(), Value::String(rational::format(self.measure.leaf_mass(i))));
        }
        let mut procs = Map::new();
        for (name, x) in &self.processes {
            let mut table = Map::new();
            for v in 0..t.num_nodes() {
                table.insert(v.to_string(), rational_array(x.value(v)));
            }
            procs.insert(name.clone(), Value::Object(table));
        }
        let mut strats = Map::new();
        for (name, h) in &self.strategies {
            let mut table = Map::new();
            for v in t.internal_nodes() {
                table.insert(v.to_string(), rational_array(h.at(v)));
            }
            strats.insert(name.clone(), Value::Object(table));
        }
        json!({
            "horizon": t.horizon(),
            "asset_dim": t.asset_dim(),
            "nodes": nodes,
            "P": pm,
            "processes": procs,
            "strategies": strats,
        })
    }

    /// Canonical text: pretty-printed, keys in numeric or sorted order,
    /// trailing newline.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("tree files serialize");
        s.push('\n');
        s
    }
}

pub(crate) fn rational_array(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(|x| Value::String(rational::format(x))).collect())
}

fn get_usize(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    obj.get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| Error::schema(key, "expected a nonnegative integer"))
}

fn parse_node_key(k: &str, field: &str) -> Result<usize> {
    if k.is_empty() || !k.bytes().all(|b| b.is_ascii_digit()) || (k.len() > 1 && k.starts_with('0')) {
        return Err(Error::schema(field, "keys must be node ids"));
    }
    k.parse().map_err(|_| Error::schema(field, "keys must be node ids"))
}

/// Reads a `{node_id: [..]}` table covering ids `0..count`.
fn parse_table(
    table: &Value,
    field: &str,
    count: usize,
    allowed: impl Fn(usize) -> bool,
) -> Result<(usize, Vec<Rational>)> {
    let m = table.as_object().ok_or_else(|| Error::schema(field, "expected an object"))?;
    let mut rows: Vec<Option<Vec<Rational>>> = vec![None; count];
    let mut dim = None;
    for (k, v) in m {
        let f = format!("{field}.{k}");
        let id = parse_node_key(k, &f)?;
        if id >= count || !allowed(id) {
            return Err(Error::schema(f, "node id out of range"));
        }
        let arr = v.as_array().ok_or_else(|| Error::schema(&f, "expected an array of strings"))?;
        if arr.is_empty() {
            return Err(Error::schema(&f, "empty value"));
        }
        match dim {
            None => dim = Some(arr.len()),
            Some(d) if d != arr.len() => return Err(Error::schema(&f, format!("expected {d} components"))),
            _ => {}
        }
        let row = arr
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let s = x
                    .as_str()
                    .ok_or_else(|| Error::schema(format!("{f}[{i}]"), "expected a rational string"))?;
                rational::parse_lenient(s).map_err(|e| Error::schema(format!("{f}[{i}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        rows[id] = Some(row);
    }
    let dim = dim.ok_or_else(|| Error::schema(field, "empty table"))?;
    let mut values = Vec::with_capacity(count * dim);
    for (id, r) in rows.into_iter().enumerate() {
        values.extend(r.ok_or_else(|| Error::schema(format!("{field}.{id}"), "missing value"))?);
    }
    Ok((dim, values))
}

/// Label map file: `{leaf_id: "label"}`.
pub fn parse_label_map(text: &str, tree: &EventTree) -> Result<Vec<String>> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::schema("$", e.to_string()))?;
    let m = root.as_object().ok_or_else(|| Error::schema("$", "expected an object"))?;
    let mut labels = vec![None; tree.num_leaves()];
    for (k, v) in m {
        let id = parse_node_key(k, k)?;
        if id >= tree.num_nodes() || !tree.is_leaf(id) {
            return Err(Error::schema(k, "not a leaf"));
        }
        let s = v.as_str().ok_or_else(|| Error::schema(k, "expected a label string"))?;
        labels[tree.leaf_index(id)] = Some(s.to_string());
    }
    labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| Error::schema(tree.leaf_node(i).to_string(), "missing label")))
        .collect()
}

pub fn label_map_value(tree: &EventTree, labels: &[String]) -> Value {
    let mut m = Map::new();
    for (i, l) in labels.iter().enumerate() {
        m.insert(tree.leaf_node(i).to_string(), Value::String(l.clone()));
    }
    Value::Object(m)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    use std::io::Write;
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BINOMIAL: &str = r#"{
  "horizon": 1,
  "asset_dim": 1,
  "nodes": [
    {"id": 0, "time": 0, "parent": null},
    {"id": 1, "time": 1, "parent": 0},
    {"id": 2, "time": 1, "parent": 0}
  ],
  "P": {"1": "1/2", "2": "1/2"},
  "processes": {"S": {"0": ["1"], "1": ["2"], "2": ["0.5"]}}
}"#;

    #[test]
    fn round_trip_is_byte_identical() {
        let f = TreeFile::parse(BINOMIAL).unwrap();
        let canonical = f.to_json_string();
        let again = TreeFile::parse(&canonical).unwrap().to_json_string();
        assert_eq!(canonical, again);
        assert_eq!(f.process("S").unwrap().at(2), &crate::rational::rat(1, 2));
    }

    #[test]
    fn measure_must_be_canonical() {
        for bad in ["\"2/4\"", "\"0.5\"", "0.5", "\"1\""] {
            let text = BINOMIAL.replace("\"1\": \"1/2\"", &format!("\"1\": {bad}"));
            match TreeFile::parse(&text) {
                Err(Error::Schema { field, .. }) => assert_eq!(field, "P.1"),
                other => panic!("accepted {bad}: {other:?}"),
            }
        }
    }

    #[test]
    fn schema_errors_name_the_field() {
        let text = BINOMIAL.replace("\"2\": [\"0.5\"]", "\"2\": [0.5]");
        match TreeFile::parse(&text) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "processes.S.2[0]"),
            other => panic!("{other:?}"),
        }
        let text = BINOMIAL.replace("\"horizon\": 1", "\"horizon\": \"one\"");
        assert!(matches!(TreeFile::parse(&text), Err(Error::Schema { field, .. }) if field == "horizon"));
    }
}
