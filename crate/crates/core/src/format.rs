//! JSON instance and flow documents.
//!
//! Instance:
//!
//! ```json
//! {
//!   "nodes": ["s", "t"],
//!   "edges": [{"id": "e", "tail": "s", "head": "t", "capacity": 5, "delay": 2}],
//!   "source": "s",
//!   "sink": "t",
//!   "rate": "4/3"
//! }
//! ```
//!
//! `rate` may be a JSON integer or a `"p/q"` string. Flows are written as a
//! list of `{path, rate, delay}` records plus `max_delay` and `total_rate`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{max_delay, path_delay, Edge, GraphInstance, PathFlow};
use crate::rational::Rational;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    nodes: Vec<String>,
    edges: Vec<EdgeDoc>,
    source: String,
    sink: String,
    rate: RateDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    id: String,
    tail: String,
    head: String,
    capacity: i64,
    delay: i64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RateDoc {
    Integer(i64),
    Text(String),
}

fn parse_error(err: serde_json::Error) -> Error {
    Error::Parse {
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    }
}

pub fn read_instance(bytes: &[u8]) -> Result<GraphInstance> {
    let doc: InstanceDoc = serde_json::from_slice(bytes).map_err(parse_error)?;
    let rate = match doc.rate {
        RateDoc::Integer(r) => Rational::from_integer(r),
        RateDoc::Text(s) => s.parse().map_err(|e| Error::Parse {
            line: 0,
            column: 0,
            message: format!("field `rate`: {e}"),
        })?,
    };
    Ok(GraphInstance {
        nodes: doc.nodes,
        edges: doc
            .edges
            .into_iter()
            .map(|e| Edge::new(e.id, e.tail, e.head, e.capacity, e.delay))
            .collect(),
        source: doc.source,
        sink: doc.sink,
        rate,
    })
}

pub fn write_instance(instance: &GraphInstance) -> Vec<u8> {
    let rate = match instance.rate.to_i64() {
        Some(r) => RateDoc::Integer(r),
        None => RateDoc::Text(instance.rate.to_string()),
    };
    let doc = InstanceDoc {
        nodes: instance.nodes.clone(),
        edges: instance
            .edges
            .iter()
            .map(|e| EdgeDoc {
                id: e.id.clone(),
                tail: e.tail.clone(),
                head: e.head.clone(),
                capacity: e.capacity,
                delay: e.delay,
            })
            .collect(),
        source: instance.source.clone(),
        sink: instance.sink.clone(),
        rate,
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("instance serialization");
    out.push(b'\n');
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRecord {
    pub path: Vec<String>,
    pub rate: Rational,
    pub delay: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowDoc {
    pub paths: Vec<PathRecord>,
    pub max_delay: Option<i64>,
    pub total_rate: Rational,
}

/// Flow document for `flow`, with paths listed by delay then edge ids.
pub fn flow_doc(instance: &GraphInstance, flow: &PathFlow) -> Result<FlowDoc> {
    let mut sorted = flow.clone();
    sorted.sort_for(instance);
    let paths = sorted
        .entries()
        .iter()
        .map(|p| {
            Ok(PathRecord {
                path: p.edges.iter().map(|&e| instance.edges[e].id.clone()).collect(),
                rate: p.rate.clone(),
                delay: path_delay(instance, &p.edges)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_delay = match max_delay(instance, flow) {
        Ok(d) => Some(d),
        Err(Error::EmptyFlow) => None,
        Err(e) => return Err(e),
    };
    Ok(FlowDoc {
        paths,
        max_delay,
        total_rate: flow.total_rate(),
    })
}

pub fn write_flow(instance: &GraphInstance, flow: &PathFlow) -> Result<Vec<u8>> {
    let doc = flow_doc(instance, flow)?;
    let mut out = serde_json::to_vec_pretty(&doc).expect("flow serialization");
    out.push(b'\n');
    Ok(out)
}

/// Parses a flow document back into a [`PathFlow`] over `instance`, checking
/// that the recorded delays and totals match.
pub fn read_flow(instance: &GraphInstance, bytes: &[u8]) -> Result<PathFlow> {
    let doc: FlowDoc = serde_json::from_slice(bytes).map_err(parse_error)?;
    let mut flow = PathFlow::new();
    for record in doc.paths {
        let edges = record
            .path
            .iter()
            .map(|id| {
                instance
                    .edge_index(id)
                    .ok_or_else(|| Error::MalformedPath(format!("unknown edge {id:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let delay = path_delay(instance, &edges)?;
        if delay != record.delay {
            return Err(Error::MalformedPath(format!(
                "recorded delay {} differs from computed {delay}",
                record.delay
            )));
        }
        flow.add(edges, record.rate);
    }
    if flow.total_rate() != doc.total_rate {
        return Err(Error::MalformedPath(format!(
            "recorded total {} differs from computed {}",
            doc.total_rate,
            flow.total_rate()
        )));
    }
    Ok(flow)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{
  "nodes": ["s", "t"],
  "edges": [{"id": "e", "tail": "s", "head": "t", "capacity": 5, "delay": 2}],
  "source": "s",
  "sink": "t",
  "rate": "4/3"
}"#;

    #[test]
    fn rate_fraction_parses() {
        let inst = read_instance(DOC.as_bytes()).unwrap();
        assert_eq!(inst.rate, Rational::new(4, 3));
        assert_eq!(inst.edges[0].capacity, 5);
    }

    #[test]
    fn integer_rate_parses() {
        let doc = DOC.replace("\"4/3\"", "3");
        assert_eq!(read_instance(doc.as_bytes()).unwrap().rate, Rational::from_integer(3));
    }

    #[test]
    fn bad_capacity_reports_location() {
        let doc = DOC.replace("\"capacity\": 5", "\"capacity\": \"x\"");
        match read_instance(doc.as_bytes()) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("invalid type"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn bad_rate_literal() {
        let doc = DOC.replace("\"4/3\"", "\"four\"");
        assert!(matches!(read_instance(doc.as_bytes()), Err(Error::Parse { .. })));
    }

    #[test]
    fn flow_round_trip() {
        let inst = read_instance(DOC.as_bytes()).unwrap();
        let flow = PathFlow::from_entries([(vec![0], Rational::new(4, 3))]);
        let bytes = write_flow(&inst, &flow).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.contains("\"rate\": \"4/3\""));
        assert!(text.contains("\"max_delay\": 2"));
        assert_eq!(read_flow(&inst, &bytes).unwrap(), flow);
    }
}
