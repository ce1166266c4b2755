//! Three-valued outcomes of bounded searches.
//!
//! JSON shape: `{"status": "witness" | "refuted_at_bound" | "exhausted_at_bound",
//! "witness"?: ..., "refutation"?: ..., "frontier"?: ..., "bounds": {...},
//! "nodes_explored": n}`.

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Witness,
    RefutedAtBound,
    ExhaustedAtBound,
}

impl Status {
    /// Process exit code: 0 witness, 1 refuted, 2 exhausted.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Witness => 0,
            Status::RefutedAtBound => 1,
            Status::ExhaustedAtBound => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate<W> {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<W>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refutation: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frontier: Option<Value>,
    pub bounds: Map<String, Value>,
    pub nodes_explored: u64,
}

pub fn bounds(pairs: &[(&str, u64)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), Value::from(*v))).collect()
}

impl<W> Certificate<W> {
    pub fn witness(w: W, bounds: Map<String, Value>, nodes: u64) -> Self {
        Certificate { status: Status::Witness, witness: Some(w), refutation: None, frontier: None, bounds, nodes_explored: nodes }
    }

    pub fn refuted(r: Value, bounds: Map<String, Value>, nodes: u64) -> Self {
        Certificate { status: Status::RefutedAtBound, witness: None, refutation: Some(r), frontier: None, bounds, nodes_explored: nodes }
    }

    pub fn exhausted(frontier: Value, bounds: Map<String, Value>, nodes: u64) -> Self {
        Certificate { status: Status::ExhaustedAtBound, witness: None, refutation: None, frontier: Some(frontier), bounds, nodes_explored: nodes }
    }

    pub fn is_witness(&self) -> bool {
        self.status == Status::Witness
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> Certificate<V> {
        Certificate {
            status: self.status,
            witness: self.witness.map(f),
            refutation: self.refutation,
            frontier: self.frontier,
            bounds: self.bounds,
            nodes_explored: self.nodes_explored,
        }
    }
}

impl<W: Serialize> Certificate<W> {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("certificate serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let c = Certificate::witness(vec![1, 2], bounds(&[("len", 3)]), 17);
        let j = c.to_json();
        assert_eq!(j["status"], "witness");
        assert_eq!(j["witness"], serde_json::json!([1, 2]));
        assert_eq!(j["bounds"]["len"], 3);
        assert_eq!(j["nodes_explored"], 17);
        assert!(j.get("frontier").is_none());
        let e: Certificate<()> = Certificate::exhausted(Value::from("x"), bounds(&[]), 0);
        assert_eq!(e.to_json()["status"], "exhausted_at_bound");
        assert_eq!(e.status.exit_code(), 2);
    }
}
