use serde::{Deserialize, Serialize};

use super::{DpTable, RowData};
use crate::td::NiceKind;

/// Per-node statistics, written one JSON object per line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub node: usize,
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
    pub bag: Vec<usize>,
    pub rows: usize,
    pub max_witnesses: usize,
}

impl TraceRecord {
    pub fn of<D: RowData>(table: &DpTable<D>) -> Self {
        let vertex = match table.kind {
            NiceKind::Introduce(v) | NiceKind::Forget(v) => Some(v),
            _ => None,
        };
        TraceRecord {
            node: table.node,
            kind: table.kind.name().to_string(),
            vertex,
            bag: table.bag.clone(),
            rows: table.len(),
            max_witnesses: table.rows.iter().map(|r| r.data.witness_count()).max().unwrap_or(0),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("trace records serialize")
    }
}
