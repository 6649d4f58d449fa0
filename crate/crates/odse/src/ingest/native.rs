//! Native line-delimited JSON graph format: one graph object per line with
//! fields `id`, `class`, `vertices`, `edges`. Diffable, streamable, and
//! trivially generated by test fixtures.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{OdseError, Result};
use crate::graph::LabeledGraph;

#[derive(Debug, Serialize, Deserialize)]
struct NativeRecord {
    class: String,
    #[serde(flatten)]
    graph: LabeledGraph,
}

pub fn write_native<W: Write>(samples: &[(LabeledGraph, String)], mut out: W) -> Result<()> {
    for (graph, class) in samples {
        let record = NativeRecord {
            class: class.clone(),
            graph: graph.clone(),
        };
        let line = serde_json::to_string(&record)?;
        writeln!(out, "{line}").map_err(|e| OdseError::io("<native stream>", e))?;
    }
    Ok(())
}

pub fn read_native<R: BufRead>(reader: R, source_name: &str) -> Result<Vec<(LabeledGraph, String)>> {
    let mut samples = Vec::new();
    for (line_no, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| OdseError::io(source_name, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: NativeRecord =
            serde_json::from_str(&line).map_err(|e| OdseError::Parse {
                source_name: source_name.to_string(),
                line: line_no + 1,
                reason: e.to_string(),
            })?;
        if record.class.is_empty() {
            return Err(OdseError::Parse {
                source_name: source_name.to_string(),
                line: line_no + 1,
                reason: "empty class label".into(),
            });
        }
        samples.push((record.graph, record.class));
    }
    Ok(samples)
}
