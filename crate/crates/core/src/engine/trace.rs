use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::behavior::{BehaviorError, BehaviorGraph, Verdict};
use crate::model::{ElementId, StageId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub tick: u64,
    pub stage: StageId,
    /// `Thimac.kind` of the fired stage.
    pub stage_name: String,
    pub thing: u64,
    pub event: Option<String>,
    /// Flow the thing arrived by, or trigger that caused its creation.
    pub via: Option<ElementId>,
    /// Label of the drawn outcome when the stage has a choice rule.
    pub outcome: Option<String>,
    /// State variables after the firing, in declaration order.
    pub variables: Vec<(String, f64)>,
}

impl TraceEntry {
    pub fn variable(&self, name: &str) -> Option<f64> {
        self.variables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    /// `tick<TAB>stage<TAB>thing<TAB>event<TAB>var=value,...`, with `-`
    /// for an unmapped event.
    pub fn to_tsv(&self) -> String {
        let vars: Vec<String> = self
            .variables
            .iter()
            .map(|(n, v)| format!("{n}={v}"))
            .collect();
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.tick,
            self.stage_name,
            self.thing,
            self.event.as_deref().unwrap_or("-"),
            vars.join(",")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "event")]
pub enum Termination {
    TerminalEvent(String),
    Quiescent,
    MaxTicks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub seed: u64,
    pub entries: Vec<TraceEntry>,
    pub ticks: u64,
    pub termination: Termination,
    pub warnings: Vec<String>,
}

impl Trace {
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = writeln!(out, "{}", e.to_tsv());
        }
        out
    }

    /// One JSON object per entry.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{}",
                serde_json::to_string(e).expect("entries serialize")
            );
        }
        out
    }

    /// Mapped events with consecutive repeats collapsed.
    pub fn events(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in self.entries.iter().filter_map(|e| e.event.as_ref()) {
            if out.last() != Some(e) {
                out.push(e.clone());
            }
        }
        out
    }

    /// Drawn outcome labels in firing order.
    pub fn outcomes(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter_map(|e| e.outcome.as_deref())
            .collect()
    }

    /// Variable snapshots taken each time `stage` fired.
    pub fn snapshots_at(&self, stage: StageId) -> Vec<&[(String, f64)]> {
        self.entries
            .iter()
            .filter(|e| e.stage == stage)
            .map(|e| e.variables.as_slice())
            .collect()
    }
}

/// Event sequence of `trace` and its conformance to `graph`.
pub fn trace_events(
    trace: &Trace,
    graph: &BehaviorGraph,
) -> Result<(Vec<String>, Verdict), BehaviorError> {
    let events = trace.events();
    let verdict = graph.conforms(&events)?;
    Ok((events, verdict))
}
