//! DOT output for static models, event-region overlays and behavior graphs.
//!
//! Stages are nodes labeled `Thimac.kind`; flows are solid edges and
//! triggers dashed ones. Output depends only on the inputs, so identical
//! inputs give identical bytes.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::behavior::BehaviorGraph;
use crate::event::EventCatalog;
use crate::model::{Model, StageId, ThimacId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Static,
    Events,
    Behavior,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderOptions {
    pub target: Target,
    pub show_triggers: bool,
    pub cluster_thimacs: bool,
    /// Fill colors cycled over event regions.
    pub palette: Vec<String>,
}

impl RenderOptions {
    pub fn new(target: Target) -> Self {
        RenderOptions {
            target,
            show_triggers: true,
            cluster_thimacs: true,
            palette: [
                "lightblue",
                "palegreen",
                "lightpink",
                "khaki",
                "lavender",
                "peachpuff",
                "lightcyan",
                "thistle",
            ]
            .map(String::from)
            .to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("an events overlay needs an event catalog")]
    MissingCatalog,
    #[error("a behavior diagram needs a behavior graph")]
    MissingGraph,
    #[error("an events overlay needs a nonempty palette")]
    EmptyPalette,
}

fn quoted(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn node_id(s: StageId) -> String {
    format!("s{}", s.0)
}

pub fn render(
    model: &Model,
    catalog: Option<&EventCatalog>,
    graph: Option<&BehaviorGraph>,
    opts: &RenderOptions,
) -> Result<String, RenderError> {
    match opts.target {
        Target::Static => Ok(render_static(model, opts)),
        Target::Events => render_events(model, catalog.ok_or(RenderError::MissingCatalog)?, opts),
        Target::Behavior => Ok(render_behavior(
            graph.ok_or(RenderError::MissingGraph)?,
            catalog,
        )),
    }
}

fn header(out: &mut String, name: &str) {
    let _ = writeln!(out, "digraph {} {{", quoted(name));
    out.push_str("  rankdir=LR;\n  compound=true;\n  node [shape=box, fontname=\"Helvetica\"];\n");
}

fn stage_node(model: &Model, s: StageId, indent: &str) -> String {
    format!(
        "{indent}{} [label={}];\n",
        node_id(s),
        quoted(&model.stage_name(s))
    )
}

fn arcs(out: &mut String, model: &Model, opts: &RenderOptions) {
    for f in &model.flows {
        let _ = writeln!(out, "  {} -> {};", node_id(f.from), node_id(f.to));
    }
    if opts.show_triggers {
        for t in &model.triggers {
            let _ = writeln!(
                out,
                "  {} -> {} [style=dashed];",
                node_id(t.from),
                node_id(t.to)
            );
        }
    }
}

fn thimac_cluster(out: &mut String, model: &Model, t: ThimacId, depth: usize) {
    let Some(thimac) = model.thimac(t) else {
        return;
    };
    let indent = "  ".repeat(depth);
    let _ = writeln!(out, "{indent}subgraph cluster_t{} {{", t.0);
    let _ = writeln!(out, "{indent}  label={};", quoted(&thimac.name));
    for s in &thimac.stages {
        out.push_str(&stage_node(model, *s, &format!("{indent}  ")));
    }
    for child in model.thimacs.iter().filter(|c| c.parent == Some(t)) {
        thimac_cluster(out, model, child.id, depth + 1);
    }
    let _ = writeln!(out, "{indent}}}");
}

/// Stages, flows and triggers, with one nested cluster per thimac when
/// `cluster_thimacs` is set.
pub fn render_static(model: &Model, opts: &RenderOptions) -> String {
    let mut out = String::new();
    header(&mut out, &model.name);
    if opts.cluster_thimacs {
        for root in model.thimacs.iter().filter(|t| t.parent.is_none()) {
            thimac_cluster(&mut out, model, root.id, 1);
        }
    } else {
        for s in &model.stages {
            out.push_str(&stage_node(model, s.id, "  "));
        }
    }
    arcs(&mut out, model, opts);
    out.push_str("}\n");
    out
}

/// Every stage once at top level, then one filled cluster per event
/// listing the stages of its region. A stage shared by several events is
/// listed in each of their clusters.
pub fn render_events(
    model: &Model,
    catalog: &EventCatalog,
    opts: &RenderOptions,
) -> Result<String, RenderError> {
    if opts.palette.is_empty() {
        return Err(RenderError::EmptyPalette);
    }
    let mut out = String::new();
    header(&mut out, &model.name);
    for s in &model.stages {
        out.push_str(&stage_node(model, s.id, "  "));
    }
    for (i, e) in catalog.iter().enumerate() {
        let color = &opts.palette[i % opts.palette.len()];
        let _ = writeln!(out, "  subgraph cluster_e{i} {{");
        let _ = writeln!(
            out,
            "    label={};",
            quoted(&format!("{}: {}", e.id, e.description))
        );
        let _ = writeln!(out, "    style=filled;\n    fillcolor={};", quoted(color));
        let stages: Vec<String> = e.region.stages().map(node_id).collect();
        if !stages.is_empty() {
            let _ = writeln!(out, "    {};", stages.join("; "));
        }
        out.push_str("  }\n");
    }
    arcs(&mut out, model, opts);
    out.push_str("}\n");
    Ok(out)
}

/// Events as nodes, successions as edges, recurrences as bold back-edges,
/// arm heads of exclusive groups as same-rank diamonds, containers as
/// clusters.
pub fn render_behavior(graph: &BehaviorGraph, catalog: Option<&EventCatalog>) -> String {
    let mut out = String::new();
    out.push_str(
        "digraph behavior {\n  rankdir=TB;\n  node [shape=ellipse, fontname=\"Helvetica\"];\n",
    );
    let heads = graph.outcome_events();
    let label = |id: &str| match catalog.and_then(|c| c.get(id)) {
        Some(e) if !e.description.is_empty() => format!("{id}\n{}", e.description),
        _ => id.to_string(),
    };
    for id in graph.node_ids() {
        let shape = if heads.contains(&id) {
            ", shape=diamond"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            "  {} [label={}{shape}];",
            quoted(&id),
            quoted(&label(&id))
        );
    }
    for (i, (container, inner)) in graph.containments().iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_c{i} {{");
        let _ = writeln!(out, "    label={};", quoted(&label(container)));
        let members: Vec<String> = inner
            .iter()
            .filter(|e| graph.is_node(e))
            .map(|e| quoted(e))
            .collect();
        if !members.is_empty() {
            let _ = writeln!(out, "    {};", members.join("; "));
        }
        out.push_str("  }\n");
    }
    for (i, group) in graph.exclusive_groups().iter().enumerate() {
        let arm_heads: Vec<String> = group
            .iter()
            .flat_map(|arm| arm.iter().filter(|e| heads.contains(e)).take(1))
            .map(|e| quoted(e))
            .collect();
        if !arm_heads.is_empty() {
            let _ = writeln!(
                out,
                "  subgraph arms_{i} {{ rank=same; {}; }}",
                arm_heads.join("; ")
            );
        }
    }
    for (a, b) in graph.successions() {
        let _ = writeln!(out, "  {} -> {};", quoted(&a), quoted(&b));
    }
    for e in graph.back_edges() {
        let _ = writeln!(
            out,
            "  {} -> {} [style=bold, constraint=false, label=\"recur\"];",
            quoted(&e.from),
            quoted(&e.to)
        );
    }
    out.push_str("}\n");
    out
}
