use std::fmt::Write;

use super::lexer::{is_ident_continue, is_ident_start};
use super::Document;
use crate::expr::Rule;
use crate::model::{Aspect, ElementId, ElementRef, Model, StageId};

const RESERVED: &[&str] = &[
    "model", "thimac", "var", "const", "input", "flow", "trigger", "rule", "event", "behavior",
    "branch", "recur", "contain", "aspect", "role", "in", "unit", "emitting", "choose",
];

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn name(s: &str) -> String {
    let mut chars = s.chars();
    let plain = chars.next().is_some_and(is_ident_start)
        && chars.all(is_ident_continue)
        && !RESERVED.contains(&s);
    if plain {
        s.to_string()
    } else {
        quote(s)
    }
}

fn stage_path(model: &Model, id: StageId) -> String {
    let stage = model.stage(id).expect("serialize requires a valid model");
    let owner = model
        .thimac(stage.owner)
        .expect("serialize requires a valid model");
    format!("{}.{}", name(&owner.name), stage.kind)
}

/// Writes `doc` in canonical `.tm` form. Thimacs are emitted flat, in model
/// order, with `in` naming the parent, so ids are reassigned identically
/// when the text is parsed again.
pub fn serialize(doc: &Document) -> String {
    let m = &doc.model;
    let mut out = String::new();
    let _ = writeln!(out, "model {} {{", name(&m.name));

    for v in &m.variables {
        let _ = write!(out, "  {} {} = {}", v.role.keyword(), v.name, v.value);
        if let Some(unit) = &v.unit {
            let _ = write!(out, " unit {}", quote(unit));
        }
        out.push('\n');
    }

    for t in &m.thimacs {
        let _ = write!(out, "  thimac {}", name(&t.name));
        if let Some(p) = t.parent {
            let parent = m.thimac(p).expect("serialize requires a valid model");
            let _ = write!(out, " in {}", name(&parent.name));
        }
        out.push_str(" {\n");
        if t.aspect != Aspect::Dual {
            let _ = writeln!(out, "    aspect {}", t.aspect.keyword());
        }
        if let Some(role) = t.swcm_role {
            let _ = writeln!(out, "    role {}", role.keyword());
        }
        for s in &t.stages {
            let stage = m.stage(*s).expect("serialize requires a valid model");
            match &stage.label {
                Some(label) => {
                    let _ = writeln!(out, "    {} {}", stage.kind, quote(label));
                }
                None => {
                    let _ = writeln!(out, "    {}", stage.kind);
                }
            }
        }
        out.push_str("  }\n");
    }

    for f in &m.flows {
        let _ = writeln!(
            out,
            "  flow {} -> {}",
            stage_path(m, f.from),
            stage_path(m, f.to)
        );
    }
    for t in &m.triggers {
        let _ = writeln!(
            out,
            "  trigger {} -> {}",
            stage_path(m, t.from),
            stage_path(m, t.to)
        );
    }

    for s in &m.stages {
        let Some(rule) = &s.rule else { continue };
        let path = stage_path(m, s.id);
        match rule {
            Rule::Update(assignments) => {
                let _ = writeln!(out, "  rule {path} {{");
                for a in assignments {
                    let _ = writeln!(out, "    {} = {}", a.target, a.value);
                }
            }
            Rule::Choose(outcomes) => {
                let _ = writeln!(out, "  rule {path} choose {{");
                for o in outcomes {
                    let trigger = m
                        .trigger(o.trigger)
                        .expect("serialize requires a valid model");
                    let _ = writeln!(
                        out,
                        "    {}: {} -> {}",
                        name(&o.label),
                        o.probability,
                        stage_path(m, trigger.to)
                    );
                }
            }
        }
        out.push_str("  }\n");
    }

    for e in &doc.events {
        let _ = write!(out, "  event {} {}", name(&e.id), quote(&e.description));
        if e.data_emitting {
            out.push_str(" emitting");
        }
        out.push_str(" {");
        let items: Vec<String> = e.elements.iter().map(|r| element(m, *r)).collect();
        if items.is_empty() {
            out.push_str("}\n");
        } else {
            let _ = writeln!(out, "\n    {}\n  }}", items.join(",\n    "));
        }
    }

    if let Some(b) = &doc.behavior {
        out.push_str("  behavior {\n");
        for (from, to) in &b.successions {
            let _ = writeln!(out, "    {} -> {}", name(from), name(to));
        }
        for group in &b.exclusive_groups {
            let arms: Vec<String> = group
                .iter()
                .map(|arm| match arm.as_slice() {
                    [single] => name(single),
                    many => format!(
                        "[{}]",
                        many.iter().map(|e| name(e)).collect::<Vec<_>>().join(", ")
                    ),
                })
                .collect();
            let _ = writeln!(out, "    branch {{{}}}", arms.join(", "));
        }
        for r in &b.recurrences {
            let _ = writeln!(out, "    recur {}", name(r));
        }
        for (container, inner) in &b.containments {
            let inner: Vec<String> = inner.iter().map(|e| name(e)).collect();
            let _ = writeln!(
                out,
                "    contain {} {{{}}}",
                name(container),
                inner.join(", ")
            );
        }
        out.push_str("  }\n");
    }

    out.push_str("}\n");
    out
}

fn element(m: &Model, r: ElementRef) -> String {
    match r {
        ElementRef::Thimac(t) => name(&m.thimac(t).expect("serialize requires a valid model").name),
        ElementRef::Element(ElementId::Stage(s)) => stage_path(m, s),
        ElementRef::Element(ElementId::Flow(f)) => {
            let f = m.flow(f).expect("serialize requires a valid model");
            format!("{} -> {}", stage_path(m, f.from), stage_path(m, f.to))
        }
        ElementRef::Element(ElementId::Trigger(t)) => {
            let t = m.trigger(t).expect("serialize requires a valid model");
            format!("{} -> {}", stage_path(m, t.from), stage_path(m, t.to))
        }
    }
}
