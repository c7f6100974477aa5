//! Structural rules for static models.
//!
//! Violations are data: [`validate_static`] never fails, it returns a report
//! sorted by rule id and then by the offending element.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::expr::Rule;
use crate::model::{
    intra_flow_allowed, FlowId, Model, StageId, StageKind, ThimacId, TriggerId, VarRole,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    DuplicateId,
    DanglingReference,
    ParentCycle,
    DuplicateStageKind,
    DuplicateSwcmRole,
    RuleOnIllegalStage,
    CrossMachineFlow,
    IntraMachineFlow,
    TriggerTarget,
    DuplicateArc,
    IntraMachineCycle,
    DuplicateVariable,
    RuleReference,
}

impl RuleId {
    pub const ALL: [RuleId; 13] = [
        RuleId::DuplicateId,
        RuleId::DanglingReference,
        RuleId::ParentCycle,
        RuleId::DuplicateStageKind,
        RuleId::DuplicateSwcmRole,
        RuleId::RuleOnIllegalStage,
        RuleId::CrossMachineFlow,
        RuleId::IntraMachineFlow,
        RuleId::TriggerTarget,
        RuleId::DuplicateArc,
        RuleId::IntraMachineCycle,
        RuleId::DuplicateVariable,
        RuleId::RuleReference,
    ];

    pub fn code(self) -> &'static str {
        match self {
            RuleId::DuplicateId => "TM001",
            RuleId::DanglingReference => "TM002",
            RuleId::ParentCycle => "TM003",
            RuleId::DuplicateStageKind => "TM004",
            RuleId::DuplicateSwcmRole => "TM005",
            RuleId::RuleOnIllegalStage => "TM006",
            RuleId::CrossMachineFlow => "TM007",
            RuleId::IntraMachineFlow => "TM008",
            RuleId::TriggerTarget => "TM009",
            RuleId::DuplicateArc => "TM010",
            RuleId::IntraMachineCycle => "TM011",
            RuleId::DuplicateVariable => "TM012",
            RuleId::RuleReference => "TM013",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleId::DuplicateId => "duplicate-id",
            RuleId::DanglingReference => "referential-integrity",
            RuleId::ParentCycle => "parent-cycle",
            RuleId::DuplicateStageKind => "duplicate-stage-kind",
            RuleId::DuplicateSwcmRole => "duplicate-swcm-role",
            RuleId::RuleOnIllegalStage => "rule-on-illegal-stage",
            RuleId::CrossMachineFlow => "cross-machine-flow",
            RuleId::IntraMachineFlow => "intra-machine-flow",
            RuleId::TriggerTarget => "trigger-target",
            RuleId::DuplicateArc => "duplicate-arc",
            RuleId::IntraMachineCycle => "intra-machine-cycle",
            RuleId::DuplicateVariable => "duplicate-variable",
            RuleId::RuleReference => "rule-reference",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.code(), self.name())
    }
}

/// The element a violation is attached to. Ids may be dangling.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Subject {
    Thimac(ThimacId),
    Stage(StageId),
    Flow(FlowId),
    Trigger(TriggerId),
    Variable(String),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Thimac(id) => id.fmt(f),
            Subject::Stage(id) => id.fmt(f),
            Subject::Flow(id) => id.fmt(f),
            Subject::Trigger(id) => id.fmt(f),
            Subject::Variable(name) => write!(f, "var {name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub rule: RuleId,
    pub subject: Subject,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.rule, self.subject, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn rules(&self) -> BTreeSet<RuleId> {
        self.violations.iter().map(|v| v.rule).collect()
    }

    pub fn has(&self, rule: RuleId) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

struct Collector<'m> {
    model: &'m Model,
    out: BTreeSet<Violation>,
}

impl Collector<'_> {
    fn push(&mut self, rule: RuleId, subject: Subject, message: String) {
        self.out.insert(Violation {
            rule,
            subject,
            message,
        });
    }
}

pub fn validate_static(model: &Model) -> ValidationReport {
    let mut c = Collector {
        model,
        out: BTreeSet::new(),
    };
    duplicate_ids(&mut c);
    references(&mut c);
    parent_cycles(&mut c);
    stage_kinds(&mut c);
    swcm_roles(&mut c);
    flows(&mut c);
    triggers(&mut c);
    arcs(&mut c);
    intra_cycles(&mut c);
    variables(&mut c);
    rules(&mut c);
    ValidationReport {
        violations: c.out.into_iter().collect(),
    }
}

fn duplicates<T: Ord + Copy>(ids: impl Iterator<Item = T>) -> Vec<T> {
    let mut seen = BTreeSet::new();
    ids.filter(|id| !seen.insert(*id)).collect()
}

fn duplicate_ids(c: &mut Collector) {
    let m = c.model;
    for id in duplicates(m.thimacs.iter().map(|t| t.id)) {
        c.push(
            RuleId::DuplicateId,
            Subject::Thimac(id),
            "thimac id declared more than once".into(),
        );
    }
    for id in duplicates(m.stages.iter().map(|s| s.id)) {
        c.push(
            RuleId::DuplicateId,
            Subject::Stage(id),
            "stage id declared more than once".into(),
        );
    }
    for id in duplicates(m.flows.iter().map(|f| f.id)) {
        c.push(
            RuleId::DuplicateId,
            Subject::Flow(id),
            "flow id declared more than once".into(),
        );
    }
    for id in duplicates(m.triggers.iter().map(|t| t.id)) {
        c.push(
            RuleId::DuplicateId,
            Subject::Trigger(id),
            "trigger id declared more than once".into(),
        );
    }
    let mut names = BTreeSet::new();
    for t in &m.thimacs {
        if !names.insert(t.name.as_str()) {
            c.push(
                RuleId::DuplicateId,
                Subject::Thimac(t.id),
                format!("thimac name `{}` declared more than once", t.name),
            );
        }
    }
}

fn references(c: &mut Collector) {
    let m = c.model;
    for t in &m.thimacs {
        if let Some(p) = t.parent {
            if m.thimac(p).is_none() {
                c.push(
                    RuleId::DanglingReference,
                    Subject::Thimac(t.id),
                    format!("parent {p} of `{}` does not exist", t.name),
                );
            }
        }
        for s in &t.stages {
            match m.stage(*s) {
                None => c.push(
                    RuleId::DanglingReference,
                    Subject::Thimac(t.id),
                    format!("`{}` lists missing {s}", t.name),
                ),
                Some(stage) if stage.owner != t.id => c.push(
                    RuleId::DanglingReference,
                    Subject::Thimac(t.id),
                    format!("`{}` lists {s} owned by {}", t.name, stage.owner),
                ),
                Some(_) => {}
            }
        }
    }
    for s in &m.stages {
        match m.thimac(s.owner) {
            None => c.push(
                RuleId::DanglingReference,
                Subject::Stage(s.id),
                format!("owner {} does not exist", s.owner),
            ),
            Some(t) if !t.stages.contains(&s.id) => c.push(
                RuleId::DanglingReference,
                Subject::Stage(s.id),
                format!("owner `{}` does not list this stage", t.name),
            ),
            Some(_) => {}
        }
    }
    for f in &m.flows {
        for end in [f.from, f.to] {
            if m.stage(end).is_none() {
                c.push(
                    RuleId::DanglingReference,
                    Subject::Flow(f.id),
                    format!("endpoint {end} does not exist"),
                );
            }
        }
    }
    for t in &m.triggers {
        for end in [t.from, t.to] {
            if m.stage(end).is_none() {
                c.push(
                    RuleId::DanglingReference,
                    Subject::Trigger(t.id),
                    format!("endpoint {end} does not exist"),
                );
            }
        }
    }
}

fn parent_cycles(c: &mut Collector) {
    let m = c.model;
    for t in &m.thimacs {
        let mut seen = BTreeSet::from([t.id]);
        let mut current = t.parent;
        while let Some(p) = current {
            if p == t.id {
                c.push(
                    RuleId::ParentCycle,
                    Subject::Thimac(t.id),
                    format!("`{}` is its own ancestor", t.name),
                );
                break;
            }
            if !seen.insert(p) {
                break;
            }
            current = m.thimac(p).and_then(|t| t.parent);
        }
    }
}

fn stage_kinds(c: &mut Collector) {
    let m = c.model;
    let mut seen: BTreeSet<(ThimacId, StageKind)> = BTreeSet::new();
    for s in &m.stages {
        if !seen.insert((s.owner, s.kind)) {
            c.push(
                RuleId::DuplicateStageKind,
                Subject::Stage(s.id),
                format!("owner already has a {} stage", s.kind),
            );
        }
    }
}

fn swcm_roles(c: &mut Collector) {
    let mut seen = BTreeMap::new();
    for t in &c.model.thimacs {
        let Some(role) = t.swcm_role else { continue };
        if role == crate::model::SwcmRole::None {
            continue;
        }
        if let Some(first) = seen.insert(role, t.name.clone()) {
            c.push(
                RuleId::DuplicateSwcmRole,
                Subject::Thimac(t.id),
                format!("role {} already held by `{first}`", role.keyword()),
            );
            seen.insert(role, first);
        }
    }
}

fn flows(c: &mut Collector) {
    let m = c.model;
    for f in &m.flows {
        let (Some(from), Some(to)) = (m.stage(f.from), m.stage(f.to)) else {
            continue;
        };
        if from.owner != to.owner {
            if from.kind != StageKind::Transfer || to.kind != StageKind::Transfer {
                c.push(
                    RuleId::CrossMachineFlow,
                    Subject::Flow(f.id),
                    format!(
                        "cross-machine flow {} -> {} must be transfer -> transfer",
                        m.stage_name(f.from),
                        m.stage_name(f.to)
                    ),
                );
            }
        } else if !intra_flow_allowed(from.kind, to.kind) {
            c.push(
                RuleId::IntraMachineFlow,
                Subject::Flow(f.id),
                format!(
                    "{} -> {} is not a legal intra-machine flow",
                    from.kind, to.kind
                ),
            );
        }
    }
}

fn triggers(c: &mut Collector) {
    let m = c.model;
    for t in &m.triggers {
        if let Some(to) = m.stage(t.to) {
            if to.kind != StageKind::Create {
                c.push(
                    RuleId::TriggerTarget,
                    Subject::Trigger(t.id),
                    format!("trigger lands on {} instead of create", m.stage_name(t.to)),
                );
            }
        }
    }
}

fn arcs(c: &mut Collector) {
    let m = c.model;
    let mut flow_ends = BTreeSet::new();
    for f in &m.flows {
        if !flow_ends.insert((f.from, f.to)) {
            c.push(
                RuleId::DuplicateArc,
                Subject::Flow(f.id),
                "another flow joins the same stages".into(),
            );
        }
    }
    let mut trigger_ends = BTreeSet::new();
    for t in &m.triggers {
        if flow_ends.contains(&(t.from, t.to)) {
            c.push(
                RuleId::DuplicateArc,
                Subject::Trigger(t.id),
                "a flow already joins the same stages".into(),
            );
        } else if !trigger_ends.insert((t.from, t.to)) {
            c.push(
                RuleId::DuplicateArc,
                Subject::Trigger(t.id),
                "another trigger joins the same stages".into(),
            );
        }
    }
}

/// Cycles among a machine's own flows. A transfer stage is both the exit and
/// the entry port of its machine, so paths through it leave the machine and
/// do not close an internal loop.
fn intra_cycles(c: &mut Collector) {
    let m = c.model;
    let mut adjacency: BTreeMap<StageId, Vec<(StageId, FlowId)>> = BTreeMap::new();
    for f in &m.flows {
        let (Some(from), Some(to)) = (m.stage(f.from), m.stage(f.to)) else {
            continue;
        };
        if from.owner == to.owner
            && from.kind != StageKind::Transfer
            && to.kind != StageKind::Transfer
        {
            adjacency.entry(f.from).or_default().push((f.to, f.id));
        }
    }
    let reaches = |start: StageId, goal: StageId| {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(s) = stack.pop() {
            if s == goal {
                return true;
            }
            for (next, _) in adjacency.get(&s).into_iter().flatten() {
                if seen.insert(*next) {
                    stack.push(*next);
                }
            }
        }
        false
    };
    let mut on_cycle = Vec::new();
    for (from, outs) in &adjacency {
        for (to, flow) in outs {
            if reaches(*to, *from) {
                on_cycle.push(*flow);
            }
        }
    }
    for flow in on_cycle {
        c.push(
            RuleId::IntraMachineCycle,
            Subject::Flow(flow),
            "flow lies on a cycle inside its machine".into(),
        );
    }
}

fn variables(c: &mut Collector) {
    let mut seen = BTreeSet::new();
    for v in &c.model.variables {
        if !seen.insert(v.name.as_str()) {
            c.push(
                RuleId::DuplicateVariable,
                Subject::Variable(v.name.clone()),
                "variable declared more than once".into(),
            );
        }
    }
}

fn rules(c: &mut Collector) {
    let m = c.model;
    for s in &m.stages {
        let Some(rule) = &s.rule else { continue };
        if !matches!(s.kind, StageKind::Create | StageKind::Process) {
            c.push(
                RuleId::RuleOnIllegalStage,
                Subject::Stage(s.id),
                format!("rules attach only to create or process, not {}", s.kind),
            );
        }
        for e in rule.expressions() {
            for name in e.variables() {
                if m.variable(name).is_none() {
                    c.push(
                        RuleId::RuleReference,
                        Subject::Stage(s.id),
                        format!("expression uses undeclared variable `{name}`"),
                    );
                }
            }
        }
        match rule {
            Rule::Update(assignments) => {
                let mut targets = BTreeSet::new();
                for a in assignments {
                    match m.variable(&a.target) {
                        None => c.push(
                            RuleId::RuleReference,
                            Subject::Stage(s.id),
                            format!("assignment to undeclared variable `{}`", a.target),
                        ),
                        Some(v) if v.role != VarRole::State => c.push(
                            RuleId::RuleReference,
                            Subject::Stage(s.id),
                            format!("assignment to {:?} `{}`", v.role, a.target).to_lowercase(),
                        ),
                        Some(_) => {}
                    }
                    if !targets.insert(a.target.as_str()) {
                        c.push(
                            RuleId::RuleReference,
                            Subject::Stage(s.id),
                            format!("`{}` assigned twice in one rule", a.target),
                        );
                    }
                }
            }
            Rule::Choose(outcomes) => {
                if outcomes.is_empty() {
                    c.push(
                        RuleId::RuleReference,
                        Subject::Stage(s.id),
                        "choice without outcomes".into(),
                    );
                }
                let mut labels = BTreeSet::new();
                for o in outcomes {
                    if !labels.insert(o.label.as_str()) {
                        c.push(
                            RuleId::RuleReference,
                            Subject::Stage(s.id),
                            format!("outcome `{}` listed twice", o.label),
                        );
                    }
                    match m.trigger(o.trigger) {
                        None => c.push(
                            RuleId::RuleReference,
                            Subject::Stage(s.id),
                            format!("outcome `{}` names missing {}", o.label, o.trigger),
                        ),
                        Some(t) if t.from != s.id => c.push(
                            RuleId::RuleReference,
                            Subject::Stage(s.id),
                            format!("outcome `{}` names a trigger of another stage", o.label),
                        ),
                        Some(_) => {}
                    }
                }
            }
        }
    }
}
