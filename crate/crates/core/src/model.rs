//! Static thinging-machine models: thimacs, their stages, flows, triggers and
//! variables, plus region extraction and element counting.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::Rule;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident, $prefix:literal) => {
        $(#[$meta])*
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "#{}"), self.0)
            }
        }
    };
}

id_type!(
    /// Identifier of a [`Thimac`].
    ThimacId,
    "thimac"
);
id_type!(
    /// Identifier of a [`Stage`].
    StageId,
    "stage"
);
id_type!(
    /// Identifier of a [`Flow`].
    FlowId,
    "flow"
);
id_type!(
    /// Identifier of a [`Trigger`].
    TriggerId,
    "trigger"
);

/// The five generic actions a machine can perform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageKind {
    Create,
    Process,
    Receive,
    Release,
    Transfer,
}

impl StageKind {
    pub const ALL: [StageKind; 5] = [
        StageKind::Create,
        StageKind::Process,
        StageKind::Receive,
        StageKind::Release,
        StageKind::Transfer,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            StageKind::Create => "create",
            StageKind::Process => "process",
            StageKind::Receive => "receive",
            StageKind::Release => "release",
            StageKind::Transfer => "transfer",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        StageKind::ALL.into_iter().find(|k| k.keyword() == word)
    }

    /// Position in [`StageKind::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Intra-machine flow pairs that are legal. Cross-machine flows are always
/// `Transfer -> Transfer` and are not listed here.
pub const INTRA_FLOW_TABLE: &[(StageKind, StageKind)] = &[
    (StageKind::Create, StageKind::Release),
    (StageKind::Create, StageKind::Process),
    (StageKind::Process, StageKind::Release),
    (StageKind::Receive, StageKind::Process),
    (StageKind::Receive, StageKind::Release),
    (StageKind::Release, StageKind::Transfer),
    (StageKind::Transfer, StageKind::Receive),
];

pub fn intra_flow_allowed(from: StageKind, to: StageKind) -> bool {
    INTRA_FLOW_TABLE.contains(&(from, to))
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Aspect {
    Thing,
    Machine,
    #[default]
    Dual,
}

impl Aspect {
    pub fn keyword(self) -> &'static str {
        match self {
            Aspect::Thing => "thing",
            Aspect::Machine => "machine",
            Aspect::Dual => "dual",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        [Aspect::Thing, Aspect::Machine, Aspect::Dual]
            .into_iter()
            .find(|a| a.keyword() == word)
    }
}

/// Position of a thimac in the communication pipeline
/// (source, transmitter, channel, receiver, destination).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SwcmRole {
    Source,
    Transmitter,
    Channel,
    Receiver,
    Destination,
    None,
}

impl SwcmRole {
    const ALL: [SwcmRole; 6] = [
        SwcmRole::Source,
        SwcmRole::Transmitter,
        SwcmRole::Channel,
        SwcmRole::Receiver,
        SwcmRole::Destination,
        SwcmRole::None,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            SwcmRole::Source => "source",
            SwcmRole::Transmitter => "transmitter",
            SwcmRole::Channel => "channel",
            SwcmRole::Receiver => "receiver",
            SwcmRole::Destination => "destination",
            SwcmRole::None => "none",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        SwcmRole::ALL.into_iter().find(|r| r.keyword() == word)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thimac {
    pub id: ThimacId,
    pub name: String,
    pub aspect: Aspect,
    pub parent: Option<ThimacId>,
    pub swcm_role: Option<SwcmRole>,
    pub stages: Vec<StageId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub id: StageId,
    pub kind: StageKind,
    pub owner: ThimacId,
    pub label: Option<String>,
    pub rule: Option<Rule>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flow {
    pub id: FlowId,
    pub from: StageId,
    pub to: StageId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trigger {
    pub id: TriggerId,
    pub from: StageId,
    pub to: StageId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarRole {
    State,
    Constant,
    Input,
}

impl VarRole {
    /// DSL keyword that declares a variable of this role.
    pub fn keyword(self) -> &'static str {
        match self {
            VarRole::State => "var",
            VarRole::Constant => "const",
            VarRole::Input => "input",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub role: VarRole,
    pub value: f64,
    pub unit: Option<String>,
}

/// A graph element that can belong to a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type", content = "id")]
pub enum ElementId {
    Stage(StageId),
    Flow(FlowId),
    Trigger(TriggerId),
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementId::Stage(id) => id.fmt(f),
            ElementId::Flow(id) => id.fmt(f),
            ElementId::Trigger(id) => id.fmt(f),
        }
    }
}

/// A selection handle for [`subdiagram`]. Selecting a thimac selects every
/// stage of it and its descendants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ElementRef {
    Thimac(ThimacId),
    Element(ElementId),
}

impl From<ElementId> for ElementRef {
    fn from(e: ElementId) -> Self {
        ElementRef::Element(e)
    }
}

impl From<StageId> for ElementRef {
    fn from(id: StageId) -> Self {
        ElementRef::Element(ElementId::Stage(id))
    }
}

impl From<FlowId> for ElementRef {
    fn from(id: FlowId) -> Self {
        ElementRef::Element(ElementId::Flow(id))
    }
}

impl From<TriggerId> for ElementRef {
    fn from(id: TriggerId) -> Self {
        ElementRef::Element(ElementId::Trigger(id))
    }
}

impl From<ThimacId> for ElementRef {
    fn from(id: ThimacId) -> Self {
        ElementRef::Thimac(id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown element: {0}")]
    UnknownElement(String),
    #[error("unknown thimac `{0}`")]
    UnknownThimac(String),
    #[error("thimac `{thimac}` already has a {kind} stage")]
    DuplicateStage { thimac: String, kind: StageKind },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Model {
    pub name: String,
    pub thimacs: Vec<Thimac>,
    pub stages: Vec<Stage>,
    pub flows: Vec<Flow>,
    pub triggers: Vec<Trigger>,
    pub variables: Vec<Variable>,
}

impl Model {
    pub fn new(name: impl Into<String>) -> Self {
        Model {
            name: name.into(),
            ..Default::default()
        }
    }

    // Parsed and built models store element `i` at position `i`; the
    // fallback scan covers hand-edited or mutated vectors.
    pub fn thimac(&self, id: ThimacId) -> Option<&Thimac> {
        match self.thimacs.get(id.0 as usize) {
            Some(t) if t.id == id => Some(t),
            _ => self.thimacs.iter().find(|t| t.id == id),
        }
    }

    pub fn stage(&self, id: StageId) -> Option<&Stage> {
        match self.stages.get(id.0 as usize) {
            Some(s) if s.id == id => Some(s),
            _ => self.stages.iter().find(|s| s.id == id),
        }
    }

    pub fn flow(&self, id: FlowId) -> Option<&Flow> {
        match self.flows.get(id.0 as usize) {
            Some(f) if f.id == id => Some(f),
            _ => self.flows.iter().find(|f| f.id == id),
        }
    }

    pub fn trigger(&self, id: TriggerId) -> Option<&Trigger> {
        match self.triggers.get(id.0 as usize) {
            Some(t) if t.id == id => Some(t),
            _ => self.triggers.iter().find(|t| t.id == id),
        }
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn thimac_by_name(&self, name: &str) -> Option<&Thimac> {
        self.thimacs.iter().find(|t| t.name == name)
    }

    /// Looks up the stage of `kind` owned by the thimac named `thimac`.
    pub fn stage_by_path(&self, thimac: &str, kind: StageKind) -> Option<&Stage> {
        let owner = self.thimac_by_name(thimac)?.id;
        self.stages
            .iter()
            .find(|s| s.owner == owner && s.kind == kind)
    }

    /// Parses `Thimac.kind`.
    pub fn stage_by_name(&self, path: &str) -> Option<&Stage> {
        let (thimac, kind) = path.rsplit_once('.')?;
        self.stage_by_path(thimac, StageKind::from_keyword(kind)?)
    }

    pub fn flow_between(&self, from: StageId, to: StageId) -> Option<&Flow> {
        self.flows.iter().find(|f| f.from == from && f.to == to)
    }

    pub fn trigger_between(&self, from: StageId, to: StageId) -> Option<&Trigger> {
        self.triggers.iter().find(|t| t.from == from && t.to == to)
    }

    /// `Thimac.kind`, or a placeholder naming the raw id when dangling.
    pub fn stage_name(&self, id: StageId) -> String {
        match self.stage(id) {
            Some(s) => match self.thimac(s.owner) {
                Some(t) => format!("{}.{}", t.name, s.kind),
                None => format!("{}.{}", s.owner, s.kind),
            },
            None => id.to_string(),
        }
    }

    pub fn element_name(&self, id: ElementId) -> String {
        match id {
            ElementId::Stage(s) => self.stage_name(s),
            ElementId::Flow(f) => match self.flow(f) {
                Some(f) => format!("{} -> {}", self.stage_name(f.from), self.stage_name(f.to)),
                None => f.to_string(),
            },
            ElementId::Trigger(t) => match self.trigger(t) {
                Some(t) => format!("{} => {}", self.stage_name(t.from), self.stage_name(t.to)),
                None => t.to_string(),
            },
        }
    }

    /// Every stage, flow and trigger of the model.
    pub fn elements(&self) -> BTreeSet<ElementId> {
        self.stages
            .iter()
            .map(|s| ElementId::Stage(s.id))
            .chain(self.flows.iter().map(|f| ElementId::Flow(f.id)))
            .chain(self.triggers.iter().map(|t| ElementId::Trigger(t.id)))
            .collect()
    }

    pub fn contains_element(&self, id: ElementId) -> bool {
        match id {
            ElementId::Stage(s) => self.stage(s).is_some(),
            ElementId::Flow(f) => self.flow(f).is_some(),
            ElementId::Trigger(t) => self.trigger(t).is_some(),
        }
    }

    /// The thimac itself followed by all of its descendants.
    pub fn descendants(&self, root: ThimacId) -> Vec<ThimacId> {
        let mut out = vec![root];
        let mut i = 0;
        while i < out.len() {
            let current = out[i];
            out.extend(
                self.thimacs
                    .iter()
                    .filter(|t| t.parent == Some(current) && !out.contains(&t.id))
                    .map(|t| t.id)
                    .collect::<Vec<_>>(),
            );
            i += 1;
        }
        out
    }

    pub fn add_thimac(&mut self, name: impl Into<String>, parent: Option<ThimacId>) -> ThimacId {
        let id = ThimacId(next_id(self.thimacs.iter().map(|t| t.id.0)));
        self.thimacs.push(Thimac {
            id,
            name: name.into(),
            aspect: Aspect::default(),
            parent,
            swcm_role: None,
            stages: Vec::new(),
        });
        id
    }

    pub fn add_stage(&mut self, owner: ThimacId, kind: StageKind) -> Result<StageId, ModelError> {
        let thimac = self
            .thimac(owner)
            .ok_or_else(|| ModelError::UnknownThimac(owner.to_string()))?;
        if thimac
            .stages
            .iter()
            .any(|s| self.stage(*s).map(|s| s.kind) == Some(kind))
        {
            return Err(ModelError::DuplicateStage {
                thimac: thimac.name.clone(),
                kind,
            });
        }
        let id = StageId(next_id(self.stages.iter().map(|s| s.id.0)));
        self.stages.push(Stage {
            id,
            kind,
            owner,
            label: None,
            rule: None,
        });
        let pos = self.thimacs.iter().position(|t| t.id == owner).unwrap();
        self.thimacs[pos].stages.push(id);
        Ok(id)
    }

    pub fn add_flow(&mut self, from: StageId, to: StageId) -> FlowId {
        let id = FlowId(next_id(self.flows.iter().map(|f| f.id.0)));
        self.flows.push(Flow { id, from, to });
        id
    }

    pub fn add_trigger(&mut self, from: StageId, to: StageId) -> TriggerId {
        let id = TriggerId(next_id(self.triggers.iter().map(|t| t.id.0)));
        self.triggers.push(Trigger { id, from, to });
        id
    }

    pub fn add_variable(&mut self, name: impl Into<String>, role: VarRole, value: f64) {
        self.variables.push(Variable {
            name: name.into(),
            role,
            value,
            unit: None,
        });
    }

    pub fn stage_mut(&mut self, id: StageId) -> Option<&mut Stage> {
        self.stages.iter_mut().find(|s| s.id == id)
    }

    pub fn thimac_mut(&mut self, id: ThimacId) -> Option<&mut Thimac> {
        self.thimacs.iter_mut().find(|t| t.id == id)
    }

    /// Name-based normal form used for structural comparison.
    pub fn canonical(&self) -> CanonicalModel {
        let thimac_name = |id: ThimacId| {
            self.thimac(id)
                .map(|t| t.name.clone())
                .unwrap_or_else(|| id.to_string())
        };
        let mut thimacs: Vec<_> = self
            .thimacs
            .iter()
            .map(|t| {
                let mut kinds: Vec<_> = t
                    .stages
                    .iter()
                    .map(|s| self.stage(*s).map(|s| s.kind))
                    .collect();
                kinds.sort();
                CanonicalThimac {
                    name: t.name.clone(),
                    aspect: t.aspect,
                    parent: t.parent.map(thimac_name),
                    swcm_role: t.swcm_role,
                    stage_kinds: kinds,
                }
            })
            .collect();
        thimacs.sort_by(|a, b| a.name.cmp(&b.name));

        let mut stages: Vec<_> = self
            .stages
            .iter()
            .map(|s| {
                let rule = s.rule.as_ref().map(|r| {
                    r.map_triggers(|t| match self.trigger(t) {
                        Some(t) => (self.stage_name(t.from), self.stage_name(t.to)),
                        None => (t.to_string(), String::new()),
                    })
                });
                (self.stage_name(s.id), s.label.clone(), rule)
            })
            .collect();
        stages.sort_by(|a, b| a.0.cmp(&b.0));

        let mut flows: Vec<_> = self
            .flows
            .iter()
            .map(|f| (self.stage_name(f.from), self.stage_name(f.to)))
            .collect();
        flows.sort();
        let mut triggers: Vec<_> = self
            .triggers
            .iter()
            .map(|t| (self.stage_name(t.from), self.stage_name(t.to)))
            .collect();
        triggers.sort();
        let mut variables = self.variables.clone();
        variables.sort_by(|a, b| a.name.cmp(&b.name));

        CanonicalModel {
            name: self.name.clone(),
            thimacs,
            stages,
            flows,
            triggers,
            variables,
        }
    }

    /// Equality up to renaming of numeric ids.
    pub fn structurally_eq(&self, other: &Model) -> bool {
        self.canonical() == other.canonical()
    }
}

fn next_id(ids: impl Iterator<Item = u32>) -> u32 {
    ids.max().map_or(0, |m| m + 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalThimac {
    pub name: String,
    pub aspect: Aspect,
    pub parent: Option<String>,
    pub swcm_role: Option<SwcmRole>,
    pub stage_kinds: Vec<Option<StageKind>>,
}

/// Stage path, label and rule with stage references written as paths.
pub type CanonicalStage = (String, Option<String>, Option<Rule<(String, String)>>);

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalModel {
    pub name: String,
    pub thimacs: Vec<CanonicalThimac>,
    pub stages: Vec<CanonicalStage>,
    pub flows: Vec<(String, String)>,
    pub triggers: Vec<(String, String)>,
    pub variables: Vec<Variable>,
}

/// An induced subdiagram of a model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    elements: BTreeSet<ElementId>,
    connected: bool,
}

impl Region {
    pub fn elements(&self) -> &BTreeSet<ElementId> {
        &self.elements
    }

    pub fn contains(&self, id: ElementId) -> bool {
        self.elements.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Weak connectivity over the region's own flows and triggers.
    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn stages(&self) -> impl Iterator<Item = StageId> + '_ {
        self.elements.iter().filter_map(|e| match e {
            ElementId::Stage(s) => Some(*s),
            _ => None,
        })
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.elements.is_subset(&other.elements)
    }
}

/// Builds the region selected by `selection`.
///
/// Listed stages and arcs are taken as-is and every arc pulls in its two
/// endpoint stages. A listed thimac contributes all stages of its subtree
/// together with every arc whose endpoints both lie in the stages
/// contributed by listed thimacs.
pub fn subdiagram(model: &Model, selection: &[ElementRef]) -> Result<Region, ModelError> {
    let mut elements = BTreeSet::new();
    let mut thimac_stages = BTreeSet::new();
    for item in selection {
        match *item {
            ElementRef::Thimac(t) => {
                if model.thimac(t).is_none() {
                    return Err(ModelError::UnknownElement(t.to_string()));
                }
                for member in model.descendants(t) {
                    thimac_stages.extend(
                        model
                            .stages
                            .iter()
                            .filter(|s| s.owner == member)
                            .map(|s| s.id),
                    );
                }
            }
            ElementRef::Element(e) => {
                if !model.contains_element(e) {
                    return Err(ModelError::UnknownElement(e.to_string()));
                }
                elements.insert(e);
                match e {
                    ElementId::Stage(_) => {}
                    ElementId::Flow(f) => {
                        let f = model.flow(f).unwrap();
                        elements.insert(ElementId::Stage(f.from));
                        elements.insert(ElementId::Stage(f.to));
                    }
                    ElementId::Trigger(t) => {
                        let t = model.trigger(t).unwrap();
                        elements.insert(ElementId::Stage(t.from));
                        elements.insert(ElementId::Stage(t.to));
                    }
                }
            }
        }
    }
    if !thimac_stages.is_empty() {
        elements.extend(thimac_stages.iter().map(|s| ElementId::Stage(*s)));
        for f in &model.flows {
            if thimac_stages.contains(&f.from) && thimac_stages.contains(&f.to) {
                elements.insert(ElementId::Flow(f.id));
            }
        }
        for t in &model.triggers {
            if thimac_stages.contains(&t.from) && thimac_stages.contains(&t.to) {
                elements.insert(ElementId::Trigger(t.id));
            }
        }
    }
    let connected = weakly_connected(model, &elements);
    Ok(Region {
        elements,
        connected,
    })
}

/// The region spanning the whole model.
pub fn whole_model(model: &Model) -> Region {
    let elements = model.elements();
    let connected = weakly_connected(model, &elements);
    Region {
        elements,
        connected,
    }
}

fn weakly_connected(model: &Model, elements: &BTreeSet<ElementId>) -> bool {
    let stages: Vec<StageId> = elements
        .iter()
        .filter_map(|e| match e {
            ElementId::Stage(s) => Some(*s),
            _ => None,
        })
        .collect();
    if stages.len() <= 1 {
        return true;
    }
    let mut adjacency: BTreeMap<StageId, Vec<StageId>> = BTreeMap::new();
    let mut link = |a: StageId, b: StageId| {
        adjacency.entry(a).or_default().push(b);
        adjacency.entry(b).or_default().push(a);
    };
    for e in elements {
        match *e {
            ElementId::Flow(f) => {
                if let Some(f) = model.flow(f) {
                    link(f.from, f.to);
                }
            }
            ElementId::Trigger(t) => {
                if let Some(t) = model.trigger(t) {
                    link(t.from, t.to);
                }
            }
            ElementId::Stage(_) => {}
        }
    }
    let mut seen = BTreeSet::from([stages[0]]);
    let mut stack = vec![stages[0]];
    while let Some(s) = stack.pop() {
        for next in adjacency.get(&s).into_iter().flatten() {
            if seen.insert(*next) {
                stack.push(*next);
            }
        }
    }
    stages.iter().all(|s| seen.contains(s))
}

/// Element counts, overall and per stage kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Census {
    pub thimacs: usize,
    pub stages: usize,
    pub flows: usize,
    pub triggers: usize,
    pub variables: usize,
    /// Indexed by [`StageKind::index`].
    pub per_kind: [usize; 5],
}

impl Census {
    pub fn kind(&self, kind: StageKind) -> usize {
        self.per_kind[kind.index()]
    }
}

pub fn element_census(model: &Model) -> Census {
    let mut per_kind = [0; 5];
    for s in &model.stages {
        per_kind[s.kind.index()] += 1;
    }
    Census {
        thimacs: model.thimacs.len(),
        stages: model.stages.len(),
        flows: model.flows.len(),
        triggers: model.triggers.len(),
        variables: model.variables.len(),
        per_kind,
    }
}
