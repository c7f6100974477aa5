//! Discrete-time token-flow execution of a model.
//!
//! All stages that are enabled at a tick fire once in that tick, in firing
//! order. A thing that arrives at a stage fires it on the next tick; a
//! trigger fired at tick `t` makes its target create a new thing at `t + 1`.
//! After firing, a thing follows its single eligible outgoing flow or comes
//! to rest when there is none. Update rules read the variable values from
//! the start of the tick, so assignments within a rule are simultaneous.

mod rng;
mod trace;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use rng::SplitMix64;
pub use trace::{trace_events, Termination, Trace, TraceEntry};

use crate::behavior::BehaviorGraph;
use crate::event::EventCatalog;
use crate::expr::{EvalError, Expr, Rule};
use crate::model::{ElementId, FlowId, Model, StageId, StageKind, ThimacId, TriggerId, VarRole};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{stage}: more than one outgoing flow is eligible")]
    AmbiguousFlow { stage: String },
    #[error("rule at {stage}: division by zero")]
    DivisionByZero { stage: String },
    #[error("rule at {stage}: unknown variable `{name}`")]
    UnknownVariable { stage: String, name: String },
    #[error("rule at {stage}: {detail}")]
    BadProbability { stage: String, detail: String },
    #[error("divergence: {things} things in flight exceeds the limit of {limit}")]
    Divergence { things: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiringOrder {
    /// Order of stage declaration in the model.
    #[default]
    Declaration,
    /// Lexicographic order of `Thimac.kind` names.
    IdSorted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub max_ticks: u64,
    pub seed: u64,
    pub firing_order: FiringOrder,
    /// Divergence guard on things in flight.
    pub max_things: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_ticks: 1000,
            seed: 0,
            firing_order: FiringOrder::Declaration,
            max_things: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThingInstance {
    pub id: u64,
    /// Thimac whose create stage made the thing.
    pub type_thimac: ThimacId,
    pub at: StageId,
    pub payload: Option<BTreeMap<String, f64>>,
    /// Flow the thing arrived by; `None` where it was created.
    arrived_by: Option<FlowId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineState {
    pub tick: u64,
    /// Variable values in declaration order.
    pub variables: Vec<(String, f64)>,
    /// Things waiting to fire the stage they sit at.
    pub things: Vec<ThingInstance>,
    /// Things that came to rest.
    pub resting: usize,
    /// Create stages triggered during the previous tick, with the trigger.
    pending_creates: BTreeMap<StageId, TriggerId>,
    next_thing: u64,
    rng: SplitMix64,
}

impl EngineState {
    pub fn variable(&self, name: &str) -> Option<f64> {
        self.variables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn set_variable(&mut self, name: &str, value: f64) -> bool {
        match self.variables.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => {
                slot.1 = value;
                true
            }
            None => false,
        }
    }

    /// Nothing waits to fire.
    pub fn is_quiescent(&self) -> bool {
        self.tick > 0 && self.things.is_empty() && self.pending_creates.is_empty()
    }
}

/// Resolves a firing to the catalog event it instantiates: among the
/// chronology events whose region holds the fired stage, prefer one that
/// also holds the arc the thing came by, then take the earliest in the
/// catalog.
struct EventMapper {
    candidates: Vec<(String, BTreeSet<ElementId>)>,
}

impl EventMapper {
    fn new(catalog: &EventCatalog, graph: &BehaviorGraph) -> Self {
        EventMapper {
            candidates: catalog
                .iter()
                .filter(|e| graph.is_node(&e.id))
                .map(|e| (e.id.clone(), e.region.elements().clone()))
                .collect(),
        }
    }

    fn map(&self, stage: StageId, via: Option<ElementId>) -> Option<String> {
        let holding = || {
            self.candidates
                .iter()
                .filter(|(_, r)| r.contains(&ElementId::Stage(stage)))
        };
        via.and_then(|v| holding().find(|(_, r)| r.contains(&v)))
            .or_else(|| holding().next())
            .map(|(id, _)| id.clone())
    }
}

pub struct Engine<'m> {
    model: &'m Model,
    config: EngineConfig,
    /// Position of each stage in firing order.
    rank: BTreeMap<StageId, usize>,
    flows_out: BTreeMap<StageId, Vec<(FlowId, StageId, bool)>>,
    triggers_out: BTreeMap<StageId, Vec<(TriggerId, StageId)>>,
    spontaneous: Vec<StageId>,
    mapper: Option<EventMapper>,
    terminal: BTreeSet<String>,
}

struct Firing {
    stage: StageId,
    thing: ThingInstance,
    via: Option<ElementId>,
}

impl<'m> Engine<'m> {
    pub fn new(model: &'m Model, config: EngineConfig) -> Result<Self, EngineError> {
        if config.max_ticks == 0 {
            return Err(EngineError::Config("max_ticks must be at least 1".into()));
        }
        let mut order: Vec<StageId> = model.stages.iter().map(|s| s.id).collect();
        if config.firing_order == FiringOrder::IdSorted {
            order.sort_by_key(|s| model.stage_name(*s));
        }
        let rank = order.iter().enumerate().map(|(i, s)| (*s, i)).collect();

        let owner = |s: StageId| model.stage(s).map(|s| s.owner);
        let mut flows_out: BTreeMap<StageId, Vec<_>> = BTreeMap::new();
        for f in &model.flows {
            let cross = owner(f.from) != owner(f.to);
            flows_out
                .entry(f.from)
                .or_default()
                .push((f.id, f.to, cross));
        }
        let mut triggers_out: BTreeMap<StageId, Vec<_>> = BTreeMap::new();
        let mut triggered = BTreeSet::new();
        for t in &model.triggers {
            triggers_out.entry(t.from).or_default().push((t.id, t.to));
            triggered.insert(t.to);
        }
        let spontaneous = model
            .stages
            .iter()
            .filter(|s| s.kind == StageKind::Create && !triggered.contains(&s.id))
            .map(|s| s.id)
            .collect();
        Ok(Engine {
            model,
            config,
            rank,
            flows_out,
            triggers_out,
            spontaneous,
            mapper: None,
            terminal: BTreeSet::new(),
        })
    }

    /// Maps firings to events and stops a run once a terminal event outside
    /// every recurrence has occurred.
    pub fn with_events(mut self, catalog: &EventCatalog, graph: &BehaviorGraph) -> Self {
        self.mapper = Some(EventMapper::new(catalog, graph));
        self.terminal = graph
            .terminal()
            .into_iter()
            .filter(|e| !graph.in_recurrence(e))
            .collect();
        self
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn initial_state(&self) -> EngineState {
        EngineState {
            tick: 0,
            variables: self
                .model
                .variables
                .iter()
                .map(|v| (v.name.clone(), v.value))
                .collect(),
            things: Vec::new(),
            resting: 0,
            pending_creates: BTreeMap::new(),
            next_thing: 0,
            rng: SplitMix64::new(self.config.seed),
        }
    }

    fn new_thing(&self, state: &mut EngineState, stage: StageId) -> ThingInstance {
        let id = state.next_thing;
        state.next_thing += 1;
        ThingInstance {
            id,
            type_thimac: self.model.stage(stage).expect("stage of model").owner,
            at: stage,
            payload: None,
            arrived_by: None,
        }
    }

    /// Fires every enabled stage once and advances the tick.
    pub fn step(&self, state: &mut EngineState) -> Result<Vec<TraceEntry>, EngineError> {
        let mut firings: Vec<Firing> = Vec::new();
        if state.tick == 0 {
            for s in &self.spontaneous {
                let thing = self.new_thing(state, *s);
                firings.push(Firing {
                    stage: *s,
                    thing,
                    via: None,
                });
            }
        }
        for (stage, trigger) in std::mem::take(&mut state.pending_creates) {
            let thing = self.new_thing(state, stage);
            firings.push(Firing {
                stage,
                thing,
                via: Some(ElementId::Trigger(trigger)),
            });
        }
        for thing in std::mem::take(&mut state.things) {
            firings.push(Firing {
                stage: thing.at,
                via: thing.arrived_by.map(ElementId::Flow),
                thing,
            });
        }
        firings.sort_by_key(|f| (self.rank[&f.stage], f.thing.id));

        let snapshot = state.variables.clone();
        let lookup = |name: &str| snapshot.iter().find(|(n, _)| n == name).map(|(_, v)| *v);
        let mut entries = Vec::with_capacity(firings.len());
        let mut moved = Vec::new();
        for Firing {
            stage,
            mut thing,
            via,
        } in firings
        {
            let s = self.model.stage(stage).expect("stage of model");
            let stage_name = self.model.stage_name(stage);
            let eval = |e: &Expr| {
                e.eval(&lookup).map_err(|err| match err {
                    EvalError::DivisionByZero => EngineError::DivisionByZero {
                        stage: stage_name.clone(),
                    },
                    EvalError::UnknownVariable(name) => EngineError::UnknownVariable {
                        stage: stage_name.clone(),
                        name,
                    },
                })
            };

            let mut outcome = None;
            let mut suppressed = BTreeSet::new();
            match &s.rule {
                None => {}
                Some(Rule::Update(assignments)) => {
                    let values = assignments
                        .iter()
                        .map(|a| eval(&a.value))
                        .collect::<Result<Vec<_>, _>>()?;
                    for (a, v) in assignments.iter().zip(values) {
                        if !state.set_variable(&a.target, v) {
                            return Err(EngineError::UnknownVariable {
                                stage: stage_name.clone(),
                                name: a.target.clone(),
                            });
                        }
                    }
                }
                Some(Rule::Choose(outcomes)) => {
                    let probs = outcomes
                        .iter()
                        .map(|o| eval(&o.probability))
                        .collect::<Result<Vec<_>, _>>()?;
                    check_distribution(&probs, &stage_name)?;
                    let u = state.rng.next_f64();
                    let mut cumulative = 0.0;
                    let mut chosen = outcomes.len() - 1;
                    for (i, p) in probs.iter().enumerate() {
                        cumulative += p;
                        if u < cumulative {
                            chosen = i;
                            break;
                        }
                    }
                    for (i, o) in outcomes.iter().enumerate() {
                        if i != chosen {
                            suppressed.insert(o.trigger);
                        }
                    }
                    outcome = Some(outcomes[chosen].label.clone());
                }
            }

            for (trigger, target) in self.triggers_out.get(&stage).into_iter().flatten() {
                if !suppressed.contains(trigger) {
                    state.pending_creates.entry(*target).or_insert(*trigger);
                }
            }

            let event = self.mapper.as_ref().and_then(|m| m.map(stage, via));
            let variables = self
                .model
                .variables
                .iter()
                .filter(|v| v.role == VarRole::State)
                .map(|v| (v.name.clone(), state.variable(&v.name).unwrap_or(v.value)))
                .collect();
            entries.push(TraceEntry {
                tick: state.tick,
                stage,
                stage_name: stage_name.clone(),
                thing: thing.id,
                event,
                via,
                outcome,
                variables,
            });

            let arrived_cross = thing.arrived_by.map(|f| {
                self.model
                    .flow(f)
                    .is_some_and(|f| self.model.stage(f.from).map(|x| x.owner) != Some(s.owner))
            });
            let candidates: Vec<_> = self
                .flows_out
                .get(&stage)
                .into_iter()
                .flatten()
                .filter(|(_, _, cross)| {
                    // A transfer stage is the machine's port: what came in
                    // from outside goes inward and vice versa.
                    s.kind != StageKind::Transfer || (arrived_cross != Some(*cross))
                })
                .collect();
            match candidates.as_slice() {
                [] => state.resting += 1,
                [(flow, to, _)] => {
                    thing.at = *to;
                    thing.arrived_by = Some(*flow);
                    moved.push(thing);
                }
                _ => return Err(EngineError::AmbiguousFlow { stage: stage_name }),
            }
        }
        state.things = moved;
        let in_flight = state.things.len() + state.pending_creates.len();
        if in_flight > self.config.max_things {
            return Err(EngineError::Divergence {
                things: in_flight,
                limit: self.config.max_things,
            });
        }
        state.tick += 1;
        Ok(entries)
    }

    pub fn run(&self) -> Result<Trace, EngineError> {
        let mut state = self.initial_state();
        self.run_from(&mut state)
    }

    pub fn run_from(&self, state: &mut EngineState) -> Result<Trace, EngineError> {
        let mut entries = Vec::new();
        let mut warnings = Vec::new();
        let termination = loop {
            if state.tick >= self.config.max_ticks {
                warnings.push(format!(
                    "run reached max_ticks = {} before a terminal event",
                    self.config.max_ticks
                ));
                break Termination::MaxTicks;
            }
            let fired = self.step(state)?;
            let terminal = fired
                .iter()
                .filter_map(|e| e.event.as_ref())
                .find(|e| self.terminal.contains(*e))
                .cloned();
            entries.extend(fired);
            if let Some(e) = terminal {
                self.finish_event(state, &e, &mut entries)?;
                break Termination::TerminalEvent(e);
            }
            if state.is_quiescent() {
                break Termination::Quiescent;
            }
        };
        Ok(Trace {
            seed: self.config.seed,
            entries,
            ticks: state.tick,
            termination,
            warnings,
        })
    }
}

impl Engine<'_> {
    /// Lets the terminal event `event` run to completion: ticks are kept
    /// while everything they fire maps to `event` or to no event. The first
    /// tick that would fire anything else is discarded.
    fn finish_event(
        &self,
        state: &mut EngineState,
        event: &str,
        entries: &mut Vec<TraceEntry>,
    ) -> Result<(), EngineError> {
        while !state.is_quiescent() && state.tick < self.config.max_ticks {
            let mut trial = state.clone();
            let fired = self.step(&mut trial)?;
            if fired.is_empty()
                || fired
                    .iter()
                    .any(|f| f.event.as_deref().is_some_and(|e| e != event))
            {
                break;
            }
            *state = trial;
            entries.extend(fired);
        }
        Ok(())
    }
}

fn check_distribution(probs: &[f64], stage: &str) -> Result<(), EngineError> {
    let bad = |detail: String| EngineError::BadProbability {
        stage: stage.to_string(),
        detail,
    };
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(bad(format!("probability {p} is outside [0, 1]")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > crate::info::SUM_TOLERANCE {
        return Err(bad(format!("probabilities sum to {sum}")));
    }
    Ok(())
}

/// Runs `model` once with event mapping.
pub fn run(
    model: &Model,
    catalog: &EventCatalog,
    graph: &BehaviorGraph,
    config: EngineConfig,
) -> Result<Trace, EngineError> {
    Engine::new(model, config)?
        .with_events(catalog, graph)
        .run()
}
