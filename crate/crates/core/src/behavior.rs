//! Chronology of events: succession, recurrence, exclusive branching and
//! containment, with run enumeration and prefix conformance.
//!
//! Successions form a DAG over the participating events. A recurrence adds
//! back-edges that repeat a subsequence; a new pass starts each time one is
//! taken. An exclusive group is a list of arms (sets of events); within one
//! pass a run may touch events of at most one arm of each group, which lets
//! a choice made early (a coin landing face up) constrain later events.
//! Containment is an annotation only and never changes the runs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::EventCatalog;

/// Behavior section as written in a `.tm` file.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BehaviorSpec {
    pub successions: Vec<(String, String)>,
    /// Groups of arms; a singleton arm is a plain exclusive event.
    pub exclusive_groups: Vec<Vec<Vec<String>>>,
    pub recurrences: Vec<String>,
    pub containments: Vec<(String, Vec<String>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BehaviorError {
    #[error("unknown event {0}")]
    UnknownEvent(String),
    #[error("region of {container} does not contain the region of {event}")]
    ContainmentRegion { container: String, event: String },
    #[error("behavior graph has no events")]
    Empty,
    #[error("successions form a cycle through {0}; use a recurrence instead")]
    CyclicSuccession(String),
    #[error("recurrence anchor {0} is neither a succession event nor a container")]
    RecurrenceWithoutScope(String),
    #[error("{0} appears more than once in an exclusive group")]
    DuplicateGroupMember(String),
    #[error("run enumeration exceeded the limit of {0} runs")]
    RunLimitExceeded(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackEdge {
    pub from: String,
    pub to: String,
    /// Index into the graph's recurrences.
    pub recurrence: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Conformant,
    Violation {
        index: usize,
        event: String,
        reason: String,
    },
}

impl Verdict {
    pub fn is_conformant(&self) -> bool {
        matches!(self, Verdict::Conformant)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Conformant => f.write_str("conformant"),
            Verdict::Violation {
                index,
                event,
                reason,
            } => write!(f, "violation at index {index} ({event}): {reason}"),
        }
    }
}

/// Default ceiling for [`BehaviorGraph::enumerate_runs`].
pub const DEFAULT_RUN_LIMIT: usize = 100_000;

type Choices = Vec<Option<usize>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehaviorGraph {
    /// Catalog event ids; all other fields index into this list.
    events: Vec<String>,
    nodes: BTreeSet<usize>,
    successors: BTreeMap<usize, BTreeSet<usize>>,
    back: BTreeMap<usize, BTreeSet<(usize, usize)>>,
    groups: Vec<Vec<BTreeSet<usize>>>,
    membership: BTreeMap<usize, Vec<(usize, usize)>>,
    recurrence_scopes: Vec<(usize, BTreeSet<usize>)>,
    containments: Vec<(usize, Vec<usize>)>,
    initial: BTreeSet<usize>,
    terminal: BTreeSet<usize>,
}

pub fn build_behavior(
    catalog: &EventCatalog,
    spec: &BehaviorSpec,
) -> Result<BehaviorGraph, BehaviorError> {
    BehaviorGraph::build(catalog, spec)
}

impl BehaviorGraph {
    pub fn build(catalog: &EventCatalog, spec: &BehaviorSpec) -> Result<Self, BehaviorError> {
        let index = |id: &String| {
            catalog
                .index_of(id)
                .ok_or_else(|| BehaviorError::UnknownEvent(id.clone()))
        };
        let events: Vec<String> = catalog.iter().map(|e| e.id.clone()).collect();

        let mut containments = Vec::new();
        for (container, inner) in &spec.containments {
            let c = index(container)?;
            let mut members = Vec::new();
            for e in inner {
                let i = index(e)?;
                if !catalog.events()[i]
                    .region
                    .is_subset(&catalog.events()[c].region)
                {
                    return Err(BehaviorError::ContainmentRegion {
                        container: container.clone(),
                        event: e.clone(),
                    });
                }
                members.push(i);
            }
            containments.push((c, members));
        }
        let containers: BTreeSet<usize> = containments.iter().map(|(c, _)| *c).collect();

        let mut successors: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        let mut nodes = BTreeSet::new();
        for (a, b) in &spec.successions {
            let (a, b) = (index(a)?, index(b)?);
            successors.entry(a).or_default().insert(b);
            nodes.insert(a);
            nodes.insert(b);
        }

        let mut groups = Vec::new();
        let mut membership: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for (g, arms) in spec.exclusive_groups.iter().enumerate() {
            let mut seen = BTreeSet::new();
            let mut resolved = Vec::new();
            for (a, arm) in arms.iter().enumerate() {
                let mut set = BTreeSet::new();
                for e in arm {
                    let i = index(e)?;
                    if !seen.insert(i) {
                        return Err(BehaviorError::DuplicateGroupMember(e.clone()));
                    }
                    set.insert(i);
                    nodes.insert(i);
                    membership.entry(i).or_default().push((g, a));
                }
                resolved.push(set);
            }
            groups.push(resolved);
        }

        if spec.successions.is_empty() && groups.is_empty() {
            nodes = (0..events.len())
                .filter(|i| !containers.contains(i))
                .collect();
        }
        if nodes.is_empty() {
            return Err(BehaviorError::Empty);
        }

        if let Some(e) = find_cycle(&nodes, &successors) {
            return Err(BehaviorError::CyclicSuccession(events[e].clone()));
        }

        let mut predecessors: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (a, bs) in &successors {
            for b in bs {
                predecessors.entry(*b).or_default().insert(*a);
            }
        }
        let initial = nodes
            .iter()
            .copied()
            .filter(|n| predecessors.get(n).is_none_or(|p| p.is_empty()))
            .collect();
        let terminal = nodes
            .iter()
            .copied()
            .filter(|n| successors.get(n).is_none_or(|s| s.is_empty()))
            .collect();

        let mut back: BTreeMap<usize, BTreeSet<(usize, usize)>> = BTreeMap::new();
        let mut recurrence_scopes = Vec::new();
        for (r, anchor) in spec.recurrences.iter().enumerate() {
            let a = index(anchor)?;
            let scope: BTreeSet<usize> = if nodes.contains(&a) {
                reachable(a, &successors)
            } else if let Some((_, inner)) = containments.iter().find(|(c, _)| *c == a) {
                inner
                    .iter()
                    .copied()
                    .filter(|i| nodes.contains(i))
                    .collect()
            } else {
                return Err(BehaviorError::RecurrenceWithoutScope(anchor.clone()));
            };
            if scope.is_empty() {
                return Err(BehaviorError::RecurrenceWithoutScope(anchor.clone()));
            }
            let inside = |set: Option<&BTreeSet<usize>>| {
                set.is_some_and(|s| s.iter().any(|x| scope.contains(x)))
            };
            let sources: Vec<usize> = scope
                .iter()
                .copied()
                .filter(|n| !inside(predecessors.get(n)))
                .collect();
            let sinks: Vec<usize> = scope
                .iter()
                .copied()
                .filter(|n| !inside(successors.get(n)))
                .collect();
            for s in &sinks {
                for t in &sources {
                    back.entry(*s).or_default().insert((*t, r));
                }
            }
            recurrence_scopes.push((a, scope));
        }

        Ok(BehaviorGraph {
            events,
            nodes,
            successors,
            back,
            groups,
            membership,
            recurrence_scopes,
            containments,
            initial,
            terminal,
        })
    }

    fn names(&self, set: &BTreeSet<usize>) -> Vec<String> {
        set.iter().map(|i| self.events[*i].clone()).collect()
    }

    pub fn initial(&self) -> Vec<String> {
        self.names(&self.initial)
    }

    pub fn terminal(&self) -> Vec<String> {
        self.names(&self.terminal)
    }

    /// Events that take part in the chronology.
    pub fn node_ids(&self) -> Vec<String> {
        self.names(&self.nodes)
    }

    pub fn is_node(&self, id: &str) -> bool {
        self.position(id).is_some_and(|i| self.nodes.contains(&i))
    }

    pub fn is_terminal(&self, id: &str) -> bool {
        self.position(id)
            .is_some_and(|i| self.terminal.contains(&i))
    }

    pub fn is_container(&self, id: &str) -> bool {
        self.position(id)
            .is_some_and(|i| self.containments.iter().any(|(c, _)| *c == i))
    }

    /// Whether `id` lies in the scope of some recurrence.
    pub fn in_recurrence(&self, id: &str) -> bool {
        self.position(id)
            .is_some_and(|i| self.recurrence_scopes.iter().any(|(_, s)| s.contains(&i)))
    }

    fn position(&self, id: &str) -> Option<usize> {
        self.events.iter().position(|e| e == id)
    }

    pub fn successions(&self) -> Vec<(String, String)> {
        self.successors
            .iter()
            .flat_map(|(a, bs)| bs.iter().map(move |b| (*a, *b)))
            .map(|(a, b)| (self.events[a].clone(), self.events[b].clone()))
            .collect()
    }

    pub fn back_edges(&self) -> Vec<BackEdge> {
        self.back
            .iter()
            .flat_map(|(from, ts)| {
                ts.iter().map(move |(to, r)| BackEdge {
                    from: self.events[*from].clone(),
                    to: self.events[*to].clone(),
                    recurrence: *r,
                })
            })
            .collect()
    }

    /// Exclusive groups as lists of arms.
    pub fn exclusive_groups(&self) -> Vec<Vec<Vec<String>>> {
        self.groups
            .iter()
            .map(|arms| arms.iter().map(|a| self.names(a)).collect())
            .collect()
    }

    pub fn containments(&self) -> Vec<(String, Vec<String>)> {
        self.containments
            .iter()
            .map(|(c, inner)| {
                (
                    self.events[*c].clone(),
                    inner.iter().map(|i| self.events[*i].clone()).collect(),
                )
            })
            .collect()
    }

    /// The first event (in chronology) of every arm of every exclusive
    /// group: the events that carry an outcome.
    pub fn outcome_events(&self) -> Vec<String> {
        let mut out = BTreeSet::new();
        for arms in &self.groups {
            for arm in arms {
                let head = arm.iter().copied().find(|e| {
                    !arm.iter()
                        .any(|o| o != e && reachable(*o, &self.successors).contains(e))
                });
                out.extend(head);
            }
        }
        self.names(&out)
    }

    fn apply_groups(&self, choices: &Choices, node: usize) -> Option<Choices> {
        let mut next = choices.clone();
        for (g, arm) in self.membership.get(&node).into_iter().flatten() {
            match next[*g] {
                Some(chosen) if chosen != *arm => return None,
                _ => next[*g] = Some(*arm),
            }
        }
        Some(next)
    }

    fn fresh_choices(&self) -> Choices {
        vec![None; self.groups.len()]
    }

    /// Every run from an initial to a terminal event, taking each
    /// recurrence back-edge at most `max_recurrence` times, in
    /// lexicographic order of catalog positions.
    pub fn enumerate_runs(&self, max_recurrence: usize) -> Result<Vec<Vec<String>>, BehaviorError> {
        self.enumerate_runs_limited(max_recurrence, DEFAULT_RUN_LIMIT)
    }

    pub fn enumerate_runs_limited(
        &self,
        max_recurrence: usize,
        limit: usize,
    ) -> Result<Vec<Vec<String>>, BehaviorError> {
        let mut search = RunSearch {
            graph: self,
            max_recurrence,
            limit,
            path: Vec::new(),
            counts: vec![0; self.recurrence_scopes.len()],
            runs: Vec::new(),
        };
        for start in &self.initial {
            if let Some(choices) = self.apply_groups(&self.fresh_choices(), *start) {
                search.visit(*start, choices)?;
            }
        }
        let mut runs = search.runs;
        runs.sort();
        runs.dedup();
        Ok(runs
            .into_iter()
            .map(|r| r.into_iter().map(|i| self.events[i].clone()).collect())
            .collect())
    }

    fn steps(&self, from: usize, choices: &Choices) -> Vec<(usize, Choices)> {
        let mut out = Vec::new();
        for next in self.successors.get(&from).into_iter().flatten() {
            if let Some(c) = self.apply_groups(choices, *next) {
                out.push((*next, c));
            }
        }
        for (next, _) in self.back.get(&from).into_iter().flatten() {
            if let Some(c) = self.apply_groups(&self.fresh_choices(), *next) {
                out.push((*next, c));
            }
        }
        out
    }

    fn can_complete(&self, start: &(usize, Choices)) -> bool {
        let mut seen = BTreeSet::from([start.clone()]);
        let mut stack = vec![start.clone()];
        while let Some((node, choices)) = stack.pop() {
            if self.terminal.contains(&node) {
                return true;
            }
            for state in self.steps(node, &choices) {
                if seen.insert(state.clone()) {
                    stack.push(state);
                }
            }
        }
        false
    }

    /// Whether `trace` is a prefix of some run, with recurrences unbounded.
    pub fn conforms<S: AsRef<str>>(&self, trace: &[S]) -> Result<Verdict, BehaviorError> {
        let ids: Vec<usize> = trace
            .iter()
            .map(|s| {
                self.position(s.as_ref())
                    .ok_or_else(|| BehaviorError::UnknownEvent(s.as_ref().to_string()))
            })
            .collect::<Result<_, _>>()?;
        let mut states: BTreeSet<(usize, Choices)> = BTreeSet::new();
        for (i, &event) in ids.iter().enumerate() {
            let violation = |reason: String| Verdict::Violation {
                index: i,
                event: self.events[event].clone(),
                reason,
            };
            if !self.nodes.contains(&event) {
                return Ok(violation("event is not part of the chronology".into()));
            }
            let next: BTreeSet<(usize, Choices)> = if i == 0 {
                if !self.initial.contains(&event) {
                    return Ok(violation("not an initial event".into()));
                }
                self.apply_groups(&self.fresh_choices(), event)
                    .map(|c| (event, c))
                    .into_iter()
                    .collect()
            } else {
                states
                    .iter()
                    .flat_map(|(node, choices)| self.steps(*node, choices))
                    .filter(|(node, _)| *node == event)
                    .collect()
            };
            if next.is_empty() {
                let prev = &self.events[ids[i - 1]];
                let follows = states
                    .iter()
                    .any(|(n, _)| self.successors.get(n).is_some_and(|s| s.contains(&event)));
                let reason = if follows {
                    "excluded by an earlier branch choice in this pass".to_string()
                } else {
                    format!("cannot follow {prev}")
                };
                return Ok(violation(reason));
            }
            let completable: BTreeSet<_> =
                next.into_iter().filter(|s| self.can_complete(s)).collect();
            if completable.is_empty() {
                return Ok(violation("no run can be completed from here".into()));
            }
            states = completable;
        }
        Ok(Verdict::Conformant)
    }
}

struct RunSearch<'g> {
    graph: &'g BehaviorGraph,
    max_recurrence: usize,
    limit: usize,
    path: Vec<usize>,
    counts: Vec<usize>,
    runs: Vec<Vec<usize>>,
}

impl RunSearch<'_> {
    fn visit(&mut self, node: usize, choices: Choices) -> Result<(), BehaviorError> {
        let g = self.graph;
        self.path.push(node);
        if g.terminal.contains(&node) {
            if self.runs.len() >= self.limit {
                return Err(BehaviorError::RunLimitExceeded(self.limit));
            }
            self.runs.push(self.path.clone());
        }
        for next in g.successors.get(&node).into_iter().flatten() {
            if let Some(c) = g.apply_groups(&choices, *next) {
                self.visit(*next, c)?;
            }
        }
        for (next, r) in g.back.get(&node).into_iter().flatten() {
            if self.counts[*r] >= self.max_recurrence {
                continue;
            }
            if let Some(c) = g.apply_groups(&g.fresh_choices(), *next) {
                self.counts[*r] += 1;
                self.visit(*next, c)?;
                self.counts[*r] -= 1;
            }
        }
        self.path.pop();
        Ok(())
    }
}

fn reachable(from: usize, successors: &BTreeMap<usize, BTreeSet<usize>>) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([from]);
    let mut stack = vec![from];
    while let Some(n) = stack.pop() {
        for m in successors.get(&n).into_iter().flatten() {
            if seen.insert(*m) {
                stack.push(*m);
            }
        }
    }
    seen
}

fn find_cycle(
    nodes: &BTreeSet<usize>,
    successors: &BTreeMap<usize, BTreeSet<usize>>,
) -> Option<usize> {
    // Kahn's algorithm; whatever cannot be ordered lies on or behind a cycle.
    let mut indegree: BTreeMap<usize, usize> = nodes.iter().map(|n| (*n, 0)).collect();
    for bs in successors.values() {
        for b in bs {
            *indegree.get_mut(b).unwrap() += 1;
        }
    }
    let mut ready: Vec<usize> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(n, _)| *n)
        .collect();
    let mut ordered = 0;
    while let Some(n) = ready.pop() {
        ordered += 1;
        for m in successors.get(&n).into_iter().flatten() {
            let d = indegree.get_mut(m).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.push(*m);
            }
        }
    }
    if ordered == nodes.len() {
        None
    } else {
        indegree.into_iter().find(|(_, d)| *d > 0).map(|(n, _)| n)
    }
}
