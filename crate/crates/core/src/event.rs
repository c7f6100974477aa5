//! Events: labeled regions of a static model that can be instantiated in
//! time, and checks over a catalog of them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{subdiagram, ElementId, ElementRef, Model, ModelError, Region};

/// An event as written in a `.tm` file, before its region is computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventDecl {
    pub id: String,
    pub description: String,
    pub data_emitting: bool,
    pub elements: Vec<ElementRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub id: String,
    pub description: String,
    pub region: Region,
    /// The event also creates data that is not modeled as an event of its own.
    pub data_emitting: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EventError {
    #[error("event {event}: {source}")]
    UnknownElement { event: String, source: ModelError },
    #[error("event {0}: region is empty")]
    EmptyRegion(String),
    #[error("event {0}: region is not connected")]
    Disconnected(String),
    #[error("duplicate event id {0}")]
    DuplicateEvent(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CatalogOptions {
    /// Accept regions that are not weakly connected.
    pub allow_disconnected: bool,
}

pub fn define_event(
    model: &Model,
    elements: &[ElementRef],
    id: &str,
    description: &str,
) -> Result<Event, EventError> {
    define_event_with(model, elements, id, description, CatalogOptions::default())
}

pub fn define_event_with(
    model: &Model,
    elements: &[ElementRef],
    id: &str,
    description: &str,
    options: CatalogOptions,
) -> Result<Event, EventError> {
    if elements.is_empty() {
        return Err(EventError::EmptyRegion(id.to_string()));
    }
    let region = subdiagram(model, elements).map_err(|source| EventError::UnknownElement {
        event: id.to_string(),
        source,
    })?;
    if region.is_empty() {
        return Err(EventError::EmptyRegion(id.to_string()));
    }
    if !region.is_connected() && !options.allow_disconnected {
        return Err(EventError::Disconnected(id.to_string()));
    }
    Ok(Event {
        id: id.to_string(),
        description: description.to_string(),
        region,
        data_emitting: false,
    })
}

/// Ordered, id-unique list of events over one model.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EventCatalog {
    events: Vec<Event>,
}

impl EventCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_decls(
        model: &Model,
        decls: &[EventDecl],
        options: CatalogOptions,
    ) -> Result<Self, EventError> {
        let mut catalog = EventCatalog::new();
        for d in decls {
            let mut event = define_event_with(model, &d.elements, &d.id, &d.description, options)?;
            event.data_emitting = d.data_emitting;
            catalog.push(event)?;
        }
        Ok(catalog)
    }

    pub fn push(&mut self, event: Event) -> Result<(), EventError> {
        if self.get(&event.id).is_some() {
            return Err(EventError::DuplicateEvent(event.id));
        }
        self.events.push(event);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Event> {
        self.events.iter().find(|e| e.id == id)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.events.iter().position(|e| e.id == id)
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Event> {
        self.events.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Overlap {
    pub first: String,
    pub second: String,
    pub shared: BTreeSet<ElementId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Coverage {
    pub covered: BTreeSet<ElementId>,
    pub uncovered: BTreeSet<ElementId>,
    pub overlaps: Vec<Overlap>,
}

/// Partitions the model's elements into covered and uncovered, and lists
/// every pair of events whose regions intersect (in catalog order).
pub fn coverage_check(catalog: &EventCatalog, model: &Model) -> Coverage {
    let all = model.elements();
    let covered: BTreeSet<ElementId> = catalog
        .iter()
        .flat_map(|e| e.region.elements().iter().copied())
        .filter(|e| all.contains(e))
        .collect();
    let uncovered = all.difference(&covered).copied().collect();
    let mut overlaps = Vec::new();
    for (i, a) in catalog.events.iter().enumerate() {
        for b in &catalog.events[i + 1..] {
            let shared: BTreeSet<ElementId> = a
                .region
                .elements()
                .intersection(b.region.elements())
                .copied()
                .collect();
            if !shared.is_empty() {
                overlaps.push(Overlap {
                    first: a.id.clone(),
                    second: b.id.clone(),
                    shared,
                });
            }
        }
    }
    Coverage {
        covered,
        uncovered,
        overlaps,
    }
}

/// An event without its time dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct State {
    pub event: String,
    pub description: String,
}

pub fn states_of(catalog: &EventCatalog) -> Vec<State> {
    catalog
        .iter()
        .map(|e| State {
            event: e.id.clone(),
            description: e.description.clone(),
        })
        .collect()
}
