//! The example models shipped with the library.

use crate::behavior::{BehaviorError, BehaviorGraph, BehaviorSpec};
use crate::dsl::{self, Diagnostic, Document, SourceText};
use crate::event::{CatalogOptions, EventCatalog, EventError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BundledModel {
    pub name: &'static str,
    pub file: &'static str,
    pub provenance: &'static str,
    pub source: &'static str,
}

pub const BUNDLED: [BundledModel; 3] = [
    BundledModel {
        name: "predator_prey",
        file: "predator_prey.tm",
        provenance: "hare and lynx population recurrences as a recurring chain of events",
        source: include_str!("../models/predator_prey.tm"),
    },
    BundledModel {
        name: "tile",
        file: "tile.tm",
        provenance: "wind-blown tile and a man, with two exclusive outcomes",
        source: include_str!("../models/tile.tm"),
    },
    BundledModel {
        name: "coin",
        file: "coin.tm",
        provenance: "fair coin toss feeding a source-to-destination communication chain",
        source: include_str!("../models/coin.tm"),
    },
];

pub fn get(name: &str) -> Option<&'static BundledModel> {
    BUNDLED.iter().find(|b| b.name == name)
}

impl BundledModel {
    pub fn text(&self) -> SourceText {
        SourceText {
            text: self.source.to_string(),
            origin: format!("bundled:{}", self.name),
        }
    }

    pub fn document(&self) -> Result<Document, Vec<Diagnostic>> {
        dsl::parse(&self.text())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
    Parse(Vec<Diagnostic>),
    #[error(transparent)]
    Event(#[from] EventError),
    #[error(transparent)]
    Behavior(#[from] BehaviorError),
}

/// A document with its event catalog and behavior graph built.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub document: Document,
    pub catalog: EventCatalog,
    /// Absent when the document has neither events nor a behavior section.
    pub graph: Option<BehaviorGraph>,
}

/// Builds the catalog and behavior graph of `document`. Without a behavior
/// section every event is its own unordered chronology node.
pub fn assemble(document: Document, options: CatalogOptions) -> Result<Loaded, LoadError> {
    let catalog = EventCatalog::from_decls(&document.model, &document.events, options)?;
    let graph = match &document.behavior {
        None if catalog.is_empty() => None,
        spec => Some(BehaviorGraph::build(
            &catalog,
            &spec.clone().unwrap_or_else(BehaviorSpec::default),
        )?),
    };
    Ok(Loaded {
        document,
        catalog,
        graph,
    })
}

pub fn load(name: &str) -> Option<Result<Loaded, LoadError>> {
    get(name).map(|b| {
        b.document()
            .map_err(LoadError::Parse)
            .and_then(|d| assemble(d, CatalogOptions::default()))
    })
}
