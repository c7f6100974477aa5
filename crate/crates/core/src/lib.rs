//! Executable thinging-machine (TM) conceptual models.
//!
//! A model is authored in the `.tm` language ([`dsl`]), checked for
//! structural soundness ([`validate`]), decomposed into events ([`event`])
//! whose chronology forms a behavior graph ([`behavior`]), and executed as a
//! discrete-time token flow ([`engine`]). [`info`] accounts for the Shannon
//! information of simulated outcomes and [`render`] emits DOT diagrams.

pub mod behavior;
pub mod bundled;
pub mod dsl;
pub mod engine;
pub mod event;
pub mod expr;
pub mod info;
pub mod model;
pub mod render;
pub mod validate;

pub use behavior::BehaviorGraph;
pub use dsl::{parse, serialize, Document};
pub use event::{Event, EventCatalog};
pub use model::{Model, StageKind};
pub use validate::{validate_static, RuleId, ValidationReport};
