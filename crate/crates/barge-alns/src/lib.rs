//! Solver kit for multi-trip tugboat scheduling with laden and empty barge moves.
//!
//! A fleet of tugboats serves two kinds of transport orders on a port network:
//! laden orders (tow one loaded barge from an origin berth to a destination
//! berth) and empty-barge orders (collect a number of idle empty barges and
//! deliver them to a destination port, possibly split over two tugboats and
//! up to two visits each). Tugboats tow at most `capacity` barges at a time,
//! nodes carry time windows, and each tugboat has a working-hours limit.
//!
//! The crate provides the data model, schedule decoding and loss evaluation,
//! a constraint validator, a constructive heuristic, destroy/repair operators
//! with an adaptive operator controller (roulette-wheel selection, segment
//! weight updates, simulated-annealing acceptance), an exhaustive oracle for
//! tiny instances, an LP-format exporter for the integer-programming model,
//! synthetic instance generation, and SVG/GeoJSON reporting.

pub mod adaptive;
pub mod construct;
pub mod destroy;
pub mod engine;
pub mod eval;
pub mod generate;
pub mod insert;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod repair;
pub mod report;
pub mod testkit;
pub mod validate;

pub use engine::{solve, SearchConfig, SearchOutcome};
pub use eval::{loss, propagate, LossBreakdown, Schedule};
pub use lp::{export_lp, LpError, MipConfig};
pub use model::{Instance, Solution};
pub use validate::{validate, Constraint, Violation};
