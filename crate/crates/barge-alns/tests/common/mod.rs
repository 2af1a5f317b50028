//! Instance corpus shared by the integration suites.
//!
//! Everything here is built on the straight-line network from the test kit:
//! real nodes sit at x = 10, 20, 30, ... with the depot at the origin, an
//! hour of travel per 10 km, two tugboats, wide windows unless a builder
//! narrows them. The tweaks below are chosen so that every instance stays
//! solvable while exercising a distinct shape of the model.

use barge_alns::model::{Instance, Window};
use barge_alns::testkit;

/// Relative gap of a found loss against a reference optimum.
pub fn rel_gap(found: f64, exact: f64) -> f64 {
    (found - exact) / exact.abs().max(1e-12)
}

/// Tiny instances, at most ten real nodes each, mixing laden-only,
/// empty-only, and cooperative shapes where demand exceeds tow capacity.
pub fn tiny_corpus() -> Vec<(&'static str, Instance)> {
    let mut out: Vec<(&'static str, Instance)> = Vec::new();

    out.push(("pair", testkit::line_instance(1, 0, 0)));

    let mut raw = testkit::raw_line_instance(2, 0, 0);
    raw.orders_f[1].destination_window = Window(0.0, 40.0);
    out.push(("two-pairs-windowed", Instance::build(raw).unwrap()));

    let mut raw = testkit::raw_line_instance(3, 0, 0);
    raw.tugboats[0].cost_per_distance = 0.5;
    raw.tugboats[1].cost_per_distance = 0.2;
    out.push(("three-pairs-distance", Instance::build(raw).unwrap()));

    out.push(("lone-delivery", testkit::line_instance(0, 1, 1)));

    let mut raw = testkit::raw_line_instance(0, 1, 2);
    raw.orders_e[0].required_barges = 2;
    out.push(("double-delivery", Instance::build(raw).unwrap()));

    let mut raw = testkit::raw_line_instance(0, 2, 2);
    raw.barges[1].idle_until = 30.0;
    out.push(("two-orders-readiness", Instance::build(raw).unwrap()));

    let mut raw = testkit::raw_line_instance(0, 1, 3);
    raw.orders_e[0].required_barges = 3;
    raw.params.capacity = 2;
    out.push(("split-haul", Instance::build(raw).unwrap()));

    let mut raw = testkit::raw_line_instance(1, 1, 2);
    raw.orders_e[0].required_barges = 2;
    out.push(("mixed", Instance::build(raw).unwrap()));

    let mut raw = testkit::raw_line_instance(2, 1, 2);
    raw.params.capacity = 2;
    out.push(("mixed-narrow", Instance::build(raw).unwrap()));

    let mut raw = testkit::raw_line_instance(1, 1, 3);
    raw.orders_e[0].required_barges = 3;
    raw.params.capacity = 2;
    out.push(("mixed-split", Instance::build(raw).unwrap()));

    out
}

/// Harsher tiny universes whose enumerations mix clean and violating
/// candidates: squeezed hours, unit capacity, walls of readiness or
/// window-close times.
pub fn harsh_corpus() -> Vec<(&'static str, Instance)> {
    let mut out: Vec<(&'static str, Instance)> = Vec::new();

    let mut raw = testkit::raw_line_instance(2, 0, 0);
    raw.tugboats[0].max_working_time = 6.0;
    out.push(("hours-squeeze", Instance::build(raw).unwrap()));

    let mut raw = testkit::raw_line_instance(0, 1, 2);
    raw.orders_e[0].required_barges = 2;
    raw.params.capacity = 1;
    out.push(("capacity-one", Instance::build(raw).unwrap()));

    let mut raw = testkit::raw_line_instance(0, 1, 1);
    raw.barges[0].idle_until = 12.0;
    raw.orders_e[0].window = Window(0.0, 10.0);
    out.push(("readiness-wall", Instance::build(raw).unwrap()));

    let mut raw = testkit::raw_line_instance(0, 1, 2);
    raw.orders_e[0].required_barges = 2;
    raw.orders_e[0].window = Window(0.0, 5.0);
    out.push(("tight-visit", Instance::build(raw).unwrap()));

    let mut raw = testkit::raw_line_instance(0, 1, 2);
    raw.orders_e[0].required_barges = 2;
    raw.tugboats[0].max_working_time = 7.0;
    raw.tugboats[1].max_working_time = 7.0;
    out.push(("hour-wall", Instance::build(raw).unwrap()));

    let mut raw = testkit::raw_line_instance(1, 1, 2);
    raw.orders_e[0].required_barges = 2;
    raw.orders_f[0].destination_window = Window(0.0, 3.0);
    out.push(("mixed-late", Instance::build(raw).unwrap()));

    let mut raw = testkit::raw_line_instance(1, 1, 1);
    raw.params.capacity = 1;
    out.push(("unit-mixed", Instance::build(raw).unwrap()));

    let mut raw = testkit::raw_line_instance(3, 0, 0);
    raw.params.capacity = 1;
    out.push(("unit-pairs", Instance::build(raw).unwrap()));

    out.push(("barge-surplus", testkit::line_instance(0, 2, 3)));

    let mut raw = testkit::raw_line_instance(2, 0, 0);
    raw.tugboats.truncate(1);
    raw.tugboats[0].max_working_time = 8.0;
    out.push(("single-tug", Instance::build(raw).unwrap()));

    out
}
